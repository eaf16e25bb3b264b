#include "ctdn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ctdn {

namespace {

void check_same_shape(const Image& a, const Image& b) {
    if (a.n != b.n) {
        throw std::invalid_argument("image sizes differ: " + std::to_string(a.n) + " vs " +
                                    std::to_string(b.n));
    }
}

void check_roi(const Image& img, const Roi& roi) {
    if (roi.height < 1 || roi.width < 1) throw std::invalid_argument("empty roi");
    if (roi.row < 0 || roi.col < 0 || roi.row + roi.height > img.n || roi.col + roi.width > img.n) {
        throw std::invalid_argument("roi exceeds image bounds");
    }
}

double image_range(const Image& img) {
    auto [lo, hi] = std::minmax_element(img.data.begin(), img.data.end());
    return *hi - *lo;
}

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double eps = 1e-15;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace

double mse(const Image& a, const Image& b) {
    check_same_shape(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.data.size());
}

double psnr(const Image& a, const Image& b, double peak) {
    if (peak <= 0.0) throw std::invalid_argument("psnr peak must be positive");
    double e = mse(a, b);
    if (e == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / e);
}

double psnr_auto(const Image& ref, const Image& test) {
    return psnr(ref, test, image_range(ref));
}

double ssim(const Image& a, const Image& b, double dynamic_range, int window, double k1, double k2) {
    check_same_shape(a, b);
    if (dynamic_range <= 0.0) throw std::invalid_argument("ssim dynamic range must be positive");
    if (window < 1 || window > a.n) throw std::invalid_argument("ssim window must fit inside the image");

    double c1 = k1 * dynamic_range * k1 * dynamic_range;
    double c2 = k2 * dynamic_range * k2 * dynamic_range;
    int n = a.n, w = window;
    double inv = 1.0 / (w * w);
    double acc = 0.0;
    int count = 0;
    for (int r0 = 0; r0 + w <= n; ++r0) {
        for (int c0 = 0; c0 + w <= n; ++c0) {
            double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
            for (int r = r0; r < r0 + w; ++r) {
                for (int c = c0; c < c0 + w; ++c) {
                    double va = a.at(r, c), vb = b.at(r, c);
                    sa += va;
                    sb += vb;
                    saa += va * va;
                    sbb += vb * vb;
                    sab += va * vb;
                }
            }
            double ma = sa * inv, mb = sb * inv;
            double va = saa * inv - ma * ma;
            double vb = sbb * inv - mb * mb;
            double cov = sab * inv - ma * mb;
            acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                   ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    }
    return acc / count;
}

double ssim_auto(const Image& ref, const Image& test) {
    return ssim(ref, test, image_range(ref));
}

RoiStats roi_stats(const Image& img, const Roi& roi) {
    check_roi(img, roi);
    double sum = 0.0;
    int n = roi.height * roi.width;
    for (int r = roi.row; r < roi.row + roi.height; ++r) {
        for (int c = roi.col; c < roi.col + roi.width; ++c) sum += img.at(r, c);
    }
    double mean = sum / n;
    double ss = 0.0;
    for (int r = roi.row; r < roi.row + roi.height; ++r) {
        for (int c = roi.col; c < roi.col + roi.width; ++c) {
            double d = img.at(r, c) - mean;
            ss += d * d;
        }
    }
    RoiStats st;
    st.mean = mean;
    st.sd = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    return st;
}

double snr(const Image& img, const Roi& roi) {
    RoiStats st = roi_stats(img, roi);
    if (st.sd == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return st.mean / st.sd;
}

double cnr(const Image& img, const Roi& roi1, const Roi& roi2) {
    RoiStats s1 = roi_stats(img, roi1);
    RoiStats s2 = roi_stats(img, roi2);
    double var_sum = s1.sd * s1.sd + s2.sd * s2.sd;
    if (var_sum == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::fabs(s1.mean - s2.mean) / std::sqrt(var_sum);
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("beta parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                   b * std::log(1.0 - x);
    double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

TTestResult paired_t_test(const std::vector<double>& before, const std::vector<double>& after) {
    if (before.size() != after.size()) throw std::invalid_argument("paired arrays differ in length");
    std::size_t n = before.size();
    if (n < 2) throw std::invalid_argument("paired t-test needs at least two pairs");
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += after[i] - before[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = (after[i] - before[i]) - mean;
        ss += d * d;
    }
    if (ss == 0.0) throw std::invalid_argument("paired t-test rejected: zero difference variance");
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    double df = static_cast<double>(n - 1);
    TTestResult res;
    res.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    res.p = regularized_incomplete_beta(df / 2.0, 0.5, df / (df + res.t * res.t));
    return res;
}

ReferenceRow EvalReport::reference_mean() const {
    ReferenceRow m;
    m.id = "mean";
    if (reference_rows.empty()) return m;
    for (const auto& r : reference_rows) {
        m.mse += r.mse;
        m.psnr += r.psnr;
        m.ssim += r.ssim;
    }
    double inv = 1.0 / static_cast<double>(reference_rows.size());
    m.mse *= inv;
    m.psnr *= inv;
    m.ssim *= inv;
    return m;
}

RoiRow EvalReport::roi_mean() const {
    RoiRow m;
    m.id = "mean";
    if (roi_rows.empty()) return m;
    for (const auto& r : roi_rows) {
        m.snr1 += r.snr1;
        m.snr2 += r.snr2;
        m.cnr += r.cnr;
    }
    double inv = 1.0 / static_cast<double>(roi_rows.size());
    m.snr1 *= inv;
    m.snr2 *= inv;
    m.cnr *= inv;
    return m;
}

std::string format_report(const EvalReport& report, char delim) {
    std::ostringstream os;
    os.precision(10);
    if (!report.reference_rows.empty()) {
        os << "id" << delim << "mse" << delim << "psnr" << delim << "ssim" << '\n';
        auto emit = [&](const ReferenceRow& r) {
            os << r.id << delim << r.mse << delim << r.psnr << delim << r.ssim << '\n';
        };
        for (const auto& r : report.reference_rows) emit(r);
        emit(report.reference_mean());
    }
    if (!report.roi_rows.empty()) {
        os << "id" << delim << "snr_roi1" << delim << "snr_roi2" << delim << "cnr" << '\n';
        auto emit = [&](const RoiRow& r) {
            os << r.id << delim << r.snr1 << delim << r.snr2 << delim << r.cnr << '\n';
        };
        for (const auto& r : report.roi_rows) emit(r);
        emit(report.roi_mean());
    }
    if (report.ttest) {
        os << "paired_t_test" << delim << "t" << delim << "p" << '\n';
        os << report.ttest_note << delim << report.ttest->t << delim << report.ttest->p << '\n';
    }
    return os.str();
}

} // namespace ctdn
