#include "ctdn/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ctdn/rng.hpp"
#include "doctest.h"

using namespace ctdn;

namespace {

Image random_image(int n, std::uint64_t seed, double lo = 0.0, double hi = 100.0) {
    Image img(n);
    RngStream rng(seed);
    for (double& v : img.data) v = rng.uniform(lo, hi);
    return img;
}

// Direct per-window SSIM with biased (1/n) statistics; the oracle the
// library must match to 1e-12.
double naive_ssim(const Image& a, const Image& b, double range, int w, double k1, double k2) {
    double c1 = (k1 * range) * (k1 * range);
    double c2 = (k2 * range) * (k2 * range);
    double acc = 0.0;
    int count = 0;
    for (int r0 = 0; r0 + w <= a.n; ++r0) {
        for (int c0 = 0; c0 + w <= a.n; ++c0) {
            std::vector<double> xs, ys;
            for (int r = r0; r < r0 + w; ++r)
                for (int c = c0; c < c0 + w; ++c) {
                    xs.push_back(a.at(r, c));
                    ys.push_back(b.at(r, c));
                }
            double mx = 0, my = 0;
            for (double v : xs) mx += v;
            for (double v : ys) my += v;
            mx /= xs.size();
            my /= ys.size();
            double vx = 0, vy = 0, cov = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                vx += (xs[i] - mx) * (xs[i] - mx);
                vy += (ys[i] - my) * (ys[i] - my);
                cov += (xs[i] - mx) * (ys[i] - my);
            }
            vx /= xs.size();
            vy /= ys.size();
            cov /= xs.size();
            acc += ((2 * mx * my + c1) * (2 * cov + c2)) /
                   ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    }
    return acc / count;
}

} // namespace

TEST_CASE("mse basics") {
    Image a(4, 1.0), b(4, 1.0);
    CHECK(mse(a, b) == 0.0);
    b.data[0] = 5.0; // one pixel off by 4 out of 16 pixels
    CHECK(mse(a, b) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(mse(a, Image(5)), std::invalid_argument);
}

TEST_CASE("psnr hand values and the infinity sentinel") {
    Image a(4, 0.0), b(4, 0.0);
    CHECK(std::isinf(psnr(a, b, 255.0)));
    // mse = 1 against peak 255.
    b.data[0] = 4.0;
    CHECK(mse(a, b) == doctest::Approx(1.0));
    CHECK(psnr(a, b, 255.0) == doctest::Approx(48.1308).epsilon(1e-5));
    CHECK_THROWS_AS(psnr(a, b, 0.0), std::invalid_argument);
}

TEST_CASE("psnr decreases as mse grows") {
    Image ref(8, 0.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double noise : {1.0, 2.0, 4.0, 8.0}) {
        Image t = ref;
        for (std::size_t i = 0; i < t.data.size(); ++i) t.data[i] += (i % 2 ? noise : -noise);
        double cur = psnr(ref, t, 255.0);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("psnr and mse stay consistent on random pairs") {
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_image(8, mix_seed(1000, trial));
        auto b = random_image(8, mix_seed(2000, trial));
        double m = mse(a, b);
        CHECK(psnr(a, b, 300.0) == doctest::Approx(10.0 * std::log10(300.0 * 300.0 / m)).epsilon(1e-12));
    }
}

TEST_CASE("ssim identity, symmetry, and shift penalty") {
    auto a = random_image(16, 4);
    CHECK(ssim(a, a, 100.0) == doctest::Approx(1.0).epsilon(1e-12));

    auto b = random_image(16, 5);
    CHECK(ssim(a, b, 100.0) == doctest::Approx(ssim(b, a, 100.0)).epsilon(1e-12));
    CHECK(ssim(a, b, 100.0) < 1.0);
    CHECK(ssim(a, b, 100.0) >= -1.0);

    Image shifted = a;
    for (double& v : shifted.data) v += 500.0;
    CHECK(ssim(a, shifted, 100.0) < 1.0);

    CHECK_THROWS_AS(ssim(a, Image(8), 100.0), std::invalid_argument);
    CHECK_THROWS_AS(ssim(a, a, 100.0, 17), std::invalid_argument);
}

TEST_CASE("ssim matches the naive reference implementation") {
    auto a = random_image(8, 6);
    auto b = random_image(8, 7);
    CHECK(ssim(a, b, 100.0, 8) == doctest::Approx(naive_ssim(a, b, 100.0, 8, 0.01, 0.03)).epsilon(1e-12));

    // Multiple window positions.
    auto c = random_image(12, 8);
    auto d = random_image(12, 9);
    CHECK(ssim(c, d, 80.0, 8) == doctest::Approx(naive_ssim(c, d, 80.0, 8, 0.01, 0.03)).epsilon(1e-12));
    CHECK(ssim(c, d, 80.0, 5) == doctest::Approx(naive_ssim(c, d, 80.0, 5, 0.01, 0.03)).epsilon(1e-12));
}

TEST_CASE("roi statistics and snr/cnr hand examples") {
    // Row 0: {2,4,6} -> mean 4, unbiased sd 2. Row 1: {7,10,13} -> mean 10,
    // sd 3. Row 2: {2,6,10} -> mean 6, sd 4.
    Image img(4, 0.0);
    img.at(0, 0) = 2;
    img.at(0, 1) = 4;
    img.at(0, 2) = 6;
    img.at(1, 0) = 7;
    img.at(1, 1) = 10;
    img.at(1, 2) = 13;
    img.at(2, 0) = 2;
    img.at(2, 1) = 6;
    img.at(2, 2) = 10;

    Roi r0{0, 0, 1, 3, "wm"};
    auto st = roi_stats(img, r0);
    CHECK(st.mean == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(st.sd == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(snr(img, r0) == doctest::Approx(2.0).epsilon(1e-14));

    Roi r1{1, 0, 1, 3, "a"};
    Roi r2{2, 0, 1, 3, "b"};
    CHECK(cnr(img, r1, r2) == doctest::Approx(0.8).epsilon(1e-14));

    // CNR is invariant under a common shift of the whole image.
    Image shifted = img;
    for (double& v : shifted.data) v += 37.0;
    CHECK(cnr(shifted, r1, r2) == doctest::Approx(0.8).epsilon(1e-14));

    // Degenerate ROI: constant values.
    Roi flat{3, 0, 1, 3, "flat"};
    CHECK(std::isnan(snr(img, flat)));

    CHECK_THROWS_AS(roi_stats(img, Roi{0, 0, 0, 3, ""}), std::invalid_argument);
    CHECK_THROWS_AS(roi_stats(img, Roi{2, 2, 3, 3, ""}), std::invalid_argument);
}

TEST_CASE("regularized incomplete beta against closed forms") {
    // I_x(1, b) = 1 - (1-x)^b and I_x(a, 1) = x^a.
    for (double x : {0.1, 0.3, 0.5, 0.9}) {
        CHECK(regularized_incomplete_beta(1.0, 0.5, x) ==
              doctest::Approx(1.0 - std::pow(1.0 - x, 0.5)).epsilon(1e-10));
        CHECK(regularized_incomplete_beta(2.0, 1.0, x) == doctest::Approx(x * x).epsilon(1e-10));
    }
    // Symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
    CHECK(regularized_incomplete_beta(2.5, 1.5, 0.3) ==
          doctest::Approx(1.0 - regularized_incomplete_beta(1.5, 2.5, 0.7)).epsilon(1e-10));
    // Arcsine midpoint.
    CHECK(regularized_incomplete_beta(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(regularized_incomplete_beta(1.0, 1.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(1.0, 1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("paired t-test hand oracle: differences (1,2,3)") {
    // after - before = (1,2,3): mean 2, sd 1, t = 2*sqrt(3) with df = 2;
    // two-sided p = 1 - sqrt(6/7) (exact for the t CDF at df 2).
    auto res = paired_t_test({0.0, 0.0, 0.0}, {1.0, 2.0, 3.0});
    CHECK(res.t == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));
    CHECK(res.p == doctest::Approx(0.0741799002274847).epsilon(1e-6));
    CHECK(res.p == doctest::Approx(1.0 - std::sqrt(6.0 / 7.0)).epsilon(1e-10));
}

TEST_CASE("paired t-test antisymmetry and validation") {
    std::vector<double> a = {3.0, 5.0, 9.0, 4.0};
    std::vector<double> b = {4.0, 4.5, 11.0, 6.0};
    auto fwd = paired_t_test(a, b);
    auto rev = paired_t_test(b, a);
    CHECK(fwd.t == doctest::Approx(-rev.t).epsilon(1e-12));
    CHECK(fwd.p == doctest::Approx(rev.p).epsilon(1e-12));
    CHECK(fwd.p >= 0.0);
    CHECK(fwd.p <= 1.0);

    CHECK_THROWS_AS(paired_t_test({1.0, 2.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(paired_t_test({1.0}, {2.0}), std::invalid_argument);
    // Identical arrays: zero difference variance is rejected, by decision.
    CHECK_THROWS_AS(paired_t_test(a, a), std::invalid_argument);
    // Constant nonzero shift is also degenerate (sd of differences = 0).
    std::vector<double> shifted = {4.0, 6.0, 10.0, 5.0};
    CHECK_THROWS_AS(paired_t_test(a, shifted), std::invalid_argument);
}

TEST_CASE("eval report means and formatting") {
    EvalReport rep;
    rep.reference_rows = {{"img0", 1.0, 30.0, 0.9}, {"img1", 3.0, 40.0, 0.7}};
    rep.roi_rows = {{"img0", 2.0, 4.0, 1.0}, {"img1", 4.0, 8.0, 3.0}};
    rep.ttest = TTestResult{2.5, 0.04};
    rep.ttest_note = "psnr_noisy_to_test";

    auto rmean = rep.reference_mean();
    CHECK(rmean.mse == doctest::Approx(2.0));
    CHECK(rmean.psnr == doctest::Approx(35.0));
    CHECK(rmean.ssim == doctest::Approx(0.8));
    auto omean = rep.roi_mean();
    CHECK(omean.snr1 == doctest::Approx(3.0));
    CHECK(omean.cnr == doctest::Approx(2.0));

    auto text = format_report(rep);
    CHECK(text.find("psnr") != std::string::npos);
    CHECK(text.find("mean") != std::string::npos);
    CHECK(text.find("snr_roi1") != std::string::npos);
    CHECK(text.find("paired_t_test") != std::string::npos);
    CHECK(text.find("img1") != std::string::npos);
}
