// Image quality metrics: MSE/PSNR/SSIM against a reference, ROI-based
// SNR/CNR without one, and a paired two-sided t-test.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctdn/image.hpp"

namespace ctdn {

struct Roi {
    int row = 0, col = 0, height = 0, width = 0;
    std::string label;
};

double mse(const Image& a, const Image& b);

// 10*log10(peak^2 / mse); +infinity when the images are identical.
double psnr(const Image& a, const Image& b, double peak);

// Peak taken as the reference image's max - min.
double psnr_auto(const Image& ref, const Image& test);

// Uniform-window SSIM averaged over every fully-contained window position,
// biased (1/n) window statistics. Symmetric in (a, b) for a fixed range.
double ssim(const Image& a, const Image& b, double dynamic_range, int window = 8,
            double k1 = 0.01, double k2 = 0.03);

// Dynamic range taken as the reference image's max - min.
double ssim_auto(const Image& ref, const Image& test);

struct RoiStats {
    double mean = 0.0;
    double sd = 0.0; // unbiased (n-1) estimator
};

RoiStats roi_stats(const Image& img, const Roi& roi);

// mean/sd; NaN sentinel when the ROI is constant (sd = 0).
double snr(const Image& img, const Roi& roi);

// |mean1 - mean2| / sqrt(var1 + var2), unbiased variances.
double cnr(const Image& img, const Roi& roi1, const Roi& roi2);

struct TTestResult {
    double t = 0.0;
    double p = 1.0; // two-sided
};

// Rejects degenerate (zero-variance) difference arrays.
TTestResult paired_t_test(const std::vector<double>& before, const std::vector<double>& after);

// Regularized incomplete beta I_x(a, b), exposed for oracle tests.
double regularized_incomplete_beta(double a, double b, double x);

struct ReferenceRow {
    std::string id;
    double mse = 0.0, psnr = 0.0, ssim = 0.0;
};

struct RoiRow {
    std::string id;
    double snr1 = 0.0, snr2 = 0.0, cnr = 0.0;
};

struct EvalReport {
    std::vector<ReferenceRow> reference_rows;
    std::vector<RoiRow> roi_rows;
    std::optional<TTestResult> ttest;
    std::string ttest_note; // what the paired arrays were

    ReferenceRow reference_mean() const;
    RoiRow roi_mean() const;
};

// Delimiter-separated text with a header row per section and a mean row.
std::string format_report(const EvalReport& report, char delim = '\t');

} // namespace ctdn
