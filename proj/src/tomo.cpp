#include "ctdn/tomo.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ctdn/parallel.hpp"
#include "ctdn/rng.hpp"

namespace ctdn {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMuWaterPerMm = 0.02;
constexpr double kRayStep = 0.5; // sampling step along each ray, in pixels

void check_geometry(const ScanGeometry& geom, int n) {
    if (geom.n_angles < 1) throw std::invalid_argument("scan geometry needs at least one angle");
    if (geom.n_detectors < 2) throw std::invalid_argument("scan geometry needs at least two detectors");
    if (geom.det_pitch <= 0.0) throw std::invalid_argument("detector pitch must be positive");
    double diagonal = std::sqrt(2.0) * n;
    if (geom.n_detectors * geom.det_pitch < diagonal) {
        throw std::invalid_argument("detector row (" + std::to_string(geom.n_detectors) + " x pitch " +
                                    std::to_string(geom.det_pitch) + ") does not cover the image diagonal " +
                                    std::to_string(diagonal));
    }
}

// Bilinear sample with zero outside the image.
double sample(const Image& img, double row, double col) {
    int n = img.n;
    if (row <= -1.0 || row >= n || col <= -1.0 || col >= n) return 0.0;
    int r0 = static_cast<int>(std::floor(row));
    int c0 = static_cast<int>(std::floor(col));
    double fr = row - r0;
    double fc = col - c0;
    auto px = [&](int r, int c) -> double {
        if (r < 0 || r >= n || c < 0 || c >= n) return 0.0;
        return img.data[static_cast<std::size_t>(r) * n + c];
    };
    return (1.0 - fr) * ((1.0 - fc) * px(r0, c0) + fc * px(r0, c0 + 1)) +
           fr * ((1.0 - fc) * px(r0 + 1, c0) + fc * px(r0 + 1, c0 + 1));
}

} // namespace

ScanGeometry ScanGeometry::for_image(int n, int n_angles, double det_pitch) {
    ScanGeometry g;
    g.n_angles = n_angles;
    g.det_pitch = det_pitch;
    g.n_detectors = static_cast<int>(std::ceil(std::sqrt(2.0) * n / det_pitch)) + 1;
    return g;
}

Sinogram radon(const Image& img, const ScanGeometry& geom) {
    check_geometry(geom, img.n);
    int n = img.n;
    Sinogram sino;
    sino.n_angles = geom.n_angles;
    sino.n_detectors = geom.n_detectors;
    sino.det_pitch = geom.det_pitch;
    sino.data.assign(static_cast<std::size_t>(geom.n_angles) * geom.n_detectors, 0.0);

    double center = (n - 1) / 2.0;
    double det_center = (geom.n_detectors - 1) / 2.0;
    // Rays are marched over the full diagonal plus a pixel of slack so the
    // corners are always inside the sampled span.
    double half_len = std::sqrt(2.0) * n / 2.0 + 1.0;
    int n_steps = static_cast<int>(std::ceil(2.0 * half_len / kRayStep));
    double step = 2.0 * half_len / n_steps;

    parallel_for(geom.n_angles, [&](int a) {
        double theta = kPi * a / geom.n_angles;
        double ct = std::cos(theta);
        double st = std::sin(theta);
        for (int d = 0; d < geom.n_detectors; ++d) {
            double s = (d - det_center) * geom.det_pitch;
            // Ray: (x, y) = s * (cos t, sin t) + t_par * (-sin t, cos t),
            // midpoint samples along t_par.
            double acc = 0.0;
            for (int j = 0; j < n_steps; ++j) {
                double t = -half_len + (j + 0.5) * step;
                double x = s * ct - t * st;
                double y = s * st + t * ct;
                acc += sample(img, y + center, x + center);
            }
            sino.at(a, d) = acc * step;
        }
    });
    return sino;
}

double ramp_kernel(int m, double tau) {
    if (m == 0) return 1.0 / (4.0 * tau * tau);
    if (m % 2 == 0) return 0.0;
    return -1.0 / (kPi * kPi * static_cast<double>(m) * static_cast<double>(m) * tau * tau);
}

Sinogram ramp_filter(const Sinogram& sino) {
    if (sino.n_detectors < 1 || sino.n_angles < 1) {
        throw std::invalid_argument("ramp_filter needs a non-empty sinogram");
    }
    int nd = sino.n_detectors;
    double tau = sino.det_pitch;
    std::vector<double> kernel(2 * nd - 1);
    for (int m = -(nd - 1); m <= nd - 1; ++m) kernel[m + nd - 1] = ramp_kernel(m, tau);

    Sinogram out = sino;
    parallel_for(sino.n_angles, [&](int a) {
        const double* in = &sino.data[static_cast<std::size_t>(a) * nd];
        double* q = &out.data[static_cast<std::size_t>(a) * nd];
        for (int i = 0; i < nd; ++i) {
            double acc = 0.0;
            for (int k = 0; k < nd; ++k) acc += in[k] * kernel[i - k + nd - 1];
            q[i] = acc * tau;
        }
    });
    return out;
}

Image backproject(const Sinogram& sino, const ScanGeometry& geom, int n) {
    if (sino.n_angles != geom.n_angles || sino.n_detectors != geom.n_detectors) {
        throw std::invalid_argument("sinogram shape does not match the scan geometry");
    }
    check_geometry(geom, n);
    Image img;
    img.n = n;
    img.data.assign(static_cast<std::size_t>(n) * n, 0.0);
    double center = (n - 1) / 2.0;
    double det_center = (geom.n_detectors - 1) / 2.0;

    parallel_for(n, [&](int r) {
        double y = r - center;
        for (int c = 0; c < n; ++c) {
            double x = c - center;
            double acc = 0.0;
            for (int a = 0; a < geom.n_angles; ++a) {
                double theta = kPi * a / geom.n_angles;
                double s = x * std::cos(theta) + y * std::sin(theta);
                double u = s / geom.det_pitch + det_center;
                int u0 = static_cast<int>(std::floor(u));
                double fu = u - u0;
                double v0 = (u0 >= 0 && u0 < geom.n_detectors) ? sino.at(a, u0) : 0.0;
                double v1 = (u0 + 1 >= 0 && u0 + 1 < geom.n_detectors) ? sino.at(a, u0 + 1) : 0.0;
                acc += (1.0 - fu) * v0 + fu * v1;
            }
            img.data[static_cast<std::size_t>(r) * n + c] = acc * kPi / geom.n_angles;
        }
    });
    return img;
}

Image fbp(const Sinogram& sino, const ScanGeometry& geom, int n) {
    return backproject(ramp_filter(sino), geom, n);
}

Sinogram add_quantum_noise(const Sinogram& sino, const NoiseConfig& cfg) {
    if (cfg.blank_flux <= 0.0) throw std::invalid_argument("blank flux must be positive");
    if (cfg.electronic_sd < 0.0) throw std::invalid_argument("electronic noise sd must be non-negative");
    for (double p : sino.data) {
        if (p < 0.0) throw std::invalid_argument("quantum noise expects non-negative line integrals");
    }
    Sinogram out = sino;
    RngStream rng(cfg.seed);
    for (double& p : out.data) {
        double counts = static_cast<double>(rng.poisson(cfg.blank_flux * std::exp(-p)));
        if (cfg.electronic_sd > 0.0) counts += cfg.electronic_sd * rng.normal();
        if (counts < 1.0) counts = 1.0;
        p = std::log(cfg.blank_flux / counts);
    }
    return out;
}

Image add_gaussian_noise(const Image& img, double sd, std::uint64_t seed) {
    if (sd < 0.0) throw std::invalid_argument("gaussian noise sd must be non-negative");
    Image out = img;
    RngStream rng(seed);
    for (double& v : out.data) v += sd * rng.normal();
    return out;
}

Image hu_to_attenuation(const Image& img) {
    Image out = img;
    double mu_water = kMuWaterPerMm * img.pixel_mm; // per pixel
    for (double& v : out.data) v = mu_water * (1.0 + v / 1000.0);
    return out;
}

Image attenuation_to_hu(const Image& img) {
    Image out = img;
    double mu_water = kMuWaterPerMm * img.pixel_mm;
    for (double& v : out.data) v = 1000.0 * (v / mu_water - 1.0);
    return out;
}

} // namespace ctdn
