// Parallel-beam CT simulation: ray-driven forward projection, Ram-Lak
// filtered backprojection, and the quantum/Gaussian noise models.
#pragma once

#include <cstdint>
#include <vector>

#include "ctdn/image.hpp"

namespace ctdn {

struct ScanGeometry {
    int n_angles = 180;        // uniform over [0, pi)
    int n_detectors = 0;
    double det_pitch = 1.0;    // in pixel units

    static ScanGeometry for_image(int n, int n_angles = 180, double det_pitch = 1.0);
};

struct Sinogram {
    int n_angles = 0;
    int n_detectors = 0;
    double det_pitch = 1.0;
    std::vector<double> data; // [angle][detector]

    double& at(int a, int d) { return data[static_cast<std::size_t>(a) * n_detectors + d]; }
    double at(int a, int d) const { return data[static_cast<std::size_t>(a) * n_detectors + d]; }
};

struct NoiseConfig {
    double blank_flux = 8e4;     // I0, counts per detector
    double electronic_sd = 10.0; // counts
    double image_gaussian_sd = 25.0; // HU
    std::uint64_t seed = 0;
};

// Line integrals of the image values (units value * pixel), sampled every
// half pixel with bilinear interpolation. Linear in the image; unit
// conversions (e.g. HU to attenuation) are the caller's separate step.
Sinogram radon(const Image& img, const ScanGeometry& geom);

// Discrete band-limited ramp kernel value at integer lag m for detector
// pitch tau: 1/(4 tau^2) at 0, -1/(pi^2 m^2 tau^2) for odd m, 0 for even m.
double ramp_kernel(int m, double tau);

// Per-angle linear convolution with the Ram-Lak kernel over the full
// zero-padded support (kernel length 2x detector count - 1).
Sinogram ramp_filter(const Sinogram& sino);

// Pixel-driven backprojection scaled by pi/n_angles.
Image backproject(const Sinogram& sino, const ScanGeometry& geom, int n);

Image fbp(const Sinogram& sino, const ScanGeometry& geom, int n);

// Poisson counts at I0*exp(-p) plus Gaussian electronic noise, clamped to
// >= 1 count, returned as p_hat = ln(I0/N). Deterministic under cfg.seed.
Sinogram add_quantum_noise(const Sinogram& sino, const NoiseConfig& cfg);

Image add_gaussian_noise(const Image& img, double sd, std::uint64_t seed);

// HU <-> attenuation-per-pixel mapping used by the quantum noise pipeline:
// mu = mu_water * pixel_mm * (1 + HU/1000), mu_water = 0.02 per mm.
Image hu_to_attenuation(const Image& img);
Image attenuation_to_hu(const Image& img);

} // namespace ctdn
