// Square grayscale image in Hounsfield-like units, the unit of denoising.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctdn {

struct Image {
    int n = 0;                  // n x n grid
    double pixel_mm = 1.0;      // pixel pitch
    std::vector<double> data;   // row-major, size n*n

    Image() = default;
    Image(int n_, double fill = 0.0, double pitch_mm = 1.0)
        : n(n_), pixel_mm(pitch_mm), data(static_cast<std::size_t>(n_) * n_, fill) {
        if (n_ <= 0) throw std::invalid_argument("Image: size must be positive");
    }

    double& at(int row, int col) { return data[static_cast<std::size_t>(row) * n + col]; }
    double at(int row, int col) const { return data[static_cast<std::size_t>(row) * n + col]; }
    std::size_t size() const { return data.size(); }
};

} // namespace ctdn
