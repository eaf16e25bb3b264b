// Binary grid container for images and sinograms.
//
// Layout, all little-endian:
//   bytes 0-3   magic "GRID"
//   byte  4     format version (1)
//   byte  5     dtype tag: 0 = f32, 1 = f64
//   byte  6     axis-order tag: 0 = image rows x cols, 1 = sinogram angle x detector
//   byte  7     reserved (0)
//   u32         rank
//   u64 x rank  extents
//   f64         pixel/detector pitch metadata
//   raw values, row-major, in the tagged dtype
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctdn/image.hpp"

namespace ctdn {

enum class GridDtype : std::uint8_t { kF32 = 0, kF64 = 1 };
enum class GridKind : std::uint8_t { kImage = 0, kSinogram = 1 };

struct GridFile {
    GridDtype dtype = GridDtype::kF32;
    GridKind kind = GridKind::kImage;
    std::vector<std::uint64_t> extents;
    double pitch = 1.0;
    std::vector<double> values; // widened to f64 in memory

    std::uint64_t numel() const;
};

void write_grid(const std::string& path, const GridFile& g);
GridFile read_grid(const std::string& path);

// Convenience wrappers for the common image case.
void write_image_grid(const std::string& path, const Image& img, GridDtype dtype = GridDtype::kF32);
Image read_image_grid(const std::string& path);

// Optional 16-bit grayscale sidecar (PGM P5, maxval 65535) for viewing.
// Values are min-max scaled over the grid.
void write_pgm16(const std::string& path, const Image& img);

} // namespace ctdn
