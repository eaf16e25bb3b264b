// Synthetic disk/rectangle phantoms with optional small anomalies, used as
// clean training/test objects for the denoising experiments.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctdn/image.hpp"
#include "ctdn/rng.hpp"

namespace ctdn {

enum class ShapeKind { kDisk, kRectangle };

struct ShapeSpec {
    ShapeKind kind = ShapeKind::kDisk;
    double cx = 0.0, cy = 0.0;       // center in pixel coordinates
    double radius = 0.0;             // disk
    double half_w = 0.0, half_h = 0.0; // rectangle
    double intensity = 0.0;          // HU-like
};

struct AnomalySpec {
    ShapeKind host = ShapeKind::kDisk;
    double cx = 0.0, cy = 0.0;
    double radius = 0.0;
    double intensity_delta = 0.0; // painted value = host intensity + delta
};

struct PhantomSample {
    Image image;
    std::vector<ShapeSpec> shapes;
    std::optional<AnomalySpec> anomaly;
    std::uint64_t seed = 0;
};

enum class DatasetKind { kS1, kS2, kS3 };

std::string dataset_kind_name(DatasetKind k);
DatasetKind parse_dataset_kind(const std::string& s);

// Intensity and size conventions for the generated datasets.
struct PhantomDefaults {
    double background = 0.0;
    double disk_intensity = 100.0;
    double rect_intensity = 60.0;
    double anomaly_delta = 50.0;
};

// Paints background, then the shapes in order (later overwrite earlier), then
// the anomaly. Binary rasterization by pixel-center test. Shapes must lie
// fully inside the image.
Image render(const std::vector<ShapeSpec>& specs, const std::optional<AnomalySpec>& anomaly,
             int n, double background);

// One disk + one rectangle per sample with randomized sizes and positions;
// S2 adds an anomaly inside the rectangle, S3 inside the disk.
std::vector<PhantomSample> sample_dataset(DatasetKind kind, int count, int n, std::uint64_t seed,
                                          const PhantomDefaults& defaults = {});

// True if the pixel center (col, row) lies inside the spec.
bool shape_contains(const ShapeSpec& s, double x, double y);

} // namespace ctdn
