#include "ctdn/phantom.hpp"

#include <cmath>
#include <stdexcept>

namespace ctdn {

std::string dataset_kind_name(DatasetKind k) {
    switch (k) {
        case DatasetKind::kS1: return "S1";
        case DatasetKind::kS2: return "S2";
        case DatasetKind::kS3: return "S3";
    }
    return "?";
}

DatasetKind parse_dataset_kind(const std::string& s) {
    if (s == "S1" || s == "s1") return DatasetKind::kS1;
    if (s == "S2" || s == "s2") return DatasetKind::kS2;
    if (s == "S3" || s == "s3") return DatasetKind::kS3;
    throw std::invalid_argument("unknown dataset kind '" + s + "' (expected S1|S2|S3)");
}

bool shape_contains(const ShapeSpec& s, double x, double y) {
    if (s.kind == ShapeKind::kDisk) {
        const double dx = x - s.cx, dy = y - s.cy;
        return dx * dx + dy * dy <= s.radius * s.radius;
    }
    return std::fabs(x - s.cx) <= s.half_w && std::fabs(y - s.cy) <= s.half_h;
}

namespace {

void check_in_bounds(const ShapeSpec& s, int n) {
    double x0, x1, y0, y1;
    if (s.kind == ShapeKind::kDisk) {
        x0 = s.cx - s.radius;
        x1 = s.cx + s.radius;
        y0 = s.cy - s.radius;
        y1 = s.cy + s.radius;
    } else {
        x0 = s.cx - s.half_w;
        x1 = s.cx + s.half_w;
        y0 = s.cy - s.half_h;
        y1 = s.cy + s.half_h;
    }
    if (x0 < 0.0 || y0 < 0.0 || x1 > n - 1.0 || y1 > n - 1.0) {
        throw std::invalid_argument("phantom: shape extends outside the " + std::to_string(n) +
                                    "x" + std::to_string(n) + " image");
    }
}

bool anomaly_inside_host(const AnomalySpec& a, const ShapeSpec& host) {
    if (host.kind == ShapeKind::kDisk) {
        const double dx = a.cx - host.cx, dy = a.cy - host.cy;
        return std::sqrt(dx * dx + dy * dy) + a.radius <= host.radius;
    }
    return std::fabs(a.cx - host.cx) + a.radius <= host.half_w &&
           std::fabs(a.cy - host.cy) + a.radius <= host.half_h;
}

bool shapes_overlap(const ShapeSpec& a, const ShapeSpec& b) {
    // conservative bounding-box test with a one-pixel gap
    auto box = [](const ShapeSpec& s, double& x0, double& x1, double& y0, double& y1) {
        const double rx = s.kind == ShapeKind::kDisk ? s.radius : s.half_w;
        const double ry = s.kind == ShapeKind::kDisk ? s.radius : s.half_h;
        x0 = s.cx - rx;
        x1 = s.cx + rx;
        y0 = s.cy - ry;
        y1 = s.cy + ry;
    };
    double ax0, ax1, ay0, ay1, bx0, bx1, by0, by1;
    box(a, ax0, ax1, ay0, ay1);
    box(b, bx0, bx1, by0, by1);
    return ax0 <= bx1 + 1.0 && bx0 <= ax1 + 1.0 && ay0 <= by1 + 1.0 && by0 <= ay1 + 1.0;
}

} // namespace

Image render(const std::vector<ShapeSpec>& specs, const std::optional<AnomalySpec>& anomaly,
             int n, double background) {
    if (n < 16) throw std::invalid_argument("render: image size must be >= 16");
    for (const auto& s : specs) check_in_bounds(s, n);

    Image img(n, background);
    for (const auto& s : specs) {
        for (int row = 0; row < n; ++row) {
            for (int col = 0; col < n; ++col) {
                if (shape_contains(s, col, row)) img.at(row, col) = s.intensity;
            }
        }
    }
    if (anomaly) {
        const AnomalySpec& a = *anomaly;
        // host intensity: the last painted shape of the host kind
        double host_intensity = background;
        for (const auto& s : specs) {
            if (s.kind == a.host) host_intensity = s.intensity;
        }
        ShapeSpec disk;
        disk.kind = ShapeKind::kDisk;
        disk.cx = a.cx;
        disk.cy = a.cy;
        disk.radius = a.radius;
        check_in_bounds(disk, n);
        for (int row = 0; row < n; ++row) {
            for (int col = 0; col < n; ++col) {
                if (shape_contains(disk, col, row)) {
                    img.at(row, col) = host_intensity + a.intensity_delta;
                }
            }
        }
    }
    return img;
}

std::vector<PhantomSample> sample_dataset(DatasetKind kind, int count, int n, std::uint64_t seed,
                                          const PhantomDefaults& defaults) {
    if (count < 1) throw std::invalid_argument("sample_dataset: count must be >= 1");
    if (n < 16) throw std::invalid_argument("sample_dataset: image size must be >= 16");

    std::vector<PhantomSample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const std::uint64_t sample_seed = mix_seed(seed, static_cast<std::uint64_t>(i));
        RngStream rng(sample_seed);

        ShapeSpec disk;
        disk.kind = ShapeKind::kDisk;
        disk.radius = rng.uniform(n / 10.0, n / 5.0);
        disk.intensity = defaults.disk_intensity;

        ShapeSpec rect;
        rect.kind = ShapeKind::kRectangle;
        rect.half_w = rng.uniform(n / 10.0, n / 4.0);
        rect.half_h = rng.uniform(n / 10.0, n / 4.0);
        rect.intensity = defaults.rect_intensity;

        // place both fully inside, disjoint from each other
        for (int attempt = 0;; ++attempt) {
            disk.cx = rng.uniform(disk.radius, n - 1.0 - disk.radius);
            disk.cy = rng.uniform(disk.radius, n - 1.0 - disk.radius);
            rect.cx = rng.uniform(rect.half_w, n - 1.0 - rect.half_w);
            rect.cy = rng.uniform(rect.half_h, n - 1.0 - rect.half_h);
            if (!shapes_overlap(disk, rect)) break;
            if (attempt > 500) {
                throw std::runtime_error("sample_dataset: could not place disjoint shapes");
            }
        }

        PhantomSample sample;
        sample.seed = sample_seed;
        sample.shapes = {disk, rect};

        if (kind != DatasetKind::kS1) {
            AnomalySpec a;
            a.host = kind == DatasetKind::kS2 ? ShapeKind::kRectangle : ShapeKind::kDisk;
            a.radius = rng.uniform(n / 40.0, n / 20.0);
            a.intensity_delta = defaults.anomaly_delta;
            const ShapeSpec& host = a.host == ShapeKind::kDisk ? disk : rect;
            for (int attempt = 0;; ++attempt) {
                if (a.host == ShapeKind::kDisk) {
                    const double margin = host.radius - a.radius;
                    a.cx = rng.uniform(host.cx - margin, host.cx + margin);
                    a.cy = rng.uniform(host.cy - margin, host.cy + margin);
                } else {
                    a.cx = rng.uniform(host.cx - (host.half_w - a.radius),
                                       host.cx + (host.half_w - a.radius));
                    a.cy = rng.uniform(host.cy - (host.half_h - a.radius),
                                       host.cy + (host.half_h - a.radius));
                }
                if (anomaly_inside_host(a, host)) break;
                if (attempt > 500) {
                    throw std::runtime_error("sample_dataset: could not place anomaly");
                }
            }
            sample.anomaly = a;
        }

        sample.image = render(sample.shapes, sample.anomaly, n, defaults.background);
        out.push_back(std::move(sample));
    }
    return out;
}

} // namespace ctdn
