#include "ctdn/gridfile.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace ctdn {

namespace {

constexpr char kMagic[4] = {'G', 'R', 'I', 'D'};
constexpr std::uint8_t kVersion = 1;

// The project targets little-endian hosts; plain byte copies are the format.
template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("grid file: truncated read");
    return v;
}

} // namespace

std::uint64_t GridFile::numel() const {
    std::uint64_t n = 1;
    for (auto e : extents) n *= e;
    return n;
}

void write_grid(const std::string& path, const GridFile& g) {
    if (g.values.size() != g.numel()) {
        throw std::invalid_argument("write_grid: extents/value count mismatch");
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_grid: cannot open " + path);
    os.write(kMagic, 4);
    put<std::uint8_t>(os, kVersion);
    put<std::uint8_t>(os, static_cast<std::uint8_t>(g.dtype));
    put<std::uint8_t>(os, static_cast<std::uint8_t>(g.kind));
    put<std::uint8_t>(os, 0);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.extents.size()));
    for (auto e : g.extents) put<std::uint64_t>(os, e);
    put<double>(os, g.pitch);
    if (g.dtype == GridDtype::kF64) {
        os.write(reinterpret_cast<const char*>(g.values.data()),
                 static_cast<std::streamsize>(g.values.size() * sizeof(double)));
    } else {
        std::vector<float> narrow(g.values.begin(), g.values.end());
        os.write(reinterpret_cast<const char*>(narrow.data()),
                 static_cast<std::streamsize>(narrow.size() * sizeof(float)));
    }
    if (!os) throw std::runtime_error("write_grid: write failed for " + path);
}

GridFile read_grid(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_grid: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("read_grid: bad magic in " + path);
    }
    const auto version = get<std::uint8_t>(is);
    if (version != kVersion) {
        throw std::runtime_error("read_grid: unsupported version " + std::to_string(version));
    }
    GridFile g;
    g.dtype = static_cast<GridDtype>(get<std::uint8_t>(is));
    g.kind = static_cast<GridKind>(get<std::uint8_t>(is));
    get<std::uint8_t>(is); // reserved
    const auto rank = get<std::uint32_t>(is);
    g.extents.resize(rank);
    for (auto& e : g.extents) e = get<std::uint64_t>(is);
    g.pitch = get<double>(is);
    const std::uint64_t n = g.numel();
    g.values.resize(n);
    if (g.dtype == GridDtype::kF64) {
        is.read(reinterpret_cast<char*>(g.values.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
    } else {
        std::vector<float> narrow(n);
        is.read(reinterpret_cast<char*>(narrow.data()),
                static_cast<std::streamsize>(n * sizeof(float)));
        std::copy(narrow.begin(), narrow.end(), g.values.begin());
    }
    if (!is) throw std::runtime_error("read_grid: truncated data in " + path);
    return g;
}

void write_image_grid(const std::string& path, const Image& img, GridDtype dtype) {
    GridFile g;
    g.dtype = dtype;
    g.kind = GridKind::kImage;
    g.extents = {static_cast<std::uint64_t>(img.n), static_cast<std::uint64_t>(img.n)};
    g.pitch = img.pixel_mm;
    g.values = img.data;
    write_grid(path, g);
}

Image read_image_grid(const std::string& path) {
    GridFile g = read_grid(path);
    if (g.kind != GridKind::kImage || g.extents.size() != 2 || g.extents[0] != g.extents[1]) {
        throw std::runtime_error("read_image_grid: " + path + " is not a square image grid");
    }
    Image img(static_cast<int>(g.extents[0]), 0.0, g.pitch);
    img.data = std::move(g.values);
    return img;
}

void write_pgm16(const std::string& path, const Image& img) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : img.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_pgm16: cannot open " + path);
    os << "P5\n" << img.n << " " << img.n << "\n65535\n";
    for (double v : img.data) {
        const auto q = static_cast<std::uint16_t>(std::lround((v - lo) / span * 65535.0));
        // PGM is big-endian for 16-bit samples
        const char bytes[2] = {static_cast<char>(q >> 8), static_cast<char>(q & 0xff)};
        os.write(bytes, 2);
    }
}

} // namespace ctdn
