#include "ctdn/patches.hpp"

#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "ctdn/gridfile.hpp"
#include "ctdn/rng.hpp"

namespace ctdn {

namespace fs = std::filesystem;
using nlohmann::json;

int patches_per_axis(int n, int size, int stride) {
    return (n - size) / stride + 1;
}

std::vector<Image> extract_patches(const Image& img, int size, int stride) {
    if (size < 1 || size > img.n) {
        throw std::invalid_argument("patch size " + std::to_string(size) +
                                    " does not fit image of size " + std::to_string(img.n));
    }
    if (stride < 1) throw std::invalid_argument("patch stride must be >= 1");
    int per_axis = patches_per_axis(img.n, size, stride);
    std::vector<Image> out;
    out.reserve(static_cast<std::size_t>(per_axis) * per_axis);
    for (int ar = 0; ar < per_axis; ++ar) {
        for (int ac = 0; ac < per_axis; ++ac) {
            Image p;
            p.n = size;
            p.pixel_mm = img.pixel_mm;
            p.data.resize(static_cast<std::size_t>(size) * size);
            int r0 = ar * stride, c0 = ac * stride;
            for (int r = 0; r < size; ++r) {
                for (int c = 0; c < size; ++c) p.data[static_cast<std::size_t>(r) * size + c] = img.at(r0 + r, c0 + c);
            }
            out.push_back(std::move(p));
        }
    }
    return out;
}

PatchSet random_select(const std::vector<Image>& patches, int count, std::uint64_t seed) {
    if (count < 0 || static_cast<std::size_t>(count) > patches.size()) {
        throw std::invalid_argument("cannot select " + std::to_string(count) + " of " +
                                    std::to_string(patches.size()) + " patches");
    }
    std::vector<std::size_t> order(patches.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream rng(seed);
    rng.shuffle(order);
    PatchSet set;
    set.seed = seed;
    if (!patches.empty()) set.patch_size = patches.front().n;
    set.patches.reserve(count);
    for (int i = 0; i < count; ++i) set.patches.push_back(patches[order[i]]);
    return set;
}

std::pair<PatchSet, PatchSet> build_unpaired_sets(const std::vector<Image>& x_images,
                                                  const std::vector<std::string>& x_ids,
                                                  const std::vector<Image>& z_images,
                                                  const std::vector<std::string>& z_ids,
                                                  int size, int stride, int per_image_count,
                                                  std::uint64_t seed) {
    if (x_images.empty() || z_images.empty()) {
        throw std::invalid_argument("unpaired set assembly needs nonempty image lists");
    }
    if (x_ids.size() != x_images.size() || z_ids.size() != z_images.size()) {
        throw std::invalid_argument("image id list lengths do not match image lists");
    }
    auto build = [&](const std::vector<Image>& images, const std::vector<std::string>& ids,
                     std::uint64_t salt) {
        PatchSet set;
        set.patch_size = size;
        set.stride = stride;
        set.seed = seed;
        for (std::size_t i = 0; i < images.size(); ++i) {
            auto all = extract_patches(images[i], size, stride);
            PatchSet sel = random_select(all, per_image_count, mix_seed(seed, salt + i));
            for (auto& p : sel.patches) {
                set.patches.push_back(std::move(p));
                set.source_ids.push_back(ids[i]);
            }
        }
        return set;
    };
    // Distinct salt spaces keep the two pipelines statistically independent.
    return {build(x_images, x_ids, 0x58000000ull), build(z_images, z_ids, 0x5a000000ull)};
}

void save_patch_set(const std::string& dir, const PatchSet& set) {
    fs::create_directories(dir);
    json manifest;
    manifest["patch_size"] = set.patch_size;
    manifest["stride"] = set.stride;
    manifest["seed"] = set.seed;
    manifest["count"] = set.patches.size();
    manifest["source_ids"] = set.source_ids;
    std::vector<std::string> files;
    for (std::size_t i = 0; i < set.patches.size(); ++i) {
        std::string name = "patch_" + std::to_string(i) + ".grid";
        write_image_grid((fs::path(dir) / name).string(), set.patches[i]);
        files.push_back(name);
    }
    manifest["files"] = files;
    std::ofstream os(fs::path(dir) / "manifest.json");
    if (!os) throw std::runtime_error("cannot write patch manifest in " + dir);
    os << manifest.dump(2) << '\n';
}

PatchSet load_patch_set(const std::string& dir) {
    std::ifstream is(fs::path(dir) / "manifest.json");
    if (!is) throw std::runtime_error("missing patch manifest in " + dir);
    json manifest = json::parse(is);
    PatchSet set;
    set.patch_size = manifest.at("patch_size").get<int>();
    set.stride = manifest.at("stride").get<int>();
    set.seed = manifest.at("seed").get<std::uint64_t>();
    set.source_ids = manifest.at("source_ids").get<std::vector<std::string>>();
    for (const auto& name : manifest.at("files")) {
        set.patches.push_back(read_image_grid((fs::path(dir) / name.get<std::string>()).string()));
    }
    if (!set.source_ids.empty() && set.source_ids.size() != set.patches.size()) {
        throw std::runtime_error("patch manifest in " + dir + " has inconsistent source ids");
    }
    return set;
}

} // namespace ctdn
