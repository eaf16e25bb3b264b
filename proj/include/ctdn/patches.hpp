// Patch extraction and unpaired training-set assembly. Patches are square
// crops taken at every stride-aligned, fully-contained anchor; training sets
// are random selections with no pairing metadata between the two domains.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctdn/image.hpp"

namespace ctdn {

struct PatchSet {
    int patch_size = 0;
    int stride = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> source_ids; // one per patch; may be empty labels
    std::vector<Image> patches;

    std::size_t size() const { return patches.size(); }
};

// All patches of the given size whose top-left anchor is a multiple of
// stride and which lie fully inside the image; row-major anchor order.
std::vector<Image> extract_patches(const Image& img, int size, int stride);

int patches_per_axis(int n, int size, int stride);

// Uniform sample of `count` patches without replacement, deterministic
// under seed. source_ids left empty (filled by dataset assembly).
PatchSet random_select(const std::vector<Image>& patches, int count, std::uint64_t seed);

// Independent extract+select pipelines for the clean (x) and noisy (z)
// sides; resulting sets carry source image ids but no cross-references.
std::pair<PatchSet, PatchSet> build_unpaired_sets(const std::vector<Image>& x_images,
                                                  const std::vector<std::string>& x_ids,
                                                  const std::vector<Image>& z_images,
                                                  const std::vector<std::string>& z_ids,
                                                  int size, int stride, int per_image_count,
                                                  std::uint64_t seed);

// Directory of binary grid files plus a JSON manifest.
void save_patch_set(const std::string& dir, const PatchSet& set);
PatchSet load_patch_set(const std::string& dir);

} // namespace ctdn
