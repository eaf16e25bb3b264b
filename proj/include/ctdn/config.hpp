// Declarative experiment configuration: a JSON document with one section
// per module. Unknown keys are rejected and the master seed must be
// explicit -- there are no wall-clock defaults anywhere.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctdn/gan.hpp"
#include "ctdn/metrics.hpp"
#include "ctdn/network.hpp"
#include "ctdn/phantom.hpp"

namespace ctdn {

struct PhantomSection {
    DatasetKind kind = DatasetKind::kS1;
    int count = 10;
    int size = 64;
};

struct GeometrySection {
    int n_angles = 180;
    double det_pitch = 1.0;
};

struct NoiseSection {
    std::string mode = "gaussian"; // gaussian | quantum
    double gaussian_sd = 25.0;
    double blank_flux = 8e4;
    double electronic_sd = 10.0;
    std::vector<double> blank_flux_sweep; // optional: one output set per flux
};

struct NetworkSection {
    GeneratorConfig generator;
    DiscriminatorConfig discriminator;
};

struct PatchesSection {
    int size = 32;
    int stride = 4;
    int per_image = 40;
};

struct MetricsSection {
    int ssim_window = 8;
    double k1 = 0.01, k2 = 0.03;
    std::optional<Roi> roi1, roi2;
};

struct VerifySection {
    int support = 8;
    int pairs = 20;
    double lambda = 0.5;
    double tolerance = 1e-8;
};

struct InputsSection {
    std::optional<std::string> clean_dir;     // simulate
    std::optional<std::string> x_dir, z_dir;  // train
    std::optional<std::string> images_dir;    // denoise
    std::optional<std::string> checkpoint;    // denoise
    std::optional<std::string> reference_dir; // eval
    std::optional<std::string> test_dir;      // eval
    std::optional<std::string> noisy_dir;     // eval (for before/after t-test)
};

struct ExperimentConfig {
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;

    std::optional<PhantomSection> phantom;
    std::optional<GeometrySection> geometry;
    std::optional<NoiseSection> noise;
    std::optional<NetworkSection> network;
    std::optional<TrainConfig> training; // seed filled from the master seed
    std::optional<PatchesSection> patches;
    std::optional<MetricsSection> metrics;
    std::optional<VerifySection> verify;
    InputsSection inputs;
};

ExperimentConfig load_experiment_config(const std::string& path);

// CLI overrides; empty/out-of-band values leave the config untouched.
void apply_overrides(ExperimentConfig& cfg, const std::string& out_dir,
                     const std::optional<std::uint64_t>& seed);

// Throws unless the named section was present in the file.
template <typename T>
const T& require_section(const std::optional<T>& section, const char* name) {
    if (!section) {
        throw std::invalid_argument(std::string("config is missing the required '") + name +
                                    "' section");
    }
    return *section;
}

} // namespace ctdn
