// Fidelity-embedded adversarial objective, Adam, the alternating training
// loop over unpaired patch sets, patchwise denoising inference, and
// checkpoint (de)serialization.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctdn/image.hpp"
#include "ctdn/network.hpp"
#include "ctdn/patches.hpp"

namespace ctdn {

struct TrainConfig {
    double lambda = 10.0;        // fidelity weight
    double lr = 2e-4;
    int batch_size = 40;
    int epochs = 30;
    int d_steps_per_g_step = 1;
    std::uint64_t seed = 0;
    // Patches are divided by this before entering the networks and outputs
    // multiplied back, so HU-scale data trains at order-1 magnitudes.
    double intensity_scale = 100.0;
    int checkpoint_every = 0;    // epochs between periodic saves; 0 = final only
};

struct AdamState {
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long long t = 0;
    std::vector<std::vector<double>> m, v; // parallel to the parameter list

    void init(const std::vector<TensorPtr>& params);
};

// Standard bias-corrected Adam update; missing grads count as zero.
void adam_step(const std::vector<TensorPtr>& params, AdamState& state, double lr);

// Discriminator ascent objective as a minimized loss:
//   -( mean_x[D(x)] + mean_z[log(1 - D(G(z)))] )
// with D = 1 - exp(s), expectations averaged over all score-map positions,
// and G(z) detached (treated as constant).
TensorPtr d_loss(const TensorPtr& batch_x, const TensorPtr& batch_z, Generator& g, Discriminator& d,
                 BatchNormMode mode = BatchNormMode::kTrain);

// Generator loss mean_z[ log(1 - D(G(z))) ] + lambda * mse(G(z), z), the
// mse per-pixel normalized; D treated as constant (its parameters are simply
// not stepped).
TensorPtr g_loss(const TensorPtr& batch_z, Generator& g, Discriminator& d, double lambda,
                 BatchNormMode mode = BatchNormMode::kTrain);

struct LossRow {
    int epoch = 0;
    int iteration = 0; // global, across epochs
    double d_loss = 0.0;
    double g_loss = 0.0;
    double fidelity = 0.0; // unweighted per-pixel mse term
};

struct Checkpoint {
    GeneratorConfig gen_cfg;
    DiscriminatorConfig disc_cfg;
    TrainConfig train_cfg;
    int epoch = 0;          // epochs completed
    std::string rng_state;  // data-order stream, for exact resumption
    std::shared_ptr<Generator> gen;
    std::shared_ptr<Discriminator> disc;
    AdamState gen_opt, disc_opt;
};

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<LossRow> log;
};

// Alternating updates over independently shuffled, unpaired batches from
// s_z (noisy) and s_x (clean). Deterministic under cfg.seed in
// single-threaded mode. Throws if any loss turns non-finite, naming the
// iteration. When `resume_from` is given, continues its trajectory up to
// cfg.epochs total epochs.
TrainResult train(const PatchSet& s_z, const PatchSet& s_x, const GeneratorConfig& gen_cfg,
                  const DiscriminatorConfig& disc_cfg, const TrainConfig& cfg,
                  const std::string& checkpoint_dir = "",
                  const std::function<void(const LossRow&)>& on_iteration = nullptr,
                  const std::optional<Checkpoint>& resume_from = std::nullopt);

// Patchwise inference: overlapping patches at the given stride (with a
// clamped final anchor so the borders are always covered), generator in eval
// mode, overlaps stitched by uniform averaging.
Image denoise(const Image& img, const Checkpoint& checkpoint, int patch_size, int stride);

// Mean per-pixel ||G(z) - z||^2 over a patch set, eval mode, in normalized
// (intensity-scaled) units; the quantity the fidelity term controls.
double held_out_fidelity(Generator& g, const PatchSet& set, double intensity_scale,
                         int batch = 32);

std::string format_loss_log(const std::vector<LossRow>& rows, char delim = '\t');

void save_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::string& path);

} // namespace ctdn
