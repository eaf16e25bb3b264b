// Generator (multiscale encoder/decoder with Haar wavelet down/upsampling
// and detail-band skips) and PatchGAN discriminator (strided 4x4 convs to a
// raw score map). All parameters are named for checkpointing.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ctdn/tensor.hpp"

namespace ctdn {

struct GeneratorConfig {
    int scales = 2;          // wavelet levels; input extents must divide 2^scales
    int base_channels = 16;  // width at the top scale, doubled per level
    double lrelu_slope = 0.2;
};

struct DiscriminatorConfig {
    int base_channels = 16;  // channels after the first strided conv
    double lrelu_slope = 0.2;
};

struct ConvBlock {
    TensorPtr w, b;
};

struct ConvBnBlock {
    TensorPtr w, b, gamma, beta;
    BatchNormState stats;
};

class Generator {
public:
    Generator(GeneratorConfig cfg, std::uint64_t init_seed);

    // x: [N,1,H,W] with H and W divisible by 2^scales. Output has the same
    // shape as the input.
    TensorPtr forward(const TensorPtr& x, BatchNormMode mode);

    const GeneratorConfig& config() const { return cfg_; }
    std::vector<std::pair<std::string, TensorPtr>> named_parameters();
    std::vector<std::pair<std::string, std::vector<double>*>> named_buffers();
    std::vector<TensorPtr> trainable();

private:
    GeneratorConfig cfg_;
    std::vector<std::array<ConvBnBlock, 2>> enc_;  // per contracting step
    std::array<ConvBnBlock, 2> bottom_;
    std::vector<ConvBlock> proj_;                  // 1x1 channel reconcilers
    std::vector<std::array<ConvBnBlock, 2>> dec_;  // per expansive step
    ConvBlock final_;
};

class Discriminator {
public:
    Discriminator(DiscriminatorConfig cfg, std::uint64_t init_seed);

    // x: [N,1,H,W] with extents >= 8. Returns the raw score map s(w),
    // [N,1,H/8,W/8] for padding-1 stride-2 4x4 convs.
    TensorPtr forward(const TensorPtr& x, BatchNormMode mode);

    const DiscriminatorConfig& config() const { return cfg_; }
    std::vector<std::pair<std::string, TensorPtr>> named_parameters();
    std::vector<std::pair<std::string, std::vector<double>*>> named_buffers();
    std::vector<TensorPtr> trainable();

    // One application of the size recurrence floor((n + 2*pad - k)/stride)+1.
    static int score_map_extent(int n);

private:
    DiscriminatorConfig cfg_;
    ConvBlock layer0_;                 // no batch norm on the first layer
    std::array<ConvBnBlock, 2> mid_;
    ConvBlock final_;                  // 1x1 conv to one channel
};

// D = 1 - exp(s): maps raw scores into (-inf, 1), the range of the optimal
// discriminator, and makes log(1 - D) = s exact.
double discriminator_value(double raw_score);
TensorPtr discriminator_value(const TensorPtr& raw_scores);

} // namespace ctdn
