#include "ctdn/network.hpp"

#include <cmath>
#include <stdexcept>

#include "ctdn/wavelet.hpp"

namespace ctdn {

namespace {

constexpr double kInitSd = 0.01;

ConvBlock make_conv(int out_ch, int in_ch, int k, RngStream& rng) {
    ConvBlock b;
    b.w = Tensor::randn({out_ch, in_ch, k, k}, 0.0, kInitSd, rng, true);
    b.b = Tensor::full({out_ch}, 0.0, true);
    return b;
}

ConvBnBlock make_conv_bn(int out_ch, int in_ch, int k, RngStream& rng) {
    ConvBnBlock b;
    b.w = Tensor::randn({out_ch, in_ch, k, k}, 0.0, kInitSd, rng, true);
    b.b = Tensor::full({out_ch}, 0.0, true);
    b.gamma = Tensor::full({out_ch}, 1.0, true);
    b.beta = Tensor::full({out_ch}, 0.0, true);
    return b;
}

TensorPtr conv_bn_lrelu(const TensorPtr& x, ConvBnBlock& blk, double slope, BatchNormMode mode) {
    TensorPtr y = conv2d(x, blk.w, blk.b, 1, 1);
    y = batch_norm2d(y, blk.gamma, blk.beta, mode, blk.stats);
    return leaky_relu(y, slope);
}

void append_conv(std::vector<std::pair<std::string, TensorPtr>>& out, const std::string& prefix,
                 ConvBlock& b) {
    out.emplace_back(prefix + ".weight", b.w);
    out.emplace_back(prefix + ".bias", b.b);
}

void append_conv_bn(std::vector<std::pair<std::string, TensorPtr>>& out, const std::string& prefix,
                    ConvBnBlock& b) {
    out.emplace_back(prefix + ".weight", b.w);
    out.emplace_back(prefix + ".bias", b.b);
    out.emplace_back(prefix + ".gamma", b.gamma);
    out.emplace_back(prefix + ".beta", b.beta);
}

void append_stats(std::vector<std::pair<std::string, std::vector<double>*>>& out,
                  const std::string& prefix, ConvBnBlock& b) {
    out.emplace_back(prefix + ".running_mean", &b.stats.running_mean);
    out.emplace_back(prefix + ".running_var", &b.stats.running_var);
}

std::vector<TensorPtr> values_of(const std::vector<std::pair<std::string, TensorPtr>>& named) {
    std::vector<TensorPtr> out;
    out.reserve(named.size());
    for (const auto& [name, t] : named) out.push_back(t);
    return out;
}

} // namespace

Generator::Generator(GeneratorConfig cfg, std::uint64_t init_seed) : cfg_(cfg) {
    if (cfg.scales < 1) throw std::invalid_argument("generator needs at least one scale");
    if (cfg.base_channels < 1) throw std::invalid_argument("generator base_channels must be >= 1");
    RngStream rng(init_seed);
    auto width = [&](int s) { return cfg.base_channels << s; };

    for (int s = 0; s < cfg.scales; ++s) {
        int in_ch = s == 0 ? 1 : width(s - 1);
        enc_.push_back({make_conv_bn(width(s), in_ch, 3, rng), make_conv_bn(width(s), width(s), 3, rng)});
    }
    bottom_ = {make_conv_bn(width(cfg.scales), width(cfg.scales - 1), 3, rng),
               make_conv_bn(width(cfg.scales), width(cfg.scales), 3, rng)};
    for (int s = 0; s < cfg.scales; ++s) {
        // Reconciles the deeper features (width at s+1) to the skip width.
        ConvBlock p;
        p.w = Tensor::randn({width(s), width(s + 1), 1, 1}, 0.0, kInitSd, rng, true);
        p.b = Tensor::full({width(s)}, 0.0, true);
        proj_.push_back(std::move(p));
    }
    for (int s = 0; s < cfg.scales; ++s) {
        dec_.push_back({make_conv_bn(width(s), width(s), 3, rng), make_conv_bn(width(s), width(s), 3, rng)});
    }
    final_ = make_conv(1, width(0), 3, rng);
}

TensorPtr Generator::forward(const TensorPtr& x, BatchNormMode mode) {
    if (x->rank() != 4 || x->dim(1) != 1) {
        throw std::invalid_argument("generator expects [N,1,H,W] input, got " + shape_string(x->shape));
    }
    int div = 1 << cfg_.scales;
    if (x->dim(2) % div != 0 || x->dim(3) % div != 0 || x->dim(2) < div || x->dim(3) < div) {
        throw std::invalid_argument("generator input extents " + shape_string(x->shape) +
                                    " must be positive multiples of 2^scales = " + std::to_string(div));
    }

    TensorPtr feats = x;
    std::vector<Subbands> skips(static_cast<std::size_t>(cfg_.scales));
    for (int s = 0; s < cfg_.scales; ++s) {
        feats = conv_bn_lrelu(feats, enc_[s][0], cfg_.lrelu_slope, mode);
        feats = conv_bn_lrelu(feats, enc_[s][1], cfg_.lrelu_slope, mode);
        Subbands sb = wave_dec(feats);
        skips[s] = sb;     // detail bands feed the expansive path
        feats = sb.ll;     // low-low continues downward
    }
    feats = conv_bn_lrelu(feats, bottom_[0], cfg_.lrelu_slope, mode);
    feats = conv_bn_lrelu(feats, bottom_[1], cfg_.lrelu_slope, mode);
    for (int s = cfg_.scales - 1; s >= 0; --s) {
        feats = conv2d(feats, proj_[s].w, proj_[s].b, 1, 0);
        Subbands sb{feats, skips[s].lh, skips[s].hl, skips[s].hh};
        feats = wave_rec(sb);
        feats = conv_bn_lrelu(feats, dec_[s][0], cfg_.lrelu_slope, mode);
        feats = conv_bn_lrelu(feats, dec_[s][1], cfg_.lrelu_slope, mode);
    }
    return conv2d(feats, final_.w, final_.b, 1, 1);
}

std::vector<std::pair<std::string, TensorPtr>> Generator::named_parameters() {
    std::vector<std::pair<std::string, TensorPtr>> out;
    for (int s = 0; s < cfg_.scales; ++s) {
        append_conv_bn(out, "gen.enc" + std::to_string(s) + ".conv0", enc_[s][0]);
        append_conv_bn(out, "gen.enc" + std::to_string(s) + ".conv1", enc_[s][1]);
    }
    append_conv_bn(out, "gen.bottom.conv0", bottom_[0]);
    append_conv_bn(out, "gen.bottom.conv1", bottom_[1]);
    for (int s = 0; s < cfg_.scales; ++s) {
        append_conv(out, "gen.proj" + std::to_string(s), proj_[s]);
    }
    for (int s = 0; s < cfg_.scales; ++s) {
        append_conv_bn(out, "gen.dec" + std::to_string(s) + ".conv0", dec_[s][0]);
        append_conv_bn(out, "gen.dec" + std::to_string(s) + ".conv1", dec_[s][1]);
    }
    append_conv(out, "gen.final", final_);
    return out;
}

std::vector<std::pair<std::string, std::vector<double>*>> Generator::named_buffers() {
    std::vector<std::pair<std::string, std::vector<double>*>> out;
    for (int s = 0; s < cfg_.scales; ++s) {
        append_stats(out, "gen.enc" + std::to_string(s) + ".conv0", enc_[s][0]);
        append_stats(out, "gen.enc" + std::to_string(s) + ".conv1", enc_[s][1]);
    }
    append_stats(out, "gen.bottom.conv0", bottom_[0]);
    append_stats(out, "gen.bottom.conv1", bottom_[1]);
    for (int s = 0; s < cfg_.scales; ++s) {
        append_stats(out, "gen.dec" + std::to_string(s) + ".conv0", dec_[s][0]);
        append_stats(out, "gen.dec" + std::to_string(s) + ".conv1", dec_[s][1]);
    }
    return out;
}

std::vector<TensorPtr> Generator::trainable() { return values_of(named_parameters()); }

Discriminator::Discriminator(DiscriminatorConfig cfg, std::uint64_t init_seed) : cfg_(cfg) {
    if (cfg.base_channels < 1) throw std::invalid_argument("discriminator base_channels must be >= 1");
    RngStream rng(init_seed);
    int c = cfg.base_channels;
    layer0_ = make_conv(c, 1, 4, rng);
    mid_ = {make_conv_bn(2 * c, c, 4, rng), make_conv_bn(4 * c, 2 * c, 4, rng)};
    ConvBlock f;
    f.w = Tensor::randn({1, 4 * c, 1, 1}, 0.0, kInitSd, rng, true);
    f.b = Tensor::full({1}, 0.0, true);
    final_ = std::move(f);
}

int Discriminator::score_map_extent(int n) { return (n + 2 - 4) / 2 + 1; }

TensorPtr Discriminator::forward(const TensorPtr& x, BatchNormMode mode) {
    if (x->rank() != 4 || x->dim(1) != 1) {
        throw std::invalid_argument("discriminator expects [N,1,H,W] input, got " +
                                    shape_string(x->shape));
    }
    if (x->dim(2) < 8 || x->dim(3) < 8) {
        throw std::invalid_argument("discriminator input extents " + shape_string(x->shape) +
                                    " must be at least 8 for a nonempty score map");
    }
    TensorPtr y = leaky_relu(conv2d(x, layer0_.w, layer0_.b, 2, 1), cfg_.lrelu_slope);
    for (auto& blk : mid_) {
        y = conv2d(y, blk.w, blk.b, 2, 1);
        y = batch_norm2d(y, blk.gamma, blk.beta, mode, blk.stats);
        y = leaky_relu(y, cfg_.lrelu_slope);
    }
    return conv2d(y, final_.w, final_.b, 1, 0);
}

std::vector<std::pair<std::string, TensorPtr>> Discriminator::named_parameters() {
    std::vector<std::pair<std::string, TensorPtr>> out;
    append_conv(out, "disc.layer0", layer0_);
    append_conv_bn(out, "disc.layer1", mid_[0]);
    append_conv_bn(out, "disc.layer2", mid_[1]);
    append_conv(out, "disc.final", final_);
    return out;
}

std::vector<std::pair<std::string, std::vector<double>*>> Discriminator::named_buffers() {
    std::vector<std::pair<std::string, std::vector<double>*>> out;
    append_stats(out, "disc.layer1", mid_[0]);
    append_stats(out, "disc.layer2", mid_[1]);
    return out;
}

std::vector<TensorPtr> Discriminator::trainable() { return values_of(named_parameters()); }

double discriminator_value(double raw_score) { return 1.0 - std::exp(raw_score); }

TensorPtr discriminator_value(const TensorPtr& raw_scores) {
    return add_scalar(scale(exp_op(raw_scores), -1.0), 1.0);
}

} // namespace ctdn
