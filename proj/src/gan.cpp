#include "ctdn/gan.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "ctdn/rng.hpp"

namespace ctdn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stacks intensity-scaled patches into a [B,1,p,p] input tensor.
TensorPtr make_batch(const PatchSet& set, const std::vector<std::size_t>& order, std::size_t pos,
                     int batch, double intensity_scale) {
    int p = set.patch_size;
    auto t = Tensor::create({batch, 1, p, p});
    double inv = 1.0 / intensity_scale;
    std::size_t pp = static_cast<std::size_t>(p) * p;
    for (int b = 0; b < batch; ++b) {
        const Image& img = set.patches[order[pos + b]];
        for (std::size_t i = 0; i < pp; ++i) t->values[b * pp + i] = img.data[i] * inv;
    }
    return t;
}

void zero_param_grads(const std::vector<TensorPtr>& params) {
    for (const auto& p : params) p->zero_grad();
}

} // namespace

void AdamState::init(const std::vector<TensorPtr>& params) {
    t = 0;
    m.clear();
    v.clear();
    for (const auto& p : params) {
        m.emplace_back(p->values.size(), 0.0);
        v.emplace_back(p->values.size(), 0.0);
    }
}

void adam_step(const std::vector<TensorPtr>& params, AdamState& state, double lr) {
    if (state.m.size() != params.size()) {
        throw std::invalid_argument("adam_step: state tracks " + std::to_string(state.m.size()) +
                                    " parameters, got " + std::to_string(params.size()));
    }
    ++state.t;
    double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        if (state.m[i].size() != p.values.size()) {
            throw std::invalid_argument("adam_step: moment shape mismatch at parameter " +
                                        std::to_string(i));
        }
        const bool has_grad = p.grad.size() == p.values.size();
        for (std::size_t j = 0; j < p.values.size(); ++j) {
            double g = has_grad ? p.grad[j] : 0.0;
            state.m[i][j] = state.beta1 * state.m[i][j] + (1.0 - state.beta1) * g;
            state.v[i][j] = state.beta2 * state.v[i][j] + (1.0 - state.beta2) * g * g;
            double mhat = state.m[i][j] / c1;
            double vhat = state.v[i][j] / c2;
            p.values[j] -= lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

TensorPtr d_loss(const TensorPtr& batch_x, const TensorPtr& batch_z, Generator& g, Discriminator& d,
                 BatchNormMode mode) {
    if (batch_x->size() == 0 || batch_z->size() == 0) {
        throw std::invalid_argument("d_loss: empty batch");
    }
    TensorPtr fake = g.forward(batch_z, mode)->detach();
    TensorPtr term_real = mean(discriminator_value(d.forward(batch_x, mode)));
    TensorPtr term_fake = mean(d.forward(fake, mode)); // log(1-D) = raw score
    return scale(add(term_real, term_fake), -1.0);
}

TensorPtr g_loss(const TensorPtr& batch_z, Generator& g, Discriminator& d, double lambda,
                 BatchNormMode mode) {
    if (batch_z->size() == 0) throw std::invalid_argument("g_loss: empty batch");
    if (lambda < 0.0) throw std::invalid_argument("g_loss: lambda must be >= 0");
    TensorPtr fake = g.forward(batch_z, mode);
    TensorPtr adversarial = mean(d.forward(fake, mode));
    return add(adversarial, scale(mse_loss(fake, batch_z), lambda));
}

TrainResult train(const PatchSet& s_z, const PatchSet& s_x, const GeneratorConfig& gen_cfg,
                  const DiscriminatorConfig& disc_cfg, const TrainConfig& cfg,
                  const std::string& checkpoint_dir,
                  const std::function<void(const LossRow&)>& on_iteration,
                  const std::optional<Checkpoint>& resume_from) {
    if (s_z.patches.empty() || s_x.patches.empty()) {
        throw std::invalid_argument("train: both patch sets must be nonempty");
    }
    if (s_z.patch_size != s_x.patch_size) {
        throw std::invalid_argument("train: patch sizes differ: z " + std::to_string(s_z.patch_size) +
                                    " vs x " + std::to_string(s_x.patch_size));
    }
    if (cfg.batch_size < 1 || cfg.epochs < 0 || cfg.d_steps_per_g_step < 1) {
        throw std::invalid_argument("train: invalid schedule in config");
    }
    if (cfg.lr <= 0.0 || cfg.lambda < 0.0 || cfg.intensity_scale <= 0.0) {
        throw std::invalid_argument("train: invalid lambda/lr/intensity_scale");
    }
    std::size_t per_iteration = static_cast<std::size_t>(cfg.batch_size) * cfg.d_steps_per_g_step;
    std::size_t usable = std::min(s_z.patches.size(), s_x.patches.size());
    if (usable < per_iteration) {
        throw std::invalid_argument("train: batch size " + std::to_string(cfg.batch_size) +
                                    " x " + std::to_string(cfg.d_steps_per_g_step) +
                                    " d-steps exceeds smaller patch set (" + std::to_string(usable) + ")");
    }
    int iters_per_epoch = static_cast<int>(usable / per_iteration);

    TrainResult res;
    Checkpoint& cp = res.checkpoint;
    RngStream rng;
    int start_epoch = 0;
    if (resume_from) {
        cp = *resume_from;
        if (!cp.gen || !cp.disc) throw std::invalid_argument("train: resume checkpoint incomplete");
        rng.load_state(cp.rng_state);
        start_epoch = cp.epoch;
    } else {
        cp.gen_cfg = gen_cfg;
        cp.disc_cfg = disc_cfg;
        // Distinct derived seeds: 1 = generator init, 2 = discriminator
        // init, 3 = data order.
        cp.gen = std::make_shared<Generator>(gen_cfg, mix_seed(cfg.seed, 1));
        cp.disc = std::make_shared<Discriminator>(disc_cfg, mix_seed(cfg.seed, 2));
        cp.gen_opt.init(cp.gen->trainable());
        cp.disc_opt.init(cp.disc->trainable());
        rng = RngStream(mix_seed(cfg.seed, 3));
    }
    cp.train_cfg = cfg;

    std::vector<TensorPtr> g_params = cp.gen->trainable();
    std::vector<TensorPtr> d_params = cp.disc->trainable();
    std::vector<std::size_t> order_z(s_z.patches.size());
    std::vector<std::size_t> order_x(s_x.patches.size());
    int iteration = start_epoch * iters_per_epoch;

    for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
        std::iota(order_z.begin(), order_z.end(), std::size_t{0});
        std::iota(order_x.begin(), order_x.end(), std::size_t{0});
        // Independent shuffles: the unpaired sets are never indexed by a
        // shared key.
        rng.shuffle(order_z);
        rng.shuffle(order_x);
        std::size_t pos_z = 0, pos_x = 0;
        for (int it = 0; it < iters_per_epoch; ++it, ++iteration) {
            LossRow row;
            row.epoch = epoch;
            row.iteration = iteration;
            TensorPtr batch_z;
            for (int ds = 0; ds < cfg.d_steps_per_g_step; ++ds) {
                TensorPtr batch_x = make_batch(s_x, order_x, pos_x, cfg.batch_size, cfg.intensity_scale);
                pos_x += cfg.batch_size;
                batch_z = make_batch(s_z, order_z, pos_z, cfg.batch_size, cfg.intensity_scale);
                pos_z += cfg.batch_size;
                TensorPtr dl = d_loss(batch_x, batch_z, *cp.gen, *cp.disc);
                zero_param_grads(d_params);
                backward(dl);
                adam_step(d_params, cp.disc_opt, cfg.lr);
                row.d_loss = dl->item();
            }
            // The generator update reuses the last z batch of the iteration.
            TensorPtr fake = cp.gen->forward(batch_z, BatchNormMode::kTrain);
            TensorPtr fid = mse_loss(fake, batch_z);
            TensorPtr gl = add(mean(cp.disc->forward(fake, BatchNormMode::kTrain)),
                               scale(fid, cfg.lambda));
            zero_param_grads(g_params);
            zero_param_grads(d_params); // D grads from this graph are discarded
            backward(gl);
            adam_step(g_params, cp.gen_opt, cfg.lr);
            row.g_loss = gl->item();
            row.fidelity = fid->item();

            if (!std::isfinite(row.d_loss) || !std::isfinite(row.g_loss)) {
                throw std::runtime_error("train: diverged (non-finite loss) at epoch " +
                                         std::to_string(epoch) + " iteration " +
                                         std::to_string(iteration));
            }
            res.log.push_back(row);
            if (on_iteration) on_iteration(row);
        }
        cp.epoch = epoch + 1;
        cp.rng_state = rng.save_state();
        if (!checkpoint_dir.empty() && cfg.checkpoint_every > 0 &&
            (epoch + 1) % cfg.checkpoint_every == 0 && epoch + 1 < cfg.epochs) {
            save_checkpoint((fs::path(checkpoint_dir) /
                             ("checkpoint_epoch_" + std::to_string(epoch + 1) + ".ckpt"))
                                .string(),
                            cp);
        }
    }
    cp.rng_state = rng.save_state();
    if (!checkpoint_dir.empty()) {
        save_checkpoint((fs::path(checkpoint_dir) / "checkpoint_final.ckpt").string(), cp);
    }
    return res;
}

namespace {

// Anchor positions 0, stride, 2*stride, ... plus a clamped final anchor at
// n - p so the image border is always covered.
std::vector<int> patch_anchors(int n, int p, int stride) {
    std::vector<int> anchors;
    for (int a = 0; a + p <= n; a += stride) anchors.push_back(a);
    if (anchors.back() != n - p) anchors.push_back(n - p);
    return anchors;
}

} // namespace

Image denoise(const Image& img, const Checkpoint& checkpoint, int patch_size, int stride) {
    if (!checkpoint.gen) throw std::invalid_argument("denoise: checkpoint carries no generator");
    if (patch_size < 1 || patch_size > img.n) {
        throw std::invalid_argument("denoise: patch size " + std::to_string(patch_size) +
                                    " does not fit image of size " + std::to_string(img.n));
    }
    if (stride < 1) throw std::invalid_argument("denoise: stride must be >= 1");
    int div = 1 << checkpoint.gen_cfg.scales;
    if (patch_size % div != 0) {
        throw std::invalid_argument("denoise: patch size " + std::to_string(patch_size) +
                                    " incompatible with checkpoint (needs a multiple of " +
                                    std::to_string(div) + ")");
    }
    double scale_v = checkpoint.train_cfg.intensity_scale;
    std::vector<int> anchors = patch_anchors(img.n, patch_size, stride);
    std::vector<std::pair<int, int>> positions;
    for (int r : anchors) {
        for (int c : anchors) positions.emplace_back(r, c);
    }

    std::vector<double> acc(img.data.size(), 0.0);
    std::vector<double> weight(img.data.size(), 0.0);
    const int chunk = 32;
    std::size_t pp = static_cast<std::size_t>(patch_size) * patch_size;
    for (std::size_t start = 0; start < positions.size(); start += chunk) {
        int b = static_cast<int>(std::min<std::size_t>(chunk, positions.size() - start));
        auto in = Tensor::create({b, 1, patch_size, patch_size});
        for (int k = 0; k < b; ++k) {
            auto [r0, c0] = positions[start + k];
            for (int r = 0; r < patch_size; ++r) {
                for (int c = 0; c < patch_size; ++c) {
                    in->values[k * pp + static_cast<std::size_t>(r) * patch_size + c] =
                        img.at(r0 + r, c0 + c) / scale_v;
                }
            }
        }
        TensorPtr out = checkpoint.gen->forward(in, BatchNormMode::kEval);
        for (int k = 0; k < b; ++k) {
            auto [r0, c0] = positions[start + k];
            for (int r = 0; r < patch_size; ++r) {
                for (int c = 0; c < patch_size; ++c) {
                    std::size_t dst = static_cast<std::size_t>(r0 + r) * img.n + (c0 + c);
                    acc[dst] += out->values[k * pp + static_cast<std::size_t>(r) * patch_size + c];
                    weight[dst] += 1.0;
                }
            }
        }
    }
    Image result = img;
    for (std::size_t i = 0; i < acc.size(); ++i) result.data[i] = acc[i] / weight[i] * scale_v;
    return result;
}

double held_out_fidelity(Generator& g, const PatchSet& set, double intensity_scale, int batch) {
    if (set.patches.empty()) throw std::invalid_argument("held_out_fidelity: empty patch set");
    std::vector<std::size_t> order(set.patches.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
        int b = static_cast<int>(std::min<std::size_t>(batch, order.size() - start));
        TensorPtr z = make_batch(set, order, start, b, intensity_scale);
        TensorPtr fake = g.forward(z, BatchNormMode::kEval);
        double acc = 0.0;
        for (std::size_t i = 0; i < fake->values.size(); ++i) {
            double d = fake->values[i] - z->values[i];
            acc += d * d;
        }
        total += acc / static_cast<double>(z->values.size()) * b;
    }
    return total / static_cast<double>(set.patches.size());
}

std::string format_loss_log(const std::vector<LossRow>& rows, char delim) {
    std::ostringstream os;
    os.precision(10);
    os << "epoch" << delim << "iteration" << delim << "d_loss" << delim << "g_loss" << delim
       << "fidelity" << '\n';
    for (const auto& r : rows) {
        os << r.epoch << delim << r.iteration << delim << r.d_loss << delim << r.g_loss << delim
           << r.fidelity << '\n';
    }
    return os.str();
}

// --- checkpoint serialization -------------------------------------------
//
// Layout: magic "CKPT", u8 version, 3 reserved bytes, u64 JSON header
// length + bytes (configs, epoch, RNG state, optimizer scalars), u64 count
// of named arrays, then per array: u32 name length, name bytes, u32 rank,
// u64 extents, raw f64 values. Little-endian throughout.

namespace {

constexpr char kCkptMagic[4] = {'C', 'K', 'P', 'T'};
constexpr std::uint8_t kCkptVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("checkpoint: truncated read");
    return v;
}

void put_array(std::ostream& os, const std::string& name, const std::vector<std::uint64_t>& extents,
               const std::vector<double>& values) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(extents.size()));
    for (auto e : extents) put<std::uint64_t>(os, e);
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size() * sizeof(double)));
}

struct NamedArray {
    std::vector<std::uint64_t> extents;
    std::vector<double> values;
};

std::pair<std::string, NamedArray> get_array(std::istream& is) {
    auto name_len = get<std::uint32_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    NamedArray arr;
    auto rank = get<std::uint32_t>(is);
    std::uint64_t numel = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        arr.extents.push_back(get<std::uint64_t>(is));
        numel *= arr.extents.back();
    }
    arr.values.resize(numel);
    is.read(reinterpret_cast<char*>(arr.values.data()),
            static_cast<std::streamsize>(numel * sizeof(double)));
    if (!is) throw std::runtime_error("checkpoint: truncated array " + name);
    return {std::move(name), std::move(arr)};
}

std::vector<std::uint64_t> tensor_extents(const TensorPtr& t) {
    std::vector<std::uint64_t> e;
    for (int d : t->shape) e.push_back(static_cast<std::uint64_t>(d));
    return e;
}

json optimizer_to_json(const AdamState& st) {
    return json{{"beta1", st.beta1}, {"beta2", st.beta2}, {"eps", st.eps}, {"t", st.t}};
}

void optimizer_from_json(const json& j, AdamState& st) {
    st.beta1 = j.at("beta1").get<double>();
    st.beta2 = j.at("beta2").get<double>();
    st.eps = j.at("eps").get<double>();
    st.t = j.at("t").get<long long>();
}

} // namespace

void save_checkpoint(const std::string& path, const Checkpoint& cp) {
    if (!cp.gen || !cp.disc) throw std::invalid_argument("save_checkpoint: incomplete checkpoint");
    json header;
    header["epoch"] = cp.epoch;
    header["rng_state"] = cp.rng_state;
    header["generator"] = {{"scales", cp.gen_cfg.scales},
                           {"base_channels", cp.gen_cfg.base_channels},
                           {"lrelu_slope", cp.gen_cfg.lrelu_slope}};
    header["discriminator"] = {{"base_channels", cp.disc_cfg.base_channels},
                               {"lrelu_slope", cp.disc_cfg.lrelu_slope}};
    header["train"] = {{"lambda", cp.train_cfg.lambda},
                       {"lr", cp.train_cfg.lr},
                       {"batch_size", cp.train_cfg.batch_size},
                       {"epochs", cp.train_cfg.epochs},
                       {"d_steps_per_g_step", cp.train_cfg.d_steps_per_g_step},
                       {"seed", cp.train_cfg.seed},
                       {"intensity_scale", cp.train_cfg.intensity_scale},
                       {"checkpoint_every", cp.train_cfg.checkpoint_every}};
    header["gen_opt"] = optimizer_to_json(cp.gen_opt);
    header["disc_opt"] = optimizer_to_json(cp.disc_opt);
    std::string header_text = header.dump();

    auto gen_named = cp.gen->named_parameters();
    auto disc_named = cp.disc->named_parameters();
    auto gen_bufs = cp.gen->named_buffers();
    auto disc_bufs = cp.disc->named_buffers();

    // Uninitialized optimizer states serialize as zero moments.
    static const std::vector<double> kNoMoments;
    auto moments_of = [](const AdamState& st, std::size_t i) {
        if (i < st.m.size()) return std::make_pair(&st.m[i], &st.v[i]);
        return std::make_pair(&kNoMoments, &kNoMoments);
    };

    std::uint64_t count = gen_named.size() + disc_named.size() + gen_bufs.size() + disc_bufs.size() +
                          2 * (gen_named.size() + disc_named.size());

    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path);
    os.write(kCkptMagic, 4);
    put<std::uint8_t>(os, kCkptVersion);
    put<std::uint8_t>(os, 0);
    put<std::uint8_t>(os, 0);
    put<std::uint8_t>(os, 0);
    put<std::uint64_t>(os, header_text.size());
    os.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    put<std::uint64_t>(os, count);

    auto write_params = [&](const std::vector<std::pair<std::string, TensorPtr>>& named,
                            const AdamState& st) {
        for (std::size_t i = 0; i < named.size(); ++i) {
            const auto& [name, t] = named[i];
            put_array(os, name, tensor_extents(t), t->values);
            auto [m, v] = moments_of(st, i);
            std::vector<std::uint64_t> ext{static_cast<std::uint64_t>(t->values.size())};
            if (m->empty()) {
                std::vector<double> zeros(t->values.size(), 0.0);
                put_array(os, "adam." + name + ".m", ext, zeros);
                put_array(os, "adam." + name + ".v", ext, zeros);
            } else {
                put_array(os, "adam." + name + ".m", ext, *m);
                put_array(os, "adam." + name + ".v", ext, *v);
            }
        }
    };
    write_params(gen_named, cp.gen_opt);
    write_params(disc_named, cp.disc_opt);
    for (const auto& [name, vec] : gen_bufs) {
        put_array(os, name, {static_cast<std::uint64_t>(vec->size())}, *vec);
    }
    for (const auto& [name, vec] : disc_bufs) {
        put_array(os, name, {static_cast<std::uint64_t>(vec->size())}, *vec);
    }
    if (!os) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kCkptMagic, 4) != 0) {
        throw std::runtime_error("load_checkpoint: bad magic in " + path);
    }
    auto version = get<std::uint8_t>(is);
    if (version != kCkptVersion) {
        throw std::runtime_error("load_checkpoint: unsupported version " + std::to_string(version));
    }
    get<std::uint8_t>(is);
    get<std::uint8_t>(is);
    get<std::uint8_t>(is);
    auto header_len = get<std::uint64_t>(is);
    std::string header_text(header_len, '\0');
    is.read(header_text.data(), static_cast<std::streamsize>(header_len));
    if (!is) throw std::runtime_error("load_checkpoint: truncated header in " + path);
    json header = json::parse(header_text);

    Checkpoint cp;
    cp.epoch = header.at("epoch").get<int>();
    cp.rng_state = header.at("rng_state").get<std::string>();
    cp.gen_cfg.scales = header.at("generator").at("scales").get<int>();
    cp.gen_cfg.base_channels = header.at("generator").at("base_channels").get<int>();
    cp.gen_cfg.lrelu_slope = header.at("generator").at("lrelu_slope").get<double>();
    cp.disc_cfg.base_channels = header.at("discriminator").at("base_channels").get<int>();
    cp.disc_cfg.lrelu_slope = header.at("discriminator").at("lrelu_slope").get<double>();
    const auto& tr = header.at("train");
    cp.train_cfg.lambda = tr.at("lambda").get<double>();
    cp.train_cfg.lr = tr.at("lr").get<double>();
    cp.train_cfg.batch_size = tr.at("batch_size").get<int>();
    cp.train_cfg.epochs = tr.at("epochs").get<int>();
    cp.train_cfg.d_steps_per_g_step = tr.at("d_steps_per_g_step").get<int>();
    cp.train_cfg.seed = tr.at("seed").get<std::uint64_t>();
    cp.train_cfg.intensity_scale = tr.at("intensity_scale").get<double>();
    cp.train_cfg.checkpoint_every = tr.at("checkpoint_every").get<int>();

    cp.gen = std::make_shared<Generator>(cp.gen_cfg, 0);
    cp.disc = std::make_shared<Discriminator>(cp.disc_cfg, 0);
    optimizer_from_json(header.at("gen_opt"), cp.gen_opt);
    optimizer_from_json(header.at("disc_opt"), cp.disc_opt);

    auto count = get<std::uint64_t>(is);
    std::unordered_map<std::string, NamedArray> arrays;
    for (std::uint64_t i = 0; i < count; ++i) {
        auto [name, arr] = get_array(is);
        arrays.emplace(std::move(name), std::move(arr));
    }

    auto take = [&](const std::string& name) -> NamedArray& {
        auto it = arrays.find(name);
        if (it == arrays.end()) {
            throw std::runtime_error("load_checkpoint: " + path + " is missing tensor " + name);
        }
        return it->second;
    };
    auto load_params = [&](std::vector<std::pair<std::string, TensorPtr>> named, AdamState& st) {
        st.m.clear();
        st.v.clear();
        for (auto& [name, t] : named) {
            NamedArray& arr = take(name);
            if (arr.extents != tensor_extents(t)) {
                throw std::runtime_error("load_checkpoint: shape mismatch for " + name);
            }
            t->values = arr.values;
            st.m.push_back(take("adam." + name + ".m").values);
            st.v.push_back(take("adam." + name + ".v").values);
            if (st.m.back().size() != t->values.size() || st.v.back().size() != t->values.size()) {
                throw std::runtime_error("load_checkpoint: moment size mismatch for " + name);
            }
        }
    };
    load_params(cp.gen->named_parameters(), cp.gen_opt);
    load_params(cp.disc->named_parameters(), cp.disc_opt);
    for (auto& [name, vec] : cp.gen->named_buffers()) *vec = take(name).values;
    for (auto& [name, vec] : cp.disc->named_buffers()) *vec = take(name).values;
    return cp;
}

} // namespace ctdn
