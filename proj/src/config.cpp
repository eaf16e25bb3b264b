#include "ctdn/config.hpp"

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace ctdn {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& section,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
        throw std::invalid_argument("config section '" + section + "' must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw std::invalid_argument("config: unknown key '" + key + "' in section '" + section +
                                        "'");
        }
    }
}

template <typename T>
void read_to(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

Roi parse_roi(const json& j, const std::string& section) {
    check_keys(j, section, {"row", "col", "height", "width", "label"});
    Roi r;
    r.row = j.at("row").get<int>();
    r.col = j.at("col").get<int>();
    r.height = j.at("height").get<int>();
    r.width = j.at("width").get<int>();
    read_to(j, "label", r.label);
    return r;
}

} // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config " + path + " is not valid JSON: " + e.what());
    }
    check_keys(j, "(root)",
               {"out_dir", "seed", "phantom", "geometry", "noise", "network", "training", "patches",
                "metrics", "verify", "inputs"});

    ExperimentConfig cfg;
    read_to(j, "out_dir", cfg.out_dir);
    if (j.contains("seed")) {
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.seed_set = true;
    }

    if (j.contains("phantom")) {
        const json& s = j.at("phantom");
        check_keys(s, "phantom", {"kind", "count", "size"});
        PhantomSection p;
        if (s.contains("kind")) p.kind = parse_dataset_kind(s.at("kind").get<std::string>());
        read_to(s, "count", p.count);
        read_to(s, "size", p.size);
        cfg.phantom = p;
    }
    if (j.contains("geometry")) {
        const json& s = j.at("geometry");
        check_keys(s, "geometry", {"n_angles", "det_pitch"});
        GeometrySection g;
        read_to(s, "n_angles", g.n_angles);
        read_to(s, "det_pitch", g.det_pitch);
        cfg.geometry = g;
    }
    if (j.contains("noise")) {
        const json& s = j.at("noise");
        check_keys(s, "noise",
                   {"mode", "gaussian_sd", "blank_flux", "electronic_sd", "blank_flux_sweep"});
        NoiseSection n;
        read_to(s, "mode", n.mode);
        if (n.mode != "gaussian" && n.mode != "quantum") {
            throw std::invalid_argument("config: noise.mode must be 'gaussian' or 'quantum', got '" +
                                        n.mode + "'");
        }
        read_to(s, "gaussian_sd", n.gaussian_sd);
        read_to(s, "blank_flux", n.blank_flux);
        read_to(s, "electronic_sd", n.electronic_sd);
        read_to(s, "blank_flux_sweep", n.blank_flux_sweep);
        cfg.noise = n;
    }
    if (j.contains("network")) {
        const json& s = j.at("network");
        check_keys(s, "network", {"generator", "discriminator"});
        NetworkSection n;
        if (s.contains("generator")) {
            const json& g = s.at("generator");
            check_keys(g, "network.generator", {"scales", "base_channels", "lrelu_slope"});
            read_to(g, "scales", n.generator.scales);
            read_to(g, "base_channels", n.generator.base_channels);
            read_to(g, "lrelu_slope", n.generator.lrelu_slope);
        }
        if (s.contains("discriminator")) {
            const json& d = s.at("discriminator");
            check_keys(d, "network.discriminator", {"base_channels", "lrelu_slope"});
            read_to(d, "base_channels", n.discriminator.base_channels);
            read_to(d, "lrelu_slope", n.discriminator.lrelu_slope);
        }
        cfg.network = n;
    }
    if (j.contains("training")) {
        const json& s = j.at("training");
        check_keys(s, "training",
                   {"lambda", "lr", "batch_size", "epochs", "d_steps_per_g_step", "intensity_scale",
                    "checkpoint_every"});
        TrainConfig t;
        read_to(s, "lambda", t.lambda);
        read_to(s, "lr", t.lr);
        read_to(s, "batch_size", t.batch_size);
        read_to(s, "epochs", t.epochs);
        read_to(s, "d_steps_per_g_step", t.d_steps_per_g_step);
        read_to(s, "intensity_scale", t.intensity_scale);
        read_to(s, "checkpoint_every", t.checkpoint_every);
        cfg.training = t;
    }
    if (j.contains("patches")) {
        const json& s = j.at("patches");
        check_keys(s, "patches", {"size", "stride", "per_image"});
        PatchesSection p;
        read_to(s, "size", p.size);
        read_to(s, "stride", p.stride);
        read_to(s, "per_image", p.per_image);
        cfg.patches = p;
    }
    if (j.contains("metrics")) {
        const json& s = j.at("metrics");
        check_keys(s, "metrics", {"ssim_window", "k1", "k2", "roi1", "roi2"});
        MetricsSection m;
        read_to(s, "ssim_window", m.ssim_window);
        read_to(s, "k1", m.k1);
        read_to(s, "k2", m.k2);
        if (s.contains("roi1")) m.roi1 = parse_roi(s.at("roi1"), "metrics.roi1");
        if (s.contains("roi2")) m.roi2 = parse_roi(s.at("roi2"), "metrics.roi2");
        cfg.metrics = m;
    }
    if (j.contains("verify")) {
        const json& s = j.at("verify");
        check_keys(s, "verify", {"support", "pairs", "lambda", "tolerance"});
        VerifySection v;
        read_to(s, "support", v.support);
        read_to(s, "pairs", v.pairs);
        read_to(s, "lambda", v.lambda);
        read_to(s, "tolerance", v.tolerance);
        cfg.verify = v;
    }
    if (j.contains("inputs")) {
        const json& s = j.at("inputs");
        check_keys(s, "inputs",
                   {"clean_dir", "x_dir", "z_dir", "images_dir", "checkpoint", "reference_dir",
                    "test_dir", "noisy_dir"});
        auto opt = [&](const char* key) -> std::optional<std::string> {
            if (s.contains(key)) return s.at(key).get<std::string>();
            return std::nullopt;
        };
        cfg.inputs.clean_dir = opt("clean_dir");
        cfg.inputs.x_dir = opt("x_dir");
        cfg.inputs.z_dir = opt("z_dir");
        cfg.inputs.images_dir = opt("images_dir");
        cfg.inputs.checkpoint = opt("checkpoint");
        cfg.inputs.reference_dir = opt("reference_dir");
        cfg.inputs.test_dir = opt("test_dir");
        cfg.inputs.noisy_dir = opt("noisy_dir");
    }
    return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const std::string& out_dir,
                     const std::optional<std::uint64_t>& seed) {
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed) {
        cfg.seed = *seed;
        cfg.seed_set = true;
    }
    if (!cfg.seed_set) {
        throw std::invalid_argument("config requires an explicit seed (set \"seed\" or pass --seed)");
    }
    if (cfg.out_dir.empty()) {
        throw std::invalid_argument("no output directory (set \"out_dir\" or pass --out)");
    }
    if (cfg.training) cfg.training->seed = cfg.seed;
}

} // namespace ctdn
