#include "ctdn/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ctdn/gridfile.hpp"
#include "ctdn/rng.hpp"
#include "ctdn/theory.hpp"
#include "ctdn/tomo.hpp"

namespace ctdn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> list_grid_files(const std::string& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".grid") {
            names.push_back(entry.path().filename().string());
        }
    }
    if (names.empty()) throw std::runtime_error("no .grid files in " + dir);
    std::sort(names.begin(), names.end());
    return names;
}

std::pair<std::vector<Image>, std::vector<std::string>> load_images(const std::string& dir) {
    std::pair<std::vector<Image>, std::vector<std::string>> out;
    for (const auto& name : list_grid_files(dir)) {
        out.first.push_back(read_image_grid((fs::path(dir) / name).string()));
        out.second.push_back(name);
    }
    return out;
}

void write_image_outputs(const std::string& dir, const std::string& name, const Image& img) {
    write_image_grid((fs::path(dir) / name).string(), img);
    write_pgm16((fs::path(dir) / (fs::path(name).stem().string() + ".pgm")).string(), img);
}

json shape_to_json(const ShapeSpec& s) {
    json j;
    j["kind"] = s.kind == ShapeKind::kDisk ? "disk" : "rectangle";
    j["cx"] = s.cx;
    j["cy"] = s.cy;
    j["intensity"] = s.intensity;
    if (s.kind == ShapeKind::kDisk) {
        j["radius"] = s.radius;
    } else {
        j["half_w"] = s.half_w;
        j["half_h"] = s.half_h;
    }
    return j;
}

std::string flux_tag(double flux) {
    std::ostringstream os;
    os << "flux_" << flux;
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << text;
}

} // namespace

int cmd_phantom(const ExperimentConfig& cfg) {
    const PhantomSection& ph = require_section(cfg.phantom, "phantom");
    fs::create_directories(cfg.out_dir);
    auto samples = sample_dataset(ph.kind, ph.count, ph.size, cfg.seed);
    std::string prefix = dataset_kind_name(ph.kind);
    std::transform(prefix.begin(), prefix.end(), prefix.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    json manifest;
    manifest["kind"] = dataset_kind_name(ph.kind);
    manifest["count"] = ph.count;
    manifest["size"] = ph.size;
    manifest["seed"] = cfg.seed;
    json sample_list = json::array();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%s_%03zu.grid", prefix.c_str(), i);
        write_image_outputs(cfg.out_dir, buf, samples[i].image);
        json entry;
        entry["file"] = buf;
        entry["seed"] = samples[i].seed;
        entry["shapes"] = json::array();
        for (const auto& s : samples[i].shapes) entry["shapes"].push_back(shape_to_json(s));
        if (samples[i].anomaly) {
            const auto& a = *samples[i].anomaly;
            entry["anomaly"] = {{"host", a.host == ShapeKind::kDisk ? "disk" : "rectangle"},
                                {"cx", a.cx},
                                {"cy", a.cy},
                                {"radius", a.radius},
                                {"intensity_delta", a.intensity_delta}};
        } else {
            entry["anomaly"] = nullptr;
        }
        sample_list.push_back(entry);
    }
    manifest["samples"] = sample_list;
    write_text((fs::path(cfg.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    std::cout << "phantom: wrote " << samples.size() << " " << dataset_kind_name(ph.kind)
              << " images to " << cfg.out_dir << '\n';
    return 0;
}

int cmd_simulate(const ExperimentConfig& cfg) {
    const NoiseSection& noise = require_section(cfg.noise, "noise");
    if (!cfg.inputs.clean_dir) {
        throw std::invalid_argument("simulate needs inputs.clean_dir");
    }
    auto [images, names] = load_images(*cfg.inputs.clean_dir);
    fs::create_directories(cfg.out_dir);

    json manifest;
    manifest["mode"] = noise.mode;
    manifest["seed"] = cfg.seed;
    json outputs = json::array();

    if (noise.mode == "gaussian") {
        manifest["gaussian_sd"] = noise.gaussian_sd;
        for (std::size_t i = 0; i < images.size(); ++i) {
            std::uint64_t si = mix_seed(cfg.seed, i);
            Image noisy = add_gaussian_noise(images[i], noise.gaussian_sd, si);
            write_image_outputs(cfg.out_dir, names[i], noisy);
            outputs.push_back({{"file", names[i]}, {"seed", si}});
        }
    } else { // quantum
        GeometrySection geom_cfg = cfg.geometry.value_or(GeometrySection{});
        manifest["electronic_sd"] = noise.electronic_sd;
        manifest["n_angles"] = geom_cfg.n_angles;
        manifest["det_pitch"] = geom_cfg.det_pitch;
        std::vector<double> fluxes = noise.blank_flux_sweep;
        bool sweep = !fluxes.empty();
        if (!sweep) fluxes.push_back(noise.blank_flux);
        for (std::size_t fi = 0; fi < fluxes.size(); ++fi) {
            std::string dir = sweep ? (fs::path(cfg.out_dir) / flux_tag(fluxes[fi])).string()
                                    : cfg.out_dir;
            fs::create_directories(dir);
            for (std::size_t i = 0; i < images.size(); ++i) {
                ScanGeometry geom =
                    ScanGeometry::for_image(images[i].n, geom_cfg.n_angles, geom_cfg.det_pitch);
                NoiseConfig nc;
                nc.blank_flux = fluxes[fi];
                nc.electronic_sd = noise.electronic_sd;
                nc.seed = mix_seed(cfg.seed, fi * 1000003ull + i);
                Sinogram clean = radon(hu_to_attenuation(images[i]), geom);
                Sinogram noisy = add_quantum_noise(clean, nc);
                Image recon = attenuation_to_hu(fbp(noisy, geom, images[i].n));
                recon.pixel_mm = images[i].pixel_mm;
                write_image_outputs(dir, names[i], recon);
                outputs.push_back(
                    {{"file", names[i]}, {"blank_flux", fluxes[fi]}, {"seed", nc.seed}});
            }
        }
    }
    manifest["outputs"] = outputs;
    write_text((fs::path(cfg.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    std::cout << "simulate: wrote " << outputs.size() << " noisy images (" << noise.mode
              << " mode) under " << cfg.out_dir << '\n';
    return 0;
}

int cmd_train(const ExperimentConfig& cfg) {
    const NetworkSection& net = require_section(cfg.network, "network");
    const PatchesSection& ps = require_section(cfg.patches, "patches");
    TrainConfig tc = require_section(cfg.training, "training");
    if (!cfg.inputs.x_dir || !cfg.inputs.z_dir) {
        throw std::invalid_argument("train needs inputs.x_dir (clean) and inputs.z_dir (noisy)");
    }
    auto [x_images, x_ids] = load_images(*cfg.inputs.x_dir);
    auto [z_images, z_ids] = load_images(*cfg.inputs.z_dir);
    fs::create_directories(cfg.out_dir);

    auto [s_x, s_z] = build_unpaired_sets(x_images, x_ids, z_images, z_ids, ps.size, ps.stride,
                                          ps.per_image, mix_seed(cfg.seed, 0xda7a));
    std::cout << "train: " << s_x.size() << " clean patches, " << s_z.size()
              << " noisy patches of size " << ps.size << '\n';

    int report_every = 50;
    TrainResult result = train(s_z, s_x, net.generator, net.discriminator, tc, cfg.out_dir,
                               [&](const LossRow& row) {
                                   if (row.iteration % report_every == 0) {
                                       std::cout << "  epoch " << row.epoch << " iter "
                                                 << row.iteration << " d_loss " << row.d_loss
                                                 << " g_loss " << row.g_loss << " fidelity "
                                                 << row.fidelity << '\n';
                                   }
                               });
    write_text((fs::path(cfg.out_dir) / "loss_log.txt").string(), format_loss_log(result.log));
    std::cout << "train: finished " << result.checkpoint.epoch << " epochs, checkpoint at "
              << (fs::path(cfg.out_dir) / "checkpoint_final.ckpt").string() << '\n';
    return 0;
}

int cmd_denoise(const ExperimentConfig& cfg) {
    const PatchesSection& ps = require_section(cfg.patches, "patches");
    if (!cfg.inputs.checkpoint || !cfg.inputs.images_dir) {
        throw std::invalid_argument("denoise needs inputs.checkpoint and inputs.images_dir");
    }
    Checkpoint cp = load_checkpoint(*cfg.inputs.checkpoint);
    auto [images, names] = load_images(*cfg.inputs.images_dir);
    fs::create_directories(cfg.out_dir);
    for (std::size_t i = 0; i < images.size(); ++i) {
        Image den = denoise(images[i], cp, ps.size, ps.stride);
        write_image_outputs(cfg.out_dir, names[i], den);
    }
    std::cout << "denoise: wrote " << images.size() << " images to " << cfg.out_dir << '\n';
    return 0;
}

int cmd_eval(const ExperimentConfig& cfg) {
    MetricsSection ms = cfg.metrics.value_or(MetricsSection{});
    if (!cfg.inputs.test_dir) throw std::invalid_argument("eval needs inputs.test_dir");
    auto [test_images, test_names] = load_images(*cfg.inputs.test_dir);
    fs::create_directories(cfg.out_dir);

    EvalReport report;
    if (cfg.inputs.reference_dir) {
        auto [ref_images, ref_names] = load_images(*cfg.inputs.reference_dir);
        auto ref_of = [&](const std::string& name) -> const Image& {
            auto it = std::find(ref_names.begin(), ref_names.end(), name);
            if (it == ref_names.end()) {
                throw std::runtime_error("no reference counterpart for " + name + " in " +
                                         *cfg.inputs.reference_dir);
            }
            return ref_images[static_cast<std::size_t>(it - ref_names.begin())];
        };
        std::vector<double> test_psnrs;
        for (std::size_t i = 0; i < test_images.size(); ++i) {
            const Image& ref = ref_of(test_names[i]);
            ReferenceRow row;
            row.id = test_names[i];
            row.mse = mse(ref, test_images[i]);
            row.psnr = psnr_auto(ref, test_images[i]);
            auto [lo, hi] = std::minmax_element(ref.data.begin(), ref.data.end());
            double range = *hi - *lo;
            row.ssim = range > 0.0 ? ssim(ref, test_images[i], range, ms.ssim_window, ms.k1, ms.k2)
                                   : 1.0;
            report.reference_rows.push_back(row);
            test_psnrs.push_back(row.psnr);
        }
        if (cfg.inputs.noisy_dir) {
            auto [noisy_images, noisy_names] = load_images(*cfg.inputs.noisy_dir);
            std::vector<double> noisy_psnrs;
            for (std::size_t i = 0; i < test_images.size(); ++i) {
                auto it = std::find(noisy_names.begin(), noisy_names.end(), test_names[i]);
                if (it == noisy_names.end()) {
                    throw std::runtime_error("no noisy counterpart for " + test_names[i]);
                }
                noisy_psnrs.push_back(psnr_auto(
                    ref_of(test_names[i]),
                    noisy_images[static_cast<std::size_t>(it - noisy_names.begin())]));
            }
            bool finite = std::all_of(noisy_psnrs.begin(), noisy_psnrs.end(),
                                      [](double v) { return std::isfinite(v); }) &&
                          std::all_of(test_psnrs.begin(), test_psnrs.end(),
                                      [](double v) { return std::isfinite(v); });
            if (finite && noisy_psnrs.size() >= 2) {
                try {
                    report.ttest = paired_t_test(noisy_psnrs, test_psnrs);
                    report.ttest_note = "psnr_noisy_to_test";
                } catch (const std::invalid_argument&) {
                    report.ttest_note = "degenerate (identical psnr arrays)";
                }
            }
        }
    }
    if (ms.roi1 && ms.roi2) {
        for (std::size_t i = 0; i < test_images.size(); ++i) {
            RoiRow row;
            row.id = test_names[i];
            row.snr1 = snr(test_images[i], *ms.roi1);
            row.snr2 = snr(test_images[i], *ms.roi2);
            row.cnr = cnr(test_images[i], *ms.roi1, *ms.roi2);
            report.roi_rows.push_back(row);
        }
    }
    if (report.reference_rows.empty() && report.roi_rows.empty()) {
        throw std::invalid_argument(
            "eval has nothing to do: provide inputs.reference_dir and/or metrics.roi1+roi2");
    }
    std::string text = format_report(report);
    write_text((fs::path(cfg.out_dir) / "report.txt").string(), text);
    std::cout << text;
    return 0;
}

int cmd_verify(const ExperimentConfig& cfg) {
    VerifySection vs = cfg.verify.value_or(VerifySection{});
    if (vs.support < 2 || vs.pairs < 1) {
        throw std::invalid_argument("verify needs support >= 2 and pairs >= 1");
    }
    fs::create_directories(cfg.out_dir);
    RngStream rng(mix_seed(cfg.seed, 0x7e0));
    auto random_distribution = [&]() {
        // Probabilities bounded away from zero keep the density ratios (and
        // hence D_opt) inside the brute-force grid range.
        std::vector<double> p(static_cast<std::size_t>(vs.support));
        double sum = 0.0;
        for (auto& v : p) {
            v = 0.5 + rng.uniform();
            sum += v;
        }
        double correction = 0.0;
        for (auto& v : p) {
            v /= sum;
            correction += v;
        }
        p.back() += 1.0 - correction; // exact unit sum for the validator
        return DiscreteDistribution::create(p);
    };

    std::ostringstream out;
    bool all_passed = true;
    for (int k = 0; k < vs.pairs; ++k) {
        DiscreteDistribution px = random_distribution();
        // Pair 0 exercises the equality case p_G = p_x (KL = 0).
        DiscreteDistribution pg = k == 0 ? px : random_distribution();
        double fidelity = k == 0 ? 0.0 : rng.uniform();
        Theorem1Report rep = verify_theorem1(px, pg, fidelity, vs.lambda, vs.tolerance);
        all_passed = all_passed && rep.passed;
        out << "pair " << k << " (support " << vs.support << ", lambda " << vs.lambda
            << ", fidelity " << fidelity << ")\n"
            << rep.to_text() << '\n';
    }
    out << "overall: " << (all_passed ? "PASS" : "FAIL") << " (" << vs.pairs << " pairs)\n";
    write_text((fs::path(cfg.out_dir) / "theorem1_report.txt").string(), out.str());
    std::cout << out.str();
    return all_passed ? 0 : 1;
}

} // namespace ctdn
