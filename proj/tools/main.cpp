#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ctdn/commands.hpp"
#include "ctdn/parallel.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", args.out_dir, "output directory (overrides config out_dir)");
    sub->add_option("--seed", args.seed, "master seed (overrides config seed)");
    sub->add_option("--threads", args.threads, "worker threads; 1 guarantees bit-exact runs")
        ->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic low-dose CT denoising pipeline"};
    app.require_subcommand(1);

    CommonArgs args;
    struct Entry {
        const char* name;
        const char* help;
        int (*fn)(const ctdn::ExperimentConfig&);
    };
    const Entry entries[] = {
        {"phantom", "generate clean phantom datasets (S1/S2/S3)", ctdn::cmd_phantom},
        {"simulate", "add gaussian or quantum (sinogram-domain) noise", ctdn::cmd_simulate},
        {"train", "train the fidelity-embedded adversarial denoiser", ctdn::cmd_train},
        {"denoise", "apply a trained checkpoint patchwise", ctdn::cmd_denoise},
        {"eval", "compute image-quality metrics and reports", ctdn::cmd_eval},
        {"verify", "brute-force verification of the optimal-discriminator identity",
         ctdn::cmd_verify},
    };
    for (const Entry& e : entries) {
        add_common(app.add_subcommand(e.name, e.help), args);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        ctdn::set_num_threads(args.threads);
        ctdn::ExperimentConfig cfg = ctdn::load_experiment_config(args.config_path);
        ctdn::apply_overrides(cfg, args.out_dir, args.seed);
        for (const Entry& e : entries) {
            if (app.get_subcommand(e.name)->parsed()) return e.fn(cfg);
        }
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
}
