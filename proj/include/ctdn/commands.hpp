// Subcommand implementations behind the CLI front-end. Each is a thin,
// deterministic orchestration of the corresponding modules; all return a
// process exit code.
#pragma once

#include "ctdn/config.hpp"

namespace ctdn {

int cmd_phantom(const ExperimentConfig& cfg);
int cmd_simulate(const ExperimentConfig& cfg);
int cmd_train(const ExperimentConfig& cfg);
int cmd_denoise(const ExperimentConfig& cfg);
int cmd_eval(const ExperimentConfig& cfg);
int cmd_verify(const ExperimentConfig& cfg);

} // namespace ctdn
