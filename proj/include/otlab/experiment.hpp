#pragma once

// Config-driven orchestration: target family -> transport map -> checks ->
// report files.  Each check draws from its own named stream of the master
// seed, so adding or reordering checks never perturbs another check's
// randomness and reruns are bit-for-bit reproducible.

#include <memory>
#include <string>

#include "otlab/bound_report.hpp"
#include "otlab/config.hpp"
#include "otlab/potential.hpp"
#include "otlab/transport_map.hpp"

namespace otlab {

// Instantiates the target family of the config.
Potential make_target(const ExperimentConfig& config);

// Builds the configured transport map onto pot.  Solver budgets honor
// config.budget_scale.  Throws on solver failure.
std::unique_ptr<TransportMap> build_map(const ExperimentConfig& config,
                                        const Potential& pot);

// Full pipeline.  Individual check failures (exceptions included) are
// recorded in the report and the run continues; only target or map
// construction failures abort early, leaving every check failed.
RunReport run_experiment(const ExperimentConfig& config);

// run_experiment plus report.json / summary.csv / config.echo in
// config.out_dir.  Returns 0 when every gated check passes, 1 otherwise.
int run_and_write(const ExperimentConfig& config);

// Catalog of built-in target families and their properties.
std::string list_targets();

}  // namespace otlab
