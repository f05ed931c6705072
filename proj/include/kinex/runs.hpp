#pragma once

#include <string>
#include <vector>

#include "kinex/io.hpp"

namespace kinex::runs {

struct RunResult {
  std::string summary;  // one line for the terminal
  bool passed = true;   // studies only
  std::vector<std::string> outputs;
};

/// Particle run. Keys: n, t, init (constant:V | exponential:M | uniform:A:B |
/// file:PATH), seed, snapshots (comma list, default T), clock (per_pair |
/// global_n), bin_width, audit_every, threads.
RunResult run_simulate(const io::ConfigMap& config, const std::string& out_dir);

/// PDE run with diagnostics. Keys: m1, dx, x_max, dt, t, init (equilibrium |
/// exponential | uniform:A:B | dirac:A | random:SEED), observe, dissipation,
/// wasserstein, laplace, lambda0, threads.
RunResult run_pde(const io::ConfigMap& config, const std::string& out_dir);

/// chaos | contraction | figure1 | entropy | moments.
bool is_study(const std::string& name);
const std::vector<std::string>& study_names();
RunResult run_study(const std::string& name, const io::ConfigMap& config, const std::string& out_dir);

}  // namespace kinex::runs
