// kinex command-line driver. Builds a `key = value` config (file first,
// flags after, so flags win) and hands it to the C API.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kinex/kinex.h"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

struct Override {
  std::string key;
  CLI::Option* option;
  std::string value;
};

class Overrides {
 public:
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    items_.push_back(std::make_unique<Override>(Override{key, nullptr, {}}));
    auto* item = items_.back().get();
    item->option = app->add_option(flag, item->value, help);
    return item->option;
  }
  void add_switch(CLI::App* app, const std::string& flag, const std::string& key, const std::string& value,
                  const std::string& help) {
    items_.push_back(std::make_unique<Override>(Override{key, nullptr, value}));
    items_.back()->option = app->add_flag(flag, help);
  }
  std::string text() const {
    std::string s;
    for (const auto& it : items_) {
      if (it->option->count() > 0) s += it->key + " = " + it->value + "\n";
    }
    return s;
  }

 private:
  std::vector<std::unique_ptr<Override>> items_;
};

int status_exit(kx_status status) {
  if (status == KX_OK) return exit_ok;
  std::fprintf(stderr, "kinex: %s: %s\n", kx_status_name(status), kx_last_error());
  return status == KX_ERR_CONFIG || status == KX_ERR_INVALID_ARGUMENT ? exit_usage : exit_failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic wealth-exchange toolkit: particle simulations, PDE solves and scripted studies."};
  app.name("kinex");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kx_version()));

  const char* env_out = std::getenv("KINEX_OUT");
  std::string out_dir = env_out && *env_out ? env_out : "kinex_out";
  std::string config_file;
  bool quiet = false;
  Overrides global;
  app.add_option("--out,-o", out_dir, "Output directory (default: $KINEX_OUT, else ./kinex_out)");
  app.add_option("--config,-c", config_file, "Config file with `key = value` lines; flags override it");
  global.add(&app, "--seed", "seed", "Base random seed")->check(CLI::NonNegativeNumber);
  global.add(&app, "--threads", "threads", "Worker thread cap (0 = available parallelism)")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet,-q", quiet, "Do not print the run summary");

  auto* sim = app.add_subcommand("simulate", "Run the particle exchange model");
  Overrides sim_flags;
  sim_flags.add(sim, "--n", "n", "Number of agents (>= 2)")->check(CLI::Range(2.0, 1e9));
  sim_flags.add(sim, "--t", "t", "Time horizon");
  sim_flags.add(sim, "--init", "init", "Initial balances: constant:V | exponential:MEAN | uniform:A:B | file:PATH");
  sim_flags.add(sim, "--snapshots", "snapshots", "Comma-separated snapshot times (default: the horizon)");
  sim_flags.add(sim, "--clock", "clock", "Clock scaling: per_pair | global_n")->check(CLI::IsMember({"per_pair", "pair", "global_n", "global"}));
  sim_flags.add(sim, "--bin-width", "bin_width", "Histogram bin width (default: mean/10)");
  sim_flags.add(sim, "--audit-every", "audit_every", "Events between conservation audits");

  auto* pde = app.add_subcommand("pde", "Solve the kinetic equation with forward Euler and record diagnostics");
  Overrides pde_flags;
  pde_flags.add(pde, "--m1", "m1", "Mean wealth for equilibrium, exponential and random starts");
  pde_flags.add(pde, "--dx", "dx", "Cell width");
  pde_flags.add(pde, "--x-max", "x_max", "Domain length (default: 20 times the initial mean)");
  pde_flags.add(pde, "--dt", "dt", "Time step (must not exceed 1)");
  pde_flags.add(pde, "--t", "t", "Time horizon");
  pde_flags.add(pde, "--init", "init", "Initial density: equilibrium | exponential | uniform:A:B | dirac:A | random:SEED");
  pde_flags.add(pde, "--observe", "observe", "Time between diagnostics records");
  pde_flags.add(pde, "--lambda0", "lambda0", "Largest Laplace exponent checked (default: 0.6/m1)");
  pde_flags.add_switch(pde, "--no-dissipation", "dissipation", "false", "Skip the entropy dissipation column");
  pde_flags.add_switch(pde, "--no-wasserstein", "wasserstein", "false", "Skip the W1 and W2 columns");
  pde_flags.add_switch(pde, "--no-laplace", "laplace", "false", "Skip the Laplace bound column");

  auto* study = app.add_subcommand("study", "Run a scripted study and write report.json, series.csv and manifest.json");
  std::string study_name;
  study->add_option("--study", study_name, "Study name: chaos | contraction | figure1 | entropy | moments")
      ->required()
      ->check(CLI::IsMember({"chaos", "contraction", "figure1", "entropy", "moments"}));
  Overrides study_flags;
  study_flags.add(study, "--n-list", "n_list", "chaos: comma-separated agent counts");
  study_flags.add(study, "--replicas", "replicas", "chaos, moments: replicas per configuration");
  study_flags.add(study, "--n", "n", "figure1, moments: number of agents");
  study_flags.add(study, "--particles", "particles", "contraction: agents in the coupled run");
  study_flags.add(study, "--t", "t", "Time horizon");
  study_flags.add(study, "--m1", "m1", "Mean wealth (chaos, contraction, entropy)");
  study_flags.add(study, "--dx", "dx", "Cell width (chaos, contraction, entropy)");
  study_flags.add(study, "--dt", "dt", "entropy: time step");
  std::vector<std::string> settings;
  study->add_option("--set", settings, "Extra study parameter as key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? exit_ok : exit_usage;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e) == 0 ? exit_ok : exit_usage;
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e) == 0 ? exit_ok : exit_usage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  std::string config;
  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) {
      std::fprintf(stderr, "kinex: cannot read config file '%s'\n", config_file.c_str());
      return exit_usage;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    config = ss.str() + "\n";
  }
  config += global.text();

  kx_status status = KX_OK;
  int passed = 1;
  if (sim->parsed()) {
    status = kx_run_simulate((config + sim_flags.text()).c_str(), out_dir.c_str());
  } else if (pde->parsed()) {
    status = kx_run_pde((config + pde_flags.text()).c_str(), out_dir.c_str());
  } else {
    std::string extra;
    for (const auto& s : settings) {
      if (s.find('=') == std::string::npos) {
        std::fprintf(stderr, "kinex: --set expects key=value, got '%s'\n", s.c_str());
        return exit_usage;
      }
      extra += s + "\n";
    }
    status = kx_run_study(study_name.c_str(), (config + study_flags.text() + extra).c_str(), out_dir.c_str(), &passed);
  }
  if (status != KX_OK) return status_exit(status);
  if (!quiet) std::printf("%s\nartifacts: %s\n", kx_last_summary(), out_dir.c_str());
  return passed ? exit_ok : exit_failure;
}
