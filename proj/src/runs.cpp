#include "kinex/runs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "kinex/diagnostics.hpp"
#include "kinex/error.hpp"
#include "kinex/experiments.hpp"
#include "kinex/kinetic1d.hpp"
#include "kinex/particle.hpp"

namespace kinex::runs {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& what, const std::string& text) {
  return io::get_double({{what, text}}, what, 0.0);
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// init spec -> (kind, numeric arguments)
struct InitSpec {
  std::string kind;
  std::vector<double> args;
  std::string path;
};

InitSpec parse_init(const std::string& text) {
  InitSpec s;
  const auto parts = split(text, ':');
  if (parts.empty() || parts[0].empty()) fail(ErrorCode::config, "init: empty specification");
  s.kind = parts[0];
  if (s.kind == "file") {
    if (parts.size() < 2) fail(ErrorCode::config, "init: file:PATH expects a path");
    s.path = text.substr(5);
    return s;
  }
  for (std::size_t k = 1; k < parts.size(); ++k) s.args.push_back(parse_number("init", parts[k]));
  return s;
}

void expect_args(const InitSpec& s, std::size_t n, const char* usage) {
  if (s.args.size() != n) fail(ErrorCode::config, std::string("init: expected ") + usage);
}

particle::WealthVector make_wealth(const std::string& text, std::size_t n, std::uint64_t seed) {
  const auto s = parse_init(text);
  if (s.kind == "constant") {
    expect_args(s, 1, "constant:VALUE");
    if (s.args[0] < 0.0) fail(ErrorCode::domain, "init: balances must be nonnegative");
    return particle::WealthVector::constant(n, s.args[0]);
  }
  if (s.kind == "exponential") {
    expect_args(s, 1, "exponential:MEAN");
    return particle::WealthVector::exponential(n, s.args[0], seed);
  }
  if (s.kind == "uniform") {
    expect_args(s, 2, "uniform:A:B");
    const double a = s.args[0], b = s.args[1];
    if (!(a >= 0.0 && b > a)) fail(ErrorCode::domain, "init: uniform:A:B needs 0 <= A < B");
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = a + (b - a) * rng.uniform();
    return particle::WealthVector(std::move(v));
  }
  if (s.kind == "file") {
    auto w = particle::WealthVector::from_file(s.path);
    if (w.size() < 2) fail(ErrorCode::config, "init: file must hold at least two balances");
    return w;
  }
  fail(ErrorCode::config, "init: unknown kind '" + s.kind + "' (constant, exponential, uniform, file)");
}

// Mean implied by a density init spec, used for the default x_max.
double density_init_mean(const InitSpec& s, double m1) {
  if (s.kind == "uniform" && s.args.size() == 2) return 0.5 * (s.args[0] + s.args[1]);
  if (s.kind == "dirac" && s.args.size() == 1) return s.args[0];
  return m1;
}

GridDensity1D make_density(const InitSpec& s, const Grid1D& grid, double m1) {
  if (s.kind == "equilibrium") {
    expect_args(s, 0, "equilibrium");
    return Equilibrium(m1).on_grid(grid);
  }
  if (s.kind == "exponential") {
    expect_args(s, 0, "exponential");
    return Equilibrium(m1).sampled(grid).normalized();
  }
  if (s.kind == "uniform") {
    expect_args(s, 2, "uniform:A:B");
    if (!(s.args[0] >= 0.0 && s.args[1] > s.args[0] && s.args[1] <= grid.x_max())) {
      fail(ErrorCode::domain, "init: uniform:A:B needs 0 <= A < B <= x_max");
    }
    return GridDensity1D::uniform(grid, s.args[0], s.args[1]);
  }
  if (s.kind == "dirac") {
    expect_args(s, 1, "dirac:A");
    return GridDensity1D::dirac(grid, s.args[0]);
  }
  if (s.kind == "random") {
    expect_args(s, 1, "random:SEED");
    if (s.args[0] < 0.0 || s.args[0] != std::floor(s.args[0])) fail(ErrorCode::config, "init: random:SEED expects an integer seed");
    return experiments::random_bumps(grid, m1, static_cast<std::uint64_t>(s.args[0]));
  }
  fail(ErrorCode::config, "init: unknown kind '" + s.kind + "' (equilibrium, exponential, uniform, dirac, random)");
}

Grid1D make_grid(const io::ConfigMap& c, double mean) {
  const double dx = io::get_double(c, "dx", 0.01);
  const double x_max = io::get_double(c, "x_max", 20.0 * mean);
  if (!(dx > 0.0) || !(x_max > 0.0)) fail(ErrorCode::config, "grid: dx and x_max must be positive");
  if (x_max / dx > 1e6) fail(ErrorCode::config, "grid: more than 10^6 cells requested");
  return Grid1D::with_spacing(x_max, dx);
}

particle::ClockScale clock_of(const io::ConfigMap& c) {
  try {
    return particle::parse_clock_scale(io::get_string(c, "clock", "per_pair"));
  } catch (const Error& e) {
    fail(ErrorCode::config, e.what());
  }
}

unsigned threads_of(const io::ConfigMap& c) {
  return static_cast<unsigned>(std::min<std::uint64_t>(io::get_u64(c, "threads", 0), 1024));
}

}  // namespace

RunResult run_simulate(const io::ConfigMap& c, const std::string& out_dir) {
  io::require_known(c, {"n", "t", "init", "seed", "snapshots", "clock", "bin_width", "audit_every", "threads"}, "simulate");
  const auto n = io::get_u64(c, "n", 1000);
  if (n < 2) fail(ErrorCode::config, "simulate: n must be at least 2");
  const double horizon = io::get_double(c, "t", 1.0);
  const std::uint64_t seed = io::get_u64(c, "seed", 1);

  particle::SimConfig sim;
  sim.horizon = horizon;
  sim.seed = seed;
  sim.clock_scale = clock_of(c);
  sim.snapshot_times = io::get_double_list(c, "snapshots", {horizon});
  sim.audit_every = io::get_u64(c, "audit_every", 1'000'000);
  const auto initial = make_wealth(io::get_string(c, "init", "constant:1"), n, derive_seed(seed, 0x1417));
  const auto traj = particle::simulate(sim, initial);

  RunResult result;
  experiments::Table summary;
  summary.columns = {"time", "mean", "m2", "min", "max", "W1_exponential"};
  const double bin = io::get_double(c, "bin_width", initial.mean() > 0.0 ? initial.mean() / 10.0 : 1.0);
  if (!(bin > 0.0)) fail(ErrorCode::config, "simulate: bin_width must be positive");
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& s = traj.snapshots[k];
    const auto b = s.state.balances();
    const double mean = s.state.exact_total() / static_cast<double>(s.state.size());
    const double w1 = mean > 0.0 ? diagnostics::wasserstein1(diagnostics::EmpiricalSample::from(b), diagnostics::ExponentialLaw{mean})
                                 : std::numeric_limits<double>::quiet_NaN();
    summary.rows.push_back({s.time, mean, s.state.moment(2), *std::min_element(b.begin(), b.end()),
                            *std::max_element(b.begin(), b.end()), w1});

    const auto hist = particle::empirical_histogram(s.state, bin);
    experiments::Table h;
    h.columns = {"x_left", "x_mid", "density", "exponential"};
    for (std::size_t i = 0; i < hist.size(); ++i) {
      const double a = hist.grid().left_edge(i);
      const double e = mean > 0.0 ? (std::exp(-a / mean) - std::exp(-(a + hist.grid().dx()) / mean)) / hist.grid().dx() : 0.0;
      h.rows.push_back({a, hist.grid().node(i), hist[i], e});
    }
    result.outputs.push_back(io::write_file(out_dir, "histogram_" + std::to_string(k) + ".csv", io::table_csv(h)));
  }
  result.outputs.push_back(io::write_file(out_dir, "summary.csv", io::table_csv(summary)));

  experiments::Table fin;
  fin.columns = {"agent", "balance"};
  const auto& last = traj.snapshots.back().state;
  for (std::size_t i = 0; i < last.size(); ++i) fin.rows.push_back({static_cast<double>(i), last[i]});
  result.outputs.push_back(io::write_file(out_dir, "final_state.csv", io::table_csv(fin)));

  io::write_manifest(out_dir, {"simulate", c, seed, traj.event_count, result.outputs});
  const auto& row = summary.rows.back();
  result.summary = "simulate: N=" + std::to_string(n) + " T=" + short_num(horizon) + " events=" + std::to_string(traj.event_count) +
                   " mean=" + short_num(row[1]) + " m2=" + short_num(row[2]) + " W1_exp=" + short_num(row[5]);
  return result;
}

RunResult run_pde(const io::ConfigMap& c, const std::string& out_dir) {
  io::require_known(c, {"m1", "dx", "x_max", "dt", "t", "init", "observe", "dissipation", "wasserstein", "laplace", "lambda0",
                        "threads", "seed"},
                    "pde");
  const double m1 = io::get_double(c, "m1", 1.0);
  if (!(m1 > 0.0)) fail(ErrorCode::domain, "pde: m1 must be positive");
  const auto init = parse_init(io::get_string(c, "init", "equilibrium"));
  const Grid1D grid = make_grid(c, density_init_mean(init, m1));
  const auto q0 = make_density(init, grid, m1);
  const double horizon = io::get_double(c, "t", 1.0);
  const double dt = io::get_double(c, "dt", 0.05);
  if (!(horizon >= 0.0)) fail(ErrorCode::config, "pde: t must be nonnegative");
  if (!(dt > 0.0)) fail(ErrorCode::config, "pde: dt must be positive");
  if (dt > 1.0) fail(ErrorCode::stability, "pde: dt = " + short_num(dt) + " exceeds 1, forward Euler would lose positivity");
  const double observe = io::get_double(c, "observe", 0.5);
  if (!(observe > 0.0)) fail(ErrorCode::config, "pde: observe must be positive");
  const auto every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(observe / dt)));

  diagnostics::RecordOptions opt;
  opt.m1 = q0.mean() / q0.mass();
  opt.dissipation = io::get_bool(c, "dissipation", true);
  opt.wasserstein = io::get_bool(c, "wasserstein", true);
  opt.laplace = io::get_bool(c, "laplace", true);
  // G(lambda) = (1 - m1 lambda) int e^{lambda x} q is 1 at equilibrium
  opt.lambda0 = io::get_double(c, "lambda0", 0.6 / opt.m1);
  opt.laplace_c = opt.m1;
  if (opt.laplace && !(opt.lambda0 * opt.m1 < 1.0 && opt.lambda0 > 0.0)) {
    fail(ErrorCode::config, "pde: lambda0 must lie in (0, 1/m1)");
  }

  std::vector<diagnostics::DiagnosticsRecord> records;
  GridDensity1D q = q0;
  double tail = 0.0;
  std::size_t clipped = 0;
  records.push_back(diagnostics::make_record(0.0, q, opt, 0.0));
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t_prev = static_cast<double>(s - 1) * dt;
    const double h = s == steps ? horizon - t_prev : dt;
    kinetic1d::StepReport rep;
    q = kinetic1d::step_euler(q, h, &rep);
    tail += rep.tail_mass;
    clipped += rep.clipped;
    if (s % every == 0 || s == steps) records.push_back(diagnostics::make_record(s == steps ? horizon : t_prev + h, q, opt, tail));
  }

  RunResult result;
  std::string csv = std::string(diagnostics::DiagnosticsRecord::csv_header()) + "\n";
  for (const auto& r : records) {
    const double row[] = {r.time, r.mass, r.mean, r.m2, r.entropy_rel, r.D, r.W1, r.W2, r.laplace_sup, r.tail_mass};
    for (std::size_t k = 0; k < std::size(row); ++k) csv += (k ? "," : "") + io::number(row[k]);
    csv += "\n";
  }
  result.outputs.push_back(io::write_file(out_dir, "diagnostics.csv", csv));
  io::write_density(out_dir, "density_initial", q0);
  io::write_density(out_dir, "density_final", q);
  result.outputs.insert(result.outputs.end(), {"density_initial.csv", "density_initial.json", "density_final.csv", "density_final.json"});

  std::string extra;
  if (opt.dissipation) {
    const auto eep = diagnostics::eep_study(records);
    experiments::Table t;
    t.columns = {"time", "entropy", "D"};
    for (std::size_t k = 0; k < eep.times.size(); ++k) t.rows.push_back({eep.times[k], eep.entropy[k], eep.dissipation[k]});
    result.outputs.push_back(io::write_file(out_dir, "eep.csv", io::table_csv(t)));
    if (eep.fitted) extra = " eep_theta=" + short_num(eep.theta);
  }
  io::write_manifest(out_dir, {"pde", c, io::get_u64(c, "seed", 0), steps, result.outputs});
  const auto& lr = records.back();
  result.summary = "pde: M=" + std::to_string(grid.size()) + " steps=" + std::to_string(steps) + " mass=" + short_num(lr.mass) +
                   " mean=" + short_num(lr.mean) + " entropy_rel=" + short_num(lr.entropy_rel) + " truncated=" + short_num(tail) +
                   " clipped=" + std::to_string(clipped) + extra;
  return result;
}

const std::vector<std::string>& study_names() {
  static const std::vector<std::string> names{"chaos", "contraction", "figure1", "entropy", "moments"};
  return names;
}

bool is_study(const std::string& name) {
  const auto& n = study_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

RunResult run_study(const std::string& name, const io::ConfigMap& c, const std::string& out_dir) {
  const std::uint64_t seed = io::get_u64(c, "seed", 1);
  const unsigned threads = threads_of(c);
  experiments::StudyReport report;
  std::uint64_t events = 0;

  if (name == "chaos") {
    io::require_known(c, {"seed", "threads", "n_list", "replicas", "t", "snapshots", "pde_dt", "dx", "x_max", "m1", "clock"}, "chaos");
    experiments::ChaosStudyConfig cfg;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.horizon = io::get_double(c, "t", 5.0);
    cfg.n_list.clear();
    for (double v : io::get_double_list(c, "n_list", {100, 1000, 10000})) {
      if (v < 0.0 || v != std::floor(v)) fail(ErrorCode::config, "chaos: n_list expects integers");
      cfg.n_list.push_back(static_cast<std::size_t>(v));
    }
    cfg.replicas = io::get_u64(c, "replicas", 20);
    std::vector<double> snaps;
    for (int k = 0; k <= static_cast<int>(std::floor(cfg.horizon)); ++k) snaps.push_back(k);
    if (snaps.back() != cfg.horizon) snaps.push_back(cfg.horizon);
    cfg.snapshot_times = io::get_double_list(c, "snapshots", snaps);
    cfg.pde_dt = io::get_double(c, "pde_dt", 0.01);
    cfg.clock_scale = clock_of(c);
    cfg.declared_mean = io::get_double(c, "m1", 1.0);
    if (!(cfg.declared_mean > 0.0)) fail(ErrorCode::domain, "chaos: m1 must be positive");
    const Grid1D grid = make_grid(c, cfg.declared_mean);
    report = experiments::chaos_scaling(cfg, Equilibrium(cfg.declared_mean).on_grid(grid));
    events = static_cast<std::uint64_t>(report.scalars["events"]);
  } else if (name == "contraction") {
    io::require_known(c, {"seed", "threads", "t", "pde_dt", "dx", "x_max", "init", "m1", "observe", "particles", "particle_t",
                          "run_particles"},
                      "contraction");
    experiments::ContractionConfig cfg;
    cfg.seed = seed;
    cfg.horizon = io::get_double(c, "t", 20.0);
    cfg.pde_dt = io::get_double(c, "pde_dt", 0.01);
    cfg.observe_every = io::get_double(c, "observe", 0.5);
    cfg.particles = io::get_u64(c, "particles", 100000);
    cfg.particle_horizon = io::get_double(c, "particle_t", 10.0);
    cfg.run_particles = io::get_bool(c, "run_particles", true);
    if (cfg.run_particles && cfg.particles < 2) fail(ErrorCode::config, "contraction: particles must be at least 2");
    const double m1 = io::get_double(c, "m1", 1.0);
    const auto init = parse_init(io::get_string(c, "init", "uniform:0:2"));
    const Grid1D grid = make_grid(c, density_init_mean(init, m1));
    report = experiments::contraction_study(make_density(init, grid, m1), cfg);
    events = static_cast<std::uint64_t>(report.scalars["coupled_events"]);
  } else if (name == "figure1") {
    io::require_known(c, {"seed", "threads", "n", "t", "start"}, "figure1");
    const auto n = io::get_u64(c, "n", 10000);
    if (n < 2) fail(ErrorCode::config, "figure1: n must be at least 2");
    report = experiments::figure1_reproduction(seed, n, io::get_double(c, "t", 1000.0), io::get_double(c, "start", 10.0));
    events = static_cast<std::uint64_t>(report.scalars["events"]);
  } else if (name == "entropy") {
    io::require_known(c, {"seed", "threads", "m1", "dx", "dt", "t", "x_max_factor", "fit_from", "observe"}, "entropy");
    experiments::EntropyDecayConfig cfg;
    cfg.seed = io::get_u64(c, "seed", 42);
    cfg.m1 = io::get_double(c, "m1", 5.0);
    cfg.dx = io::get_double(c, "dx", 0.01);
    cfg.dt = io::get_double(c, "dt", 0.05);
    cfg.horizon = io::get_double(c, "t", 10.0);
    cfg.x_max_factor = io::get_double(c, "x_max_factor", 20.0);
    cfg.fit_from = io::get_double(c, "fit_from", 2.0);
    cfg.dissipation_every = io::get_double(c, "observe", 0.5);
    if (cfg.dt > 1.0) fail(ErrorCode::stability, "entropy: dt exceeds 1");
    report = experiments::entropy_decay_study(cfg);
  } else if (name == "moments") {
    io::require_known(c, {"seed", "threads", "start", "n", "replicas", "times", "pde_dx", "pde_dt"}, "moments");
    experiments::MomentStudyConfig cfg;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.start = io::get_double(c, "start", 10.0);
    cfg.agents = io::get_u64(c, "n", 1000);
    cfg.replicas = io::get_u64(c, "replicas", 100);
    cfg.times = io::get_double_list(c, "times", {1.0, 3.0, 10.0});
    cfg.pde_dx = io::get_double(c, "pde_dx", 0.05);
    cfg.pde_dt = io::get_double(c, "pde_dt", 0.05);
    report = experiments::moment_crossvalidation(cfg);
  } else {
    fail(ErrorCode::invalid_argument, "unknown study '" + name + "'");
  }

  RunResult result;
  result.outputs = io::write_report(out_dir, report);
  io::write_manifest(out_dir, {"study " + name, c, seed, events, result.outputs});
  result.passed = report.passed();
  std::size_t ok = 0;
  for (const auto& ch : report.checks) ok += ch.passed ? 1 : 0;
  result.summary = "study " + name + ": " + (result.passed ? "PASS" : "FAIL") + " (" + std::to_string(ok) + "/" +
                   std::to_string(report.checks.size()) + " checks)";
  for (const auto& ch : report.checks) {
    if (!ch.passed) result.summary += "\n  failed: " + ch.name + " value=" + short_num(ch.value) + " " + ch.detail;
  }
  return result;
}

}  // namespace kinex::runs
