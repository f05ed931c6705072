#include "kinex/kinex.h"

#include <algorithm>
#include <exception>
#include <new>
#include <string>

#include "kinex/diagnostics.hpp"
#include "kinex/error.hpp"
#include "kinex/kinetic1d.hpp"
#include "kinex/moments.hpp"
#include "kinex/particle.hpp"
#include "kinex/runs.hpp"
#include "kinex/spectral.hpp"

struct kx_wealth {
  kinex::particle::WealthVector v;
};
struct kx_density {
  kinex::GridDensity1D q;
};
struct kx_spectrum {
  kinex::spectral::LaguerreSpectrum s;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_summary;

template <class Fn>
kx_status guard(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return KX_OK;
  } catch (const kinex::Error& e) {
    last_error = e.what();
    return static_cast<kx_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return KX_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return KX_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return KX_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) kinex::fail(kinex::ErrorCode::invalid_argument, std::string(what) + " is null");
}

kinex::Grid1D grid_of(double x_max, size_t cells) {
  if (!(x_max > 0.0)) kinex::fail(kinex::ErrorCode::invalid_argument, "x_max must be positive");
  if (cells < 16) kinex::fail(kinex::ErrorCode::invalid_argument, "at least 16 cells are required");
  return kinex::Grid1D(x_max, cells);
}

}  // namespace

extern "C" {

const char* kx_version(void) { return "kinex 1.0.0"; }
const char* kx_last_error(void) { return last_error.c_str(); }
const char* kx_last_summary(void) { return last_summary.c_str(); }

const char* kx_status_name(kx_status status) {
  if (status == KX_OK) return "ok";
  if (status == KX_ERR_INTERNAL) return "internal error";
  const int c = static_cast<int>(status);
  if (c >= 1 && c <= 9) return kinex::to_string(static_cast<kinex::ErrorCode>(c));
  return "unknown status";
}

kx_status kx_wealth_create(const double* balances, size_t n, kx_wealth** out) {
  return guard([&] {
    need(out, "out");
    if (n > 0) need(balances, "balances");
    *out = new kx_wealth{kinex::particle::WealthVector(std::vector<double>(balances, balances + n))};
  });
}

kx_status kx_wealth_constant(size_t n, double value, kx_wealth** out) {
  return guard([&] {
    need(out, "out");
    *out = new kx_wealth{kinex::particle::WealthVector::constant(n, value)};
  });
}

kx_status kx_wealth_exponential(size_t n, double mean, uint64_t seed, kx_wealth** out) {
  return guard([&] {
    need(out, "out");
    *out = new kx_wealth{kinex::particle::WealthVector::exponential(n, mean, seed)};
  });
}

void kx_wealth_free(kx_wealth* w) { delete w; }
size_t kx_wealth_size(const kx_wealth* w) { return w ? w->v.size() : 0; }
double kx_wealth_total(const kx_wealth* w) { return w ? w->v.total() : 0.0; }

kx_status kx_wealth_get(const kx_wealth* w, double* out, size_t n) {
  return guard([&] {
    need(w, "wealth");
    need(out, "out");
    const auto b = w->v.balances();
    std::copy_n(b.begin(), std::min(n, b.size()), out);
  });
}

kx_status kx_wealth_exchange(kx_wealth* w, size_t i, size_t j, double u) {
  return guard([&] {
    need(w, "wealth");
    w->v.apply_exchange(i, j, u);
  });
}

kx_status kx_wealth_simulate(kx_wealth* w, double horizon, uint64_t seed, int global_n, uint64_t* events) {
  return guard([&] {
    need(w, "wealth");
    kinex::particle::SimConfig c;
    c.horizon = horizon;
    c.seed = seed;
    c.snapshot_times = {horizon};
    c.clock_scale = global_n ? kinex::particle::ClockScale::global_n : kinex::particle::ClockScale::per_pair;
    auto traj = kinex::particle::simulate(c, w->v);
    w->v = std::move(traj.snapshots.back().state);
    if (events) *events = traj.event_count;
  });
}

kx_status kx_wealth_w1_exponential(const kx_wealth* w, double mean, double* out) {
  return guard([&] {
    need(w, "wealth");
    need(out, "out");
    if (!(mean > 0.0)) kinex::fail(kinex::ErrorCode::domain, "mean must be positive");
    *out = kinex::diagnostics::wasserstein1(kinex::diagnostics::EmpiricalSample::from(w->v.balances()),
                                            kinex::diagnostics::ExponentialLaw{mean});
  });
}

kx_status kx_density_create(double x_max, const double* values, size_t cells, kx_density** out) {
  return guard([&] {
    need(out, "out");
    need(values, "values");
    *out = new kx_density{kinex::GridDensity1D(grid_of(x_max, cells), std::vector<double>(values, values + cells))};
  });
}

kx_status kx_density_equilibrium(double m1, double x_max, size_t cells, kx_density** out) {
  return guard([&] {
    need(out, "out");
    *out = new kx_density{kinex::Equilibrium(m1).on_grid(grid_of(x_max, cells))};
  });
}

kx_status kx_density_uniform(double a, double b, double x_max, size_t cells, kx_density** out) {
  return guard([&] {
    need(out, "out");
    *out = new kx_density{kinex::GridDensity1D::uniform(grid_of(x_max, cells), a, b)};
  });
}

void kx_density_free(kx_density* q) { delete q; }
size_t kx_density_cells(const kx_density* q) { return q ? q->q.size() : 0; }
double kx_density_mass(const kx_density* q) { return q ? q->q.mass() : 0.0; }
double kx_density_mean(const kx_density* q) { return q ? q->q.mean() : 0.0; }

kx_status kx_density_get(const kx_density* q, double* out, size_t n) {
  return guard([&] {
    need(q, "density");
    need(out, "out");
    const auto v = q->q.values();
    std::copy_n(v.begin(), std::min(n, v.size()), out);
  });
}

kx_status kx_density_gain(const kx_density* q, kx_density** out) {
  return guard([&] {
    need(q, "density");
    need(out, "out");
    *out = new kx_density{kinex::kinetic1d::gain(q->q)};
  });
}

kx_status kx_density_solve(kx_density* q, double horizon, double dt) {
  return guard([&] {
    need(q, "density");
    kinex::kinetic1d::SolveOptions o;
    o.horizon = horizon;
    o.dt = dt;
    o.observe_every = static_cast<std::size_t>(-1);
    q->q = kinex::kinetic1d::solve(q->q, o).final_density;
  });
}

kx_status kx_relative_entropy(const kx_density* p, const kx_density* r, double* out) {
  return guard([&] {
    need(p, "p");
    need(r, "r");
    need(out, "out");
    *out = kinex::diagnostics::relative_entropy(p->q, r->q).value;
  });
}

kx_status kx_dissipation(const kx_density* q, double* out) {
  return guard([&] {
    need(q, "density");
    need(out, "out");
    *out = kinex::diagnostics::dissipation(q->q).value;
  });
}

kx_status kx_density_w1_exponential(const kx_density* q, double mean, double* out) {
  return guard([&] {
    need(q, "density");
    need(out, "out");
    if (!(mean > 0.0)) kinex::fail(kinex::ErrorCode::domain, "mean must be positive");
    *out = kinex::diagnostics::wasserstein1(q->q, kinex::diagnostics::ExponentialLaw{mean});
  });
}

kx_status kx_density_w2_exponential(const kx_density* q, double mean, double* out) {
  return guard([&] {
    need(q, "density");
    need(out, "out");
    if (!(mean > 0.0)) kinex::fail(kinex::ErrorCode::domain, "mean must be positive");
    *out = kinex::diagnostics::wasserstein2(q->q, kinex::diagnostics::ExponentialLaw{mean});
  });
}

kx_status kx_moments_integrate(double* m, size_t count, double t, double dt) {
  return guard([&] {
    need(m, "moments");
    if (count == 0) kinex::fail(kinex::ErrorCode::invalid_argument, "empty moment vector");
    kinex::moments::MomentVector m0{std::vector<double>(m, m + count)};
    const auto series = kinex::moments::integrate_moments(m0, t, dt);
    std::copy(series.values.back().values.begin(), series.values.back().values.end(), m);
  });
}

kx_status kx_spectrum_create(const double* alpha, size_t n, kx_spectrum** out) {
  return guard([&] {
    need(out, "out");
    if (n > 0) need(alpha, "alpha");
    *out = new kx_spectrum{kinex::spectral::LaguerreSpectrum{std::vector<double>(alpha, alpha + n)}};
  });
}

void kx_spectrum_free(kx_spectrum* s) { delete s; }
size_t kx_spectrum_size(const kx_spectrum* s) { return s ? s->s.alpha.size() : 0; }
double kx_spectrum_norm(const kx_spectrum* s) { return s ? s->s.norm() : 0.0; }

kx_status kx_spectrum_get(const kx_spectrum* s, double* out, size_t n) {
  return guard([&] {
    need(s, "spectrum");
    need(out, "out");
    std::copy_n(s->s.alpha.begin(), std::min(n, s->s.alpha.size()), out);
  });
}

kx_status kx_spectrum_gap_ratio(const kx_spectrum* s, double* out) {
  return guard([&] {
    need(s, "spectrum");
    need(out, "out");
    *out = kinex::spectral::gap_ratio(s->s);
  });
}

kx_status kx_spectrum_evolve(const kx_spectrum* s, double t, kx_spectrum** out) {
  return guard([&] {
    need(s, "spectrum");
    need(out, "out");
    *out = new kx_spectrum{kinex::spectral::evolve_linearized(s->s, t)};
  });
}

kx_status kx_run_simulate(const char* config_text, const char* out_dir) {
  return guard([&] {
    need(out_dir, "out_dir");
    last_summary = kinex::runs::run_simulate(kinex::io::parse_config(config_text ? config_text : ""), out_dir).summary;
  });
}

kx_status kx_run_pde(const char* config_text, const char* out_dir) {
  return guard([&] {
    need(out_dir, "out_dir");
    last_summary = kinex::runs::run_pde(kinex::io::parse_config(config_text ? config_text : ""), out_dir).summary;
  });
}

kx_status kx_run_study(const char* study, const char* config_text, const char* out_dir, int* passed) {
  return guard([&] {
    need(study, "study");
    need(out_dir, "out_dir");
    const auto r = kinex::runs::run_study(study, kinex::io::parse_config(config_text ? config_text : ""), out_dir);
    last_summary = r.summary;
    if (passed) *passed = r.passed ? 1 : 0;
  });
}

int kx_is_study(const char* name) { return name != nullptr && kinex::runs::is_study(name) ? 1 : 0; }

}  // extern "C"
