#include "kinex/particle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kinex/error.hpp"
#include "kinex/parallel.hpp"

namespace kinex::particle {

namespace {

double neumaier_sum(std::span<const double> xs) {
  double sum = 0.0;
  double c = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      c += (sum - t) + x;
    } else {
      c += (x - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

void validate_times(const SimConfig& config) {
  if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) {
    fail(ErrorCode::config, "simulate: horizon T must be positive");
  }
  double prev = 0.0;
  for (double s : config.snapshot_times) {
    if (s < prev || s > config.horizon || !std::isfinite(s)) {
      fail(ErrorCode::config, "simulate: snapshot times must be sorted and inside [0, T]");
    }
    prev = s;
  }
  if (config.audit_every == 0) {
    fail(ErrorCode::config, "simulate: audit_every must be positive");
  }
}

}  // namespace

WealthVector::WealthVector(std::vector<double> balances) : balances_(std::move(balances)) {
  for (double b : balances_) {
    if (!std::isfinite(b)) fail(ErrorCode::data, "wealth vector: nonfinite balance");
    if (b < 0.0) fail(ErrorCode::data, "wealth vector: negative balance");
  }
  total_ = exact_total();
}

WealthVector WealthVector::constant(std::size_t n, double value) {
  return WealthVector(std::vector<double>(n, value));
}

WealthVector WealthVector::exponential(std::size_t n, double mean, std::uint64_t seed) {
  if (!(mean > 0.0)) fail(ErrorCode::domain, "exponential initial condition needs a positive mean");
  Rng rng(seed);
  std::vector<double> b(n);
  for (auto& x : b) x = rng.exponential(1.0 / mean);
  return WealthVector(std::move(b));
}

WealthVector WealthVector::sample(const GridDensity1D& q, std::size_t n, std::uint64_t seed) {
  const auto values = q.values();
  const double dx = q.grid().dx();
  std::vector<double> cumulative(values.size() + 1, 0.0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] < 0.0) fail(ErrorCode::domain, "sample: negative density value");
    cumulative[k + 1] = cumulative[k] + values[k] * dx;
  }
  const double mass = cumulative.back();
  if (!(mass > 0.0)) fail(ErrorCode::domain, "sample: density has zero mass");
  Rng rng(seed);
  std::vector<double> b(n);
  for (auto& x : b) {
    const double target = rng.uniform() * mass;
    auto it = std::upper_bound(cumulative.begin() + 1, cumulative.end(), target);
    if (it == cumulative.end()) --it;
    const auto k = static_cast<std::size_t>(std::distance(cumulative.begin(), it) - 1);
    const double cell_mass = values[k] * dx;
    const double frac = cell_mass > 0.0 ? (target - cumulative[k]) / cell_mass : 0.5;
    x = q.grid().left_edge(k) + dx * std::clamp(frac, 0.0, 1.0);
  }
  return WealthVector(std::move(b));
}

WealthVector WealthVector::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open balances file: " + path);
  std::vector<double> b;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto comma = line.find_last_of(',');
    const std::string field = comma == std::string::npos ? line.substr(first) : line.substr(comma + 1);
    std::istringstream is(field);
    double v = 0.0;
    if (!(is >> v)) {
      if (b.empty() && std::isalpha(static_cast<unsigned char>(line[first]))) continue;
      fail(ErrorCode::data, "balances file: cannot parse line '" + line + "'");
    }
    b.push_back(v);
  }
  return WealthVector(std::move(b));
}

double WealthVector::moment(int order) const {
  if (balances_.empty()) return 0.0;
  double s = 0.0;
  for (double x : balances_) s += std::pow(x, order);
  return s / static_cast<double>(balances_.size());
}

double WealthVector::exact_total() const { return neumaier_sum(balances_); }

double WealthVector::recompute_total() {
  const double cached = total_;
  total_ = exact_total();
  return cached;
}

void WealthVector::apply_exchange(std::size_t i, std::size_t j, double u) {
  if (i == j) fail(ErrorCode::invalid_pair, "exchange: agents must differ");
  if (i >= size() || j >= size()) fail(ErrorCode::invalid_pair, "exchange: agent index out of range");
  if (!(u >= 0.0 && u <= 1.0)) fail(ErrorCode::domain, "exchange: u must lie in [0, 1]");
  const double pooled = balances_[i] + balances_[j];
  const double xi = u * pooled;
  const double xj = pooled - xi;
  total_ += (xi + xj) - pooled;
  balances_[i] = xi;
  balances_[j] = xj;
}

WealthVector exchange_step(const WealthVector& state, std::size_t i, std::size_t j, double u) {
  WealthVector next = state;
  next.apply_exchange(i, j, u);
  return next;
}

ClockScale parse_clock_scale(const std::string& name) {
  if (name == "pair" || name == "per_pair") return ClockScale::per_pair;
  if (name == "global" || name == "global_n") return ClockScale::global_n;
  fail(ErrorCode::config, "unknown clock_scale '" + name + "' (expected pair|global)");
}

const char* to_string(ClockScale scale) { return scale == ClockScale::per_pair ? "pair" : "global"; }

double total_event_rate(std::size_t n, ClockScale scale) {
  const double nn = static_cast<double>(n);
  return scale == ClockScale::per_pair ? 0.5 * (nn - 1.0) : nn;
}

EventClock::EventClock(double rate, std::uint64_t seed) : rate_(rate), seed_(seed), rng_(seed) {
  if (!(rate > 0.0)) fail(ErrorCode::config, "event clock needs a positive rate");
}

double EventClock::peek_next() {
  if (pending_ < 0.0) pending_ = rng_.exponential(rate_);
  return time_ + pending_;
}

void EventClock::commit() {
  time_ += pending_;
  pending_ = -1.0;
  ++count_;
}

Trajectory simulate(const SimConfig& config, const WealthVector& initial) {
  const std::size_t n = initial.size();
  if (n < 2) fail(ErrorCode::config, "simulate: need at least 2 agents");
  validate_times(config);

  WealthVector state = initial;
  const double reference_total = state.exact_total();
  EventClock clock(total_event_rate(n, config.clock_scale), config.seed);
  Rng& rng = clock.rng();

  Trajectory out;
  out.snapshots.reserve(config.snapshot_times.size());
  std::size_t next_snapshot = 0;
  const auto& snaps = config.snapshot_times;

  auto audit = [&] {
    state.recompute_total();
    const double drift = reference_total > 0.0 ? std::abs(state.total() - reference_total) / reference_total
                                               : std::abs(state.total());
    out.max_relative_drift = std::max(out.max_relative_drift, drift);
    if (drift >= 1e-9) fail(ErrorCode::data, "simulate: total wealth drifted beyond 1e-9 relative");
  };

  while (true) {
    const double t_next = clock.peek_next();
    while (next_snapshot < snaps.size() && snaps[next_snapshot] < t_next) {
      out.snapshots.push_back({snaps[next_snapshot], state});
      ++next_snapshot;
    }
    if (t_next > config.horizon) break;
    clock.commit();
    const auto [i, j] = draw_pair(rng, n);
    state.apply_exchange(i, j, rng.uniform());
    if (clock.event_count() % config.audit_every == 0) audit();
  }
  audit();
  out.event_count = clock.event_count();
  return out;
}

std::vector<Trajectory> simulate_ensemble(const SimConfig& config, std::size_t replicas,
                                          const std::function<WealthVector(std::size_t, std::uint64_t)>& initial_for,
                                          unsigned threads) {
  std::vector<Trajectory> runs(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    SimConfig local = config;
    local.seed = derive_seed(config.seed, r);
    runs[r] = simulate(local, initial_for(r, derive_seed(config.seed ^ 0xa5a5a5a5a5a5a5a5ULL, r)));
  });
  return runs;
}

CoupledPairs CoupledPairs::with_equilibrium_mirror(WealthVector primary, double m1, std::uint64_t seed) {
  const std::size_t n = primary.size();
  return CoupledPairs{std::move(primary), WealthVector::exponential(n, m1, seed), true};
}

double mean_square_difference(const WealthVector& a, const WealthVector& b) {
  if (a.size() != b.size()) fail(ErrorCode::config, "coupled: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return a.size() == 0 ? 0.0 : s / static_cast<double>(a.size());
}

CoupledSeries simulate_coupled(const SimConfig& config, const CoupledPairs& pairs) {
  if (pairs.primary.size() != pairs.mirror.size()) fail(ErrorCode::config, "coupled: length mismatch");
  if (!pairs.shared_uniform) fail(ErrorCode::config, "coupled: the shared-uniform flag must be set");
  const std::size_t n = pairs.primary.size();
  if (n < 2) fail(ErrorCode::config, "coupled: need at least 2 agents");
  validate_times(config);

  WealthVector primary = pairs.primary;
  WealthVector mirror = pairs.mirror;
  EventClock clock(total_event_rate(n, config.clock_scale), config.seed);
  Rng& rng = clock.rng();

  CoupledSeries out;
  std::size_t next_snapshot = 0;
  const auto& snaps = config.snapshot_times;
  while (true) {
    const double t_next = clock.peek_next();
    while (next_snapshot < snaps.size() && snaps[next_snapshot] < t_next) {
      out.times.push_back(snaps[next_snapshot]);
      out.mean_square_difference.push_back(mean_square_difference(primary, mirror));
      ++next_snapshot;
    }
    if (t_next > config.horizon) break;
    clock.commit();
    const auto [i, j] = draw_pair(rng, n);
    const double u = rng.uniform();
    primary.apply_exchange(i, j, u);
    mirror.apply_exchange(i, j, u);
  }
  out.event_count = clock.event_count();
  return out;
}

GridDensity1D empirical_histogram(const WealthVector& state, double bin_width) {
  if (!(bin_width > 0.0)) fail(ErrorCode::domain, "histogram: bin width must be positive");
  if (state.size() == 0) fail(ErrorCode::domain, "histogram: empty state");
  const double top = *std::max_element(state.balances().begin(), state.balances().end());
  const auto bins = std::max<std::size_t>(16, static_cast<std::size_t>(std::floor(top / bin_width)) + 1);
  const Grid1D grid(static_cast<double>(bins) * bin_width, bins);
  std::vector<double> counts(bins, 0.0);
  for (double x : state.balances()) {
    auto k = static_cast<std::size_t>(std::floor(x / bin_width));
    counts[std::min(k, bins - 1)] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(state.size()) * bin_width);
  for (auto& c : counts) c *= norm;
  return GridDensity1D(grid, std::move(counts));
}

}  // namespace kinex::particle
