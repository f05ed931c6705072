#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kinex/grid.hpp"
#include "kinex/rng.hpp"

namespace kinex::particle {

/// Balances of the N agents. The cached total is updated incrementally by
/// every exchange; recompute_total() audits it against a compensated sum.
class WealthVector {
 public:
  WealthVector() = default;
  explicit WealthVector(std::vector<double> balances);

  static WealthVector constant(std::size_t n, double value);
  static WealthVector exponential(std::size_t n, double mean, std::uint64_t seed);
  /// i.i.d. draws from a grid density (uniform inside each cell).
  static WealthVector sample(const GridDensity1D& q, std::size_t n, std::uint64_t seed);
  /// One balance per line; '#' comments, blank lines and a text header are
  /// skipped; for CSV lines the last field is used.
  static WealthVector from_file(const std::string& path);

  std::size_t size() const { return balances_.size(); }
  std::span<const double> balances() const { return balances_; }
  double operator[](std::size_t i) const { return balances_[i]; }

  double total() const { return total_; }
  double mean() const { return balances_.empty() ? 0.0 : total_ / static_cast<double>(size()); }
  /// (1/N) sum_i X_i^order
  double moment(int order) const;

  /// Compensated (Neumaier) sum of the balances.
  double exact_total() const;
  /// Replaces the cached total by exact_total(); returns the previous cache.
  double recompute_total();

  /// Applies the reshuffling rule to agents i and j in place:
  /// X_i <- u (X_i + X_j), X_j <- (X_i + X_j) - X_i'.
  void apply_exchange(std::size_t i, std::size_t j, double u);

 private:
  std::vector<double> balances_;
  double total_ = 0.0;
};

/// Pure form of the exchange rule; validates the pair and u.
WealthVector exchange_step(const WealthVector& state, std::size_t i, std::size_t j, double u);

/// per_pair: every unordered pair rings at rate 1/N (total (N-1)/2), so each
/// agent jumps at rate (N-1)/N. global_n: a single clock of rate N.
enum class ClockScale { per_pair, global_n };

ClockScale parse_clock_scale(const std::string& name);
const char* to_string(ClockScale scale);

double total_event_rate(std::size_t n, ClockScale scale);

struct SimConfig {
  double horizon = 1.0;
  std::vector<double> snapshot_times;
  std::uint64_t seed = 1;
  ClockScale clock_scale = ClockScale::per_pair;
  std::uint64_t audit_every = 1'000'000;
};

class EventClock {
 public:
  EventClock(double rate, std::uint64_t seed);

  double rate() const { return rate_; }
  double current_time() const { return time_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t event_count() const { return count_; }

  /// Time of the next event (exponential waiting time from now). The clock
  /// only moves when commit() is called.
  double peek_next();
  void commit();

  Rng& rng() { return rng_; }

 private:
  double rate_;
  double time_ = 0.0;
  double pending_ = -1.0;
  std::uint64_t seed_;
  std::uint64_t count_ = 0;
  Rng rng_;
};

/// Uniform unordered pair i != j in O(1): i in [0,N), j in [0,N-1) shifted past i.
inline std::pair<std::size_t, std::size_t> draw_pair(Rng& rng, std::size_t n) {
  const auto i = static_cast<std::size_t>(rng.below(n));
  auto j = static_cast<std::size_t>(rng.below(n - 1));
  if (j >= i) ++j;
  return {i, j};
}

struct Snapshot {
  double time = 0.0;
  WealthVector state;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::uint64_t event_count = 0;
  double max_relative_drift = 0.0;
};

Trajectory simulate(const SimConfig& config, const WealthVector& initial);

/// Runs `replicas` independent trajectories; replica r uses seed
/// derive_seed(config.seed, r) for its clock and initial_for(r, seed) for
/// its initial state. Results are ordered by replica index.
std::vector<Trajectory> simulate_ensemble(const SimConfig& config, std::size_t replicas,
                                          const std::function<WealthVector(std::size_t, std::uint64_t)>& initial_for,
                                          unsigned threads = 0);

struct CoupledPairs {
  WealthVector primary;
  WealthVector mirror;
  bool shared_uniform = true;

  /// Mirror drawn i.i.d. Exp(m1) from `seed`.
  static CoupledPairs with_equilibrium_mirror(WealthVector primary, double m1, std::uint64_t seed);
};

struct CoupledSeries {
  std::vector<double> times;
  std::vector<double> mean_square_difference;
  std::uint64_t event_count = 0;
};

/// Both systems jump on the same pair with the same u. Partner indices are
/// shared as well (finite-N proxy of the independent-copy coupling).
CoupledSeries simulate_coupled(const SimConfig& config, const CoupledPairs& pairs);

double mean_square_difference(const WealthVector& a, const WealthVector& b);

/// Density-normalised histogram with bins [k w, (k+1) w); at least 16 bins.
GridDensity1D empirical_histogram(const WealthVector& state, double bin_width);

}  // namespace kinex::particle
