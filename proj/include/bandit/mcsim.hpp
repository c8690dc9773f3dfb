#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bandit/errors.hpp"
#include "bandit/pde.hpp"
#include "bandit/threads.hpp"

namespace bandit {

namespace rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer; full-period bijection on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

inline double u01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// One stream per (seed, d, rep); draws are addressed by counter, not
// consumed in order, so schedules that skip items stay paired.
struct Stream {
  std::uint64_t key;

  Stream(std::uint64_t seed, double d, std::uint64_t rep) {
    std::uint64_t k = mix64(seed ^ kGolden);
    k = mix64(k ^ std::bit_cast<std::uint64_t>(d));
    key = mix64(k ^ rep);
  }

  double at(std::uint64_t counter) const {
    return u01(mix64(key + kGolden * counter));
  }
};

}  // namespace rng

struct SimConfig {
  int T = 5000;                // total items
  std::vector<int> schedule;   // items per batch, sums to T
  double p = 0.5;              // known-arm success probability
  std::vector<double> d_grid;  // deviations in invariant units
  int reps = 10000;
  std::uint64_t seed = 42;
  bool keep_samples = false;

  void validate() const {
    if (T < 1) throw config_error("simulate: T must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw config_error("simulate: p must be in (0,1)");
    if (schedule.empty()) throw config_error("simulate: empty schedule");
    long long total = 0;
    for (int b : schedule) {
      if (b < 1) throw config_error("simulate: batch sizes must be >= 1");
      total += b;
    }
    if (total != T)
      throw config_error("simulate: schedule sums to " + std::to_string(total) +
                         ", expected T = " + std::to_string(T));
    if (d_grid.empty()) throw config_error("simulate: empty d grid");
    if (reps < 1) throw config_error("simulate: reps must be >= 1");
  }

  double variance() const { return p * (1.0 - p); }

  double p2_for(double d) const {
    const double p2 = p + d * std::sqrt(variance() / T);
    if (!(p2 >= 0.0 && p2 <= 1.0))
      throw config_error("simulate: d = " + std::to_string(d) +
                         " maps to p2 = " + std::to_string(p2) +
                         " outside [0,1]; shrink |d| or grow T");
    return p2;
  }
};

struct SimStat {
  double d = 0.0;
  double mean = 0.0;
  double se = 0.0;
  int reps = 0;
  std::vector<double> samples;  // filled only when keep_samples
};

struct SimResult {
  std::vector<SimStat> stats;
};

// One replication of the batch game: play the unknown arm until the
// invariant statistic falls below the threshold at a batch boundary, then
// the known arm forever. Returns the realized scaled regret.
inline double run_replication(const ThresholdStrategy& strategy,
                              const SimConfig& cfg, double d, double p2,
                              std::uint64_t rep) {
  const rng::Stream stream(cfg.seed, d, rep);
  const double D = cfg.variance();
  const double scale = std::sqrt(D * cfg.T);

  double sum = 0.0;  // total successes over both arms
  double s2 = 0.0;   // centered unknown-arm sum
  bool switched = false;
  long long done = 0;
  for (int batch : cfg.schedule) {
    if (!switched) {
      const double t = static_cast<double>(done) / cfg.T;
      const double x = s2 / scale;
      if (x < strategy.at(t)) switched = true;
    }
    for (int j = 0; j < batch; ++j, ++done) {
      const int arm = switched ? 1 : 2;
      const double u = stream.at(2 * static_cast<std::uint64_t>(done) + arm - 1);
      const double zeta = u < (arm == 1 ? cfg.p : p2) ? 1.0 : 0.0;
      sum += zeta;
      if (arm == 2) s2 += zeta - cfg.p;
    }
  }
  return (cfg.T * std::max(cfg.p, p2) - sum) / scale;
}

inline SimResult simulate(const ThresholdStrategy& strategy, const SimConfig& cfg) {
  cfg.validate();
  strategy.validate();
  SimResult out;
  out.stats.reserve(cfg.d_grid.size());
  for (double d : cfg.d_grid) {
    const double p2 = cfg.p2_for(d);
    std::vector<double> losses(cfg.reps);
    parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t rep) {
      losses[rep] = run_replication(strategy, cfg, d, p2, rep);
    });
    // Sequential reduction keeps the reported numbers independent of the
    // thread count.
    double mean = 0.0;
    for (double v : losses) mean += v;
    mean /= cfg.reps;
    double var = 0.0;
    for (double v : losses) var += (v - mean) * (v - mean);
    SimStat st;
    st.d = d;
    st.mean = mean;
    st.se = cfg.reps > 1 ? std::sqrt(var / (cfg.reps - 1) / cfg.reps) : 0.0;
    st.reps = cfg.reps;
    if (cfg.keep_samples) st.samples = std::move(losses);
    out.stats.push_back(std::move(st));
  }
  return out;
}

// Expected scaled regret of the strategy that never leaves the given arm;
// exact for any T, used as a simulator oracle.
inline double fixed_arm_expected_loss(double d, int arm) {
  if (arm == 1) return std::max(d, 0.0);
  if (arm == 2) return std::max(-d, 0.0);
  throw config_error("fixed_arm_expected_loss: arm must be 1 or 2");
}

}  // namespace bandit
