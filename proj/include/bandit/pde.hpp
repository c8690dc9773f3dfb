#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bandit/errors.hpp"
#include "bandit/grid.hpp"
#include "bandit/model.hpp"

namespace bandit {

// Threshold curve T(t): use action 1 (switch to the known arm for good) when
// x < T(t), keep the unknown arm when x >= T(t). Rows cover the decision
// times t in [0, 1-dt]; lookups take the nearest row not after t.
struct ThresholdStrategy {
  std::vector<double> t;
  std::vector<double> T;

  void validate() const {
    if (t.empty() || t.size() != T.size())
      throw config_error("strategy: empty or mismatched threshold table");
    for (std::size_t i = 1; i < t.size(); ++i)
      if (!(t[i] > t[i - 1]))
        throw config_error("strategy: time stamps must be strictly increasing");
  }

  double at(double time) const {
    if (time < t.front() - 1e-12)
      throw config_error("strategy: threshold undefined at t=" +
                         std::to_string(time));
    // nearest row not after `time`
    std::size_t lo = 0, hi = t.size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (t[mid] <= time + 1e-12)
        lo = mid;
      else
        hi = mid;
    }
    return T[lo];
  }
};

namespace detail {

// Classifies one decision row. delta = r1 - r2 is defined on [i_lo, i_hi];
// actions outside that range are pinned by the caller. Returns the action
// flip count, whether every flip is the orderly 1 -> 2 kind, and the
// interpolated threshold.
struct RowClass {
  int changes = 0;
  bool ordered = true;
  double T = 0.0;
};

inline RowClass classify_row(const std::vector<double>& xs,
                             const std::vector<double>& delta,
                             const std::uint8_t* act, int i_lo, int i_hi,
                             double dx) {
  RowClass rc;
  int first_flip = -1;
  for (int i = i_lo; i < i_hi; ++i) {
    if (act[i] != act[i + 1]) {
      ++rc.changes;
      if (act[i] == 2) rc.ordered = false;
      if (first_flip < 0 && act[i] == 1) first_flip = i;
    }
  }
  if (first_flip >= 0) {
    const double dlo = delta[first_flip];
    const double dhi = delta[first_flip + 1];
    rc.T = xs[first_flip] + dx * (-dlo) / (dhi - dlo);
  } else if (act[i_lo] == 2) {
    rc.T = xs.front();  // every node continues: flip lies below the domain
  } else {
    rc.T = xs.back();  // every node switches: flip lies above the domain
  }
  return rc;
}

}  // namespace detail

// Backward-difference solution of the limiting risk equation. Rows are
// indexed j = 0..steps with t = j*dt; the terminal row is identically zero
// and carries action 1 (the two branches tie at zero).
struct RiskField {
  GridSpec grid;
  std::vector<double> r;              // (steps+1) x nx, row-major
  std::vector<std::uint8_t> action;   // same shape, values 1 or 2
  std::vector<double> threshold;      // per decision row, size steps
  std::vector<int> flip_changes;      // action changes per decision row
  std::vector<std::uint8_t> flip_ordered;

  double at(int j, int i) const { return r[static_cast<std::size_t>(j) * grid.nx() + i]; }
  std::uint8_t action_at(int j, int i) const {
    return action[static_cast<std::size_t>(j) * grid.nx() + i];
  }

  const double* row(int j) const { return &r[static_cast<std::size_t>(j) * grid.nx()]; }

  double risk00() const {
    std::vector<double> top(row(0), row(0) + grid.nx());
    return value_at(top, grid.xgrid(), 0.0);
  }
};

struct SolveOptions {
  bool require_two_sided = true;
};

inline RiskField solve_limit_risk(const PriorSpec& prior, const ModelParams& params,
                                  const GridSpec& grid, const SolveOptions& opts = {}) {
  params.validate();
  prior.validate(opts.require_two_sided);
  grid.validate();
  const double ratio = params.D * grid.dt / (grid.dx * grid.dx);
  if (!(ratio < 1.0))
    throw config_error("explicit scheme unstable: D*dt/dx^2 = " +
                       std::to_string(ratio) + " >= 1 (stability rule dt/dx^2 < 1/D)");

  const int S = grid.steps();
  const int nx = grid.nx();
  const std::vector<double> xs = grid.xgrid().nodes();

  RiskField f;
  f.grid = grid;
  f.r.assign(static_cast<std::size_t>(S + 1) * nx, 0.0);
  f.action.assign(static_cast<std::size_t>(S + 1) * nx, 1);
  f.action[static_cast<std::size_t>(S) * nx + nx - 1] = 2;
  f.threshold.assign(S, 0.0);
  f.flip_changes.assign(S, 0);
  f.flip_ordered.assign(S, 1);

  GainRows gains(prior, params.D, xs, grid.t(S - 1));
  std::vector<double> delta(nx, 0.0);
  const double k = 0.5 * params.D * grid.dt / (grid.dx * grid.dx);

  for (int j = S - 1; j >= 0; --j) {
    const double t = grid.t(j);
    gains.advance_to(t);
    const auto& g1 = gains.g1();
    const auto& g2 = gains.g2();
    const double* next = &f.r[static_cast<std::size_t>(j + 1) * nx];
    double* cur = &f.r[static_cast<std::size_t>(j) * nx];
    std::uint8_t* act = &f.action[static_cast<std::size_t>(j) * nx];

    for (int i = 1; i < nx - 1; ++i) {
      const double r1 = (1.0 - t) * g1[i];
      const double lap = next[i + 1] - 2.0 * next[i] + next[i - 1];
      const double r2 = next[i] + k * lap + grid.dt * g2[i];
      delta[i] = r1 - r2;
      if (r1 <= r2) {
        cur[i] = r1;
        act[i] = 1;
      } else {
        cur[i] = r2;
        act[i] = 2;
      }
    }
    cur[0] = 0.0;
    cur[nx - 1] = 0.0;
    act[0] = 1;
    act[nx - 1] = 2;

    const auto rc = detail::classify_row(xs, delta, act, 1, nx - 2, grid.dx);
    f.threshold[j] = rc.T;
    f.flip_changes[j] = rc.changes;
    f.flip_ordered[j] = rc.ordered ? 1 : 0;
  }
  return f;
}

// Packages the per-row thresholds recorded during the sweep, enforcing the
// single-flip structure.
inline ThresholdStrategy extract_thresholds(const RiskField& f) {
  const int S = f.grid.steps();
  ThresholdStrategy s;
  s.t.resize(S);
  s.T.resize(S);
  for (int j = 0; j < S; ++j) {
    if (f.flip_changes[j] > 1 || !f.flip_ordered[j])
      throw integrity_error("threshold row at t=" + std::to_string(f.grid.t(j)) +
                            " has " + std::to_string(f.flip_changes[j]) +
                            " action changes");
    s.t[j] = f.grid.t(j);
    s.T[j] = f.threshold[j];
  }
  return s;
}

// Linear interpolation of the sign crossing of r1 - r2 along a row; exposed
// for direct testing of the threshold-location rule.
inline double interpolate_flip(const std::vector<double>& xs,
                               const std::vector<double>& delta) {
  if (xs.size() != delta.size() || xs.size() < 2)
    throw config_error("interpolate_flip: need matching rows of length >= 2");
  for (std::size_t i = 0; i + 1 < delta.size(); ++i) {
    if (delta[i] < 0.0 && delta[i + 1] >= 0.0) {
      return xs[i] + (xs[i + 1] - xs[i]) * (-delta[i]) / (delta[i + 1] - delta[i]);
    }
  }
  throw config_error("interpolate_flip: no sign change found");
}

}  // namespace bandit
