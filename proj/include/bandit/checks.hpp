#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bandit/batchdp.hpp"
#include "bandit/model.hpp"
#include "bandit/pde.hpp"

namespace bandit {

struct CheckItem {
  std::string name;
  bool passed = false;
  // Signed slack of the binding inequality: <= 0 means satisfied, and the
  // magnitude says how close the field came to violating it.
  double margin = 0.0;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckItem> items;

  void add(std::string name, bool passed, double margin, std::string detail) {
    items.push_back({std::move(name), passed, margin, std::move(detail)});
  }

  bool all_passed() const {
    for (const auto& it : items)
      if (!it.passed) return false;
    return true;
  }

  const CheckItem* find(const std::string& name) const {
    for (const auto& it : items)
      if (it.name == name) return &it;
    return nullptr;
  }

  std::string summary() const {
    std::string s;
    for (const auto& it : items) {
      s += it.name;
      s += it.passed ? ": pass (" : ": FAIL (";
      s += it.detail;
      s += ")\n";
    }
    return s;
  }
};

// Structural and analytic invariants of a limiting risk field. Inequality
// slacks absorb the O(dt) + O(dx) discretization error of the explicit
// scheme; a scheme bug violates them by orders of magnitude more.
inline CheckReport check_risk_field(const RiskField& f, const PriorSpec& prior,
                                    const ModelParams& params,
                                    int row_stride = 25) {
  const GridSpec& grid = f.grid;
  const int S = grid.steps();
  const int nx = grid.nx();
  const std::vector<double> xs = grid.xgrid().nodes();
  const double c = params.bound_c(prior);
  const double cp = c / params.D;
  if (row_stride < 1) row_stride = 1;

  CheckReport rep;

  {
    double worst = 0.0;
    for (int i = 0; i < nx; ++i) worst = std::max(worst, std::abs(f.at(S, i)));
    rep.add("terminal_row_zero", worst == 0.0, worst,
            "max |r(x,1)| = " + std::to_string(worst));
  }

  {
    double mn = std::numeric_limits<double>::infinity();
    for (double v : f.r) mn = std::min(mn, v);
    rep.add("risk_nonnegative", mn >= 0.0, -mn, "min r = " + std::to_string(mn));
  }

  {
    // r(x,t) never exceeds the value of stopping the whole remaining horizon
    // on either single arm.
    GainRows gains(prior, params.D, xs, 0.0);
    double worst = -std::numeric_limits<double>::infinity();
    const double tol = 10.0 * grid.dt;
    for (int j = 0; j <= S; j += row_stride) {
      const double t = grid.t(j);
      gains.advance_to(t);
      const auto& g1 = gains.g1();
      const auto& g2 = gains.g2();
      for (int i = 0; i < nx; ++i) {
        const double cap = (1.0 - t) * std::min(g1[i], g2[i]);
        worst = std::max(worst, f.at(j, i) - cap);
      }
    }
    rep.add("risk_below_single_arm_cap", worst <= tol, worst - tol,
            "max excess = " + std::to_string(worst) + ", tol = " +
                std::to_string(tol));
  }

  {
    // |dr/dx| <= (c/D) r, sampled with central differences away from the
    // pinned boundary nodes.
    double worst = -std::numeric_limits<double>::infinity();
    const double tol = 10.0 * grid.dx;
    for (int j = 0; j <= S; j += row_stride) {
      for (int i = 1; i + 1 < nx; ++i) {
        const double deriv =
            std::abs(f.at(j, i + 1) - f.at(j, i - 1)) / (2.0 * grid.dx);
        worst = std::max(worst, deriv - cp * f.at(j, i));
      }
    }
    rep.add("x_derivative_bound", worst <= tol, worst - tol,
            "max excess = " + std::to_string(worst) + ", tol = " +
                std::to_string(tol));
  }

  {
    // Time regularity: |r(x,t) - r(x,t+delta)| grows at most linearly in
    // delta with the exponential x-weight.
    const int dsteps = std::min(10, S);
    const double delta = dsteps * grid.dt;
    double worst = -std::numeric_limits<double>::infinity();
    const double tol = 10.0 * grid.dt;
    for (int j = 0; j + dsteps <= S; j += row_stride) {
      const double t = grid.t(j);
      for (int i = 0; i < nx; ++i) {
        const double lhs = std::abs(f.at(j, i) - f.at(j + dsteps, i));
        const double rhs = delta * c * (0.5 * c * cp * (1.0 - t - delta) + 1.0) *
                           std::exp(cp * std::abs(xs[i]));
        worst = std::max(worst, lhs - rhs);
      }
    }
    rep.add("time_increment_bound", worst <= tol, worst - tol,
            "max excess = " + std::to_string(worst) + ", tol = " +
                std::to_string(tol));
  }

  {
    const double bound = 0.752 * std::sqrt(params.D);
    const double r00 = f.risk00();
    rep.add("origin_risk_bound", r00 <= bound, r00 - bound,
            "r(0,0) = " + std::to_string(r00) + " vs 0.752 sqrt(D) = " +
                std::to_string(bound));
  }

  {
    int bad = 0;
    for (int j = 0; j < S; ++j)
      if (f.flip_changes[j] > 1 || !f.flip_ordered[j]) ++bad;
    rep.add("single_threshold_per_row", bad == 0, static_cast<double>(bad),
            std::to_string(bad) + " rows with multiple or unordered flips");
  }

  return rep;
}

// Counterpart for a batch-stage field.
inline CheckReport check_step_field(const StepRiskField& f, const PriorSpec& prior,
                                    const ModelParams& params) {
  const int K = static_cast<int>(f.t.size()) - 1;
  const int nx = f.xgrid.nx();
  const std::vector<double> xs = f.xgrid.nodes();

  CheckReport rep;

  {
    double worst = 0.0;
    for (int i = 0; i < nx; ++i)
      worst = std::max(worst, std::abs(f.r[K][i]));
    rep.add("terminal_row_zero", worst == 0.0, worst,
            "max |r(x,1)| = " + std::to_string(worst));
  }

  {
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& row : f.r)
      for (double v : row) mn = std::min(mn, v);
    rep.add("risk_nonnegative", mn >= 0.0, -mn, "min r = " + std::to_string(mn));
  }

  {
    // Single-arm cap from the second stage onward (the first stage has no
    // observation yet, so the cap does not apply there). Slack covers the
    // truncated-kernel quadrature defect accumulated over the stages.
    GainRows gains(prior, params.D, xs, f.t[std::min(1, K)]);
    double worst = -std::numeric_limits<double>::infinity();
    const double tol = 1e-6;
    for (int k = 1; k < K; ++k) {
      const double t = f.t[k];
      gains.advance_to(t);
      const auto& g1 = gains.g1();
      const auto& g2 = gains.g2();
      for (int i = 0; i < nx; ++i) {
        const double cap = (1.0 - t) * std::min(g1[i], g2[i]);
        worst = std::max(worst, f.r[k][i] - cap);
      }
    }
    if (K > 1)
      rep.add("risk_below_single_arm_cap", worst <= tol, worst - tol,
              "max excess = " + std::to_string(worst) + ", tol = " +
                  std::to_string(tol));
  }

  {
    int bad = 0;
    for (int k = 0; k < K; ++k)
      if (f.flip_changes[k] > 1 || !f.flip_ordered[k]) ++bad;
    rep.add("single_threshold_per_row", bad == 0, static_cast<double>(bad),
            std::to_string(bad) + " stages with multiple or unordered flips");
  }

  return rep;
}

}  // namespace bandit
