#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bandit/errors.hpp"
#include "bandit/grid.hpp"
#include "bandit/kernel.hpp"
#include "bandit/model.hpp"
#include "bandit/pde.hpp"
#include "bandit/threads.hpp"

namespace bandit {

struct LossPoint {
  double d = 0.0;
  double loss = 0.0;
};

struct LossCurve {
  std::vector<LossPoint> points;
  std::string strategy_id;
  double D_design = 1.0;
  double D_true = 1.0;
};

namespace detail {

struct LossSweepResult {
  double loss00 = 0.0;
  std::vector<double> row;  // field row at the requested capture time
  bool captured = false;
};

// Backward sweep of the loss scheme for a fixed threshold rule and a one-atom
// prior at w=d. The rule decides per cell: below T(t) the switch is final and
// the remaining loss is (1-t) g1; otherwise the diffusion step applies. The
// evaluation world (g weights and diffusion coefficient) runs at D_true;
// the strategy's thresholds are whatever was handed in.
inline LossSweepResult loss_sweep(const ThresholdStrategy& strategy, double d,
                                  double D_true, const GridSpec& grid,
                                  double capture_t) {
  strategy.validate();
  grid.validate();
  if (!(D_true > 0.0)) throw config_error("losses: D_true must be > 0");
  const double ratio = D_true * grid.dt / (grid.dx * grid.dx);
  if (!(ratio < 1.0))
    throw config_error("explicit scheme unstable: D*dt/dx^2 = " +
                       std::to_string(ratio) + " >= 1 (stability rule dt/dx^2 < 1/D)");

  const int S = grid.steps();
  const int nx = grid.nx();
  const std::vector<double> xs = grid.xgrid().nodes();

  PriorSpec prior;
  if (d != 0.0) prior.atoms.push_back({d, 1.0});

  LossSweepResult res;
  std::vector<double> next(nx, 0.0), cur(nx, 0.0);
  const double k = 0.5 * D_true * grid.dt / (grid.dx * grid.dx);

  GainRows gains(prior.atoms.empty() ? PriorSpec{{{0.0, 1.0}}} : prior, D_true,
                 xs, grid.t(S - 1));

  for (int j = S - 1; j >= 0; --j) {
    const double t = grid.t(j);
    const double T = strategy.at(t);
    gains.advance_to(t);
    const auto& g1 = gains.g1();
    const auto& g2 = gains.g2();
    for (int i = 1; i < nx - 1; ++i) {
      if (xs[i] < T) {
        cur[i] = (1.0 - t) * g1[i];
      } else {
        const double lap = next[i + 1] - 2.0 * next[i] + next[i - 1];
        cur[i] = next[i] + k * lap + grid.dt * g2[i];
      }
    }
    cur[0] = 0.0;
    cur[nx - 1] = 0.0;
    if (capture_t >= 0.0 && std::abs(t - capture_t) < 0.5 * grid.dt) {
      res.row = cur;
      res.captured = true;
    }
    std::swap(next, cur);
  }
  res.loss00 = value_at(next, grid.xgrid(), 0.0);
  return res;
}

}  // namespace detail

// Scaled expected loss l(sigma; 0, 0) of a threshold strategy against a true
// mean gap d. D_design is carried as metadata (the strategy was built under
// it); every number here is computed in the D_true world.
inline double eval_limit_losses(const ThresholdStrategy& strategy, double d,
                                double /*D_design*/, double D_true,
                                const GridSpec& grid) {
  return detail::loss_sweep(strategy, d, D_true, grid, -1.0).loss00;
}

// Forced initial stage of fraction eps0. The forced stage plays one arm for
// the whole fraction; afterwards the threshold rule takes over. Returns
// (loss with the forced stage, continuation term alone). For the exploring
// arm the continuation is the eps0-row smoothed by the observation noise; the
// forced stage itself costs |d| eps0 when d is on the losing side.
inline std::pair<double, double> eval_with_initial_stage(
    const ThresholdStrategy& strategy, double d, double D, const GridSpec& grid,
    double eps0, int first_action) {
  if (!(eps0 > 0.0 && eps0 < 1.0))
    throw config_error("initial stage: eps0 must be in (0,1)");
  if (first_action != 1 && first_action != 2)
    throw config_error("initial stage: first_action must be 1 or 2");
  const double steps = eps0 / grid.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9)
    throw config_error("initial stage: eps0 must be a multiple of dt");

  auto res = detail::loss_sweep(strategy, d, D, grid, eps0);
  if (!res.captured)
    throw config_error("initial stage: capture row at eps0 not reached");

  if (first_action == 1) {
    // Forced exploration: the statistic diffuses for eps0 with drift d, so
    // the continuation is the smoothed eps0-row; the stage loses |d| eps0
    // when the explored arm is the inferior one (d < 0).
    const GaussKernel kern = make_gauss_kernel(eps0 * D, grid.dx);
    if (static_cast<int>(kern.w.size()) > grid.nx())
      throw config_error(
          "quadrature grid too narrow to contain the convolution support");
    std::vector<double> conv(grid.nx());
    convolve_same(res.row, kern, conv);
    const double cont = value_at(conv, grid.xgrid(), 0.0);
    const double stage = std::max(-d, 0.0) * eps0;
    return {stage + cont, cont};
  }
  // Forced known arm: no observations accrue, the statistic stays put.
  const double cont = value_at(res.row, grid.xgrid(), 0.0);
  const double stage = std::max(d, 0.0) * eps0;
  return {stage + cont, cont};
}

// Loss curve over a d-grid; evaluations are independent and run in parallel.
inline LossCurve sweep_losses(const ThresholdStrategy& strategy,
                              const std::vector<double>& d_grid, double D_design,
                              double D_true, const GridSpec& grid) {
  if (d_grid.empty()) throw config_error("sweep_losses: empty d grid");
  LossCurve curve;
  curve.D_design = D_design;
  curve.D_true = D_true;
  curve.points.resize(d_grid.size());
  parallel_for(d_grid.size(), [&](std::size_t i) {
    curve.points[i] = {d_grid[i],
                       eval_limit_losses(strategy, d_grid[i], D_design, D_true, grid)};
  });
  return curve;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw config_error("linspace: need at least one point");
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// Golden-section maximization of the loss over [d_lo, d_hi].
inline LossPoint refine_peak(const ThresholdStrategy& strategy, double d_lo,
                             double d_hi, double D_design, double D_true,
                             const GridSpec& grid, double tol = 1e-3) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = d_lo, b = d_hi;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = eval_limit_losses(strategy, x1, D_design, D_true, grid);
  double f2 = eval_limit_losses(strategy, x2, D_design, D_true, grid);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = eval_limit_losses(strategy, x2, D_design, D_true, grid);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = eval_limit_losses(strategy, x1, D_design, D_true, grid);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, eval_limit_losses(strategy, xm, D_design, D_true, grid)};
}

}  // namespace bandit
