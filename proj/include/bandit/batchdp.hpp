#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bandit/errors.hpp"
#include "bandit/grid.hpp"
#include "bandit/kernel.hpp"
#include "bandit/model.hpp"
#include "bandit/pde.hpp"

namespace bandit {

// Horizon split into K batches, each a positive fraction; fractions sum to 1.
struct BatchSchedule {
  std::vector<double> fractions;

  static BatchSchedule uniform(int K) {
    if (K < 1) throw config_error("schedule: need at least one batch");
    return BatchSchedule{std::vector<double>(K, 1.0 / K)};
  }

  void validate() const {
    if (fractions.empty()) throw config_error("schedule: empty");
    double s = 0.0;
    for (double e : fractions) {
      if (!(e > 0.0) || !std::isfinite(e))
        throw config_error("schedule: fractions must be > 0");
      s += e;
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw config_error("schedule: fractions sum to " + std::to_string(s) +
                         ", expected 1");
  }

  int stages() const { return static_cast<int>(fractions.size()); }

  // Stage start times t_0=0..t_K=1 (K+1 entries).
  std::vector<double> times() const {
    std::vector<double> t(fractions.size() + 1, 0.0);
    for (std::size_t k = 0; k < fractions.size(); ++k)
      t[k + 1] = t[k] + fractions[k];
    t.back() = 1.0;
    return t;
  }
};

// Per-stage value rows of the batch recursion on a shared x-grid. Row k holds
// the value at stage start time t[k]; the last row is the terminal zero.
struct StepRiskField {
  XGrid xgrid;
  std::vector<double> t;                       // size K+1
  std::vector<std::vector<double>> r;          // K+1 rows
  std::vector<std::vector<std::uint8_t>> action;
  std::vector<double> threshold;               // size K
  std::vector<int> flip_changes;
  std::vector<std::uint8_t> flip_ordered;

  double risk00() const { return value_at(r.front(), xgrid, 0.0); }

  ThresholdStrategy thresholds() const {
    ThresholdStrategy s;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      if (flip_changes[k] > 1 || !flip_ordered[k])
        throw integrity_error("batch stage " + std::to_string(k) +
                              " threshold row has " +
                              std::to_string(flip_changes[k]) + " action changes");
      s.t.push_back(t[k]);
      s.T.push_back(threshold[k]);
    }
    return s;
  }
};

namespace detail {

inline const GaussKernel& kernel_for(std::map<double, GaussKernel>& cache,
                                     double variance, double dx, int nx) {
  auto it = cache.find(variance);
  if (it == cache.end()) {
    GaussKernel k = make_gauss_kernel(variance, dx);
    if (static_cast<int>(k.w.size()) > nx)
      throw config_error(
          "quadrature grid too narrow to contain the convolution support");
    it = cache.emplace(variance, std::move(k)).first;
  }
  return it->second;
}

}  // namespace detail

// Backward batch recursion for the Bayesian risk: at stage start (x, t_k),
// r1 = (1-t_k) g1(x,t_k) (switch for good), r2 = eps_k g2(x,t_k) + smoothing
// of the next stage by a Gaussian of variance eps_k D.
inline StepRiskField solve_batch_risk(const PriorSpec& prior,
                                      const ModelParams& params,
                                      const BatchSchedule& schedule,
                                      const XGrid& xgrid,
                                      bool require_two_sided = true) {
  params.validate();
  prior.validate(require_two_sided);
  schedule.validate();
  xgrid.validate();

  const int K = schedule.stages();
  const int nx = xgrid.nx();
  const std::vector<double> xs = xgrid.nodes();
  const std::vector<double> times = schedule.times();

  StepRiskField f;
  f.xgrid = xgrid;
  f.t = times;
  f.r.assign(K + 1, std::vector<double>(nx, 0.0));
  f.action.assign(K + 1, std::vector<std::uint8_t>(nx, 1));
  f.threshold.assign(K, 0.0);
  f.flip_changes.assign(K, 0);
  f.flip_ordered.assign(K, 1);

  std::map<double, GaussKernel> kernels;
  GainRows gains(prior, params.D, xs, times[K - 1]);
  std::vector<double> conv(nx), delta(nx);

  for (int k = K - 1; k >= 0; --k) {
    const double t = times[k];
    const double eps = schedule.fractions[k];
    gains.advance_to(t);
    const auto& g1 = gains.g1();
    const auto& g2 = gains.g2();
    const auto& kern = detail::kernel_for(kernels, eps * params.D, xgrid.dx, nx);
    convolve_same(f.r[k + 1], kern, conv);

    auto& cur = f.r[k];
    auto& act = f.action[k];
    for (int i = 0; i < nx; ++i) {
      const double r1 = (1.0 - t) * g1[i];
      const double r2 = eps * g2[i] + conv[i];
      delta[i] = r1 - r2;
      if (r1 <= r2) {
        cur[i] = r1;
        act[i] = 1;
      } else {
        cur[i] = r2;
        act[i] = 2;
      }
    }
    const auto rc = detail::classify_row(xs, delta, act.data(), 0, nx - 1, xgrid.dx);
    f.threshold[k] = rc.T;
    f.flip_changes[k] = rc.changes;
    f.flip_ordered[k] = rc.ordered ? 1 : 0;
  }
  return f;
}

// Same recursion with the min replaced by a fixed threshold rule: at stage
// start use action 1 when x < T(t_k). One-sided priors are allowed (loss
// evaluation against a single true mean).
inline StepRiskField solve_batch_losses(const ThresholdStrategy& strategy,
                                        const PriorSpec& prior,
                                        const ModelParams& params,
                                        const BatchSchedule& schedule,
                                        const XGrid& xgrid) {
  params.validate();
  prior.validate(false);
  strategy.validate();
  schedule.validate();
  xgrid.validate();

  const int K = schedule.stages();
  const int nx = xgrid.nx();
  const std::vector<double> xs = xgrid.nodes();
  const std::vector<double> times = schedule.times();

  StepRiskField f;
  f.xgrid = xgrid;
  f.t = times;
  f.r.assign(K + 1, std::vector<double>(nx, 0.0));
  f.action.assign(K + 1, std::vector<std::uint8_t>(nx, 1));
  f.threshold.assign(K, 0.0);
  f.flip_changes.assign(K, 1);
  f.flip_ordered.assign(K, 1);

  std::map<double, GaussKernel> kernels;
  GainRows gains(prior, params.D, xs, times[K - 1]);
  std::vector<double> conv(nx);

  for (int k = K - 1; k >= 0; --k) {
    const double t = times[k];
    const double eps = schedule.fractions[k];
    const double T = strategy.at(t);
    gains.advance_to(t);
    const auto& g1 = gains.g1();
    const auto& g2 = gains.g2();
    const auto& kern = detail::kernel_for(kernels, eps * params.D, xgrid.dx, nx);
    convolve_same(f.r[k + 1], kern, conv);

    auto& cur = f.r[k];
    auto& act = f.action[k];
    for (int i = 0; i < nx; ++i) {
      if (xs[i] < T) {
        cur[i] = (1.0 - t) * g1[i];
        act[i] = 1;
      } else {
        cur[i] = eps * g2[i] + conv[i];
        act[i] = 2;
      }
    }
    f.threshold[k] = T;
  }
  return f;
}

// Scale transformation check: D -> kD, atoms w -> sqrt(k) w, x-grid scaled by
// sqrt(k) must multiply the risk by exactly sqrt(k).
struct ScalingReport {
  double risk_base = 0.0;
  double risk_mapped = 0.0;
  double ratio = 0.0;
  double expected_ratio = 0.0;
};

inline ScalingReport verify_scaling(const PriorSpec& prior, const ModelParams& params,
                                    const BatchSchedule& schedule, double k,
                                    const XGrid& xgrid) {
  if (!(k > 0.0)) throw config_error("verify_scaling: k must be > 0");
  const double s = std::sqrt(k);
  ScalingReport rep;
  rep.expected_ratio = s;
  rep.risk_base = solve_batch_risk(prior, params, schedule, xgrid).risk00();

  PriorSpec mapped = prior;
  for (auto& a : mapped.atoms) a.w *= s;
  ModelParams mp = params;
  mp.D = params.D * k;
  if (mp.c > 0.0) mp.c *= s;
  XGrid mg{xgrid.x_min * s, xgrid.x_max * s, xgrid.dx * s};
  rep.risk_mapped = solve_batch_risk(mapped, mp, schedule, mg).risk00();
  rep.ratio = rep.risk_mapped / rep.risk_base;
  return rep;
}

// Batch-size identity: K batches of M items behave like K one-by-one steps of
// a model with variance scaled by M. Both sides below are reported in the
// one-by-one scale.
struct BatchEquivalenceReport {
  double risk_direct = 0.0;
  double risk_via_batches = 0.0;
  double diff = 0.0;
};

inline BatchEquivalenceReport verify_batch_one_by_one(const PriorSpec& prior,
                                                      const ModelParams& params,
                                                      int K, int M,
                                                      const XGrid& xgrid) {
  if (K < 1 || M < 1) throw config_error("verify_batch_one_by_one: K, M >= 1");
  BatchEquivalenceReport rep;
  const BatchSchedule sched = BatchSchedule::uniform(K);
  rep.risk_direct = solve_batch_risk(prior, params, sched, xgrid).risk00();

  const double s = std::sqrt(static_cast<double>(M));
  PriorSpec mapped = prior;
  for (auto& a : mapped.atoms) a.w *= s;
  ModelParams mp = params;
  mp.D = params.D * M;
  if (mp.c > 0.0) mp.c *= s;
  XGrid mg{xgrid.x_min * s, xgrid.x_max * s, xgrid.dx * s};
  rep.risk_via_batches = solve_batch_risk(mapped, mp, sched, mg).risk00() / s;
  rep.diff = std::abs(rep.risk_direct - rep.risk_via_batches);
  return rep;
}

// Full-history oracle: the recursion over (arm-1 steps, arm-2 steps) without
// assuming the switch is final. Small K only; used to confirm that the
// reduced recursion and the absorbing property are exact.
struct AbsorbingReport {
  double full_risk = 0.0;
  double reduced_risk = 0.0;
  double diff = 0.0;
  bool absorbing_ok = true;
};

inline AbsorbingReport verify_absorbing(const PriorSpec& prior,
                                        const ModelParams& params, int K,
                                        const XGrid& xgrid) {
  if (K < 1 || K > 6)
    throw config_error("verify_absorbing: K must be in [1, 6]");
  params.validate();
  prior.validate(true);
  xgrid.validate();

  const int nx = xgrid.nx();
  const std::vector<double> xs = xgrid.nodes();
  const double eps = 1.0 / K;
  GaussKernel kern = make_gauss_kernel(eps * params.D, xgrid.dx);
  if (static_cast<int>(kern.w.size()) > nx)
    throw config_error(
        "quadrature grid too narrow to contain the convolution support");

  // index (a,b), a+b <= K: a arm-1 steps taken, b arm-2 steps taken.
  const auto id = [K](int a, int b) { return a * (K + 1) + b; };
  std::vector<std::vector<double>> r((K + 1) * (K + 1));
  std::vector<std::vector<std::uint8_t>> act((K + 1) * (K + 1));
  std::vector<double> conv(nx);

  AbsorbingReport rep;
  for (int m = K; m >= 0; --m) {
    for (int a = m; a >= 0; --a) {
      const int b = m - a;
      if (m == K) {
        r[id(a, b)].assign(nx, 0.0);
        continue;
      }
      // The posterior depends on arm-2 observations only, so g is taken at
      // the arm-2 time b*eps.
      const double t2 = b * eps;
      auto& cur = r[id(a, b)];
      auto& av = act[id(a, b)];
      cur.assign(nx, 0.0);
      av.assign(nx, 1);
      convolve_same(r[id(a, b + 1)], kern, conv);
      const auto& step1 = r[id(a + 1, b)];
      for (int i = 0; i < nx; ++i) {
        const GPair g = g_pair(prior, params, xs[i], t2);
        const double r1 = eps * g.g1 + step1[i];
        const double r2 = eps * g.g2 + conv[i];
        if (r1 <= r2) {
          cur[i] = r1;
          av[i] = 1;
        } else {
          cur[i] = r2;
          av[i] = 2;
        }
      }
      // Once action 1 is optimal it must stay optimal after another arm-1
      // step at the same (x, b).
      if (a + 1 + b < K) {
        const auto& next_a = act[id(a + 1, b)];
        for (int i = 0; i < nx; ++i)
          if (av[i] == 1 && next_a[i] != 1) rep.absorbing_ok = false;
      }
    }
  }

  rep.full_risk = value_at(r[id(0, 0)], xgrid, 0.0);
  rep.reduced_risk =
      solve_batch_risk(prior, params, BatchSchedule::uniform(K), xgrid).risk00();
  rep.diff = std::abs(rep.full_risk - rep.reduced_risk);
  return rep;
}

// One-step upper estimate of the starting value: explore for one stage, then
// follow the better single action for the rest.
inline double initial_step_bound(const PriorSpec& prior, const ModelParams& params,
                                 double eps, const XGrid& xgrid) {
  if (!(eps > 0.0 && eps <= 1.0)) throw config_error("initial_step_bound: eps in (0,1]");
  const int nx = xgrid.nx();
  const std::vector<double> xs = xgrid.nodes();
  GaussKernel kern = make_gauss_kernel(eps * params.D, xgrid.dx);
  if (static_cast<int>(kern.w.size()) > nx)
    throw config_error(
        "quadrature grid too narrow to contain the convolution support");
  std::vector<double> mn(nx), conv(nx);
  for (int i = 0; i < nx; ++i) {
    const GPair g = g_pair(prior, params, xs[i], eps);
    mn[i] = std::min(g.g1, g.g2);
  }
  convolve_same(mn, kern, conv);
  const GPair g0 = g_pair(prior, params, 0.0, 0.0);
  return eps * g0.g2 + (1.0 - eps) * value_at(conv, xgrid, 0.0);
}

}  // namespace bandit
