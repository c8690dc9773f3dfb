#pragma once

#include <cmath>
#include <vector>

#include "bandit/errors.hpp"
#include "bandit/grid.hpp"
#include "bandit/model.hpp"
#include "bandit/pde.hpp"

namespace bandit {

inline PriorSpec two_point_prior(double d1, double d2, double rho) {
  if (!(d1 > 0.0) || !(d2 > 0.0))
    throw config_error("two_point_prior: d1, d2 must be > 0");
  if (!(rho >= 0.0 && rho <= 1.0))
    throw config_error("two_point_prior: rho must be in [0, 1]");
  PriorSpec prior;
  if (rho > 0.0) prior.atoms.push_back({d1, rho});
  if (rho < 1.0) prior.atoms.push_back({-d2, 1.0 - rho});
  return prior;
}

struct SearchBox {
  double d1_lo = 0.5, d1_hi = 3.0;
  double d2_lo = 1.0, d2_hi = 4.0;
  double rho_lo = 0.1, rho_hi = 0.9;
  int lattice = 5;         // lattice nodes per coordinate in the coarse pass
  int refine_rounds = 2;   // coordinate-wise golden-section sweeps
  double tol = 2e-3;       // parameter tolerance of each line search

  void validate() const {
    if (!(d1_lo > 0.0 && d1_lo <= d1_hi) || !(d2_lo > 0.0 && d2_lo <= d2_hi))
      throw config_error("search box: need 0 < lo <= hi for d1 and d2");
    if (!(rho_lo > 0.0 && rho_lo <= rho_hi && rho_hi <= 1.0))
      throw config_error("search box: need 0 < rho_lo <= rho_hi <= 1");
    if (lattice < 2 && (d1_lo < d1_hi || d2_lo < d2_hi || rho_lo < rho_hi))
      throw config_error("search box: lattice must be >= 2");
    if (refine_rounds < 0 || !(tol > 0.0))
      throw config_error("search box: bad refinement settings");
  }
};

struct Candidate {
  double d1 = 0.0, d2 = 0.0, rho = 0.0;
  double risk = 0.0;
};

struct WorstPriorResult {
  double d1 = 0.0, d2 = 0.0, rho = 0.0;
  double risk = 0.0;         // re-scored on the fine grid
  double risk_search = 0.0;  // value on the search grid; dominates the trace
  bool boundary_warning = false;
  std::vector<Candidate> trace;
};

// Maximizes r(0,0) over two-point priors (atom d1 with mass rho, atom -d2
// with mass 1-rho): coarse lattice, then coordinate-wise golden-section
// refinement, then one solve on the fine grid for the reported risk. The
// search is deterministic.
inline WorstPriorResult find_worst_prior(const ModelParams& params,
                                         const GridSpec& fine_grid,
                                         const GridSpec& search_grid,
                                         const SearchBox& box = {}) {
  params.validate();
  fine_grid.validate();
  search_grid.validate();
  box.validate();

  WorstPriorResult res;
  const auto score = [&](double d1, double d2, double rho) {
    PriorSpec prior = two_point_prior(d1, d2, rho);
    SolveOptions opts;
    opts.require_two_sided = prior.two_sided();
    const double risk =
        solve_limit_risk(prior, params, search_grid, opts).risk00();
    res.trace.push_back({d1, d2, rho, risk});
    return risk;
  };

  Candidate best{0.0, 0.0, 0.0, -1.0};
  const auto node = [](double lo, double hi, int i, int n) {
    return n <= 1 ? lo : lo + (hi - lo) * i / (n - 1);
  };
  const int L = box.lattice;
  for (int i = 0; i < L; ++i) {
    const double d1 = node(box.d1_lo, box.d1_hi, i, L);
    for (int j = 0; j < L; ++j) {
      const double d2 = node(box.d2_lo, box.d2_hi, j, L);
      for (int k = 0; k < L; ++k) {
        const double rho = node(box.rho_lo, box.rho_hi, k, L);
        const double r = score(d1, d2, rho);
        if (r > best.risk) best = {d1, d2, rho, r};
      }
    }
  }

  // Golden-section line maximization along one coordinate.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  const auto line_max = [&](double lo, double hi, auto eval) {
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    while (b - a > box.tol) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = eval(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = eval(x1);
      }
    }
    const double xm = 0.5 * (a + b);
    return std::pair<double, double>(xm, eval(xm));
  };

  for (int round = 0; round < box.refine_rounds; ++round) {
    if (box.d1_lo < box.d1_hi) {
      auto [x, fx] = line_max(box.d1_lo, box.d1_hi, [&](double v) {
        return score(v, best.d2, best.rho);
      });
      if (fx > best.risk) {
        best.d1 = x;
        best.risk = fx;
      }
    }
    if (box.d2_lo < box.d2_hi) {
      auto [x, fx] = line_max(box.d2_lo, box.d2_hi, [&](double v) {
        return score(best.d1, v, best.rho);
      });
      if (fx > best.risk) {
        best.d2 = x;
        best.risk = fx;
      }
    }
    if (box.rho_lo < box.rho_hi) {
      auto [x, fx] = line_max(box.rho_lo, box.rho_hi, [&](double v) {
        return score(best.d1, best.d2, v);
      });
      if (fx > best.risk) {
        best.rho = x;
        best.risk = fx;
      }
    }
  }

  // The reported optimum is the best candidate ever scored, so it dominates
  // the whole trace even if a line search ends slightly off its best probe.
  for (const auto& cand : res.trace)
    if (cand.risk > best.risk) best = cand;

  res.d1 = best.d1;
  res.d2 = best.d2;
  res.rho = best.rho;
  res.risk_search = best.risk;

  const double edge = box.tol * 10.0 + 1e-9;
  res.boundary_warning =
      (best.d1 - box.d1_lo < edge && box.d1_lo < box.d1_hi) ||
      (box.d1_hi - best.d1 < edge && box.d1_lo < box.d1_hi) ||
      (best.d2 - box.d2_lo < edge && box.d2_lo < box.d2_hi) ||
      (box.d2_hi - best.d2 < edge && box.d2_lo < box.d2_hi) ||
      (best.rho - box.rho_lo < edge && box.rho_lo < box.rho_hi) ||
      (box.rho_hi - best.rho < edge && box.rho_lo < box.rho_hi);

  PriorSpec prior = two_point_prior(best.d1, best.d2, best.rho);
  SolveOptions opts;
  opts.require_two_sided = prior.two_sided();
  res.risk = solve_limit_risk(prior, params, fine_grid, opts).risk00();
  return res;
}

}  // namespace bandit
