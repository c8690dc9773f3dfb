#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bandit/errors.hpp"

namespace bandit {

// One atom of a discrete prior on the scaled mean gap w.
struct PriorAtom {
  double w = 0.0;
  double p = 0.0;
};

struct PriorSpec {
  std::vector<PriorAtom> atoms;

  double total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.p;
    return s;
  }

  double max_abs_w() const {
    double m = 0.0;
    for (const auto& a : atoms) m = std::max(m, std::abs(a.w));
    return m;
  }

  bool two_sided() const {
    bool pos = false, neg = false;
    for (const auto& a : atoms) {
      if (a.p <= 0.0) continue;
      if (a.w > 0.0) pos = true;
      if (a.w < 0.0) neg = true;
    }
    return pos && neg;
  }

  // Masses nonnegative and summing to 1 within 1e-12. Risk solving
  // additionally needs mass on both sides of zero; loss evaluation against a
  // single true mean does not.
  void validate(bool require_two_sided) const {
    if (atoms.empty()) throw config_error("prior: no atoms");
    for (const auto& a : atoms) {
      if (!std::isfinite(a.w)) throw config_error("prior: atom location not finite");
      if (!(a.p >= 0.0) || !std::isfinite(a.p))
        throw config_error("prior: atom mass must be >= 0");
    }
    const double s = total_mass();
    if (std::abs(s - 1.0) > 1e-12)
      throw config_error("prior: masses sum to " + std::to_string(s) + ", expected 1");
    if (require_two_sided && !two_sided())
      throw config_error(
          "degenerate prior: risk solving needs mass on both sides of w=0");
  }
};

struct ModelParams {
  double D = 1.0;  // variance of one-step income
  double c = 0.0;  // bound on |w|; 0 means: take the prior's support bound

  void validate() const {
    if (!(D > 0.0) || !std::isfinite(D)) throw config_error("model: D must be > 0");
    if (c < 0.0 || !std::isfinite(c)) throw config_error("model: c must be >= 0");
  }

  double bound_c(const PriorSpec& prior) const {
    return c > 0.0 ? c : prior.max_abs_w();
  }
};

struct GPair {
  double g1 = 0.0;
  double g2 = 0.0;
};

// Likelihood weight of an atom given the invariant statistics (x, t),
// computed in log space and exponentiated once.
inline double log_h_weight(double w, double x, double t, double D) {
  return (x * w - 0.5 * t * w * w) / D;
}

inline double h_weight(double w, double x, double t, double D) {
  return std::exp(log_h_weight(w, x, t, D));
}

// g1 = sum over w>0 of w*h*p, g2 = sum over w<0 of |w|*h*p. The w=0 atom
// contributes to neither: a zero gap carries no regret.
inline GPair g_pair(const PriorSpec& prior, const ModelParams& params, double x,
                    double t) {
  if (t < 0.0) throw config_error("g_pair: t must be >= 0");
  if (!std::isfinite(x)) throw config_error("g_pair: x must be finite");
  GPair g;
  for (const auto& a : prior.atoms) {
    if (a.w == 0.0 || a.p == 0.0) continue;
    const double h = h_weight(a.w, x, t, params.D);
    if (a.w > 0.0)
      g.g1 += a.w * h * a.p;
    else
      g.g2 += -a.w * h * a.p;
  }
  return g;
}

// Streaming g1/g2 rows over a fixed x-grid along a time sweep. The h factor
// evolves multiplicatively, h(w,x,t') = h(w,x,t)*exp(-(t'-t) w^2/(2D)), so a
// step costs one exp per atom plus one multiply per cell instead of one exp
// per cell. The accumulated relative drift over ~10^4 steps is ~1e-12.
class GainRows {
 public:
  GainRows(const PriorSpec& prior, double D, const std::vector<double>& xs,
           double t0)
      : D_(D), t_(t0), nx_(xs.size()) {
    for (const auto& a : prior.atoms) {
      if (a.w == 0.0 || a.p == 0.0) continue;
      atoms_.push_back(a);
      rows_.emplace_back(nx_);
      auto& row = rows_.back();
      for (std::size_t i = 0; i < nx_; ++i)
        row[i] = h_weight(a.w, xs[i], t0, D);
    }
    g1_.assign(nx_, 0.0);
    g2_.assign(nx_, 0.0);
    rebuild();
  }

  void advance_to(double t) {
    if (t == t_) return;
    const double dtau = t - t_;
    for (std::size_t a = 0; a < atoms_.size(); ++a) {
      const double f = std::exp(-0.5 * dtau * atoms_[a].w * atoms_[a].w / D_);
      for (double& v : rows_[a]) v *= f;
    }
    t_ = t;
    rebuild();
  }

  double t() const { return t_; }
  const std::vector<double>& g1() const { return g1_; }
  const std::vector<double>& g2() const { return g2_; }

 private:
  void rebuild() {
    std::fill(g1_.begin(), g1_.end(), 0.0);
    std::fill(g2_.begin(), g2_.end(), 0.0);
    for (std::size_t a = 0; a < atoms_.size(); ++a) {
      const double w = atoms_[a].w;
      const double coef = std::abs(w) * atoms_[a].p;
      auto& target = (w > 0.0) ? g1_ : g2_;
      const auto& row = rows_[a];
      for (std::size_t i = 0; i < nx_; ++i) target[i] += coef * row[i];
    }
  }

  std::vector<PriorAtom> atoms_;
  double D_;
  double t_;
  std::size_t nx_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> g1_, g2_;
};

}  // namespace bandit
