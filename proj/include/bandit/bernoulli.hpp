#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bandit/errors.hpp"

namespace bandit {

struct BernoulliAtom {
  double p2 = 0.5;  // success probability of the unknown arm
  double q = 0.0;   // prior mass
};

struct BernoulliModel {
  double p = 0.5;  // known arm
  std::vector<BernoulliAtom> atoms;
  int N = 0;   // horizon
  int n0 = 1;  // forced initial plays of the unknown arm
  int max_N = 5000;

  void validate() const {
    if (!(p > 0.0 && p < 1.0)) throw config_error("bernoulli: p must be in (0,1)");
    if (atoms.empty()) throw config_error("bernoulli: no prior atoms");
    double s = 0.0;
    for (const auto& a : atoms) {
      if (!(a.p2 >= 0.0 && a.p2 <= 1.0))
        throw config_error("bernoulli: atom p2 must be in [0,1]");
      if (!(a.q >= 0.0)) throw config_error("bernoulli: atom mass must be >= 0");
      s += a.q;
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw config_error("bernoulli: masses sum to " + std::to_string(s));
    if (N < 1) throw config_error("bernoulli: N must be >= 1");
    if (N > max_N)
      throw config_error("bernoulli: N exceeds the exact-table cap " +
                         std::to_string(max_N));
    if (n0 < 1 || n0 > N) throw config_error("bernoulli: need 1 <= n0 <= N");
    // The forced stage must be a vanishing fraction of the horizon; on toy
    // horizons (oracle territory) the rule would forbid every legal n0, so it
    // binds only once N is large enough to have a tenth.
    if (N >= 50 && n0 > N / 10)
      throw config_error("bernoulli: n0 must be <= N/10 for N >= 50");
  }

  double variance() const { return p * (1.0 - p); }
};

namespace detail {

class BinomialTable {
 public:
  explicit BinomialTable(int N) : lnfact_(N + 2, 0.0) {
    for (std::size_t i = 1; i < lnfact_.size(); ++i)
      lnfact_[i] = lnfact_[i - 1] + std::log(static_cast<double>(i));
  }

  // B(X, n | p2) with the n=0 convention B(·,0)=1 and degenerate p2 handled
  // exactly.
  double operator()(int X, int n, double p2) const {
    if (n == 0) return 1.0;
    if (p2 <= 0.0) return X == 0 ? 1.0 : 0.0;
    if (p2 >= 1.0) return X == n ? 1.0 : 0.0;
    return std::exp(lnfact_[n] - lnfact_[X] - lnfact_[n - X] +
                    X * std::log(p2) + (n - X) * std::log1p(-p2));
  }

 private:
  std::vector<double> lnfact_;
};

}  // namespace detail

struct BernoulliResult {
  double risk = 0.0;         // absolute units
  double forced_term = 0.0;  // n0 * E[(p - p2)+]
  double dp_term = 0.0;      // sum over X of the table at n0
  double scaled_risk = 0.0;  // risk / sqrt(p(1-p) N)
};

// Exact backward recursion over (X, n) in the absorbing form: switching to
// the known arm is final, so one table indexed by the unknown-arm history
// suffices. The transition weights (n+1-X)/(n+1) and (X+1)/(n+1) make the
// rows prior-and-likelihood weighted, which is why no posterior shows up.
inline BernoulliResult solve_bernoulli_dp(const BernoulliModel& m) {
  m.validate();
  const detail::BinomialTable B(m.N);

  const auto gain1 = [&](int X, int n) {
    double s = 0.0;
    for (const auto& a : m.atoms)
      if (a.p2 > m.p) s += (a.p2 - m.p) * B(X, n, a.p2) * a.q;
    return s;
  };
  const auto gain2 = [&](int X, int n) {
    double s = 0.0;
    for (const auto& a : m.atoms)
      if (a.p2 < m.p) s += (m.p - a.p2) * B(X, n, a.p2) * a.q;
    return s;
  };

  std::vector<double> R(m.N + 2, 0.0), Rn(m.N + 2, 0.0);
  for (int n = m.N - 1; n >= m.n0; --n) {
    for (int X = 0; X <= n; ++X) {
      const double r1 = (m.N - n) * gain1(X, n);
      const double h0 = static_cast<double>(n + 1 - X) / (n + 1);
      const double h1 = static_cast<double>(X + 1) / (n + 1);
      const double r2 = gain2(X, n) + R[X] * h0 + R[X + 1] * h1;
      Rn[X] = std::min(r1, r2);
    }
    std::swap(R, Rn);
  }

  BernoulliResult res;
  for (int X = 0; X <= m.n0; ++X) res.dp_term += R[X];
  for (const auto& a : m.atoms)
    if (a.p2 < m.p) res.forced_term += (m.p - a.p2) * a.q;
  res.forced_term *= m.n0;
  res.risk = res.forced_term + res.dp_term;
  res.scaled_risk = res.risk / std::sqrt(m.variance() * m.N);
  return res;
}

// Full table R[n][X] for all n (small N), so the forced-prefix split can be
// evaluated at any n0 without re-solving.
inline std::vector<std::vector<double>> bernoulli_dp_table(const BernoulliModel& m) {
  m.validate();
  if (m.N > 64) throw config_error("bernoulli_dp_table: meant for small N");
  const detail::BinomialTable B(m.N);
  std::vector<std::vector<double>> R(m.N + 1);
  R[m.N].assign(m.N + 2, 0.0);
  for (int n = m.N - 1; n >= 0; --n) {
    R[n].assign(m.N + 2, 0.0);
    for (int X = 0; X <= n; ++X) {
      double g1 = 0.0, g2 = 0.0;
      for (const auto& a : m.atoms) {
        const double b = B(X, n, a.p2) * a.q;
        if (a.p2 > m.p) g1 += (a.p2 - m.p) * b;
        if (a.p2 < m.p) g2 += (m.p - a.p2) * b;
      }
      const double r1 = (m.N - n) * g1;
      const double r2 = g2 + R[n + 1][X] * (n + 1.0 - X) / (n + 1.0) +
                        R[n + 1][X + 1] * (X + 1.0) / (n + 1.0);
      R[n][X] = std::min(r1, r2);
    }
  }
  return R;
}

inline double bernoulli_dp_term_at(const std::vector<std::vector<double>>& table,
                                   int n0) {
  double s = 0.0;
  for (int X = 0; X <= n0 && X < static_cast<int>(table[n0].size()); ++X)
    s += table[n0][X];
  return s;
}

// Independent oracle: enumerates every deterministic switch-once strategy
// over the reachable decision states and walks the outcome tree exactly.
inline double brute_force_bernoulli(const BernoulliModel& m) {
  m.validate();
  if (m.N > 6) throw config_error("brute_force_bernoulli: N must be <= 6");

  // Decision states (X, n) for n in [n0, N-1].
  std::vector<int> state_id((m.N + 1) * (m.N + 1), -1);
  int n_states = 0;
  for (int n = m.n0; n < m.N; ++n)
    for (int X = 0; X <= n; ++X) state_id[n * (m.N + 1) + X] = n_states++;

  // comb[n][k] for the forced prefix distribution.
  double comb[8][8] = {};
  for (int n = 0; n <= m.N; ++n) {
    comb[n][0] = 1.0;
    for (int k = 1; k <= n; ++k)
      comb[n][k] = comb[n - 1][k - 1] + (k <= n - 1 ? comb[n - 1][k] : 0.0);
  }

  double best = std::numeric_limits<double>::infinity();
  const std::uint64_t masks = std::uint64_t{1} << n_states;
  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    double total = 0.0;
    for (const auto& atom : m.atoms) {
      const double p2 = atom.p2;
      const double regret_stop = std::max(p2 - m.p, 0.0);
      const double regret_pull = std::max(m.p - p2, 0.0);
      // walk(X, n, prob): expected remaining regret from state (X, n).
      const auto walk = [&](const auto& self, int X, int n, double prob) -> double {
        if (n == m.N || prob == 0.0) return 0.0;
        const int sid = state_id[n * (m.N + 1) + X];
        if ((mask >> sid) & 1) return prob * (m.N - n) * regret_stop;
        double loss = prob * regret_pull;
        loss += self(self, X + 1, n + 1, prob * p2);
        loss += self(self, X, n + 1, prob * (1.0 - p2));
        return loss;
      };
      double loss = m.n0 * regret_pull;
      for (int X = 0; X <= m.n0; ++X) {
        const double pr =
            comb[m.n0][X] * std::pow(p2, X) * std::pow(1.0 - p2, m.n0 - X);
        loss += walk(walk, X, m.n0, pr);
      }
      total += atom.q * loss;
    }
    best = std::min(best, total);
  }
  return best;
}

}  // namespace bandit
