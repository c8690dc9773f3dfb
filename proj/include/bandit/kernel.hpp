#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "bandit/errors.hpp"

namespace bandit {

// Trapezoid discretization of a centered Gaussian density, truncated at six
// standard deviations. Weights are w_j = dx * pdf(j*dx) with halved end
// weights; the mass defect of the rule is ~1e-9 and is left uncorrected.
struct GaussKernel {
  std::vector<double> w;  // size 2J+1, symmetric
  int J = 0;

  double mass() const {
    double s = 0.0;
    for (double v : w) s += v;
    return s;
  }
};

inline GaussKernel make_gauss_kernel(double variance, double dx) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw config_error("kernel: variance must be > 0");
  if (!(dx > 0.0)) throw config_error("kernel: dx must be > 0");
  const double sig = std::sqrt(variance);
  const int J = static_cast<int>(std::ceil(6.0 * sig / dx));
  GaussKernel k;
  k.J = J;
  k.w.resize(2 * J + 1);
  const double norm = 1.0 / (sig * std::sqrt(2.0 * std::numbers::pi));
  for (int j = -J; j <= J; ++j) {
    const double y = j * dx;
    k.w[j + J] = dx * norm * std::exp(-0.5 * y * y / variance);
  }
  k.w.front() *= 0.5;
  k.w.back() *= 0.5;
  return k;
}

// out[i] = sum_j k.w[j+J] * row[i-j], with row taken as 0 outside its range.
inline void convolve_same(const std::vector<double>& row, const GaussKernel& k,
                          std::vector<double>& out) {
  const int n = static_cast<int>(row.size());
  if (static_cast<int>(k.w.size()) > n)
    throw config_error(
        "quadrature grid too narrow to contain the convolution support (needs " +
        std::to_string(k.w.size()) + " nodes, has " + std::to_string(n) + ")");
  out.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int j_lo = std::max(-k.J, i - (n - 1));
    const int j_hi = std::min(k.J, i);
    double s = 0.0;
    for (int j = j_lo; j <= j_hi; ++j) s += k.w[j + k.J] * row[i - j];
    out[i] = s;
  }
}

inline double convolve_at(const std::vector<double>& row, const GaussKernel& k,
                          int i) {
  const int n = static_cast<int>(row.size());
  const int j_lo = std::max(-k.J, i - (n - 1));
  const int j_hi = std::min(k.J, i);
  double s = 0.0;
  for (int j = j_lo; j <= j_hi; ++j) s += k.w[j + k.J] * row[i - j];
  return s;
}

}  // namespace bandit
