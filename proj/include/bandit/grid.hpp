#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bandit/errors.hpp"

namespace bandit {

namespace detail {

inline long long round_to_integer(double v, const char* what) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9)
    throw config_error(std::string(what) + " must be an integer (got " +
                       std::to_string(v) + ")");
  return static_cast<long long>(r);
}

}  // namespace detail

// Uniform x-lattice shared by the quadrature recursions.
struct XGrid {
  double x_min = -6.0;
  double x_max = 6.0;
  double dx = 0.0143;

  void validate() const {
    if (!(dx > 0.0) || !std::isfinite(dx)) throw config_error("grid: dx must be > 0");
    if (!(x_min < 0.0) || !(x_max > 0.0))
      throw config_error("grid: need x_min < 0 < x_max");
    detail::round_to_integer((x_max - x_min) / dx, "grid: (x_max - x_min)/dx");
    if (nx() < 5) throw config_error("grid: needs at least 5 x-nodes");
  }

  int nx() const {
    return static_cast<int>(std::llround((x_max - x_min) / dx)) + 1;
  }

  double x(int i) const { return x_min + i * dx; }

  std::vector<double> nodes() const {
    std::vector<double> xs(nx());
    for (int i = 0; i < nx(); ++i) xs[i] = x(i);
    return xs;
  }
};

// Space-time lattice for the explicit scheme. The bare stability invariant is
// dt/dx^2 < 1; solvers additionally require D*dt/dx^2 < 1 for their D.
struct GridSpec {
  double x_min = -6.0;
  double x_max = 6.0;
  double dx = 0.0143;
  double dt = 1.0 / 5000.0;

  void validate() const {
    xgrid().validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw config_error("grid: dt must be > 0");
    if (!(dt / (dx * dx) < 1.0))
      throw config_error("grid: explicit scheme requires dt/dx^2 < 1, got " +
                         std::to_string(dt / (dx * dx)));
    detail::round_to_integer(1.0 / dt, "grid: 1/dt");
  }

  XGrid xgrid() const { return XGrid{x_min, x_max, dx}; }

  int nx() const { return xgrid().nx(); }

  // Number of time steps; rows run j = 0..steps() with t = j*dt.
  int steps() const { return static_cast<int>(std::llround(1.0 / dt)); }
  int nt() const { return steps() + 1; }

  double x(int i) const { return x_min + i * dx; }
  double t(int j) const { return j * dt; }
};

// Symmetric grid around 0 whose half-width is the smallest node multiple of
// dx covering the target (e.g. dx=0.0143 -> half-width 6.006). Keeps 0 on the
// lattice and the node count integral.
inline XGrid make_symmetric_xgrid(double dx, double x_half_target = 6.0) {
  const double half = std::ceil(x_half_target / dx - 1e-9) * dx;
  return XGrid{-half, half, dx};
}

inline GridSpec make_symmetric_grid(double dt, double dx,
                                    double x_half_target = 6.0) {
  const XGrid xg = make_symmetric_xgrid(dx, x_half_target);
  return GridSpec{xg.x_min, xg.x_max, dx, dt};
}

// Linear interpolation of a row of values over the grid nodes.
inline double value_at(const std::vector<double>& row, const XGrid& g, double x) {
  if (x <= g.x_min) return row.front();
  if (x >= g.x_max) return row.back();
  const double u = (x - g.x_min) / g.dx;
  const int i = std::min(static_cast<int>(u), g.nx() - 2);
  const double frac = u - i;
  return row[i] * (1.0 - frac) + row[i + 1] * frac;
}

}  // namespace bandit
