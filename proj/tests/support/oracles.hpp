#pragma once

// Independent reference computations used by the tests.  Everything here is
// written straight from first principles (classical ODE integration, brute
// Monte Carlo on a fine grid, direct walk simulation) so that agreement with
// the library is evidence rather than tautology.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stalker/rng.hpp"

namespace oracle {

// Integrates f'(t) = (c + b - f(t))^(-gamma), f(0) = 0 with classical RK4.
// This is the pursuit displacement toward a target frozen at height b with
// cushion c; `steps` controls accuracy (error ~ (T/steps)^4).
inline double rk4_pursuit(double horizon, double b, double gamma, double c,
                          int steps) {
  if (steps < 1) throw std::invalid_argument("rk4_pursuit: steps < 1");
  auto rhs = [&](double f) { return std::pow(c + b - f, -gamma); };
  const double h = horizon / steps;
  double f = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double k1 = rhs(f);
    const double k2 = rhs(f + 0.5 * h * k1);
    const double k3 = rhs(f + 0.5 * h * k2);
    const double k4 = rhs(f + h * k3);
    f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return f;
}

// First time a standard Brownian motion started at 0 leaves (-level, level),
// observed on a grid of step dt.  Returns the grid time of the first sample
// at or beyond the boundary.
inline double grid_exit_time(double level, double dt, stalker::RngStream& rng) {
  const double sd = std::sqrt(dt);
  double x = 0.0;
  double t = 0.0;
  do {
    x += sd * rng.gauss();
    t += dt;
  } while (std::abs(x) < level);
  return t;
}

// Fair +-1 walk from 0: true iff the walk reaches -1 before +k.
inline bool walk_down_first(std::int64_t k, stalker::RngStream& rng) {
  std::int64_t pos = 0;
  while (true) {
    pos += (rng.next_u64() >> 63) ? 1 : -1;
    if (pos <= -1) return true;
    if (pos >= k) return false;
  }
}

}  // namespace oracle
