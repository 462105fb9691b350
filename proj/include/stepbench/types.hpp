#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace stepbench {

/// Dense state vector. All shipped problems are small (dim <= 51).
using Vec = std::vector<double>;

/// Right-hand side f(t, y) -> y'. Must be pure; writes dy/dt into `dydt`
/// (same length as `y`).
using Rhs = std::function<void(double t, std::span<const double> y,
                               std::span<double> dydt)>;

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) {
    const double a = std::abs(x);
    if (a > m) m = a;
  }
  return m;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace stepbench
