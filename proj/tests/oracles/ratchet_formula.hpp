#pragma once

// Closed-form ratchet current evaluated with the series oracle, so the
// library's analytic module is checked against an independent Bessel source.

#include <cmath>

#include "oracles/bessel_series.hpp"

namespace oracle {

inline double max_current(double K, double b) {
  const double j0 = bessel_j_series(0, 2 * K * b);
  const double j1 = bessel_j_series(1, 2 * K * b);
  return -K * j1 / (1 - j0 * j0) * (j0 * bessel_j_series(2, (1 - b) * K) + bessel_j_series(2, (1 + b) * K));
}

inline double time_factor(double K, double b, long t) {
  return 1 - std::pow(bessel_j_series(0, 2 * K * b), 2 * t - 2);
}

inline double current(double K, double b, double A, double rho_L, long t) {
  return max_current(K, b) * std::sin((1 - b) * A - 2 * b * rho_L) * time_factor(K, b, t);
}

}  // namespace oracle
