#pragma once

#include <span>

namespace kickrot::fit {

/// y ≈ offset + amplitude · sin(ω x + phase), fitted by linear least squares
/// on the basis {1, sin ωx, cos ωx} at a fixed angular frequency ω.
struct Sinusoid {
  double angular_freq = 0.0;
  double offset = 0.0;
  double sin_coef = 0.0;
  double cos_coef = 0.0;
  double amplitude = 0.0;  // sqrt(sin_coef² + cos_coef²)
  double phase = 0.0;      // atan2(cos_coef, sin_coef)
  double rss = 0.0;        // residual sum of squares
  double r_squared = 0.0;

  double operator()(double x) const;
  double period() const;
};

Sinusoid sinusoid_fixed(std::span<const double> x, std::span<const double> y, double angular_freq);

/// As sinusoid_fixed, with the period also free: a grid scan of the residual
/// over [period_lo, period_hi] followed by golden-section refinement.
Sinusoid sinusoid_free_period(std::span<const double> x, std::span<const double> y, double period_lo,
                              double period_hi);

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

Line linear(std::span<const double> x, std::span<const double> y);

}  // namespace kickrot::fit
