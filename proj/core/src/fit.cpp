#include "kickrot/fit.hpp"

#include <cmath>
#include <vector>

#include "kickrot/constants.hpp"
#include "kickrot/params.hpp"

namespace kickrot::fit {

double Sinusoid::operator()(double x) const {
  return offset + sin_coef * std::sin(angular_freq * x) + cos_coef * std::cos(angular_freq * x);
}

double Sinusoid::period() const { return constants::two_pi / angular_freq; }

namespace {

double det3(const double m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

Sinusoid sinusoid_fixed(std::span<const double> x, std::span<const double> y, double angular_freq) {
  if (x.size() != y.size() || x.size() < 3)
    throw InvalidParameter("sinusoid fit needs at least 3 paired points");

  double ata[3][3] = {};
  double aty[3] = {};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double basis[3] = {1.0, std::sin(angular_freq * x[i]), std::cos(angular_freq * x[i])};
    for (int r = 0; r < 3; ++r) {
      aty[r] += basis[r] * y[i];
      for (int c = 0; c < 3; ++c) ata[r][c] += basis[r] * basis[c];
    }
  }
  const double d = det3(ata);
  if (std::abs(d) < 1e-12) throw InvalidParameter("sinusoid fit is singular for these abscissae");

  double coef[3];
  for (int k = 0; k < 3; ++k) {
    double m[3][3];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m[r][c] = (c == k) ? aty[r] : ata[r][c];
    coef[k] = det3(m) / d;
  }

  Sinusoid s;
  s.angular_freq = angular_freq;
  s.offset = coef[0];
  s.sin_coef = coef[1];
  s.cos_coef = coef[2];
  s.amplitude = std::hypot(coef[1], coef[2]);
  s.phase = std::atan2(coef[2], coef[1]);

  double mean_y = 0.0;
  for (double v : y) mean_y += v;
  mean_y /= static_cast<double>(y.size());
  double tss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - s(x[i]);
    s.rss += r * r;
    tss += (y[i] - mean_y) * (y[i] - mean_y);
  }
  s.r_squared = tss > 0.0 ? 1.0 - s.rss / tss : 1.0;
  return s;
}

Sinusoid sinusoid_free_period(std::span<const double> x, std::span<const double> y, double period_lo,
                              double period_hi) {
  if (!(period_lo > 0.0 && period_hi > period_lo))
    throw InvalidParameter("period search range must satisfy 0 < lo < hi");

  auto rss_at = [&](double period) { return sinusoid_fixed(x, y, constants::two_pi / period).rss; };

  constexpr int kGrid = 400;
  double best_period = period_lo;
  double best_rss = rss_at(period_lo);
  const double step = (period_hi - period_lo) / kGrid;
  for (int i = 1; i <= kGrid; ++i) {
    const double p = period_lo + i * step;
    const double r = rss_at(p);
    if (r < best_rss) {
      best_rss = r;
      best_period = p;
    }
  }

  // Golden-section search within one grid step either side.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::max(period_lo, best_period - step);
  double b = std::min(period_hi, best_period + step);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = rss_at(c), fd = rss_at(d);
  for (int it = 0; it < 80 && (b - a) > 1e-12 * b; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = rss_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = rss_at(d);
    }
  }
  return sinusoid_fixed(x, y, constants::two_pi / (0.5 * (a + b)));
}

Line linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("linear fit needs at least 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidParameter("linear fit needs distinct abscissae");
  Line l;
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  l.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return l;
}

}  // namespace kickrot::fit
