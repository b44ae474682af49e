#include "kickrot/analytic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kickrot/bessel.hpp"
#include "kickrot/constants.hpp"

namespace kickrot::analytic {

using special::bessel_j;

CurrentAmplitude max_current(const DimensionlessParams& params) {
  params.validate();
  const double K = params.kick_strength;
  const double b = params.period_asymmetry;
  if (b == 0.0) return {0.0, true};

  const double x = 2.0 * K * b;
  const double j0 = bessel_j(0, x);
  const double bracket = j0 * bessel_j(2, (1.0 - b) * K) + bessel_j(2, (1.0 + b) * K);
  return {-K * bessel_j(1, x) / (1.0 - j0 * j0) * bracket, false};
}

double time_factor(const DimensionlessParams& params, long t) {
  params.validate();
  if (t < 1) throw InvalidParameter("t must satisfy t >= 1 (got " + std::to_string(t) + ")");
  const double j0 = bessel_j(0, 2.0 * params.kick_strength * params.period_asymmetry);
  return 1.0 - std::pow(j0, 2.0 * static_cast<double>(t) - 2.0);
}

double ratchet_phase(const DimensionlessParams& params, double rho_L) {
  const double b = params.period_asymmetry;
  return (1.0 - b) * params.rocking_amplitude - 2.0 * b * rho_L;
}

double plot_phase(const DimensionlessParams& params, double rho_L) {
  return (2.0 * rho_L * params.period_asymmetry - params.rocking_amplitude) / constants::pi;
}

double current(const DimensionlessParams& params, double rho_L, long t) {
  const auto amp = max_current(params);
  if (amp.degenerate) return 0.0;
  return amp.value * std::sin(ratchet_phase(params, rho_L)) * time_factor(params, t);
}

RatchetTime ratchet_time(const DimensionlessParams& params) {
  params.validate();
  const double kb = params.kick_strength * params.period_asymmetry;
  if (kb == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {1.0 / (kb * kb), false};
}

double localization_time(const DimensionlessParams& params) {
  params.validate();
  const double r = params.kick_strength / params.hbar_eff;
  return r * r;
}

double width_damping(double sigma_p, double b) {
  if (!(sigma_p >= 0.0)) throw InvalidParameter("sigma_p must satisfy sigma_p >= 0");
  return std::exp(-4.0 * sigma_p * sigma_p * b * b);
}

double uncorrelated_diffusion(double K) { return 0.5 * K * K; }

double localization_length(const DimensionlessParams& params) {
  params.validate();
  return uncorrelated_diffusion(params.kick_strength) / params.hbar_eff;
}

double simplified_amplitude(double K, double b) {
  if (!(b > 0.0)) throw InvalidParameter("b must be > 0 for the simplified amplitude");
  return bessel_j(2, K) / b;
}

AnalyticPrediction predict(const DimensionlessParams& params, double rho_L, double sigma_p) {
  AnalyticPrediction out;
  out.max_current = max_current(params);
  out.ratchet_time = ratchet_time(params);
  out.localization_time = localization_time(params);
  out.uncorrelated_diffusion = uncorrelated_diffusion(params.kick_strength);
  out.localization_length = localization_length(params);
  out.phase = ratchet_phase(params, rho_L);
  out.plot_phase = plot_phase(params, rho_L);
  out.damping = width_damping(sigma_p, params.period_asymmetry);
  return out;
}

}  // namespace kickrot::analytic
