#pragma once

#include "kickrot/params.hpp"

namespace kickrot::analytic {

/// Saturated classical ratchet current amplitude
///   I₀ = -K J₁(2Kb) / (1 - J₀(2Kb)²) · [J₀(2Kb) J₂((1-b)K) + J₂((1+b)K)].
/// At b = 0 the numerator and denominator both vanish; the symmetric limit
/// is returned as exactly 0 with `degenerate` set.
struct CurrentAmplitude {
  double value = 0.0;
  bool degenerate = false;
};
CurrentAmplitude max_current(const DimensionlessParams& params);

/// F(t) = 1 - J₀(2Kb)^{2t-2}; F(1) = 0, nondecreasing, tends to 1.
/// Throws InvalidParameter for t < 1.
double time_factor(const DimensionlessParams& params, long t);

/// Argument of the sinusoid in the current: (1-b)A - 2bρ_L.
double ratchet_phase(const DimensionlessParams& params, double rho_L);

/// Experimental phase coordinate Φ = (2ρ_L b - A)/π.
double plot_phase(const DimensionlessParams& params, double rho_L);

/// I(t) = I₀ sin((1-b)A - 2bρ_L) F(t).
double current(const DimensionlessParams& params, double rho_L, long t);

/// t_R = 1/(Kb)²; +infinity when Kb = 0 (check `infinite`).
struct RatchetTime {
  double kicks = 0.0;
  bool infinite = false;
};
RatchetTime ratchet_time(const DimensionlessParams& params);

/// Order-of-magnitude break time t* ~ K²/ħ_eff². Heuristic only.
double localization_time(const DimensionlessParams& params);

/// exp(-4 σ_p² b²), the reduction of I₀ for an initial momentum width σ_p.
double width_damping(double sigma_p, double b);

/// D = K²/2.
double uncorrelated_diffusion(double K);

/// L ~ D/ħ_eff. Heuristic scale of the localized distribution.
double localization_length(const DimensionlessParams& params);

/// Earlier simplified amplitude J₂(K)/b, in the same momentum units as I₀.
double simplified_amplitude(double K, double b);

struct AnalyticPrediction {
  CurrentAmplitude max_current;
  RatchetTime ratchet_time;
  double localization_time = 0.0;
  double uncorrelated_diffusion = 0.0;
  double localization_length = 0.0;
  double phase = 0.0;       // (1-b)A - 2bρ_L, radians
  double plot_phase = 0.0;  // Φ
  double damping = 1.0;
};

AnalyticPrediction predict(const DimensionlessParams& params, double rho_L, double sigma_p);

}  // namespace kickrot::analytic
