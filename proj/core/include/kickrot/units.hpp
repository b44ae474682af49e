#pragma once

#include <string>
#include <vector>

#include "kickrot/params.hpp"

namespace kickrot::units {

/// Laboratory description of a pulsed, optionally moving and accelerating,
/// standing-wave lattice. SI units throughout.
struct LabParams {
  double atom_mass = 0.0;           // kg
  double wavelength = 0.0;          // m
  double recoil_freq = 0.0;         // rad/s, ω_R
  double pulse_period = 0.0;        // s, T
  double pulse_width = 0.0;         // s, t_p
  double lattice_depth = 0.0;       // J, V₀
  double freq_offset = 0.0;         // Hz, Δf (signed)
  double freq_mod_amplitude = 0.0;  // Hz, δf (signed)

  void validate() const;
};

/// Lab parameters of the cesium experiment: T = 9.47 μs, t_p = 296 ns,
/// ω_R = 2π × 2.1 kHz, λ = 852 nm. Offsets and depth are zero.
LabParams cesium_reference();

double lattice_wavevector(const LabParams& lab);  // k_L = 2π/λ

/// ħ_eff = 8 ω_R T.
double hbar_eff_from_lab(const LabParams& lab);

/// ρ_L = m λ² Δf ħ_eff / (4π ħ).
double rho_L_from_lab(const LabParams& lab, double hbar_eff);
/// Inverse of rho_L_from_lab: the Δf producing a given ρ_L.
double freq_offset_for_rho_L(const LabParams& lab, double hbar_eff, double rho_L);

/// A = 2π t_p δf.
double rocking_from_lab(const LabParams& lab);
double freq_mod_for_rocking(const LabParams& lab, double rocking);

/// ρ = 2 T k_L p / M, and its inverse.
double momentum_lab_to_scaled(double p, const LabParams& lab);
double momentum_scaled_to_lab(double rho, const LabParams& lab);

/// K = ħ_eff V₀ t_p / ħ for a square pulse of depth V₀ and width t_p.
double kick_strength_from_lab(const LabParams& lab);

struct Conversion {
  DimensionlessParams params;  // b is left at zero; it is a timing choice
  double rho_L = 0.0;
  double recoil_freq_expected = 0.0;  // ħ k_L² / 2M
  std::vector<std::string> warnings;
};

/// Full lab -> dimensionless conversion, with the ω_R ≈ ħk_L²/2M consistency
/// check reported as a warning when the two disagree by more than 1%.
Conversion convert(const LabParams& lab);

/// Parse a key = value lab file. '#' starts a comment; keys are the field
/// names of LabParams; numbers are SI. Missing keys default to the cesium
/// reference values. Throws InvalidParameter on unknown keys or bad numbers.
LabParams parse_lab_file(const std::string& text);
LabParams load_lab_file(const std::string& path);

}  // namespace kickrot::units
