#pragma once

/// CODATA 2018 values. ħ follows from the exact SI value of h.
namespace kickrot::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double planck_h = 6.62607015e-34;                // J s (exact)
inline constexpr double hbar = 1.054571817646156e-34;             // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;     // kg
inline constexpr double cesium133_mass = 132.905451961 * atomic_mass_unit;  // kg
inline constexpr double cesium_d2_wavelength = 852.34727582e-9;   // m (vacuum)

}  // namespace kickrot::constants
