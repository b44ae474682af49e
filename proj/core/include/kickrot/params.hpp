#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kickrot {

/// Raised when a parameter violates a module invariant. The message is a
/// single line naming the violated constraint.
class InvalidParameter : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Which half of the two-period cycle is long. The state is defined just
/// before kick n; after the kick the particle flies freely for τ_n.
///   EvenLong: τ_n = 1 - b for odd n, 1 + b for even n.
///   OddLong:  τ_n = 1 + b for odd n, 1 - b for even n.
enum class Parity { EvenLong, OddLong };

std::string_view to_string(Parity p);
Parity parity_from_string(std::string_view s);

/// Free-flight duration (in units of the mean period) following kick n.
constexpr double flight_time(long n, double b, Parity parity) {
  const bool odd = (n % 2) != 0;
  const bool long_half = (parity == Parity::OddLong) ? odd : !odd;
  return long_half ? 1.0 + b : 1.0 - b;
}

/// Sign of the alternating rocking potential, (-1)^n.
constexpr double rocking_sign(long n) { return (n % 2 != 0) ? -1.0 : 1.0; }

/// Dimensionless knobs of the kicked Hamiltonian
///   H = ρ²/2 + Σ_n [K cos φ + A (-1)^n φ] δ(τ - n)
/// with free-flight periods alternating (1 ± b).
struct DimensionlessParams {
  double kick_strength = 2.6;      // K
  double period_asymmetry = 0.0;   // b
  double rocking_amplitude = 0.0;  // A
  double hbar_eff = 1.0;

  /// Throws InvalidParameter unless K > 0, 0 <= b < 1, ħ_eff > 0 and A finite.
  void validate() const;
  /// Same as validate() but permits K = 0 (free motion), used by propagator tests.
  void validate_allow_free() const;
};

/// Net momentum impulse delivered by the rocking term through kick n
/// inclusive: Σ_{k=1..n} -(-1)^k A. Equals A after odd kicks, 0 after even.
constexpr double net_rocking_impulse(long n, double A) {
  return (n % 2 != 0) ? A : 0.0;
}

}  // namespace kickrot
