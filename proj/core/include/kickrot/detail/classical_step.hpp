#pragma once

#include <cmath>

namespace kickrot::classical {

inline ClassicalState kick_map_step(ClassicalState s, long n, const DimensionlessParams& p, Parity parity) {
  const double rho = s.momentum + p.kick_strength * std::sin(s.angle) - rocking_sign(n) * p.rocking_amplitude;
  const double tau = flight_time(n, p.period_asymmetry, parity);
  return {reduce_angle(s.angle + rho * tau), rho};
}

}  // namespace kickrot::classical
