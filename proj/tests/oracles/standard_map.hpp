#pragma once

// Chirikov standard map, written out independently of the library.

#include <cmath>

namespace oracle {

struct StdMapPoint {
  double x;
  double p;
};

inline StdMapPoint standard_map_step(StdMapPoint s, double K) {
  const double two_pi = 6.283185307179586;
  const double p = s.p + K * std::sin(s.x);
  double x = std::fmod(s.x + p, two_pi);
  if (x < 0) x += two_pi;
  return {x, p};
}

}  // namespace oracle
