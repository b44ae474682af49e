#pragma once

// Tiny property-test driver: a seeded generator plus a loop that reports the
// failing case index through doctest's CAPTURE.

#include <cstdint>
#include <random>

namespace prop {

class Gen {
public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(eng_); }
  bool coin() { return integer(0, 1) == 1; }

private:
  std::mt19937_64 eng_;
};

template <class Fn>
void for_all(int cases, std::uint64_t seed, Fn&& fn) {
  Gen g(seed);
  for (int i = 0; i < cases; ++i) fn(g, i);
}

}  // namespace prop
