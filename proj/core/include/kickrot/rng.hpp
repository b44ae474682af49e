#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace kickrot {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
/// Pure function of (counter, key); no internal state.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter block(Counter ctr, Key key);
};

/// Independent random stream identified by (seed, stream). Streams with
/// different ids never share counter blocks, so a trajectory's draws do not
/// depend on how work is scheduled. Models UniformRandomBitGenerator.
class RandomStream {
public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  double uniform();       // [0, 1)
  double uniform_open();  // (0, 1)
  double normal();        // standard normal via Box-Muller

private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;  // 32-bit words consumed from buffer_
  double spare_normal_ = 0.0;
  bool has_spare_ = false;

  std::uint32_t next32();
};

}  // namespace kickrot
