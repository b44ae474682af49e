#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kickrot/params.hpp"
#include "kickrot/stats.hpp"

namespace kickrot::classical {

/// Phase-space point just before a kick. The angle is kept in [0, 2π).
struct ClassicalState {
  double angle = 0.0;
  double momentum = 0.0;
};

/// Exact range reduction of an angle into [0, 2π).
double reduce_angle(double phi);

/// One period of the kicked map, starting just before kick n:
///   ρ' = ρ + K sin φ - (-1)^n A
///   φ' = φ + ρ' τ_n   (mod 2π)
/// with τ_n ∈ {1+b, 1-b} chosen by `parity`.
inline ClassicalState kick_map_step(ClassicalState s, long n, const DimensionlessParams& p,
                                    Parity parity = Parity::EvenLong);

struct ClassicalEnsemble {
  std::vector<ClassicalState> states;
  long kick_index = 0;  // kicks applied so far
  std::uint64_t rng_seed = 0;
  DimensionlessParams params;
  double initial_mean = 0.0;   // ρ_L
  double initial_sigma = 0.0;  // σ_p
};

/// n trajectories with angles uniform on [0, 2π) and momenta drawn from
/// N(ρ_L, σ_p²). Trajectory i draws from its own stream (seed, i); σ_p = 0
/// gives every trajectory exactly ρ_L.
ClassicalEnsemble sample_initial(std::size_t n, double rho_L, double sigma_p, std::uint64_t seed,
                                 const DimensionlessParams& params = {});

struct EvolveOptions {
  Parity parity = Parity::EvenLong;
  unsigned workers = 0;         // 0: hardware concurrency
  double bin_width = 0.0;       // 0: one ladder unit, ħ_eff
  std::size_t block_size = 4096;  // fixed; results do not depend on workers
};

/// Applies n_kicks steps to every trajectory, recording statistics after each
/// kick. Results are bitwise identical for any worker count.
MomentumStats evolve_ensemble(ClassicalEnsemble& ensemble, long n_kicks, const EvolveOptions& options = {});

}  // namespace kickrot::classical

#include "kickrot/detail/classical_step.hpp"
