#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "kickrot/params.hpp"
#include "kickrot/stats.hpp"

namespace kickrot::quantum {

/// Allocator returning FFTW-aligned storage so amplitude arrays can be
/// transformed in place by shared plans.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}
  T* allocate(std::size_t n);
  void deallocate(T* p, std::size_t) noexcept;
  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using Amplitudes = std::vector<std::complex<double>, FftwAllocator<std::complex<double>>>;

struct GridSpec {
  int m_max = 0;    // declared ladder half-span; 0 picks 512 for hbar_eff >= 0.5, else 2048
  int n_phi = 0;    // angle grid; 0 selects the next power of two >= 4·m_max
};

int default_angle_grid(int m_max);

/// Wavefunction on the momentum ladder ρ = ħ_eff (m + β).
///
/// Amplitudes are stored in FFT order over n_phi slots; slot j holds the
/// relative site r = j for j < n_phi/2 and r = j - n_phi otherwise, at ladder
/// index base + r. The rocking impulse is tracked as an exact count of net
/// odd-minus-even kicks so the (base, β) pair cycles through identical values.
class QuantumLadderState {
public:
  QuantumLadderState() = default;

  /// Single plane wave at momentum rho0: base = floor(rho0/ħ), β the remainder.
  static QuantumLadderState plane_wave(double rho0, double hbar_eff, GridSpec grid = {});

  double hbar() const { return hbar_; }
  double beta() const { return beta_; }
  long base() const { return base_; }
  int m_max() const { return m_max_; }
  int n_phi() const { return static_cast<int>(amps_.size()); }
  long relative_site(std::size_t slot) const;
  std::size_t slot_of(long relative) const;
  double momentum_of_slot(std::size_t slot) const;

  Amplitudes& amplitudes() { return amps_; }
  const Amplitudes& amplitudes() const { return amps_; }

  /// Population of ladder index m (0 if outside the grid).
  double population(long m) const;
  double norm() const;
  /// Population on relative sites with |r| >= m_max.
  double edge_population() const;
  double mean_momentum() const;
  /// ⟨(ρ - about)⟩ and ⟨(ρ - about)²⟩ in one pass.
  void moments(double about, double& first, double& second) const;

  /// Shift all momenta by `shift` ladder units (β and base re-derived).
  void translate(long rock_count_delta, double ladder_shift_per_count);
  /// Double m_max and re-embed amplitudes on the matching larger angle grid.
  void grow();

private:
  double hbar_ = 1.0;
  long base_ref_ = 0;
  double beta_ref_ = 0.0;
  long rock_count_ = 0;
  double beta_ = 0.0;
  long base_ = 0;
  int m_max_ = 0;
  Amplitudes amps_;

  void rederive(double ladder_shift_per_count);
};

/// Applies Floquet kick and drift operators. Holds per-grid caches (kick
/// phases, drift phases); instances are cheap and not thread-safe, so use one
/// per thread.
class FloquetPropagator {
public:
  FloquetPropagator(const DimensionlessParams& params, Parity parity = Parity::EvenLong);

  /// exp(-i K cos φ / ħ) in the angle representation, then the exact momentum
  /// translation by -(-1)^n A.
  void kick(QuantumLadderState& state, long n);
  /// exp(-i ρ² τ_n / 2ħ) on every ladder site.
  void drift(QuantumLadderState& state, long n);

private:
  DimensionlessParams params_;
  Parity parity_;
  std::map<int, Amplitudes> kick_phase_;  // keyed by n_phi, includes 1/n_phi

  struct DriftKey {
    int n_phi;
    long base;
    double beta;
    double tau;
    bool operator==(const DriftKey&) const = default;
  };
  struct DriftEntry {
    DriftKey key;
    Amplitudes phase;
  };
  std::vector<DriftEntry> drift_cache_;  // at most two entries
  const Amplitudes& kick_phases(int n_phi);
};

/// One-shot operator forms (construct a propagator internally).
QuantumLadderState floquet_kick(QuantumLadderState state, long n, const DimensionlessParams& params);
QuantumLadderState floquet_drift(QuantumLadderState state, long n, const DimensionlessParams& params,
                                 Parity parity = Parity::EvenLong);

enum class Sampling { Auto, Antithetic, Stratified };

struct QuantumRunSpec {
  DimensionlessParams params;
  double rho_L = 0.0;
  double sigma_p = 1.0;
  std::size_t n_beta_samples = 256;
  long n_kicks = 120;
  GridSpec grid;  // m_max 0 selects 512 for ħ >= 0.5 and 2048 below
  std::uint64_t seed = 20040601;
  Parity parity = Parity::EvenLong;
  Sampling sampling = Sampling::Auto;
  unsigned workers = 0;
  double bin_width = 0.0;  // 0: ħ_eff
  double edge_threshold = 1e-8;

  void validate() const;
  GridSpec resolved_grid() const;
};

struct GridEvent {
  std::size_t sample = 0;
  long kick = 0;
  int old_m_max = 0;
  int new_m_max = 0;
};

struct QuantumResult {
  MomentumStats stats;
  std::vector<GridEvent> grid_events;
  double max_norm_drift = 0.0;
  bool antithetic = false;
  std::vector<double> initial_momenta;
};

/// Propagates n_beta_samples independent plane waves (momenta drawn from
/// N(ρ_L, σ_p²), stratified or in mirrored antithetic pairs) and aggregates
/// their momentum statistics with equal weight. Independent of worker count.
QuantumResult run_quantum(const QuantumRunSpec& spec);

/// Initial sample momenta used by run_quantum.
std::vector<double> sample_momenta(const QuantumRunSpec& spec, bool& antithetic);

}  // namespace kickrot::quantum
