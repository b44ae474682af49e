#include "kickrot/quantum.hpp"

#include <fftw3.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <mutex>
#include <new>
#include <string>

#include "kickrot/constants.hpp"
#include "kickrot/rng.hpp"

namespace kickrot::quantum {

static_assert(sizeof(std::complex<double>) == sizeof(fftw_complex));

template <class T>
T* FftwAllocator<T>::allocate(std::size_t n) {
  void* p = fftw_malloc(n * sizeof(T));
  if (p == nullptr) throw std::bad_alloc();
  return static_cast<T*>(p);
}

template <class T>
void FftwAllocator<T>::deallocate(T* p, std::size_t) noexcept {
  fftw_free(p);
}

template struct FftwAllocator<std::complex<double>>;

namespace {

// Plans are created once per size and shared; fftw_execute_dft on distinct
// arrays is thread-safe, planning is not.
struct PlanPair {
  fftw_plan to_angle = nullptr;     // FFTW_BACKWARD: Σ c_r e^{+i r φ}
  fftw_plan to_momentum = nullptr;  // FFTW_FORWARD
  ~PlanPair() {
    if (to_angle) fftw_destroy_plan(to_angle);
    if (to_momentum) fftw_destroy_plan(to_momentum);
  }
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int n) {
  static std::map<int, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(plan_mutex());
  auto& slot = cache[n];
  if (!slot) {
    Amplitudes scratch(static_cast<std::size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    slot = std::make_unique<PlanPair>();
    // FFTW_ESTIMATE keeps the algorithm choice, and thus the rounding,
    // identical from run to run.
    slot->to_angle = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    slot->to_momentum = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  return *slot;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

int default_angle_grid(int m_max) {
  int n = 2;
  while (n < 4 * m_max) n *= 2;
  return n;
}

// ---------------------------------------------------------------------------
// QuantumLadderState

QuantumLadderState QuantumLadderState::plane_wave(double rho0, double hbar_eff, GridSpec grid) {
  if (!(hbar_eff > 0.0)) throw InvalidParameter("hbar_eff must satisfy hbar_eff > 0");
  if (!std::isfinite(rho0)) throw InvalidParameter("initial momentum must be finite");
  if (grid.m_max == 0) grid.m_max = hbar_eff >= 0.5 ? 512 : 2048;
  if (grid.m_max < 1) throw InvalidParameter("m_max must be >= 1");
  const int n_phi = grid.n_phi > 0 ? grid.n_phi : default_angle_grid(grid.m_max);
  if (!is_power_of_two(n_phi) || n_phi < 2 * grid.m_max + 1)
    throw InvalidParameter("n_phi must be a power of two with n_phi >= 2*m_max+1");

  QuantumLadderState s;
  s.hbar_ = hbar_eff;
  const double x = rho0 / hbar_eff;
  const double fl = std::floor(x);
  s.base_ref_ = static_cast<long>(fl);
  s.beta_ref_ = x - fl;
  if (s.beta_ref_ >= 1.0) {
    s.beta_ref_ = 0.0;
    ++s.base_ref_;
  }
  s.base_ = s.base_ref_;
  s.beta_ = s.beta_ref_;
  s.m_max_ = grid.m_max;
  s.amps_.assign(static_cast<std::size_t>(n_phi), {0.0, 0.0});
  s.amps_[0] = 1.0;
  return s;
}

long QuantumLadderState::relative_site(std::size_t slot) const {
  const long n = static_cast<long>(amps_.size());
  const long j = static_cast<long>(slot);
  return j < n / 2 ? j : j - n;
}

std::size_t QuantumLadderState::slot_of(long relative) const {
  const long n = static_cast<long>(amps_.size());
  return static_cast<std::size_t>(((relative % n) + n) % n);
}

double QuantumLadderState::momentum_of_slot(std::size_t slot) const {
  return hbar_ * (static_cast<double>(base_ + relative_site(slot)) + beta_);
}

double QuantumLadderState::population(long m) const {
  const long r = m - base_;
  const long n = static_cast<long>(amps_.size());
  if (r < -n / 2 || r >= n / 2) return 0.0;
  return std::norm(amps_[slot_of(r)]);
}

double QuantumLadderState::norm() const {
  double s = 0.0;
  for (const auto& c : amps_) s += std::norm(c);
  return s;
}

double QuantumLadderState::edge_population() const {
  double s = 0.0;
  for (std::size_t j = 0; j < amps_.size(); ++j)
    if (std::abs(relative_site(j)) >= m_max_) s += std::norm(amps_[j]);
  return s;
}

void QuantumLadderState::moments(double about, double& first, double& second) const {
  first = 0.0;
  second = 0.0;
  for (std::size_t j = 0; j < amps_.size(); ++j) {
    const double p = std::norm(amps_[j]);
    const double d = momentum_of_slot(j) - about;
    first += p * d;
    second += p * d * d;
  }
}

double QuantumLadderState::mean_momentum() const {
  double first, second;
  moments(0.0, first, second);
  return first;
}

void QuantumLadderState::rederive(double ladder_shift_per_count) {
  const double x = beta_ref_ + static_cast<double>(rock_count_) * ladder_shift_per_count;
  const double fl = std::floor(x);
  base_ = base_ref_ + static_cast<long>(fl);
  beta_ = x - fl;
  if (beta_ >= 1.0) {
    beta_ = 0.0;
    ++base_;
  }
}

void QuantumLadderState::translate(long rock_count_delta, double ladder_shift_per_count) {
  rock_count_ += rock_count_delta;
  rederive(ladder_shift_per_count);
}

void QuantumLadderState::grow() {
  const int old_n = static_cast<int>(amps_.size());
  const int new_m = 2 * m_max_;
  const int new_n = std::max(2 * old_n, default_angle_grid(new_m));
  Amplitudes bigger(static_cast<std::size_t>(new_n), {0.0, 0.0});
  for (std::size_t j = 0; j < amps_.size(); ++j) {
    const long r = relative_site(j);
    bigger[static_cast<std::size_t>(((r % new_n) + new_n) % new_n)] = amps_[j];
  }
  amps_ = std::move(bigger);
  m_max_ = new_m;
}

// ---------------------------------------------------------------------------
// FloquetPropagator

FloquetPropagator::FloquetPropagator(const DimensionlessParams& params, Parity parity)
    : params_(params), parity_(parity) {
  params_.validate_allow_free();
}

const Amplitudes& FloquetPropagator::kick_phases(int n_phi) {
  auto it = kick_phase_.find(n_phi);
  if (it != kick_phase_.end()) return it->second;
  Amplitudes phase(static_cast<std::size_t>(n_phi));
  const double k_over_hbar = params_.kick_strength / params_.hbar_eff;
  const double inv_n = 1.0 / n_phi;
  for (int j = 0; j < n_phi; ++j) {
    const double phi = constants::two_pi * j / n_phi;
    phase[static_cast<std::size_t>(j)] = std::polar(inv_n, -k_over_hbar * std::cos(phi));
  }
  return kick_phase_.emplace(n_phi, std::move(phase)).first->second;
}

void FloquetPropagator::kick(QuantumLadderState& state, long n) {
  if (params_.kick_strength != 0.0) {
    auto& amps = state.amplitudes();
    const int n_phi = state.n_phi();
    const auto& plans = plans_for(n_phi);
    auto* buf = reinterpret_cast<fftw_complex*>(amps.data());
    fftw_execute_dft(plans.to_angle, buf, buf);
    const auto& phase = kick_phases(n_phi);
    for (std::size_t j = 0; j < amps.size(); ++j) amps[j] *= phase[j];
    fftw_execute_dft(plans.to_momentum, buf, buf);
  }
  if (params_.rocking_amplitude != 0.0) {
    // Impulse -(-1)^n A: +A on odd kicks, -A on even kicks.
    state.translate((n % 2 != 0) ? 1 : -1, params_.rocking_amplitude / params_.hbar_eff);
  }
}

void FloquetPropagator::drift(QuantumLadderState& state, long n) {
  const double tau = flight_time(n, params_.period_asymmetry, parity_);
  const DriftKey key{state.n_phi(), state.base(), state.beta(), tau};

  const Amplitudes* phase = nullptr;
  for (const auto& e : drift_cache_)
    if (e.key == key) phase = &e.phase;
  if (phase == nullptr) {
    Amplitudes p(state.amplitudes().size());
    const double scale = -0.5 * params_.hbar_eff * tau;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double site = static_cast<double>(state.base() + state.relative_site(j)) + state.beta();
      p[j] = std::polar(1.0, std::fmod(scale * site * site, constants::two_pi));
    }
    if (drift_cache_.size() >= 2) drift_cache_.erase(drift_cache_.begin());
    drift_cache_.push_back({key, std::move(p)});
    phase = &drift_cache_.back().phase;
  }
  auto& amps = state.amplitudes();
  for (std::size_t j = 0; j < amps.size(); ++j) amps[j] *= (*phase)[j];
}

QuantumLadderState floquet_kick(QuantumLadderState state, long n, const DimensionlessParams& params) {
  FloquetPropagator prop(params);
  prop.kick(state, n);
  return state;
}

QuantumLadderState floquet_drift(QuantumLadderState state, long n, const DimensionlessParams& params,
                                 Parity parity) {
  FloquetPropagator prop(params, parity);
  prop.drift(state, n);
  return state;
}

// ---------------------------------------------------------------------------
// run_quantum

void QuantumRunSpec::validate() const {
  params.validate();
  if (!std::isfinite(rho_L)) throw InvalidParameter("rho_L must be finite");
  if (!(sigma_p >= 0.0) || !std::isfinite(sigma_p)) throw InvalidParameter("sigma_p must satisfy sigma_p >= 0");
  if (n_beta_samples < 1) throw InvalidParameter("n_beta_samples must be >= 1");
  if (n_kicks < 1) throw InvalidParameter("n_kicks must be >= 1");
  const GridSpec g = resolved_grid();
  if (g.m_max < 1) throw InvalidParameter("m_max must be >= 1");
  if (!is_power_of_two(g.n_phi) || g.n_phi < 2 * g.m_max + 1)
    throw InvalidParameter("n_phi must be a power of two with n_phi >= 2*m_max+1");
  if (!(edge_threshold > 0.0)) throw InvalidParameter("edge_threshold must be > 0");
  if (sampling == Sampling::Antithetic && n_beta_samples % 2 != 0)
    throw InvalidParameter("antithetic sampling needs an even n_beta_samples");
}

GridSpec QuantumRunSpec::resolved_grid() const {
  GridSpec g = grid;
  if (g.m_max == 0) g.m_max = params.hbar_eff >= 0.5 ? 512 : 2048;
  if (g.n_phi <= 0) g.n_phi = default_angle_grid(g.m_max);
  return g;
}

std::vector<double> sample_momenta(const QuantumRunSpec& spec, bool& antithetic) {
  const std::size_t n = spec.n_beta_samples;
  antithetic = spec.sampling == Sampling::Antithetic ||
               (spec.sampling == Sampling::Auto && spec.params.rocking_amplitude == 0.0 &&
                spec.rho_L == 0.0 && n % 2 == 0);
  const boost::math::normal_distribution<double> unit;
  std::vector<double> rho(n);
  if (antithetic) {
    const std::size_t pairs = n / 2;
    for (std::size_t k = 0; k < pairs; ++k) {
      RandomStream rng(spec.seed, k);
      const double u = (static_cast<double>(k) + rng.uniform_open()) / static_cast<double>(pairs);
      const double z = spec.sigma_p == 0.0 ? 0.0 : boost::math::quantile(unit, u);
      rho[2 * k] = spec.rho_L + spec.sigma_p * z;
      rho[2 * k + 1] = spec.rho_L - spec.sigma_p * z;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      RandomStream rng(spec.seed, i);
      const double u = (static_cast<double>(i) + rng.uniform_open()) / static_cast<double>(n);
      const double z = spec.sigma_p == 0.0 ? 0.0 : boost::math::quantile(unit, u);
      rho[i] = spec.rho_L + spec.sigma_p * z;
    }
  }
  return rho;
}

namespace {

struct SampleResult {
  std::vector<double> first;
  std::vector<double> second;
  Histogram histogram;
  std::vector<GridEvent> events;
  double max_norm_drift = 0.0;
};

}  // namespace

QuantumResult run_quantum(const QuantumRunSpec& spec) {
  spec.validate();
  const GridSpec grid = spec.resolved_grid();
  const std::size_t n = spec.n_beta_samples;
  const std::size_t kicks = static_cast<std::size_t>(spec.n_kicks);
  const double bin_width = spec.bin_width > 0.0 ? spec.bin_width : spec.params.hbar_eff;

  QuantumResult result;
  result.initial_momenta = sample_momenta(spec, result.antithetic);

  std::vector<SampleResult> samples(n);
  parallel_for(n, spec.workers, [&](std::size_t i) {
    auto& out = samples[i];
    out.first.resize(kicks);
    out.second.resize(kicks);
    FloquetPropagator prop(spec.params, spec.parity);
    auto state = QuantumLadderState::plane_wave(result.initial_momenta[i], spec.params.hbar_eff, grid);
    for (std::size_t k = 0; k < kicks; ++k) {
      const long kick = static_cast<long>(k) + 1;
      prop.kick(state, kick);
      prop.drift(state, kick);
      while (state.edge_population() > spec.edge_threshold) {
        const int old_m = state.m_max();
        state.grow();
        out.events.push_back({i, kick, old_m, state.m_max()});
      }
      state.moments(spec.rho_L, out.first[k], out.second[k]);
      out.max_norm_drift = std::max(out.max_norm_drift, std::abs(state.norm() - 1.0));
    }
    out.histogram = Histogram(spec.rho_L, bin_width);
    const auto& amps = state.amplitudes();
    for (std::size_t j = 0; j < amps.size(); ++j) {
      const double p = std::norm(amps[j]);
      if (p > 0.0) out.histogram.add(state.momentum_of_slot(j), p);
    }
  });

  auto& stats = result.stats;
  stats.samples = n;
  stats.rho_L = spec.rho_L;
  stats.series.resize(kicks);
  stats.histogram = Histogram(spec.rho_L, bin_width);

  // Antithetic pairs are correlated; the standard error is taken over pair means.
  const std::size_t units = result.antithetic ? n / 2 : n;
  const std::size_t per_unit = result.antithetic ? 2 : 1;
  std::vector<double> buf(n), unit_mean(units), unit_sq(units);
  const double count = static_cast<double>(n);
  for (std::size_t k = 0; k < kicks; ++k) {
    for (std::size_t i = 0; i < n; ++i) buf[i] = samples[i].first[k];
    const double mean = pairwise_sum(buf) / count;
    for (std::size_t u = 0; u < units; ++u) {
      double m = 0.0;
      for (std::size_t j = 0; j < per_unit; ++j) m += samples[u * per_unit + j].first[k];
      m /= static_cast<double>(per_unit);
      unit_mean[u] = m;
      unit_sq[u] = (m - mean) * (m - mean);
    }
    for (std::size_t i = 0; i < n; ++i) buf[i] = samples[i].second[k];
    const double second = pairwise_sum(buf) / count;

    const long kick = static_cast<long>(k) + 1;
    stats.series.mean_shift[k] = mean;
    stats.series.current[k] = mean - net_rocking_impulse(kick, spec.params.rocking_amplitude);
    stats.series.second_moment[k] = second;
    stats.series.variance[k] = std::max(0.0, second - mean * mean);
    stats.series.sem[k] =
        units > 1 ? std::sqrt(pairwise_sum(unit_sq) / static_cast<double>(units - 1) / static_cast<double>(units))
                  : 0.0;
  }
  for (const auto& s : samples) {
    stats.histogram.merge(s.histogram);
    result.grid_events.insert(result.grid_events.end(), s.events.begin(), s.events.end());
    result.max_norm_drift = std::max(result.max_norm_drift, s.max_norm_drift);
  }
  return result;
}

}  // namespace kickrot::quantum
