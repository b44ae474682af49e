#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kickrot/fit.hpp"
#include "kickrot/params.hpp"
#include "kickrot/quantum.hpp"
#include "kickrot/stats.hpp"

namespace kickrot::experiments {

inline constexpr std::uint64_t kDefaultSeed = 20040601;

enum class Engine { Classical, Quantum, Analytic };
std::string to_string(Engine e);
/// Library and FFT backend versions, as recorded in run manifests.
nlohmann::json engine_versions();
Engine engine_from_string(const std::string& s);

/// Settings shared by every scenario. Zero counts mean "scenario default".
struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 0;
  std::size_t trajectories = 0;
  std::size_t samples = 0;
  long kicks = 0;
  double sigma_p = -1.0;  // < 0: scenario default
  Parity parity = Parity::EvenLong;
  std::ostream* log = nullptr;
};

struct FileRecord {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string scenario;
  nlohmann::json parameters;
  std::vector<std::uint64_t> seeds;
  nlohmann::json engines;
  double wall_seconds = 0.0;
  std::vector<FileRecord> files;
  bool complete = true;
  std::vector<std::string> notes;
  nlohmann::json summary;

  nlohmann::json to_json() const;
};

// ---------------------------------------------------------------------------

struct Fig2Point {
  double rho_L = 0.0;
  double rocking = 0.0;
  double plot_phase = 0.0;  // Φ wrapped to [-1, 1)
  double ratchet_phase = 0.0;
  double quantum = 0.0;
  double quantum_sem = 0.0;
  double analytic = 0.0;
};

struct Fig2Result {
  std::vector<Fig2Point> points;
  fit::Sinusoid fit;       // all points, ⟨ρ⟩ against Φ at period 2
  fit::Sinusoid fit_rest;  // ρ_L = 0 series only
  fit::Sinusoid fit_moving;
  double rest_frame_peak = 0.0;  // quantum ⟨ρ⟩ at Φ = 0.5, ρ_L = 0
  double rest_frame_peak_sem = 0.0;
  double analytic_amplitude = 0.0;
  RunManifest manifest;
};

struct Fig3Curve {
  double b = 0.0;
  std::vector<double> rho_L;
  std::vector<double> classical, classical_sem, analytic, quantum, quantum_sem;
  fit::Sinusoid fit_free;   // period free
  fit::Sinusoid fit_fixed;  // period π/b
  double zero_point = 0.0;  // classical at ρ_L = 0
  double zero_point_sem = 0.0;
};

struct Fig3Result {
  std::vector<Fig3Curve> curves;  // b = 1/32 then b = 1/16
  double amplitude_ratio = 0.0;   // I_amp(1/32) / I_amp(1/16)
  RunManifest manifest;
};

struct Fig4Result {
  DimensionlessParams params;
  double rho_L = 0.0;
  double sigma_p = 1.0;
  MomentumStats classical;
  quantum::QuantumResult quantum;
  std::vector<double> analytic;  // I(t), t = 1..kicks
  double ratchet_time = 0.0;
  double classical_onset = 0.0;  // first kick reaching (1 - 1/e) of the plateau
  double quantum_onset = 0.0;
  RunManifest manifest;
};

struct TailFit {
  fit::Line left, right;
  double cut = 0.0;  // distance from the mean where the fit starts
  std::size_t left_bins = 0, right_bins = 0;
};

struct Fig5Result {
  Histogram histogram;
  double mean = 0.0;
  double variance = 0.0;
  double endpoint_mean = 0.0;  // ⟨ρ - ρ_L⟩ at the final kick of the same run
  double mass = 0.0;
  std::size_t samples = 0;
  TailFit tails;
  RunManifest manifest;
};

/// Scenario description for `experiment custom`, read from JSON.
struct Scenario {
  std::string id = "custom";
  std::vector<Engine> engines{Engine::Analytic};
  std::vector<double> K{2.6}, b{0.0625}, A{0.0}, rho_L{0.0}, sigma_p{1.0};
  std::vector<long> kicks{120};
  double hbar_eff = 1.0;
  std::size_t trajectories = 100000;
  std::size_t samples = 256;
  int m_max = 0;
  std::uint64_t seed = kDefaultSeed;
  Parity parity = Parity::EvenLong;

  void validate() const;
  nlohmann::json to_json() const;
  static Scenario from_json(const nlohmann::json& j);
};

struct CustomResult {
  std::size_t points = 0;
  std::size_t failed = 0;
  RunManifest manifest;
};

Fig2Result run_fig2(const RunOptions& options);
Fig3Result run_fig3(const RunOptions& options, bool with_quantum = false);
Fig4Result run_fig4(const RunOptions& options, double hbar_eff = 0.25);
Fig5Result run_fig5(const RunOptions& options, double hbar_eff = 0.25);
CustomResult run_custom(const Scenario& scenario, const RunOptions& options);

// Helpers shared with tests.

/// Wraps Φ into [-1, 1).
double wrap_plot_phase(double phi);
/// First kick at which `curve` reaches (1 - 1/e) of its plateau (the mean of
/// the last `tail` entries). Returns the 1-based kick.
double saturation_onset(const std::vector<double>& curve, std::size_t tail = 20);
/// Log-linear fits of both tails of a histogram beyond `cut` from `center`,
/// using bins whose weight is at least floor_fraction of the peak.
TailFit fit_tails(const Histogram& histogram, double center, double cut, double floor_fraction = 1e-10);

}  // namespace kickrot::experiments
