#include "kickrot/experiments.hpp"

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "kickrot/analytic.hpp"
#include "kickrot/classical.hpp"
#include "kickrot/constants.hpp"
#include "kickrot/io.hpp"
#include "kickrot/rng.hpp"

namespace kickrot::experiments {

using constants::pi;
using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(Engine e) {
  switch (e) {
    case Engine::Classical: return "classical";
    case Engine::Quantum: return "quantum";
    case Engine::Analytic: return "analytic";
  }
  return "?";
}

Engine engine_from_string(const std::string& s) {
  if (s == "classical") return Engine::Classical;
  if (s == "quantum") return Engine::Quantum;
  if (s == "analytic") return Engine::Analytic;
  throw InvalidParameter("engine must be one of {classical, quantum, analytic} (got " + s + ")");
}

json engine_versions() { return {{"kickrot", "0.1.0"}, {"fftw", std::string(fftw_version)}}; }

json RunManifest::to_json() const {
  json files_json = json::array();
  for (const auto& f : files) files_json.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return {{"scenario", scenario},   {"parameters", parameters}, {"seeds", seeds},
          {"engines", engines},     {"wall_seconds", wall_seconds}, {"files", files_json},
          {"complete", complete},   {"notes", notes},           {"summary", summary}};
}

namespace {

using Clock = std::chrono::steady_clock;

// Independent per-run seed derived from the scenario seed and a run index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  RandomStream s(seed, 0xF00D0000ull + index);
  return s();
}

void say(const RunOptions& o, const std::string& msg) {
  if (o.log) *o.log << msg << std::endl;
}

/// Collects emitted files and writes the manifest last.
class OutputDir {
public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& text) {
    io::write_text_atomic(dir_ / name, text);
    files_.push_back({name, io::sha256_hex(text), text.size()});
  }
  const fs::path& path() const { return dir_; }
  fs::path operator/(const std::string& name) const { return dir_ / name; }

  void finish(RunManifest& manifest, Clock::time_point start) {
    manifest.files = files_;
    manifest.engines = engine_versions();
    manifest.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    io::write_text_atomic(dir_ / "manifest.json", manifest.to_json().dump(2) + "\n");
  }

private:
  fs::path dir_;
  std::vector<FileRecord> files_;
};

std::size_t or_default(std::size_t v, std::size_t def) { return v > 0 ? v : def; }
long or_default(long v, long def) { return v > 0 ? v : def; }
double sigma_or_default(double v, double def) { return v >= 0.0 ? v : def; }

json params_json(const DimensionlessParams& p) {
  return {{"K", p.kick_strength}, {"b", p.period_asymmetry}, {"A", p.rocking_amplitude}, {"hbar", p.hbar_eff}};
}

MomentumStats run_classical(const DimensionlessParams& params, double rho_L, double sigma_p, std::size_t n,
                            long kicks, std::uint64_t seed, const RunOptions& o) {
  auto ens = classical::sample_initial(n, rho_L, sigma_p, seed, params);
  classical::EvolveOptions eo;
  eo.parity = o.parity;
  eo.workers = o.workers;
  return classical::evolve_ensemble(ens, kicks, eo);
}

quantum::QuantumRunSpec quantum_spec(const DimensionlessParams& params, double rho_L, double sigma_p,
                                     std::size_t samples, long kicks, std::uint64_t seed, const RunOptions& o,
                                     int m_max = 0) {
  quantum::QuantumRunSpec spec;
  spec.params = params;
  spec.rho_L = rho_L;
  spec.sigma_p = sigma_p;
  spec.n_beta_samples = samples;
  spec.n_kicks = kicks;
  spec.seed = seed;
  spec.parity = o.parity;
  spec.workers = o.workers;
  spec.grid.m_max = m_max;
  return spec;
}

json grid_events_json(const std::vector<quantum::GridEvent>& events) {
  json out = json::array();
  for (const auto& e : events)
    out.push_back({{"sample", e.sample}, {"kick", e.kick}, {"old_m_max", e.old_m_max}, {"new_m_max", e.new_m_max}});
  return out;
}

json sinusoid_json(const fit::Sinusoid& s) {
  return {{"amplitude", s.amplitude}, {"phase", s.phase},         {"offset", s.offset},
          {"period", s.period()},     {"r_squared", s.r_squared}, {"sin_coef", s.sin_coef},
          {"cos_coef", s.cos_coef}};
}

}  // namespace

double wrap_plot_phase(double phi) {
  double w = std::fmod(phi + 1.0, 2.0);
  if (w < 0.0) w += 2.0;
  return w - 1.0;
}

double saturation_onset(const std::vector<double>& curve, std::size_t tail) {
  if (curve.empty()) return 0.0;
  tail = std::min(tail, curve.size());
  double plateau = 0.0;
  for (std::size_t i = curve.size() - tail; i < curve.size(); ++i) plateau += curve[i];
  plateau /= static_cast<double>(tail);
  const double target = (1.0 - std::exp(-1.0)) * plateau;
  for (std::size_t i = 0; i < curve.size(); ++i)
    if ((plateau >= 0.0 && curve[i] >= target) || (plateau < 0.0 && curve[i] <= target))
      return static_cast<double>(i + 1);
  return static_cast<double>(curve.size());
}

TailFit fit_tails(const Histogram& histogram, double center, double cut, double floor_fraction) {
  double peak = 0.0;
  for (const auto& [k, bin] : histogram.bins()) peak = std::max(peak, bin.weight);
  std::vector<double> lx, ly, rx, ry;
  for (const auto& [k, bin] : histogram.bins()) {
    if (bin.weight < floor_fraction * peak || bin.weight <= 0.0) continue;
    const double c = histogram.bin_center(k);
    if (c < center - cut) {
      lx.push_back(c);
      ly.push_back(std::log(bin.weight));
    } else if (c > center + cut) {
      rx.push_back(c);
      ry.push_back(std::log(bin.weight));
    }
  }
  TailFit t;
  t.cut = cut;
  t.left_bins = lx.size();
  t.right_bins = rx.size();
  if (lx.size() >= 3) t.left = fit::linear(lx, ly);
  if (rx.size() >= 3) t.right = fit::linear(rx, ry);
  return t;
}

// ---------------------------------------------------------------------------
// Fig. 2: ratchet current against the phase coordinate Φ

Fig2Result run_fig2(const RunOptions& o) {
  const auto start = Clock::now();
  OutputDir out(o.out_dir);
  Fig2Result res;

  const double K = 2.6, b = 1.0 / 16.0, hbar = 1.0;
  const double sigma_p = sigma_or_default(o.sigma_p, 1.0);
  const long kicks = or_default(o.kicks, 120L);
  const std::size_t samples = or_default(o.samples, std::size_t{512});
  const std::vector<double> rho_Ls{0.0, 8.0 * pi};
  std::vector<double> rockings;
  for (int i = -3; i <= 3; ++i) rockings.push_back(i * pi / 4.0);

  res.manifest.scenario = "fig2";
  res.manifest.parameters = {{"K", K},           {"b", b},           {"hbar", hbar},
                             {"sigma_p", sigma_p}, {"kicks", kicks},   {"samples", samples},
                             {"rho_L", rho_Ls},  {"A", rockings},    {"parity", std::string(to_string(o.parity))}};
  json events = json::object();

  std::uint64_t run = 0;
  for (double rho_L : rho_Ls) {
    for (double A : rockings) {
      const DimensionlessParams p{K, b, A, hbar};
      const auto seed = derive_seed(o.seed, run++);
      res.manifest.seeds.push_back(seed);
      say(o, "fig2: rho_L=" + io::format_number(rho_L) + " A=" + io::format_number(A));
      const auto q = quantum::run_quantum(quantum_spec(p, rho_L, sigma_p, samples, kicks, seed, o));
      if (!q.grid_events.empty()) events[std::to_string(run - 1)] = grid_events_json(q.grid_events);

      Fig2Point pt;
      pt.rho_L = rho_L;
      pt.rocking = A;
      pt.plot_phase = wrap_plot_phase(analytic::plot_phase(p, rho_L));
      pt.ratchet_phase = analytic::ratchet_phase(p, rho_L);
      pt.quantum = q.stats.series.current.back();
      pt.quantum_sem = q.stats.series.sem.back();
      pt.analytic = analytic::current(p, rho_L, kicks);
      res.points.push_back(pt);
    }
  }

  std::vector<double> x, y, xr, yr, xm, ym;
  for (const auto& pt : res.points) {
    x.push_back(pt.plot_phase);
    y.push_back(pt.quantum);
    (pt.rho_L == 0.0 ? xr : xm).push_back(pt.plot_phase);
    (pt.rho_L == 0.0 ? yr : ym).push_back(pt.quantum);
    if (pt.rho_L == 0.0 && std::abs(pt.plot_phase - 0.5) < 1e-9) {
      res.rest_frame_peak = pt.quantum;
      res.rest_frame_peak_sem = pt.quantum_sem;
    }
  }
  res.fit = fit::sinusoid_fixed(x, y, pi);
  res.fit_rest = fit::sinusoid_fixed(xr, yr, pi);
  res.fit_moving = fit::sinusoid_fixed(xm, ym, pi);
  res.analytic_amplitude = std::abs(analytic::max_current({K, b, 0.0, hbar}).value);

  auto series_table = [&](double rho_L) {
    io::CsvTable t;
    t.header = {"rho_L", "A", "Phi", "ratchet_phase", "quantum", "quantum_sem", "analytic", "fit"};
    std::vector<Fig2Point> pts;
    for (const auto& pt : res.points)
      if (pt.rho_L == rho_L) pts.push_back(pt);
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& c) { return a.plot_phase < c.plot_phase; });
    for (const auto& pt : pts)
      t.add_row({pt.rho_L, pt.rocking, pt.plot_phase, pt.ratchet_phase, pt.quantum, pt.quantum_sem, pt.analytic,
                 res.fit(pt.plot_phase)});
    return t;
  };
  out.write("fig2_rest.csv", io::to_csv(series_table(0.0), {"rho_L = 0; quantum <rho - rho_L> after the final kick"}));
  out.write("fig2_moving.csv", io::to_csv(series_table(8.0 * pi), {"rho_L = 8 pi"}));

  io::CsvTable curve;
  curve.header = {"Phi", "fit", "analytic"};
  const double F = analytic::time_factor({K, b, 0.0, hbar}, kicks);
  for (int i = 0; i <= 200; ++i) {
    const double phi = -1.0 + 2.0 * i / 200.0;
    curve.add_row({phi, res.fit(phi), res.analytic_amplitude * F * std::sin(pi * phi)});
  }
  out.write("fig2_fit.csv", io::to_csv(curve, {"fitted sinusoid (period 2 in Phi) and classical formula"}));

  io::PlotSpec plot;
  plot.title = "Ratchet current vs Phi (K=2.6, b=1/16, hbar=1)";
  plot.x_label = "Phi = (2 rho_L b - A)/pi";
  plot.y_label = "<rho>";
  plot.series = {
      {out / "fig2_rest.csv", "Phi", "quantum", "quantum_sem", "quantum, rho_L = 0", "#1f77b4", false, true},
      {out / "fig2_moving.csv", "Phi", "quantum", "quantum_sem", "quantum, rho_L = 8 pi", "#ff7f0e", false, true},
      {out / "fig2_fit.csv", "Phi", "fit", "", "sinusoid fit", "#2ca02c", true, false},
      {out / "fig2_fit.csv", "Phi", "analytic", "", "classical formula", "#d62728", true, false},
  };
  out.write("fig2.svg", io::render_svg(plot));

  res.manifest.notes.push_back("grid events keyed by run index: " + events.dump());
  res.manifest.summary = {{"fit", sinusoid_json(res.fit)},
                          {"fit_rest", sinusoid_json(res.fit_rest)},
                          {"fit_moving", sinusoid_json(res.fit_moving)},
                          {"rest_frame_peak", res.rest_frame_peak},
                          {"rest_frame_peak_sem", res.rest_frame_peak_sem},
                          {"analytic_amplitude", res.analytic_amplitude}};
  out.finish(res.manifest, start);
  return res;
}

// ---------------------------------------------------------------------------
// Fig. 3: asymmetry against starting momentum for two values of b

Fig3Result run_fig3(const RunOptions& o, bool with_quantum) {
  const auto start = Clock::now();
  OutputDir out(o.out_dir);
  Fig3Result res;

  const double K = 3.3, hbar = 1.0;
  const double sigma_p = sigma_or_default(o.sigma_p, 1.0);
  const long kicks = or_default(o.kicks, 120L);
  const std::size_t trajectories = or_default(o.trajectories, std::size_t{100000});
  const std::size_t samples = or_default(o.samples, std::size_t{256});
  constexpr int kPoints = 25;

  res.manifest.scenario = "fig3";
  res.manifest.parameters = {{"K", K},         {"hbar", hbar},           {"A", 0.0},
                             {"sigma_p", sigma_p}, {"kicks", kicks},     {"trajectories", trajectories},
                             {"b", {1.0 / 32.0, 1.0 / 16.0}}, {"points_per_curve", kPoints},
                             {"span_periods", 1.5}, {"parity", std::string(to_string(o.parity))},
                             {"quantum", with_quantum}, {"samples", with_quantum ? samples : 0}};

  std::uint64_t run = 0;
  io::PlotSpec plot;
  plot.title = "Asymmetry vs rho_L (K=3.3, A=0)";
  plot.x_label = "rho_L";
  plot.y_label = "<rho - rho_L>";
  const char* colors[] = {"#1f77b4", "#ff7f0e"};

  for (double b : {1.0 / 32.0, 1.0 / 16.0}) {
    Fig3Curve c;
    c.b = b;
    const double period = pi / b;
    const DimensionlessParams p{K, b, 0.0, hbar};
    for (int i = 0; i < kPoints; ++i) {
      const double rho_L = -0.75 * period + 1.5 * period * i / (kPoints - 1);
      c.rho_L.push_back(rho_L);
      const auto seed = derive_seed(o.seed, run++);
      res.manifest.seeds.push_back(seed);
      say(o, "fig3: b=" + io::format_number(b) + " rho_L=" + io::format_number(rho_L));
      const auto cl = run_classical(p, rho_L, sigma_p, trajectories, kicks, seed, o);
      c.classical.push_back(cl.series.current.back());
      c.classical_sem.push_back(cl.series.sem.back());
      c.analytic.push_back(analytic::current(p, rho_L, kicks));
      if (with_quantum) {
        const auto q = quantum::run_quantum(quantum_spec(p, rho_L, sigma_p, samples, kicks, seed, o));
        c.quantum.push_back(q.stats.series.current.back());
        c.quantum_sem.push_back(q.stats.series.sem.back());
      }
      if (i == kPoints / 2) {
        c.zero_point = c.classical.back();
        c.zero_point_sem = c.classical_sem.back();
      }
    }
    c.fit_free = fit::sinusoid_free_period(c.rho_L, c.classical, 0.5 * period, 1.5 * period);
    c.fit_fixed = fit::sinusoid_fixed(c.rho_L, c.classical, 2.0 * b);

    io::CsvTable t;
    t.header = {"rho_L", "classical", "classical_sem", "analytic", "fit"};
    if (with_quantum) {
      t.header.push_back("quantum");
      t.header.push_back("quantum_sem");
    }
    for (std::size_t i = 0; i < c.rho_L.size(); ++i) {
      std::vector<double> row{c.rho_L[i], c.classical[i], c.classical_sem[i], c.analytic[i],
                              c.fit_fixed(c.rho_L[i])};
      if (with_quantum) {
        row.push_back(c.quantum[i]);
        row.push_back(c.quantum_sem[i]);
      }
      t.add_row(std::move(row));
    }
    const std::string name = b < 0.05 ? "fig3_b32.csv" : "fig3_b16.csv";
    out.write(name, io::to_csv(t, {"b = " + io::format_number(b) + "; classical ensemble after the final kick"}));
    const char* color = colors[res.curves.size()];
    const std::string tag = b < 0.05 ? "b = 1/32" : "b = 1/16";
    plot.series.push_back({out / name, "rho_L", "classical", "classical_sem", "classical, " + tag, color, false, true});
    plot.series.push_back({out / name, "rho_L", "fit", "", "fit, " + tag, color, true, false});
    res.curves.push_back(std::move(c));
  }
  out.write("fig3.svg", io::render_svg(plot));

  res.amplitude_ratio = res.curves[0].fit_fixed.amplitude / res.curves[1].fit_fixed.amplitude;
  json curves = json::array();
  for (const auto& c : res.curves)
    curves.push_back({{"b", c.b},
                      {"fit_free", sinusoid_json(c.fit_free)},
                      {"fit_fixed", sinusoid_json(c.fit_fixed)},
                      {"zero_point", c.zero_point},
                      {"zero_point_sem", c.zero_point_sem}});
  res.manifest.summary = {{"curves", curves}, {"amplitude_ratio", res.amplitude_ratio}};
  out.finish(res.manifest, start);
  return res;
}

// ---------------------------------------------------------------------------
// Fig. 4 / Fig. 5: time dependence and the localized distribution

namespace {

struct Fig4Setup {
  DimensionlessParams params;
  double rho_L = 0.0;
  double sigma_p = 1.0;
  long kicks = 120;
  std::size_t trajectories = 1000000;
  std::size_t samples = 512;
  std::uint64_t classical_seed = 0;
  std::uint64_t quantum_seed = 0;
};

Fig4Setup fig4_setup(const RunOptions& o, double hbar_eff) {
  Fig4Setup s;
  // Φ = 0.5 in the lattice rest frame: A = -π/2, ρ_L = 0.
  s.params = {2.1, 1.0 / 8.0, -pi / 2.0, hbar_eff};
  s.params.validate();
  s.sigma_p = sigma_or_default(o.sigma_p, 1.0);
  s.kicks = or_default(o.kicks, 120L);
  s.trajectories = or_default(o.trajectories, std::size_t{1000000});
  s.samples = or_default(o.samples, std::size_t{512});
  s.classical_seed = derive_seed(o.seed, 0);
  s.quantum_seed = derive_seed(o.seed, 1);
  return s;
}

json fig4_parameters(const Fig4Setup& s, const RunOptions& o) {
  return {{"params", params_json(s.params)},
          {"rho_L", s.rho_L},
          {"Phi", analytic::plot_phase(s.params, s.rho_L)},
          {"sigma_p", s.sigma_p},
          {"kicks", s.kicks},
          {"trajectories", s.trajectories},
          {"samples", s.samples},
          {"parity", std::string(to_string(o.parity))}};
}

const char* kHbarNote =
    "fig4 runs at hbar_eff = 1/4 by default; hbar_eff = 1.4 is the other value quoted for this setup. "
    "Pass --hbar to rerun at another value.";

}  // namespace

Fig4Result run_fig4(const RunOptions& o, double hbar_eff) {
  const auto start = Clock::now();
  OutputDir out(o.out_dir);
  const auto s = fig4_setup(o, hbar_eff);
  Fig4Result res;
  res.params = s.params;
  res.rho_L = s.rho_L;
  res.sigma_p = s.sigma_p;

  say(o, "fig4: classical ensemble");
  res.classical = run_classical(s.params, s.rho_L, s.sigma_p, s.trajectories, s.kicks, s.classical_seed, o);
  say(o, "fig4: quantum samples");
  res.quantum = quantum::run_quantum(quantum_spec(s.params, s.rho_L, s.sigma_p, s.samples, s.kicks, s.quantum_seed, o));
  for (long t = 1; t <= s.kicks; ++t) res.analytic.push_back(analytic::current(s.params, s.rho_L, t));
  res.ratchet_time = analytic::ratchet_time(s.params).kicks;
  res.classical_onset = saturation_onset(res.classical.series.current);
  res.quantum_onset = saturation_onset(res.quantum.stats.series.current);

  io::CsvTable t;
  t.header = {"kick", "classical", "classical_sem", "quantum", "quantum_sem", "analytic"};
  for (long k = 0; k < s.kicks; ++k) {
    const auto i = static_cast<std::size_t>(k);
    t.add_row({static_cast<double>(k + 1), res.classical.series.current[i], res.classical.series.sem[i],
               res.quantum.stats.series.current[i], res.quantum.stats.series.sem[i], res.analytic[i]});
  }
  out.write("fig4.csv", io::to_csv(t, {"current = <rho - rho_L> minus the net rocking impulse"}));

  io::PlotSpec plot;
  plot.title = "Time dependence of the asymmetry (K=2.1, b=1/8, hbar=" + io::format_number(hbar_eff) + ")";
  plot.x_label = "kick";
  plot.y_label = "<rho - rho_L>";
  plot.series = {{out / "fig4.csv", "kick", "classical", "", "classical ensemble", "#1f77b4", true, false},
                 {out / "fig4.csv", "kick", "quantum", "", "quantum", "#ff7f0e", true, false},
                 {out / "fig4.csv", "kick", "analytic", "", "closed form I(t)", "#2ca02c", true, false}};
  out.write("fig4.svg", io::render_svg(plot));

  res.manifest.scenario = "fig4";
  res.manifest.parameters = fig4_parameters(s, o);
  res.manifest.seeds = {s.classical_seed, s.quantum_seed};
  res.manifest.notes.push_back(kHbarNote);
  res.manifest.notes.push_back("quantum grid events: " + grid_events_json(res.quantum.grid_events).dump());
  res.manifest.summary = {{"ratchet_time", res.ratchet_time},
                          {"classical_onset", res.classical_onset},
                          {"quantum_onset", res.quantum_onset},
                          {"classical_final", res.classical.series.current.back()},
                          {"quantum_final", res.quantum.stats.series.current.back()},
                          {"analytic_final", res.analytic.back()},
                          {"max_norm_drift", res.quantum.max_norm_drift}};
  out.finish(res.manifest, start);
  return res;
}

Fig5Result run_fig5(const RunOptions& o, double hbar_eff) {
  const auto start = Clock::now();
  OutputDir out(o.out_dir);
  const auto s = fig4_setup(o, hbar_eff);
  Fig5Result res;

  say(o, "fig5: quantum samples (Fig. 4 run)");
  const auto q =
      quantum::run_quantum(quantum_spec(s.params, s.rho_L, s.sigma_p, s.samples, s.kicks, s.quantum_seed, o));
  res.histogram = q.stats.histogram;
  res.mass = res.histogram.mass();
  res.samples = q.stats.samples;
  res.mean = res.histogram.mean() - s.rho_L;
  res.endpoint_mean = q.stats.series.mean_shift.back();
  res.variance = q.stats.series.variance.back();
  res.tails = fit_tails(res.histogram, s.rho_L + res.mean, analytic::localization_length(s.params));

  io::CsvTable t;
  t.header = {"center", "weight", "density"};
  const double norm = res.mass * res.histogram.width();
  for (const auto& [k, bin] : res.histogram.bins())
    t.add_row({res.histogram.bin_center(k), bin.weight, bin.weight / norm});
  out.write("fig5.csv", io::to_csv(t, {"final quantum N(rho), bin width hbar_eff; weights sum to the sample count"}));

  io::PlotSpec plot;
  plot.title = "Momentum distribution after localization (Fig. 4 parameters)";
  plot.x_label = "rho";
  plot.y_label = "N(rho)";
  plot.log_y = true;
  plot.series = {{out / "fig5.csv", "center", "density", "", "quantum", "#1f77b4", true, false}};
  out.write("fig5.svg", io::render_svg(plot));

  res.manifest.scenario = "fig5";
  res.manifest.parameters = fig4_parameters(s, o);
  res.manifest.seeds = {s.quantum_seed};
  res.manifest.notes.push_back(kHbarNote);
  res.manifest.summary = {{"mean", res.mean},
                          {"endpoint_mean", res.endpoint_mean},
                          {"variance", res.variance},
                          {"mass", res.mass},
                          {"samples", res.samples},
                          {"tail_cut", res.tails.cut},
                          {"left_slope", res.tails.left.slope},
                          {"left_r_squared", res.tails.left.r_squared},
                          {"right_slope", res.tails.right.slope},
                          {"right_r_squared", res.tails.right.r_squared}};
  out.finish(res.manifest, start);
  return res;
}

// ---------------------------------------------------------------------------
// Custom sweeps

void Scenario::validate() const {
  if (engines.empty()) throw InvalidParameter("scenario needs at least one engine");
  if (K.empty() || b.empty() || A.empty() || rho_L.empty() || sigma_p.empty() || kicks.empty())
    throw InvalidParameter("scenario parameter grid must be non-empty");
  for (double k : K)
    for (double bb : b)
      for (double a : A) DimensionlessParams{k, bb, a, hbar_eff}.validate();
  for (double s : sigma_p)
    if (!(s >= 0.0)) throw InvalidParameter("sigma_p must satisfy sigma_p >= 0");
  for (long t : kicks)
    if (t < 1) throw InvalidParameter("kicks must be >= 1");
  if (trajectories < 1 || samples < 1) throw InvalidParameter("trajectories and samples must be >= 1");
}

json Scenario::to_json() const {
  std::vector<std::string> eng;
  for (auto e : engines) eng.push_back(experiments::to_string(e));
  return {{"id", id},
          {"engines", eng},
          {"grid", {{"K", K}, {"b", b}, {"A", A}, {"rho_L", rho_L}, {"sigma_p", sigma_p}, {"kicks", kicks}}},
          {"hbar", hbar_eff},
          {"trajectories", trajectories},
          {"samples", samples},
          {"m_max", m_max},
          {"seed", seed},
          {"parity", std::string(kickrot::to_string(parity))}};
}

Scenario Scenario::from_json(const json& j) {
  Scenario s;
  try {
    s.id = j.value("id", s.id);
    if (j.contains("engines")) {
      s.engines.clear();
      for (const auto& e : j.at("engines")) s.engines.push_back(engine_from_string(e.get<std::string>()));
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      s.K = g.value("K", s.K);
      s.b = g.value("b", s.b);
      s.A = g.value("A", s.A);
      s.rho_L = g.value("rho_L", s.rho_L);
      s.sigma_p = g.value("sigma_p", s.sigma_p);
      s.kicks = g.value("kicks", s.kicks);
    }
    s.hbar_eff = j.value("hbar", s.hbar_eff);
    s.trajectories = j.value("trajectories", s.trajectories);
    s.samples = j.value("samples", s.samples);
    s.m_max = j.value("m_max", s.m_max);
    s.seed = j.value("seed", s.seed);
    if (j.contains("parity")) s.parity = parity_from_string(j.at("parity").get<std::string>());
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("scenario JSON: ") + e.what());
  }
  return s;
}

CustomResult run_custom(const Scenario& scenario, const RunOptions& o) {
  scenario.validate();
  const auto start = Clock::now();
  OutputDir out(o.out_dir);
  CustomResult res;
  res.manifest.scenario = scenario.id;
  res.manifest.parameters = scenario.to_json();

  RunOptions opts = o;
  opts.parity = scenario.parity;

  io::CsvTable summary;
  summary.header = {"point", "K", "b", "A", "rho_L", "sigma_p", "kicks", "classical", "classical_sem",
                    "quantum", "quantum_sem", "analytic", "ok"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::size_t point = 0;
  for (double K : scenario.K)
    for (double b : scenario.b)
      for (double A : scenario.A)
        for (double rho_L : scenario.rho_L)
          for (double sigma_p : scenario.sigma_p)
            for (long kicks : scenario.kicks) {
              const DimensionlessParams p{K, b, A, scenario.hbar_eff};
              const auto seed = derive_seed(scenario.seed, point);
              res.manifest.seeds.push_back(seed);
              std::vector<double> row{static_cast<double>(point), K, b, A, rho_L, sigma_p,
                                      static_cast<double>(kicks), nan, nan, nan, nan, nan, 1.0};
              say(o, "custom: point " + std::to_string(point));
              try {
                for (auto engine : scenario.engines) {
                  const std::string prefix = "point" + std::to_string(point) + "_" + to_string(engine);
                  if (engine == Engine::Classical) {
                    const auto st = run_classical(p, rho_L, sigma_p, scenario.trajectories, kicks, seed, opts);
                    row[7] = st.series.current.back();
                    row[8] = st.series.sem.back();
                    out.write(prefix + "_stats.csv", io::to_csv(io::stats_table(st)));
                    out.write(prefix + "_histogram.csv", io::to_csv(io::histogram_table(st.histogram)));
                  } else if (engine == Engine::Quantum) {
                    const auto q = quantum::run_quantum(
                        quantum_spec(p, rho_L, sigma_p, scenario.samples, kicks, seed, opts, scenario.m_max));
                    row[9] = q.stats.series.current.back();
                    row[10] = q.stats.series.sem.back();
                    out.write(prefix + "_stats.csv", io::to_csv(io::stats_table(q.stats)));
                    out.write(prefix + "_histogram.csv", io::to_csv(io::histogram_table(q.stats.histogram)));
                  } else {
                    io::CsvTable t;
                    t.header = {"kick", "F", "I"};
                    for (long k = 1; k <= kicks; ++k)
                      t.add_row({static_cast<double>(k), analytic::time_factor(p, k), analytic::current(p, rho_L, k)});
                    row[11] = analytic::current(p, rho_L, kicks);
                    out.write(prefix + ".csv", io::to_csv(t));
                  }
                }
              } catch (const std::exception& e) {
                row[12] = 0.0;
                ++res.failed;
                res.manifest.complete = false;
                res.manifest.notes.push_back("point " + std::to_string(point) + " failed: " + e.what());
              }
              summary.add_row(std::move(row));
              ++point;
            }
  res.points = point;
  out.write("summary.csv", io::to_csv(summary));
  res.manifest.summary = {{"points", res.points}, {"failed", res.failed}};
  out.finish(res.manifest, start);
  return res;
}

}  // namespace kickrot::experiments
