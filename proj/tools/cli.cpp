#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "kickrot/analytic.hpp"
#include "kickrot/classical.hpp"
#include "kickrot/experiments.hpp"
#include "kickrot/io.hpp"
#include "kickrot/quantum.hpp"
#include "kickrot/units.hpp"

namespace kickrot::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;
namespace ex = experiments;

/// JSON config files for CLI11: one object per (sub)command, flag long names
/// as keys. Emits only parsed subcommands so a dump reloads cleanly.
class JsonConfig : public CLI::Config {
public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return to_json(app, default_also).dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

private:
  // Numbers are written as JSON numbers, everything else as strings.
  static json value(const std::string& s) {
    const json parsed = json::parse(s, nullptr, false);
    return parsed.is_number() ? parsed : json(s);
  }

  static json to_json(const CLI::App* app, bool default_also) {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames()[0];
      if (opt->get_type_size() == 0) {
        if (opt->count() > 0 || default_also) j[name] = opt->count() > 0;
        continue;
      }
      if (opt->count() > 0) {
        if (opt->results().size() == 1) {
          j[name] = value(opt->results()[0]);
        } else {
          json arr = json::array();
          for (const auto& r : opt->results()) arr.push_back(value(r));
          j[name] = arr;
        }
        continue;
      }
      if (!default_also || opt->get_default_str().empty()) continue;
      bool excluded = false;
      for (const CLI::Option* other : opt->get_excludes()) excluded = excluded || other->count() > 0;
      if (!excluded) j[name] = value(opt->get_default_str());
    }
    for (const CLI::App* sub : app->get_subcommands({}))
      if (sub->parsed()) j[sub->get_name()] = to_json(sub, default_also);
    return j;
  }

  static void collect(const json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& items) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        auto sub = parents;
        sub.push_back(it.key());
        collect(*it, sub, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      auto scalar = [](const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
        if (v.is_number()) return v.dump();
        throw CLI::ConversionError("config values must be scalars or arrays of scalars");
      };
      if (it->is_array())
        for (const auto& v : *it) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(*it));
      items.push_back(std::move(item));
    }
  }
};

struct Global {
  std::string out = "out";
  std::uint64_t seed = ex::kDefaultSeed;
  unsigned workers = 0;
  std::string parity = "even-long";
  bool verbose = false;
  bool dump_config = false;
};

struct Physics {
  double K = 2.6;
  double b = 0.0625;
  double A = 0.0;
  double hbar = 1.0;
  double rho_L = 0.0;
  double sigma_p = 1.0;
  std::string lab;
};

void add_physics(CLI::App* app, Physics& p) {
  auto* K = app->add_option("--K", p.K, "Kick strength K");
  app->add_option("--b", p.b, "Period asymmetry b, 0 <= b < 1");
  auto* A = app->add_option("--A", p.A, "Rocking amplitude A");
  auto* hbar = app->add_option("--hbar", p.hbar, "Effective Planck constant");
  auto* rho = app->add_option("--rho-L", p.rho_L, "Lattice-frame starting momentum rho_L");
  app->add_option("--sigma-p", p.sigma_p, "Initial momentum width sigma_p");
  app->add_option("--lab", p.lab, "Lab parameter file (key = value, SI); sets K, A, hbar and rho_L")
      ->check(CLI::ExistingFile)
      ->excludes(K)
      ->excludes(A)
      ->excludes(hbar)
      ->excludes(rho);
}

struct Resolved {
  DimensionlessParams params;
  double rho_L = 0.0;
  double sigma_p = 1.0;
};

Resolved resolve(const Physics& p, std::ostream& err) {
  Resolved r;
  if (!p.lab.empty()) {
    const auto conv = units::convert(units::load_lab_file(p.lab));
    for (const auto& w : conv.warnings) err << "kickrot: warning: " << w << "\n";
    r.params = conv.params;
    r.params.period_asymmetry = p.b;
    r.rho_L = conv.rho_L;
  } else {
    r.params = {p.K, p.b, p.A, p.hbar};
    r.rho_L = p.rho_L;
  }
  r.params.validate();
  if (!std::isfinite(r.rho_L)) throw InvalidParameter("rho_L must be finite");
  if (!(p.sigma_p >= 0.0) || !std::isfinite(p.sigma_p))
    throw InvalidParameter("sigma_p must satisfy sigma_p >= 0 (got " + io::format_number(p.sigma_p) + ")");
  r.sigma_p = p.sigma_p;
  return r;
}

json params_json(const Resolved& r) {
  return {{"K", r.params.kick_strength}, {"b", r.params.period_asymmetry}, {"A", r.params.rocking_amplitude},
          {"hbar", r.params.hbar_eff},   {"rho_L", r.rho_L},                {"sigma_p", r.sigma_p}};
}

void write_run(const fs::path& dir, const std::string& engine, const MomentumStats& stats, json parameters,
               std::vector<std::uint64_t> seeds, json extra_notes, double wall, std::ostream& out) {
  fs::create_directories(dir);
  ex::RunManifest m;
  m.scenario = engine;
  m.parameters = std::move(parameters);
  m.seeds = std::move(seeds);
  m.engines = ex::engine_versions();
  for (const auto& [name, text] : {std::pair{engine + "_stats.csv", io::to_csv(io::stats_table(stats))},
                                   std::pair{engine + "_histogram.csv", io::to_csv(io::histogram_table(stats.histogram))}}) {
    io::write_text_atomic(dir / name, text);
    m.files.push_back({name, io::sha256_hex(text), text.size()});
    out << (dir / name).string() << "\n";
  }
  m.wall_seconds = wall;
  m.summary = {{"final_current", stats.series.current.back()}, {"final_sem", stats.series.sem.back()},
               {"extra", std::move(extra_notes)}};
  io::write_text_atomic(dir / "manifest.json", m.to_json().dump(2) + "\n");
  out << (dir / "manifest.json").string() << "\n";
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulations of a two-period, rocked delta-kicked rotor ratchet", "kickrot"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  Global g;
  app.set_config("--config", "", "Read flags from a JSON config file");
  app.add_flag("--dump-config", g.dump_config, "Print the resolved flags as a JSON config and exit")
      ->configurable(false);
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--seed", g.seed, "Master random seed");
  app.add_option("--workers", g.workers, "Worker threads (0: hardware concurrency)");
  app.add_option("--parity", g.parity, "Which kick starts the long flight")
      ->check(CLI::IsMember({"even-long", "odd-long"}));
  app.add_flag("-v,--verbose", g.verbose, "Progress messages on stderr");

  // convert
  auto* convert = app.add_subcommand("convert", "Convert lab parameters to dimensionless ones (JSON on stdout)");
  std::string convert_lab;
  units::LabParams lab = units::cesium_reference();
  convert->add_option("--lab", convert_lab, "Lab parameter file")->check(CLI::ExistingFile);
  convert->add_option("--atom-mass", lab.atom_mass, "Atom mass [kg]");
  convert->add_option("--wavelength", lab.wavelength, "Lattice wavelength [m]");
  convert->add_option("--recoil-freq", lab.recoil_freq, "Recoil frequency omega_R [rad/s]");
  convert->add_option("--pulse-period", lab.pulse_period, "Mean pulse period T [s]");
  convert->add_option("--pulse-width", lab.pulse_width, "Pulse width t_p [s]");
  convert->add_option("--lattice-depth", lab.lattice_depth, "Lattice depth V0 [J]");
  convert->add_option("--freq-offset", lab.freq_offset, "Beam frequency offset [Hz]");
  convert->add_option("--freq-mod", lab.freq_mod_amplitude, "Frequency modulation amplitude [Hz]");
  for (auto* opt : convert->get_options())
    if (opt->get_lnames().size() == 1 && opt->get_lnames()[0] != "lab" && opt->get_lnames()[0] != "help")
      convert->get_option("--lab")->excludes(opt);

  // analytic
  auto* analytic_cmd = app.add_subcommand("analytic", "Closed-form current I(t) as CSV on stdout");
  Physics pa;
  long t_max = 120;
  add_physics(analytic_cmd, pa);
  analytic_cmd->add_option("--t", t_max, "Last kick")->check(CLI::PositiveNumber);

  // classical
  auto* classical_cmd = app.add_subcommand("classical", "Classical ensemble; CSVs and a manifest under --out");
  Physics pc;
  long c_kicks = 120;
  std::size_t trajectories = 100000;
  add_physics(classical_cmd, pc);
  classical_cmd->add_option("--kicks", c_kicks, "Number of kicks")->check(CLI::PositiveNumber);
  classical_cmd->add_option("--trajectories", trajectories, "Ensemble size")->check(CLI::PositiveNumber);

  // quantum
  auto* quantum_cmd = app.add_subcommand("quantum", "Quantum ladder propagation; CSVs and a manifest under --out");
  Physics pq;
  long q_kicks = 120;
  std::size_t samples = 256;
  int m_max = 0, n_phi = 0;
  std::string sampling = "auto";
  double edge = 1e-8;
  add_physics(quantum_cmd, pq);
  quantum_cmd->add_option("--kicks", q_kicks, "Number of kicks")->check(CLI::PositiveNumber);
  quantum_cmd->add_option("--samples", samples, "Number of plane-wave samples")->check(CLI::PositiveNumber);
  quantum_cmd->add_option("--m-max", m_max, "Ladder half-span (0: 512 for hbar >= 0.5, else 2048)");
  quantum_cmd->add_option("--n-phi", n_phi, "Angle grid size (0: next power of two >= 4 m_max)");
  quantum_cmd->add_option("--sampling", sampling, "Momentum sampling")
      ->check(CLI::IsMember({"auto", "antithetic", "stratified"}));
  quantum_cmd->add_option("--edge-threshold", edge, "Edge population that triggers grid growth");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Turn-key scenarios");
  experiment->require_subcommand(1);
  ex::RunOptions ro;
  experiment->add_option("--trajectories", ro.trajectories, "Classical ensemble size (0: scenario default)");
  experiment->add_option("--samples", ro.samples, "Quantum samples (0: scenario default)");
  experiment->add_option("--kicks", ro.kicks, "Kicks (0: scenario default)");
  experiment->add_option("--sigma-p", ro.sigma_p, "Initial momentum width (negative: scenario default)");
  auto* fig2 = experiment->add_subcommand("fig2", "Current against Phi, quantum and closed form");
  auto* fig3 = experiment->add_subcommand("fig3", "Current against rho_L for b = 1/32 and 1/16");
  bool with_quantum = false;
  fig3->add_flag("--with-quantum", with_quantum, "Also run the quantum engine");
  auto* fig4 = experiment->add_subcommand("fig4", "Time dependence: classical, quantum, closed form");
  double hbar4 = 0.25, hbar5 = 0.25;
  fig4->add_option("--hbar", hbar4, "Effective Planck constant");
  auto* fig5 = experiment->add_subcommand("fig5", "Final quantum momentum distribution");
  fig5->add_option("--hbar", hbar5, "Effective Planck constant");
  auto* custom = experiment->add_subcommand("custom", "Cartesian sweep described by a scenario JSON file");
  std::string scenario_file;
  custom->add_option("--scenario", scenario_file, "Scenario JSON file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "kickrot: error: validation: " << one_line(e.what()) << "\n";
    return kValidationError;
  }

  if (g.dump_config) {
    out << app.config_to_str(true, true) << "\n";
    return kOk;
  }

  try {
    const Parity parity = parity_from_string(g.parity);
    const auto t0 = std::chrono::steady_clock::now();

    if (convert->parsed()) {
      units::LabParams l = convert_lab.empty() ? lab : units::load_lab_file(convert_lab);
      const auto c = units::convert(l);
      for (const auto& w : c.warnings) err << "kickrot: warning: " << w << "\n";
      json j = {{"K", c.params.kick_strength},
                {"A", c.params.rocking_amplitude},
                {"hbar", c.params.hbar_eff},
                {"rho_L", c.rho_L},
                {"recoil_freq_expected", c.recoil_freq_expected},
                {"warnings", c.warnings}};
      out << j.dump(2) << "\n";
      return kOk;
    }

    if (analytic_cmd->parsed()) {
      const auto r = resolve(pa, err);
      const auto amp = analytic::max_current(r.params);
      const auto tr = analytic::ratchet_time(r.params);
      out << "# I0=" << io::format_number(amp.value) << (amp.degenerate ? " (b = 0: no current)" : "") << "\n";
      out << "# t_R=" << (tr.infinite ? std::string("inf") : io::format_number(tr.kicks)) << "\n";
      out << "# t*=" << io::format_number(analytic::localization_time(r.params)) << "\n";
      out << "# D=" << io::format_number(analytic::uncorrelated_diffusion(r.params.kick_strength)) << "\n";
      io::CsvTable t;
      t.header = {"t", "F", "I"};
      for (long k = 1; k <= t_max; ++k)
        t.add_row({static_cast<double>(k), analytic::time_factor(r.params, k), analytic::current(r.params, r.rho_L, k)});
      out << io::to_csv(t);
      return kOk;
    }

    if (classical_cmd->parsed()) {
      const auto r = resolve(pc, err);
      auto ens = classical::sample_initial(trajectories, r.rho_L, r.sigma_p, g.seed, r.params);
      classical::EvolveOptions eo;
      eo.parity = parity;
      eo.workers = g.workers;
      const auto stats = classical::evolve_ensemble(ens, c_kicks, eo);
      auto params = params_json(r);
      params["kicks"] = c_kicks;
      params["trajectories"] = trajectories;
      params["parity"] = g.parity;
      write_run(g.out, "classical", stats, params, {g.seed}, json::object(), seconds_since(t0), out);
      return kOk;
    }

    if (quantum_cmd->parsed()) {
      const auto r = resolve(pq, err);
      quantum::QuantumRunSpec spec;
      spec.params = r.params;
      spec.rho_L = r.rho_L;
      spec.sigma_p = r.sigma_p;
      spec.n_beta_samples = samples;
      spec.n_kicks = q_kicks;
      spec.grid = {m_max, n_phi};
      spec.seed = g.seed;
      spec.parity = parity;
      spec.workers = g.workers;
      spec.edge_threshold = edge;
      spec.sampling = sampling == "antithetic"   ? quantum::Sampling::Antithetic
                      : sampling == "stratified" ? quantum::Sampling::Stratified
                                                 : quantum::Sampling::Auto;
      spec.validate();
      const auto q = quantum::run_quantum(spec);
      auto params = params_json(r);
      const auto grid = spec.resolved_grid();
      params.update({{"kicks", q_kicks}, {"samples", samples}, {"m_max", grid.m_max}, {"n_phi", grid.n_phi},
                     {"sampling", sampling}, {"antithetic", q.antithetic}, {"edge_threshold", edge},
                     {"parity", g.parity}});
      json events = json::array();
      for (const auto& e : q.grid_events)
        events.push_back({{"sample", e.sample}, {"kick", e.kick}, {"old_m_max", e.old_m_max}, {"new_m_max", e.new_m_max}});
      write_run(g.out, "quantum", q.stats, params, {g.seed},
                {{"grid_events", events}, {"max_norm_drift", q.max_norm_drift}}, seconds_since(t0), out);
      return kOk;
    }

    // experiment
    ro.out_dir = g.out;
    ro.seed = g.seed;
    ro.workers = g.workers;
    ro.parity = parity;
    if (g.verbose) ro.log = &err;
    json summary;
    if (fig2->parsed()) summary = ex::run_fig2(ro).manifest.summary;
    if (fig3->parsed()) summary = ex::run_fig3(ro, with_quantum).manifest.summary;
    if (fig4->parsed()) summary = ex::run_fig4(ro, hbar4).manifest.summary;
    if (fig5->parsed()) summary = ex::run_fig5(ro, hbar5).manifest.summary;
    if (custom->parsed()) {
      json j;
      try {
        j = json::parse(io::read_text(scenario_file));
      } catch (const json::exception& e) {
        throw InvalidParameter(std::string("scenario file is not valid JSON: ") + e.what());
      }
      auto sc = ex::Scenario::from_json(j);
      if (app.get_option("--seed")->count() > 0) sc.seed = g.seed;
      if (app.get_option("--parity")->count() > 0) sc.parity = parity;
      const auto res = ex::run_custom(sc, ro);
      summary = res.manifest.summary;
      if (res.failed > 0) {
        err << "kickrot: error: runtime: " << res.failed << " of " << res.points
            << " sweep points failed; manifest marked incomplete\n";
        return kRuntimeError;
      }
    }
    out << summary.dump(2) << "\n";
    return kOk;
  } catch (const InvalidParameter& e) {
    err << "kickrot: error: validation: " << one_line(e.what()) << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    err << "kickrot: error: runtime: " << one_line(e.what()) << "\n";
    return kRuntimeError;
  }
}

}  // namespace kickrot::cli
