#include "kickrot/units.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "kickrot/constants.hpp"

namespace kickrot {

std::string_view to_string(Parity p) {
  return p == Parity::EvenLong ? "even-long" : "odd-long";
}

Parity parity_from_string(std::string_view s) {
  if (s == "even-long") return Parity::EvenLong;
  if (s == "odd-long") return Parity::OddLong;
  throw InvalidParameter("parity must be one of {even-long, odd-long} (got " + std::string(s) + ")");
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void check_common(const DimensionlessParams& p) {
  if (!(p.period_asymmetry >= 0.0 && p.period_asymmetry < 1.0))
    throw InvalidParameter("b must satisfy 0 <= b < 1 (got " + num(p.period_asymmetry) + ")");
  if (!(p.hbar_eff > 0.0) || !std::isfinite(p.hbar_eff))
    throw InvalidParameter("hbar_eff must satisfy hbar_eff > 0 (got " + num(p.hbar_eff) + ")");
  if (!std::isfinite(p.rocking_amplitude))
    throw InvalidParameter("A must be finite");
}

}  // namespace

void DimensionlessParams::validate() const {
  if (!(kick_strength > 0.0) || !std::isfinite(kick_strength))
    throw InvalidParameter("K must satisfy K > 0 (got " + num(kick_strength) + ")");
  check_common(*this);
}

void DimensionlessParams::validate_allow_free() const {
  if (!(kick_strength >= 0.0) || !std::isfinite(kick_strength))
    throw InvalidParameter("K must satisfy K >= 0 (got " + num(kick_strength) + ")");
  check_common(*this);
}

}  // namespace kickrot

namespace kickrot::units {

using constants::pi;

void LabParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidParameter(std::string(name) + " must be > 0 (got " + num(v) + ")");
  };
  positive(atom_mass, "atom_mass");
  positive(wavelength, "wavelength");
  positive(recoil_freq, "recoil_freq");
  positive(pulse_period, "pulse_period");
  positive(pulse_width, "pulse_width");
  positive(lattice_depth, "lattice_depth");
  if (!(pulse_width < pulse_period))
    throw InvalidParameter("pulse_width must be < pulse_period");
  if (!std::isfinite(freq_offset) || !std::isfinite(freq_mod_amplitude))
    throw InvalidParameter("freq_offset and freq_mod_amplitude must be finite");
}

LabParams cesium_reference() {
  LabParams lab;
  lab.atom_mass = constants::cesium133_mass;
  lab.wavelength = 852e-9;
  lab.recoil_freq = 2.0 * pi * 2.1e3;
  lab.pulse_period = 9.47e-6;
  lab.pulse_width = 296e-9;
  // Depth giving K = 2.6 at the reference period and pulse width.
  const double hbar_eff = 8.0 * lab.recoil_freq * lab.pulse_period;
  lab.lattice_depth = 2.6 * constants::hbar / (hbar_eff * lab.pulse_width);
  return lab;
}

double lattice_wavevector(const LabParams& lab) { return 2.0 * pi / lab.wavelength; }

double hbar_eff_from_lab(const LabParams& lab) {
  lab.validate();
  return 8.0 * lab.recoil_freq * lab.pulse_period;
}

double rho_L_from_lab(const LabParams& lab, double hbar_eff) {
  lab.validate();
  return lab.atom_mass * lab.wavelength * lab.wavelength * lab.freq_offset * hbar_eff /
         (4.0 * pi * constants::hbar);
}

double freq_offset_for_rho_L(const LabParams& lab, double hbar_eff, double rho_L) {
  lab.validate();
  return rho_L * 4.0 * pi * constants::hbar /
         (lab.atom_mass * lab.wavelength * lab.wavelength * hbar_eff);
}

double rocking_from_lab(const LabParams& lab) {
  lab.validate();
  return 2.0 * pi * lab.pulse_width * lab.freq_mod_amplitude;
}

double freq_mod_for_rocking(const LabParams& lab, double rocking) {
  lab.validate();
  return rocking / (2.0 * pi * lab.pulse_width);
}

double momentum_lab_to_scaled(double p, const LabParams& lab) {
  lab.validate();
  return 2.0 * lab.pulse_period * lattice_wavevector(lab) * p / lab.atom_mass;
}

double momentum_scaled_to_lab(double rho, const LabParams& lab) {
  lab.validate();
  return rho * lab.atom_mass / (2.0 * lab.pulse_period * lattice_wavevector(lab));
}

double kick_strength_from_lab(const LabParams& lab) {
  return hbar_eff_from_lab(lab) * lab.lattice_depth * lab.pulse_width / constants::hbar;
}

Conversion convert(const LabParams& lab) {
  Conversion out;
  out.params.hbar_eff = hbar_eff_from_lab(lab);
  out.params.kick_strength = kick_strength_from_lab(lab);
  out.params.rocking_amplitude = rocking_from_lab(lab);
  out.params.period_asymmetry = 0.0;
  out.rho_L = rho_L_from_lab(lab, out.params.hbar_eff);

  const double k = lattice_wavevector(lab);
  out.recoil_freq_expected = constants::hbar * k * k / (2.0 * lab.atom_mass);
  const double mismatch = std::abs(lab.recoil_freq / out.recoil_freq_expected - 1.0);
  if (mismatch > 0.01) {
    std::ostringstream msg;
    msg << "recoil_freq differs from hbar*k_L^2/(2M) = " << out.recoil_freq_expected
        << " rad/s by " << 100.0 * mismatch << "%";
    out.warnings.push_back(msg.str());
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

LabParams parse_lab_file(const std::string& text) {
  LabParams lab = cesium_reference();
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InvalidParameter("lab file line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value_text = trim(line.substr(eq + 1));
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc() || ptr != value_text.data() + value_text.size())
      throw InvalidParameter("lab file line " + std::to_string(line_no) + ": bad number '" +
                             std::string(value_text) + "'");
    if (key == "atom_mass") lab.atom_mass = value;
    else if (key == "wavelength") lab.wavelength = value;
    else if (key == "recoil_freq") lab.recoil_freq = value;
    else if (key == "pulse_period") lab.pulse_period = value;
    else if (key == "pulse_width") lab.pulse_width = value;
    else if (key == "lattice_depth") lab.lattice_depth = value;
    else if (key == "freq_offset") lab.freq_offset = value;
    else if (key == "freq_mod_amplitude") lab.freq_mod_amplitude = value;
    else
      throw InvalidParameter("lab file line " + std::to_string(line_no) + ": unknown key '" +
                             std::string(key) + "'");
  }
  lab.validate();
  return lab;
}

LabParams load_lab_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open lab file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_lab_file(ss.str());
}

}  // namespace kickrot::units
