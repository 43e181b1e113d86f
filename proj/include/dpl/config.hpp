#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dpl/error.hpp"
#include "dpl/io.hpp"
#include "dpl/state.hpp"
#include "dpl/units.hpp"
#include "json.hpp"

namespace dpl {

using nlohmann::json;

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"algebra", "constraint", "spin-equalities", "oam",
                                                 "probability", "densities", "maxwell", "conservation",
                                                 "fieldbridge", "kernels"};
  return names;
}

/// Named numeric thresholds used by the check suites.
class Tolerances {
 public:
  Tolerances()
      : values_{{"matrix", 1e-13},          {"constraint", 1e-12},      {"spin_equality", 1e-10},
                {"spin_value", 1e-6},       {"oam_relative", 0.01},     {"convergence_lo", 3.5},
                {"convergence_hi", 4.5},    {"density_gap", 0.05},      {"integral", 1e-10},
                {"conservation", 1e-10},    {"maxwell", 1e-6},          {"roundtrip", 1e-10},
                {"hermitian", 1e-12},       {"kernel", 0.05}} {}

  double operator[](const std::string& key) const { return values_.at(key); }

  void set(const std::string& key, double v, const std::string& path = "") {
    if (!values_.count(key)) throw ConfigError(path, "unknown tolerance '" + key + "'");
    values_[key] = v;
  }

  /// Parses "KEY=VAL".
  void set_from_string(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--tolerance", "expected KEY=VAL, got '" + kv + "'");
    double v;
    try {
      std::size_t used = 0;
      v = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("--tolerance", "not a number in '" + kv + "'");
    }
    set(kv.substr(0, eq), v, "--tolerance");
  }

  const std::map<std::string, double>& all() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

struct RunConfig {
  KGrid grid;
  std::vector<ModeSpec> modes;
  std::vector<std::string> checks;
  std::vector<double> times{0.0, 1.0, 10.0};
  Tolerances tolerances;
  std::string output = "out";
  Units units;
  json raw;
};

namespace detail {

inline void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(path + "/" + k, "unknown key");
}

inline const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw ConfigError(path + "/" + key, "required key missing");
  return j.at(key);
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

inline Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path, "expected an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = number(j[i], path + "/" + std::to_string(i));
  return v;
}

inline ModeSpec parse_mode(const json& j, const std::string& path) {
  allow_keys(j, path, {"kind", "k0", "sigma_k", "sigma_axial", "helicity", "polarization", "vortex_charge",
                       "amplitude"});
  ModeSpec m;
  const json& kind = require(j, path, "kind");
  if (kind == "plane")
    m.kind = ModeKind::plane;
  else if (kind == "gaussian")
    m.kind = ModeKind::gaussian;
  else if (kind == "vortex")
    m.kind = ModeKind::vortex;
  else
    throw ConfigError(path + "/kind", "expected one of plane, gaussian, vortex");
  m.k0 = vec3(require(j, path, "k0"), path + "/k0");
  if (m.kind != ModeKind::plane) m.sigma_k = number(require(j, path, "sigma_k"), path + "/sigma_k");
  if (j.contains("sigma_axial")) m.sigma_axial = number(j["sigma_axial"], path + "/sigma_axial");
  if (j.contains("helicity") && j.contains("polarization"))
    throw ConfigError(path, "give either helicity or polarization, not both");
  if (j.contains("helicity")) {
    const int h = integer(j["helicity"], path + "/helicity");
    if (h != 1 && h != -1) throw ConfigError(path + "/helicity", "expected +1 or -1");
    m.polarization = Helicity{h};
  } else if (j.contains("polarization")) {
    m.polarization = vec3(j["polarization"], path + "/polarization");
  }
  if (j.contains("vortex_charge")) m.vortex_charge = integer(j["vortex_charge"], path + "/vortex_charge");
  if (j.contains("amplitude")) {
    const json& a = j["amplitude"];
    if (a.is_number())
      m.amplitude = a.get<double>();
    else if (a.is_array() && a.size() == 2)
      m.amplitude = cd(number(a[0], path + "/amplitude/0"), number(a[1], path + "/amplitude/1"));
    else
      throw ConfigError(path + "/amplitude", "expected a number or [re, im]");
  }
  try {
    m.validate();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return m;
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  using namespace detail;
  allow_keys(j, "", {"grid", "modes", "checks", "times", "tolerances", "output", "units"});
  RunConfig c;
  c.raw = j;

  const json& g = require(j, "", "grid");
  allow_keys(g, "/grid", {"n", "dk"});
  try {
    c.grid = KGrid(integer(require(g, "/grid", "n"), "/grid/n"), number(require(g, "/grid", "dk"), "/grid/dk"));
  } catch (const DomainError& e) {
    throw ConfigError("/grid", e.what());
  }

  const json& modes = require(j, "", "modes");
  if (!modes.is_array() || modes.empty()) throw ConfigError("/modes", "expected a non-empty array");
  for (std::size_t i = 0; i < modes.size(); ++i) c.modes.push_back(parse_mode(modes[i], "/modes/" + std::to_string(i)));

  if (j.contains("checks")) {
    if (!j["checks"].is_array()) throw ConfigError("/checks", "expected an array of suite names");
    for (std::size_t i = 0; i < j["checks"].size(); ++i) {
      const json& s = j["checks"][i];
      const std::string p = "/checks/" + std::to_string(i);
      if (!s.is_string()) throw ConfigError(p, "expected a string");
      const auto& names = suite_names();
      if (std::find(names.begin(), names.end(), s.get<std::string>()) == names.end())
        throw ConfigError(p, "unknown suite '" + s.get<std::string>() + "'");
      c.checks.push_back(s.get<std::string>());
    }
  }
  if (j.contains("times")) {
    if (!j["times"].is_array()) throw ConfigError("/times", "expected an array of numbers");
    c.times.clear();
    for (std::size_t i = 0; i < j["times"].size(); ++i)
      c.times.push_back(number(j["times"][i], "/times/" + std::to_string(i)));
  }
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) throw ConfigError("/tolerances", "expected an object");
    for (const auto& [k, v] : j["tolerances"].items())
      c.tolerances.set(k, number(v, "/tolerances/" + k), "/tolerances/" + k);
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("/output", "expected a string");
    c.output = j["output"].get<std::string>();
  }
  if (j.contains("units")) {
    const json& u = j["units"];
    allow_keys(u, "/units", {"hbar", "eps0", "mu0"});
    if (u.contains("hbar")) c.units.hbar = number(u["hbar"], "/units/hbar");
    if (u.contains("eps0")) c.units.eps0 = number(u["eps0"], "/units/eps0");
    if (u.contains("mu0")) c.units.mu0 = number(u["mu0"], "/units/mu0");
    if (!(c.units.hbar > 0 && c.units.eps0 > 0 && c.units.mu0 > 0))
      throw ConfigError("/units", "constants must be positive");
  }
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const IntegrityError& e) {
    throw ConfigError("", e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace dpl
