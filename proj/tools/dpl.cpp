// dpl: build, check, observe, slice and evolve photon states.

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dpl/dpl.hpp"
#include "dpl/suites.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfig = 2, kIntegrity = 3 };

json modes_json(const dpl::RunConfig& c) { return c.raw.value("modes", json::array()); }

int cmd_build(const std::string& config_path, const std::string& out) {
  const dpl::RunConfig cfg = dpl::load_config(config_path);
  const dpl::PhotonState s = dpl::synthesize(cfg.modes, cfg.grid, cfg.units);
  const fs::path path = out.empty() ? fs::path(cfg.output) / "state.dpst" : fs::path(out);
  dpl::io::write_state(path, s, {{"modes", modes_json(cfg)}, {"source_config", config_path}});
  std::cout << "wrote " << path.string() << "\n"
            << "norm " << std::setprecision(15) << s.norm << "\n"
            << "rqc_residual " << std::setprecision(3) << s.rqc_residual << "\n"
            << "branch_residual " << dpl::branch_residual(s.psi) << "\n";
  return kOk;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_check(const std::string& state_path, const std::string& suites_arg, const std::string& config_path,
              const std::vector<std::string>& tol_overrides, const std::string& out) {
  dpl::suites::Context ctx;
  std::vector<std::string> names;
  if (!config_path.empty()) {
    const dpl::RunConfig cfg = dpl::load_config(config_path);
    ctx.tol = cfg.tolerances;
    ctx.times = cfg.times;
    names = cfg.checks;
  }
  for (const auto& kv : tol_overrides) ctx.tol.set_from_string(kv);
  if (!suites_arg.empty()) names = split(suites_arg, ',');
  if (names.empty() || (names.size() == 1 && names[0] == "all")) names = dpl::suite_names();
  for (const auto& n : names) {
    const auto& all = dpl::suite_names();
    if (std::find(all.begin(), all.end(), n) == all.end()) {
      std::ostringstream os;
      os << "unknown suite '" << n << "'; available:";
      for (const auto& a : all) os << " " << a;
      throw dpl::ConfigError("--suites", os.str());
    }
  }

  const dpl::io::StateFile sf = dpl::io::read_state(state_path);
  json report = {{"state", state_path}, {"suites", json::array()}};
  bool ok = true;
  for (const auto& n : names) {
    const auto r = dpl::suites::run_suite(n, sf.state, ctx);
    ok = ok && r.pass();
    report["suites"].push_back(dpl::suites::to_json(r));
    std::cout << (r.pass() ? "PASS " : "FAIL ") << n << " (" << std::fixed << std::setprecision(2)
              << r.wall_time_s << " s)\n"
              << std::defaultfloat;
    for (const auto& c : r.checks)
      if (!c.pass) std::cout << "  failed " << c.name << " = " << std::setprecision(6) << c.value << "\n";
  }
  report["pass"] = ok;
  json tol = json::object();
  for (const auto& [k, v] : ctx.tol.all()) tol[k] = v;
  report["tolerances"] = tol;
  if (!out.empty())
    dpl::io::write_file_atomic(out, report.dump(2) + "\n");
  else
    std::cout << report.dump(2) << "\n";
  return ok ? kOk : kCheckFailed;
}

int cmd_observe(const std::string& state_path, int precision, const std::string& out) {
  const dpl::io::StateFile sf = dpl::io::read_state(state_path);
  const dpl::ObservableReport r = dpl::observe(sf.state);
  std::ostringstream os;
  os << std::setprecision(precision);
  os << "name,x,y,z\n";
  auto row = [&](const std::string& n, const dpl::Vec3& v) { os << n << "," << v[0] << "," << v[1] << "," << v[2] << "\n"; };
  for (const auto& s : r.spin) row(s.name, s.e.value);
  for (const auto& l : r.oam) row(l.name, l.e.value);
  row("total_angular_momentum", r.total_angular_momentum);
  os << "probability_psi," << r.probability.psi << ",,\n";
  os << "probability_upper," << r.probability.upper << ",,\n";
  os << "probability_lower," << r.probability.lower << ",,\n";
  for (const auto& d : r.discrepancies) os << "gap:" << d.a << "|" << d.b << "," << d.gap << ",,\n";
  if (out.empty())
    std::cout << os.str();
  else
    dpl::io::write_file_atomic(out, os.str());
  if (!r.oam.empty() && (r.oam[0].e.boundary_warning || r.oam[1].e.boundary_warning))
    std::cerr << "warning: state has not decayed at the grid boundary; OAM values carry stencil/wrap error\n";
  return kOk;
}

struct Plane {
  int axis = 2;
  bool all = false;
  int index = 0;  // storage index of the plane
};

Plane parse_plane(const std::string& spec, const dpl::KGrid& g) {
  const auto eq = spec.find('=');
  if (eq != 1 || spec.size() < 3 || std::string("xyz").find(spec[0]) == std::string::npos)
    throw dpl::ConfigError("--plane", "expected AXIS=OFFSET with AXIS in x,y,z (or AXIS=all)");
  Plane p;
  p.axis = int(std::string("xyz").find(spec[0]));
  const std::string v = spec.substr(2);
  if (v == "all") {
    p.all = true;
    return p;
  }
  double x;
  try {
    x = std::stod(v);
  } catch (const std::exception&) {
    throw dpl::ConfigError("--plane", "offset is not a number");
  }
  const double h = g.dx(), L = g.length();
  if (!(x >= -L / 2 - 0.5 * h && x < L / 2 - 0.5 * h))
    throw dpl::ConfigError("--plane", "offset lies outside the box [" + std::to_string(-L / 2) + ", " +
                                          std::to_string(L / 2 - h) + "]");
  p.index = g.storage_index(int(std::lround(x / h)));
  return p;
}

int cmd_densities(const std::string& state_path, const std::string& plane_spec, const std::string& out,
                  int precision) {
  const dpl::io::StateFile sf = dpl::io::read_state(state_path);
  const dpl::PhotonState& s = sf.state;
  const dpl::KGrid& g = s.grid();
  const Plane plane = parse_plane(plane_spec, g);
  if (!(s.norm > 0)) std::cerr << "warning: state is empty; all slices are zero\n";
  const dpl::DensityCandidates d = dpl::density_candidates(s);

  std::vector<std::pair<std::string, std::function<double(std::size_t)>>> fields = {
      {"prob_psi", [&](std::size_t i) { return d.prob_density_psi.values[i]; }},
      {"prob_upper", [&](std::size_t i) { return d.prob_density_upper.values[i]; }},
      {"prob_lower", [&](std::size_t i) { return d.prob_density_lower.values[i]; }},
  };
  const char* comp = "xyz";
  for (int a = 0; a < 3; ++a) {
    const std::string c(1, comp[a]);
    fields.push_back({"spin_omega_" + c, [&, a](std::size_t i) { return d.omega_density.values[i][a]; }});
    fields.push_back({"spin_upper_" + c, [&, a](std::size_t i) { return d.upper_density.values[i][a]; }});
    fields.push_back({"spin_lower_" + c, [&, a](std::size_t i) { return d.lower_density.values[i][a]; }});
    fields.push_back({"spin_nonlocal_" + c, [&, a](std::size_t i) { return d.nonlocal_density.values[i][a]; }});
  }

  const int a1 = plane.axis == 0 ? 1 : 0, a2 = plane.axis == 2 ? 1 : 2;
  const fs::path dir = out.empty() ? fs::path("densities") : fs::path(out);
  const std::string axes = "xyz";
  for (const auto& [name, get] : fields) {
    std::ostringstream os;
    os << std::setprecision(precision);
    os << axes[a1] << "," << axes[a2];
    if (plane.all) os << "," << axes[plane.axis];
    os << ",value\n";
    for (int p = 0; p < g.n(); ++p) {
      if (!plane.all && p != plane.index) continue;
      for (int j2 = 0; j2 < g.n(); ++j2)
        for (int j1 = 0; j1 < g.n(); ++j1) {
          std::array<int, 3> idx;
          idx[a1] = j1;
          idx[a2] = j2;
          idx[plane.axis] = p;
          const std::size_t f = g.flat(idx[0], idx[1], idx[2]);
          const dpl::Vec3 x = g.x_at(f);
          os << x[a1] << "," << x[a2];
          if (plane.all) os << "," << x[plane.axis];
          os << "," << get(f) << "\n";
        }
    }
    dpl::io::write_file_atomic(dir / (name + ".csv"), os.str());
  }
  std::cout << "wrote " << fields.size() << " slices to " << dir.string() << "\n";
  return kOk;
}

int cmd_evolve(const std::string& state_path, double t, const std::string& out) {
  const dpl::io::StateFile sf = dpl::io::read_state(state_path);
  const dpl::EvolutionResult r = dpl::evolve(sf.state, t);
  json meta = sf.header.value("metadata", json::object());
  meta["evolved_from"] = state_path;
  const fs::path path = out.empty() ? fs::path(state_path).replace_extension(".evolved.dpst") : fs::path(out);
  dpl::io::write_state(path, r.state_t, meta);
  std::cout << "wrote " << path.string() << "\n"
            << std::setprecision(6) << "time " << r.state_t.time() << "\n"
            << "norm_drift " << r.norm_drift << "\n"
            << "dirac_residual " << r.dirac_residual << "\n"
            << "maxwell_residual " << r.maxwell_residual << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon wavefunction laboratory on a momentum grid"};
  app.require_subcommand(1);

  std::string config, out, state, suites, plane = "z=0";
  std::vector<std::string> tolerances;
  int precision = 6;
  double t = 0;

  auto* build = app.add_subcommand("build", "Synthesize a state from a config and write it");
  build->add_option("--config", config, "Run configuration (JSON)")->required();
  build->add_option("--out", out, "Output state file");

  auto* check = app.add_subcommand("check", "Run verification suites on a state file");
  check->add_option("state", state, "State file")->required();
  check->add_option("--suites", suites, "Comma-separated suite names, or 'all'");
  check->add_option("--config", config, "Config providing checks, times and tolerances");
  check->add_option("--tolerance", tolerances, "Override a tolerance, KEY=VAL")->take_all();
  check->add_option("--out", out, "Write the JSON report here instead of stdout");

  auto* observe = app.add_subcommand("observe", "Print every observable formula as CSV");
  observe->add_option("state", state, "State file")->required();
  observe->add_option("--precision", precision, "Significant digits")->check(CLI::Range(1, 17));
  observe->add_option("--out", out, "Write CSV here instead of stdout");

  auto* dens = app.add_subcommand("densities", "Export density-candidate slices as CSV");
  dens->add_option("state", state, "State file")->required();
  dens->add_option("--plane", plane, "AXIS=OFFSET or AXIS=all");
  dens->add_option("--out", out, "Output directory");
  dens->add_option("--precision", precision, "Significant digits")->check(CLI::Range(1, 17));

  auto* evo = app.add_subcommand("evolve", "Propagate a state by time t");
  evo->add_option("state", state, "State file")->required();
  evo->add_option("-t,--time", t, "Evolution time")->required();
  evo->add_option("--out", out, "Output state file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*build) return cmd_build(config, out);
    if (*check) return cmd_check(state, suites, config, tolerances, out);
    if (*observe) return cmd_observe(state, precision, out);
    if (*dens) return cmd_densities(state, plane, out, precision);
    if (*evo) return cmd_evolve(state, t, out);
  } catch (const dpl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const dpl::IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return kIntegrity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kOk;
}
