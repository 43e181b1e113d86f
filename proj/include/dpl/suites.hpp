#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dpl/algebra.hpp"
#include "dpl/config.hpp"
#include "dpl/dynamics.hpp"
#include "dpl/fieldbridge.hpp"
#include "dpl/observables.hpp"
#include "dpl/state.hpp"
#include "json.hpp"

namespace dpl::suites {

using nlohmann::json;

inline constexpr std::uint64_t kSeed = 0x5eed2024ULL;

struct Check {
  std::string name;
  double value = 0;
  double lo = -INFINITY;  // pass iff lo <= value <= hi (or value < hi when strict)
  double hi = INFINITY;
  bool pass = false;
};

struct SuiteReport {
  std::string name;
  std::vector<Check> checks;
  json details = json::object();
  double wall_time_s = 0;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

struct Context {
  Tolerances tol;
  std::vector<double> times{0.0, 1.0, 10.0};
};

namespace detail {

inline void below(SuiteReport& r, std::string name, double v, double tol) {
  r.checks.push_back({std::move(name), v, -INFINITY, tol, std::isfinite(v) && v < tol});
}

inline void above(SuiteReport& r, std::string name, double v, double tol) {
  r.checks.push_back({std::move(name), v, tol, INFINITY, std::isfinite(v) && v > tol});
}

inline void within(SuiteReport& r, std::string name, double v, double lo, double hi) {
  r.checks.push_back({std::move(name), v, lo, hi, std::isfinite(v) && v >= lo && v <= hi});
}

inline json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

inline std::vector<Vec3> random_wavevectors(int count, std::uint64_t seed = kSeed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  std::vector<Vec3> out;
  while (int(out.size()) < count) {
    Vec3 k(d(rng), d(rng), d(rng));
    if (k.norm() > 1e-3) out.push_back(k);
  }
  return out;
}

}  // namespace detail

inline SuiteReport algebra_suite(const Context& ctx) {
  SuiteReport r{"algebra"};
  const double tol = ctx.tol["matrix"];
  for (const auto& [name, res] : verify_matrix_identities(build_gamma_set())) detail::below(r, name, res, tol);

  const std::array<double, 6> expect{-1, -1, 0, 0, 1, 1};
  double spec = 0, hcom = 0, scom = 0, shcom = 0;
  for (const Vec3& k : detail::random_wavevectors(100)) {
    const auto ev = omega_direction_spectrum(k.normalized());
    for (int i = 0; i < 6; ++i) spec = std::max(spec, std::abs(ev[i] - expect[i]));
    hcom = std::max(hcom, commutator_H_Omega_residual(k));
    const auto S = spin_matrices(k);
    const Mat6 H = hamiltonian_matrix(k);
    for (int i = 0; i < 3; ++i) {
      shcom = std::max(shcom, max_abs(H * S[i] - S[i] * H));
      for (int j = 0; j < 3; ++j) scom = std::max(scom, max_abs(S[i] * S[j] - S[j] * S[i]));
    }
  }
  detail::below(r, "omega_direction_spectrum", spec, tol);
  detail::below(r, "commutator_H_Omega", hcom, tol);
  detail::below(r, "spin_components_commute", scom, tol);
  detail::below(r, "spin_commutes_with_H", shcom, tol);
  return r;
}

inline SuiteReport constraint_suite(const PhotonState& s, const Context& ctx) {
  SuiteReport r{"constraint"};
  const double tol = ctx.tol["constraint"];
  detail::below(r, "rqc_residual", rqc_residual(s.psi), tol);
  detail::below(r, "branch_residual", branch_residual(s.psi), tol);
  detail::below(r, "dirac_residual", dirac_residual(s), tol);
  detail::below(r, "dc_bin", std::sqrt(norm_squared(s.psi[0])), tol);
  double rqc = 0;
  for (const Vec3& k : detail::random_wavevectors(100)) {
    const Mat6 gk = gamma_dot(k);
    rqc = std::max(rqc, max_abs((gk * gk - k.squaredNorm() * Mat6::Identity()) * transverse_projector(k)));
  }
  detail::below(r, "transverse_klein_gordon", rqc, ctx.tol["matrix"]);
  return r;
}

inline SuiteReport spin_suite(const PhotonState& s, const Context& ctx) {
  SuiteReport r{"spin-equalities"};
  const ObservableReport o = observe(s, false);
  double worst = 0;
  for (const auto& d : o.discrepancies)
    if (d.a.rfind("spin", 0) == 0) worst = std::max(worst, d.gap);
  detail::below(r, "max_pairwise_spin_gap", worst, ctx.tol["spin_equality"]);
  detail::below(r, "max_imag_residue", o.max_imag_residue, 1e-10);
  for (const auto& v : o.spin) r.details[v.name] = detail::vec_json(v.e.value);
  return r;
}

inline SuiteReport oam_suite(const PhotonState& s, const Context& ctx) {
  SuiteReport r{"oam"};
  const Expectation lk = oam_momentum(s), lx = oam_position(s);
  const Vec3 sp = spin_canonical(s).value;
  const double scale = std::max(1.0, lx.value.norm());
  detail::below(r, "momentum_vs_position", (lk.value - lx.value).norm() / scale, ctx.tol["oam_relative"]);
  detail::below(r, "k_boundary_ratio", lk.boundary_ratio, 1e-8);
  detail::below(r, "x_boundary_ratio", lx.boundary_ratio, 1e-8);
  r.details["oam_momentum"] = detail::vec_json(lk.value);
  r.details["oam_position"] = detail::vec_json(lx.value);
  r.details["spin"] = detail::vec_json(sp);
  r.details["total"] = detail::vec_json(lx.value + sp);
  return r;
}

inline SuiteReport probability_suite(const PhotonState& s, const Context& ctx) {
  SuiteReport r{"probability"};
  const Probability p = probability(s);
  const double tol = ctx.tol["integral"];
  detail::below(r, "psi_vs_upper", std::abs(p.psi - p.upper), tol);
  detail::below(r, "psi_vs_lower", std::abs(p.psi - p.lower), tol);
  detail::below(r, "upper_vs_lower", std::abs(p.upper - p.lower), tol);
  detail::below(r, "momentum_upper_vs_lower", std::abs(p.momentum_upper - p.momentum_lower), ctx.tol["constraint"]);
  detail::below(r, "normalization", std::abs(p.psi - 1.0), tol);
  r.details = {{"psi", p.psi}, {"upper", p.upper}, {"lower", p.lower}};
  return r;
}

inline SuiteReport densities_suite(const PhotonState& s, const Context& ctx) {
  SuiteReport r{"densities"};
  const DensityCandidates d = density_candidates(s);
  detail::below(r, "spin_integrals_agree", d.spin_integral_gap, ctx.tol["integral"]);
  detail::below(r, "probability_integrals_agree", d.prob_integral_gap, ctx.tol["integral"]);
  detail::below(r, "imag_residue", d.imag_residue, 1e-10);
  for (const auto& g : d.spin_gaps) r.details["spin_gap_" + g.a + "_" + g.b] = g.gap;
  for (const auto& g : d.prob_gaps) r.details["probability_gap_" + g.a + "_" + g.b] = g.gap;
  r.details["spin_integral"] = detail::vec_json(d.omega_integral);
  return r;
}

inline SuiteReport maxwell_suite(const PhotonState& s, const Context& ctx) {
  SuiteReport r{"maxwell"};
  const double dt = default_maxwell_dt(s);
  const MaxwellResidual a = maxwell_residual(s, 0.0, dt), b = maxwell_residual(s, 0.0, dt / 2);
  detail::below(r, "residual_default_dt", a.combined, ctx.tol["maxwell"]);
  detail::below(r, "divergence", a.divergence, ctx.tol["constraint"]);
  detail::within(r, "dt_halving_ratio", a.evolution / b.evolution, ctx.tol["convergence_lo"],
                 ctx.tol["convergence_hi"]);
  r.details = {{"dt", dt}, {"residual_dt", a.evolution}, {"residual_half_dt", b.evolution}};
  return r;
}

inline SuiteReport conservation_suite(const PhotonState& s, const Context& ctx) {
  SuiteReport r{"conservation"};
  const ConservationReport c = continuity_and_conservation(s, ctx.times);
  const double tol = ctx.tol["conservation"];
  detail::below(r, "probability_drift", c.probability_drift, tol);
  detail::below(r, "spin_drift", c.spin_drift, tol);
  detail::below(r, "oam_drift", c.oam_drift, tol);
  detail::below(r, "total_angular_momentum_drift", c.total_drift, tol);
  r.details["oam_momentum_route_drift"] = c.oam_momentum_drift;
  r.details["continuity_residual"] = c.max_continuity;
  json samples = json::array();
  for (const auto& x : c.samples)
    samples.push_back({{"t", x.t},
                       {"probability", x.probability},
                       {"spin", detail::vec_json(x.spin)},
                       {"oam", detail::vec_json(x.oam)},
                       {"total", detail::vec_json(x.total)}});
  r.details["samples"] = samples;
  return r;
}

inline SuiteReport fieldbridge_suite(const PhotonState& s, const Context& ctx) {
  SuiteReport r{"fieldbridge"};
  const BridgeFields b = classical_from_state(s);
  const PhotonState back = state_from_classical(b.classical, ctx.tol["hermitian"]);
  double rt = 0;
  for (std::size_t i = 0; i < s.psi.size(); ++i) rt = std::max(rt, (as_vec(back.psi[i]) - as_vec(s.psi[i])).norm());
  rt /= std::max(max_amplitude(s.psi), 1e-300);
  detail::below(r, "state_classical_roundtrip", rt, ctx.tol["roundtrip"]);

  const ClassicalInvariants inv = classical_invariants(b.classical);
  detail::below(r, "hermitian_eps", inv.hermitian_eps, ctx.tol["hermitian"]);
  detail::below(r, "hermitian_eta", inv.hermitian_eta, ctx.tol["hermitian"]);
  detail::below(r, "divergence_free", std::max(inv.divergence_E, inv.divergence_H), ctx.tol["hermitian"]);

  double hrel = 0, hden = 0;
  const double mu0c = s.units.mu0 * s.units.c();
  for (std::size_t i = 1; i < s.psi.size(); ++i) {
    const CVec3 w = s.grid().k_at(i).normalized().cast<cd>();
    hrel = std::max(hrel, (as_vec(b.pair.h[i]) - vcross(w, as_vec(b.pair.e[i])) / mu0c).norm());
    hden = std::max(hden, as_vec(b.pair.h[i]).norm());
  }
  detail::below(r, "h_equals_w_cross_e", hden > 0 ? hrel / hden : hrel, ctx.tol["hermitian"]);

  const NonlocalRelationReport nl = nonlocal_relation_check(b.classical);
  detail::below(r, "real_part_E", nl.real_part_gap_E, ctx.tol["hermitian"]);
  detail::below(r, "real_part_H", nl.real_part_gap_H, ctx.tol["hermitian"]);
  detail::below(r, "kernel_route_E", nl.route_gap_E, ctx.tol["roundtrip"]);
  detail::below(r, "kernel_route_H", nl.route_gap_H, ctx.tol["roundtrip"]);

  const auto [Fu, Fl] = landau_peierls_transform(b.pair);
  const auto [Su, Sl] = wave_blocks(to_position(s.psi));
  double lp = 0;
  for (std::size_t i = 0; i < Fu.size(); ++i)
    lp = std::max({lp, (as_vec(Fu[i]) - as_vec(Su[i])).norm(), (as_vec(Fl[i]) - as_vec(Sl[i])).norm()});
  lp /= std::max(max_amplitude(Su), 1e-300);
  detail::below(r, "landau_peierls_blocks", lp, ctx.tol["hermitian"]);

  // Extraction applied to the classical fields of the recovered state gives it back.
  const PhotonState again = state_from_classical(classical_from_state(back).classical, ctx.tol["hermitian"]);
  double idem = 0;
  for (std::size_t i = 0; i < s.psi.size(); ++i)
    idem = std::max(idem, (as_vec(again.psi[i]) - as_vec(back.psi[i])).norm());
  idem /= std::max(max_amplitude(back.psi), 1e-300);
  detail::below(r, "extraction_idempotent", idem, ctx.tol["roundtrip"]);

  r.details["second_moment_ratio_Fu_over_E"] = second_moment(Fu) / second_moment(b.pair.E);
  r.details["local_gap_Fu_vs_E"] = local_proportionality_gap(Fu, b.pair.E);
  return r;
}

struct KernelComparison {
  KernelProfile coarse, fine, fine_on_coarse_band;
};

inline KernelComparison compare_kernel(KernelKind kind, double dk) {
  KernelComparison c;
  c.coarse = kernel_pair_check(kind, KGrid(64, dk));
  c.fine = kernel_pair_check(kind, KGrid(128, dk));
  c.fine_on_coarse_band = kernel_pair_check(kind, KGrid(128, dk), std::pair{c.coarse.k_lo, c.coarse.k_hi});
  return c;
}

inline SuiteReport kernels_suite(double dk, const Context& ctx) {
  SuiteReport r{"kernels"};
  for (KernelKind kind : {KernelKind::inverse_k, KernelKind::half_power}) {
    const std::string n = kernel_name(kind);
    const KernelComparison c = compare_kernel(kind, dk);
    detail::below(r, n + "_n64_max_error", c.coarse.max_rel_error, ctx.tol["kernel"]);
    detail::below(r, n + "_n128_max_error", c.fine.max_rel_error, ctx.tol["kernel"]);
    detail::below(r, n + "_discretization_refined", c.fine_on_coarse_band.max_discretization_error,
                  c.coarse.max_discretization_error);
    r.details[n] = {{"n64_max", c.coarse.max_rel_error},
                    {"n64_median", c.coarse.median_rel_error},
                    {"n64_discretization", c.coarse.max_discretization_error},
                    {"n64_regularization", c.coarse.max_regularization_error},
                    {"n128_max", c.fine.max_rel_error},
                    {"n128_median", c.fine.median_rel_error},
                    {"n128_discretization_coarse_band", c.fine_on_coarse_band.max_discretization_error},
                    {"n128_max_coarse_band", c.fine_on_coarse_band.max_rel_error}};
  }
  return r;
}

inline SuiteReport run_suite(const std::string& name, const PhotonState& s, const Context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport r;
  if (name == "algebra")
    r = algebra_suite(ctx);
  else if (name == "constraint")
    r = constraint_suite(s, ctx);
  else if (name == "spin-equalities")
    r = spin_suite(s, ctx);
  else if (name == "oam")
    r = oam_suite(s, ctx);
  else if (name == "probability")
    r = probability_suite(s, ctx);
  else if (name == "densities")
    r = densities_suite(s, ctx);
  else if (name == "maxwell")
    r = maxwell_suite(s, ctx);
  else if (name == "conservation")
    r = conservation_suite(s, ctx);
  else if (name == "fieldbridge")
    r = fieldbridge_suite(s, ctx);
  else if (name == "kernels")
    r = kernels_suite(s.grid().dk(), ctx);
  else
    throw ConfigError("--suites", "unknown suite '" + name + "'");
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline json to_json(const SuiteReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json j = {{"name", c.name}, {"value", c.value}, {"pass", c.pass}};
    if (std::isfinite(c.lo)) j["min"] = c.lo;
    if (std::isfinite(c.hi)) j["max"] = c.hi;
    checks.push_back(j);
  }
  return {{"name", r.name},
          {"pass", r.pass()},
          {"wall_time_s", r.wall_time_s},
          {"checks", checks},
          {"details", r.details}};
}

}  // namespace dpl::suites
