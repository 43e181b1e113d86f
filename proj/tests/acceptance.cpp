// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dpl/dpl.hpp"
#include "dpl/suites.hpp"

using namespace dpl;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::vector<std::string> notes;
  bool pass = true;

  void require(bool ok, const std::string& what, double v, const char* fmt = "%.3g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    notes.push_back(std::string(ok ? "" : "!") + what + "=" + buf);
    pass = pass && ok;
  }
};

void report(const Criterion& c, double seconds) {
  std::printf("%s criterion %d: %s (%.1f s)\n", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), seconds);
  for (const auto& n : c.notes) std::printf("    %s\n", n.c_str());
  std::fflush(stdout);
}

ModeSpec gaussian(Vec3 k0, double sigma, int helicity) {
  ModeSpec m;
  m.kind = ModeKind::gaussian;
  m.k0 = k0;
  m.sigma_k = sigma;
  m.polarization = Helicity{helicity};
  return m;
}

ModeSpec vortex(Vec3 k0, double sigma, double sigma_axial, int charge, Polarization pol) {
  ModeSpec m;
  m.kind = charge == 0 ? ModeKind::gaussian : ModeKind::vortex;
  m.k0 = k0;
  m.sigma_k = sigma;
  m.sigma_axial = sigma_axial;
  m.vortex_charge = charge;
  m.polarization = pol;
  return m;
}

// Two packets travelling along ẑ and x̂ with opposite helicity. With equal
// helicity F_l = -iσF_u pointwise and every density candidate coincides.
PhotonState two_direction_state() {
  const KGrid g(32, 0.5);
  return synthesize({gaussian({0, 0, 4}, 0.75, 1), gaussian({4, 0, 0}, 0.75, -1)}, g);
}

Criterion matrix_algebra() {
  Criterion c{1, "matrix identities, commutators, Omega spectrum < 1e-13"};
  const auto r = suites::algebra_suite({});
  for (const auto& ch : r.checks) c.require(ch.pass, ch.name, ch.value);
  return c;
}

Criterion constraints() {
  Criterion c{2, "transversality and branch relations < 1e-12; (Gamma.k)^2 P_T = k^2 P_T < 1e-13"};
  const KGrid g(32, 0.5);
  const std::vector<std::pair<std::string, std::vector<ModeSpec>>> cases = {
      {"gaussian+", {gaussian({0, 0, 4}, 0.75, 1)}},
      {"gaussian-", {gaussian({2, 2, 2}, 0.75, -1)}},
      {"vortex", {vortex({0, 0, 4}, 0.75, 0.75, 1, Helicity{1})}},
      {"linear", {vortex({0, 3, 3}, 0.75, 0.75, 0, Vec3(1, 0, 0))}},
      {"superposition", {gaussian({0, 0, 4}, 0.75, 1), gaussian({4, 0, 0}, 0.75, -1)}},
  };
  for (const auto& [name, modes] : cases) {
    const PhotonState s = synthesize(modes, g);
    c.require(rqc_residual(s.psi) < 1e-12, name + ".rqc", rqc_residual(s.psi));
    c.require(branch_residual(s.psi) < 1e-12, name + ".branch", branch_residual(s.psi));
  }
  double kg = 0;
  for (const Vec3& k : suites::detail::random_wavevectors(100)) {
    const Mat6 gk = gamma_dot(k);
    kg = std::max(kg, max_abs((gk * gk - k.squaredNorm() * Mat6::Identity()) * transverse_projector(k)));
  }
  c.require(kg < 1e-13, "klein_gordon_100k", kg);
  return c;
}

Criterion spin_operator() {
  Criterion c{3, "[S_i,S_j] = 0 and [H,S_i] = 0 < 1e-13 at 100 random k"};
  double sc = 0, hc = 0;
  for (const Vec3& k : suites::detail::random_wavevectors(100, suites::kSeed + 1)) {
    const auto S = spin_matrices(k);
    const Mat6 H = hamiltonian_matrix(k);
    for (int i = 0; i < 3; ++i) {
      hc = std::max(hc, max_abs(H * S[i] - S[i] * H));
      for (int j = 0; j < 3; ++j) sc = std::max(sc, max_abs(S[i] * S[j] - S[j] * S[i]));
    }
  }
  c.require(sc < 1e-13, "SiSj", sc);
  c.require(hc < 1e-13, "HSi", hc);
  return c;
}

Criterion spin_equalities() {
  Criterion c{4, "seven spin formulas agree < 1e-10; helicity states give <S> = +-w0 < 1e-6"};
  const KGrid g(32, 0.5);
  const double sigma = 0.2 * g.dk();
  struct Case {
    std::string name;
    Vec3 k0;
    int h;
  };
  for (const Case& cs : {Case{"z+", {0, 0, 4}, 1}, Case{"z-", {0, 0, 4}, -1}, Case{"d+", {2, 2, 2}, 1},
                         Case{"d-", {2, 2, 2}, -1}}) {
    const PhotonState s = synthesize({gaussian(cs.k0, sigma, cs.h)}, g);
    const ObservableReport r = observe(s, false);
    c.require(r.max_spin_discrepancy < 1e-10, cs.name + ".pairwise", r.max_spin_discrepancy);
    const double dev = (r.spin[0].e.value - cs.h * cs.k0.normalized()).norm();
    c.require(dev < 1e-6, cs.name + ".value", dev);
  }
  const ObservableReport r = observe(two_direction_state(), false);
  c.require(r.max_spin_discrepancy < 1e-10, "two_direction.pairwise", r.max_spin_discrepancy);
  c.require(r.max_imag_residue < 1e-10, "imag_residue", r.max_imag_residue);
  return c;
}

// Orbital and total angular momentum of axial vortices on a fine and a coarse
// grid covering the same k box. L_z uses linear polarization (spin-free);
// J_z uses helicity +1.
Criterion oam() {
  Criterion c{5, "L_z = l within 1%, k- vs x-route within 1%, dk-halving ratio in [3.5,4.5], J_z = l+sigma within 1%"};
  const KGrid fine(128, 1.0), coarse(64, 2.0);
  const Vec3 k0(0, 0, 30);
  const double sr = 8.0, sa = 3.0;
  for (int l : {-1, 0, 2}) {
    const std::string tag = "l=" + std::to_string(l);
    const double scale = std::max(1.0, std::abs(double(l)));
    double err[2], gap[2];
    int idx = 0;
    for (const KGrid* g : {&fine, &coarse}) {
      const PhotonState s = synthesize({vortex(k0, sr, sa, l, Vec3(1, 0, 0))}, *g);
      const double lk = oam_momentum(s).value[2], lx = oam_position(s).value[2];
      err[idx] = std::abs(lk - l) / scale;
      gap[idx] = std::abs(lk - lx) / scale;
      ++idx;
    }
    c.require(err[0] < 0.01, tag + ".Lz_err", err[0]);
    c.require(gap[0] < 0.01, tag + ".k_vs_x", gap[0]);
    if (l != 0) {
      c.require(err[1] / err[0] >= 3.5 && err[1] / err[0] <= 4.5, tag + ".err_ratio", err[1] / err[0]);
      c.require(gap[1] / gap[0] >= 3.5 && gap[1] / gap[0] <= 4.5, tag + ".gap_ratio", gap[1] / gap[0]);
    } else {
      c.notes.push_back(tag + ".ratio=n/a (errors " + std::to_string(err[0]) + ", " + std::to_string(err[1]) + ")");
    }
    const PhotonState h = synthesize({vortex(k0, sr, sa, l, Helicity{1})}, fine);
    const double jz = oam_position(h).value[2] + spin_canonical(h).value[2];
    c.require(std::abs(jz - (l + 1)) / std::max(1.0, std::abs(l + 1.0)) < 0.01, tag + ".Jz_err",
              std::abs(jz - (l + 1)));
    const double jk = oam_momentum(h).value[2] + spin_canonical(h).value[2];
    c.require(std::abs(jk - (l + 1)) / std::max(1.0, std::abs(l + 1.0)) < 0.01, tag + ".Jz_k_err",
              std::abs(jk - (l + 1)));
  }
  return c;
}

Criterion non_uniqueness() {
  Criterion c{6, "two-direction state: density gaps > 0.05 with integrals agreeing < 1e-10"};
  const DensityCandidates d = density_candidates(two_direction_state());
  for (const auto& g : d.spin_gaps)
    if (g.b != "nonlocal" && !(g.a == "upper" && g.b == "lower"))
      c.require(g.gap > 0.05, "spin." + g.a + "_vs_" + g.b, g.gap);
  for (const auto& g : d.prob_gaps) c.require(g.gap > 0.05, "prob." + g.a + "_vs_" + g.b, g.gap);
  c.require(d.spin_integral_gap < 1e-10, "spin_integrals", d.spin_integral_gap);
  c.require(d.prob_integral_gap < 1e-10, "prob_integrals", d.prob_integral_gap);
  return c;
}

Criterion conservation() {
  Criterion c{7, "P, <S>, <L>, <J> drift < 1e-10 over t in {0,1,10}; Maxwell residual < 1e-6 with O(dt^2)"};
  const KGrid g(64, 0.05);
  const PhotonState s = synthesize({vortex({0, 0, 0.8}, 0.15, 0.1, 1, Helicity{1})}, g);
  const ConservationReport r = continuity_and_conservation(s, {0.0, 1.0, 10.0});
  c.require(r.probability_drift < 1e-10, "P", r.probability_drift);
  c.require(r.spin_drift < 1e-10, "S", r.spin_drift);
  c.require(r.oam_drift < 1e-10, "L", r.oam_drift);
  c.require(r.total_drift < 1e-10, "J", r.total_drift);
  c.notes.push_back("info: k-space L drift=" + std::to_string(r.oam_momentum_drift) +
                    ", continuity residual=" + std::to_string(r.max_continuity));
  const double dt = default_maxwell_dt(s);
  const MaxwellResidual a = maxwell_residual(s, 0.0, dt), b = maxwell_residual(s, 0.0, dt / 2);
  c.require(a.combined < 1e-6, "maxwell", a.combined);
  c.require(a.evolution / b.evolution >= 3.5 && a.evolution / b.evolution <= 4.5, "maxwell_ratio",
            a.evolution / b.evolution);
  return c;
}

Criterion field_bridge() {
  Criterion c{8, "state<->classical roundtrip < 1e-10; symmetry and real part < 1e-12; kernel pairs <= 5% at n=64, improving at n=128"};
  const KGrid g(32, 0.5);
  const PhotonState s = synthesize({gaussian({0, 0, 4}, 0.75, 1), gaussian({3, 0, 0}, 0.75, -1)}, g);
  const auto r = suites::fieldbridge_suite(s, {});
  for (const auto& ch : r.checks) c.require(ch.pass, ch.name, ch.value);
  for (KernelKind kind : {KernelKind::inverse_k, KernelKind::half_power}) {
    const std::string n = kernel_name(kind);
    const auto k = suites::compare_kernel(kind, 1.0);
    c.require(k.coarse.max_rel_error <= 0.05, n + ".n64", k.coarse.max_rel_error);
    c.require(k.fine.max_rel_error <= 0.05, n + ".n128", k.fine.max_rel_error);
    c.require(k.fine_on_coarse_band.max_discretization_error < k.coarse.max_discretization_error,
              n + ".discretization_n128_on_n64_band", k.fine_on_coarse_band.max_discretization_error);
    c.notes.push_back(n + ".discretization_n64=" + std::to_string(k.coarse.max_discretization_error) +
                      " regularization=" + std::to_string(k.coarse.max_regularization_error));
  }
  return c;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  bool all = true;
  for (auto* f : {matrix_algebra, constraints, spin_operator, spin_equalities, oam, non_uniqueness, conservation,
                  field_bridge}) {
    const auto t0 = clock::now();
    Criterion c;
    try {
      c = f();
    } catch (const std::exception& e) {
      c.pass = false;
      c.notes.push_back(std::string("exception: ") + e.what());
    }
    report(c, std::chrono::duration<double>(clock::now() - t0).count());
    all = all && c.pass;
  }
  std::printf("%s\n", all ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED");
  return all ? 0 : 1;
}
