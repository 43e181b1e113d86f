#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpl/algebra.hpp"
#include "dpl/kgrid.hpp"
#include "dpl/observables.hpp"
#include "dpl/state.hpp"

namespace dpl {

struct MaxwellResidual {
  double evolution = 0;  // centered ∂t F versus ±c∇×(partner), relative to max|c∇×F|
  double divergence = 0;  // max|∇·F| relative to max|∇×F|
  double combined = 0;
  double dt = 0;
};

struct EvolutionResult {
  PhotonState state_t;
  double dirac_residual = 0;
  double maxwell_residual = 0;
  double norm_drift = 0;
};

/// ψ(k, t0 + t) = ψ(k, t0) e^{-ic|k|t}.
inline PhotonState evolve_state(const PhotonState& s, double t) {
  PhotonState out = s;
  out.psi.time = s.psi.time + t;
  if (t == 0.0) return out;
  const double c = s.units.c();
  for (std::size_t i = 1; i < out.psi.size(); ++i) {
    const cd ph = std::polar(1.0, -c * s.grid().k_at(i).norm() * t);
    for (auto& z : out.psi[i]) z *= ph;
  }
  out.norm = state_norm(out.psi);
  out.rqc_residual = rqc_residual(out.psi);
  return out;
}

/// max over occupied bins of |Hψ/ħ - ωψ| / (ω|ψ|).
inline double dirac_residual(const PhotonState& s) {
  if (s.psi.rep != Representation::momentum) throw RepresentationError("dirac_residual expects momentum space");
  const double floor = 1e-12 * max_amplitude(s.psi);
  const double c = s.units.c();
  double r = 0;
  for (std::size_t i = 1; i < s.psi.size(); ++i) {
    const CVec6 p = as_vec(s.psi[i]);
    const double a = p.norm();
    if (a <= floor) continue;
    const Vec3 k = s.grid().k_at(i);
    const double w = c * k.norm();
    const CVec6 hp = hamiltonian_matrix(k, s.units) * p / s.units.hbar;
    r = std::max(r, (hp - w * p).norm() / (w * a));
  }
  return r;
}

inline double default_maxwell_dt(const PhotonState& s) { return 1e-3 / (s.units.c() * s.grid().k_max()); }

// Checks ∂F_u/∂t = c∇×F_l and ∂F_l/∂t = -c∇×F_u at time t (relative to the
// state's own time) with a centered time stencil, plus ∇·F_{u,l} = 0.
inline MaxwellResidual maxwell_residual(const PhotonState& s, double t, double dt) {
  const double c = s.units.c();
  auto blocks_at = [&](double tt) { return wave_blocks(to_position(evolve_state(s, tt).psi)); };
  auto [Fu, Fl] = blocks_at(t);
  auto [Fu_p, Fl_p] = blocks_at(t + dt);
  auto [Fu_m, Fl_m] = blocks_at(t - dt);
  const Field3C cu = spectral_curl(Fu), cl = spectral_curl(Fl);
  const ScalarField du = spectral_divergence(Fu), dl = spectral_divergence(Fl);

  double num = 0, den = 0, div = 0;
  for (std::size_t i = 0; i < Fu.size(); ++i) {
    const CVec3 dtu = (as_vec(Fu_p[i]) - as_vec(Fu_m[i])) / (2 * dt);
    const CVec3 dtl = (as_vec(Fl_p[i]) - as_vec(Fl_m[i])) / (2 * dt);
    num = std::max({num, (dtu - c * as_vec(cl[i])).norm(), (dtl + c * as_vec(cu[i])).norm()});
    den = std::max({den, c * as_vec(cu[i]).norm(), c * as_vec(cl[i]).norm()});
    div = std::max({div, std::abs(du[i][0]), std::abs(dl[i][0])});
  }
  MaxwellResidual m;
  m.dt = dt;
  m.evolution = den > 0 ? num / den : num;
  m.divergence = den > 0 ? c * div / den : div;
  m.combined = std::max(m.evolution, m.divergence);
  return m;
}

inline MaxwellResidual maxwell_residual(const PhotonState& s, double t = 0.0) {
  return maxwell_residual(s, t, default_maxwell_dt(s));
}

inline EvolutionResult evolve(const PhotonState& s, double t) {
  EvolutionResult r;
  r.state_t = evolve_state(s, t);
  r.dirac_residual = dirac_residual(r.state_t);
  r.maxwell_residual = maxwell_residual(r.state_t).combined;
  r.norm_drift = std::abs(r.state_t.norm - s.norm);
  return r;
}

struct CurrentField {
  RealField j0;               // Ψ†Ψ
  std::array<RealField, 3> j;  // icΨ†Γ0Γ_iΨ (real for any Ψ)
  double imag_residue = 0;    // largest discarded imaginary part of j
};

inline CurrentField four_current(const PhotonState& s) {
  const Field6C F = to_position(s.psi);
  const auto& g = gammas();
  const double c = s.units.c();
  std::array<Mat6, 3> a;
  for (int i = 0; i < 3; ++i) a[i] = I * c * g.gamma0 * g.gamma[i];
  CurrentField cf;
  cf.j0 = RealField{s.grid(), std::vector<double>(F.size())};
  for (auto& ji : cf.j) ji = RealField{s.grid(), std::vector<double>(F.size())};
  for (std::size_t n = 0; n < F.size(); ++n) {
    const CVec6 p = as_vec(F[n]);
    cf.j0.values[n] = p.squaredNorm();
    for (int i = 0; i < 3; ++i) {
      const cd z = p.dot(a[i] * p);
      cf.j[i].values[n] = z.real();
      cf.imag_residue = std::max(cf.imag_residue, std::abs(z.imag()));
    }
  }
  return cf;
}

// ∂tρ + ∇·j at the state's time. ∂tρ = 2 Re(Ψ†∂tΨ) with ∂tψ = -iωψ taken
// exactly; ∇·j is spectral. Returned relative to max|∂tρ|.
inline double continuity_residual(const PhotonState& s) {
  const CurrentField cf = four_current(s);
  Field6C dpsi = s.psi;
  const double c = s.units.c();
  for (std::size_t i = 0; i < dpsi.size(); ++i) {
    const cd f = -I * c * s.grid().k_at(i).norm();
    for (auto& z : dpsi[i]) z *= f;
  }
  const Field6C F = to_position(s.psi), dF = to_position(dpsi);
  Field3C j(s.grid(), Representation::position, s.time());
  for (std::size_t n = 0; n < j.size(); ++n) j[n] = {cf.j[0].values[n], cf.j[1].values[n], cf.j[2].values[n]};
  const ScalarField divj = spectral_divergence(j);
  double num = 0, den = 0;
  for (std::size_t n = 0; n < F.size(); ++n) {
    const double drho = 2.0 * as_vec(F[n]).dot(as_vec(dF[n])).real();
    num = std::max(num, std::abs(drho + divj[n][0].real()));
    den = std::max(den, std::abs(drho));
  }
  return den > 0 ? num / den : num;
}

struct ConservationSample {
  double t = 0;
  double probability = 0;
  Vec3 spin, oam, total;
  Vec3 oam_momentum;  // finite-difference route, informational
  double continuity = 0;
};

struct ConservationReport {
  std::vector<ConservationSample> samples;
  double probability_drift = 0;
  double spin_drift = 0;
  double oam_drift = 0;
  double total_drift = 0;
  double oam_momentum_drift = 0;
  double max_continuity = 0;
};

// P, ⟨S⟩, ⟨L⟩ and ⟨J⟩ = ⟨L⟩ + ħ⟨Ω⟩ at each time (units of ħ). ⟨L⟩ is taken
// from the position-space route; the finite-difference k-space value is
// reported alongside.
inline ConservationReport continuity_and_conservation(const PhotonState& s, const std::vector<double>& times) {
  ConservationReport r;
  for (double t : times) {
    const PhotonState st = evolve_state(s, t);
    ConservationSample c;
    c.t = t;
    c.probability = probability(st).psi;
    c.spin = spin_canonical(st).value;
    c.oam = oam_position(st).value;
    c.total = c.oam + c.spin;
    c.oam_momentum = oam_momentum(st).value;
    c.continuity = continuity_residual(st);
    r.samples.push_back(c);
  }
  auto spread = [&](auto get) {
    double d = 0;
    for (const auto& a : r.samples)
      for (const auto& b : r.samples) d = std::max(d, get(a, b));
    return d;
  };
  r.probability_drift = spread([](auto& a, auto& b) { return std::abs(a.probability - b.probability); });
  r.spin_drift = spread([](auto& a, auto& b) { return (a.spin - b.spin).cwiseAbs().maxCoeff(); });
  r.oam_drift = spread([](auto& a, auto& b) { return (a.oam - b.oam).cwiseAbs().maxCoeff(); });
  r.total_drift = spread([](auto& a, auto& b) { return (a.total - b.total).cwiseAbs().maxCoeff(); });
  r.oam_momentum_drift =
      spread([](auto& a, auto& b) { return (a.oam_momentum - b.oam_momentum).cwiseAbs().maxCoeff(); });
  for (const auto& a : r.samples) r.max_continuity = std::max(r.max_continuity, a.continuity);
  return r;
}

}  // namespace dpl
