#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "dpl/algebra.hpp"
#include "dpl/kgrid.hpp"
#include "dpl/units.hpp"

namespace dpl {

enum class ModeKind { plane, gaussian, vortex };

/// Helicity ±1, or a real linear polarization direction.
struct Helicity {
  int sigma = 1;
};
using Polarization = std::variant<Helicity, Vec3>;

struct ModeSpec {
  ModeKind kind = ModeKind::gaussian;
  Vec3 k0 = Vec3::UnitZ();
  double sigma_k = 1.0;
  // Width along k0; defaults to sigma_k (isotropic envelope).
  std::optional<double> sigma_axial;
  Polarization polarization = Helicity{1};
  int vortex_charge = 0;
  cd amplitude = 1.0;

  void validate() const {
    if (!(k0.norm() > 0.0) || !k0.allFinite()) throw DomainError("mode k0 must be nonzero and finite");
    if (kind != ModeKind::plane && !(sigma_k > 0.0)) throw DomainError("mode sigma_k must be positive");
    if (sigma_axial && !(*sigma_axial > 0.0)) throw DomainError("mode sigma_axial must be positive");
    if (auto* h = std::get_if<Helicity>(&polarization); h && h->sigma != 1 && h->sigma != -1)
      throw DomainError("helicity must be +1 or -1");
    if (auto* p = std::get_if<Vec3>(&polarization); p && !(p->norm() > 0.0))
      throw DomainError("linear polarization vector must be nonzero");
    if (kind != ModeKind::vortex && vortex_charge != 0) throw DomainError("vortex_charge requires kind vortex");
  }
};

// ψ = (f_u, f_l)/√2 on the momentum grid, positive-energy branch.
struct PhotonState {
  Field6C psi;
  double norm = 0.0;
  double rqc_residual = 0.0;
  int energy_sign = 1;
  double scale_factor = 1.0;  // product of all normalization multipliers applied
  Units units;

  const KGrid& grid() const { return psi.grid; }
  double time() const { return psi.time; }
};

/// ∫ψ†ψ d³k.
inline double state_norm(const Field6C& psi) { return integral_norm(psi); }

/// max over occupied bins of |ŵ·f|/|f| for both blocks.
inline double rqc_residual(const Field6C& psi) {
  const double floor = 1e-12 * max_amplitude(psi);
  double r = 0;
  for (std::size_t i = 1; i < psi.size(); ++i) {
    const Vec3 w = psi.grid.k_at(i).normalized();
    for (const CVec3& f : {upper(psi[i]), lower(psi[i])}) {
      const double a = f.norm();
      if (a <= floor) continue;
      r = std::max(r, std::abs(w.cast<cd>().dot(f)) / a);
    }
  }
  return r;
}

/// max over occupied bins of the positive-branch relations ŵ×f_u = f_l and ŵ×f_l = -f_u.
inline double branch_residual(const Field6C& psi) {
  const double floor = 1e-12 * max_amplitude(psi);
  double r = 0;
  for (std::size_t i = 1; i < psi.size(); ++i) {
    const CVec3 fu = upper(psi[i]), fl = lower(psi[i]);
    const double a = std::max(fu.norm(), fl.norm());
    if (a <= floor) continue;
    const CVec3 w = psi.grid.k_at(i).normalized().cast<cd>();
    r = std::max({r, (vcross(w, fu) - fl).norm() / a, (vcross(w, fl) + fu).norm() / a});
  }
  return r;
}

inline PhotonState make_state(Field6C psi, const Units& u = {}, double scale = 1.0) {
  PhotonState s;
  s.psi = std::move(psi);
  s.norm = state_norm(s.psi);
  s.rqc_residual = rqc_residual(s.psi);
  s.units = u;
  s.scale_factor = scale;
  return s;
}

inline PhotonState normalize(const PhotonState& s) {
  const double nrm = state_norm(s.psi);
  if (!(nrm > 0.0) || !std::isfinite(nrm))
    throw DomainError("cannot normalize a state with zero norm (no transverse amplitude survives)");
  const double f = 1.0 / std::sqrt(nrm);
  PhotonState out = s;
  for (auto& v : out.psi.values)
    for (auto& z : v) z *= f;
  out.norm = state_norm(out.psi);
  out.scale_factor = s.scale_factor * f;
  return out;
}

inline PhotonState project_transverse(const PhotonState& s) {
  if (s.psi.rep != Representation::momentum) throw RepresentationError("project_transverse expects momentum space");
  PhotonState out = s;
  out.psi[0].fill(cd{});
  for (std::size_t i = 1; i < out.psi.size(); ++i) {
    const Vec3 w = s.grid().k_at(i).normalized();
    const CVec3 wc = w.cast<cd>();
    CVec3 u = upper(s.psi[i]), l = lower(s.psi[i]);
    u -= wc * wc.dot(u);
    l -= wc * wc.dot(l);
    out.psi[i] = join(u, l);
  }
  out.norm = state_norm(out.psi);
  out.rqc_residual = rqc_residual(out.psi);
  return out;
}

inline PhotonState project_positive_energy(const PhotonState& s) {
  if (s.psi.rep != Representation::momentum)
    throw RepresentationError("project_positive_energy expects momentum space");
  PhotonState out = s;
  out.psi[0].fill(cd{});
  for (std::size_t i = 1; i < out.psi.size(); ++i) {
    const Vec3 w = s.grid().k_at(i).normalized();
    const CVec3 wc = w.cast<cd>();
    const CVec3 u = upper(s.psi[i]), l = lower(s.psi[i]);
    const CVec3 pu = u - wc * wc.dot(u), pl = l - wc * wc.dot(l);
    // (P_T u - ŵ×l)/2, (ŵ×u + P_T l)/2
    out.psi[i] = join(0.5 * (pu - vcross(wc, l)), 0.5 * (vcross(wc, u) + pl));
  }
  out.norm = state_norm(out.psi);
  out.rqc_residual = rqc_residual(out.psi);
  out.energy_sign = 1;
  return out;
}

namespace detail {

inline CVec3 mode_polarization(const ModeSpec& m, const Vec3& w) {
  if (auto* h = std::get_if<Helicity>(&m.polarization)) {
    // Helicity projection of the k0-frame circular vector onto the local
    // transverse plane: ½(P_T + iσ[ŵ×]) ê_σ(k0).
    const CVec3 e = helicity_vector(m.k0, h->sigma);
    const CVec3 wc = w.cast<cd>();
    const CVec3 pe = e - wc * wc.dot(e);
    const CVec3 p = 0.5 * (pe + I * double(h->sigma) * vcross(wc, e));
    const double a = p.norm();
    return a < 1e-12 ? CVec3::Zero() : CVec3(p / a);
  }
  const Vec3 d = std::get<Vec3>(m.polarization).normalized();
  return (d - w * w.dot(d)).cast<cd>();
}

inline cd mode_envelope(const ModeSpec& m, const Vec3& k) {
  const Vec3 q = k - m.k0;
  const Vec3 w0 = m.k0.normalized();
  const double qa = q.dot(w0);
  const double qt2 = std::max(0.0, q.squaredNorm() - qa * qa);
  const double sa = m.sigma_axial.value_or(m.sigma_k);
  cd env = std::exp(-qt2 / (2 * m.sigma_k * m.sigma_k) - qa * qa / (2 * sa * sa));
  if (m.kind == ModeKind::vortex && m.vortex_charge != 0) {
    const auto f = helicity_frame(m.k0);
    const double sg = m.vortex_charge > 0 ? 1.0 : -1.0;
    const cd z = (q.dot(f.e1) + I * sg * q.dot(f.e2)) / m.sigma_k;
    env *= std::pow(z, std::abs(m.vortex_charge));
  }
  return env;
}

}  // namespace detail

// Builds f_u from envelope x polarization for each mode (amplitudes are
// relative to a unit envelope peak), sets f_l = ŵ×f_u, zeroes DC and
// normalizes to unit probability.
inline PhotonState synthesize(const std::vector<ModeSpec>& specs, const KGrid& grid, const Units& u = {}) {
  if (specs.empty()) throw DomainError("synthesize: no modes given");
  for (const auto& m : specs) m.validate();

  std::vector<CVec3> fu(grid.size(), CVec3::Zero());
  std::vector<std::string> skipped;
  for (std::size_t mi = 0; mi < specs.size(); ++mi) {
    const auto& m = specs[mi];
    if (m.kind == ModeKind::plane) {
      std::array<int, 3> s;
      bool inside = true;
      for (int a = 0; a < 3; ++a) {
        s[a] = int(std::lround(m.k0[a] / grid.dk()));
        inside = inside && s[a] >= -grid.n() / 2 && s[a] <= grid.n() / 2 - 1;
      }
      const std::size_t f = inside ? grid.flat_signed(s[0], s[1], s[2]) : 0;
      if (!inside || f == 0) {
        skipped.push_back("mode " + std::to_string(mi) + " (plane) is outside the grid or at k=0");
        continue;
      }
      const Vec3 w = grid.k_at(f).normalized();
      fu[f] += m.amplitude * detail::mode_polarization(m, w);
      continue;
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const Vec3 k = grid.k_at(i);
      const cd env = detail::mode_envelope(m, k);
      if (env == cd{}) continue;
      fu[i] += m.amplitude * env * detail::mode_polarization(m, k.normalized());
    }
  }

  Field6C psi(grid, Representation::momentum);
  const double r2 = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const CVec3 w = grid.k_at(i).normalized().cast<cd>();
    const CVec3 f = fu[i] - w * w.dot(fu[i]);
    psi[i] = join(r2 * f, r2 * vcross(w, f));
  }

  if (!(state_norm(psi) > 0.0)) {
    std::ostringstream os;
    os << "synthesis produced an all-zero state";
    for (const auto& s : skipped) os << "; " << s;
    throw DomainError(os.str());
  }
  return normalize(make_state(std::move(psi), u));
}

}  // namespace dpl
