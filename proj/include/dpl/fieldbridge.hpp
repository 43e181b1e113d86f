#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <tuple>
#include <vector>

#include "dpl/algebra.hpp"
#include "dpl/kgrid.hpp"
#include "dpl/observables.hpp"
#include "dpl/state.hpp"
#include "dpl/units.hpp"

namespace dpl {

/// Complex positive-frequency fields: e, h in momentum space and E, H in position space.
struct ComplexFieldPair {
  Field3C e, h;
  Field3C E, H;
  Units units;
};

/// Real fields ℰ, ℋ (stored as position fields with zero imaginary part) and their transforms ε, η.
struct ClassicalField {
  Field3C E_real, H_real;
  Field3C eps_k, eta_k;
  Units units;
};

struct BridgeFields {
  ComplexFieldPair pair;
  ClassicalField classical;
};

namespace detail {

inline Field3C conjugate_real_part(const Field3C& F) {
  // (F + F*)/√2
  Field3C out = F;
  for (auto& v : out.values)
    for (auto& z : v) z = cd(std::sqrt(2.0) * z.real(), 0.0);
  return out;
}

inline Field3C scaled_by_k(const Field3C& f, auto&& weight) {
  Field3C out = f;
  out[0].fill(cd{});
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double w = weight(f.grid.k_at(i).norm());
    for (auto& z : out[i]) z *= w;
  }
  return out;
}

}  // namespace detail

// e = √(ħck/ε0) f_u, h = √(ħck/μ0) f_l; ℰ = (E+E*)/√2, ℋ = (H+H*)/√2.
inline BridgeFields classical_from_state(const PhotonState& s) {
  const Units u = s.units;
  const double c = u.c();
  auto [fu, fl] = wave_blocks(s.psi);
  BridgeFields b;
  b.pair.units = b.classical.units = u;
  b.pair.e = detail::scaled_by_k(fu, [&](double k) { return std::sqrt(u.hbar * c * k / u.eps0); });
  b.pair.h = detail::scaled_by_k(fl, [&](double k) { return std::sqrt(u.hbar * c * k / u.mu0); });
  b.pair.E = to_position(b.pair.e);
  b.pair.H = to_position(b.pair.h);
  b.classical.E_real = detail::conjugate_real_part(b.pair.E);
  b.classical.H_real = detail::conjugate_real_part(b.pair.H);
  b.classical.eps_k = to_momentum(b.classical.E_real);
  b.classical.eta_k = to_momentum(b.classical.H_real);
  return b;
}

/// max_k |f(k) - f*(-k)| / max|f|.
inline double hermitian_residual(const Field3C& f) {
  double num = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const CVec3 a = as_vec(f[i]), b = as_vec(f[f.grid.negated(i)]).conjugate();
    num = std::max(num, (a - b).norm());
  }
  const double den = max_amplitude(f);
  return den > 0 ? num / den : num;
}

/// max|Im F| / max|F| of a position field that should be real.
inline double imaginary_fraction(const Field3C& F) {
  double im = 0;
  for (const auto& v : F.values)
    for (const auto& z : v) im = std::max(im, std::abs(z.imag()));
  const double den = max_amplitude(F);
  return den > 0 ? im / den : im;
}

struct ClassicalInvariants {
  double hermitian_eps = 0, hermitian_eta = 0;
  double divergence_E = 0, divergence_H = 0;  // max|k·ε| / max(|k||ε|)
};

inline ClassicalInvariants classical_invariants(const ClassicalField& cf) {
  ClassicalInvariants r;
  r.hermitian_eps = hermitian_residual(cf.eps_k);
  r.hermitian_eta = hermitian_residual(cf.eta_k);
  auto div = [](const Field3C& f) {
    double num = 0, den = 0;
    for (std::size_t i = 1; i < f.size(); ++i) {
      const Vec3 k = f.grid.k_at(i);
      num = std::max(num, std::abs(k.cast<cd>().dot(as_vec(f[i]))));
      den = std::max(den, k.norm() * as_vec(f[i]).norm());
    }
    return den > 0 ? num / den : num;
  };
  r.divergence_E = div(cf.eps_k);
  r.divergence_H = div(cf.eta_k);
  return r;
}

// e = (ε - μ0c ŵ×η)/√2, h = (η + ε0c ŵ×ε)/√2 per bin. No symmetry checks:
// a complex negative-frequency input is simply annihilated.
inline ComplexFieldPair extract_positive_frequency(const Field3C& eps, const Field3C& eta, const Units& u) {
  if (eps.rep != Representation::momentum || eta.rep != Representation::momentum)
    throw RepresentationError("positive-frequency extraction expects momentum-space fields");
  const double c = u.c(), r2 = 1.0 / std::sqrt(2.0);
  ComplexFieldPair p;
  p.units = u;
  p.e = Field3C(eps.grid, Representation::momentum, eps.time);
  p.h = Field3C(eps.grid, Representation::momentum, eps.time);
  for (std::size_t i = 1; i < eps.size(); ++i) {
    const CVec3 w = eps.grid.k_at(i).normalized().cast<cd>();
    const CVec3 a = as_vec(eps[i]), b = as_vec(eta[i]);
    p.e[i] = to_array(CVec3(r2 * (a - u.mu0 * c * vcross(w, b))));
    p.h[i] = to_array(CVec3(r2 * (b + u.eps0 * c * vcross(w, a))));
  }
  p.E = to_position(p.e);
  p.H = to_position(p.h);
  return p;
}

/// f_u = √(ε0/ħck) e, f_l = √(μ0/ħck) h, ψ = (f_u, f_l)/√2.
inline Field6C psi_from_pair(const ComplexFieldPair& p) {
  const Units& u = p.units;
  const double c = u.c();
  const double r2 = 1.0 / std::sqrt(2.0);
  Field6C psi(p.e.grid, Representation::momentum, p.e.time);
  for (std::size_t i = 1; i < psi.size(); ++i) {
    const double k = p.e.grid.k_at(i).norm();
    const double su = std::sqrt(u.eps0 / (u.hbar * c * k)), sl = std::sqrt(u.mu0 / (u.hbar * c * k));
    psi[i] = join(r2 * su * as_vec(p.e[i]), r2 * sl * as_vec(p.h[i]));
  }
  return psi;
}

// Rebuilds the photon state carried by a real free field. The result is not
// renormalized; its norm is recorded on the state.
inline PhotonState state_from_classical(const ClassicalField& cf, double tol = 1e-12) {
  const double he = hermitian_residual(cf.eps_k), hh = hermitian_residual(cf.eta_k);
  if (he > tol || hh > tol)
    throw DomainError("classical field is not Hermitian-symmetric (residual " + std::to_string(std::max(he, hh)) +
                      ")");
  const double scale = std::max(max_amplitude(cf.eps_k), max_amplitude(cf.eta_k));
  if (norm_squared(cf.eps_k[0]) + norm_squared(cf.eta_k[0]) > tol * tol * scale * scale)
    throw DomainError("classical field has a nonzero k=0 component");
  return make_state(psi_from_pair(extract_positive_frequency(cf.eps_k, cf.eta_k, cf.units)), cf.units);
}

struct NonlocalRelationReport {
  double route_gap_E = 0, route_gap_H = 0;  // spectral versus kernel route, relative max-norm
  double real_part_gap_E = 0, real_part_gap_H = 0;  // max|Re(√2 E) - ℰ| / max|ℰ|
};

// Builds E two ways: (i) from the extracted e; (ii) ℰ/√2 plus i/(√2 c) times
// the position image of (1/k)∂tε, the spectral form of the 1/|x|² convolution
// (1/k ↔ 1/(2π²) |x|^{-2} *). ∂tε comes from the curl relation
// ∂tε = (i/ε0) k×η. H is handled the same way with ∂tη = -(i/μ0) k×ε.
inline NonlocalRelationReport nonlocal_relation_check(const ClassicalField& cf) {
  const Units& u = cf.units;
  const double c = u.c(), r2 = 1.0 / std::sqrt(2.0);
  const ComplexFieldPair p = extract_positive_frequency(cf.eps_k, cf.eta_k, u);

  Field3C de(cf.eps_k.grid, Representation::momentum), dh(cf.eps_k.grid, Representation::momentum);
  for (std::size_t i = 1; i < de.size(); ++i) {
    const Vec3 k = de.grid.k_at(i);
    const CVec3 kc = k.cast<cd>();
    const double inv = 1.0 / k.norm();
    de[i] = to_array(CVec3(inv * (I / u.eps0) * vcross(kc, as_vec(cf.eta_k[i]))));
    dh[i] = to_array(CVec3(inv * (-I / u.mu0) * vcross(kc, as_vec(cf.eps_k[i]))));
  }
  const Field3C ke = to_position(de), kh = to_position(dh);

  auto gap = [&](const Field3C& spectral, const Field3C& real, const Field3C& kern) {
    double num = 0, den = 0, rnum = 0, rden = 0;
    for (std::size_t i = 0; i < spectral.size(); ++i) {
      const CVec3 route = r2 * as_vec(real[i]) + (I * r2 / c) * as_vec(kern[i]);
      num = std::max(num, (route - as_vec(spectral[i])).norm());
      den = std::max(den, as_vec(spectral[i]).norm());
      rnum = std::max(rnum, (std::sqrt(2.0) * as_vec(spectral[i]).real() - as_vec(real[i]).real()).norm());
      rden = std::max(rden, as_vec(real[i]).norm());
    }
    return std::pair{den > 0 ? num / den : num, rden > 0 ? rnum / rden : rnum};
  };
  NonlocalRelationReport r;
  std::tie(r.route_gap_E, r.real_part_gap_E) = gap(p.E, cf.E_real, ke);
  std::tie(r.route_gap_H, r.real_part_gap_H) = gap(p.H, cf.H_real, kh);
  return r;
}

/// F_u = to_position(√(ε0/ħck) e), F_l = to_position(√(μ0/ħck) h).
inline std::pair<Field3C, Field3C> landau_peierls_transform(const ComplexFieldPair& p) {
  const Units& u = p.units;
  const double c = u.c();
  const Field3C fu = detail::scaled_by_k(p.e, [&](double k) { return std::sqrt(u.eps0 / (u.hbar * c * k)); });
  const Field3C fl = detail::scaled_by_k(p.h, [&](double k) { return std::sqrt(u.mu0 / (u.hbar * c * k)); });
  return {to_position(fu), to_position(fl)};
}

/// max|A - αB| / max|A| with α the least-squares complex scale.
inline double local_proportionality_gap(const Field3C& A, const Field3C& B) {
  cd ab{};
  double bb = 0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    ab += as_vec(B[i]).dot(as_vec(A[i]));
    bb += as_vec(B[i]).squaredNorm();
  }
  const cd alpha = bb > 0 ? ab / bb : cd{};
  double num = 0, den = 0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    num = std::max(num, (as_vec(A[i]) - alpha * as_vec(B[i])).norm());
    den = std::max(den, as_vec(A[i]).norm());
  }
  return den > 0 ? num / den : num;
}

/// ∫|F|²|x - x̄|² / ∫|F|² on the position grid.
inline double second_moment(const Field3C& F) {
  double w = 0;
  Vec3 m = Vec3::Zero();
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double a = norm_squared(F[i]);
    w += a;
    m += a * F.grid.x_at(i);
  }
  if (!(w > 0)) return 0.0;
  m /= w;
  double s = 0;
  for (std::size_t i = 0; i < F.size(); ++i) s += norm_squared(F[i]) * (F.grid.x_at(i) - m).squaredNorm();
  return s / w;
}

enum class KernelKind { half_power, inverse_k };

inline const char* kernel_name(KernelKind k) { return k == KernelKind::half_power ? "half_power" : "inverse_k"; }

struct KernelProfile {
  KernelKind kind;
  int n = 0;
  double k_lo = 0, k_hi = 0;
  std::size_t bins = 0;
  double max_rel_error = 0;     // grid transform versus the analytic k-space form
  double median_rel_error = 0;
  double max_discretization_error = 0;  // grid transform versus the regularized radial transform
  double max_regularization_error = 0;  // regularized radial transform versus the analytic form
  struct Sample {
    double k, grid, radial, analytic;
  };
  std::vector<Sample> samples;  // one per distinct |k| in the band
};

namespace detail {

struct PowerKernel {
  double pref, power;  // K(r) = pref r^{-power}
  double operator()(double r) const { return pref * std::pow(r, -power); }
  // k-space form: (2π)^{-3/2} ∫K e^{-ik·x} d³x = k^{power-3}
  double analytic(double k) const { return std::pow(k, power - 3.0); }
};

inline PowerKernel kernel_of(KernelKind kind) {
  if (kind == KernelKind::inverse_k) return {std::sqrt(2.0 / std::numbers::pi), 2.0};
  return {0.5, 2.5};
}

// 1 inside L/4, half-cosine taper to zero at L/2.
inline double window(double r, double L) {
  const double a = L / 4;
  if (r <= a) return 1.0;
  if (r >= 2 * a) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (r - a) / a));
}

// Cell average of K over the cube of side h centered at c. The cell that
// contains the singularity gets the exact inscribed-ball integral plus a
// midpoint sum over the remainder.
inline double cell_average(const PowerKernel& K, const Vec3& c, double h, int m) {
  const double q = h / m;
  double sum = 0;
  const bool origin = c.norm() < 1e-12 * h;
  const double R = h / 2;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int d = 0; d < m; ++d) {
        const Vec3 p = c + Vec3((a + 0.5) * q - R, (b + 0.5) * q - R, (d + 0.5) * q - R);
        const double r = p.norm();
        if (origin && r < R) continue;
        sum += K(r);
      }
  sum *= q * q * q;
  if (origin) sum += 4 * std::numbers::pi * K.pref * std::pow(R, 3 - K.power) / (3 - K.power);
  return sum / (h * h * h);
}

// (2π)^{-3/2} 4π ∫_0^{L/2} r² K(r) w(r) sinc(kr) dr with r = u² and
// composite Gauss-Legendre on u.
inline double radial_transform(const PowerKernel& K, double k, double L) {
  static const double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                              -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                              0.7966664774136267,  0.9602898564975363};
  static const double wt[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  const double umax = std::sqrt(L / 2);
  const int panels = std::max(400, int(40 * k * L));
  const double h = umax / panels;
  double s = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (int j = 0; j < 8; ++j) {
      const double u = mid + 0.5 * h * x[j];
      const double r = u * u;
      const double kr = k * r;
      const double sinc = kr < 1e-8 ? 1.0 : std::sin(kr) / kr;
      s += wt[j] * 0.5 * h * (r * r * K(r) * window(r, L) * sinc * 2 * u);
    }
  }
  return std::pow(2 * std::numbers::pi, -1.5) * 4 * std::numbers::pi * s;
}

}  // namespace detail

// Transforms the regularized position-space kernel on the grid and compares
// it with the analytic k-space form on the shell [k_lo, k_hi] (default
// [4dk, k_max/4]). Regularization: cell averages within two cells of the
// origin, half-cosine window from L/4 to L/2.
inline KernelProfile kernel_pair_check(KernelKind kind, const KGrid& g,
                                       std::optional<std::pair<double, double>> band = std::nullopt) {
  if (g.n() < 64) throw DomainError("kernel_pair_check needs n >= 64 to resolve the mid-band shell");
  const auto K = detail::kernel_of(kind);
  const double L = g.length(), h = g.dx();

  ScalarField f(g, Representation::position);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto s = g.signed_triple(i);
    const Vec3 x = g.x_at(i);
    const double r = x.norm();
    double v;
    if (std::max({std::abs(s[0]), std::abs(s[1]), std::abs(s[2])}) <= 2)
      v = detail::cell_average(K, x, h, 16);
    else
      v = K(r) * detail::window(r, L);
    f[i][0] = v;
  }
  const ScalarField F = to_momentum(f);

  KernelProfile p;
  p.kind = kind;
  p.n = g.n();
  p.k_lo = band ? band->first : 4 * g.dk();
  p.k_hi = band ? band->second : g.k_max() / 4;

  std::map<long, KernelProfile::Sample> by_shell;
  std::vector<double> errs;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto s = g.signed_triple(i);
    const double k = g.k_at(i).norm();
    if (k < p.k_lo || k > p.k_hi) continue;
    const long m2 = long(s[0]) * s[0] + long(s[1]) * s[1] + long(s[2]) * s[2];
    auto it = by_shell.find(m2);
    if (it == by_shell.end())
      it = by_shell.emplace(m2, KernelProfile::Sample{k, 0, detail::radial_transform(K, k, L), K.analytic(k)}).first;
    auto& smp = it->second;
    const double val = F[i][0].real();
    smp.grid = val;
    const double e = std::abs(val - smp.analytic) / smp.analytic;
    errs.push_back(e);
    p.max_rel_error = std::max(p.max_rel_error, e);
    p.max_discretization_error = std::max(p.max_discretization_error, std::abs(val - smp.radial) / smp.analytic);
    p.max_regularization_error =
        std::max(p.max_regularization_error, std::abs(smp.radial - smp.analytic) / smp.analytic);
  }
  if (errs.empty()) throw DomainError("kernel_pair_check: the requested band contains no grid points");
  std::nth_element(errs.begin(), errs.begin() + errs.size() / 2, errs.end());
  p.median_rel_error = errs[errs.size() / 2];
  p.bins = errs.size();
  for (auto& [m2, smp] : by_shell) p.samples.push_back(smp);
  return p;
}

}  // namespace dpl
