#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dpl/algebra.hpp"
#include "dpl/kgrid.hpp"
#include "dpl/state.hpp"

namespace dpl {

enum class Block { upper, lower, full };

inline const char* block_name(Block b) {
  switch (b) {
    case Block::upper: return "u";
    case Block::lower: return "l";
    default: return "psi";
  }
}

/// Real expectation value with the discarded imaginary part kept as a health check.
struct Expectation {
  Vec3 value = Vec3::Zero();
  double imag_residue = 0.0;
  bool flagged = false;  // imaginary residue above 1e-8
  bool boundary_warning = false;
  double boundary_ratio = 0.0;
};

inline Expectation make_expectation(const CVec3& z) {
  Expectation e;
  e.value = z.real();
  e.imag_residue = z.imag().cwiseAbs().maxCoeff();
  e.flagged = e.imag_residue > 1e-8;
  return e;
}

/// f_u, f_l (momentum) or F_u, F_l (position) of a 6-component field: √2 times each block.
inline std::pair<Field3C, Field3C> wave_blocks(const Field6C& psi) {
  auto [u, l] = split_blocks(psi);
  const double s = std::sqrt(2.0);
  for (auto* f : {&u, &l})
    for (auto& v : f->values)
      for (auto& z : v) z *= s;
  return {std::move(u), std::move(l)};
}

inline Field3C wave_block(const Field6C& psi, Block b) {
  auto [u, l] = wave_blocks(psi);
  return b == Block::upper ? std::move(u) : std::move(l);
}

/// ∫ψ†Ω_iψ d³k.
inline Expectation spin_canonical(const PhotonState& s) {
  const auto& om = gammas().omega;
  CVec3 acc = CVec3::Zero();
  for (const auto& v : s.psi.values) {
    const CVec6 p = as_vec(v);
    for (int i = 0; i < 3; ++i) acc[i] += p.dot(om[i] * p);
  }
  return make_expectation(acc * s.grid().k_volume());
}

/// ∫ψ†(Ω·ŵ)ŵ_iψ d³k.
inline Expectation spin_projected(const PhotonState& s) {
  CVec3 acc = CVec3::Zero();
  for (std::size_t i = 1; i < s.psi.size(); ++i) {
    const Vec3 w = s.grid().k_at(i).normalized();
    const CVec6 p = as_vec(s.psi[i]);
    const cd h = p.dot(omega_dot(w) * p);
    acc += h * w.cast<cd>();
  }
  return make_expectation(acc * s.grid().k_volume());
}

inline CVec3 cross_density(const CVec3& f) { return -I * vcross(f.conjugate(), f); }

/// -i∫f*×f d³k for one block.
inline Expectation spin_cross(const PhotonState& s, Block b) {
  const Field3C f = wave_block(s.psi, b);
  CVec3 acc = CVec3::Zero();
  for (const auto& v : f.values) acc += cross_density(as_vec(v));
  return make_expectation(acc * s.grid().k_volume());
}

/// -i∫F*×F d³x for one block, evaluated in position space.
inline Expectation spin_position(const PhotonState& s, Block b) {
  const Field3C F = to_position(wave_block(s.psi, b));
  CVec3 acc = CVec3::Zero();
  for (const auto& v : F.values) acc += cross_density(as_vec(v));
  return make_expectation(acc * s.grid().x_volume());
}

namespace detail {

template <std::size_t N>
CVec3 angular_sum(const Field<N>& f, const std::array<Field<N>, 3>& d, bool use_x) {
  CVec3 acc = CVec3::Zero();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec3 r = use_x ? f.grid.x_at(i) : f.grid.k_at(i);
    for (std::size_t c = 0; c < N; ++c) {
      const cd fc = std::conj(f[i][c]);
      const cd gx = d[0][i][c], gy = d[1][i][c], gz = d[2][i][c];
      acc[0] += fc * (r[1] * gz - r[2] * gy);
      acc[1] += fc * (r[2] * gx - r[0] * gz);
      acc[2] += fc * (r[0] * gy - r[1] * gx);
    }
  }
  return acc;
}

}  // namespace detail

/// -i∫f†(k×∇_k)f d³k with finite-difference ∇_k. Block::full uses ψ itself.
inline Expectation oam_momentum(const PhotonState& s, Block b = Block::full) {
  Expectation e;
  if (b == Block::full) {
    auto g = k_gradient(s.psi);
    e = make_expectation(-I * detail::angular_sum(s.psi, g.d, false) * s.grid().k_volume());
    e.boundary_warning = g.boundary_warning;
    e.boundary_ratio = g.boundary_ratio;
  } else {
    const Field3C f = wave_block(s.psi, b);
    auto g = k_gradient(f);
    e = make_expectation(-I * detail::angular_sum(f, g.d, false) * s.grid().k_volume());
    e.boundary_warning = g.boundary_warning;
    e.boundary_ratio = g.boundary_ratio;
  }
  return e;
}

/// -i∫F†(x×∇)F d³x with spectral ∇ on the position grid.
inline Expectation oam_position(const PhotonState& s, Block b = Block::full) {
  Expectation e;
  if (b == Block::full) {
    const Field6C F = to_position(s.psi);
    e = make_expectation(-I * detail::angular_sum(F, spectral_gradient(F), true) * s.grid().x_volume());
    e.boundary_ratio = boundary_ratio(F);
  } else {
    const Field3C F = to_position(wave_block(s.psi, b));
    e = make_expectation(-I * detail::angular_sum(F, spectral_gradient(F), true) * s.grid().x_volume());
    e.boundary_ratio = boundary_ratio(F);
  }
  e.boundary_warning = e.boundary_ratio > 1e-8;
  return e;
}

struct Probability {
  double psi = 0, upper = 0, lower = 0;           // position space
  double momentum_upper = 0, momentum_lower = 0;  // ∫|f_u|², ∫|f_l|² d³k
};

inline Probability probability(const PhotonState& s) {
  Probability p;
  const Field6C F = to_position(s.psi);
  p.psi = integral_norm(F);
  auto [Fu, Fl] = wave_blocks(F);
  p.upper = integral_norm(Fu);
  p.lower = integral_norm(Fl);
  auto [fu, fl] = wave_blocks(s.psi);
  p.momentum_upper = integral_norm(fu);
  p.momentum_lower = integral_norm(fl);
  return p;
}

/// max|A - B| / max|A| over the grid; 0 when both vanish.
inline double pointwise_gap(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, (a[i] - b[i]).norm());
    den = std::max(den, a[i].norm());
  }
  if (den == 0) return num == 0 ? 0.0 : INFINITY;
  return num / den;
}

inline double pointwise_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(a[i]));
  }
  if (den == 0) return num == 0 ? 0.0 : INFINITY;
  return num / den;
}

struct NonlocalSpinDensity {
  RealField3 s;
  Vec3 integral = Vec3::Zero();
  double integral_gap = 0.0;  // |∫s - spin_projected|
  double gap_vs_omega = 0.0;  // pointwise gap between s and Ψ†ΩΨ
};

namespace detail {

inline RealField3 omega_density_field(const Field6C& F, double* imag = nullptr) {
  RealField3 d{F.grid, std::vector<Vec3>(F.size())};
  const auto& om = gammas().omega;
  double im = 0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const CVec6 p = as_vec(F[i]);
    for (int a = 0; a < 3; ++a) {
      const cd z = p.dot(om[a] * p);
      d.values[i][a] = z.real();
      im = std::max(im, std::abs(z.imag()));
    }
  }
  if (imag) *imag = im;
  return d;
}

inline RealField3 cross_density_field(const Field3C& F, double* imag = nullptr) {
  RealField3 d{F.grid, std::vector<Vec3>(F.size())};
  double im = 0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const CVec3 z = cross_density(as_vec(F[i]));
    d.values[i] = z.real();
    im = std::max(im, z.imag().cwiseAbs().maxCoeff());
  }
  if (imag) *imag = im;
  return d;
}

inline Vec3 integrate(const RealField3& f) {
  Vec3 s = Vec3::Zero();
  for (const auto& v : f.values) s += v;
  return s * f.grid.x_volume();
}

inline double integrate(const RealField& f) {
  double s = 0;
  for (double v : f.values) s += v;
  return s * f.grid.x_volume();
}

inline RealField squared_magnitude(const Field3C& F) {
  RealField r{F.grid, std::vector<double>(F.size())};
  for (std::size_t i = 0; i < F.size(); ++i) r.values[i] = norm_squared(F[i]);
  return r;
}

}  // namespace detail

/// s(x) = Re[Ψ†Φ_i], Φ_i the position image of ŵ_i(Ω·ŵ)ψ.
inline NonlocalSpinDensity nonlocal_spin_density(const PhotonState& st, const Field6C* position_psi = nullptr) {
  const KGrid& g = st.grid();
  const Field6C F = position_psi ? *position_psi : to_position(st.psi);
  NonlocalSpinDensity out;
  out.s = RealField3{g, std::vector<Vec3>(g.size(), Vec3::Zero())};
  for (int a = 0; a < 3; ++a) {
    Field6C phi(g, Representation::momentum, st.time());
    for (std::size_t i = 1; i < g.size(); ++i) {
      const Vec3 w = g.k_at(i).normalized();
      phi[i] = to_array(CVec6(w[a] * (omega_dot(w) * as_vec(st.psi[i]))));
    }
    const Field6C P = to_position(phi);
    for (std::size_t i = 0; i < g.size(); ++i) out.s.values[i][a] = as_vec(F[i]).dot(as_vec(P[i])).real();
  }
  out.integral = detail::integrate(out.s);
  out.integral_gap = (out.integral - spin_projected(st).value).cwiseAbs().maxCoeff();
  out.gap_vs_omega = pointwise_gap(detail::omega_density_field(F).values, out.s.values);
  return out;
}

struct NamedGap {
  std::string a, b;
  double gap;
};

struct DensityCandidates {
  RealField3 omega_density;  // Ψ†ΩΨ
  RealField3 upper_density;  // Ψ†(1+Γ0)ΩΨ = -iF_u*×F_u
  RealField3 lower_density;  // Ψ†(1-Γ0)ΩΨ = -iF_l*×F_l
  RealField3 nonlocal_density;
  RealField prob_density_psi, prob_density_upper, prob_density_lower;

  Vec3 omega_integral, upper_integral, lower_integral, nonlocal_integral;
  double prob_integral_psi = 0, prob_integral_upper = 0, prob_integral_lower = 0;
  double imag_residue = 0;

  Vec3 spin_reference;  // spin_canonical
  double spin_integral_gap = 0;  // max over candidates of |∫density - ⟨S⟩|
  double prob_integral_gap = 0;  // max pairwise gap among probability integrals

  std::vector<NamedGap> spin_gaps;
  std::vector<NamedGap> prob_gaps;
};

inline DensityCandidates density_candidates(const PhotonState& st) {
  DensityCandidates d;
  const Field6C F = to_position(st.psi);
  auto [Fu, Fl] = wave_blocks(F);
  double i0 = 0, i1 = 0, i2 = 0;
  d.omega_density = detail::omega_density_field(F, &i0);
  d.upper_density = detail::cross_density_field(Fu, &i1);
  d.lower_density = detail::cross_density_field(Fl, &i2);
  d.imag_residue = std::max({i0, i1, i2});
  d.nonlocal_density = nonlocal_spin_density(st, &F).s;

  d.prob_density_psi = RealField{st.grid(), std::vector<double>(F.size())};
  for (std::size_t i = 0; i < F.size(); ++i) d.prob_density_psi.values[i] = norm_squared(F[i]);
  d.prob_density_upper = detail::squared_magnitude(Fu);
  d.prob_density_lower = detail::squared_magnitude(Fl);

  d.omega_integral = detail::integrate(d.omega_density);
  d.upper_integral = detail::integrate(d.upper_density);
  d.lower_integral = detail::integrate(d.lower_density);
  d.nonlocal_integral = detail::integrate(d.nonlocal_density);
  d.prob_integral_psi = detail::integrate(d.prob_density_psi);
  d.prob_integral_upper = detail::integrate(d.prob_density_upper);
  d.prob_integral_lower = detail::integrate(d.prob_density_lower);

  d.spin_reference = spin_canonical(st).value;
  for (const Vec3& v : {d.omega_integral, d.upper_integral, d.lower_integral, d.nonlocal_integral})
    d.spin_integral_gap = std::max(d.spin_integral_gap, (v - d.spin_reference).cwiseAbs().maxCoeff());
  d.prob_integral_gap = std::max({std::abs(d.prob_integral_psi - d.prob_integral_upper),
                                  std::abs(d.prob_integral_psi - d.prob_integral_lower),
                                  std::abs(d.prob_integral_upper - d.prob_integral_lower)});

  d.spin_gaps = {
      {"omega", "upper", pointwise_gap(d.omega_density.values, d.upper_density.values)},
      {"omega", "lower", pointwise_gap(d.omega_density.values, d.lower_density.values)},
      {"upper", "lower", pointwise_gap(d.upper_density.values, d.lower_density.values)},
      {"omega", "nonlocal", pointwise_gap(d.omega_density.values, d.nonlocal_density.values)},
  };
  d.prob_gaps = {
      {"psi", "upper", pointwise_gap(d.prob_density_psi.values, d.prob_density_upper.values)},
      {"psi", "lower", pointwise_gap(d.prob_density_psi.values, d.prob_density_lower.values)},
      {"upper", "lower", pointwise_gap(d.prob_density_upper.values, d.prob_density_lower.values)},
  };
  return d;
}

struct NamedVec {
  std::string name;
  Expectation e;
};

struct ObservableReport {
  std::vector<NamedVec> spin;  // canonical, projected, cross_u, cross_l, position_u, position_l, nonlocal
  std::vector<NamedVec> oam;   // momentum, position (full ψ)
  Vec3 total_angular_momentum = Vec3::Zero();  // oam_position + spin_canonical
  Probability probability;
  std::vector<NamedGap> discrepancies;  // pairwise max-norm differences within each family
  double max_spin_discrepancy = 0;
  double max_imag_residue = 0;
};

inline ObservableReport observe(const PhotonState& st, bool with_oam = true) {
  ObservableReport r;
  r.spin = {
      {"spin_canonical", spin_canonical(st)},
      {"spin_projected", spin_projected(st)},
      {"spin_cross_u", spin_cross(st, Block::upper)},
      {"spin_cross_l", spin_cross(st, Block::lower)},
      {"spin_position_u", spin_position(st, Block::upper)},
      {"spin_position_l", spin_position(st, Block::lower)},
  };
  Expectation nl;
  nl.value = nonlocal_spin_density(st).integral;
  r.spin.push_back({"spin_nonlocal_integral", nl});
  for (std::size_t i = 0; i < r.spin.size(); ++i) {
    r.max_imag_residue = std::max(r.max_imag_residue, r.spin[i].e.imag_residue);
    for (std::size_t j = i + 1; j < r.spin.size(); ++j) {
      const double g = (r.spin[i].e.value - r.spin[j].e.value).cwiseAbs().maxCoeff();
      r.discrepancies.push_back({r.spin[i].name, r.spin[j].name, g});
      r.max_spin_discrepancy = std::max(r.max_spin_discrepancy, g);
    }
  }
  if (with_oam) {
    r.oam = {{"oam_momentum", oam_momentum(st)}, {"oam_position", oam_position(st)}};
    for (const auto& o : r.oam) r.max_imag_residue = std::max(r.max_imag_residue, o.e.imag_residue);
    r.discrepancies.push_back({"oam_momentum", "oam_position",
                               (r.oam[0].e.value - r.oam[1].e.value).cwiseAbs().maxCoeff()});
    r.total_angular_momentum = r.oam[1].e.value + r.spin[0].e.value;
  }
  r.probability = probability(st);
  const auto& p = r.probability;
  r.discrepancies.push_back({"probability_psi", "probability_upper", std::abs(p.psi - p.upper)});
  r.discrepancies.push_back({"probability_psi", "probability_lower", std::abs(p.psi - p.lower)});
  r.discrepancies.push_back({"probability_upper", "probability_lower", std::abs(p.upper - p.lower)});
  return r;
}

}  // namespace dpl
