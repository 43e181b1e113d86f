#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "dpl/error.hpp"
#include "dpl/units.hpp"

namespace dpl {

using cd = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3cd;
using Mat6 = Eigen::Matrix<cd, 6, 6>;
using CVec6 = Eigen::Matrix<cd, 6, 1>;

inline constexpr cd I{0.0, 1.0};

inline int levi_civita(int i, int j, int k) { return (i - j) * (j - k) * (k - i) / 2; }

inline double max_abs(const auto& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Unit vector along k. Throws on a zero (or non-finite) wavevector.
inline Vec3 unit_direction(const Vec3& k) {
  const double n = k.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("wavevector must be nonzero and finite");
  return k / n;
}

/// Σ_k with (Σ_k)_ij = -i ε_ijk.
inline std::array<Mat3, 3> build_sigma() {
  std::array<Mat3, 3> s;
  for (int k = 0; k < 3; ++k) {
    s[k].setZero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s[k](i, j) = -I * double(levi_civita(i, j, k));
  }
  return s;
}

struct GammaSet {
  Mat6 gamma0;
  std::array<Mat6, 3> gamma;
  std::array<Mat6, 3> omega;
  std::array<Mat3, 3> sigma;
};

inline GammaSet build_gamma_set() {
  GammaSet g;
  g.sigma = build_sigma();
  g.gamma0.setZero();
  g.gamma0.topLeftCorner<3, 3>() = Mat3::Identity();
  g.gamma0.bottomRightCorner<3, 3>() = -Mat3::Identity();
  for (int k = 0; k < 3; ++k) {
    g.gamma[k].setZero();
    g.gamma[k].topRightCorner<3, 3>() = g.sigma[k];
    g.gamma[k].bottomLeftCorner<3, 3>() = g.sigma[k];
    g.omega[k].setZero();
    g.omega[k].topLeftCorner<3, 3>() = g.sigma[k];
    g.omega[k].bottomRightCorner<3, 3>() = g.sigma[k];
  }
  return g;
}

inline const GammaSet& gammas() {
  static const GammaSet g = build_gamma_set();
  return g;
}

/// Σ·a as a 3x3 matrix.
inline Mat3 sigma_dot(const Vec3& a) {
  const auto& s = gammas().sigma;
  return s[0] * a[0] + s[1] * a[1] + s[2] * a[2];
}

inline Mat6 gamma_dot(const Vec3& a) {
  const auto& g = gammas().gamma;
  return g[0] * a[0] + g[1] * a[1] + g[2] * a[2];
}

inline Mat6 omega_dot(const Vec3& a) {
  const auto& o = gammas().omega;
  return o[0] * a[0] + o[1] * a[1] + o[2] * a[2];
}

// Plain bilinear a × b. Eigen's cross() conjugates complex operands, which is
// not the product used anywhere here.
template <class A, class B>
CVec3 vcross(const A& a, const B& b) {
  const CVec3 x = a.template cast<cd>(), y = b.template cast<cd>();
  return {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
}

/// Matrix C with C v = a × v.
inline Eigen::Matrix3d cross_matrix(const Vec3& a) {
  Eigen::Matrix3d c;
  c << 0, -a[2], a[1], a[2], 0, -a[0], -a[1], a[0], 0;
  return c;
}

struct IdentityResidual {
  std::string name;
  double residual;
};

/// Max-abs residual of every algebraic identity the gamma set must satisfy.
inline std::vector<IdentityResidual> verify_matrix_identities(const GammaSet& g) {
  const Mat6 id6 = Mat6::Identity();
  std::vector<IdentityResidual> out;

  out.push_back({"gamma0_squared", max_abs(g.gamma0 * g.gamma0 - id6)});

  double r = 0;
  for (int k = 0; k < 3; ++k) r = std::max(r, max_abs(g.gamma0 * g.gamma[k] + g.gamma[k] * g.gamma0));
  out.push_back({"gamma0_anticommutes", r});

  r = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        Mat6 lhs = g.gamma[i] * g.gamma[j] * g.gamma[k] + g.gamma[k] * g.gamma[j] * g.gamma[i];
        Mat6 rhs = g.gamma[i] * double(j == k) + g.gamma[k] * double(i == j);
        r = std::max(r, max_abs(lhs - rhs));
      }
  out.push_back({"gamma_triple_product", r});

  double rs = 0, ro = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Mat3 cs = g.sigma[i] * g.sigma[j] - g.sigma[j] * g.sigma[i];
      Mat6 co = g.omega[i] * g.omega[j] - g.omega[j] * g.omega[i];
      for (int k = 0; k < 3; ++k) {
        cs -= I * double(levi_civita(i, j, k)) * g.sigma[k];
        co -= I * double(levi_civita(i, j, k)) * g.omega[k];
      }
      rs = std::max(rs, max_abs(cs));
      ro = std::max(ro, max_abs(co));
    }
  out.push_back({"sigma_commutator", rs});
  out.push_back({"omega_commutator", ro});

  r = 0;
  for (int k = 0; k < 3; ++k) {
    Mat6 cross = Mat6::Zero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (int e = levi_civita(i, j, k)) cross += double(e) * g.gamma[i] * g.gamma[j];
    r = std::max(r, max_abs(-I * cross - g.omega[k]));
  }
  out.push_back({"gamma_cross_gamma_is_omega", r});

  Mat6 o2 = g.omega[0] * g.omega[0] + g.omega[1] * g.omega[1] + g.omega[2] * g.omega[2];
  out.push_back({"omega_squared", max_abs(o2 - 2.0 * id6)});

  r = 0;
  for (int k = 0; k < 3; ++k) {
    r = std::max(r, max_abs(g.gamma0 - g.gamma0.adjoint()));
    r = std::max(r, max_abs(g.gamma[k] - g.gamma[k].adjoint()));
    r = std::max(r, max_abs(g.omega[k] - g.omega[k].adjoint()));
  }
  out.push_back({"hermiticity", r});
  return out;
}

/// H(k) = i hbar c Γ0 (Γ·k).
inline Mat6 hamiltonian_matrix(const Vec3& k, const Units& u = {}) {
  unit_direction(k);
  return I * u.hbar * u.c() * gammas().gamma0 * gamma_dot(k);
}

/// Block-diagonal (I - ŵŵᵀ) on both 3-blocks.
inline Mat6 transverse_projector(const Vec3& k) {
  const Vec3 w = unit_direction(k);
  const Eigen::Matrix3d pt = Eigen::Matrix3d::Identity() - w * w.transpose();
  Mat6 p = Mat6::Zero();
  p.topLeftCorner<3, 3>() = pt.cast<cd>();
  p.bottomRightCorner<3, 3>() = pt.cast<cd>();
  return p;
}

struct HelicityFrame {
  Vec3 w, e1, e2;
};

/// Right-handed (e1, e2, ŵ) with e1 = normalize(ẑ×ŵ), or x̂ when ŵ is along ẑ.
inline HelicityFrame helicity_frame(const Vec3& k) {
  HelicityFrame f;
  f.w = unit_direction(k);
  Vec3 a = Vec3::UnitZ().cross(f.w);
  const double an = a.norm();
  f.e1 = an < 1e-12 ? Vec3::UnitX() : Vec3(a / an);
  f.e2 = f.w.cross(f.e1);
  return f;
}

/// ê_σ = (e1 + iσ e2)/√2, σ = ±1.
inline CVec3 helicity_vector(const Vec3& k, int sigma) {
  if (sigma != 1 && sigma != -1) throw DomainError("helicity must be +1 or -1");
  const auto f = helicity_frame(k);
  return (f.e1.cast<cd>() + I * double(sigma) * f.e2.cast<cd>()) / std::sqrt(2.0);
}

// Projectors onto the ±hbar c k eigenspaces of H(k). With C = [ŵ×] the
// normalized Hamiltonian is [[0,-C],[C,0]] and C² = -P_T on the transverse
// plane, so the eigenprojectors are (P_T ± H/hbar c k)/2.
inline Mat6 energy_projector(const Vec3& k, int sign) {
  const Vec3 w = unit_direction(k);
  const Eigen::Matrix3d pt = Eigen::Matrix3d::Identity() - w * w.transpose();
  const Eigen::Matrix3d c = cross_matrix(w) * double(sign);
  Mat6 p;
  p.topLeftCorner<3, 3>() = 0.5 * pt.cast<cd>();
  p.bottomRightCorner<3, 3>() = 0.5 * pt.cast<cd>();
  p.topRightCorner<3, 3>() = -0.5 * c.cast<cd>();
  p.bottomLeftCorner<3, 3>() = 0.5 * c.cast<cd>();
  return p;
}

inline Mat6 positive_energy_projector(const Vec3& k) { return energy_projector(k, +1); }
inline Mat6 negative_energy_projector(const Vec3& k) { return energy_projector(k, -1); }

/// S_i(k) = (Ω·ŵ) ŵ_i.
inline std::array<Mat6, 3> spin_matrices(const Vec3& k) {
  const Vec3 w = unit_direction(k);
  const Mat6 ow = omega_dot(w);
  return {ow * w[0], ow * w[1], ow * w[2]};
}

/// Sorted eigenvalues of Ω·n for a unit vector n.
inline std::array<double, 6> omega_direction_spectrum(const Vec3& n) {
  if (!std::isfinite(n.norm()) || std::abs(n.norm() - 1.0) > 1e-12)
    throw DomainError("direction must be a unit vector");
  Eigen::SelfAdjointEigenSolver<Mat6> es(omega_dot(n));
  std::array<double, 6> ev;
  for (int i = 0; i < 6; ++i) ev[i] = es.eigenvalues()[i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// max |[H(k), Ω_i] + hbar c (Γ0 Γ×k)_i| over i and entries.
inline double commutator_H_Omega_residual(const Vec3& k, const Units& u = {}) {
  const auto& g = gammas();
  const Mat6 h = hamiltonian_matrix(k, u);
  double r = 0;
  for (int i = 0; i < 3; ++i) {
    Mat6 gxk = Mat6::Zero();
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l)
        if (int e = levi_civita(i, j, l)) gxk += double(e) * g.gamma[j] * k[l];
    Mat6 rhs = -u.hbar * u.c() * g.gamma0 * gxk;
    r = std::max(r, max_abs(h * g.omega[i] - g.omega[i] * h - rhs));
  }
  return r;
}

}  // namespace dpl
