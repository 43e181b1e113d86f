#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "dpl/algebra.hpp"
#include "dpl/error.hpp"
#include "dpl/fft.hpp"

namespace dpl {

// Uniform n^3 momentum grid with spacing dk. Bins are stored in FFT order:
// storage index j on an axis holds signed frequency s = j < n/2 ? j : j - n.
// Flat index is ix + n*(iy + n*iz). The dual position grid has the same
// layout with spacing dx = L/n, L = 2π/dk.
class KGrid {
 public:
  KGrid() = default;

  KGrid(int n, double dk) : n_(n), dk_(dk) {
    if (n < 8 || (n & (n - 1)) != 0) throw DomainError("grid size must be a power of two >= 8");
    if (!(dk > 0.0) || !std::isfinite(dk)) throw DomainError("dk must be positive and finite");
  }

  int n() const noexcept { return n_; }
  double dk() const noexcept { return dk_; }
  double length() const noexcept { return 2.0 * std::numbers::pi / dk_; }
  double dx() const noexcept { return length() / n_; }
  std::size_t size() const noexcept { return std::size_t(n_) * n_ * n_; }
  double k_volume() const noexcept { return dk_ * dk_ * dk_; }
  double x_volume() const noexcept { return dx() * dx() * dx(); }
  // Largest |k| on the grid (corner bin).
  double k_max() const noexcept { return std::sqrt(3.0) * (n_ / 2) * dk_; }

  int signed_index(int j) const noexcept { return j < n_ / 2 ? j : j - n_; }
  int storage_index(int s) const noexcept { return s >= 0 ? s : s + n_; }

  std::size_t flat(int ix, int iy, int iz) const noexcept {
    return std::size_t(ix) + std::size_t(n_) * (std::size_t(iy) + std::size_t(n_) * std::size_t(iz));
  }

  std::array<int, 3> unflat(std::size_t f) const noexcept {
    const auto n = std::size_t(n_);
    return {int(f % n), int((f / n) % n), int(f / (n * n))};
  }

  std::array<int, 3> signed_triple(std::size_t f) const noexcept {
    auto [ix, iy, iz] = unflat(f);
    return {signed_index(ix), signed_index(iy), signed_index(iz)};
  }

  /// Flat index of the bin at signed frequencies (sx, sy, sz).
  std::size_t flat_signed(int sx, int sy, int sz) const noexcept {
    return flat(storage_index(sx), storage_index(sy), storage_index(sz));
  }

  Vec3 k_at(std::size_t f) const noexcept {
    auto s = signed_triple(f);
    return {s[0] * dk_, s[1] * dk_, s[2] * dk_};
  }

  Vec3 x_at(std::size_t f) const noexcept {
    auto s = signed_triple(f);
    const double h = dx();
    return {s[0] * h, s[1] * h, s[2] * h};
  }

  /// Flat index of -k; the Nyquist row maps to itself.
  std::size_t negated(std::size_t f) const noexcept {
    auto [ix, iy, iz] = unflat(f);
    auto neg = [n = n_](int j) { return j == 0 ? 0 : n - j; };
    return flat(neg(ix), neg(iy), neg(iz));
  }

  bool is_dc(std::size_t f) const noexcept { return f == 0; }

  bool is_nyquist(std::size_t f) const noexcept {
    auto [ix, iy, iz] = unflat(f);
    const int h = n_ / 2;
    return ix == h || iy == h || iz == h;
  }

  /// True on the outermost shell of the signed index cube.
  bool on_boundary(std::size_t f) const noexcept {
    auto s = signed_triple(f);
    for (int a : s)
      if (a == -n_ / 2 || a == n_ / 2 - 1) return true;
    return false;
  }

  friend bool operator==(const KGrid&, const KGrid&) = default;

 private:
  int n_ = 8;
  double dk_ = 1.0;
};

enum class Representation { momentum, position };

template <std::size_t N>
struct Field {
  using value_type = std::array<cd, N>;

  KGrid grid;
  Representation rep = Representation::momentum;
  double time = 0.0;
  std::vector<value_type> values;

  Field() = default;
  Field(const KGrid& g, Representation r, double t = 0.0) : grid(g), rep(r), time(t), values(g.size()) {
    for (auto& v : values) v.fill(cd{});
  }

  std::size_t size() const noexcept { return values.size(); }
  value_type& operator[](std::size_t i) { return values[i]; }
  const value_type& operator[](std::size_t i) const { return values[i]; }
};

using ScalarField = Field<1>;
using Field3C = Field<3>;
using Field6C = Field<6>;

/// Real scalar field with the grid's layout.
struct RealField {
  KGrid grid;
  std::vector<double> values;
};

/// Real 3-vector field with the grid's layout.
struct RealField3 {
  KGrid grid;
  std::vector<Vec3> values;
};

inline CVec3 as_vec(const std::array<cd, 3>& a) { return {a[0], a[1], a[2]}; }
inline CVec3 upper(const std::array<cd, 6>& a) { return {a[0], a[1], a[2]}; }
inline CVec3 lower(const std::array<cd, 6>& a) { return {a[3], a[4], a[5]}; }
inline CVec6 as_vec(const std::array<cd, 6>& a) {
  CVec6 v;
  for (int i = 0; i < 6; ++i) v[i] = a[i];
  return v;
}

inline std::array<cd, 3> to_array(const CVec3& v) { return {v[0], v[1], v[2]}; }
inline std::array<cd, 6> to_array(const CVec6& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }
inline std::array<cd, 6> join(const CVec3& u, const CVec3& l) { return {u[0], u[1], u[2], l[0], l[1], l[2]}; }

template <std::size_t N>
double norm_squared(const std::array<cd, N>& a) {
  double s = 0;
  for (const auto& z : a) s += std::norm(z);
  return s;
}

/// Σ |f|² times the bin volume of the field's representation.
template <std::size_t N>
double integral_norm(const Field<N>& f) {
  double s = 0;
  for (const auto& v : f.values) s += norm_squared(v);
  return s * (f.rep == Representation::momentum ? f.grid.k_volume() : f.grid.x_volume());
}

template <std::size_t N>
double max_amplitude(const Field<N>& f) {
  double m = 0;
  for (const auto& v : f.values) m = std::max(m, norm_squared(v));
  return std::sqrt(m);
}

inline double fourier_prefactor() { return std::pow(2.0 * std::numbers::pi, -1.5); }

/// Ψ(x) = (2π)^{-3/2} Σ_k ψ(k) e^{ik·x} dk³.
template <std::size_t N>
Field<N> to_position(const Field<N>& f) {
  if (f.rep != Representation::momentum) throw RepresentationError("to_position expects a momentum-space field");
  Field<N> out = f;
  out.rep = Representation::position;
  fft::transform(out.values, f.grid.n(), FFTW_BACKWARD);
  const double s = fourier_prefactor() * f.grid.k_volume();
  for (auto& v : out.values)
    for (auto& z : v) z *= s;
  return out;
}

/// ψ(k) = (2π)^{-3/2} Σ_x Ψ(x) e^{-ik·x} dx³.
template <std::size_t N>
Field<N> to_momentum(const Field<N>& f) {
  if (f.rep != Representation::position) throw RepresentationError("to_momentum expects a position-space field");
  Field<N> out = f;
  out.rep = Representation::momentum;
  fft::transform(out.values, f.grid.n(), FFTW_FORWARD);
  const double s = fourier_prefactor() * f.grid.x_volume();
  for (auto& v : out.values)
    for (auto& z : v) z *= s;
  return out;
}

template <std::size_t N>
struct GradientResult {
  std::array<Field<N>, 3> d;
  bool boundary_warning = false;
  double boundary_ratio = 0.0;  // max boundary amplitude / peak amplitude
};

/// max amplitude on the outermost index shell relative to the peak.
template <std::size_t N>
double boundary_ratio(const Field<N>& f) {
  double peak = 0, edge = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = norm_squared(f[i]);
    peak = std::max(peak, a);
    if (f.grid.on_boundary(i)) edge = std::max(edge, a);
  }
  return peak > 0 ? std::sqrt(edge / peak) : 0.0;
}

// ∇_k by second-order centered differences; first-order one-sided on the
// outermost shell. Flags a warning when the field has not decayed to 1e-8
// of its peak there.
template <std::size_t N>
GradientResult<N> k_gradient(const Field<N>& f) {
  if (f.rep != Representation::momentum) throw RepresentationError("k_gradient expects a momentum-space field");
  const KGrid& g = f.grid;
  const int n = g.n(), lo = -n / 2, hi = n / 2 - 1;
  GradientResult<N> r;
  for (int a = 0; a < 3; ++a) r.d[a] = Field<N>(g, Representation::momentum, f.time);

  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto s = g.signed_triple(i);
    for (int a = 0; a < 3; ++a) {
      auto sp = s, sm = s;
      double h = 2.0 * g.dk();
      if (s[a] == lo) {
        sm = s;
        sp[a] += 1;
        h = g.dk();
      } else if (s[a] == hi) {
        sp = s;
        sm[a] -= 1;
        h = g.dk();
      } else {
        sp[a] += 1;
        sm[a] -= 1;
      }
      const auto& fp = f[g.flat_signed(sp[0], sp[1], sp[2])];
      const auto& fm = f[g.flat_signed(sm[0], sm[1], sm[2])];
      auto& out = r.d[a][i];
      for (std::size_t c = 0; c < N; ++c) out[c] = (fp[c] - fm[c]) / h;
    }
  }
  r.boundary_ratio = boundary_ratio(f);
  r.boundary_warning = r.boundary_ratio > 1e-8;
  return r;
}

/// Wavevector used for spectral derivatives: Nyquist components are zeroed so
/// derivatives of real fields stay real.
inline Vec3 derivative_k(const KGrid& g, std::size_t f) {
  auto [ix, iy, iz] = g.unflat(f);
  Vec3 k = g.k_at(f);
  const int h = g.n() / 2;
  if (ix == h) k[0] = 0;
  if (iy == h) k[1] = 0;
  if (iz == h) k[2] = 0;
  return k;
}

/// ∂_a F for a = x, y, z computed spectrally.
template <std::size_t N>
std::array<Field<N>, 3> spectral_gradient(const Field<N>& F) {
  if (F.rep != Representation::position) throw RepresentationError("spectral_gradient expects a position-space field");
  const Field<N> m = to_momentum(F);
  std::array<Field<N>, 3> out;
  for (int a = 0; a < 3; ++a) {
    Field<N> d = m;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const cd ik = I * derivative_k(F.grid, i)[a];
      for (auto& z : d[i]) z *= ik;
    }
    out[a] = to_position(d);
  }
  return out;
}

inline Field3C spectral_curl(const Field3C& F) {
  if (F.rep != Representation::position) throw RepresentationError("spectral_curl expects a position-space field");
  Field3C m = to_momentum(F);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const CVec3 ik = I * derivative_k(F.grid, i).cast<cd>();
    m[i] = to_array(CVec3(vcross(ik, as_vec(m[i]))));
  }
  return to_position(m);
}

inline ScalarField spectral_divergence(const Field3C& F) {
  if (F.rep != Representation::position)
    throw RepresentationError("spectral_divergence expects a position-space field");
  Field3C m = to_momentum(F);
  ScalarField d(F.grid, Representation::momentum, F.time);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Vec3 k = derivative_k(F.grid, i);
    const CVec3 v = as_vec(m[i]);
    d[i][0] = I * (k[0] * v[0] + k[1] * v[1] + k[2] * v[2]);
  }
  return to_position(d);
}

/// Splits a 6-component field into its two 3-component blocks.
inline std::pair<Field3C, Field3C> split_blocks(const Field6C& f) {
  Field3C u(f.grid, f.rep, f.time), l(f.grid, f.rep, f.time);
  for (std::size_t i = 0; i < f.size(); ++i) {
    u[i] = {f[i][0], f[i][1], f[i][2]};
    l[i] = {f[i][3], f[i][4], f[i][5]};
  }
  return {std::move(u), std::move(l)};
}

inline Field6C join_blocks(const Field3C& u, const Field3C& l) {
  Field6C f(u.grid, u.rep, u.time);
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = {u[i][0], u[i][1], u[i][2], l[i][0], l[i][1], l[i][2]};
  return f;
}

}  // namespace dpl
