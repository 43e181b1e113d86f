#include <gtest/gtest.h>

#include "dpl/observables.hpp"

using namespace dpl;

namespace {

ModeSpec mode(Vec3 k0, double sigma, Polarization pol, ModeKind kind = ModeKind::gaussian, int charge = 0) {
  ModeSpec m;
  m.kind = kind;
  m.k0 = k0;
  m.sigma_k = sigma;
  m.polarization = pol;
  m.vortex_charge = charge;
  return m;
}

double max_gap(const std::vector<NamedGap>& gaps) {
  double m = 0;
  for (const auto& g : gaps) m = std::max(m, g.gap);
  return m;
}

}  // namespace

TEST(Observables, PlaneWaveHelicityGivesSpinAlongK) {
  const KGrid g(16, 0.5);
  const Vec3 k0(1.0, 0.5, 1.5);
  for (int s : {1, -1}) {
    const PhotonState st = synthesize({mode(k0, 0, Helicity{s}, ModeKind::plane)}, g);
    EXPECT_LT((spin_canonical(st).value - s * k0.normalized()).norm(), 1e-13);
  }
}

TEST(Observables, LinearPolarizationCarriesNoSpin) {
  const KGrid g(16, 0.5);
  const PhotonState st = synthesize({mode({0, 0, 2}, 0.5, Vec3(0, 1, 0))}, g);
  for (const auto& e : {spin_canonical(st), spin_projected(st), spin_cross(st, Block::upper)})
    EXPECT_LT(e.value.norm(), 1e-14);
}

TEST(Observables, SpinFormulasAgreeOnTransverseStates) {
  const KGrid g(16, 0.5);
  const PhotonState st =
      synthesize({mode({0, 0, 2}, 0.5, Helicity{1}), mode({2, 0, 0}, 0.5, Vec3(0, 1, 1))}, g);
  const ObservableReport r = observe(st, false);
  EXPECT_LT(r.max_spin_discrepancy, 1e-10);
  EXPECT_LT(r.max_imag_residue, 1e-12);
}

TEST(Observables, NonTransverseStateSeparatesFormulas) {
  const KGrid g(16, 0.5);
  PhotonState st = synthesize({mode({0, 0, 2}, 0.5, Helicity{1})}, g);
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double w = std::exp(-(g.k_at(i) - Vec3(0, 0, 2)).squaredNorm());
    st.psi[i][0] += cd(0, 0.2) * w;
    st.psi[i][2] += 0.2 * w;
  }
  st = make_state(st.psi);
  EXPECT_GT((spin_canonical(st).value - spin_projected(st).value).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Observables, ProbabilityScalesQuadratically) {
  const KGrid g(16, 0.5);
  const PhotonState st = synthesize({mode({0, 1, 2}, 0.5, Helicity{-1})}, g);
  PhotonState twice = st;
  for (auto& v : twice.psi.values)
    for (auto& z : v) z *= 2.0;
  const Probability a = probability(st), b = probability(twice);
  EXPECT_NEAR(a.psi, 1.0, 1e-12);
  EXPECT_NEAR(a.upper, 1.0, 1e-12);
  EXPECT_NEAR(a.lower, 1.0, 1e-12);
  EXPECT_NEAR(b.psi, 4.0, 4e-12);
  EXPECT_NEAR(b.momentum_upper, 4.0, 4e-12);
}

TEST(Observables, NoVortexNoOrbitalMomentum) {
  const KGrid g(32, 0.25);
  const PhotonState st = synthesize({mode({0, 0, 2}, 0.5, Vec3(1, 0, 0))}, g);
  EXPECT_LT(std::abs(oam_position(st).value[2]), 1e-10);
  EXPECT_LT(std::abs(oam_momentum(st).value[2]), 1e-10);
}

TEST(Observables, OamRoutesAgreeForVortex) {
  const KGrid g(64, 0.125);
  const PhotonState st = synthesize({mode({0, 0, 2}, 0.5, Vec3(1, 0, 0), ModeKind::vortex, 1)}, g);
  const double lk = oam_momentum(st).value[2], lx = oam_position(st).value[2];
  EXPECT_NEAR(lx, lk, 0.05);
  EXPECT_GT(lx, 0.5);
}

TEST(Observables, SingleHelicityCandidatesCoincide) {
  // For pure helicity σ, F_l = -iσF_u pointwise, so every candidate density agrees.
  const KGrid g(16, 0.5);
  const PhotonState st = synthesize({mode({0, 0, 2}, 0.6, Helicity{1}), mode({2, 0, 0}, 0.6, Helicity{1})}, g);
  const DensityCandidates d = density_candidates(st);
  EXPECT_LT(max_gap({d.spin_gaps[0], d.spin_gaps[1], d.spin_gaps[2]}), 1e-12);
  EXPECT_LT(max_gap(d.prob_gaps), 1e-12);
}

TEST(Observables, MixedHelicityCandidatesDifferButIntegralsAgree) {
  const KGrid g(16, 0.5);
  const PhotonState st = synthesize({mode({0, 0, 2}, 0.6, Helicity{1}), mode({2, 0, 0}, 0.6, Helicity{-1})}, g);
  const DensityCandidates d = density_candidates(st);
  for (const auto& gap : d.spin_gaps) EXPECT_GT(gap.gap, 0.05) << gap.a << "/" << gap.b;
  for (const auto& gap : d.prob_gaps) EXPECT_GT(gap.gap, 0.05) << gap.a << "/" << gap.b;
  EXPECT_LT(d.spin_integral_gap, 1e-10);
  EXPECT_LT(d.prob_integral_gap, 1e-10);
}

TEST(Observables, NonlocalDensityIntegratesToProjectedSpin) {
  const KGrid g(16, 0.5);
  const PhotonState st = synthesize({mode({1, 0, 2}, 0.5, Helicity{1}), mode({0, -2, 0}, 0.5, Vec3(1, 0, 1))}, g);
  const NonlocalSpinDensity s = nonlocal_spin_density(st);
  EXPECT_LT(s.integral_gap, 1e-12);
}

TEST(Observables, PointwiseGapMetric) {
  EXPECT_DOUBLE_EQ(pointwise_gap(std::vector<double>{1, -2}, std::vector<double>{1, -1}), 0.5);
  EXPECT_DOUBLE_EQ(pointwise_gap(std::vector<double>{0, 0}, std::vector<double>{0, 0}), 0.0);
  EXPECT_TRUE(std::isinf(pointwise_gap(std::vector<double>{0}, std::vector<double>{1})));
}
