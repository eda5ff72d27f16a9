#include <gtest/gtest.h>

#include <cmath>

#include "mtlz/builders.hpp"
#include "mtlz/spectrum.hpp"

using namespace mtlz;

namespace {

const std::vector<double> kBeta{0.5, 1.7, 4.1, 7.1};
const std::vector<double> kG{0.14, 0.15, 0.17, 0.15};

LinearHamiltonian gamma_magnet_h1(double coupling_factor) {
  std::vector<double> g;
  for (double x : kG) g.push_back(coupling_factor * x);
  auto f = build_gamma_magnet({kBeta, g, 1.0});
  return restrict(assemble(f), *f.default_path);
}

LinearHamiltonian two_level(double beta, double g) {
  LinearHamiltonian h;
  h.A = Eigen::Matrix2d{{0, g}, {g, 0}};
  h.b = Eigen::Vector2d(beta, -beta);
  return h;
}

}  // namespace

TEST(Spectrum, TwoLevelAvoidedAndExact) {
  auto s = scan_spectrum(two_level(1.0, 0.2));
  EXPECT_EQ(s.exact_pair_count(), 0);
  ASSERT_EQ(s.avoided.size(), 1u);
  EXPECT_NEAR(s.avoided[0].t, 0.0, 1e-10);
  EXPECT_NEAR(s.avoided[0].gap, 0.4, 1e-12);

  auto e = scan_spectrum(two_level(1.0, 0.0));
  ASSERT_EQ(e.exact.size(), 1u);
  EXPECT_EQ(e.exact_pair_count(), 1);
  EXPECT_NEAR(e.exact[0].t, 0.0, 1e-12);
}

TEST(Spectrum, ThreeFoldPointCountsThreePairs) {
  LinearHamiltonian h;
  h.A = Eigen::Matrix3d::Zero();
  h.b = Eigen::Vector3d(1.0, 0.0, -1.0);
  h.A.diagonal() << -0.5, 0.0, 0.5;  // lines meet at t = 0.5
  auto s = scan_spectrum(h);
  ASSERT_EQ(s.exact.size(), 1u);
  EXPECT_EQ(s.exact[0].levels, 3);
  EXPECT_EQ(s.exact_pair_count(), 3);
  EXPECT_NEAR(s.exact[0].t, 0.5, 1e-9);
}

TEST(Spectrum, FixedRangeIsHonoured) {
  ScanOptions o;
  o.range = std::make_pair(-3.0, 2.0);
  auto s = scan_spectrum(two_level(1.0, 0.1), o);
  EXPECT_DOUBLE_EQ(s.t.front(), -3.0);
  EXPECT_DOUBLE_EQ(s.t.back(), 2.0);
  EXPECT_EQ(s.eigenvalues.cols(), 2);
  for (long i = 0; i < s.eigenvalues.rows(); ++i) EXPECT_LE(s.eigenvalues(i, 0), s.eigenvalues(i, 1));
  o.range = std::make_pair(1.0, 1.0);
  EXPECT_THROW(scan_spectrum(two_level(1.0, 0.1), o), DomainError);
}

TEST(Spectrum, GammaMagnetFourSpinsHas88ExactCrossings) {
  auto s = scan_spectrum(gamma_magnet_h1(1.0));
  EXPECT_EQ(s.exact_pair_count(), 88);
  EXPECT_TRUE(s.unconverged.empty());
}

TEST(Spectrum, TenfoldCouplingsLoseCrossings) {
  auto s = scan_spectrum(gamma_magnet_h1(10.0));
  EXPECT_LT(s.exact_pair_count(), 88);
  EXPECT_GT(s.exact_pair_count(), 0);
}

TEST(Spectrum, SeparableFourSpinsHas88ExactCrossings) {
  // eps_i = (-1)^i eps with eps = 1.
  auto h = separable_spins(kBeta, kG, {-1.0, 1.0, -1.0, 1.0});
  auto s = scan_spectrum(h);
  EXPECT_EQ(s.exact_pair_count(), 88);
  // At 10x couplings some single-spin energy pairs e_i(t) = e_j(t) lose their real roots.
  // Oracle: sign changes of all 120 configuration-energy differences on a dense grid gives 62.
  std::vector<double> g10;
  for (double x : kG) g10.push_back(10 * x);
  EXPECT_EQ(scan_spectrum(separable_spins(kBeta, g10, {-1.0, 1.0, -1.0, 1.0})).exact_pair_count(), 62);
}

TEST(Spectrum, SmallCouplingsMatchZeroCouplingCount) {
  SquareParams sp;
  sp.a = {0.7, -0.4};
  sp.b = {0.2, 1.1};
  sp.theta = 0.3;
  auto sq = assemble(build_square(sp));
  auto hs = restrict(sq, TimePath{Eigen::Vector2d(1.0, 0.3), Eigen::Vector2d(0.1, 0.5)}).scaled_couplings(0.1);
  EXPECT_EQ(scan_spectrum(hs).exact_pair_count(), zero_coupling_count(sq));

  CubeParams cp;
  cp.tau = {0.5, 0.3, 0.4};
  cp.gamma = {0.3, 0.45, 0.2};
  auto cube = assemble(build_cube(cp));
  auto hc = restrict(cube, TimePath{Eigen::Vector3d(0.9, 0.35, -0.6), Eigen::Vector3d(1.0, 2.0, -3.0)})
                .scaled_couplings(0.1);
  EXPECT_EQ(scan_spectrum(hc).exact_pair_count(), 16);

  EXPECT_EQ(scan_spectrum(gamma_magnet_h1(0.1)).exact_pair_count(), 88);
}

TEST(Spectrum, GaugeShiftKeepsCrossingTimes) {
  auto h = gamma_magnet_h1(1.0);
  auto a = scan_spectrum(h);
  ScanOptions o;
  o.range = std::make_pair(a.t_min, a.t_max);
  auto b = scan_spectrum(h.gauge_shifted(0.3, -2.0), o);
  ASSERT_EQ(a.exact.size(), b.exact.size());
  for (size_t i = 0; i < a.exact.size(); ++i) {
    EXPECT_NEAR(a.exact[i].t, b.exact[i].t, 1e-8);
    EXPECT_EQ(a.exact[i].levels, b.exact[i].levels);
  }
}
