#include <gtest/gtest.h>

#include <cmath>

#include "mtlz/builders.hpp"
#include "mtlz/propagate.hpp"

using namespace mtlz;

namespace {

LinearHamiltonian two_level(double beta, double g) {
  LinearHamiltonian h;
  h.A = Eigen::Matrix2d{{0, g}, {g, 0}};
  h.b = Eigen::Vector2d(beta, -beta);
  return h;
}

Eigen::MatrixXd lz2(double p) {
  Eigen::MatrixXd m(2, 2);
  m << p, 1 - p, 1 - p, p;
  return m;
}

}  // namespace

TEST(Propagate, TwoLevelLandauZener) {
  // P_stay = exp(-2 pi g^2 / |beta_1 - beta_2|) = exp(-0.04 pi).
  const double exact = std::exp(-2 * M_PI * 0.04 / 2);
  EXPECT_NEAR(exact, 0.8819, 1e-4);
  PropagationConfig cfg;
  cfg.T = 60;
  auto r = propagate(two_level(1.0, 0.2), cfg);
  EXPECT_NEAR(r.P(0, 0), exact, 1e-4);
  EXPECT_NEAR(r.P(1, 1), exact, 1e-4);
  EXPECT_NEAR(r.P(1, 0), 1 - exact, 1e-4);
  EXPECT_LT(r.unitarity_defect, 1e-8);
  EXPECT_LT(r.max_error(), 1e-4);
  EXPECT_LE(std::abs(r.P(0, 0) - exact), std::max(r.max_error(), 1e-6) * 10);
}

TEST(Propagate, DiabaticFrameAgrees) {
  PropagationConfig cfg;
  cfg.T = 30;
  auto a = propagate(two_level(1.0, 0.3), cfg);
  cfg.frame = Frame::Diabatic;
  auto b = propagate(two_level(1.0, 0.3), cfg);
  EXPECT_LT((a.P - b.P).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Propagate, DecoupledIsIdentity) {
  LinearHamiltonian h;
  h.A = Eigen::Matrix3d::Zero();
  h.A.diagonal() << 0.3, -0.1, 0.2;
  h.b = Eigen::Vector3d(1.0, -0.5, 0.2);
  auto r = propagate(h);
  EXPECT_LT((r.P - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(r.max_error(), 1e-14);
}

TEST(Propagate, Errors) {
  PropagationConfig cfg;
  cfg.T = -1;
  EXPECT_THROW(propagate(two_level(1, 0.2), cfg), DomainError);
  cfg.T = 10;
  cfg.rtol = 0.1;
  EXPECT_THROW(propagate(two_level(1, 0.2), cfg), DomainError);
  // A window this short cannot separate the levels.
  PropagationConfig tiny;
  tiny.T = 0.05;
  EXPECT_THROW(propagate(two_level(1, 2.0), tiny), ConvergenceError);
}

TEST(Propagate, CubeAtZeroRapidityIsDirectProduct) {
  CubeParams cp;
  cp.gamma = {0.03, 0.05, 0.08};
  auto f = build_cube(cp);
  auto h = restrict(assemble(f), TimePath{Eigen::Vector3d(1.0, 0.8, 0.6), Eigen::Vector3d(0.4, -0.7, 0.2)});
  PropagationConfig cfg;
  cfg.T = 60;
  auto r = propagate(h, cfg);
  // Bit k of a state is spin k; spin k flips with probability 1 - exp(-2 pi gamma_k).
  Eigen::MatrixXd P1 = lz2(std::exp(-2 * M_PI * 0.03)), P2 = lz2(std::exp(-2 * M_PI * 0.05)),
                  P3 = lz2(std::exp(-2 * M_PI * 0.08));
  Eigen::MatrixXd expect(8, 8);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) expect(a, b) = P1(a & 1, b & 1) * P2(a >> 1 & 1, b >> 1 & 1) * P3(a >> 2 & 1, b >> 2 & 1);
  EXPECT_LT((r.P - expect).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LT(r.unitarity_defect, 1e-7);
}

TEST(Propagate, GaugeInvarianceAndSymmetry) {
  CubeParams cp;
  cp.tau = {0.5, 0.3, 0.4};
  cp.gamma = {0.03, 0.05, 0.08};
  auto h = restrict(assemble(build_cube(cp)), TimePath{Eigen::Vector3d(1.0, 0.8, 0.6), Eigen::Vector3d(0.4, -0.7, 0.2)});
  PropagationConfig cfg;
  cfg.T = 40;
  auto a = propagate(h, cfg);
  auto b = propagate(h.gauge_shifted(0.7, -0.4), cfg);
  EXPECT_LT((a.P - b.P).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((a.P - a.P.transpose()).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LT(a.unitarity_defect, 1e-7);
  // Tightening tolerances moves entries by no more than the estimate.
  PropagationConfig tight = cfg;
  tight.rtol /= 10;
  tight.atol /= 10;
  auto c = propagate(h, tight);
  EXPECT_LE((c.P - a.P).cwiseAbs().maxCoeff(), std::max(a.max_error(), 1e-9));
}

TEST(Propagate, ConvergenceStudyTwoLevel) {
  const double exact = std::exp(-2 * M_PI * 0.04 / 2);
  PropagationConfig cfg;
  auto rep = convergence_study(two_level(1.0, 0.2), cfg, {50, 100, 200});
  ASSERT_EQ(rep.P.size(), 3u);
  double e50 = std::abs(rep.P[0](0, 0) - exact), e200 = std::abs(rep.P[2](0, 0) - exact);
  EXPECT_LT(e200, e50 + 1e-9);
  EXPECT_LT(std::abs(rep.extrapolated(0, 0) - exact), 1e-4);

  LinearHamiltonian id;
  id.A = Eigen::Matrix2d::Zero();
  id.b = Eigen::Vector2d(1, -1);
  auto rid = convergence_study(id, cfg, {10, 20});
  for (const auto& P : rid.P) EXPECT_LT((P - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-14);
  EXPECT_THROW(convergence_study(id, cfg, {20, 10}), DomainError);
}

TEST(Propagate, SquareGammaMagnetStabilises) {
  auto f = build_gamma_magnet({{0.5, 1.7}, {0.14, 0.15}, 1.0});
  auto h = restrict(assemble(f), *f.default_path);
  PropagationConfig cfg;
  auto rep = convergence_study(h, cfg, {100, 200, 400});
  EXPECT_LT((rep.P[2] - rep.P[1]).cwiseAbs().maxCoeff(), 1e-4);
  const auto& P = rep.P[2];
  EXPECT_LT((P - P.transpose()).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LT(detail::unitarity_defect(P), 1e-6);
}
