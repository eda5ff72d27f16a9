#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "mtlz/builders.hpp"
#include "mtlz/hamiltonian.hpp"

using namespace mtlz;

namespace {

std::vector<std::pair<std::string, MTLZFamily>> all_families() {
  std::vector<std::pair<std::string, MTLZFamily>> out;
  SquareParams sp;
  sp.theta = 0.3;
  out.emplace_back("square", build_square(sp));
  for (auto t : {std::array<double, 3>{0.5, 0.3, 0.4}, std::array<double, 3>{-0.5, -0.3, 0.4},
                 std::array<double, 3>{0.1, -0.6, 0.25}}) {
    CubeParams cp;
    cp.tau = t;
    cp.gamma = {0.3, 0.45, 0.2};
    out.emplace_back("cube", build_cube(cp));
  }
  for (auto s : {std::array<double, 6>{0.3, 0.2, 0.1, 0.25, 0.15, 0.05},
                 std::array<double, 6>{-0.2, 0.1, 0.3, 0.05, -0.15, 0.2}}) {
    Hypercube4Params hp;
    hp.tau = s;
    hp.gamma = {0.3, 0.2, 0.5, 0.4};
    out.emplace_back("hypercube4", build_hypercube4(hp));
  }
  FanParams fp;
  fp.m = 4;
  fp.l = 2;
  fp.theta = {0.1, 0.2, 0.3};
  fp.gamma = {1, 2, 1.5, 1.5};
  out.emplace_back("fan", build_fan(fp));
  out.emplace_back("gm2", build_gamma_magnet({{0.5, 1.7}, {0.14, 0.15}, 1.0}));
  out.emplace_back("gm3", build_gamma_magnet({{0.5, 1.7, 4.1}, {0.14, 0.15, 0.17}, 1.0}));
  out.emplace_back("gm4", build_gamma_magnet({{0.5, 1.7, 4.1, 7.1}, {0.14, 0.15, 0.17, 0.15}, 1.0}));
  return out;
}

std::vector<double> sorted_eigs(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return v;
}

}  // namespace

TEST(Hamiltonian, IntegrabilityResidualsForEveryFamily) {
  std::mt19937 rng(5);
  std::normal_distribution<double> n(0, 2);
  for (auto& [name, f] : all_families()) {
    auto hf = assemble(f);
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXd x(hf.M);
      for (int i = 0; i < hf.M; ++i) x(i) = n(rng);
      auto r = integrability_residuals(hf, x);
      EXPECT_LT(r.relative(), 1e-12) << name;
      EXPECT_LT(r.coupling_commutator, 1e-12 * hf.scale() * hf.scale()) << name;
      EXPECT_LT(r.slope_commutator, 1e-12 * hf.scale() * hf.scale()) << name;
    }
  }
}

TEST(Hamiltonian, PerturbedCouplingBreaksCommutation) {
  SquareParams sp;
  sp.theta = 0.3;
  auto hf = assemble(build_square(sp));
  Eigen::VectorXd x(2);
  x << 0.4, -1.1;
  double base = integrability_residuals(hf, x).commutator;
  for (double d : {1e-3, 1e-4}) {
    auto broken = hf;
    broken.A[0](1, 2) += d;
    broken.A[0](2, 1) += d;
    double c = integrability_residuals(broken, x).commutator;
    EXPECT_LT(base, 1e-13);
    // Linear response: the commutator scales with the perturbation.
    EXPECT_GT(c, 0.05 * d);
    EXPECT_LT(c, 20 * d);
  }
}

TEST(Hamiltonian, SingleDirectionIsVacuous) {
  HamiltonianFamily hf;
  hf.N = 2;
  hf.M = 1;
  hf.B = {Eigen::Vector2d(1, -1)};
  hf.A = {Eigen::Matrix2d{{0, 0.3}, {0.3, 0}}};
  auto r = integrability_residuals(hf, Eigen::VectorXd::Constant(1, 0.5));
  EXPECT_EQ(r.commutator, 0.0);
  EXPECT_EQ(r.curl, 0.0);
}

TEST(Hamiltonian, AssembledSquareHasZerosOnNonEdges) {
  SquareParams sp;
  sp.theta = 0.4;
  sp.a = {0.6, 0.2};
  sp.b = {-0.3, 0.9};
  auto hf = assemble(build_square(sp));
  Eigen::VectorXd x(2);
  x << 1.3, 0.2;
  for (int j = 0; j < 2; ++j) {
    auto h = hf.H(j, x);
    EXPECT_EQ(h(0, 2), 0.0);
    EXPECT_EQ(h(1, 3), 0.0);
    EXPECT_NE(h(0, 1), 0.0);
    EXPECT_TRUE(h.isApprox(h.transpose(), 0.0));
  }
  EXPECT_EQ(zero_coupling_count(hf), 2);
}

TEST(Hamiltonian, CubeAtZeroRapidityIsKroneckerSum) {
  CubeParams cp;
  cp.gamma = {0.3, 0.45, 0.2};
  auto f = build_cube(cp);
  auto hf = assemble(f);
  Eigen::VectorXd x(3);
  x << 0.7, -0.2, 1.4;
  Eigen::MatrixXd h1 = hf.H(0, x);
  // Only direction 1 couples along bit 0 at zero rapidity; bits 1 and 2 contribute pure diagonals.
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(8, 8);
  for (int a = 0; a < 8; ++a) expect(a, a) = h1(a, a);
  for (int a = 0; a < 8; ++a)
    if (!(a & 1)) expect(a, a + 1) = expect(a + 1, a) = h1(0, 1);
  EXPECT_LT((h1 - expect).norm(), 1e-14);
  // Diagonal separates into a sum over spins.
  for (int a = 0; a < 8; ++a) {
    double sum = h1(0, 0);
    for (int k = 0; k < 3; ++k)
      if (a >> k & 1) sum += h1(1 << k, 1 << k) - h1(0, 0);
    EXPECT_NEAR(h1(a, a), sum, 1e-13);
  }
  EXPECT_EQ(zero_coupling_count(hf), 16);
}

TEST(Hamiltonian, GammaMagnetCounts) {
  auto hf = assemble(build_gamma_magnet({{0.5, 1.7, 4.1, 7.1}, {0.14, 0.15, 0.17, 0.15}, 1.0}));
  int nonzero = 0;
  auto h = restrict(hf, TimePath{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)}).at(0.3);
  for (int a = 0; a < 16; ++a)
    for (int b = a + 1; b < 16; ++b) nonzero += h(a, b) != 0;
  EXPECT_EQ(nonzero, 32);
  EXPECT_EQ(zero_coupling_count(hf), 88);
  for (int n = 1; n <= 5; ++n) {
    std::vector<double> beta, g;
    for (int k = 0; k < n; ++k) beta.push_back(0.5 + k), g.push_back(0.1 + 0.01 * k);
    auto z = zero_coupling_count(assemble(build_gamma_magnet({beta, g, 0.0})));
    int N = 1 << n;
    EXPECT_EQ(z, N * (N - 1) / 2 - n * N / 2);
  }
}

TEST(Hamiltonian, RestrictMatchesDirectEvaluation) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-5, 5);
  CubeParams cp;
  cp.tau = {0.5, 0.3, 0.4};
  auto hf = assemble(build_cube(cp));
  TimePath path{Eigen::Vector3d(0.3, -0.8, 0.5), Eigen::Vector3d(0.1, 0.2, -0.4)};
  auto h = restrict(hf, path);
  for (int k = 0; k < 100; ++k) {
    double t = u(rng);
    Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(8, 8);
    Eigen::VectorXd x = path.at(t);
    for (int i = 0; i < 3; ++i) direct += path.v(i) * hf.H(i, x);
    EXPECT_LT((h.at(t) - direct).cwiseAbs().maxCoeff(), 1e-14 * std::max(1.0, direct.norm()));
  }
  // Axis path: H(t) = H_1(t, 0, 0).
  auto axis = restrict(hf, TimePath{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d::Zero()});
  Eigen::Vector3d x(2.5, 0, 0);
  EXPECT_LT((axis.at(2.5) - hf.H(0, x)).norm(), 1e-14);
  EXPECT_THROW(restrict(hf, TimePath{Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()}), DomainError);
  EXPECT_THROW(restrict(hf, TimePath{Eigen::Vector2d(1, 0), Eigen::Vector2d::Zero()}), DimensionError);
}

TEST(Hamiltonian, GammaMagnetPathReproducesSpinStrings) {
  const std::vector<double> beta{0.5, 1.7, 4.1}, g{0.14, 0.15, 0.17};
  const double eps = 1.0;
  auto hf = assemble(build_gamma_magnet({beta, g, eps}));
  auto h = restrict(hf, TimePath{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, eps)});
  // sum_j [beta_j t sz_j + g_j (prod_{k<j} sz_k) sx_j] + eps prod sz
  auto sz = [](int a, int j) { return (a >> j & 1) ? -1.0 : 1.0; };
  for (double t : {-2.0, 0.3, 1.7}) {
    Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(8, 8);
    for (int a = 0; a < 8; ++a) {
      double prod = 1;
      for (int j = 0; j < 3; ++j) {
        ref(a, a) += beta[j] * t * sz(a, j);
        prod *= sz(a, j);
        double string = 1;
        for (int k = 0; k < j; ++k) string *= sz(a, k);
        ref(a ^ (1 << j), a) = g[j] * string;
      }
      ref(a, a) += eps * prod;
    }
    EXPECT_LT((h.at(t) - ref).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Hamiltonian, GaugeShiftMovesAllEigenvaluesEqually) {
  CubeParams cp;
  cp.tau = {0.5, 0.3, 0.4};
  auto hf = assemble(build_cube(cp));
  auto h = restrict(hf, TimePath{Eigen::Vector3d(0.3, -0.8, 0.5), Eigen::Vector3d(0.1, 0.2, -0.4)});
  auto hs = h.gauge_shifted(0.7, -1.3);
  for (double t : {-3.0, -0.5, 0.0, 1.1, 4.0}) {
    auto e0 = sorted_eigs(h.at(t)), e1 = sorted_eigs(hs.at(t));
    for (size_t k = 0; k < e0.size(); ++k) EXPECT_NEAR(e1[k] - e0[k], 0.7 * t - 1.3, 1e-12);
  }
}

TEST(Hamiltonian, CanonicalFourStateSpectrumIsOddInTime) {
  // spec H(t; e1) = -spec H(-t; -e1); at e1 = 0 the spectrum at t is minus the spectrum at -t.
  FourStateCanonical c;
  c.beta1 = 0.8;
  c.beta2 = -0.35;
  c.g1 = 0.2;
  c.g2 = -0.3;
  for (double e1 : {0.0, 0.45}) {
    FourStateCanonical flipped = c;
    c.e1 = e1;
    flipped.e1 = -e1;
    for (double t : {-2.0, -0.4, 0.0, 0.9, 3.0}) {
      auto plus = sorted_eigs(c.at(t)), minus = sorted_eigs(flipped.at(-t));
      for (auto& x : minus) x = -x;
      std::sort(minus.begin(), minus.end());
      for (int k = 0; k < 4; ++k) EXPECT_NEAR(plus[k], minus[k], 1e-13);
    }
  }
}

TEST(Hamiltonian, SeparableSpinsIsKroneckerSum) {
  auto h = separable_spins({0.5, 1.7}, {0.14, 0.15}, {0.2, -0.1});
  auto lz = [](double b, double g, double e, double t) {
    Eigen::Matrix2d m;
    m << b * t + e, g, g, -b * t - e;
    return m;
  };
  for (double t : {-1.0, 0.5}) {
    Eigen::Matrix2d h1 = lz(0.5, 0.14, 0.2, t), h2 = lz(1.7, 0.15, -0.1, t);
    Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
    // Spin 1 on bit 0: index a = b0 + 2 b1.
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if ((a >> 1) == (b >> 1)) k(a, b) += h1(a & 1, b & 1);
        if ((a & 1) == (b & 1)) k(a, b) += h2(a >> 1, b >> 1);
      }
    EXPECT_LT((h.at(t) - Eigen::MatrixXd(k)).norm(), 1e-14);
  }
  EXPECT_EQ(zero_coupling_count(h), 2);
}
