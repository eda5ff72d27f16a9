#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mtlz/forms.hpp"
#include "mtlz/named_graphs.hpp"

using namespace mtlz;

namespace {

OneForm v2(double x, double y) {
  OneForm f(2);
  f << x, y;
  return f;
}

// Square forms in the sink-first labelling: edges 12 and 14 at the sink (vertex 0).
struct SquareData {
  ConnectivityGraph g = graphs::square();
  std::vector<OneForm> forms = std::vector<OneForm>(4);
  std::vector<double> gammas = std::vector<double>(4, 1.0);
};

SquareData square_data(double theta, int p, double g12 = 1.0, double g14 = 1.0) {
  SquareData d;
  auto& g = d.g;
  const double c = p * std::cosh(theta), s = p * std::sinh(theta);
  OneForm a = v2(1, 0), b = v2(0, 1);
  d.forms[g.edge_index(0, 1)] = a;
  d.forms[g.edge_index(0, 3)] = b;
  d.forms[g.edge_index(2, 3)] = c * a + s * b;
  d.forms[g.edge_index(1, 2)] = s * a + c * b;
  d.gammas[g.edge_index(0, 1)] = g12;
  d.gammas[g.edge_index(2, 3)] = g12;
  d.gammas[g.edge_index(0, 3)] = g14;
  d.gammas[g.edge_index(1, 2)] = g14;
  return d;
}

Orientation nonbipartite(const ConnectivityGraph& g) { return Orientation::from_arrows(g, {{1, 0}, {3, 0}, {2, 1}, {2, 3}}); }
Orientation bipartite(const ConnectivityGraph& g) { return Orientation::from_arrows(g, {{0, 1}, {0, 3}, {2, 1}, {2, 3}}); }

}  // namespace

TEST(Forms, WedgeExamples) {
  auto w = wedge(v2(1, 0), v2(0, 1));
  EXPECT_DOUBLE_EQ(w(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(w(1, 0), -1.0);
  EXPECT_DOUBLE_EQ(w(0, 0), 0.0);
  OneForm u = v2(0.3, -1.7);
  EXPECT_EQ(wedge(u, u).norm(), 0.0);
  OneForm a = v2(2.5, -0.75), b = v2(1.25, 3.0);
  EXPECT_DOUBLE_EQ(wedge(a, b)(0, 1), 2.5 * 3.0 - (-0.75) * 1.25);
  EXPECT_DOUBLE_EQ(wedge2(a, b), 8.4375);
  EXPECT_THROW(wedge(v2(1, 0), OneForm::Zero(3)), DimensionError);
}

TEST(Forms, WedgeAntisymmetryProperty) {
  std::mt19937 rng(3);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    OneForm u(4), v(4);
    for (int k = 0; k < 4; ++k) u(k) = n(rng), v(k) = n(rng);
    EXPECT_LT((wedge(u, v) + wedge(v, u)).norm(), 1e-15);
    EXPECT_LT((wedge(u, v) + wedge(u, v).transpose()).norm(), 1e-15);
  }
}

TEST(Forms, Rescale) {
  auto r = rescale(v2(2, 0), 4.0);
  EXPECT_DOUBLE_EQ(r(0), 1.0);
  EXPECT_DOUBLE_EQ(r(1), 0.0);
  EXPECT_EQ(rescale(v2(0, 0), 3.0).norm(), 0.0);
  OneForm A = v2(0.7, -2.3);
  EXPECT_LT((rescale(A, 2.7) * std::sqrt(2.7) - A).norm(), 1e-15);
  EXPECT_THROW(rescale(A, 0.0), DomainError);
  EXPECT_THROW(rescale(A, -1.0), DomainError);
  // Positive homogeneity.
  EXPECT_LT((rescale(3.0 * A, 9.0 * 2.7) - rescale(A, 2.7)).norm(), 1e-15);
}

TEST(Forms, CycleResidualSquare) {
  auto d = square_data(0.3, 1);
  auto cyc = cycle_basis(d.g, nonbipartite(d.g));
  ASSERT_EQ(cyc.size(), 1u);
  EXPECT_LT(cycle_residual(cyc[0], d.forms).norm(), 1e-14);
  auto cb = cycle_basis(d.g, bipartite(d.g));
  EXPECT_GT(cycle_residual(cb[0], d.forms).norm(), 0.1);
  std::vector<OneForm> zeros(4, OneForm::Zero(2));
  EXPECT_EQ(cycle_residual(cyc[0], zeros).norm(), 0.0);
}

TEST(Forms, CycleResidualReversalFlipsSign) {
  auto d = square_data(0.4, 1);
  auto o = nonbipartite(d.g);
  std::vector<OneForm> perturbed = d.forms;
  perturbed[0] *= 1.1;
  auto c = cycle_basis(d.g, o)[0];
  Cycle rev = c;
  for (auto& x : rev.coeff) x = -x;
  EXPECT_LT((cycle_residual(c, perturbed) + cycle_residual(rev, perturbed)).norm(), 1e-15);
  EXPECT_GT(cycle_residual(c, perturbed).norm(), 1e-3);
}

TEST(Forms, VertexResidualSquare) {
  auto d = square_data(0.3, 1, 1.3, 0.6);
  EXPECT_LT(vertex_residual(d.g, 0, 2, d.forms, d.gammas).norm(), 1e-14);
  EXPECT_LT(vertex_residual(d.g, 1, 3, d.forms, d.gammas).norm(), 1e-14);
  auto broken = d.gammas;
  broken[d.g.edge_index(2, 3)] = 2 * broken[d.g.edge_index(0, 1)];
  EXPECT_GT(vertex_residual(d.g, 1, 3, d.forms, broken).norm(), 1e-2);
  // Adjacent pair of a square: no common neighbour.
  EXPECT_EQ(vertex_residual(d.g, 0, 1, d.forms, d.gammas).norm(), 0.0);
}

TEST(Forms, SolveSquareTransform) {
  auto g = graphs::square();
  auto L = enumerate_four_loops(g).front();
  auto sol = solve_square_transform(g, L, nonbipartite(g), true);
  ASSERT_TRUE(sol.has_value());
  EXPECT_EQ(sol->cls, LoopClass::NonBipartite);
  EXPECT_EQ(sol->r, -1);
  EXPECT_EQ(sol->r_tilde, 1);
  EXPECT_EQ(sol->loop.v[0], 2);  // source
  EXPECT_EQ(sol->loop.v[2], 0);  // sink
  EXPECT_EQ(sol->transform.kind, TransformKind::PseudoOrthogonal);
  EXPECT_TRUE(sol->transform.matrix().isIdentity());

  EXPECT_FALSE(solve_square_transform(g, L, bipartite(g), true).has_value());
  auto embedded = solve_square_transform(g, L, bipartite(g), false);
  ASSERT_TRUE(embedded.has_value());
  EXPECT_EQ(embedded->cls, LoopClass::Bipartite);
  EXPECT_TRUE(embedded->r_free);

  auto invalid = Orientation::from_arrows(g, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  EXPECT_THROW(solve_square_transform(g, L, invalid, true), ConstraintError);
}

TEST(Forms, SolvedSquareSatisfiesDeterminantRelations) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  auto g = graphs::square();
  auto L = enumerate_four_loops(g).front();
  auto sol = *solve_square_transform(g, L, nonbipartite(g), true);
  for (int trial = 0; trial < 50; ++trial) {
    OneForm mu = v2(u(rng), u(rng)), beta = v2(u(rng), u(rng));
    auto T = LoopTransform::rapidity(u(rng), (trial & 1) ? 1 : -1, sol.r_tilde);
    auto [alpha, nu] = T.apply(mu, beta);
    // (alpha ^ nu) = r~ (mu ^ beta) and (nu ^ mu) = r (alpha ^ beta).
    double scale = 1 + std::abs(wedge2(mu, beta)) * std::cosh(2 * std::abs(T.parameter));
    EXPECT_NEAR(wedge2(alpha, nu), sol.r_tilde * wedge2(mu, beta), 1e-13 * scale);
    EXPECT_NEAR(wedge2(nu, mu), sol.r * wedge2(alpha, beta), 1e-13 * scale);
  }
}

TEST(Forms, LoopTransformDeterminants) {
  for (double th : {-1.3, 0.0, 0.4, 2.0})
    for (int p : {1, -1}) {
      auto T = LoopTransform::rapidity(th, p, 1);
      EXPECT_NEAR(T.c() * T.c() - T.s() * T.s(), 1.0, 1e-12 * std::cosh(2 * th));
      EXPECT_NEAR(T.matrix().determinant(), 1.0, 1e-12 * std::cosh(2 * th));
    }
  for (double phi : {0.3, 1.2, 2.5, -0.7})
    for (int r : {1, -1}) {
      auto O = LoopTransform::rotation(phi, r);
      EXPECT_NEAR(std::abs(O.matrix().determinant()), 1.0, 1e-14);
      // The pseudo-orthogonal form reproduces the same four forms.
      OneForm a = v2(0.8, 0.1), b = v2(-0.3, 1.1);
      auto [nu, mu] = O.apply(a, b);
      auto P = O.to_pseudo();
      EXPECT_EQ(P.r, -r);
      auto [alpha2, nu2] = P.apply(mu, b);
      EXPECT_LT((alpha2 - a).norm(), 1e-12);
      EXPECT_LT((nu2 - nu).norm(), 1e-12);
    }
}
