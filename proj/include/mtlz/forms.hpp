#pragma once
// 1-forms, quadratic forms and wedge products on a connectivity graph, and the
// residuals of the cycle and vertex-pair conditions.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mtlz/errors.hpp"
#include "mtlz/graph.hpp"

namespace mtlz {

using OneForm = Eigen::VectorXd;        // coefficients of dx^j
using QuadraticForm = Eigen::MatrixXd;  // symmetric M x M
using WedgeBivector = Eigen::MatrixXd;  // antisymmetric M x M

inline WedgeBivector wedge(const OneForm& u, const OneForm& v) {
  if (u.size() != v.size()) throw DimensionError("wedge: dimension mismatch");
  return u * v.transpose() - v * u.transpose();
}

// Scalar u1 v2 - u2 v1 for planar forms.
inline double wedge2(const OneForm& u, const OneForm& v) {
  if (u.size() != 2 || v.size() != 2) throw DimensionError("wedge2 needs M = 2");
  return u(0) * v(1) - u(1) * v(0);
}

inline QuadraticForm tensor_square(const OneForm& u) { return u * u.transpose(); }

inline OneForm rescale(const OneForm& A, double gamma) {
  if (!(gamma > 0)) throw DomainError("rescale: gamma must be positive");
  return A / std::sqrt(gamma);
}

// |sin| of the angle between u and v; 0 for parallel or zero forms.
inline double form_sine(const OneForm& u, const OneForm& v) {
  double nu = u.norm(), nv = v.norm();
  if (nu == 0 || nv == 0) return 0.0;
  double w2 = 0.5 * wedge(u, v).squaredNorm();
  return std::sqrt(std::max(0.0, w2)) / (nu * nv);
}

// sum_alpha n_alpha Abar^alpha (x) Abar^alpha; forms indexed by edge.
inline QuadraticForm cycle_residual(const Cycle& c, const std::vector<OneForm>& forms) {
  if (forms.size() != c.coeff.size()) throw GraphError("cycle_residual: need one form per edge");
  if (forms.empty()) return QuadraticForm();
  const auto M = forms.front().size();
  QuadraticForm r = QuadraticForm::Zero(M, M);
  for (size_t e = 0; e < forms.size(); ++e) {
    if (!c.coeff[e]) continue;
    if (forms[e].size() != M) throw GraphError("cycle_residual: missing form on edge " + std::to_string(e));
    r += c.coeff[e] * tensor_square(forms[e]);
  }
  return r;
}

// sum_c sqrt(gamma^{ac} gamma^{bc}) Abar^{ac} ^ Abar^{bc}; gammas are |gamma| per edge.
inline WedgeBivector vertex_residual(const ConnectivityGraph& g, int a, int b,
                                     const std::vector<OneForm>& forms,
                                     const std::vector<double>& gammas) {
  if (a == b) throw GraphError("vertex_residual: a == b");
  if (static_cast<int>(forms.size()) != g.n_edges() || static_cast<int>(gammas.size()) != g.n_edges())
    throw GraphError("vertex_residual: need data on every edge");
  const auto M = forms.empty() ? 0 : forms.front().size();
  WedgeBivector r = WedgeBivector::Zero(M, M);
  for (int c : g.common_neighbors(a, b)) {
    int ea = g.edge_index(a, c), eb = g.edge_index(b, c);
    r += std::sqrt(gammas[ea] * gammas[eb]) * wedge(forms[ea], forms[eb]);
  }
  return r;
}

enum class TransformKind { Orthogonal, PseudoOrthogonal };

// Orthogonal:        (x', y') = [[cos phi, r sin phi], [-sin phi, r cos phi]] (x, y)
// PseudoOrthogonal:  (x', y') = p [[cosh th, r sinh th], [sinh th, r cosh th]] (x, y)
struct LoopTransform {
  TransformKind kind = TransformKind::PseudoOrthogonal;
  double parameter = 0.0;  // phi or rapidity theta
  int r = 1;
  int p = 1;

  static LoopTransform rapidity(double theta, int p = 1, int r = 1) {
    return {TransformKind::PseudoOrthogonal, theta, r, p};
  }
  static LoopTransform from_tangent(double tau, int p = 1, int r = 1) {
    if (!(std::abs(tau) < 1)) throw DomainError("rapidity tangent must lie in (-1,1)");
    return rapidity(std::atanh(tau), p, r);
  }
  static LoopTransform rotation(double phi, int r = 1) { return {TransformKind::Orthogonal, phi, r, 1}; }

  double tau() const { return std::tanh(parameter); }
  double c() const { return kind == TransformKind::PseudoOrthogonal ? p * std::cosh(parameter) : std::cos(parameter); }
  double s() const { return kind == TransformKind::PseudoOrthogonal ? p * std::sinh(parameter) : std::sin(parameter); }

  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    if (kind == TransformKind::Orthogonal) {
      double cs = std::cos(parameter), sn = std::sin(parameter);
      m << cs, r * sn, -sn, r * cs;
    } else {
      double ch = std::cosh(parameter), sh = std::sinh(parameter);
      m << p * ch, p * r * sh, p * sh, p * r * ch;
    }
    return m;
  }

  std::pair<OneForm, OneForm> apply(const OneForm& x, const OneForm& y) const {
    Eigen::Matrix2d m = matrix();
    return {m(0, 0) * x + m(0, 1) * y, m(1, 0) * x + m(1, 1) * y};
  }

  // Re-expresses an O(2) relation (nu, mu) = O (alpha, beta) as the pseudo-orthogonal
  // relation (alpha, nu) = P (mu, beta). Undefined when sin phi = 0.
  LoopTransform to_pseudo() const {
    if (kind == TransformKind::PseudoOrthogonal) return *this;
    double sn = std::sin(parameter), cs = std::cos(parameter);
    if (std::abs(sn) < 1e-15) throw DomainError("rotation with sin(phi)=0 has no pseudo-orthogonal form");
    double theta = std::acosh(1.0 / std::abs(sn));
    if (cs < 0) theta = -theta;
    return {TransformKind::PseudoOrthogonal, theta, -r, sn > 0 ? -1 : 1};
  }
};

// Loop relabelled so that the relation reads on named edges.
//  NonBipartite: v = (source a, b, sink c, d), alpha={a,b}, beta={b,c}, mu={c,d}, nu={d,a};
//    (Abar^alpha, Abar^nu) = transform (Abar^mu, Abar^beta) with r~ = 1 and r = -1.
//  Bipartite: v = (a, b, c, d) with b a local sink;
//    (Abar^nu, Abar^mu) = transform (Abar^alpha, Abar^beta), r free.
struct SquareSolution {
  LoopClass cls = LoopClass::Invalid;
  FourLoop loop;
  int alpha = -1, beta = -1, mu = -1, nu = -1;  // edge indices
  LoopTransform transform;
  int r = -1;        // O(2) determinant sign
  int r_tilde = 1;   // pseudo-orthogonal determinant sign
  bool r_free = false;
};

inline FourLoop rotate_loop(const ConnectivityGraph& g, const FourLoop& L, int start) {
  return make_loop(g, L.v[start % 4], L.v[(start + 1) % 4], L.v[(start + 2) % 4], L.v[(start + 3) % 4]);
}

// Relation among the four forms of a 4-loop implied by its cycle condition.
// Returns nullopt for a bipartite loop that is the entire graph.
inline std::optional<SquareSolution> solve_square_transform(const ConnectivityGraph& g,
                                                            const FourLoop& loop,
                                                            const Orientation& o,
                                                            bool entire_graph) {
  LoopClass cls = classify_loop(g, o, loop);
  if (cls == LoopClass::Invalid) throw ConstraintError("solve_square_transform: invalid loop orientation");
  auto roles = loop_roles(g, o, loop);
  SquareSolution sol;
  sol.cls = cls;
  if (cls == LoopClass::NonBipartite) {
    int src = 0;
    while (roles[src] != -1) ++src;
    sol.loop = rotate_loop(g, loop, src);
    sol.r = -1;
    sol.r_tilde = 1;
  } else {
    if (entire_graph) return std::nullopt;
    int sink = 0;
    while (roles[sink] != 1) ++sink;
    sol.loop = rotate_loop(g, loop, sink + 3);  // b = v[1] is the sink
    sol.r_free = true;
    sol.r = 1;
    sol.r_tilde = -1;
  }
  sol.alpha = sol.loop.edges[0];
  sol.beta = sol.loop.edges[1];
  sol.mu = sol.loop.edges[2];
  sol.nu = sol.loop.edges[3];
  sol.transform = LoopTransform::rapidity(0.0, 1, cls == LoopClass::NonBipartite ? 1 : sol.r);
  return sol;
}

}  // namespace mtlz
