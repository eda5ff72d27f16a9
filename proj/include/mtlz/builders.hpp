#pragma once
// Explicit families on the square, cube, 4d hypercube, fan and the gamma-magnet.

#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtlz/errors.hpp"
#include "mtlz/family.hpp"
#include "mtlz/forms.hpp"
#include "mtlz/hamiltonian.hpp"
#include "mtlz/named_graphs.hpp"

namespace mtlz {

namespace detail {

inline void require_independent(const std::vector<OneForm>& base, const char* who) {
  Eigen::MatrixXd m(base.front().size(), base.size());
  for (size_t i = 0; i < base.size(); ++i) m.col(i) = base[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  auto sv = svd.singularValues();
  if (sv.size() < static_cast<long>(base.size()) || sv(sv.size() - 1) <= 1e-12 * sv(0))
    throw ConstraintError(std::string(who) + ": base forms are linearly dependent");
}

inline QuadraticForm seed_or_zero(const std::optional<QuadraticForm>& seed, int M) {
  if (!seed) return QuadraticForm::Zero(M, M);
  if (seed->rows() != M || seed->cols() != M) throw DimensionError("gauge seed has the wrong size");
  return 0.5 * (*seed + seed->transpose());
}

inline MTLZFamily finish(ConnectivityGraph g, int M, std::vector<OneForm> abar, std::vector<double> gamma,
                         const QuadraticForm& seed, std::string label) {
  MTLZFamily f;
  f.M = M;
  f.coupling.resize(abar.size());
  for (size_t e = 0; e < abar.size(); ++e) f.coupling[e] = std::sqrt(std::abs(gamma[e])) * abar[e];
  f.gamma = std::move(gamma);
  f.lambda = reconstruct_lambdas(g, f.coupling, f.gamma, seed);
  f.graph = std::move(g);
  f.label = std::move(label);
  return f;
}

inline double check_tangent(double tau, const std::string& loop) {
  if (!std::isfinite(tau) || !(std::abs(tau) < 1))
    throw DomainError("rapidity tangent of loop " + loop + " is " + std::to_string(tau) + ", outside (-1,1)");
  return tau;
}

// Pseudo-orthogonal pair (c, s) for tangent tau and sign p.
inline std::pair<double, double> cs_of(double tau, int p) {
  double k = 1.0 / std::sqrt(1.0 - tau * tau);
  return {p * k, p * tau * k};
}

// Tangent of the face across a cube from faces ab, ac, bc meeting at its far corner.
inline double opposite_tangent(double t_ab, double t_ac, double t_bc, int p_ab = 1, int p_ac = 1) {
  return p_ab * p_ac * (t_bc + t_ab * t_ac) / std::sqrt((1 - t_ab * t_ab) * (1 - t_ac * t_ac));
}

}  // namespace detail

// Gauge (beta, e) as the seed Lambda^0 for M = 2: slope beta on dx^1 dx^1, energy e on dx^1 dx^2.
inline QuadraticForm gauge_seed(int M, double beta, double e) {
  QuadraticForm s = QuadraticForm::Zero(M, M);
  if (M >= 1) s(0, 0) = beta;
  if (M >= 2) s(0, 1) = s(1, 0) = e;
  return s;
}

// ---------------------------------------------------------------- square
// Vertices 0..3 are states 1..4. State 1 is the sink, state 3 the source.
struct SquareParams {
  Eigen::Vector2d a{1.0, 0.0};  // Abar^{12}
  Eigen::Vector2d b{0.0, 1.0};  // Abar^{14}
  double theta = 0.0;
  int p = 1;
  double gamma12 = 1.0;
  double gamma14 = 1.0;
  std::optional<QuadraticForm> gauge;
};

inline MTLZFamily build_square(const SquareParams& sp) {
  if (!(sp.gamma12 > 0) || !(sp.gamma14 > 0)) throw DomainError("square: gamma must be positive");
  if (sp.p != 1 && sp.p != -1) throw DomainError("square: p must be +1 or -1");
  detail::require_independent({sp.a, sp.b}, "square");
  auto g = graphs::square();
  const double c = sp.p * std::cosh(sp.theta), s = sp.p * std::sinh(sp.theta);
  std::vector<OneForm> abar(4);
  std::vector<double> gam(4);
  abar[g.edge_index(0, 1)] = sp.a;
  abar[g.edge_index(0, 3)] = sp.b;
  abar[g.edge_index(2, 3)] = c * sp.a + s * sp.b;  // Abar^{34}
  abar[g.edge_index(1, 2)] = s * sp.a + c * sp.b;  // Abar^{23}
  gam[g.edge_index(0, 1)] = sp.gamma12;            // arrow into state 1
  gam[g.edge_index(0, 3)] = sp.gamma14;            // arrow into state 1
  gam[g.edge_index(1, 2)] = sp.gamma14;            // arrow into state 2
  gam[g.edge_index(2, 3)] = -sp.gamma12;           // arrow into state 4
  auto f = detail::finish(std::move(g), 2, std::move(abar), std::move(gam),
                          detail::seed_or_zero(sp.gauge, 2), "square");
  f.derived["theta"] = sp.theta;
  f.derived["tau"] = std::tanh(sp.theta);
  return f;
}

// ---------------------------------------------------------------- cube
// Vertex label bits: bit0 = direction 1 (edge 01), bit1 = direction 2 (02), bit2 = direction 3 (04).
// Face loop ids: 0132 -> 1, 0154 -> 2, 0264 -> 3, 1375 -> 4, 2376 -> 5, 4576 -> 6.
struct CubeParams {
  std::array<OneForm, 3> base{OneForm(Eigen::Vector3d::UnitX()), OneForm(Eigen::Vector3d::UnitY()),
                              OneForm(Eigen::Vector3d::UnitZ())};
  std::array<double, 3> tau{0.0, 0.0, 0.0};
  std::array<int, 6> p{1, 1, 1, 1, 1, 1};
  std::array<double, 3> gamma{1.0, 1.0, 1.0};
  std::optional<QuadraticForm> gauge;
};

struct CubeTangents {
  std::array<double, 6> tau;
};

inline CubeTangents cube_tangents(const std::array<double, 3>& t, const std::array<int, 6>& p) {
  for (int i = 0; i < 3; ++i) detail::check_tangent(t[i], std::to_string(i + 1));
  CubeTangents out{};
  out.tau[0] = t[0];
  out.tau[1] = t[1];
  out.tau[2] = t[2];
  out.tau[3] = detail::check_tangent(detail::opposite_tangent(t[0], t[1], t[2], p[0], p[1]), "1375 (4)");
  out.tau[4] = detail::check_tangent(detail::opposite_tangent(t[0], t[2], t[1], p[0], p[2]), "2376 (5)");
  out.tau[5] = detail::check_tangent(detail::opposite_tangent(t[1], t[2], t[0], p[1], p[2]), "4576 (6)");
  return out;
}

inline MTLZFamily build_cube(const CubeParams& cp) {
  for (double gm : cp.gamma)
    if (!(gm > 0)) throw DomainError("cube: gamma must be positive");
  for (int x : cp.p)
    if (x != 1 && x != -1) throw DomainError("cube: sign factors must be +1 or -1");
  const auto& p = cp.p;
  if (p[1] * p[3] != p[2] * p[4] || p[0] * p[3] != p[2] * p[5])
    throw ConstraintError("cube: sign factors violate p2 p4 = p3 p5 and p1 p4 = p3 p6");
  const int M = static_cast<int>(cp.base[0].size());
  if (M != 3 || cp.base[1].size() != 3 || cp.base[2].size() != 3)
    throw DimensionError("cube: base forms must have three components");
  detail::require_independent({cp.base[0], cp.base[1], cp.base[2]}, "cube");
  auto tg = cube_tangents(cp.tau, cp.p);

  auto g = graphs::cube();
  std::vector<OneForm> abar(g.n_edges());
  std::vector<char> have(g.n_edges(), 0);
  auto set = [&](int u, int v, const OneForm& x, const char* face) {
    int e = g.edge_index(u, v);
    if (have[e]) {
      double scale = std::max(1.0, x.norm());
      if ((abar[e] - x).norm() > 1e-10 * scale)
        throw ConstraintError(std::string("cube: face ") + face + " disagrees on edge " + g.edge_label(e));
      return;
    }
    abar[e] = x;
    have[e] = 1;
  };
  auto get = [&](int u, int v) -> const OneForm& { return abar[g.edge_index(u, v)]; };
  // Face (v; i, j) with i < j: Abar(v+e_j, i) = c Abar(v,i) + s Abar(v,j); Abar(v+e_i, j) = s Abar(v,i) + c Abar(v,j).
  auto face = [&](int v, int i, int j, int id) {
    auto [c, s] = detail::cs_of(tg.tau[id - 1], p[id - 1]);
    int vi = v | (1 << i), vj = v | (1 << j);
    OneForm xi = get(v, vi), xj = get(v, vj);
    std::string name = std::to_string(id);
    set(vj, vj | (1 << i), c * xi + s * xj, name.c_str());
    set(vi, vi | (1 << j), s * xi + c * xj, name.c_str());
  };
  set(0, 1, cp.base[0], "seed");
  set(0, 2, cp.base[1], "seed");
  set(0, 4, cp.base[2], "seed");
  face(0, 0, 1, 1);
  face(0, 0, 2, 2);
  face(0, 1, 2, 3);
  face(1, 1, 2, 4);
  face(2, 0, 2, 5);
  face(4, 0, 1, 6);

  std::vector<double> gam(g.n_edges());
  for (int e = 0; e < g.n_edges(); ++e) {
    int dir = __builtin_ctz(g.edge(e).a ^ g.edge(e).b);
    gam[e] = cp.gamma[dir];  // every arrow points to the smaller label; 0 is the sink
  }
  auto f = detail::finish(std::move(g), 3, std::move(abar), std::move(gam), detail::seed_or_zero(cp.gauge, 3), "cube");
  for (int i = 0; i < 6; ++i) f.derived["tau" + std::to_string(i + 1)] = tg.tau[i];
  return f;
}

// ---------------------------------------------------------------- 4d hypercube
// Seed tangents at vertex 0000 for direction pairs 12, 13, 14, 23, 24, 34.
struct Hypercube4Params {
  std::array<OneForm, 4> base{OneForm(Eigen::Vector4d::UnitX()), OneForm(Eigen::Vector4d::UnitY()),
                              OneForm(Eigen::Vector4d::UnitZ()), OneForm(Eigen::Vector4d::UnitW())};
  std::array<double, 6> tau{};
  std::array<double, 4> gamma{1.0, 1.0, 1.0, 1.0};
  std::optional<QuadraticForm> gauge;
};

inline int pair_slot(int i, int j) {
  static const int slot[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
  return slot[i][j];
}

// Face tangents keyed by (vertex, pair slot); each face with a nonzero base vertex is
// computed through every cube that ends on it and the routes are required to agree.
struct HypercubeTangents {
  std::map<std::pair<int, int>, double> tau;
  double max_route_disagreement = 0;
  double at(int v, int i, int j) const { return tau.at({v, pair_slot(i, j)}); }
};

inline double q_ijk(double tij, double tik, double tjk) {
  double q2 = 1 - tij * tij - tik * tik - tjk * tjk - 2 * tij * tik * tjk;
  if (!(q2 > 0)) throw DomainError("hypercube4: q_ijk is not real and positive");
  return std::sqrt(q2);
}

inline HypercubeTangents hypercube4_tangents(const std::array<double, 6>& seed) {
  static const char* names[6] = {"12", "13", "14", "23", "24", "34"};
  HypercubeTangents out;
  for (int s = 0; s < 6; ++s) out.tau[{0, s}] = detail::check_tangent(seed[s], std::string("0000;") + names[s]);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k)
        q_ijk(seed[pair_slot(i, j)], seed[pair_slot(i, k)], seed[pair_slot(j, k)]);
  std::vector<int> order(16);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [](int x, int y) { return __builtin_popcount(x) < __builtin_popcount(y); });
  for (int v : order) {
    if (v == 0) continue;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        if ((v >> i & 1) || (v >> j & 1)) continue;
        std::optional<double> first;
        for (int a = 0; a < 4; ++a) {
          if (!(v >> a & 1)) continue;
          int w = v & ~(1 << a);
          double t = detail::opposite_tangent(out.at(w, std::min(a, i), std::max(a, i)),
                                              out.at(w, std::min(a, j), std::max(a, j)), out.at(w, i, j));
          std::string label = std::to_string(v) + ";" + std::to_string(i + 1) + std::to_string(j + 1);
          detail::check_tangent(t, label);
          if (!first) {
            first = t;
          } else {
            out.max_route_disagreement = std::max(out.max_route_disagreement, std::abs(t - *first));
            if (std::abs(t - *first) > 1e-12)
              throw IntegrabilityError("hypercube4: cube routes disagree on face " + label);
          }
        }
        out.tau[{v, pair_slot(i, j)}] = *first;
      }
  }
  return out;
}

inline MTLZFamily build_hypercube4(const Hypercube4Params& hp) {
  for (double gm : hp.gamma)
    if (!(gm > 0)) throw DomainError("hypercube4: gamma must be positive");
  for (const auto& b : hp.base)
    if (b.size() != 4) throw DimensionError("hypercube4: base forms must have four components");
  detail::require_independent({hp.base[0], hp.base[1], hp.base[2], hp.base[3]}, "hypercube4");
  auto tg = hypercube4_tangents(hp.tau);
  auto g = graphs::hypercube4();
  std::vector<OneForm> abar(g.n_edges());
  std::vector<char> have(g.n_edges(), 0);
  for (int i = 0; i < 4; ++i) {
    abar[g.edge_index(0, 1 << i)] = hp.base[i];
    have[g.edge_index(0, 1 << i)] = 1;
  }
  std::vector<int> order(16);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [](int x, int y) { return __builtin_popcount(x) < __builtin_popcount(y); });
  for (int v : order)
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        if ((v >> i & 1) || (v >> j & 1)) continue;
        auto [c, s] = detail::cs_of(tg.at(v, i, j), 1);
        int vi = v | (1 << i), vj = v | (1 << j);
        OneForm xi = abar[g.edge_index(v, vi)], xj = abar[g.edge_index(v, vj)];
        const std::pair<int, OneForm> outs[2] = {{g.edge_index(vj, vj | (1 << i)), c * xi + s * xj},
                                                 {g.edge_index(vi, vi | (1 << j)), s * xi + c * xj}};
        for (const auto& [e, x] : outs) {
          if (have[e]) {
            if ((abar[e] - x).norm() > 1e-10 * std::max(1.0, x.norm()))
              throw IntegrabilityError("hypercube4: faces disagree on edge " + g.edge_label(e));
          } else {
            abar[e] = x;
            have[e] = 1;
          }
        }
      }
  std::vector<double> gam(g.n_edges());
  for (int e = 0; e < g.n_edges(); ++e) gam[e] = hp.gamma[__builtin_ctz(g.edge(e).a ^ g.edge(e).b)];
  auto f = detail::finish(std::move(g), 4, std::move(abar), std::move(gam), detail::seed_or_zero(hp.gauge, 4),
                          "hypercube4");
  f.derived["tau_0011_1111"] = tg.at(12, 0, 1);
  f.derived["route_disagreement"] = tg.max_route_disagreement;
  return f;
}

// ---------------------------------------------------------------- fan
// Vertices: 0 = b1, 1 = b2, 2..m+1 = a_1..a_m. Edges alpha_j = {a_j, b1}, beta_j = {a_j, b2}.
enum class FanType { TypeI, TypeII };

struct FanParams {
  int m = 3;
  int l = 1;
  Eigen::Vector2d alpha1{1.0, 0.0};
  Eigen::Vector2d beta1{0.0, 1.0};
  std::vector<double> theta;  // theta_{j+1,j}, j = 1..m-1
  std::vector<int> p;         // p_{j+1,j}; empty means all +1
  std::vector<double> gamma;  // gamma^1..gamma^m
  FanType type = FanType::TypeII;
  std::optional<QuadraticForm> gauge;
};

inline MTLZFamily build_fan(const FanParams& fp) {
  const int m = fp.m, l = fp.l;
  if (m < 2) throw DomainError("fan: m must be at least 2");
  if (fp.type == FanType::TypeI && m >= 3)
    throw ConstraintError("fan: type-I orientation has no nontrivial solution for m >= 3");
  if (l < 1 || l > m - 1) throw DomainError("fan: need 1 <= l <= m-1 (both sink and source a-vertices)");
  if (static_cast<int>(fp.gamma.size()) != m) throw DomainError("fan: need m gamma values");
  if (static_cast<int>(fp.theta.size()) != m - 1) throw DomainError("fan: need m-1 rapidities");
  if (!fp.p.empty() && static_cast<int>(fp.p.size()) != m - 1) throw DomainError("fan: need m-1 sign factors");
  double sink = 0, source = 0, total = 0;
  for (int j = 0; j < m; ++j) {
    if (!(fp.gamma[j] > 0)) throw DomainError("fan: gamma must be positive");
    (j < l ? sink : source) += fp.gamma[j];
    total += fp.gamma[j];
  }
  if (std::abs(sink - source) > 1e-12 * total)
    throw ConstraintError("fan: sum of sink gammas " + std::to_string(sink) + " != sum of source gammas " +
                          std::to_string(source));
  detail::require_independent({fp.alpha1, fp.beta1}, "fan");
  auto g = graphs::fan(m);
  std::vector<OneForm> abar(g.n_edges());
  std::vector<double> gam(g.n_edges());
  double theta = 0;
  int sign = 1;
  for (int j = 0; j < m; ++j) {
    if (j > 0) {
      theta += fp.theta[j - 1];
      sign *= fp.p.empty() ? 1 : fp.p[j - 1];
    }
    const double c = sign * std::cosh(theta), s = sign * std::sinh(theta);
    Eigen::Vector2d x = c * fp.alpha1 + s * fp.beta1;
    Eigen::Vector2d y = s * fp.alpha1 + c * fp.beta1;
    if (j >= l) std::swap(x, y);  // sigma_x
    const int a = 2 + j;
    const int ea = g.edge_index(0, a), eb = g.edge_index(1, a);
    abar[ea] = x;
    abar[eb] = y;
    // Canonical edge is {b, a_j} with b < a_j; s^{a_j b} = +1 for sinks means s^{b a_j} = -1.
    const double gsign = j < l ? -1.0 : 1.0;
    gam[ea] = gsign * fp.gamma[j];
    gam[eb] = gsign * fp.gamma[j];
  }
  auto f = detail::finish(std::move(g), 2, std::move(abar), std::move(gam), detail::seed_or_zero(fp.gauge, 2),
                          "fan(" + std::to_string(m) + "," + std::to_string(l) + ")");
  return f;
}

// ---------------------------------------------------------------- gamma-magnet
// Spin j (1-based) is bit j-1 of the state label; sigma^z = +1 for bit 0.
struct GammaMagnetParams {
  std::vector<double> beta;
  std::vector<double> g;
  double eps = 0.0;
};

inline MTLZFamily build_gamma_magnet(const GammaMagnetParams& gp) {
  const int n = static_cast<int>(gp.beta.size());
  if (n < 1 || n > 10) throw DomainError("gamma_magnet: need 1..10 spins");
  if (static_cast<int>(gp.g.size()) != n) throw DomainError("gamma_magnet: need one coupling per spin");
  for (double b : gp.beta)
    if (b == 0) throw DomainError("gamma_magnet: beta_j must be nonzero");
  for (double x : gp.g)
    if (x == 0) throw DomainError("gamma_magnet: g_j must be nonzero (zero would disconnect the graph)");
  auto gr = graphs::hypercube(n);
  const int N = 1 << n;
  auto sz = [](int state, int j) { return (state >> j & 1) ? -1.0 : 1.0; };
  MTLZFamily f;
  f.M = 2;
  f.lambda.resize(N);
  for (int a = 0; a < N; ++a) {
    double b11 = 0, b22 = 0, prod = 1;
    for (int j = 0; j < n; ++j) {
      b11 += gp.beta[j] * sz(a, j);
      b22 += sz(a, j) / gp.beta[j];
      prod *= sz(a, j);
    }
    QuadraticForm L(2, 2);
    L << b11, prod, prod, b22;
    f.lambda[a] = L;
  }
  f.coupling.resize(gr.n_edges());
  f.gamma.resize(gr.n_edges());
  for (int e = 0; e < gr.n_edges(); ++e) {
    auto [a, b] = gr.edge(e);
    int j = __builtin_ctz(a ^ b);
    double lower = 1, upper = 1;
    for (int k = 0; k < j; ++k) lower *= sz(a, k);
    for (int k = j + 1; k < n; ++k) upper *= sz(a, k);
    OneForm A(2);
    A << gp.g[j] * lower, gp.g[j] / gp.beta[j] * upper;
    f.coupling[e] = A;
    f.gamma[e] = gp.g[j] * gp.g[j] / (2 * gp.beta[j] * sz(a, j));
  }
  f.graph = std::move(gr);
  f.graph.set_name("gamma_magnet(" + std::to_string(n) + ")");
  f.label = f.graph.name();
  Eigen::Vector2d v(1.0, 0.0), eps(0.0, gp.eps);
  f.default_path = TimePath{v, eps};
  return f;
}

// Time shift t0 and gauge (beta t + e) that bring a 4-state chain to
//   [[B1 t + e1, g1, 0, g2], [g1, B2 t - e1, -g2, 0], [0, -g2, -B1 t + e1, g1], [g2, 0, g1, -B2 t - e1]].
// residual is the max entry mismatch of H(t + t0) + (beta t + e) against that form.
struct FourStateCanonical {
  double t0 = 0, gauge_beta = 0, gauge_e = 0;
  double beta1 = 0, beta2 = 0, e1 = 0, g1 = 0, g2 = 0;
  double residual = 0;
  Eigen::Matrix4d at(double t) const {
    Eigen::Matrix4d h;
    h << beta1 * t + e1, g1, 0, g2,
         g1, beta2 * t - e1, -g2, 0,
         0, -g2, -beta1 * t + e1, g1,
         g2, 0, g1, -beta2 * t - e1;
    return h;
  }
};

inline FourStateCanonical canonical_four_state(const LinearHamiltonian& h) {
  if (h.size() != 4) throw DimensionError("canonical_four_state needs a 4-state Hamiltonian");
  const Eigen::VectorXd b = h.b, d = h.A.diagonal();
  FourStateCanonical c;
  if (b(0) == b(2)) throw DomainError("canonical_four_state: levels 1 and 3 are parallel");
  c.gauge_beta = -(b(0) + b(2)) / 2;
  c.t0 = (d(2) - d(0)) / (b(0) - b(2));
  c.gauge_e = -(b(0) * c.t0 + d(0) + b(1) * c.t0 + d(1)) / 2;
  c.beta1 = b(0) + c.gauge_beta;
  c.beta2 = b(1) + c.gauge_beta;
  c.e1 = b(0) * c.t0 + d(0) + c.gauge_e;
  c.g1 = h.A(0, 1);
  c.g2 = h.A(0, 3);
  for (double t : {-1.3, 0.0, 0.7, 2.0}) {
    Eigen::MatrixXd shifted = h.at(t + c.t0);
    shifted.diagonal().array() += c.gauge_beta * t + c.gauge_e;
    c.residual = std::max(c.residual, (shifted - Eigen::MatrixXd(c.at(t))).cwiseAbs().maxCoeff());
  }
  return c;
}

}  // namespace mtlz
