#pragma once
// MTLZ families: per-vertex slope forms Lambda^a, per-edge coupling forms
// A^{ab} and signed LZ parameters gamma^{ab}; reconstruction and validation.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtlz/forms.hpp"
#include "mtlz/graph.hpp"

namespace mtlz {

// x^i(t) = v^i t + eps^i
struct TimePath {
  Eigen::VectorXd v;
  Eigen::VectorXd eps;
  Eigen::VectorXd at(double t) const { return v * t + eps; }
};

struct MTLZFamily {
  ConnectivityGraph graph;
  int M = 0;
  std::vector<QuadraticForm> lambda;  // per vertex
  std::vector<OneForm> coupling;      // A^{ab} per canonical edge
  std::vector<double> gamma;          // gamma^{ab} per canonical edge {a<b}, signed
  std::string label;
  std::optional<TimePath> default_path;
  std::map<std::string, double> derived;  // derived parameters worth reporting

  int N() const { return graph.n_vertices(); }
  Orientation orientation() const {
    std::vector<int> s(gamma.size());
    for (size_t i = 0; i < gamma.size(); ++i) s[i] = gamma[i] > 0 ? 1 : -1;
    return Orientation(std::move(s));
  }
  double gamma_abs(int e) const { return std::abs(gamma.at(e)); }
  std::vector<double> gammas_abs() const {
    std::vector<double> out(gamma.size());
    for (size_t i = 0; i < gamma.size(); ++i) out[i] = std::abs(gamma[i]);
    return out;
  }
  // gamma^{ab} for an ordered pair.
  double gamma_of(int a, int b) const {
    int e = graph.require_edge(a, b);
    return graph.edge(e).a == a ? gamma[e] : -gamma[e];
  }
  OneForm rescaled(int e) const { return rescale(coupling.at(e), gamma_abs(e)); }
  std::vector<OneForm> rescaled_forms() const {
    std::vector<OneForm> out;
    for (int e = 0; e < graph.n_edges(); ++e) out.push_back(rescaled(e));
    return out;
  }
};

// Propagates gamma^{ab}(Lambda^a - Lambda^b) = A (x) A along a BFS tree from
// vertex 0 (Lambda^0 = seed) and checks every non-tree edge.
inline std::vector<QuadraticForm> reconstruct_lambdas(const ConnectivityGraph& g,
                                                      const std::vector<OneForm>& coupling,
                                                      const std::vector<double>& gamma,
                                                      const QuadraticForm& seed,
                                                      double rel_tol = 1e-11) {
  if (!g.connected()) throw GraphError("reconstruct_lambdas: graph is disconnected");
  if (static_cast<int>(coupling.size()) != g.n_edges() || static_cast<int>(gamma.size()) != g.n_edges())
    throw GraphError("reconstruct_lambdas: need a form and gamma on every edge");
  const auto M = seed.rows();
  auto gamma_of = [&](int a, int b) {
    int e = g.edge_index(a, b);
    return g.edge(e).a == a ? gamma[e] : -gamma[e];
  };
  std::vector<QuadraticForm> lam(g.n_vertices());
  std::vector<char> seen(g.n_vertices(), 0);
  lam[0] = seed;
  seen[0] = 1;
  std::queue<int> q;
  q.push(0);
  double scale = 0;
  for (int e = 0; e < g.n_edges(); ++e) {
    if (coupling[e].size() != M) throw DimensionError("reconstruct_lambdas: form dimension mismatch");
    if (gamma[e] == 0) throw DomainError("reconstruct_lambdas: gamma = 0 on edge " + g.edge_label(e));
    scale = std::max(scale, coupling[e].squaredNorm() / std::abs(gamma[e]));
  }
  while (!q.empty()) {
    int a = q.front();
    q.pop();
    for (int b : g.neighbors(a)) {
      if (seen[b]) continue;
      const auto& A = coupling[g.edge_index(a, b)];
      lam[b] = lam[a] - tensor_square(A) / gamma_of(a, b);
      seen[b] = 1;
      q.push(b);
    }
  }
  for (int e = 0; e < g.n_edges(); ++e) {
    auto [a, b] = g.edge(e);
    double r = (gamma[e] * (lam[a] - lam[b]) - tensor_square(coupling[e])).norm() / std::abs(gamma[e]);
    if (r > rel_tol * std::max(scale, 1e-300))
      throw IntegrabilityError("edge " + g.edge_label(e) + " is inconsistent with the spanning tree (residual " +
                               std::to_string(r) + ")");
  }
  return lam;
}

struct ValidationReport {
  double max_cycle_residual = 0;   // relative to max |Abar|^2
  double max_vertex_residual = 0;  // relative to max sqrt(gg)|Abar||Abar|
  double max_edge_residual = 0;    // relative to max |A|^2
  double min_adjacent_sine = 1;    // smallest |sin| between forms sharing a vertex
  bool good_family = true;         // no two forms at a vertex are parallel
  bool no_triple_crossing = true;  // no two crossing hyperplanes at one level coincide
  bool symmetric_lambdas = true;
  int cycles_checked = 0;
  int vertex_pairs_checked = 0;
  double tolerance = 1e-12;
  std::vector<std::string> failures;
  bool pass() const { return failures.empty(); }
};

inline ValidationReport validate_family(const MTLZFamily& f, double tol = 1e-12,
                                        double parallel_tol = 1e-9) {
  ValidationReport rep;
  rep.tolerance = tol;
  const auto& g = f.graph;
  auto forms = f.rescaled_forms();
  auto gam = f.gammas_abs();
  auto orient = f.orientation();

  double form_scale = 0, coupling_scale = 0;
  for (int e = 0; e < g.n_edges(); ++e) {
    form_scale = std::max(form_scale, forms[e].squaredNorm());
    coupling_scale = std::max(coupling_scale, f.coupling[e].squaredNorm());
    if (f.coupling[e].norm() == 0) rep.failures.push_back("zero coupling form on edge " + g.edge_label(e));
  }
  form_scale = std::max(form_scale, 1e-300);
  coupling_scale = std::max(coupling_scale, 1e-300);

  for (const auto& L : f.lambda)
    if ((L - L.transpose()).norm() > tol * std::max(1.0, L.norm())) rep.symmetric_lambdas = false;
  if (!rep.symmetric_lambdas) rep.failures.push_back("a Lambda^a is not symmetric");

  if (g.connected() && g.n_edges() > 0) {
    for (const auto& c : cycle_basis(g, orient)) {
      rep.max_cycle_residual = std::max(rep.max_cycle_residual, cycle_residual(c, forms).norm() / form_scale);
      ++rep.cycles_checked;
    }
  }
  double pair_scale = 0;
  for (int e = 0; e < g.n_edges(); ++e) pair_scale = std::max(pair_scale, gam[e] * forms[e].squaredNorm());
  pair_scale = std::max(pair_scale, 1e-300);
  for (int a = 0; a < g.n_vertices(); ++a)
    for (int b = a + 1; b < g.n_vertices(); ++b) {
      if (g.common_neighbors(a, b).empty()) continue;
      rep.max_vertex_residual =
          std::max(rep.max_vertex_residual, vertex_residual(g, a, b, forms, gam).norm() / pair_scale);
      ++rep.vertex_pairs_checked;
    }
  for (int e = 0; e < g.n_edges(); ++e) {
    auto [a, b] = g.edge(e);
    double r = (f.gamma[e] * (f.lambda[a] - f.lambda[b]) - tensor_square(f.coupling[e])).norm();
    rep.max_edge_residual = std::max(rep.max_edge_residual, r / coupling_scale);
  }
  for (int v = 0; v < g.n_vertices(); ++v) {
    const auto& nb = g.neighbors(v);
    for (size_t i = 0; i < nb.size(); ++i)
      for (size_t j = i + 1; j < nb.size(); ++j) {
        double sn = form_sine(forms[g.edge_index(v, nb[i])], forms[g.edge_index(v, nb[j])]);
        rep.min_adjacent_sine = std::min(rep.min_adjacent_sine, sn);
      }
  }
  rep.good_family = rep.min_adjacent_sine > parallel_tol;
  // Levels v, b, c cross together exactly when the hyperplanes of {v,b} and {v,c} coincide.
  rep.no_triple_crossing = rep.good_family;

  auto fmt = [](double x) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << x;
    return s.str();
  };
  if (rep.max_cycle_residual > tol) rep.failures.push_back("cycle residual " + fmt(rep.max_cycle_residual));
  if (rep.max_vertex_residual > tol) rep.failures.push_back("vertex-pair residual " + fmt(rep.max_vertex_residual));
  if (rep.max_edge_residual > tol) rep.failures.push_back("edge residual " + fmt(rep.max_edge_residual));
  if (!rep.good_family) rep.failures.push_back("parallel forms at a shared vertex (sine " + fmt(rep.min_adjacent_sine) + ")");
  return rep;
}

}  // namespace mtlz
