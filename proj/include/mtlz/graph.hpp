#pragma once
// Connectivity graphs, edge orientations, 4-loops and cycle bases.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "mtlz/errors.hpp"

namespace mtlz {

struct Edge {
  int a;  // a < b
  int b;
  friend bool operator==(const Edge&, const Edge&) = default;
};

class ConnectivityGraph {
 public:
  ConnectivityGraph() = default;

  ConnectivityGraph(int n_vertices, const std::vector<std::pair<int, int>>& edge_list,
                    std::string name = {})
      : n_(n_vertices), name_(std::move(name)) {
    if (n_vertices <= 0) throw GraphError("graph needs at least one vertex");
    std::vector<Edge> es;
    for (auto [u, v] : edge_list) {
      if (u < 0 || v < 0 || u >= n_ || v >= n_)
        throw GraphError("edge endpoint out of range: {" + std::to_string(u) + "," +
                         std::to_string(v) + "}");
      if (u == v) throw GraphError("self-loop at vertex " + std::to_string(u));
      es.push_back({std::min(u, v), std::max(u, v)});
    }
    std::sort(es.begin(), es.end(),
              [](const Edge& x, const Edge& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
    es.erase(std::unique(es.begin(), es.end()), es.end());
    edges_ = std::move(es);
    index_.assign(static_cast<size_t>(n_) * n_, -1);
    adj_.assign(n_, {});
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
      auto [a, b] = edges_[i];
      index_[a * n_ + b] = index_[b * n_ + a] = i;
      adj_[a].push_back(b);
      adj_[b].push_back(a);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
  }

  int n_vertices() const { return n_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int i) const { return edges_.at(i); }
  const std::vector<int>& neighbors(int v) const { return adj_.at(v); }
  int degree(int v) const { return static_cast<int>(adj_.at(v).size()); }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  bool adjacent(int u, int v) const { return edge_index(u, v) >= 0; }
  // -1 when {u,v} is not an edge.
  int edge_index(int u, int v) const {
    if (u < 0 || v < 0 || u >= n_ || v >= n_) return -1;
    return index_[u * n_ + v];
  }
  int require_edge(int u, int v) const {
    int i = edge_index(u, v);
    if (i < 0)
      throw GraphError("{" + std::to_string(u) + "," + std::to_string(v) + "} is not an edge");
    return i;
  }

  std::vector<int> common_neighbors(int u, int v) const {
    std::vector<int> out;
    std::set_intersection(adj_[u].begin(), adj_[u].end(), adj_[v].begin(), adj_[v].end(),
                          std::back_inserter(out));
    return out;
  }

  bool connected() const {
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : adj_[u])
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
    }
    return count == n_;
  }

  std::string edge_label(int i) const {
    return std::to_string(edges_[i].a) + "-" + std::to_string(edges_[i].b);
  }

 private:
  int n_ = 0;
  std::string name_;
  std::vector<Edge> edges_;
  std::vector<int> index_;
  std::vector<std::vector<int>> adj_;
};

// s^{ab} per edge. s^{ab} = +1 means the arrow points into a.
class Orientation {
 public:
  Orientation() = default;
  // signs[i] is s^{ab} for the canonical edge i = {a<b}.
  explicit Orientation(std::vector<int> signs) : s_(std::move(signs)) {
    for (int x : s_)
      if (x != 1 && x != -1) throw GraphError("orientation signs must be +1 or -1");
  }
  static Orientation from_bits(const ConnectivityGraph& g, std::uint64_t bits) {
    // bit i set: arrow points into the larger endpoint of edge i.
    std::vector<int> s(g.n_edges());
    for (int i = 0; i < g.n_edges(); ++i) s[i] = ((bits >> i) & 1u) ? -1 : 1;
    return Orientation(std::move(s));
  }
  // Arrow a -> b for every listed pair, i.e. s^{ba} = +1.
  static Orientation from_arrows(const ConnectivityGraph& g,
                                 const std::vector<std::pair<int, int>>& arrows) {
    std::vector<int> s(g.n_edges(), 0);
    for (auto [from, to] : arrows) {
      int i = g.require_edge(from, to);
      s[i] = (to == g.edge(i).a) ? 1 : -1;
    }
    for (int i = 0; i < g.n_edges(); ++i)
      if (s[i] == 0) throw GraphError("arrow missing for edge " + g.edge_label(i));
    return Orientation(std::move(s));
  }

  int size() const { return static_cast<int>(s_.size()); }
  int canonical(int edge) const { return s_.at(edge); }
  const std::vector<int>& signs() const { return s_; }
  // s^{ab} for an arbitrary ordered pair.
  int s(const ConnectivityGraph& g, int a, int b) const {
    int i = g.require_edge(a, b);
    return g.edge(i).a == a ? s_[i] : -s_[i];
  }
  std::uint64_t bits() const {
    std::uint64_t out = 0;
    for (int i = 0; i < size(); ++i)
      if (s_[i] < 0) out |= (std::uint64_t{1} << i);
    return out;
  }
  void check(const ConnectivityGraph& g) const {
    if (size() != g.n_edges()) throw GraphError("orientation does not cover every edge");
  }

 private:
  std::vector<int> s_;
};

enum class VertexRole { Source, Sink, Intermediate };

inline const char* to_string(VertexRole r) {
  switch (r) {
    case VertexRole::Source: return "Source";
    case VertexRole::Sink: return "Sink";
    default: return "Intermediate";
  }
}

inline VertexRole classify_vertex(const ConnectivityGraph& g, const Orientation& o, int v) {
  if (g.degree(v) == 0) throw GraphError("vertex " + std::to_string(v) + " is isolated");
  int in = 0;
  for (int w : g.neighbors(v)) in += o.s(g, v, w) > 0;
  if (in == g.degree(v)) return VertexRole::Sink;
  if (in == 0) return VertexRole::Source;
  return VertexRole::Intermediate;
}

enum class LoopClass { NonBipartite, Bipartite, Invalid };

inline const char* to_string(LoopClass c) {
  switch (c) {
    case LoopClass::NonBipartite: return "NonBipartite";
    case LoopClass::Bipartite: return "Bipartite";
    default: return "Invalid";
  }
}

struct FourLoop {
  std::array<int, 4> v{};      // cyclic order
  std::array<int, 4> edges{};  // edges[i] = {v[i], v[i+1]}
};

// Roles of the loop vertices restricted to the two loop edges at each vertex:
// +1 local sink, -1 local source, 0 pass-through.
inline std::array<int, 4> loop_roles(const ConnectivityGraph& g, const Orientation& o,
                                     const FourLoop& L) {
  std::array<int, 4> r{};
  for (int i = 0; i < 4; ++i) {
    int prev = L.v[(i + 3) % 4], next = L.v[(i + 1) % 4];
    int in = (o.s(g, L.v[i], prev) > 0) + (o.s(g, L.v[i], next) > 0);
    r[i] = in == 2 ? 1 : (in == 0 ? -1 : 0);
  }
  return r;
}

// NonBipartite: one local sink and one local source at opposite corners.
// Bipartite: sinks and sources alternate. A sink adjacent to a source on the
// loop is Invalid: the loop's cycle condition would equate a rank-1 form with
// a sum of two independent squares.
inline LoopClass classify_loop(const ConnectivityGraph& g, const Orientation& o,
                               const FourLoop& L) {
  auto r = loop_roles(g, o, L);
  int sinks = 0, sources = 0;
  for (int x : r) sinks += x == 1, sources += x == -1;
  if (sinks == 2 && sources == 2) return LoopClass::Bipartite;
  if (sinks == 1 && sources == 1) {
    for (int i = 0; i < 4; ++i)
      if (r[i] == 1) return r[(i + 2) % 4] == -1 ? LoopClass::NonBipartite : LoopClass::Invalid;
  }
  return LoopClass::Invalid;
}

inline FourLoop make_loop(const ConnectivityGraph& g, int a, int b, int c, int d) {
  FourLoop L{{a, b, c, d}, {}};
  for (int i = 0; i < 4; ++i) L.edges[i] = g.require_edge(L.v[i], L.v[(i + 1) % 4]);
  return L;
}

// Every simple 4-cycle once. The smallest vertex is v[0] and v[1] < v[3].
inline std::vector<FourLoop> enumerate_four_loops(const ConnectivityGraph& g) {
  std::vector<FourLoop> out;
  const int n = g.n_vertices();
  // a = smallest vertex, b < d its loop neighbours, c opposite to a.
  for (int a = 0; a < n; ++a) {
    const auto& na = g.neighbors(a);
    for (size_t i = 0; i < na.size(); ++i) {
      int b = na[i];
      if (b < a) continue;
      for (size_t j = i + 1; j < na.size(); ++j) {
        int d = na[j];
        if (d < a) continue;
        for (int c : g.common_neighbors(b, d)) {
          if (c <= a || c == b || c == d) continue;
          out.push_back(make_loop(g, a, b, c, d));
        }
      }
    }
  }
  return out;
}

struct ScreenReport {
  bool triangle_free = true;
  bool four_loop_cover = true;
  std::vector<std::array<int, 3>> triangles;
  // Adjacent edge pairs (as vertex triples u-v-w, centre v) in no 4-loop.
  std::vector<std::array<int, 3>> uncovered_wedges;
  bool pass() const { return triangle_free && four_loop_cover; }
};

inline ScreenReport screen_graph(const ConnectivityGraph& g) {
  if (!g.connected()) throw GraphError("graph is disconnected");
  ScreenReport rep;
  const int n = g.n_vertices();
  for (int a = 0; a < n; ++a)
    for (int b : g.neighbors(a))
      if (b > a)
        for (int c : g.common_neighbors(a, b))
          if (c > b) rep.triangles.push_back({a, b, c});
  rep.triangle_free = rep.triangles.empty();
  // Wedge u-v-w lies in a 4-loop iff u and w share a neighbour other than v.
  for (int v = 0; v < n; ++v) {
    const auto& nv = g.neighbors(v);
    for (size_t i = 0; i < nv.size(); ++i)
      for (size_t j = i + 1; j < nv.size(); ++j) {
        int u = nv[i], w = nv[j];
        bool covered = false;
        for (int x : g.common_neighbors(u, w))
          if (x != v) covered = true;
        if (!covered) rep.uncovered_wedges.push_back({u, v, w});
      }
  }
  rep.four_loop_cover = rep.uncovered_wedges.empty();
  return rep;
}

struct Cycle {
  std::vector<int> walk;   // closed vertex walk, walk.front() == walk.back()
  std::vector<int> coeff;  // per edge of the graph: n_alpha in {-1,0,+1}
  bool zero_boundary = false;
};

// Fundamental cycles of a BFS spanning tree rooted at vertex 0.
inline std::vector<Cycle> cycle_basis(const ConnectivityGraph& g, const Orientation& o) {
  if (!g.connected()) throw GraphError("graph is disconnected");
  o.check(g);
  const int n = g.n_vertices();
  std::vector<int> parent(n, -2), depth(n, 0);
  std::vector<char> tree_edge(g.n_edges(), 0);
  std::queue<int> q;
  parent[0] = -1;
  q.push(0);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int w : g.neighbors(u))
      if (parent[w] == -2) {
        parent[w] = u;
        depth[w] = depth[u] + 1;
        tree_edge[g.edge_index(u, w)] = 1;
        q.push(w);
      }
  }
  std::vector<Cycle> out;
  for (int e = 0; e < g.n_edges(); ++e) {
    if (tree_edge[e]) continue;
    auto [a, b] = g.edge(e);
    std::vector<int> up_a{a}, up_b{b};
    int x = a, y = b;
    while (depth[x] > depth[y]) up_a.push_back(x = parent[x]);
    while (depth[y] > depth[x]) up_b.push_back(y = parent[y]);
    while (x != y) {
      up_a.push_back(x = parent[x]);
      up_b.push_back(y = parent[y]);
    }
    // walk: b -> a (the non-tree edge), a up to lca, lca down to b.
    Cycle c;
    c.walk.push_back(b);
    for (int v : up_a) c.walk.push_back(v);
    for (int k = static_cast<int>(up_b.size()) - 2; k >= 0; --k) c.walk.push_back(up_b[k]);
    c.coeff.assign(g.n_edges(), 0);
    for (size_t k = 0; k + 1 < c.walk.size(); ++k) {
      int u = c.walk[k], w = c.walk[k + 1];
      c.coeff[g.edge_index(u, w)] = o.s(g, u, w);
    }
    // Boundary of sum n_alpha * alpha, with alpha the arrow tail -> head.
    std::vector<int> boundary(n, 0);
    for (int i = 0; i < g.n_edges(); ++i) {
      if (!c.coeff[i]) continue;
      auto [u, w] = g.edge(i);
      int head = o.canonical(i) > 0 ? u : w;
      int tail = head == u ? w : u;
      boundary[head] += c.coeff[i];
      boundary[tail] -= c.coeff[i];
    }
    c.zero_boundary = std::all_of(boundary.begin(), boundary.end(), [](int x) { return x == 0; });
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace mtlz
