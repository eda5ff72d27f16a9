#pragma once
// Orientation screening. For every edge orientation of a graph (up to graph
// automorphisms and global reversal) the sign relations between wedge
// products Abar^{vx} ^ Abar^{vy} are collected from vertex pairs joined by
// length-2 paths and from 4-loops, then propagated:
//
//   1. parity: every relation fixes the XOR of sign bits; Gaussian
//      elimination over GF(2) finds 0 = 1 with a replayable row set;
//   2. sign pattern: a vertex pair with three or more length-2 paths gives
//      sum_c k_c W_c = 0 with k_c > 0. Once its wedges are known to be
//      proportional the terms cannot all share a sign; terms whose magnitudes
//      k_c |W_c| are forced equal must moreover cancel in matched numbers.
//      Magnitudes follow from log-linear relations: opposite corners of a
//      4-loop carry wedges of equal norm (the loop transformation has
//      determinant +-1) and two-term pairs give k_1 |W_1| = k_2 |W_2|;
//   3. magnitude dominance: in a sum with one term of a sign against two or
//      more of the other sign, that lone term strictly exceeds each of the
//      others. Together with the log-linear equalities this is a linear
//      system E x = 0, D x > 0 in the log magnitudes, refuted by an exact
//      Motzkin certificate when it has no solution;
//   4. rank 2: when the 4-loop planes glue into a single plane every wedge is
//      a determinant det(u_i, u_j) of planar vectors, and the sign bits must
//      come from an actual arrangement of directions.
//
// A wedge node W_v(x, y) = Abar^{vx} ^ Abar^{vy} (x < y) carries one bit: its
// sign relative to a reference 2-form of its proportionality class.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mtlz/builders.hpp"
#include "mtlz/errors.hpp"
#include "mtlz/family.hpp"
#include "mtlz/graph.hpp"
#include "mtlz/named_graphs.hpp"
#include "mtlz/rational_lp.hpp"

namespace mtlz {

struct WedgeNode {
  int vertex = 0, x = 0, y = 0;  // x < y
  int e1 = 0, e2 = 0;            // edges {vertex, x}, {vertex, y}
};

class WedgeTable {
 public:
  WedgeTable() = default;
  explicit WedgeTable(const ConnectivityGraph& g) {
    for (int v = 0; v < g.n_vertices(); ++v) {
      const auto& nb = g.neighbors(v);
      for (size_t i = 0; i < nb.size(); ++i)
        for (size_t j = i + 1; j < nb.size(); ++j) {
          index_[{v, nb[i], nb[j]}] = static_cast<int>(nodes_.size());
          nodes_.push_back({v, nb[i], nb[j], g.edge_index(v, nb[i]), g.edge_index(v, nb[j])});
        }
    }
  }
  int size() const { return static_cast<int>(nodes_.size()); }
  const WedgeNode& node(int i) const { return nodes_.at(i); }
  // Node of Abar^{vx} ^ Abar^{vy} and 1 if the listed order is reversed.
  std::pair<int, int> lookup(int v, int x, int y) const {
    auto it = index_.find({v, std::min(x, y), std::max(x, y)});
    if (it == index_.end())
      throw GraphError("no wedge at " + std::to_string(v) + " for " + std::to_string(x) + "," + std::to_string(y));
    return {it->second, x > y ? 1 : 0};
  }
  std::string str(int i) const { return wedge_text(nodes_.at(i).vertex, nodes_[i].x, nodes_[i].y); }
  static std::string wedge_text(int v, int x, int y) {
    return "A(" + std::to_string(v) + "," + std::to_string(x) + ")^A(" + std::to_string(v) + "," +
           std::to_string(y) + ")";
  }

 private:
  std::vector<WedgeNode> nodes_;
  std::map<std::array<int, 3>, int> index_;
};

enum class ConstraintKind { Pair, Loop };

// XOR of the sign bits of `nodes` equals `rhs`. A two-node Pair row reads
// W1 = -k W2 (k > 0); a Loop row holds the product of the two proportionality
// signs across the loop, so its unknown rapidity sign cancels.
struct WedgeConstraint {
  ConstraintKind kind = ConstraintKind::Pair;
  std::vector<int> nodes;
  int rhs = 0;
  std::string origin;
  std::string relation;
  std::vector<std::pair<int, int>> links;  // node pairs shown proportional
};

// sum_c k_c W_c(a, b) = 0 with k_c = sqrt(gamma^{ac} gamma^{bc}) > 0.
struct MultiTermConstraint {
  int a = 0, b = 0;
  std::vector<int> nodes;
  std::string origin;
};

struct ConstraintSet {
  WedgeTable table;
  std::vector<FourLoop> loops;
  std::vector<LoopClass> loop_classes;
  std::vector<WedgeConstraint> rows;
  std::vector<MultiTermConstraint> multi;
};

inline std::string loop_text(const FourLoop& L) {
  return std::to_string(L.v[0]) + "-" + std::to_string(L.v[1]) + "-" + std::to_string(L.v[2]) + "-" +
         std::to_string(L.v[3]);
}

// Throws ConstraintError if some 4-loop is Invalid under `o` or a vertex pair
// has a single length-2 path (its wedge would have to vanish).
inline ConstraintSet generate_constraints(const ConnectivityGraph& g, const Orientation& o) {
  o.check(g);
  ConstraintSet cs;
  cs.table = WedgeTable(g);
  const auto& T = cs.table;
  for (int a = 0; a < g.n_vertices(); ++a)
    for (int b = a + 1; b < g.n_vertices(); ++b) {
      if (g.adjacent(a, b)) continue;
      auto C = g.common_neighbors(a, b);
      if (C.empty()) continue;
      std::string origin = "pair " + std::to_string(a) + "," + std::to_string(b);
      if (C.size() == 1)
        throw ConstraintError(origin + " has a single length-2 path: " + T.str(T.lookup(C[0], a, b).first) + " = 0");
      if (C.size() == 2) {
        int n1 = T.lookup(C[0], a, b).first, n2 = T.lookup(C[1], a, b).first;
        cs.rows.push_back({ConstraintKind::Pair, {n1, n2}, 1, origin, T.str(n1) + " = -k " + T.str(n2), {{n1, n2}}});
      } else {
        MultiTermConstraint mt{a, b, {}, origin};
        for (int c : C) mt.nodes.push_back(T.lookup(c, a, b).first);
        cs.multi.push_back(std::move(mt));
      }
    }
  cs.loops = enumerate_four_loops(g);
  for (const auto& L : cs.loops) {
    LoopClass cl = classify_loop(g, o, L);
    cs.loop_classes.push_back(cl);
    if (cl == LoopClass::Invalid) throw ConstraintError("loop " + loop_text(L) + " has an invalid orientation");
    // Y_i = Abar^{v_i prev} ^ Abar^{v_i next}. Y_2 = rho Y_0 and Y_1 = +-rho Y_3,
    // with + for non-bipartite and - for bipartite loops.
    WedgeConstraint row{ConstraintKind::Loop, {}, cl == LoopClass::Bipartite ? 1 : 0,
                        "loop " + loop_text(L) + " " + to_string(cl), {}, {}};
    std::array<std::string, 4> y;
    for (int i = 0; i < 4; ++i) {
      int prev = L.v[(i + 3) % 4], next = L.v[(i + 1) % 4];
      auto [n, flip] = T.lookup(L.v[i], prev, next);
      row.nodes.push_back(n);
      row.rhs ^= flip;
      y[i] = WedgeTable::wedge_text(L.v[i], prev, next);
    }
    row.links = {{row.nodes[0], row.nodes[2]}, {row.nodes[1], row.nodes[3]}};
    row.relation = y[2] + " = r " + y[0] + ", " + y[1] + " = " + (cl == LoopClass::Bipartite ? "-r " : "r ") + y[3];
    cs.rows.push_back(std::move(row));
  }
  return cs;
}

namespace detail {

struct Bits {
  std::vector<std::uint64_t> w;
  Bits() = default;
  explicit Bits(int n) : w((n + 63) / 64, 0) {}
  bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1u; }
  void flip(int i) { w[i >> 6] ^= std::uint64_t{1} << (i & 63); }
  void operator^=(const Bits& o) {
    for (size_t k = 0; k < w.size(); ++k) w[k] ^= o.w[k];
  }
  bool none() const {
    return std::all_of(w.begin(), w.end(), [](std::uint64_t x) { return x == 0; });
  }
  int lowest() const {
    for (size_t k = 0; k < w.size(); ++k)
      if (w[k]) return static_cast<int>(k * 64 + __builtin_ctzll(w[k]));
    return -1;
  }
  std::vector<int> list() const {
    std::vector<int> out;
    for (size_t k = 0; k < w.size(); ++k)
      for (std::uint64_t x = w[k]; x; x &= x - 1) out.push_back(static_cast<int>(k * 64 + __builtin_ctzll(x)));
    return out;
  }
};

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

}  // namespace detail

// Incremental GF(2) elimination with row provenance. Pivot rows are kept fully
// reduced, so each pivot variable equals rhs + (free variables in its row).
class ParitySystem {
 public:
  ParitySystem(int n_vars, int n_origins) : n_(n_vars), m_(n_origins), pivot_of_(n_vars, -1) {}

  // Returns the origins whose XOR gives 0 = 1, if the new row is inconsistent.
  std::optional<std::vector<int>> add(const std::vector<int>& vars, int rhs, int origin) {
    Row r{detail::Bits(n_), detail::Bits(m_), rhs, -1};
    for (int v : vars) r.vars.flip(v);
    r.origins.flip(origin);
    for (int c : r.vars.list())
      if (pivot_of_[c] >= 0 && r.vars.test(c)) reduce(r, rows_[pivot_of_[c]]);
    if (r.vars.none()) {
      if (r.rhs) return r.origins.list();
      return std::nullopt;
    }
    r.pivot = r.vars.lowest();
    for (auto& q : rows_)
      if (q.vars.test(r.pivot)) reduce(q, r);
    pivot_of_[r.pivot] = static_cast<int>(rows_.size());
    rows_.push_back(std::move(r));
    return std::nullopt;
  }

  // XOR of the listed variables if the rows determine it.
  std::optional<int> implied(const std::vector<int>& vars) const {
    Row r{detail::Bits(n_), detail::Bits(m_), 0, -1};
    for (int v : vars) r.vars.flip(v);
    for (int c : r.vars.list())
      if (pivot_of_[c] >= 0 && r.vars.test(c)) reduce(r, rows_[pivot_of_[c]]);
    if (!r.vars.none()) return std::nullopt;
    return r.rhs;
  }

  int n_vars() const { return n_; }
  int rank() const { return static_cast<int>(rows_.size()); }
  std::vector<int> free_vars() const {
    std::vector<int> out;
    for (int v = 0; v < n_; ++v)
      if (pivot_of_[v] < 0) out.push_back(v);
    return out;
  }
  // Free variables that var v depends on (v itself when free).
  std::vector<int> depends_on(int v) const {
    if (pivot_of_[v] < 0) return {v};
    auto out = rows_[pivot_of_[v]].vars.list();
    out.erase(std::remove(out.begin(), out.end(), v), out.end());
    return out;
  }
  // Value of v given values for the free variables (indexed by variable).
  int value(int v, const std::vector<int>& free_value) const {
    if (pivot_of_[v] < 0) return free_value[v];
    const Row& r = rows_[pivot_of_[v]];
    int x = r.rhs;
    for (int c : r.vars.list())
      if (c != v) x ^= free_value[c];
    return x;
  }

 private:
  struct Row {
    detail::Bits vars, origins;
    int rhs = 0;
    int pivot = -1;
  };
  static void reduce(Row& r, const Row& by) {
    r.vars ^= by.vars;
    r.origins ^= by.origins;
    r.rhs ^= by.rhs;
  }
  int n_, m_;
  std::vector<int> pivot_of_;
  std::vector<Row> rows_;
};

enum class CertificateKind { Parity, SignPattern, Magnitude, Rank2 };

inline const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::Parity: return "parity";
    case CertificateKind::SignPattern: return "sign-pattern";
    case CertificateKind::Magnitude: return "magnitude";
    default: return "rank-2";
  }
}

// One sign pattern of the multi-term sums, refuted by a Motzkin certificate.
struct MagnitudeRefutation {
  std::vector<std::vector<int>> signs;  // per listed multi-term constraint, +-1 per term
  FarkasCertificate farkas;
};

struct Certificate {
  CertificateKind kind = CertificateKind::Parity;
  std::vector<int> rows;   // WedgeConstraint indices (Parity: their XOR is 0 = 1)
  std::vector<int> multi;  // MultiTermConstraint indices involved
  std::vector<std::string> lines;
  std::vector<MagnitudeRefutation> refutations;  // Magnitude only
};

struct OrientationResult {
  Orientation orientation;
  std::uint64_t bits = 0;
  int orbit_size = 1;
  std::vector<LoopClass> loop_classes;
  bool consistent = false;
  std::optional<Certificate> certificate;
  std::string note;  // search limits hit, if any
};

struct ScreenLimits {
  int sign_pattern_vars = 22;  // free bits enumerated for multi-term constraints
  int rank2_vars = 16;         // free bits enumerated in the rank-2 stage
  int rank2_edges = 24;
};

namespace detail {

inline std::string orientation_text(const ConnectivityGraph& g, const Orientation& o) {
  std::string out;
  for (int e = 0; e < g.n_edges(); ++e) {
    auto [a, b] = g.edge(e);
    bool into_a = o.canonical(e) > 0;
    out += (e ? " " : "") + std::to_string(into_a ? b : a) + ">" + std::to_string(into_a ? a : b);
  }
  return out;
}

// Loops whose planes coincide: two loops sharing two edges at a common vertex
// span the same plane, since adjacent forms are independent. True if a single
// plane holds every edge.
inline bool single_plane(const ConnectivityGraph& g, const std::vector<FourLoop>& loops) {
  if (loops.empty()) return false;
  UnionFind uf(static_cast<int>(loops.size()));
  std::map<std::pair<int, int>, int> seen;  // adjacent edge pair -> loop
  for (int i = 0; i < static_cast<int>(loops.size()); ++i)
    for (int k = 0; k < 4; ++k) {
      int e = loops[i].edges[k], f = loops[i].edges[(k + 1) % 4];
      auto key = std::pair(std::min(e, f), std::max(e, f));
      auto [it, fresh] = seen.emplace(key, i);
      if (!fresh) uf.unite(i, it->second);
    }
  std::vector<char> covered(g.n_edges(), 0);
  int root = uf.find(0);
  for (int i = 0; i < static_cast<int>(loops.size()); ++i) {
    if (uf.find(i) != root) continue;
    for (int e : loops[i].edges) covered[e] = 1;
  }
  return std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
}

// Log-linear magnitude relations. Unknowns are log|W_v| per node and log
// gamma per edge; a term of a multi-term sum is 2 log(k_c |W_c|).
struct MagnitudeSystem {
  int n = 0;
  std::vector<RationalRow> eqs;  // each forced to vanish
  RowSpace span{0};
  std::function<RationalRow(int, int, int)> term;
};

inline MagnitudeSystem magnitude_system(const ConnectivityGraph& g, const ConstraintSet& cs) {
  MagnitudeSystem ms;
  const int nv = cs.table.size();
  ms.n = nv + g.n_edges();
  ms.term = [&g, &cs, nv, n = ms.n](int node, int a, int b) {
    RationalRow r(n);
    const auto& nd = cs.table.node(node);
    r[node] = 2;
    r[nv + g.edge_index(nd.vertex, a)] += 1;
    r[nv + g.edge_index(nd.vertex, b)] += 1;
    return r;
  };
  for (const auto& row : cs.rows) {
    if (row.kind == ConstraintKind::Loop) {
      for (auto [x, y] : row.links) {
        RationalRow r(ms.n);
        r[x] = 1;
        r[y] = -1;
        ms.eqs.push_back(std::move(r));
      }
    } else {
      const auto& n1 = cs.table.node(row.nodes[0]);
      RationalRow r = ms.term(row.nodes[0], n1.x, n1.y), r2 = ms.term(row.nodes[1], n1.x, n1.y);
      for (int j = 0; j < ms.n; ++j) r[j] -= r2[j];
      ms.eqs.push_back(std::move(r));
    }
  }
  ms.span = RowSpace(ms.n, ms.eqs);
  return ms;
}

inline RationalRow row_diff(RationalRow a, const RationalRow& b) {
  for (size_t j = 0; j < a.size(); ++j) a[j] -= b[j];
  return a;
}

// For each listed multi-term constraint, a class label per term: equal labels
// mean the term magnitudes coincide on every solution.
inline std::vector<std::vector<int>> magnitude_groups(const ConstraintSet& cs, const MagnitudeSystem& ms,
                                                      const std::vector<int>& which) {
  std::vector<std::vector<int>> out;
  for (int k : which) {
    const auto& mt = cs.multi[k];
    std::vector<int> label(mt.nodes.size(), -1);
    int next = 0;
    for (size_t i = 0; i < mt.nodes.size(); ++i) {
      if (label[i] >= 0) continue;
      label[i] = next;
      for (size_t j = i + 1; j < mt.nodes.size(); ++j)
        if (label[j] < 0 &&
            ms.span.contains(row_diff(ms.term(mt.nodes[i], mt.a, mt.b), ms.term(mt.nodes[j], mt.a, mt.b))))
          label[j] = next;
      ++next;
    }
    out.push_back(std::move(label));
  }
  return out;
}

// The strict system for one sign pattern: a lone term of one sign exceeds
// every term of the other sign when those are two or more, and equals it
// when there is exactly one.
inline std::pair<std::vector<RationalRow>, std::vector<RationalRow>> dominance_system(
    const ConstraintSet& cs, const MagnitudeSystem& ms, const std::vector<int>& which,
    const std::vector<std::vector<int>>& signs) {
  std::vector<RationalRow> D, E = ms.eqs;
  for (size_t q = 0; q < which.size(); ++q) {
    const auto& mt = cs.multi[which[q]];
    std::vector<int> pos, neg;
    for (size_t i = 0; i < mt.nodes.size(); ++i) (signs[q][i] > 0 ? pos : neg).push_back(mt.nodes[i]);
    for (int pass = 0; pass < 2; ++pass) {
      const auto& lone = pass ? neg : pos;
      const auto& other = pass ? pos : neg;
      if (lone.size() != 1 || other.empty()) continue;
      RationalRow t = ms.term(lone[0], mt.a, mt.b);
      if (other.size() == 1) {
        if (!pass) E.push_back(row_diff(t, ms.term(other[0], mt.a, mt.b)));
        continue;
      }
      for (int v : other) D.push_back(row_diff(t, ms.term(v, mt.a, mt.b)));
    }
  }
  return {std::move(D), std::move(E)};
}

// Directed graph on edges, arc i -> j meaning phi_i < phi_j. Acyclic check by Kahn.
inline bool acyclic(int n, const std::vector<std::pair<int, int>>& arcs) {
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> out(n);
  for (auto [i, j] : arcs) {
    out[i].push_back(j);
    ++indeg[j];
  }
  std::vector<int> q;
  for (int i = 0; i < n; ++i)
    if (!indeg[i]) q.push_back(i);
  int done = 0;
  while (!q.empty()) {
    int i = q.back();
    q.pop_back();
    ++done;
    for (int j : out[i])
      if (!--indeg[j]) q.push_back(j);
  }
  return done == n;
}

}  // namespace detail

// Runs the screening stages on one orientation.
inline OrientationResult analyze_orientation(const ConnectivityGraph& g, const Orientation& o,
                                             const ScreenLimits& lim = {}) {
  OrientationResult res;
  res.orientation = o;
  res.bits = o.bits();
  ConstraintSet cs = generate_constraints(g, o);
  res.loop_classes = cs.loop_classes;
  const auto& T = cs.table;
  const int R = static_cast<int>(cs.rows.size());

  ParitySystem ps(T.size(), std::max(R, 1));
  for (int i = 0; i < R; ++i) {
    if (auto bad = ps.add(cs.rows[i].nodes, cs.rows[i].rhs, i)) {
      Certificate c{CertificateKind::Parity, *bad, {}, {}, {}};
      for (int k : *bad) c.lines.push_back(cs.rows[k].origin + ": " + cs.rows[k].relation);
      c.lines.push_back("the sign parities of these relations add up to 0 = 1, i.e. X = -X for a nonzero wedge X");
      res.certificate = std::move(c);
      return res;
    }
  }

  bool planar = detail::single_plane(g, cs.loops);
  detail::UnionFind cls(T.size());
  if (planar) {
    for (int i = 1; i < T.size(); ++i) cls.unite(0, i);
  } else {
    for (const auto& r : cs.rows)
      for (auto [x, y] : r.links) cls.unite(x, y);
  }
  std::vector<int> active;
  for (int k = 0; k < static_cast<int>(cs.multi.size()); ++k) {
    const auto& n = cs.multi[k].nodes;
    if (std::all_of(n.begin(), n.end(), [&](int v) { return cls.find(v) == cls.find(n[0]); })) active.push_back(k);
  }
  auto ms = detail::magnitude_system(g, cs);
  auto groups = detail::magnitude_groups(cs, ms, active);
  // With terms of equal magnitude merged, sum_G e^{T_G} net_G = 0 needs every
  // net to vanish or nets of both signs.
  auto nae_ok = [&](const std::vector<int>& fv) {
    for (size_t q = 0; q < active.size(); ++q) {
      const auto& n = cs.multi[active[q]].nodes;
      std::map<int, int> net;
      for (size_t i = 0; i < n.size(); ++i) net[groups[q][i]] += ps.value(n[i], fv) ? -1 : 1;
      bool pos = false, neg = false;
      for (auto [G, x] : net) pos |= x > 0, neg |= x < 0;
      if (pos != neg) return false;
    }
    return true;
  };
  // Patterns that survived nae_ok, with a Motzkin certificate if refuted.
  std::map<std::vector<std::vector<int>>, std::optional<FarkasCertificate>> patterns;
  auto pattern_ok = [&](const std::vector<int>& fv) {
    if (!nae_ok(fv)) return false;
    std::vector<std::vector<int>> signs;
    for (int k : active) {
      std::vector<int> sg;
      for (int v : cs.multi[k].nodes) sg.push_back(ps.value(v, fv) ? -1 : 1);
      signs.push_back(std::move(sg));
    }
    auto it = patterns.find(signs);
    if (it == patterns.end()) {
      auto [D, E] = detail::dominance_system(cs, ms, active, signs);
      it = patterns.emplace(signs, strict_infeasibility(D, E, ms.n)).first;
    }
    return !it->second.has_value();
  };

  // Sign pattern and magnitude stages: enumerate only the free bits the active multi-term constraints see.
  if (!active.empty()) {
    std::set<int> rel;
    for (int k : active)
      for (int v : cs.multi[k].nodes)
        for (int f : ps.depends_on(v)) rel.insert(f);
    std::vector<int> relv(rel.begin(), rel.end());
    if (static_cast<int>(relv.size()) > lim.sign_pattern_vars) {
      res.note = "sign-pattern stage skipped: " + std::to_string(relv.size()) + " free bits";
    } else {
      bool any = false;
      std::vector<int> fv(T.size(), 0);
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << relv.size()) && !any; ++m) {
        for (size_t i = 0; i < relv.size(); ++i) fv[relv[i]] = (m >> i) & 1;
        any = pattern_ok(fv);
      }
      auto describe = [&](Certificate& c) {
        for (size_t q = 0; q < active.size(); ++q) {
          const auto& mt = cs.multi[active[q]];
          std::string s = mt.origin + ": sum_c k_c W_c = 0 over";
          for (size_t i = 0; i < mt.nodes.size(); ++i)
            s += " " + T.str(mt.nodes[i]) + " [|.| class " + std::to_string(groups[q][i]) + "]";
          c.lines.push_back(s);
        }
        c.lines.push_back("terms with the same |.| class have equal k_c |W_c|, forced by the two-term and loop relations");
      };
      if (!any && patterns.empty()) {
        Certificate c{CertificateKind::SignPattern, {}, active, {}, {}};
        describe(c);
        c.lines.push_back("every sign assignment allowed by the " + std::to_string(R) +
                          " two-term and loop relations leaves some such sum unbalanced");
        res.certificate = std::move(c);
        return res;
      }
      if (!any) {
        Certificate c{CertificateKind::Magnitude, {}, active, {}, {}};
        describe(c);
        for (auto& [signs, farkas] : patterns) c.refutations.push_back({signs, *farkas});
        c.lines.push_back(std::to_string(patterns.size()) +
                          " balanced sign patterns remain; in each, a lone term of one sign must exceed every "
                          "term of the other sign");
        const auto& ex = c.refutations.front();
        std::string s = "e.g. signs";
        for (size_t q = 0; q < active.size(); ++q) {
          s += q ? " |" : "";
          for (int x : ex.signs[q]) s += x > 0 ? " +" : " -";
        }
        int used = 0;
        for (const auto& y : ex.farkas.y) used += y != 0;
        s += ": a nonnegative combination of " + std::to_string(used) +
             " strict inequalities equals a combination of the equalities, so 0 > 0";
        c.lines.push_back(s);
        res.certificate = std::move(c);
        return res;
      }
    }
  }

  // Rank-2 stage: all forms in one plane. u_e = s_e (cos phi_e, sin phi_e) with
  // phi_e in [0, pi), so sign det(u_i, u_j) = s_i s_j sign(phi_j - phi_i).
  if (planar) {
    auto fr = ps.free_vars();
    const int E = g.n_edges();
    if (static_cast<int>(fr.size()) > lim.rank2_vars || E > lim.rank2_edges) {
      res.note += std::string(res.note.empty() ? "" : "; ") + "rank-2 stage skipped: " +
                  std::to_string(fr.size()) + " free bits, " + std::to_string(E) + " edges";
    } else {
      std::vector<int> fv(T.size(), 0), bit(T.size());
      long solutions = 0;
      bool realizable = false;
      std::vector<std::pair<int, int>> arcs(T.size());
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << fr.size()) && !realizable; ++m) {
        for (size_t i = 0; i < fr.size(); ++i) fv[fr[i]] = (m >> i) & 1;
        if (!pattern_ok(fv)) continue;
        ++solutions;
        for (int v = 0; v < T.size(); ++v) bit[v] = ps.value(v, fv);
        // Reversing every u_e leaves all determinants unchanged: fix s_0.
        for (std::uint64_t s = 0; s < (std::uint64_t{1} << (E - 1)) && !realizable; ++s) {
          for (int v = 0; v < T.size(); ++v) {
            const auto& nd = T.node(v);
            int s1 = nd.e1 == 0 ? 0 : (s >> (nd.e1 - 1)) & 1, s2 = nd.e2 == 0 ? 0 : (s >> (nd.e2 - 1)) & 1;
            bool later = bit[v] ^ s1 ^ s2;  // 1: phi_{e2} < phi_{e1}
            arcs[v] = later ? std::pair(nd.e2, nd.e1) : std::pair(nd.e1, nd.e2);
          }
          realizable = detail::acyclic(E, arcs);
        }
      }
      if (!realizable) {
        Certificate c{CertificateKind::Rank2, {}, active, {}, {}};
        c.lines.push_back("the 4-loop planes glue into one plane, so every form lies in a common 2d subspace");
        c.lines.push_back(std::to_string(solutions) + " sign assignments satisfy the parity and multi-term relations");
        c.lines.push_back("none is the determinant sign pattern of " + std::to_string(E) +
                          " planar vectors under any of the 2^" + std::to_string(E - 1) + " sign choices");
        res.certificate = std::move(c);
        return res;
      }
    }
  }
  res.consistent = true;
  return res;
}

// Replays a certificate: the XOR check for parity, exact Motzkin checks for
// magnitude refutations, and recomputation of the pattern enumeration.
inline bool replay_certificate(const ConnectivityGraph& g, const Orientation& o, const Certificate& c) {
  ConstraintSet cs = generate_constraints(g, o);
  if (c.kind == CertificateKind::Parity) {
    std::vector<int> count(cs.table.size(), 0);
    int rhs = 0;
    for (int k : c.rows) {
      if (k < 0 || k >= static_cast<int>(cs.rows.size())) return false;
      for (int v : cs.rows[k].nodes) count[v] ^= 1;
      rhs ^= cs.rows[k].rhs;
    }
    return rhs == 1 && std::all_of(count.begin(), count.end(), [](int x) { return x == 0; });
  }
  if (c.kind == CertificateKind::Magnitude) {
    auto ms = detail::magnitude_system(g, cs);
    for (int k : c.multi)
      if (k < 0 || k >= static_cast<int>(cs.multi.size())) return false;
    for (const auto& r : c.refutations) {
      if (r.signs.size() != c.multi.size()) return false;
      for (size_t q = 0; q < c.multi.size(); ++q)
        if (r.signs[q].size() != cs.multi[c.multi[q]].nodes.size()) return false;
      auto [D, E] = detail::dominance_system(cs, ms, c.multi, r.signs);
      if (!verify_farkas(r.farkas, D, E, ms.n)) return false;
    }
  }
  auto again = analyze_orientation(g, o);
  return !again.consistent && again.certificate && again.certificate->kind == c.kind;
}

// ------------------------------------------------------------ symmetry

inline std::vector<std::vector<int>> automorphisms(const ConnectivityGraph& g) {
  const int n = g.n_vertices();
  std::vector<std::vector<int>> out;
  std::vector<int> p(n, -1);
  std::vector<char> used(n, 0);
  std::function<void(int)> rec = [&](int v) {
    if (v == n) {
      out.push_back(p);
      return;
    }
    for (int w = 0; w < n; ++w) {
      if (used[w] || g.degree(w) != g.degree(v)) continue;
      bool ok = true;
      for (int u = 0; u < v && ok; ++u) ok = g.adjacent(u, v) == g.adjacent(p[u], w);
      if (!ok) continue;
      p[v] = w;
      used[w] = 1;
      rec(v + 1);
      used[w] = 0;
    }
    p[v] = -1;
  };
  rec(0);
  return out;
}

// Action of an automorphism (or of global reversal) on orientation bits.
struct EdgeSymmetry {
  std::vector<int> edge;
  std::uint64_t flip = 0;  // XOR applied after permuting
  std::uint64_t apply(std::uint64_t bits) const {
    std::uint64_t out = 0;
    for (size_t e = 0; e < edge.size(); ++e)
      if ((bits >> e) & 1u) out |= std::uint64_t{1} << edge[e];
    return out ^ flip;
  }
};

inline std::vector<EdgeSymmetry> orientation_symmetries(const ConnectivityGraph& g) {
  if (g.n_edges() > 64) throw GraphError("orientation screening supports at most 64 edges");
  const std::uint64_t all = g.n_edges() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << g.n_edges()) - 1;
  std::vector<EdgeSymmetry> out;
  for (const auto& p : automorphisms(g)) {
    EdgeSymmetry s;
    s.edge.resize(g.n_edges());
    for (int e = 0; e < g.n_edges(); ++e) {
      auto [a, b] = g.edge(e);
      int f = g.edge_index(p[a], p[b]);
      s.edge[e] = f;
      // Arrow into a maps to arrow into p[a]; the bit flips when p[a] > p[b].
      if (p[a] > p[b]) s.flip |= std::uint64_t{1} << f;
    }
    out.push_back(s);
    s.flip ^= all;
    out.push_back(std::move(s));
  }
  return out;
}

// ------------------------------------------------------------ fans

struct FanOrientationType {
  FanType type = FanType::TypeII;
  int l = 0;  // number of sink a-vertices (type II)
};

// Fan layout of graphs::fan: 0, 1 are the b-vertices.
inline std::optional<FanOrientationType> classify_fan_orientation(const ConnectivityGraph& g, const Orientation& o) {
  const int m = g.n_vertices() - 2;
  int inter = 0, sinks = 0;
  for (int j = 0; j < m; ++j) {
    auto r = classify_vertex(g, o, 2 + j);
    inter += r == VertexRole::Intermediate;
    sinks += r == VertexRole::Sink;
  }
  if (inter == m) return FanOrientationType{FanType::TypeI, 0};
  if (inter == 0) return FanOrientationType{FanType::TypeII, sinks};
  return std::nullopt;
}

// Type I: b1 -> a_j -> b2. Type II: a_1..a_l sinks, the rest sources.
inline Orientation fan_orientation(int m, FanType type, int l = 0) {
  auto g = graphs::fan(m);
  std::vector<std::pair<int, int>> arrows;
  for (int j = 0; j < m; ++j) {
    int a = 2 + j;
    if (type == FanType::TypeI) {
      arrows.push_back({0, a});
      arrows.push_back({a, 1});
    } else if (j < l) {
      arrows.push_back({0, a});
      arrows.push_back({1, a});
    } else {
      arrows.push_back({a, 0});
      arrows.push_back({a, 1});
    }
  }
  return Orientation::from_arrows(g, arrows);
}

// ------------------------------------------------------------ verdicts

enum class VerdictKind { NoSolution, Candidate, Unresolved };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::NoSolution: return "NoSolution";
    case VerdictKind::Candidate: return "Candidate";
    default: return "Unresolved";
  }
}

// Graphs for which a builder template exists; only these can be Candidates.
inline bool has_builder_template(const ConnectivityGraph& g) {
  const auto& n = g.name();
  return n == "square" || n == "cube" || n == "hypercube4" || n.rfind("fan(", 0) == 0;
}

struct ScreenOptions {
  std::function<bool(const ConnectivityGraph&, const Orientation&)> filter;  // must be symmetry invariant
  std::string filter_label;
  int max_consistent = -1;  // stop after this many consistent orbits (-1: exhaust)
  ScreenLimits limits;
};

struct Verdict {
  std::string graph;
  std::string restriction;
  VerdictKind kind = VerdictKind::Unresolved;
  std::string screen_failure;
  std::vector<OrientationResult> orientations;  // one per symmetry orbit
  long valid_orientations = 0;
  int symmetry_order = 1;
  bool exhaustive = true;

  std::vector<Orientation> candidates() const {
    std::vector<Orientation> out;
    for (const auto& r : orientations)
      if (r.consistent) out.push_back(r.orientation);
    return out;
  }
  int contradicted() const {
    int k = 0;
    for (const auto& r : orientations) k += !r.consistent;
    return k;
  }
};

inline std::string transcript(const ConnectivityGraph& g, const Verdict& v) {
  std::ostringstream os;
  os << "graph " << v.graph << (v.restriction.empty() ? "" : " [" + v.restriction + "]") << ": " << to_string(v.kind)
     << "\n";
  if (!v.screen_failure.empty()) {
    os << "  screening: " << v.screen_failure << "\n";
    return os.str();
  }
  os << "  " << v.valid_orientations << " orientations valid on every 4-loop, " << v.orientations.size()
     << " up to " << v.symmetry_order << " symmetries" << (v.exhaustive ? "" : " (search stopped early)") << "\n";
  for (const auto& r : v.orientations) {
    os << "  orientation " << detail::orientation_text(g, r.orientation) << " (orbit " << r.orbit_size << "): ";
    if (r.consistent) {
      os << (v.kind == VerdictKind::Candidate ? "consistent" : "no contradiction found");
      if (!r.note.empty()) os << " [" << r.note << "]";
      os << "\n";
      continue;
    }
    os << "contradiction (" << to_string(r.certificate->kind) << ")\n";
    for (const auto& line : r.certificate->lines) os << "    " << line << "\n";
  }
  return os.str();
}

inline Verdict screen(const ConnectivityGraph& g, const ScreenOptions& opt = {}) {
  Verdict v;
  v.graph = g.name();
  v.restriction = opt.filter_label;
  auto sr = screen_graph(g);
  if (!sr.pass()) {
    v.kind = VerdictKind::NoSolution;
    if (!sr.triangle_free) {
      auto t = sr.triangles.front();
      v.screen_failure = "triangle " + std::to_string(t[0]) + "-" + std::to_string(t[1]) + "-" + std::to_string(t[2]);
    } else {
      auto w = sr.uncovered_wedges.front();
      v.screen_failure = "edges " + std::to_string(w[0]) + "-" + std::to_string(w[1]) + " and " +
                         std::to_string(w[1]) + "-" + std::to_string(w[2]) + " lie on no 4-loop";
    }
    return v;
  }
  const int E = g.n_edges();
  auto syms = orientation_symmetries(g);
  v.symmetry_order = static_cast<int>(syms.size());
  auto loops = enumerate_four_loops(g);
  std::vector<std::vector<int>> closing(E);  // loops whose largest edge is e
  for (int i = 0; i < static_cast<int>(loops.size()); ++i)
    closing[*std::max_element(loops[i].edges.begin(), loops[i].edges.end())].push_back(i);

  std::vector<int> s(E, 1);
  int consistent = 0;
  bool stop = false;
  auto loop_ok = [&](const FourLoop& L) {
    std::array<int, 4> r{};
    for (int i = 0; i < 4; ++i) {
      int in = 0;
      for (int e : {L.edges[i], L.edges[(i + 3) % 4]}) in += (s[e] > 0 ? g.edge(e).a : g.edge(e).b) == L.v[i];
      r[i] = in == 2 ? 1 : (in == 0 ? -1 : 0);
    }
    int sinks = 0, sources = 0;
    for (int x : r) sinks += x == 1, sources += x == -1;
    if (sinks == 2 && sources == 2) return true;
    if (sinks != 1 || sources != 1) return false;
    for (int i = 0; i < 4; ++i)
      if (r[i] == 1) return r[(i + 2) % 4] == -1;
    return false;
  };
  std::function<void(int)> rec = [&](int e) {
    if (stop) return;
    if (e == E) {
      Orientation o(s);
      if (opt.filter && !opt.filter(g, o)) return;
      ++v.valid_orientations;
      std::uint64_t b = o.bits();
      std::set<std::uint64_t> orbit;
      for (const auto& sy : syms) {
        std::uint64_t img = sy.apply(b);
        if (img < b) return;
        orbit.insert(img);
      }
      auto r = analyze_orientation(g, o, opt.limits);
      r.orbit_size = static_cast<int>(orbit.size());
      consistent += r.consistent;
      v.orientations.push_back(std::move(r));
      if (opt.max_consistent > 0 && consistent >= opt.max_consistent) stop = true;
      return;
    }
    for (int sign : {1, -1}) {
      s[e] = sign;
      bool ok = true;
      for (int i : closing[e]) ok = ok && loop_ok(loops[i]);
      if (ok) rec(e + 1);
      if (stop) return;
    }
    s[e] = 1;
  };
  rec(0);
  v.exhaustive = !stop;
  // The count of valid orientations is only complete for an exhaustive run.
  if (consistent > 0)
    v.kind = has_builder_template(g) ? VerdictKind::Candidate : VerdictKind::Unresolved;
  else
    v.kind = v.exhaustive ? VerdictKind::NoSolution : VerdictKind::Unresolved;
  return v;
}

// ------------------------------------------------------------ catalog

struct CatalogEntry {
  ConnectivityGraph graph;
  ScreenOptions options;
};

inline std::map<std::string, CatalogEntry> catalog_entries() {
  std::map<std::string, CatalogEntry> c;
  auto add = [&](const std::string& key, ConnectivityGraph g, ScreenOptions o = {}) {
    c.emplace(key, CatalogEntry{std::move(g), std::move(o)});
  };
  add("square", graphs::square());
  {
    ScreenOptions o;
    o.filter = [](const ConnectivityGraph& g, const Orientation& x) {
      return classify_loop(g, x, enumerate_four_loops(g).front()) == LoopClass::Bipartite;
    };
    o.filter_label = "bipartite orientation";
    add("square_bipartite", graphs::square(), o);
  }
  add("cube", graphs::cube());
  {
    ScreenOptions o;
    o.max_consistent = 1;
    add("hypercube4", graphs::hypercube4(), o);
  }
  for (int m : {3, 4}) {
    add("fan(" + std::to_string(m) + ")", graphs::fan(m));
    ScreenOptions o1;
    o1.filter = [](const ConnectivityGraph& g, const Orientation& x) {
      auto t = classify_fan_orientation(g, x);
      return t && t->type == FanType::TypeI;
    };
    o1.filter_label = "type-I orientations";
    add("fan_type_I(" + std::to_string(m) + ")", graphs::fan(m), o1);
    ScreenOptions o2;
    o2.filter = [](const ConnectivityGraph& g, const Orientation& x) {
      auto t = classify_fan_orientation(g, x);
      return t && t->type == FanType::TypeII;
    };
    o2.filter_label = "type-II orientations";
    add("fan_type_II(" + std::to_string(m) + ")", graphs::fan(m), o2);
  }
  add("double_fan", graphs::double_fan());
  add("double_pentagon", graphs::double_polygon(5));
  add("double_hexagon", graphs::double_polygon(6));
  add("square_with_ears", graphs::square_with_ears());
  add("mobius_ladder", graphs::mobius_ladder());
  for (int k = 1; k <= 3; ++k) add("cube_plus_" + std::to_string(k), graphs::cube_plus(k));
  return c;
}

inline std::map<std::string, Verdict> screen_catalog() {
  std::map<std::string, Verdict> out;
  for (const auto& [key, e] : catalog_entries()) out.emplace(key, screen(e.graph, e.options));
  return out;
}

// ------------------------------------------------------------ builder witnesses

// A family from the builder templates whose orientation lies in the orbit of
// `o`, or nullopt if no template covers it.
inline std::optional<MTLZFamily> builder_witness(const ConnectivityGraph& g, const Orientation& o) {
  std::vector<MTLZFamily> tries;
  const auto& n = g.name();
  if (n == "square") {
    SquareParams sp;
    sp.theta = 0.4;
    sp.gamma14 = 0.7;
    tries.push_back(build_square(sp));
  } else if (n == "cube") {
    CubeParams cp;
    cp.tau = {0.5, 0.3, 0.4};
    tries.push_back(build_cube(cp));
  } else if (n == "hypercube4") {
    Hypercube4Params hp;
    hp.tau = {0.3, 0.2, 0.1, 0.25, 0.15, 0.05};
    tries.push_back(build_hypercube4(hp));
  } else if (n.rfind("fan(", 0) == 0) {
    const int m = g.n_vertices() - 2;
    auto t = classify_fan_orientation(g, o);
    if (!t || t->type != FanType::TypeII || t->l < 1 || t->l > m - 1) return std::nullopt;
    FanParams fp;
    fp.m = m;
    fp.l = t->l;
    // Equal sink and source totals: sinks get (m-l) each, sources l each.
    for (int j = 0; j < m; ++j) fp.gamma.push_back(j < t->l ? (m - t->l) * 0.5 : t->l * 0.5);
    for (int j = 0; j + 1 < m; ++j) fp.theta.push_back(0.1 * (j + 1));
    tries.push_back(build_fan(fp));
  }
  auto syms = orientation_symmetries(g);
  std::uint64_t target = o.bits();
  for (auto& f : tries) {
    std::uint64_t b = f.orientation().bits();
    for (const auto& sy : syms)
      if (sy.apply(b) == target) return std::move(f);
  }
  return std::nullopt;
}

}  // namespace mtlz
