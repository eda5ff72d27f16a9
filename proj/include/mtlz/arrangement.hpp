#pragma once
// Great-circle arrangements on S^2 cut out by the crossing planes
// Abar^{ab}_j x^j = 0 of an M=3 family, their cells, the dual graph, and the
// stereographic picture.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtlz/errors.hpp"
#include "mtlz/family.hpp"

namespace mtlz {

struct GreatCircle {
  int edge = -1;  // family edge index, -1 for free-standing circles
  std::string label;
  Eigen::Vector3d normal;  // unit
};

struct GreatCircleArrangement {
  std::vector<GreatCircle> circles;
  int size() const { return static_cast<int>(circles.size()); }
};

// Throws DegenerateArrangement if two normals are parallel. Points where more
// than two circles meet are handled by merging vertices, not by perturbation.
inline GreatCircleArrangement make_arrangement(std::vector<GreatCircle> circles) {
  if (circles.size() < 2) throw DomainError("arrangement needs at least two circles");
  for (auto& c : circles) {
    double n = c.normal.norm();
    if (!(n > 0)) throw DegenerateArrangement("circle " + c.label + " has a zero normal");
    c.normal /= n;
  }
  GreatCircleArrangement arr;
  std::string bad;
  for (size_t i = 0; i < circles.size(); ++i)
    for (size_t j = i + 1; j < circles.size(); ++j)
      if (circles[i].normal.cross(circles[j].normal).norm() < 1e-9)
        bad += (bad.empty() ? "" : ", ") + circles[i].label + "||" + circles[j].label;
  if (!bad.empty()) throw DegenerateArrangement("coincident great circles: " + bad);
  arr.circles = std::move(circles);
  return arr;
}

inline GreatCircleArrangement build_arrangement(const MTLZFamily& f) {
  if (f.M != 3) throw DimensionError("cell decomposition is implemented for M = 3 only (got M = " +
                                     std::to_string(f.M) + ")");
  std::vector<GreatCircle> c;
  for (int e = 0; e < f.graph.n_edges(); ++e) {
    OneForm a = f.rescaled(e);
    if (a.norm() == 0) throw DegenerateArrangement("edge " + f.graph.edge_label(e) + " has a zero form");
    c.push_back({e, f.graph.edge_label(e), Eigen::Vector3d(a(0), a(1), a(2))});
  }
  return make_arrangement(std::move(c));
}

struct Cell {
  int id = 0;
  std::vector<int> sign;  // side of each circle, +1 where normal . x > 0
  Eigen::Vector3d rep;    // interior point
  std::vector<int> corners;
};

// Arrow from the positive side of `circle` to the negative side.
struct DualEdge {
  int from = 0;  // cell on the positive side
  int to = 0;    // cell on the negative side
  int circle = 0;
};

struct Arc {
  int circle = 0;
  int v0 = 0, v1 = 0;
  Eigen::Vector3d mid;
};

struct CellComplex {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Arc> arcs;
  std::vector<Cell> cells;
  std::vector<DualEdge> dual;
  std::map<std::vector<int>, int> index;  // sign vector -> cell id

  int V() const { return static_cast<int>(vertices.size()); }
  int E() const { return static_cast<int>(arcs.size()); }
  int F() const { return static_cast<int>(cells.size()); }
  int euler() const { return V() - E() + F(); }
  int antipode(int c) const {
    auto s = cells.at(c).sign;
    for (auto& x : s) x = -x;
    return index.at(s);
  }
  std::vector<std::pair<int, int>> neighbours(int c) const {  // (cell, dual edge)
    std::vector<std::pair<int, int>> out;
    for (int k = 0; k < static_cast<int>(dual.size()); ++k) {
      if (dual[k].from == c) out.push_back({dual[k].to, k});
      if (dual[k].to == c) out.push_back({dual[k].from, k});
    }
    return out;
  }
};

inline std::vector<int> sign_vector(const GreatCircleArrangement& arr, const Eigen::Vector3d& x) {
  std::vector<int> s(arr.size());
  for (int i = 0; i < arr.size(); ++i) s[i] = arr.circles[i].normal.dot(x) > 0 ? 1 : -1;
  return s;
}

inline CellComplex enumerate_cells(const GreatCircleArrangement& arr) {
  const int K = arr.size();
  const double on_tol = 1e-9;
  CellComplex cx;
  auto add_vertex = [&](const Eigen::Vector3d& p) {
    for (const auto& q : cx.vertices)
      if ((p - q).norm() < on_tol) return;
    cx.vertices.push_back(p);
  };
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K; ++j) {
      Eigen::Vector3d c = arr.circles[i].normal.cross(arr.circles[j].normal).normalized();
      add_vertex(c);
      add_vertex(-c);
    }
  for (const auto& p : cx.vertices) {
    int through = 0;
    for (const auto& c : arr.circles) through += std::abs(c.normal.dot(p)) < on_tol;
    if (through < 2) throw DegenerateArrangement("vertex lies on fewer than two circles");
  }

  for (int i = 0; i < K; ++i) {
    const Eigen::Vector3d& n = arr.circles[i].normal;
    std::vector<std::pair<double, int>> on;
    Eigen::Vector3d u, w;
    for (int v = 0; v < cx.V(); ++v)
      if (std::abs(n.dot(cx.vertices[v])) < on_tol) on.push_back({0.0, v});
    u = cx.vertices[on.front().second];
    w = n.cross(u);
    for (auto& [ang, v] : on) {
      const auto& p = cx.vertices[v];
      ang = std::atan2(p.dot(w), p.dot(u));
      if (ang < 0) ang += 2 * M_PI;
    }
    std::sort(on.begin(), on.end());
    for (size_t k = 0; k < on.size(); ++k) {
      double a0 = on[k].first, a1 = k + 1 < on.size() ? on[k + 1].first : on[0].first + 2 * M_PI;
      double am = 0.5 * (a0 + a1);
      Arc arc{i, on[k].second, on[(k + 1) % on.size()].second, std::cos(am) * u + std::sin(am) * w};
      cx.arcs.push_back(arc);
    }
  }

  auto cell_of = [&](std::vector<int> s) {
    auto it = cx.index.find(s);
    if (it != cx.index.end()) return it->second;
    int id = static_cast<int>(cx.cells.size());
    cx.index.emplace(s, id);
    cx.cells.push_back({id, std::move(s), Eigen::Vector3d::Zero(), {}});
    return id;
  };
  for (const auto& arc : cx.arcs) {
    auto s = sign_vector(arr, arc.mid);
    for (int j = 0; j < K; ++j)
      if (j != arc.circle && std::abs(arr.circles[j].normal.dot(arc.mid)) < on_tol)
        throw DegenerateArrangement("arc midpoint lies on a second circle");
    s[arc.circle] = 1;
    int pos = cell_of(s);
    s[arc.circle] = -1;
    int neg = cell_of(s);
    cx.dual.push_back({pos, neg, arc.circle});
    for (int c : {pos, neg})
      for (int v : {arc.v0, arc.v1}) {
        auto& cs = cx.cells[c].corners;
        if (std::find(cs.begin(), cs.end(), v) == cs.end()) cs.push_back(v);
      }
  }

  // Representative: normalized mean of the cell corners (cells are convex);
  // fall back to arc midpoints nudged inside if that fails.
  for (auto& cell : cx.cells) {
    Eigen::Vector3d m = Eigen::Vector3d::Zero();
    for (int v : cell.corners) m += cx.vertices[v];
    bool ok = m.norm() > 1e-12 && sign_vector(arr, m.normalized()) == cell.sign;
    if (ok) {
      cell.rep = m.normalized();
      continue;
    }
    for (const auto& e : cx.dual) {
      if (e.from != cell.id && e.to != cell.id) continue;
      for (const auto& arc : cx.arcs) {
        if (arc.circle != e.circle) continue;
        Eigen::Vector3d p = (arc.mid + 1e-4 * cell.sign[e.circle] * arr.circles[e.circle].normal).normalized();
        if (sign_vector(arr, p) == cell.sign) {
          cell.rep = p;
          ok = true;
          break;
        }
      }
      if (ok) break;
    }
    if (!ok) throw DegenerateArrangement("no interior point found for a cell");
  }
  if (cx.euler() != 2) throw DegenerateArrangement("Euler characteristic " + std::to_string(cx.euler()) + " != 2");
  return cx;
}

// Stereographic projection from `pole` onto the plane through the origin
// orthogonal to it, in the basis (e1, e2).
struct Stereographic {
  Eigen::Vector3d pole, e1, e2;

  explicit Stereographic(Eigen::Vector3d p) : pole(p.normalized()) {
    Eigen::Vector3d t = std::abs(pole.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    e1 = (t - t.dot(pole) * pole).normalized();
    e2 = pole.cross(e1);
  }
  Eigen::Vector2d project(const Eigen::Vector3d& x) const {
    double d = 1 - x.dot(pole);
    return Eigen::Vector2d(x.dot(e1), x.dot(e2)) / d;
  }
  Eigen::Vector3d lift(const Eigen::Vector2d& X) const {
    double r2 = X.squaredNorm();
    return (2 * X(0) * e1 + 2 * X(1) * e2 + (r2 - 1) * pole) / (r2 + 1);
  }
};

// Image of a great circle: a circle, or a line through the origin if the
// great circle passes through the pole.
struct PlanarCurve {
  std::string label;
  bool is_line = false;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();  // circle
  double radius = 0;
  Eigen::Vector2d direction = Eigen::Vector2d::Zero();  // line through origin
};

inline PlanarCurve project_circle(const Stereographic& st, const Eigen::Vector3d& normal, std::string label = {},
                                  double line_tol = 1e-12) {
  Eigen::Vector3d n = normal.normalized();
  double n1 = n.dot(st.e1), n2 = n.dot(st.e2), n3 = n.dot(st.pole);
  PlanarCurve c;
  c.label = std::move(label);
  if (std::abs(n3) < line_tol) {
    c.is_line = true;
    c.direction = Eigen::Vector2d(-n2, n1).normalized();
  } else {
    c.center = Eigen::Vector2d(-n1 / n3, -n2 / n3);
    c.radius = 1 / std::abs(n3);
  }
  return c;
}

struct PlanarScene {
  Stereographic projection{Eigen::Vector3d::UnitZ()};
  std::vector<PlanarCurve> curves;
  std::vector<Eigen::Vector2d> vertices;
  std::vector<Eigen::Vector2d> cell_points;
};

// Rotates the pole away from every circle before projecting.
inline PlanarScene stereographic_scene(const GreatCircleArrangement& arr, const CellComplex& cx) {
  std::vector<Eigen::Vector3d> tries{Eigen::Vector3d::UnitZ()};
  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 64; ++k) tries.push_back(Eigen::Vector3d(nd(rng), nd(rng), nd(rng)).normalized());
  for (const auto& p : tries) {
    bool clear = true;
    for (const auto& c : arr.circles) clear &= std::abs(c.normal.dot(p)) > 1e-3;
    for (const auto& v : cx.vertices) clear &= (v - p).norm() > 1e-3;
    if (!clear) continue;
    PlanarScene s{Stereographic(p), {}, {}, {}};
    for (const auto& c : arr.circles) s.curves.push_back(project_circle(s.projection, c.normal, c.label));
    for (const auto& v : cx.vertices) s.vertices.push_back(s.projection.project(v));
    for (const auto& cell : cx.cells) s.cell_points.push_back(s.projection.project(cell.rep));
    return s;
  }
  throw DegenerateArrangement("no projection pole clear of all circles");
}

}  // namespace mtlz
