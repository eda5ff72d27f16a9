#pragma once
// Built-in connectivity graphs used by the builders and the no-go catalog.

#include <regex>
#include <string>
#include <vector>

#include "mtlz/graph.hpp"

namespace mtlz::graphs {

// Vertices 0..3 are the square's states 1..4; edges 12, 23, 34, 41.
inline ConnectivityGraph square() {
  return ConnectivityGraph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, "square");
}

// Vertex label = bit string; bit i-1 flips along direction i.
inline ConnectivityGraph hypercube(int dim) {
  if (dim < 1 || dim > 6) throw GraphError("hypercube dimension must be in 1..6");
  const int n = 1 << dim;
  std::vector<std::pair<int, int>> e;
  for (int v = 0; v < n; ++v)
    for (int k = 0; k < dim; ++k)
      if (!(v >> k & 1)) e.push_back({v, v | (1 << k)});
  return ConnectivityGraph(n, e, dim == 3 ? "cube" : (dim == 4 ? "hypercube4" : "hypercube"));
}

inline ConnectivityGraph cube() { return hypercube(3); }
inline ConnectivityGraph hypercube4() { return hypercube(4); }

// 0 = b1, 1 = b2, 2..m+1 = a_1..a_m; every a_j joins both b's.
inline ConnectivityGraph fan(int m) {
  if (m < 2) throw GraphError("fan needs m >= 2");
  std::vector<std::pair<int, int>> e;
  for (int j = 0; j < m; ++j) {
    e.push_back({0, 2 + j});
    e.push_back({1, 2 + j});
  }
  return ConnectivityGraph(m + 2, e, "fan(" + std::to_string(m) + ")");
}

// Two interleaved fans: hubs 1,3 over {2,4,6,8} and hubs 2,4 over {5,7} (1-based).
inline ConnectivityGraph double_fan() {
  std::vector<std::pair<int, int>> e1 = {{1, 2}, {1, 4}, {1, 6}, {1, 8}, {3, 2}, {3, 4},
                                         {3, 6}, {3, 8}, {2, 5}, {2, 7}, {4, 5}, {4, 7}};
  std::vector<std::pair<int, int>> e;
  for (auto [a, b] : e1) e.push_back({a - 1, b - 1});
  return ConnectivityGraph(8, e, "double_fan");
}

// Cycle C_k with every vertex doubled: i and i+k are twins with the same neighbours.
inline ConnectivityGraph double_polygon(int k) {
  if (k < 5) throw GraphError("double polygon needs k >= 5");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < k; ++i) {
    int j = (i + 1) % k;
    for (int a : {i, i + k})
      for (int b : {j, j + k}) e.push_back({a, b});
  }
  return ConnectivityGraph(2 * k, e, k == 5 ? "double_pentagon" : (k == 6 ? "double_hexagon" : "double_polygon"));
}

// Square 0-1-2-3 plus vertex 4 on the diagonal pair {0,2} and vertex 5 on {1,3}.
inline ConnectivityGraph square_with_ears() {
  return ConnectivityGraph(6, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 4}, {2, 4}, {1, 5}, {3, 5}},
                           "square_with_ears");
}

// Moebius ladder on six vertices: hexagon plus the three long chords.
inline ConnectivityGraph mobius_ladder() {
  return ConnectivityGraph(
      6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}, {0, 3}, {1, 4}, {2, 5}}, "mobius_ladder");
}

// Cube with k body diagonals {0,7}, {1,6}, {2,5} added in that order.
inline ConnectivityGraph cube_plus(int k) {
  if (k < 1 || k > 3) throw GraphError("cube_plus_k needs k in 1..3");
  auto c = cube();
  std::vector<std::pair<int, int>> e;
  for (auto ed : c.edges()) e.push_back({ed.a, ed.b});
  const std::pair<int, int> diag[3] = {{0, 7}, {1, 6}, {2, 5}};
  for (int i = 0; i < k; ++i) e.push_back(diag[i]);
  return ConnectivityGraph(8, e, "cube_plus_" + std::to_string(k));
}

inline ConnectivityGraph triangle() {
  return ConnectivityGraph(3, {{0, 1}, {1, 2}, {0, 2}}, "triangle");
}

// Accepts the catalog names plus fan(m), fan(m,l), hypercube(d), double_polygon(k).
inline ConnectivityGraph by_name(const std::string& name) {
  std::smatch m;
  if (name == "square") return square();
  if (name == "cube") return cube();
  if (name == "hypercube4") return hypercube4();
  if (name == "double_fan") return double_fan();
  if (name == "double_pentagon") return double_polygon(5);
  if (name == "double_hexagon") return double_polygon(6);
  if (name == "square_with_ears") return square_with_ears();
  if (name == "mobius_ladder") return mobius_ladder();
  if (name == "triangle") return triangle();
  if (std::regex_match(name, m, std::regex(R"(cube_plus_([123]))"))) return cube_plus(std::stoi(m[1]));
  if (std::regex_match(name, m, std::regex(R"(fan\((\d+)(?:,\s*\d+)?\))"))) return fan(std::stoi(m[1]));
  if (std::regex_match(name, m, std::regex(R"(hypercube\((\d+)\))"))) return hypercube(std::stoi(m[1]));
  if (std::regex_match(name, m, std::regex(R"(double_polygon\((\d+)\))")))
    return double_polygon(std::stoi(m[1]));
  throw GraphError("unknown graph name: " + name);
}

}  // namespace mtlz::graphs
