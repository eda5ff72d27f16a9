#pragma once
// Analytic scattering for M=3 families: ordered products of two-level LZ
// connecting matrices along dual-graph paths from a start cell to its
// antipode, monomial reconstruction of the probability matrix, and the
// zero-pattern census.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtlz/arrangement.hpp"
#include "mtlz/errors.hpp"
#include "mtlz/family.hpp"

namespace mtlz {

// ln Gamma(z) for Re z > 0: upward recurrence to Re z >= 12, then Stirling.
inline std::complex<double> log_gamma(std::complex<double> z) {
  if (!(z.real() > 0)) throw DomainError("log_gamma: Re z must be positive");
  std::complex<double> shift = 0;
  while (z.real() < 12) {
    shift += std::log(z);
    z += 1.0;
  }
  static const double B[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
  std::complex<double> s = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2 * M_PI);
  std::complex<double> zp = z;
  for (int k = 1; k <= 7; ++k) {
    s += B[k - 1] / (2.0 * k * (2.0 * k - 1)) / zp;
    zp *= z * z;
  }
  return s - shift;
}

// Stokes phase chi(gamma) = arg Gamma(1 - i gamma) + gamma (ln gamma - 1) + pi/4.
inline double stokes_phase(double gamma) {
  if (!(gamma > 0)) throw DomainError("stokes_phase: gamma must be positive");
  return log_gamma({1.0, -gamma}).imag() + gamma * (std::log(gamma) - 1) + M_PI / 4;
}

// Forward block [[sqrt p, -sqrt(1-p) e^{i chi}], [sqrt(1-p) e^{-i chi}, sqrt p]],
// p = exp(-2 pi gamma); the reverse crossing uses the adjoint.
inline Eigen::Matrix2cd lz_block(double gamma, bool reverse = false) {
  if (!(gamma > 0)) throw DomainError("lz_block: gamma must be positive");
  const double p = std::exp(-2 * M_PI * gamma);
  const std::complex<double> ph = std::polar(1.0, stokes_phase(gamma));
  Eigen::Matrix2cd m;
  m << std::sqrt(p), -std::sqrt(1 - p) * ph, std::sqrt(1 - p) * std::conj(ph), std::sqrt(p);
  return reverse ? Eigen::Matrix2cd(m.adjoint()) : m;
}

// Landau-Zener probability matrix of independent two-level systems; bit k of a
// state label is system k.
inline Eigen::MatrixXd lz_direct_product(const std::vector<double>& gammas) {
  const int n = 1 << gammas.size();
  Eigen::MatrixXd P = Eigen::MatrixXd::Ones(n, n);
  for (size_t k = 0; k < gammas.size(); ++k) {
    double p = std::exp(-2 * M_PI * gammas[k]);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) P(a, c) *= ((a ^ c) >> k & 1) ? 1 - p : p;
  }
  return P;
}

// ------------------------------------------------------------------- model

struct ScatteringModel {
  MTLZFamily family;
  GreatCircleArrangement arrangement;
  CellComplex complex;
  std::vector<int> symbol;  // per edge: which p_i / q_i index it carries
  int n_symbols = 0;
  std::vector<std::vector<std::pair<int, int>>> adjacency;  // cell -> (cell, dual edge)

  int N() const { return family.N(); }
  std::vector<double> symbol_gammas() const {
    std::vector<double> g(n_symbols, 0);
    for (size_t e = 0; e < symbol.size(); ++e) g[symbol[e]] = family.gamma_abs(static_cast<int>(e));
    return g;
  }
};

namespace detail {

// Hypercube-like labelling (every edge flips one bit): symbol = bit. Otherwise
// one symbol per distinct |gamma|.
inline std::vector<int> default_symbols(const MTLZFamily& f, int& n) {
  const auto& g = f.graph;
  std::vector<int> s(g.n_edges());
  bool bits = true;
  for (int e = 0; e < g.n_edges(); ++e) {
    unsigned x = static_cast<unsigned>(g.edge(e).a ^ g.edge(e).b);
    bits &= x != 0 && (x & (x - 1)) == 0;
  }
  if (bits) {
    n = 0;
    for (int e = 0; e < g.n_edges(); ++e) {
      s[e] = __builtin_ctz(static_cast<unsigned>(g.edge(e).a ^ g.edge(e).b));
      n = std::max(n, s[e] + 1);
    }
    return s;
  }
  std::vector<double> seen;
  for (int e = 0; e < g.n_edges(); ++e) {
    double x = f.gamma_abs(e);
    auto it = std::find_if(seen.begin(), seen.end(), [&](double y) { return std::abs(x - y) <= 1e-14 * std::abs(x); });
    s[e] = static_cast<int>(it - seen.begin());
    if (it == seen.end()) seen.push_back(x);
  }
  n = static_cast<int>(seen.size());
  return s;
}

}  // namespace detail

inline ScatteringModel make_scattering_model(const MTLZFamily& f, std::vector<int> symbols = {}) {
  ScatteringModel m;
  m.family = f;
  m.arrangement = build_arrangement(f);
  m.complex = enumerate_cells(m.arrangement);
  if (symbols.empty()) {
    m.symbol = detail::default_symbols(f, m.n_symbols);
  } else {
    if (static_cast<int>(symbols.size()) != f.graph.n_edges()) throw DomainError("one symbol per edge required");
    m.symbol = std::move(symbols);
    m.n_symbols = *std::max_element(m.symbol.begin(), m.symbol.end()) + 1;
  }
  for (int e = 0; e < f.graph.n_edges(); ++e)
    if (f.gamma[e] == 0) throw DomainError("edge " + f.graph.edge_label(e) + " has gamma = 0");
  m.adjacency.assign(m.complex.F(), {});
  for (int k = 0; k < static_cast<int>(m.complex.dual.size()); ++k) {
    const auto& d = m.complex.dual[k];
    m.adjacency[d.from].push_back({d.to, k});
    m.adjacency[d.to].push_back({d.from, k});
  }
  return m;
}

// ------------------------------------------------------------------- paths

struct CrossingStep {
  int dual_edge = 0;
  int from = 0, to = 0;
  int circle = 0;
  bool reverse = false;  // crossing from the negative to the positive side
};

// Shortest dual-graph path avoiding `banned` dual edges; empty if none.
inline std::vector<CrossingStep> dual_path(const ScatteringModel& m, int start, int goal,
                                           const std::vector<char>& banned = {}) {
  const auto& cx = m.complex;
  std::vector<std::pair<int, int>> prev(cx.F(), {-2, -1});
  prev[start] = {-1, -1};
  std::deque<int> q{start};
  while (!q.empty() && prev[goal].first == -2) {
    int u = q.front();
    q.pop_front();
    for (auto [w, k] : m.adjacency[u]) {
      if (!banned.empty() && banned[k]) continue;
      if (prev[w].first != -2) continue;
      prev[w] = {u, k};
      q.push_back(w);
    }
  }
  if (prev[goal].first == -2) return {};
  std::vector<CrossingStep> out;
  for (int u = goal; u != start; u = prev[u].first) {
    int k = prev[u].second;
    const auto& d = cx.dual[k];
    out.push_back({k, prev[u].first, u, d.circle, d.from == u});
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// Per-edge signed gamma with |gamma| taken from symbol values.
inline std::vector<double> edge_gammas(const ScatteringModel& m, const std::vector<double>& sym) {
  if (static_cast<int>(sym.size()) != m.n_symbols) throw DomainError("one gamma per symbol required");
  std::vector<double> g(m.symbol.size());
  for (size_t e = 0; e < g.size(); ++e) g[e] = (m.family.gamma[e] > 0 ? 1 : -1) * sym[m.symbol[e]];
  return g;
}

// Ordered product of connecting matrices; a negative gamma flips the direction.
inline Eigen::MatrixXcd path_product(const ScatteringModel& m, const std::vector<CrossingStep>& path,
                                     const std::vector<double>& gamma) {
  const int n = m.N();
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(n, n);
  for (const auto& st : path) {
    int e = m.arrangement.circles[st.circle].edge;
    const auto& ed = m.family.graph.edge(e);
    Eigen::Matrix2cd b = lz_block(std::abs(gamma[e]), st.reverse != (gamma[e] < 0));
    // Left-multiply by the embedded block: only rows a and b change.
    Eigen::RowVectorXcd ra = S.row(ed.a), rb = S.row(ed.b);
    S.row(ed.a) = b(0, 0) * ra + b(0, 1) * rb;
    S.row(ed.b) = b(1, 0) * ra + b(1, 1) * rb;
  }
  return S;
}

struct AnalyticScattering {
  int start = 0, end = 0;
  Eigen::MatrixXcd S;
  Eigen::MatrixXd P;  // P(a, b) = |S(a, b)|^2, from level b to level a
  std::vector<CrossingStep> path, alt_path;
  double path_delta = 0;  // max |P - P_alt|
};

// Evaluates along the BFS path and along a second path that avoids the first
// path's dual edges where possible; throws if the two disagree beyond `tol`.
inline AnalyticScattering scattering_product(const ScatteringModel& m, int start,
                                             std::optional<std::vector<double>> gamma = {}, double tol = 1e-12) {
  if (start < 0 || start >= m.complex.F()) throw DomainError("scattering_product: no such cell");
  std::vector<double> g = gamma ? *gamma : m.family.gamma;
  if (static_cast<int>(g.size()) != m.family.graph.n_edges()) throw DomainError("one gamma per edge required");
  AnalyticScattering r;
  r.start = start;
  r.end = m.complex.antipode(start);
  r.path = dual_path(m, start, r.end);
  std::vector<char> banned(m.complex.dual.size(), 0);
  for (const auto& s : r.path) banned[s.dual_edge] = 1;
  r.alt_path = dual_path(m, start, r.end, banned);
  if (r.alt_path.empty()) {
    // Fall back to a path that differs in its first step.
    std::fill(banned.begin(), banned.end(), 0);
    banned[r.path.front().dual_edge] = 1;
    r.alt_path = dual_path(m, start, r.end, banned);
  }
  r.S = path_product(m, r.path, g);
  r.P = r.S.cwiseAbs2();
  if (!r.alt_path.empty()) {
    r.path_delta = (path_product(m, r.alt_path, g).cwiseAbs2() - r.P).cwiseAbs().maxCoeff();
    if (r.path_delta > tol)
      throw IntegrabilityError("scattering_product: path dependence " + std::to_string(r.path_delta) +
                               " from cell " + std::to_string(start));
  }
  return r;
}

// Direction of a straight time path whose far past lies in `cell`.
inline TimePath cell_time_path(const ScatteringModel& m, int cell, const Eigen::Vector3d& eps) {
  return TimePath{-m.complex.cells.at(cell).rep, eps};
}

// ---------------------------------------------------------------- symbolic

// prod_i p_i^{pe_i} q_i^{qe_i}, or zero.
struct Monomial {
  bool zero = true;
  std::vector<int> pe, qe;

  int degree() const {
    return zero ? 0 : std::accumulate(pe.begin(), pe.end(), 0) + std::accumulate(qe.begin(), qe.end(), 0);
  }
  double eval(const std::vector<double>& p) const {
    if (zero) return 0;
    double v = 1;
    for (size_t i = 0; i < pe.size(); ++i) v *= std::pow(p[i], pe[i]) * std::pow(1 - p[i], qe[i]);
    return v;
  }
  Monomial relabelled(const std::vector<int>& perm) const {  // symbol i -> perm[i]
    if (zero) return *this;
    Monomial m{false, std::vector<int>(pe.size()), std::vector<int>(qe.size())};
    for (size_t i = 0; i < pe.size(); ++i) {
      m.pe[perm[i]] = pe[i];
      m.qe[perm[i]] = qe[i];
    }
    return m;
  }
  std::string str() const {
    if (zero) return "0";
    std::string s;
    auto put = [&](char c, size_t i, int k) {
      for (int j = 0; j < k; ++j) s += (s.empty() ? "" : " ") + std::string(1, c) + std::to_string(i + 1);
    };
    for (size_t i = 0; i < pe.size(); ++i) put('p', i, pe[i]);
    for (size_t i = 0; i < qe.size(); ++i) put('q', i, qe[i]);
    return s.empty() ? "1" : s;
  }
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.zero == b.zero && (a.zero || (a.pe == b.pe && a.qe == b.qe));
  }
};

// Parses "0", "1", or a product like "p_1 p_2 q_3" / "p1 q2".
inline Monomial parse_monomial(const std::string& text, int n_symbols) {
  std::istringstream in(text);
  std::string tok;
  Monomial m{false, std::vector<int>(n_symbols, 0), std::vector<int>(n_symbols, 0)};
  bool any = false;
  while (in >> tok) {
    if (tok == "0") return Monomial{};
    if (tok == "1") continue;
    std::string digits;
    for (char c : tok.substr(1))
      if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
    if ((tok[0] != 'p' && tok[0] != 'q') || digits.empty()) throw DomainError("bad monomial factor: " + tok);
    int i = std::stoi(digits) - 1;
    if (i < 0 || i >= n_symbols) throw DomainError("monomial index out of range: " + tok);
    (tok[0] == 'p' ? m.pe : m.qe)[i]++;
    any = true;
  }
  if (!any && text.find('1') == std::string::npos) throw DomainError("empty monomial");
  return m;
}

struct ZeroPattern {
  int half_zeros = 0;   // zeros strictly below the diagonal
  std::string columns;  // zero count per column, descending
  friend auto operator<=>(const ZeroPattern&, const ZeroPattern&) = default;
};

struct ProbabilityMatrix {
  int n = 0, n_symbols = 0;
  std::vector<Monomial> entry;  // row-major, entry[a * n + b] = P(a, b)
  Eigen::MatrixXd numeric;      // at the model's own gammas
  bool fitted = true;           // every entry matched a unique monomial
  std::vector<std::string> unfitted;

  const Monomial& at(int a, int b) const { return entry[a * n + b]; }
  bool is_zero(int a, int b) const { return fitted ? at(a, b).zero : numeric(a, b) < 1e-12; }
  ZeroPattern pattern() const {
    ZeroPattern z;
    std::vector<int> col(n, 0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (is_zero(a, b)) {
          col[b]++;
          if (a > b) z.half_zeros++;
        }
    std::sort(col.rbegin(), col.rend());
    for (int c : col) z.columns += std::to_string(c);
    return z;
  }
  std::string str() const {
    std::string s;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) s += (b ? " | " : "") + at(a, b).str();
      s += "\n";
    }
    return s;
  }
};

inline ProbabilityMatrix parse_probability_matrix(const std::vector<std::vector<std::string>>& rows, int n_symbols) {
  ProbabilityMatrix pm;
  pm.n = static_cast<int>(rows.size());
  pm.n_symbols = n_symbols;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != pm.n) throw DomainError("probability matrix must be square");
    for (const auto& x : r) pm.entry.push_back(parse_monomial(x, n_symbols));
  }
  return pm;
}

// Gamma values per symbol at which entries are sampled for the fit.
inline std::vector<std::vector<double>> fit_samples(int n_symbols) {
  static const double base[3][3] = {{0.15, 0.25, 0.2}, {0.31, 0.07, 0.12}, {0.22, 0.41, 0.05}};
  std::vector<std::vector<double>> out(3, std::vector<double>(n_symbols));
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < n_symbols; ++i) out[s][i] = base[s][i % 3] * (1 + 0.13 * (i / 3));
  return out;
}

namespace detail {

inline const std::vector<Monomial>& monomial_candidates(int n_symbols) {
  static std::map<int, std::vector<Monomial>> cache;
  auto it = cache.find(n_symbols);
  if (it != cache.end()) return it->second;
  std::vector<Monomial> out;
  std::vector<int> ex(2 * n_symbols, 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == 2 * n_symbols) {
      Monomial m{false, std::vector<int>(ex.begin(), ex.begin() + n_symbols),
                 std::vector<int>(ex.begin() + n_symbols, ex.end())};
      out.push_back(m);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      ex[i] = k;
      self(self, i + 1, left - k);
    }
    ex[i] = 0;
  };
  rec(rec, 0, 3);
  return cache[n_symbols] = out;
}

}  // namespace detail

// Unique monomial of degree <= 3 reproducing values[s] at p_i = exp(-2 pi gamma_s_i).
inline std::optional<Monomial> fit_monomial(const std::vector<double>& values,
                                            const std::vector<std::vector<double>>& p_values, int n_symbols,
                                            double rel_tol = 1e-9) {
  bool all_zero = std::all_of(values.begin(), values.end(), [](double v) { return v < 1e-13; });
  if (all_zero) return Monomial{};
  std::optional<Monomial> hit;
  for (const auto& m : detail::monomial_candidates(n_symbols)) {
    bool ok = true;
    for (size_t s = 0; s < values.size() && ok; ++s) {
      double v = m.eval(p_values[s]);
      ok = std::abs(v - values[s]) <= rel_tol * std::max(std::abs(v), 1e-300);
    }
    if (!ok) continue;
    if (hit) return std::nullopt;  // ambiguous
    hit = m;
  }
  return hit;
}

inline ProbabilityMatrix symbolic_probability(const ScatteringModel& m, int start) {
  const int n = m.N(), k = m.n_symbols;
  auto samples = fit_samples(k);
  std::vector<Eigen::MatrixXd> Ps;
  std::vector<std::vector<double>> pv;
  for (const auto& gs : samples) {
    Ps.push_back(scattering_product(m, start, edge_gammas(m, gs)).P);
    std::vector<double> p(k);
    for (int i = 0; i < k; ++i) p[i] = std::exp(-2 * M_PI * gs[i]);
    pv.push_back(p);
  }
  ProbabilityMatrix pm;
  pm.n = n;
  pm.n_symbols = k;
  pm.numeric = scattering_product(m, start).P;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::vector<double> v;
      for (const auto& P : Ps) v.push_back(P(a, b));
      auto fit = fit_monomial(v, pv, k);
      if (!fit) {
        pm.fitted = false;
        pm.unfitted.push_back("(" + std::to_string(a) + "," + std::to_string(b) + ")");
        pm.entry.push_back(Monomial{});
      } else {
        pm.entry.push_back(*fit);
      }
    }
  return pm;
}

// Polynomial in p_1..p_k after substituting q_i = 1 - p_i; key = exponents.
using PPolynomial = std::map<std::vector<int>, long long>;

inline PPolynomial expand(const Monomial& m) {
  PPolynomial out;
  if (m.zero) return out;
  const int k = static_cast<int>(m.pe.size());
  out[std::vector<int>(k, 0)] = 1;
  for (int i = 0; i < k; ++i) {
    // Multiply by p_i^pe * (1 - p_i)^qe.
    std::vector<long long> f{1};
    for (int r = 0; r < m.qe[i]; ++r) {
      std::vector<long long> g(f.size() + 1, 0);
      for (size_t j = 0; j < f.size(); ++j) {
        g[j] += f[j];
        g[j + 1] -= f[j];
      }
      f = g;
    }
    PPolynomial next;
    for (const auto& [ex, c] : out)
      for (size_t j = 0; j < f.size(); ++j) {
        if (f[j] == 0) continue;
        auto e2 = ex;
        e2[i] += m.pe[i] + static_cast<int>(j);
        next[e2] += c * f[j];
      }
    out.clear();
    for (const auto& [ex, c] : next)
      if (c != 0) out[ex] = c;
  }
  return out;
}

struct StructuralCheck {
  bool symmetric = true, stochastic = true, constant_diagonal = true, low_degree = true, coupled_nonzero = true;
  std::vector<std::string> failures;
  bool ok() const { return symmetric && stochastic && constant_diagonal && low_degree && coupled_nonzero; }
};

// Symbolic checks: symmetry, rows summing to 1 after q_i = 1 - p_i, diagonal
// p_1...p_k, degree <= 3, and nonzero entries on every coupled pair.
inline StructuralCheck structural_check(const ProbabilityMatrix& pm, const ConnectivityGraph& g) {
  StructuralCheck c;
  const int n = pm.n, k = pm.n_symbols;
  auto fail = [&](bool& flag, std::string why) {
    flag = false;
    c.failures.push_back(std::move(why));
  };
  if (!pm.fitted) fail(c.low_degree, "entries without a monomial fit");
  Monomial diag{false, std::vector<int>(k, 1), std::vector<int>(k, 0)};
  PPolynomial one{{std::vector<int>(k, 0), 1}};
  for (int a = 0; a < n; ++a) {
    PPolynomial row;
    for (int b = 0; b < n; ++b) {
      const auto& m = pm.at(a, b);
      if (!(m == pm.at(b, a))) fail(c.symmetric, "P(" + std::to_string(a) + "," + std::to_string(b) + ") != transpose");
      if (m.degree() > 3) fail(c.low_degree, "degree > 3 at (" + std::to_string(a) + "," + std::to_string(b) + ")");
      for (const auto& [ex, v] : expand(m)) row[ex] += v;
    }
    std::erase_if(row, [](const auto& kv) { return kv.second == 0; });
    if (row != one) fail(c.stochastic, "row " + std::to_string(a) + " does not sum to 1");
    if (!(pm.at(a, a) == diag)) fail(c.constant_diagonal, "diagonal " + std::to_string(a) + " is " + pm.at(a, a).str());
  }
  for (const auto& e : g.edges())
    if (pm.at(e.a, e.b).zero) fail(c.coupled_nonzero, "coupled pair " + std::to_string(e.a) + "-" + std::to_string(e.b) + " is zero");
  return c;
}

struct Equivalence {
  std::vector<int> level;   // level a of the first matrix is level[a] of the second
  std::vector<int> symbol;  // symbol i of the first is symbol[i] of the second
};

// Searches level permutations (backtracking) and symbol permutations.
inline std::optional<Equivalence> find_equivalence(const ProbabilityMatrix& x, const ProbabilityMatrix& y) {
  if (x.n != y.n || x.n_symbols != y.n_symbols || x.pattern() != y.pattern()) return std::nullopt;
  const int n = x.n;
  std::vector<int> sym(x.n_symbols);
  std::iota(sym.begin(), sym.end(), 0);
  do {
    std::vector<Monomial> rx(x.entry.size());
    for (size_t i = 0; i < rx.size(); ++i) rx[i] = x.entry[i].relabelled(sym);
    std::vector<int> lv(n, -1);
    std::vector<char> used(n, 0);
    auto rec = [&](auto&& self, int a) -> bool {
      if (a == n) return true;
      for (int c = 0; c < n; ++c) {
        if (used[c]) continue;
        bool ok = true;
        for (int b = 0; b <= a && ok; ++b) {
          int cb = b == a ? c : lv[b];
          ok = rx[a * n + b] == y.at(c, cb) && rx[b * n + a] == y.at(cb, c);
        }
        if (!ok) continue;
        lv[a] = c;
        used[c] = 1;
        if (self(self, a + 1)) return true;
        used[c] = 0;
      }
      lv[a] = -1;
      return false;
    };
    if (rec(rec, 0)) return Equivalence{lv, sym};
  } while (std::next_permutation(sym.begin(), sym.end()));
  return std::nullopt;
}

// Matches a symbolic matrix against a numeric one evaluated at p_i, up to
// level and symbol permutations.
inline std::optional<Equivalence> match_numeric(const ProbabilityMatrix& x, const Eigen::MatrixXd& P,
                                                const std::vector<double>& p, double tol) {
  const int n = x.n;
  if (P.rows() != n || P.cols() != n || static_cast<int>(p.size()) != x.n_symbols) return std::nullopt;
  std::vector<int> sym(x.n_symbols);
  std::iota(sym.begin(), sym.end(), 0);
  do {
    Eigen::MatrixXd ex(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) ex(a, b) = x.at(a, b).relabelled(sym).eval(p);
    std::vector<int> lv(n, -1);
    std::vector<char> used(n, 0);
    auto rec = [&](auto&& self, int a) -> bool {
      if (a == n) return true;
      for (int c = 0; c < n; ++c) {
        if (used[c]) continue;
        bool ok = true;
        for (int b = 0; b <= a && ok; ++b) {
          int cb = b == a ? c : lv[b];
          ok = std::abs(ex(a, b) - P(c, cb)) <= tol && std::abs(ex(b, a) - P(cb, c)) <= tol;
        }
        if (!ok) continue;
        lv[a] = c;
        used[c] = 1;
        if (self(self, a + 1)) return true;
        used[c] = 0;
      }
      return false;
    };
    if (rec(rec, 0)) return Equivalence{lv, sym};
  } while (std::next_permutation(sym.begin(), sym.end()));
  return std::nullopt;
}

// ------------------------------------------------------------------ census

// The seven zero patterns of probability matrices on the cube, by type number.
inline const std::vector<ZeroPattern>& cube_zero_types() {
  static const std::vector<ZeroPattern> t{{0, "00000000"},  {6, "33111111"},  {8, "22222222"}, {11, "44332222"},
                                          {12, "44333322"}, {12, "33333333"}, {16, "44444444"}};
  return t;
}

inline int cube_type_of(const ZeroPattern& z) {
  const auto& t = cube_zero_types();
  for (size_t i = 0; i < t.size(); ++i)
    if (t[i] == z) return static_cast<int>(i) + 1;
  return 0;
}

struct CensusEntry {
  ZeroPattern pattern;
  int type = 0;  // 1..7 for the cube patterns, 0 otherwise
  std::vector<int> cells;
  ProbabilityMatrix representative;
};

struct Census {
  int cells = 0;
  std::vector<CensusEntry> entries;  // ordered by pattern
  std::vector<std::string> anomalies;
  double max_path_delta = 0;
  std::vector<ProbabilityMatrix> per_cell;

  const CensusEntry* find_type(int type) const {
    for (const auto& e : entries)
      if (e.type == type) return &e;
    return nullptr;
  }
  std::vector<int> types() const {
    std::vector<int> t;
    for (const auto& e : entries) t.push_back(e.type);
    std::sort(t.begin(), t.end());
    return t;
  }
};

inline Census classify_all_cells(const ScatteringModel& m) {
  Census c;
  c.cells = m.complex.F();
  std::map<ZeroPattern, CensusEntry> buckets;
  for (int s = 0; s < c.cells; ++s) {
    c.max_path_delta = std::max(c.max_path_delta, scattering_product(m, s).path_delta);
    auto pm = symbolic_probability(m, s);
    if (!pm.fitted) c.anomalies.push_back("cell " + std::to_string(s) + ": no monomial fit for entries");
    auto z = pm.pattern();
    auto& b = buckets[z];
    if (b.cells.empty()) {
      b.pattern = z;
      b.type = m.N() == 8 ? cube_type_of(z) : 0;
      b.representative = pm;
      if (b.type == 0) c.anomalies.push_back("cell " + std::to_string(s) + ": zero pattern " + z.columns +
                                             " is not one of the seven cube types");
    }
    b.cells.push_back(s);
    c.per_cell.push_back(std::move(pm));
  }
  for (auto& [z, e] : buckets) c.entries.push_back(std::move(e));
  return c;
}

}  // namespace mtlz
