#pragma once
// Exact rational linear algebra for small certificate searches: row space
// membership and phase-one simplex feasibility.

#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mtlz {

using Rational = boost::multiprecision::cpp_rational;
using RationalRow = std::vector<Rational>;

// Reduced row echelon form of a set of rows, for membership queries.
class RowSpace {
 public:
  explicit RowSpace(int n) : n_(n) {}
  RowSpace(int n, const std::vector<RationalRow>& rows) : n_(n) {
    for (const auto& r : rows) add(r);
  }
  // Adds a row; returns false if it was already in the span.
  bool add(RationalRow r) {
    reduce(r);
    int p = -1;
    for (int j = 0; j < n_ && p < 0; ++j)
      if (r[j] != 0) p = j;
    if (p < 0) return false;
    Rational s = r[p];
    for (auto& x : r) x /= s;
    for (auto& [q, row] : rows_)
      if (row[p] != 0) {
        Rational f = row[p];
        for (int j = 0; j < n_; ++j) row[j] -= f * r[j];
      }
    rows_.push_back({p, std::move(r)});
    return true;
  }
  bool contains(RationalRow r) const {
    reduce(r);
    for (const auto& x : r)
      if (x != 0) return false;
    return true;
  }
  int rank() const { return static_cast<int>(rows_.size()); }

 private:
  void reduce(RationalRow& r) const {
    for (const auto& [p, row] : rows_)
      if (r[p] != 0) {
        Rational f = r[p];
        for (int j = 0; j < n_; ++j) r[j] -= f * row[j];
      }
  }
  int n_;
  std::vector<std::pair<int, RationalRow>> rows_;
};

// Some x >= 0 with B x = b, or nullopt. Phase-one simplex on a dense
// tableau with Bland's rule, so it terminates without tolerances.
inline std::optional<RationalRow> nonnegative_solution(std::vector<RationalRow> B, RationalRow b) {
  const int m = static_cast<int>(B.size());
  if (m == 0) return RationalRow{};
  const int nx = static_cast<int>(B[0].size());
  const int nc = nx + m;  // x then artificials; rhs in column nc
  std::vector<RationalRow> T(m, RationalRow(nc + 1));
  for (int i = 0; i < m; ++i) {
    Rational sg = b[i] < 0 ? -1 : 1;
    for (int j = 0; j < nx; ++j) T[i][j] = sg * B[i][j];
    T[i][nx + i] = 1;
    T[i][nc] = sg * b[i];
  }
  std::vector<int> basis(m);
  RationalRow R(nc + 1);  // reduced costs of min sum(artificials)
  for (int i = 0; i < m; ++i) {
    basis[i] = nx + i;
    for (int j = 0; j < nx; ++j) R[j] -= T[i][j];
    R[nc] -= T[i][nc];
  }
  for (;;) {
    int enter = -1;
    for (int j = 0; j < nc && enter < 0; ++j)
      if (R[j] < 0) enter = j;
    if (enter < 0) break;
    int leave = -1;
    Rational best;
    for (int i = 0; i < m; ++i) {
      if (T[i][enter] <= 0) continue;
      Rational ratio = T[i][nc] / T[i][enter];
      if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) break;  // unbounded direction; cannot occur for phase one
    Rational pv = T[leave][enter];
    for (auto& x : T[leave]) x /= pv;
    for (int i = 0; i < m; ++i)
      if (i != leave && T[i][enter] != 0) {
        Rational f = T[i][enter];
        for (int j = 0; j <= nc; ++j) T[i][j] -= f * T[leave][j];
      }
    Rational f = R[enter];
    for (int j = 0; j <= nc; ++j) R[j] -= f * T[leave][j];
    basis[leave] = enter;
  }
  if (R[nc] != 0) return std::nullopt;
  RationalRow x(nx);
  for (int i = 0; i < m; ++i)
    if (basis[i] < nx) x[basis[i]] = T[i][nc];
  return x;
}

// Motzkin alternative for {x : E x = 0, D x > 0}: either that set is
// nonempty, or there are y >= 0 (not all zero) and z with
// sum_i y_i D_i = sum_j z_j E_j. Returns (y, z) in the second case.
struct FarkasCertificate {
  RationalRow y, z;
};

inline std::optional<FarkasCertificate> strict_infeasibility(const std::vector<RationalRow>& D,
                                                             const std::vector<RationalRow>& E, int n) {
  const int p = static_cast<int>(D.size()), r = static_cast<int>(E.size());
  if (p == 0) return std::nullopt;
  // Unknowns y (p), z+ (r), z- (r): sum y_i D_i - sum (z+ - z-)_j E_j = 0, sum y = 1.
  std::vector<RationalRow> B(n + 1, RationalRow(p + 2 * r));
  RationalRow b(n + 1);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < p; ++i) B[k][i] = D[i][k];
    for (int j = 0; j < r; ++j) {
      B[k][p + j] = -E[j][k];
      B[k][p + r + j] = E[j][k];
    }
  }
  for (int i = 0; i < p; ++i) B[n][i] = 1;
  b[n] = 1;
  auto x = nonnegative_solution(std::move(B), std::move(b));
  if (!x) return std::nullopt;
  FarkasCertificate c{RationalRow(x->begin(), x->begin() + p), RationalRow(r)};
  for (int j = 0; j < r; ++j) c.z[j] = (*x)[p + j] - (*x)[p + r + j];
  return c;
}

// Exact check of a Motzkin certificate.
inline bool verify_farkas(const FarkasCertificate& c, const std::vector<RationalRow>& D,
                          const std::vector<RationalRow>& E, int n) {
  if (c.y.size() != D.size() || c.z.size() != E.size()) return false;
  bool positive = false;
  for (const auto& v : c.y) {
    if (v < 0) return false;
    positive |= v > 0;
  }
  if (!positive) return false;
  for (int k = 0; k < n; ++k) {
    Rational s = 0;
    for (size_t i = 0; i < D.size(); ++i) s += c.y[i] * D[i][k];
    for (size_t j = 0; j < E.size(); ++j) s -= c.z[j] * E[j][k];
    if (s != 0) return false;
  }
  return true;
}

}  // namespace mtlz
