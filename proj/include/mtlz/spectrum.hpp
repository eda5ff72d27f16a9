#pragma once
// Eigenvalue scans of H(t) = A + t diag(b) with exact-crossing detection.
//
// Sorted eigenvalue tracks are sampled on a grid that is refined wherever a
// cubic Hermite prediction (values plus Hellmann-Feynman slopes) misses the
// midpoint value. Every local minimum of an adjacent-level gap is then
// bisected on the sign of the gap slope and classified as exact or avoided.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "mtlz/errors.hpp"
#include "mtlz/hamiltonian.hpp"

namespace mtlz {

struct GapMinimum {
  double t = 0;
  int level = 0;  // gap between sorted levels `level` and `level + 1`
  double gap = 0;
  bool converged = true;
};

// n levels meeting at one point: contributes n(n-1)/2 pairwise crossings.
struct ExactCrossing {
  double t = 0;
  int lowest_level = 0;
  int levels = 2;
  int pairs() const { return levels * (levels - 1) / 2; }
};

struct SpectrumScan {
  double t_min = 0, t_max = 0;
  std::vector<double> t;
  Eigen::MatrixXd eigenvalues;  // rows: grid points, cols: sorted levels
  double spectral_scale = 0;
  double exact_threshold = 0;
  std::vector<ExactCrossing> exact;
  std::vector<GapMinimum> avoided;
  std::vector<GapMinimum> unconverged;
  int window_doublings = 0;

  int exact_pair_count() const {
    int n = 0;
    for (const auto& c : exact) n += c.pairs();
    return n;
  }
};

struct ScanOptions {
  std::optional<std::pair<double, double>> range;  // fixed window; otherwise auto
  int grid = 2000;
  double exact_rel = 1e-9;      // exact if refined gap < exact_rel * spectral scale
  double hermite_rel = 1e-8;    // refinement tolerance on midpoint prediction
  int max_depth = 40;
  int max_doublings = 8;
};

namespace detail {

struct Sample {
  double t;
  Eigen::VectorXd val;
  Eigen::VectorXd slope;
};

inline Sample sample(const LinearHamiltonian& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.at(t));
  if (es.info() != Eigen::Success) throw ConvergenceError("eigensolver failed");
  Sample s{t, es.eigenvalues(), Eigen::VectorXd(h.size())};
  const auto& V = es.eigenvectors();
  for (int k = 0; k < h.size(); ++k) s.slope(k) = V.col(k).cwiseAbs2().dot(h.b);
  return s;
}

inline bool hermite_ok(const Sample& a, const Sample& b, const Sample& m, double tol) {
  const double w = b.t - a.t;
  for (int k = 0; k < a.val.size(); ++k) {
    double pred = 0.5 * (a.val(k) + b.val(k)) + w * (a.slope(k) - b.slope(k)) / 8;
    if (std::abs(pred - m.val(k)) > tol) return false;
  }
  return true;
}

inline void refine(const LinearHamiltonian& h, const Sample& a, const Sample& b, double tol, int depth,
                   std::vector<Sample>& out) {
  Sample m = sample(h, 0.5 * (a.t + b.t));
  double width_floor = 1e-13 * std::max(1.0, std::abs(a.t));
  if (depth == 0 || b.t - a.t < width_floor || hermite_ok(a, b, m, tol)) {
    out.push_back(m);
    out.push_back(b);
    return;
  }
  refine(h, a, m, tol, depth - 1, out);
  refine(h, m, b, tol, depth - 1, out);
}

// Bisect on the sign of d(gap_k)/dt inside [lo, hi] where it goes from - to +.
inline GapMinimum bisect_gap(const LinearHamiltonian& h, int k, double lo, double hi) {
  GapMinimum g;
  g.level = k;
  int it = 0;
  for (; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    auto s = sample(h, mid);
    double d = s.slope(k + 1) - s.slope(k);
    if (d < 0)
      lo = mid;
    else
      hi = mid;
  }
  g.converged = it < 200;
  g.t = 0.5 * (lo + hi);
  auto s = sample(h, g.t);
  g.gap = s.val(k + 1) - s.val(k);
  for (double x : {lo, hi}) {
    auto e = sample(h, x);
    g.gap = std::min(g.gap, e.val(k + 1) - e.val(k));
  }
  return g;
}

inline std::pair<double, double> auto_window(const LinearHamiltonian& h) {
  double lo = 0, hi = 0;
  bool any = false;
  const int n = h.size();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      double db = h.b(a) - h.b(b);
      if (std::abs(db) < 1e-14 * std::max(1.0, h.b.cwiseAbs().maxCoeff())) continue;
      double t = -(h.A(a, a) - h.A(b, b)) / db;
      lo = any ? std::min(lo, t) : t;
      hi = any ? std::max(hi, t) : t;
      any = true;
    }
  double c = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double pad = 1.0 + 10 * h.coupling_scale() / std::max(1e-12, h.b.cwiseAbs().maxCoeff());
  return {c - 1.25 * half - pad, c + 1.25 * half + pad};
}

inline SpectrumScan scan_window(const LinearHamiltonian& h, double lo, double hi, const ScanOptions& opt) {
  const int n = h.size();
  SpectrumScan scan;
  scan.t_min = lo;
  scan.t_max = hi;
  std::vector<Sample> coarse;
  coarse.reserve(opt.grid + 1);
  for (int i = 0; i <= opt.grid; ++i) coarse.push_back(sample(h, lo + (hi - lo) * i / opt.grid));
  double scale = 0;
  for (const auto& s : coarse) scale = std::max(scale, s.val.cwiseAbs().maxCoeff());
  scan.spectral_scale = scale;
  scan.exact_threshold = opt.exact_rel * scale;

  std::vector<Sample> fine{coarse.front()};
  for (size_t i = 0; i + 1 < coarse.size(); ++i)
    refine(h, coarse[i], coarse[i + 1], opt.hermite_rel * scale, opt.max_depth, fine);

  scan.t.reserve(fine.size());
  scan.eigenvalues.resize(static_cast<long>(fine.size()), n);
  for (size_t i = 0; i < fine.size(); ++i) {
    scan.t.push_back(fine[i].t);
    scan.eigenvalues.row(static_cast<long>(i)) = fine[i].val.transpose();
  }

  std::vector<GapMinimum> minima;
  for (int k = 0; k + 1 < n; ++k) {
    for (size_t i = 0; i + 1 < fine.size(); ++i) {
      double d0 = fine[i].slope(k + 1) - fine[i].slope(k);
      double d1 = fine[i + 1].slope(k + 1) - fine[i + 1].slope(k);
      if (!(d0 < 0 && d1 >= 0)) continue;
      auto g = bisect_gap(h, k, fine[i].t, fine[i + 1].t);
      bool dup = false;
      for (const auto& m : minima)
        dup |= m.level == k && std::abs(m.t - g.t) < 1e-9 * std::max(1.0, std::abs(g.t));
      if (!dup) minima.push_back(g);
    }
  }

  // Group exact gap minima that coincide in t over consecutive levels.
  std::vector<GapMinimum> exact;
  for (const auto& m : minima) {
    if (!m.converged) scan.unconverged.push_back(m);
    if (m.gap < scan.exact_threshold)
      exact.push_back(m);
    else
      scan.avoided.push_back(m);
  }
  std::sort(exact.begin(), exact.end(), [](const GapMinimum& a, const GapMinimum& b) {
    return a.level != b.level ? a.level < b.level : a.t < b.t;
  });
  std::vector<char> used(exact.size(), 0);
  const double t_tol = 1e-7 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  for (size_t i = 0; i < exact.size(); ++i) {
    if (used[i]) continue;
    used[i] = 1;
    ExactCrossing c{exact[i].t, exact[i].level, 2};
    int top = exact[i].level;
    for (bool grew = true; grew;) {
      grew = false;
      for (size_t j = 0; j < exact.size(); ++j)
        if (!used[j] && exact[j].level == top + 1 && std::abs(exact[j].t - c.t) < t_tol) {
          used[j] = 1;
          ++top;
          ++c.levels;
          grew = true;
          break;
        }
    }
    scan.exact.push_back(c);
  }
  std::sort(scan.exact.begin(), scan.exact.end(),
            [](const ExactCrossing& a, const ExactCrossing& b) { return a.t < b.t; });
  return scan;
}

}  // namespace detail

// Auto mode doubles the window until no gap minimum sits in its outer quarter.
inline SpectrumScan scan_spectrum(const LinearHamiltonian& h, const ScanOptions& opt = {}) {
  if (h.size() < 2) throw DimensionError("scan_spectrum needs at least two levels");
  if (opt.grid < 4) throw DomainError("scan_spectrum: grid too coarse");
  if (opt.range) {
    if (!(opt.range->first < opt.range->second)) throw DomainError("scan_spectrum: empty t range");
    return detail::scan_window(h, opt.range->first, opt.range->second, opt);
  }
  auto [lo, hi] = detail::auto_window(h);
  for (int d = 0;; ++d) {
    auto scan = detail::scan_window(h, lo, hi, opt);
    scan.window_doublings = d;
    double q = 0.25 * (hi - lo);
    bool outer = false;
    for (const auto& c : scan.exact) outer |= c.t < lo + q || c.t > hi - q;
    for (const auto& m : scan.avoided) outer |= m.t < lo + q || m.t > hi - q;
    if (!outer || d >= opt.max_doublings) return scan;
    double c = 0.5 * (lo + hi), half = hi - lo;
    lo = c - half;
    hi = c + half;
  }
}

}  // namespace mtlz
