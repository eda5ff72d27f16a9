#pragma once
// Operator-level view of a family: H_j(x) = B_{kj} x^k + A_j, integrability
// residuals and restriction to one-parameter time paths.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mtlz/errors.hpp"
#include "mtlz/family.hpp"

namespace mtlz {

// H(t) = A + t * diag(b)
struct LinearHamiltonian {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  int size() const { return static_cast<int>(b.size()); }
  Eigen::MatrixXd at(double t) const {
    Eigen::MatrixXd h = A;
    h.diagonal() += t * b;
    return h;
  }
  Eigen::MatrixXd operator()(double t) const { return at(t); }
  // Adds (beta t + e) * identity.
  LinearHamiltonian gauge_shifted(double beta, double e) const {
    LinearHamiltonian h = *this;
    h.b.array() += beta;
    h.A.diagonal().array() += e;
    return h;
  }
  LinearHamiltonian scaled_couplings(double factor) const {
    LinearHamiltonian h = *this;
    Eigen::VectorXd d = h.A.diagonal();
    h.A *= factor;
    h.A.diagonal() = d;
    return h;
  }
  double coupling_scale() const {
    Eigen::MatrixXd off = A;
    off.diagonal().setZero();
    return off.cwiseAbs().maxCoeff();
  }
};

struct HamiltonianFamily {
  int N = 0;
  int M = 0;
  std::vector<Eigen::VectorXd> B;  // B[j*M+k] = diagonal of B_{jk}
  std::vector<Eigen::MatrixXd> A;  // A_j
  bool validated = true;

  const Eigen::VectorXd& Bdiag(int j, int k) const { return B[j * M + k]; }
  Eigen::MatrixXd Bmat(int j, int k) const { return Bdiag(j, k).asDiagonal(); }

  Eigen::MatrixXd H(int j, const Eigen::VectorXd& x) const {
    if (x.size() != M) throw DimensionError("H_j(x): x has the wrong dimension");
    Eigen::MatrixXd h = A[j];
    for (int k = 0; k < M; ++k) h.diagonal() += x(k) * Bdiag(k, j);
    return h;
  }
  double scale() const {
    double s = 0;
    for (const auto& a : A) s = std::max(s, a.cwiseAbs().maxCoeff());
    for (const auto& b : B) s = std::max(s, b.cwiseAbs().maxCoeff());
    return s;
  }
};

inline HamiltonianFamily assemble(const MTLZFamily& f, bool validated = true) {
  HamiltonianFamily hf;
  hf.N = f.N();
  hf.M = f.M;
  hf.validated = validated;
  hf.B.assign(static_cast<size_t>(f.M) * f.M, Eigen::VectorXd::Zero(hf.N));
  for (int a = 0; a < hf.N; ++a)
    for (int j = 0; j < f.M; ++j)
      for (int k = 0; k < f.M; ++k) hf.B[j * f.M + k](a) = f.lambda[a](j, k);
  hf.A.assign(f.M, Eigen::MatrixXd::Zero(hf.N, hf.N));
  for (int e = 0; e < f.graph.n_edges(); ++e) {
    auto [a, b] = f.graph.edge(e);
    for (int j = 0; j < f.M; ++j) hf.A[j](a, b) = hf.A[j](b, a) = f.coupling[e](j);
  }
  return hf;
}

struct IntegrabilityResiduals {
  double commutator = 0;  // max_{i<j} |[H_i(x), H_j(x)]|_F
  double curl = 0;        // max_{i<j} |dH_i/dx^j - dH_j/dx^i|_F
  double slope_commutator = 0;  // max |[B_{si}, A_j] - [B_{sj}, A_i]|_F
  double coupling_commutator = 0;  // max |[A_i, A_j]|_F
  double h_scale = 0;     // max |H_i(x)|_F
  double relative() const {
    double s = std::max(h_scale * h_scale, 1e-300);
    return std::max({commutator / s, curl / std::max(h_scale, 1e-300)});
  }
};

inline IntegrabilityResiduals integrability_residuals(const HamiltonianFamily& hf, const Eigen::VectorXd& x) {
  IntegrabilityResiduals r;
  std::vector<Eigen::MatrixXd> H;
  for (int j = 0; j < hf.M; ++j) {
    H.push_back(hf.H(j, x));
    r.h_scale = std::max(r.h_scale, H.back().norm());
  }
  for (int i = 0; i < hf.M; ++i)
    for (int j = i + 1; j < hf.M; ++j) {
      r.commutator = std::max(r.commutator, (H[i] * H[j] - H[j] * H[i]).norm());
      r.curl = std::max(r.curl, (hf.Bdiag(i, j) - hf.Bdiag(j, i)).norm());
      r.coupling_commutator = std::max(r.coupling_commutator, (hf.A[i] * hf.A[j] - hf.A[j] * hf.A[i]).norm());
      for (int s = 0; s < hf.M; ++s) {
        Eigen::MatrixXd Bsi = hf.Bmat(s, i), Bsj = hf.Bmat(s, j);
        Eigen::MatrixXd t = (Bsi * hf.A[j] - hf.A[j] * Bsi) - (Bsj * hf.A[i] - hf.A[i] * Bsj);
        r.slope_commutator = std::max(r.slope_commutator, t.norm());
      }
    }
  return r;
}

// H(t) = v^i H_i(x(t)) with x = v t + eps.
inline LinearHamiltonian restrict(const HamiltonianFamily& hf, const TimePath& path) {
  if (path.v.size() != hf.M || path.eps.size() != hf.M) throw DimensionError("restrict: path dimension mismatch");
  if (path.v.norm() == 0) throw DomainError("restrict: zero velocity");
  LinearHamiltonian h;
  h.A = Eigen::MatrixXd::Zero(hf.N, hf.N);
  h.b = Eigen::VectorXd::Zero(hf.N);
  for (int i = 0; i < hf.M; ++i) {
    h.A += path.v(i) * hf.A[i];
    for (int k = 0; k < hf.M; ++k) {
      h.b += path.v(i) * path.v(k) * hf.Bdiag(k, i);
      h.A.diagonal() += path.v(i) * path.eps(k) * hf.Bdiag(k, i);
    }
  }
  return h;
}

inline int zero_coupling_count(const HamiltonianFamily& hf) {
  int count = 0;
  for (int a = 0; a < hf.N; ++a)
    for (int b = a + 1; b < hf.N; ++b) {
      bool coupled = false;
      for (const auto& A : hf.A) coupled |= A(a, b) != 0;
      count += !coupled;
    }
  return count;
}

inline int zero_coupling_count(const LinearHamiltonian& h) {
  int count = 0;
  for (int a = 0; a < h.size(); ++a)
    for (int b = a + 1; b < h.size(); ++b) count += h.A(a, b) == 0;
  return count;
}

// sum_i [(beta_i t + eps_i) sigma^z_i + g_i sigma^x_i], spin i on bit i-1.
inline LinearHamiltonian separable_spins(const std::vector<double>& beta, const std::vector<double>& g,
                                         const std::vector<double>& eps) {
  const int n = static_cast<int>(beta.size());
  if (static_cast<int>(g.size()) != n || static_cast<int>(eps.size()) != n)
    throw DimensionError("separable_spins: parameter lengths differ");
  const int N = 1 << n;
  LinearHamiltonian h;
  h.A = Eigen::MatrixXd::Zero(N, N);
  h.b = Eigen::VectorXd::Zero(N);
  for (int a = 0; a < N; ++a)
    for (int i = 0; i < n; ++i) {
      double sz = (a >> i & 1) ? -1.0 : 1.0;
      h.b(a) += beta[i] * sz;
      h.A(a, a) += eps[i] * sz;
      h.A(a, a ^ (1 << i)) = g[i];
    }
  return h;
}

}  // namespace mtlz
