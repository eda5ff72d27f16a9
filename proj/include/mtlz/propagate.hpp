#pragma once
// Numerical scattering for H(t) = A + t diag(b): integrate i dpsi/dt = H psi
// from -T to T in the interaction picture with respect to the diagonal, then
// read transition probabilities between diabatic labels.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include "mtlz/errors.hpp"
#include "mtlz/hamiltonian.hpp"

namespace mtlz {

enum class Frame { Diabatic, InteractionPicture };

struct PropagationConfig {
  double T = 100;
  double rtol = 1e-9;
  double atol = 1e-11;
  Frame frame = Frame::InteractionPicture;
  // Project the initial and final states on the instantaneous eigenbasis at
  // -T and +T, labelled by their dominant diabatic component.
  bool adiabatic_boundary = true;
  int richardson_levels = 0;  // 1: two-point extrapolation in 1/T using T/2 and T
  double error_bound = 1e-2;  // ConvergenceError if the estimate exceeds this
  long max_steps = 50'000'000;
};

struct NumericScattering {
  Eigen::MatrixXd P;      // P(a, b) = probability to end in a starting from b
  Eigen::MatrixXd error;  // per-entry estimate
  Eigen::MatrixXcd U;     // amplitudes at the main (T, rtol) run
  double T = 0;
  double unitarity_defect = 0;  // max |row or column sum - 1|
  long steps = 0;
  double max_error() const { return error.size() ? error.maxCoeff() : 0.0; }
};

namespace detail {

using CState = std::vector<std::complex<double>>;

// Eigenvectors at t, column k reordered to the diabatic label it is dominated by.
inline Eigen::MatrixXd labelled_eigenbasis(const LinearHamiltonian& h, double t) {
  const int n = h.size();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.at(t));
  if (es.info() != Eigen::Success) throw ConvergenceError("eigensolver failed at the window boundary");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  std::vector<char> taken(n, 0);
  for (int k = 0; k < n; ++k) {
    Eigen::Index a;
    double w = es.eigenvectors().col(k).cwiseAbs2().maxCoeff(&a);
    if (taken[a] || w < 0.75)
      throw ConvergenceError("window too small: adiabatic states at t=" + std::to_string(t) +
                             " are not dominated by distinct diabatic states");
    taken[a] = 1;
    Eigen::VectorXd v = es.eigenvectors().col(k);
    if (v(a) < 0) v = -v;
    out.col(a) = v;
  }
  return out;
}

struct RunResult {
  Eigen::MatrixXcd U;
  long steps = 0;
};

inline RunResult run(const LinearHamiltonian& h, double T, double rtol, double atol, Frame frame, bool adiabatic,
                     long max_steps) {
  namespace ode = boost::numeric::odeint;
  const int n = h.size();
  const Eigen::VectorXd d = h.A.diagonal();
  Eigen::MatrixXd off = h.A;
  off.diagonal().setZero();
  auto phase = [&](double t) -> Eigen::VectorXd { return 0.5 * h.b * t * t + d * t; };

  Eigen::MatrixXcd psi0 = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXd Vin, Vout;
  if (adiabatic) {
    Vin = labelled_eigenbasis(h, -T);
    Vout = labelled_eigenbasis(h, T);
    psi0 = Vin.cast<std::complex<double>>();
  }

  CState y(static_cast<size_t>(n) * n);
  const std::complex<double> I(0, 1);
  Eigen::VectorXd ph0 = phase(-T);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a) {
      auto v = psi0(a, c);
      y[c * n + a] = frame == Frame::InteractionPicture ? std::exp(I * ph0(a)) * v : v;
    }

  // Sparse list of couplings.
  struct Link {
    int a, b;
    double g;
  };
  std::vector<Link> links;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && off(a, b) != 0) links.push_back({a, b, off(a, b)});

  auto rhs = [&](const CState& x, CState& dx, double t) {
    std::fill(dx.begin(), dx.end(), std::complex<double>(0));
    if (frame == Frame::InteractionPicture) {
      Eigen::VectorXd ph = phase(t);
      std::vector<std::complex<double>> e(n);
      for (int a = 0; a < n; ++a) e[a] = std::exp(I * ph(a));
      for (const auto& l : links) {
        auto w = -I * l.g * e[l.a] * std::conj(e[l.b]);
        for (int c = 0; c < n; ++c) dx[c * n + l.a] += w * x[c * n + l.b];
      }
    } else {
      for (int c = 0; c < n; ++c)
        for (int a = 0; a < n; ++a) dx[c * n + a] += -I * (d(a) + h.b(a) * t) * x[c * n + a];
      for (const auto& l : links)
        for (int c = 0; c < n; ++c) dx[c * n + l.a] += -I * l.g * x[c * n + l.b];
    }
  };

  long steps = 0;
  auto stepper = ode::make_controlled(atol, rtol, ode::runge_kutta_dopri5<CState>());
  // Initial step: resolve the fastest phase at the boundary.
  double rate = 1e-12;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) rate = std::max(rate, std::abs((h.b(a) - h.b(b)) * T) + std::abs(d(a) - d(b)));
  double dt0 = 0.1 / rate;
  ode::integrate_adaptive(stepper, rhs, y, -T, T, dt0, [&](const CState&, double) {
    if (++steps > max_steps) throw ConvergenceError("propagate: step budget exhausted");
  });

  Eigen::MatrixXcd psi(n, n);
  Eigen::VectorXd ph1 = phase(T);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      psi(a, c) = frame == Frame::InteractionPicture ? std::exp(-I * ph1(a)) * y[c * n + a] : y[c * n + a];
  if (adiabatic) psi = Vout.transpose().cast<std::complex<double>>() * psi;
  return {psi, steps};
}

inline double unitarity_defect(const Eigen::MatrixXd& P) {
  double d = 0;
  for (int i = 0; i < P.rows(); ++i) {
    d = std::max(d, std::abs(P.row(i).sum() - 1));
    d = std::max(d, std::abs(P.col(i).sum() - 1));
  }
  return d;
}

}  // namespace detail

inline NumericScattering propagate(const LinearHamiltonian& h, const PropagationConfig& cfg = {}) {
  if (!(cfg.T > 0)) throw DomainError("propagate: T must be positive");
  if (!(cfg.rtol > 0 && cfg.rtol <= 1e-3 && cfg.atol > 0 && cfg.atol <= 1e-3))
    throw DomainError("propagate: tolerances must lie in (0, 1e-3]");
  if (!h.A.isApprox(h.A.transpose(), 0.0)) throw DomainError("propagate: A must be symmetric");
  auto main = detail::run(h, cfg.T, cfg.rtol, cfg.atol, cfg.frame, cfg.adiabatic_boundary, cfg.max_steps);
  auto loose = detail::run(h, cfg.T, cfg.rtol * 10, cfg.atol * 10, cfg.frame, cfg.adiabatic_boundary, cfg.max_steps);
  auto half = detail::run(h, cfg.T / 2, cfg.rtol, cfg.atol, cfg.frame, cfg.adiabatic_boundary, cfg.max_steps);

  NumericScattering out;
  out.T = cfg.T;
  out.U = main.U;
  out.steps = main.steps + loose.steps + half.steps;
  Eigen::MatrixXd P = main.U.cwiseAbs2();
  Eigen::MatrixXd Pl = loose.U.cwiseAbs2(), Ph = half.U.cwiseAbs2();
  out.error = (P - Pl).cwiseAbs().cwiseMax((P - Ph).cwiseAbs());
  if (cfg.richardson_levels > 0) P = 2 * P - Ph;
  out.P = P;
  out.unitarity_defect = detail::unitarity_defect(P);
  if (out.max_error() > cfg.error_bound)
    throw ConvergenceError("propagate: error estimate " + std::to_string(out.max_error()) + " exceeds bound " +
                           std::to_string(cfg.error_bound) + " at T=" + std::to_string(cfg.T));
  return out;
}

struct ConvergenceReport {
  std::vector<double> T;
  std::vector<Eigen::MatrixXd> P;
  std::vector<double> change;  // max |P(T_k) - P(T_{k-1})|, first entry 0
  Eigen::MatrixXd extrapolated;  // two-point Richardson in 1/T from the last pair
  double decay_exponent = 0;     // fitted from successive changes, NaN if undefined
  bool monotone = true;
  std::vector<std::string> warnings;
};

inline ConvergenceReport convergence_study(const LinearHamiltonian& h, PropagationConfig cfg,
                                           const std::vector<double>& T_list) {
  if (T_list.size() < 2) throw DomainError("convergence_study: need at least two windows");
  for (size_t i = 1; i < T_list.size(); ++i)
    if (!(T_list[i] > T_list[i - 1])) throw DomainError("convergence_study: T list must increase");
  ConvergenceReport rep;
  cfg.error_bound = 1.0;
  for (double T : T_list) {
    auto r = detail::run(h, T, cfg.rtol, cfg.atol, cfg.frame, cfg.adiabatic_boundary, cfg.max_steps);
    rep.T.push_back(T);
    rep.P.push_back(r.U.cwiseAbs2());
    rep.change.push_back(rep.P.size() > 1 ? (rep.P.back() - rep.P[rep.P.size() - 2]).cwiseAbs().maxCoeff() : 0.0);
  }
  const size_t k = rep.P.size() - 1;
  double r = rep.T[k - 1] / rep.T[k];  // P(T) ~ P_inf + c / T
  rep.extrapolated = (rep.P[k] - r * rep.P[k - 1]) / (1 - r);
  for (size_t i = 2; i < rep.change.size(); ++i)
    if (rep.change[i] > rep.change[i - 1] * (1 + 1e-9) && rep.change[i] > 10 * cfg.rtol) rep.monotone = false;
  if (!rep.monotone) rep.warnings.push_back("successive changes are not decreasing");
  rep.decay_exponent = std::nan("");
  if (rep.change.size() >= 3 && rep.change[k] > 0 && rep.change[k - 1] > 0)
    rep.decay_exponent = std::log(rep.change[k - 1] / rep.change[k]) / std::log(rep.T[k] / rep.T[k - 1]);
  return rep;
}

}  // namespace mtlz
