// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits 0 only if the failing set equals the --expect-fail list.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>

#include <unsupported/Eigen/KroneckerProduct>

#include "CLI11.hpp"
#include "mtlz/builders.hpp"
#include "mtlz/hamiltonian.hpp"
#include "mtlz/nogo.hpp"
#include "mtlz/propagate.hpp"
#include "mtlz/scattering.hpp"
#include "mtlz/spectrum.hpp"
#include "reference_matrices.hpp"

using namespace mtlz;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    details.push_back((ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(3) << x;
  return s.str();
}

const std::vector<double> kBeta{0.5, 1.7, 4.1, 7.1};
const std::vector<double> kG{0.14, 0.15, 0.17, 0.15};

MTLZFamily gamma_magnet(double scale) {
  std::vector<double> g;
  for (double x : kG) g.push_back(scale * x);
  return build_gamma_magnet({kBeta, g, 1.0});
}

LinearHamiltonian gamma_magnet_h(double scale) {
  auto f = gamma_magnet(scale);
  return restrict(assemble(f), *f.default_path);
}

MTLZFamily cube(std::array<double, 3> tau) {
  CubeParams cp;
  cp.tau = tau;
  cp.gamma = {0.15, 0.25, 0.2};
  return build_cube(cp);
}

const ScatteringModel& positive_model() {
  static const ScatteringModel m = make_scattering_model(cube({0.5, 0.3, 0.4}));
  return m;
}

const Census& positive_census() {
  static const Census c = classify_all_cells(positive_model());
  return c;
}

LinearHamiltonian two_level(double beta, double g) {
  LinearHamiltonian h;
  h.A = Eigen::Matrix2d{{0, g}, {g, 0}};
  h.b = Eigen::Vector2d(beta, -beta);
  return h;
}

Hypercube4Params hypercube_params(int seed) {
  Hypercube4Params hp;
  hp.tau = seed == 0 ? std::array<double, 6>{0.3, 0.2, 0.1, 0.25, 0.15, 0.05}
                     : std::array<double, 6>{-0.2, 0.1, 0.3, 0.05, -0.15, 0.2};
  hp.gamma = {0.3, 0.2, 0.5, 0.4};
  return hp;
}

// ------------------------------------------------------------------ criteria

Outcome integrability() {
  std::vector<std::pair<std::string, MTLZFamily>> fams;
  SquareParams sp;
  sp.theta = 0.3;
  fams.emplace_back("square", build_square(sp));
  for (auto t : {std::array<double, 3>{0.5, 0.3, 0.4}, std::array<double, 3>{-0.5, -0.3, 0.4},
                 std::array<double, 3>{0.1, -0.6, 0.25}})
    fams.emplace_back("cube tau=(" + fmt(t[0]) + "," + fmt(t[1]) + "," + fmt(t[2]) + ")", cube(t));
  for (int s : {0, 1}) fams.emplace_back("hypercube4 seed " + std::to_string(s), build_hypercube4(hypercube_params(s)));
  FanParams fp;
  fp.m = 4;
  fp.l = 2;
  fp.theta = {0.1, 0.2, 0.3};
  fp.gamma = {1, 2, 1.5, 1.5};
  fams.emplace_back("fan m=4 l=2", build_fan(fp));
  for (int n : {2, 3, 4}) {
    std::vector<double> b(kBeta.begin(), kBeta.begin() + n), g(kG.begin(), kG.begin() + n);
    fams.emplace_back("gamma-magnet N=" + std::to_string(n), build_gamma_magnet({b, g, 1.0}));
  }
  Outcome o;
  std::mt19937 rng(20);
  std::normal_distribution<double> nd(0, 2);
  for (const auto& [name, f] : fams) {
    auto hf = assemble(f);
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXd x(hf.M);
      for (int i = 0; i < hf.M; ++i) x(i) = nd(rng);
      worst = std::max(worst, integrability_residuals(hf, x).relative());
    }
    o.require(worst < 1e-12, name + ": max relative residual " + fmt(worst) + " < 1e-12");
  }
  return o;
}

Outcome crossing_count() {
  Outcome o;
  int base = scan_spectrum(gamma_magnet_h(1)).exact_pair_count();
  o.require(base == 88, "gamma-magnet N=4: " + std::to_string(base) + " exact pairwise crossings, want 88");
  int sep = scan_spectrum(separable_spins(kBeta, kG, {-1.0, 1.0, -1.0, 1.0})).exact_pair_count();
  o.require(sep == 88, "separable 4-spin model: " + std::to_string(sep) + ", want 88");
  int strong = scan_spectrum(gamma_magnet_h(10)).exact_pair_count();
  o.require(strong < 88, "gamma-magnet couplings x10: " + std::to_string(strong) + " < 88");
  return o;
}

Outcome zero_coupling_rule() {
  Outcome o;
  auto check = [&](const std::string& name, const LinearHamiltonian& h, int want) {
    int got = scan_spectrum(h.scaled_couplings(0.1)).exact_pair_count();
    o.require(got == want, name + " at 0.1x couplings: " + std::to_string(got) + " exact crossings, want " +
                               std::to_string(want));
  };
  SquareParams sp;
  sp.a = {0.7, -0.4};
  sp.b = {0.2, 1.1};
  sp.theta = 0.3;
  auto sq = assemble(build_square(sp));
  o.require(zero_coupling_count(sq) == 2, "square zero_coupling_count " + std::to_string(zero_coupling_count(sq)));
  check("square", restrict(sq, TimePath{Eigen::Vector2d(1.0, 0.3), Eigen::Vector2d(0.1, 0.5)}), 2);

  CubeParams cp;
  cp.tau = {0.5, 0.3, 0.4};
  cp.gamma = {0.3, 0.45, 0.2};
  auto cb = assemble(build_cube(cp));
  o.require(zero_coupling_count(cb) == 16, "cube zero_coupling_count " + std::to_string(zero_coupling_count(cb)));
  check("cube", restrict(cb, TimePath{Eigen::Vector3d(0.9, 0.35, -0.6), Eigen::Vector3d(1.0, 2.0, -3.0)}), 16);

  auto hc = assemble(build_hypercube4(hypercube_params(0)));
  o.require(zero_coupling_count(hc) == 88,
            "hypercube4 zero_coupling_count " + std::to_string(zero_coupling_count(hc)) + ", want 88");
  auto gm = assemble(gamma_magnet(1));
  o.require(zero_coupling_count(gm) == 88,
            "gamma-magnet N=4 zero_coupling_count " + std::to_string(zero_coupling_count(gm)) + ", want 88");
  check("gamma-magnet N=4", gamma_magnet_h(1), 88);
  return o;
}

Outcome cell_count() {
  Outcome o;
  const auto& m = positive_model();
  o.require(m.complex.F() == 98, "cube tau=(0.5,0.3,0.4): " + std::to_string(m.complex.F()) + " cells, want 98");
  const int chi = m.complex.euler();
  o.require(chi == 2, "V-E+F = " + std::to_string(m.complex.V()) + "-" + std::to_string(m.complex.E()) + "+" +
                          std::to_string(m.complex.F()) + " = " + std::to_string(chi));
  return o;
}

Outcome table_census() {
  Outcome o;
  const auto& c = positive_census();
  std::multiset<int> half;
  std::set<std::string> cols;
  for (const auto& e : c.entries) {
    half.insert(e.pattern.half_zeros);
    cols.insert(e.pattern.columns);
    o.note("type " + std::to_string(e.type) + ": half-zeros " + std::to_string(e.pattern.half_zeros) + ", columns " +
           e.pattern.columns + ", " + std::to_string(e.cells.size()) + " cells");
  }
  o.require(c.anomalies.empty(), "every cell fits a monomial matrix with a known zero pattern");
  o.require(c.entries.size() == 7, "all-positive tau gives " + std::to_string(c.entries.size()) + " zero types, want 7");
  const std::multiset<int> want_half{0, 6, 8, 11, 12, 12, 16};
  o.require(half == want_half, "half-zero counts equal {0,6,8,11,12,12,16}");
  std::set<std::string> want_cols;
  for (const auto& z : cube_zero_types()) want_cols.insert(z.columns);
  o.require(cols == want_cols, "column distributions equal the seven tabulated ones");

  auto six = parse_probability_matrix(reference::kSixZeros, 3);
  auto eight = parse_probability_matrix(reference::kEightZeros, 3);
  const auto* t2 = c.find_type(2);
  const auto* t3 = c.find_type(3);
  o.require(t2 && find_equivalence(t2->representative, six).has_value(),
            "six-zero representative equals the reference matrix up to relabelling");
  o.require(t3 && find_equivalence(t3->representative, eight).has_value(),
            "eight-zero representative equals the reference matrix up to relabelling");

  std::set<int> all = [&] {
    auto t = c.types();
    return std::set<int>(t.begin(), t.end());
  }();
  for (int t : classify_all_cells(make_scattering_model(cube({-0.1, 0.5, 0.6}))).types()) all.insert(t);
  o.note("all-positive and one-negative tau together: " + std::to_string(all.size()) + " types");
  return o;
}

Outcome oracle_cross_validation() {
  Outcome o;
  const auto& m = positive_model();
  const auto& c = positive_census();
  std::mt19937 rng(6);
  std::normal_distribution<double> nd(0, 0.3);
  std::set<int> types;
  int cells = 0;
  for (int type : {1, 2, 3, 5, 6}) {
    const auto* e = c.find_type(type);
    if (!e) continue;
    const int s = e->cells.front();
    auto h = restrict(assemble(m.family), cell_time_path(m, s, Eigen::Vector3d(nd(rng), nd(rng), nd(rng))));
    PropagationConfig cfg;
    auto study = convergence_study(h, cfg, {60, 120, 240});
    // Smallest window whose step to the next one is below the comparison tolerance.
    size_t k = 1;
    while (k + 1 < study.P.size() && study.change[k] > 1e-3) ++k;
    const Eigen::MatrixXd& P = study.P[k];
    const auto& pm = c.per_cell[s];
    double delta = (P - pm.numeric).cwiseAbs().maxCoeff(), zero = 0;
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b)
        if (pm.is_zero(a, b)) zero = std::max(zero, P(a, b));
    o.require(delta < 5e-3, "cell " + std::to_string(s) + " (type " + std::to_string(type) + ", T=" +
                                fmt(study.T[k]) + "): max |analytic - numeric| " + fmt(delta) + " < 5e-3");
    o.require(zero < 1e-3, "cell " + std::to_string(s) + ": largest claimed-zero entry " + fmt(zero) + " < 1e-3");
    types.insert(type);
    ++cells;
  }
  o.require(cells >= 5 && types.size() >= 3,
            std::to_string(cells) + " start cells over " + std::to_string(types.size()) + " types");
  return o;
}

Outcome direct_product() {
  Outcome o;
  CubeParams cp;
  cp.gamma = {0.03, 0.05, 0.08};
  auto h = restrict(assemble(build_cube(cp)), TimePath{Eigen::Vector3d(1.0, 0.8, 0.6), Eigen::Vector3d(0.4, -0.7, 0.2)});
  PropagationConfig cfg;
  cfg.T = 60;
  auto r = propagate(h, cfg);
  auto lz = [](double g) {
    double p = std::exp(-2 * M_PI * g);
    Eigen::Matrix2d m;
    m << p, 1 - p, 1 - p, p;
    return m;
  };
  Eigen::Matrix2d P1 = lz(0.03), P2 = lz(0.05), P3 = lz(0.08);
  Eigen::MatrixXd expect(8, 8);
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b)
      expect(a, b) = P1(a & 1, b & 1) * P2(a >> 1 & 1, b >> 1 & 1) * P3(a >> 2 & 1, b >> 2 & 1);
  double d = (r.P - expect).cwiseAbs().maxCoeff();
  o.require(d < 1e-3, "tau=0 cube vs P1 (x) P2 (x) P3: max delta " + fmt(d) + " < 1e-3");
  double dc = (lz_direct_product({0.03, 0.05, 0.08}) - expect).cwiseAbs().maxCoeff();
  o.require(dc < 1e-14, "closed-form direct product agrees with the Kronecker product: " + fmt(dc));

  // gamma = g^2 / |beta_1 - beta_2| for the two-level model.
  const double gamma = 0.2 * 0.2 / 2.0, exact = std::exp(-2 * M_PI * gamma);
  cfg.T = 60;
  auto two = propagate(two_level(1.0, 0.2), cfg);
  double d2 = std::abs(two.P(0, 0) - exact);
  o.require(d2 < 1e-4, "two-level survival " + fmt(two.P(0, 0)) + " vs exp(-2 pi gamma) " + fmt(exact) + ": delta " +
                           fmt(d2) + " < 1e-4");
  return o;
}

Outcome no_go() {
  Outcome o;
  auto v = screen_catalog();
  auto expect = [&](const std::string& key, VerdictKind want) {
    auto it = v.find(key);
    if (it == v.end()) return o.require(false, key + ": missing from catalog");
    o.require(it->second.kind == want, key + ": " + to_string(it->second.kind) + ", want " + to_string(want));
  };
  for (const char* k : {"double_fan", "double_pentagon", "double_hexagon", "square_with_ears", "mobius_ladder",
                        "cube_plus_1", "fan_type_I(3)", "fan_type_I(4)", "square_bipartite"})
    expect(k, VerdictKind::NoSolution);
  for (const char* k : {"square", "cube", "hypercube4", "fan_type_II(3)", "fan_type_II(4)"})
    expect(k, VerdictKind::Candidate);
  for (const char* k : {"cube_plus_2", "cube_plus_3"}) {
    const auto& r = v.at(k);
    o.require(r.kind != VerdictKind::Candidate && !r.orientations.empty(),
              std::string(k) + ": " + to_string(r.kind) + " with " + std::to_string(r.orientations.size()) +
                  " orientation results");
  }
  return o;
}

Outcome structural_identities() {
  Outcome o;
  const auto& m = positive_model();
  const auto& c = positive_census();
  int ok = 0;
  for (int s = 0; s < c.cells; ++s) {
    auto chk = structural_check(c.per_cell[s], m.family.graph);
    if (chk.ok()) ++ok;
    else o.require(false, "cell " + std::to_string(s) + ": " + chk.failures.front());
  }
  o.require(ok == 98 && c.cells == 98, std::to_string(ok) + " of " + std::to_string(c.cells) +
                                           " start cells symmetric, stochastic, constant diagonal p1p2p3, degree <= 3, "
                                           "coupled pairs nonzero");
  return o;
}

Outcome builder_equivalences() {
  Outcome o;
  // Equal opposite couplings force the antisymmetric pair and the canonical four-state form.
  for (int p : {1, -1}) {
    SquareParams sp;
    sp.theta = 0.45;
    sp.p = p;
    const double a1 = 0.8, c = std::cosh(sp.theta), s = std::sinh(sp.theta);
    sp.a = {a1, 0.3};
    sp.b = {p == 1 ? a1 * (1 - c) / s : -a1 * (1 + c) / s, -0.9};
    sp.gamma12 = 0.5;
    sp.gamma14 = 1.4;
    auto f = build_square(sp);
    auto g = [&](int u, int v) { return f.coupling[f.graph.edge_index(u, v)](0); };
    auto cf = canonical_four_state(restrict(assemble(f), TimePath{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)}));
    const std::string tag = "square p=" + std::to_string(p);
    o.require(std::abs(g(0, 1) - g(2, 3)) < 1e-14, tag + ": g12 = g34");
    o.require(std::abs(g(0, 3) + g(1, 2)) < 1e-14, tag + ": g14 = -g23, residual " + fmt(std::abs(g(0, 3) + g(1, 2))));
    o.require(cf.residual < 1e-12, tag + ": canonical four-state Hamiltonian residual " + fmt(cf.residual));
  }

  // Zero rapidity: the square is a sum of two commuting 2-level problems.
  {
    SquareParams sp;
    sp.a = {0.9, 0.35};
    sp.b = {0.4, -0.7};
    sp.theta = 0.0;
    sp.gamma12 = 0.6;
    sp.gamma14 = 1.3;
    auto h = restrict(assemble(build_square(sp)), TimePath{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)});
    const int perm[4] = {0, 1, 3, 2};
    double worst = 0;
    for (double t : {-2.0, 0.0, 0.4, 3.0}) {
      Eigen::MatrixXd H = h.at(t);
      Eigen::Matrix4d Hk;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) Hk(perm[r], perm[c]) = H(r, c);
      Eigen::Matrix2d h1, h2;
      h1 << 0, Hk(0, 1), Hk(0, 1), Hk(1, 1) - Hk(0, 0);
      h2 << Hk(0, 0), Hk(0, 2), Hk(0, 2), Hk(2, 2);
      Eigen::Matrix4d sum = Eigen::kroneckerProduct(h2, Eigen::Matrix2d::Identity()) +
                            Eigen::kroneckerProduct(Eigen::Matrix2d::Identity(), h1);
      worst = std::max(worst, (sum - Hk).cwiseAbs().maxCoeff());
    }
    o.require(worst < 1e-14, "theta=0 square equals h2 (x) 1 + 1 (x) h1: max delta " + fmt(worst));
  }

  // Two-spin gamma-magnet is a square family after relabelling states 0,1,3,2.
  {
    GammaMagnetParams gp{{0.9, 0.35}, {0.4, -0.25}, 0.0};
    auto gm = build_gamma_magnet(gp);
    const double b1 = gp.beta[0], b2 = gp.beta[1];
    const double X = (b1 + b2) / (b1 - b2), Y = std::sqrt(b1 / b2) * (1 - X);
    SquareParams sp;
    sp.p = X > 0 ? 1 : -1;
    sp.theta = std::asinh(sp.p * Y * (gp.g[0] * gp.g[1] > 0 ? 1 : -1));
    sp.gamma12 = gp.g[0] * gp.g[0] / (2 * b1);
    sp.gamma14 = gp.g[1] * gp.g[1] / (2 * b2);
    sp.a = gm.rescaled(gm.graph.edge_index(0, 1));
    sp.b = gm.rescaled(gm.graph.edge_index(0, 2));
    sp.gauge = gm.lambda[0];
    auto sqh = assemble(build_square(sp));
    auto gmh = assemble(gm);
    const int perm[4] = {0, 1, 3, 2};
    std::mt19937 rng(10);
    std::uniform_real_distribution<double> u(-3, 3);
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
      Eigen::VectorXd x = Eigen::Vector2d(u(rng), u(rng));
      for (int j = 0; j < 2; ++j) {
        Eigen::MatrixXd Hs = sqh.H(j, x), Hg = gmh.H(j, x);
        for (int r = 0; r < 4; ++r)
          for (int c = 0; c < 4; ++c) worst = std::max(worst, std::abs(Hs(r, c) - Hg(perm[r], perm[c])));
      }
    }
    o.require(worst < 1e-13, "gamma-magnet N=2 equals the square family up to relabelling: max delta " + fmt(worst));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> expect_fail;
  app.add_option("--expect-fail", expect_fail, "criteria known to fail");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    std::string name;
    double budget_s;  // 0 = no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "integrability suite", 10, integrability},
      {2, "crossing count", 120, crossing_count},
      {3, "zero-coupling rule", 0, zero_coupling_rule},
      {4, "cube cell count", 10, cell_count},
      {5, "zero-pattern census", 300, table_census},
      {6, "analytic vs numeric scattering", 0, oracle_cross_validation},
      {7, "direct-product limits", 0, direct_product},
      {8, "no-go regression", 0, no_go},
      {9, "structural identities", 0, structural_identities},
      {10, "builder equivalences", 0, builder_equivalences},
  };
  std::set<int> failed;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0) o.require(secs < c.budget_s, "runtime " + fmt(secs) + " s < " + fmt(c.budget_s) + " s");
    if (!o.pass) failed.insert(c.id);
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " (" << fmt(secs)
              << " s)\n";
    for (const auto& d : o.details) std::cout << "       " << d << "\n";
  }
  const std::set<int> known(expect_fail.begin(), expect_fail.end());
  std::cout << failed.size() << " of " << criteria.size() << " criteria failed";
  if (!known.empty()) std::cout << " (expected failures:" << [&] {
    std::string s;
    for (int k : known) s += " " + std::to_string(k);
    return s;
  }() << ")";
  std::cout << "\n";
  return failed == known ? 0 : 1;
}
