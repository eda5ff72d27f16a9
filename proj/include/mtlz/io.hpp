#pragma once
// Family spec files, result serialization, and the CSV and SVG artifacts the
// command line writes. Spec parsing is strict: unknown keys, wrong types and
// wrong array lengths raise SchemaError.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "mtlz/arrangement.hpp"
#include "mtlz/builders.hpp"
#include "mtlz/errors.hpp"
#include "mtlz/hamiltonian.hpp"
#include "mtlz/nogo.hpp"
#include "mtlz/scattering.hpp"
#include "mtlz/spectrum.hpp"

namespace mtlz::io {

using json = nlohmann::json;

// ------------------------------------------------------------------ reading

// Typed access to one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw SchemaError(where_ + ": expected an object");
  }
  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key) {
    seen_.push_back(key);
    if (!j_.contains(key)) throw SchemaError(where_ + ": missing key \"" + key + "\"");
    return j_.at(key);
  }
  std::string path(const std::string& key) const { return where_ + "." + key; }

  double number(const std::string& key) { return as_number(raw(key), path(key)); }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : mark(key, fallback); }
  int integer(const std::string& key) { return as_integer(raw(key), path(key)); }
  int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : mark(key, fallback); }
  std::string text(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_string()) throw SchemaError(path(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? text(key) : mark(key, fallback);
  }
  std::vector<double> numbers(const std::string& key, int length = -1) {
    return as_numbers(raw(key), path(key), length);
  }
  std::vector<int> integers(const std::string& key, int length = -1) {
    const auto& v = raw(key);
    if (!v.is_array()) throw SchemaError(path(key) + ": expected an array");
    check_length(v, path(key), length);
    std::vector<int> out;
    for (size_t i = 0; i < v.size(); ++i) out.push_back(as_integer(v[i], path(key) + "[" + std::to_string(i) + "]"));
    return out;
  }
  std::vector<std::vector<double>> rows(const std::string& key, int n_rows, int n_cols) {
    const auto& v = raw(key);
    if (!v.is_array()) throw SchemaError(path(key) + ": expected an array of arrays");
    check_length(v, path(key), n_rows);
    std::vector<std::vector<double>> out;
    for (size_t i = 0; i < v.size(); ++i)
      out.push_back(as_numbers(v[i], path(key) + "[" + std::to_string(i) + "]", n_cols));
    return out;
  }
  // Throws if any key was not read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
        throw SchemaError(where_ + ": unknown key \"" + it.key() + "\"");
  }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw SchemaError(where + ": expected a number");
    return v.get<double>();
  }
  static int as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw SchemaError(where + ": expected an integer");
    return v.get<int>();
  }
  static std::vector<double> as_numbers(const json& v, const std::string& where, int length) {
    if (!v.is_array()) throw SchemaError(where + ": expected an array of numbers");
    check_length(v, where, length);
    std::vector<double> out;
    for (size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
  }

 private:
  static void check_length(const json& v, const std::string& where, int length) {
    if (length >= 0 && static_cast<int>(v.size()) != length)
      throw SchemaError(where + ": expected " + std::to_string(length) + " entries, got " + std::to_string(v.size()));
  }
  template <class T>
  T mark(const std::string& key, T value) {
    seen_.push_back(key);
    return value;
  }
  const json& j_;
  std::string where_;
  std::vector<std::string> seen_;
};

// Edge data on an arbitrary graph; Lambda^0 seeds the reconstruction.
struct CustomParams {
  ConnectivityGraph graph;
  int M = 2;
  std::vector<OneForm> coupling;
  std::vector<double> gamma;
  std::optional<QuadraticForm> lambda0;
};

using BuilderParams = std::variant<SquareParams, CubeParams, Hypercube4Params, FanParams, GammaMagnetParams, CustomParams>;

struct ScatteringSpec {
  std::string method = "analytic";  // analytic | numeric | both
  double T = 100;
  double rtol = 1e-9;
};

struct FamilySpec {
  std::string family;
  BuilderParams parameters;
  std::optional<std::pair<double, double>> gauge;  // (beta, e)
  std::optional<TimePath> path;
  ScatteringSpec scattering;
  std::uint32_t seed = 12345;
  double tolerance = 1e-12;
};

namespace detail {

inline Eigen::VectorXd vec(const std::vector<double>& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

inline std::vector<double> list(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline QuadraticForm square_matrix(const std::vector<std::vector<double>>& r) {
  const int n = static_cast<int>(r.size());
  QuadraticForm m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = r[i][j];
  return m;
}

inline int sign_value(int x, const std::string& where) {
  if (x != 1 && x != -1) throw SchemaError(where + ": sign factors must be +1 or -1");
  return x;
}

// Graph literal: a built-in name, or {vertices, edges[, name]}.
inline ConnectivityGraph parse_graph(const json& j, const std::string& where) {
  if (j.is_string()) {
    try {
      return graphs::by_name(j.get<std::string>());
    } catch (const GraphError& e) {
      throw SchemaError(where + ": " + e.what());
    }
  }
  ObjectReader r(j, where);
  int n = r.integer("vertices");
  auto raw = r.rows("edges", -1, 2);
  std::string name = r.text("name", "custom");
  r.finish();
  std::vector<std::pair<int, int>> edges;
  for (size_t i = 0; i < raw.size(); ++i) {
    double a = raw[i][0], b = raw[i][1];
    if (a != std::floor(a) || b != std::floor(b))
      throw SchemaError(where + ".edges[" + std::to_string(i) + "]: vertex labels must be integers");
    edges.push_back({static_cast<int>(a), static_cast<int>(b)});
  }
  try {
    return ConnectivityGraph(n, edges, name);
  } catch (const GraphError& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

inline json graph_json(const ConnectivityGraph& g) {
  json e = json::array();
  for (const auto& ed : g.edges()) e.push_back({ed.a, ed.b});
  return {{"name", g.name()}, {"vertices", g.n_vertices()}, {"edges", e}};
}

inline json rows_json(const QuadraticForm& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) out.push_back(list(m.row(i).transpose()));
  return out;
}

inline BuilderParams parse_parameters(const std::string& family, const json& j) {
  ObjectReader r(j, "parameters");
  BuilderParams out;
  if (family == "square") {
    SquareParams p;
    if (r.has("a")) p.a = vec(r.numbers("a", 2));
    if (r.has("b")) p.b = vec(r.numbers("b", 2));
    p.theta = r.number("theta", p.theta);
    p.p = sign_value(r.integer("p", p.p), r.path("p"));
    p.gamma12 = r.number("gamma12", p.gamma12);
    p.gamma14 = r.number("gamma14", p.gamma14);
    out = p;
  } else if (family == "cube") {
    CubeParams p;
    if (r.has("base")) {
      auto b = r.rows("base", 3, 3);
      for (int i = 0; i < 3; ++i) p.base[i] = vec(b[i]);
    }
    auto tau = r.numbers("tau", 3);
    std::copy(tau.begin(), tau.end(), p.tau.begin());
    if (r.has("p")) {
      auto s = r.integers("p", 6);
      for (int i = 0; i < 6; ++i) p.p[i] = sign_value(s[i], r.path("p"));
    }
    if (r.has("gamma")) {
      auto g = r.numbers("gamma", 3);
      std::copy(g.begin(), g.end(), p.gamma.begin());
    }
    out = p;
  } else if (family == "hypercube4") {
    Hypercube4Params p;
    if (r.has("base")) {
      auto b = r.rows("base", 4, 4);
      for (int i = 0; i < 4; ++i) p.base[i] = vec(b[i]);
    }
    auto tau = r.numbers("tau", 6);
    std::copy(tau.begin(), tau.end(), p.tau.begin());
    if (r.has("gamma")) {
      auto g = r.numbers("gamma", 4);
      std::copy(g.begin(), g.end(), p.gamma.begin());
    }
    out = p;
  } else if (family == "fan") {
    FanParams p;
    p.m = r.integer("m");
    p.l = r.integer("l");
    if (p.m < 2) throw SchemaError("parameters.m: need m >= 2");
    auto type = r.text("type", "II");
    if (type != "I" && type != "II") throw SchemaError("parameters.type: expected \"I\" or \"II\"");
    p.type = type == "I" ? FanType::TypeI : FanType::TypeII;
    if (r.has("alpha1")) p.alpha1 = vec(r.numbers("alpha1", 2));
    if (r.has("beta1")) p.beta1 = vec(r.numbers("beta1", 2));
    p.theta = r.numbers("theta", p.m - 1);
    if (r.has("p")) {
      p.p = r.integers("p", p.m - 1);
      for (int s : p.p) sign_value(s, r.path("p"));
    }
    p.gamma = r.numbers("gamma", p.m);
    out = p;
  } else if (family == "gamma_magnet") {
    GammaMagnetParams p;
    p.beta = r.numbers("beta");
    p.g = r.numbers("g", static_cast<int>(p.beta.size()));
    p.eps = r.number("eps", 0.0);
    out = p;
  } else if (family == "custom") {
    CustomParams p;
    p.graph = parse_graph(r.raw("graph"), "parameters.graph");
    p.M = r.integer("M");
    if (p.M < 1 || p.M > 8) throw SchemaError("parameters.M: expected 1..8");
    for (const auto& row : r.rows("coupling", p.graph.n_edges(), p.M)) p.coupling.push_back(vec(row));
    p.gamma = r.numbers("gamma", p.graph.n_edges());
    if (r.has("lambda0")) p.lambda0 = square_matrix(r.rows("lambda0", p.M, p.M));
    out = p;
  } else {
    throw SchemaError("family: unknown family \"" + family + "\"");
  }
  r.finish();
  return out;
}

inline json parameters_json(const BuilderParams& bp) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SquareParams>) {
          return {{"a", list(p.a)}, {"b", list(p.b)},           {"theta", p.theta},
                  {"p", p.p},       {"gamma12", p.gamma12}, {"gamma14", p.gamma14}};
        } else if constexpr (std::is_same_v<T, CubeParams>) {
          json base = json::array();
          for (const auto& b : p.base) base.push_back(list(b));
          return {{"base", base}, {"tau", p.tau}, {"p", p.p}, {"gamma", p.gamma}};
        } else if constexpr (std::is_same_v<T, Hypercube4Params>) {
          json base = json::array();
          for (const auto& b : p.base) base.push_back(list(b));
          return {{"base", base}, {"tau", p.tau}, {"gamma", p.gamma}};
        } else if constexpr (std::is_same_v<T, FanParams>) {
          json out = {{"m", p.m},
                      {"l", p.l},
                      {"type", p.type == FanType::TypeI ? "I" : "II"},
                      {"alpha1", list(p.alpha1)},
                      {"beta1", list(p.beta1)},
                      {"theta", p.theta},
                      {"gamma", p.gamma}};
          if (!p.p.empty()) out["p"] = p.p;
          return out;
        } else if constexpr (std::is_same_v<T, GammaMagnetParams>) {
          return {{"beta", p.beta}, {"g", p.g}, {"eps", p.eps}};
        } else {
          json c = json::array();
          for (const auto& a : p.coupling) c.push_back(list(a));
          json out = {{"graph", graph_json(p.graph)}, {"M", p.M}, {"coupling", c}, {"gamma", p.gamma}};
          if (p.lambda0) out["lambda0"] = rows_json(*p.lambda0);
          return out;
        }
      },
      bp);
}

}  // namespace detail

inline FamilySpec parse_family_spec(const json& j) {
  ObjectReader r(j, "spec");
  FamilySpec s;
  s.family = r.text("family");
  s.parameters = detail::parse_parameters(s.family, r.raw("parameters"));
  if (r.has("gauge")) {
    ObjectReader g(r.raw("gauge"), "gauge");
    s.gauge = std::pair(g.number("beta", 0.0), g.number("e", 0.0));
    g.finish();
  }
  if (r.has("path")) {
    ObjectReader p(r.raw("path"), "path");
    auto v = p.numbers("v");
    auto eps = p.numbers("eps", static_cast<int>(v.size()));
    p.finish();
    s.path = TimePath{detail::vec(v), detail::vec(eps)};
  }
  if (r.has("scattering")) {
    ObjectReader sc(r.raw("scattering"), "scattering");
    s.scattering.method = sc.text("method", s.scattering.method);
    if (s.scattering.method != "analytic" && s.scattering.method != "numeric" && s.scattering.method != "both")
      throw SchemaError("scattering.method: expected analytic, numeric or both");
    s.scattering.T = sc.number("T", s.scattering.T);
    s.scattering.rtol = sc.number("rtol", s.scattering.rtol);
    sc.finish();
    if (!(s.scattering.T > 0) || !(s.scattering.rtol > 0)) throw SchemaError("scattering: T and rtol must be positive");
  }
  if (r.has("seed")) {
    const auto& v = r.raw("seed");
    if (!v.is_number_unsigned()) throw SchemaError("spec.seed: expected a nonnegative integer");
    s.seed = v.get<std::uint32_t>();
  }
  s.tolerance = r.number("tolerance", s.tolerance);
  if (!(s.tolerance > 0)) throw SchemaError("spec.tolerance: must be positive");
  r.finish();
  return s;
}

inline json to_json(const FamilySpec& s) {
  json j = {{"family", s.family}, {"parameters", detail::parameters_json(s.parameters)}, {"seed", s.seed},
            {"tolerance", s.tolerance}};
  if (s.gauge) j["gauge"] = {{"beta", s.gauge->first}, {"e", s.gauge->second}};
  if (s.path) j["path"] = {{"v", detail::list(s.path->v)}, {"eps", detail::list(s.path->eps)}};
  j["scattering"] = {{"method", s.scattering.method}, {"T", s.scattering.T}, {"rtol", s.scattering.rtol}};
  return j;
}

// Reads and validates a spec file. Malformed JSON is a schema error.
inline FamilySpec load_family_spec(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SchemaError("cannot read " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(file.string() + ": malformed JSON: " + e.what());
  }
  return parse_family_spec(j);
}

// Builds the family; gauge (beta, e) shifts every Lambda^a by the same form.
inline MTLZFamily build_family(const FamilySpec& s) {
  MTLZFamily f = std::visit(
      [](const auto& p) -> MTLZFamily {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SquareParams>) return build_square(p);
        else if constexpr (std::is_same_v<T, CubeParams>) return build_cube(p);
        else if constexpr (std::is_same_v<T, Hypercube4Params>) return build_hypercube4(p);
        else if constexpr (std::is_same_v<T, FanParams>) return build_fan(p);
        else if constexpr (std::is_same_v<T, GammaMagnetParams>) return build_gamma_magnet(p);
        else {
          MTLZFamily f;
          f.M = p.M;
          f.coupling = p.coupling;
          f.gamma = p.gamma;
          QuadraticForm seed = p.lambda0 ? *p.lambda0 : QuadraticForm::Zero(p.M, p.M);
          f.lambda = reconstruct_lambdas(p.graph, f.coupling, f.gamma, seed);
          f.graph = p.graph;
          f.label = p.graph.name();
          return f;
        }
      },
      s.parameters);
  if (s.gauge) {
    QuadraticForm shift = gauge_seed(f.M, s.gauge->first, s.gauge->second);
    for (auto& L : f.lambda) L += shift;
  }
  return f;
}

// ------------------------------------------------------------ serialization

inline json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) out.push_back(detail::list(m.row(i).transpose()));
  return out;
}

inline json validation_json(const ValidationReport& r) {
  return {{"max_cycle_residual", r.max_cycle_residual},
          {"max_vertex_residual", r.max_vertex_residual},
          {"max_edge_residual", r.max_edge_residual},
          {"min_adjacent_sine", r.min_adjacent_sine},
          {"good_family", r.good_family},
          {"symmetric_lambdas", r.symmetric_lambdas},
          {"cycles_checked", r.cycles_checked},
          {"vertex_pairs_checked", r.vertex_pairs_checked},
          {"tolerance", r.tolerance},
          {"failures", r.failures},
          {"pass", r.pass()}};
}

inline json scan_json(const SpectrumScan& s) {
  json exact = json::array(), avoided = json::array(), unconverged = json::array();
  for (const auto& c : s.exact)
    exact.push_back({{"t", c.t}, {"lowest_level", c.lowest_level}, {"levels", c.levels}, {"pairs", c.pairs()}});
  for (const auto& g : s.avoided) avoided.push_back({{"t", g.t}, {"level", g.level}, {"gap", g.gap}});
  for (const auto& g : s.unconverged) unconverged.push_back({{"t", g.t}, {"level", g.level}, {"gap", g.gap}});
  return {{"t_min", s.t_min},
          {"t_max", s.t_max},
          {"grid_points", s.t.size()},
          {"spectral_scale", s.spectral_scale},
          {"exact_threshold", s.exact_threshold},
          {"exact_pairs", s.exact_pair_count()},
          {"exact_points", s.exact.size()},
          {"avoided_count", s.avoided.size()},
          {"exact", exact},
          {"avoided", avoided},
          {"unconverged", unconverged}};
}

inline json probability_json(const ProbabilityMatrix& pm) {
  json sym = json::array();
  for (int a = 0; a < pm.n; ++a) {
    json row = json::array();
    for (int b = 0; b < pm.n; ++b) row.push_back(pm.at(a, b).str());
    sym.push_back(row);
  }
  auto z = pm.pattern();
  return {{"symbolic", sym},        {"numeric", matrix_json(pm.numeric)}, {"fitted", pm.fitted},
          {"unfitted", pm.unfitted}, {"half_zeros", z.half_zeros},       {"column_zeros", z.columns}};
}

inline json structural_json(const StructuralCheck& c) {
  return {{"symmetric", c.symmetric},
          {"stochastic", c.stochastic},
          {"constant_diagonal", c.constant_diagonal},
          {"low_degree", c.low_degree},
          {"coupled_nonzero", c.coupled_nonzero},
          {"failures", c.failures},
          {"ok", c.ok()}};
}

inline json census_json(const Census& c) {
  json entries = json::array();
  for (const auto& e : c.entries)
    entries.push_back({{"type", e.type},
                       {"half_zeros", e.pattern.half_zeros},
                       {"column_zeros", e.pattern.columns},
                       {"count", e.cells.size()},
                       {"cells", e.cells},
                       {"representative", probability_json(e.representative)}});
  return {{"cells", c.cells}, {"types", entries}, {"anomalies", c.anomalies}, {"max_path_delta", c.max_path_delta}};
}

inline std::string rational_text(const Rational& x) { return x.str(); }

inline json certificate_json(const ConstraintSet& cs, const Certificate& c) {
  json rows = json::array();
  for (int k : c.rows) rows.push_back({{"origin", cs.rows[k].origin}, {"relation", cs.rows[k].relation}});
  json multi = json::array();
  for (int k : c.multi) {
    json nodes = json::array();
    for (int v : cs.multi[k].nodes) nodes.push_back(cs.table.str(v));
    multi.push_back({{"origin", cs.multi[k].origin}, {"terms", nodes}});
  }
  json out = {{"kind", to_string(c.kind)}, {"rows", rows}, {"multi_term", multi}, {"lines", c.lines}};
  if (!c.refutations.empty()) {
    json refs = json::array();
    for (const auto& r : c.refutations) {
      json y = json::object(), z = json::object();
      for (size_t i = 0; i < r.farkas.y.size(); ++i)
        if (r.farkas.y[i] != 0) y[std::to_string(i)] = rational_text(r.farkas.y[i]);
      for (size_t i = 0; i < r.farkas.z.size(); ++i)
        if (r.farkas.z[i] != 0) z[std::to_string(i)] = rational_text(r.farkas.z[i]);
      refs.push_back({{"signs", r.signs}, {"y", y}, {"z", z}});
    }
    out["refutations"] = refs;
  }
  return out;
}

inline json verdict_json(const ConnectivityGraph& g, const Verdict& v) {
  json orients = json::array();
  for (const auto& r : v.orientations) {
    json o = {{"orientation", mtlz::detail::orientation_text(g, r.orientation)},
              {"bits", r.bits},
              {"orbit_size", r.orbit_size},
              {"consistent", r.consistent}};
    json classes = json::array();
    for (auto c : r.loop_classes) classes.push_back(to_string(c));
    o["loop_classes"] = classes;
    if (!r.note.empty()) o["note"] = r.note;
    if (r.certificate) o["certificate"] = certificate_json(generate_constraints(g, r.orientation), *r.certificate);
    orients.push_back(o);
  }
  json out = {{"graph", detail::graph_json(g)},
              {"verdict", to_string(v.kind)},
              {"valid_orientations", v.valid_orientations},
              {"symmetry_order", v.symmetry_order},
              {"exhaustive", v.exhaustive},
              {"orientations", orients}};
  if (!v.restriction.empty()) out["restriction"] = v.restriction;
  if (!v.screen_failure.empty()) out["screen_failure"] = v.screen_failure;
  return out;
}

// --------------------------------------------------------------- artifacts

// Shortest representation that reads back to the same double.
inline std::string number_text(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

inline void write_text(const std::filesystem::path& file, const std::string& content) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << content;
}

inline std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += "\n";
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + number_text(r[i]);
    s += "\n";
  }
  return s;
}

inline std::string spectrum_csv(const SpectrumScan& s) {
  std::vector<std::string> header{"t"};
  for (int k = 0; k < s.eigenvalues.cols(); ++k) header.push_back("lambda_" + std::to_string(k + 1));
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < s.t.size(); ++i) {
    std::vector<double> r{s.t[i]};
    for (int k = 0; k < s.eigenvalues.cols(); ++k) r.push_back(s.eigenvalues(i, k));
    rows.push_back(std::move(r));
  }
  return csv_text(header, rows);
}

inline std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::vector<std::string> header;
  for (int b = 0; b < m.cols(); ++b) header.push_back("from_" + std::to_string(b));
  std::vector<std::vector<double>> rows;
  for (int a = 0; a < m.rows(); ++a) rows.push_back(detail::list(m.row(a).transpose()));
  return csv_text(header, rows);
}

namespace detail {

inline std::string fixed(double x, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << (std::abs(x) < 0.5 * std::pow(10.0, -digits) ? 0.0 : x);
  return s.str();
}

inline std::string escape_xml(const std::string& in) {
  std::string out;
  for (char c : in) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
                                "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

}  // namespace detail

// Eigenvalue tracks as polylines, exact crossings as dots.
inline std::string spectrum_svg(const SpectrumScan& s, const std::string& title) {
  const double W = 800, H = 500, pad = 50;
  double lo = s.eigenvalues.size() ? s.eigenvalues.minCoeff() : 0, hi = s.eigenvalues.size() ? s.eigenvalues.maxCoeff() : 1;
  if (hi <= lo) hi = lo + 1;
  const double t0 = s.t.empty() ? 0 : s.t.front(), t1 = s.t.empty() ? 1 : s.t.back();
  auto X = [&](double t) { return pad + (t - t0) / std::max(t1 - t0, 1e-300) * (W - 2 * pad); };
  auto Y = [&](double e) { return H - pad - (e - lo) / (hi - lo) * (H - 2 * pad); };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\">\n";
  o << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad << "\" height=\"" << H - 2 * pad
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"" << pad / 2 << "\" text-anchor=\"middle\" font-size=\"14\">"
    << detail::escape_xml(title) << "</text>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">t ["
    << detail::fixed(t0) << ", " << detail::fixed(t1) << "]</text>\n";
  for (int k = 0; k < s.eigenvalues.cols(); ++k) {
    o << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << detail::kPalette[k % 10] << "\" points=\"";
    for (size_t i = 0; i < s.t.size(); ++i)
      o << (i ? " " : "") << detail::fixed(X(s.t[i]), 2) << "," << detail::fixed(Y(s.eigenvalues(i, k)), 2);
    o << "\"/>\n";
  }
  // Exact crossings: mark at the refined time on the lower crossing level.
  for (const auto& c : s.exact) {
    size_t i = std::lower_bound(s.t.begin(), s.t.end(), c.t) - s.t.begin();
    if (i >= s.t.size()) i = s.t.size() - 1;
    o << "<circle r=\"2.5\" fill=\"black\" cx=\"" << detail::fixed(X(c.t), 2) << "\" cy=\""
      << detail::fixed(Y(s.eigenvalues(i, c.lowest_level)), 2) << "\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// Stereographic picture of the crossing circles with cell labels.
inline std::string scene_svg(const PlanarScene& scene, const std::string& title) {
  const double W = 700, H = 700;
  double R = 1;
  for (const auto& p : scene.cell_points) R = std::max(R, p.norm());
  for (const auto& p : scene.vertices) R = std::max(R, p.norm());
  R = std::min(R * 1.1, 50.0);
  const double scale = (W / 2 - 20) / R;
  auto X = [&](double x) { return W / 2 + scale * x; };
  auto Y = [&](double y) { return H / 2 - scale * y; };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\">\n";
  o << "<text x=\"" << W / 2 << "\" y=\"16\" text-anchor=\"middle\" font-size=\"14\">" << detail::escape_xml(title)
    << "</text>\n";
  int k = 0;
  for (const auto& c : scene.curves) {
    const char* color = detail::kPalette[k++ % 10];
    o << "<g stroke=\"" << color << "\" fill=\"none\"><title>" << detail::escape_xml(c.label) << "</title>";
    if (c.is_line) {
      Eigen::Vector2d a = -2 * R * c.direction, b = 2 * R * c.direction;
      o << "<line x1=\"" << detail::fixed(X(a.x()), 2) << "\" y1=\"" << detail::fixed(Y(a.y()), 2) << "\" x2=\""
        << detail::fixed(X(b.x()), 2) << "\" y2=\"" << detail::fixed(Y(b.y()), 2) << "\"/>";
    } else {
      o << "<circle cx=\"" << detail::fixed(X(c.center.x()), 2) << "\" cy=\"" << detail::fixed(Y(c.center.y()), 2)
        << "\" r=\"" << detail::fixed(scale * c.radius, 2) << "\"/>";
    }
    o << "</g>\n";
  }
  for (size_t i = 0; i < scene.cell_points.size(); ++i) {
    const auto& p = scene.cell_points[i];
    if (p.norm() > R) continue;
    o << "<text font-size=\"9\" text-anchor=\"middle\" x=\"" << detail::fixed(X(p.x()), 2) << "\" y=\""
      << detail::fixed(Y(p.y()), 2) << "\">" << i << "</text>\n";
  }
  // Legend: one entry per edge.
  k = 0;
  for (const auto& c : scene.curves) {
    o << "<text font-size=\"10\" x=\"8\" y=\"" << 34 + 12 * k << "\" fill=\"" << detail::kPalette[k % 10] << "\">"
      << detail::escape_xml(c.label) << "</text>\n";
    ++k;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace mtlz::io
