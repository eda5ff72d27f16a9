#pragma once
// Command-line front end: validate, spectrum, scatter, screen, census.
// Exit codes: 0 success, 1 failed check or library error, 2 usage or schema error.
// Artifacts go to $MTLZ_OUT_DIR (default ./mtlz_out).

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <random>

#include "CLI11.hpp"

#include "mtlz/io.hpp"
#include "mtlz/propagate.hpp"

namespace mtlz::cli {

using io::json;
namespace fs = std::filesystem;

inline fs::path output_dir() {
  const char* env = std::getenv("MTLZ_OUT_DIR");
  return env && *env ? fs::path(env) : fs::path("mtlz_out");
}

// File-name friendly version of a label.
inline std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_';
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "out" : out;
}

// Collects artifacts; written paths are recorded relative to the output dir.
class Outputs {
 public:
  explicit Outputs(std::string stem) : dir_(output_dir()), stem_(std::move(stem)) {}
  std::string write(const std::string& suffix, const std::string& content) {
    std::string name = stem_ + "_" + suffix;
    io::write_text(dir_ / name, content);
    names_.push_back(name);
    return name;
  }
  // The report goes last and lists everything written before it.
  std::string report(const std::string& command, json body) {
    body["command"] = command;
    body["artifacts"] = names_;
    return write(command + ".json", body.dump(2) + "\n");
  }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::string stem_;
  std::vector<std::string> names_;
};

inline json family_json(const MTLZFamily& f) {
  return {{"label", f.label}, {"graph", io::detail::graph_json(f.graph)}, {"N", f.N()}, {"M", f.M}};
}

inline TimePath path_for(const io::FamilySpec& spec, const MTLZFamily& f) {
  if (spec.path) return *spec.path;
  if (f.default_path) return *f.default_path;
  throw SchemaError("spec has no \"path\" and the family has no default path");
}

// ------------------------------------------------------------------ validate

inline int cmd_validate(const std::string& file, int points, std::ostream& out) {
  auto spec = io::load_family_spec(file);
  Outputs o(slug(fs::path(file).stem().string()));
  json body = {{"spec", io::to_json(spec)}};
  try {
    auto f = build_family(spec);
    auto rep = validate_family(f, spec.tolerance);
    auto hf = assemble(f, rep.pass());
    std::mt19937 rng(spec.seed);
    std::uniform_real_distribution<double> u(-1, 1);
    double comm = 0, curl = 0;
    for (int k = 0; k < points; ++k) {
      Eigen::VectorXd x(f.M);
      for (int j = 0; j < f.M; ++j) x(j) = u(rng);
      auto r = integrability_residuals(hf, x);
      double s = std::max(r.h_scale, 1e-300);
      comm = std::max(comm, r.commutator / (s * s));
      curl = std::max(curl, r.curl / s);
    }
    bool pass = rep.pass() && comm < spec.tolerance && curl < spec.tolerance;
    body["family"] = family_json(f);
    body["validation"] = io::validation_json(rep);
    body["integrability"] = {{"points", points},       {"seed", spec.seed}, {"max_commutator_rel", comm},
                             {"max_curl_rel", curl}, {"tolerance", spec.tolerance}};
    body["pass"] = pass;
    auto row = [&](const std::string& name, double v) {
      out << std::left << std::setw(22) << name << std::scientific << std::setprecision(3) << v << "  "
          << (v < spec.tolerance ? "ok" : "FAIL") << "\n";
    };
    out << "family " << f.label << " (N=" << f.N() << ", M=" << f.M << ")\n";
    row("cycle residual", rep.max_cycle_residual);
    row("vertex-pair residual", rep.max_vertex_residual);
    row("edge residual", rep.max_edge_residual);
    row("commutator", comm);
    row("curl", curl);
    out << std::left << std::setw(22) << "good family" << (rep.good_family ? "yes" : "no") << "\n";
    for (const auto& msg : rep.failures) out << "failure: " << msg << "\n";
    out << (pass ? "PASS" : "FAIL") << "\n";
    o.report("validate", body);
    return pass ? 0 : 1;
  } catch (const Error& e) {
    body["error"] = e.what();
    body["pass"] = false;
    out << "error: " << e.what() << "\n";
    o.report("validate", body);
    return 1;
  }
}

// ------------------------------------------------------------------ spectrum

inline int cmd_spectrum(const std::string& file, const std::string& t_range, const std::vector<std::string>& formats,
                        double coupling_scale, std::ostream& out) {
  auto spec = io::load_family_spec(file);
  ScanOptions opt;
  if (t_range != "auto") {
    auto colon = t_range.find(':');
    double a = 0, b = 0;
    try {
      if (colon == std::string::npos) throw std::invalid_argument("no colon");
      a = std::stod(t_range.substr(0, colon));
      b = std::stod(t_range.substr(colon + 1));
    } catch (const std::exception&) {
      throw SchemaError("--t-range: expected auto or a:b");
    }
    if (!(b > a)) throw SchemaError("--t-range: need a < b");
    opt.range = std::pair(a, b);
  }
  auto f = build_family(spec);
  auto h = restrict(assemble(f), path_for(spec, f));
  if (coupling_scale != 1) h = h.scaled_couplings(coupling_scale);
  auto s = scan_spectrum(h, opt);
  Outputs o(slug(fs::path(file).stem().string()));
  for (const auto& fmt : formats) {
    if (fmt == "csv") o.write("spectrum.csv", io::spectrum_csv(s));
    else if (fmt == "svg") o.write("spectrum.svg", io::spectrum_svg(s, f.label + " eigenvalues"));
    else throw SchemaError("--out: unknown format " + fmt);
  }
  json body = {{"spec", io::to_json(spec)}, {"family", family_json(f)}, {"coupling_scale", coupling_scale},
               {"zero_coupling_count", zero_coupling_count(h)}, {"scan", io::scan_json(s)}};
  o.report("spectrum", body);
  out << "exact pairwise crossings: " << s.exact_pair_count() << " (" << s.exact.size() << " points)\n";
  out << "avoided crossings: " << s.avoided.size() << "\n";
  for (const auto& g : s.unconverged)
    out << "unconverged refinement: t=" << g.t << " level " << g.level << " gap " << g.gap << "\n";
  return 0;
}

// ------------------------------------------------------------------- scatter

inline NumericScattering numeric_run(const LinearHamiltonian& h, const io::ScatteringSpec& sc) {
  PropagationConfig cfg;
  cfg.T = sc.T;
  cfg.rtol = sc.rtol;
  cfg.error_bound = 1.0;  // reported, not enforced
  return propagate(h, cfg);
}

inline json census_body(const ScatteringModel& m, const Census& c) {
  return {{"vertices", m.complex.V()},
          {"arcs", m.complex.E()},
          {"cells", m.complex.F()},
          {"euler", m.complex.euler()},
          {"census", io::census_json(c)}};
}

inline int cmd_scatter(const std::string& file, std::optional<int> start, bool all, std::optional<std::string> method,
                       double tol, std::ostream& out) {
  auto spec = io::load_family_spec(file);
  if (all && method && *method != "analytic") throw SchemaError("--all computes the analytic census only");
  const std::string how = all ? "analytic" : method.value_or(spec.scattering.method);
  if (how != "analytic" && how != "numeric" && how != "both") throw SchemaError("--method: analytic, numeric or both");
  auto f = build_family(spec);
  Outputs o(slug(fs::path(file).stem().string()));
  json body = {{"spec", io::to_json(spec)}, {"family", family_json(f)}, {"method", how}};
  const bool analytic = how != "numeric";

  if (all) {
    auto m = make_scattering_model(f);
    auto c = classify_all_cells(m);
    json per_cell = json::array();
    bool structural = true;
    for (int s = 0; s < c.cells; ++s) {
      auto chk = structural_check(c.per_cell[s], f.graph);
      structural &= chk.ok();
      per_cell.push_back({{"cell", s}, {"probability", io::probability_json(c.per_cell[s])},
                          {"structure", io::structural_json(chk)}});
    }
    o.write("cells.json", per_cell.dump(2) + "\n");
    o.write("arrangement.svg", io::scene_svg(stereographic_scene(m.arrangement, m.complex), f.label + " cells"));
    body.update(census_body(m, c));
    body["structural_ok"] = structural;
    o.report("scatter", body);
    out << c.cells << " cells, " << c.entries.size() << " zero-pattern types\n";
    for (const auto& e : c.entries)
      out << "type " << e.type << ": half-zeros " << e.pattern.half_zeros << ", columns " << e.pattern.columns << ", "
          << e.cells.size() << " cells\n";
    return 0;
  }

  const int cell = start.value_or(0);
  Eigen::MatrixXd Pa, Pn;
  std::optional<ScatteringModel> model;
  if (analytic) {
    model = make_scattering_model(f);
    if (cell < 0 || cell >= model->complex.F()) throw SchemaError("--start-cell: no such cell");
    auto pm = symbolic_probability(*model, cell);
    auto chk = structural_check(pm, f.graph);
    Pa = pm.numeric;
    body["start_cell"] = cell;
    body["analytic"] = io::probability_json(pm);
    body["analytic"]["type"] = f.N() == 8 ? cube_type_of(pm.pattern()) : 0;
    body["analytic"]["structure"] = io::structural_json(chk);
    o.write("analytic.csv", io::matrix_csv(Pa));
    out << "analytic P from cell " << cell << ":\n" << pm.str();
  }
  if (how != "analytic") {
    TimePath path = model ? cell_time_path(*model, cell, spec.path ? Eigen::Vector3d(spec.path->eps) :
                                                                     Eigen::Vector3d(0.1, -0.2, 0.15))
                          : path_for(spec, f);
    auto h = restrict(assemble(f), path);
    auto ns = numeric_run(h, spec.scattering);
    Pn = ns.P;
    body["numeric"] = {{"P", io::matrix_json(ns.P)}, {"error_estimate", ns.max_error()}, {"T", ns.T},
                       {"unitarity_defect", ns.unitarity_defect}, {"steps", ns.steps}};
    o.write("numeric.csv", io::matrix_csv(Pn));
    out << "numeric P (T=" << ns.T << ", error estimate " << ns.max_error() << "):\n" << ns.P << "\n";
  }
  int code = 0;
  if (how == "both") {
    Eigen::Index a = 0, b = 0;
    double worst = (Pa - Pn).cwiseAbs().maxCoeff(&a, &b);
    body["cross_validation"] = {{"max_delta", worst}, {"worst_entry", {a, b}}, {"tolerance", tol}, {"pass", worst <= tol}};
    out << "max |analytic - numeric| = " << worst << " at (" << a << "," << b << ")\n";
    if (worst > tol) {
      out << "FAIL: cross-validation above " << tol << "\n";
      code = 1;
    }
  }
  o.report("scatter", body);
  return code;
}

// -------------------------------------------------------------------- census

inline int cmd_census(const std::string& file, std::ostream& out) {
  auto spec = io::load_family_spec(file);
  auto f = build_family(spec);
  auto m = make_scattering_model(f);
  auto c = classify_all_cells(m);
  Outputs o(slug(fs::path(file).stem().string()));
  o.write("census.svg", io::scene_svg(stereographic_scene(m.arrangement, m.complex), f.label + " cells"));
  std::vector<std::vector<double>> rows;
  for (int s = 0; s < c.cells; ++s) {
    const auto& cell = m.complex.cells[s];
    auto z = c.per_cell[s].pattern();
    rows.push_back({static_cast<double>(s), cell.rep.x(), cell.rep.y(), cell.rep.z(),
                    static_cast<double>(f.N() == 8 ? cube_type_of(z) : 0), static_cast<double>(z.half_zeros)});
  }
  o.write("cells.csv", io::csv_text({"cell", "x", "y", "z", "type", "half_zeros"}, rows));
  json body = {{"spec", io::to_json(spec)}, {"family", family_json(f)}};
  body.update(census_body(m, c));
  o.report("census", body);
  out << "V=" << m.complex.V() << " E=" << m.complex.E() << " F=" << m.complex.F() << " (V-E+F=" << m.complex.euler()
      << ")\n";
  for (const auto& e : c.entries)
    out << "type " << e.type << ": half-zeros " << e.pattern.half_zeros << ", columns " << e.pattern.columns << ", "
        << e.cells.size() << " cells\n";
  for (const auto& a : c.anomalies) out << "anomaly: " << a << "\n";
  return 0;
}

// -------------------------------------------------------------------- screen

// A catalog key, a built-in graph name, or a JSON graph file.
inline CatalogEntry resolve_graph(const std::string& arg) {
  auto cat = catalog_entries();
  if (auto it = cat.find(arg); it != cat.end()) return it->second;
  if (fs::exists(arg)) {
    std::ifstream in(arg);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw SchemaError(arg + ": malformed JSON: " + e.what());
    }
    return {io::detail::parse_graph(j, "graph"), {}};
  }
  try {
    return {graphs::by_name(arg), {}};
  } catch (const GraphError& e) {
    throw SchemaError(e.what());
  }
}

inline int cmd_screen(const std::string& arg, bool catalog, std::ostream& out) {
  std::vector<std::pair<std::string, CatalogEntry>> todo;
  if (catalog) {
    for (auto& [k, e] : catalog_entries()) todo.push_back({k, e});
  } else {
    auto key = fs::exists(arg) && !catalog_entries().count(arg) ? fs::path(arg).stem().string() : arg;
    todo.push_back({key, resolve_graph(arg)});
  }
  json all = json::object();
  for (const auto& [key, e] : todo) {
    auto v = screen(e.graph, e.options);
    auto text = transcript(e.graph, v);
    out << text;
    Outputs o(slug(key));
    o.write("screen.txt", text);
    o.report("screen", io::verdict_json(e.graph, v));
    all[key] = to_string(v.kind);
  }
  if (catalog) io::write_text(output_dir() / "catalog_screen.json", all.dump(2) + "\n");
  return 0;
}

// ----------------------------------------------------------------------- run

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Multitime Landau-Zener workbench"};
  app.require_subcommand(1);

  std::string spec_file, t_range = "auto", graph, method;
  int points = 20, start_cell = -1;
  bool all = false, catalog = false;
  double coupling_scale = 1, tol = 5e-3;
  std::vector<std::string> formats{"csv", "svg"};

  auto* v = app.add_subcommand("validate", "Check integrability residuals of a family spec");
  v->add_option("spec", spec_file, "family spec (JSON)")->required();
  v->add_option("--points", points, "random x samples for commutator and curl residuals");

  auto* sp = app.add_subcommand("spectrum", "Eigenvalue tracks and crossing census along the spec path");
  sp->add_option("spec", spec_file, "family spec (JSON)")->required();
  sp->add_option("--t-range", t_range, "auto or a:b");
  sp->add_option("--out", formats, "artifact formats: csv, svg")->delimiter(',');
  sp->add_option("--coupling-scale", coupling_scale, "multiply all couplings along the path");

  auto* sc = app.add_subcommand("scatter", "Transition probabilities: analytic, numeric or both");
  sc->add_option("spec", spec_file, "family spec (JSON)")->required();
  auto* cell_opt = sc->add_option("--start-cell", start_cell, "start cell id");
  sc->add_flag("--all", all, "census over every start cell")->excludes(cell_opt);
  sc->add_option("--method", method, "override the spec's scattering.method");
  sc->add_option("--tol", tol, "analytic vs numeric tolerance");

  auto* sr = app.add_subcommand("screen", "No-go screening of a graph");
  sr->add_option("graph", graph, "catalog key, graph name, or graph JSON file");
  sr->add_flag("--catalog", catalog, "screen the whole built-in catalog");

  auto* cs = app.add_subcommand("census", "Cell decomposition and probability-type census");
  cs->add_option("spec", spec_file, "family spec (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    if (v->parsed()) return cmd_validate(spec_file, points, out);
    if (sp->parsed()) return cmd_spectrum(spec_file, t_range, formats, coupling_scale, out);
    if (sc->parsed())
      return cmd_scatter(spec_file, start_cell >= 0 ? std::optional(start_cell) : std::nullopt, all,
                         method.empty() ? std::nullopt : std::optional(method), tol, out);
    if (sr->parsed()) {
      if (graph.empty() == !catalog) throw SchemaError("screen: give a graph or --catalog");
      return cmd_screen(graph, catalog, out);
    }
    if (cs->parsed()) return cmd_census(spec_file, out);
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace mtlz::cli
