#include "curvemesh/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace curvemesh::io {

using nlohmann::json;

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), end);
}

std::string content_hash(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf.data());
}

namespace {

[[noreturn]] void field_error(std::size_t index, const std::string& name, const std::string& field,
                              const std::string& what) {
  throw ParseError("curve #" + std::to_string(index) + (name.empty() ? "" : " ('" + name + "')") + ", field '" +
                   field + "': " + what);
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

CurveSpec parse_one(const json& obj, std::size_t index) {
  if (!obj.is_object()) field_error(index, "", "<curve>", "expected an object");
  CurveSpec spec;
  static const std::array<std::string_view, 7> known{"name", "kind", "params", "domain", "control_points", "knots",
                                                     "degree"};
  for (const auto& [key, _] : obj.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) field_error(index, "", key, "unknown field");

  if (!obj.contains("name") || !obj["name"].is_string()) field_error(index, "", "name", "required string");
  spec.name = obj["name"].get<std::string>();
  if (!obj.contains("kind") || !obj["kind"].is_string()) field_error(index, spec.name, "kind", "required string");
  try {
    spec.kind = curve_kind_from_string(obj["kind"].get<std::string>());
  } catch (const SpecError& e) {
    field_error(index, spec.name, "kind", e.what());
  }
  if (obj.contains("params")) {
    const auto& p = obj["params"];
    if (!p.is_array()) field_error(index, spec.name, "params", "expected an array of numbers");
    for (const auto& v : p) {
      if (!v.is_number()) field_error(index, spec.name, "params", "expected an array of numbers");
      spec.params.push_back(v.get<double>());
    }
  }
  if (obj.contains("domain")) {
    const auto& d = obj["domain"];
    if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number())
      field_error(index, spec.name, "domain", "expected [t_lo, t_hi]");
    spec.domain = std::make_pair(d[0].get<double>(), d[1].get<double>());
  }
  if (obj.contains("control_points")) {
    const auto& cp = obj["control_points"];
    if (!cp.is_array() || cp.empty()) field_error(index, spec.name, "control_points", "expected a non-empty array");
    const std::size_t dim = cp[0].is_array() ? cp[0].size() : 0;
    spec.control_points.resize(static_cast<Eigen::Index>(cp.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < cp.size(); ++i) {
      if (!cp[i].is_array() || cp[i].size() != dim)
        field_error(index, spec.name, "control_points", "rows must be arrays of equal length");
      for (std::size_t j = 0; j < dim; ++j) {
        if (!cp[i][j].is_number()) field_error(index, spec.name, "control_points", "expected numbers");
        spec.control_points(Eigen::Index(i), Eigen::Index(j)) = cp[i][j].get<double>();
      }
    }
  }
  if (obj.contains("knots")) {
    const auto& k = obj["knots"];
    if (!k.is_array()) field_error(index, spec.name, "knots", "expected an array of numbers");
    for (const auto& v : k) {
      if (!v.is_number()) field_error(index, spec.name, "knots", "expected an array of numbers");
      spec.knots.push_back(v.get<double>());
    }
  }
  if (obj.contains("degree")) {
    if (!obj["degree"].is_number_integer()) field_error(index, spec.name, "degree", "expected an integer");
    spec.degree = obj["degree"].get<int>();
  }
  if (spec.kind == CurveKind::bspline && (!obj.contains("control_points") || !obj.contains("knots") ||
                                          !obj.contains("degree")))
    field_error(index, spec.name, "control_points", "bspline requires control_points, knots and degree");
  try {
    (void)Curve(spec);
  } catch (const SpecError& e) {
    field_error(index, spec.name, "<curve>", e.what());
  }
  return spec;
}

}  // namespace

std::vector<CurveSpec> parse_curve_specs(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  const json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("curves")) throw ParseError("document: expected a \"curves\" array");
    list = &doc["curves"];
  }
  if (!list->is_array()) throw ParseError("document: expected an array of curves");
  std::vector<CurveSpec> specs;
  for (std::size_t i = 0; i < list->size(); ++i) specs.push_back(parse_one((*list)[i], i));
  return specs;
}

std::vector<CurveSpec> load_curve_specs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_curve_specs(ss.str());
}

json to_json(const CurveSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["kind"] = std::string(to_string(spec.kind));
  j["params"] = spec.params;
  if (spec.domain) j["domain"] = {spec.domain->first, spec.domain->second};
  if (spec.kind == CurveKind::bspline) {
    json cp = json::array();
    for (Eigen::Index i = 0; i < spec.control_points.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index c = 0; c < spec.control_points.cols(); ++c) row.push_back(spec.control_points(i, c));
      cp.push_back(row);
    }
    j["control_points"] = cp;
    j["knots"] = spec.knots;
    j["degree"] = spec.degree;
  }
  return j;
}

json to_json(const Config& c) {
  return {{"tol", c.tol},
          {"max_iterations", c.max_iterations},
          {"barrier_passes", c.barrier_passes},
          {"mu_shrink", c.mu_shrink},
          {"sigma1", c.sigma1},
          {"sigma2", c.sigma2},
          {"eta", c.eta},
          {"max_halvings", c.max_halvings},
          {"oversample", c.oversample},
          {"quadrature_points", c.quadrature_points},
          {"log_barrier", c.log_barrier}};
}

json to_json(const OptimizeReport& r) {
  return {{"converged", r.converged},
          {"line_search_failed", r.line_search_failed},
          {"iterations", r.iterations},
          {"line_search_count", r.line_search_count},
          {"barrier_activations", r.barrier_activations},
          {"curvature_violations", r.curvature_violations},
          {"passes", r.passes},
          {"E_initial", r.E_initial},
          {"E_final", r.E_final},
          {"grad_norm_final", r.grad_norm_final},
          {"mu_final", r.mu_final},
          {"wall_time", r.wall_time},
          {"message", r.message}};
}

json to_json(const ParallelReport& r) {
  json tasks = json::array();
  for (const auto& t : r.tasks) {
    json jt = {{"label", t.label}, {"ok", t.ok}, {"worker", t.worker}, {"seconds", t.report.wall_time},
               {"report", to_json(t.report)}};
    if (!t.ok) jt["error"] = t.error;
    tasks.push_back(jt);
  }
  json j = {{"mode", std::string(to_string(r.mode))},
            {"workers_requested", r.workers_requested},
            {"workers_used", r.workers_used},
            {"wall_time", r.wall_time},
            {"total_iterations", r.total_iterations()},
            {"worker_iterations", r.worker_iterations},
            {"iteration_histogram", r.iteration_histogram(10)},
            {"tasks", tasks}};
  j["serial_wall_time"] = r.serial_wall_time ? json(*r.serial_wall_time) : json(nullptr);
  j["speedup"] = r.speedup ? json(*r.speedup) : json(nullptr);
  return j;
}

void write_mesh_csv(std::ostream& out, const std::string& curve, const PhysicalMesh& x, const ParametricMesh& s) {
  const int dim = x.dim();
  out << "curve,element,node_index,s,x,y" << (dim == 3 ? ",z" : "") << '\n';
  const int p = x.degree(), q = s.degree();
  for (int e = 0; e < x.elements(); ++e)
    for (int i = 0; i <= std::max(p, q); ++i) {
      out << curve << ',' << e << ',' << i << ',';
      if (i <= q) out << format_double(s.nodes()[s.global_index(e, i)]);
      for (int c = 0; c < dim; ++c) {
        out << ',';
        if (i <= p) out << format_double(x.nodes()(c, x.global_index(e, i)));
      }
      out << '\n';
    }
}

void write_error_csv(std::ostream& out, const ErrorDecomposition& err) {
  const bool spatial = !err.binormal.empty();
  out << "xi_global,abs_e,e_t,e_n" << (spatial ? ",e_b" : "") << '\n';
  for (std::size_t i = 0; i < err.xi_global.size(); ++i) {
    out << format_double(err.xi_global[i]) << ',' << format_double(err.magnitude[i]) << ','
        << format_double(err.tangential[i]) << ',' << format_double(err.normal[i]);
    if (spatial) out << ',' << format_double(err.binormal[i]);
    out << '\n';
  }
}

void write_table_header(std::ostream& out) {
  out << "curve,layout,iterations,line_searches,converged,E_initial,E_final,seconds\n";
}

void write_table_row(std::ostream& out, const std::string& curve, Layout layout, const OptimizeReport& r) {
  out << curve << ',' << to_string(layout) << ',' << r.iterations << ',' << r.line_search_count << ','
      << (r.converged ? "true" : "false") << ',' << format_double(r.E_initial) << ',' << format_double(r.E_final)
      << ',' << format_double(r.wall_time) << '\n';
}

void write_study_csv(std::ostream& out, const ConvergenceStudy& study) {
  out << "curve,p,q,layout,R,disparity_initial,disparity_opt\n";
  for (const auto& c : study.cells)
    out << study.curve.name << ',' << c.p << ',' << c.q << ',' << to_string(study.layout) << ',' << c.elements << ','
        << format_double(c.norm_initial) << ',' << format_double(c.norm_final) << '\n';
}

}  // namespace curvemesh::io
