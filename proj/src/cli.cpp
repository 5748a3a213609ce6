#include "curvemesh/cli.hpp"

#include "curvemesh/analysis.hpp"
#include "curvemesh/io.hpp"

#include "CLI11.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace curvemesh::cli {

using nlohmann::json;
namespace fs = std::filesystem;

int RunManifest::q_for(int p) const { return q ? *q : default_q(p); }

void RunManifest::validate() const {
  if (degrees.empty()) throw SpecError("--p needs at least one degree");
  for (int p : degrees)
    if (p < 1 || p > 20) throw SpecError("--p values must lie in [1, 20]");
  if (q && (*q < 1 || *q > 40)) throw SpecError("--q must lie in [1, 40] or be 'auto'");
  if (elements.empty()) throw SpecError("--elements needs at least one count");
  for (int r : elements)
    if (r < 1) throw SpecError("--elements values must be >= 1");
  if (workers < 1) throw SpecError("--workers must be >= 1");
  if (!(tol > 0)) throw SpecError("--tol must be positive");
}

Config RunManifest::config() const {
  Config c;
  c.tol = tol;
  return c;
}

json RunManifest::to_json() const {
  return {{"command", command},
          {"spec", spec_path},
          {"p", degrees},
          {"q", q ? json(*q) : json("auto")},
          {"elements", elements},
          {"layout", std::string(to_string(layout))},
          {"workers", workers},
          {"tol", tol},
          {"seed", seed},
          {"out", out_dir},
          {"partition", std::string(to_string(partition))},
          {"mode", std::string(to_string(mode))}};
}

std::string RunManifest::text() const { return to_json().dump(); }

std::string RunManifest::hash() const { return io::content_hash(text()); }

namespace {

class Outputs {
 public:
  explicit Outputs(const RunManifest& m) : m_(m), dir_(m.out_dir) { fs::create_directories(dir_); }

  // CSV files open with a comment line carrying the manifest.
  std::ofstream csv(const std::string& name) {
    std::ofstream f = open(name);
    f << "# manifest_hash=" << m_.hash() << " manifest=" << m_.text() << '\n';
    return f;
  }

  void write_json(const std::string& name, json body) {
    body["manifest_hash"] = m_.hash();
    body["manifest"] = m_.to_json();
    std::ofstream f = open(name);
    f << body.dump(2) << '\n';
  }

 private:
  std::ofstream open(const std::string& name) {
    std::ofstream f(dir_ / name);
    if (!f) throw std::runtime_error("cannot write '" + (dir_ / name).string() + "'");
    return f;
  }

  const RunManifest& m_;
  fs::path dir_;
};

std::string tag(const std::string& name, int p, int q, int R) {
  return name + "_p" + std::to_string(p) + "_q" + std::to_string(q) + "_R" + std::to_string(R);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

bool bitwise_equal(const PhysicalMesh& a, const PhysicalMesh& b) {
  return a.nodes().size() == b.nodes().size() &&
         std::memcmp(a.nodes().data(), b.nodes().data(), sizeof(double) * a.nodes().size()) == 0;
}

bool bitwise_equal(const ParametricMesh& a, const ParametricMesh& b) {
  return a.nodes().size() == b.nodes().size() &&
         std::memcmp(a.nodes().data(), b.nodes().data(), sizeof(double) * a.nodes().size()) == 0;
}

std::vector<CurveJob> make_jobs(const RunManifest& m, const std::vector<CurveSpec>& specs) {
  std::vector<CurveJob> jobs;
  for (const auto& spec : specs)
    for (int p : m.degrees)
      for (int R : m.elements) {
        CurveJob job;
        job.spec = spec;
        job.p = p;
        job.q = m.q_for(p);
        job.elements = R;
        job.layout = m.layout;
        job.partition = m.partition;
        jobs.push_back(job);
      }
  return jobs;
}

std::vector<int> worker_counts(int max_workers) {
  std::vector<int> counts;
  for (int w = 1; w < max_workers; w *= 2) counts.push_back(w);
  counts.push_back(max_workers);
  return counts;
}

}  // namespace

int cmd_optimize(const RunManifest& m, std::ostream& log) {
  const auto specs = io::load_curve_specs(m.spec_path);
  const auto jobs = make_jobs(m, specs);
  const Config config = m.config();
  const CurveRunResult run = run_by_curves(jobs, config, m.workers);

  Outputs out(m);
  auto table = out.csv("table.csv");
  io::write_table_header(table);
  json curves = json::array();
  int succeeded = 0;
  for (const auto& c : run.curves) {
    const CurveJob* job = nullptr;
    for (const auto& j : jobs)
      if (j.spec.name == c.name && !job) job = &j;
    json entry = {{"name", c.name}, {"ok", c.ok}};
    if (c.ok) {
      ++succeeded;
      const std::string file = "mesh_" + tag(c.name, c.x.degree(), c.s.degree(), c.x.elements()) + ".csv";
      auto mesh = out.csv(file);
      io::write_mesh_csv(mesh, c.name, c.x, c.s);
      io::write_table_row(table, c.name, m.layout, c.report);
      entry["p"] = c.x.degree();
      entry["q"] = c.s.degree();
      entry["elements"] = c.x.elements();
      entry["mesh_file"] = file;
      entry["sigma_norm_initial"] = c.norm_initial;
      entry["sigma_norm_final"] = c.norm_final;
      entry["report"] = io::to_json(c.report);
    } else {
      entry["error"] = c.error;
      log << "curve '" << c.name << "' failed: " << c.error << '\n';
    }
    curves.push_back(entry);
  }
  for (const auto& name : run.excluded) log << "curve '" << name << "' is a straight line; excluded\n";
  out.write_json("report.json", {{"curves", curves},
                                 {"excluded_straight_lines", run.excluded},
                                 {"config", io::to_json(config)},
                                 {"parallel", io::to_json(run.report)}});
  if (!run.curves.empty() && succeeded == 0) return total_failure;
  return ok;
}

int cmd_converge(const RunManifest& m, std::ostream& log) {
  const auto specs = io::load_curve_specs(m.spec_path);
  const Config config = m.config();
  Outputs out(m);
  auto csv = out.csv("study.csv");
  csv << "curve,p,q,layout,R,disparity_initial,disparity_opt\n";
  json orders = json::object();
  int studied = 0;
  for (const auto& spec : specs) {
    StudyOptions opt;
    opt.layout = m.layout;
    opt.partition = m.partition;
    opt.q_override = m.q.value_or(0);
    opt.workers = m.workers;
    ConvergenceStudy study;
    try {
      study = run_study(spec, m.degrees, m.elements, config, opt);
    } catch (const std::exception& ex) {
      log << "curve '" << spec.name << "' skipped: " << ex.what() << '\n';
      orders[spec.name] = {{"error", ex.what()}};
      continue;
    }
    ++studied;
    std::ostringstream body;
    io::write_study_csv(body, study);
    const std::string text = body.str();
    csv << text.substr(text.find('\n') + 1);
    json per = json::object();
    for (int p : m.degrees) {
      int failed = 0;
      for (const auto& c : study.cells) failed += (c.p == p && c.failed);
      per[std::to_string(p)] = {{"q", m.q_for(p)},
                                {"order_initial", finite_or_null(study.order_initial.at(p))},
                                {"order_optimized", finite_or_null(study.order_final.at(p))},
                                {"failed_cells", failed}};
    }
    orders[spec.name] = per;
  }
  out.write_json("orders.json", {{"orders", orders}});
  if (!specs.empty() && studied == 0) return total_failure;
  return ok;
}

int cmd_decompose(const RunManifest& m, std::ostream& log) {
  const auto specs = io::load_curve_specs(m.spec_path);
  const Config config = m.config();
  Outputs out(m);
  json roots = json::array();
  int succeeded = 0, attempted = 0;
  const auto counts_json = [](const RootCounts& rc) {
    json j = {{"abs_e", rc.magnitude}, {"e_t", rc.tangential}, {"e_n", rc.normal}};
    if (rc.binormal >= 0) j["e_b"] = rc.binormal;
    return j;
  };
  for (const auto& spec : specs)
    for (int p : m.degrees) {
      const int q = m.q_for(p);
      ++attempted;
      try {
        const RootStudy rs = run_root_study(spec, p, q, config);
        const std::string base = "error_" + tag(spec.name, p, q, 1);
        {
          auto f = out.csv(base + "_initial.csv");
          io::write_error_csv(f, rs.initial_error);
        }
        {
          auto f = out.csv(base + "_optimized.csv");
          io::write_error_csv(f, rs.optimized_error);
        }
        roots.push_back({{"curve", spec.name},
                         {"p", p},
                         {"q", q},
                         {"initial", counts_json(rs.initial)},
                         {"optimized", counts_json(rs.optimized)},
                         {"report", io::to_json(rs.report)}});
        ++succeeded;
      } catch (const std::exception& ex) {
        log << "curve '" << spec.name << "' p=" << p << " failed: " << ex.what() << '\n';
        roots.push_back({{"curve", spec.name}, {"p", p}, {"q", q}, {"error", ex.what()}});
      }
    }
  out.write_json("roots.json", {{"roots", roots}});
  if (attempted > 0 && succeeded == 0) return total_failure;
  return ok;
}

int cmd_bench(const RunManifest& m, std::ostream& log) {
  const auto specs = io::load_curve_specs(m.spec_path);
  const Config config = m.config();
  Outputs out(m);
  auto csv = out.csv("timing.csv");
  csv << "mode,workers,workers_used,tasks,wall_time,serial_wall_time,total_iterations,identical\n";
  json runs = json::array();
  bool any_ok = false;

  const auto record = [&](int w, const ParallelReport& rep, bool identical) {
    csv << to_string(rep.mode) << ',' << w << ',' << rep.workers_used << ',' << rep.tasks.size() << ','
        << io::format_double(rep.wall_time) << ',' << io::format_double(rep.serial_wall_time.value_or(0.0)) << ','
        << rep.total_iterations() << ',' << (identical ? "true" : "false") << '\n';
    json j = io::to_json(rep);
    j["identical_to_serial"] = identical;
    runs.push_back(j);
  };

  if (m.mode == ParallelMode::by_curve) {
    const auto jobs = make_jobs(m, specs);
    std::optional<CurveRunResult> serial;
    for (int w : worker_counts(m.workers)) {
      CurveRunResult r = run_by_curves(jobs, config, w, w > 1);
      bool identical = true;
      if (!serial) {
        serial = r;
      } else {
        for (std::size_t i = 0; i < r.curves.size(); ++i)
          identical = identical && r.curves[i].ok == serial->curves[i].ok &&
                      bitwise_equal(r.curves[i].x, serial->curves[i].x) &&
                      bitwise_equal(r.curves[i].s, serial->curves[i].s);
      }
      for (const auto& c : r.curves) any_ok = any_ok || c.ok;
      record(w, r.report, identical);
    }
  } else {
    for (const auto& spec : specs) {
      auto curve = std::make_shared<const Curve>(spec);
      if (is_straight_line(*curve)) {
        log << "curve '" << spec.name << "' is a straight line; excluded\n";
        continue;
      }
      const int p = m.degrees.front(), R = m.elements.front();
      const MeshPair init =
          interpolate_meshes(*curve, R, p, m.q_for(p), make_partition(curve, R, m.partition, config));
      std::optional<ElementRunResult> serial;
      for (int w : worker_counts(m.workers)) {
        ElementRunResult r = run_by_elements(curve, init.x, init.s, config, w, w > 1);
        bool identical = true;
        if (!serial)
          serial = r;
        else
          identical = bitwise_equal(r.x, serial->x) && bitwise_equal(r.s, serial->s);
        any_ok = any_ok || r.report.failures() < static_cast<int>(r.report.tasks.size());
        record(w, r.report, identical);
        runs.back()["curve"] = spec.name;
      }
    }
  }
  json speedups = json::array();
  for (const auto& r : runs)
    speedups.push_back({{"workers", r["workers_requested"]},
                        {"workers_used", r["workers_used"]},
                        {"curve", r.value("curve", "")},
                        {"speedup", r["speedup"]},
                        {"identical_to_serial", r["identical_to_serial"]}});
  out.write_json("speedup.json", {{"speedup", speedups}, {"runs", runs}});
  return any_ok ? ok : total_failure;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"curvemesh: high-order curve meshes by disparity minimization", "curvemesh"};
  RunManifest m;
  std::string q_text = "auto", layout = "constrained", partition = "arclength", mode = "by_element";
  app.add_option("command", m.command, "optimize | converge | decompose | bench")
      ->required()
      ->check(CLI::IsMember({"optimize", "converge", "decompose", "bench"}));
  app.add_option("--spec", m.spec_path, "curve-spec JSON file")->required();
  app.add_option("--p", m.degrees, "physical degrees, comma separated")->delimiter(',');
  app.add_option("--q", q_text, "parametric degree or 'auto' (2p - 1)");
  app.add_option("--elements", m.elements, "element counts, comma separated")->delimiter(',');
  app.add_option("--layout", layout, "constrained | unconstrained")
      ->check(CLI::IsMember({"constrained", "unconstrained"}));
  app.add_option("--workers", m.workers, "worker threads (bench: largest count)");
  app.add_option("--out", m.out_dir, "output directory");
  app.add_option("--seed", m.seed, "recorded in the manifest");
  app.add_option("--tol", m.tol, "Newton stop: |grad P|_2 < tol");
  app.add_option("--partition", partition, "uniform | arclength | preoptimized")
      ->check(CLI::IsMember({"uniform", "arclength", "preoptimized"}));
  app.add_option("--mode", mode, "bench mode: by_element | by_curve")->check(CLI::IsMember({"by_element", "by_curve"}));

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
    if (q_text != "auto") {
      std::size_t used = 0;
      int q = 0;
      try {
        q = std::stoi(q_text, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != q_text.size()) throw CLI::ValidationError("--q", "expected an integer or 'auto'");
      m.q = q;
    }
    m.layout = layout_from_string(layout);
    m.partition = partition_from_string(partition);
    m.mode = mode == "by_curve" ? ParallelMode::by_curve : ParallelMode::by_element;
    m.validate();
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    app.exit(e, out, err);
    return usage;
  } catch (const SpecError& e) {
    err << "usage error: " << e.what() << '\n';
    return usage;
  }

  try {
    if (m.command == "optimize") return cmd_optimize(m, err);
    if (m.command == "converge") return cmd_converge(m, err);
    if (m.command == "decompose") return cmd_decompose(m, err);
    return cmd_bench(m, err);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return parse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return total_failure;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace curvemesh::cli
