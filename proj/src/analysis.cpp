#include "curvemesh/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace curvemesh {

double fit_slope(const std::vector<double>& log_sizes, const std::vector<double>& log_errors) {
  if (log_sizes.size() != log_errors.size()) throw SpecError("fit_slope: size mismatch");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < log_sizes.size(); ++i)
    if (std::isfinite(log_sizes[i]) && std::isfinite(log_errors[i])) pts.emplace_back(log_sizes[i], log_errors[i]);
  if (pts.size() < 2) throw SpecError("fit_slope: fewer than 2 finite points");
  double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0, sxx = 0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  if (sxx == 0) throw SpecError("fit_slope: sizes are all equal");
  return sxy / sxx;
}

int default_q(int p) { return std::max(1, 2 * p - 1); }

double fitted_order(const std::vector<StudyCell>& cells, bool use_final, int fit_window, double norm_floor) {
  // The window is taken over refinements first; exclusions only shrink it.
  const std::size_t first =
      fit_window > 0 && cells.size() > static_cast<std::size_t>(fit_window) ? cells.size() - fit_window : 0;
  std::vector<const StudyCell*> usable;
  for (std::size_t i = first; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const double v = use_final ? c.norm_final : c.norm_initial;
    if (use_final && c.failed) continue;
    if (!(v >= norm_floor) || !std::isfinite(v)) continue;
    usable.push_back(&c);
  }
  if (usable.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> lx, ly;
  for (const auto* c : usable) {
    lx.push_back(std::log(static_cast<double>(c->elements)));
    ly.push_back(std::log(use_final ? c->norm_final : c->norm_initial));
  }
  return -fit_slope(lx, ly);
}

ConvergenceStudy run_study(const CurveSpec& curve, const std::vector<int>& degrees, const std::vector<int>& refinements,
                           const Config& config, const StudyOptions& options) {
  if (degrees.empty() || refinements.empty()) throw SpecError("run_study: empty degree or refinement list");
  for (std::size_t i = 1; i < refinements.size(); ++i)
    if (refinements[i] <= refinements[i - 1]) throw SpecError("run_study: refinements must be strictly increasing");

  ConvergenceStudy study;
  study.curve = curve;
  study.layout = options.layout;
  study.degrees = degrees;
  study.refinements = refinements;

  std::vector<CurveJob> jobs;
  for (int p : degrees)
    for (int R : refinements) {
      CurveJob job;
      job.spec = curve;
      job.p = p;
      job.q = options.q_override > 0 ? options.q_override : default_q(p);
      job.elements = R;
      job.layout = options.layout;
      job.partition = options.partition;
      jobs.push_back(job);
      study.cells.push_back({p, job.q, R, 0.0, 0.0, false, {}});
    }
  const CurveRunResult run = run_by_curves(jobs, config, options.workers);
  if (!run.excluded.empty()) throw SpecError("run_study: curve is a straight line");
  for (std::size_t i = 0; i < study.cells.size(); ++i) {
    auto& cell = study.cells[i];
    const auto& out = run.curves[i];
    cell.norm_initial = out.norm_initial;
    cell.norm_final = out.norm_final;
    cell.report = out.report;
    cell.failed = !out.ok || !out.report.converged;
  }
  for (int p : degrees) {
    std::vector<StudyCell> row;
    for (const auto& c : study.cells)
      if (c.p == p) row.push_back(c);
    study.order_initial[p] = fitted_order(row, false, options.fit_window, options.norm_floor);
    study.order_final[p] = fitted_order(row, true, options.fit_window, options.norm_floor);
  }
  return study;
}

RootCounts count_error_roots(const ErrorDecomposition& err) {
  RootCounts rc;
  rc.magnitude = count_touch_zeros(err.magnitude);
  rc.tangential = count_roots(err.tangential);
  rc.normal = count_roots(err.normal);
  if (!err.binormal.empty()) rc.binormal = count_roots(err.binormal);
  return rc;
}

RootStudy run_root_study(const CurveSpec& spec, int p, int q, const Config& config, int samples) {
  auto curve = std::make_shared<const Curve>(spec);
  MeshPair m = interpolate_meshes(*curve, 1, p, q, {curve->t_lo(), curve->t_hi()});
  RootStudy rs;
  rs.p = p;
  rs.q = q;
  rs.initial_error = decompose_error(*curve, m.x, m.s, samples);
  rs.initial = count_error_roots(rs.initial_error);
  OptimizeResult r = optimize(curve, m.x, m.s, Layout::constrained, config);
  rs.report = r.report;
  rs.optimized_error = decompose_error(*curve, r.x, r.s, samples);
  rs.optimized = count_error_roots(rs.optimized_error);
  return rs;
}

}  // namespace curvemesh
