#pragma once

#include "curvemesh/disparity.hpp"
#include "curvemesh/geometry.hpp"
#include "curvemesh/optimizer.hpp"
#include "curvemesh/parallel.hpp"

#include <map>
#include <vector>

namespace curvemesh {

/// Least-squares slope of log_errors against log_sizes.
double fit_slope(const std::vector<double>& log_sizes, const std::vector<double>& log_errors);

struct StudyCell {
  int p = 0;
  int q = 0;
  int elements = 0;
  double norm_initial = 0.0;
  double norm_final = 0.0;
  bool failed = false;
  OptimizeReport report;
};

struct StudyOptions {
  Layout layout = Layout::constrained;
  PartitionStrategy partition = PartitionStrategy::arclength;
  int q_override = 0;        // <= 0: q = 2p - 1
  int fit_window = 4;        // last refinements used in the fit
  double norm_floor = 1e-13; // cells below are excluded from fits
  int workers = 1;
};

struct ConvergenceStudy {
  CurveSpec curve;
  Layout layout = Layout::constrained;
  std::vector<int> degrees;
  std::vector<int> refinements;
  std::vector<StudyCell> cells;  // degree-major, refinement-minor
  std::map<int, double> order_initial;  // NaN when fewer than 3 usable cells
  std::map<int, double> order_final;
};

int default_q(int p);

ConvergenceStudy run_study(const CurveSpec& curve, const std::vector<int>& degrees, const std::vector<int>& refinements,
                           const Config& config, const StudyOptions& options = {});

/// Negated slope of log(norm) vs log(R) over the last fit_window cells, skipping
/// failed cells and norms below norm_floor; NaN when fewer than 3 remain.
double fitted_order(const std::vector<StudyCell>& cells, bool use_final, int fit_window, double norm_floor);

struct RootCounts {
  int magnitude = 0;
  int tangential = 0;
  int normal = 0;
  int binormal = -1;  // -1 in 2D
};

struct RootStudy {
  int p = 0;
  int q = 0;
  RootCounts initial;
  RootCounts optimized;
  ErrorDecomposition initial_error;
  ErrorDecomposition optimized_error;
  OptimizeReport report;
};

/// Single element over the whole curve domain, constrained optimization,
/// error decomposed on `samples` points.
RootStudy run_root_study(const CurveSpec& curve, int p, int q, const Config& config, int samples = 2000);

RootCounts count_error_roots(const ErrorDecomposition& err);

}  // namespace curvemesh
