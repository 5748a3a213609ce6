#pragma once

#include "curvemesh/geometry.hpp"
#include "curvemesh/mesh.hpp"
#include "curvemesh/optimizer.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace curvemesh {

enum class ParallelMode { by_curve, by_element };

std::string_view to_string(ParallelMode mode);

struct Task {
  int curve = 0;
  int element_begin = 0;
  int element_end = 0;  // exclusive
};

/// Static block distribution: worker w runs tasks [ranges[w].first, ranges[w].second).
struct WorkPlan {
  ParallelMode mode = ParallelMode::by_curve;
  std::vector<Task> tasks;
  int workers = 1;  // effective, min(requested, tasks)
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
};

WorkPlan make_plan(ParallelMode mode, std::vector<Task> tasks, int requested_workers);

/// True when every (curve, element) of the workload appears in exactly one task
/// and every task is assigned to exactly one worker.
bool partitions_exactly(const WorkPlan& plan, const std::vector<int>& elements_per_curve);

struct TaskOutcome {
  std::string label;
  bool ok = true;
  std::string error;
  OptimizeReport report;
  int worker = 0;
};

struct ParallelReport {
  ParallelMode mode = ParallelMode::by_curve;
  int workers_requested = 1;
  int workers_used = 1;
  std::vector<TaskOutcome> tasks;
  double wall_time = 0.0;
  std::optional<double> serial_wall_time;
  std::optional<double> speedup;  // serial / parallel
  std::vector<long> worker_iterations;

  long total_iterations() const;
  int failures() const;
  /// Task counts per iteration bin [k * width, (k + 1) * width).
  std::vector<int> iteration_histogram(int bin_width) const;
};

enum class PartitionStrategy { uniform, arclength, preoptimized };

std::string_view to_string(PartitionStrategy strategy);
PartitionStrategy partition_from_string(std::string_view name);

std::vector<double> make_partition(const std::shared_ptr<const Curve>& curve, int elements, PartitionStrategy strategy,
                                   const Config& config);

/// One curve's full pipeline: partition, interpolate, optimize.
struct CurveJob {
  CurveSpec spec;
  int p = 2;
  int q = 3;
  int elements = 4;
  Layout layout = Layout::constrained;
  PartitionStrategy partition = PartitionStrategy::arclength;
  NodeFamily family = NodeFamily::gauss_lobatto;
};

struct CurveOutput {
  std::string name;
  bool ok = false;
  std::string error;
  PhysicalMesh x;
  ParametricMesh s;
  OptimizeReport report;
  double norm_initial = 0.0;  // sqrt(E) of the interpolative mesh
  double norm_final = 0.0;
};

struct CurveRunResult {
  ParallelReport report;
  std::vector<CurveOutput> curves;  // job order, excluding straight lines
  std::vector<std::string> excluded;
};

/// Distributes whole curves over workers. Straight lines are dropped first.
CurveRunResult run_by_curves(const std::vector<CurveJob>& jobs, const Config& config, int workers,
                             bool measure_serial = false);

/// Runs one job on the calling thread.
CurveOutput run_curve_job(const CurveJob& job, const Config& config);

struct ElementRunResult {
  ParallelReport report;
  PhysicalMesh x;
  ParametricMesh s;
};

/// Distributes the elements of one constrained problem over workers.
ElementRunResult run_by_elements(std::shared_ptr<const Curve> curve, const PhysicalMesh& x, const ParametricMesh& s,
                                 const Config& config, int workers, bool measure_serial = false);

}  // namespace curvemesh
