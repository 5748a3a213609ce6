#include "curvemesh/parallel.hpp"

#include "curvemesh/disparity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace curvemesh {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs fn(task_index, worker) over the plan; worker 0 is the calling thread.
template <typename Fn>
void execute(const WorkPlan& plan, Fn&& fn) {
  const auto run_range = [&](int w) {
    for (std::size_t t = plan.ranges[w].first; t < plan.ranges[w].second; ++t) fn(t, w);
  };
  if (plan.workers <= 1) {
    if (!plan.ranges.empty()) run_range(0);
    return;
  }
  std::vector<std::jthread> threads;
  threads.reserve(plan.workers - 1);
  for (int w = 1; w < plan.workers; ++w) threads.emplace_back(run_range, w);
  run_range(0);
}

void finish_report(ParallelReport& rep) {
  rep.worker_iterations.assign(rep.workers_used, 0);
  for (const auto& t : rep.tasks) rep.worker_iterations[t.worker] += t.report.iterations;
  if (rep.serial_wall_time && rep.wall_time > 0) rep.speedup = *rep.serial_wall_time / rep.wall_time;
}

}  // namespace

std::string_view to_string(ParallelMode mode) { return mode == ParallelMode::by_curve ? "by_curve" : "by_element"; }

WorkPlan make_plan(ParallelMode mode, std::vector<Task> tasks, int requested_workers) {
  if (requested_workers < 1) throw SpecError("make_plan: workers must be >= 1");
  WorkPlan plan;
  plan.mode = mode;
  plan.tasks = std::move(tasks);
  const std::size_t n = plan.tasks.size();
  plan.workers = static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(requested_workers, n)));
  plan.ranges.resize(plan.workers);
  for (int w = 0; w < plan.workers; ++w)
    plan.ranges[w] = {n * w / plan.workers, n * (w + 1) / plan.workers};
  return plan;
}

bool partitions_exactly(const WorkPlan& plan, const std::vector<int>& elements_per_curve) {
  std::vector<std::vector<int>> seen(elements_per_curve.size());
  for (std::size_t c = 0; c < seen.size(); ++c) seen[c].assign(elements_per_curve[c], 0);
  for (const Task& t : plan.tasks) {
    if (t.curve < 0 || t.curve >= static_cast<int>(seen.size())) return false;
    if (t.element_begin < 0 || t.element_end > elements_per_curve[t.curve] || t.element_begin >= t.element_end)
      return false;
    for (int e = t.element_begin; e < t.element_end; ++e) ++seen[t.curve][e];
  }
  for (const auto& c : seen)
    for (int v : c)
      if (v != 1) return false;
  std::size_t expect = 0;
  for (const auto& [lo, hi] : plan.ranges) {
    if (lo != expect || hi < lo) return false;
    expect = hi;
  }
  return expect == plan.tasks.size();
}

long ParallelReport::total_iterations() const {
  long sum = 0;
  for (const auto& t : tasks) sum += t.report.iterations;
  return sum;
}

int ParallelReport::failures() const {
  return static_cast<int>(std::count_if(tasks.begin(), tasks.end(), [](const TaskOutcome& t) { return !t.ok; }));
}

std::vector<int> ParallelReport::iteration_histogram(int bin_width) const {
  if (bin_width < 1) throw SpecError("iteration_histogram: bin width must be >= 1");
  std::vector<int> bins;
  for (const auto& t : tasks) {
    const auto b = static_cast<std::size_t>(t.report.iterations / bin_width);
    if (bins.size() <= b) bins.resize(b + 1, 0);
    ++bins[b];
  }
  return bins;
}

std::string_view to_string(PartitionStrategy strategy) {
  switch (strategy) {
    case PartitionStrategy::uniform: return "uniform";
    case PartitionStrategy::arclength: return "arclength";
    case PartitionStrategy::preoptimized: return "preoptimized";
  }
  return "unknown";
}

PartitionStrategy partition_from_string(std::string_view name) {
  for (auto s : {PartitionStrategy::uniform, PartitionStrategy::arclength, PartitionStrategy::preoptimized})
    if (to_string(s) == name) return s;
  throw SpecError("unknown partition strategy '" + std::string(name) + "'");
}

std::vector<double> make_partition(const std::shared_ptr<const Curve>& curve, int elements, PartitionStrategy strategy,
                                   const Config& config) {
  switch (strategy) {
    case PartitionStrategy::uniform: return uniform_partition(*curve, elements);
    case PartitionStrategy::arclength: return arclength_partition(*curve, elements);
    case PartitionStrategy::preoptimized:
      return preoptimize_linear(curve, elements, config, arclength_partition(*curve, elements));
  }
  return uniform_partition(*curve, elements);
}

CurveOutput run_curve_job(const CurveJob& job, const Config& config) {
  CurveOutput out;
  out.name = job.spec.name;
  try {
    auto curve = std::make_shared<const Curve>(job.spec);
    const auto partition = make_partition(curve, job.elements, job.partition, config);
    MeshPair m = interpolate_meshes(*curve, job.elements, job.p, job.q, partition, job.family);
    {
      const Problem pb = make_problem(curve, m.x, m.s, job.layout, 0.0, config.quadrature_points);
      out.norm_initial = std::sqrt(energy(pb));
    }
    OptimizeResult r = optimize(curve, m.x, m.s, job.layout, config);
    out.x = std::move(r.x);
    out.s = std::move(r.s);
    out.report = r.report;
    out.norm_final = std::sqrt(std::max(0.0, r.report.E_final));
    out.ok = true;
  } catch (const std::exception& ex) {
    out.ok = false;
    out.error = ex.what();
  }
  return out;
}

CurveRunResult run_by_curves(const std::vector<CurveJob>& jobs, const Config& config, int workers,
                             bool measure_serial) {
  CurveRunResult res;
  std::vector<const CurveJob*> active;
  for (const auto& job : jobs) {
    bool straight = false;
    try {
      straight = is_straight_line(Curve(job.spec));
    } catch (const std::exception&) {
      // Invalid specs fail inside their task and are reported there.
    }
    if (straight)
      res.excluded.push_back(job.spec.name);
    else
      active.push_back(&job);
  }

  std::vector<Task> tasks;
  for (std::size_t i = 0; i < active.size(); ++i) tasks.push_back({static_cast<int>(i), 0, active[i]->elements});
  const WorkPlan plan = make_plan(ParallelMode::by_curve, tasks, workers);

  auto& rep = res.report;
  rep.mode = ParallelMode::by_curve;
  rep.workers_requested = workers;
  rep.workers_used = plan.workers;

  if (measure_serial) {
    const auto t0 = Clock::now();
    for (const auto* job : active) (void)run_curve_job(*job, config);
    rep.serial_wall_time = seconds_since(t0);
  }

  res.curves.resize(active.size());
  rep.tasks.resize(active.size());
  const auto t0 = Clock::now();
  execute(plan, [&](std::size_t t, int w) {
    res.curves[t] = run_curve_job(*active[t], config);
    rep.tasks[t].worker = w;
  });
  rep.wall_time = seconds_since(t0);

  for (std::size_t t = 0; t < active.size(); ++t) {
    auto& task = rep.tasks[t];
    task.label = res.curves[t].name;
    task.ok = res.curves[t].ok;
    task.error = res.curves[t].error;
    task.report = res.curves[t].report;
  }
  finish_report(rep);
  return res;
}

ElementRunResult run_by_elements(std::shared_ptr<const Curve> curve, const PhysicalMesh& x, const ParametricMesh& s,
                                 const Config& config, int workers, bool measure_serial) {
  if (x.elements() != s.elements()) throw SpecError("run_by_elements: element counts differ");
  const int R = x.elements();
  std::vector<Task> tasks;
  for (int e = 0; e < R; ++e) tasks.push_back({0, e, e + 1});
  const WorkPlan plan = make_plan(ParallelMode::by_element, tasks, workers);

  ElementRunResult res{{}, x, s};
  auto& rep = res.report;
  rep.mode = ParallelMode::by_element;
  rep.workers_requested = workers;
  rep.workers_used = plan.workers;

  if (measure_serial) {
    const auto t0 = Clock::now();
    for (int e = 0; e < R; ++e) {
      try {
        (void)optimize_element(curve, x, s, e, config);
      } catch (const std::exception&) {
      }
    }
    rep.serial_wall_time = seconds_since(t0);
  }

  std::vector<std::optional<OptimizeResult>> results(R);
  rep.tasks.resize(R);
  const auto t0 = Clock::now();
  execute(plan, [&](std::size_t t, int w) {
    auto& task = rep.tasks[t];
    task.worker = w;
    task.label = "element " + std::to_string(t);
    try {
      results[t] = optimize_element(curve, x, s, static_cast<int>(t), config);
      task.report = results[t]->report;
    } catch (const std::exception& ex) {
      task.ok = false;
      task.error = ex.what();
    }
  });
  rep.wall_time = seconds_since(t0);

  // Merge in element order; failed elements keep their input nodes.
  for (int e = 0; e < R; ++e)
    if (results[e]) insert_element(MeshPair{results[e]->x, results[e]->s}, e, res.x, res.s);
  finish_report(rep);
  return res;
}

}  // namespace curvemesh
