#pragma once

#include "curvemesh/common.hpp"
#include "curvemesh/disparity.hpp"
#include "curvemesh/geometry.hpp"
#include "curvemesh/mesh.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace curvemesh {

struct Config {
  double tol = 1e-12;           // stop when ||grad P||_2 < tol
  int max_iterations = 200;     // inner Newton iterations per barrier pass
  int barrier_passes = 6;       // outer passes
  double mu_shrink = 1e-2;      // mu *= mu_shrink entering each pass
  double sigma1 = 1e-4;         // sufficient decrease
  double sigma2 = 0.9;          // curvature (measured only)
  double eta = 1.0;             // Zhang-Hager memory
  int max_halvings = 50;
  int oversample = 0;           // <= 0 selects 10 (q + 1)
  int quadrature_points = 0;    // <= 0 selects default_quadrature_points(p, q)
  bool log_barrier = true;      // false: never check s', diagnostic only

  void validate() const;
  int oversample_for(int q) const { return oversample > 0 ? oversample : 10 * (q + 1); }
};

/// Zhang-Hager reference value C and weight Q.
struct LineSearchState {
  double C = 0.0;
  double Q = 1.0;

  static LineSearchState start(double value) { return {value, 1.0}; }
};

/// Q' = eta Q + 1, C' = (eta Q C + value) / Q'.
LineSearchState zh_update(const LineSearchState& state, double eta, double value);

/// Newton step when it descends, then -diag(|H|)^-1 g with a 1e-12 floor, then -g.
Vector descent_direction(const Vector& grad, const SparseMatrix& hess);
Vector descent_direction(const Vector& grad, const Matrix& hess);

struct LineSearchResult {
  bool accepted = false;
  double alpha = 0.0;
  Vector iterate;      // unchanged input when rejected
  double value = 0.0;  // objective at `iterate`
  int halvings = 0;
  int trials = 0;
};

/// Backtracking from alpha = 1, halving until
///   f(z + alpha d) <= C + sigma1 alpha grad . d.
/// Non-finite objective values count as rejections.
LineSearchResult line_search(const std::function<double(const Vector&)>& objective, const Vector& iterate,
                             const Vector& grad, const Vector& direction, const LineSearchState& state,
                             const Config& config);

struct OptimizeReport {
  bool converged = false;
  bool line_search_failed = false;
  int iterations = 0;
  int line_search_count = 0;
  int barrier_activations = 0;
  int curvature_violations = 0;
  int passes = 0;
  double E_initial = 0.0;
  double E_final = 0.0;
  double grad_norm_final = 0.0;
  double mu_final = 0.0;
  double wall_time = 0.0;
  std::string message;
};

struct OptimizeResult {
  PhysicalMesh x;
  ParametricMesh s;
  OptimizeReport report;
};

/// Globalized Newton with Zhang-Hager backtracking inside a log-barrier
/// continuation. The barrier stays off (mu = 0) until an accepted step flips
/// the sign of s'; the step is then reverted, mu is set to the current E and
/// every remaining pass shrinks it by mu_shrink.
OptimizeResult optimize(std::shared_ptr<const Curve> curve, const PhysicalMesh& x, const ParametricMesh& s,
                        Layout layout, const Config& config = {});

struct PerElementResult {
  PhysicalMesh x;
  ParametricMesh s;
  std::vector<OptimizeReport> reports;
};

/// Constrained problem solved element by element with frozen interfaces.
PerElementResult optimize_constrained_per_element(std::shared_ptr<const Curve> curve, const PhysicalMesh& x,
                                                  const ParametricMesh& s, const Config& config = {});

/// Optimize one element of a constrained problem; shared by the serial and
/// parallel element drivers.
OptimizeResult optimize_element(std::shared_ptr<const Curve> curve, const PhysicalMesh& x, const ParametricMesh& s,
                                int element, const Config& config);

/// Element distribution from the unconstrained linear (p = q = 1) optimum,
/// started from `initial` (uniform when empty).
std::vector<double> preoptimize_linear(std::shared_ptr<const Curve> curve, int elements, const Config& config = {},
                                       std::vector<double> initial = {});

}  // namespace curvemesh
