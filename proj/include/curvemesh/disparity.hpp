#pragma once

#include "curvemesh/common.hpp"
#include "curvemesh/geometry.hpp"
#include "curvemesh/mesh.hpp"
#include "curvemesh/quadrature.hpp"

#include <memory>
#include <vector>

namespace curvemesh {

/// Basis values tabulated at the quadrature points; rows are quadrature points.
struct ElementTables {
  Matrix x_values, x_derivs;  // nq x (p + 1)
  Matrix s_values, s_derivs;  // nq x (q + 1)
  LagrangeBasis<> x_basis, s_basis;
};

ElementTables tabulate(const PhysicalMesh& x, const ParametricMesh& s, const QuadratureRule<>& quadrature);

/// Disparity problem: E(x, s) = sum_e int |x - a(s)|^2 |x'| dxi and the
/// barrier-penalized P = E - mu * int log(sigma_dir s') dxi over the free DOFs.
struct Problem {
  std::shared_ptr<const Curve> curve;
  PhysicalMesh x;
  ParametricMesh s;
  DofLayout layout;
  double mu = 0.0;
  QuadratureRule<> quadrature;
  ElementTables tables;
};

/// quadrature_points <= 0 selects default_quadrature_points(p, q).
Problem make_problem(std::shared_ptr<const Curve> curve, PhysicalMesh x, ParametricMesh s, Layout layout,
                     double mu = 0.0, int quadrature_points = 0);

enum class EvalLevel { value, gradient, hessian };

struct DisparityEval {
  double energy = 0.0;
  double barrier = 0.0;  // int log(sigma_dir s'), only when mu > 0
  double value = 0.0;    // energy - mu * barrier
  Vector grad;
  SparseMatrix hess;
  double grad_norm = 0.0;
};

/// Value, gradient and Hessian of P over the free DOFs.
///
/// Throws DegenerateError when |x'| < 1e-14 at a quadrature point and
/// InvalidParametrization when mu > 0 and sigma_dir s' <= 0 at a quadrature point.
DisparityEval evaluate(const Problem& problem, EvalLevel level);

double energy(const Problem& problem);
Vector gradient(const Problem& problem);
SparseMatrix hessian(const Problem& problem);
/// int log(sigma_dir s') over the reference mesh by the problem's quadrature.
double barrier_value(const Problem& problem);
/// sqrt(E), the sigma-norm of x - a(s).
inline double sigma_norm(const Problem& problem) { return std::sqrt(energy(problem)); }

/// sign(s') == direction at `oversample` equispaced points per element and at
/// every quadrature point.
bool check_validity(const ParametricMesh& s, int oversample, const QuadratureRule<>& quadrature);
bool check_validity(const ParametricMesh& s, int oversample);

struct ErrorDecomposition {
  std::vector<double> xi_global;  // element index + (xi + 1) / 2
  std::vector<double> magnitude;
  std::vector<double> tangential;
  std::vector<double> normal;
  std::vector<double> binormal;  // empty in 2D
};

/// e = x(xi) - a(s(xi)) projected on the Frenet frame at a(s(xi)).
ErrorDecomposition decompose_error(const Curve& curve, const PhysicalMesh& x, const ParametricMesh& s,
                                   int samples_per_element);

/// Sign changes among samples outside the zero band, plus one root for each
/// endpoint sample inside the band.
int count_roots(const std::vector<double>& samples, double zero_band);
/// zero_band = 1e-3 * max |samples|.
int count_roots(const std::vector<double>& samples);

/// Zeros of a nonnegative sequence such as |e|: local minima (endpoints
/// included) no larger than zero_band.
int count_touch_zeros(const std::vector<double>& samples, double zero_band);
/// zero_band = 1e-2 * max |samples|.
int count_touch_zeros(const std::vector<double>& samples);

}  // namespace curvemesh
