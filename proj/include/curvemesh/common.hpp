#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace curvemesh {

// Points live in R^2 or R^3; the fixed upper bound keeps them off the heap.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Malformed input: bad degrees, knot vectors, partitions, configs.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Curve evaluated outside its parameter domain.
class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Geometric degeneracy: vanishing tangent, curvature, or element Jacobian.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// sigma_dir * s' <= 0 where the log barrier must be evaluated.
class InvalidParametrization : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file could not be parsed.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace curvemesh
