#pragma once

#include "curvemesh/common.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace curvemesh {

enum class NodeFamily { gauss_lobatto, equispaced };

/// Points and weights on the reference interval [-1, 1].
template <typename Scalar = double>
struct QuadratureRule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> points;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

  Eigen::Index size() const { return points.size(); }
};

namespace detail {

// Legendre P_n and P_n' at x by the three-term recurrence.
template <typename Scalar>
void legendre(int n, Scalar x, Scalar& p, Scalar& dp) {
  Scalar p0 = 1, p1 = x;
  if (n == 0) {
    p = 1;
    dp = 0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const Scalar pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1);
}

}  // namespace detail

/// Gauss-Legendre rule with n points (1 <= n <= 128), exact for degree 2n-1.
template <typename Scalar = double>
QuadratureRule<Scalar> gauss_legendre(int n) {
  if (n < 1 || n > 128) throw SpecError("gauss_legendre: n must lie in [1, 128]");
  QuadratureRule<Scalar> rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar x = std::cos(pi * (i + Scalar(0.75)) / (n + Scalar(0.5)));
    Scalar p = 0, dp = 0;
    for (int it = 0; it < 100; ++it) {
      detail::legendre(n, x, p, dp);
      const Scalar dx = p / dp;
      x -= dx;
      if (std::abs(dx) < Scalar(1e-16)) break;
    }
    detail::legendre(n, x, p, dp);
    const Scalar w = 2 / ((1 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0;
  return rule;
}

/// Nodal Lagrange basis on [-1, 1] evaluated in barycentric form.
///
/// Derivatives use the nodal differentiation matrix, N_i'(xi) = sum_j D(j, i) N_j(xi),
/// which is exact because N_i' has degree p - 1.
template <typename Scalar = double>
class LagrangeBasis {
 public:
  using VectorS = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixS = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  LagrangeBasis() = default;

  LagrangeBasis(int degree, NodeFamily family) : degree_(degree), family_(family) {
    if (degree < 1) throw SpecError("LagrangeBasis: degree must be >= 1");
    nodes_ = make_nodes(degree, family);
    const int n = degree + 1;
    bary_.resize(n);
    for (int i = 0; i < n; ++i) {
      Scalar w = 1;
      for (int j = 0; j < n; ++j)
        if (j != i) w *= nodes_[i] - nodes_[j];
      bary_[i] = 1 / w;
    }
    diff_ = MatrixS::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      Scalar diag = 0;
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        diff_(j, i) = (bary_[i] / bary_[j]) / (nodes_[j] - nodes_[i]);
        diag -= diff_(j, i);
      }
      diff_(j, j) = diag;
    }
  }

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }
  NodeFamily family() const { return family_; }
  const VectorS& nodes() const { return nodes_; }

  /// Row j, column i holds N_i'(node_j).
  const MatrixS& differentiation_matrix() const { return diff_; }

  VectorS values(Scalar xi) const {
    const int n = size();
    VectorS out(n);
    Scalar denom = 0;
    for (int i = 0; i < n; ++i) {
      const Scalar dx = xi - nodes_[i];
      if (dx == Scalar(0)) {
        out.setZero();
        out[i] = 1;
        return out;
      }
      out[i] = bary_[i] / dx;
      denom += out[i];
    }
    return out / denom;
  }

  VectorS derivatives(Scalar xi) const { return diff_.transpose() * values(xi); }

  /// Gauss-Lobatto nodes are -1, +1 and the roots of P_p'.
  static VectorS make_nodes(int degree, NodeFamily family) {
    VectorS x(degree + 1);
    if (family == NodeFamily::equispaced || degree == 1) {
      for (int i = 0; i <= degree; ++i) x[i] = Scalar(-1) + Scalar(2) * i / degree;
      return x;
    }
    const Scalar pi = std::numbers::pi_v<Scalar>;
    x[0] = -1;
    x[degree] = 1;
    for (int i = 1; i < degree; ++i) {
      Scalar r = -std::cos(pi * i / degree);
      for (int it = 0; it < 100; ++it) {
        // Newton on P_p'(r) using P_p''(r) = (2 r P_p' - p (p + 1) P_p) / (1 - r^2).
        Scalar p = 0, dp = 0;
        detail::legendre(degree, r, p, dp);
        const Scalar ddp = (2 * r * dp - degree * (degree + 1) * p) / (1 - r * r);
        const Scalar dr = dp / ddp;
        r -= dr;
        if (std::abs(dr) < Scalar(1e-16)) break;
      }
      x[i] = r;
    }
    for (int i = 0; i < (degree + 1) / 2; ++i) {
      const Scalar sym = (x[degree - i] - x[i]) / 2;
      x[i] = -sym;
      x[degree - i] = sym;
    }
    if (degree % 2 == 0) x[degree / 2] = 0;
    return x;
  }

 private:
  int degree_ = 0;
  NodeFamily family_ = NodeFamily::gauss_lobatto;
  VectorS nodes_;
  VectorS bary_;
  MatrixS diff_;
};

inline LagrangeBasis<double> make_basis(int degree, NodeFamily family = NodeFamily::gauss_lobatto) {
  return LagrangeBasis<double>(degree, family);
}

}  // namespace curvemesh
