#pragma once

#include "curvemesh/common.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace curvemesh {

enum class CurveKind { circle, semicircle, spiral, sphere_arc, naca4, bspline };

std::string_view to_string(CurveKind kind);
CurveKind curve_kind_from_string(std::string_view name);

/// Declarative description of a target curve a : [t_lo, t_hi] -> R^n.
///
/// Analytic kinds read optional `params`:
///   circle, semicircle : [radius = 1, cx = 0, cy = 0]
///   spiral             : [outer_radius = 1, turns = 3]     (r = c * theta)
///   sphere_arc         : [radius = 1]
///   naca4              : [digits = 12, chord = 1]           (12 -> "0012")
/// An empty domain selects the kind's natural interval.
struct CurveSpec {
  std::string name;
  CurveKind kind = CurveKind::circle;
  std::vector<double> params;
  std::optional<std::pair<double, double>> domain;
  Matrix control_points;  // m x n, bspline only
  std::vector<double> knots;
  int degree = 0;
};

/// a(t), a'(t), a''(t) at one parameter value.
struct CurvePoint {
  Point value;
  Point d1;
  Point d2;
};

class Curve {
 public:
  static constexpr double kDomainSlack = 1e-14;

  explicit Curve(CurveSpec spec);

  const CurveSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  CurveKind kind() const { return spec_.kind; }
  int dim() const { return dim_; }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }

  /// Throws DomainError beyond the slack; values inside the slack are clamped.
  CurvePoint evaluate(double t) const;

  Point eval(double t) const { return evaluate(t).value; }
  Point eval_d1(double t) const { return evaluate(t).d1; }
  Point eval_d2(double t) const { return evaluate(t).d2; }

 private:
  CurvePoint evaluate_analytic(double t) const;
  CurvePoint evaluate_bspline(double t) const;

  CurveSpec spec_;
  int dim_ = 2;
  double t_lo_ = 0;
  double t_hi_ = 1;
  std::vector<double> p_;  // resolved parameters
};

inline Point eval(const Curve& c, double t) { return c.eval(t); }
inline Point eval_d1(const Curve& c, double t) { return c.eval_d1(t); }
inline Point eval_d2(const Curve& c, double t) { return c.eval_d2(t); }

/// Orthonormal moving frame; binormal is empty for planar curves.
struct FrenetFrame {
  Point tangent;
  Point normal;
  Point binormal;
};

/// 2D: normal is the tangent rotated by +90 degrees.
/// 3D: normal is the normalized part of a'' orthogonal to the tangent.
FrenetFrame frenet(const Curve& curve, double t);
FrenetFrame frenet(const CurvePoint& point);

/// Integral of |a'| over [t0, t1], adaptive Gauss-Legendre, relative tolerance 1e-10.
double arc_length(const Curve& curve, double t0, double t1);

/// True for B-splines whose control polygon is collinear.
bool is_straight_line(const Curve& curve);

}  // namespace curvemesh
