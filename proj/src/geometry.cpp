#include "curvemesh/geometry.hpp"

#include "curvemesh/jet.hpp"
#include "curvemesh/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

namespace curvemesh {

namespace {

constexpr double kPi = std::numbers::pi;

using J = Jet<double>;

inline double value_of(double x) { return x; }
inline double value_of(const J& x) { return x.v; }

double param_or(const std::vector<double>& p, std::size_t i, double fallback) {
  return i < p.size() ? p[i] : fallback;
}

template <typename S>
std::array<S, 3> circle_formula(const S& t, double r, double cx, double cy) {
  using std::cos;
  using std::sin;
  return {S(cx) + S(r) * cos(t), S(cy) + S(r) * sin(t), S(0)};
}

template <typename S>
std::array<S, 3> spiral_formula(const S& t, double c) {
  using std::cos;
  using std::sin;
  return {S(c) * t * cos(t), S(c) * t * sin(t), S(0)};
}

template <typename S>
std::array<S, 3> sphere_arc_formula(const S& t, double r) {
  using std::cos;
  using std::sin;
  const S quarter = t * S(0.25);
  const S ring = cos(quarter);
  return {S(r) * cos(t) * ring, S(r) * sin(t) * ring, S(r) * sin(quarter)};
}

// NACA 4-digit airfoil with closed trailing edge, x = u^2 so that the sqrt(x)
// thickness term becomes the smooth odd term 0.2969 u. u < 0 is the lower
// surface, u > 0 the upper one; the curve is C1 at the leading edge.
template <typename S>
std::array<S, 3> naca4_formula(const S& u, double m, double pos, double thick, double chord) {
  using std::sqrt;
  const double sgn = value_of(u) < 0 ? -1.0 : 1.0;
  const S x = u * u;
  const S x2 = x * x;
  const S x3 = x2 * x;
  const S x4 = x2 * x2;
  const S ys = S(5 * thick) * (S(0.2969) * u - S(sgn) * (S(0.1260) * x + S(0.3516) * x2 - S(0.2843) * x3 + S(0.1036) * x4));
  S px = x;
  S py = ys;
  if (m > 0) {
    S yc, slope;
    if (value_of(x) < pos) {
      const double k = m / (pos * pos);
      yc = S(k) * (S(2 * pos) * x - x * x);
      slope = S(2 * k) * (S(pos) - x);
    } else {
      const double k = m / ((1 - pos) * (1 - pos));
      yc = S(k) * (S(1 - 2 * pos) + S(2 * pos) * x - x * x);
      slope = S(2 * k) * (S(pos) - x);
    }
    const S cth = S(1) / sqrt(S(1) + slope * slope);
    const S sth = slope * cth;
    px = x - ys * sth;
    py = yc + ys * cth;
  }
  return {S(chord) * px, S(chord) * py, S(0)};
}

CurvePoint from_jets(const std::array<J, 3>& c, int dim) {
  CurvePoint out{Point(dim), Point(dim), Point(dim)};
  for (int i = 0; i < dim; ++i) {
    out.value[i] = c[i].v;
    out.d1[i] = c[i].d;
    out.d2[i] = c[i].dd;
  }
  return out;
}

}  // namespace

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::circle: return "circle";
    case CurveKind::semicircle: return "semicircle";
    case CurveKind::spiral: return "spiral";
    case CurveKind::sphere_arc: return "sphere_arc";
    case CurveKind::naca4: return "naca4";
    case CurveKind::bspline: return "bspline";
  }
  return "unknown";
}

CurveKind curve_kind_from_string(std::string_view name) {
  for (auto k : {CurveKind::circle, CurveKind::semicircle, CurveKind::spiral, CurveKind::sphere_arc,
                 CurveKind::naca4, CurveKind::bspline})
    if (to_string(k) == name) return k;
  throw SpecError("unknown curve kind '" + std::string(name) + "'");
}

Curve::Curve(CurveSpec spec) : spec_(std::move(spec)) {
  const auto& p = spec_.params;
  std::pair<double, double> natural{0.0, 1.0};
  switch (spec_.kind) {
    case CurveKind::circle:
    case CurveKind::semicircle: {
      p_ = {param_or(p, 0, 1.0), param_or(p, 1, 0.0), param_or(p, 2, 0.0)};
      if (!(p_[0] > 0)) throw SpecError(spec_.name + ": radius must be positive");
      natural = {0.0, spec_.kind == CurveKind::circle ? 2 * kPi : kPi};
      dim_ = 2;
      break;
    }
    case CurveKind::spiral: {
      const double outer = param_or(p, 0, 1.0);
      const double turns = param_or(p, 1, 3.0);
      if (!(outer > 0) || !(turns > 0)) throw SpecError(spec_.name + ": spiral parameters must be positive");
      const double theta_max = 2 * kPi * turns;
      p_ = {outer / theta_max};
      natural = {0.0, theta_max};
      dim_ = 2;
      break;
    }
    case CurveKind::sphere_arc: {
      p_ = {param_or(p, 0, 1.0)};
      if (!(p_[0] > 0)) throw SpecError(spec_.name + ": radius must be positive");
      natural = {0.0, kPi};
      dim_ = 3;
      break;
    }
    case CurveKind::naca4: {
      const double digits = param_or(p, 0, 12.0);
      const double chord = param_or(p, 1, 1.0);
      const int d = static_cast<int>(std::lround(digits));
      if (d < 1 || d > 9999 || std::abs(digits - d) > 1e-9 || !(chord > 0))
        throw SpecError(spec_.name + ": naca4 expects integer digits in [1, 9999] and a positive chord");
      const double m = (d / 1000) / 100.0;
      const double pos = ((d / 100) % 10) / 10.0;
      const double thick = (d % 100) / 100.0;
      if (m > 0 && (pos <= 0 || pos >= 1)) throw SpecError(spec_.name + ": cambered naca4 needs camber position in (0, 1)");
      if (thick <= 0) throw SpecError(spec_.name + ": naca4 thickness must be positive");
      p_ = {m, pos, thick, chord};
      natural = {-1.0, 1.0};
      dim_ = 2;
      break;
    }
    case CurveKind::bspline: {
      const auto m = spec_.control_points.rows();
      const int k = spec_.degree;
      dim_ = static_cast<int>(spec_.control_points.cols());
      if (dim_ != 2 && dim_ != 3) throw SpecError(spec_.name + ": control points must have dimension 2 or 3");
      if (k < 1) throw SpecError(spec_.name + ": bspline degree must be >= 1");
      if (m < k + 1) throw SpecError(spec_.name + ": bspline needs at least degree + 1 control points");
      if (static_cast<Eigen::Index>(spec_.knots.size()) != m + k + 1)
        throw SpecError(spec_.name + ": knot vector length must equal control points + degree + 1");
      if (!std::is_sorted(spec_.knots.begin(), spec_.knots.end()))
        throw SpecError(spec_.name + ": knot vector must be nondecreasing");
      natural = {spec_.knots[k], spec_.knots[m]};
      if (!(natural.first < natural.second)) throw SpecError(spec_.name + ": degenerate knot span");
      break;
    }
  }
  const auto dom = spec_.domain.value_or(natural);
  t_lo_ = dom.first;
  t_hi_ = dom.second;
  if (!(t_lo_ < t_hi_)) throw SpecError(spec_.name + ": domain requires t_lo < t_hi");
  if (spec_.kind == CurveKind::bspline && (t_lo_ < natural.first || t_hi_ > natural.second))
    throw SpecError(spec_.name + ": domain exceeds the knot span");
}

CurvePoint Curve::evaluate(double t) const {
  if (t < t_lo_ - kDomainSlack || t > t_hi_ + kDomainSlack || std::isnan(t))
    throw DomainError(spec_.name + ": parameter " + std::to_string(t) + " outside domain");
  t = std::clamp(t, t_lo_, t_hi_);
  return spec_.kind == CurveKind::bspline ? evaluate_bspline(t) : evaluate_analytic(t);
}

CurvePoint Curve::evaluate_analytic(double t) const {
  const J tj = J::variable(t);
  switch (spec_.kind) {
    case CurveKind::circle:
    case CurveKind::semicircle: return from_jets(circle_formula(tj, p_[0], p_[1], p_[2]), 2);
    case CurveKind::spiral: return from_jets(spiral_formula(tj, p_[0]), 2);
    case CurveKind::sphere_arc: return from_jets(sphere_arc_formula(tj, p_[0]), 3);
    case CurveKind::naca4: return from_jets(naca4_formula(tj, p_[0], p_[1], p_[2], p_[3]), 2);
    case CurveKind::bspline: break;
  }
  return evaluate_bspline(t);
}

// Cox-de Boor basis functions and their first two derivatives on the span
// containing t, followed by the control-point sum.
CurvePoint Curve::evaluate_bspline(double t) const {
  const auto& U = spec_.knots;
  const int k = spec_.degree;
  const int m = static_cast<int>(spec_.control_points.rows());

  int span;
  if (t >= U[m]) {
    span = m - 1;
    while (span > k && U[span] == U[span + 1]) --span;
  } else {
    span = static_cast<int>(std::upper_bound(U.begin() + k, U.begin() + m + 1, t) - U.begin()) - 1;
  }

  const int nd = std::min(2, k);
  Matrix ndu(k + 1, k + 1);
  std::vector<double> left(k + 1), right(k + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= k; ++j) {
    left[j] = t - U[span + 1 - j];
    right[j] = U[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }

  Matrix ders = Matrix::Zero(3, k + 1);
  for (int j = 0; j <= k; ++j) ders(0, j) = ndu(j, k);
  Matrix a(2, k + 1);
  for (int r = 0; r <= k; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int d = 1; d <= nd; ++d) {
      double acc = 0.0;
      const int rk = r - d, pk = k - d;
      if (r >= d) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        acc = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? d - 1 : k - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        acc += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, d) = -a(s1, d - 1) / ndu(pk + 1, r);
        acc += a(s2, d) * ndu(r, pk);
      }
      ders(d, r) = acc;
      std::swap(s1, s2);
    }
  }
  double scale = k;
  for (int d = 1; d <= nd; ++d) {
    ders.row(d) *= scale;
    scale *= (k - d);
  }

  CurvePoint out{Point::Zero(dim_), Point::Zero(dim_), Point::Zero(dim_)};
  for (int j = 0; j <= k; ++j) {
    const auto cp = spec_.control_points.row(span - k + j).transpose();
    out.value += ders(0, j) * cp;
    out.d1 += ders(1, j) * cp;
    out.d2 += ders(2, j) * cp;
  }
  return out;
}

FrenetFrame frenet(const CurvePoint& pt) {
  const double speed = pt.d1.norm();
  if (!(speed > 1e-12)) throw DegenerateError("frenet: degenerate tangent");
  FrenetFrame f;
  f.tangent = pt.d1 / speed;
  if (pt.d1.size() == 2) {
    f.normal = Point(2);
    f.normal << -f.tangent[1], f.tangent[0];
    return f;
  }
  Point perp = pt.d2 - pt.d2.dot(f.tangent) * f.tangent;
  const double curvature = perp.norm() / (speed * speed);
  if (!(curvature > 1e-12)) throw DegenerateError("frenet: degenerate normal (zero curvature)");
  f.normal = perp / perp.norm();
  // Re-orthogonalize once against round-off.
  f.normal -= f.normal.dot(f.tangent) * f.tangent;
  f.normal.normalize();
  const Eigen::Vector3d b = Eigen::Vector3d(f.tangent).cross(Eigen::Vector3d(f.normal));
  f.binormal = b;
  return f;
}

FrenetFrame frenet(const Curve& curve, double t) { return frenet(curve.evaluate(t)); }

namespace {

double gauss_segment(const std::function<double(double)>& f, double a, double b,
                     const QuadratureRule<double>& rule) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.points[i]);
  return half * sum;
}

double adaptive(const std::function<double(double)>& f, double a, double b, double whole,
                const QuadratureRule<double>& rule, double rel_tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gauss_segment(f, a, mid, rule);
  const double right = gauss_segment(f, mid, b, rule);
  const double refined = left + right;
  if (depth >= 40 || std::abs(refined - whole) <= rel_tol * std::abs(refined) + 1e-300) return refined;
  return adaptive(f, a, mid, left, rule, rel_tol, depth + 1) + adaptive(f, mid, b, right, rule, rel_tol, depth + 1);
}

}  // namespace

double arc_length(const Curve& curve, double t0, double t1) {
  if (t0 < curve.t_lo() - Curve::kDomainSlack || t1 > curve.t_hi() + Curve::kDomainSlack || t0 > t1)
    throw DomainError(curve.name() + ": arc_length requires t_lo <= t0 <= t1 <= t_hi");
  if (t0 == t1) return 0.0;
  static const QuadratureRule<double> rule = gauss_legendre(10);
  const auto speed = [&curve](double t) { return curve.evaluate(t).d1.norm(); };
  return adaptive(speed, t0, t1, gauss_segment(speed, t0, t1, rule), rule, 1e-12, 0);
}

bool is_straight_line(const Curve& curve) {
  if (curve.kind() != CurveKind::bspline) return false;
  const Matrix& cp = curve.spec().control_points;
  const Eigen::RowVectorXd p0 = cp.row(0);
  Eigen::RowVectorXd dir = cp.row(cp.rows() - 1) - p0;
  double scale = 0.0;
  for (Eigen::Index i = 0; i < cp.rows(); ++i) scale = std::max(scale, (cp.row(i) - p0).norm());
  if (scale == 0.0) return true;
  if (dir.norm() < 1e-12 * scale) {
    for (Eigen::Index i = 1; i < cp.rows(); ++i)
      if ((cp.row(i) - p0).norm() > dir.norm()) dir = cp.row(i) - p0;
  }
  dir.normalize();
  for (Eigen::Index i = 0; i < cp.rows(); ++i) {
    const Eigen::RowVectorXd v = cp.row(i) - p0;
    if ((v - v.dot(dir) * dir).norm() > 1e-12 * scale) return false;
  }
  return true;
}

}  // namespace curvemesh
