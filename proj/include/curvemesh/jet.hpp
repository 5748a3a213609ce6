#pragma once

#include <cmath>

namespace curvemesh {

/// Second-order forward-mode jet: value, first and second derivative with
/// respect to one scalar parameter. Analytic curve formulas are written once
/// as templates and evaluated on Jet to obtain exact a, a', a''.
template <typename Scalar>
struct Jet {
  Scalar v{0};
  Scalar d{0};
  Scalar dd{0};

  constexpr Jet() = default;
  constexpr Jet(Scalar value) : v(value) {}  // NOLINT: implicit constants
  constexpr Jet(Scalar value, Scalar d1, Scalar d2) : v(value), d(d1), dd(d2) {}

  static constexpr Jet variable(Scalar t) { return {t, Scalar(1), Scalar(0)}; }

  Jet& operator+=(const Jet& o) { v += o.v; d += o.d; dd += o.dd; return *this; }
  Jet& operator-=(const Jet& o) { v -= o.v; d -= o.d; dd -= o.dd; return *this; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(const Jet& a) { return {-a.v, -a.d, -a.dd}; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + Scalar(2) * a.d * b.d + a.v * b.dd};
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    const Scalar inv = Scalar(1) / b.v;
    const Scalar q = a.v * inv;
    const Scalar qd = (a.d - q * b.d) * inv;
    const Scalar qdd = (a.dd - Scalar(2) * qd * b.d - q * b.dd) * inv;
    return {q, qd, qdd};
  }
};

// Chain rule for f(g(t)) given f, f', f'' at g.
template <typename Scalar>
Jet<Scalar> compose(const Jet<Scalar>& g, Scalar f, Scalar df, Scalar ddf) {
  return {f, df * g.d, ddf * g.d * g.d + df * g.dd};
}

template <typename Scalar>
Jet<Scalar> sin(const Jet<Scalar>& g) {
  using std::cos;
  using std::sin;
  const Scalar s = sin(g.v), c = cos(g.v);
  return compose(g, s, c, -s);
}

template <typename Scalar>
Jet<Scalar> cos(const Jet<Scalar>& g) {
  using std::cos;
  using std::sin;
  const Scalar s = sin(g.v), c = cos(g.v);
  return compose(g, c, -s, -c);
}

template <typename Scalar>
Jet<Scalar> sqrt(const Jet<Scalar>& g) {
  using std::sqrt;
  const Scalar r = sqrt(g.v);
  return compose(g, r, Scalar(0.5) / r, Scalar(-0.25) / (r * g.v));
}

}  // namespace curvemesh
