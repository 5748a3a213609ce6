#include "doctest.h"

#include "curvemesh/disparity.hpp"
#include "curvemesh/mesh.hpp"
#include "oracles.hpp"

#include <numbers>
#include <random>

using namespace curvemesh;

namespace {

constexpr double pi = std::numbers::pi;

Curve make(CurveKind kind, std::vector<double> params = {}) {
  CurveSpec s;
  s.name = "c";
  s.kind = kind;
  s.params = std::move(params);
  return Curve(s);
}

}  // namespace

TEST_CASE("basis examples") {
  for (auto fam : {NodeFamily::gauss_lobatto, NodeFamily::equispaced}) {
    const auto v = make_basis(1, fam).values(0.0);
    CHECK(v[0] == doctest::Approx(0.5));
    CHECK(v[1] == doctest::Approx(0.5));
  }
  const auto v2 = make_basis(2, NodeFamily::equispaced).values(-1.0);
  CHECK(v2[0] == 1.0);
  CHECK(v2[1] == 0.0);
  CHECK(v2[2] == 0.0);

  const auto n4 = make_basis(4).nodes();
  CHECK(n4[0] == -1.0);
  CHECK(n4[4] == 1.0);
  CHECK(n4[2] == 0.0);
  CHECK(n4[1] == -n4[3]);
  CHECK(std::abs(n4[3] - std::sqrt(3.0 / 7.0)) < 1e-15);

  CHECK_THROWS_AS(make_basis(0), SpecError);
}

TEST_CASE("basis: partition of unity, derivatives against the product formula") {
  for (auto fam : {NodeFamily::gauss_lobatto, NodeFamily::equispaced})
    for (int p = 1; p <= 8; ++p) {
      const auto b = make_basis(p, fam);
      const auto nodes = oracle::node_vector(p, fam);
      for (int i = 1; i <= p; ++i) CHECK(nodes[i] > nodes[i - 1]);
      for (int k = 0; k <= 100; ++k) {
        const double xi = -1 + 2.0 * k / 100;
        const auto v = b.values(xi);
        const auto d = b.derivatives(xi);
        CHECK(std::abs(v.sum() - 1) < 1e-12);
        CHECK(std::abs(d.sum()) < 1e-10);
        for (int i = 0; i <= p; ++i) {
          CHECK(std::abs(v[i] - oracle::lagrange(nodes, i, xi)) < 1e-12);
          CHECK(std::abs(d[i] - oracle::lagrange_derivative(nodes, i, xi)) < 1e-9 * std::max(1.0, std::abs(d[i])));
        }
      }
    }
}

TEST_CASE("gauss-legendre rules") {
  const auto r1 = gauss_legendre(1);
  CHECK(r1.points[0] == 0.0);
  CHECK(r1.weights[0] == doctest::Approx(2.0));
  const auto r2 = gauss_legendre(2);
  CHECK(std::abs(r2.points[0] + 1 / std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(r2.points[1] - 1 / std::sqrt(3.0)) < 1e-15);
  CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r2.weights[1] == doctest::Approx(1.0).epsilon(1e-15));

  const auto r20 = gauss_legendre(20);
  double i38 = 0;
  for (int k = 0; k < 20; ++k) i38 += r20.weights[k] * std::pow(r20.points[k], 38);
  CHECK(std::abs(i38 - 2.0 / 39) < 1e-12);

  for (int n : {1, 3, 7, 20, 33, 64, 128}) {
    const auto r = gauss_legendre(n);
    CHECK(std::abs(r.weights.sum() - 2) < 1e-13);
    CHECK((r.weights.array() > 0).all());
    for (int d = 0; d <= std::min(2 * n - 1, 60); ++d) {
      double acc = 0;
      for (int k = 0; k < n; ++k) acc += r.weights[k] * std::pow(r.points[k], d);
      CHECK(std::abs(acc - (d % 2 ? 0.0 : 2.0 / (d + 1))) < 1e-12);
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), SpecError);
  CHECK_THROWS_AS(gauss_legendre(129), SpecError);
}

TEST_CASE("interpolate_meshes: chord of the unit circle") {
  const Curve c = make(CurveKind::circle);
  const auto m = interpolate_meshes(c, 1, 1, 1, {0, pi});
  CHECK(m.x.nodes()(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(m.x.nodes()(1, 0)) < 1e-15);
  CHECK(m.x.nodes()(0, 1) == doctest::Approx(-1.0));
  CHECK(std::abs(m.x.nodes()(1, 1)) < 1e-15);
  CHECK(m.s.direction() == 1);
}

TEST_CASE("interpolate_meshes: nodes interpolate the curve exactly") {
  for (auto kind : {CurveKind::circle, CurveKind::spiral, CurveKind::sphere_arc, CurveKind::naca4}) {
    const Curve c = make(kind);
    for (int p = 1; p <= 4; ++p) {
      const int q = 2 * p - 1;
      const auto m = interpolate_meshes(c, 3, p, q, arclength_partition(c, 3));
      const auto bx = make_basis(p);
      for (int e = 0; e < 3; ++e)
        for (int i = 0; i <= p; ++i) {
          const double t = m.s.eval(make_basis(q), e, bx.nodes()[i]);
          CHECK((m.x.nodes().col(m.x.global_index(e, i)) - c.eval(t)).norm() < 1e-12);
        }
      // Interfaces are single-stored and identical from both sides.
      for (int e = 0; e + 1 < 3; ++e) {
        CHECK((m.x.eval(bx, e, 1.0) - m.x.eval(bx, e + 1, -1.0)).norm() == 0.0);
        CHECK(m.s.eval(make_basis(q), e, 1.0) == m.s.eval(make_basis(q), e + 1, -1.0));
      }
    }
  }
}

TEST_CASE("interpolate_meshes: initial disparity against a Simpson oracle") {
  const auto c = std::make_shared<const Curve>(make(CurveKind::circle));
  const auto m = interpolate_meshes(*c, 2, 2, 2, uniform_partition(*c, 2));
  const double E = energy(make_problem(c, m.x, m.s, Layout::constrained));
  const double ref = oracle::energy(*c, m.x, m.s, 100'000);
  CHECK(std::abs(E - ref) < 1e-10);
}

TEST_CASE("interpolate_meshes: errors and reversed partitions") {
  const Curve c = make(CurveKind::semicircle);
  CHECK_THROWS_AS(interpolate_meshes(c, 2, 2, 2, {0, 2, 1}), SpecError);
  CHECK_THROWS_AS(interpolate_meshes(c, 2, 2, 2, {0, 1}), SpecError);
  CHECK_THROWS_AS(interpolate_meshes(c, 2, 2, 2, {0, 1, 4}), SpecError);
  CHECK_THROWS_AS(interpolate_meshes(c, 0, 2, 2, {0}), SpecError);
  CHECK_THROWS_AS(interpolate_meshes(c, 1, 0, 2, {0, 1}), SpecError);
  const auto rev = interpolate_meshes(c, 2, 2, 3, {pi, 1.0, 0});
  CHECK(rev.s.direction() == -1);
  CHECK(rev.s.nodes()[0] == pi);
  CHECK(rev.s.nodes()[rev.s.node_count() - 1] == 0.0);
  CHECK(check_validity(rev.s, 20));
}

TEST_CASE("partitions") {
  const Curve circle = make(CurveKind::circle);
  const auto u = uniform_partition(circle, 7), a = arclength_partition(circle, 7);
  REQUIRE(u.size() == 8);
  for (int i = 0; i <= 7; ++i) CHECK(std::abs(u[i] - a[i]) < 1e-9);

  const Curve spiral = make(CurveKind::spiral);
  const auto us = uniform_partition(spiral, 6), as = arclength_partition(spiral, 6);
  // r grows with theta, so equal arc length needs shorter parameter steps outside.
  for (int i = 1; i < 6; ++i) CHECK(as[i] > us[i]);
  for (int i = 1; i < 6; ++i) CHECK(as[i + 1] - as[i] < as[i] - as[i - 1]);
  const double total = arc_length(spiral, spiral.t_lo(), spiral.t_hi());
  for (int i = 0; i < 6; ++i) CHECK(std::abs(arc_length(spiral, as[i], as[i + 1]) - total / 6) < 1e-8);

  for (const Curve& c : {circle, spiral}) {
    const auto one = arclength_partition(c, 1);
    CHECK(one == std::vector<double>{c.t_lo(), c.t_hi()});
    CHECK(uniform_partition(c, 1) == std::vector<double>{c.t_lo(), c.t_hi()});
  }
  CHECK_THROWS_AS(uniform_partition(circle, 0), SpecError);
}

TEST_CASE("default quadrature resolves the disparity integrand") {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> U(-1, 1);
  for (auto kind : {CurveKind::circle, CurveKind::sphere_arc, CurveKind::naca4}) {
    const auto c = std::make_shared<const Curve>(make(kind));
    for (int p = 1; p <= 4; ++p) {
      const int q = 2 * p - 1;
      auto m = interpolate_meshes(*c, 4, p, q, arclength_partition(*c, 4));
      m.x.nodes() += 1e-3 * Matrix::NullaryExpr(m.x.nodes().rows(), m.x.nodes().cols(), [&] { return U(rng); });
      const int nq = default_quadrature_points(p, q);
      const double E1 = energy(make_problem(c, m.x, m.s, Layout::constrained, 0, nq));
      const double E2 = energy(make_problem(c, m.x, m.s, Layout::constrained, 0, 2 * nq));
      CHECK(std::abs(E1 - E2) < 1e-10 * E2);
    }
  }
  CHECK(default_quadrature_points(2, 3) == 20);
  CHECK(default_quadrature_points(8, 15) == 48);
}

TEST_CASE("dof layouts") {
  const Curve c = make(CurveKind::sphere_arc);
  const int R = 3, p = 3, q = 4;
  const auto m = interpolate_meshes(c, R, p, q, uniform_partition(c, R));
  const auto con = make_layout(m.x, m.s, Layout::constrained);
  const auto unc = make_layout(m.x, m.s, Layout::unconstrained);
  CHECK(con.free_count == R * (3 * (p - 1) + (q - 1)));
  CHECK(unc.free_count == 3 * (R * p - 1) + (R * q - 1));

  // Element-major order: element 0's x interior nodes, then its s interior nodes.
  CHECK(con.x_dof[1] == 0);
  CHECK(con.x_dof[2] == 3);
  CHECK(con.s_dof[1] == 6);
  CHECK(con.x_dof[p + 1] == 3 * (p - 1) + (q - 1));
  CHECK(con.x_dof[p] == -1);
  CHECK(unc.x_dof[p] == 3 * (p - 1));  // interface node owned by element 0
  CHECK(unc.x_dof[0] == -1);
  for (Eigen::Index i = 0; i < con.free_count; ++i) CHECK(con.owner[i] == i / (3 * (p - 1) + (q - 1)));

  const Vector z = gather(m.x, m.s, unc);
  auto x2 = m.x;
  auto s2 = m.s;
  scatter(Vector::Constant(z.size(), 7.0), unc, x2, s2);
  CHECK(x2.nodes().col(0) == m.x.nodes().col(0));
  CHECK(s2.nodes()[s2.node_count() - 1] == m.s.nodes()[m.s.node_count() - 1]);
  CHECK(x2.nodes()(0, 1) == 7.0);
  scatter(z, unc, x2, s2);
  CHECK(x2.nodes() == m.x.nodes());
  CHECK(s2.nodes() == m.s.nodes());
  CHECK_THROWS_AS(scatter(Vector::Zero(3), unc, x2, s2), SpecError);

  CHECK(layout_from_string("constrained") == Layout::constrained);
  CHECK(layout_from_string("unconstrained") == Layout::unconstrained);
  CHECK_THROWS_AS(layout_from_string("free"), SpecError);
}

TEST_CASE("extract and insert single elements") {
  const Curve c = make(CurveKind::circle);
  const auto m = interpolate_meshes(c, 4, 2, 3, uniform_partition(c, 4));
  auto one = extract_element(m.x, m.s, 2);
  CHECK(one.x.elements() == 1);
  CHECK(one.x.nodes() == m.x.element_nodes(2));
  CHECK(one.s.nodes() == m.s.element_nodes(2));
  one.x.nodes().setConstant(5);
  one.s.nodes().setConstant(5);
  auto x = m.x;
  auto s = m.s;
  insert_element(one, 2, x, s);
  // Only the interior nodes move; interfaces belong to the neighbours too.
  CHECK(x.nodes().col(x.global_index(2, 1)).isConstant(5));
  CHECK(x.nodes().col(x.global_index(2, 0)) == m.x.nodes().col(m.x.global_index(2, 0)));
  CHECK(x.nodes().col(x.global_index(2, 2)) == m.x.nodes().col(m.x.global_index(2, 2)));
  CHECK(s.nodes()[s.global_index(2, 1)] == 5);
  CHECK(s.nodes()[s.global_index(2, 0)] == m.s.nodes()[m.s.global_index(2, 0)]);
}
