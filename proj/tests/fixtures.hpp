#pragma once

// Curves and meshes shared by several test files.

#include "curvemesh/disparity.hpp"
#include "curvemesh/geometry.hpp"
#include "curvemesh/mesh.hpp"

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fixture {

using namespace curvemesh;

inline std::shared_ptr<const Curve> analytic(CurveKind kind, std::vector<double> params = {},
                                             std::optional<std::pair<double, double>> domain = {}) {
  CurveSpec s;
  s.name = std::string(to_string(kind));
  s.kind = kind;
  s.params = std::move(params);
  s.domain = domain;
  return std::make_shared<const Curve>(s);
}

// Cubic bspline with control points at the Greville abscissae: a(t) = (4t, 0).
inline CurveSpec line_spec() {
  CurveSpec s;
  s.name = "line";
  s.kind = CurveKind::bspline;
  s.control_points.resize(5, 2);
  s.control_points << 0, 0, 4.0 / 6, 0, 2, 0, 20.0 / 6, 0, 4, 0;
  s.knots = {0, 0, 0, 0, 0.5, 1, 1, 1, 1};
  s.degree = 3;
  return s;
}

inline std::shared_ptr<const Curve> line() { return std::make_shared<const Curve>(line_spec()); }

inline MeshPair uniform_mesh(const Curve& c, int R, int p, int q) {
  return interpolate_meshes(c, R, p, q, uniform_partition(c, R));
}

// Random perturbation of every free DOF, small enough to keep s valid.
inline MeshPair perturbed(const MeshPair& m, Layout layout, double amplitude, unsigned seed) {
  MeshPair out = m;
  const auto dofs = make_layout(m.x, m.s, layout);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-amplitude, amplitude);
  Vector z = gather(m.x, m.s, dofs);
  for (auto& v : z) v += U(rng);
  scatter(z, dofs, out.x, out.s);
  return out;
}

// Copy of the problem with the free DOFs replaced.
inline Problem at(const Problem& p, const Vector& z) {
  Problem q = p;
  scatter(z, q.layout, q.x, q.s);
  return q;
}

inline Vector free_dofs(const Problem& p) { return gather(p.x, p.s, p.layout); }

}  // namespace fixture
