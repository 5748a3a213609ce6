#include "curvemesh/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace curvemesh {

PhysicalMesh::PhysicalMesh(int dim, int degree, int elements, NodeFamily family)
    : degree_(degree), elements_(elements), family_(family) {
  if (dim != 2 && dim != 3) throw SpecError("PhysicalMesh: dimension must be 2 or 3");
  if (degree < 1) throw SpecError("PhysicalMesh: degree must be >= 1");
  if (elements < 1) throw SpecError("PhysicalMesh: at least one element required");
  nodes_ = Matrix::Zero(dim, Eigen::Index(elements) * degree + 1);
}

Point PhysicalMesh::eval(const LagrangeBasis<>& basis, int e, double xi) const {
  return element_nodes(e) * basis.values(xi);
}

ParametricMesh::ParametricMesh(int degree, int elements, int direction, NodeFamily family)
    : degree_(degree), elements_(elements), direction_(direction), family_(family) {
  if (degree < 1) throw SpecError("ParametricMesh: degree must be >= 1");
  if (elements < 1) throw SpecError("ParametricMesh: at least one element required");
  if (direction != 1 && direction != -1) throw SpecError("ParametricMesh: direction must be +1 or -1");
  nodes_ = Vector::Zero(Eigen::Index(elements) * degree + 1);
}

double ParametricMesh::eval(const LagrangeBasis<>& basis, int e, double xi) const {
  return element_nodes(e).dot(basis.values(xi));
}

double ParametricMesh::eval_derivative(const LagrangeBasis<>& basis, int e, double xi) const {
  return element_nodes(e).dot(basis.derivatives(xi));
}

std::string_view to_string(Layout layout) {
  return layout == Layout::constrained ? "constrained" : "unconstrained";
}

Layout layout_from_string(std::string_view name) {
  if (name == "constrained") return Layout::constrained;
  if (name == "unconstrained") return Layout::unconstrained;
  throw SpecError("unknown layout '" + std::string(name) + "'");
}

DofLayout make_layout(const PhysicalMesh& x, const ParametricMesh& s, Layout kind) {
  if (x.elements() != s.elements()) throw SpecError("make_layout: element counts differ");
  DofLayout L;
  L.kind = kind;
  L.dim = x.dim();
  const int R = x.elements(), p = x.degree(), q = s.degree();
  L.x_fixed.assign(x.node_count(), false);
  L.s_fixed.assign(s.node_count(), false);
  if (kind == Layout::constrained) {
    for (int e = 0; e <= R; ++e) {
      L.x_fixed[Eigen::Index(e) * p] = true;
      L.s_fixed[Eigen::Index(e) * q] = true;
    }
  } else {
    L.x_fixed.front() = L.x_fixed.back() = true;
    L.s_fixed.front() = L.s_fixed.back() = true;
  }
  L.x_dof.assign(x.node_count(), -1);
  L.s_dof.assign(s.node_count(), -1);
  Eigen::Index next = 0;
  for (int e = 0; e < R; ++e) {
    for (int i = 0; i <= p; ++i) {
      const auto g = x.global_index(e, i);
      if (L.x_fixed[g] || L.x_dof[g] >= 0) continue;
      L.x_dof[g] = next;
      next += L.dim;
      L.owner.insert(L.owner.end(), L.dim, e);
    }
    for (int i = 0; i <= q; ++i) {
      const auto g = s.global_index(e, i);
      if (L.s_fixed[g] || L.s_dof[g] >= 0) continue;
      L.s_dof[g] = next++;
      L.owner.push_back(e);
    }
  }
  L.free_count = next;
  return L;
}

Vector gather(const PhysicalMesh& x, const ParametricMesh& s, const DofLayout& layout) {
  Vector z(layout.free_count);
  for (Eigen::Index g = 0; g < x.node_count(); ++g)
    if (layout.x_dof[g] >= 0) z.segment(layout.x_dof[g], layout.dim) = x.nodes().col(g);
  for (Eigen::Index g = 0; g < s.node_count(); ++g)
    if (layout.s_dof[g] >= 0) z[layout.s_dof[g]] = s.nodes()[g];
  return z;
}

void scatter(const Vector& z, const DofLayout& layout, PhysicalMesh& x, ParametricMesh& s) {
  if (z.size() != layout.free_count) throw SpecError("scatter: vector length does not match the layout");
  for (Eigen::Index g = 0; g < x.node_count(); ++g)
    if (layout.x_dof[g] >= 0) x.nodes().col(g) = z.segment(layout.x_dof[g], layout.dim);
  for (Eigen::Index g = 0; g < s.node_count(); ++g)
    if (layout.s_dof[g] >= 0) s.nodes()[g] = z[layout.s_dof[g]];
}

MeshPair interpolate_meshes(const Curve& curve, int elements, int p, int q, const std::vector<double>& partition,
                            NodeFamily family) {
  if (elements < 1 || p < 1 || q < 1) throw SpecError("interpolate_meshes: R, p, q must be >= 1");
  if (static_cast<int>(partition.size()) != elements + 1)
    throw SpecError("interpolate_meshes: partition must have R + 1 breakpoints");
  const int direction = partition.back() > partition.front() ? 1 : -1;
  for (int e = 0; e < elements; ++e)
    if (!(direction * (partition[e + 1] - partition[e]) > 0))
      throw SpecError("interpolate_meshes: partition must be strictly monotone");
  for (double b : partition)
    if (b < curve.t_lo() - Curve::kDomainSlack || b > curve.t_hi() + Curve::kDomainSlack)
      throw SpecError("interpolate_meshes: partition leaves the curve domain");

  MeshPair m{PhysicalMesh(curve.dim(), p, elements, family), ParametricMesh(q, elements, direction, family)};
  const auto xnodes = LagrangeBasis<>::make_nodes(p, family);
  const auto snodes = LagrangeBasis<>::make_nodes(q, family);
  for (int e = 0; e < elements; ++e) {
    const double lo = partition[e], hi = partition[e + 1];
    const auto affine = [lo, hi](double xi) { return lo + 0.5 * (xi + 1.0) * (hi - lo); };
    for (int i = 0; i <= q; ++i) m.s.nodes()[m.s.global_index(e, i)] = affine(snodes[i]);
    for (int i = 0; i <= p; ++i) m.x.nodes().col(m.x.global_index(e, i)) = curve.eval(affine(xnodes[i]));
  }
  // Interfaces are written by both neighbours with the same breakpoint; make the
  // endpoints exact.
  for (int e = 0; e <= elements; ++e) {
    m.s.nodes()[Eigen::Index(e) * q] = partition[e];
    m.x.nodes().col(Eigen::Index(e) * p) = curve.eval(partition[e]);
  }
  return m;
}

std::vector<double> uniform_partition(const Curve& curve, int elements) {
  if (elements < 1) throw SpecError("uniform_partition: R must be >= 1");
  std::vector<double> b(elements + 1);
  const double lo = curve.t_lo(), hi = curve.t_hi();
  for (int e = 0; e <= elements; ++e) b[e] = lo + (hi - lo) * e / elements;
  b.front() = lo;
  b.back() = hi;
  return b;
}

std::vector<double> arclength_partition(const Curve& curve, int elements) {
  if (elements < 1) throw SpecError("arclength_partition: R must be >= 1");
  const double lo = curve.t_lo(), hi = curve.t_hi();
  const double total = arc_length(curve, lo, hi);
  std::vector<double> b(elements + 1);
  b.front() = lo;
  b.back() = hi;
  for (int e = 1; e < elements; ++e) {
    const double target = total * e / elements;
    // Search from the previous breakpoint; arc length is monotone in t.
    const double base = b[e - 1];
    const double base_len = total * (e - 1) / elements;
    double a = base, c = hi;
    while (c - a > 1e-10 * std::max(1.0, std::abs(hi - lo))) {
      const double mid = 0.5 * (a + c);
      if (base_len + arc_length(curve, base, mid) < target)
        a = mid;
      else
        c = mid;
    }
    b[e] = 0.5 * (a + c);
  }
  return b;
}

int default_quadrature_points(int p, int q) { return std::max(20, 2 * (p + q) + 2); }

MeshPair extract_element(const PhysicalMesh& x, const ParametricMesh& s, int e) {
  MeshPair m{PhysicalMesh(x.dim(), x.degree(), 1, x.family()), ParametricMesh(s.degree(), 1, s.direction(), s.family())};
  m.x.nodes() = x.element_nodes(e);
  m.s.nodes() = s.element_nodes(e);
  return m;
}

void insert_element(const MeshPair& element, int e, PhysicalMesh& x, ParametricMesh& s) {
  // Interfaces are shared with the neighbours; only interior nodes are copied.
  const int p = x.degree(), q = s.degree();
  for (int i = 1; i < p; ++i) x.nodes().col(x.global_index(e, i)) = element.x.nodes().col(i);
  for (int i = 1; i < q; ++i) s.nodes()[s.global_index(e, i)] = element.s.nodes()[i];
}

}  // namespace curvemesh
