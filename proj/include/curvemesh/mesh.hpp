#pragma once

#include "curvemesh/common.hpp"
#include "curvemesh/geometry.hpp"
#include "curvemesh/quadrature.hpp"

#include <vector>

namespace curvemesh {

/// Piecewise degree-p map from reference elements into R^n.
///
/// Nodes are stored globally: element e owns columns e*p .. e*p + p, so the
/// interface node between two elements exists exactly once.
class PhysicalMesh {
 public:
  PhysicalMesh() = default;
  PhysicalMesh(int dim, int degree, int elements, NodeFamily family = NodeFamily::gauss_lobatto);

  int dim() const { return static_cast<int>(nodes_.rows()); }
  int degree() const { return degree_; }
  int elements() const { return elements_; }
  NodeFamily family() const { return family_; }
  Eigen::Index node_count() const { return nodes_.cols(); }

  Eigen::Index global_index(int element, int local) const { return Eigen::Index(element) * degree_ + local; }

  Matrix& nodes() { return nodes_; }
  const Matrix& nodes() const { return nodes_; }
  auto element_nodes(int e) { return nodes_.middleCols(global_index(e, 0), degree_ + 1); }
  auto element_nodes(int e) const { return nodes_.middleCols(global_index(e, 0), degree_ + 1); }

  /// phi^P on element e at reference coordinate xi.
  Point eval(const LagrangeBasis<>& basis, int e, double xi) const;

 private:
  int degree_ = 1;
  int elements_ = 0;
  NodeFamily family_ = NodeFamily::gauss_lobatto;
  Matrix nodes_;
};

/// Piecewise degree-q scalar map into the curve parameter interval.
class ParametricMesh {
 public:
  ParametricMesh() = default;
  ParametricMesh(int degree, int elements, int direction, NodeFamily family = NodeFamily::gauss_lobatto);

  int degree() const { return degree_; }
  int elements() const { return elements_; }
  NodeFamily family() const { return family_; }
  /// +1 forward, -1 reversed; fixed at construction.
  int direction() const { return direction_; }
  Eigen::Index node_count() const { return nodes_.size(); }

  Eigen::Index global_index(int element, int local) const { return Eigen::Index(element) * degree_ + local; }

  Vector& nodes() { return nodes_; }
  const Vector& nodes() const { return nodes_; }
  auto element_nodes(int e) { return nodes_.segment(global_index(e, 0), degree_ + 1); }
  auto element_nodes(int e) const { return nodes_.segment(global_index(e, 0), degree_ + 1); }

  double eval(const LagrangeBasis<>& basis, int e, double xi) const;
  double eval_derivative(const LagrangeBasis<>& basis, int e, double xi) const;

 private:
  int degree_ = 1;
  int elements_ = 0;
  int direction_ = 1;
  NodeFamily family_ = NodeFamily::gauss_lobatto;
  Vector nodes_;
};

enum class Layout { constrained, unconstrained };

std::string_view to_string(Layout layout);
Layout layout_from_string(std::string_view name);

/// Fixed/free bookkeeping and the free-DOF numbering.
///
/// Free DOFs are numbered element-major; inside an element the physical nodes
/// come first with coordinates interleaved, then the parametric nodes. A shared
/// interface node is numbered with the first element that touches it.
struct DofLayout {
  Layout kind = Layout::constrained;
  int dim = 2;
  std::vector<bool> x_fixed;      // per global physical node
  std::vector<bool> s_fixed;      // per global parametric node
  std::vector<Eigen::Index> x_dof;  // first free index of the node, -1 if fixed
  std::vector<Eigen::Index> s_dof;
  Eigen::Index free_count = 0;

  /// Element owning a free index; used to check block structure.
  std::vector<int> owner;
};

DofLayout make_layout(const PhysicalMesh& x, const ParametricMesh& s, Layout kind);

/// Free entries of (x, s) in layout order.
Vector gather(const PhysicalMesh& x, const ParametricMesh& s, const DofLayout& layout);
/// Writes free entries back; fixed entries are never touched.
void scatter(const Vector& z, const DofLayout& layout, PhysicalMesh& x, ParametricMesh& s);

/// Initial interpolative pair: s affine per element over the partition and
/// x_i = a(s(node_i)).
struct MeshPair {
  PhysicalMesh x;
  ParametricMesh s;
};

MeshPair interpolate_meshes(const Curve& curve, int elements, int p, int q, const std::vector<double>& partition,
                            NodeFamily family = NodeFamily::gauss_lobatto);

std::vector<double> uniform_partition(const Curve& curve, int elements);
/// Breakpoints with equal arc length between neighbours (bisection to 1e-10).
std::vector<double> arclength_partition(const Curve& curve, int elements);

/// Default quadrature order: max(20, 2(p + q) + 2).
int default_quadrature_points(int p, int q);

/// Single-element copies used by the element-parallel drivers.
MeshPair extract_element(const PhysicalMesh& x, const ParametricMesh& s, int e);
void insert_element(const MeshPair& element, int e, PhysicalMesh& x, ParametricMesh& s);

}  // namespace curvemesh
