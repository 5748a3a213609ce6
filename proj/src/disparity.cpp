#include "curvemesh/disparity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace curvemesh {

namespace {

constexpr double kMinJacobian = 1e-14;

// Element-local layout: physical nodes (coordinates interleaved), then parametric nodes.
struct LocalMap {
  std::vector<Eigen::Index> global;  // -1 for fixed entries
};

LocalMap local_map(const Problem& pb, int e) {
  const int n = pb.x.dim(), p = pb.x.degree(), q = pb.s.degree();
  LocalMap m;
  m.global.assign(n * (p + 1) + q + 1, -1);
  for (int i = 0; i <= p; ++i) {
    const auto d = pb.layout.x_dof[pb.x.global_index(e, i)];
    if (d >= 0)
      for (int c = 0; c < n; ++c) m.global[i * n + c] = d + c;
  }
  for (int k = 0; k <= q; ++k) m.global[n * (p + 1) + k] = pb.layout.s_dof[pb.s.global_index(e, k)];
  return m;
}

}  // namespace

ElementTables tabulate(const PhysicalMesh& x, const ParametricMesh& s, const QuadratureRule<>& quadrature) {
  ElementTables t;
  t.x_basis = LagrangeBasis<>(x.degree(), x.family());
  t.s_basis = LagrangeBasis<>(s.degree(), s.family());
  const auto nq = quadrature.size();
  t.x_values.resize(nq, x.degree() + 1);
  t.x_derivs.resize(nq, x.degree() + 1);
  t.s_values.resize(nq, s.degree() + 1);
  t.s_derivs.resize(nq, s.degree() + 1);
  for (Eigen::Index g = 0; g < nq; ++g) {
    const double xi = quadrature.points[g];
    t.x_values.row(g) = t.x_basis.values(xi).transpose();
    t.x_derivs.row(g) = t.x_basis.derivatives(xi).transpose();
    t.s_values.row(g) = t.s_basis.values(xi).transpose();
    t.s_derivs.row(g) = t.s_basis.derivatives(xi).transpose();
  }
  return t;
}

Problem make_problem(std::shared_ptr<const Curve> curve, PhysicalMesh x, ParametricMesh s, Layout layout, double mu,
                     int quadrature_points) {
  if (!curve) throw SpecError("make_problem: null curve");
  if (x.elements() != s.elements()) throw SpecError("make_problem: x and s must have the same element count");
  if (x.dim() != curve->dim()) throw SpecError("make_problem: mesh and curve dimensions differ");
  if (mu < 0) throw SpecError("make_problem: mu must be >= 0");
  Problem pb;
  pb.curve = std::move(curve);
  pb.layout = make_layout(x, s, layout);
  pb.quadrature = gauss_legendre(quadrature_points > 0 ? quadrature_points
                                                       : default_quadrature_points(x.degree(), s.degree()));
  pb.tables = tabulate(x, s, pb.quadrature);
  pb.x = std::move(x);
  pb.s = std::move(s);
  pb.mu = mu;
  return pb;
}

DisparityEval evaluate(const Problem& pb, EvalLevel level) {
  const Curve& curve = *pb.curve;
  const int n = pb.x.dim(), p = pb.x.degree(), q = pb.s.degree(), R = pb.x.elements();
  const int nx = n * (p + 1), nl = nx + q + 1;
  const auto& T = pb.tables;
  const auto& w = pb.quadrature.weights;
  const double sigma = pb.s.direction();
  const bool with_barrier = pb.mu > 0;
  const bool want_grad = level != EvalLevel::value;
  const bool want_hess = level == EvalLevel::hessian;

  DisparityEval out;
  if (want_grad) out.grad = Vector::Zero(pb.layout.free_count);
  std::vector<Eigen::Triplet<double>> triplets;
  if (want_hess) triplets.reserve(std::size_t(R) * nl * nl);

  Vector gl(nl);
  Matrix Hl(nl, nl);
  for (int e = 0; e < R; ++e) {
    const auto X = pb.x.element_nodes(e);
    const auto S = pb.s.element_nodes(e);
    if (want_grad) gl.setZero();
    if (want_hess) Hl.setZero();
    double e_energy = 0.0, e_barrier = 0.0;

    for (Eigen::Index g = 0; g < pb.quadrature.size(); ++g) {
      const auto N = T.x_values.row(g);
      const auto dN = T.x_derivs.row(g);
      const auto M = T.s_values.row(g);
      const auto dM = T.s_derivs.row(g);
      const Point xg = X * N.transpose();
      const Point dx = X * dN.transpose();
      const double sg = M.dot(S);
      const double ds = dM.dot(S);
      const CurvePoint a = curve.evaluate(sg);
      const Point r = xg - a.value;
      const double J = dx.norm();
      if (!(J >= kMinJacobian)) throw DegenerateError("disparity: degenerate physical element " + std::to_string(e));
      const Point u = dx / J;
      const double r2 = r.squaredNorm();
      const double wg = w[g];
      e_energy += wg * r2 * J;

      if (with_barrier) {
        const double sd = sigma * ds;
        if (!(sd > 0)) throw InvalidParametrization("disparity: sigma_dir s' <= 0 in element " + std::to_string(e));
        e_barrier += wg * std::log(sd);
      }
      if (!want_grad) continue;

      const double ra = r.dot(a.d1);
      for (int i = 0; i <= p; ++i)
        for (int c = 0; c < n; ++c) gl[i * n + c] += wg * (2.0 * r[c] * N[i] * J + r2 * u[c] * dN[i]);
      for (int k = 0; k <= q; ++k) {
        gl[nx + k] -= wg * 2.0 * ra * M[k] * J;
        if (with_barrier) gl[nx + k] -= pb.mu * wg * dM[k] / ds;
      }
      if (!want_hess) continue;

      // physical-physical
      for (int i = 0; i <= p; ++i)
        for (int c = 0; c < n; ++c)
          for (int j = 0; j <= p; ++j)
            for (int d = 0; d < n; ++d) {
              double h = 2.0 * r[c] * N[i] * u[d] * dN[j] + 2.0 * r[d] * N[j] * u[c] * dN[i] -
                         r2 * dN[i] * dN[j] * u[c] * u[d] / J;
              if (c == d) h += 2.0 * N[i] * N[j] * J + r2 * dN[i] * dN[j] / J;
              Hl(i * n + c, j * n + d) += wg * h;
            }
      // physical-parametric
      for (int i = 0; i <= p; ++i)
        for (int c = 0; c < n; ++c)
          for (int k = 0; k <= q; ++k) {
            const double h = -wg * (2.0 * a.d1[c] * N[i] * J + 2.0 * ra * u[c] * dN[i]) * M[k];
            Hl(i * n + c, nx + k) += h;
            Hl(nx + k, i * n + c) += h;
          }
      // parametric-parametric
      const double css = 2.0 * J * (a.d1.squaredNorm() - r.dot(a.d2));
      for (int k = 0; k <= q; ++k)
        for (int l = 0; l <= q; ++l) {
          double h = css * M[k] * M[l];
          if (with_barrier) h += pb.mu * dM[k] * dM[l] / (ds * ds);
          Hl(nx + k, nx + l) += wg * h;
        }
    }

    out.energy += e_energy;
    out.barrier += e_barrier;
    if (!want_grad) continue;
    const LocalMap map = local_map(pb, e);
    for (int a = 0; a < nl; ++a) {
      const auto ga = map.global[a];
      if (ga < 0) continue;
      out.grad[ga] += gl[a];
      if (!want_hess) continue;
      for (int b = 0; b < nl; ++b) {
        const auto gb = map.global[b];
        if (gb >= 0) triplets.emplace_back(ga, gb, Hl(a, b));
      }
    }
  }

  out.value = out.energy - pb.mu * out.barrier;
  if (want_grad) out.grad_norm = out.grad.norm();
  if (want_hess) {
    out.hess.resize(pb.layout.free_count, pb.layout.free_count);
    out.hess.setFromTriplets(triplets.begin(), triplets.end());
  }
  return out;
}

double energy(const Problem& problem) {
  Problem pb = problem;
  pb.mu = 0.0;
  return evaluate(pb, EvalLevel::value).energy;
}

Vector gradient(const Problem& problem) { return evaluate(problem, EvalLevel::gradient).grad; }

SparseMatrix hessian(const Problem& problem) { return evaluate(problem, EvalLevel::hessian).hess; }

double barrier_value(const Problem& pb) {
  const double sigma = pb.s.direction();
  double sum = 0.0;
  for (int e = 0; e < pb.s.elements(); ++e) {
    const auto S = pb.s.element_nodes(e);
    for (Eigen::Index g = 0; g < pb.quadrature.size(); ++g) {
      const double sd = sigma * pb.tables.s_derivs.row(g).dot(S);
      if (!(sd > 0)) throw InvalidParametrization("barrier_value: sigma_dir s' <= 0 in element " + std::to_string(e));
      sum += pb.quadrature.weights[g] * std::log(sd);
    }
  }
  return sum;
}

bool check_validity(const ParametricMesh& s, int oversample, const QuadratureRule<>& quadrature) {
  if (oversample < 2) throw SpecError("check_validity: oversample must be >= 2");
  const LagrangeBasis<> basis(s.degree(), s.family());
  std::vector<Vector> derivs;
  derivs.reserve(oversample + quadrature.size());
  for (int k = 0; k < oversample; ++k) derivs.push_back(basis.derivatives(-1.0 + 2.0 * k / (oversample - 1)));
  for (Eigen::Index g = 0; g < quadrature.size(); ++g) derivs.push_back(basis.derivatives(quadrature.points[g]));
  const double sigma = s.direction();
  for (int e = 0; e < s.elements(); ++e) {
    const auto S = s.element_nodes(e);
    for (const auto& d : derivs)
      if (!(sigma * d.dot(S) > 0)) return false;
  }
  return true;
}

bool check_validity(const ParametricMesh& s, int oversample) {
  return check_validity(s, oversample, QuadratureRule<>{});
}

ErrorDecomposition decompose_error(const Curve& curve, const PhysicalMesh& x, const ParametricMesh& s,
                                   int samples_per_element) {
  if (samples_per_element < 2) throw SpecError("decompose_error: need at least 2 samples per element");
  if (x.elements() != s.elements()) throw SpecError("decompose_error: element counts differ");
  const LagrangeBasis<> xb(x.degree(), x.family()), sb(s.degree(), s.family());
  ErrorDecomposition out;
  const bool spatial = curve.dim() == 3;
  for (int e = 0; e < x.elements(); ++e) {
    // Interfaces are sampled once.
    for (int k = e == 0 ? 0 : 1; k < samples_per_element; ++k) {
      const double xi = -1.0 + 2.0 * k / (samples_per_element - 1);
      const Point xv = x.eval(xb, e, xi);
      const CurvePoint a = curve.evaluate(s.eval(sb, e, xi));
      const FrenetFrame f = frenet(a);
      const Point err = xv - a.value;
      out.xi_global.push_back(e + 0.5 * (xi + 1.0));
      out.magnitude.push_back(err.norm());
      out.tangential.push_back(err.dot(f.tangent));
      out.normal.push_back(err.dot(f.normal));
      if (spatial) out.binormal.push_back(err.dot(f.binormal));
    }
  }
  return out;
}

int count_roots(const std::vector<double>& samples, double zero_band) {
  if (samples.size() < 2) throw SpecError("count_roots: need at least 2 samples");
  int roots = 0;
  if (std::abs(samples.front()) <= zero_band) ++roots;
  if (std::abs(samples.back()) <= zero_band) ++roots;
  int last_sign = 0;
  for (double v : samples) {
    if (std::abs(v) <= zero_band) continue;
    const int sgn = v > 0 ? 1 : -1;
    if (last_sign != 0 && sgn != last_sign) ++roots;
    last_sign = sgn;
  }
  return roots;
}

int count_roots(const std::vector<double>& samples) {
  double peak = 0.0;
  for (double v : samples) peak = std::max(peak, std::abs(v));
  return count_roots(samples, 1e-3 * peak);
}

int count_touch_zeros(const std::vector<double>& samples, double zero_band) {
  if (samples.size() < 2) throw SpecError("count_touch_zeros: need at least 2 samples");
  const std::size_t n = samples.size();
  int zeros = 0;
  std::size_t i = 0;
  while (i < n) {
    // A plateau [i, j) of equal values is one candidate minimum.
    std::size_t j = i + 1;
    while (j < n && samples[j] == samples[i]) ++j;
    const bool left_ok = i == 0 || samples[i - 1] > samples[i];
    const bool right_ok = j == n || samples[j] > samples[i];
    if (left_ok && right_ok && samples[i] <= zero_band) ++zeros;
    i = j;
  }
  return zeros;
}

int count_touch_zeros(const std::vector<double>& samples) {
  double peak = 0.0;
  for (double v : samples) peak = std::max(peak, std::abs(v));
  return count_touch_zeros(samples, 1e-2 * peak);
}

}  // namespace curvemesh
