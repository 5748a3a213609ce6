#include "curvemesh/optimizer.hpp"

#include <Eigen/SparseLU>

#include <chrono>
#include <cmath>
#include <limits>

namespace curvemesh {

void Config::validate() const {
  if (!(tol > 0)) throw SpecError("Config: tol must be positive");
  if (max_iterations < 1 || barrier_passes < 1) throw SpecError("Config: iteration limits must be >= 1");
  if (!(0 < sigma1 && sigma1 < sigma2 && sigma2 < 1)) throw SpecError("Config: need 0 < sigma1 < sigma2 < 1");
  if (!(0 <= eta && eta <= 1)) throw SpecError("Config: eta must lie in [0, 1]");
  if (!(0 < mu_shrink && mu_shrink < 1)) throw SpecError("Config: mu_shrink must lie in (0, 1)");
  if (max_halvings < 0) throw SpecError("Config: max_halvings must be >= 0");
}

LineSearchState zh_update(const LineSearchState& state, double eta, double value) {
  LineSearchState next;
  next.Q = eta * state.Q + 1.0;
  next.C = (eta * state.Q * state.C + value) / next.Q;
  return next;
}

namespace {

Vector diagonal_fallback(const Vector& grad, const Vector& diag) {
  Vector d(grad.size());
  for (Eigen::Index i = 0; i < grad.size(); ++i) d[i] = -grad[i] / std::max(std::abs(diag[i]), 1e-12);
  return d;
}

Vector finish_direction(const Vector& grad, const Vector& newton, bool solved, const Vector& diag) {
  if (solved && newton.allFinite() && newton.dot(grad) < 0) return newton;
  Vector d = diagonal_fallback(grad, diag);
  if (d.allFinite() && d.dot(grad) < 0) return d;
  return -grad;
}

}  // namespace

Vector descent_direction(const Vector& grad, const SparseMatrix& hess) {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  SparseMatrix H = hess;
  H.makeCompressed();
  lu.compute(H);
  Vector newton;
  bool solved = lu.info() == Eigen::Success;
  if (solved) {
    newton = lu.solve(-grad);
    solved = lu.info() == Eigen::Success;
  }
  return finish_direction(grad, newton, solved, Vector(hess.diagonal()));
}

Vector descent_direction(const Vector& grad, const Matrix& hess) {
  Eigen::FullPivLU<Matrix> lu(hess);
  const bool solved = lu.isInvertible();
  Vector newton;
  if (solved) newton = lu.solve(-grad);
  return finish_direction(grad, newton, solved, Vector(hess.diagonal()));
}

LineSearchResult line_search(const std::function<double(const Vector&)>& objective, const Vector& iterate,
                             const Vector& grad, const Vector& direction, const LineSearchState& state,
                             const Config& config) {
  const double slope = grad.dot(direction);
  LineSearchResult res;
  res.iterate = iterate;
  double alpha = 1.0;
  for (int h = 0; h <= config.max_halvings; ++h) {
    Vector trial = iterate + alpha * direction;
    const double value = objective(trial);
    ++res.trials;
    if (std::isfinite(value) && value <= state.C + config.sigma1 * alpha * slope) {
      res.accepted = true;
      res.alpha = alpha;
      res.iterate = std::move(trial);
      res.value = value;
      res.halvings = h;
      return res;
    }
    alpha *= 0.5;
  }
  res.halvings = config.max_halvings;
  return res;
}

namespace {

double safe_value(Problem& work, const Vector& z) {
  scatter(z, work.layout, work.x, work.s);
  try {
    return evaluate(work, EvalLevel::value).value;
  } catch (const DomainError&) {
  } catch (const DegenerateError&) {
  } catch (const InvalidParametrization&) {
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

OptimizeResult optimize(std::shared_ptr<const Curve> curve, const PhysicalMesh& x0, const ParametricMesh& s0,
                        Layout layout, const Config& config) {
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();

  Problem pb = make_problem(std::move(curve), x0, s0, layout, 0.0, config.quadrature_points);
  const int oversample = config.oversample_for(pb.s.degree());
  if (!check_validity(pb.s, oversample, pb.quadrature))
    throw SpecError("optimize: initial parametrization is invalid (s' changes sign)");

  OptimizeReport rep;
  rep.E_initial = evaluate(pb, EvalLevel::value).energy;

  Vector z = gather(pb.x, pb.s, pb.layout);
  Problem work = pb;
  const auto objective = [&work](const Vector& v) { return safe_value(work, v); };

  bool barrier_on = false;
  bool pass_converged = false;
  for (int m = 0; m < config.barrier_passes; ++m) {
    ++rep.passes;
    pb.mu *= config.mu_shrink;
    work.mu = pb.mu;
    scatter(z, pb.layout, pb.x, pb.s);
    pass_converged = false;
    bool activated = false;

    LineSearchState state = LineSearchState::start(evaluate(pb, EvalLevel::value).value);
    Vector prev_dir;
    double prev_slope = 0.0;

    for (int n = 0; n < config.max_iterations; ++n) {
      const DisparityEval ev = evaluate(pb, EvalLevel::hessian);
      rep.grad_norm_final = ev.grad_norm;
      if (prev_dir.size() > 0 && ev.grad.dot(prev_dir) < config.sigma2 * prev_slope) ++rep.curvature_violations;
      if (ev.grad_norm < config.tol) {
        pass_converged = true;
        break;
      }
      const Vector d = descent_direction(ev.grad, ev.hess);
      ++rep.iterations;
      const LineSearchResult ls = line_search(objective, z, ev.grad, d, state, config);
      rep.line_search_count += ls.trials;
      if (!ls.accepted) {
        rep.line_search_failed = true;
        rep.message = "line search failed after " + std::to_string(config.max_halvings) + " halvings";
        break;
      }
      if (config.log_barrier) {
        scatter(ls.iterate, work.layout, work.x, work.s);
        if (!check_validity(work.s, oversample, pb.quadrature)) {
          // Revert: the barrier takes over from the last valid iterate.
          pb.mu = evaluate(pb, EvalLevel::value).energy;
          barrier_on = true;
          activated = true;
          ++rep.barrier_activations;
          break;
        }
      }
      z = ls.iterate;
      scatter(z, pb.layout, pb.x, pb.s);
      state = zh_update(state, config.eta, ls.value);
      prev_dir = d;
      prev_slope = ev.grad.dot(d);
    }
    (void)activated;
    if (rep.line_search_failed || !barrier_on) break;
  }

  scatter(z, pb.layout, pb.x, pb.s);
  rep.converged = pass_converged && !rep.line_search_failed;
  rep.mu_final = pb.mu;
  {
    Problem fin = pb;
    fin.mu = 0.0;
    rep.E_final = evaluate(fin, EvalLevel::value).energy;
  }
  if (rep.message.empty())
    rep.message = rep.converged ? "converged" : "iteration limit reached before the gradient tolerance";
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return {std::move(pb.x), std::move(pb.s), rep};
}

OptimizeResult optimize_element(std::shared_ptr<const Curve> curve, const PhysicalMesh& x, const ParametricMesh& s,
                                int element, const Config& config) {
  MeshPair local = extract_element(x, s, element);
  return optimize(std::move(curve), local.x, local.s, Layout::constrained, config);
}

PerElementResult optimize_constrained_per_element(std::shared_ptr<const Curve> curve, const PhysicalMesh& x,
                                                  const ParametricMesh& s, const Config& config) {
  PerElementResult out{x, s, {}};
  out.reports.reserve(x.elements());
  for (int e = 0; e < x.elements(); ++e) {
    OptimizeResult r = optimize_element(curve, x, s, e, config);
    insert_element(MeshPair{r.x, r.s}, e, out.x, out.s);
    out.reports.push_back(r.report);
  }
  return out;
}

std::vector<double> preoptimize_linear(std::shared_ptr<const Curve> curve, int elements, const Config& config,
                                       std::vector<double> initial) {
  if (elements < 1) throw SpecError("preoptimize_linear: R must be >= 1");
  if (initial.empty()) initial = uniform_partition(*curve, elements);
  MeshPair m = interpolate_meshes(*curve, elements, 1, 1, initial);
  if (elements == 1) return initial;
  const OptimizeResult r = optimize(curve, m.x, m.s, Layout::unconstrained, config);
  return {r.s.nodes().data(), r.s.nodes().data() + r.s.nodes().size()};
}

}  // namespace curvemesh
