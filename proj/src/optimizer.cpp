#include "mcshape/optimizer.hpp"

#include <stdexcept>

namespace mcs {

void OptimizerConfig::validate() const {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::runtime_error("optimizer: sigma must be in (0,1)");
  if (!(t0 > 0.0)) throw std::runtime_error("optimizer: t0 must be > 0");
  if (!(eps_rel > 0.0)) throw std::runtime_error("optimizer: eps_rel must be > 0");
  if (max_iter < 1) throw std::runtime_error("optimizer: max_iter must be >= 1");
  if (max_linesearch < 1) throw std::runtime_error("optimizer: max_linesearch must be >= 1");
}

bool armijo_accept(double j_old, double j_new, double t, double descent_value, double sigma) {
  return j_new <= j_old + sigma * t * descent_value;
}

bool stopping(double grad_norm, double grad_norm0, double eps_rel) {
  if (!(grad_norm0 > 0.0)) return true;
  return grad_norm / grad_norm0 <= eps_rel;
}

std::optional<LineSearchResult> line_search(double j_old, double descent_value, double t0,
                                            double sigma, int max_halvings,
                                            const std::function<bool(double)>& quality,
                                            const std::function<double(double)>& evaluate) {
  double t = t0;
  for (int k = 0; k <= max_halvings; ++k) {
    if (quality(t)) {
      const double j_new = evaluate(t);
      if (armijo_accept(j_old, j_new, t, descent_value, sigma)) return LineSearchResult{t, j_new, k};
    }
    t *= 0.5;
  }
  return std::nullopt;
}

RunResult run(const Mesh& mesh0, const PhysicalParams& params, ModelKind model,
              const DarcyParams* darcy, const SupgConfig& supg, ElasticityConfig elas,
              const OptimizerConfig& opt, std::optional<double> q_des_absolute,
              double q_des_relative, const IterationCallback& callback) {
  opt.validate();
  elas.nu = relative_stiffness(mesh0);

  RunResult result;
  result.mesh = mesh0;
  auto spaces = std::make_unique<Spaces>(result.mesh);
  StokesOperator stokes;
  result.final_state =
      solve_state(result.mesh, *spaces, params, model, darcy, supg, nullptr, &stokes);
  const CostConfig cfg = make_cost_config(result.mesh, *spaces, result.final_state, params, model,
                                          darcy, q_des_absolute, q_des_relative);
  if (callback) callback(0, result.mesh, *spaces, result.final_state);

  double t_next = opt.t0;
  double grad_norm0 = -1.0;
  result.history.termination = "max_iter";

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    try {
      const CostValue cv =
          cost(result.mesh, *spaces, result.final_state, cfg, params, model, darcy);
      const AdjointSolution adj = solve_adjoint(result.mesh, *spaces, params, model, darcy, supg,
                                                result.final_state, cfg, &stokes);
      const Eigen::VectorXd dj = shape_derivative_functional(
          result.mesh, *spaces, params, model, darcy, result.final_state, adj, cfg);
      const ShapeGradientResult grad = shape_gradient(result.mesh, dj, elas, model);
      if (iter == 0) grad_norm0 = grad.norm;
      const double rel = grad_norm0 > 0.0 ? grad.norm / grad_norm0 : 0.0;

      IterationRecord rec;
      rec.iter = iter;
      rec.J = cv.J;
      rec.J1 = cv.J1;
      rec.J2 = cv.J2;
      rec.J3 = cv.J3;
      rec.Q = cv.Q;
      rec.grad_norm = grad.norm;
      rec.grad_norm_rel = iter == 0 ? 1.0 : rel;

      if (stopping(grad.norm, grad_norm0, opt.eps_rel)) {
        result.history.records.push_back(rec);
        result.history.termination = "converged";
        break;
      }

      VectorFieldP1 direction;
      direction.values = -grad.field.values;
      const double descent_value = -grad.norm * grad.norm;

      // The gradient's magnitude is set by the elasticity parameters, not the
      // geometry, so a fixed t0 can sit many octaves above the quality gate.
      // Clamp the first trial into the gate's feasible range; the halving and
      // doubling policy is untouched from here on.
      if (iter == 0) {
        double max_dv = 0.0;
        for (int c = 0; c < result.mesh.n_cells(); ++c)
          max_dv = std::max(max_dv, p1_jacobian(result.mesh, c, direction).norm());
        if (max_dv > 0.0) t_next = std::min(t_next, 0.3 / max_dv);
      }

      Mesh trial_mesh;
      std::unique_ptr<Spaces> trial_spaces;
      StokesOperator trial_stokes;
      StateSolution trial_state;
      auto quality = [&](double t) { return quality_check(result.mesh, direction, t); };
      auto evaluate = [&](double t) {
        trial_mesh = deform(result.mesh, direction, t);
        trial_spaces = std::make_unique<Spaces>(trial_mesh);
        trial_state =
            solve_state(trial_mesh, *trial_spaces, params, model, darcy, supg, nullptr, &trial_stokes);
        return cost(trial_mesh, *trial_spaces, trial_state, cfg, params, model, darcy).J;
      };

      const auto ls = line_search(cv.J, descent_value, t_next, opt.sigma, opt.max_linesearch,
                                  quality, evaluate);
      if (!ls) {
        rec.step = 0.0;
        rec.n_backtracks = opt.max_linesearch;
        result.history.records.push_back(rec);
        result.history.termination = "linesearch_failed";
        break;
      }

      rec.step = ls->t;
      rec.n_backtracks = ls->n_backtracks;
      result.history.records.push_back(rec);

      result.mesh = std::move(trial_mesh);
      spaces = std::move(trial_spaces);
      stokes = std::move(trial_stokes);
      result.final_state = std::move(trial_state);
      if (callback) callback(iter + 1, result.mesh, *spaces, result.final_state);
      t_next = 2.0 * ls->t;
    } catch (const std::exception& err) {
      throw std::runtime_error("optimizer: iteration " + std::to_string(iter) + ": " + err.what());
    }
  }

  result.final_cost = cost(result.mesh, *spaces, result.final_state, cfg, params, model, darcy);
  return result;
}

}  // namespace mcs
