#pragma once

#include <functional>
#include <optional>
#include <string>

#include "mcshape/adjoint.hpp"

namespace mcs {

struct OptimizerConfig {
  double sigma = 1e-4;    // Armijo constant
  double t0 = 1.0;        // initial step
  double eps_rel = 1e-3;  // relative gradient stopping tolerance
  int max_iter = 20;
  int max_linesearch = 30;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double J = 0, J1 = 0, J2 = 0, J3 = 0, Q = 0;
  double grad_norm = 0, grad_norm_rel = 0, step = 0;
  int n_backtracks = 0;
};

struct OptimizationHistory {
  std::vector<IterationRecord> records;
  std::string termination;  // converged | max_iter | linesearch_failed
};

/// Armijo sufficient-decrease test with descent_value = a(G, V_s) = -a(G,G).
bool armijo_accept(double j_old, double j_new, double t, double descent_value, double sigma);

/// Relative gradient-norm stopping test; converged at start if grad_norm0 = 0.
bool stopping(double grad_norm, double grad_norm0, double eps_rel);

struct LineSearchResult {
  double t = 0;
  double j_new = 0;
  int n_backtracks = 0;
};

/// Halves t until the quality gate and, once it holds, the Armijo test on
/// evaluate(t) both pass. The quality gate runs before any cost evaluation.
std::optional<LineSearchResult> line_search(double j_old, double descent_value, double t0,
                                            double sigma, int max_halvings,
                                            const std::function<bool(double)>& quality,
                                            const std::function<double(double)>& evaluate);

struct RunResult {
  Mesh mesh;
  OptimizationHistory history;
  StateSolution final_state;
  CostValue final_cost;
};

using IterationCallback =
    std::function<void(int iter, const Mesh&, const Spaces&, const StateSolution&)>;

/// Gradient descent with Armijo backtracking, mesh-quality gating, step
/// doubling after acceptance, and the relative-gradient stopping criterion.
/// Weights and the per-cell stiffness are frozen on mesh0.
RunResult run(const Mesh& mesh0, const PhysicalParams& params, ModelKind model,
              const DarcyParams* darcy, const SupgConfig& supg, ElasticityConfig elas,
              const OptimizerConfig& opt, std::optional<double> q_des_absolute,
              double q_des_relative, const IterationCallback& callback = {});

}  // namespace mcs
