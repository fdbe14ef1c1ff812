#include "mcshape/sparse.hpp"

#include <stdexcept>
#include <string>

namespace mcs {

SparseSystem SystemBuilder::build() {
  for (int i = 0; i < n_; ++i) triplets_.emplace_back(i, i, 0.0);
  SparseSystem sys;
  sys.A.resize(n_, n_);
  sys.A.setFromTriplets(triplets_.begin(), triplets_.end());
  sys.b = rhs_;
  return sys;
}

void apply_dirichlet(SparseSystem& system, std::span<const int> dofs,
                     std::span<const double> values) {
  if (dofs.size() != values.size())
    throw std::runtime_error("apply_dirichlet: dof/value count mismatch");
  for (size_t k = 0; k < dofs.size(); ++k) {
    const int r = dofs[k];
    if (r < 0 || r >= system.size()) throw std::runtime_error("apply_dirichlet: dof out of range");
    bool diag_seen = false;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(system.A, r); it; ++it) {
      if (it.col() == r) {
        it.valueRef() = 1.0;
        diag_seen = true;
      } else {
        it.valueRef() = 0.0;
      }
    }
    if (!diag_seen) throw std::runtime_error("apply_dirichlet: missing diagonal entry");
    system.b[r] = values[k];
  }
}

void apply_dirichlet(SparseSystem& system, std::span<const std::pair<int, double>> constraints) {
  std::vector<int> dofs;
  std::vector<double> values;
  dofs.reserve(constraints.size());
  values.reserve(constraints.size());
  for (const auto& [d, v] : constraints) {
    dofs.push_back(d);
    values.push_back(v);
  }
  apply_dirichlet(system, dofs, values);
}

DirectSolver::DirectSolver(const SparseSystem& system) : A_(system.A), b_(system.b) {
  A_.makeCompressed();
  lu_.analyzePattern(A_);
  lu_.factorize(A_);
  if (lu_.info() != Eigen::Success) {
    std::string msg = lu_.lastErrorMessage();
    throw std::runtime_error("solve_direct: singular matrix (" +
                             (msg.empty() ? std::string("factorization failed") : msg) + ")");
  }
}

Eigen::VectorXd DirectSolver::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success) throw std::runtime_error("solve_direct: back-substitution failed");
  const double bnorm = rhs.norm();
  const double rnorm = (A_ * x - rhs).norm();
  if (bnorm > 0.0) {
    if (rnorm > 1e-10 * bnorm)
      throw std::runtime_error("solve_direct: residual " + std::to_string(rnorm / bnorm) +
                               " exceeds 1e-10");
  } else if (rnorm > 1e-14) {
    throw std::runtime_error("solve_direct: nonzero residual for zero rhs");
  }
  return x;
}

Eigen::VectorXd solve_direct(const SparseSystem& system) {
  return DirectSolver(system).solve(system.b);
}

}  // namespace mcs
