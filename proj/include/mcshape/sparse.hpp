#pragma once

#include <span>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "mcshape/mesh.hpp"

namespace mcs {

/// Square sparse system in compressed-row layout plus right-hand side.
struct SparseSystem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::VectorXd b;

  int size() const { return static_cast<int>(A.rows()); }
};

/// Accumulates triplets in deterministic order; build() compresses and keeps
/// an explicit (possibly zero) diagonal so Dirichlet rows always have a slot.
class SystemBuilder {
 public:
  explicit SystemBuilder(int n) : n_(n), rhs_(Eigen::VectorXd::Zero(n)) {}

  void add(int i, int j, double v) { triplets_.emplace_back(i, j, v); }
  void add_rhs(int i, double v) { rhs_[i] += v; }
  Eigen::VectorXd& rhs() { return rhs_; }

  SparseSystem build();

 private:
  int n_;
  std::vector<Eigen::Triplet<double>> triplets_;
  Eigen::VectorXd rhs_;
};

/// Replaces the constrained rows by identity rows with rhs = value. Solutions
/// of the modified system satisfy the constraints exactly.
void apply_dirichlet(SparseSystem& system, std::span<const int> dofs,
                     std::span<const double> values);
void apply_dirichlet(SparseSystem& system, std::span<const std::pair<int, double>> constraints);

/// Sparse LU with a reusable factorization. Throws on singular matrices and
/// verifies the relative residual is below 1e-10 on every solve.
class DirectSolver {
 public:
  explicit DirectSolver(const SparseSystem& system);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd solve() const { return solve(b_); }

 private:
  Eigen::SparseMatrix<double> A_;
  Eigen::VectorXd b_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

Eigen::VectorXd solve_direct(const SparseSystem& system);

}  // namespace mcs
