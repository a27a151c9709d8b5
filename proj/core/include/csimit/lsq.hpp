#pragma once

#include <vector>

#include <Eigen/Dense>

namespace csimit {

struct SimplexLsqSolution {
  Eigen::VectorXd x;
  double residual_inf = 0.0;  // ||Ax - b||_inf at the returned point
};

/// Minimizes ||Ax - b||^2 over the product of simplices described by
/// `blocks` (each block of indices sums to one, all entries nonnegative);
/// among the minimizers, returns the minimum-Euclidean-norm point.
///
/// Two-phase active-set QP with exact KKT solves: the optimal face of the
/// least-squares phase is pinned via Ax = Ax*, then ||x||^2 is minimized on
/// it. Deterministic for fixed inputs.
SimplexLsqSolution solve_simplex_least_squares(
    const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
    const std::vector<std::vector<int>>& blocks);

}  // namespace csimit
