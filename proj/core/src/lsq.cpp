#include "csimit/lsq.hpp"

#include <limits>
#include <stdexcept>

namespace csimit {

namespace {

constexpr double kEps = 1e-11;

// Minimize 0.5 x^T G x - h^T x  s.t.  C x = d, x >= 0, via a primal
// active-set method. `x0` must be feasible. G must make the problem bounded
// on the feasible set (true for both phases below).
Eigen::VectorXd active_set_qp(const Eigen::MatrixXd& G,
                              const Eigen::VectorXd& h,
                              const Eigen::MatrixXd& C,
                              const Eigen::VectorXd& d, Eigen::VectorXd x) {
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(C.rows());
  std::vector<char> active(n, 0);
  for (int i = 0; i < n; ++i) {
    if (x[i] <= kEps) {
      active[i] = 1;
      x[i] = 0.0;
    }
  }

  const int max_iter = 100 + 20 * n;
  for (int iter = 0; iter < max_iter; ++iter) {
    int na = 0;
    for (int i = 0; i < n; ++i) na += active[i];

    // KKT system for the equality-constrained subproblem
    const int dim = n + m + na;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    K.topLeftCorner(n, n) = G;
    K.block(0, n, n, m) = C.transpose();
    K.block(n, 0, m, n) = C;
    rhs.head(n) = h;
    rhs.segment(n, m) = d;
    {
      int row = n + m;
      for (int i = 0; i < n; ++i) {
        if (!active[i]) continue;
        K(row, i) = 1.0;
        K(i, row) = 1.0;
        ++row;
      }
    }
    Eigen::VectorXd sol =
        K.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd xs = sol.head(n);
    for (int i = 0; i < n; ++i) {
      if (active[i]) xs[i] = 0.0;
    }

    Eigen::VectorXd p = xs - x;
    if (p.lpNorm<Eigen::Infinity>() > 1e-12) {
      // longest feasible step toward the subproblem optimum
      double alpha = 1.0;
      int blocking = -1;
      for (int i = 0; i < n; ++i) {
        if (active[i] || p[i] >= -kEps) continue;
        double a = x[i] / (-p[i]);
        if (a < alpha) {
          alpha = a;
          blocking = i;
        }
      }
      x += alpha * p;
      for (int i = 0; i < n; ++i) {
        if (x[i] < 0.0) x[i] = 0.0;
      }
      if (blocking >= 0 && alpha < 1.0) {
        active[blocking] = 1;
        x[blocking] = 0.0;
        continue;
      }
    }

    // At the subproblem optimum: check multipliers of the active bounds.
    // grad = G x - h must equal C^T lambda + sum_{i active} mu_i e_i.
    Eigen::VectorXd grad = G * x - h;
    Eigen::MatrixXd N(n, m + na);
    N.leftCols(m) = C.transpose();
    {
      int col = m;
      for (int i = 0; i < n; ++i) {
        if (!active[i]) continue;
        N.col(col).setZero();
        N(i, col) = 1.0;
        ++col;
      }
    }
    Eigen::VectorXd lm = N.completeOrthogonalDecomposition().solve(grad);
    int worst = -1;
    double worst_mu = -1e-9;
    {
      int col = m;
      for (int i = 0; i < n; ++i) {
        if (!active[i]) continue;
        double mu = lm[col];
        if (mu < worst_mu) {
          worst_mu = mu;
          worst = i;
        }
        ++col;
      }
    }
    if (worst < 0) return x;  // KKT satisfied
    active[worst] = 0;
  }
  return x;  // iteration guard; desk-scale systems converge well before this
}

}  // namespace

SimplexLsqSolution solve_simplex_least_squares(
    const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
    const std::vector<std::vector<int>>& blocks) {
  const int n = static_cast<int>(A.cols());
  if (n == 0) throw std::invalid_argument("simplex lsq: no unknowns");

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(blocks.size(), n);
  Eigen::VectorXd d = Eigen::VectorXd::Ones(blocks.size());
  std::vector<char> covered(n, 0);
  for (std::size_t r = 0; r < blocks.size(); ++r) {
    for (int i : blocks[r]) {
      C(static_cast<int>(r), i) = 1.0;
      covered[i] = 1;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!covered[i]) {
      throw std::invalid_argument("simplex lsq: unknown not in any block");
    }
  }

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  for (const auto& block : blocks) {
    for (int i : block) x0[i] = 1.0 / static_cast<double>(block.size());
  }

  SimplexLsqSolution out;
  if (A.rows() == 0) {
    out.x = x0;  // min-norm feasible point of a vacuous system
    out.residual_inf = 0.0;
    return out;
  }

  // phase 1: least squares over the feasible set
  Eigen::MatrixXd G1 = 2.0 * A.transpose() * A;
  Eigen::VectorXd h1 = 2.0 * A.transpose() * b;
  Eigen::VectorXd x1 = active_set_qp(G1, h1, C, d, x0);

  // phase 2: minimum norm on the optimal face (Ax pinned)
  Eigen::MatrixXd C2(C.rows() + A.rows(), n);
  C2.topRows(C.rows()) = C;
  C2.bottomRows(A.rows()) = A;
  Eigen::VectorXd d2(C.rows() + A.rows());
  d2.head(C.rows()) = d;
  d2.tail(A.rows()) = A * x1;
  Eigen::MatrixXd G2 = 2.0 * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd h2 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd x2 = active_set_qp(G2, h2, C2, d2, x1);

  out.x = x2;
  out.residual_inf = (A * x2 - b).lpNorm<Eigen::Infinity>();
  return out;
}

}  // namespace csimit
