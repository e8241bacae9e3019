#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace sica {

using Eigen::Index;
using IndexSet = std::vector<Index>;

// Relative singular-value cutoff used for numerical rank everywhere.
inline constexpr double kRankTol = 1e-10;

/// Design matrix X (n x p), response y, and optionally the true coefficient
/// vector beta0. The true support is always derived from beta0.
struct DesignProblem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::optional<Eigen::VectorXd> beta0;

  DesignProblem() = default;
  DesignProblem(Eigen::MatrixXd x, Eigen::VectorXd resp,
                std::optional<Eigen::VectorXd> truth = std::nullopt);

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }

  // Throws DomainError on inconsistent dimensions or an all-zero column.
  void validate() const;

  // supp(beta0); throws DomainError when beta0 is absent.
  IndexSet support0() const;
  const Eigen::VectorXd& truth() const;
};

IndexSet support_of(const Eigen::VectorXd& v);
IndexSet complement(const IndexSet& s, Index p);
Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, const IndexSet& s);
Eigen::VectorXd select_entries(const Eigen::VectorXd& v, const IndexSet& s);

// Moore-Penrose solve A^+ b via SVD, zeroing singular values below
// rel_tol * sigma_max.
Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           double rel_tol = kRankTol);

// (X^T X)^+ X^T y: the minimum-norm least-squares solution, which is the
// minimum L2-norm exact solution whenever y lies in range(X).
Eigen::VectorXd min_l2_solution(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                double rel_tol = kRankTol);

// D X^T (X D X^T)^+ y computed exactly through the SVD of X D^{1/2}.
Eigen::VectorXd weighted_min_norm(const Eigen::MatrixXd& X, const Eigen::VectorXd& d,
                                  const Eigen::VectorXd& y, double rel_tol = kRankTol);

// 1e-12 * trace(X D X^T) / n.
double default_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& d);

// Ridge approximation of D X^T (X D X^T)^+ y.
//
// For p >= n forms the n x n system (ridge I_n + X D X^T) at O(n^2 p) cost;
// for p < n uses the equivalent p x p form
// D^{1/2} (ridge I_p + D^{1/2} X^T X D^{1/2})^{-1} D^{1/2} X^T y at O(n p^2).
// When ridge is omitted default_ridge is used.
Eigen::VectorXd ridge_limit_apply(const Eigen::MatrixXd& X, const Eigen::VectorXd& d,
                                  const Eigen::VectorXd& y,
                                  std::optional<double> ridge = std::nullopt);

int numerical_rank(const Eigen::MatrixXd& A, double rel_tol = kRankTol);

// Smallest k <= max_card such that some k columns of X are linearly
// dependent, or nullopt when no such subset exists up to max_card.
// Throws ResourceError when C(p, max_card) exceeds 1e7.
std::optional<std::size_t> spark_bruteforce(const Eigen::MatrixXd& X, std::size_t max_card);

// lambda_min(X_S^T X_S), clamped at zero.
double gram_min_eigen(const Eigen::MatrixXd& X, const IndexSet& S);

// max absolute row sum.
double matrix_inf_norm(const Eigen::MatrixXd& A);

}  // namespace sica
