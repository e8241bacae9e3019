#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sica/linalg.hpp"

namespace sica {

std::vector<double> default_sirs_a_grid();

/// Tuning of the sequentially and iteratively reweighted squares solver.
/// Zero-valued sparsity_budget, max_restarts and floor_constant mean "derive
/// from the problem size" (ceil(n/2), S and 1/p respectively).
struct SirsConfig {
  std::size_t sparsity_budget = 0;
  int max_iters = 50;
  std::size_t max_restarts = 0;
  double floor_constant = 0.0;
  std::vector<double> a_grid = default_sirs_a_grid();
  double converge_tol = 1e-8;
  double hard_threshold = 1e-6;
  // Absolute ridge for the inner solve; defaults to default_ridge().
  std::optional<double> ridge;

  // Copy with size-dependent defaults filled in; throws DomainError on
  // invalid settings.
  SirsConfig resolved(Index n, Index p) const;
};

struct RestartTrace {
  std::size_t restart = 0;
  int iterations = 0;
  bool converged = false;
  std::size_t nonzeros = 0;
};

struct RecoveryResult {
  Eigen::VectorXd beta_hat;
  IndexSet support;
  double a_used = 0.0;
  std::size_t restarts_used = 0;
  int iterations = 0;
  bool converged = false;
  bool sparse_enough = false;
  std::vector<RestartTrace> trace;
};

// d_j = beta_j^2 / rho_a(|beta_j|) = |beta_j| (a + |beta_j|) / (a + 1); the
// a = 0 and a = inf limits are beta_j^2 and |beta_j|.
Eigen::VectorXd sirs_weights(double a, const Eigen::VectorXd& beta);

// One reweighted minimum-norm step v(beta_prev), via ridge_limit_apply.
Eigen::VectorXd sirs_step(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& beta_prev, double a,
                          std::optional<double> ridge = std::nullopt);

// beta^T Gamma(point) beta with Gamma = diag(1/d_j(point)), 0/0 = 0, x/0 = inf.
double surrogate_objective(const Eigen::VectorXd& beta, const Eigen::VectorXd& point, double a);

RecoveryResult sirs_recover(const DesignProblem& problem, const SirsConfig& cfg, double a);

// Runs sirs_recover over cfg.a_grid and keeps the sparsest sufficiently
// sparse, converged result (ties go to the earlier grid entry).
RecoveryResult sirs_auto(const DesignProblem& problem, const SirsConfig& cfg);

// ||v(beta) - beta||_inf with v evaluated exactly through the pseudoinverse.
// Throws DomainError when y != X beta beyond 1e-8 relative.
double check_fixed_point(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& beta, double a = 1.0);

}  // namespace sica
