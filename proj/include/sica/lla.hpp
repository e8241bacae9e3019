#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sica/linalg.hpp"
#include "sica/penalty.hpp"

namespace sica {

/// Sufficient statistics for coordinate descent on a fixed (X, y): the Gram
/// matrix X^T X and X^T y. Build once and reuse across a tuning grid.
struct GramCache {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::MatrixXd gram;
  Eigen::VectorXd xty;

  GramCache(Eigen::MatrixXd x, Eigen::VectorXd resp);
  Index p() const { return X.cols(); }
};

struct LassoOptions {
  // Stop when every coordinate move changes its gradient entry by less than
  // tol * (1 + ||X^T y||_inf).
  double tol = 1e-13;
  int max_sweeps = 200000;
};

// argmin 0.5 ||y - X b||^2 + gamma sum_j w_j |b_j| by cyclic coordinate
// descent with covariance updates. A warm start never increases the
// objective. Throws DomainError on negative weights or gamma.
Eigen::VectorXd weighted_lasso(const GramCache& cache, const Eigen::VectorXd& w, double gamma,
                               const Eigen::VectorXd* warm = nullptr,
                               const LassoOptions& opts = {});
Eigen::VectorXd weighted_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& w, double gamma,
                               const Eigen::VectorXd* warm = nullptr,
                               const LassoOptions& opts = {});

// Largest violation of the weighted-lasso subgradient conditions.
double weighted_lasso_kkt(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& beta, const Eigen::VectorXd& w, double gamma);

// 0.5 ||y - X beta||^2 + Lambda sum_j p_lambda(|beta_j|).
double penalized_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const PenaltySpec& pen, const Eigen::VectorXd& beta);

struct SelectionFit {
  Eigen::VectorXd beta_hat;
  PenaltySpec pen;
  double lambda = 0.0;
  int outer_iters = 0;
  bool converged = false;
  double kkt_max_violation = 0.0;
  double objective = 0.0;
  IndexSet support;
  // Objective at the initial point followed by one entry per outer iteration.
  std::vector<double> objective_trace;
};

struct LlaOptions {
  int max_outer = 30;
  double tol = 1e-8;
  LassoOptions inner;
};

// Local linear approximation: repeatedly solves the weighted lasso with
// weights rho'(|beta_j|) until the iterates stop moving. The default start
// is the plain lasso at the same (lambda, Lambda).
SelectionFit lla_fit(const GramCache& cache, const PenaltySpec& pen, double lambda,
                     const std::optional<Eigen::VectorXd>& init = std::nullopt,
                     const LlaOptions& opts = {});
SelectionFit lla_fit(const DesignProblem& problem, const PenaltySpec& pen, double lambda,
                     const std::optional<Eigen::VectorXd>& init = std::nullopt,
                     const LlaOptions& opts = {});

// Stationarity violation of the penalized problem:
// active j: |x_j^T r - Lambda lambda rho_bar(beta_j)|,
// inactive j: (|x_j^T r| - Lambda lambda rho'(0+))_+.
double penalized_kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const PenaltySpec& pen, const Eigen::VectorXd& beta);

struct ZEstimatorCertificate {
  double eq31_residual = 0.0;
  // Absent when Lambda * lambda == 0 (z is undefined).
  std::optional<double> eq32_margin;
  double eq33_margin = 0.0;

  bool holds(double tol = 1e-6) const {
    return eq31_residual <= tol && (!eq32_margin || *eq32_margin >= -tol) &&
           eq33_margin >= -tol;
  }
};

// Evaluates the three Z-estimator conditions at fit.beta_hat. Throws
// NotCertifiableError when X_S^T X_S is singular on the fitted support.
ZEstimatorCertificate zestimator_check(const DesignProblem& problem, const SelectionFit& fit);

}  // namespace sica
