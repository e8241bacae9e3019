#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "sica/linalg.hpp"
#include "sica/penalty.hpp"

namespace sica {

// Largest support size handled by exact vertex enumeration.
inline constexpr std::size_t kMaxVertexSupport = 20;

/// Recoverability of beta0 as a local minimizer of the constrained problem.
/// lhs is the largest |<x_j, u>| over noise columns j and u in U_eps; rhs is
/// rho'(0+).
struct RecoveryCertificate {
  double lhs = 0.0;
  double rhs = 0.0;
  double epsilon_box = 0.0;
  bool satisfied = false;
  bool q_condition_ok = false;
  // lhs came from the interval bound rather than vertex enumeration.
  bool conservative = false;
};

// Exact evaluation by enumerating the 2^s vertices of the box V_eps.
// Throws DomainError if epsilon_box is not in (0, min |beta0_j|) and
// ResourceError if s > kMaxVertexSupport.
RecoveryCertificate recovery_condition(const DesignProblem& problem, const PenaltySpec& pen,
                                       double epsilon_box);

// Interval-arithmetic bound on lhs, valid for any s; flagged conservative.
RecoveryCertificate recovery_condition_interval(const DesignProblem& problem,
                                                const PenaltySpec& pen, double epsilon_box);

// max_{j not in M0} |<x_j, X_M0 Q^{-1} sgn(beta0_M0)>|, the L1 single-point
// quantity.
double irrepresentable_lhs(const DesignProblem& problem);

struct AoptResult {
  double value = 0.0;  // +inf when the L1 penalty already satisfies the condition
  bool l1_optimal = false;
  // Some grid point below the reported value was infeasible.
  bool nonmonotone = false;
};

// Largest SICA a for which the recoverability inequality with rhs 1 + 1/a
// holds: a log-grid scan over [1e-4, 1e4] refined by bisection to 1e-6
// relative.
AoptResult a_opt(const DesignProblem& problem, double epsilon_box);

// Closed form for the orthonormal single-noise-column construction; +inf
// when |r| <= s^{-1/2}.
double example1_closed_form(double beta_min, double epsilon_box, double r, std::size_t s);

struct LocalMinCertificate {
  bool vacuous_support = false;
  double stationarity_residual = 0.0;
  double sign_margin = 0.0;
  double curvature_margin = 0.0;
  bool certified = false;
};

// Sufficient conditions for beta_hat to be a strict local minimizer of the
// penalized least-squares objective at level lambda > 0.
LocalMinCertificate strict_local_min(const DesignProblem& problem, const Eigen::VectorXd& beta_hat,
                                     const PenaltySpec& pen, double lambda);

struct OracleAudit {
  double c1n = 0.0;
  double c2n = 0.0;
  double d1n = 0.0;
  double d2n = 0.0;
  double c0 = 0.0;
  double b0 = 0.0;
  double capC = 0.0;
  double kappa0 = 0.0;
  double u_n = 0.0;
  double sigma = 0.0;
  double lambda_min_q = 0.0;
  // rho'(c0 b0) / rho'(0+) at lambda_lower.
  double derivative_ratio = 0.0;
  double c2n_bound = 0.0;
  double lambda_lower = 0.0;
  double lambda_upper = 0.0;
  bool lambda_lower_converged = true;
  bool lambda_upper_converged = true;
  double rate_value = 0.0;
  // -log(rate_value) / log(n): the exponent gamma with rate_value = n^-gamma.
  double gamma_rate = 0.0;
  double u_n_bound = 0.0;
  double u_n_margin = 0.0;
  double prob_bound = 0.0;
  double h = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  bool feasible = false;
};

// Finite-sample quantities behind the weak oracle property at the instance
// (X, beta0). Throws NotCertifiableError when X_M0^T X_M0 is singular.
OracleAudit weak_oracle_audit(const DesignProblem& problem, const PenaltySpec& pen, double sigma,
                              double u_n, double c0, double capC);

}  // namespace sica
