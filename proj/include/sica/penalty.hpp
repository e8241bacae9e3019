#pragma once

#include <limits>
#include <string>

#include <Eigen/Dense>

namespace sica {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Family { kSica, kL1, kL0, kScad, kMcp, kLog };

/// A member of a concave penalty family together with its regularization
/// level `lambda` and scale `big_lambda`.
///
/// The normalized penalty is rho(t) = p_lambda(t) / lambda. For SICA and the
/// log penalty rho does not depend on lambda; for SCAD and MCP it does, and
/// evaluating rho for those families requires lambda > 0.
///
/// SICA with a = 0 is the L0 limit and a = +inf is the L1 limit; both are
/// dispatched as explicit branches.
struct PenaltySpec {
  Family family = Family::kSica;
  double a = 1.0;
  double lambda = 0.0;
  double big_lambda = 1.0;

  static PenaltySpec sica(double a, double lambda = 0.0, double big_lambda = 1.0);
  static PenaltySpec l1(double lambda = 0.0, double big_lambda = 1.0);
  static PenaltySpec l0(double lambda = 0.0, double big_lambda = 1.0);
  static PenaltySpec scad(double a, double lambda, double big_lambda = 1.0);
  static PenaltySpec mcp(double a, double lambda, double big_lambda = 1.0);
  static PenaltySpec log_penalty(double a, double lambda = 0.0, double big_lambda = 1.0);

  // Throws DomainError when the family parameters are out of range.
  void validate() const;

  PenaltySpec with_lambda(double new_lambda) const {
    PenaltySpec out = *this;
    out.lambda = new_lambda;
    return out;
  }
  PenaltySpec with_a(double new_a) const {
    PenaltySpec out = *this;
    out.a = new_a;
    return out;
  }

  bool is_l1() const { return family == Family::kL1 || (family == Family::kSica && a == kInf); }
  bool is_l0() const { return family == Family::kL0 || (family == Family::kSica && a == 0.0); }
  bool has_derivative() const { return !is_l0(); }
  // rho depends on lambda (SCAD, MCP).
  bool lambda_coupled() const { return family == Family::kScad || family == Family::kMcp; }

  // Effective weight on the normalized penalty in the objective, Lambda * lambda.
  double scale() const { return big_lambda * lambda; }

  std::string name() const;
};

Family parse_family(const std::string& name);
std::string family_name(Family family);

double rho(const PenaltySpec& pen, double t);

// p_lambda(t) = lambda * rho(t). Zero when lambda == 0 for every family.
double penalty_value(const PenaltySpec& pen, double t);

// Sum over coordinates of Lambda * p_lambda(|beta_j|).
double penalty_sum(const PenaltySpec& pen, const Eigen::VectorXd& beta);

// Right derivative rho'(t); at t = 0 returns rho'(0+).
double rho_prime(const PenaltySpec& pen, double t);

// sgn(t) * rho'(|t|), with rho_bar(0) = 0.
double rho_bar(const PenaltySpec& pen, double t);
Eigen::VectorXd rho_bar(const PenaltySpec& pen, const Eigen::VectorXd& b);

// -rho''(t) for t > 0, taking the supremum over a vanishing neighbourhood at
// kinks (SCAD, MCP).
double concavity_at(const PenaltySpec& pen, double t);

double max_concavity(const PenaltySpec& pen);

// max_j -rho''(|b_j|). Every component must be nonzero.
double local_concavity(const PenaltySpec& pen, const Eigen::VectorXd& b);

// sup of -rho''(t) over t in [lo, hi], 0 < lo <= hi.
double max_concavity_on_interval(const PenaltySpec& pen, double lo, double hi);

// Smallest SICA a giving a continuous thresholding rule at level lambda.
double continuity_threshold(double lambda);

// Global minimizer of 0.5 (z - theta)^2 + Lambda p_lambda(|theta|). Exact
// ties resolve toward theta = 0.
double scalar_threshold(const PenaltySpec& pen, double z);

inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

}  // namespace sica
