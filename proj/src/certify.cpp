#include "sica/certify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sica/errors.hpp"
#include "sica/lla.hpp"

namespace sica {

namespace {

// Quantities shared by the recovery certificates: the true support, its Gram
// matrix and B = X_{M0^c}^T X_{M0} Q^{-1}.
struct SignalGeometry {
  IndexSet support;
  IndexSet noise;
  Eigen::VectorXd beta_support;
  Eigen::MatrixXd XM;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd B;
  double lambda_min = 0.0;
  bool nonsingular = false;
};

SignalGeometry signal_geometry(const DesignProblem& problem) {
  problem.validate();
  SignalGeometry g;
  g.support = problem.support0();
  g.noise = complement(g.support, problem.p());
  g.beta_support = select_entries(problem.truth(), g.support);
  if (g.support.empty()) {
    g.nonsingular = true;
    g.B = Eigen::MatrixXd::Zero(static_cast<Index>(g.noise.size()), 0);
    return g;
  }
  g.XM = select_columns(problem.X, g.support);
  g.Q = g.XM.transpose() * g.XM;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g.Q, Eigen::EigenvaluesOnly);
  g.lambda_min = eig.eigenvalues().minCoeff();
  g.nonsingular = g.lambda_min > kRankTol * eig.eigenvalues().maxCoeff();
  if (g.nonsingular) {
    const Eigen::MatrixXd Xn = select_columns(problem.X, g.noise);
    const Eigen::MatrixXd cross = g.XM.transpose() * Xn;  // s x |noise|
    g.B = Eigen::LLT<Eigen::MatrixXd>(g.Q).solve(cross).transpose();
  }
  return g;
}

void check_epsilon(const SignalGeometry& g, double epsilon_box) {
  const double bmin = g.beta_support.size() ? g.beta_support.cwiseAbs().minCoeff() : kInf;
  if (!(epsilon_box > 0.0) || !(epsilon_box < bmin)) {
    throw DomainError("epsilon_box must lie in (0, min_j |beta0_j|)");
  }
}

// Endpoints of rho_bar over |t - beta0_j| <= eps for each support coordinate.
void rho_bar_ranges(const SignalGeometry& g, const PenaltySpec& pen, double eps,
                    Eigen::VectorXd* lo, Eigen::VectorXd* hi) {
  const Index s = g.beta_support.size();
  lo->resize(s);
  hi->resize(s);
  for (Index k = 0; k < s; ++k) {
    (*lo)[k] = rho_bar(pen, g.beta_support[k] - eps);
    (*hi)[k] = rho_bar(pen, g.beta_support[k] + eps);
  }
}

double vertex_lhs(const SignalGeometry& g, const PenaltySpec& pen, double eps) {
  const Index s = g.beta_support.size();
  if (g.noise.empty() || s == 0) return 0.0;
  Eigen::VectorXd lo, hi;
  rho_bar_ranges(g, pen, eps, &lo, &hi);
  Eigen::VectorXd r = lo;
  std::vector<bool> at_hi(static_cast<std::size_t>(s), false);
  Eigen::VectorXd w = g.B * r;
  double best = w.lpNorm<Eigen::Infinity>();
  const std::uint64_t count = std::uint64_t{1} << s;
  // Gray-code walk: consecutive vertices differ in one coordinate.
  for (std::uint64_t i = 1; i < count; ++i) {
    const auto k = static_cast<Index>(std::countr_zero(i));
    const auto ks = static_cast<std::size_t>(k);
    at_hi[ks] = !at_hi[ks];
    const double next = at_hi[ks] ? hi[k] : lo[k];
    if ((i & 0xFFFu) == 0) {
      r[k] = next;
      w.noalias() = g.B * r;
    } else {
      w.noalias() += g.B.col(k) * (next - r[k]);
      r[k] = next;
    }
    best = std::max(best, w.lpNorm<Eigen::Infinity>());
  }
  return best;
}

double interval_lhs(const SignalGeometry& g, const PenaltySpec& pen, double eps) {
  const Index s = g.beta_support.size();
  if (g.noise.empty() || s == 0) return 0.0;
  Eigen::VectorXd lo, hi;
  rho_bar_ranges(g, pen, eps, &lo, &hi);
  double best = 0.0;
  for (Index j = 0; j < g.B.rows(); ++j) {
    double upper = 0.0;
    double lower = 0.0;
    for (Index k = 0; k < s; ++k) {
      const double u = g.B(j, k) * lo[k];
      const double v = g.B(j, k) * hi[k];
      upper += std::max(u, v);
      lower += std::min(u, v);
    }
    best = std::max({best, upper, -lower});
  }
  return best;
}

RecoveryCertificate make_certificate(const SignalGeometry& g, const PenaltySpec& pen,
                                     double eps, bool conservative) {
  RecoveryCertificate cert;
  cert.epsilon_box = eps;
  cert.rhs = rho_prime(pen, 0.0);
  cert.q_condition_ok = g.nonsingular;
  cert.conservative = conservative;
  if (!g.nonsingular) {
    cert.lhs = kInf;
    return cert;
  }
  cert.lhs = conservative ? interval_lhs(g, pen, eps) : vertex_lhs(g, pen, eps);
  cert.satisfied = cert.lhs < cert.rhs;
  return cert;
}

void require_finite_concavity(const PenaltySpec& pen) {
  if (!std::isfinite(max_concavity(pen))) {
    throw DomainError("recovery condition requires a penalty with finite maximum concavity");
  }
}

}  // namespace

RecoveryCertificate recovery_condition(const DesignProblem& problem, const PenaltySpec& pen,
                                       double epsilon_box) {
  require_finite_concavity(pen);
  const SignalGeometry g = signal_geometry(problem);
  check_epsilon(g, epsilon_box);
  if (g.support.size() > kMaxVertexSupport) {
    throw ResourceError("recovery_condition: support size " + std::to_string(g.support.size()) +
                        " exceeds the vertex-enumeration limit of " +
                        std::to_string(kMaxVertexSupport));
  }
  return make_certificate(g, pen, epsilon_box, false);
}

RecoveryCertificate recovery_condition_interval(const DesignProblem& problem,
                                                const PenaltySpec& pen, double epsilon_box) {
  require_finite_concavity(pen);
  const SignalGeometry g = signal_geometry(problem);
  check_epsilon(g, epsilon_box);
  return make_certificate(g, pen, epsilon_box, true);
}

double irrepresentable_lhs(const DesignProblem& problem) {
  const SignalGeometry g = signal_geometry(problem);
  if (!g.nonsingular) throw NotCertifiableError("irrepresentable_lhs: singular Gram matrix");
  if (g.noise.empty() || g.support.empty()) return 0.0;
  const Eigen::VectorXd sgn = g.beta_support.array().sign().matrix();
  return (g.B * sgn).lpNorm<Eigen::Infinity>();
}

AoptResult a_opt(const DesignProblem& problem, double epsilon_box) {
  const SignalGeometry g = signal_geometry(problem);
  check_epsilon(g, epsilon_box);
  if (g.support.size() > kMaxVertexSupport) {
    throw ResourceError("a_opt: support size exceeds the vertex-enumeration limit");
  }
  if (!g.nonsingular) throw NotCertifiableError("a_opt: singular Gram matrix on the true support");

  AoptResult out;
  if (irrepresentable_lhs(problem) <= 1.0) {
    out.value = kInf;
    out.l1_optimal = true;
    return out;
  }
  auto feasible = [&](double a) {
    return vertex_lhs(g, PenaltySpec::sica(a), epsilon_box) <= 1.0 + 1.0 / a;
  };

  constexpr int kPerDecade = 20;
  std::vector<double> grid;
  for (int i = 0; i <= 8 * kPerDecade; ++i) grid.push_back(std::pow(10.0, -4.0 + double(i) / kPerDecade));
  std::vector<bool> ok(grid.size());
  int last = -1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ok[i] = feasible(grid[i]);
    if (ok[i]) last = static_cast<int>(i);
  }

  double lo = 0.0;
  double hi = 0.0;
  if (last < 0) {
    double a = grid.front();
    while (a > 1e-12) {
      const double smaller = a / 10.0;
      if (feasible(smaller)) {
        lo = smaller;
        hi = a;
        break;
      }
      a = smaller;
    }
    if (lo == 0.0) throw NotCertifiableError("a_opt: no feasible a found down to 1e-12");
  } else if (last == static_cast<int>(grid.size()) - 1) {
    lo = grid.back();
    hi = 0.0;
    while (lo < 1e12) {
      const double larger = lo * 10.0;
      if (!feasible(larger)) {
        hi = larger;
        break;
      }
      lo = larger;
    }
    if (hi == 0.0) {
      out.value = lo;
      return out;
    }
  } else {
    lo = grid[static_cast<std::size_t>(last)];
    hi = grid[static_cast<std::size_t>(last) + 1];
  }
  for (int i = 0; i < last; ++i) {
    if (!ok[static_cast<std::size_t>(i)]) out.nonmonotone = true;
  }
  while (hi - lo > 1e-6 * lo) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.value = lo;
  return out;
}

double example1_closed_form(double beta_min, double epsilon_box, double r, std::size_t s) {
  if (!(beta_min > 0.0)) throw DomainError("example1_closed_form: beta_min must be positive");
  if (!(epsilon_box > 0.0 && epsilon_box < beta_min)) {
    throw DomainError("example1_closed_form: epsilon must lie in (0, beta_min)");
  }
  if (!(std::abs(r) < 1.0)) throw DomainError("example1_closed_form: r must lie in (-1, 1)");
  if (s == 0) throw DomainError("example1_closed_form: s must be positive");
  const double r2s = r * r * static_cast<double>(s);
  // |r| <= s^{-1/2}, with slack for the rounding of r = 1/sqrt(s).
  if (r2s <= 1.0 + 1e-12) return kInf;
  return (beta_min - epsilon_box) / (std::pow(r2s, 0.25) - 1.0);
}

LocalMinCertificate strict_local_min(const DesignProblem& problem, const Eigen::VectorXd& beta_hat,
                                     const PenaltySpec& pen, double lambda) {
  problem.validate();
  if (beta_hat.size() != problem.p()) throw DomainError("strict_local_min: length mismatch");
  if (!(lambda > 0.0)) throw DomainError("strict_local_min: lambda must be positive");
  LocalMinCertificate cert;
  if (support_of(beta_hat).empty()) {
    cert.vacuous_support = true;
    return cert;
  }
  SelectionFit fit;
  fit.beta_hat = beta_hat;
  fit.pen = pen.with_lambda(lambda);
  fit.pen.validate();
  fit.lambda = lambda;
  const ZEstimatorCertificate z = zestimator_check(problem, fit);
  cert.stationarity_residual = z.eq31_residual;
  cert.sign_margin = *z.eq32_margin;
  cert.curvature_margin = z.eq33_margin;
  const double scale = 1.0 + beta_hat.lpNorm<Eigen::Infinity>();
  cert.certified = cert.stationarity_residual <= 1e-8 * scale && cert.sign_margin > 1e-10 &&
                   cert.curvature_margin > 1e-10;
  return cert;
}

namespace {

// Iterates lambda <- update(lambda) for the penalties whose rho depends on
// lambda; other families need a single evaluation.
double solve_lambda(const PenaltySpec& pen, double start,
                    const std::function<double(const PenaltySpec&)>& update, bool* converged) {
  *converged = true;
  if (!pen.lambda_coupled()) return update(pen);
  double lam = start;
  for (int it = 0; it < 500; ++it) {
    if (!(lam > 0.0) || !std::isfinite(lam)) {
      *converged = false;
      return lam;
    }
    const double next = update(pen.with_lambda(lam));
    if (std::abs(next - lam) <= 1e-12 * std::max(1.0, std::abs(lam))) return next;
    lam = next;
  }
  *converged = false;
  return lam;
}

}  // namespace

OracleAudit weak_oracle_audit(const DesignProblem& problem, const PenaltySpec& pen, double sigma,
                              double u_n, double c0, double capC) {
  if (!(c0 > 0.0 && c0 < 1.0)) throw DomainError("weak_oracle_audit: c0 must lie in (0, 1)");
  if (!(capC > 0.0 && capC < 1.0)) throw DomainError("weak_oracle_audit: C must lie in (0, 1)");
  if (!(sigma > 0.0) || !(u_n > 0.0)) {
    throw DomainError("weak_oracle_audit: sigma and u_n must be positive");
  }
  if (!pen.has_derivative()) throw UnsupportedError("weak_oracle_audit: L0 penalty");
  const SignalGeometry g = signal_geometry(problem);
  if (g.support.empty()) throw DomainError("weak_oracle_audit: beta0 has empty support");
  if (!g.nonsingular) throw NotCertifiableError("weak_oracle_audit: singular Gram matrix");

  OracleAudit audit;
  audit.c0 = c0;
  audit.capC = capC;
  audit.sigma = sigma;
  audit.u_n = u_n;
  audit.lambda_min_q = g.lambda_min;
  audit.b0 = g.beta_support.cwiseAbs().minCoeff();

  const Eigen::MatrixXd Qinv = Eigen::LLT<Eigen::MatrixXd>(g.Q).solve(
      Eigen::MatrixXd::Identity(g.Q.rows(), g.Q.cols()));
  audit.c1n = matrix_inf_norm(Qinv);
  audit.c2n = matrix_inf_norm(g.B);
  audit.d1n = 0.0;
  for (Index j : g.support) audit.d1n = std::max(audit.d1n, problem.X.col(j).norm());
  audit.d2n = 0.0;
  for (Index j : g.noise) audit.d2n = std::max(audit.d2n, problem.X.col(j).norm());

  const double big = pen.big_lambda;
  const double t0 = c0 * audit.b0;
  const double spread = audit.c2n * audit.d1n + audit.d2n;

  auto lower_update = [&](const PenaltySpec& q) {
    const double denom = rho_prime(q, 0.0) - audit.c2n * rho_prime(q, t0);
    if (!(denom > 0.0)) return kInf;
    return spread * u_n * sigma / (big * denom);
  };
  auto upper_update = [&](const PenaltySpec& q) {
    const double num = (1.0 - c0) * audit.b0 / audit.c1n - u_n * audit.d1n * sigma;
    const double deriv = rho_prime(q, t0);
    if (deriv == 0.0) return num > 0.0 ? kInf : -kInf;
    return num / (big * deriv);
  };

  const double start = pen.lambda > 0.0 ? pen.lambda : spread * u_n * sigma / big;
  audit.lambda_lower = solve_lambda(pen, start, lower_update, &audit.lambda_lower_converged);
  audit.lambda_upper = solve_lambda(pen, start, upper_update, &audit.lambda_upper_converged);

  // Remaining quantities use rho at lambda_lower.
  PenaltySpec at_lower = pen;
  if (pen.lambda_coupled()) {
    at_lower.lambda = (audit.lambda_lower > 0.0 && std::isfinite(audit.lambda_lower))
                          ? audit.lambda_lower
                          : start;
  }
  const double d0 = rho_prime(at_lower, 0.0);
  const double dt = rho_prime(at_lower, t0);
  audit.derivative_ratio = dt / d0;
  audit.c2n_bound = dt > 0.0 ? capC * d0 / dt : kInf;

  audit.kappa0 = 0.0;
  const double radius = (1.0 - c0) * audit.b0;
  for (Index k = 0; k < g.beta_support.size(); ++k) {
    const double mag = std::abs(g.beta_support[k]);
    audit.kappa0 =
        std::max(audit.kappa0, max_concavity_on_interval(at_lower, mag - radius, mag + radius));
  }

  audit.rate_value = (audit.d1n + audit.derivative_ratio * audit.d2n) * audit.c1n;
  const double n = static_cast<double>(problem.n());
  audit.gamma_rate = n > 1.0 ? -std::log(audit.rate_value) / std::log(n) : 0.0;

  if (audit.kappa0 == 0.0 || spread == 0.0) {
    audit.u_n_bound = kInf;
  } else {
    audit.u_n_bound =
        g.lambda_min * (1.0 - capC) * d0 / (sigma * audit.kappa0 * spread);
  }
  audit.u_n_margin = audit.u_n_bound - u_n;

  const double common = audit.c1n * u_n * sigma / (1.0 - capC);
  audit.h1 = audit.d1n * common;
  audit.h2 = audit.derivative_ratio * audit.d2n * common;
  audit.h = audit.h1 + audit.h2;

  const double p = static_cast<double>(problem.p());
  audit.prob_bound =
      std::max(0.0, 1.0 - (2.0 / std::sqrt(M_PI)) * p / u_n * std::exp(-u_n * u_n / 2.0));

  audit.feasible = audit.c2n <= audit.c2n_bound && audit.lambda_lower <= audit.lambda_upper &&
                   u_n <= audit.u_n_bound;
  return audit;
}

}  // namespace sica
