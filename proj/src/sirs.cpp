#include "sica/sirs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sica/errors.hpp"
#include "sica/penalty.hpp"

namespace sica {

std::vector<double> default_sirs_a_grid() {
  return {0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.6, 1.0, 2.0, 5.0};
}

SirsConfig SirsConfig::resolved(Index n, Index p) const {
  SirsConfig out = *this;
  if (out.sparsity_budget == 0) out.sparsity_budget = static_cast<std::size_t>((n + 1) / 2);
  if (out.max_restarts == 0) out.max_restarts = out.sparsity_budget;
  if (out.floor_constant == 0.0) out.floor_constant = 1.0 / static_cast<double>(p);
  if (out.max_iters <= 0) throw DomainError("SIRS: max_iters must be positive");
  if (out.max_restarts > out.sparsity_budget) {
    throw DomainError("SIRS: max_restarts must not exceed the sparsity budget");
  }
  if (!(out.floor_constant > 0.0 && out.floor_constant < 1.0)) {
    throw DomainError("SIRS: floor constant must lie in (0, 1)");
  }
  if (!(out.converge_tol > 0.0) || !(out.hard_threshold > 0.0)) {
    throw DomainError("SIRS: tolerances must be positive");
  }
  for (double a : out.a_grid) {
    if (!(a >= 0.0)) throw DomainError("SIRS: a-grid values must be nonnegative");
  }
  return out;
}

Eigen::VectorXd sirs_weights(double a, const Eigen::VectorXd& beta) {
  if (!(a >= 0.0)) throw DomainError("sirs_weights: a must be nonnegative");
  const Eigen::ArrayXd t = beta.array().abs();
  if (a == 0.0) return (t * t).matrix();
  if (std::isinf(a)) return t.matrix();
  return (t * (a + t) / (a + 1.0)).matrix();
}

Eigen::VectorXd sirs_step(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& beta_prev, double a,
                          std::optional<double> ridge) {
  if (beta_prev.size() != X.cols() || y.size() != X.rows()) {
    throw DomainError("sirs_step: dimension mismatch");
  }
  return ridge_limit_apply(X, sirs_weights(a, beta_prev), y, ridge);
}

double surrogate_objective(const Eigen::VectorXd& beta, const Eigen::VectorXd& point, double a) {
  const Eigen::VectorXd d = sirs_weights(a, point);
  double total = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double b2 = beta[j] * beta[j];
    if (b2 == 0.0) continue;
    if (d[j] == 0.0) return kInf;
    total += b2 / d[j];
  }
  return total;
}

namespace {

struct InnerRun {
  Eigen::VectorXd beta;
  int iterations = 0;
  bool converged = false;
};

InnerRun iterate(const DesignProblem& problem, const SirsConfig& cfg, double a,
                 Eigen::VectorXd beta) {
  InnerRun run;
  for (int l = 1; l <= cfg.max_iters; ++l) {
    Eigen::VectorXd next = sirs_step(problem.X, problem.y, beta, a, cfg.ridge);
    const double change = (next - beta).lpNorm<Eigen::Infinity>();
    const double scale = next.lpNorm<Eigen::Infinity>();
    beta = std::move(next);
    run.iterations = l;
    if (change <= cfg.converge_tol * scale) {
      run.converged = true;
      break;
    }
  }
  run.beta = std::move(beta);
  return run;
}

void apply_hard_threshold(Eigen::VectorXd& beta, double relative) {
  const double cut = relative * beta.lpNorm<Eigen::Infinity>();
  for (Index j = 0; j < beta.size(); ++j) {
    if (std::abs(beta[j]) < cut) beta[j] = 0.0;
  }
}

// k-th largest entry of |v|, k >= 1.
double kth_largest_abs(const Eigen::VectorXd& v, std::size_t k) {
  std::vector<double> mags(static_cast<std::size_t>(v.size()));
  for (Index j = 0; j < v.size(); ++j) mags[static_cast<std::size_t>(j)] = std::abs(v[j]);
  k = std::min(k, mags.size());
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k - 1), mags.end(),
                   std::greater<>());
  return mags[k - 1];
}

}  // namespace

RecoveryResult sirs_recover(const DesignProblem& problem, const SirsConfig& cfg_in, double a) {
  problem.validate();
  if (!(a >= 0.0)) throw DomainError("sirs_recover: a must be nonnegative");
  const Index p = problem.p();
  const SirsConfig cfg = cfg_in.resolved(problem.n(), p);

  RecoveryResult result;
  result.a_used = a;
  if ((problem.y.array() == 0.0).all()) {
    result.beta_hat = Eigen::VectorXd::Zero(p);
    result.converged = true;
    result.sparse_enough = true;
    return result;
  }

  Eigen::VectorXd start = Eigen::VectorXd::Ones(p);
  for (std::size_t k = 0;; ++k) {
    InnerRun run = iterate(problem, cfg, a, start);
    apply_hard_threshold(run.beta, cfg.hard_threshold);
    const IndexSet support = support_of(run.beta);

    result.iterations += run.iterations;
    result.trace.push_back({k, run.iterations, run.converged, support.size()});
    result.beta_hat = run.beta;
    result.support = support;
    result.converged = run.converged;
    result.restarts_used = k;
    result.sparse_enough = support.size() <= cfg.sparsity_budget;
    if (result.sparse_enough || k == cfg.max_restarts) break;

    // Restart k + 1 keeps the k + 1 largest entries at full weight and floors
    // the rest.
    const double gamma = kth_largest_abs(run.beta, k + 1);
    for (Index j = 0; j < p; ++j) {
      start[j] = std::abs(run.beta[j]) >= gamma ? 1.0 : cfg.floor_constant;
    }
  }
  return result;
}

RecoveryResult sirs_auto(const DesignProblem& problem, const SirsConfig& cfg) {
  if (cfg.a_grid.empty()) throw DomainError("sirs_auto: a-grid is empty");
  std::optional<RecoveryResult> best;
  auto rank = [](const RecoveryResult& r) {
    // Lower is better: eligible runs first, then fewer nonzeros.
    const int tier = (r.sparse_enough && r.converged) ? 0 : (r.sparse_enough ? 1 : 2);
    return std::make_pair(tier, r.support.size());
  };
  for (double a : cfg.a_grid) {
    RecoveryResult r = sirs_recover(problem, cfg, a);
    if (!best || rank(r) < rank(*best)) best = std::move(r);
  }
  return *best;
}

double check_fixed_point(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& beta, double a) {
  if (beta.size() != X.cols() || y.size() != X.rows()) {
    throw DomainError("check_fixed_point: dimension mismatch");
  }
  const double residual = (y - X * beta).norm();
  if (residual > 1e-8 * std::max(1.0, y.norm())) {
    throw DomainError("check_fixed_point: beta is not feasible (||y - X beta|| = " +
                      std::to_string(residual) + ")");
  }
  const Eigen::VectorXd v = weighted_min_norm(X, sirs_weights(a, beta), y);
  return (v - beta).lpNorm<Eigen::Infinity>();
}

}  // namespace sica
