#include "sica/lla.hpp"

#include <algorithm>
#include <cmath>

#include "sica/errors.hpp"

namespace sica {

GramCache::GramCache(Eigen::MatrixXd x, Eigen::VectorXd resp) : X(std::move(x)), y(std::move(resp)) {
  if (y.size() != X.rows()) throw DomainError("GramCache: dimension mismatch");
  gram = Eigen::MatrixXd::Zero(X.cols(), X.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  xty = X.transpose() * y;
}

namespace {

void check_weights(const Eigen::VectorXd& w, double gamma, Index p) {
  if (w.size() != p) throw DomainError("weighted_lasso: weight length mismatch");
  if ((w.array() < 0.0).any() || !w.allFinite()) {
    throw DomainError("weighted_lasso: weights must be finite and nonnegative");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw DomainError("weighted_lasso: gamma must be finite and nonnegative");
  }
}

}  // namespace

Eigen::VectorXd weighted_lasso(const GramCache& cache, const Eigen::VectorXd& w, double gamma,
                               const Eigen::VectorXd* warm, const LassoOptions& opts) {
  const Index p = cache.p();
  check_weights(w, gamma, p);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (warm) {
    if (warm->size() != p) throw DomainError("weighted_lasso: warm start length mismatch");
    beta = *warm;
  }
  // g = X^T (y - X beta), maintained incrementally.
  Eigen::VectorXd g = cache.xty - cache.gram * beta;
  const double threshold = opts.tol * (1.0 + cache.xty.lpNorm<Eigen::Infinity>());

  auto update = [&](Index j) {
    const double gjj = cache.gram(j, j);
    if (gjj <= 0.0) {
      beta[j] = 0.0;
      return 0.0;
    }
    const double z = g[j] + gjj * beta[j];
    const double next = soft_threshold(z, gamma * w[j]) / gjj;
    const double delta = next - beta[j];
    if (delta == 0.0) return 0.0;
    g.noalias() -= cache.gram.col(j) * delta;
    beta[j] = next;
    return std::abs(delta) * gjj;
  };

  int sweeps = 0;
  while (sweeps < opts.max_sweeps) {
    double move = 0.0;
    for (Index j = 0; j < p; ++j) move = std::max(move, update(j));
    ++sweeps;
    if (move <= threshold) break;
    // Iterate on the current active set until it settles.
    const IndexSet active = support_of(beta);
    while (sweeps < opts.max_sweeps) {
      double inner = 0.0;
      for (Index j : active) inner = std::max(inner, update(j));
      ++sweeps;
      if (inner <= threshold) break;
    }
  }
  return beta;
}

Eigen::VectorXd weighted_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& w, double gamma, const Eigen::VectorXd* warm,
                               const LassoOptions& opts) {
  return weighted_lasso(GramCache(X, y), w, gamma, warm, opts);
}

double weighted_lasso_kkt(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& beta, const Eigen::VectorXd& w, double gamma) {
  const Eigen::VectorXd g = X.transpose() * (y - X * beta);
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    const double bound = gamma * w[j];
    double v = 0.0;
    if (beta[j] != 0.0) {
      v = std::abs(g[j] - bound * (beta[j] > 0.0 ? 1.0 : -1.0));
    } else {
      v = std::max(0.0, std::abs(g[j]) - bound);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

double penalized_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const PenaltySpec& pen, const Eigen::VectorXd& beta) {
  return 0.5 * (y - X * beta).squaredNorm() + penalty_sum(pen, beta);
}

double penalized_kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const PenaltySpec& pen, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd g = X.transpose() * (y - X * beta);
  const double c = pen.scale();
  double worst = 0.0;
  for (Index j = 0; j < beta.size(); ++j) {
    double v = 0.0;
    if (c == 0.0) {
      v = std::abs(g[j]);
    } else if (beta[j] != 0.0) {
      v = std::abs(g[j] - c * rho_bar(pen, beta[j]));
    } else {
      v = std::max(0.0, std::abs(g[j]) - c * rho_prime(pen, 0.0));
    }
    worst = std::max(worst, v);
  }
  return worst;
}

SelectionFit lla_fit(const GramCache& cache, const PenaltySpec& pen_in, double lambda,
                     const std::optional<Eigen::VectorXd>& init, const LlaOptions& opts) {
  const PenaltySpec pen = pen_in.with_lambda(lambda);
  pen.validate();
  if (!pen.has_derivative()) throw UnsupportedError("lla_fit: L0 penalty has no derivative");
  const Index p = cache.p();
  const double gamma = pen.scale();

  Eigen::VectorXd beta;
  if (init) {
    if (init->size() != p) throw DomainError("lla_fit: init length mismatch");
    beta = *init;
  } else {
    beta = weighted_lasso(cache, Eigen::VectorXd::Ones(p), gamma, nullptr, opts.inner);
  }

  SelectionFit fit;
  fit.pen = pen;
  fit.lambda = lambda;
  fit.objective_trace.push_back(penalized_objective(cache.X, cache.y, pen, beta));

  Eigen::VectorXd w = Eigen::VectorXd::Ones(p);
  for (int k = 1; k <= opts.max_outer; ++k) {
    if (gamma > 0.0) {
      for (Index j = 0; j < p; ++j) w[j] = rho_prime(pen, std::abs(beta[j]));
    }
    Eigen::VectorXd next = weighted_lasso(cache, w, gamma, &beta, opts.inner);
    const double change = (next - beta).lpNorm<Eigen::Infinity>();
    beta = std::move(next);
    fit.outer_iters = k;
    fit.objective_trace.push_back(penalized_objective(cache.X, cache.y, pen, beta));
    if (change <= opts.tol) {
      fit.converged = true;
      break;
    }
  }
  fit.beta_hat = beta;
  fit.support = support_of(beta);
  fit.objective = fit.objective_trace.back();
  fit.kkt_max_violation = penalized_kkt_violation(cache.X, cache.y, pen, beta);
  return fit;
}

SelectionFit lla_fit(const DesignProblem& problem, const PenaltySpec& pen, double lambda,
                     const std::optional<Eigen::VectorXd>& init, const LlaOptions& opts) {
  problem.validate();
  return lla_fit(GramCache(problem.X, problem.y), pen, lambda, init, opts);
}

ZEstimatorCertificate zestimator_check(const DesignProblem& problem, const SelectionFit& fit) {
  const PenaltySpec& pen = fit.pen;
  const Eigen::VectorXd& beta = fit.beta_hat;
  const double c = pen.scale();
  const IndexSet active = support_of(beta);
  const IndexSet inactive = complement(active, problem.p());

  ZEstimatorCertificate cert;
  if (active.empty()) {
    cert.eq31_residual = 0.0;
    cert.eq33_margin = kInf;
  } else {
    const Eigen::MatrixXd XM = select_columns(problem.X, active);
    const Eigen::MatrixXd Q = XM.transpose() * XM;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > kRankTol * hi)) {
      throw NotCertifiableError("zestimator_check: Gram matrix on the fitted support is singular");
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(Q);
    const Eigen::VectorXd bM = select_entries(beta, active);
    Eigen::VectorXd rhs = XM.transpose() * problem.y;
    if (c > 0.0) rhs -= c * rho_bar(pen, bM);
    cert.eq31_residual = (bM - llt.solve(rhs)).lpNorm<Eigen::Infinity>();
    const double kappa = c > 0.0 ? local_concavity(pen, bM) : 0.0;
    cert.eq33_margin = lo - c * kappa;
  }
  if (c > 0.0) {
    const Eigen::VectorXd z = problem.X.transpose() * (problem.y - problem.X * beta) / c;
    double zmax = 0.0;
    for (Index j : inactive) zmax = std::max(zmax, std::abs(z[j]));
    cert.eq32_margin = rho_prime(pen, 0.0) - zmax;
  }
  return cert;
}

}  // namespace sica
