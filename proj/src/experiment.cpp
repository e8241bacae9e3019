#include "sica/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "sica/csv.hpp"
#include "sica/errors.hpp"

namespace sica {

std::string study_name(Study s) {
  switch (s) {
    case Study::kRecovery: return "recovery";
    case Study::kSelectionSmall: return "selection_small";
    case Study::kSelectionLarge: return "selection_large";
    case Study::kCustom: return "custom";
  }
  return "custom";
}

Study parse_study(const std::string& name) {
  if (name == "recovery") return Study::kRecovery;
  if (name == "selection_small") return Study::kSelectionSmall;
  if (name == "selection_large") return Study::kSelectionLarge;
  if (name == "custom") return Study::kCustom;
  throw ParseError("unknown study '" + name + "'");
}

Eigen::VectorXd reference_beta0() {
  Eigen::VectorXd b(7);
  b << 1.0, -0.5, 0.7, -1.2, -0.9, 0.3, 0.55;
  return b;
}

SimConfig SimConfig::recovery(double r) {
  SimConfig c;
  c.study = Study::kRecovery;
  c.n = 35;
  c.p = 1000;
  c.correlation = Correlation::kEquicorrelated;
  c.corr = r;
  c.sigma = 0.0;
  return c;
}

SimConfig SimConfig::selection_small(double sigma) {
  SimConfig c;
  c.study = Study::kSelectionSmall;
  c.sigma = sigma;
  return c;
}

SimConfig SimConfig::selection_large(double sigma) {
  SimConfig c;
  c.study = Study::kSelectionLarge;
  c.p = 600;
  c.sigma = sigma;
  return c;
}

Eigen::VectorXd SimConfig::beta0() const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  b.head(static_cast<Index>(s)) = beta0_values;
  return b;
}

Eigen::MatrixXd SimConfig::covariance() const {
  Eigen::MatrixXd S(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      if (i == j) {
        S(i, j) = 1.0;
      } else if (correlation == Correlation::kEquicorrelated) {
        S(i, j) = corr;
      } else {
        S(i, j) = std::pow(corr, static_cast<double>(std::abs(i - j)));
      }
    }
  }
  return S;
}

void SimConfig::validate() const {
  if (n < 1 || p < 1) throw DomainError("SimConfig: n and p must be positive");
  if (s > static_cast<std::size_t>(p)) throw DomainError("SimConfig: s must not exceed p");
  if (beta0_values.size() != static_cast<Index>(s)) {
    throw DomainError("SimConfig: beta0_values must have length s");
  }
  if (!(std::abs(corr) < 1.0)) throw DomainError("SimConfig: |r| must be below 1");
  if (replications < 1) throw DomainError("SimConfig: replications must be at least 1");
  if (!(sigma >= 0.0)) throw DomainError("SimConfig: sigma must be nonnegative");
  if (test_size < 1) throw DomainError("SimConfig: test_size must be positive");
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(replicate >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd sample_rows(const SimConfig& cfg, Index rows, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const Index p = cfg.p;
  Eigen::MatrixXd X(rows, p);
  if (cfg.correlation == Correlation::kAr) {
    const double rho = cfg.corr;
    const double innov = std::sqrt(1.0 - rho * rho);
    for (Index i = 0; i < rows; ++i) {
      double prev = normal(rng);
      X(i, 0) = prev;
      for (Index j = 1; j < p; ++j) {
        prev = rho * prev + innov * normal(rng);
        X(i, j) = prev;
      }
    }
    return X;
  }
  const double r = cfg.corr;
  if (r >= 0.0) {
    const double own = std::sqrt(1.0 - r);
    const double shared = std::sqrt(r);
    for (Index i = 0; i < rows; ++i) {
      const double w = normal(rng);
      for (Index j = 0; j < p; ++j) X(i, j) = own * normal(rng) + shared * w;
    }
    return X;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(cfg.covariance());
  if (llt.info() != Eigen::Success) {
    throw DomainError("gen_design: equicorrelation matrix is not positive definite");
  }
  Eigen::MatrixXd Z(rows, p);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < p; ++j) Z(i, j) = normal(rng);
  }
  return Z * llt.matrixU();
}

DesignProblem gen_design(const SimConfig& cfg, std::uint64_t replicate) {
  cfg.validate();
  std::mt19937_64 rng = make_rng(cfg.seed, replicate, 0);
  Eigen::MatrixXd X = sample_rows(cfg, cfg.n, rng);
  const Eigen::VectorXd beta0 = cfg.beta0();
  Eigen::VectorXd y;
  if (cfg.noiseless()) {
    for (Index j = 0; j < X.cols(); ++j) X.col(j) /= X.col(j).norm();
    y = X * beta0;
  } else {
    std::normal_distribution<double> normal;
    Eigen::VectorXd eps(cfg.n);
    for (Index i = 0; i < cfg.n; ++i) eps[i] = normal(rng);
    y = X * beta0 + cfg.sigma * eps;
  }
  return DesignProblem(std::move(X), std::move(y), beta0);
}

bool exact_recovery(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta0, double tol) {
  if (beta_hat.size() != beta0.size()) throw DomainError("exact_recovery: length mismatch");
  return support_of(beta_hat) == support_of(beta0) &&
         (beta_hat - beta0).lpNorm<Eigen::Infinity>() <= tol;
}

std::size_t false_negatives(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta0) {
  if (beta_hat.size() != beta0.size()) throw DomainError("false_negatives: length mismatch");
  std::size_t fn = 0;
  for (Index j = 0; j < beta0.size(); ++j) {
    if (beta0[j] != 0.0 && beta_hat[j] == 0.0) ++fn;
  }
  return fn;
}

double success_rate(const std::vector<MetricsRow>& rows) {
  std::size_t total = 0;
  std::size_t hits = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    ++total;
    if (r.success) ++hits;
  }
  return total ? 100.0 * static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

double prediction_error(const Eigen::VectorXd& beta_hat, const SimConfig& cfg,
                        std::uint64_t test_seed) {
  cfg.validate();
  if (beta_hat.size() != cfg.p) throw DomainError("prediction_error: length mismatch");
  std::mt19937_64 rng = make_rng(cfg.seed, test_seed, 1);
  const Eigen::MatrixXd X = sample_rows(cfg, cfg.test_size, rng);
  std::normal_distribution<double> normal;
  const Eigen::VectorXd diff = X * (cfg.beta0() - beta_hat);
  double total = 0.0;
  for (Index i = 0; i < cfg.test_size; ++i) {
    const double e = diff[i] + cfg.sigma * normal(rng);
    total += e * e;
  }
  return total / static_cast<double>(cfg.test_size);
}

double population_prediction_error(const Eigen::VectorXd& beta_hat, const SimConfig& cfg) {
  const Eigen::VectorXd d = beta_hat - cfg.beta0();
  return cfg.sigma * cfg.sigma + d.dot(cfg.covariance() * d);
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  if (values.size() % 2) return values[m];
  return 0.5 * (values[m - 1] + values[m]);
}

std::vector<double> default_lambda_grid(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        double big_lambda, std::size_t count, double ratio) {
  if (count == 0) throw DomainError("default_lambda_grid: count must be positive");
  if (!(big_lambda > 0.0)) throw DomainError("default_lambda_grid: Lambda must be positive");
  const double top = (X.transpose() * y).lpNorm<Eigen::Infinity>() / big_lambda;
  std::vector<double> grid;
  if (count == 1) return {top};
  for (std::size_t i = 0; i < count; ++i) {
    grid.push_back(top * std::pow(ratio, static_cast<double>(i) / static_cast<double>(count - 1)));
  }
  return grid;
}

std::vector<double> default_a_grid(Family family) {
  switch (family) {
    case Family::kSica:
    case Family::kLog: {
      std::vector<double> g = default_sirs_a_grid();
      g.erase(std::remove(g.begin(), g.end(), 0.0), g.end());
      return g;
    }
    case Family::kScad: return {2.5, 3.7, 5.0, 10.0};
    case Family::kMcp: return {1.5, 2.0, 3.0, 5.0, 10.0};
    case Family::kL1: return {kInf};
    case Family::kL0: break;
  }
  throw UnsupportedError("default_a_grid: the L0 penalty is not fitted by LLA");
}

namespace {

PenaltySpec make_penalty(Family family, double a, double lambda, double big_lambda) {
  switch (family) {
    case Family::kSica: return PenaltySpec::sica(a, lambda, big_lambda);
    case Family::kL1: return PenaltySpec::l1(lambda, big_lambda);
    case Family::kScad: return PenaltySpec::scad(a, lambda, big_lambda);
    case Family::kMcp: return PenaltySpec::mcp(a, lambda, big_lambda);
    case Family::kLog: return PenaltySpec::log_penalty(a, lambda, big_lambda);
    case Family::kL0: break;
  }
  throw UnsupportedError("LLA tuning does not support the L0 penalty");
}

struct Grid {
  std::vector<double> lambdas;  // descending
  std::vector<double> as;
};

Grid prepare_grid(Family family, const std::vector<double>& lambda_grid,
                  const std::vector<double>& a_grid) {
  if (lambda_grid.empty()) throw DomainError("tuning: lambda grid is empty");
  Grid g;
  g.lambdas = lambda_grid;
  for (double l : g.lambdas) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw DomainError("tuning: lambda values must be finite and >= 0");
  }
  std::stable_sort(g.lambdas.begin(), g.lambdas.end(), std::greater<>());
  if (family == Family::kL1) {
    g.as = {kInf};
  } else {
    if (a_grid.empty()) throw DomainError("tuning: a grid is empty");
    g.as = a_grid;
  }
  return g;
}

// Visits every (lambda, a) fit along a warm-started lasso path. Stops the
// path once the lasso reaches n nonzeros; later candidates are reported as
// skipped.
template <typename Visit, typename Skip>
void walk_path(const GramCache& cache, Family family, const Grid& grid, const TuningOptions& opts,
               Visit visit, Skip skip) {
  const Index p = cache.p();
  const auto n = static_cast<std::size_t>(cache.X.rows());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p);
  Eigen::VectorXd lasso = Eigen::VectorXd::Zero(p);
  bool saturated = false;
  for (std::size_t li = 0; li < grid.lambdas.size(); ++li) {
    const double lambda = grid.lambdas[li];
    if (!saturated) {
      lasso = weighted_lasso(cache, ones, opts.big_lambda * lambda, &lasso, opts.lla.inner);
      saturated = support_of(lasso).size() >= n;
    }
    for (std::size_t ai = 0; ai < grid.as.size(); ++ai) {
      if (saturated) {
        skip(li, ai);
        continue;
      }
      const PenaltySpec pen = make_penalty(family, grid.as[ai], lambda, opts.big_lambda);
      visit(li, ai, lla_fit(cache, pen, lambda, lasso, opts.lla));
    }
  }
}

// Lexicographic (criterion, df, -lambda) with a relative tolerance on the
// criterion.
bool better(const TuningCandidate& c, const TuningCandidate& best) {
  const double tol = 1e-12 * std::max(1.0, std::abs(best.criterion));
  if (c.criterion < best.criterion - tol) return true;
  if (c.criterion > best.criterion + tol) return false;
  if (c.df != best.df) return c.df < best.df;
  return c.lambda > best.lambda;
}

}  // namespace

TuningResult bic_select(const DesignProblem& problem, Family family,
                        const std::vector<double>& lambda_grid, const std::vector<double>& a_grid,
                        const TuningOptions& opts) {
  problem.validate();
  const Grid grid = prepare_grid(family, lambda_grid, a_grid);
  const GramCache cache(problem.X, problem.y);
  const double n = static_cast<double>(problem.n());

  TuningResult out;
  std::optional<std::size_t> best;
  walk_path(
      cache, family, grid, opts,
      [&](std::size_t li, std::size_t ai, SelectionFit fit) {
        TuningCandidate c{grid.lambdas[li], grid.as[ai], 0.0, fit.support.size(), false};
        if (c.df >= static_cast<std::size_t>(problem.n())) {
          c.skipped = true;
          c.criterion = kInf;
          out.table.push_back(c);
          return;
        }
        const double rss = std::max((problem.y - problem.X * fit.beta_hat).squaredNorm(), 1e-300);
        c.criterion = n * std::log(rss / n) + static_cast<double>(c.df) * std::log(n);
        out.table.push_back(c);
        if (!best || better(c, out.table[*best])) {
          best = out.table.size() - 1;
          out.fit = std::move(fit);
          out.a = c.a;
        }
      },
      [&](std::size_t li, std::size_t ai) {
        out.table.push_back({grid.lambdas[li], grid.as[ai], kInf, 0, true});
      });
  if (!best) throw DomainError("bic_select: every candidate has df >= n");
  return out;
}

TuningResult cv_select(const DesignProblem& problem, Family family,
                       const std::vector<double>& lambda_grid, const std::vector<double>& a_grid,
                       int folds, std::uint64_t seed, const TuningOptions& opts) {
  problem.validate();
  const Index n = problem.n();
  if (folds < 2) throw DomainError("cv_select: folds must be at least 2");
  if (n < folds) throw DomainError("cv_select: n must be at least the number of folds");
  const Grid grid = prepare_grid(family, lambda_grid, a_grid);
  const std::size_t nl = grid.lambdas.size();
  const std::size_t na = grid.as.size();

  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng = make_rng(seed, 0, 7);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < perm.size(); ++i) {
    fold_of[static_cast<std::size_t>(perm[i])] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }

  std::vector<double> sse(nl * na, 0.0);
  std::vector<double> df_sum(nl * na, 0.0);
  std::vector<bool> skipped(nl * na, false);
  for (int f = 0; f < folds; ++f) {
    IndexSet train;
    IndexSet test;
    for (Index i = 0; i < n; ++i) (fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
    const GramCache cache(problem.X(train, Eigen::all), problem.y(train));
    const Eigen::MatrixXd Xt = problem.X(test, Eigen::all);
    const Eigen::VectorXd yt = problem.y(test);
    walk_path(
        cache, family, grid, opts,
        [&](std::size_t li, std::size_t ai, const SelectionFit& fit) {
          sse[li * na + ai] += (yt - Xt * fit.beta_hat).squaredNorm();
          df_sum[li * na + ai] += static_cast<double>(fit.support.size());
        },
        [&](std::size_t li, std::size_t ai) { skipped[li * na + ai] = true; });
  }

  TuningResult out;
  std::optional<std::size_t> best;
  for (std::size_t li = 0; li < nl; ++li) {
    for (std::size_t ai = 0; ai < na; ++ai) {
      const std::size_t k = li * na + ai;
      TuningCandidate c{grid.lambdas[li], grid.as[ai], kInf,
                        static_cast<std::size_t>(std::lround(df_sum[k] / folds)), skipped[k]};
      if (!skipped[k]) c.criterion = sse[k] / static_cast<double>(n);
      out.table.push_back(c);
      if (!skipped[k] && (!best || better(c, out.table[*best]))) best = out.table.size() - 1;
    }
  }
  if (!best) throw DomainError("cv_select: every candidate saturated the training folds");

  const TuningCandidate& win = out.table[*best];
  const GramCache cache(problem.X, problem.y);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(problem.p());
  const Eigen::VectorXd lasso =
      weighted_lasso(cache, ones, opts.big_lambda * win.lambda, nullptr, opts.lla.inner);
  out.fit = lla_fit(cache, make_penalty(family, win.a, win.lambda, opts.big_lambda), win.lambda,
                    lasso, opts.lla);
  out.a = win.a;
  return out;
}

namespace {

std::string a_label(double a) {
  if (std::isinf(a)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", a);
  return buf;
}

}  // namespace

std::vector<MethodSpec> default_methods(const SimConfig& cfg) {
  std::vector<MethodSpec> out;
  if (cfg.study == Study::kRecovery) {
    out.push_back({"L1", MethodKind::kSirs, Family::kSica, kInf});
    std::vector<double> grid = default_sirs_a_grid();
    std::sort(grid.begin(), grid.end(), std::greater<>());
    for (double a : grid) out.push_back({"rho_" + a_label(a), MethodKind::kSirs, Family::kSica, a});
    out.push_back({"optimal_sica", MethodKind::kSirsAuto, Family::kSica, 0.0});
    return out;
  }
  const bool use_bic = cfg.study == Study::kSelectionSmall ||
                       (cfg.study == Study::kCustom && cfg.p < cfg.n);
  const MethodKind kind = use_bic ? MethodKind::kLlaBic : MethodKind::kLlaCv;
  out.push_back({"lasso", kind, Family::kL1, kInf});
  out.push_back({"scad", kind, Family::kScad, 0.0});
  out.push_back({"mcp", kind, Family::kMcp, 0.0});
  out.push_back({"sica", kind, Family::kSica, 0.0});
  return out;
}

MetricsRow evaluate_method(const MethodSpec& method, const DesignProblem& problem,
                           const SimConfig& cfg, std::size_t replicate, const StudyOptions& opts) {
  Eigen::VectorXd beta;
  switch (method.kind) {
    case MethodKind::kSirs: beta = sirs_recover(problem, opts.sirs, method.a).beta_hat; break;
    case MethodKind::kSirsAuto: beta = sirs_auto(problem, opts.sirs).beta_hat; break;
    case MethodKind::kLlaBic:
    case MethodKind::kLlaCv: {
      TuningOptions tuning = opts.tuning;
      if (opts.scale_by_n) tuning.big_lambda = static_cast<double>(problem.n());
      const auto lambdas = default_lambda_grid(problem.X, problem.y, tuning.big_lambda);
      const auto as = default_a_grid(method.family);
      const TuningResult tuned =
          method.kind == MethodKind::kLlaBic
              ? bic_select(problem, method.family, lambdas, as, tuning)
              : cv_select(problem, method.family, lambdas, as, opts.cv_folds,
                          cfg.seed ^ (0x9e3779b97f4a7c15ULL * (replicate + 1)), tuning);
      beta = tuned.fit.beta_hat;
      break;
    }
  }
  const Eigen::VectorXd beta0 = problem.truth();
  MetricsRow row;
  row.method = method.label;
  row.replicate = replicate;
  row.num_selected = support_of(beta).size();
  row.false_negatives = false_negatives(beta, beta0);
  row.success = exact_recovery(beta, beta0);
  if (!cfg.noiseless()) row.pe = prediction_error(beta, cfg, replicate);
  return row;
}

StudyResult run_study(const SimConfig& cfg, const std::vector<MethodSpec>& methods,
                      const StudyOptions& opts) {
  cfg.validate();
  if (methods.empty()) throw DomainError("run_study: no methods");
  const auto reps = static_cast<std::size_t>(cfg.replications);
  std::vector<std::vector<MetricsRow>> per_rep(reps);
  std::mutex log_mutex;

  auto fail_row = [](const MethodSpec& m, std::size_t rep, const std::string& what) {
    MetricsRow row;
    row.method = m.label;
    row.replicate = rep;
    row.error = what.empty() ? "unknown error" : what;
    return row;
  };
  auto report = [&](std::size_t rep, const std::string& label, const std::string& what) {
    if (!opts.log) return;
    std::lock_guard<std::mutex> lock(log_mutex);
    *opts.log << "replicate " << rep << " " << label << ": " << what << "\n";
  };

  auto run_one = [&](std::size_t rep) {
    std::vector<MetricsRow>& rows = per_rep[rep];
    DesignProblem problem;
    try {
      problem = gen_design(cfg, rep);
    } catch (const std::exception& e) {
      report(rep, "design", e.what());
      for (const auto& m : methods) rows.push_back(fail_row(m, rep, e.what()));
      return;
    }
    for (const auto& m : methods) {
      try {
        rows.push_back(evaluate_method(m, problem, cfg, rep, opts));
      } catch (const std::exception& e) {
        report(rep, m.label, e.what());
        rows.push_back(fail_row(m, rep, e.what()));
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(reps)));
  if (threads == 1) {
    for (std::size_t rep = 0; rep < reps; ++rep) run_one(rep);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t rep; (rep = next.fetch_add(1)) < reps;) run_one(rep);
      });
    }
    for (auto& th : pool) th.join();
  }

  StudyResult result;
  for (auto& rows : per_rep) {
    for (auto& r : rows) result.rows.push_back(std::move(r));
  }
  result.summary = summarize(result.rows, methods);
  return result;
}

std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows,
                                  const std::vector<MethodSpec>& methods) {
  std::vector<SummaryRow> out;
  for (const auto& m : methods) {
    SummaryRow s;
    s.method = m.label;
    std::vector<double> pe, ns, fn;
    std::vector<MetricsRow> mine;
    for (const auto& r : rows) {
      if (r.method != m.label) continue;
      if (!r.error.empty()) {
        ++s.failed;
        continue;
      }
      ++s.completed;
      mine.push_back(r);
      if (!std::isnan(r.pe)) pe.push_back(r.pe);
      ns.push_back(static_cast<double>(r.num_selected));
      fn.push_back(static_cast<double>(r.false_negatives));
    }
    s.pe_median = median(pe);
    s.num_selected_median = median(ns);
    s.fn_median = median(fn);
    s.success_pct = success_rate(mine);
    out.push_back(s);
  }
  return out;
}

void write_rows_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "method,replicate,pe,num_selected,fn,success\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.replicate << ',';
    if (!r.error.empty()) {
      out << "nan,,,\n";
      continue;
    }
    out << csv::format_double(r.pe) << ',' << r.num_selected << ',' << r.false_negatives << ','
        << (r.success ? 1 : 0) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "method,pe_median,num_selected_median,fn_median,success_pct,completed,failed\n";
  for (const auto& s : summary) {
    out << s.method << ',' << csv::format_double(s.pe_median) << ','
        << csv::format_double(s.num_selected_median) << ',' << csv::format_double(s.fn_median)
        << ',' << csv::format_double(s.success_pct) << ',' << s.completed << ',' << s.failed
        << '\n';
  }
}

void standardize(Eigen::MatrixXd& X, Eigen::VectorXd& y, bool unit_norm) {
  const double n = static_cast<double>(X.rows());
  if (X.rows() < 2) throw DomainError("standardize: need at least two rows");
  for (Index j = 0; j < X.cols(); ++j) {
    X.col(j).array() -= X.col(j).mean();
    const double ss = X.col(j).squaredNorm();
    if (ss == 0.0) throw DomainError("standardize: constant column " + std::to_string(j + 1));
    X.col(j) /= unit_norm ? std::sqrt(ss) : std::sqrt(ss / (n - 1.0));
  }
  y.array() -= y.mean();
}

std::vector<CoefficientRow> analyze_real_data(Eigen::MatrixXd X, Eigen::VectorXd y,
                                              const RealDataOptions& opts) {
  if (X.rows() != y.size()) throw DomainError("analyze_real_data: dimension mismatch");
  standardize(X, y, opts.unit_norm);
  const DesignProblem problem(X, y);
  const double n = static_cast<double>(X.rows());
  TuningOptions tuning;
  tuning.big_lambda = n;
  tuning.lla = opts.lla;
  const auto lambdas = default_lambda_grid(X, y, tuning.big_lambda);
  const double tss = y.squaredNorm();

  std::vector<CoefficientRow> out;
  const std::vector<std::pair<std::string, Family>> methods = {
      {"lasso", Family::kL1}, {"scad", Family::kScad}, {"mcp", Family::kMcp}, {"sica", Family::kSica}};
  for (const auto& [label, family] : methods) {
    const TuningResult t =
        cv_select(problem, family, lambdas, default_a_grid(family), opts.folds, opts.seed, tuning);
    CoefficientRow row;
    row.method = label;
    row.coef = t.fit.beta_hat;
    row.lambda = t.fit.lambda;
    row.a = t.a;
    const double df = static_cast<double>(t.fit.support.size());
    const double rss = (y - X * row.coef).squaredNorm();
    row.r2_adj = 1.0 - (rss / (n - df - 1.0)) / (tss / (n - 1.0));
    for (const auto& c : t.table) {
      if (c.lambda == t.fit.lambda && (c.a == t.a || (std::isinf(c.a) && std::isinf(t.a)))) {
        row.ape = c.criterion;
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

DesignProblem correlated_column_design(std::size_t s, double r, const Eigen::VectorXd& beta0, Index p) {
  if (s == 0) throw DomainError("correlated_column_design: s must be positive");
  if (beta0.size() != static_cast<Index>(s)) throw DomainError("correlated_column_design: beta0 must have length s");
  if ((beta0.array() == 0.0).any()) throw DomainError("correlated_column_design: beta0 entries must be nonzero");
  if (!(std::abs(r) < 1.0)) throw DomainError("correlated_column_design: |r| must be below 1");
  const auto si = static_cast<Index>(s);
  if (p == 0) p = si + 1;
  if (p < si + 1) throw DomainError("correlated_column_design: p must exceed s");
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(p, p);
  X.col(si).setZero();
  const double scale = r / std::sqrt(static_cast<double>(s));
  for (Index j = 0; j < si; ++j) X(j, si) = scale * (beta0[j] > 0.0 ? 1.0 : -1.0);
  X(si, si) = std::sqrt(1.0 - r * r);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(p);
  full.head(si) = beta0;
  Eigen::VectorXd y = X * full;
  return DesignProblem(std::move(X), std::move(y), std::move(full));
}

}  // namespace sica
