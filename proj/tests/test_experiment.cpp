#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sica/errors.hpp"
#include "sica/experiment.hpp"
#include "test_util.hpp"

using namespace sica;

namespace {

double median_oracle(std::vector<double> v) {
  // Selection rather than a full sort.
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  const double upper = v[m];
  if (v.size() % 2) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (lower + upper);
}

SimConfig small_custom() {
  SimConfig cfg;
  cfg.n = 60;
  cfg.p = 12;
  cfg.sigma = 0.5;
  cfg.replications = 3;
  cfg.test_size = 2000;
  return cfg;
}

}  // namespace

TEST_CASE("presets") {
  const SimConfig rec = SimConfig::recovery(0.2);
  CHECK(rec.n == 35);
  CHECK(rec.p == 1000);
  CHECK(rec.noiseless());
  CHECK(SimConfig::selection_small(0.3).p == 50);
  CHECK(SimConfig::selection_large(0.5).p == 600);
  CHECK(SimConfig::selection_large(0.5).n == 100);
  CHECK(reference_beta0().size() == 7);
  CHECK(rec.beta0().head(7) == reference_beta0());
  CHECK(rec.beta0().tail(993).isZero(0.0));
  for (Study s : {Study::kRecovery, Study::kSelectionSmall, Study::kSelectionLarge, Study::kCustom}) {
    CHECK(parse_study(study_name(s)) == s);
  }
}

TEST_CASE("configuration validation") {
  SimConfig cfg = small_custom();
  cfg.replications = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = small_custom();
  cfg.corr = 1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = small_custom();
  cfg.s = 13;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = small_custom();
  cfg.sigma = -1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("recovery designs have unit columns and no noise") {
  SimConfig cfg = SimConfig::recovery(0.5);
  cfg.p = 200;
  const DesignProblem d = gen_design(cfg, 3);
  for (Eigen::Index j = 0; j < d.p(); ++j) CHECK(d.X.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((d.y - d.X * cfg.beta0()).norm() < 1e-12);
  CHECK(d.support0().size() == 7);
}

TEST_CASE("AR rows have the target correlation") {
  SimConfig cfg = small_custom();
  cfg.n = 2000;
  cfg.p = 6;
  std::mt19937_64 rng = make_rng(5, 0, 0);
  const Eigen::MatrixXd X = sample_rows(cfg, 20000, rng);
  const Eigen::MatrixXd C = (X.transpose() * X) / 20000.0;
  for (Eigen::Index i = 0; i < 6; ++i) {
    CHECK(C(i, i) == doctest::Approx(1.0).epsilon(0.05));
    for (Eigen::Index j = 0; j < 6; ++j) {
      CHECK(std::abs(C(i, j) - std::pow(0.5, std::abs(double(i - j)))) < 0.04);
    }
  }
}

TEST_CASE("equicorrelated rows, including negative r") {
  for (double r : {0.3, -0.1}) {
    SimConfig cfg = SimConfig::recovery(r);
    cfg.p = 5;
    std::mt19937_64 rng = make_rng(2, 0, 0);
    const Eigen::MatrixXd X = sample_rows(cfg, 40000, rng);
    const Eigen::MatrixXd C = (X.transpose() * X) / 40000.0;
    for (Eigen::Index i = 0; i < 5; ++i) {
      for (Eigen::Index j = 0; j < 5; ++j) {
        CHECK(std::abs(C(i, j) - (i == j ? 1.0 : r)) < 0.04);
      }
    }
  }
}

TEST_CASE("generators are pure functions of seed and replicate") {
  const SimConfig cfg = small_custom();
  const DesignProblem a = gen_design(cfg, 4);
  const DesignProblem b = gen_design(cfg, 4);
  const DesignProblem c = gen_design(cfg, 5);
  CHECK(a.X == b.X);
  CHECK(a.y == b.y);
  CHECK(a.X != c.X);
  SimConfig other = cfg;
  other.seed = 2;
  CHECK(gen_design(other, 4).X != a.X);
}

TEST_CASE("Monte-Carlo prediction error matches the population value") {
  SimConfig cfg = small_custom();
  cfg.test_size = 20000;
  std::mt19937_64 rng(9);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd beta = cfg.beta0() + 0.3 * testutil::gaussian(cfg.p, rng);
    const double v = population_prediction_error(beta, cfg);
    const double pe = prediction_error(beta, cfg, static_cast<std::uint64_t>(k));
    // e ~ N(0, v), so e^2 has variance 2 v^2.
    const double se = v * std::sqrt(2.0 / double(cfg.test_size));
    CHECK(std::abs(pe - v) <= 3.0 * se);
  }
  CHECK(population_prediction_error(cfg.beta0(), cfg) == doctest::Approx(0.25));
  const double zero_pe = population_prediction_error(Eigen::VectorXd::Zero(cfg.p), cfg);
  CHECK(zero_pe == doctest::Approx(0.25 + cfg.beta0().dot(cfg.covariance() * cfg.beta0())));
}

TEST_CASE("median agrees with a selection-based oracle") {
  std::mt19937_64 rng(10);
  for (int len = 1; len < 30; ++len) {
    std::vector<double> v(static_cast<std::size_t>(len));
    for (auto& x : v) x = std::round(std::normal_distribution<double>()(rng) * 4.0);
    CHECK(median(v) == median_oracle(v));
  }
  CHECK(std::isnan(median({})));
}

TEST_CASE("recovery metrics") {
  Eigen::VectorXd b0(4), b(4);
  b0 << 1, 0, -2, 0;
  b << 1 + 1e-6, 0, -2, 0;
  CHECK(exact_recovery(b, b0));
  CHECK(false_negatives(b, b0) == 0);
  b[1] = 1e-3;
  CHECK_FALSE(exact_recovery(b, b0));
  b << 1, 0, 0, 0;
  CHECK(false_negatives(b, b0) == 1);
  std::vector<MetricsRow> rows(4);
  rows[0].success = true;
  rows[1].success = false;
  rows[2].error = "boom";
  rows[3].success = true;
  CHECK(success_rate(rows) == doctest::Approx(200.0 / 3.0));
}

TEST_CASE("lambda and a grids") {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXd X = testutil::gaussian(20, 5, rng);
  const Eigen::VectorXd y = testutil::gaussian(20, rng);
  const auto g = default_lambda_grid(X, y, 20.0);
  REQUIRE(g.size() == 50);
  CHECK(g.front() == doctest::Approx((X.transpose() * y).lpNorm<Eigen::Infinity>() / 20.0));
  CHECK(g.back() == doctest::Approx(1e-3 * g.front()));
  CHECK(std::is_sorted(g.rbegin(), g.rend()));
  CHECK(default_a_grid(Family::kL1) == std::vector<double>{kInf});
  const auto sica_grid = default_a_grid(Family::kSica);
  CHECK(std::find(sica_grid.begin(), sica_grid.end(), 0.0) == sica_grid.end());
  CHECK_THROWS_AS(default_a_grid(Family::kL0), UnsupportedError);
}

TEST_CASE("BIC picks the empty model on pure noise") {
  SimConfig cfg;
  cfg.n = 100;
  cfg.p = 20;
  cfg.s = 0;
  cfg.beta0_values = Eigen::VectorXd(0);
  cfg.sigma = 1.0;
  // 50 replicates leave a standard error near 5 points; 400 pin the rate.
  const int reps = 400;
  struct Case {
    Family family;
    std::vector<double> as;
  };
  const std::vector<Case> cases = {{Family::kL1, {kInf}}, {Family::kScad, default_a_grid(Family::kScad)},
                                   {Family::kSica, {1.0}}};
  std::vector<int> empty(cases.size(), 0);
  for (int rep = 0; rep < reps; ++rep) {
    const DesignProblem d = gen_design(cfg, static_cast<std::uint64_t>(rep));
    TuningOptions opts;
    opts.big_lambda = 100.0;
    const auto lambdas = default_lambda_grid(d.X, d.y, opts.big_lambda);
    for (std::size_t k = 0; k < cases.size(); ++k) {
      if (bic_select(d, cases[k].family, lambdas, cases[k].as, opts).fit.support.empty()) ++empty[k];
    }
  }
  for (std::size_t k = 0; k < cases.size(); ++k) {
    INFO(family_name(cases[k].family) << " empty in " << empty[k] << " of " << reps);
    CHECK(empty[k] >= 0.8 * reps);
  }
}

TEST_CASE("single-candidate grids return that fit") {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd X = testutil::gaussian(30, 6, rng);
  const Eigen::VectorXd y = testutil::gaussian(30, rng);
  const DesignProblem d(X, y);
  const TuningResult t = bic_select(d, Family::kSica, {0.5}, {1.0});
  REQUIRE(t.table.size() == 1);
  const SelectionFit direct = lla_fit(d, PenaltySpec::sica(1.0), 0.5);
  CHECK((t.fit.beta_hat - direct.beta_hat).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK_THROWS_AS(bic_select(d, Family::kSica, {}, {1.0}), DomainError);
  CHECK_THROWS_AS(bic_select(d, Family::kSica, {0.5}, {}), DomainError);
}

TEST_CASE("BIC table is consistent with its winner") {
  const SimConfig cfg = SimConfig::selection_small(0.3);
  const DesignProblem d = gen_design(cfg, 0);
  TuningOptions opts;
  opts.big_lambda = 100.0;
  const auto lambdas = default_lambda_grid(d.X, d.y, opts.big_lambda);
  const TuningResult t = bic_select(d, Family::kSica, lambdas, default_a_grid(Family::kSica), opts);
  double best = kInf;
  for (const auto& c : t.table) {
    if (c.skipped) continue;
    best = std::min(best, c.criterion);
  }
  const double rss = (d.y - d.X * t.fit.beta_hat).squaredNorm();
  const double bic = 100.0 * std::log(rss / 100.0) + double(t.fit.support.size()) * std::log(100.0);
  CHECK(bic == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("cross-validation is deterministic and exact on a noiseless toy") {
  std::mt19937_64 rng(13);
  const Eigen::MatrixXd X = testutil::gaussian(20, 8, rng);
  Eigen::VectorXd b0 = Eigen::VectorXd::Zero(8);
  b0.head(3) << 2.0, -1.5, 1.0;
  const DesignProblem d(X, X * b0, b0);
  TuningOptions opts;
  opts.big_lambda = 20.0;
  const auto lambdas = default_lambda_grid(d.X, d.y, opts.big_lambda);
  const TuningResult a = cv_select(d, Family::kSica, lambdas, {0.1, 1.0}, 5, 42, opts);
  const TuningResult b = cv_select(d, Family::kSica, lambdas, {0.1, 1.0}, 5, 42, opts);
  REQUIRE(a.table.size() == b.table.size());
  for (std::size_t k = 0; k < a.table.size(); ++k) CHECK(a.table[k].criterion == b.table[k].criterion);
  CHECK(a.fit.beta_hat == b.fit.beta_hat);

  // Duplicate candidates score identically.
  const TuningResult dup = cv_select(d, Family::kSica, lambdas, {1.0, 1.0}, 5, 42, opts);
  for (std::size_t k = 0; k + 1 < dup.table.size(); k += 2) {
    CHECK(dup.table[k].criterion == dup.table[k + 1].criterion);
  }
  // Some candidate fits the training data exactly on the true support.
  const double rss = (d.y - d.X * a.fit.beta_hat).squaredNorm();
  CHECK(rss < 1e-6 * d.y.squaredNorm());
  CHECK(a.fit.support == d.support0());

  CHECK_THROWS_AS(cv_select(d, Family::kSica, lambdas, {1.0}, 1, 42, opts), DomainError);
  CHECK_THROWS_AS(cv_select(d, Family::kSica, lambdas, {1.0}, 21, 42, opts), DomainError);
}

TEST_CASE("study output is deterministic and aggregates medians") {
  SimConfig cfg = small_custom();
  const auto methods = default_methods(cfg);
  REQUIRE(methods.size() == 4);
  CHECK(methods[0].kind == MethodKind::kLlaBic);
  const StudyResult a = run_study(cfg, methods);
  const StudyResult b = run_study(cfg, methods);
  std::ostringstream sa, sb;
  write_rows_csv(sa, a.rows);
  write_rows_csv(sb, b.rows);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("method,replicate,pe,num_selected,fn,success\n", 0) == 0);
  REQUIRE(a.rows.size() == 12);
  for (const auto& row : a.rows) {
    CHECK(row.error.empty());
    if (row.success) {
      CHECK(row.false_negatives == 0);
      CHECK(row.num_selected == cfg.s);
    }
  }
  for (const auto& s : a.summary) {
    std::vector<double> pe;
    for (const auto& row : a.rows)
      if (row.method == s.method) pe.push_back(row.pe);
    CHECK(s.pe_median == median_oracle(pe));
    CHECK(s.completed == 3);
  }

  cfg.replications = 1;
  const StudyResult one = run_study(cfg, methods);
  for (std::size_t k = 0; k < methods.size(); ++k) {
    CHECK(one.summary[k].pe_median == one.rows[k].pe);
    CHECK(one.summary[k].num_selected_median == double(one.rows[k].num_selected));
  }
}

TEST_CASE("threads do not change results") {
  SimConfig cfg = small_custom();
  StudyOptions serial;
  StudyOptions parallel;
  parallel.threads = 3;
  const auto methods = default_methods(cfg);
  std::ostringstream a, b;
  write_rows_csv(a, run_study(cfg, methods, serial).rows);
  write_rows_csv(b, run_study(cfg, methods, parallel).rows);
  CHECK(a.str() == b.str());
}

TEST_CASE("method defaults per study") {
  const auto rec = default_methods(SimConfig::recovery(0.0));
  CHECK(rec.front().label == "L1");
  CHECK(rec.back().kind == MethodKind::kSirsAuto);
  CHECK(default_methods(SimConfig::selection_large(0.3))[3].kind == MethodKind::kLlaCv);
}

TEST_CASE("standardization") {
  std::mt19937_64 rng(14);
  Eigen::MatrixXd X = testutil::gaussian(40, 3, rng) * 5.0;
  X.array() += 3.0;
  Eigen::VectorXd y = testutil::gaussian(40, rng);
  y.array() += 10.0;
  Eigen::MatrixXd Xv = X;
  Eigen::VectorXd yv = y;
  standardize(Xv, yv, false);
  CHECK(std::abs(yv.mean()) < 1e-12);
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(std::abs(Xv.col(j).mean()) < 1e-12);
    CHECK(Xv.col(j).squaredNorm() / 39.0 == doctest::Approx(1.0).epsilon(1e-12));
  }
  standardize(X, y, true);
  for (Eigen::Index j = 0; j < 3; ++j) CHECK(X.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("correlated-column design geometry") {
  Eigen::VectorXd b0(3);
  b0 << 1.0, -1.0, 2.0;
  const DesignProblem d = correlated_column_design(3, 0.4, b0, 6);
  for (Eigen::Index j = 0; j < 6; ++j) CHECK(d.X.col(j).norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.X.col(3).dot(d.X.col(0)) == doctest::Approx(0.4 / std::sqrt(3.0)));
  CHECK(d.X.col(3).dot(d.X.col(1)) == doctest::Approx(-0.4 / std::sqrt(3.0)));
  CHECK(std::abs(d.X.col(4).dot(d.X.col(3))) < 1e-15);
  CHECK_THROWS_AS(correlated_column_design(3, 1.0, b0), DomainError);
}
