#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sica/linalg.hpp"
#include "sica/lla.hpp"
#include "sica/penalty.hpp"
#include "sica/sirs.hpp"

namespace sica {

enum class Study { kRecovery, kSelectionSmall, kSelectionLarge, kCustom };
enum class Correlation { kEquicorrelated, kAr };

std::string study_name(Study s);
Study parse_study(const std::string& name);

// (1, -0.5, 0.7, -1.2, -0.9, 0.3, 0.55), the signal used by every study.
Eigen::VectorXd reference_beta0();

struct SimConfig {
  Study study = Study::kCustom;
  Index n = 100;
  Index p = 50;
  std::size_t s = 7;
  Eigen::VectorXd beta0_values = reference_beta0();
  Correlation correlation = Correlation::kAr;
  // r for equicorrelated rows, rho for AR(1) rows.
  double corr = 0.5;
  double sigma = 0.3;
  int replications = 100;
  std::uint64_t seed = 1;
  Index test_size = 10000;

  // Presets: (s, n, p) = (7, 35, 1000) equicorrelated; (100, 50) and
  // (100, 600) with AR(0.5) rows.
  static SimConfig recovery(double r);
  static SimConfig selection_small(double sigma);
  static SimConfig selection_large(double sigma);

  // Recovery studies rescale columns and have no noise.
  bool noiseless() const { return study == Study::kRecovery; }
  Eigen::VectorXd beta0() const;
  Eigen::MatrixXd covariance() const;
  void validate() const;
};

// Generator for (seed, replicate, stream); a pure function of its arguments.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream);

// Rows i.i.d. from the configured Gaussian design law.
Eigen::MatrixXd sample_rows(const SimConfig& cfg, Index rows, std::mt19937_64& rng);

DesignProblem gen_design(const SimConfig& cfg, std::uint64_t replicate);

struct MetricsRow {
  std::string method;
  std::size_t replicate = 0;
  double pe = std::numeric_limits<double>::quiet_NaN();
  std::size_t num_selected = 0;
  std::size_t false_negatives = 0;
  bool success = false;
  // Nonempty when the replicate failed; the other fields are then unset.
  std::string error;
};

bool exact_recovery(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta0,
                    double tol = 1e-4);
std::size_t false_negatives(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta0);

// Percentage of error-free rows with success set.
double success_rate(const std::vector<MetricsRow>& rows);

// Monte-Carlo mean of (y* - x*^T beta_hat)^2 over cfg.test_size fresh draws.
double prediction_error(const Eigen::VectorXd& beta_hat, const SimConfig& cfg,
                        std::uint64_t test_seed);
// sigma^2 + (beta_hat - beta0)^T Sigma (beta_hat - beta0).
double population_prediction_error(const Eigen::VectorXd& beta_hat, const SimConfig& cfg);

// Median with the mean of the two middle values for even sizes; NaN if empty.
double median(std::vector<double> values);

// 50 log-spaced values from ||X^T y||_inf / Lambda down to ratio times that.
std::vector<double> default_lambda_grid(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                        double big_lambda = 1.0, std::size_t count = 50,
                                        double ratio = 1e-3);
// Shape-parameter grid per family; {inf} for L1.
std::vector<double> default_a_grid(Family family);

struct TuningCandidate {
  double lambda = 0.0;
  double a = 0.0;
  double criterion = 0.0;
  std::size_t df = 0;
  bool skipped = false;
};

struct TuningResult {
  SelectionFit fit;
  double a = 0.0;
  std::vector<TuningCandidate> table;
};

struct TuningOptions {
  double big_lambda = 1.0;
  LlaOptions lla;
};

// Minimizes n log(RSS/n) + df log n over the (lambda, a) grid. Each a is
// started from the lasso at the same lambda. Candidates with df >= n are
// skipped. Ties go to the sparser model, then the larger lambda.
TuningResult bic_select(const DesignProblem& problem, Family family,
                        const std::vector<double>& lambda_grid, const std::vector<double>& a_grid,
                        const TuningOptions& opts = {});

// K-fold cross-validated prediction error with a seeded fold shuffle, then a
// refit on the full data at the winner.
TuningResult cv_select(const DesignProblem& problem, Family family,
                       const std::vector<double>& lambda_grid, const std::vector<double>& a_grid,
                       int folds, std::uint64_t seed, const TuningOptions& opts = {});

enum class MethodKind { kSirs, kSirsAuto, kLlaBic, kLlaCv };

struct MethodSpec {
  std::string label;
  MethodKind kind = MethodKind::kLlaBic;
  Family family = Family::kSica;
  // SIRS shape parameter for kSirs.
  double a = 1.0;
};

// Defaults per study: the SIRS ladder for recovery, and lasso/SCAD/MCP/SICA
// tuned by BIC (p < n) or 5-fold CV otherwise.
std::vector<MethodSpec> default_methods(const SimConfig& cfg);

struct StudyOptions {
  SirsConfig sirs;
  TuningOptions tuning;
  int cv_folds = 5;
  // Use Lambda = n for the LLA methods, so that lambda lives on the
  // coefficient scale; tuning.big_lambda is used otherwise.
  bool scale_by_n = true;
  unsigned threads = 1;
  // Replicate failures are reported here as they happen.
  std::ostream* log = nullptr;
};

struct SummaryRow {
  std::string method;
  double pe_median = 0.0;
  double num_selected_median = 0.0;
  double fn_median = 0.0;
  double success_pct = 0.0;
  std::size_t completed = 0;
  std::size_t failed = 0;
};

struct StudyResult {
  std::vector<MetricsRow> rows;  // replicate-major, then method order
  std::vector<SummaryRow> summary;
};

MetricsRow evaluate_method(const MethodSpec& method, const DesignProblem& problem,
                           const SimConfig& cfg, std::size_t replicate, const StudyOptions& opts);

StudyResult run_study(const SimConfig& cfg, const std::vector<MethodSpec>& methods,
                      const StudyOptions& opts = {});

std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows,
                                  const std::vector<MethodSpec>& methods);

// Header method,replicate,pe,num_selected,fn,success.
void write_rows_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);

struct RealDataOptions {
  int folds = 5;
  std::uint64_t seed = 1;
  // Scale predictors to unit L2 norm instead of unit sample variance.
  bool unit_norm = false;
  LlaOptions lla;
};

struct CoefficientRow {
  std::string method;
  Eigen::VectorXd coef;
  double lambda = 0.0;
  double a = 0.0;
  double r2_adj = 0.0;
  // Cross-validated mean squared prediction error at the selected tuning.
  double ape = 0.0;
};

// Centers the columns of X and scales them per opts; centers y.
void standardize(Eigen::MatrixXd& X, Eigen::VectorXd& y, bool unit_norm);

// Lasso, SCAD, MCP and SICA, each tuned by K-fold CV with Lambda = n, on
// standardized predictors and a centered response.
std::vector<CoefficientRow> analyze_real_data(Eigen::MatrixXd X, Eigen::VectorXd y,
                                              const RealDataOptions& opts = {});

// Orthonormal construction with one correlated noise column:
// x_j = e_j for j <= s, x_{s+1} = r s^{-1/2} sum_j sgn(beta0_j) e_j +
// sqrt(1 - r^2) e_{s+1}, remaining columns orthogonal to everything else.
DesignProblem correlated_column_design(std::size_t s, double r, const Eigen::VectorXd& beta0, Index p = 0);

}  // namespace sica
