#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sica/certify.hpp"
#include "sica/csv.hpp"
#include "sica/errors.hpp"
#include "sica/experiment.hpp"
#include "sica/json_io.hpp"
#include "sica/lla.hpp"
#include "sica/sirs.hpp"

namespace sica::cli {

namespace {

double parse_real(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "infinity") return kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw ParseError("not a number: '" + text + "'");
  return v;
}

long long parse_int(const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw ParseError("not an integer: '" + text + "'");
  }
  if (used != text.size()) throw ParseError("not an integer: '" + text + "'");
  return v;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_real(item));
  }
  if (out.empty()) throw ParseError("empty list: '" + text + "'");
  return out;
}

using Setter = std::function<void(const std::string&)>;

void apply_overrides(const std::vector<std::string>& sets, const std::map<std::string, Setter>& keys) {
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError("override must be key=value: '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const auto it = keys.find(key);
    if (it == keys.end()) {
      std::string known;
      for (const auto& k : keys) known += (known.empty() ? "" : ", ") + k.first;
      throw ParseError("unknown override key '" + key + "' (known: " + known + ")");
    }
    it->second(kv.substr(eq + 1));
  }
}

std::uint64_t resolve_seed(const std::string& flag) {
  if (!flag.empty()) return static_cast<std::uint64_t>(parse_int(flag));
  if (const char* env = std::getenv("SICA_SEED")) return static_cast<std::uint64_t>(parse_int(env));
  return 1;
}

// Writes text to path, or to out when path is empty or to_stdout is set.
void emit(const std::string& text, const std::string& path, bool to_stdout, std::ostream& out) {
  if (!path.empty()) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot open '" + path + "' for writing");
    f << text;
  }
  if (path.empty() || to_stdout) out << text;
}

PenaltySpec penalty_from(const std::string& family, std::optional<double> a, double lambda,
                         double big_lambda) {
  PenaltySpec pen;
  pen.family = parse_family(family);
  pen.lambda = lambda;
  pen.big_lambda = big_lambda;
  switch (pen.family) {
    case Family::kSica: pen.a = a.value_or(1.0); break;
    case Family::kScad: pen.a = a.value_or(3.7); break;
    case Family::kMcp: pen.a = a.value_or(3.0); break;
    case Family::kLog: pen.a = a.value_or(1.0); break;
    case Family::kL1: pen.a = kInf; break;
    case Family::kL0: pen.a = 0.0; break;
  }
  return pen;
}

struct Common {
  std::string output;
  bool to_stdout = false;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-o,--output", c.output, "Output file (stdout when omitted)");
  cmd->add_flag("--stdout", c.to_stdout, "Also write data to stdout");
  cmd->add_option("--set", c.sets, "key=value override")->take_all();
}

DesignProblem load_problem(const std::string& xpath, const std::string& ypath) {
  Eigen::MatrixXd X = csv::read_matrix(xpath);
  Eigen::VectorXd y = csv::read_vector(ypath);
  if (y.size() != X.rows()) {
    throw ParseError("y has " + std::to_string(y.size()) + " entries but X has " +
                     std::to_string(X.rows()) + " rows");
  }
  DesignProblem problem(std::move(X), std::move(y));
  problem.validate();
  return problem;
}

int cmd_recover(const std::string& xpath, const std::string& ypath, const std::string& a_grid,
                const std::string& beta_path, const Common& c, std::ostream& out,
                std::ostream& err) {
  const DesignProblem problem = load_problem(xpath, ypath);
  SirsConfig cfg;
  if (!a_grid.empty()) cfg.a_grid = parse_list(a_grid);
  apply_overrides(c.sets, {
      {"sparsity_budget", [&](const std::string& v) { cfg.sparsity_budget = static_cast<std::size_t>(parse_int(v)); }},
      {"max_iters", [&](const std::string& v) { cfg.max_iters = static_cast<int>(parse_int(v)); }},
      {"max_restarts", [&](const std::string& v) { cfg.max_restarts = static_cast<std::size_t>(parse_int(v)); }},
      {"floor_constant", [&](const std::string& v) { cfg.floor_constant = parse_real(v); }},
      {"converge_tol", [&](const std::string& v) { cfg.converge_tol = parse_real(v); }},
      {"hard_threshold", [&](const std::string& v) { cfg.hard_threshold = parse_real(v); }},
      {"ridge", [&](const std::string& v) { cfg.ridge = parse_real(v); }},
  });

  const Eigen::VectorXd ls = min_l2_solution(problem.X, problem.y);
  const double gap = (problem.y - problem.X * ls).norm();
  if (gap > 1e-6 * std::max(1.0, problem.y.norm())) {
    err << "warning: y is not in the column space of X (residual " << gap << "); proceeding\n";
  }

  const RecoveryResult r = sirs_auto(problem, cfg);
  if (!beta_path.empty()) csv::write_vector(beta_path, r.beta_hat);
  emit(dump(to_json(r)) + "\n", c.output, c.to_stdout, out);
  if (!r.sparse_enough) {
    err << "no a in the grid produced a solution with at most the sparsity budget of nonzeros\n";
    return kNotSparse;
  }
  return kOk;
}

struct SelectArgs {
  std::string penalty = "sica";
  std::string tune = "bic";
  int folds = 5;
  std::string lambda;
  std::string a;
  std::string a_grid;
  std::string seed;
  std::string beta_path;
};

int cmd_select(const std::string& xpath, const std::string& ypath, const SelectArgs& s,
               const Common& c, std::ostream& out, std::ostream&) {
  const DesignProblem problem = load_problem(xpath, ypath);
  TuningOptions opts;
  std::size_t lambda_count = 50;
  double lambda_ratio = 1e-3;
  apply_overrides(c.sets, {
      {"big_lambda", [&](const std::string& v) { opts.big_lambda = parse_real(v); }},
      {"max_outer", [&](const std::string& v) { opts.lla.max_outer = static_cast<int>(parse_int(v)); }},
      {"lla_tol", [&](const std::string& v) { opts.lla.tol = parse_real(v); }},
      {"lasso_tol", [&](const std::string& v) { opts.lla.inner.tol = parse_real(v); }},
      {"lambda_count", [&](const std::string& v) { lambda_count = static_cast<std::size_t>(parse_int(v)); }},
      {"lambda_ratio", [&](const std::string& v) { lambda_ratio = parse_real(v); }},
  });
  const Family family = parse_family(s.penalty);
  std::optional<double> a_fixed;
  if (!s.a.empty()) a_fixed = parse_real(s.a);

  json result;
  SelectionFit fit;
  if (!s.lambda.empty()) {
    const double lambda = parse_real(s.lambda);
    const PenaltySpec pen = penalty_from(s.penalty, a_fixed, lambda, opts.big_lambda);
    fit = lla_fit(problem, pen, lambda, std::nullopt, opts.lla);
    result = to_json(fit);
  } else {
    std::vector<double> as = default_a_grid(family);
    if (a_fixed) as = {*a_fixed};
    if (!s.a_grid.empty()) as = parse_list(s.a_grid);
    const auto lambdas = default_lambda_grid(problem.X, problem.y, opts.big_lambda, lambda_count, lambda_ratio);
    TuningResult t;
    if (s.tune == "bic") {
      t = bic_select(problem, family, lambdas, as, opts);
    } else if (s.tune == "cv") {
      t = cv_select(problem, family, lambdas, as, s.folds, resolve_seed(s.seed), opts);
    } else {
      throw ParseError("--tune must be bic or cv");
    }
    fit = t.fit;
    result = to_json(t);
  }
  try {
    result["zestimator"] = to_json(zestimator_check(problem, fit));
  } catch (const NotCertifiableError& e) {
    result["zestimator"] = e.what();
  }
  if (!s.beta_path.empty()) csv::write_vector(s.beta_path, fit.beta_hat);
  emit(dump(result) + "\n", c.output, c.to_stdout, out);
  return kOk;
}

struct CertifyArgs {
  std::string epsilon;
  std::string penalty = "sica";
  std::string a;
  std::string lambda;
  bool aopt = false;
  bool interval = false;
  std::string audit;
  std::string beta_hat;
};

int cmd_certify(const std::string& xpath, const std::string& bpath, const CertifyArgs& s,
                const Common& c, std::ostream& out, std::ostream&) {
  Eigen::MatrixXd X = csv::read_matrix(xpath);
  Eigen::VectorXd beta0 = csv::read_vector(bpath);
  if (beta0.size() != X.cols()) {
    throw ParseError("beta0 has " + std::to_string(beta0.size()) + " entries but X has " +
                     std::to_string(X.cols()) + " columns");
  }
  double big_lambda = 1.0;
  apply_overrides(c.sets, {{"big_lambda", [&](const std::string& v) { big_lambda = parse_real(v); }}});
  Eigen::VectorXd y = X * beta0;
  const DesignProblem problem(X, y, beta0);
  problem.validate();
  std::optional<double> a_fixed;
  if (!s.a.empty()) a_fixed = parse_real(s.a);
  const double lambda = s.lambda.empty() ? 0.0 : parse_real(s.lambda);
  const PenaltySpec pen = penalty_from(s.penalty, a_fixed, lambda, big_lambda);

  const IndexSet support = support_of(beta0);
  const double bmin = support.empty() ? 1.0 : select_entries(beta0, support).cwiseAbs().minCoeff();
  const double eps = s.epsilon.empty() ? std::min(1e-3, 0.5 * bmin) : parse_real(s.epsilon);

  json result;
  if (!s.audit.empty()) {
    std::vector<std::string> parts;
    std::stringstream ss(s.audit);
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
    if (parts.size() != 4) throw ParseError("--audit expects sigma,u_n,c0,C");
    const double u_n = parts[1] == "auto"
                           ? std::sqrt(2.0 * std::log(static_cast<double>(X.cols()))) + 1.0
                           : parse_real(parts[1]);
    result["audit"] = to_json(weak_oracle_audit(problem, pen, parse_real(parts[0]), u_n,
                                                parse_real(parts[2]), parse_real(parts[3])));
  } else if (s.aopt) {
    result = to_json(a_opt(problem, eps));
  } else if (!s.beta_hat.empty()) {
    const Eigen::VectorXd bh = csv::read_vector(s.beta_hat);
    result["local_min"] = to_json(strict_local_min(problem, bh, pen, lambda));
  } else {
    result = to_json(s.interval ? recovery_condition_interval(problem, pen, eps)
                                : recovery_condition(problem, pen, eps));
    result["penalty"] = to_json(pen);
  }
  emit(dump(result) + "\n", c.output, c.to_stdout, out);
  return kOk;
}

int cmd_penalty_table(const std::string& family, const std::string& a, double lambda, double tmax,
                      int points, const Common& c, std::ostream& out, std::ostream&) {
  if (points < 2) throw ParseError("--points must be at least 2");
  if (!(tmax > 0.0)) throw ParseError("--tmax must be positive");
  std::optional<double> a_fixed;
  if (!a.empty()) a_fixed = parse_real(a);
  const PenaltySpec pen = penalty_from(family, a_fixed, lambda, 1.0);
  pen.validate();
  std::ostringstream text;
  text << "t,rho,rho_prime,concavity\n";
  for (int i = 0; i < points; ++i) {
    const double t = tmax * i / (points - 1);
    text << csv::format_double(t) << ',' << csv::format_double(rho(pen, t)) << ',';
    if (pen.has_derivative()) {
      text << csv::format_double(rho_prime(pen, t)) << ','
           << csv::format_double(t > 0.0 ? concavity_at(pen, t) : 0.0) << '\n';
    } else {
      text << "nan,nan\n";
    }
  }
  emit(text.str(), c.output, c.to_stdout, out);
  return kOk;
}

struct SimulateArgs {
  std::string config;
  std::string study;
  std::string rows_path;
  std::string seed;
  unsigned threads = 1;
};

int cmd_simulate(const SimulateArgs& s, const Common& c, std::ostream& out, std::ostream& err) {
  SimConfig cfg;
  if (!s.config.empty()) {
    std::ifstream f(s.config);
    if (!f) throw ParseError("cannot open config '" + s.config + "'");
    json j;
    try {
      j = json::parse(f);
    } catch (const json::exception& e) {
      throw ParseError("config '" + s.config + "': " + e.what());
    }
    cfg = sim_config_from_json(j);
  } else if (!s.study.empty()) {
    cfg = sim_config_from_json(json{{"study", s.study}});
  } else {
    throw ParseError("simulate needs --config or --study");
  }
  if (!s.seed.empty() || std::getenv("SICA_SEED")) cfg.seed = resolve_seed(s.seed);
  StudyOptions opts;
  opts.threads = s.threads;
  opts.log = &err;
  apply_overrides(c.sets, {
      {"n", [&](const std::string& v) { cfg.n = parse_int(v); }},
      {"p", [&](const std::string& v) { cfg.p = parse_int(v); }},
      {"sigma", [&](const std::string& v) { cfg.sigma = parse_real(v); }},
      {"corr", [&](const std::string& v) { cfg.corr = parse_real(v); }},
      {"replications", [&](const std::string& v) { cfg.replications = static_cast<int>(parse_int(v)); }},
      {"seed", [&](const std::string& v) { cfg.seed = static_cast<std::uint64_t>(parse_int(v)); }},
      {"test_size", [&](const std::string& v) { cfg.test_size = parse_int(v); }},
      {"folds", [&](const std::string& v) { opts.cv_folds = static_cast<int>(parse_int(v)); }},
  });
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  const StudyResult result = run_study(cfg, default_methods(cfg), opts);
  if (!s.rows_path.empty()) {
    std::ofstream f(s.rows_path);
    if (!f) throw ParseError("cannot open '" + s.rows_path + "' for writing");
    write_rows_csv(f, result.rows);
  }
  std::ostringstream summary;
  write_summary_csv(summary, result.summary);
  emit(summary.str(), c.output, c.to_stdout, out);
  return kOk;
}

int cmd_diabetes(const std::string& path, int folds, const std::string& seed,
                 const std::string& scaling, const Common& c, std::ostream& out, std::ostream&) {
  std::vector<std::string> header;
  const Eigen::MatrixXd data = csv::read_matrix_with_header(path, &header);
  if (data.rows() != 442 || data.cols() != 11) {
    throw ParseError("expected 442 rows and 11 columns, got " + std::to_string(data.rows()) + "x" +
                     std::to_string(data.cols()));
  }
  if (scaling != "variance" && scaling != "norm") throw ParseError("--scaling must be variance or norm");
  if (header.empty()) header = {"age", "sex", "bmi", "bp", "tc", "ldl", "hdl", "tch", "ltg", "glu", "y"};
  RealDataOptions opts;
  opts.folds = folds;
  opts.seed = resolve_seed(seed);
  opts.unit_norm = scaling == "norm";
  const auto rows = analyze_real_data(data.leftCols(10), data.col(10), opts);

  std::ostringstream text;
  text << "method";
  for (int j = 0; j < 10; ++j) text << ',' << header[static_cast<std::size_t>(j)];
  text << ",r2_adj,ape,lambda,a\n";
  for (const auto& r : rows) {
    text << r.method;
    for (Index j = 0; j < r.coef.size(); ++j) text << ',' << csv::format_double(r.coef[j]);
    text << ',' << csv::format_double(r.r2_adj) << ',' << csv::format_double(r.ape) << ','
         << csv::format_double(r.lambda) << ',' << csv::format_double(r.a) << '\n';
  }
  emit(text.str(), c.output, c.to_stdout, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concave-penalized least squares: sparse recovery, selection and certificates", "sica"};
  app.require_subcommand(1);

  Common common;
  std::string xpath, ypath;

  auto* recover = app.add_subcommand("recover", "Sparse recovery of y = X beta by SIRS");
  std::string a_grid, beta_out;
  recover->add_option("X", xpath, "Design matrix CSV")->required();
  recover->add_option("y", ypath, "Response CSV")->required();
  recover->add_option("--a-grid", a_grid, "Comma-separated SICA a values (inf allowed)");
  recover->add_option("--beta", beta_out, "Write the recovered coefficients to this CSV");
  add_common(recover, common);

  auto* select = app.add_subcommand("select", "Penalized least squares by LLA with tuning");
  SelectArgs sel;
  select->add_option("X", xpath, "Design matrix CSV")->required();
  select->add_option("y", ypath, "Response CSV")->required();
  select->add_option("--penalty", sel.penalty, "sica, l1, scad, mcp or log");
  select->add_option("--tune", sel.tune, "bic or cv");
  select->add_option("--folds", sel.folds, "Cross-validation folds");
  select->add_option("--lambda", sel.lambda, "Fixed lambda (skips tuning)");
  select->add_option("--a", sel.a, "Fixed shape parameter");
  select->add_option("--a-grid", sel.a_grid, "Comma-separated shape grid");
  select->add_option("--seed", sel.seed, "Fold-shuffle seed (falls back to SICA_SEED)");
  select->add_option("--beta", sel.beta_path, "Write the fitted coefficients to this CSV");
  add_common(select, common);

  auto* certify = app.add_subcommand("certify", "Recoverability, a_opt, local-minimum and oracle certificates");
  CertifyArgs cer;
  certify->add_option("X", xpath, "Design matrix CSV")->required();
  certify->add_option("beta0", ypath, "True coefficient CSV")->required();
  certify->add_option("--epsilon", cer.epsilon, "Box half-width around beta0");
  certify->add_option("--penalty", cer.penalty, "Penalty family");
  certify->add_option("--a", cer.a, "Shape parameter");
  certify->add_option("--lambda", cer.lambda, "Regularization level");
  certify->add_flag("--aopt", cer.aopt, "Compute the largest certified SICA a");
  certify->add_flag("--interval", cer.interval, "Use the interval bound instead of vertex enumeration");
  certify->add_option("--audit", cer.audit, "Weak-oracle audit: sigma,u_n,c0,C (u_n may be auto)");
  certify->add_option("--beta-hat", cer.beta_hat, "Check a fitted vector for a strict local minimum");
  add_common(certify, common);

  auto* table = app.add_subcommand("penalty-table", "Tabulate rho, rho' and concavity");
  std::string t_family = "sica", t_a;
  double t_lambda = 1.0, t_max = 5.0;
  int t_points = 101;
  table->add_option("--penalty", t_family, "Penalty family");
  table->add_option("--a", t_a, "Shape parameter");
  table->add_option("--lambda", t_lambda, "Regularization level (SCAD and MCP)");
  table->add_option("--tmax", t_max, "Largest t");
  table->add_option("--points", t_points, "Number of grid points");
  add_common(table, common);

  auto* simulate = app.add_subcommand("simulate", "Run a seeded simulation study");
  SimulateArgs sim;
  simulate->add_option("--config", sim.config, "SimConfig JSON file");
  simulate->add_option("--study", sim.study, "recovery, selection_small or selection_large");
  simulate->add_option("--rows", sim.rows_path, "Per-replicate CSV");
  simulate->add_option("--seed", sim.seed, "Seed (falls back to SICA_SEED)");
  simulate->add_option("--threads", sim.threads, "Concurrent replicates");
  add_common(simulate, common);

  auto* diabetes = app.add_subcommand("diabetes", "Four-method comparison on the 442-patient data");
  std::string d_path, d_seed, d_scaling = "variance";
  int d_folds = 5;
  diabetes->add_option("data", d_path, "442x11 CSV (header optional)")->required();
  diabetes->add_option("--folds", d_folds, "Cross-validation folds");
  diabetes->add_option("--seed", d_seed, "Fold-shuffle seed (falls back to SICA_SEED)");
  diabetes->add_option("--scaling", d_scaling, "variance or norm");
  add_common(diabetes, common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*recover) return cmd_recover(xpath, ypath, a_grid, beta_out, common, out, err);
    if (*select) return cmd_select(xpath, ypath, sel, common, out, err);
    if (*certify) return cmd_certify(xpath, ypath, cer, common, out, err);
    if (*table) return cmd_penalty_table(t_family, t_a, t_lambda, t_max, t_points, common, out, err);
    if (*simulate) return cmd_simulate(sim, common, out, err);
    if (*diabetes) return cmd_diabetes(d_path, d_folds, d_seed, d_scaling, common, out, err);
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << "\n";
    return kResourceError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace sica::cli
