#include "sica/json_io.hpp"

#include <cmath>
#include <set>

#include "sica/csv.hpp"
#include "sica/errors.hpp"

namespace sica {

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double to_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError("expected a number, got " + j.dump());
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
  return out;
}

json to_json(const IndexSet& s) {
  json out = json::array();
  for (Index j : s) out.push_back(j + 1);
  return out;
}

json to_json(const PenaltySpec& pen) {
  return {{"family", family_name(pen.family)},
          {"a", number(pen.a)},
          {"lambda", number(pen.lambda)},
          {"big_lambda", number(pen.big_lambda)}};
}

json to_json(const RecoveryResult& r) {
  json trace = json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"restart", t.restart},
                     {"iterations", t.iterations},
                     {"converged", t.converged},
                     {"nonzeros", t.nonzeros}});
  }
  return {{"beta_hat", to_json(r.beta_hat)},
          {"support", to_json(r.support)},
          {"a_used", number(r.a_used)},
          {"restarts_used", r.restarts_used},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"sparse_enough", r.sparse_enough},
          {"trace", trace}};
}

json to_json(const SelectionFit& fit) {
  json trace = json::array();
  for (double v : fit.objective_trace) trace.push_back(number(v));
  return {{"beta_hat", to_json(fit.beta_hat)},
          {"support", to_json(fit.support)},
          {"penalty", to_json(fit.pen)},
          {"lambda", number(fit.lambda)},
          {"outer_iters", fit.outer_iters},
          {"converged", fit.converged},
          {"kkt_max_violation", number(fit.kkt_max_violation)},
          {"objective", number(fit.objective)},
          {"objective_trace", trace}};
}

json to_json(const TuningResult& t) {
  json table = json::array();
  for (const auto& c : t.table) {
    table.push_back({{"lambda", number(c.lambda)},
                     {"a", number(c.a)},
                     {"criterion", number(c.criterion)},
                     {"df", c.df},
                     {"skipped", c.skipped}});
  }
  json out = to_json(t.fit);
  out["a"] = number(t.a);
  out["ic_table"] = table;
  return out;
}

json to_json(const ZEstimatorCertificate& c) {
  return {{"eq31_residual", number(c.eq31_residual)},
          {"eq32_margin", c.eq32_margin ? number(*c.eq32_margin) : json(nullptr)},
          {"eq33_margin", number(c.eq33_margin)},
          {"holds", c.holds()}};
}

json to_json(const RecoveryCertificate& c) {
  return {{"lhs", number(c.lhs)},
          {"rhs", number(c.rhs)},
          {"epsilon_box", number(c.epsilon_box)},
          {"satisfied", c.satisfied},
          {"q_condition_ok", c.q_condition_ok},
          {"conservative", c.conservative}};
}

json to_json(const AoptResult& a) {
  return {{"a_opt", number(a.value)}, {"l1_optimal", a.l1_optimal}, {"nonmonotone", a.nonmonotone}};
}

json to_json(const LocalMinCertificate& c) {
  return {{"vacuous_support", c.vacuous_support},
          {"stationarity_residual", number(c.stationarity_residual)},
          {"sign_margin", number(c.sign_margin)},
          {"curvature_margin", number(c.curvature_margin)},
          {"certified", c.certified}};
}

json to_json(const OracleAudit& a) {
  return {{"c1n", number(a.c1n)},
          {"c2n", number(a.c2n)},
          {"d1n", number(a.d1n)},
          {"d2n", number(a.d2n)},
          {"c0", number(a.c0)},
          {"b0", number(a.b0)},
          {"C", number(a.capC)},
          {"kappa0", number(a.kappa0)},
          {"u_n", number(a.u_n)},
          {"sigma", number(a.sigma)},
          {"lambda_min_q", number(a.lambda_min_q)},
          {"derivative_ratio", number(a.derivative_ratio)},
          {"c2n_bound", number(a.c2n_bound)},
          {"lambda_lower", number(a.lambda_lower)},
          {"lambda_upper", number(a.lambda_upper)},
          {"lambda_lower_converged", a.lambda_lower_converged},
          {"lambda_upper_converged", a.lambda_upper_converged},
          {"rate_value", number(a.rate_value)},
          {"gamma_rate", number(a.gamma_rate)},
          {"u_n_bound", number(a.u_n_bound)},
          {"u_n_margin", number(a.u_n_margin)},
          {"prob_bound", number(a.prob_bound)},
          {"h", number(a.h)},
          {"h1", number(a.h1)},
          {"h2", number(a.h2)},
          {"feasible", a.feasible}};
}

json to_json(const SimConfig& cfg) {
  return {{"study", study_name(cfg.study)},
          {"n", cfg.n},
          {"p", cfg.p},
          {"s", cfg.s},
          {"beta0_values", to_json(cfg.beta0_values)},
          {"correlation",
           {{"kind", cfg.correlation == Correlation::kAr ? "ar" : "equicorrelated"},
            {cfg.correlation == Correlation::kAr ? "rho" : "r", number(cfg.corr)}}},
          {"sigma", number(cfg.sigma)},
          {"replications", cfg.replications},
          {"seed", cfg.seed},
          {"test_size", cfg.test_size}};
}

namespace {

template <typename T>
T get_integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ParseError("SimConfig field '" + key + "' must be an integer");
  const auto v = j.get<long long>();
  if (v < 0) throw ParseError("SimConfig field '" + key + "' must be nonnegative");
  return static_cast<T>(v);
}

}  // namespace

SimConfig sim_config_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("SimConfig must be a JSON object");
  static const std::set<std::string> known = {"study", "n", "p", "s", "beta0_values",
                                              "correlation", "sigma", "replications", "seed",
                                              "test_size"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw ParseError("unknown SimConfig field '" + item.key() + "'");
  }
  SimConfig cfg;
  const Study study = j.contains("study") ? parse_study(j.at("study").get<std::string>()) : Study::kCustom;
  switch (study) {
    case Study::kRecovery: {
      double r = 0.0;
      if (j.contains("correlation") && j.at("correlation").contains("r")) {
        r = to_double(j.at("correlation").at("r"));
      }
      cfg = SimConfig::recovery(r);
      break;
    }
    case Study::kSelectionSmall:
      cfg = SimConfig::selection_small(j.contains("sigma") ? to_double(j.at("sigma")) : 0.3);
      break;
    case Study::kSelectionLarge:
      cfg = SimConfig::selection_large(j.contains("sigma") ? to_double(j.at("sigma")) : 0.3);
      break;
    case Study::kCustom: break;
  }
  try {
    if (j.contains("n")) cfg.n = get_integer<Index>(j.at("n"), "n");
    if (j.contains("p")) cfg.p = get_integer<Index>(j.at("p"), "p");
    if (j.contains("beta0_values")) {
      const auto& arr = j.at("beta0_values");
      if (!arr.is_array()) throw ParseError("beta0_values must be an array");
      cfg.beta0_values.resize(static_cast<Index>(arr.size()));
      for (std::size_t i = 0; i < arr.size(); ++i) cfg.beta0_values[static_cast<Index>(i)] = to_double(arr[i]);
      cfg.s = arr.size();
    }
    if (j.contains("s")) cfg.s = get_integer<std::size_t>(j.at("s"), "s");
    if (j.contains("correlation")) {
      const auto& c = j.at("correlation");
      const std::string kind = c.value("kind", "ar");
      if (kind == "ar") {
        cfg.correlation = Correlation::kAr;
        if (c.contains("rho")) cfg.corr = to_double(c.at("rho"));
      } else if (kind == "equicorrelated") {
        cfg.correlation = Correlation::kEquicorrelated;
        if (c.contains("r")) cfg.corr = to_double(c.at("r"));
      } else {
        throw ParseError("unknown correlation kind '" + kind + "'");
      }
    }
    if (j.contains("sigma")) cfg.sigma = to_double(j.at("sigma"));
    if (j.contains("replications")) cfg.replications = get_integer<int>(j.at("replications"), "replications");
    if (j.contains("seed")) cfg.seed = get_integer<std::uint64_t>(j.at("seed"), "seed");
    if (j.contains("test_size")) cfg.test_size = get_integer<Index>(j.at("test_size"), "test_size");
  } catch (const json::exception& e) {
    throw ParseError(std::string("SimConfig: ") + e.what());
  }
  cfg.study = study;
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  return cfg;
}

namespace {

void write(std::string& out, const json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const std::string colon = indent > 0 ? ": " : ":";
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += '{';
    bool first = true;
    for (const auto& item : j.items()) {
      if (!first) out += ',';
      first = false;
      out += pad;
      out += json(item.key()).dump();
      out += colon;
      write(out, item.value(), indent, depth + 1);
    }
    out += close + '}';
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    out += '[';
    bool first = true;
    for (const auto& v : j) {
      if (!first) out += ',';
      first = false;
      out += pad;
      write(out, v, indent, depth + 1);
    }
    out += close + ']';
  } else if (j.is_number_float()) {
    out += csv::format_double(j.get<double>());
  } else {
    out += j.dump();
  }
}

}  // namespace

std::string dump(const json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  return out;
}

}  // namespace sica
