#include "sica/penalty.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "sica/errors.hpp"

namespace sica {

namespace {

void require_derivative(const PenaltySpec& pen) {
  if (!pen.has_derivative()) {
    throw UnsupportedError("L0 penalty has no derivative");
  }
}

void require_positive_lambda(const PenaltySpec& pen) {
  if (!(pen.lambda > 0.0)) {
    throw DomainError(pen.name() + ": rho is defined only for lambda > 0");
  }
}

// Objective of the univariate problem restricted to theta = t >= 0, with
// |z| = az and c = Lambda * lambda.
double scalar_objective(const PenaltySpec& pen, double az, double t) {
  const double r = az - t;
  return 0.5 * r * r + pen.big_lambda * penalty_value(pen, t);
}

// Root of an increasing function on [lo, hi] with f(lo) < 0 < f(hi).
template <typename F>
double bisect_increasing(F&& f, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Families whose rho' is convex and strictly decreasing (SICA finite a, log):
// g(t) = t - |z| + c rho'(t) is convex, so the only candidate interior local
// minimum of the univariate objective is the root of g right of argmin g.
double threshold_convex_derivative(const PenaltySpec& pen, double az) {
  const double c = pen.scale();
  const double a = pen.a;
  double t_star = 0.0;
  if (pen.family == Family::kSica) {
    t_star = std::cbrt(2.0 * c * a * (a + 1.0)) - a;
  } else {
    t_star = std::sqrt(c * (a + 1.0)) - a;
  }
  t_star = std::clamp(t_star, 0.0, az);
  auto g = [&](double t) { return t - az + c * rho_prime(pen, t); };
  double best_t = 0.0;
  double best_f = scalar_objective(pen, az, 0.0);
  if (g(t_star) < 0.0) {
    // g(az) = c rho'(az) > 0, so a root exists in (t_star, az).
    const double root = bisect_increasing(g, t_star, az);
    const double f = scalar_objective(pen, az, root);
    if (f < best_f) {
      best_f = f;
      best_t = root;
    }
  }
  return best_t;
}

// Families with piecewise-linear rho' (L1, SCAD, MCP): the objective is
// piecewise quadratic, so compare segment endpoints and per-segment
// stationary points.
double threshold_piecewise(const PenaltySpec& pen, double az) {
  const double c = pen.scale();
  const double lam = pen.lambda;
  // Segments [lo, hi] with rho'(t) = alpha + beta t.
  struct Segment {
    double lo, hi, alpha, beta;
  };
  std::vector<Segment> segments;
  switch (pen.family) {
    case Family::kL1:
    case Family::kSica:  // a = inf
      segments.push_back({0.0, kInf, 1.0, 0.0});
      break;
    case Family::kScad: {
      const double a = pen.a;
      segments.push_back({0.0, lam, 1.0, 0.0});
      segments.push_back({lam, a * lam, a / (a - 1.0), -1.0 / ((a - 1.0) * lam)});
      segments.push_back({a * lam, kInf, 0.0, 0.0});
      break;
    }
    case Family::kMcp: {
      const double a = pen.a;
      segments.push_back({0.0, a * lam, 1.0, -1.0 / (a * lam)});
      segments.push_back({a * lam, kInf, 0.0, 0.0});
      break;
    }
    default:
      throw UnsupportedError("piecewise threshold: unexpected family");
  }
  std::vector<double> candidates{0.0, az};
  for (const auto& seg : segments) {
    const double lo = std::min(seg.lo, az);
    const double hi = std::min(seg.hi, az);
    candidates.push_back(lo);
    candidates.push_back(hi);
    const double curvature = 1.0 + c * seg.beta;
    if (curvature > 0.0) {
      const double t = (az - c * seg.alpha) / curvature;
      if (t >= lo && t <= hi) candidates.push_back(t);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  double best_t = 0.0;
  double best_f = scalar_objective(pen, az, 0.0);
  for (double t : candidates) {
    const double f = scalar_objective(pen, az, t);
    if (f < best_f) {
      best_f = f;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace

PenaltySpec PenaltySpec::sica(double a, double lambda, double big_lambda) {
  PenaltySpec p{Family::kSica, a, lambda, big_lambda};
  p.validate();
  return p;
}

PenaltySpec PenaltySpec::l1(double lambda, double big_lambda) {
  PenaltySpec p{Family::kL1, kInf, lambda, big_lambda};
  p.validate();
  return p;
}

PenaltySpec PenaltySpec::l0(double lambda, double big_lambda) {
  PenaltySpec p{Family::kL0, 0.0, lambda, big_lambda};
  p.validate();
  return p;
}

PenaltySpec PenaltySpec::scad(double a, double lambda, double big_lambda) {
  PenaltySpec p{Family::kScad, a, lambda, big_lambda};
  p.validate();
  return p;
}

PenaltySpec PenaltySpec::mcp(double a, double lambda, double big_lambda) {
  PenaltySpec p{Family::kMcp, a, lambda, big_lambda};
  p.validate();
  return p;
}

PenaltySpec PenaltySpec::log_penalty(double a, double lambda, double big_lambda) {
  PenaltySpec p{Family::kLog, a, lambda, big_lambda};
  p.validate();
  return p;
}

void PenaltySpec::validate() const {
  if (!(lambda >= 0.0) || std::isinf(lambda)) {
    throw DomainError("lambda must be a finite nonnegative number");
  }
  if (!(big_lambda > 0.0) || std::isinf(big_lambda)) {
    throw DomainError("big_lambda must be a finite positive number");
  }
  switch (family) {
    case Family::kSica:
      if (!(a >= 0.0)) throw DomainError("SICA requires a >= 0 or a = inf");
      break;
    case Family::kScad:
      if (!(a > 2.0) || std::isinf(a)) throw DomainError("SCAD requires finite a > 2");
      break;
    case Family::kMcp:
      if (!(a >= 1.0) || std::isinf(a)) throw DomainError("MCP requires finite a >= 1");
      break;
    case Family::kLog:
      if (!(a > 0.0) || std::isinf(a)) throw DomainError("log penalty requires finite a > 0");
      break;
    case Family::kL1:
    case Family::kL0:
      break;
  }
}

std::string family_name(Family family) {
  switch (family) {
    case Family::kSica: return "sica";
    case Family::kL1: return "l1";
    case Family::kL0: return "l0";
    case Family::kScad: return "scad";
    case Family::kMcp: return "mcp";
    case Family::kLog: return "log";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "sica") return Family::kSica;
  if (lower == "l1" || lower == "lasso") return Family::kL1;
  if (lower == "l0") return Family::kL0;
  if (lower == "scad") return Family::kScad;
  if (lower == "mcp") return Family::kMcp;
  if (lower == "log") return Family::kLog;
  throw DomainError("unknown penalty family '" + name + "'");
}

std::string PenaltySpec::name() const {
  std::ostringstream os;
  os << family_name(family);
  if (family == Family::kSica || family == Family::kScad || family == Family::kMcp ||
      family == Family::kLog) {
    os << "(a=" << a << ")";
  }
  return os.str();
}

double rho(const PenaltySpec& pen, double t) {
  if (t < 0.0) throw DomainError("rho: t must be nonnegative");
  if (pen.is_l0()) return t != 0.0 ? 1.0 : 0.0;
  if (pen.is_l1()) return t;
  const double a = pen.a;
  switch (pen.family) {
    case Family::kSica:
      return (a + 1.0) * t / (a + t);
    case Family::kLog:
      return (a + 1.0) * std::log1p(t / a);
    case Family::kScad: {
      require_positive_lambda(pen);
      const double lam = pen.lambda;
      if (t <= lam) return t;
      if (t <= a * lam) return (2.0 * a * lam * t - t * t - lam * lam) / (2.0 * (a - 1.0) * lam);
      return (a + 1.0) * lam / 2.0;
    }
    case Family::kMcp: {
      require_positive_lambda(pen);
      const double lam = pen.lambda;
      if (t <= a * lam) return t - t * t / (2.0 * a * lam);
      return a * lam / 2.0;
    }
    default:
      break;
  }
  throw UnsupportedError("rho: unexpected family");
}

double penalty_value(const PenaltySpec& pen, double t) {
  if (pen.lambda == 0.0) return 0.0;
  return pen.lambda * rho(pen, t);
}

double penalty_sum(const PenaltySpec& pen, const Eigen::VectorXd& beta) {
  if (pen.lambda == 0.0) return 0.0;
  double total = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) total += penalty_value(pen, std::abs(beta[j]));
  return pen.big_lambda * total;
}

double rho_prime(const PenaltySpec& pen, double t) {
  require_derivative(pen);
  if (t < 0.0) throw DomainError("rho_prime: t must be nonnegative");
  if (pen.is_l1()) return 1.0;
  const double a = pen.a;
  switch (pen.family) {
    case Family::kSica: {
      const double d = a + t;
      return a * (a + 1.0) / (d * d);
    }
    case Family::kLog:
      return (a + 1.0) / (a + t);
    case Family::kScad: {
      require_positive_lambda(pen);
      const double lam = pen.lambda;
      if (t <= lam) return 1.0;
      return std::max(a * lam - t, 0.0) / ((a - 1.0) * lam);
    }
    case Family::kMcp: {
      require_positive_lambda(pen);
      return std::max(a * pen.lambda - t, 0.0) / (a * pen.lambda);
    }
    default:
      break;
  }
  throw UnsupportedError("rho_prime: unexpected family");
}

double rho_bar(const PenaltySpec& pen, double t) {
  require_derivative(pen);
  if (t > 0.0) return rho_prime(pen, t);
  if (t < 0.0) return -rho_prime(pen, -t);
  return 0.0;
}

Eigen::VectorXd rho_bar(const PenaltySpec& pen, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(b.size());
  for (Eigen::Index j = 0; j < b.size(); ++j) out[j] = rho_bar(pen, b[j]);
  return out;
}

double concavity_at(const PenaltySpec& pen, double t) {
  require_derivative(pen);
  if (!(t > 0.0)) throw DomainError("concavity_at: t must be positive");
  if (pen.is_l1()) return 0.0;
  const double a = pen.a;
  switch (pen.family) {
    case Family::kSica: {
      const double d = a + t;
      return 2.0 * a * (a + 1.0) / (d * d * d);
    }
    case Family::kLog: {
      const double d = a + t;
      return (a + 1.0) / (d * d);
    }
    case Family::kScad: {
      require_positive_lambda(pen);
      const double lam = pen.lambda;
      return (t >= lam && t <= a * lam) ? 1.0 / ((a - 1.0) * lam) : 0.0;
    }
    case Family::kMcp: {
      require_positive_lambda(pen);
      return t <= a * pen.lambda ? 1.0 / (a * pen.lambda) : 0.0;
    }
    default:
      break;
  }
  throw UnsupportedError("concavity_at: unexpected family");
}

double max_concavity(const PenaltySpec& pen) {
  require_derivative(pen);
  if (pen.is_l1()) return 0.0;
  const double a = pen.a;
  switch (pen.family) {
    case Family::kSica:
      return 2.0 * (1.0 / a + 1.0 / (a * a));
    case Family::kLog:
      return (a + 1.0) / (a * a);
    case Family::kScad:
      require_positive_lambda(pen);
      return 1.0 / ((a - 1.0) * pen.lambda);
    case Family::kMcp:
      require_positive_lambda(pen);
      return 1.0 / (a * pen.lambda);
    default:
      break;
  }
  throw UnsupportedError("max_concavity: unexpected family");
}

double local_concavity(const PenaltySpec& pen, const Eigen::VectorXd& b) {
  require_derivative(pen);
  double out = 0.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    if (b[j] == 0.0) throw DomainError("local_concavity: components must be nonzero");
    out = std::max(out, concavity_at(pen, std::abs(b[j])));
  }
  return out;
}

double max_concavity_on_interval(const PenaltySpec& pen, double lo, double hi) {
  require_derivative(pen);
  if (!(lo > 0.0) || hi < lo) throw DomainError("max_concavity_on_interval: need 0 < lo <= hi");
  if (pen.is_l1()) return 0.0;
  switch (pen.family) {
    case Family::kSica:
    case Family::kLog:
      // -rho'' is decreasing in t.
      return concavity_at(pen, lo);
    case Family::kScad:
      require_positive_lambda(pen);
      return (hi >= pen.lambda && lo <= pen.a * pen.lambda) ? max_concavity(pen) : 0.0;
    case Family::kMcp:
      require_positive_lambda(pen);
      return lo <= pen.a * pen.lambda ? max_concavity(pen) : 0.0;
    default:
      break;
  }
  throw UnsupportedError("max_concavity_on_interval: unexpected family");
}

double continuity_threshold(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("continuity_threshold: lambda must be positive");
  return lambda + std::sqrt(lambda * lambda + 2.0 * lambda);
}

double scalar_threshold(const PenaltySpec& pen, double z) {
  const double c = pen.scale();
  if (!std::isfinite(c)) throw DomainError("scalar_threshold: Lambda * lambda must be finite");
  const double az = std::abs(z);
  if (az == 0.0) return 0.0;
  if (c == 0.0) return z;
  double t = 0.0;
  if (pen.is_l0()) {
    t = 0.5 * az * az > c ? az : 0.0;
  } else if (pen.is_l1()) {
    t = std::max(az - c, 0.0);
  } else if (pen.family == Family::kSica || pen.family == Family::kLog) {
    t = threshold_convex_derivative(pen, az);
  } else {
    t = threshold_piecewise(pen, az);
  }
  return z > 0.0 ? t : -t;
}

}  // namespace sica
