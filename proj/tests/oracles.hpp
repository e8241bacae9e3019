#pragma once

// Independent reference computations used to check the library. None of them
// call into the code under test beyond the penalty evaluators.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "sica/penalty.hpp"

namespace oracle {

// Global minimizer of 0.5 (z - t)^2 + Lambda lambda rho(|t|) by a dense grid
// on [0, |z|] followed by golden-section refinement around the best cell.
inline double threshold_grid(const sica::PenaltySpec& pen, double z) {
  const double az = std::abs(z);
  if (az == 0.0) return 0.0;
  const double c = pen.scale();
  auto f = [&](double t) { return 0.5 * (az - t) * (az - t) + c * sica::rho(pen, t); };
  const int m = 20000;
  int best = 0;
  double fbest = f(0.0);
  for (int i = 1; i <= m; ++i) {
    const double v = f(az * i / m);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  if (best == 0) return 0.0;
  double lo = az * std::max(best - 1, 0) / m;
  double hi = az * std::min(best + 1, m) / m;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double x1 = hi - g * (hi - lo);
    const double x2 = lo + g * (hi - lo);
    if (f(x1) <= f(x2)) {
      hi = x2;
    } else {
      lo = x1;
    }
  }
  double t = 0.5 * (lo + hi);
  if (f(0.0) <= f(t)) t = 0.0;
  return z > 0 ? t : -t;
}

// min ||b||_2 subject to X b = y via the KKT system [I X^T; X 0].
inline Eigen::VectorXd min_norm_kkt(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const auto n = X.rows();
  const auto p = X.cols();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(p + n, p + n);
  K.topLeftCorner(p, p).setIdentity();
  K.topRightCorner(p, n) = X.transpose();
  K.bottomLeftCorner(n, p) = X;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p + n);
  rhs.tail(n) = y;
  return K.fullPivLu().solve(rhs).head(p);
}

// Moore-Penrose pseudoinverse from a full SVD.
inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& A, double rel = 1e-10) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = s.size() ? rel * s.maxCoeff() : 0.0;
  Eigen::MatrixXd Sinv = Eigen::MatrixXd::Zero(A.cols(), A.rows());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > cut) Sinv(i, i) = 1.0 / s[i];
  }
  return svd.matrixV() * Sinv * svd.matrixU().transpose();
}

// Basis pursuit min ||b||_1 s.t. X b = y for full-row-rank X: the optimum is
// a basic solution, so enumerate every n-column basis.
inline Eigen::VectorXd basis_pursuit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const auto n = X.rows();
  const auto p = X.cols();
  std::vector<bool> mask(static_cast<std::size_t>(p), false);
  std::fill(mask.begin(), mask.begin() + n, true);
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd arg = Eigen::VectorXd::Zero(p);
  do {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (mask[static_cast<std::size_t>(j)]) cols.push_back(j);
    }
    Eigen::MatrixXd B(n, n);
    for (Eigen::Index k = 0; k < n; ++k) B.col(k) = X.col(cols[static_cast<std::size_t>(k)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(y);
    if (sol.lpNorm<1>() < best) {
      best = sol.lpNorm<1>();
      arg.setZero();
      for (Eigen::Index k = 0; k < n; ++k) arg[cols[static_cast<std::size_t>(k)]] = sol[k];
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return arg;
}

// max over noise rows j and a dense product grid over the box
// |v_k - beta_k| <= eps (endpoints included) of |B_j . rho_bar(v)|.
inline double dense_box_max(const Eigen::MatrixXd& B, const sica::PenaltySpec& pen,
                            const Eigen::VectorXd& beta, double eps, int per_coord) {
  const auto s = beta.size();
  std::vector<std::vector<double>> levels(static_cast<std::size_t>(s));
  for (Eigen::Index k = 0; k < s; ++k) {
    for (int i = 0; i < per_coord; ++i) {
      const double v = beta[k] - eps + 2.0 * eps * i / (per_coord - 1);
      levels[static_cast<std::size_t>(k)].push_back(sica::rho_bar(pen, v));
    }
  }
  std::vector<int> idx(static_cast<std::size_t>(s), 0);
  Eigen::VectorXd r(s);
  double best = 0.0;
  while (true) {
    for (Eigen::Index k = 0; k < s; ++k) r[k] = levels[static_cast<std::size_t>(k)][static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
    best = std::max(best, (B * r).cwiseAbs().maxCoeff());
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == per_coord) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return best;
}

// Coordinatewise LLA on an orthonormal design: t <- soft(z, c rho'(|t|)),
// started from the lasso t = soft(z, c).
inline double lla_scalar(const sica::PenaltySpec& pen, double z, int iters = 30, double tol = 1e-8) {
  const double c = pen.scale();
  auto soft = [](double v, double g) { return v > g ? v - g : (v < -g ? v + g : 0.0); };
  double t = soft(z, c);
  for (int k = 0; k < iters; ++k) {
    const double next = soft(z, c * sica::rho_prime(pen, std::abs(t)));
    const double change = std::abs(next - t);
    t = next;
    if (change <= tol) break;
  }
  return t;
}

}  // namespace oracle
