#include "sica/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sica/errors.hpp"

namespace sica {

DesignProblem::DesignProblem(Eigen::MatrixXd x, Eigen::VectorXd resp,
                             std::optional<Eigen::VectorXd> truth)
    : X(std::move(x)), y(std::move(resp)), beta0(std::move(truth)) {}

void DesignProblem::validate() const {
  if (X.rows() == 0 || X.cols() == 0) throw DomainError("design matrix is empty");
  if (y.size() != X.rows()) {
    throw DomainError("response length " + std::to_string(y.size()) + " does not match " +
                      std::to_string(X.rows()) + " rows of X");
  }
  if (beta0 && beta0->size() != X.cols()) {
    throw DomainError("beta0 length does not match the number of columns of X");
  }
  for (Index j = 0; j < X.cols(); ++j) {
    if (!(X.col(j).norm() > 0.0)) {
      throw DomainError("column " + std::to_string(j) + " of X is identically zero");
    }
  }
}

IndexSet DesignProblem::support0() const { return support_of(truth()); }

const Eigen::VectorXd& DesignProblem::truth() const {
  if (!beta0) throw DomainError("true coefficients beta0 are required");
  return *beta0;
}

IndexSet support_of(const Eigen::VectorXd& v) {
  IndexSet out;
  for (Index j = 0; j < v.size(); ++j) {
    if (v[j] != 0.0) out.push_back(j);
  }
  return out;
}

IndexSet complement(const IndexSet& s, Index p) {
  std::vector<bool> in(static_cast<std::size_t>(p), false);
  for (Index j : s) in[static_cast<std::size_t>(j)] = true;
  IndexSet out;
  for (Index j = 0; j < p; ++j) {
    if (!in[static_cast<std::size_t>(j)]) out.push_back(j);
  }
  return out;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, const IndexSet& s) {
  Eigen::MatrixXd out(X.rows(), static_cast<Index>(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) out.col(static_cast<Index>(k)) = X.col(s[k]);
  return out;
}

Eigen::VectorXd select_entries(const Eigen::VectorXd& v, const IndexSet& s) {
  Eigen::VectorXd out(static_cast<Index>(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) out[static_cast<Index>(k)] = v[s[k]];
  return out;
}

Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double rel_tol) {
  if (A.rows() != b.size()) throw DomainError("pinv_solve: dimension mismatch");
  if (A.size() == 0) return Eigen::VectorXd::Zero(A.cols());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = rel_tol * (s.size() > 0 ? s[0] : 0.0);
  Eigen::VectorXd utb = svd.matrixU().transpose() * b;
  for (Index i = 0; i < s.size(); ++i) {
    utb[i] = (s[i] > cutoff && s[i] > 0.0) ? utb[i] / s[i] : 0.0;
  }
  return svd.matrixV() * utb;
}

Eigen::VectorXd min_l2_solution(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                double rel_tol) {
  return pinv_solve(X, y, rel_tol);
}

Eigen::VectorXd weighted_min_norm(const Eigen::MatrixXd& X, const Eigen::VectorXd& d,
                                  const Eigen::VectorXd& y, double rel_tol) {
  if (d.size() != X.cols()) throw DomainError("weighted_min_norm: weight length mismatch");
  if ((d.array() < 0.0).any()) throw DomainError("weighted_min_norm: weights must be nonnegative");
  const Eigen::VectorXd root = d.cwiseSqrt();
  const Eigen::MatrixXd A = X * root.asDiagonal();
  return root.cwiseProduct(pinv_solve(A, y, rel_tol));
}

double default_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& d) {
  const double trace = X.colwise().squaredNorm().dot(d);
  return 1e-12 * trace / static_cast<double>(X.rows());
}

Eigen::VectorXd ridge_limit_apply(const Eigen::MatrixXd& X, const Eigen::VectorXd& d,
                                  const Eigen::VectorXd& y, std::optional<double> ridge) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (d.size() != p || y.size() != n) throw DomainError("ridge_limit_apply: dimension mismatch");
  if ((d.array() < 0.0).any()) throw DomainError("ridge_limit_apply: weights must be nonnegative");
  if (ridge && !(*ridge > 0.0)) throw DomainError("ridge_limit_apply: ridge must be positive");
  if ((d.array() == 0.0).all()) return Eigen::VectorXd::Zero(p);
  const double r = ridge ? *ridge : default_ridge(X, d);

  const Eigen::VectorXd root = d.cwiseSqrt();
  if (p >= n) {
    const Eigen::MatrixXd A = X * root.asDiagonal();
    Eigen::MatrixXd K = Eigen::MatrixXd::Identity(n, n) * r;
    K.selfadjointView<Eigen::Lower>().rankUpdate(A);
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    Eigen::VectorXd sol;
    if (llt.info() == Eigen::Success) {
      sol = llt.solve(y);
    } else {
      sol = K.selfadjointView<Eigen::Lower>().ldlt().solve(y);
    }
    return d.cwiseProduct(X.transpose() * sol);
  }
  const Eigen::MatrixXd A = X * root.asDiagonal();
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(p, p) * r;
  B.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
  const Eigen::VectorXd rhs = A.transpose() * y;
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  Eigen::VectorXd sol;
  if (llt.info() == Eigen::Success) {
    sol = llt.solve(rhs);
  } else {
    sol = B.selfadjointView<Eigen::Lower>().ldlt().solve(rhs);
  }
  return root.cwiseProduct(sol);
}

int numerical_rank(const Eigen::MatrixXd& A, double rel_tol) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  const double cutoff = rel_tol * s[0];
  return static_cast<int>((s.array() > cutoff).count());
}

namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    out *= static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return out;
}

// Advances idx to the next k-combination of {0..p-1} in lexicographic order.
bool next_combination(std::vector<Index>& idx, Index p) {
  const Index k = static_cast<Index>(idx.size());
  for (Index i = k - 1; i >= 0; --i) {
    if (idx[static_cast<std::size_t>(i)] < p - k + i) {
      ++idx[static_cast<std::size_t>(i)];
      for (Index j = i + 1; j < k; ++j) {
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

std::optional<std::size_t> spark_bruteforce(const Eigen::MatrixXd& X, std::size_t max_card) {
  const auto p = static_cast<std::size_t>(X.cols());
  const auto n = static_cast<std::size_t>(X.rows());
  const std::size_t limit = std::min(max_card, p);
  if (binomial(p, limit) > 1e7) {
    throw ResourceError("spark_bruteforce: C(" + std::to_string(p) + ", " +
                        std::to_string(limit) + ") exceeds the enumeration budget of 1e7");
  }
  for (std::size_t k = 1; k <= limit; ++k) {
    // Any n + 1 vectors in R^n are dependent.
    if (k > n) return k;
    std::vector<Index> idx(k);
    std::iota(idx.begin(), idx.end(), Index{0});
    Eigen::MatrixXd sub(X.rows(), static_cast<Index>(k));
    do {
      for (std::size_t c = 0; c < k; ++c) sub.col(static_cast<Index>(c)) = X.col(idx[c]);
      if (numerical_rank(sub) < static_cast<int>(k)) return k;
    } while (next_combination(idx, X.cols()));
  }
  return std::nullopt;
}

double gram_min_eigen(const Eigen::MatrixXd& X, const IndexSet& S) {
  if (S.empty()) throw DomainError("gram_min_eigen: index set is empty");
  const Eigen::MatrixXd XS = select_columns(X, S);
  const Eigen::MatrixXd G = XS.transpose() * XS;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues().minCoeff());
}

double matrix_inf_norm(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  return A.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace sica
