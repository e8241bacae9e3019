#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace testutil {

inline Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

inline Eigen::VectorXd gaussian(Eigen::Index n, std::mt19937_64& rng) {
  return gaussian(n, 1, rng).col(0);
}

// Random s-sparse vector with entries of magnitude in [lo, hi] on the first
// s coordinates after a random permutation.
inline Eigen::VectorXd sparse_vector(Eigen::Index p, Eigen::Index s, double lo, double hi,
                                     std::mt19937_64& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) idx[static_cast<std::size_t>(j)] = j;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_real_distribution<double> mag(lo, hi);
  std::bernoulli_distribution sign(0.5);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  for (Eigen::Index k = 0; k < s; ++k) {
    b[idx[static_cast<std::size_t>(k)]] = (sign(rng) ? 1.0 : -1.0) * mag(rng);
  }
  return b;
}

inline Eigen::MatrixXd unit_columns(Eigen::MatrixXd X) {
  for (Eigen::Index j = 0; j < X.cols(); ++j) X.col(j) /= X.col(j).norm();
  return X;
}

// Random n x p matrix with orthonormal columns (n >= p).
inline Eigen::MatrixXd orthonormal_columns(Eigen::Index n, Eigen::Index p, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(n, p, rng));
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
}

}  // namespace testutil
