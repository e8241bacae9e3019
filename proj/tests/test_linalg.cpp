#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "sica/errors.hpp"
#include "sica/linalg.hpp"
#include "test_util.hpp"

using namespace sica;

TEST_CASE("minimum-norm solution of a single equation") {
  Eigen::MatrixXd X(1, 2);
  X << 1.0, 1.0;
  Eigen::VectorXd y(1);
  y << 2.0;
  const Eigen::VectorXd b = min_l2_solution(X, y);
  CHECK(b[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("full column rank gives OLS") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd X = testutil::gaussian(20, 5, rng);
  const Eigen::VectorXd y = testutil::gaussian(20, rng);
  const Eigen::VectorXd ols = X.colPivHouseholderQr().solve(y);
  CHECK((min_l2_solution(X, y) - ols).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("minimum-norm solution matches the KKT oracle") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    std::uniform_int_distribution<int> nd(2, 15);
    const int n = nd(rng);
    const int p = n + 1 + static_cast<int>(rng() % 30);
    const Eigen::MatrixXd X = testutil::gaussian(n, p, rng);
    const Eigen::VectorXd y = X * testutil::gaussian(p, rng);
    const Eigen::VectorXd b = min_l2_solution(X, y);
    CHECK((b - oracle::min_norm_kkt(X, y)).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK((y - X * b).norm() <= 1e-8 * y.norm());
  }
}

TEST_CASE("minimum-norm solution is orthogonal to the null space") {
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd X = testutil::gaussian(5, 12, rng);
  const Eigen::VectorXd y = X * testutil::gaussian(12, rng);
  const Eigen::VectorXd b = min_l2_solution(X, y);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeFullV);
  const Eigen::MatrixXd N = svd.matrixV().rightCols(12 - 5);
  CHECK((N.transpose() * b).norm() <= 1e-8);
}

TEST_CASE("ridge limit agrees with the SVD route") {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd X = testutil::gaussian(10, 40, rng);
  const Eigen::VectorXd y = testutil::gaussian(10, rng);
  Eigen::VectorXd d = testutil::gaussian(40, rng).cwiseAbs();
  const Eigen::MatrixXd D = d.asDiagonal();
  const Eigen::VectorXd exact = D * X.transpose() * oracle::pinv(X * D * X.transpose()) * y;
  CHECK((ridge_limit_apply(X, d, y, 1e-12) - exact).lpNorm<Eigen::Infinity>() < 1e-6);
  CHECK((ridge_limit_apply(X, d, y) - exact).lpNorm<Eigen::Infinity>() < 1e-6);

  double prev = kInf;
  for (double ridge : {1e-4, 1e-8, 1e-12}) {
    const double e = (ridge_limit_apply(X, d, y, ridge) - exact).lpNorm<Eigen::Infinity>();
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("ridge limit in the tall orientation") {
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd X = testutil::gaussian(30, 8, rng);
  const Eigen::VectorXd y = testutil::gaussian(30, rng);
  Eigen::VectorXd d = testutil::gaussian(8, rng).cwiseAbs();
  d[2] = 0.0;
  const Eigen::MatrixXd D = d.asDiagonal();
  const Eigen::VectorXd exact = D * X.transpose() * oracle::pinv(X * D * X.transpose()) * y;
  CHECK((ridge_limit_apply(X, d, y, 1e-12) - exact).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("ridge limit special cases") {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd X = testutil::gaussian(6, 15, rng);
  const Eigen::VectorXd y = testutil::gaussian(6, rng);
  CHECK(ridge_limit_apply(X, Eigen::VectorXd::Zero(15), y, 1e-3).isZero(0.0));
  // Orthonormal rows: X X^T = I.
  const Eigen::MatrixXd Q = testutil::orthonormal_columns(15, 6, rng).transpose();
  const double ridge = 1e-3;
  const Eigen::VectorXd got = ridge_limit_apply(Q, Eigen::VectorXd::Ones(15), y, ridge);
  CHECK((got - Q.transpose() * y / (1.0 + ridge)).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("spark by enumeration") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(4, 5);
  X.leftCols(4).setIdentity();
  X(0, 4) = 1.0;
  CHECK(spark_bruteforce(X, 5) == std::optional<std::size_t>(2));
  CHECK_FALSE(spark_bruteforce(Eigen::MatrixXd::Identity(4, 4), 4).has_value());
  std::mt19937_64 rng(9);
  CHECK(spark_bruteforce(testutil::gaussian(4, 8, rng), 8) == std::optional<std::size_t>(5));
  CHECK_THROWS_AS(spark_bruteforce(testutil::gaussian(3, 60, rng), 20), ResourceError);
}

TEST_CASE("sparse solutions below half the spark are unique") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::MatrixXd X = testutil::gaussian(3, 6, rng);
    const auto spark = spark_bruteforce(X, 6);
    REQUIRE(spark.has_value());
    Eigen::VectorXd b0 = Eigen::VectorXd::Zero(6);
    b0[static_cast<Eigen::Index>(rng() % 6)] = 1.3;
    const Eigen::VectorXd y = X * b0;
    // Every solution supported on at most (spark - 1) / 2 columns equals b0.
    const auto kmax = static_cast<int>((*spark - 1) / 2);
    for (int mask = 1; mask < 64; ++mask) {
      if (__builtin_popcount(mask) > kmax) continue;
      IndexSet cols;
      for (int j = 0; j < 6; ++j) {
        if (mask & (1 << j)) cols.push_back(j);
      }
      const Eigen::MatrixXd XS = select_columns(X, cols);
      const Eigen::VectorXd sol = XS.colPivHouseholderQr().solve(y);
      if ((XS * sol - y).norm() > 1e-9) continue;
      Eigen::VectorXd full = Eigen::VectorXd::Zero(6);
      for (std::size_t k = 0; k < cols.size(); ++k) full[cols[k]] = sol[static_cast<Eigen::Index>(k)];
      CHECK((full - b0).lpNorm<Eigen::Infinity>() < 1e-9);
    }
  }
}

TEST_CASE("Gram minimum eigenvalue") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd Q = testutil::orthonormal_columns(10, 4, rng);
  CHECK(gram_min_eigen(Q, {0, 1, 2, 3}) == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::MatrixXd dup(10, 2);
  dup.col(0) = Q.col(0);
  dup.col(1) = Q.col(0);
  CHECK(gram_min_eigen(dup, {0, 1}) < 1e-10);
  const double theta = 0.7;
  Eigen::MatrixXd two(2, 2);
  two << 1.0, std::cos(theta), 0.0, std::sin(theta);
  CHECK(gram_min_eigen(two, {0, 1}) == doctest::Approx(1.0 - std::abs(std::cos(theta))).epsilon(1e-12));
  CHECK_THROWS_AS(gram_min_eigen(two, {}), DomainError);
}

TEST_CASE("design validation") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(3, 3);
  X.col(1).setZero();
  CHECK_THROWS_AS(DesignProblem(X, Eigen::VectorXd::Zero(3)).validate(), DomainError);
  CHECK_THROWS_AS(DesignProblem(Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(2)).validate(), DomainError);
  Eigen::VectorXd b(3);
  b << 0.0, 2.0, -1.0;
  const DesignProblem ok(Eigen::MatrixXd::Identity(3, 3), b, b);
  CHECK(ok.support0() == IndexSet{1, 2});
}

TEST_CASE("matrix infinity norm is the max absolute row sum") {
  Eigen::MatrixXd A(2, 3);
  A << 1, -2, 3, -4, 0.5, 0;
  CHECK(matrix_inf_norm(A) == 6.0);
}
