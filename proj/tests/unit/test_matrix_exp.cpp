#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "mehler/matrix_exp.hpp"
#include "mehler/rng.hpp"
#include "oracles.hpp"

using mehler::matrix_exponential;

TEST_SUITE_BEGIN("matrix_exp");

TEST_CASE("zero matrix maps to the identity") {
  const Eigen::MatrixXd e = matrix_exponential(Eigen::MatrixXd::Zero(3, 3));
  CHECK((e - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scalar exponential") {
  Eigen::MatrixXd q(1, 1);
  q << -1.0;
  for (double t : {0.25, 1.0, 3.0, -2.0}) {
    const double got = matrix_exponential(t * q)(0, 0);
    CHECK(got == doctest::Approx(std::exp(-t)).epsilon(1e-14));
  }
}

TEST_CASE("nilpotent generator truncates the series") {
  Eigen::MatrixXd q(2, 2);
  q << 0, 1, 0, 0;
  for (double t : {0.5, 2.0, -3.0}) {
    Eigen::MatrixXd expected(2, 2);
    expected << 1, t, 0, 1;
    CHECK((matrix_exponential(t * q) - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("matches the Taylor-series oracle on random matrices") {
  mehler::RngStream rng(314);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 5);
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = 4.0 * (rng.uniform01() - 0.5);
    const Eigen::MatrixXd got = matrix_exponential(a);
    const Eigen::MatrixXd want = oracles::expm_taylor(a);
    const double rel = (got - want).norm() / want.norm();
    CHECK(rel < 1e-12);
  }
}

TEST_CASE("rejects bad arguments") {
  CHECK_THROWS_AS((void)matrix_exponential(Eigen::MatrixXd::Zero(2, 3)), mehler::InvalidInput);
  Eigen::MatrixXd nan = Eigen::MatrixXd::Zero(2, 2);
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS((void)matrix_exponential(nan), mehler::InvalidInput);
}

TEST_SUITE_END();
