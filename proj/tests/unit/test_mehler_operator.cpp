#include <doctest.h>

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "mehler/exponent.hpp"
#include "mehler/mehler_operator.hpp"
#include "mehler/rng.hpp"

using mehler::CharExponent;
using mehler::LevyModel;
using mehler::MehlerExponent;
using mehler::OperatorGroup;
using mehler::RngStream;

namespace {

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

Eigen::MatrixXd mat1(double a) {
  Eigen::MatrixXd m(1, 1);
  m << a;
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("mehler_op");

TEST_CASE("time zero short-circuits to a pointwise evaluation") {
  const OperatorGroup group{mat1(-1.0)};
  const LevyModel model(vec1(0.0), mat1(1.0));
  const auto f = mehler::cos_pairing(vec1(1.0));
  const auto estimate = mehler::mehler_apply(group, model, 0.0, f, vec1(0.7), 10, RngStream(1));
  CHECK(estimate.value == std::cos(0.7));
  CHECK(estimate.std_error == 0.0);
}

TEST_CASE("constant test function integrates to one exactly") {
  const OperatorGroup group{mat1(-1.0)};
  const LevyModel model(vec1(0.0), mat1(1.0));
  const mehler::TestFunction one{"one", 1.0, [](const Eigen::VectorXd&) { return 1.0; }};
  const auto estimate =
      mehler::mehler_apply(group, model, 1.0, one, vec1(0.0), 500, RngStream(2), 1.0 / 64.0);
  CHECK(estimate.value == 1.0);
  CHECK(estimate.std_error == 0.0);
}

TEST_CASE("cosine test function matches the characteristic-function oracle") {
  const OperatorGroup group{mat1(-1.0)};
  const LevyModel model(vec1(0.0), mat1(1.0));
  const MehlerExponent l(group, CharExponent(model));
  // (T_1 cos<1, .>)(0) = Re exp(l(1, 1)).
  const double want = std::exp(l(1.0, vec1(1.0))).real();
  const auto estimate = mehler::mehler_apply(group, model, 1.0, mehler::cos_pairing(vec1(1.0)),
                                             vec1(0.0), 100000, RngStream(3), 1.0 / 512.0);
  CHECK(std::abs(estimate.value - want) < 3.0 * estimate.std_error + 1e-3);
  CHECK(estimate.std_error < 1.0 / std::sqrt(100000.0) + 1e-12);
}

TEST_CASE("insufficient samples are rejected") {
  const OperatorGroup group{mat1(-1.0)};
  const LevyModel model(vec1(0.0), mat1(1.0));
  CHECK_THROWS_AS((void)mehler::mehler_apply(group, model, 1.0, mehler::cos_pairing(vec1(1.0)),
                                             vec1(0.0), 50, RngStream(4)),
                  mehler::InsufficientData);
}

TEST_CASE("degenerate model makes the semigroup law exact") {
  const OperatorGroup group{Eigen::MatrixXd::Zero(1, 1)};
  const LevyModel model(vec1(0.0), mat1(0.0));
  const auto f = mehler::cos_pairing(vec1(1.0));
  const auto result =
      mehler::semigroup_residual(group, model, 0.5, 0.5, f, vec1(0.4), 200, 100, RngStream(5),
                                 1.0 / 32.0);
  CHECK(result.residual == 0.0);
}

TEST_CASE("semigroup residual sits inside the Monte Carlo error budget") {
  const OperatorGroup group{mat1(-1.0)};
  const LevyModel model(vec1(0.0), mat1(1.0));
  const auto f = mehler::cos_pairing(vec1(1.0));
  const auto result = mehler::semigroup_residual(group, model, 0.5, 0.5, f, vec1(0.5), 4000, 400,
                                                 RngStream(6), 1.0 / 128.0);
  CHECK(result.residual < 4.0 * result.combined_std_error);
}

TEST_CASE("zero s collapses the outer operator") {
  const OperatorGroup group{mat1(-1.0)};
  const LevyModel model(vec1(0.0), mat1(1.0));
  const auto f = mehler::cos_pairing(vec1(1.0));
  const auto result = mehler::semigroup_residual(group, model, 0.75, 0.0, f, vec1(0.2), 2000, 200,
                                                 RngStream(7), 1.0 / 128.0);
  // T_0 (T_t f) and T_{t+0} f are the same operator; only sampling noise remains.
  CHECK(result.residual < 4.0 * result.combined_std_error);
}

TEST_CASE("bump test function stays bounded and continuous at the edge") {
  const auto f = mehler::bump(2.0);
  CHECK(f.evaluation(vec1(0.0)) == 1.0);
  CHECK(f.evaluation(vec1(2.0)) == 0.0);
  CHECK(f.evaluation(vec1(1.9999)) < 1e-3);
  CHECK(f.evaluation(vec1(5.0)) == 0.0);
  CHECK(f.bound == 1.0);
}

TEST_SUITE_END();
