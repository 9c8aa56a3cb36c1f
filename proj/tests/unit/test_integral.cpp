#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "mehler/levy.hpp"
#include "mehler/mehler_operator.hpp"
#include "mehler/operator_group.hpp"
#include "mehler/random_integral.hpp"
#include "mehler/rng.hpp"
#include "mehler/stats.hpp"
#include "oracles.hpp"

using mehler::JumpLaw;
using mehler::LevyModel;
using mehler::LevyPath;
using mehler::OperatorGroup;
using mehler::OuSampler;
using mehler::Partition;
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

OperatorGroup decay_group() { return OperatorGroup{mat1(-1.0)}; }

LevyModel standard_brownian() { return LevyModel(vec1(0.0), mat1(1.0)); }

}  // namespace

TEST_SUITE_BEGIN("integral");

TEST_CASE("partition construction and validation") {
  const Partition p = Partition::regular(0.0, 1.0, 4);
  CHECK(p.cells() == 4);
  CHECK(p.times()[1] == doctest::Approx(0.25));
  CHECK_THROWS_AS(Partition::regular(1.0, 0.0, 4), mehler::InvalidInput);
  CHECK_THROWS_AS(Partition(0.0, 1.0, {0.0, 0.5, 0.4, 1.0}), mehler::InvalidInput);
  CHECK_THROWS_AS(Partition(0.0, 1.0, {0.1, 0.5, 1.0}), mehler::InvalidInput);
}

TEST_CASE("merging inserts interior jump times only") {
  const LevyModel model(vec1(0.0), mat1(0.0), 6.0, JumpLaw::point_mass(vec1(1.0)));
  const LevyPath path = mehler::sample_path(model, 1.0, 0.5, RngStream(17));
  const Partition merged = Partition::regular(0.0, 1.0, 2).merged_with_jumps(path);
  std::size_t interior = 0;
  for (const auto& jump : path.jumps()) {
    if (jump.time > 0.0 && jump.time < 1.0) ++interior;
  }
  CHECK(merged.times().size() >= 3);
  for (const auto& jump : path.jumps()) {
    if (jump.time > 0.0 && jump.time < 1.0) {
      CHECK(std::find(merged.times().begin(), merged.times().end(), jump.time) !=
            merged.times().end());
    }
  }
}

TEST_CASE("identity integrand telescopes to the increment") {
  const LevyModel model(vec1(0.3), mat1(1.0), 2.0, JumpLaw::gaussian(vec1(0.0), mat1(0.5)));
  const LevyPath path = mehler::sample_path(model, 2.0, 0.125, RngStream(3));
  const Partition p = Partition::regular(0.25, 1.75, 16).merged_with_jumps(path);
  const Eigen::VectorXd got = mehler::random_integral(
      [&](double) { return Eigen::MatrixXd::Identity(1, 1); }, path, p);
  const Eigen::VectorXd want = path.value_at(1.75) - path.value_at(0.25);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constant integrand factors out") {
  const LevyModel model(vec1(-0.2), mat1(0.8));
  const LevyPath path = mehler::sample_path(model, 1.0, 0.1, RngStream(4));
  Eigen::MatrixXd c(1, 1);
  c << 2.5;
  const Partition p = Partition::regular(0.0, 1.0, 10);
  const Eigen::VectorXd got =
      mehler::random_integral([&](double) { return c; }, path, p);
  const Eigen::VectorXd want = c * (path.value_at(1.0) - path.value_at(0.0));
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("refinement converges at first order on a drift path") {
  // Y(t) = t, g(t) = e^{-t}: the limit is 1 - e^{-1}.
  const LevyModel model(vec1(1.0), mat1(0.0));
  const LevyPath path = mehler::sample_path(model, 1.0, 1.0 / 4096.0, RngStream(5));
  const double want = 1.0 - std::exp(-1.0);
  const auto integrand = [](double t) { return mat1(std::exp(-t)); };
  double previous_error = 1.0;
  double previous_value = 0.0;
  for (int n : {32, 64, 128, 256}) {
    const Partition p = Partition::regular(0.0, 1.0, n);
    const double got = mehler::random_integral(integrand, path, p)(0);
    const double error = std::abs(got - want);
    CHECK(error < 1.0 / n);
    CHECK(error < previous_error);
    // Cauchy criterion: successive refinements differ by O(mesh).
    if (n > 32) CHECK(std::abs(got - previous_value) < 2.0 / n);
    previous_error = error;
    previous_value = got;
  }
}

TEST_CASE("linearity in the integrand") {
  const LevyModel model(vec1(0.1), mat1(1.0), 1.0, JumpLaw::point_mass(vec1(0.5)));
  const LevyPath path = mehler::sample_path(model, 1.0, 0.05, RngStream(6));
  const Partition p = Partition::regular(0.0, 1.0, 20).merged_with_jumps(path);
  const auto g1 = [](double t) { return mat1(std::exp(-t)); };
  const auto g2 = [](double t) { return mat1(std::cos(t)); };
  const double alpha = 1.7, beta = -0.6;
  const Eigen::VectorXd combined = mehler::random_integral(
      [&](double t) { return (alpha * g1(t) + beta * g2(t)).eval(); }, path, p);
  const Eigen::VectorXd separate =
      alpha * mehler::random_integral(g1, path, p) + beta * mehler::random_integral(g2, path, p);
  CHECK((combined - separate).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("zero path integrates to zero") {
  const LevyModel model(vec1(0.0), mat1(0.0));
  const LevyPath path = mehler::sample_path(model, 1.0, 0.25, RngStream(7));
  const Partition p = Partition::regular(0.0, 1.0, 4);
  CHECK(mehler::ou_state(decay_group(), path, 1.0, p).isZero(0.0));
}

TEST_CASE("frozen group reduces both integrals to the path") {
  const OperatorGroup frozen{Eigen::MatrixXd::Zero(1, 1)};
  const LevyModel model(vec1(0.2), mat1(1.0), 1.5, JumpLaw::point_mass(vec1(-0.4)));
  const LevyPath path = mehler::sample_path(model, 1.0, 0.1, RngStream(8));
  const Partition p = Partition::regular(0.0, 1.0, 10).merged_with_jumps(path);
  const Eigen::VectorXd y1 = path.value_at(1.0);
  CHECK((mehler::ou_state(frozen, path, 1.0, p) - y1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((mehler::additive_integral(frozen, path, 1.0, p) - y1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("OU state variance matches the Gaussian oracle") {
  const OperatorGroup group = decay_group();
  const LevyModel model = standard_brownian();
  RngStream rng(1234);
  const int n = 20000;
  const OuSampler sampler(group, model, 1.0, 1.0 / 1024.0);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream path_rng = rng.split(static_cast<std::uint64_t>(i));
    const double v = sampler.sample_state(path_rng)(0);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double want = oracles::ou_variance(-1.0, 1.0);
  const double std_err = want * std::sqrt(2.0 / n);
  CHECK(std::abs(var - want) < 3.0 * std_err);
}

TEST_CASE("additive integral shares the OU marginal variance") {
  const OperatorGroup group = decay_group();
  const LevyModel model = standard_brownian();
  RngStream rng(4321);
  const int n = 20000;
  const OuSampler sampler(group, model, 1.0, 1.0 / 1024.0);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    RngStream path_rng = rng.split(static_cast<std::uint64_t>(i));
    const double z = sampler.sample_additive(path_rng)(0);
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double want = oracles::ou_variance(-1.0, 1.0);
  CHECK(std::abs(var - want) < 3.0 * want * std::sqrt(2.0 / n));
}

TEST_CASE("sampler agrees with the pathwise evaluators on a shared stream") {
  Eigen::MatrixXd rotation(2, 2);
  rotation << -0.5, 1.0, -1.0, -0.5;
  const OperatorGroup group{rotation};
  Eigen::VectorXd drift(2);
  drift << 0.2, -0.1;
  Eigen::MatrixXd cov(2, 2);
  cov << 0.6, 0.2, 0.2, 0.4;
  const LevyModel model(drift, cov, 2.0, JumpLaw::gaussian(Eigen::VectorXd::Zero(2),
                                                           Eigen::MatrixXd::Identity(2, 2)));
  const double t = 1.0, h = 0.125;
  const OuSampler sampler(group, model, t, h);
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
    RngStream for_sampler(seed);
    Eigen::VectorXd v, z;
    sampler.sample_pair(for_sampler, v, z);

    const LevyPath path = mehler::sample_path(model, t, h, RngStream(seed));
    const Partition p(0.0, t, path.times());
    const Eigen::VectorXd v_ref = mehler::ou_state(group, path, t, p);
    const Eigen::VectorXd z_ref = mehler::additive_integral(group, path, t, p);
    CHECK((v - v_ref).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((z - z_ref).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("pure-jump fast path agrees with the pathwise evaluator") {
  const OperatorGroup group = decay_group();
  const LevyModel model(vec1(0.0), mat1(0.0), 4.0, JumpLaw::uniform_ball(1, 2.0));
  const double t = 2.0, h = 0.25;
  const OuSampler sampler(group, model, t, h);
  for (std::uint64_t seed : {21ULL, 22ULL, 23ULL, 24ULL}) {
    RngStream for_sampler(seed);
    Eigen::VectorXd v, z;
    sampler.sample_pair(for_sampler, v, z);
    const LevyPath path = mehler::sample_path(model, t, h, RngStream(seed));
    const Partition p(0.0, t, path.times());
    CHECK((v - mehler::ou_state(group, path, t, p)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((z - mehler::additive_integral(group, path, t, p)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("increment law: Z(t) - Z(s) matches T(s) applied to fresh Z(t-s)") {
  const OperatorGroup group = decay_group();
  const LevyModel model = standard_brownian();
  RngStream rng(55);
  const int n = 10000;
  const double s = 0.5, t = 1.0;
  std::vector<double> increments(n), scaled(n);
  const OuSampler tail_sampler(group, model, t - s, 1.0 / 256.0);
  const Eigen::MatrixXd ts = group(s);
  for (int i = 0; i < n; ++i) {
    RngStream path_rng = rng.split("paths").split(static_cast<std::uint64_t>(i));
    const LevyPath path = mehler::sample_path(model, t, 1.0 / 256.0, path_rng);
    const Partition p(0.0, t, path.times());
    const Eigen::MatrixXd traj = mehler::additive_integral_trajectory(group, path, p);
    const std::size_t idx_s = path.index_at(s);
    increments[static_cast<std::size_t>(i)] =
        traj(0, static_cast<Eigen::Index>(path.times().size() - 1)) -
        traj(0, static_cast<Eigen::Index>(idx_s));
    RngStream fresh = rng.split("fresh").split(static_cast<std::uint64_t>(i));
    scaled[static_cast<std::size_t>(i)] = (ts * tail_sampler.sample_additive(fresh))(0);
  }
  const auto report = mehler::ks_two_sample(increments, scaled, 0.01);
  CHECK(report.pass);
}

TEST_CASE("state and additive integrals share marginals but separated times fail") {
  const OperatorGroup group = decay_group();
  const LevyModel model = standard_brownian();
  RngStream rng(66);
  const int n = 10000;
  const OuSampler sampler(group, model, 1.0, 1.0 / 256.0);
  std::vector<double> v_samples(n), z_samples(n);
  Eigen::VectorXd v, z;
  for (int i = 0; i < n; ++i) {
    RngStream path_rng = rng.split(static_cast<std::uint64_t>(i));
    sampler.sample_pair(path_rng, v, z);
    v_samples[static_cast<std::size_t>(i)] = v(0);
    z_samples[static_cast<std::size_t>(i)] = z(0);
  }
  CHECK(mehler::ks_two_sample(v_samples, z_samples, 0.01).pass);

  // Negative control: V(0.5) against Z(2.0) are well separated.
  const OuSampler short_sampler(group, model, 0.5, 1.0 / 256.0);
  const OuSampler long_sampler(group, model, 2.0, 1.0 / 256.0);
  std::vector<double> v_short(n), z_long(n);
  for (int i = 0; i < n; ++i) {
    RngStream a = rng.split("short").split(static_cast<std::uint64_t>(i));
    RngStream b = rng.split("long").split(static_cast<std::uint64_t>(i));
    v_short[static_cast<std::size_t>(i)] = short_sampler.sample_state(a)(0);
    z_long[static_cast<std::size_t>(i)] = long_sampler.sample_additive(b)(0);
  }
  CHECK_FALSE(mehler::ks_two_sample(v_short, z_long, 0.01).pass);
}

TEST_CASE("round trip reconstructs the driver exactly at partition points") {
  struct Config {
    Eigen::MatrixXd q;
    LevyModel model;
  };
  Eigen::MatrixXd nilpotent(2, 2);
  nilpotent << 0, 1, 0, 0;
  Eigen::VectorXd atom(2);
  atom << 1.0, -0.5;
  const std::vector<Config> configs = {
      {mat1(-1.0), standard_brownian()},
      {nilpotent, LevyModel(Eigen::VectorXd::Zero(2), 0.3 * Eigen::MatrixXd::Identity(2, 2), 2.0,
                            JumpLaw::point_mass(atom))},
      {mat1(-1.0), LevyModel(vec1(0.0), mat1(0.0), 3.0, JumpLaw::uniform_ball(1, 1.5))},
  };
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const OperatorGroup group{configs[c].q};
    const LevyPath path =
        mehler::sample_path(configs[c].model, 1.0, 1.0 / 256.0, RngStream(100 + c));
    const Partition p = Partition::regular(0.0, 1.0, 256).merged_with_jumps(path);
    const Eigen::MatrixXd z = mehler::additive_integral_trajectory(group, path, p);
    const Eigen::MatrixXd y = mehler::reconstruct_driver(group, p, z);
    double max_err = 0.0;
    for (std::size_t j = 0; j < p.times().size(); ++j) {
      max_err = std::max(max_err, (y.col(static_cast<Eigen::Index>(j)) -
                                   path.value_at(p.times()[j]))
                                      .cwiseAbs()
                                      .maxCoeff());
    }
    CHECK(max_err < 1e-9);
  }
}

TEST_CASE("degenerate partition gives zero integrals") {
  const LevyModel model = standard_brownian();
  const LevyPath path = mehler::sample_path(model, 1.0, 0.25, RngStream(9));
  const Partition degenerate(0.0, 0.0, {0.0});
  CHECK(mehler::ou_state(decay_group(), path, 0.0, degenerate).isZero(0.0));
  CHECK(mehler::additive_integral(decay_group(), path, 0.0, degenerate).isZero(0.0));
}

TEST_CASE("input validation") {
  const LevyModel model = standard_brownian();
  const LevyPath path = mehler::sample_path(model, 1.0, 0.25, RngStream(10));
  const Partition beyond = Partition::regular(0.0, 2.0, 4);
  CHECK_THROWS_AS(
      (void)mehler::random_integral([](double) { return Eigen::MatrixXd::Identity(1, 1); }, path,
                                    beyond),
      mehler::InvalidInput);
  const Partition p = Partition::regular(0.0, 1.0, 4);
  CHECK_THROWS_AS((void)mehler::ou_state(decay_group(), path, 0.5, p), mehler::InvalidInput);
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(1, 3);
  CHECK_THROWS_AS((void)mehler::reconstruct_driver(decay_group(), p, z), mehler::InvalidInput);
}

TEST_SUITE_END();
