#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mehler/errors.hpp"
#include "mehler/rng.hpp"

namespace mehler {

// Distribution of a single jump of the compound-Poisson part. The two
// Pareto-tailed kinds exist for the stationary-limit experiment: the radial
// Pareto has a finite log-moment, the log-Pareto kind deliberately violates
// E[log(1 + ||J||)] < infinity. Neither has a closed-form characteristic
// function, so cf() refuses them.
class JumpLaw {
 public:
  enum class Kind { kPointMass, kGaussian, kUniformBall, kParetoRadial, kLogParetoRadial };

  static JumpLaw point_mass(Eigen::VectorXd a) {
    JumpLaw j(Kind::kPointMass, static_cast<int>(a.size()));
    if (a.size() == 0 || !a.allFinite()) throw InvalidInput("point_mass: bad atom");
    j.vec_ = std::move(a);
    return j;
  }

  static JumpLaw gaussian(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
    JumpLaw j(Kind::kGaussian, static_cast<int>(mean.size()));
    if (mean.size() == 0 || !mean.allFinite()) throw InvalidInput("gaussian jump: bad mean");
    if (cov.rows() != mean.size() || cov.cols() != mean.size() || !cov.allFinite()) {
      throw InvalidInput("gaussian jump: covariance must be d x d and finite");
    }
    j.vec_ = std::move(mean);
    j.mat_ = std::move(cov);
    j.factor_ = psd_sqrt(j.mat_, "gaussian jump covariance");
    return j;
  }

  static JumpLaw uniform_ball(int dim, double radius) {
    JumpLaw j(Kind::kUniformBall, dim);
    if (dim < 1) throw InvalidInput("uniform_ball: dim must be >= 1");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("uniform_ball: radius must be > 0");
    j.param0_ = radius;
    return j;
  }

  static JumpLaw pareto_radial(int dim, double alpha, double scale) {
    JumpLaw j(Kind::kParetoRadial, dim);
    if (dim < 1) throw InvalidInput("pareto_radial: dim must be >= 1");
    if (!(alpha > 0.0) || !(scale > 0.0)) throw InvalidInput("pareto_radial: alpha, scale must be > 0");
    j.param0_ = alpha;
    j.param1_ = scale;
    return j;
  }

  static JumpLaw log_pareto_radial(int dim, double scale) {
    JumpLaw j(Kind::kLogParetoRadial, dim);
    if (dim < 1) throw InvalidInput("log_pareto_radial: dim must be >= 1");
    if (!(scale > 0.0)) throw InvalidInput("log_pareto_radial: scale must be > 0");
    j.param0_ = scale;
    return j;
  }

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  bool has_analytic_cf() const {
    return kind_ == Kind::kPointMass || kind_ == Kind::kGaussian || kind_ == Kind::kUniformBall;
  }

  // E[exp(i <y, J>)]; |cf| <= 1 and cf(0) = 1 for every kind.
  std::complex<double> cf(const Eigen::VectorXd& y) const {
    if (y.size() != dim_) throw InvalidInput("JumpLaw::cf: dimension mismatch");
    switch (kind_) {
      case Kind::kPointMass:
        return std::exp(std::complex<double>(0.0, vec_.dot(y)));
      case Kind::kGaussian:
        return std::exp(std::complex<double>(-0.5 * y.dot(mat_ * y), vec_.dot(y)));
      case Kind::kUniformBall:
        return {ball_cf(param0_ * y.norm(), dim_), 0.0};
      default:
        throw UnsupportedAnalytic("JumpLaw::cf: Pareto-tailed jump laws have no closed form");
    }
  }

  Eigen::VectorXd sample(RngStream& rng) const {
    switch (kind_) {
      case Kind::kPointMass:
        return vec_;
      case Kind::kGaussian:
        return vec_ + factor_ * rng.gaussian_vector(dim_);
      case Kind::kUniformBall: {
        const double r = param0_ * std::pow(rng.uniform01(), 1.0 / dim_);
        return r * rng.unit_sphere(dim_);
      }
      case Kind::kParetoRadial: {
        const double r = param1_ * std::pow(rng.uniform01(), -1.0 / param0_);
        return r * rng.unit_sphere(dim_);
      }
      case Kind::kLogParetoRadial: {
        // log(R / scale) = 1/U - 1 is Pareto with infinite mean, so
        // E[log(1 + R)] diverges. The exponent is capped at 700 (prob.
        // ~1.4e-3 per jump) to keep sums of contributions finite in double
        // precision; the cap sits far above every quantile probed here.
        const double r = param0_ * std::exp(std::min(1.0 / rng.uniform01() - 1.0, 700.0));
        return r * rng.unit_sphere(dim_);
      }
    }
    throw InvalidInput("JumpLaw: unknown kind");
  }

  // Square root of a PSD matrix via its spectral decomposition; eigenvalues
  // are allowed to dip to -1e-12 and are clamped at zero.
  static Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, const char* what) {
    Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    if ((m - sym).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + sym.cwiseAbs().maxCoeff())) {
      throw InvalidInput(std::string(what) + ": matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(sym);
    if (eigs.eigenvalues().minCoeff() < -1e-12) {
      throw InvalidInput(std::string(what) + ": matrix is not positive semidefinite");
    }
    const Eigen::VectorXd clamped = eigs.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eigs.eigenvectors() * clamped.asDiagonal();
  }

 private:
  JumpLaw(Kind kind, int dim) : kind_(kind), dim_(dim) {}

  // CF of the uniform law on a ball of radius r in R^d at |y| = x/r:
  // Gamma(d/2 + 1) (2/x)^{d/2} J_{d/2}(x), with a series fallback near zero.
  static double ball_cf(double x, int dim) {
    const double d = static_cast<double>(dim);
    if (x < 1e-4) {
      const double x2 = x * x;
      return 1.0 - x2 / (2.0 * (d + 2.0)) + x2 * x2 / (8.0 * (d + 2.0) * (d + 4.0));
    }
    return std::tgamma(d / 2.0 + 1.0) * std::pow(2.0 / x, d / 2.0) * std::cyl_bessel_j(d / 2.0, x);
  }

  Kind kind_;
  int dim_;
  Eigen::VectorXd vec_;
  Eigen::MatrixXd mat_;
  Eigen::MatrixXd factor_;
  double param0_ = 0.0;
  double param1_ = 0.0;
};

// Levy triplet with finite jump activity: drift b, Gaussian covariance Sigma,
// compound-Poisson jumps at rate lambda. Finite activity keeps path
// simulation exact (no small-jump truncation), which every verification here
// relies on; infinite-activity measures are out of scope.
class LevyModel {
 public:
  LevyModel(Eigen::VectorXd drift, Eigen::MatrixXd covariance, double jump_rate = 0.0,
            std::optional<JumpLaw> jump_law = std::nullopt)
      : drift_(std::move(drift)),
        covariance_(std::move(covariance)),
        jump_rate_(jump_rate),
        jump_law_(std::move(jump_law)) {
    const Eigen::Index d = drift_.size();
    if (d == 0 || !drift_.allFinite()) throw InvalidInput("LevyModel: bad drift");
    if (covariance_.rows() != d || covariance_.cols() != d || !covariance_.allFinite()) {
      throw InvalidInput("LevyModel: covariance must be d x d and finite");
    }
    if (!(jump_rate_ >= 0.0) || !std::isfinite(jump_rate_)) {
      throw InvalidInput("LevyModel: jump rate must be finite and >= 0");
    }
    if (jump_rate_ > 0.0) {
      if (!jump_law_) throw InvalidInput("LevyModel: positive jump rate needs a jump law");
      if (jump_law_->dim() != d) throw InvalidInput("LevyModel: jump law dimension mismatch");
    }
    diffusion_factor_ = JumpLaw::psd_sqrt(covariance_, "LevyModel covariance");
    has_gaussian_part_ = diffusion_factor_.cwiseAbs().maxCoeff() > 0.0;
  }

  int dim() const { return static_cast<int>(drift_.size()); }
  const Eigen::VectorXd& drift() const { return drift_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  double jump_rate() const { return jump_rate_; }
  const std::optional<JumpLaw>& jump_law() const { return jump_law_; }
  const Eigen::MatrixXd& diffusion_factor() const { return diffusion_factor_; }
  bool has_gaussian_part() const { return has_gaussian_part_; }
  bool has_jumps() const { return jump_rate_ > 0.0; }

  bool has_analytic_cf() const { return !has_jumps() || jump_law_->has_analytic_cf(); }

 private:
  Eigen::VectorXd drift_;
  Eigen::MatrixXd covariance_;
  double jump_rate_;
  std::optional<JumpLaw> jump_law_;
  Eigen::MatrixXd diffusion_factor_;
  bool has_gaussian_part_ = false;
};

// psi(y) = log E[exp(i <y, Y(1)>)] = i<b,y> - <Sigma y, y>/2 + lambda (cf_J(y) - 1).
// Exact formula, no sampling; models whose jump law lacks a closed-form CF
// are refused at construction (use empirical_cf on samples instead).
class CharExponent {
 public:
  explicit CharExponent(LevyModel model) : model_(std::move(model)) {
    if (!model_.has_analytic_cf()) {
      throw UnsupportedAnalytic(
          "CharExponent: jump law has no closed-form characteristic function");
    }
  }

  std::complex<double> operator()(const Eigen::VectorXd& y) const {
    if (y.size() != model_.dim()) throw InvalidInput("CharExponent: dimension mismatch");
    std::complex<double> psi(-0.5 * y.dot(model_.covariance() * y), model_.drift().dot(y));
    if (model_.has_jumps()) psi += model_.jump_rate() * (model_.jump_law()->cf(y) - 1.0);
    return psi;
  }

  const LevyModel& model() const { return model_; }

 private:
  LevyModel model_;
};

inline CharExponent char_exponent(const LevyModel& model) { return CharExponent(model); }

struct LevyJump {
  double time;
  Eigen::VectorXd size;
};

// One cadlag sample path of Y on [0, horizon]: values on the simulation grid
// (jump times merged in), plus the explicit jump records. Evaluation between
// recorded times follows the right-continuous step convention.
class LevyPath {
 public:
  LevyPath(double horizon, std::vector<double> times, Eigen::MatrixXd values,
           std::vector<LevyJump> jumps)
      : horizon_(horizon),
        times_(std::move(times)),
        values_(std::move(values)),
        jumps_(std::move(jumps)) {
    if (!(horizon_ > 0.0) || times_.empty() || times_.front() != 0.0 ||
        times_.back() != horizon_ ||
        values_.cols() != static_cast<Eigen::Index>(times_.size()) || values_.rows() < 1 ||
        !values_.col(0).isZero(0.0)) {
      throw InvalidInput("LevyPath: inconsistent path data (must start at zero and cover [0, horizon])");
    }
  }

  double horizon() const { return horizon_; }
  int dim() const { return static_cast<int>(values_.rows()); }
  const std::vector<double>& times() const { return times_; }
  const Eigen::MatrixXd& values() const { return values_; }  // dim x times.size()
  const std::vector<LevyJump>& jumps() const { return jumps_; }

  // Index of the largest recorded time <= t.
  std::size_t index_at(double t) const {
    if (t < 0.0 || t > horizon_) throw InvalidInput("LevyPath: time outside [0, horizon]");
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    return static_cast<std::size_t>(it - times_.begin()) - 1;
  }

  Eigen::VectorXd value_at(double t) const {
    return values_.col(static_cast<Eigen::Index>(index_at(t)));
  }

 private:
  double horizon_;
  std::vector<double> times_;
  Eigen::MatrixXd values_;
  std::vector<LevyJump> jumps_;
};

// Exact simulation: jump count ~ Poisson(lambda * horizon), jump times
// uniform order statistics, sizes i.i.d. from the jump law; Gaussian
// increments with covariance dt * Sigma between consecutive merged times and
// drift applied linearly. Deterministic given the stream. Draw order: jump
// count, jump times, jump sizes (chronological), then one Gaussian vector
// per cell in time order.
inline LevyPath sample_path(const LevyModel& model, double horizon, double grid_step,
                            RngStream rng) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidInput("sample_path: horizon must be finite and > 0");
  }
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) {
    throw InvalidInput("sample_path: grid_step must be finite and > 0");
  }
  const int d = model.dim();

  std::vector<LevyJump> jumps;
  if (model.has_jumps()) {
    const std::int64_t count = rng.poisson(model.jump_rate() * horizon);
    std::vector<double> jump_times(static_cast<std::size_t>(count));
    for (auto& jt : jump_times) jt = horizon * rng.uniform01();
    std::sort(jump_times.begin(), jump_times.end());
    jumps.reserve(jump_times.size());
    for (double jt : jump_times) jumps.push_back({jt, model.jump_law()->sample(rng)});
  }

  // Regular grid 0, h, 2h, ..., horizon with jump times merged in.
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(horizon / grid_step - 1e-12)));
  std::vector<double> times;
  times.reserve(steps + 1 + jumps.size());
  std::size_t j = 0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double tk = (k == steps) ? horizon : static_cast<double>(k) * grid_step;
    while (j < jumps.size() && jumps[j].time < tk) times.push_back(jumps[j++].time);
    if (j < jumps.size() && jumps[j].time == tk) ++j;  // jump exactly on the grid
    times.push_back(tk);
  }

  Eigen::MatrixXd values(d, static_cast<Eigen::Index>(times.size()));
  values.col(0).setZero();
  Eigen::VectorXd noise(d);
  std::size_t next_jump = 0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double dt = times[k] - times[k - 1];
    auto col = values.col(static_cast<Eigen::Index>(k));
    col = values.col(static_cast<Eigen::Index>(k - 1)) + dt * model.drift();
    if (model.has_gaussian_part() && dt > 0.0) {
      rng.fill_gaussian(noise);
      col.noalias() += std::sqrt(dt) * (model.diffusion_factor() * noise);
    }
    while (next_jump < jumps.size() && jumps[next_jump].time <= times[k]) {
      col += jumps[next_jump++].size;
    }
  }
  return LevyPath(horizon, std::move(times), std::move(values), std::move(jumps));
}

struct CfEstimate {
  std::complex<double> value;
  double std_error;  // max over the real/imaginary components
};

// Monte Carlo estimate of the Fourier transform E[exp(i <y, X>)] from
// samples stored as columns.
inline CfEstimate empirical_cf(const Eigen::MatrixXd& samples, const Eigen::VectorXd& y) {
  const Eigen::Index n = samples.cols();
  if (n < 100) throw InsufficientData("empirical_cf: need at least 100 samples");
  if (samples.rows() != y.size()) throw InvalidInput("empirical_cf: dimension mismatch");
  const Eigen::RowVectorXd phases = y.transpose() * samples;
  double sum_re = 0.0, sum_im = 0.0, sum_re2 = 0.0, sum_im2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = std::cos(phases[i]);
    const double s = std::sin(phases[i]);
    sum_re += c;
    sum_im += s;
    sum_re2 += c * c;
    sum_im2 += s * s;
  }
  const double nn = static_cast<double>(n);
  const double mean_re = sum_re / nn;
  const double mean_im = sum_im / nn;
  const double var_re = std::max(0.0, sum_re2 / nn - mean_re * mean_re);
  const double var_im = std::max(0.0, sum_im2 / nn - mean_im * mean_im);
  return {{mean_re, mean_im}, std::sqrt(std::max(var_re, var_im) / nn)};
}

}  // namespace mehler
