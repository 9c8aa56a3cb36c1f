#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mehler/errors.hpp"
#include "mehler/levy.hpp"
#include "mehler/operator_group.hpp"
#include "mehler/random_integral.hpp"
#include "mehler/rng.hpp"

namespace mehler {

inline constexpr double kDefaultGridStep = 1.0 / 256.0;

// Bounded continuous test function with its declared bound.
struct TestFunction {
  std::string name;
  double bound;
  std::function<double(const Eigen::VectorXd&)> evaluation;
};

inline TestFunction cos_pairing(Eigen::VectorXd y) {
  auto eval = [y](const Eigen::VectorXd& x) { return std::cos(y.dot(x)); };
  return {"cos", 1.0, std::move(eval)};
}

inline TestFunction sin_pairing(Eigen::VectorXd y) {
  auto eval = [y](const Eigen::VectorXd& x) { return std::sin(y.dot(x)); };
  return {"sin", 1.0, std::move(eval)};
}

// Smooth bump supported on the ball of the given radius.
inline TestFunction bump(double radius) {
  auto eval = [radius](const Eigen::VectorXd& x) {
    const double u = x.squaredNorm() / (radius * radius);
    return u >= 1.0 ? 0.0 : (1.0 - u) * (1.0 - u);
  };
  return {"bump", 1.0, std::move(eval)};
}

// Draws the pair (V(t), Z(t)) = (convolution integral, additive integral)
// from one fresh path per call, via the left-endpoint partial sums on the
// path's regular grid merged with its jump times. Grid-point operator
// weights T(t - s) and T(s) are precomputed once; weights at jump times are
// formed on the fly. Consumes the stream exactly like sample_path, so a
// draw here matches ou_state / additive_integral on the identically seeded
// path.
class OuSampler {
 public:
  OuSampler(OperatorGroup group, LevyModel model, double t,
            double grid_step = kDefaultGridStep)
      : group_(std::move(group)), model_(std::move(model)), t_(t) {
    if (group_.dim() != model_.dim()) throw InvalidInput("OuSampler: dimension mismatch");
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("OuSampler: need t >= 0");
    if (!(grid_step > 0.0)) throw InvalidInput("OuSampler: grid_step must be > 0");
    if (t_ == 0.0) return;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t / grid_step - 1e-12)));
    grid_.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
      grid_[k] = (k == steps) ? t : static_cast<double>(k) * grid_step;
    }
    state_weights_.reserve(steps);
    additive_weights_.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      state_weights_.push_back(group_(t - grid_[k]));
      additive_weights_.push_back(group_(grid_[k]));
    }
  }

  double time() const { return t_; }
  const LevyModel& model() const { return model_; }

  Eigen::VectorXd sample_state(RngStream& rng) const {
    Eigen::VectorXd v(model_.dim()), z(model_.dim());
    draw(rng, v, z, /*want_additive=*/false);
    return v;
  }

  Eigen::VectorXd sample_additive(RngStream& rng) const {
    Eigen::VectorXd v(model_.dim()), z(model_.dim());
    draw(rng, v, z, /*want_additive=*/true);
    return z;
  }

  // Both integrals from the same underlying path.
  void sample_pair(RngStream& rng, Eigen::VectorXd& state, Eigen::VectorXd& additive) const {
    state.resize(model_.dim());
    additive.resize(model_.dim());
    draw(rng, state, additive, /*want_additive=*/true);
  }

 private:
  void draw(RngStream& rng, Eigen::VectorXd& v, Eigen::VectorXd& z, bool want_additive) const {
    const int d = model_.dim();
    v.setZero();
    z.setZero();
    if (t_ == 0.0) return;

    std::vector<LevyJump> jumps;
    if (model_.has_jumps()) {
      const std::int64_t count = rng.poisson(model_.jump_rate() * t_);
      std::vector<double> jump_times(static_cast<std::size_t>(count));
      for (auto& jt : jump_times) jt = t_ * rng.uniform01();
      std::sort(jump_times.begin(), jump_times.end());
      jumps.reserve(jump_times.size());
      for (double jt : jump_times) jumps.push_back({jt, model_.jump_law()->sample(rng)});
    }

    const bool diffusive = model_.has_gaussian_part() || !model_.drift().isZero(0.0);
    if (!diffusive) {
      // Pure-jump path: only the cells ending at a jump carry an increment.
      // The left endpoint of such a cell is the previous merged time.
      for (std::size_t i = 0; i < jumps.size(); ++i) {
        const double tau = jumps[i].time;
        std::size_t cell = grid_cell_before(tau);
        double left = grid_[cell];
        if (i > 0 && jumps[i - 1].time > left && jumps[i - 1].time < tau) left = jumps[i - 1].time;
        accumulate(left, jumps[i].size, v, z, want_additive, cell);
      }
      return;
    }

    Eigen::VectorXd noise(d), dy(d);
    std::size_t next_jump = 0;
    double prev = 0.0;
    std::ptrdiff_t prev_idx = 0;  // grid index of prev, or -1 when prev is a jump time
    for (std::size_t k = 1; k < grid_.size();) {
      const double cell_end = grid_[k];
      double cur;
      bool is_jump = false;
      std::ptrdiff_t cur_idx;
      if (next_jump < jumps.size() && jumps[next_jump].time < cell_end) {
        cur = jumps[next_jump].time;
        is_jump = true;
        cur_idx = -1;
      } else {
        cur = cell_end;
        cur_idx = static_cast<std::ptrdiff_t>(k);
        if (next_jump < jumps.size() && jumps[next_jump].time == cell_end) is_jump = true;
        ++k;
      }
      const double dt = cur - prev;
      dy = dt * model_.drift();
      if (model_.has_gaussian_part() && dt > 0.0) {
        rng.fill_gaussian(noise);
        dy.noalias() += std::sqrt(dt) * (model_.diffusion_factor() * noise);
      }
      if (is_jump) dy += jumps[next_jump++].size;
      accumulate_at(prev, prev_idx, dy, v, z, want_additive);
      prev = cur;
      prev_idx = cur_idx;
    }
  }

  // Largest grid index with grid_[i] < tau (tau in (0, t]).
  std::size_t grid_cell_before(double tau) const {
    const auto it = std::lower_bound(grid_.begin(), grid_.end(), tau);
    return static_cast<std::size_t>(it - grid_.begin()) - 1;
  }

  void accumulate(double left, const Eigen::VectorXd& dy, Eigen::VectorXd& v, Eigen::VectorXd& z,
                  bool want_additive, std::size_t cell_hint) const {
    if (left == grid_[cell_hint]) {
      v.noalias() += state_weights_[cell_hint] * dy;
      if (want_additive) z.noalias() += additive_weights_[cell_hint] * dy;
    } else {
      v.noalias() += group_(t_ - left) * dy;
      if (want_additive) z.noalias() += group_(left) * dy;
    }
  }

  void accumulate_at(double left, std::ptrdiff_t cached, const Eigen::VectorXd& dy,
                     Eigen::VectorXd& v, Eigen::VectorXd& z, bool want_additive) const {
    if (cached >= 0 && static_cast<std::size_t>(cached) < state_weights_.size()) {
      v.noalias() += state_weights_[static_cast<std::size_t>(cached)] * dy;
      if (want_additive) z.noalias() += additive_weights_[static_cast<std::size_t>(cached)] * dy;
    } else {
      v.noalias() += group_(t_ - left) * dy;
      if (want_additive) z.noalias() += group_(left) * dy;
    }
  }

  OperatorGroup group_;
  LevyModel model_;
  double t_;
  std::vector<double> grid_;
  std::vector<Eigen::MatrixXd> state_weights_;     // T(t - grid_k)
  std::vector<Eigen::MatrixXd> additive_weights_;  // T(grid_k)
};

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
};

// Generalized Mehler operator by Monte Carlo:
// (T_t f)(x) = E[f(T_t x + V(t))], one fresh path per sample.
inline MonteCarloEstimate mehler_apply(const OperatorGroup& group, const LevyModel& model,
                                       double t, const TestFunction& f, const Eigen::VectorXd& x,
                                       std::int64_t n_samples, RngStream rng,
                                       double grid_step = kDefaultGridStep) {
  if (!(t >= 0.0)) throw InvalidInput("mehler_apply: need t >= 0");
  if (t == 0.0) return {f.evaluation(x), 0.0, 0};  // T_0 = identity, no sampling needed
  if (n_samples < 100) throw InsufficientData("mehler_apply: need at least 100 samples");
  const OuSampler sampler(group, model, t, grid_step);
  const Eigen::VectorXd shifted = group.apply(t, x);
  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    RngStream path_rng = rng.split(static_cast<std::uint64_t>(i));
    const double value = f.evaluation(shifted + sampler.sample_state(path_rng));
    sum += value;
    sum2 += value * value;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  return {mean, std::sqrt(var / n), n_samples};
}

struct SemigroupResidual {
  double residual = 0.0;
  double combined_std_error = 0.0;
  MonteCarloEstimate nested;
  MonteCarloEstimate direct;
};

// Monte Carlo residual of the one-parameter law T_s (T_t f) = T_{t+s} f.
// The inner operator is itself a Monte Carlo function; every outer sample
// gets an independent inner stream, keeping the nested estimator unbiased.
// Contract: residual within 4 combined standard errors.
inline SemigroupResidual semigroup_residual(const OperatorGroup& group, const LevyModel& model,
                                            double t, double s, const TestFunction& f,
                                            const Eigen::VectorXd& x, std::int64_t n_outer,
                                            std::int64_t n_inner, RngStream rng,
                                            double grid_step = kDefaultGridStep) {
  if (!(t >= 0.0) || !(s >= 0.0)) throw InvalidInput("semigroup_residual: need t, s >= 0");
  if (n_outer < 100 || n_inner < 100) {
    throw InsufficientData("semigroup_residual: need at least 100 outer and inner samples");
  }
  const OuSampler outer_sampler(group, model, s, grid_step);
  const Eigen::VectorXd shifted = group.apply(s, x);
  RngStream outer_rng = rng.split("outer");
  RngStream inner_rng = rng.split("inner");

  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t i = 0; i < n_outer; ++i) {
    RngStream path_rng = outer_rng.split(static_cast<std::uint64_t>(i));
    const Eigen::VectorXd u = shifted + outer_sampler.sample_state(path_rng);
    const MonteCarloEstimate inner = mehler_apply(group, model, t, f, u, n_inner,
                                                  inner_rng.split(static_cast<std::uint64_t>(i)),
                                                  grid_step);
    sum += inner.value;
    sum2 += inner.value * inner.value;
  }
  const double n = static_cast<double>(n_outer);
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  SemigroupResidual out;
  out.nested = {mean, std::sqrt(var / n), n_outer};
  out.direct = mehler_apply(group, model, t + s, f, x, n_outer, rng.split("direct"), grid_step);
  out.residual = std::abs(out.nested.value - out.direct.value);
  out.combined_std_error = std::hypot(out.nested.std_error, out.direct.std_error);
  return out;
}

}  // namespace mehler
