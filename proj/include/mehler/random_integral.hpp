#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mehler/errors.hpp"
#include "mehler/levy.hpp"
#include "mehler/operator_group.hpp"

namespace mehler {

// Partition a = t0 < t1 < ... < tn = b of the interval (a, b]. A degenerate
// partition (lower == upper, single time) stands for the empty interval.
class Partition {
 public:
  Partition(double lower, double upper, std::vector<double> times)
      : lower_(lower), upper_(upper), times_(std::move(times)) {
    if (!(lower_ <= upper_)) throw InvalidInput("Partition: need lower <= upper");
    if (times_.empty() || times_.front() != lower_ || times_.back() != upper_) {
      throw InvalidInput("Partition: times must run from lower to upper");
    }
    if (lower_ == upper_ && times_.size() != 1) {
      throw InvalidInput("Partition: empty interval takes a single time");
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
      if (!(times_[i - 1] < times_[i])) throw InvalidInput("Partition: times must be strictly increasing");
    }
  }

  static Partition regular(double lower, double upper, int cells) {
    if (cells < 1) throw InvalidInput("Partition: need at least one cell");
    std::vector<double> times(static_cast<std::size_t>(cells) + 1);
    for (int k = 0; k <= cells; ++k) {
      times[static_cast<std::size_t>(k)] =
          lower + (upper - lower) * (static_cast<double>(k) / cells);
    }
    times.front() = lower;
    times.back() = upper;
    return Partition(lower, upper, std::move(times));
  }

  // Insert the path's jump times falling inside (lower, upper); integrands
  // are then sampled exactly at the discontinuities of Y.
  Partition merged_with_jumps(const LevyPath& path) const {
    std::vector<double> merged = times_;
    for (const auto& jump : path.jumps()) {
      if (jump.time > lower_ && jump.time < upper_) merged.push_back(jump.time);
    }
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return Partition(lower_, upper_, std::move(merged));
  }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  const std::vector<double>& times() const { return times_; }
  int cells() const { return static_cast<int>(times_.size()) - 1; }

 private:
  double lower_, upper_;
  std::vector<double> times_;
};

// Operator-valued integrand t -> g(t), assumed continuous and of locally
// bounded variation on the integration interval.
using OperatorIntegrand = std::function<Eigen::MatrixXd(double)>;

// Pathwise random integral over (a, b] by the integration-by-parts partial
// sums: g(b)Y(b) - g(a)Y(a) - sum_j (g(t_j) - g(t_{j-1})) Y(t_j). The
// Abel-equivalent left sum sum_j g(t_{j-1}) (Y(t_j) - Y(t_{j-1})) is the
// primary evaluator (fewer cancellations); the literal form is recomputed as
// an internal consistency check and the two must agree to 1e-9.
inline Eigen::VectorXd random_integral(const OperatorIntegrand& g, const LevyPath& path,
                                       const Partition& partition) {
  if (partition.lower() < 0.0 || partition.upper() > path.horizon()) {
    throw InvalidInput("random_integral: partition outside [0, horizon]");
  }
  const auto& t = partition.times();
  const int d = path.dim();

  Eigen::VectorXd left_sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd stieltjes = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd g_prev = g(t[0]);
  Eigen::VectorXd y_prev = path.value_at(t[0]);
  const Eigen::VectorXd y_first = y_prev;
  for (std::size_t j = 1; j < t.size(); ++j) {
    const Eigen::MatrixXd g_cur = g(t[j]);
    const Eigen::VectorXd y_cur = path.value_at(t[j]);
    left_sum.noalias() += g_prev * (y_cur - y_prev);
    stieltjes.noalias() += (g_cur - g_prev) * y_cur;
    g_prev = g_cur;
    y_prev = y_cur;
  }
  const Eigen::VectorXd by_parts = g_prev * y_prev - g(t[0]) * y_first - stieltjes;
  if ((left_sum - by_parts).cwiseAbs().maxCoeff() >= 1e-9) {
    throw std::logic_error("random_integral: partial-sum forms disagree beyond 1e-9");
  }
  return left_sum;
}

// State of the Ornstein-Uhlenbeck convolution integral started at zero:
// V(t) = integral over (0, t] of T(t - s) dY(s).
inline Eigen::VectorXd ou_state(const OperatorGroup& group, const LevyPath& path, double t,
                                const Partition& partition) {
  if (partition.lower() != 0.0 || partition.upper() != t) {
    throw InvalidInput("ou_state: partition must cover (0, t]");
  }
  if (t > path.horizon()) throw InvalidInput("ou_state: t beyond path horizon");
  return random_integral([&](double s) { return group(t - s); }, path, partition);
}

// Additive-process integral Z at every partition time: Z(t) = integral over
// (0, t] of T(s) dY(s), left sums accumulated in one pass. Column k holds
// Z(times[k]); column 0 is zero.
inline Eigen::MatrixXd additive_integral_trajectory(const OperatorGroup& group,
                                                    const LevyPath& path,
                                                    const Partition& partition) {
  if (partition.lower() != 0.0) throw InvalidInput("additive_integral: partition must start at 0");
  if (partition.upper() > path.horizon()) {
    throw InvalidInput("additive_integral: partition beyond path horizon");
  }
  const auto& t = partition.times();
  Eigen::MatrixXd traj(path.dim(), static_cast<Eigen::Index>(t.size()));
  traj.col(0).setZero();
  Eigen::VectorXd y_prev = path.value_at(t[0]);
  for (std::size_t j = 1; j < t.size(); ++j) {
    const Eigen::VectorXd y_cur = path.value_at(t[j]);
    traj.col(static_cast<Eigen::Index>(j)) =
        traj.col(static_cast<Eigen::Index>(j - 1)) + group(t[j - 1]) * (y_cur - y_prev);
    y_prev = y_cur;
  }
  return traj;
}

inline Eigen::VectorXd additive_integral(const OperatorGroup& group, const LevyPath& path,
                                         double t, const Partition& partition) {
  if (partition.upper() != t) throw InvalidInput("additive_integral: partition must end at t");
  const Eigen::MatrixXd traj = additive_integral_trajectory(group, path, partition);
  return traj.col(traj.cols() - 1);
}

// Recovers the driving path from the additive integral: Y(t) = integral over
// (0, t] of T(-s) dZ(s). At the partition points the left sums telescope,
// T(-t_{j-1}) T(t_{j-1}) = I, so the reconstruction is exact up to rounding.
inline Eigen::MatrixXd reconstruct_driver(const OperatorGroup& group, const Partition& partition,
                                          const Eigen::MatrixXd& z_trajectory) {
  if (partition.lower() != 0.0) throw InvalidInput("reconstruct_driver: partition must start at 0");
  const auto& t = partition.times();
  if (z_trajectory.cols() != static_cast<Eigen::Index>(t.size())) {
    throw InvalidInput("reconstruct_driver: trajectory does not match partition");
  }
  Eigen::MatrixXd out(z_trajectory.rows(), z_trajectory.cols());
  out.col(0) = z_trajectory.col(0);
  for (std::size_t j = 1; j < t.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    out.col(k) = out.col(k - 1) + group(-t[j - 1]) * (z_trajectory.col(k) - z_trajectory.col(k - 1));
  }
  return out;
}

}  // namespace mehler
