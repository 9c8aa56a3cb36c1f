#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mehler/errors.hpp"
#include "mehler/exponent.hpp"
#include "mehler/mehler_operator.hpp"
#include "mehler/operator_group.hpp"
#include "mehler/rng.hpp"

namespace mehler {

// Exponent of the stationary Ornstein-Uhlenbeck law: l_inf(y) = integral
// over (0, infinity) of psi(T(r)^T y) dr, truncated at tail_horizon. Only
// defined for stable groups (spectral abscissa < 0); the integrand then
// decays geometrically and the default horizon 40/|abscissa| pushes the
// truncation error far below 1e-12 on probe points with |y| <= 4. The
// stationary law is the canonical decomposable measure for the group: it
// satisfies mu = T_t mu * rho_t for every t >= 0.
class StationaryExponent {
 public:
  explicit StationaryExponent(MehlerExponent exponent, double tail_horizon = 0.0)
      : exponent_(std::move(exponent)), tail_horizon_(tail_horizon) {
    const double abscissa = exponent_.group().spectral_abscissa();
    if (!(abscissa < 0.0)) {
      throw InvalidInput(
          "StationaryExponent: group is not stable (spectral abscissa >= 0); "
          "no stationary law exists");
    }
    if (tail_horizon_ <= 0.0) tail_horizon_ = 40.0 / -abscissa;
  }

  std::complex<double> operator()(const Eigen::VectorXd& y) const {
    return exponent_(tail_horizon_, y);
  }

  // First-order geometric bound on the neglected tail integral.
  double tail_bound(const Eigen::VectorXd& y) const {
    const double abscissa = exponent_.group().spectral_abscissa();
    return std::abs(exponent_.psi()(exponent_.group().adjoint_apply(tail_horizon_, y))) /
           -abscissa;
  }

  double tail_horizon() const { return tail_horizon_; }
  const MehlerExponent& exponent() const { return exponent_; }
  const OperatorGroup& group() const { return exponent_.group(); }

 private:
  MehlerExponent exponent_;
  double tail_horizon_;
};

// Certificate that T_t divides the stationary law with factor rho_t, i.e.
// mu = T_t mu * rho_t in Fourier form:
// |l_inf(y) - l_inf(T(t)^T y) - l(t, y)|. Contract: <= 10 quad_tol plus the
// truncation tail.
inline double decomposability_residual(const StationaryExponent& stationary, double t,
                                       const Eigen::VectorXd& y) {
  if (!(t >= 0.0)) throw InvalidInput("decomposability_residual: need t >= 0");
  const std::complex<double> whole = stationary(y);
  const std::complex<double> scaled = stationary(stationary.group().adjoint_apply(t, y));
  const std::complex<double> factor = stationary.exponent()(t, y);
  return std::abs(whole - scaled - factor);
}

// The operator-convolution-factor operation nu_A <> nu_B = nu_A * A nu_B on
// the factors nu_{T_t} = rho_t, in Fourier form. nu_{T_t} <> nu_{T_s} =
// nu_{T_{t+s}} is exactly the cocycle identity.
inline double diamond_residual(const StationaryExponent& stationary, double t, double s,
                               const Eigen::VectorXd& y) {
  return cocycle_residual(stationary.exponent(), t, s, y);
}

// Associativity of <> probed through the time indices: grouping (t, s) first
// gives l(t+s, y) + l(u, T(t+s)^T y), grouping (s, u) first gives
// l(t, y) + l(s+u, T(t)^T y); both represent nu_{T_{t+s+u}}.
inline double diamond_associativity_residual(const StationaryExponent& stationary, double t,
                                             double s, double u, const Eigen::VectorXd& y) {
  if (!(t >= 0.0) || !(s >= 0.0) || !(u >= 0.0)) {
    throw InvalidInput("diamond_associativity_residual: need t, s, u >= 0");
  }
  const MehlerExponent& l = stationary.exponent();
  const OperatorGroup& group = stationary.group();
  const std::complex<double> left = l(t + s, y) + l(u, group.adjoint_apply(t + s, y));
  const std::complex<double> right = l(t, y) + l(s + u, group.adjoint_apply(t, y));
  return std::abs(left - right);
}

struct ConvergenceRow {
  double t;
  double gap;  // max over the probe grid of |exp l(t, y) - exp l_inf(y)|
};

struct FactorConvergence {
  std::vector<ConvergenceRow> rows;

  bool nonincreasing(double slack = 1e-9) const {
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].gap > rows[i - 1].gap + slack) return false;
    }
    return true;
  }
  double last_gap() const { return rows.empty() ? 0.0 : rows.back().gap; }
};

// nu_{T_t} => mu as T_t -> 0: the factors' Fourier transforms converge to
// the stationary one uniformly on the probe grid.
inline FactorConvergence factor_convergence(const StationaryExponent& stationary,
                                            const std::vector<double>& times,
                                            const std::vector<Eigen::VectorXd>& y_grid) {
  if (y_grid.empty()) throw InvalidInput("factor_convergence: empty probe grid");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i - 1] < times[i])) throw InvalidInput("factor_convergence: times must increase");
  }
  FactorConvergence out;
  out.rows.reserve(times.size());
  for (double t : times) {
    double gap = 0.0;
    for (const auto& y : y_grid) {
      gap = std::max(gap, std::abs(std::exp(stationary.exponent()(t, y)) -
                                   std::exp(stationary(y))));
    }
    out.rows.push_back({t, gap});
  }
  return out;
}

struct InfinitesimalityEstimate {
  int subdivisions = 0;    // n
  int argmax_j = 0;        // row index attaining the maximal tail
  double tail_estimate = 0.0;
  double wilson_halfwidth = 0.0;  // one-sigma Wilson interval at the argmax
};

inline double wilson_halfwidth(std::int64_t successes, std::int64_t trials, double z = 1.0) {
  const double n = static_cast<double>(trials);
  const double k = static_cast<double>(successes);
  const double denom = n + z * z;
  return z * std::sqrt(k * (n - k) / n + z * z / 4.0) / denom;
}

// Infinitesimality of the triangular array rho_t = rho_{t/n} * T_{t/n}
// rho_{t/n} * ... : estimates max over j of (T_{jt/n} rho_{t/n})(|x| >= eps)
// by Monte Carlo. The profile must shrink as n doubles, which is what makes
// every rho_t infinitely divisible.
inline InfinitesimalityEstimate infinitesimality_profile(const OperatorGroup& group,
                                                         const LevyModel& model, double t, int n,
                                                         double epsilon, std::int64_t n_samples,
                                                         RngStream rng, double grid_step = 0.0) {
  if (n < 1) throw InvalidInput("infinitesimality_profile: need n >= 1");
  if (!(epsilon > 0.0)) throw InvalidInput("infinitesimality_profile: need epsilon > 0");
  if (!(t > 0.0)) throw InvalidInput("infinitesimality_profile: need t > 0");
  if (n_samples < 100) throw InsufficientData("infinitesimality_profile: need >= 100 samples");
  const double tau = t / n;
  if (grid_step <= 0.0) grid_step = tau / 16.0;
  const OuSampler sampler(group, model, tau, grid_step);

  std::vector<Eigen::MatrixXd> powers;
  powers.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) powers.push_back(group(j * tau));

  std::vector<std::int64_t> hits(static_cast<std::size_t>(n), 0);
  for (std::int64_t i = 0; i < n_samples; ++i) {
    RngStream path_rng = rng.split(static_cast<std::uint64_t>(i));
    const Eigen::VectorXd v = sampler.sample_state(path_rng);
    for (int j = 0; j < n; ++j) {
      if ((powers[static_cast<std::size_t>(j)] * v).norm() >= epsilon) {
        ++hits[static_cast<std::size_t>(j)];
      }
    }
  }
  InfinitesimalityEstimate out;
  out.subdivisions = n;
  std::int64_t best = -1;
  for (int j = 0; j < n; ++j) {
    if (hits[static_cast<std::size_t>(j)] > best) {
      best = hits[static_cast<std::size_t>(j)];
      out.argmax_j = j;
    }
  }
  out.tail_estimate = static_cast<double>(best) / static_cast<double>(n_samples);
  out.wilson_halfwidth = wilson_halfwidth(best, n_samples);
  return out;
}

}  // namespace mehler
