#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "mehler/errors.hpp"
#include "mehler/levy.hpp"
#include "mehler/operator_group.hpp"
#include "mehler/quadrature.hpp"

namespace mehler {

// Characteristic exponent of the Mehler measure family: l(t, y) =
// integral over (0, t] of psi(T(r)^T y) dr, so that rho_t^(y) = exp l(t, y)
// is the Fourier transform of the law of the convolution integral V(t).
// Evaluated by adaptive Simpson quadrature; the integrand is smooth for all
// in-scope models.
class MehlerExponent {
 public:
  MehlerExponent(OperatorGroup group, CharExponent psi, double quad_tol = 1e-10)
      : group_(std::move(group)), psi_(std::move(psi)), quad_tol_(quad_tol) {
    if (group_.dim() != psi_.model().dim()) {
      throw InvalidInput("MehlerExponent: group and model dimensions differ");
    }
    if (!(quad_tol_ > 0.0)) throw InvalidInput("MehlerExponent: quad_tol must be > 0");
  }

  std::complex<double> operator()(double t, const Eigen::VectorXd& y) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("MehlerExponent: need t >= 0");
    if (y.size() != group_.dim()) throw InvalidInput("MehlerExponent: dimension mismatch");
    if (t == 0.0 || y.isZero(0.0)) return {0.0, 0.0};
    return adaptive_simpson([&](double r) { return psi_(group_.adjoint_apply(r, y)); }, 0.0, t,
                            quad_tol_, kMaxDepth);
  }

  const OperatorGroup& group() const { return group_; }
  const CharExponent& psi() const { return psi_; }
  double quad_tol() const { return quad_tol_; }

  static constexpr int kMaxDepth = 40;

 private:
  OperatorGroup group_;
  CharExponent psi_;
  double quad_tol_;
};

// Residual of the measure-cocycle equation rho_{t+s} = rho_t * T_t rho_s in
// Fourier form: |l(t+s, y) - l(t, y) - l(s, T(t)^T y)|. Identically zero in
// exact arithmetic; the contract is <= 10 * quad_tol.
inline double cocycle_residual(const MehlerExponent& exponent, double t, double s,
                               const Eigen::VectorXd& y) {
  if (!(t >= 0.0) || !(s >= 0.0)) throw InvalidInput("cocycle_residual: need t, s >= 0");
  const std::complex<double> lhs = exponent(t + s, y);
  const std::complex<double> part_t = exponent(t, y);
  const std::complex<double> part_s = exponent(s, exponent.group().adjoint_apply(t, y));
  return std::abs(lhs - part_t - part_s);
}

}  // namespace mehler
