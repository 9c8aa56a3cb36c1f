#pragma once

#include <cmath>
#include <complex>

#include "mehler/errors.hpp"

namespace mehler {

namespace detail {

template <typename F>
std::complex<double> simpson_recurse(F& f, double a, double b, std::complex<double> fa,
                                     std::complex<double> fm, std::complex<double> fb,
                                     std::complex<double> whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const std::complex<double> flm = f(lm);
  const std::complex<double> frm = f(rm);
  const std::complex<double> left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const std::complex<double> right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const std::complex<double> delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;  // Richardson correction
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature of a complex-valued integrand over [a, b] to
// the given absolute tolerance, with an interval-halving depth cap.
template <typename F>
std::complex<double> adaptive_simpson(F&& f, double a, double b, double abs_tol,
                                      int max_depth = 40) {
  if (!std::isfinite(a) || !std::isfinite(b) || a > b) {
    throw InvalidInput("adaptive_simpson: need finite a <= b");
  }
  if (!(abs_tol > 0.0)) throw InvalidInput("adaptive_simpson: tolerance must be > 0");
  if (a == b) return {0.0, 0.0};
  const double m = 0.5 * (a + b);
  const std::complex<double> fa = f(a);
  const std::complex<double> fm = f(m);
  const std::complex<double> fb = f(b);
  const std::complex<double> whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_recurse(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

}  // namespace mehler
