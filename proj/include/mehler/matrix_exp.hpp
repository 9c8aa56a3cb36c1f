#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "mehler/errors.hpp"

namespace mehler {

namespace detail {

// Degree-m diagonal Pade coefficients for exp, m in {3, 5, 7, 9, 13}.
inline const std::vector<double>& pade_coefficients(int degree) {
  static const std::vector<double> b3 = {120., 60., 12., 1.};
  static const std::vector<double> b5 = {30240., 15120., 3360., 420., 30., 1.};
  static const std::vector<double> b7 = {17297280., 8648640., 1995840., 277200.,
                                         25200., 1512., 56., 1.};
  static const std::vector<double> b9 = {17643225600., 8821612800., 2075673600.,
                                         302702400., 30270240., 2162160., 110880.,
                                         3960., 90., 1.};
  static const std::vector<double> b13 = {64764752532480000., 32382376266240000.,
                                          7771770303897600., 1187353796428800.,
                                          129060195264000.,  10559470521600.,
                                          670442572800.,     33522128640.,
                                          1323241920.,       40840800.,
                                          960960.,           16380.,
                                          182.,              1.};
  switch (degree) {
    case 3: return b3;
    case 5: return b5;
    case 7: return b7;
    case 9: return b9;
    default: return b13;
  }
}

}  // namespace detail

// Matrix exponential by scaling and squaring with diagonal Pade kernels
// (Higham 2005 degree/threshold schedule). Relative accuracy is at the
// rounding level for well-conditioned arguments, comfortably inside 1e-12.
template <typename Derived>
typename Eigen::MatrixBase<Derived>::PlainObject matrix_exponential(
    const Eigen::MatrixBase<Derived>& arg) {
  using Matrix = typename Eigen::MatrixBase<Derived>::PlainObject;
  const Matrix a = arg.eval();
  if (a.rows() != a.cols()) throw InvalidInput("matrix_exponential: matrix must be square");
  if (!a.allFinite()) throw InvalidInput("matrix_exponential: matrix has non-finite entries");

  const Eigen::Index n = a.rows();
  const Matrix identity = Matrix::Identity(n, n);
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();  // induced 1-norm

  // Degree thresholds theta_m for double precision.
  constexpr double theta3 = 1.495585217958292e-2;
  constexpr double theta5 = 2.539398330063230e-1;
  constexpr double theta7 = 9.504178996162932e-1;
  constexpr double theta9 = 2.097847961257068e0;
  constexpr double theta13 = 5.371920351148152e0;

  int squarings = 0;
  Matrix scaled = a;
  int degree;
  if (norm <= theta3) {
    degree = 3;
  } else if (norm <= theta5) {
    degree = 5;
  } else if (norm <= theta7) {
    degree = 7;
  } else if (norm <= theta9) {
    degree = 9;
  } else {
    degree = 13;
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
    scaled = a / std::pow(2.0, squarings);
  }

  const auto& b = detail::pade_coefficients(degree);
  const Matrix a2 = scaled * scaled;
  Matrix u, v;
  if (degree <= 9) {
    // Sum even powers into V and odd ones into A*U.
    Matrix even = identity;
    Matrix pow = a2;
    u = b[1] * identity;
    v = b[0] * identity;
    for (int k = 2; k <= degree; k += 2) {
      v.noalias() += b[k] * pow;
      if (k + 1 <= degree) u.noalias() += b[k + 1] * pow;
      if (k + 2 <= degree) pow = pow * a2;
    }
    u = scaled * u;
  } else {
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a2 * a4;
    u = scaled * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                  b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * identity);
    v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
        b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * identity;
  }

  // r = (V - U)^{-1} (V + U), then undo the scaling by repeated squaring.
  Matrix numer = v + u;
  Matrix denom = v - u;
  Matrix result = denom.partialPivLu().solve(numer);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace mehler
