#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "mehler/errors.hpp"
#include "mehler/matrix_exp.hpp"

namespace mehler {

// One-parameter operator group T(t) = exp(t Q) on R^d, defined for all real
// t. On a finite-dimensional space every strongly continuous semigroup is of
// this uniformly continuous form, so nothing is lost by restricting to
// matrix generators. Immutable after construction; concurrent reads are safe.
class OperatorGroup {
 public:
  explicit OperatorGroup(Eigen::MatrixXd generator) : generator_(std::move(generator)) {
    if (generator_.size() == 0 || generator_.rows() != generator_.cols()) {
      throw InvalidInput("OperatorGroup: generator must be a nonempty square matrix");
    }
    if (!generator_.allFinite()) {
      throw InvalidInput("OperatorGroup: generator has non-finite entries");
    }
    const Eigen::EigenSolver<Eigen::MatrixXd> eigs(generator_, /*computeEigenvectors=*/false);
    spectral_abscissa_ = eigs.eigenvalues().real().maxCoeff();
  }

  int dim() const { return static_cast<int>(generator_.rows()); }
  const Eigen::MatrixXd& generator() const { return generator_; }

  // Largest real part of the spectrum of Q; negative iff T(t) -> 0.
  double spectral_abscissa() const { return spectral_abscissa_; }

  // The operator T(t) = exp(t Q). T(0) is the identity exactly.
  Eigen::MatrixXd operator()(double t) const {
    if (!std::isfinite(t)) throw InvalidInput("OperatorGroup: time must be finite");
    if (t == 0.0) return Eigen::MatrixXd::Identity(dim(), dim());
    return matrix_exponential(t * generator_);
  }

  Eigen::VectorXd apply(double t, const Eigen::VectorXd& x) const {
    check_dim(x);
    if (t == 0.0) return x;
    return (*this)(t)*x;
  }

  // T(t)^T y, the action on the dual side: (A mu)^(y) = mu^(A^T y).
  Eigen::VectorXd adjoint_apply(double t, const Eigen::VectorXd& y) const {
    check_dim(y);
    if (t == 0.0) return y;
    return (*this)(t).transpose() * y;
  }

 private:
  void check_dim(const Eigen::VectorXd& v) const {
    if (v.size() != generator_.rows()) {
      throw InvalidInput("OperatorGroup: vector dimension mismatch");
    }
  }

  Eigen::MatrixXd generator_;
  double spectral_abscissa_;
};

}  // namespace mehler
