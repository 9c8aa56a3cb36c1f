#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mehler/errors.hpp"
#include "mehler/rng.hpp"

namespace mehler {

struct TwoSampleReport {
  double statistic = 0.0;
  double critical_value = 0.0;
  std::size_t n1 = 0, n2 = 0;
  Eigen::VectorXd projection;  // direction used, empty for scalar samples
  bool pass = false;           // statistic < critical_value
};

// Asymptotic two-sample Kolmogorov-Smirnov critical value
// c(alpha) sqrt((n1 + n2) / (n1 n2)), c(alpha) = sqrt(-ln(alpha/2) / 2);
// c(0.01) = 1.628.
inline double ks_critical_value(double alpha, std::size_t n1, std::size_t n2) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("ks_critical_value: alpha in (0,1)");
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(n1 + n2) /
                       (static_cast<double>(n1) * static_cast<double>(n2)));
}

// Classical two-sample Kolmogorov-Smirnov test. Ties are stepped over
// jointly, so the statistic is invariant under any strictly increasing
// transform applied to both samples.
inline TwoSampleReport ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
  if (a.size() < 100 || b.size() < 100) {
    throw InsufficientData("ks_two_sample: need at least 100 samples per side");
  }
  for (const auto* sample : {&a, &b}) {
    for (double x : *sample) {
      if (std::isnan(x)) throw InvalidInput("ks_two_sample: NaN sample");
    }
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  TwoSampleReport report;
  report.statistic = d;
  report.critical_value = ks_critical_value(alpha, a.size(), b.size());
  report.n1 = a.size();
  report.n2 = b.size();
  report.pass = report.statistic < report.critical_value;
  return report;
}

// <y, x_i> for samples stored as columns.
inline std::vector<double> project(const Eigen::MatrixXd& samples, const Eigen::VectorXd& y) {
  if (samples.rows() != y.size()) throw InvalidInput("project: dimension mismatch");
  const Eigen::RowVectorXd p = y.transpose() * samples;
  return {p.data(), p.data() + p.size()};
}

// Fixed projection panel for d > 1 testing: the d coordinate axes plus 8
// seeded unit directions; callers Bonferroni-correct to alpha / (d + 8).
inline std::vector<Eigen::VectorXd> projection_panel(int dim) {
  if (dim < 1) throw InvalidInput("projection_panel: dim must be >= 1");
  std::vector<Eigen::VectorXd> panel;
  panel.reserve(static_cast<std::size_t>(dim) + 8);
  for (int i = 0; i < dim; ++i) panel.push_back(Eigen::VectorXd::Unit(dim, i));
  RngStream rng(0x70616e656cULL);  // fixed panel seed, never varies between runs
  for (int i = 0; i < 8; ++i) panel.push_back(rng.unit_sphere(dim));
  return panel;
}

}  // namespace mehler
