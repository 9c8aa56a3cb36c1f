#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "mehler/errors.hpp"

namespace mehler {

// Counter-based splittable random stream.
//
// output(i) = finalize(key + i * golden), the SplitMix64 construction: the
// generator is a pure function of (key, counter), so streams are cheap value
// types with O(1) state. split() derives a child whose key goes through an
// extra finalizer round, decorrelating it from the parent; handing disjoint
// substreams to independent samplers (one per path, one per Monte Carlo
// batch) makes parallel and sequential runs reproduce bit-identically.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(finalize(seed + kGolden)) {}

  // Child stream for an indexed lane. Does not advance this stream.
  RngStream split(std::uint64_t lane) const {
    return RngStream(finalize(key_ ^ finalize(lane * kGolden + kLaneSalt)), 0);
  }

  // Child stream for a named subsystem ("jumps", "inner", ...).
  RngStream split(std::string_view name) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    for (unsigned char c : name) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return RngStream(finalize(key_ ^ finalize(h + kLaneSalt)), 0);
  }

  std::uint64_t next_u64() {
    counter_ += kGolden;
    return finalize(key_ + counter_);
  }

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal, Marsaglia polar method with a cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  // Poisson draw: Knuth's product method for small means, Hormann's PTRS
  // transformed rejection for large ones.
  std::int64_t poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
      throw InvalidInput("poisson: mean must be finite and >= 0");
    }
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
      const double threshold = std::exp(-mean);
      std::int64_t k = 0;
      double prod = uniform01();
      while (prod > threshold) {
        ++k;
        prod *= uniform01();
      }
      return k;
    }
    return poisson_ptrs(mean);
  }

  Eigen::VectorXd gaussian_vector(Eigen::Index dim) {
    Eigen::VectorXd out(dim);
    for (Eigen::Index i = 0; i < dim; ++i) out[i] = normal();
    return out;
  }

  void fill_gaussian(Eigen::Ref<Eigen::VectorXd> out) {
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal();
  }

  // Uniform direction on the unit sphere in R^dim.
  Eigen::VectorXd unit_sphere(Eigen::Index dim) {
    Eigen::VectorXd v(dim);
    double n2;
    do {
      fill_gaussian(v);
      n2 = v.squaredNorm();
    } while (n2 == 0.0);
    return v / std::sqrt(n2);
  }

 private:
  RngStream(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kLaneSalt = 0xD1B54A32D192ED03ULL;

  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::int64_t poisson_ptrs(double mean) {
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
      const double u = uniform01() - 0.5;
      const double v = uniform01();
      const double us = 0.5 - std::abs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      const std::int64_t k = static_cast<std::int64_t>(kf);
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          kf * log_mean - mean - std::lgamma(kf + 1.0)) {
        return k;
      }
    }
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mehler
