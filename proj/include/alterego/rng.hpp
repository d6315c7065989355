#pragma once

#include "alterego/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace alterego {

/// Deterministic Gaussian sampler. std::normal_distribution is
/// implementation-defined, so frozen expectations use this Box-Muller
/// transform over mt19937_64 instead.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_(engine_);
    double u2 = uniform_(engine_);
    while (u1 <= 1e-300) u1 = uniform_(engine_);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  Vec vector(int n) {
    Vec out(n);
    for (int i = 0; i < n; ++i) out[i] = (*this)();
    return out;
  }

  double uniform() { return uniform_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Symmetric square root of a PSD matrix, for drawing correlated returns.
Mat matrix_sqrt_psd(const Mat& sigma);

}  // namespace alterego
