#pragma once

#include "alterego/rng.hpp"
#include "alterego/types.hpp"

namespace alterego {
namespace testing {

/// Random PSD covariance with controlled scale: A A' / n scaled.
inline Mat random_covariance(int n, NormalSampler& sampler, double scale = 1.0) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = sampler();
  return scale * (a * a.transpose()) / n;
}

inline Vec random_vector(int n, NormalSampler& sampler, double scale = 1.0) {
  return scale * sampler.vector(n);
}

/// Monte Carlo estimate of the one-step reward: samples r ~ (r_bar, sigma)
/// and averages -(P - V)^2 - lam (1'u - C)^2 - omega u'u. Returns the mean
/// and the standard error of the mean.
struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

inline McEstimate mc_expected_reward(const Vec& x, const Vec& u, const RewardParams& params,
                                     const Vec& r_bar, const Mat& sigma,
                                     double benchmark_value, double cashflow, int samples,
                                     NormalSampler& sampler) {
  const Vec z = x + u;
  const Mat root = matrix_sqrt_psd(sigma);
  const double target =
      params.rho * benchmark_value + (1.0 - params.rho) * params.eta * x.sum();
  const double flow_gap = u.sum() - cashflow;
  const double deterministic =
      -params.lam * flow_gap * flow_gap - params.omega * u.squaredNorm();

  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vec r = r_bar + root * sampler.vector(static_cast<int>(x.size()));
    const double value = z.sum() + r.dot(z);
    const double reward = -(target - value) * (target - value) + deterministic;
    sum += reward;
    sum_sq += reward * reward;
  }
  McEstimate est;
  est.mean = sum / samples;
  const double variance = sum_sq / samples - est.mean * est.mean;
  est.standard_error = std::sqrt(std::max(variance, 0.0) / samples);
  return est;
}

}  // namespace testing
}  // namespace alterego
