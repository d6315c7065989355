#pragma once

#include "alterego/types.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <utility>
#include <vector>

namespace alterego {
namespace trex {

struct TrexConfig {
  int max_iters = 200;
  double learning_rate = 0.05;
  double reward_scale = 0.0;  // temperature on cumulative rewards; <= 0 means 1/T
  RewardParams init_params{0.5, 1.0, 0.1, 0.1};
  double convergence_tol = 1e-6;  // on loss change
  std::uint64_t seed = 0;
};

void validate(const TrexConfig& cfg);

struct FitResult {
  RewardParams params;
  std::vector<double> loss_history;
  std::vector<RewardParams> param_history;
  int iterations = 0;
};

struct RankingMetrics {
  double accuracy = 0.0;
  double pearson = 0.0;
  double spearman = 0.0;
};

/// Unconstrained coordinates for the four reward parameters:
/// rho = logistic(a), eta = exp(b), lam = softplus(c), omega = softplus(d).
using ReparamCoords = Eigen::Vector4d;

ReparamCoords to_coords(const RewardParams& params);
RewardParams to_params(const ReparamCoords& coords);

/// Sum of the per-step expected rewards over t = 0..T using the market's
/// mean-return row t. Trajectory and market must share N and T.
double cumulative_reward(const FundTrajectory& traj, const RewardParams& params,
                         const MarketModel& market);

/// Mean over strictly ranked ordered pairs (lower i, higher j) of
/// -log[ e^{s_j} / (e^{s_i} + e^{s_j}) ] with s_k = scale * cumulative
/// reward of trajectory k, evaluated via softplus for stability. Pairs whose
/// scores differ by less than 1e-12 are dropped; at least one strict pair
/// is required.
double pairwise_loss(const RankedDemoSet& demos, const RewardParams& params,
                     const MarketModel& market, double scale);

/// Loss and its analytic gradient in the reparameterized coordinates.
std::pair<double, ReparamCoords> pairwise_loss_gradient(const RankedDemoSet& demos,
                                                        const MarketModel& market,
                                                        double scale,
                                                        const ReparamCoords& coords);

/// Gradient descent on the reparameterized coordinates with
/// halve-on-loss-increase step control. The recorded loss history is
/// strictly decreasing; final parameters satisfy the RewardParams bounds by
/// construction.
FitResult fit_reward(const RankedDemoSet& demos, const MarketModel& market,
                     const TrexConfig& cfg);

/// Pair accuracy plus Pearson/Spearman correlation between the ranking
/// scores and the cumulative learned rewards.
RankingMetrics ranking_metrics(const RankedDemoSet& demos, const RewardParams& params,
                               const MarketModel& market);

/// Same metrics from precomputed per-trajectory values; the brute-force
/// oracle used by tests goes through this entry point too.
RankingMetrics ranking_metrics_from_values(const Vec& scores, const Vec& values);

}  // namespace trex
}  // namespace alterego
