#pragma once

#include "alterego/types.hpp"

#include <cstdint>

namespace alterego {
namespace simgen {

/// Configuration for the planted-parameter synthetic fund population.
/// Skill interpolates each manager's trade between the myopic optimum of
/// the planted reward and a flow-spreading drift action, plus Gaussian
/// noise. return_mean and return_cov are annualized; months divide by 12.
struct SimConfig {
  int n_sectors = 11;
  int horizon = 24;
  int n_funds = 6;
  RewardParams planted{0.9, 1.1, 0.1, 0.1};
  Vec skill_levels;      // per fund, in [0, 1]
  double trade_noise = 0.005;
  Vec return_mean;       // annualized drift per sector
  Mat return_cov;        // annualized covariance
  Vec market_weights;    // sector market caps; the index holds these at t=0
  Vec flow_mean_levels;  // per-fund mean monthly net flow (fraction of NAV)
  double cashflow_scale = 0.004;
  std::uint64_t seed = 42;
};

/// Fills skills (linear 0.1..0.9), a heterogeneous sector drift ladder, a
/// one-factor covariance and size-skewed market weights (large sectors carry
/// the higher drifts, so the cap-weighted index outruns an equal-weight
/// portfolio and benchmark tracking takes actual tilting).
SimConfig default_config(int n_sectors = 11, int horizon = 24, int n_funds = 6);

void validate(const SimConfig& cfg);

struct MarketPath {
  Mat returns;    // T x N realized monthly sector returns
  Vec benchmark;  // T+1 equal-weight index values, starting at 1
};

/// Multivariate Gaussian monthly returns with mean return_mean/12 and
/// covariance return_cov/12; deterministic under the config seed.
MarketPath generate_market_path(const SimConfig& cfg);

/// Simulates the manager population on the given path and returns the
/// demonstrations ranked by realized total return. Trajectories come out
/// normalized (unit initial NAV) and satisfy the transition identity
/// exactly. All funds share one drawn cashflow path so that a noise-free
///, full-skill population is exactly degenerate.
RankedDemoSet generate_funds(const SimConfig& cfg, const MarketPath& path);

/// Myopic optimal trade under the reward: solves dR/du = 0 at state x.
Vec myopic_optimal_trade(const Vec& x, const RewardParams& params, const Vec& r_bar,
                         const Mat& sigma, double benchmark_value, double cashflow);

}  // namespace simgen
}  // namespace alterego
