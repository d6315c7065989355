#pragma once

#include "alterego/glearner.hpp"
#include "alterego/types.hpp"

#include <string>
#include <vector>

namespace alterego {
namespace backtest {

/// Per-fund counterfactual results for one evaluation window, plus the
/// group-average outperformance curve.
struct BacktestReport {
  std::vector<std::string> fund_ids;
  std::vector<FundTrajectory> alter_egos;
  std::vector<Vec> outperformance;  // per fund, T+1, starts at exactly 0
  std::vector<double> final_outperformance;
  Vec group_mean;  // T+1
};

/// Rolls the policy mode forward on realized returns: u_t = recommend(pi_t,
/// x_t), x_{t+1} = diag(1+r_t)(x_t + u_t). Deterministic. x0 must be the
/// fund's actual holdings at the window start; the policy must cover at
/// least T+1 steps.
FundTrajectory counterfactual_rollout(const glearner::GaussianPolicy& policy, const Vec& x0,
                                      const Mat& realized_returns, const Vec& cashflows,
                                      const Vec& benchmark, const std::string& fund_id);

/// Per-step total-value difference 1'x_t(AE) - 1'x_t(PM). Requires matching
/// shapes and identical initial holdings (within 1e-9).
Vec outperformance(const FundTrajectory& alter_ego, const FundTrajectory& manager);

/// Aggregates per-fund rollouts against their demonstrations.
BacktestReport report(const std::vector<FundTrajectory>& alter_egos,
                      const std::vector<FundTrajectory>& managers);

}  // namespace backtest
}  // namespace alterego
