#include "alterego/backtest.hpp"

#include "alterego/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace alterego {
namespace backtest {

FundTrajectory counterfactual_rollout(const glearner::GaussianPolicy& policy, const Vec& x0,
                                      const Mat& realized_returns, const Vec& cashflows,
                                      const Vec& benchmark, const std::string& fund_id) {
  const int horizon = static_cast<int>(realized_returns.rows());
  const int n = static_cast<int>(x0.size());
  if (realized_returns.cols() != n)
    throw std::invalid_argument("counterfactual_rollout: returns must be T x N");
  if (static_cast<int>(policy.size()) < horizon + 1)
    throw std::invalid_argument("counterfactual_rollout: policy horizon too short");
  if (cashflows.size() != horizon + 1 || benchmark.size() != horizon + 1)
    throw std::invalid_argument("counterfactual_rollout: cashflow/benchmark must have T+1 entries");

  FundTrajectory traj;
  traj.fund_id = fund_id;
  traj.n_sectors = n;
  traj.horizon = horizon;
  traj.holdings.resize(horizon + 1, n);
  traj.trades.resize(horizon + 1, n);
  traj.benchmark = benchmark;
  traj.cashflow = cashflows;
  traj.normalized = std::abs(x0.sum() - 1.0) <= 1e-9 && std::abs(benchmark[0] - 1.0) <= 1e-9;

  Vec x = x0;
  for (int t = 0; t <= horizon; ++t) {
    traj.holdings.row(t) = x.transpose();
    const Vec u = glearner::recommend(policy[t], x);
    traj.trades.row(t) = u.transpose();
    if (t < horizon) x = propagate_state(x, u, realized_returns.row(t).transpose());
  }
  return traj;
}

Vec outperformance(const FundTrajectory& alter_ego, const FundTrajectory& manager) {
  if (alter_ego.n_sectors != manager.n_sectors || alter_ego.horizon != manager.horizon)
    throw std::invalid_argument("outperformance: trajectories must share N and T");
  if ((alter_ego.holdings.row(0) - manager.holdings.row(0)).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("outperformance: initial holdings differ");

  Vec out(alter_ego.horizon + 1);
  for (int t = 0; t <= alter_ego.horizon; ++t)
    out[t] = alter_ego.holdings.row(t).sum() - manager.holdings.row(t).sum();
  return out;
}

BacktestReport report(const std::vector<FundTrajectory>& alter_egos,
                      const std::vector<FundTrajectory>& managers) {
  if (alter_egos.size() != managers.size() || alter_egos.empty())
    throw std::invalid_argument("report: need one alter ego per manager");

  BacktestReport rep;
  rep.group_mean = Vec::Zero(alter_egos.front().horizon + 1);
  for (std::size_t m = 0; m < alter_egos.size(); ++m) {
    rep.fund_ids.push_back(managers[m].fund_id);
    rep.alter_egos.push_back(alter_egos[m]);
    Vec curve = outperformance(alter_egos[m], managers[m]);
    rep.group_mean += curve;
    rep.final_outperformance.push_back(curve[curve.size() - 1]);
    rep.outperformance.push_back(std::move(curve));
  }
  rep.group_mean /= static_cast<double>(alter_egos.size());
  return rep;
}

}  // namespace backtest
}  // namespace alterego
