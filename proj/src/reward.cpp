#include "alterego/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace alterego {

namespace {

void require_dims(const Vec& x, const Vec& u, const Vec& r_bar, const Mat& sigma) {
  const auto n = x.size();
  if (u.size() != n || r_bar.size() != n || sigma.rows() != n || sigma.cols() != n)
    throw std::invalid_argument("expected_reward: dimension mismatch");
}

}  // namespace

double target_value(const Vec& x, double benchmark_value, const RewardParams& params) {
  return params.rho * benchmark_value + (1.0 - params.rho) * params.eta * x.sum();
}

double expected_reward_unchecked(const Vec& x, const Vec& u, const RewardParams& params,
                                 const Vec& r_bar, const Mat& sigma,
                                 double benchmark_value, double cashflow) {
  const Vec z = x + u;
  const double target = target_value(x, benchmark_value, params);
  const double mean_value = z.sum() + r_bar.dot(z);  // (1 + rbar)'z
  const double tracking = target - mean_value;
  const double variance = z.dot(sigma * z);
  const double flow_gap = u.sum() - cashflow;
  return -(tracking * tracking + variance) - params.lam * flow_gap * flow_gap -
         params.omega * u.squaredNorm();
}

double expected_reward(const Vec& x, const Vec& u, const RewardParams& params,
                       const Vec& r_bar, const Mat& sigma, double benchmark_value,
                       double cashflow) {
  require_dims(x, u, r_bar, sigma);
  check_covariance(sigma);
  return expected_reward_unchecked(x, u, params, r_bar, sigma, benchmark_value, cashflow);
}

Vec propagate_state(const Vec& x, const Vec& u, const Vec& realized_returns) {
  if (u.size() != x.size() || realized_returns.size() != x.size())
    throw std::invalid_argument("propagate_state: dimension mismatch");
  return (Vec::Ones(x.size()) + realized_returns).cwiseProduct(x + u);
}

double realized_total_return(const FundTrajectory& traj) {
  validate(traj);
  if (!traj.normalized)
    throw std::invalid_argument("realized_total_return: trajectory must be normalized first");
  const double initial = traj.holdings.row(0).sum();
  if (initial <= 0.0)
    throw std::invalid_argument("realized_total_return: initial value must be positive");
  const double final_value = traj.holdings.row(traj.horizon).sum();
  // Flows C_T pair with the final trade u_T, which never enters x_T;
  // only t < T flows are netted out of the measured growth.
  double net_flows = 0.0;
  for (int t = 0; t < traj.horizon; ++t) net_flows += traj.cashflow[t];
  return (final_value - net_flows - initial) / initial;
}

}  // namespace alterego
