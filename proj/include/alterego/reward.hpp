#pragma once

#include "alterego/types.hpp"

namespace alterego {

/// Target portfolio value P_t = rho * B_t + (1 - rho) * eta * 1'x.
double target_value(const Vec& x, double benchmark_value, const RewardParams& params);

/// One-step reward with the tracking expectation taken in closed form:
///
///   R = -[(P - (1+rbar)'z)^2 + z' Sigma z] - lam (1'u - C)^2 - omega u'u,
///   z = x + u.
///
/// The bracket equals E[(P - V)^2] for V = (1+r)'z with r ~ (rbar, Sigma).
/// Always <= 0. Throws on dimension mismatch or a covariance with an
/// eigenvalue below -1e-8.
double expected_reward(const Vec& x, const Vec& u, const RewardParams& params,
                       const Vec& r_bar, const Mat& sigma, double benchmark_value,
                       double cashflow);

/// Same evaluation without re-validating sigma; callers must have checked it.
double expected_reward_unchecked(const Vec& x, const Vec& u, const RewardParams& params,
                                 const Vec& r_bar, const Mat& sigma,
                                 double benchmark_value, double cashflow);

/// x_{t+1} = diag(1 + r) (x + u), elementwise.
Vec propagate_state(const Vec& x, const Vec& u, const Vec& realized_returns);

/// Flow-adjusted total return over the trajectory:
/// (1'x_T - sum_{t<T} C_t - 1'x_0) / 1'x_0. Requires a normalized
/// trajectory with positive initial value.
double realized_total_return(const FundTrajectory& traj);

}  // namespace alterego
