#pragma once

#include "alterego/types.hpp"

#include <vector>

namespace alterego {
namespace glearner {

/// F(x) = x'Pxx x + px'x + p0.
struct QuadraticValue {
  Mat Pxx;
  Vec px;
  double p0 = 0.0;

  static QuadraticValue zero(int n);
  double operator()(const Vec& x) const { return x.dot(Pxx * x) + px.dot(x) + p0; }
};

/// G(x,u) = u'Quu u + u'Qux x + x'Qxx x + qu'u + qx'x + q0.
/// Quu and Qxx are kept symmetric; negative definiteness of Quu is required
/// only where a maximizing action is extracted (terminal_init,
/// action_value_update) and is checked there.
struct QuadraticQ {
  Mat Quu;
  Mat Qux;
  Mat Qxx;
  Vec qu;
  Vec qx;
  double q0 = 0.0;

  static QuadraticQ zero(int n);
  int size() const { return static_cast<int>(Quu.rows()); }
  double operator()(const Vec& x, const Vec& u) const {
    return u.dot(Quu * u) + u.dot(Qux * x) + x.dot(Qxx * x) + qu.dot(u) + qx.dot(x) + q0;
  }
  /// (M + M')/2 on Quu and Qxx, applied after every update to suppress drift.
  void symmetrize();
};

/// One policy step: pi_t(u|x) = Normal(intercept + gain * x, cov).
struct GaussianPolicyStep {
  Vec intercept;
  Mat gain;
  Mat cov;
};

using GaussianPolicy = std::vector<GaussianPolicyStep>;

/// State-independent Gaussian prior over trades with diagonal covariance.
struct PriorPolicy {
  Vec mean;
  Vec variances;  // diagonal of the covariance, strictly positive

  Mat covariance() const { return variances.asDiagonal(); }
};

void validate(const PriorPolicy& prior);

struct GlearnerConfig {
  double beta = 1.0;        // KL temperature, > 0
  double gamma = 1.0;       // discount, in (0, 1]
  int max_outer_iters = 1;  // one sweep is exact with a fixed prior
  double outer_tol = 1e-8;  // max policy-parameter change between sweeps
};

void validate(const GlearnerConfig& cfg);

/// Exact quadratic coefficients of the one-step expected reward in (x, u).
/// Evaluating the result at any (x, u) reproduces expected_reward.
QuadraticQ reward_coefficients(const RewardParams& params, const Vec& r_bar,
                               const Mat& sigma, double benchmark_value, double cashflow);

/// E[F_next(diag(1+r) z)] as a quadratic form in (x, u) with z = x + u and
/// r ~ (r_bar, sigma). The quadratic block is Pxx elementwise-multiplied by
/// (1+rbar)(1+rbar)' + sigma; the linear part is px elementwise-scaled by
/// 1+rbar.
QuadraticQ expected_next_value(const QuadraticValue& f_next, const Vec& r_bar,
                               const Mat& sigma);

/// G_t = reward_t + gamma * E[F_{t+1}(next state)]. Throws
/// "degenerate action-value curvature" if the resulting Quu is not
/// negative definite.
QuadraticQ action_value_update(const QuadraticValue& f_next, const QuadraticQ& reward_t,
                               double gamma, const Vec& r_bar, const Mat& sigma);

/// Soft maximum over actions under the prior:
/// F_t(x) = (1/beta) log E_{u~prior} exp(beta G_t(x, u)), evaluated via the
/// Gaussian integral. Requires the precision Sigma0^-1 - 2 beta Quu to be
/// positive definite; otherwise throws "beta too large for prior covariance".
QuadraticValue value_update(const QuadraticQ& g, const PriorPolicy& prior, double beta);

/// Terminal step: G_T = reward_T and F_T(x) = max_u G_T(x, u) via the
/// first-order condition u* = -(2 Quu)^-1 (Qux x + qu).
std::pair<QuadraticQ, QuadraticValue> terminal_init(const QuadraticQ& reward_terminal);

/// Gaussian policy proportional to prior(u) * exp(beta G(x,u)): precision
/// Lambda = Sigma0^-1 - 2 beta Quu, intercept Lambda^-1 (Sigma0^-1 mu0 +
/// beta qu), gain beta Lambda^-1 Qux.
GaussianPolicyStep extract_policy(const QuadraticQ& g, const PriorPolicy& prior,
                                  double beta);

/// Backward sweep over t = T..0 producing one policy step per period.
/// reward_t uses mean_returns row t together with benchmark[t] and
/// cashflow[t]; the same row drives the t -> t+1 transition moments.
GaussianPolicy solve(const MarketModel& market, const RewardParams& params,
                     const PriorPolicy& prior, const Vec& benchmark, const Vec& cashflow,
                     const GlearnerConfig& cfg);

/// Mode (= mean) of the policy at state x.
Vec recommend(const GaussianPolicyStep& step, const Vec& x);

/// KL(Normal(mean1, cov1) || prior) in nats, used for beta calibration and
/// the beta -> 0 diagnostics.
double kl_to_prior(const GaussianPolicyStep& step, const Vec& x, const PriorPolicy& prior);

}  // namespace glearner
}  // namespace alterego
