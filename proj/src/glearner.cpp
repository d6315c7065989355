#include "alterego/glearner.hpp"

#include "alterego/reward.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace alterego {
namespace glearner {

namespace {

/// Cholesky factor of a matrix required to be positive definite.
Eigen::LLT<Mat> cholesky_or_throw(const Mat& m, const char* message) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) throw std::runtime_error(message);
  return llt;
}

double log_det_from_llt(const Eigen::LLT<Mat>& llt) {
  return 2.0 * Mat(llt.matrixL()).diagonal().array().log().sum();
}

}  // namespace

QuadraticValue QuadraticValue::zero(int n) {
  return QuadraticValue{Mat::Zero(n, n), Vec::Zero(n), 0.0};
}

QuadraticQ QuadraticQ::zero(int n) {
  return QuadraticQ{Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n),
                    Vec::Zero(n),    Vec::Zero(n),    0.0};
}

void QuadraticQ::symmetrize() {
  Quu = 0.5 * (Quu + Quu.transpose()).eval();
  Qxx = 0.5 * (Qxx + Qxx.transpose()).eval();
}

void validate(const PriorPolicy& prior) {
  if (prior.mean.size() != prior.variances.size())
    throw std::invalid_argument("prior policy: mean and variances must share length");
  if (prior.variances.size() == 0 || (prior.variances.array() <= 0.0).any())
    throw std::invalid_argument("prior policy: variances must be strictly positive");
  if (!prior.mean.allFinite() || !prior.variances.allFinite())
    throw std::invalid_argument("prior policy: non-finite values");
}

void validate(const GlearnerConfig& cfg) {
  if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta))
    throw std::invalid_argument("glearner config: beta must be positive");
  if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0))
    throw std::invalid_argument("glearner config: gamma must lie in (0, 1]");
  if (cfg.max_outer_iters < 1)
    throw std::invalid_argument("glearner config: max_outer_iters must be >= 1");
}

QuadraticQ reward_coefficients(const RewardParams& params, const Vec& r_bar,
                               const Mat& sigma, double benchmark_value, double cashflow) {
  validate(params);
  const int n = static_cast<int>(r_bar.size());
  if (sigma.rows() != n || sigma.cols() != n)
    throw std::invalid_argument("reward_coefficients: dimension mismatch");
  check_covariance(sigma);

  const Vec ones = Vec::Ones(n);
  const Vec a = ones + r_bar;                       // coefficient of z in (1+r)'z
  const double growth = (1.0 - params.rho) * params.eta;
  const Vec w = growth * ones - a;                  // x-part of P - (1+rbar)'z
  const double rb = params.rho * benchmark_value;

  QuadraticQ q = QuadraticQ::zero(n);
  // Tracking term -(rb + w'x - a'u)^2 plus variance -(x+u)' sigma (x+u).
  q.Quu = -(a * a.transpose()) - sigma - params.lam * (ones * ones.transpose()) -
          params.omega * Mat::Identity(n, n);
  q.Qux = 2.0 * (a * w.transpose()) - 2.0 * sigma;
  q.Qxx = -(w * w.transpose()) - sigma;
  q.qu = 2.0 * rb * a + 2.0 * params.lam * cashflow * ones;
  q.qx = -2.0 * rb * w;
  q.q0 = -rb * rb - params.lam * cashflow * cashflow;
  q.symmetrize();
  return q;
}

QuadraticQ expected_next_value(const QuadraticValue& f_next, const Vec& r_bar,
                               const Mat& sigma) {
  const int n = static_cast<int>(r_bar.size());
  if (f_next.Pxx.rows() != n || f_next.px.size() != n || sigma.rows() != n ||
      sigma.cols() != n)
    throw std::invalid_argument("expected_next_value: dimension mismatch");

  const Vec a = Vec::Ones(n) + r_bar;
  const Mat second_moment = a * a.transpose() + sigma;  // E[(1+r)(1+r)']
  const Mat quad = f_next.Pxx.cwiseProduct(second_moment);
  const Vec lin = f_next.px.cwiseProduct(a);

  QuadraticQ q = QuadraticQ::zero(n);
  q.Quu = quad;
  q.Qxx = quad;
  q.Qux = 2.0 * quad;
  q.qu = lin;
  q.qx = lin;
  q.q0 = f_next.p0;
  q.symmetrize();
  return q;
}

QuadraticQ action_value_update(const QuadraticValue& f_next, const QuadraticQ& reward_t,
                               double gamma, const Vec& r_bar, const Mat& sigma) {
  QuadraticQ g = reward_t;
  if (gamma != 0.0) {
    const QuadraticQ next = expected_next_value(f_next, r_bar, sigma);
    g.Quu += gamma * next.Quu;
    g.Qux += gamma * next.Qux;
    g.Qxx += gamma * next.Qxx;
    g.qu += gamma * next.qu;
    g.qx += gamma * next.qx;
    g.q0 += gamma * next.q0;
  }
  g.symmetrize();
  cholesky_or_throw(Mat(-g.Quu), "degenerate action-value curvature");
  return g;
}

QuadraticValue value_update(const QuadraticQ& g, const PriorPolicy& prior, double beta) {
  validate(prior);
  const int n = g.size();
  if (prior.mean.size() != n)
    throw std::invalid_argument("value_update: prior dimension mismatch");
  if (!(beta > 0.0)) throw std::invalid_argument("value_update: beta must be positive");

  const Vec prior_precision = prior.variances.cwiseInverse();
  const Mat lambda = Mat(prior_precision.asDiagonal()) - 2.0 * beta * g.Quu;
  const auto llt = cholesky_or_throw(lambda, "beta too large for prior covariance");

  const Vec s = prior_precision.cwiseProduct(prior.mean);  // Sigma0^-1 mu0
  const Vec h0 = s + beta * g.qu;
  const Vec lam_inv_h0 = llt.solve(h0);
  const Mat lam_inv_qux = llt.solve(g.Qux);

  // The constant term is rearranged so no difference of O(1) quantities is
  // divided by beta; each piece below is O(1) as beta -> 0:
  //   (h0' L^-1 h0 - mu0' S0^-1 mu0) / (2 beta)
  //     = h0' L^-1 Quu S0 h0 + qu' S0 (h0 + s) / 2,
  //   log det(S0 L) = log det(I - 2 beta S0 Quu).
  const Vec sigma0_h0 = prior.variances.cwiseProduct(h0);
  const double quad_part = lam_inv_h0.dot(g.Quu * sigma0_h0) +
                           0.5 * g.qu.dot(prior.variances.cwiseProduct(h0 + s));
  const Mat identity_shift =
      Mat::Identity(n, n) - 2.0 * beta * Mat(prior.variances.asDiagonal()) * g.Quu;
  // det > 0 whenever Lambda is PD, so summing log-magnitudes of the LU
  // diagonal gives log det without overflow.
  const double log_det = identity_shift.partialPivLu()
                             .matrixLU()
                             .diagonal()
                             .array()
                             .abs()
                             .log()
                             .sum();

  QuadraticValue f;
  f.Pxx = g.Qxx + 0.5 * beta * g.Qux.transpose() * lam_inv_qux;
  f.Pxx = 0.5 * (f.Pxx + f.Pxx.transpose()).eval();
  f.px = g.qx + g.Qux.transpose() * lam_inv_h0;
  f.p0 = g.q0 + quad_part - log_det / (2.0 * beta);
  return f;
}

std::pair<QuadraticQ, QuadraticValue> terminal_init(const QuadraticQ& reward_terminal) {
  QuadraticQ g = reward_terminal;
  g.symmetrize();
  const auto llt = cholesky_or_throw(Mat(-g.Quu), "degenerate action-value curvature");

  // F_T(x) = G_T(x, u*) with u* = -(2 Quu)^-1 (Qux x + qu); substituting
  // gives c(x) - (Qux x + qu)' Quu^-1 (Qux x + qu) / 4.
  const Mat inv_quu_qux = -llt.solve(g.Qux);  // Quu^-1 Qux
  const Vec inv_quu_qu = -llt.solve(g.qu);    // Quu^-1 qu

  QuadraticValue f;
  f.Pxx = g.Qxx - 0.25 * g.Qux.transpose() * inv_quu_qux;
  f.Pxx = 0.5 * (f.Pxx + f.Pxx.transpose()).eval();
  f.px = g.qx - 0.5 * g.Qux.transpose() * inv_quu_qu;
  f.p0 = g.q0 - 0.25 * g.qu.dot(inv_quu_qu);
  return {std::move(g), std::move(f)};
}

GaussianPolicyStep extract_policy(const QuadraticQ& g, const PriorPolicy& prior,
                                  double beta) {
  validate(prior);
  const int n = g.size();
  const Vec prior_precision = prior.variances.cwiseInverse();
  const Mat lambda = Mat(prior_precision.asDiagonal()) - 2.0 * beta * g.Quu;
  const auto llt = cholesky_or_throw(lambda, "beta too large for prior covariance");

  GaussianPolicyStep step;
  step.cov = llt.solve(Mat::Identity(n, n));
  step.cov = 0.5 * (step.cov + step.cov.transpose()).eval();
  step.intercept = llt.solve(prior_precision.cwiseProduct(prior.mean) + beta * g.qu);
  step.gain = beta * llt.solve(g.Qux);
  return step;
}

GaussianPolicy solve(const MarketModel& market, const RewardParams& params,
                     const PriorPolicy& prior, const Vec& benchmark, const Vec& cashflow,
                     const GlearnerConfig& cfg) {
  validate(cfg);
  validate(prior);
  const int horizon = market.horizon();
  const int n = market.n_sectors();
  if (benchmark.size() != horizon + 1 || cashflow.size() != horizon + 1)
    throw std::invalid_argument("solve: benchmark/cashflow must have T+1 entries");
  if (prior.mean.size() != n) throw std::invalid_argument("solve: prior dimension mismatch");

  GaussianPolicy policy(horizon + 1);
  GaussianPolicy previous;

  for (int sweep = 0; sweep < cfg.max_outer_iters; ++sweep) {
    QuadraticValue f_next;
    for (int t = horizon; t >= 0; --t) {
      QuadraticQ g;
      try {
        const QuadraticQ reward_t = reward_coefficients(
            params, market.mean_returns.row(t).transpose(), market.covariance,
            benchmark[t], cashflow[t]);
        if (t == horizon) {
          auto [g_terminal, f_terminal] = terminal_init(reward_t);
          g = std::move(g_terminal);
          f_next = std::move(f_terminal);
        } else {
          g = action_value_update(f_next, reward_t, cfg.gamma,
                                  market.mean_returns.row(t).transpose(),
                                  market.covariance);
          f_next = value_update(g, prior, cfg.beta);
        }
        policy[t] = extract_policy(g, prior, cfg.beta);
      } catch (const std::exception& e) {
        throw std::runtime_error("solve: step t=" + std::to_string(t) + ": " + e.what());
      }
    }

    if (!previous.empty()) {
      double change = 0.0;
      for (int t = 0; t <= horizon; ++t) {
        change = std::max(change,
                          (policy[t].intercept - previous[t].intercept).cwiseAbs().maxCoeff());
        change = std::max(change, (policy[t].gain - previous[t].gain).cwiseAbs().maxCoeff());
        change = std::max(change, (policy[t].cov - previous[t].cov).cwiseAbs().maxCoeff());
      }
      if (change < cfg.outer_tol) break;
    }
    previous = policy;
  }
  return policy;
}

Vec recommend(const GaussianPolicyStep& step, const Vec& x) {
  return step.intercept + step.gain * x;
}

double kl_to_prior(const GaussianPolicyStep& step, const Vec& x, const PriorPolicy& prior) {
  const int n = static_cast<int>(prior.mean.size());
  const Vec mean = recommend(step, x);
  const Vec diff = prior.mean - mean;
  const Vec prior_precision = prior.variances.cwiseInverse();
  const auto llt = cholesky_or_throw(step.cov, "policy covariance not positive definite");

  const double trace = prior_precision.cwiseProduct(step.cov.diagonal()).sum();
  const double maha = diff.dot(prior_precision.cwiseProduct(diff));
  const double log_det_prior = prior.variances.array().log().sum();
  const double log_det_policy = log_det_from_llt(llt);
  return 0.5 * (trace + maha - n + log_det_prior - log_det_policy);
}

}  // namespace glearner
}  // namespace alterego
