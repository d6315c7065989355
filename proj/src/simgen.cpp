#include "alterego/simgen.hpp"

#include "alterego/glearner.hpp"
#include "alterego/reward.hpp"
#include "alterego/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>
#include <string>

namespace alterego {
namespace simgen {

SimConfig default_config(int n_sectors, int horizon, int n_funds) {
  SimConfig cfg;
  cfg.n_sectors = n_sectors;
  cfg.horizon = horizon;
  cfg.n_funds = n_funds;
  cfg.planted = RewardParams{0.9, 1.0, 40.0, 0.08};
  cfg.trade_noise = 0.004;
  cfg.cashflow_scale = 0.004;

  cfg.skill_levels.resize(n_funds);
  cfg.flow_mean_levels.resize(n_funds);
  for (int m = 0; m < n_funds; ++m) {
    const double frac = n_funds == 1 ? 1.0 : static_cast<double>(m) / (n_funds - 1);
    cfg.skill_levels[m] = n_funds == 1 ? 0.9 : 0.05 + 0.9 * frac;
    // Money chases past size, not skill: flows run mildly against skill.
    cfg.flow_mean_levels[m] = 0.002 * (1.0 - 2.0 * frac);
  }
  // One hot mid-skill fund in heavy net subscription next to a better fund
  // in redemption, so fund size and fund performance visibly decouple.
  if (n_funds >= 4) {
    cfg.flow_mean_levels[n_funds / 2] += 0.006;
    cfg.flow_mean_levels[n_funds / 2 + 1] -= 0.006;
  }

  // A growth-led bull market: annualized drifts climb from -6% to +45%
  // with volatility rising alongside, one shared factor, and market caps
  // concentrated in the growth sectors. The cap-weighted index therefore
  // outruns an equal-weight portfolio and tracking it takes real tilting.
  cfg.return_mean.resize(n_sectors);
  cfg.market_weights.resize(n_sectors);
  Vec vols(n_sectors);
  for (int s = 0; s < n_sectors; ++s) {
    const double frac = n_sectors == 1 ? 0.5 : static_cast<double>(s) / (n_sectors - 1);
    cfg.return_mean[s] = -0.06 + 0.51 * frac;
    cfg.market_weights[s] = std::pow(1.0 + s, 5.0);
    vols[s] = 0.04 + 0.10 * frac;
  }
  cfg.market_weights /= cfg.market_weights.sum();
  const double correlation = 0.5;
  cfg.return_cov = correlation * (vols * vols.transpose());
  cfg.return_cov.diagonal() = vols.cwiseProduct(vols);
  return cfg;
}

void validate(const SimConfig& cfg) {
  if (cfg.n_sectors < 1 || cfg.horizon < 1 || cfg.n_funds < 1)
    throw std::invalid_argument("sim config: dimensions must be positive");
  if (cfg.skill_levels.size() != cfg.n_funds)
    throw std::invalid_argument("sim config: one skill level per fund required");
  if ((cfg.skill_levels.array() < 0.0).any() || (cfg.skill_levels.array() > 1.0).any())
    throw std::invalid_argument("sim config: skills must lie in [0, 1]");
  if (cfg.trade_noise < 0.0 || cfg.cashflow_scale < 0.0)
    throw std::invalid_argument("sim config: scales must be non-negative");
  if (cfg.return_mean.size() != cfg.n_sectors)
    throw std::invalid_argument("sim config: return_mean must have one entry per sector");
  if (cfg.return_cov.rows() != cfg.n_sectors || cfg.return_cov.cols() != cfg.n_sectors)
    throw std::invalid_argument("sim config: return_cov must be N x N");
  if (cfg.market_weights.size() != cfg.n_sectors ||
      (cfg.market_weights.array() <= 0.0).any())
    throw std::invalid_argument("sim config: market_weights must be positive per sector");
  if (cfg.flow_mean_levels.size() != cfg.n_funds)
    throw std::invalid_argument("sim config: one mean flow level per fund required");
  check_covariance(cfg.return_cov);
  validate(cfg.planted);
}

MarketPath generate_market_path(const SimConfig& cfg) {
  validate(cfg);
  NormalSampler sampler(cfg.seed);
  const Vec monthly_mean = cfg.return_mean / 12.0;
  const Mat root = matrix_sqrt_psd(cfg.return_cov / 12.0);

  MarketPath path;
  path.returns.resize(cfg.horizon, cfg.n_sectors);
  path.benchmark.resize(cfg.horizon + 1);
  path.benchmark[0] = 1.0;
  // The index is a buy-and-hold market-cap portfolio, so its weights drift
  // with realized returns instead of rebalancing every month.
  Vec weights = cfg.market_weights / cfg.market_weights.sum();
  for (int t = 0; t < cfg.horizon; ++t) {
    path.returns.row(t) = (monthly_mean + root * sampler.vector(cfg.n_sectors)).transpose();
    const double index_return = weights.dot(path.returns.row(t).transpose());
    path.benchmark[t + 1] = path.benchmark[t] * (1.0 + index_return);
    weights = weights.cwiseProduct(Vec::Ones(cfg.n_sectors) + path.returns.row(t).transpose()) /
              (1.0 + index_return);
  }
  return path;
}

Vec myopic_optimal_trade(const Vec& x, const RewardParams& params, const Vec& r_bar,
                         const Mat& sigma, double benchmark_value, double cashflow) {
  const glearner::QuadraticQ coeffs =
      glearner::reward_coefficients(params, r_bar, sigma, benchmark_value, cashflow);
  Eigen::LLT<Mat> llt(Mat(-coeffs.Quu));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("myopic_optimal_trade: degenerate action-value curvature");
  return 0.5 * llt.solve(coeffs.Qux * x + coeffs.qu);
}

RankedDemoSet generate_funds(const SimConfig& cfg, const MarketPath& path) {
  validate(cfg);
  if (path.returns.rows() != cfg.horizon || path.returns.cols() != cfg.n_sectors ||
      path.benchmark.size() != cfg.horizon + 1)
    throw std::invalid_argument("generate_funds: market path does not match config");

  const int n = cfg.n_sectors;
  const Vec monthly_mean = cfg.return_mean / 12.0;
  const Mat monthly_cov = cfg.return_cov / 12.0;

  // One flow-noise path for the whole group, drawn from the group seed;
  // funds differ through their mean flow level only.
  NormalSampler group_sampler(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  Vec flow_noise(cfg.horizon + 1);
  for (int t = 0; t <= cfg.horizon; ++t)
    flow_noise[t] = cfg.cashflow_scale * group_sampler();

  std::vector<FundTrajectory> trajectories;
  trajectories.reserve(cfg.n_funds);
  for (int m = 0; m < cfg.n_funds; ++m) {
    NormalSampler sampler(cfg.seed + 0x100000001b3ULL * (m + 1));
    const double skill = cfg.skill_levels[m];
    const Vec flows = Vec::Constant(cfg.horizon + 1, cfg.flow_mean_levels[m]) + flow_noise;

    FundTrajectory traj;
    traj.fund_id = "F" + std::to_string(m + 1);
    traj.n_sectors = n;
    traj.horizon = cfg.horizon;
    traj.holdings.resize(cfg.horizon + 1, n);
    traj.trades.resize(cfg.horizon + 1, n);
    traj.benchmark = path.benchmark;
    traj.cashflow = flows;
    traj.normalized = true;

    Vec x = Vec::Constant(n, 1.0 / n);
    for (int t = 0; t <= cfg.horizon; ++t) {
      traj.holdings.row(t) = x.transpose();
      const Vec optimal = myopic_optimal_trade(x, cfg.planted, monthly_mean, monthly_cov,
                                               path.benchmark[t], flows[t]);
      // Passive anchor: invest the month's net flow proportionally.
      const Vec drift = x * (flows[t] / x.sum());
      Vec u = skill * optimal + (1.0 - skill) * drift;
      if (cfg.trade_noise > 0.0) u += cfg.trade_noise * sampler.vector(n);
      traj.trades.row(t) = u.transpose();
      if (t < cfg.horizon)
        x = propagate_state(x, u, path.returns.row(t).transpose());
    }
    trajectories.push_back(std::move(traj));
  }

  return make_ranked_demos(std::move(trajectories),
                           [](const FundTrajectory& traj) { return realized_total_return(traj); });
}

}  // namespace simgen
}  // namespace alterego
