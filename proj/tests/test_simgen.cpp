#include <doctest.h>

#include "alterego/reward.hpp"
#include "alterego/rng.hpp"
#include "alterego/simgen.hpp"
#include "alterego/trex.hpp"

#include <cmath>

using namespace alterego;

TEST_CASE("generate_market_path: zero covariance gives the deterministic drift") {
  simgen::SimConfig cfg = simgen::default_config(3, 12, 2);
  cfg.return_cov = Mat::Zero(3, 3);
  const simgen::MarketPath path = simgen::generate_market_path(cfg);
  for (int t = 0; t < cfg.horizon; ++t)
    CHECK((path.returns.row(t).transpose() - cfg.return_mean / 12.0).cwiseAbs().maxCoeff() ==
          doctest::Approx(0.0));
}

TEST_CASE("generate_market_path is deterministic under a fixed seed") {
  const simgen::SimConfig cfg = simgen::default_config(5, 18, 3);
  const simgen::MarketPath a = simgen::generate_market_path(cfg);
  const simgen::MarketPath b = simgen::generate_market_path(cfg);
  CHECK((a.returns - b.returns).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.benchmark - b.benchmark).cwiseAbs().maxCoeff() == 0.0);

  simgen::SimConfig other = cfg;
  other.seed = cfg.seed + 1;
  const simgen::MarketPath c = simgen::generate_market_path(other);
  CHECK((a.returns - c.returns).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("generate_market_path sample moments match the config") {
  simgen::SimConfig cfg = simgen::default_config(2, 20000, 2);
  cfg.seed = 404;
  const simgen::MarketPath path = simgen::generate_market_path(cfg);
  const Vec sample_mean = path.returns.colwise().mean().transpose();
  const Vec target = cfg.return_mean / 12.0;
  const Mat centered = path.returns.rowwise() - sample_mean.transpose();
  const Mat sample_cov = centered.transpose() * centered / path.returns.rows();
  const Mat target_cov = cfg.return_cov / 12.0;
  for (int s = 0; s < 2; ++s) {
    const double se = std::sqrt(target_cov(s, s) / path.returns.rows());
    CHECK(std::abs(sample_mean[s] - target[s]) <= 3.0 * se);
  }
  CHECK((sample_cov - target_cov).cwiseAbs().maxCoeff() < 0.05 * target_cov.diagonal().maxCoeff());
}

TEST_CASE("myopic trade maximizes the one-step reward") {
  NormalSampler rng(431);
  const int n = 4;
  simgen::SimConfig cfg = simgen::default_config(n, 12, 2);
  const Vec r_bar = cfg.return_mean / 12.0;
  const Mat sigma = cfg.return_cov / 12.0;
  const Vec x = Vec::Constant(n, 1.0 / n);
  const Vec best = simgen::myopic_optimal_trade(x, cfg.planted, r_bar, sigma, 1.0, 0.01);
  const double best_reward =
      expected_reward(x, best, cfg.planted, r_bar, sigma, 1.0, 0.01);
  for (int probe = 0; probe < 300; ++probe) {
    const Vec u = best + 0.1 * rng.vector(n);
    CHECK(best_reward >= expected_reward(x, u, cfg.planted, r_bar, sigma, 1.0, 0.01) - 1e-12);
  }
}

TEST_CASE("generated trajectories satisfy the transition identity exactly") {
  const simgen::SimConfig cfg = simgen::default_config(6, 24, 4);
  const simgen::MarketPath path = simgen::generate_market_path(cfg);
  const RankedDemoSet demos = simgen::generate_funds(cfg, path);
  for (const FundTrajectory& traj : demos.trajectories) {
    validate(traj);
    for (int t = 0; t < traj.horizon; ++t) {
      const Vec reconstructed =
          propagate_state(traj.holdings.row(t).transpose(), traj.trades.row(t).transpose(),
                          path.returns.row(t).transpose());
      CHECK((reconstructed - traj.holdings.row(t + 1).transpose()).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }
}

TEST_CASE("full skill and zero noise collapse the population to a tie") {
  simgen::SimConfig cfg = simgen::default_config(4, 18, 3);
  cfg.skill_levels.setConstant(1.0);
  cfg.trade_noise = 0.0;
  cfg.return_cov = Mat::Zero(4, 4);
  cfg.flow_mean_levels.setZero();  // identical flows, so the funds coincide
  const simgen::MarketPath path = simgen::generate_market_path(cfg);
  const RankedDemoSet demos = simgen::generate_funds(cfg, path);
  CHECK(demos.has_ties());
  for (int m = 1; m < demos.size(); ++m)
    CHECK((demos.trajectories[m].holdings - demos.trajectories[0].holdings)
              .cwiseAbs()
              .maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("monotone skill produces return rankings aligned with skill") {
  // Spearman between skill and realized-return rank, averaged over seeds.
  double spearman_sum = 0.0;
  const int n_seeds = 20;
  for (int seed = 0; seed < n_seeds; ++seed) {
    simgen::SimConfig cfg = simgen::default_config(11, 24, 6);
    cfg.seed = 1000 + seed;
    const simgen::MarketPath path = simgen::generate_market_path(cfg);
    const RankedDemoSet demos = simgen::generate_funds(cfg, path);
    const auto metrics = trex::ranking_metrics_from_values(cfg.skill_levels, demos.scores);
    spearman_sum += metrics.spearman;
  }
  CHECK(spearman_sum / n_seeds >= 0.8);
}

TEST_CASE("generate_funds validates the config") {
  simgen::SimConfig cfg = simgen::default_config(3, 12, 2);
  cfg.skill_levels[0] = 1.5;
  CHECK_THROWS(simgen::generate_market_path(cfg));
}
