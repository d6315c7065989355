#include <doctest.h>

#include "alterego/reward.hpp"
#include "alterego/rng.hpp"
#include "test_helpers.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace alterego;

namespace {

FundTrajectory flat_trajectory(int n, int horizon) {
  FundTrajectory traj;
  traj.fund_id = "T";
  traj.n_sectors = n;
  traj.horizon = horizon;
  traj.holdings = Mat::Constant(horizon + 1, n, 1.0 / n);
  traj.trades = Mat::Zero(horizon + 1, n);
  traj.benchmark = Vec::Ones(horizon + 1);
  traj.cashflow = Vec::Zero(horizon + 1);
  traj.normalized = true;
  return traj;
}

}  // namespace

TEST_CASE("target_value trivial cases") {
  CHECK(target_value(Vec::Ones(1), 2.0, RewardParams{1.0, 5.0, 0.0, 0.0}) == doctest::Approx(2.0));
  CHECK(target_value(Vec::Ones(1), 2.0, RewardParams{0.0, 1.5, 0.0, 0.0}) == doctest::Approx(1.5));
  Vec x(2);
  x << 0.6, 0.4;
  CHECK(target_value(x, 1.0, RewardParams{0.5, 1.2, 0.0, 0.0}) == doctest::Approx(1.1));
}

TEST_CASE("expected_reward trivial cases") {
  // Perfect tracking, no trade, no noise.
  CHECK(expected_reward(Vec::Ones(1), Vec::Zero(1), RewardParams{1.0, 2.0, 3.0, 4.0},
                        Vec::Zero(1), Mat::Zero(1, 1), 1.0, 0.0) == doctest::Approx(0.0));
  // Tracking term vanishes (V = 2 = P), only -omega u'u remains.
  CHECK(expected_reward(Vec::Ones(1), Vec::Ones(1), RewardParams{1.0, 1.0, 0.0, 1.0},
                        Vec::Zero(1), Mat::Zero(1, 1), 2.0, 0.0) == doctest::Approx(-1.0));
}

TEST_CASE("expected_reward validates inputs") {
  CHECK_THROWS(expected_reward(Vec::Ones(2), Vec::Zero(1), RewardParams{}, Vec::Zero(2),
                               Mat::Zero(2, 2), 1.0, 0.0));
  Mat negative(1, 1);
  negative << -1.0;
  CHECK_THROWS(expected_reward(Vec::Ones(1), Vec::Zero(1), RewardParams{}, Vec::Zero(1),
                               negative, 1.0, 0.0));
}

TEST_CASE("expected_reward matches the Monte Carlo oracle") {
  NormalSampler rng(20240601);
  const int samples = 200000;
  for (int instance = 0; instance < 20; ++instance) {
    const int n = 1 + static_cast<int>(rng.uniform() * 5.0);
    const Vec x = testing::random_vector(n, rng, 0.7);
    const Vec u = testing::random_vector(n, rng, 0.3);
    const Vec r_bar = testing::random_vector(n, rng, 0.05);
    const Mat sigma = testing::random_covariance(n, rng, 0.02);
    const RewardParams params{rng.uniform(), 0.5 + rng.uniform(), rng.uniform(),
                              rng.uniform()};
    const double benchmark_value = 0.5 + rng.uniform();
    const double cashflow = 0.2 * (rng.uniform() - 0.5);

    const double closed =
        expected_reward(x, u, params, r_bar, sigma, benchmark_value, cashflow);
    const auto mc = testing::mc_expected_reward(x, u, params, r_bar, sigma, benchmark_value,
                                                cashflow, samples, rng);
    CHECK(std::abs(closed - mc.mean) <= 3.0 * mc.standard_error + 1e-12);
  }
}

TEST_CASE("expected_reward is invariant under sector permutation") {
  NormalSampler rng(7);
  std::mt19937_64 shuffler(11);
  for (int instance = 0; instance < 10; ++instance) {
    const int n = 4;
    const Vec x = testing::random_vector(n, rng);
    const Vec u = testing::random_vector(n, rng, 0.4);
    const Vec r_bar = testing::random_vector(n, rng, 0.1);
    const Mat sigma = testing::random_covariance(n, rng, 0.05);
    const RewardParams params{0.3, 1.1, 0.2, 0.4};

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), shuffler);
    Vec px(n), pu(n), pr(n);
    Mat psigma(n, n);
    for (int i = 0; i < n; ++i) {
      px[i] = x[perm[i]];
      pu[i] = u[perm[i]];
      pr[i] = r_bar[perm[i]];
      for (int j = 0; j < n; ++j) psigma(i, j) = sigma(perm[i], perm[j]);
    }
    const double base = expected_reward(x, u, params, r_bar, sigma, 1.2, 0.1);
    const double permuted = expected_reward(px, pu, params, pr, psigma, 1.2, 0.1);
    CHECK(base == doctest::Approx(permuted).epsilon(1e-12));
  }
}

TEST_CASE("expected_reward is never positive") {
  NormalSampler rng(99);
  for (int instance = 0; instance < 50; ++instance) {
    const int n = 1 + static_cast<int>(rng.uniform() * 4.0);
    const double value = expected_reward(
        testing::random_vector(n, rng), testing::random_vector(n, rng, 0.5),
        RewardParams{rng.uniform(), 0.5 + rng.uniform(), rng.uniform(), rng.uniform()},
        testing::random_vector(n, rng, 0.1), testing::random_covariance(n, rng, 0.1),
        rng.uniform() * 2.0, rng.uniform() - 0.5);
    CHECK(value <= 1e-12);
  }
}

TEST_CASE("propagate_state") {
  Vec x(2), u(2), r(2);
  x << 1.0, 1.0;
  u << 0.0, 0.0;
  r << 0.0, 0.0;
  CHECK((propagate_state(x, u, r) - x).norm() == doctest::Approx(0.0));

  x << 1.0, 0.0;
  u << 0.0, 1.0;
  r << 0.1, -0.5;
  const Vec next = propagate_state(x, u, r);
  CHECK(next[0] == doctest::Approx(1.1));
  CHECK(next[1] == doctest::Approx(0.5));

  Vec x1(1), u1(1), r1(1);
  x1 << 2.0;
  u1 << -1.0;
  r1 << 1.0;
  CHECK(propagate_state(x1, u1, r1)[0] == doctest::Approx(2.0));

  CHECK_THROWS(propagate_state(Vec::Ones(2), Vec::Ones(3), Vec::Ones(2)));
}

TEST_CASE("propagate_state with zero returns is x + u") {
  NormalSampler rng(5);
  for (int instance = 0; instance < 20; ++instance) {
    const int n = 1 + static_cast<int>(rng.uniform() * 6.0);
    const Vec x = testing::random_vector(n, rng);
    const Vec u = testing::random_vector(n, rng);
    CHECK((propagate_state(x, u, Vec::Zero(n)) - (x + u)).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("realized_total_return") {
  FundTrajectory traj = flat_trajectory(3, 4);
  CHECK(realized_total_return(traj) == doctest::Approx(0.0));

  // Growth to 1.3 with zero flows.
  traj.holdings.row(4).setConstant(1.3 / 3.0);
  CHECK(realized_total_return(traj) == doctest::Approx(0.3));

  // The same growth with 0.1 of it explained by inflows before T.
  traj.cashflow[1] = 0.04;
  traj.cashflow[2] = 0.06;
  CHECK(realized_total_return(traj) == doctest::Approx(0.2));

  // Flows at t = T never reach x_T, so they do not change the score.
  traj.cashflow[4] = 123.0;
  CHECK(realized_total_return(traj) == doctest::Approx(0.2));

  FundTrajectory raw = flat_trajectory(3, 4);
  raw.normalized = false;
  raw.holdings *= 100.0;
  raw.benchmark *= 100.0;
  CHECK_THROWS(realized_total_return(raw));
}

TEST_CASE("ranked demo set ordering and validation") {
  std::vector<FundTrajectory> funds;
  for (int m = 0; m < 3; ++m) {
    FundTrajectory traj = flat_trajectory(2, 3);
    traj.fund_id = "F" + std::to_string(m);
    traj.holdings.row(3).setConstant((1.0 + 0.1 * (2 - m)) / 2.0);
    funds.push_back(traj);
  }
  const RankedDemoSet demos =
      make_ranked_demos(funds, [](const FundTrajectory& t) { return realized_total_return(t); });
  CHECK(demos.order[0] == 2);  // lowest growth first
  CHECK(demos.order[2] == 0);
  CHECK_FALSE(demos.has_ties());

  RankedDemoSet broken = demos;
  broken.order = {0, 0, 1};
  CHECK_THROWS(validate(broken));
}
