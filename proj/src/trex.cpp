#include "alterego/trex.hpp"

#include "alterego/reward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace alterego {
namespace trex {

namespace {

constexpr double kTieTol = 1e-12;

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

double softplus(double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); }

double softplus_inverse(double v) { return std::log(std::expm1(v)); }

struct PairIndex {
  int lower;
  int higher;
};

std::vector<PairIndex> strict_pairs(const RankedDemoSet& demos) {
  if (demos.size() < 2)
    throw std::invalid_argument("pairwise loss: at least 2 trajectories required");
  std::vector<PairIndex> pairs;
  for (int i = 0; i < demos.size(); ++i) {
    for (int j = i + 1; j < demos.size(); ++j) {
      const double gap = demos.scores[j] - demos.scores[i];
      if (std::abs(gap) < kTieTol) continue;  // tied scores carry no preference
      pairs.push_back(gap > 0.0 ? PairIndex{i, j} : PairIndex{j, i});
    }
  }
  if (pairs.empty())
    throw std::invalid_argument("pairwise loss: all scores tied, no ranked pairs");
  return pairs;
}

void check_market(const RankedDemoSet& demos, const MarketModel& market) {
  const FundTrajectory& traj = demos.trajectories.front();
  if (market.n_sectors() != traj.n_sectors || market.horizon() != traj.horizon)
    throw std::invalid_argument("trex: market model and trajectories must share N and T");
}

/// Cumulative reward and its gradient in (rho, eta, lam, omega).
void accumulate_reward(const FundTrajectory& traj, const RewardParams& params,
                       const MarketModel& market, double* total, Eigen::Vector4d* grad) {
  *total = 0.0;
  if (grad) grad->setZero();
  for (int t = 0; t <= traj.horizon; ++t) {
    const Vec x = traj.holdings.row(t).transpose();
    const Vec u = traj.trades.row(t).transpose();
    const Vec r_bar = market.mean_returns.row(t).transpose();
    const Vec z = x + u;
    const double holdings_sum = x.sum();
    const double mean_value = z.sum() + r_bar.dot(z);
    const double tracking =
        params.rho * traj.benchmark[t] + (1.0 - params.rho) * params.eta * holdings_sum -
        mean_value;
    const double variance = z.dot(market.covariance * z);
    const double flow_gap = u.sum() - traj.cashflow[t];
    const double turnover = u.squaredNorm();
    *total += -(tracking * tracking + variance) - params.lam * flow_gap * flow_gap -
              params.omega * turnover;
    if (grad) {
      (*grad)[0] += -2.0 * tracking * (traj.benchmark[t] - params.eta * holdings_sum);
      (*grad)[1] += -2.0 * tracking * (1.0 - params.rho) * holdings_sum;
      (*grad)[2] += -flow_gap * flow_gap;
      (*grad)[3] += -turnover;
    }
  }
}

double resolve_scale(double scale, int horizon) {
  if (scale > 0.0) return scale;
  return 1.0 / std::max(horizon, 1);
}

}  // namespace

void validate(const TrexConfig& cfg) {
  if (!(cfg.learning_rate > 0.0))
    throw std::invalid_argument("trex config: learning_rate must be positive");
  if (cfg.max_iters < 1) throw std::invalid_argument("trex config: max_iters must be >= 1");
  if (!(cfg.convergence_tol >= 0.0))
    throw std::invalid_argument("trex config: convergence_tol must be non-negative");
  validate(cfg.init_params);
}

ReparamCoords to_coords(const RewardParams& params) {
  validate(params);
  const double rho = std::clamp(params.rho, 1e-12, 1.0 - 1e-12);
  return ReparamCoords(std::log(rho / (1.0 - rho)), std::log(params.eta),
                       softplus_inverse(std::max(params.lam, 1e-12)),
                       softplus_inverse(std::max(params.omega, 1e-12)));
}

RewardParams to_params(const ReparamCoords& coords) {
  return RewardParams{logistic(coords[0]), std::exp(coords[1]), softplus(coords[2]),
                      softplus(coords[3])};
}

double cumulative_reward(const FundTrajectory& traj, const RewardParams& params,
                         const MarketModel& market) {
  validate(traj);
  validate(params);
  if (market.n_sectors() != traj.n_sectors || market.horizon() != traj.horizon)
    throw std::invalid_argument("cumulative_reward: market and trajectory must share N and T");
  double total = 0.0;
  accumulate_reward(traj, params, market, &total, nullptr);
  return total;
}

double pairwise_loss(const RankedDemoSet& demos, const RewardParams& params,
                     const MarketModel& market, double scale) {
  validate(demos);
  check_market(demos, market);
  const auto pairs = strict_pairs(demos);
  const double temperature = resolve_scale(scale, market.horizon());

  Vec values(demos.size());
  for (int m = 0; m < demos.size(); ++m) {
    double total = 0.0;
    accumulate_reward(demos.trajectories[m], params, market, &total, nullptr);
    values[m] = temperature * total;
  }
  double loss = 0.0;
  for (const PairIndex& pair : pairs)
    loss += softplus(values[pair.lower] - values[pair.higher]);
  return loss / pairs.size();
}

std::pair<double, ReparamCoords> pairwise_loss_gradient(const RankedDemoSet& demos,
                                                        const MarketModel& market,
                                                        double scale,
                                                        const ReparamCoords& coords) {
  validate(demos);
  check_market(demos, market);
  const auto pairs = strict_pairs(demos);
  const double temperature = resolve_scale(scale, market.horizon());
  const RewardParams params = to_params(coords);

  Vec values(demos.size());
  std::vector<Eigen::Vector4d> value_grads(demos.size());
  for (int m = 0; m < demos.size(); ++m) {
    double total = 0.0;
    accumulate_reward(demos.trajectories[m], params, market, &total, &value_grads[m]);
    values[m] = temperature * total;
    value_grads[m] *= temperature;
  }

  double loss = 0.0;
  Eigen::Vector4d grad_params = Eigen::Vector4d::Zero();
  for (const PairIndex& pair : pairs) {
    const double diff = values[pair.lower] - values[pair.higher];
    loss += softplus(diff);
    grad_params += logistic(diff) * (value_grads[pair.lower] - value_grads[pair.higher]);
  }
  loss /= pairs.size();
  grad_params /= static_cast<double>(pairs.size());

  // Chain through the reparameterization.
  Eigen::Vector4d jacobian(params.rho * (1.0 - params.rho), params.eta,
                           logistic(coords[2]), logistic(coords[3]));
  return {loss, grad_params.cwiseProduct(jacobian)};
}

FitResult fit_reward(const RankedDemoSet& demos, const MarketModel& market,
                     const TrexConfig& cfg) {
  validate(cfg);
  ReparamCoords coords = to_coords(cfg.init_params);
  auto [loss, grad] = pairwise_loss_gradient(demos, market, cfg.reward_scale, coords);
  if (!std::isfinite(loss))
    throw std::runtime_error(
        "fit_reward: non-finite loss at initialization; reward_scale is likely too large "
        "for these cumulative rewards");

  FitResult result;
  result.loss_history.push_back(loss);
  result.param_history.push_back(to_params(coords));

  double step = cfg.learning_rate;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    double new_loss = 0.0;
    ReparamCoords candidate, new_grad;
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving) {
      candidate = coords - step * grad;
      std::tie(new_loss, new_grad) =
          pairwise_loss_gradient(demos, market, cfg.reward_scale, candidate);
      if (std::isfinite(new_loss) && new_loss < loss) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;

    const double decrease = loss - new_loss;
    coords = candidate;
    loss = new_loss;
    grad = new_grad;
    result.loss_history.push_back(loss);
    result.param_history.push_back(to_params(coords));
    if (decrease < cfg.convergence_tol) break;
  }

  result.params = result.param_history.back();
  result.iterations = static_cast<int>(result.loss_history.size()) - 1;
  return result;
}

RankingMetrics ranking_metrics_from_values(const Vec& scores, const Vec& values) {
  const int count = static_cast<int>(scores.size());
  if (count < 2 || values.size() != count)
    throw std::invalid_argument("ranking metrics: need >= 2 aligned scores and values");

  int strict = 0;
  int correct = 0;
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      const double gap = scores[j] - scores[i];
      if (std::abs(gap) < kTieTol) continue;
      ++strict;
      const int lower = gap > 0.0 ? i : j;
      const int higher = gap > 0.0 ? j : i;
      if (values[higher] > values[lower]) ++correct;
    }
  }
  if (strict == 0)
    throw std::invalid_argument("ranking metrics: all scores tied");

  auto pearson = [](const Vec& a, const Vec& b) {
    const Vec da = a.array() - a.mean();
    const Vec db = b.array() - b.mean();
    const double denom = std::sqrt(da.squaredNorm() * db.squaredNorm());
    if (denom == 0.0) return 0.0;
    return da.dot(db) / denom;
  };
  auto ranks = [](const Vec& v) {
    const int n = static_cast<int>(v.size());
    std::vector<int> index(n);
    std::iota(index.begin(), index.end(), 0);
    std::stable_sort(index.begin(), index.end(), [&](int a, int b) { return v[a] < v[b]; });
    Vec out(n);
    int k = 0;
    while (k < n) {
      int k2 = k;
      while (k2 + 1 < n && v[index[k2 + 1]] == v[index[k]]) ++k2;
      const double average_rank = 0.5 * (k + k2) + 1.0;  // ties share the average rank
      for (int i = k; i <= k2; ++i) out[index[i]] = average_rank;
      k = k2 + 1;
    }
    return out;
  };

  RankingMetrics metrics;
  metrics.accuracy = static_cast<double>(correct) / strict;
  metrics.pearson = pearson(scores, values);
  metrics.spearman = pearson(ranks(scores), ranks(values));
  return metrics;
}

RankingMetrics ranking_metrics(const RankedDemoSet& demos, const RewardParams& params,
                               const MarketModel& market) {
  validate(demos);
  check_market(demos, market);
  Vec values(demos.size());
  for (int m = 0; m < demos.size(); ++m)
    values[m] = cumulative_reward(demos.trajectories[m], params, market);
  return ranking_metrics_from_values(demos.scores, values);
}

}  // namespace trex
}  // namespace alterego
