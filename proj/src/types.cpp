#include "alterego/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace alterego {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace

void validate(const FundTrajectory& traj) {
  const int rows = traj.horizon + 1;
  require(traj.n_sectors > 0, "trajectory: n_sectors must be positive");
  require(traj.horizon >= 0, "trajectory: horizon must be non-negative");
  require(traj.holdings.rows() == rows && traj.holdings.cols() == traj.n_sectors,
          "trajectory '" + traj.fund_id + "': holdings must be (T+1) x N");
  require(traj.trades.rows() == rows && traj.trades.cols() == traj.n_sectors,
          "trajectory '" + traj.fund_id + "': trades must be (T+1) x N");
  require(traj.benchmark.size() == rows,
          "trajectory '" + traj.fund_id + "': benchmark must have T+1 entries");
  require(traj.cashflow.size() == rows,
          "trajectory '" + traj.fund_id + "': cashflow must have T+1 entries");
  require(traj.holdings.allFinite() && traj.trades.allFinite() &&
              traj.benchmark.allFinite() && traj.cashflow.allFinite(),
          "trajectory '" + traj.fund_id + "': non-finite values");
  if (traj.normalized) {
    require(std::abs(traj.holdings.row(0).sum() - 1.0) <= 1e-9,
            "trajectory '" + traj.fund_id + "': normalized flag set but 1'x_0 != 1");
    require(std::abs(traj.benchmark[0] - 1.0) <= 1e-9,
            "trajectory '" + traj.fund_id + "': normalized flag set but B_0 != 1");
  }
}

void validate(const RewardParams& params) {
  require(std::isfinite(params.rho) && params.rho >= 0.0 && params.rho <= 1.0,
          "reward params: rho must lie in [0, 1]");
  require(std::isfinite(params.eta) && params.eta > 0.0,
          "reward params: eta must be positive");
  require(std::isfinite(params.lam) && params.lam >= 0.0,
          "reward params: lam must be non-negative");
  require(std::isfinite(params.omega) && params.omega >= 0.0,
          "reward params: omega must be non-negative");
}

void check_covariance(const Mat& sigma, double tol) {
  require(sigma.rows() == sigma.cols(), "covariance must be square");
  require(sigma.allFinite(), "covariance has non-finite entries");
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  require(asym <= 1e-12 * scale, "covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> eig(sigma, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() >= -tol,
          "covariance has an eigenvalue below the PSD tolerance");
}

Mat project_psd(const Mat& sigma, double tol) {
  check_covariance(sigma, tol);
  const Mat sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  Vec values = eig.eigenvalues();
  if (values.minCoeff() >= 0.0) return sym;
  for (int i = 0; i < values.size(); ++i) values[i] = std::max(values[i], 0.0);
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

MarketModel::MarketModel(Mat mean_returns_in, Mat covariance_in)
    : mean_returns(std::move(mean_returns_in)) {
  require(mean_returns.rows() >= 1 && mean_returns.cols() >= 1,
          "market model: mean returns must be a (T+1) x N matrix");
  require(mean_returns.allFinite(), "market model: non-finite mean returns");
  require(covariance_in.rows() == mean_returns.cols() &&
              covariance_in.cols() == mean_returns.cols(),
          "market model: covariance must be N x N");
  covariance = project_psd(covariance_in);
}

bool RankedDemoSet::has_ties(double tol) const {
  for (int i = 0; i < scores.size(); ++i)
    for (int j = i + 1; j < scores.size(); ++j)
      if (std::abs(scores[i] - scores[j]) < tol) return true;
  return false;
}

RankedDemoSet make_ranked_demos(std::vector<FundTrajectory> trajectories,
                                const std::function<double(const FundTrajectory&)>& score) {
  RankedDemoSet demos;
  demos.scores.resize(static_cast<int>(trajectories.size()));
  for (std::size_t m = 0; m < trajectories.size(); ++m)
    demos.scores[static_cast<int>(m)] = score(trajectories[m]);
  demos.trajectories = std::move(trajectories);
  demos.order.resize(demos.trajectories.size());
  std::iota(demos.order.begin(), demos.order.end(), 0);
  std::stable_sort(demos.order.begin(), demos.order.end(),
                   [&](int a, int b) { return demos.scores[a] < demos.scores[b]; });
  validate(demos);
  return demos;
}

void validate(const RankedDemoSet& demos) {
  const int count = demos.size();
  require(demos.scores.size() == count, "demo set: one score per trajectory required");
  require(static_cast<int>(demos.order.size()) == count,
          "demo set: order must have one entry per trajectory");
  std::vector<bool> seen(count, false);
  for (int index : demos.order) {
    require(index >= 0 && index < count && !seen[index],
            "demo set: order is not a permutation");
    seen[index] = true;
  }
  for (int k = 0; k + 1 < count; ++k)
    require(demos.scores[demos.order[k]] <= demos.scores[demos.order[k + 1]],
            "demo set: order does not sort scores ascending");
  if (count == 0) return;
  const int n = demos.trajectories.front().n_sectors;
  const int horizon = demos.trajectories.front().horizon;
  for (const FundTrajectory& traj : demos.trajectories) {
    validate(traj);
    require(traj.n_sectors == n && traj.horizon == horizon,
            "demo set: trajectories must share N and T");
  }
}

}  // namespace alterego
