#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace alterego {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One fund's monthly history: sector holdings x_t, trades u_t, the
/// size-rescaled benchmark value B_t and net cashflow C_t. Rows run
/// t = 0..horizon, columns are sectors. Values are currency units until
/// market::normalize has been applied, after which everything is
/// dimensionless with total initial value 1.
struct FundTrajectory {
  std::string fund_id;
  int n_sectors = 0;
  int horizon = 0;             // T; matrices have T+1 rows
  Mat holdings;                // (T+1) x N
  Mat trades;                  // (T+1) x N
  Vec benchmark;               // T+1
  Vec cashflow;                // T+1
  bool normalized = false;

  int rows() const { return horizon + 1; }
};

/// Checks dimensional consistency and finiteness; if the trajectory is
/// flagged normalized, additionally requires 1'x_0 = 1 and B_0 = 1 within
/// 1e-9. Throws std::invalid_argument on violation.
void validate(const FundTrajectory& traj);

/// The four parameters of the quadratic portfolio reward.
struct RewardParams {
  double rho = 0.5;    // benchmark weight, in [0, 1]
  double eta = 1.0;    // growth-target rate, > 0
  double lam = 0.1;    // flow-matching penalty, >= 0
  double omega = 0.1;  // transaction-cost penalty, >= 0
};

void validate(const RewardParams& params);

/// Expected sector returns per step plus a single sector-return covariance
/// held constant over the horizon. Construction symmetrizes the covariance
/// and clips eigenvalues in [-1e-8, 0) to zero; anything below -1e-8 is
/// rejected.
struct MarketModel {
  Mat mean_returns;  // (T+1) x N
  Mat covariance;    // N x N, symmetric PSD

  MarketModel() = default;
  MarketModel(Mat mean_returns_in, Mat covariance_in);

  int n_sectors() const { return static_cast<int>(mean_returns.cols()); }
  int horizon() const { return static_cast<int>(mean_returns.rows()) - 1; }
};

/// Symmetrize, validate (eigenvalue >= -1e-8) and clip small negative
/// eigenvalues of a covariance matrix to zero.
Mat project_psd(const Mat& sigma, double tol = 1e-8);

/// Throws if sigma is not symmetric PSD up to the tolerance.
void check_covariance(const Mat& sigma, double tol = 1e-8);

/// Demonstration set: trajectories plus their ranking-criterion scores and
/// the permutation that sorts scores ascending.
struct RankedDemoSet {
  std::vector<FundTrajectory> trajectories;
  Vec scores;
  std::vector<int> order;  // order[k] = index of the k-th lowest score

  int size() const { return static_cast<int>(trajectories.size()); }
  bool has_ties(double tol = 1e-12) const;
};

/// Scores each trajectory with `score` and builds the ascending order.
RankedDemoSet make_ranked_demos(std::vector<FundTrajectory> trajectories,
                                const std::function<double(const FundTrajectory&)>& score);

void validate(const RankedDemoSet& demos);

}  // namespace alterego
