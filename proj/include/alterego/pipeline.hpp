#pragma once

#include "alterego/backtest.hpp"
#include "alterego/config.hpp"
#include "alterego/csv.hpp"
#include "alterego/glearner.hpp"
#include "alterego/market.hpp"
#include "alterego/simgen.hpp"
#include "alterego/trex.hpp"

#include <string>

namespace alterego {
namespace pipeline {

/// Everything the batch commands need, read from one flat config file.
/// When `sim.enabled` the dataset is produced by the generator into
/// <out_dir>/dataset; otherwise the three data.* paths must point at
/// existing CSVs.
struct PipelineConfig {
  // data
  std::string trajectories_path;
  std::string cashflows_path;
  std::string benchmark_path;
  std::string aliases_path;
  std::string start_month = "2017-01";
  int train_months = 24;  // rows 0..train_months form the training window

  // synthetic dataset
  bool sim_enabled = true;
  simgen::SimConfig sim;

  // reward fit
  trex::TrexConfig trex_cfg;

  // policy optimization; beta <= 0 requests the KL calibration
  double beta = 0.0;
  double target_kl = 1.0;
  double gamma = 1.0;
  int max_outer_iters = 1;
  double outer_tol = 1e-8;

  // forecasting
  market::ArmaSpec arma;
  double covariance_shrinkage = 0.0;

  // io
  std::string out_dir = "out";
  bool plots = false;
  std::uint64_t seed = 42;

  static PipelineConfig from_config(const io::Config& cfg);
  io::Config to_config() const;
  static PipelineConfig load(const std::string& path);
};

/// Train-window preparation shared by the commands: normalized funds,
/// sector returns implied from the aggregate holdings, ARMA fit, market
/// models and the trade prior.
struct PreparedData {
  io::Dataset dataset;                       // normalized funds
  std::vector<FundTrajectory> train_slices;  // rows 0..train_months
  std::vector<FundTrajectory> test_slices;   // rows train_months..end
  Mat train_returns;                         // implied sector returns, train window
  Mat test_returns;                          // implied sector returns, test window
  market::ArmaFit arma_fit;
  MarketModel train_market;  // in-sample conditional means + residual covariance
  MarketModel test_market;   // multi-step forecasts over the test window
  glearner::PriorPolicy prior;
  Vec train_benchmark_mean;  // group-average B_t over the train window
  Vec train_cashflow_mean;
  Vec test_benchmark_forecast;
  Vec test_cashflow_mean;
};

PreparedData prepare(const PipelineConfig& cfg);

struct RlArtifacts {
  double beta = 0.0;
  glearner::GaussianPolicy policy_train;  // horizon = train_months
  glearner::GaussianPolicy policy_test;   // horizon = total - train_months
};

/// Writes the synthetic dataset CSVs into <out_dir>/dataset.
io::Dataset cmd_generate(const PipelineConfig& cfg);

/// Fits the reward on the return-ranked training slices; writes
/// irl/fit_result.txt and irl/trace.csv.
trex::FitResult cmd_irl(const PipelineConfig& cfg);

/// Solves the training- and test-window policies under the fitted reward;
/// writes rl/policy_train.txt and rl/policy_test.txt.
RlArtifacts cmd_rl(const PipelineConfig& cfg, const trex::FitResult& fit);

/// Rolls the policies against every fund and writes the per-fund and
/// group outperformance CSVs (plus SVG plots when requested).
std::pair<backtest::BacktestReport, backtest::BacktestReport> cmd_backtest(
    const PipelineConfig& cfg, const RlArtifacts& rl);

/// generate (when enabled) -> irl -> rl -> backtest.
void cmd_pipeline(const PipelineConfig& cfg);

// Artifact file formats.
std::string fit_result_to_text(const trex::FitResult& fit, double scale,
                               const trex::RankingMetrics& train,
                               const trex::RankingMetrics& test);
std::string fit_trace_to_csv(const trex::FitResult& fit);
RewardParams read_fit_result(const std::string& path);
std::string policy_to_text(const glearner::GaussianPolicy& policy, double beta);
std::pair<glearner::GaussianPolicy, double> read_policy(const std::string& path);

/// Smallest beta whose first-step policy sits `target_kl` nats from the
/// prior at the average initial state, found by bisection on log(beta).
double calibrate_beta(const MarketModel& train_market, const RewardParams& params,
                      const glearner::PriorPolicy& prior, const Vec& benchmark,
                      const Vec& cashflow, const Vec& x0, double target_kl,
                      const PipelineConfig& cfg);

}  // namespace pipeline
}  // namespace alterego
