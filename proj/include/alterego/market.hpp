#pragma once

#include "alterego/glearner.hpp"
#include "alterego/types.hpp"

#include <vector>

namespace alterego {
namespace market {

/// ARMA(p, q) model orders for the per-sector return forecasters.
struct ArmaSpec {
  int p = 1;
  int q = 1;
};

/// One sector's fitted forecaster. When the conditional least-squares fit is
/// singular or non-stationary the sector falls back to its sample mean and
/// `mean_fallback` is set.
struct SectorArma {
  double intercept = 0.0;
  Vec ar;                 // p coefficients
  Vec ma;                 // q coefficients
  double innovation_variance = 0.0;
  bool mean_fallback = false;
  double mean = 0.0;
  Vec tail_obs;           // most recent p observations, newest last
  Vec tail_resid;         // most recent q residuals, newest last
};

struct ArmaFit {
  ArmaSpec spec;
  int n_obs = 0;
  int resid_start = 0;    // first observation row with a residual
  std::vector<SectorArma> sectors;
  Mat residuals;          // (n_obs - resid_start) x N, rows aligned across sectors
};

/// Rescales a raw-currency trajectory: the benchmark is anchored to the
/// fund's initial NAV and grown by the index's realized returns, then
/// holdings, trades, benchmark and cashflows are divided by the initial NAV
/// so that 1'x_0 = 1 and B_0 = 1. Idempotent and scale-invariant.
FundTrajectory normalize(const FundTrajectory& raw, const Vec& benchmark_series);

/// Per-sector independent ARMA fits by Hannan-Rissanen conditional least
/// squares (long-AR residual estimation followed by one OLS). Requires at
/// least 12 observations.
ArmaFit fit_forecaster(const Mat& sector_returns, const ArmaSpec& spec);

/// Multi-step mean forecasts, one row per horizon step.
Mat forecast(const ArmaFit& fit, int horizon);

/// One-step-ahead conditional means over the observed sample plus a final
/// row forecasting one step past it: (n_obs + 1) x N. Rows before the first
/// residual use the sector mean.
Mat in_sample_means(const ArmaFit& fit, const Mat& sector_returns);

/// Sample covariance of the residual rows (divisor n), optionally shrunk
/// toward its diagonal, with eigenvalues floored at 1e-10.
Mat estimate_covariance(const Mat& residuals, double diagonal_shrinkage = 0.0);

/// Gaussian prior over trades: sample mean and per-sector variances
/// (divisor n, floored at 1e-10) of the given trade rows.
glearner::PriorPolicy fit_prior(const Mat& trades);

}  // namespace market
}  // namespace alterego
