#include "alterego/market.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alterego {
namespace market {

namespace {

constexpr double kVarianceFloor = 1e-10;

/// Spectral radius of the AR companion matrix must stay below 1.
bool ar_is_stationary(const Vec& ar) {
  const int p = static_cast<int>(ar.size());
  if (p == 0) return true;
  Mat companion = Mat::Zero(p, p);
  companion.row(0) = ar.transpose();
  for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  return companion.eigenvalues().cwiseAbs().maxCoeff() < 1.0 - 1e-9;
}

/// Long-AR order for the residual-estimation stage.
int long_ar_order(int n_obs, const ArmaSpec& spec) {
  const int suggested =
      std::max(spec.p + spec.q + 2, static_cast<int>(std::lround(2.0 * std::log(n_obs))));
  return std::max(1, std::min(n_obs / 4, suggested));
}

/// OLS with a rank check; returns false when the design matrix is
/// rank-deficient (constant series, collinear lags).
bool solve_ols(const Mat& design, const Vec& target, Vec* coeffs) {
  Eigen::ColPivHouseholderQR<Mat> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < design.cols()) return false;
  *coeffs = qr.solve(target);
  return coeffs->allFinite();
}

SectorArma fallback_to_mean(const Vec& series, int resid_start, Vec* residuals) {
  SectorArma fit;
  fit.mean_fallback = true;
  fit.mean = series.mean();
  fit.intercept = fit.mean;
  const int n = static_cast<int>(series.size());
  residuals->resize(n - resid_start);
  for (int t = resid_start; t < n; ++t) (*residuals)[t - resid_start] = series[t] - fit.mean;
  fit.innovation_variance = residuals->squaredNorm() / residuals->size();
  return fit;
}

SectorArma fit_sector(const Vec& series, const ArmaSpec& spec, int resid_start,
                      Vec* residuals) {
  const int n = static_cast<int>(series.size());
  const int p = spec.p;
  const int q = spec.q;

  // Stage 1 (only when q > 0): long AR to estimate the innovations.
  Vec eps_hat = Vec::Zero(n);
  if (q > 0) {
    const int long_p = long_ar_order(n, spec);
    const int rows = n - long_p;
    Mat design(rows, long_p + 1);
    Vec target(rows);
    for (int t = long_p; t < n; ++t) {
      design(t - long_p, 0) = 1.0;
      for (int i = 0; i < long_p; ++i) design(t - long_p, 1 + i) = series[t - 1 - i];
      target[t - long_p] = series[t];
    }
    Vec coeffs;
    if (!solve_ols(design, target, &coeffs))
      return fallback_to_mean(series, resid_start, residuals);
    for (int t = long_p; t < n; ++t) {
      double fitted = coeffs[0];
      for (int i = 0; i < long_p; ++i) fitted += coeffs[1 + i] * series[t - 1 - i];
      eps_hat[t] = series[t] - fitted;
    }
  }

  // Stage 2: OLS of x_t on [1, x lags, estimated innovation lags].
  const int rows = n - resid_start;
  if (rows < p + q + 2) return fallback_to_mean(series, resid_start, residuals);
  Mat design(rows, 1 + p + q);
  Vec target(rows);
  for (int t = resid_start; t < n; ++t) {
    const int row = t - resid_start;
    design(row, 0) = 1.0;
    for (int i = 0; i < p; ++i) design(row, 1 + i) = series[t - 1 - i];
    for (int j = 0; j < q; ++j) design(row, 1 + p + j) = eps_hat[t - 1 - j];
    target[row] = series[t];
  }
  Vec coeffs;
  if (!solve_ols(design, target, &coeffs))
    return fallback_to_mean(series, resid_start, residuals);

  SectorArma fit;
  fit.intercept = coeffs[0];
  fit.ar = coeffs.segment(1, p);
  fit.ma = coeffs.segment(1 + p, q);
  if (!ar_is_stationary(fit.ar)) return fallback_to_mean(series, resid_start, residuals);

  double ar_sum = fit.ar.sum();
  fit.mean = fit.intercept / (1.0 - ar_sum);

  // Conditional residuals under the fitted model over the aligned rows.
  Vec eps = Vec::Zero(n);
  residuals->resize(rows);
  for (int t = resid_start; t < n; ++t) {
    double fitted = fit.intercept;
    for (int i = 0; i < p; ++i) fitted += fit.ar[i] * series[t - 1 - i];
    for (int j = 0; j < q; ++j) fitted += fit.ma[j] * eps[t - 1 - j];
    eps[t] = series[t] - fitted;
    (*residuals)[t - resid_start] = eps[t];
  }
  fit.innovation_variance = residuals->squaredNorm() / rows;

  fit.tail_obs.resize(p);
  for (int i = 0; i < p; ++i) fit.tail_obs[i] = series[n - p + i];
  fit.tail_resid.resize(q);
  for (int j = 0; j < q; ++j) fit.tail_resid[j] = eps[n - q + j];
  return fit;
}

}  // namespace

FundTrajectory normalize(const FundTrajectory& raw, const Vec& benchmark_series) {
  validate(raw);
  if (benchmark_series.size() != raw.rows())
    throw std::invalid_argument("normalize: benchmark series does not align with the trajectory");
  if (!benchmark_series.allFinite() || (benchmark_series.array() <= 0.0).any())
    throw std::invalid_argument("normalize: benchmark series must be positive");

  const double initial_nav = raw.holdings.row(0).sum();
  if (initial_nav <= 0.0)
    throw std::invalid_argument("normalize: initial NAV must be positive");

  FundTrajectory out = raw;
  out.benchmark[0] = initial_nav;
  for (int t = 1; t < raw.rows(); ++t)
    out.benchmark[t] = out.benchmark[t - 1] * (benchmark_series[t] / benchmark_series[t - 1]);

  out.holdings /= initial_nav;
  out.trades /= initial_nav;
  out.benchmark /= initial_nav;
  out.cashflow /= initial_nav;
  out.normalized = true;
  validate(out);
  return out;
}

ArmaFit fit_forecaster(const Mat& sector_returns, const ArmaSpec& spec) {
  const int n_obs = static_cast<int>(sector_returns.rows());
  const int n_sectors = static_cast<int>(sector_returns.cols());
  if (spec.p < 0 || spec.q < 0 || spec.p + spec.q == 0)
    throw std::invalid_argument("fit_forecaster: orders must be non-negative with p+q >= 1");
  if (n_obs < 12)
    throw std::invalid_argument("fit_forecaster: at least 12 observations required");
  if (!sector_returns.allFinite())
    throw std::invalid_argument("fit_forecaster: non-finite observations");

  ArmaFit fit;
  fit.spec = spec;
  fit.n_obs = n_obs;
  fit.resid_start =
      std::max(spec.p, spec.q > 0 ? long_ar_order(n_obs, spec) + spec.q : spec.p);
  fit.sectors.reserve(n_sectors);
  fit.residuals.resize(n_obs - fit.resid_start, n_sectors);
  for (int s = 0; s < n_sectors; ++s) {
    Vec residuals;
    fit.sectors.push_back(fit_sector(sector_returns.col(s), spec, fit.resid_start, &residuals));
    fit.residuals.col(s) = residuals;
  }
  return fit;
}

Mat forecast(const ArmaFit& fit, int horizon) {
  const int n_sectors = static_cast<int>(fit.sectors.size());
  Mat out(horizon, n_sectors);
  for (int s = 0; s < n_sectors; ++s) {
    const SectorArma& sector = fit.sectors[s];
    if (sector.mean_fallback) {
      out.col(s).setConstant(sector.mean);
      continue;
    }
    const int p = static_cast<int>(sector.ar.size());
    const int q = static_cast<int>(sector.ma.size());
    std::vector<double> values(sector.tail_obs.data(), sector.tail_obs.data() + p);
    for (int h = 0; h < horizon; ++h) {
      double next = sector.intercept;
      for (int i = 0; i < p; ++i) next += sector.ar[i] * values[values.size() - 1 - i];
      // Future innovations have mean zero; known ones persist q steps.
      for (int j = 0; j < q; ++j) {
        const int lag_index = h - j;  // eps_{T+h-j}; only non-positive indices are known
        if (lag_index <= 0 && -lag_index < q) next += sector.ma[j] * sector.tail_resid[q - 1 + lag_index];
      }
      out(h, s) = next;
      values.push_back(next);
    }
  }
  return out;
}

Mat in_sample_means(const ArmaFit& fit, const Mat& sector_returns) {
  const int n_sectors = static_cast<int>(fit.sectors.size());
  if (sector_returns.rows() != fit.n_obs || sector_returns.cols() != n_sectors)
    throw std::invalid_argument("in_sample_means: observations do not match the fit");
  Mat out(fit.n_obs + 1, n_sectors);
  for (int s = 0; s < n_sectors; ++s) {
    const SectorArma& sector = fit.sectors[s];
    for (int t = 0; t < fit.resid_start; ++t) out(t, s) = sector.mean;
    for (int t = fit.resid_start; t < fit.n_obs; ++t)
      out(t, s) = sector_returns(t, s) - fit.residuals(t - fit.resid_start, s);
  }
  out.row(fit.n_obs) = forecast(fit, 1).row(0);
  return out;
}

Mat estimate_covariance(const Mat& residuals, double diagonal_shrinkage) {
  const int n = static_cast<int>(residuals.rows());
  if (n < 1) throw std::invalid_argument("estimate_covariance: empty residual matrix");
  if (diagonal_shrinkage < 0.0 || diagonal_shrinkage > 1.0)
    throw std::invalid_argument("estimate_covariance: shrinkage must lie in [0, 1]");
  const Mat centered = residuals.rowwise() - residuals.colwise().mean();
  Mat cov = centered.transpose() * centered / n;
  if (diagonal_shrinkage > 0.0)
    cov = (1.0 - diagonal_shrinkage) * cov +
          diagonal_shrinkage * Mat(cov.diagonal().asDiagonal());

  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (cov + cov.transpose()));
  Vec values = eig.eigenvalues().cwiseMax(kVarianceFloor);
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

glearner::PriorPolicy fit_prior(const Mat& trades) {
  const int n = static_cast<int>(trades.rows());
  if (n == 0) throw std::invalid_argument("fit_prior: no trade vectors");
  if (n < 2) throw std::invalid_argument("fit_prior: at least 2 trade vectors required");
  glearner::PriorPolicy prior;
  prior.mean = trades.colwise().mean().transpose();
  const Mat centered = trades.rowwise() - prior.mean.transpose();
  prior.variances = (centered.array().square().colwise().sum() / n).transpose().cwiseMax(kVarianceFloor);
  validate(prior);
  return prior;
}

}  // namespace market
}  // namespace alterego
