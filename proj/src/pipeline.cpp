#include "alterego/pipeline.hpp"

#include "alterego/reward.hpp"
#include "alterego/svg.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

namespace alterego {
namespace pipeline {

namespace fs = std::filesystem;

namespace {

FundTrajectory slice(const FundTrajectory& traj, int first_row, int last_row) {
  FundTrajectory out;
  out.fund_id = traj.fund_id;
  out.n_sectors = traj.n_sectors;
  out.horizon = last_row - first_row;
  const int rows = out.horizon + 1;
  out.holdings = traj.holdings.middleRows(first_row, rows);
  out.trades = traj.trades.middleRows(first_row, rows);
  out.benchmark = traj.benchmark.segment(first_row, rows);
  out.cashflow = traj.cashflow.segment(first_row, rows);
  out.normalized = false;
  return out;
}

/// Renormalizes a window so it starts at unit value, rebasing its benchmark
/// the same way so the tracking geometry is preserved.
FundTrajectory rebase(const FundTrajectory& window) {
  FundTrajectory out = window;
  const double initial = window.holdings.row(0).sum();
  if (initial <= 0.0)
    throw io::data_error("window for fund '" + window.fund_id + "' has non-positive value");
  out.holdings /= initial;
  out.trades /= initial;
  out.cashflow /= initial;
  out.benchmark = window.benchmark * (1.0 / window.benchmark[0]);
  out.normalized = std::abs(out.holdings.row(0).sum() - 1.0) <= 1e-9;
  return out;
}

/// Sector returns implied by the aggregate panel through the transition
/// identity: r_t = sum_m x_{t+1} / sum_m (x_t + u_t) - 1, per sector.
Mat implied_sector_returns(const std::vector<FundTrajectory>& funds, int first_row,
                           int last_row) {
  const int n = funds.front().n_sectors;
  Mat out(last_row - first_row, n);
  for (int t = first_row; t < last_row; ++t) {
    Vec pre = Vec::Zero(n);
    Vec post = Vec::Zero(n);
    for (const FundTrajectory& fund : funds) {
      pre += (fund.holdings.row(t) + fund.trades.row(t)).transpose();
      post += fund.holdings.row(t + 1).transpose();
    }
    for (int s = 0; s < n; ++s) {
      if (std::abs(pre[s]) < 1e-12)
        throw io::data_error("sector " + std::to_string(s + 1) +
                             " exposure too small to imply returns at row " +
                             std::to_string(t));
      out(t - first_row, s) = post[s] / pre[s] - 1.0;
    }
  }
  return out;
}

std::string path_join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::vector<std::string> parse_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::stringstream stream(line);
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

void append_matrix(std::string* out, const Mat& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      *out += ' ';
      *out += io::format_double(m(i, j));
    }
}

void emit_backtest_csvs(const PipelineConfig& cfg, const std::string& prefix,
                        const backtest::BacktestReport& rep,
                        const std::vector<FundTrajectory>& managers) {
  const std::string dir = path_join(cfg.out_dir, "backtest");
  const int rows = static_cast<int>(rep.group_mean.size());

  std::string funds_csv = "t,fund_id,pm_value,ae_value,outperformance,outperformance_pct\n";
  for (std::size_t m = 0; m < rep.fund_ids.size(); ++m) {
    for (int t = 0; t < rows; ++t) {
      const double pm_value = managers[m].holdings.row(t).sum();
      const double ae_value = rep.alter_egos[m].holdings.row(t).sum();
      const double diff = rep.outperformance[m][t];
      funds_csv += std::to_string(t) + "," + rep.fund_ids[m] + "," +
                   io::format_double(pm_value) + "," + io::format_double(ae_value) + "," +
                   io::format_double(diff) + "," + io::format_double(100.0 * diff / pm_value) +
                   "\n";
    }
  }
  io::write_file_atomic(path_join(dir, prefix + "_funds.csv"), funds_csv);

  std::string group_csv = "t,mean";
  for (const std::string& fund_id : rep.fund_ids) group_csv += "," + fund_id;
  group_csv += "\n";
  for (int t = 0; t < rows; ++t) {
    group_csv += std::to_string(t) + "," + io::format_double(rep.group_mean[t]);
    for (const Vec& curve : rep.outperformance) group_csv += "," + io::format_double(curve[t]);
    group_csv += "\n";
  }
  io::write_file_atomic(path_join(dir, prefix + "_group.csv"), group_csv);

  if (cfg.plots) {
    std::vector<io::PlotSeries> series;
    series.push_back({"group mean", {rep.group_mean.data(), rep.group_mean.data() + rows}});
    for (std::size_t m = 0; m < rep.fund_ids.size(); ++m)
      series.push_back({rep.fund_ids[m],
                        {rep.outperformance[m].data(), rep.outperformance[m].data() + rows}});
    io::write_file_atomic(path_join(dir, prefix + "_group.svg"),
                          io::render_line_plot("AE - PM, " + prefix + " window",
                                               "outperformance", series));
  }
}

}  // namespace

PipelineConfig PipelineConfig::from_config(const io::Config& cfg) {
  PipelineConfig out;
  out.trajectories_path = cfg.get_string("data.trajectories", "");
  out.cashflows_path = cfg.get_string("data.cashflows", "");
  out.benchmark_path = cfg.get_string("data.benchmark", "");
  out.aliases_path = cfg.get_string("data.aliases", "");
  out.start_month = cfg.get_string("data.start", "2017-01");
  out.train_months = cfg.get_int("data.train_months", 24);

  out.sim_enabled = cfg.get_bool("sim.enabled", out.trajectories_path.empty());
  const int n_sectors = cfg.get_int("sim.n_sectors", 11);
  const int horizon = cfg.get_int("sim.horizon", 24);
  const int n_funds = cfg.get_int("sim.n_funds", 6);
  out.sim = simgen::default_config(n_sectors, horizon, n_funds);
  out.sim.planted.rho = cfg.get_double("sim.planted_rho", out.sim.planted.rho);
  out.sim.planted.eta = cfg.get_double("sim.planted_eta", out.sim.planted.eta);
  out.sim.planted.lam = cfg.get_double("sim.planted_lambda", out.sim.planted.lam);
  out.sim.planted.omega = cfg.get_double("sim.planted_omega", out.sim.planted.omega);
  out.sim.trade_noise = cfg.get_double("sim.trade_noise", out.sim.trade_noise);
  out.sim.cashflow_scale = cfg.get_double("sim.cashflow_scale", out.sim.cashflow_scale);
  if (cfg.has("sim.skill_min") || cfg.has("sim.skill_max")) {
    const double lo = cfg.get_double("sim.skill_min", 0.1);
    const double hi = cfg.get_double("sim.skill_max", 0.9);
    for (int m = 0; m < n_funds; ++m)
      out.sim.skill_levels[m] = n_funds == 1 ? hi : lo + (hi - lo) * m / (n_funds - 1);
  }

  out.trex_cfg.max_iters = cfg.get_int("trex.max_iters", 200);
  out.trex_cfg.learning_rate = cfg.get_double("trex.learning_rate", 0.05);
  out.trex_cfg.reward_scale = cfg.get_double("trex.reward_scale", 0.0);
  out.trex_cfg.convergence_tol = cfg.get_double("trex.convergence_tol", 1e-6);
  out.trex_cfg.init_params.rho = cfg.get_double("trex.init_rho", 0.5);
  out.trex_cfg.init_params.eta = cfg.get_double("trex.init_eta", 1.0);
  out.trex_cfg.init_params.lam = cfg.get_double("trex.init_lambda", 0.1);
  out.trex_cfg.init_params.omega = cfg.get_double("trex.init_omega", 0.1);

  out.beta = cfg.get_double("glearner.beta", 0.0);
  out.target_kl = cfg.get_double("glearner.target_kl", 1.0);
  out.gamma = cfg.get_double("glearner.gamma", 1.0);
  out.max_outer_iters = cfg.get_int("glearner.max_outer_iters", 1);
  out.outer_tol = cfg.get_double("glearner.outer_tol", 1e-8);

  out.arma.p = cfg.get_int("arma.p", 1);
  out.arma.q = cfg.get_int("arma.q", 1);
  out.covariance_shrinkage = cfg.get_double("arma.covariance_shrinkage", 0.0);

  out.out_dir = cfg.get_string("out.dir", "out");
  out.plots = cfg.get_bool("out.plots", false);
  out.seed = cfg.get_uint64("seed", 42);
  out.sim.seed = out.seed;
  out.trex_cfg.seed = out.seed;

  if (out.train_months < 1) throw io::config_error("data.train_months must be >= 1");
  return out;
}

io::Config PipelineConfig::to_config() const {
  io::Config cfg;
  cfg.set("data.trajectories", trajectories_path);
  cfg.set("data.cashflows", cashflows_path);
  cfg.set("data.benchmark", benchmark_path);
  cfg.set("data.aliases", aliases_path);
  cfg.set("data.start", start_month);
  cfg.set("data.train_months", std::to_string(train_months));
  cfg.set("sim.enabled", sim_enabled ? "true" : "false");
  cfg.set("sim.n_sectors", std::to_string(sim.n_sectors));
  cfg.set("sim.horizon", std::to_string(sim.horizon));
  cfg.set("sim.n_funds", std::to_string(sim.n_funds));
  cfg.set("sim.planted_rho", io::format_double(sim.planted.rho));
  cfg.set("sim.planted_eta", io::format_double(sim.planted.eta));
  cfg.set("sim.planted_lambda", io::format_double(sim.planted.lam));
  cfg.set("sim.planted_omega", io::format_double(sim.planted.omega));
  cfg.set("sim.trade_noise", io::format_double(sim.trade_noise));
  cfg.set("sim.cashflow_scale", io::format_double(sim.cashflow_scale));
  cfg.set("trex.max_iters", std::to_string(trex_cfg.max_iters));
  cfg.set("trex.learning_rate", io::format_double(trex_cfg.learning_rate));
  cfg.set("trex.reward_scale", io::format_double(trex_cfg.reward_scale));
  cfg.set("trex.convergence_tol", io::format_double(trex_cfg.convergence_tol));
  cfg.set("trex.init_rho", io::format_double(trex_cfg.init_params.rho));
  cfg.set("trex.init_eta", io::format_double(trex_cfg.init_params.eta));
  cfg.set("trex.init_lambda", io::format_double(trex_cfg.init_params.lam));
  cfg.set("trex.init_omega", io::format_double(trex_cfg.init_params.omega));
  cfg.set("glearner.beta", io::format_double(beta));
  cfg.set("glearner.target_kl", io::format_double(target_kl));
  cfg.set("glearner.gamma", io::format_double(gamma));
  cfg.set("glearner.max_outer_iters", std::to_string(max_outer_iters));
  cfg.set("glearner.outer_tol", io::format_double(outer_tol));
  cfg.set("arma.p", std::to_string(arma.p));
  cfg.set("arma.q", std::to_string(arma.q));
  cfg.set("arma.covariance_shrinkage", io::format_double(covariance_shrinkage));
  cfg.set("out.dir", out_dir);
  cfg.set("out.plots", plots ? "true" : "false");
  cfg.set("seed", std::to_string(seed));
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  return from_config(io::Config::parse_file(path));
}

io::Dataset cmd_generate(const PipelineConfig& cfg) {
  simgen::SimConfig sim = cfg.sim;
  sim.seed = cfg.seed;
  const simgen::MarketPath path = simgen::generate_market_path(sim);
  const RankedDemoSet demos = simgen::generate_funds(sim, path);

  // Scale back to raw currency so the written dataset exercises the same
  // ingest + normalize path as real data. One NAV per fund.
  io::Dataset dataset;
  dataset.dates = io::month_range(cfg.start_month, sim.horizon + 1);
  dataset.benchmark_series = 3000.0 * path.benchmark;
  for (int m = 0; m < demos.size(); ++m) {
    FundTrajectory fund = demos.trajectories[m];
    const double nav = 50e6 * (m + 1);
    fund.holdings *= nav;
    fund.trades *= nav;
    fund.cashflow *= nav;
    fund.benchmark = dataset.benchmark_series;
    fund.normalized = false;
    dataset.funds.push_back(std::move(fund));
  }

  const std::string dir = path_join(cfg.out_dir, "dataset");
  io::write_file_atomic(path_join(dir, "funds.csv"),
                        io::trajectories_to_csv(dataset.funds, dataset.dates));
  io::write_file_atomic(path_join(dir, "flows.csv"),
                        io::cashflows_to_csv(dataset.funds, dataset.dates));
  io::write_file_atomic(path_join(dir, "benchmark.csv"),
                        io::benchmark_to_csv(dataset.benchmark_series, dataset.dates));
  return dataset;
}

PreparedData prepare(const PipelineConfig& cfg) {
  PreparedData prep;

  std::string trajectories = cfg.trajectories_path;
  std::string cashflows = cfg.cashflows_path;
  std::string benchmark = cfg.benchmark_path;
  if (cfg.sim_enabled) {
    const std::string dir = path_join(cfg.out_dir, "dataset");
    if (trajectories.empty()) trajectories = path_join(dir, "funds.csv");
    if (cashflows.empty()) cashflows = path_join(dir, "flows.csv");
    if (benchmark.empty()) benchmark = path_join(dir, "benchmark.csv");
  }
  for (const std::string& path : {trajectories, cashflows, benchmark})
    if (path.empty() || !fs::exists(path))
      throw io::config_error("required input file missing: '" + path +
                             "' (run generate first or point data.* at existing files)");

  prep.dataset = io::read_dataset(trajectories, cashflows, benchmark, cfg.aliases_path);
  const int total = prep.dataset.funds.front().horizon;
  if (cfg.train_months >= total)
    throw io::config_error("data.train_months must leave a non-empty test window");

  for (FundTrajectory& fund : prep.dataset.funds)
    fund = market::normalize(fund, prep.dataset.benchmark_series);

  for (const FundTrajectory& fund : prep.dataset.funds) {
    prep.train_slices.push_back(rebase(slice(fund, 0, cfg.train_months)));
    prep.test_slices.push_back(rebase(slice(fund, cfg.train_months, total)));
  }

  prep.train_returns = implied_sector_returns(prep.dataset.funds, 0, cfg.train_months);
  prep.test_returns = implied_sector_returns(prep.dataset.funds, cfg.train_months, total);

  prep.arma_fit = market::fit_forecaster(prep.train_returns, cfg.arma);
  const Mat sigma =
      market::estimate_covariance(prep.arma_fit.residuals, cfg.covariance_shrinkage);
  prep.train_market =
      MarketModel(market::in_sample_means(prep.arma_fit, prep.train_returns), sigma);

  const int test_horizon = total - cfg.train_months;
  prep.test_market = MarketModel(market::forecast(prep.arma_fit, test_horizon + 1), sigma);

  // Prior from training trades, excluding the boundary-row trade.
  const int n = prep.dataset.funds.front().n_sectors;
  Mat trades(static_cast<int>(prep.train_slices.size()) * cfg.train_months, n);
  int row = 0;
  for (const FundTrajectory& fund : prep.train_slices)
    for (int t = 0; t < cfg.train_months; ++t) trades.row(row++) = fund.trades.row(t);
  prep.prior = market::fit_prior(trades);

  prep.train_benchmark_mean = Vec::Zero(cfg.train_months + 1);
  prep.train_cashflow_mean = Vec::Zero(cfg.train_months + 1);
  for (const FundTrajectory& fund : prep.train_slices) {
    prep.train_benchmark_mean += fund.benchmark;
    prep.train_cashflow_mean += fund.cashflow;
  }
  prep.train_benchmark_mean /= static_cast<double>(prep.train_slices.size());
  prep.train_cashflow_mean /= static_cast<double>(prep.train_slices.size());

  // Test-window benchmark projected with the forecast benchmark return
  // implied by the sector forecasts (equal-weight aggregate), starting from
  // 1 because the test slices are rebased to unit value.
  prep.test_benchmark_forecast = Vec::Zero(test_horizon + 1);
  prep.test_benchmark_forecast[0] = 1.0;
  for (int t = 0; t < test_horizon; ++t)
    prep.test_benchmark_forecast[t + 1] =
        prep.test_benchmark_forecast[t] * (1.0 + prep.test_market.mean_returns.row(t).mean());

  const double mean_flow = prep.train_cashflow_mean.head(cfg.train_months).mean();
  prep.test_cashflow_mean = Vec::Constant(test_horizon + 1, mean_flow);
  return prep;
}

std::string fit_result_to_text(const trex::FitResult& fit, double scale,
                               const trex::RankingMetrics& train,
                               const trex::RankingMetrics& test) {
  std::string out = "# fitted reward parameters\n";
  out += "rho = " + io::format_double(fit.params.rho) + "\n";
  out += "eta = " + io::format_double(fit.params.eta) + "\n";
  out += "lambda = " + io::format_double(fit.params.lam) + "\n";
  out += "omega = " + io::format_double(fit.params.omega) + "\n";
  out += "iterations = " + std::to_string(fit.iterations) + "\n";
  out += "final_loss = " + io::format_double(fit.loss_history.back()) + "\n";
  out += "reward_scale = " + io::format_double(scale) + "\n";
  out += "train_accuracy = " + io::format_double(train.accuracy) + "\n";
  out += "train_pearson = " + io::format_double(train.pearson) + "\n";
  out += "train_spearman = " + io::format_double(train.spearman) + "\n";
  out += "test_accuracy = " + io::format_double(test.accuracy) + "\n";
  out += "test_pearson = " + io::format_double(test.pearson) + "\n";
  out += "test_spearman = " + io::format_double(test.spearman) + "\n";
  return out;
}

std::string fit_trace_to_csv(const trex::FitResult& fit) {
  std::string out = "iter,loss,rho,eta,lambda,omega\n";
  for (std::size_t k = 0; k < fit.loss_history.size(); ++k) {
    const RewardParams& p = fit.param_history[k];
    out += std::to_string(k) + "," + io::format_double(fit.loss_history[k]) + "," +
           io::format_double(p.rho) + "," + io::format_double(p.eta) + "," +
           io::format_double(p.lam) + "," + io::format_double(p.omega) + "\n";
  }
  return out;
}

RewardParams read_fit_result(const std::string& path) {
  const io::Config cfg = io::Config::parse_file(path);
  RewardParams params;
  params.rho = cfg.get_double("rho", -1.0);
  params.eta = cfg.get_double("eta", -1.0);
  params.lam = cfg.get_double("lambda", -1.0);
  params.omega = cfg.get_double("omega", -1.0);
  validate(params);
  return params;
}

trex::FitResult cmd_irl(const PipelineConfig& cfg) {
  const PreparedData prep = prepare(cfg);
  const RankedDemoSet train_demos = make_ranked_demos(
      prep.train_slices, [](const FundTrajectory& t) { return realized_total_return(t); });

  const trex::FitResult fit = trex::fit_reward(train_demos, prep.train_market, cfg.trex_cfg);
  const trex::RankingMetrics train_metrics =
      trex::ranking_metrics(train_demos, fit.params, prep.train_market);

  const RankedDemoSet test_demos = make_ranked_demos(
      prep.test_slices, [](const FundTrajectory& t) { return realized_total_return(t); });
  const trex::RankingMetrics test_metrics =
      trex::ranking_metrics(test_demos, fit.params, prep.test_market);

  const std::string dir = path_join(cfg.out_dir, "irl");
  const double scale = cfg.trex_cfg.reward_scale > 0.0
                           ? cfg.trex_cfg.reward_scale
                           : 1.0 / std::max(prep.train_market.horizon(), 1);
  io::write_file_atomic(path_join(dir, "fit_result.txt"),
                        fit_result_to_text(fit, scale, train_metrics, test_metrics));
  io::write_file_atomic(path_join(dir, "trace.csv"), fit_trace_to_csv(fit));
  if (cfg.plots) {
    std::vector<io::PlotSeries> series(1);
    series[0].name = "loss";
    series[0].values = fit.loss_history;
    io::write_file_atomic(path_join(dir, "trace.svg"),
                          io::render_line_plot("pairwise ranking loss", "loss", series));
  }
  return fit;
}

std::string policy_to_text(const glearner::GaussianPolicy& policy, double beta) {
  const int n = static_cast<int>(policy.front().intercept.size());
  std::string out = "# gaussian policy\n";
  out += "n_sectors " + std::to_string(n) + "\n";
  out += "horizon " + std::to_string(static_cast<int>(policy.size()) - 1) + "\n";
  out += "beta " + io::format_double(beta) + "\n";
  for (std::size_t t = 0; t < policy.size(); ++t) {
    out += "step " + std::to_string(t) + "\n";
    out += "intercept";
    for (int i = 0; i < n; ++i) out += " " + io::format_double(policy[t].intercept[i]);
    out += "\ngain";
    append_matrix(&out, policy[t].gain);
    out += "\ncov";
    append_matrix(&out, policy[t].cov);
    out += "\n";
  }
  return out;
}

std::pair<glearner::GaussianPolicy, double> read_policy(const std::string& path) {
  std::stringstream stream(io::read_file(path));
  std::string line;
  int n = -1, horizon = -1;
  double beta = 0.0;
  glearner::GaussianPolicy policy;
  int current = -1;
  while (std::getline(stream, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tokens = parse_tokens(line);
    const std::string& tag = tokens[0];
    const auto numbers = [&](int expected) {
      if (static_cast<int>(tokens.size()) != expected + 1)
        throw io::data_error(path + ": '" + tag + "' expects " + std::to_string(expected) +
                             " values");
      Vec out(expected);
      for (int i = 0; i < expected; ++i) out[i] = std::stod(tokens[i + 1]);
      return out;
    };
    if (tag == "n_sectors") {
      n = std::stoi(tokens.at(1));
    } else if (tag == "horizon") {
      horizon = std::stoi(tokens.at(1));
      policy.resize(horizon + 1);
    } else if (tag == "beta") {
      beta = std::stod(tokens.at(1));
    } else if (tag == "step") {
      current = std::stoi(tokens.at(1));
      if (current < 0 || current > horizon)
        throw io::data_error(path + ": step index out of range");
    } else if (tag == "intercept") {
      policy.at(current).intercept = numbers(n);
    } else if (tag == "gain") {
      policy.at(current).gain = Eigen::Map<Mat>(numbers(n * n).data(), n, n).transpose();
    } else if (tag == "cov") {
      policy.at(current).cov = Eigen::Map<Mat>(numbers(n * n).data(), n, n).transpose();
    } else {
      throw io::data_error(path + ": unknown tag '" + tag + "'");
    }
  }
  if (n <= 0 || horizon < 0) throw io::data_error(path + ": missing policy header");
  for (const auto& step : policy)
    if (step.intercept.size() != n || step.gain.rows() != n || step.cov.rows() != n)
      throw io::data_error(path + ": incomplete policy step");
  return {policy, beta};
}

double calibrate_beta(const MarketModel& train_market, const RewardParams& params,
                      const glearner::PriorPolicy& prior, const Vec& benchmark,
                      const Vec& cashflow, const Vec& x0, double target_kl,
                      const PipelineConfig& cfg) {
  const auto kl_at = [&](double beta) {
    glearner::GlearnerConfig gcfg;
    gcfg.beta = beta;
    gcfg.gamma = cfg.gamma;
    gcfg.max_outer_iters = cfg.max_outer_iters;
    gcfg.outer_tol = cfg.outer_tol;
    const auto policy = glearner::solve(train_market, params, prior, benchmark, cashflow, gcfg);
    return glearner::kl_to_prior(policy.front(), x0, prior);
  };

  double lo = -8.0, hi = 8.0;  // log10(beta)
  // Shrink hi until the policy stays proper, then bisect on the KL target.
  double kl_hi = 0.0;
  for (int attempt = 0; attempt < 60; ++attempt) {
    try {
      kl_hi = kl_at(std::pow(10.0, hi));
      break;
    } catch (const std::exception&) {
      hi -= 0.25;
      if (hi <= lo) throw std::runtime_error("beta calibration failed: no proper policy");
    }
  }
  if (kl_hi <= target_kl) return std::pow(10.0, hi);
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (kl_at(std::pow(10.0, mid)) >= target_kl)
      hi = mid;
    else
      lo = mid;
  }
  return std::pow(10.0, hi);
}

RlArtifacts cmd_rl(const PipelineConfig& cfg, const trex::FitResult& fit) {
  const PreparedData prep = prepare(cfg);

  Vec x0_mean = Vec::Zero(prep.dataset.funds.front().n_sectors);
  for (const FundTrajectory& fund : prep.train_slices)
    x0_mean += fund.holdings.row(0).transpose();
  x0_mean /= static_cast<double>(prep.train_slices.size());

  RlArtifacts rl;
  rl.beta = cfg.beta;
  if (rl.beta <= 0.0)
    rl.beta = calibrate_beta(prep.train_market, fit.params, prep.prior,
                             prep.train_benchmark_mean, prep.train_cashflow_mean, x0_mean,
                             cfg.target_kl, cfg);

  glearner::GlearnerConfig gcfg;
  gcfg.beta = rl.beta;
  gcfg.gamma = cfg.gamma;
  gcfg.max_outer_iters = cfg.max_outer_iters;
  gcfg.outer_tol = cfg.outer_tol;

  rl.policy_train = glearner::solve(prep.train_market, fit.params, prep.prior,
                                    prep.train_benchmark_mean, prep.train_cashflow_mean, gcfg);
  rl.policy_test = glearner::solve(prep.test_market, fit.params, prep.prior,
                                   prep.test_benchmark_forecast, prep.test_cashflow_mean, gcfg);

  const std::string dir = path_join(cfg.out_dir, "rl");
  io::write_file_atomic(path_join(dir, "policy_train.txt"),
                        policy_to_text(rl.policy_train, rl.beta));
  io::write_file_atomic(path_join(dir, "policy_test.txt"),
                        policy_to_text(rl.policy_test, rl.beta));
  return rl;
}

std::pair<backtest::BacktestReport, backtest::BacktestReport> cmd_backtest(
    const PipelineConfig& cfg, const RlArtifacts& rl) {
  const PreparedData prep = prepare(cfg);

  const auto run_window = [](const glearner::GaussianPolicy& policy,
                             const std::vector<FundTrajectory>& slices, const Mat& returns) {
    std::vector<FundTrajectory> alter_egos;
    for (const FundTrajectory& fund : slices)
      alter_egos.push_back(backtest::counterfactual_rollout(
          policy, fund.holdings.row(0).transpose(), returns, fund.cashflow, fund.benchmark,
          fund.fund_id));
    return backtest::report(alter_egos, slices);
  };

  const backtest::BacktestReport train_report =
      run_window(rl.policy_train, prep.train_slices, prep.train_returns);
  const backtest::BacktestReport test_report =
      run_window(rl.policy_test, prep.test_slices, prep.test_returns);

  emit_backtest_csvs(cfg, "train", train_report, prep.train_slices);
  emit_backtest_csvs(cfg, "test", test_report, prep.test_slices);
  return {train_report, test_report};
}

void cmd_pipeline(const PipelineConfig& cfg) {
  if (cfg.sim_enabled) cmd_generate(cfg);
  const trex::FitResult fit = cmd_irl(cfg);
  const RlArtifacts rl = cmd_rl(cfg, fit);
  cmd_backtest(cfg, rl);
}

}  // namespace pipeline
}  // namespace alterego
