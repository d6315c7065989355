#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "alterego/backtest.hpp"
#include "alterego/glearner.hpp"
#include "alterego/market.hpp"
#include "alterego/pipeline.hpp"
#include "alterego/reward.hpp"
#include "alterego/simgen.hpp"
#include "alterego/trex.hpp"

namespace py = pybind11;
using namespace alterego;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sector-allocation recommendations: reward inference from ranked fund "
            "trajectories plus KL-regularized policy optimization";
  m.attr("__version__") = "0.1.0";

  py::class_<RewardParams>(m, "RewardParams")
      .def(py::init<>())
      .def(py::init([](double rho, double eta, double lam, double omega) {
             RewardParams p{rho, eta, lam, omega};
             validate(p);
             return p;
           }),
           py::arg("rho"), py::arg("eta"), py::arg("lam"), py::arg("omega"))
      .def_readwrite("rho", &RewardParams::rho)
      .def_readwrite("eta", &RewardParams::eta)
      .def_readwrite("lam", &RewardParams::lam)
      .def_readwrite("omega", &RewardParams::omega)
      .def("__repr__", [](const RewardParams& p) {
        return "RewardParams(rho=" + std::to_string(p.rho) + ", eta=" + std::to_string(p.eta) +
               ", lam=" + std::to_string(p.lam) + ", omega=" + std::to_string(p.omega) + ")";
      });

  py::class_<FundTrajectory>(m, "FundTrajectory")
      .def(py::init<>())
      .def_readwrite("fund_id", &FundTrajectory::fund_id)
      .def_readwrite("n_sectors", &FundTrajectory::n_sectors)
      .def_readwrite("horizon", &FundTrajectory::horizon)
      .def_readwrite("holdings", &FundTrajectory::holdings)
      .def_readwrite("trades", &FundTrajectory::trades)
      .def_readwrite("benchmark", &FundTrajectory::benchmark)
      .def_readwrite("cashflow", &FundTrajectory::cashflow)
      .def_readwrite("normalized", &FundTrajectory::normalized)
      .def("validate", [](const FundTrajectory& t) { validate(t); });

  py::class_<MarketModel>(m, "MarketModel")
      .def(py::init<Mat, Mat>(), py::arg("mean_returns"), py::arg("covariance"))
      .def_readonly("mean_returns", &MarketModel::mean_returns)
      .def_readonly("covariance", &MarketModel::covariance)
      .def_property_readonly("n_sectors", &MarketModel::n_sectors)
      .def_property_readonly("horizon", &MarketModel::horizon);

  py::class_<RankedDemoSet>(m, "RankedDemoSet")
      .def_readonly("trajectories", &RankedDemoSet::trajectories)
      .def_readonly("scores", &RankedDemoSet::scores)
      .def_readonly("order", &RankedDemoSet::order)
      .def("has_ties", &RankedDemoSet::has_ties, py::arg("tol") = 1e-12);

  m.def("target_value", &target_value, py::arg("x"), py::arg("benchmark_value"),
        py::arg("params"));
  m.def("expected_reward", &expected_reward, py::arg("x"), py::arg("u"), py::arg("params"),
        py::arg("r_bar"), py::arg("sigma"), py::arg("benchmark_value"), py::arg("cashflow"));
  m.def("propagate_state", &propagate_state, py::arg("x"), py::arg("u"),
        py::arg("realized_returns"));
  m.def("realized_total_return", &realized_total_return, py::arg("trajectory"));

  // trex
  py::class_<trex::TrexConfig>(m, "TrexConfig")
      .def(py::init<>())
      .def_readwrite("max_iters", &trex::TrexConfig::max_iters)
      .def_readwrite("learning_rate", &trex::TrexConfig::learning_rate)
      .def_readwrite("reward_scale", &trex::TrexConfig::reward_scale)
      .def_readwrite("init_params", &trex::TrexConfig::init_params)
      .def_readwrite("convergence_tol", &trex::TrexConfig::convergence_tol)
      .def_readwrite("seed", &trex::TrexConfig::seed);

  py::class_<trex::FitResult>(m, "FitResult")
      .def_readonly("params", &trex::FitResult::params)
      .def_readonly("loss_history", &trex::FitResult::loss_history)
      .def_readonly("param_history", &trex::FitResult::param_history)
      .def_readonly("iterations", &trex::FitResult::iterations);

  py::class_<trex::RankingMetrics>(m, "RankingMetrics")
      .def_readonly("accuracy", &trex::RankingMetrics::accuracy)
      .def_readonly("pearson", &trex::RankingMetrics::pearson)
      .def_readonly("spearman", &trex::RankingMetrics::spearman);

  m.def("make_ranked_demos", [](std::vector<FundTrajectory> trajectories) {
    return make_ranked_demos(std::move(trajectories),
                             [](const FundTrajectory& t) { return realized_total_return(t); });
  });
  m.def("cumulative_reward", &trex::cumulative_reward, py::arg("trajectory"),
        py::arg("params"), py::arg("market"));
  m.def("pairwise_loss", &trex::pairwise_loss, py::arg("demos"), py::arg("params"),
        py::arg("market"), py::arg("scale") = 0.0);
  m.def("fit_reward", &trex::fit_reward, py::arg("demos"), py::arg("market"),
        py::arg("config") = trex::TrexConfig{});
  m.def("ranking_metrics", &trex::ranking_metrics, py::arg("demos"), py::arg("params"),
        py::arg("market"));

  // glearner
  py::class_<glearner::PriorPolicy>(m, "PriorPolicy")
      .def(py::init([](Vec mean, Vec variances) {
             glearner::PriorPolicy prior{std::move(mean), std::move(variances)};
             validate(prior);
             return prior;
           }),
           py::arg("mean"), py::arg("variances"))
      .def_readwrite("mean", &glearner::PriorPolicy::mean)
      .def_readwrite("variances", &glearner::PriorPolicy::variances);

  py::class_<glearner::GlearnerConfig>(m, "GlearnerConfig")
      .def(py::init<>())
      .def_readwrite("beta", &glearner::GlearnerConfig::beta)
      .def_readwrite("gamma", &glearner::GlearnerConfig::gamma)
      .def_readwrite("max_outer_iters", &glearner::GlearnerConfig::max_outer_iters)
      .def_readwrite("outer_tol", &glearner::GlearnerConfig::outer_tol);

  py::class_<glearner::GaussianPolicyStep>(m, "GaussianPolicyStep")
      .def_readonly("intercept", &glearner::GaussianPolicyStep::intercept)
      .def_readonly("gain", &glearner::GaussianPolicyStep::gain)
      .def_readonly("cov", &glearner::GaussianPolicyStep::cov);

  m.def("solve", &glearner::solve, py::arg("market"), py::arg("params"), py::arg("prior"),
        py::arg("benchmark"), py::arg("cashflow"), py::arg("config"));
  m.def("recommend", &glearner::recommend, py::arg("policy_step"), py::arg("x"));
  m.def("kl_to_prior", &glearner::kl_to_prior, py::arg("policy_step"), py::arg("x"),
        py::arg("prior"));

  // market
  py::class_<market::ArmaSpec>(m, "ArmaSpec")
      .def(py::init<>())
      .def_readwrite("p", &market::ArmaSpec::p)
      .def_readwrite("q", &market::ArmaSpec::q);

  py::class_<market::ArmaFit>(m, "ArmaFit")
      .def_readonly("residuals", &market::ArmaFit::residuals)
      .def_readonly("resid_start", &market::ArmaFit::resid_start);

  m.def("normalize", &market::normalize, py::arg("trajectory"), py::arg("benchmark_series"));
  m.def("fit_forecaster", &market::fit_forecaster, py::arg("sector_returns"),
        py::arg("spec") = market::ArmaSpec{});
  m.def("forecast", &market::forecast, py::arg("fit"), py::arg("horizon"));
  m.def("estimate_covariance", &market::estimate_covariance, py::arg("residuals"),
        py::arg("diagonal_shrinkage") = 0.0);
  m.def("fit_prior", &market::fit_prior, py::arg("trades"));

  // simgen
  py::class_<simgen::SimConfig>(m, "SimConfig")
      .def(py::init(
               [](int n_sectors, int horizon, int n_funds) {
                 return simgen::default_config(n_sectors, horizon, n_funds);
               }),
           py::arg("n_sectors") = 11, py::arg("horizon") = 24, py::arg("n_funds") = 6)
      .def_readwrite("n_sectors", &simgen::SimConfig::n_sectors)
      .def_readwrite("horizon", &simgen::SimConfig::horizon)
      .def_readwrite("n_funds", &simgen::SimConfig::n_funds)
      .def_readwrite("planted", &simgen::SimConfig::planted)
      .def_readwrite("skill_levels", &simgen::SimConfig::skill_levels)
      .def_readwrite("trade_noise", &simgen::SimConfig::trade_noise)
      .def_readwrite("return_mean", &simgen::SimConfig::return_mean)
      .def_readwrite("return_cov", &simgen::SimConfig::return_cov)
      .def_readwrite("cashflow_scale", &simgen::SimConfig::cashflow_scale)
      .def_readwrite("seed", &simgen::SimConfig::seed);

  py::class_<simgen::MarketPath>(m, "MarketPath")
      .def_readonly("returns", &simgen::MarketPath::returns)
      .def_readonly("benchmark", &simgen::MarketPath::benchmark);

  m.def("generate_market_path", &simgen::generate_market_path, py::arg("config"));
  m.def("generate_funds", &simgen::generate_funds, py::arg("config"), py::arg("path"));

  // backtest
  py::class_<backtest::BacktestReport>(m, "BacktestReport")
      .def_readonly("fund_ids", &backtest::BacktestReport::fund_ids)
      .def_readonly("alter_egos", &backtest::BacktestReport::alter_egos)
      .def_readonly("outperformance", &backtest::BacktestReport::outperformance)
      .def_readonly("final_outperformance", &backtest::BacktestReport::final_outperformance)
      .def_readonly("group_mean", &backtest::BacktestReport::group_mean);

  m.def("counterfactual_rollout", &backtest::counterfactual_rollout, py::arg("policy"),
        py::arg("x0"), py::arg("realized_returns"), py::arg("cashflows"), py::arg("benchmark"),
        py::arg("fund_id") = "AE");
  m.def("outperformance", &backtest::outperformance, py::arg("alter_ego"), py::arg("manager"));

  // pipeline
  m.def("run_pipeline", [](const std::string& config_path) {
    pipeline::cmd_pipeline(pipeline::PipelineConfig::load(config_path));
  });
}
