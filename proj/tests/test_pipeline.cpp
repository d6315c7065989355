#include <doctest.h>

#include "alterego/backtest.hpp"
#include "alterego/pipeline.hpp"
#include "alterego/reward.hpp"

#include <filesystem>
#include <map>

using namespace alterego;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("alterego_pipe_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

pipeline::PipelineConfig small_config(const std::string& out_dir) {
  io::Config raw;
  raw.set("sim.enabled", "true");
  raw.set("sim.n_sectors", "4");
  raw.set("sim.horizon", "30");
  raw.set("sim.n_funds", "4");
  raw.set("data.train_months", "22");
  raw.set("trex.max_iters", "40");
  raw.set("trex.learning_rate", "1");
  raw.set("trex.reward_scale", "3");
  raw.set("glearner.beta", "10");
  raw.set("seed", "99");
  pipeline::PipelineConfig cfg = pipeline::PipelineConfig::from_config(raw);
  cfg.out_dir = out_dir;
  return cfg;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file())
      out[fs::relative(entry.path(), root).string()] = io::read_file(entry.path().string());
  return out;
}

}  // namespace

TEST_CASE("pipeline config round-trips through the flat file format") {
  const pipeline::PipelineConfig cfg = small_config("somewhere");
  const io::Config emitted = cfg.to_config();
  const io::Config reparsed = io::Config::parse(emitted.emit());
  CHECK(emitted == reparsed);
  const pipeline::PipelineConfig back = pipeline::PipelineConfig::from_config(reparsed);
  CHECK(back.sim.n_sectors == cfg.sim.n_sectors);
  CHECK(back.trex_cfg.reward_scale == doctest::Approx(cfg.trex_cfg.reward_scale));
  CHECK(back.beta == doctest::Approx(cfg.beta));
  CHECK(back.train_months == cfg.train_months);
}

TEST_CASE("cmd_pipeline is bit-identical across runs with one seed") {
  TempDir a("deta"), b("detb");
  pipeline::cmd_pipeline(small_config(a.path.string()));
  pipeline::cmd_pipeline(small_config(b.path.string()));
  const auto tree_a = read_tree(a.path);
  const auto tree_b = read_tree(b.path);
  REQUIRE(tree_a.size() == tree_b.size());
  REQUIRE(tree_a.size() >= 9);
  for (const auto& [name, content] : tree_a) {
    INFO(name);
    CHECK(content == tree_b.at(name));
  }
}

TEST_CASE("changing the seed changes the dataset") {
  TempDir a("seeda"), b("seedb");
  pipeline::PipelineConfig cfg_a = small_config(a.path.string());
  pipeline::PipelineConfig cfg_b = small_config(b.path.string());
  cfg_b.seed = 100;
  cfg_b.sim.seed = 100;
  pipeline::cmd_generate(cfg_a);
  pipeline::cmd_generate(cfg_b);
  CHECK(io::read_file((a.path / "dataset/funds.csv").string()) !=
        io::read_file((b.path / "dataset/funds.csv").string()));
}

TEST_CASE("policy files round-trip") {
  TempDir dir("pol");
  pipeline::PipelineConfig cfg = small_config(dir.path.string());
  pipeline::cmd_generate(cfg);
  const trex::FitResult fit = pipeline::cmd_irl(cfg);
  const pipeline::RlArtifacts rl = pipeline::cmd_rl(cfg, fit);

  const auto [train_policy, beta] =
      pipeline::read_policy((dir.path / "rl/policy_train.txt").string());
  CHECK(beta == doctest::Approx(rl.beta));
  REQUIRE(train_policy.size() == rl.policy_train.size());
  for (std::size_t t = 0; t < train_policy.size(); ++t) {
    CHECK((train_policy[t].intercept - rl.policy_train[t].intercept).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((train_policy[t].gain - rl.policy_train[t].gain).cwiseAbs().maxCoeff() == 0.0);
    CHECK((train_policy[t].cov - rl.policy_train[t].cov).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("fit result file round-trips the parameters") {
  TempDir dir("fit");
  pipeline::PipelineConfig cfg = small_config(dir.path.string());
  pipeline::cmd_generate(cfg);
  const trex::FitResult fit = pipeline::cmd_irl(cfg);
  const RewardParams params =
      pipeline::read_fit_result((dir.path / "irl/fit_result.txt").string());
  CHECK(params.rho == doctest::Approx(fit.params.rho).epsilon(1e-15));
  CHECK(params.eta == doctest::Approx(fit.params.eta).epsilon(1e-15));
  CHECK(params.lam == doctest::Approx(fit.params.lam).epsilon(1e-15));
  CHECK(params.omega == doctest::Approx(fit.params.omega).epsilon(1e-15));
}

TEST_CASE("replaying each manager through the backtest machinery gives zero curves") {
  TempDir dir("replay");
  pipeline::PipelineConfig cfg = small_config(dir.path.string());
  pipeline::cmd_generate(cfg);
  const pipeline::PreparedData prep = pipeline::prepare(cfg);
  for (const FundTrajectory& fund : prep.train_slices) {
    glearner::GaussianPolicy replay;
    for (int t = 0; t <= fund.horizon; ++t) {
      glearner::GaussianPolicyStep step;
      step.intercept = fund.trades.row(t).transpose();
      step.gain = Mat::Zero(fund.n_sectors, fund.n_sectors);
      step.cov = Mat::Identity(fund.n_sectors, fund.n_sectors);
      replay.push_back(step);
    }
    const FundTrajectory ae = backtest::counterfactual_rollout(
        replay, fund.holdings.row(0).transpose(), prep.train_returns, fund.cashflow,
        fund.benchmark, fund.fund_id);
    const Vec curve = backtest::outperformance(ae, fund);
    CHECK(curve.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
}

TEST_CASE("prepare validates the split and missing files") {
  TempDir dir("bad");
  pipeline::PipelineConfig cfg = small_config(dir.path.string());
  cfg.train_months = 30;  // no test window left
  pipeline::cmd_generate(cfg);
  CHECK_THROWS_AS(pipeline::prepare(cfg), io::config_error);

  pipeline::PipelineConfig missing = small_config((dir.path / "nope").string());
  missing.sim_enabled = false;
  missing.trajectories_path = (dir.path / "does_not_exist.csv").string();
  CHECK_THROWS_AS(pipeline::prepare(missing), io::config_error);
}

TEST_CASE("implied sector returns reproduce the generator's market path") {
  TempDir dir("imp");
  pipeline::PipelineConfig cfg = small_config(dir.path.string());
  simgen::SimConfig sim = cfg.sim;
  sim.seed = cfg.seed;
  const simgen::MarketPath path = simgen::generate_market_path(sim);
  pipeline::cmd_generate(cfg);
  const pipeline::PreparedData prep = pipeline::prepare(cfg);
  // Train window returns equal the generated ones up to ingest round-off.
  CHECK((prep.train_returns - path.returns.topRows(cfg.train_months)).cwiseAbs().maxCoeff() <
        1e-9);
}
