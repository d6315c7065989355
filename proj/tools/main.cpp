#include "alterego/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

namespace {

using alterego::pipeline::PipelineConfig;

// Exit codes: 1 configuration, 2 data, 3 numerical.
int run(const std::string& command, PipelineConfig& cfg) {
  using namespace alterego;
  if (command == "generate") {
    pipeline::cmd_generate(cfg);
  } else if (command == "irl") {
    pipeline::cmd_irl(cfg);
  } else if (command == "rl") {
    const RewardParams params =
        pipeline::read_fit_result(cfg.out_dir + "/irl/fit_result.txt");
    trex::FitResult fit;
    fit.params = params;
    fit.loss_history.push_back(0.0);
    fit.param_history.push_back(params);
    pipeline::cmd_rl(cfg, fit);
  } else if (command == "backtest") {
    pipeline::RlArtifacts rl;
    auto [train_policy, beta] = pipeline::read_policy(cfg.out_dir + "/rl/policy_train.txt");
    rl.policy_train = std::move(train_policy);
    rl.beta = beta;
    rl.policy_test = pipeline::read_policy(cfg.out_dir + "/rl/policy_test.txt").first;
    pipeline::cmd_backtest(cfg, rl);
  } else {
    pipeline::cmd_pipeline(cfg);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sector-allocation recommendations: ranked-demonstration reward "
               "inference plus KL-regularized policy optimization"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string seed_text;
  bool plots = false;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "pipeline config file")->required();
    sub->add_option("--out-dir", out_dir, "output directory (overrides out.dir)");
    sub->add_option("--seed", seed_text, "random seed (overrides the config)");
    sub->add_flag("--plots", plots, "emit SVG plots beside the CSV outputs");
  };

  add_common(app.add_subcommand("generate", "write the synthetic fund dataset"));
  add_common(app.add_subcommand("irl", "fit the reward from ranked trajectories"));
  add_common(app.add_subcommand("rl", "solve the allocation policies"));
  add_common(app.add_subcommand("backtest", "roll policies into AE - PM curves"));
  add_common(app.add_subcommand("pipeline", "generate/ingest -> irl -> rl -> backtest"));

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig cfg = PipelineConfig::load(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!seed_text.empty()) {
      cfg.seed = std::stoull(seed_text);
      cfg.sim.seed = cfg.seed;
      cfg.trex_cfg.seed = cfg.seed;
    }
    if (plots) cfg.plots = true;
    return run(app.get_subcommands().front()->get_name(), cfg);
  } catch (const alterego::io::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const alterego::io::data_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  }
}
