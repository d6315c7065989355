"""End-to-end smoke test for the python bindings.

Runs against the extension module in the build tree (PYTHONPATH is set by
ctest). Exercises the generate -> rank -> fit -> solve -> rollout loop and a
handful of invariants; assertions are loose so this stays a smoke test.
"""

import os
import subprocess
import sys
import tempfile

import numpy as np

import _core as ae


def test_reward_primitives():
    params = ae.RewardParams(rho=1.0, eta=1.0, lam=0.0, omega=1.0)
    x = np.array([1.0])
    u = np.array([1.0])
    r = ae.expected_reward(x, u, params, np.array([0.0]), np.zeros((1, 1)), 2.0, 0.0)
    assert abs(r - (-1.0)) < 1e-12, r

    nxt = ae.propagate_state(np.array([1.0, 0.0]), np.array([0.0, 1.0]),
                             np.array([0.1, -0.5]))
    assert np.allclose(nxt, [1.1, 0.5])


def test_pipeline_loop():
    cfg = ae.SimConfig(n_sectors=5, horizon=24, n_funds=5)
    cfg.seed = 123
    path = ae.generate_market_path(cfg)
    demos = ae.generate_funds(cfg, path)
    assert len(demos.trajectories) == 5
    assert not demos.has_ties()

    means = np.tile(np.asarray(cfg.return_mean) / 12.0, (cfg.horizon + 1, 1))
    market = ae.MarketModel(means, np.asarray(cfg.return_cov) / 12.0)

    tcfg = ae.TrexConfig()
    tcfg.max_iters = 60
    tcfg.learning_rate = 1.0
    tcfg.reward_scale = 3.0
    fit = ae.fit_reward(demos, market, tcfg)
    losses = fit.loss_history
    assert all(b < a for a, b in zip(losses, losses[1:])), "loss must decrease"

    metrics = ae.ranking_metrics(demos, fit.params, market)
    init_metrics = ae.ranking_metrics(demos, ae.TrexConfig().init_params, market)
    assert metrics.accuracy >= init_metrics.accuracy

    trades = np.vstack([np.asarray(t.trades) for t in demos.trajectories])
    prior = ae.fit_prior(trades)
    gcfg = ae.GlearnerConfig()
    gcfg.beta = 10.0
    benchmark = np.asarray(demos.trajectories[0].benchmark)
    cashflow = np.asarray(demos.trajectories[0].cashflow)
    policy = ae.solve(market, fit.params, prior, benchmark, cashflow, gcfg)
    assert len(policy) == cfg.horizon + 1

    fund = demos.trajectories[0]
    rollout = ae.counterfactual_rollout(policy, np.asarray(fund.holdings)[0],
                                        np.asarray(path.returns), cashflow, benchmark, "AE")
    curve = ae.outperformance(rollout, fund)
    assert curve[0] == 0.0
    assert np.isfinite(curve).all()

    kl = ae.kl_to_prior(policy[0], np.asarray(fund.holdings)[0], prior)
    assert kl >= 0.0


def test_arma_and_covariance():
    rng = np.random.default_rng(7)
    n_obs = 400
    series = np.zeros((n_obs, 2))
    for t in range(1, n_obs):
        series[t] = 0.5 * series[t - 1] + rng.normal(0.0, 0.01, size=2)
    fit = ae.fit_forecaster(series, ae.ArmaSpec())
    forecasts = ae.forecast(fit, 6)
    assert forecasts.shape == (6, 2)
    cov = ae.estimate_covariance(np.asarray(fit.residuals))
    assert np.allclose(cov, cov.T)
    assert np.linalg.eigvalsh(cov).min() >= 0.0


def test_cli_pipeline_runs():
    cli = os.environ.get("ALTEREGO_CLI")
    if not cli:
        return
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    config = os.path.join(os.path.dirname(root), "configs", "fixture.cfg")
    with tempfile.TemporaryDirectory() as out_dir:
        subprocess.run([cli, "pipeline", "--config", config, "--out-dir", out_dir],
                       check=True)
        assert os.path.exists(os.path.join(out_dir, "irl", "fit_result.txt"))
        assert os.path.exists(os.path.join(out_dir, "backtest", "test_group.csv"))


def main():
    tests = [test_reward_primitives, test_pipeline_loop, test_arma_and_covariance,
             test_cli_pipeline_runs]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
