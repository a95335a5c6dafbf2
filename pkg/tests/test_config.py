import pytest

from gdr.config import CONFIG_KEYS, RunConfig, dump_config, load_config, parse_config, parse_value
from gdr.errors import ConfigError


def test_minimal_config_uses_defaults():
    cfg = parse_config("algo = es\n")
    assert cfg.algo == "es" and cfg.lam == 100 and cfg.mu == 50 and cfg.sigma == 10.0
    assert cfg.actor_lr == 1e-3 and cfg.critic_lr == 3e-4 and cfg.tau == 0.005 and cfg.policy_delay == 2
    assert cfg.batch_size == 256 and cfg.buffer_size == 1_000_000


def test_full_parse_with_comments():
    cfg = parse_config("""
        # experiment
        algo = es_gdr   # drift regularized
        env = pendulum
        lambda = 10
        mu = 5
        epsilon = 0.1
        hidden = 16,16
    """)
    assert (cfg.algo, cfg.env, cfg.lam, cfg.mu, cfg.epsilon, cfg.hidden) == ("es_gdr", "pendulum", 10, 5, 0.1, (16, 16))
    assert cfg.regularization.kind == "l2" and cfg.regularization.epsilon == 0.1
    assert cfg.injection.kind == "standard"


@pytest.mark.parametrize("text, message", [
    ("env = pendulum", "missing key: algo"),
    ("algo = es\nfoo = 1", "line 2: unknown key: foo"),
    ("algo = es\nalgo = es", "line 2: duplicate key: algo"),
    ("algo = es\nlambda", "line 2: expected"),
    ("algo = sgd", "invalid value for key 'algo'"),
    ("algo = es\nsigma = -1", "invalid value for key 'sigma'"),
    ("algo = es\nsigma = abc", "invalid value for key 'sigma'"),
    ("algo = es\nsigma = nan", "invalid value for key 'sigma'"),
    ("algo = es\nlambda = 4\nmu = 5", "invalid value for key 'mu'"),
    ("algo = es_inject\nlambda = 1\nmu = 1", "invalid value for key 'lambda'"),
    ("algo = es\nenv = mars", "invalid value for key 'env'"),
    ("algo = es\ngenerations = 2.5", "invalid value for key 'generations'"),
])
def test_errors(text, message):
    with pytest.raises(ConfigError, match=message):
        parse_config(text)


def test_dump_round_trip(tmp_path):
    cfg = RunConfig("es_clip", env="static_target", seed=3, lam=8, mu=4, clip_factor=2.5, hidden=(8, 8))
    path = tmp_path / "run.cfg"
    path.write_text(dump_config(cfg))
    assert load_config(path) == cfg
    assert set(CONFIG_KEYS) >= {"lambda", "mu", "sigma", "epsilon", "n_steps", "eval_every", "output"}


def test_parallel_td3_ignores_mu():
    assert RunConfig("parallel_td3", lam=20).mu == 50


def test_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        load_config("/nonexistent/run.cfg")


def test_parse_value():
    assert parse_value("lambda", " 12 ") == 12
    with pytest.raises(ConfigError):
        parse_value("nope", "1")
