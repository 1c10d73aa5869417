import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))
import src.pdelab.config as config
from src.pdelab.config import ConfigError, RunConfig


def test_save_conf_round_trip_updates_globals(tmp_path):
    target = tmp_path / "pdelab.conf"
    original_conf = dict(config.CONF)
    try:
        config.save_conf(
            {
                "quad_tol": "1e-9",
                "series_terms": 120,
                "log_level": "info",
                "alpha": 1,
                "zeta": 2,
                "bad key": "ignored",
            },
            path=target,
        )

        text = target.read_text(encoding="utf-8")
        assert "# pdelab configuration file" in text
        assert "QUAD_TOL=1e-9" in text
        assert "SERIES_TERMS=120" in text
        assert "bad key" not in text

        lines = text.splitlines()
        alpha_idx = next(i for i, ln in enumerate(lines) if ln.startswith("ALPHA="))
        zeta_idx = next(i for i, ln in enumerate(lines) if ln.startswith("ZETA="))
        assert alpha_idx < zeta_idx

        conf = config.load_conf(target)
        assert conf["ALPHA"] == "1"
        assert conf["ZETA"] == "2"

        assert config.QUAD_TOL == 1e-9
        assert config.SERIES_TERMS == 120
        assert config.LOG_LEVEL == "INFO"
    finally:
        config._apply_conf(original_conf)


def test_save_conf_normalizes_invalid_values(tmp_path):
    target = tmp_path / "pdelab_invalid.conf"
    original_conf = dict(config.CONF)
    try:
        config.save_conf(
            {
                "QUAD_LIMIT": "10",
                "THETA_SAMPLES": "oops",
                "BLOWUP_THRESHOLD": "-5",
                "LOG_LEVEL": "chatty",
                "UMASK": "0o077",
            },
            path=target,
        )

        text = target.read_text(encoding="utf-8")
        assert "THETA_SAMPLES=oops" in text
        assert "BLOWUP_THRESHOLD=-5" in text

        assert config.QUAD_LIMIT == 50
        assert config.THETA_SAMPLES == 1024
        assert config.BLOWUP_THRESHOLD == 1e8
        assert config.LOG_LEVEL == "WARNING"
        assert config.UMASK == 0o077
    finally:
        config._apply_conf(original_conf)


def test_load_conf_skips_comments_and_missing_files(tmp_path):
    target = tmp_path / "run.conf"
    target.write_text("# comment\n\ns = 0.4\nphi=gaussian(1,10,0)\n", encoding="utf-8")
    assert config.load_conf(target) == {"s": "0.4", "phi": "gaussian(1,10,0)"}
    assert config.load_conf(tmp_path / "absent.conf") == {}


def test_run_config_precedence(tmp_path):
    conf = tmp_path / "heat.conf"
    conf.write_text("s=0.3\nN=20\nsteps=10\n", encoding="utf-8")
    cfg = RunConfig.build(
        "solve heat",
        file=conf,
        overrides=["s=0.4", "steps=50", "times=0.1,0.2", "seed=7"],
        flags={"s": "0.45", "N": None},
        out_dir=tmp_path / "out",
    )
    assert cfg.get_float("s", 0.0) == 0.45
    assert cfg.get_int("N", 0) == 20
    assert cfg.get_int("steps", 0) == 50
    assert cfg.output_times == (0.1, 0.2)
    assert cfg.seed == 7
    assert cfg.out_dir == tmp_path / "out"
    assert "times" not in cfg.params


def test_run_config_out_key_wins_over_default_directory(tmp_path):
    cfg = RunConfig.build("solve heat", overrides=[f"out={tmp_path / 'custom'}"])
    assert cfg.out_dir == tmp_path / "custom"
    assert RunConfig.build("solve heat").out_dir.name == "solve-heat"


@pytest.mark.parametrize("item", ["novalue", "=3"])
def test_run_config_rejects_malformed_override(item):
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.build("solve heat", overrides=[item])
    assert excinfo.value.key == item


def test_run_config_missing_file(tmp_path):
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.build("solve heat", file=tmp_path / "nope.conf")
    assert excinfo.value.key == "config"


def test_typed_getters_name_the_bad_key():
    cfg = RunConfig("x", {"s": "abc", "N": "2", "dt": "inf", "method": "sor", "phi": "wobble(1)"})
    with pytest.raises(ConfigError) as excinfo:
        cfg.get_float("s", 0.5)
    assert excinfo.value.key == "s"
    with pytest.raises(ConfigError):
        cfg.get_int("N", 10, minimum=4)
    with pytest.raises(ConfigError):
        cfg.get_float("dt", 0.1)
    with pytest.raises(ConfigError):
        cfg.get_choice("method", "jacobi", ("jacobi", "gauss-seidel"))
    with pytest.raises(ConfigError) as excinfo:
        cfg.get_profile("phi", "hat")
    assert excinfo.value.key == "phi"


def test_getters_fall_back_to_defaults_and_track_usage():
    cfg = RunConfig("x", {"levels": "10,20,40", "extra": "1", "g": "none"})
    assert cfg.get_floats("levels", ()) == (10.0, 20.0, 40.0)
    assert cfg.get_float("s", 0.25) == 0.25
    assert cfg.get_profile("g", "hat") is None
    assert cfg.get_profile("phi", "hat").name == "hat"
    assert cfg.unused() == ["extra"]


def test_exclusive_keys_conflict():
    cfg = RunConfig("x", {"s": "0.4", "dt": "0.001"})
    with pytest.raises(ConfigError) as excinfo:
        cfg.exclusive("s", "dt")
    assert excinfo.value.key == "dt"
    RunConfig("x", {"s": "0.4"}).exclusive("s", "dt")


def test_as_dict_is_sorted():
    cfg = RunConfig("solve wave", {"b": "2", "a": "1"}, output_times=(0.5,), seed=3)
    assert cfg.as_dict() == {"command": "solve wave", "params": {"a": "1", "b": "2"}, "times": [0.5], "seed": 3}
