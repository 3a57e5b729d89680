import math
from pathlib import Path

import pytest

from pathghz.config import load_config, parse_config, parse_real
from pathghz.errors import ConfigurationError
from pathghz.spectral import CorrelatedGaussian, SingleBin

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

BASE = {"beta": 0.3}


@pytest.mark.parametrize(
    "text, value",
    [("pi", math.pi), ("-pi/2", -math.pi / 2), ("3*pi/4", 3 * math.pi / 4), ("0.25", 0.25), (2, 2.0)],
)
def test_parse_angles(text, value):
    assert parse_real(text, "x") == pytest.approx(value)


@pytest.mark.parametrize("bad", ["tau", True, None, [1]])
def test_parse_real_rejects(bad):
    with pytest.raises(ConfigurationError):
        parse_real(bad, "source.phi")


def test_defaults():
    cfg = parse_config(BASE)
    assert cfg.source.is_balanced
    assert isinstance(cfg.bwf_model, SingleBin)
    assert cfg.beta == 0.3 and cfg.beta_ring is None


def test_t_fills_r():
    cfg = parse_config({**BASE, "source": {"t": 0.6}, "fanout": {"r2": 0.8}})
    assert cfg.source.r == pytest.approx(0.8)
    assert cfg.fanout.t2 == pytest.approx(0.6)


@pytest.mark.parametrize(
    "raw, path",
    [
        ({}, "beta"),
        ({"beta": 0.1, "beta_ring": 0.2}, "beta"),
        ({**BASE, "source": {"tee": 1}}, "source.tee"),
        ({**BASE, "source": {"t": 1.5}}, "source.t"),
        ({**BASE, "source": {"t": 0.6, "r": 0.6}}, "source"),
        ({**BASE, "fanout": {"sigma": 0.5}}, "fanout.sigma"),
        ({**BASE, "grid": {"n_bins": 0}}, "grid.n_bins"),
        ({**BASE, "bwf": {"model": "lorentzian"}}, "bwf.model"),
        ({**BASE, "bwf": {"model": "correlated_gaussian", "sigma_s": -1, "sigma_a": 1}}, "bwf"),
        ({**BASE, "psi_variant": "both"}, "psi_variant"),
        ({**BASE, "detector_mode": "pnr"}, "detector_mode"),
        ({**BASE, "sweep": {"parameter": "fanout.L11", "values": []}}, "sweep.values"),
        ({**BASE, "sweep": {"parameter": "beta", "values": [1]}}, "sweep.parameter"),
        ({**BASE, "sweep": {"parameter": "fanout.L11"}}, "sweep"),
        ({**BASE, "sweep": {"parameter": "fanout.L11", "random": {"low": 1, "high": 0, "count": 2}}}, "sweep.random.high"),
        ({**BASE, "rep_rate": 0}, "rep_rate"),
        ({**BASE, "colour": 1}, "<root>.colour"),
    ],
)
def test_schema_errors_carry_path(raw, path):
    with pytest.raises(ConfigurationError) as exc:
        parse_config(raw)
    assert exc.value.path == path


def test_beta_forms():
    assert parse_config({"beta": {"abs2": 0.1}}).beta == pytest.approx(math.sqrt(0.1))
    assert parse_config({"beta": {"re": 0.1, "im": 0.2}}).beta == 0.1 + 0.2j
    assert parse_config({"beta_ring": 0.5}).beta_ring == 0.5


def test_random_sweep_needs_seed():
    cfg = parse_config({**BASE, "sweep": {"parameter": "fanout.L11", "random": {"low": 0, "high": 1, "count": 3}}})
    with pytest.raises(ConfigurationError):
        cfg.sweep.resolve(None)
    assert cfg.sweep.resolve(5) == cfg.sweep.resolve(5)
    assert cfg.sweep.resolve(5) != cfg.sweep.resolve(6)


def test_with_value_replaces_field():
    cfg = parse_config({**BASE, "source": {"t": 0.6}})
    moved = cfg.with_value("source.t", 0.8)
    assert moved.source.t == 0.8 and moved.source.r == pytest.approx(0.6)
    assert moved.sweep is None


def test_digest_is_stable():
    assert parse_config(BASE).digest() == parse_config(dict(BASE)).digest()
    assert parse_config(BASE).digest() != parse_config({"beta": 0.31}).digest()


@pytest.mark.parametrize("name", ["ideal.yaml", "sweep_lengths.yaml", "correlated.yaml"])
def test_shipped_configs_load(name):
    cfg = load_config(CONFIGS / name)
    cfg.bwf()


def test_correlated_config_model():
    assert isinstance(load_config(CONFIGS / "correlated.yaml").bwf_model, CorrelatedGaussian)


def test_bad_yaml(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("source: [unclosed\n")
    with pytest.raises(ConfigurationError):
        load_config(p)
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "missing.yaml")
