"""YAML run configuration.

Keys mirror the parameter dataclasses; see ``SCHEMA.md`` at the repository
root. Angles may be numbers or strings such as ``pi``, ``-pi/2``, ``3*pi/4``.
Every schema problem is raised as :class:`ConfigurationError` carrying the
dotted path of the offending field.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, fields
from typing import Any, Mapping, Optional, Tuple

import numpy as np
import yaml

from .errors import ConfigurationError, ValidationError
from .params import FanoutParams, SourceParams, split_from_t
from .spectral import BWFMatrix, CorrelatedGaussian, KGrid, SeparableGaussian, SingleBin, discretize

PSI_VARIANTS = ("direct", "paper")
DETECTOR_MODES = ("number_resolving", "bucket")
BWF_MODELS = {
    "single_bin": SingleBin,
    "separable_gaussian": SeparableGaussian,
    "correlated_gaussian": CorrelatedGaussian,
}
SWEEPABLE = ("source", "fanout", "grid", "bwf")

_ANGLE = re.compile(r"^\s*(-)?\s*(?:([0-9.eE+-]+)\s*\*\s*)?pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_real(value: Any, path: str) -> float:
    if isinstance(value, bool):
        raise ConfigurationError(f"expected a number, got {value!r}", path)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _ANGLE.match(value)
        if m:
            sign, num, den = m.groups()
            try:
                x = math.pi * (float(num) if num else 1.0) / (float(den) if den else 1.0)
            except ValueError:
                raise ConfigurationError(f"cannot parse {value!r}", path) from None
            return -x if sign else x
        try:
            return float(value)
        except ValueError:
            pass
    raise ConfigurationError(f"expected a number or pi expression, got {value!r}", path)


def parse_complex(value: Any, path: str) -> complex:
    """A real number, ``{re, im}`` or ``{abs2, phase}``."""
    if isinstance(value, Mapping):
        keys = set(value)
        if keys <= {"re", "im"}:
            return complex(parse_real(value.get("re", 0.0), f"{path}.re"), parse_real(value.get("im", 0.0), f"{path}.im"))
        if "abs2" in keys and keys <= {"abs2", "phase"}:
            a2 = parse_real(value["abs2"], f"{path}.abs2")
            if a2 < 0:
                raise ConfigurationError("abs2 must be >= 0", f"{path}.abs2")
            ph = parse_real(value.get("phase", 0.0), f"{path}.phase")
            return complex(math.sqrt(a2) * math.cos(ph), math.sqrt(a2) * math.sin(ph))
        raise ConfigurationError(f"expected keys re/im or abs2/phase, got {sorted(keys)}", path)
    return complex(parse_real(value, path))


def _section(raw: Mapping, name: str) -> Mapping:
    sec = raw.get(name, {}) or {}
    if not isinstance(sec, Mapping):
        raise ConfigurationError("expected a mapping", name)
    return sec


def _check_keys(sec: Mapping, allowed, path: str):
    for key in sec:
        if key not in allowed:
            raise ConfigurationError(f"unknown key (allowed: {', '.join(sorted(allowed))})", f"{path}.{key}")


def _build(cls, sec: Mapping, path: str, ints=(), splits=()):
    """Instantiate ``cls`` from a mapping; a coupler given only by ``t`` gets ``r`` filled in."""
    names = {f.name for f in fields(cls)} - {"beta_ring"}
    _check_keys(sec, names, path)
    kw = {}
    for key, val in sec.items():
        if key in ints:
            if not isinstance(val, int) or isinstance(val, bool):
                raise ConfigurationError(f"expected an integer, got {val!r}", f"{path}.{key}")
            kw[key] = val
        else:
            kw[key] = parse_real(val, f"{path}.{key}")
    for t_name, r_name in splits:
        if t_name in kw and r_name not in kw:
            try:
                kw[t_name], kw[r_name] = split_from_t(kw[t_name])
            except ValidationError as e:
                raise ConfigurationError(str(e), f"{path}.{t_name}") from None
        elif r_name in kw and t_name not in kw:
            try:
                kw[r_name], kw[t_name] = split_from_t(kw[r_name])
            except ValidationError as e:
                raise ConfigurationError(str(e), f"{path}.{r_name}") from None
    try:
        return cls(**kw)
    except ValidationError as e:
        raise ConfigurationError(str(e), path) from None


def _build_bwf_model(sec: Mapping, path: str):
    sec = dict(sec)
    name = sec.pop("model", "single_bin")
    if name not in BWF_MODELS:
        raise ConfigurationError(f"unknown model {name!r} (allowed: {', '.join(BWF_MODELS)})", f"{path}.model")
    cls = BWF_MODELS[name]
    if cls is SingleBin:
        _check_keys(sec, (), path)
        return SingleBin()
    _check_keys(sec, {f.name for f in fields(cls)}, path)
    kw = {k: (None if v is None else parse_real(v, f"{path}.{k}")) for k, v in sec.items()}
    try:
        return cls(**kw)
    except TypeError as e:
        raise ConfigurationError(str(e), path) from None
    except ValidationError as e:
        raise ConfigurationError(str(e), path) from None


@dataclass(frozen=True)
class Sweep:
    """One parameter (``section.field``) swept over explicit or seeded random values."""

    parameter: str
    values: Tuple[float, ...] = ()
    low: Optional[float] = None
    high: Optional[float] = None
    count: int = 0

    @property
    def is_random(self) -> bool:
        return not self.values

    def resolve(self, seed: Optional[int]) -> Tuple[float, ...]:
        if self.values:
            return self.values
        if seed is None:
            raise ConfigurationError("a random sweep needs --seed", "sweep.random")
        rng = np.random.default_rng(seed)
        return tuple(float(x) for x in rng.uniform(self.low, self.high, self.count))


def _build_sweep(sec: Mapping) -> Sweep:
    _check_keys(sec, {"parameter", "values", "random"}, "sweep")
    param = sec.get("parameter")
    if not isinstance(param, str) or param.count(".") != 1 or param.split(".")[0] not in SWEEPABLE:
        raise ConfigurationError(
            f"expected '<section>.<field>' with section in {SWEEPABLE}, got {param!r}", "sweep.parameter"
        )
    has_values, has_random = "values" in sec, "random" in sec
    if has_values == has_random:
        raise ConfigurationError("give exactly one of values / random", "sweep")
    if has_values:
        vals = sec["values"]
        if not isinstance(vals, list) or not vals:
            raise ConfigurationError("must be a nonempty list", "sweep.values")
        return Sweep(param, tuple(parse_real(v, f"sweep.values[{i}]") for i, v in enumerate(vals)))
    rnd = sec["random"]
    if not isinstance(rnd, Mapping):
        raise ConfigurationError("expected a mapping with low, high, count", "sweep.random")
    _check_keys(rnd, {"low", "high", "count"}, "sweep.random")
    for key in ("low", "high", "count"):
        if key not in rnd:
            raise ConfigurationError("missing", f"sweep.random.{key}")
    count = rnd["count"]
    if not isinstance(count, int) or isinstance(count, bool) or count < 1:
        raise ConfigurationError("must be a positive integer", "sweep.random.count")
    low, high = parse_real(rnd["low"], "sweep.random.low"), parse_real(rnd["high"], "sweep.random.high")
    if not high >= low:
        raise ConfigurationError("high must be >= low", "sweep.random.high")
    return Sweep(param, (), low, high, count)


TOP_KEYS = {
    "source", "fanout", "bwf", "grid", "beta", "beta_ring", "rep_rate",
    "psi_variant", "detector_mode", "sweep", "oracle",
}


@dataclass(frozen=True)
class OracleSettings:
    n_configs: int = 5
    tol: float = 1e-10
    max_bins: int = 2


@dataclass(frozen=True)
class RunConfig:
    source: SourceParams
    fanout: FanoutParams
    bwf_model: Any
    grid: KGrid
    beta: Optional[complex] = None
    beta_ring: Optional[complex] = None
    rep_rate: float = 1e6
    psi_variant: str = "direct"
    detector_mode: str = "number_resolving"
    sweep: Optional[Sweep] = None
    oracle: OracleSettings = OracleSettings()
    raw: Mapping = None  # parsed YAML, kept for the digest

    @property
    def bucket(self) -> bool:
        return self.detector_mode == "bucket"

    def bwf(self) -> BWFMatrix:
        try:
            return discretize(self.bwf_model, self.grid)
        except ValidationError as e:
            raise ConfigurationError(str(e), "bwf") from None

    def source_with_ring(self) -> SourceParams:
        """Source params carrying the configured ``beta_ring``, if any."""
        if self.beta_ring is None:
            return self.source
        return self.source.replace(beta_ring=self.beta_ring)

    def digest(self) -> str:
        canon = json.dumps(self.raw or {}, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(canon.encode()).hexdigest()

    def with_value(self, parameter: str, value: float) -> "RunConfig":
        """Copy with one ``section.field`` replaced; used by sweeps."""
        section, name = parameter.split(".")
        raw = json.loads(json.dumps(self.raw or {}, default=str))
        raw.setdefault(section, {})
        raw[section][name] = value
        if section in ("source", "fanout"):
            # an explicitly swept t keeps r consistent
            partner = {"t": "r", "r": "t", "t1": "r1", "r1": "t1", "t2": "r2", "r2": "t2", "t3": "r3", "r3": "t3"}
            raw[section].pop(partner.get(name, ""), None)
        raw.pop("sweep", None)
        return parse_config(raw)


def parse_config(raw: Any) -> RunConfig:
    if not isinstance(raw, Mapping):
        raise ConfigurationError("top level must be a mapping", "<root>")
    _check_keys(raw, TOP_KEYS, "<root>")
    source = _build(SourceParams, _section(raw, "source"), "source", splits=(("t", "r"),))
    fanout = _build(
        FanoutParams,
        _section(raw, "fanout"),
        "fanout",
        ints=("sigma", "l10_sign"),
        splits=(("t1", "r1"), ("t2", "r2"), ("t3", "r3")),
    )
    grid_sec = _section(raw, "grid")
    _check_keys(grid_sec, {"k0", "dk", "n_bins"}, "grid")
    n_bins = grid_sec.get("n_bins", 1)
    if not isinstance(n_bins, int) or isinstance(n_bins, bool) or n_bins < 1:
        raise ConfigurationError("must be a positive integer", "grid.n_bins")
    try:
        grid = KGrid(
            k0=parse_real(grid_sec.get("k0", 0.0), "grid.k0"),
            dk=parse_real(grid_sec.get("dk", 0.0), "grid.dk"),
            n_bins=n_bins,
        )
    except ValidationError as e:
        raise ConfigurationError(str(e), "grid") from None
    model = _build_bwf_model(_section(raw, "bwf"), "bwf")

    has_beta, has_ring = raw.get("beta") is not None, raw.get("beta_ring") is not None
    if has_beta == has_ring:
        raise ConfigurationError("give exactly one of beta / beta_ring", "beta")
    beta = parse_complex(raw["beta"], "beta") if has_beta else None
    beta_ring = parse_complex(raw["beta_ring"], "beta_ring") if has_ring else None

    rep_rate = parse_real(raw.get("rep_rate", 1e6), "rep_rate")
    if not rep_rate > 0:
        raise ConfigurationError("must be > 0", "rep_rate")
    psi = raw.get("psi_variant", "direct")
    if psi not in PSI_VARIANTS:
        raise ConfigurationError(f"must be one of {PSI_VARIANTS}", "psi_variant")
    mode = raw.get("detector_mode", "number_resolving")
    if mode not in DETECTOR_MODES:
        raise ConfigurationError(f"must be one of {DETECTOR_MODES}", "detector_mode")
    sweep = _build_sweep(_section(raw, "sweep")) if raw.get("sweep") else None

    osec = _section(raw, "oracle")
    _check_keys(osec, {"n_configs", "tol", "max_bins"}, "oracle")
    oracle = OracleSettings(
        n_configs=int(osec.get("n_configs", 5)),
        tol=parse_real(osec.get("tol", 1e-10), "oracle.tol"),
        max_bins=int(osec.get("max_bins", 2)),
    )
    if oracle.n_configs < 1 or not 1 <= oracle.max_bins <= 3:
        raise ConfigurationError("n_configs must be >= 1 and max_bins in 1..3", "oracle")
    return RunConfig(source, fanout, model, grid, beta, beta_ring, rep_rate, psi, mode, sweep, oracle, dict(raw))


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as e:
        raise ConfigurationError(f"cannot read config: {e}", "<file>") from None
    except yaml.YAMLError as e:
        raise ConfigurationError(f"not valid YAML: {e}", "<file>") from None
    return parse_config(raw)
