"""Scenario runners behind the CLI.

Each scenario returns a list of :class:`Table` objects (one CSV each) and
raises :class:`NumericalCheckError` when an internal check fails. Tables hold
plain Python values so that serialization is deterministic.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .circuit import build_fanout, heisenberg_rewrite
from .config import RunConfig
from .errors import ConfigurationError, NumericalCheckError
from .fock import FockBasisState
from .oracle import compare, dense_expand, detector_pair_operator, enumerate_pair_amplitudes, fanout_histories
from .params import FANOUT_LENGTHS, FanoutParams, PairAmplitudeTable, SourceParams
from .pipeline import enumerate_patterns, expand_output, generation_rate, run_ghz
from .source import (
    OMEGA,
    bell_fidelity,
    effective_beta,
    pair_amplitudes,
    pair_creation_operator,
    two_photon_state,
)
from .spectral import (
    BWFMatrix,
    CorrelatedGaussian,
    KGrid,
    SingleBin,
    discretize,
    gaussian_purity,
    schmidt,
)

CONSERVATION_TOL = 1e-10
SCENARIOS = ("bell", "ghz", "rate", "schmidt", "oracle-check", "sweep")


@dataclass
class Table:
    name: str
    header: Sequence[str]
    rows: List[tuple]


def state_label(state: FockBasisState) -> str:
    """``port@bin`` tokens joined by ``;``, a power written as ``^n``."""
    parts = []
    for mode, n in state:
        tok = f"{mode.channel}@{mode.kbin}"
        parts.append(f"{tok}^{n}" if n > 1 else tok)
    return ";".join(parts) or "vac"


def pair_table_rows(table: PairAmplitudeTable) -> List[tuple]:
    rows = []
    for (p, q) in sorted(table.entries):
        v = table.entries[(p, q)]
        for i in range(v.shape[0]):
            for j in range(v.shape[1]):
                rows.append((i, j, p, q, float(v[i, j].real), float(v[i, j].imag)))
    return rows


def bwf_rows(bwf: BWFMatrix) -> List[tuple]:
    k = bwf.grid.k
    return [(i, j, float(k[i]), float(k[j]), v.real, v.imag) for i, j, v in bwf.rows()]


def _beta(cfg: RunConfig, raw_norm: float) -> complex:
    return cfg.beta if cfg.beta is not None else effective_beta(raw_norm, cfg.beta_ring)


def scenario_bell(cfg: RunConfig, seed: Optional[int] = None) -> List[Table]:
    bwf = cfg.bwf()
    table = pair_amplitudes(cfg.source, bwf, cfg.psi_variant)
    summary = [
        (
            cfg.source.t,
            cfg.source.phi,
            table.raw_norm,
            table.raw_norm ** 2,
            bell_fidelity(two_photon_state(cfg.source, bwf, cfg.psi_variant)) if bwf.grid.n_bins == 1 else float("nan"),
        )
    ]
    w2 = bwf.grid.weight ** 2
    support = [(p, q, float(np.sum(np.abs(table.entries[(p, q)]) ** 2)) * w2) for p, q in sorted(OMEGA)]
    return [
        Table("bell", ("t", "phi", "raw_norm", "beta_sq_over_beta_ring_sq", "fidelity_psi_minus"), summary),
        Table("pair_weights", ("p", "q", "weight"), support),
        Table("pair_table", ("k1_index", "k2_index", "p", "q", "re", "im"), pair_table_rows(table)),
    ]


def _ghz_tables(cfg: RunConfig, run, prefix: str = "") -> List[Table]:
    rows = []
    for r in run.reports:
        rows.append(
            r.kbins
            + r.wavevectors
            + (r.probability, r.theta_measured, r.theta_formula, r.fidelity, r.gamma)
        )
    header = (
        "kp1_index", "kp2_index", "k1_index", "k2_index", "kp1", "kp2", "k1", "k2",
        "probability", "theta_measured", "theta_formula", "fidelity", "gamma",
    )
    patterns = [
        (";".join(f"{p}={n}" for p, n in key) or "vac", prob)
        for key, prob in enumerate_patterns(run.detector_ket).items()
    ]
    state_rows = []
    if not run.fourfold.empty:
        for s, a in sorted(run.fourfold.conditional, key=lambda sa: sa[0]):
            state_rows.append((state_label(s), a.real, a.imag))
    summary = [
        (
            run.beta.real,
            run.beta.imag,
            run.raw_norm,
            run.fourfold.probability,
            run.other_probability,
            run.expansion.four_photon_norm,
            run.expansion.truncated_norm_sq(),
        )
    ]
    return [
        Table(prefix + "ghz", header, rows),
        Table(
            prefix + "ghz_summary",
            ("beta_re", "beta_im", "raw_norm", "fourfold_probability", "non_ghz_fourfold_probability",
             "four_photon_norm", "truncated_norm_sq"),
            summary,
        ),
        Table(prefix + "patterns", ("pattern", "probability"), patterns),
        Table(prefix + "fourfold_state", ("state", "re", "im"), state_rows),
    ]


def check_conservation(run) -> float:
    total = math.fsum(enumerate_patterns(run.detector_ket).values())
    dev = abs(total - run.expansion.truncated_norm_sq())
    if dev > CONSERVATION_TOL:
        raise NumericalCheckError("probability-conservation", f"pattern probabilities miss the state norm by {dev!r}")
    return dev


def _run(cfg: RunConfig):
    bwf = cfg.bwf()
    return run_ghz(cfg.source_with_ring(), cfg.fanout, bwf, beta=cfg.beta, psi_variant=cfg.psi_variant, bucket=cfg.bucket)


def scenario_ghz(cfg: RunConfig, seed: Optional[int] = None) -> List[Table]:
    run = _run(cfg)
    check_conservation(run)
    return _ghz_tables(cfg, run)


def scenario_rate(cfg: RunConfig, seed: Optional[int] = None) -> List[Table]:
    run = _run(cfg)
    b2 = abs(run.beta) ** 2
    row = (b2, cfg.rep_rate, (b2 / 4) ** 2, run.fourfold.probability, generation_rate(run.beta, cfg.rep_rate))
    return [Table("rate", ("beta_abs2", "rep_rate_hz", "probability_closed_form", "probability_simulated", "rate_hz"), [row])]


def scenario_schmidt(cfg: RunConfig, seed: Optional[int] = None) -> List[Table]:
    bwf = cfg.bwf()
    res = schmidt(bwf)
    model = cfg.bwf_model
    # separable models are pure in the continuum
    closed = gaussian_purity(model.sigma_s, model.sigma_a) if isinstance(model, CorrelatedGaussian) else 1.0
    return [
        Table("schmidt", ("index", "coefficient"), [(i, float(c)) for i, c in enumerate(res.coefficients)]),
        Table("schmidt_summary", ("purity", "schmidt_number", "continuum_purity"), [(res.purity, res.schmidt_number, closed)]),
        Table("bwf", ("k1_index", "k2_index", "k1", "k2", "re", "im"), bwf_rows(bwf)),
    ]


def random_device(rng: np.random.Generator, n_bins: int = 1):
    """Random unbalanced source and fan-out, with a BWF on ``n_bins`` bins.

    Coupler cross amplitudes span 0.25..0.9 and every phase avoids 0 and pi.
    """
    def phase():
        return float(rng.uniform(0.2, math.pi - 0.2) + rng.integers(0, 2) * math.pi)

    source = SourceParams.with_t(
        float(rng.uniform(0.25, 0.9)),
        phi=phase(),
        phi1=phase(),
        phi2=phase(),
        L1=float(rng.uniform(0, 2)),
        L2=float(rng.uniform(0, 2)),
        L3=float(rng.uniform(0, 2)),
    )
    fan_kw = {}
    for n in (1, 2, 3):
        t = float(rng.uniform(0.25, 0.9))
        fan_kw[f"t{n}"], fan_kw[f"r{n}"] = t, math.sqrt(1 - t * t)
    fan_kw.update({name: float(rng.uniform(0, 3)) for name in FANOUT_LENGTHS})
    fanout = FanoutParams(**fan_kw)
    k0 = float(rng.uniform(0.5, 2.0))
    if n_bins == 1:
        bwf = discretize(SingleBin(), KGrid(k0=k0, dk=0.0))
    else:
        grid = KGrid(k0=k0, dk=0.2, n_bins=n_bins)
        bwf = discretize(CorrelatedGaussian(float(rng.uniform(0.3, 0.8)), float(rng.uniform(0.3, 0.8))), grid)
    beta = complex(rng.uniform(0.1, 0.4), rng.uniform(-0.2, 0.2))
    return source, fanout, bwf, beta


@dataclass(frozen=True)
class OracleReport:
    table_deviation: float
    state_deviation: float
    fanout_probability_deviation: float
    dimension: int
    seconds: float
    tol: float

    @property
    def ok(self) -> bool:
        return max(self.table_deviation, self.state_deviation, self.fanout_probability_deviation) <= self.tol


def oracle_check(source: SourceParams, fanout: FanoutParams, bwf: BWFMatrix, beta: complex, tol: float = 1e-10) -> OracleReport:
    """Pipeline against the history/dense oracle on one configuration."""
    t0 = time.perf_counter()
    table = pair_amplitudes(source, bwf)
    ref = enumerate_pair_amplitudes(source, bwf)
    keys = set(table.entries) | set(ref.entries)
    zero = np.zeros((bwf.grid.n_bins,) * 2)
    table_dev = max(float(np.max(np.abs(table.entries.get(pq, zero) - ref.entries.get(pq, zero)))) for pq in keys)

    c_det = heisenberg_rewrite(pair_creation_operator(table), build_fanout(fanout, bwf.grid, vacuum_ports=False))
    ket = expand_output(c_det, beta).truncated_ket()
    dense = dense_expand(detector_pair_operator(source, fanout, bwf), beta)
    cmp = compare(ket, dense, tol)

    prob_dev = 0.0
    for ch in (1, 2, 3, 4):
        for k in bwf.grid.k:
            total = math.fsum(abs(h.amplitude) ** 2 for h in fanout_histories(fanout, ch, float(k)))
            prob_dev = max(prob_dev, abs(total - 1.0))
    return OracleReport(table_dev, cmp.max_deviation, prob_dev, dense.dimension, time.perf_counter() - t0, tol)


def scenario_oracle_check(cfg: RunConfig, seed: Optional[int] = None) -> List[Table]:
    """The configured device plus ``oracle.n_configs`` seeded random ones."""
    rng = np.random.default_rng(0 if seed is None else seed)
    cases = [("config", cfg.source, cfg.fanout, cfg.bwf(), None)]
    for i in range(cfg.oracle.n_configs):
        n_bins = 1 + i % cfg.oracle.max_bins
        cases.append((f"random{i}",) + random_device(rng, n_bins))
    rows = []
    failed = []
    for label, src, fan, bwf, beta in cases:
        if beta is None:
            beta = _beta(cfg, pair_amplitudes(src, bwf).raw_norm)
        rep = oracle_check(src, fan, bwf, beta, cfg.oracle.tol)
        rows.append(
            (label, bwf.grid.n_bins, src.t, src.phi, rep.table_deviation, rep.state_deviation,
             rep.fanout_probability_deviation, rep.dimension, int(rep.ok))
        )
        if not rep.ok:
            failed.append(label)
    tables = [
        Table(
            "oracle_check",
            ("case", "n_bins", "t", "phi", "table_deviation", "state_deviation",
             "fanout_probability_deviation", "dense_dimension", "passed"),
            rows,
        )
    ]
    if failed:
        err = NumericalCheckError("oracle-equivalence", f"pipeline and oracle disagree on {', '.join(failed)}")
        err.tables = tables
        raise err
    return tables


def _sweep_point(args):
    cfg, parameter, index, value = args
    point = cfg.with_value(parameter, value)
    run = _run(point)
    check_conservation(run)
    rows = []
    for r in run.reports:
        rows.append((index, value) + r.kbins + (r.probability, r.theta_measured, r.theta_formula, r.fidelity))
    if not run.reports:
        nan = float("nan")
        rows.append((index, value, -1, -1, -1, -1, run.fourfold.probability, nan, nan, nan))
    return rows


def scenario_sweep(cfg: RunConfig, seed: Optional[int] = None, workers: int = 1) -> List[Table]:
    if cfg.sweep is None:
        raise ConfigurationError("scenario 'sweep' needs a sweep section", "sweep")
    values = cfg.sweep.resolve(seed)
    jobs = [(cfg, cfg.sweep.parameter, i, v) for i, v in enumerate(values)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_sweep_point, jobs))
    else:
        chunks = [_sweep_point(j) for j in jobs]
    rows = [row for chunk in chunks for row in chunk]
    header = (
        "index", cfg.sweep.parameter, "kp1_index", "kp2_index", "k1_index", "k2_index",
        "probability", "theta_measured", "theta_formula", "fidelity",
    )
    return [Table("sweep", header, rows)]


RUNNERS = {
    "bell": scenario_bell,
    "ghz": scenario_ghz,
    "rate": scenario_rate,
    "schmidt": scenario_schmidt,
    "oracle-check": scenario_oracle_check,
    "sweep": scenario_sweep,
}
