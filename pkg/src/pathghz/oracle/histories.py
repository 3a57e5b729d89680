"""Sum over photon histories.

Every pump photon is walked from the pump input to a ring, every generated
photon from its ring to a channel (or on to a detector), taking each coupler
arm in turn. A history's amplitude is the product of the entries met on the
way; amplitudes of histories with the same endpoints are summed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np

from ..errors import NumericalCheckError
from ..fock import CreationMonomial, ModeId, ModeSpace, OperatorPoly
from ..params import FanoutParams, PairAmplitudeTable, SourceParams
from ..spectral import BWFMatrix
from .topology import CHANNEL_PORTS, DETECTORS, PUMP_INPUT, RINGS, Topology, device_topology

MAX_STEPS = 64


@dataclass(frozen=True)
class History:
    start: Tuple[str, int]
    steps: Tuple[Tuple[str, str], ...]
    terminal: str
    amplitude: complex


def walk(topo: Topology, start: Tuple[str, int], k: float, stop: Iterable[str]) -> List[History]:
    """All histories of one photon at wavevector ``k`` from ``start`` to any ``stop`` element."""
    stop = set(stop)
    out: List[History] = []
    pending = [(start, (), 1.0 + 0j)]
    while pending:
        (name, port), steps, amp = pending.pop()
        if len(steps) > MAX_STEPS:
            raise NumericalCheckError("topology", f"history from {start} does not terminate")
        el = topo.elements.get(name)
        if el is None:
            raise NumericalCheckError("topology", f"history reached undeclared element {name}")
        if name in stop:
            out.append(History(start, steps, name, amp))
            continue
        if el.kind == "coupler":
            t, r, sigma = el.values
            branches = [
                (port, "through", r),
                (1 - port, "cross", sigma * 1j * t),
            ]
        elif el.kind == "phase":
            branches = [(0, "phase", cmath.exp(1j * el.values[0]))]
        elif el.kind == "delay":
            length, sign = el.values
            branches = [(0, "delay", cmath.exp(sign * 1j * k * length))]
        elif el.kind in ("ring", "port"):
            branches = [(0, "pass", 1.0)]
        else:
            raise NumericalCheckError("topology", f"unknown element kind {el.kind}")
        for out_port, choice, factor in branches:
            if factor == 0:
                continue
            nxt = topo.links.get((name, out_port))
            if nxt is None:
                raise NumericalCheckError("topology", f"dangling output {name}:{out_port}")
            pending.append((nxt, steps + ((name, choice),), amp * factor))
    return out


def summed(histories: Iterable[History]) -> Dict[str, complex]:
    acc: Dict[str, complex] = {}
    for h in histories:
        acc[h.terminal] = acc.get(h.terminal, 0j) + h.amplitude
    return acc


def _pair_sums(topo: Topology, k1: float, k2: float, targets) -> Dict[Tuple[str, str], complex]:
    """Raw amplitude per ordered terminal pair, summed over rings and paths."""
    # energy conservation fixes only the pump sum; take the asymmetric split
    pump_a = summed(walk(topo, PUMP_INPUT, k1, RINGS))
    pump_b = summed(walk(topo, PUMP_INPUT, k2, RINGS))
    acc: Dict[Tuple[str, str], complex] = {}
    for ring in RINGS:
        amp_pump = pump_a.get(ring, 0) * pump_b.get(ring, 0)
        if amp_pump == 0:
            continue
        first = summed(walk(topo, (ring, 0), k1, targets))
        second = summed(walk(topo, (ring, 0), k2, targets))
        for x, ax in first.items():
            for y, ay in second.items():
                acc[(x, y)] = acc.get((x, y), 0j) + amp_pump * ax * ay
    return acc


def _raw_channel_tables(src: SourceParams, fan: FanoutParams, bwf: BWFMatrix):
    topo = device_topology(src, fan)
    grid = bwf.grid
    n = grid.n_bins
    raw = {}
    for i in range(n):
        for j in range(n):
            for (x, y), a in _pair_sums(topo, float(grid.k[i]), float(grid.k[j]), CHANNEL_PORTS).items():
                p, q = int(x[2:]), int(y[2:])
                raw.setdefault((p, q), np.zeros((n, n), dtype=complex))[i, j] += a * bwf.values[i, j]
    norm = math.sqrt(sum(float(np.sum(np.abs(v) ** 2)) for v in raw.values())) * grid.weight
    return topo, raw, norm


def enumerate_pair_amplitudes(src: SourceParams, bwf: BWFMatrix, fan: FanoutParams | None = None) -> PairAmplitudeTable:
    """Channel-pair table rebuilt from histories and normalized by quadrature."""
    _, raw, norm = _raw_channel_tables(src, fan or FanoutParams(), bwf)
    if norm == 0:
        return PairAmplitudeTable(bwf.grid, raw, 0.0)
    return PairAmplitudeTable(bwf.grid, {pq: v / norm for pq, v in raw.items()}, norm)


def detector_space(n_bins: int) -> ModeSpace:
    return ModeSpace(DETECTORS, n_bins)


def detector_pair_operator(src: SourceParams, fan: FanoutParams, bwf: BWFMatrix) -> OperatorPoly:
    """Pair-creation operator written directly in detector modes.

    Each history runs pump -> ring -> source coupler -> fan-out -> detector;
    the overall scale comes from quadrature over the channel-level table.
    """
    topo, _, norm = _raw_channel_tables(src, fan, bwf)
    if norm == 0:
        raise NumericalCheckError("nonzero-norm", "source emits no pairs")
    grid = bwf.grid
    space = detector_space(grid.n_bins)
    scale = grid.weight / (math.sqrt(2) * norm)
    terms = []
    for i in range(grid.n_bins):
        for j in range(grid.n_bins):
            v = bwf.values[i, j]
            if v == 0:
                continue
            for (x, y), a in _pair_sums(topo, float(grid.k[i]), float(grid.k[j]), DETECTORS).items():
                terms.append((scale * a * v, CreationMonomial.of(ModeId(x, i), ModeId(y, j))))
    return OperatorPoly(space, terms)


def fanout_amplitudes(fan: FanoutParams, channel: int, k: float) -> Dict[str, complex]:
    """Detector amplitudes for one photon leaving source channel ``channel``."""
    topo = device_topology(SourceParams(), fan)
    return summed(walk(topo, (f"ch{channel}", 0), k, DETECTORS))


def fanout_histories(fan: FanoutParams, channel: int, k: float) -> List[History]:
    topo = device_topology(SourceParams(), fan)
    return walk(topo, (f"ch{channel}", 0), k, DETECTORS)


def pump_histories(src: SourceParams, k: float) -> List[History]:
    return walk(device_topology(src, FanoutParams()), PUMP_INPUT, k, RINGS)
