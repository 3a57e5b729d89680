"""k-resolved linear optics: components, mode maps and Heisenberg rewriting.

A circuit is an ordered list of :class:`ComponentSpec` acting on named wires.
Propagating a single photon through it, bin by bin, yields a :class:`ModeMap`
that sends each input creation operator to a superposition of output ones.
Lossless components never mix k-bins, so a map is block diagonal in k.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Mapping, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError, ValidationError
from .fock import PRUNE_TOL, CreationMonomial, ModeId, ModeSpace, OperatorPoly
from .params import SPLIT_TOL, FanoutParams
from .spectral import KGrid

SOURCE_CHANNELS = ("1", "2", "3", "4")
VACUUM_PORTS = ("V1", "V2", "V3")
DETECTOR_PORTS = ("T", "D1,0", "D1,1", "D2,0", "D2,1", "D3,0", "D3,1")


@dataclass(frozen=True)
class DirectionalCoupler:
    """Through amplitude ``r``, cross amplitude ``sigma * i t``."""

    t: float
    r: float
    sigma: int = 1

    def __post_init__(self):
        if self.t < 0 or self.r < 0:
            raise ValidationError(f"coupler amplitudes must be >= 0 (t={self.t}, r={self.r})")
        if abs(self.t ** 2 + self.r ** 2 - 1) > SPLIT_TOL:
            raise ValidationError(f"coupler t^2 + r^2 = {self.t ** 2 + self.r ** 2!r}, expected 1")
        if self.sigma not in (-1, 1):
            raise ValidationError("coupler sigma must be +1 or -1")


@dataclass(frozen=True)
class PhaseShift:
    phi: float


@dataclass(frozen=True)
class Delay:
    """Propagation over ``length``; phase ``exp(sign * i k length)``."""

    length: float
    sign: int = -1

    def __post_init__(self):
        if self.length < 0:
            raise ValidationError(f"delay length must be >= 0, got {self.length}")
        if self.sign not in (-1, 1):
            raise ValidationError("delay sign must be +1 or -1")


@dataclass(frozen=True)
class Swap:
    """Phase-free waveguide crossing."""


Kind = Union[DirectionalCoupler, PhaseShift, Delay, Swap]
_ARITY = {DirectionalCoupler: 2, Swap: 2, PhaseShift: 1, Delay: 1}


@dataclass(frozen=True)
class ComponentSpec:
    kind: Kind
    inputs: Tuple[str, ...]
    outputs: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        n = _ARITY.get(type(self.kind))
        if n is None:
            raise ValidationError(f"unknown component kind {self.kind!r}")
        if len(self.inputs) != n or len(self.outputs) != n:
            raise ValidationError(f"{type(self.kind).__name__} needs {n} input and {n} output wires")


def component_matrix(spec: Union[ComponentSpec, Kind], k: float) -> np.ndarray:
    """Transfer matrix ``M[out, in]`` of one component at wavevector ``k``."""
    kind = spec.kind if isinstance(spec, ComponentSpec) else spec
    if isinstance(kind, DirectionalCoupler):
        x = kind.sigma * 1j * kind.t
        return np.array([[kind.r, x], [x, kind.r]], dtype=complex)
    if isinstance(kind, PhaseShift):
        return np.array([[cmath.exp(1j * kind.phi)]])
    if isinstance(kind, Delay):
        return np.array([[cmath.exp(kind.sign * 1j * k * kind.length)]])
    if isinstance(kind, Swap):
        return np.array([[0, 1], [1, 0]], dtype=complex)
    raise ValidationError(f"unknown component kind {kind!r}")


class ModeMap:
    """Linear map from input-mode creation operators to output-mode ones.

    ``entries[m_in]`` lists ``(m_out, amplitude)``, i.e.
    ``b†(m_in) -> sum amplitude * b†(m_out)``.
    """

    __slots__ = ("in_space", "out_space", "grid", "_entries")

    def __init__(self, in_space: ModeSpace, out_space: ModeSpace, grid: KGrid, entries):
        self.in_space = in_space
        self.out_space = out_space
        self.grid = grid
        clean = {}
        for m_in, images in entries.items():
            if m_in not in in_space:
                raise ConfigurationError(f"map input {m_in} is outside {in_space}")
            acc: Dict[ModeId, complex] = {}
            for m_out, a in images:
                if m_out not in out_space:
                    raise ConfigurationError(f"map output {m_out} is outside {out_space}")
                acc[m_out] = acc.get(m_out, 0j) + complex(a)
            clean[m_in] = tuple((m, acc[m]) for m in sorted(acc) if abs(acc[m]) > PRUNE_TOL)
        self._entries = MappingProxyType(clean)

    @property
    def entries(self) -> Mapping[ModeId, Tuple[Tuple[ModeId, complex], ...]]:
        return self._entries

    def image(self, mode: ModeId):
        try:
            return self._entries[mode]
        except KeyError:
            raise ConfigurationError(f"mode {mode} has no entry in the mode map") from None

    @classmethod
    def identity(cls, space: ModeSpace, grid: KGrid) -> "ModeMap":
        return cls(space, space, grid, {m: [(m, 1.0)] for m in space.modes()})

    def matrix(self, kbin: int = 0, inputs: Sequence[str] | None = None) -> np.ndarray:
        """Dense ``[out, in]`` block at one k-bin (columns follow ``inputs``)."""
        ins = tuple(inputs) if inputs is not None else self.in_space.channels
        outs = self.out_space.channels
        row = {c: i for i, c in enumerate(outs)}
        m = np.zeros((len(outs), len(ins)), dtype=complex)
        for j, c in enumerate(ins):
            for m_out, a in self._entries.get(ModeId(c, kbin), ()):
                if m_out.kbin != kbin:
                    raise ValidationError("mode map mixes k-bins; no dense per-bin block")
                m[row[m_out.channel], j] = a
        return m

    def compose(self, then: "ModeMap") -> "ModeMap":
        """Map that applies ``self`` first and ``then`` afterwards."""
        out = {}
        for m_in, images in self._entries.items():
            acc = []
            for mid, a in images:
                for m_out, b in then.image(mid):
                    acc.append((m_out, a * b))
            out[m_in] = acc
        return ModeMap(self.in_space, then.out_space, self.grid, out)

    def adjoint(self) -> "ModeMap":
        out: Dict[ModeId, list] = {m: [] for m in self.out_space.modes()}
        for m_in, images in self._entries.items():
            for m_out, a in images:
                out[m_out].append((m_in, a.conjugate()))
        return ModeMap(self.out_space, self.in_space, self.grid, out)

    def isclose(self, other: "ModeMap", tol: float = 1e-12) -> bool:
        if set(self._entries) != set(other._entries):
            return False
        for m, images in self._entries.items():
            a = dict(images)
            b = dict(other._entries[m])
            if any(abs(a.get(x, 0) - b.get(x, 0)) > tol for x in set(a) | set(b)):
                return False
        return True


def propagate(circuit: Sequence[ComponentSpec], wire: str, k: float) -> Dict[str, complex]:
    """Amplitudes on every wire after injecting one photon on ``wire`` at ``k``."""
    amps: Dict[str, complex] = {wire: 1.0 + 0j}
    for comp in circuit:
        if not any(w in amps for w in comp.inputs):
            continue
        vec = np.array([amps.pop(w, 0j) for w in comp.inputs])
        out = component_matrix(comp, k) @ vec
        for w, a in zip(comp.outputs, out):
            amps[w] = amps.get(w, 0j) + a
    return {w: a for w, a in amps.items() if abs(a) > PRUNE_TOL}


def circuit_map(
    circuit: Sequence[ComponentSpec], in_space: ModeSpace, out_space: ModeSpace, grid: KGrid
) -> ModeMap:
    """Per-bin transfer of every input wire of ``in_space`` through ``circuit``."""
    if in_space.n_bins != grid.n_bins or out_space.n_bins != grid.n_bins:
        raise ConfigurationError("mode spaces and grid disagree on the number of k-bins")
    entries = {}
    for c in in_space.channels:
        for j, k in enumerate(grid.k):
            amps = propagate(circuit, c, float(k))
            stray = [w for w in amps if w not in out_space.channels]
            if stray:
                raise ConfigurationError(f"wire(s) {stray} from input {c} never reach an output port")
            entries[ModeId(c, j)] = [(ModeId(w, j), a) for w, a in amps.items()]
    return ModeMap(in_space, out_space, grid, entries)


def planar_swaps(order: Sequence[str], target: Sequence[str]) -> list:
    """Adjacent crossings that carry wire contents from ``order`` into ``target``.

    Wires are slot names; each Swap exchanges the photons on two neighbouring
    slots. Returns the swaps and the slot holding each original label.
    """
    if sorted(order) != sorted(target):
        raise ValidationError("planar reorder needs the same labels on both sides")
    slots = [f"s{i}" for i in range(len(order))]
    cur = list(order)
    swaps = []
    for i, want in enumerate(target):
        j = cur.index(want)
        while j > i:
            swaps.append(ComponentSpec(Swap(), (slots[j - 1], slots[j]), (slots[j - 1], slots[j])))
            cur[j - 1], cur[j] = cur[j], cur[j - 1]
            j -= 1
    return swaps, slots


# outputs of each fan-out coupler as (through, cross) detector ports
FANOUT_ROUTES = {
    "2": (1, "V1", "D2,0", "D3,0"),
    "3": (2, "V2", "D1,1", "D3,1"),
    "4": (3, "V3", "D1,0", "D2,1"),
}


def fanout_circuit(params: FanoutParams) -> list:
    """Component list of the detector stage, crossings included.

    Couplers drop their outputs onto planar slots in coupler order; a layer of
    Swaps reorders the slots to detector order, and a Delay per slot supplies
    the source-to-detector length.
    """
    planar = [p for _, _, through, cross in FANOUT_ROUTES.values() for p in (through, cross)]
    target = [p for p in DETECTOR_PORTS if p != "T"]
    swaps, slots = planar_swaps(planar, target)
    comps = []
    for i, (ch, (n, vac, _, _)) in enumerate(FANOUT_ROUTES.items()):
        t, r = params.coupler(n)
        comps.append(
            ComponentSpec(DirectionalCoupler(t, r, params.sigma), (ch, vac), (slots[2 * i], slots[2 * i + 1]))
        )
    comps += swaps
    lengths = {
        "D1,0": (params.L10, params.l10_sign),
        "D1,1": (params.L11, -1),
        "D2,0": (params.L20, -1),
        "D2,1": (params.L21, -1),
        "D3,0": (params.L30, -1),
        "D3,1": (params.L31, -1),
    }
    for port, slot in zip(target, slots):
        length, sign = lengths[port]
        comps.append(ComponentSpec(Delay(length, sign), (slot,), (port,)))
    comps.append(ComponentSpec(Delay(params.L_T, -1), ("1",), ("T",)))
    return comps


def build_fanout(params: FanoutParams, grid: KGrid, vacuum_ports: bool = True) -> ModeMap:
    """Mode map from source channels (plus unused coupler ports) to detectors."""
    ins = SOURCE_CHANNELS + (VACUUM_PORTS if vacuum_ports else ())
    return circuit_map(
        fanout_circuit(params),
        ModeSpace(ins, grid.n_bins),
        ModeSpace(DETECTOR_PORTS, grid.n_bins),
        grid,
    )


@dataclass(frozen=True)
class UnitarityReport:
    max_deviation: float
    worst_kbin: int
    tol: float = 1e-12

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tol


def check_unitary(mode_map: ModeMap, kbin: int | None = None, inputs=None, tol: float = 1e-12):
    """Worst deviation of ``M^dagger M`` from identity over the chosen bins.

    Restricting ``inputs`` checks the isometry on that support only.
    """
    bins = range(mode_map.grid.n_bins) if kbin is None else [kbin]
    worst, where = 0.0, bins[0]
    for j in bins:
        m = mode_map.matrix(j, inputs)
        dev = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1]))))
        if dev > worst:
            worst, where = dev, j
    return UnitarityReport(worst, where, tol)


def heisenberg_rewrite(op: OperatorPoly, mode_map: ModeMap) -> OperatorPoly:
    """Substitute every creation operator of ``op`` by its image under ``mode_map``."""
    out_space = mode_map.out_space
    images: Dict[ModeId, OperatorPoly] = {}

    def image(mode):
        if mode not in images:
            if mode not in mode_map.entries:
                raise ConfigurationError(f"unmapped mode {mode}")
            images[mode] = OperatorPoly(
                out_space, [(a, CreationMonomial.of(m)) for m, a in mode_map.entries[mode]]
            )
        return images[mode]

    pairs = []
    for c, mono in op:
        term = OperatorPoly.identity(out_space) * c
        for mode, p in mono:
            term = term * image(mode) ** p
        pairs.extend(term)
    return OperatorPoly(out_space, pairs)


def fanout_literal(params: FanoutParams, channel: str, k: float) -> Dict[str, complex]:
    """Fan-out amplitudes written out term by term, one channel at a time."""
    s = params.sigma
    e = lambda L, sign=-1: cmath.exp(sign * 1j * k * L)  # noqa: E731
    if channel == "1":
        return {"T": e(params.L_T)}
    if channel == "2":
        return {"D3,0": s * 1j * params.t1 * e(params.L30), "D2,0": params.r1 * e(params.L20)}
    if channel == "3":
        return {"D3,1": s * 1j * params.t2 * e(params.L31), "D1,1": params.r2 * e(params.L11)}
    if channel == "4":
        return {
            "D2,1": s * 1j * params.t3 * e(params.L21),
            "D1,0": params.r3 * e(params.L10, params.l10_sign),
        }
    raise ConfigurationError(f"no fan-out route for channel {channel!r}")
