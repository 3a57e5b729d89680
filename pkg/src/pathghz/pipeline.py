"""Second-order output state, post-selection and GHZ extraction.

The emitted state is truncated at two pairs,
``|vac> + beta C†|vac> + (beta^2 / 2)(C†)^2 |vac>``; the vacuum term carries
an unevaluated ``1 + O(|beta|^2)`` correction that is kept at 1 here.
Probabilities are reported unnormalized, so the fourfold probability of a
balanced lossless device comes out as ``|beta^2 / 4|^2``.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from .circuit import build_fanout, heisenberg_rewrite
from .errors import StructuralMismatchError, ValidationError
from .fock import FockBasisState, KetVector, OperatorPoly, apply, normalize
from .params import FanoutParams, SourceParams
from .source import effective_beta, pair_amplitudes, pair_creation_operator
from .spectral import BWFMatrix, KGrid

log = logging.getLogger(__name__)

VACUUM_MARKER = "1 + O(|beta|^2)"


@dataclass(frozen=True)
class ExpansionState:
    """Output state to second order: ``|vac> + beta |II> + c4 beta^2 |IV>``.

    ``four_photon_norm`` is the measured norm of ``(C†)^2 |vac> / 2``, i.e. the
    coefficient ``c4``.
    """

    beta: complex
    two_photon: KetVector
    four_photon: KetVector
    four_photon_norm: float
    vacuum_coefficient: str = VACUUM_MARKER

    @property
    def space(self):
        return self.two_photon.space

    def truncated_ket(self) -> KetVector:
        vac = KetVector.vacuum(self.space)
        return vac + self.two_photon * self.beta + self.four_photon * (self.four_photon_norm * self.beta ** 2)

    def truncated_norm_sq(self) -> float:
        return 1.0 + abs(self.beta) ** 2 + (self.four_photon_norm * abs(self.beta) ** 2) ** 2


def _check_unit(c: OperatorPoly, tol: float = 1e-10) -> KetVector:
    ket = apply(c, KetVector.vacuum(c.space))
    n = ket.norm()
    if abs(n - 1.0) > tol:
        raise ValidationError(f"pair-creation operator is not normalized: |C†|vac>| = {n!r}")
    return ket


def expand_output(c: OperatorPoly, beta: complex) -> ExpansionState:
    """Expand ``exp(beta C† - h.c.)|vac>`` to second order in ``beta``."""
    two = _check_unit(c)
    four_raw = apply(c, two) * 0.5
    four, n4 = normalize(four_raw)
    return ExpansionState(complex(beta), two, four, n4)


def four_photon_state(c: OperatorPoly) -> KetVector:
    """Normalized ``(C†)^2 |vac>``."""
    two = _check_unit(c)
    return normalize(apply(c, two))[0]


Group = Union[str, Tuple[str, ...]]


@dataclass(frozen=True)
class DetectionPattern:
    """Required counts per detector.

    A key is a port name or a tuple of ports read as one detector (the two
    path ports of a qubit). Ports not named anywhere must stay dark unless
    listed in ``unobserved``. In bucket mode each port only reports a click,
    so a group counts its clicking ports rather than photons.
    """

    required: Mapping[Group, int]
    unobserved: frozenset = frozenset()
    bucket: bool = False

    def __post_init__(self):
        req = {}
        for key, n in dict(self.required).items():
            g = (key,) if isinstance(key, str) else tuple(key)
            if n < 1:
                raise ValidationError(f"required count for {g} must be >= 1")
            req[g] = int(n)
        object.__setattr__(self, "required", req)
        object.__setattr__(self, "unobserved", frozenset(self.unobserved))

    @classmethod
    def fourfold(cls, bucket: bool = False) -> "DetectionPattern":
        """One photon at T and one in exactly one port of each of D1, D2, D3."""
        return cls(
            {
                "T": 1,
                ("D1,0", "D1,1"): 1,
                ("D2,0", "D2,1"): 1,
                ("D3,0", "D3,1"): 1,
            },
            bucket=bucket,
        )

    @classmethod
    def threefold(cls, bucket: bool = False) -> "DetectionPattern":
        """D1, D2, D3 each fire once; T is not looked at."""
        return cls(
            {("D1,0", "D1,1"): 1, ("D2,0", "D2,1"): 1, ("D3,0", "D3,1"): 1},
            unobserved=frozenset({"T"}),
            bucket=bucket,
        )

    @classmethod
    def exact(cls, counts: Mapping[str, int]) -> "DetectionPattern":
        return cls(dict(counts))

    def matches(self, state: FockBasisState) -> bool:
        per_port = Counter()
        for mode, n in state:
            per_port[mode.channel] += n
        named = set()
        for group, want in self.required.items():
            named.update(group)
            if self.bucket:
                got = sum(1 for p in group if per_port[p] > 0)
            else:
                got = sum(per_port[p] for p in group)
            if got != want:
                return False
        return all(
            n == 0 or p in named or p in self.unobserved for p, n in per_port.items()
        )


@dataclass(frozen=True)
class PostSelection:
    probability: float
    conditional: Optional[KetVector]

    @property
    def empty(self) -> bool:
        return self.conditional is None


def postselect(state: KetVector, pattern: DetectionPattern, coefficient: complex = 1.0) -> PostSelection:
    """Project ``coefficient * state`` on the basis states matching ``pattern``.

    An empty match yields probability 0 and ``conditional=None``.
    """
    kept = state.filter(pattern.matches)
    prob = kept.norm_sq() * abs(coefficient) ** 2
    if not kept:
        return PostSelection(0.0, None)
    return PostSelection(prob, normalize(kept)[0])


def port_counts(state: FockBasisState) -> Tuple[Tuple[str, int], ...]:
    c = Counter()
    for mode, n in state:
        c[mode.channel] += n
    return tuple(sorted(c.items()))


def enumerate_patterns(state: KetVector) -> Dict[Tuple[Tuple[str, int], ...], float]:
    """Probability of every number-resolved port pattern present in ``state``."""
    out: Dict[Tuple[Tuple[str, int], ...], float] = {}
    for s, a in state:
        key = port_counts(s)
        out[key] = out.get(key, 0.0) + abs(a) ** 2
    return dict(sorted(out.items()))


# Source channel feeding each detector port; fixes which wavevector is which.
PORT_SOURCE = {
    "T": "1",
    "D2,0": "2",
    "D3,0": "2",
    "D1,1": "3",
    "D3,1": "3",
    "D1,0": "4",
    "D2,1": "4",
}
QUBIT_PORTS = (("D1,0", "D1,1"), ("D2,0", "D2,1"), ("D3,0", "D3,1"))
GHZ_BITS = ("110", "001")


def logical_bits(state: FockBasisState) -> Optional[str]:
    """Three-bit label of a fourfold state, or None if it is not one."""
    ports = dict(port_counts(state))
    if ports.get("T") != 1:
        return None
    bits = []
    for p0, p1 in QUBIT_PORTS:
        n0, n1 = ports.get(p0, 0), ports.get(p1, 0)
        if n0 + n1 != 1:
            return None
        bits.append("1" if n1 else "0")
    if sum(ports.values()) != 4:
        return None
    return "".join(bits)


def kbin_key(state: FockBasisState) -> Tuple[int, int, int, int]:
    """Bins of the photons from channels 1, 2, 3, 4: ``(k'1, k'2, k1, k2)``."""
    by_channel = {}
    for mode, n in state:
        src = PORT_SOURCE.get(mode.channel)
        if src is None or n != 1 or src in by_channel:
            raise StructuralMismatchError(f"state {state!r} is not a one-photon-per-channel event")
        by_channel[src] = mode.kbin
    return tuple(by_channel[c] for c in ("1", "2", "3", "4"))


def is_channel_event(state: FockBasisState) -> bool:
    """True if each of the four source channels contributed exactly one photon."""
    seen = []
    for mode, n in state:
        src = PORT_SOURCE.get(mode.channel)
        if src is None or n != 1 or src in seen:
            return False
        seen.append(src)
    return len(seen) == 4


def split_by_kbins(conditional: KetVector) -> Dict[Tuple[int, int, int, int], KetVector]:
    """Group a fourfold conditional state by the k-bins of its four photons.

    Raises :class:`StructuralMismatchError` on events with two photons from
    one source channel; filter with :func:`is_channel_event` first.
    """
    groups: Dict[Tuple[int, int, int, int], list] = {}
    for s, a in conditional:
        groups.setdefault(kbin_key(s), []).append((s, a))
    return {key: KetVector(conditional.space, items) for key, items in sorted(groups.items())}


def theta_formula(k1: float, k2: float, k2p: float, fanout: FanoutParams) -> float:
    """Relative GHZ phase from the fan-out lengths.

    ``k1`` is the channel-3 photon, ``k2`` the channel-4 photon and ``k2p``
    the channel-2 photon. With the default ``sigma=-1``, ``l10_sign=-1`` this
    is ``k1 (L11 - L31) + k2 (L21 - L10) + k2p (L30 - L20) + pi/2``.
    """
    f = fanout
    return (
        k1 * (f.L11 - f.L31)
        + k2 * (f.L21 + f.l10_sign * f.L10)
        + k2p * (f.L30 - f.L20)
        - f.sigma * math.pi / 2
    )


def wrap(angle: float) -> float:
    """Map an angle to ``(-pi, pi]``."""
    a = math.remainder(angle, 2 * math.pi)
    return math.pi if a == -math.pi else a


def angle_diff(a: float, b: float) -> float:
    return abs(wrap(a - b))


@dataclass(frozen=True)
class GhzReport:
    probability: float
    conditional: KetVector
    theta_measured: float
    theta_formula: float
    fidelity: float
    gamma: float
    kbins: Tuple[int, int, int, int] = (0, 0, 0, 0)
    wavevectors: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    @property
    def theta_deviation(self) -> float:
        return angle_diff(self.theta_measured, self.theta_formula)


def ghz_qubit_vector(conditional: KetVector) -> np.ndarray:
    """Amplitudes over ``|000> ... |111>`` (D1 is the leading bit)."""
    vec = np.zeros(8, dtype=complex)
    for s, a in conditional:
        bits = logical_bits(s)
        if bits is None:
            raise StructuralMismatchError(f"{s!r} is not a fourfold event")
        vec[int(bits, 2)] += a
    return vec


def ghz_extract(
    conditional: KetVector,
    fanout: FanoutParams,
    grid: KGrid,
    probability: float = float("nan"),
) -> GhzReport:
    """Read the GHZ structure, its phase and fidelity out of a fourfold state.

    ``conditional`` must hold the photons of one k-bin assignment; use
    :func:`split_by_kbins` first for multi-bin runs.
    """
    labels = {}
    for s, a in conditional:
        labels[s] = logical_bits(s)
    extra = [s for s, b in labels.items() if b not in GHZ_BITS]
    if extra:
        raise StructuralMismatchError(f"conditional has support outside |110>, |001>: {extra}", extra)
    keys = {kbin_key(s) for s in labels}
    if len(keys) != 1:
        raise StructuralMismatchError(f"conditional mixes k-bin assignments {sorted(keys)}")
    (key,) = keys
    vec = ghz_qubit_vector(normalize(conditional)[0])
    a110, a001 = vec[int("110", 2)], vec[int("001", 2)]
    if abs(a110) == 0 or abs(a001) == 0:
        raise StructuralMismatchError("conditional is missing one of the GHZ components")
    k = grid.k
    kp1, kp2, k1, k2 = (float(k[j]) for j in key)
    th_formula = theta_formula(k1, k2, kp2, fanout)
    th_measured = cmath.phase(a001 / a110)
    target = np.zeros(8, dtype=complex)
    target[int("110", 2)] = 1 / math.sqrt(2)
    target[int("001", 2)] = cmath.exp(1j * th_formula) / math.sqrt(2)
    fid = float(abs(np.vdot(target, vec)) ** 2)
    return GhzReport(
        probability=probability,
        conditional=conditional,
        theta_measured=th_measured,
        theta_formula=wrap(th_formula),
        fidelity=fid,
        gamma=cmath.phase(a110),
        kbins=key,
        wavevectors=(kp1, kp2, k1, k2),
    )


def generation_rate(beta: complex, rep_rate: float) -> float:
    """Fourfold events per second, ``|beta^2 / 4|^2 * rep_rate``."""
    b2 = abs(beta) ** 2
    if b2 > 0.2:
        log.warning("|beta|^2 = %.3g is not small; the two-pair truncation is questionable", b2)
    return (b2 / 4) ** 2 * rep_rate


@dataclass
class GhzRun:
    """Everything the end-to-end run produced."""

    source: SourceParams
    fanout: FanoutParams
    bwf: BWFMatrix
    beta: complex
    raw_norm: float
    c_source: OperatorPoly
    c_detector: OperatorPoly
    expansion: ExpansionState
    detector_ket: KetVector
    fourfold: PostSelection
    reports: list = field(default_factory=list)
    other_probability: float = 0.0


def run_ghz(
    source: SourceParams,
    fanout: FanoutParams,
    bwf: BWFMatrix,
    beta: complex | None = None,
    psi_variant: str = "direct",
    bucket: bool = False,
) -> GhzRun:
    """Source table -> C† -> fan-out -> second-order state -> fourfold GHZ.

    ``beta`` defaults to the effective amplitude implied by
    ``source.beta_ring``.
    """
    table = pair_amplitudes(source, bwf, psi_variant)
    if beta is None:
        beta = effective_beta(table.raw_norm, source.beta_ring)
    c_src = pair_creation_operator(table)
    fan = build_fanout(fanout, bwf.grid, vacuum_ports=False)
    c_det = heisenberg_rewrite(c_src, fan)
    exp = expand_output(c_det, beta)
    ket = exp.truncated_ket()
    sel = postselect(ket, DetectionPattern.fourfold(bucket))
    reports = []
    other = 0.0
    if not sel.empty:
        # unbalanced sources also light the fourfold pattern with two photons from one channel
        ghz_part = sel.conditional.filter(is_channel_event)
        other = (1.0 - ghz_part.norm_sq()) * sel.probability
        for key, part in split_by_kbins(ghz_part).items():
            p = part.norm_sq() * sel.probability
            if _has_both_components(part):
                reports.append(ghz_extract(part, fanout, bwf.grid, probability=p))
    return GhzRun(source, fanout, bwf, complex(beta), table.raw_norm, c_src, c_det, exp, ket, sel, reports, other)


def _has_both_components(part: KetVector) -> bool:
    return {logical_bits(s) for s in part.amplitudes} == set(GHZ_BITS)


def ghz_port_sets() -> Tuple[frozenset, frozenset]:
    """Detector ports lit by the two GHZ components."""
    return frozenset({"T", "D1,1", "D2,1", "D3,0"}), frozenset({"T", "D1,0", "D2,0", "D3,1"})


def remainder_violations(four_photon: KetVector, pattern: DetectionPattern | None = None) -> list:
    """Four-photon states outside the GHZ port sets that still pass ``pattern``."""
    pattern = pattern or DetectionPattern.fourfold()
    ghz_sets = ghz_port_sets()
    bad = []
    for s, _ in four_photon:
        ports = frozenset(m.channel for m, _ in s)
        if ports in ghz_sets and s.total == 4:
            continue
        if pattern.matches(s):
            bad.append(s)
    return bad
