"""Parameter records for the ring source and the detector fan-out.

Plain data only; the amplitude algebra that consumes them lives elsewhere so
the brute-force oracle can import these without touching that code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Dict, Tuple

import numpy as np

from .errors import ValidationError

SPLIT_TOL = 1e-12
HALF = 1 / math.sqrt(2)


def _check_split(name: str, t: float, r: float):
    if t < 0 or r < 0:
        raise ValidationError(f"{name}: coupler amplitudes must be >= 0 (t={t}, r={r})")
    if abs(t * t + r * r - 1.0) > SPLIT_TOL:
        raise ValidationError(f"{name}: t^2 + r^2 = {t * t + r * r!r}, expected 1")


def split_from_t(t: float) -> Tuple[float, float]:
    """Lossless coupler with cross amplitude ``t``; returns ``(t, r)``."""
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"cross amplitude must lie in [0, 1], got {t}")
    return t, math.sqrt(max(0.0, 1.0 - t * t))


@dataclass(frozen=True)
class SourceParams:
    """Four-ring source: shared coupler split, pump/MZI phases, lengths, ring amplitude.

    ``phi`` is the pump phase of block 2 relative to block 1; ``phi1`` and
    ``phi2`` are the intra-block MZI phases; ``L1 + L2`` is the pump path from
    the input coupler to each ring and ``L3`` the path from each ring to the
    output coupler of its block.
    """

    t: float = HALF
    r: float = HALF
    phi: float = math.pi
    phi1: float = math.pi / 2
    phi2: float = math.pi / 2
    L1: float = 0.0
    L2: float = 0.0
    L3: float = 0.0
    beta_ring: complex = math.sqrt(0.4)

    def __post_init__(self):
        _check_split("source", self.t, self.r)
        for name in ("L1", "L2", "L3"):
            if getattr(self, name) < 0:
                raise ValidationError(f"source.{name} must be >= 0")

    @classmethod
    def with_t(cls, t: float, **kw) -> "SourceParams":
        t, r = split_from_t(t)
        return cls(t=t, r=r, **kw)

    @property
    def is_balanced(self) -> bool:
        return (
            abs(self.t - HALF) <= SPLIT_TOL
            and _is_quarter_turn(self.phi1)
            and _is_quarter_turn(self.phi2)
        )

    def replace(self, **kw) -> "SourceParams":
        return replace(self, **kw)


def _is_quarter_turn(angle: float, tol: float = 1e-9) -> bool:
    d = (angle - math.pi / 2) % (2 * math.pi)
    return min(d, 2 * math.pi - d) <= tol


FANOUT_LENGTHS = ("L_T", "L10", "L11", "L20", "L21", "L30", "L31")


@dataclass(frozen=True)
class FanoutParams:
    """Output couplers and source-to-detector lengths of the GHZ circuit.

    Coupler 1 acts on channel 2, coupler 2 on channel 3, coupler 3 on
    channel 4. ``sigma`` is the sign of the cross amplitude (``-1`` gives the
    ``r, -it`` convention). ``l10_sign`` is the propagation-phase sign on the
    arm to detector ``D1,0``; ``-1`` matches every other generated-photon arm.
    """

    t1: float = HALF
    r1: float = HALF
    t2: float = HALF
    r2: float = HALF
    t3: float = HALF
    r3: float = HALF
    L_T: float = 0.0
    L10: float = 0.0
    L11: float = 0.0
    L20: float = 0.0
    L21: float = 0.0
    L30: float = 0.0
    L31: float = 0.0
    sigma: int = -1
    l10_sign: int = -1

    def __post_init__(self):
        for n in (1, 2, 3):
            _check_split(f"fanout coupler {n}", getattr(self, f"t{n}"), getattr(self, f"r{n}"))
        for name in FANOUT_LENGTHS:
            if getattr(self, name) < 0:
                raise ValidationError(f"fanout.{name} must be >= 0")
        if self.sigma not in (-1, 1) or self.l10_sign not in (-1, 1):
            raise ValidationError("fanout.sigma and fanout.l10_sign must be +1 or -1")

    @classmethod
    def with_lengths(cls, **lengths) -> "FanoutParams":
        return cls(**lengths)

    def coupler(self, n: int) -> Tuple[float, float]:
        return getattr(self, f"t{n}"), getattr(self, f"r{n}")

    def replace(self, **kw) -> "FanoutParams":
        return replace(self, **kw)


def param_names(cls) -> Tuple[str, ...]:
    return tuple(f.name for f in fields(cls))


@dataclass(frozen=True)
class PairAmplitudeTable:
    """Channel-resolved pair amplitudes on a k-grid.

    ``entries[(p, q)][i, j]`` is the amplitude for the photon at ``k_i``
    leaving channel ``p`` and the one at ``k_j`` leaving channel ``q``,
    normalized so that ``sum |phi_pq|^2 dk^2 = 1``. ``raw_norm`` is the norm
    of the same table before normalization, in units of the single-ring
    amplitude; it fixes the effective source amplitude.
    """

    grid: object
    entries: Dict[Tuple[int, int], np.ndarray] = field(default_factory=dict)
    raw_norm: float = 1.0

    def norm_sq(self) -> float:
        w = self.grid.weight ** 2
        return float(sum(np.sum(np.abs(v) ** 2) for v in self.entries.values()) * w)

    def support(self, tol: float = 1e-12):
        """Channel pairs carrying any amplitude above ``tol``."""
        return sorted(pq for pq, v in self.entries.items() if np.max(np.abs(v)) > tol)

    def rows(self):
        """Yield ``(k1_index, k2_index, p, q, value)`` in a fixed order."""
        for (p, q) in sorted(self.entries):
            v = self.entries[(p, q)]
            for i in range(v.shape[0]):
                for j in range(v.shape[1]):
                    yield i, j, p, q, complex(v[i, j])
