"""Dense state-vector expansion in a photon-number-truncated Fock space.

The basis is every occupation pattern with at most ``max_photons`` photons,
ordered by total photon number then lexicographically. ``C†`` is applied
elementwise with its bosonic ladder factors, so nothing here shares code with
the sparse operator algebra beyond the mode labels.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from ..errors import DimensionGuardError
from ..fock import KetVector, ModeId, OperatorPoly

MAX_CHANNELS = 8
MAX_BINS = 3


def occupations(n_modes: int, max_photons: int) -> List[Tuple[int, ...]]:
    """All occupation tuples of ``n_modes`` modes with total at most ``max_photons``."""
    out: List[Tuple[int, ...]] = []

    def fill(prefix, left, remaining):
        if left == 0:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        for n in range(remaining, -1, -1):
            fill(prefix + [n], left - 1, remaining - n)

    for total in range(max_photons + 1):
        fill([], n_modes, total)
    return out


@dataclass(frozen=True)
class DenseKet:
    modes: Tuple[ModeId, ...]
    basis: Tuple[Tuple[int, ...], ...]
    vector: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def amplitude(self, occupation: Dict[ModeId, int]) -> complex:
        key = tuple(occupation.get(m, 0) for m in self.modes)
        try:
            return complex(self.vector[self.basis.index(key)])
        except ValueError:
            return 0j

    def as_dict(self, tol: float = 0.0) -> Dict[Tuple[int, ...], complex]:
        return {occ: complex(a) for occ, a in zip(self.basis, self.vector) if abs(a) > tol}


def _apply_dense(op_terms, index, basis, vec, max_photons):
    out = np.zeros_like(vec)
    for src in np.nonzero(vec)[0]:
        occ = basis[src]
        for coef, raises in op_terms:
            new = list(occ)
            factor = 1.0
            for m, p in raises:
                for _ in range(p):
                    new[m] += 1
                    factor *= math.sqrt(new[m])
            if sum(new) > max_photons:
                continue
            out[index[tuple(new)]] += coef * factor * vec[src]
    return out


def dense_expand(c: OperatorPoly, beta: complex, max_photons: int = 4) -> DenseKet:
    """``(1 + beta C† + beta^2 C†^2 / 2) |vac>`` as a dense vector.

    Raises :class:`DimensionGuardError` above 8 channels or 3 bins.
    """
    space = c.space
    if len(space.channels) > MAX_CHANNELS or space.n_bins > MAX_BINS:
        raise DimensionGuardError(
            f"dense expansion limited to {MAX_CHANNELS} channels x {MAX_BINS} bins, "
            f"got {len(space.channels)} x {space.n_bins}"
        )
    modes = tuple(space.modes())
    pos = {m: i for i, m in enumerate(modes)}
    basis = tuple(occupations(len(modes), max_photons))
    index = {occ: i for i, occ in enumerate(basis)}
    terms = []
    for coef, mono in c:
        terms.append((complex(coef), [(pos[m], p) for m, p in mono.factors]))
    v0 = np.zeros(len(basis), dtype=complex)
    v0[0] = 1.0
    v1 = _apply_dense(terms, index, basis, v0, max_photons)
    v2 = _apply_dense(terms, index, basis, v1, max_photons)
    return DenseKet(modes, basis, v0 + beta * v1 + beta**2 / 2 * v2)


@dataclass(frozen=True)
class Comparison:
    max_deviation: float
    phase: float
    n_compared: int
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tol


def sparse_to_dense(ket: KetVector, dense: DenseKet) -> np.ndarray:
    pos = {m: i for i, m in enumerate(dense.modes)}
    index = {occ: i for i, occ in enumerate(dense.basis)}
    out = np.zeros(dense.dimension, dtype=complex)
    for state, amp in ket:
        occ = [0] * len(dense.modes)
        for m, n in state.factors:
            occ[pos[m]] = n
        key = tuple(occ)
        if key not in index:
            raise DimensionGuardError(f"state {state} lies outside the truncated basis")
        out[index[key]] += amp
    return out


def compare(ket: KetVector, dense: DenseKet, tol: float = 1e-12) -> Comparison:
    """Largest amplitude difference after removing one global phase."""
    a = sparse_to_dense(ket, dense)
    b = dense.vector
    overlap = np.vdot(b, a)
    theta = cmath.phase(overlap) if abs(overlap) > 0 else 0.0
    diff = a * cmath.exp(-1j * theta) - b
    return Comparison(float(np.max(np.abs(diff))) if diff.size else 0.0, theta, int(np.count_nonzero(np.abs(a) + np.abs(b))), tol)
