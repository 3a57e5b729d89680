"""Pair-creation operator of the four-ring source.

Rings 1 and 2 sit in the two arms of the first Mach-Zehnder block (output
channels 1, 2), rings 3 and 4 in the second (channels 3, 4). A pair born in
ring ``n`` carries the product of the pump amplitudes reaching that ring,
``A_n(k_a) A_n(k_b)``, times the output-coupler amplitudes ``B_{n,p}(k1)
B_{n,q}(k2)`` of its two photons, times the single-ring joint amplitude.
"""

from __future__ import annotations

import cmath
import math
import warnings
from itertools import product
from typing import Dict, Tuple

import numpy as np

from .errors import ValidationError, ZeroVectorError
from .fock import (
    CreationMonomial,
    FockBasisState,
    KetVector,
    ModeId,
    ModeSpace,
    OperatorPoly,
    apply,
    normalize,
)
from .params import PairAmplitudeTable, SourceParams
from .spectral import BWFMatrix, psi_phase

SOURCE_SPACE_CHANNELS = ("1", "2", "3", "4")
CHANNELS = (1, 2, 3, 4)
OMEGA = frozenset({(1, 1), (2, 1), (1, 2), (2, 2), (3, 3), (4, 3), (3, 4), (4, 4)})
BLOCK_OF_RING = {1: (1, 2), 2: (1, 2), 3: (3, 4), 4: (3, 4)}


class ClosedFormWarning(UserWarning):
    """Closed-form balanced amplitudes requested away from balanced settings."""


def source_space(n_bins: int = 1) -> ModeSpace:
    return ModeSpace(SOURCE_SPACE_CHANNELS, n_bins)


def a_coeff(n: int, k: float, params: SourceParams) -> complex:
    """Pump amplitude reaching ring ``n`` at wavevector ``k``."""
    t, r = params.t, params.r
    prop = cmath.exp(1j * k * (params.L1 + params.L2))
    if n == 1:
        return (1j * t) ** 2 * cmath.exp(1j * params.phi1) * prop
    if n == 2:
        return 1j * t * r * prop
    if n == 3:
        return r * r * cmath.exp(1j * params.phi) * prop
    if n == 4:
        return 1j * t * r * cmath.exp(1j * (params.phi + params.phi2)) * prop
    raise ValidationError(f"ring index must be 1..4, got {n}")


def b_coeff(n: int, p: int, k: float, params: SourceParams) -> complex:
    """Amplitude for a photon born in ring ``n`` to leave through channel ``p``.

    Block 2 mirrors block 1: ring 3 goes through to channel 3, ring 4 to 4.
    """
    if n not in BLOCK_OF_RING:
        raise ValidationError(f"ring index must be 1..4, got {n}")
    if p not in BLOCK_OF_RING[n]:
        return 0j
    prop = cmath.exp(-1j * k * params.L3)
    through = p == n
    return (params.r if through else 1j * params.t) * prop


def pump_split(k1: float, k2: float) -> Tuple[float, float]:
    """Pump wavevectors feeding a pair at ``(k1, k2)``.

    Only ``k_a + k_b = k1 + k2`` enters the amplitudes, so the symmetric split
    is used.
    """
    return (k1 + k2) / 2, (k1 + k2) / 2


def raw_pair_amplitude(p: int, q: int, k1: float, k2: float, params: SourceParams) -> complex:
    """``sum_n A_n(k_a) A_n(k_b) B_{n,p}(k1) B_{n,q}(k2)``."""
    ka, kb = pump_split(k1, k2)
    return sum(
        a_coeff(n, ka, params) * a_coeff(n, kb, params) * b_coeff(n, p, k1, params) * b_coeff(n, q, k2, params)
        for n in (1, 2, 3, 4)
    )


def pair_amplitudes(params: SourceParams, bwf: BWFMatrix, psi_variant: str = "direct") -> PairAmplitudeTable:
    """Channel-resolved pair amplitudes, normalized over all channel pairs.

    With ``psi_variant="paper"`` each pair picks up the extra propagation
    phase that doubles the ``(k1 + k2)(L1 + L2 - L3)`` term.
    """
    if abs(bwf.norm_sq() - 1) > 1e-12:
        raise ValidationError("pair_amplitudes needs a normalized BWF")
    if not bwf.is_symmetric():
        raise ValidationError("degenerate pairs need an exchange-symmetric BWF")
    grid = bwf.grid
    k = grid.k
    extra = np.ones((grid.n_bins, grid.n_bins), dtype=complex)
    if psi_variant != "direct":
        kk1, kk2 = np.meshgrid(k, k, indexing="ij")
        extra = np.exp(1j * (psi_phase(kk1, kk2, params, psi_variant) - psi_phase(kk1, kk2, params, "direct")))
    raw: Dict[Tuple[int, int], np.ndarray] = {}
    for p, q in sorted(OMEGA):
        m = np.empty((grid.n_bins, grid.n_bins), dtype=complex)
        for i, j in product(range(grid.n_bins), repeat=2):
            m[i, j] = raw_pair_amplitude(p, q, float(k[i]), float(k[j]), params)
        raw[(p, q)] = m * bwf.values * extra
    norm = math.sqrt(sum(float(np.sum(np.abs(v) ** 2)) for v in raw.values())) * grid.weight
    if norm == 0.0:
        return PairAmplitudeTable(grid, {pq: v for pq, v in raw.items()}, 0.0)
    return PairAmplitudeTable(grid, {pq: v / norm for pq, v in raw.items()}, norm)


def closed_form_pair_amplitudes(params: SourceParams, bwf: BWFMatrix, psi_variant: str = "paper"):
    """Balanced-source table written directly from its closed form.

    Valid only for 50:50 couplers and quarter-turn MZI phases; a
    :class:`ClosedFormWarning` is issued otherwise. Uses ``beta_ring / beta = 2``.
    """
    if not params.is_balanced:
        warnings.warn("closed-form pair amplitudes assume a balanced source", ClosedFormWarning, stacklevel=2)
    grid = bwf.grid
    kk1, kk2 = np.meshgrid(grid.k, grid.k, indexing="ij")
    base = np.exp(1j * psi_phase(kk1, kk2, params, psi_variant)) * 2 * bwf.values
    zero = np.zeros_like(base)
    entries = {pq: zero for pq in OMEGA}
    entries[(1, 2)] = entries[(2, 1)] = (-1j / 4) * base
    entries[(3, 4)] = entries[(4, 3)] = (1j / 4) * cmath.exp(2j * params.phi) * base
    return PairAmplitudeTable(grid, entries, 0.5)


def pair_creation_operator(table: PairAmplitudeTable) -> OperatorPoly:
    """``(1/sqrt 2) sum_pq sum_ij dk phi_pq(k_i, k_j) b†(p, i) b†(q, j)``."""
    grid = table.grid
    space = source_space(grid.n_bins)
    w = grid.weight / math.sqrt(2)
    terms = []
    for (p, q), v in table.entries.items():
        for i, j in zip(*np.nonzero(v)):
            mono = CreationMonomial.of(ModeId(str(p), int(i)), ModeId(str(q), int(j)))
            terms.append((w * complex(v[i, j]), mono))
    return OperatorPoly(space, terms)


def effective_beta(raw_norm: float, beta_ring: complex) -> complex:
    """Whole-source pair amplitude: ``beta = beta_ring * raw_norm``.

    The phase of ``beta_ring`` is kept so that ``beta_ring / beta`` is real.
    """
    if not raw_norm > 0:
        raise ZeroVectorError("source emits no pairs: raw table norm is zero")
    return complex(beta_ring) * raw_norm


def two_photon_state(params: SourceParams, bwf: BWFMatrix, psi_variant: str = "direct") -> KetVector:
    """Normalized pair state ``C† |vac>`` of the source."""
    c = pair_creation_operator(pair_amplitudes(params, bwf, psi_variant))
    return apply(c, KetVector.vacuum(c.space))


# Dual-rail encoding of the pair: qubit 1 on channels (4, 1), qubit 2 on (2, 3);
# the second channel of each tuple carries logical 1.
QUBIT_RAILS = ((("4", 0), ("1", 1)), (("2", 0), ("3", 1)))


def two_qubit_amplitudes(ket: KetVector, kbins: Tuple[int, int] = (0, 0)) -> np.ndarray:
    """Amplitudes over ``|00>, |01>, |10>, |11>`` for photons in the given bins.

    For a multi-bin ket only the component with qubit-1 photon in
    ``kbins[0]`` and qubit-2 photon in ``kbins[1]`` is read out.
    """
    vec = np.zeros(4, dtype=complex)
    for (c1, b1), (c2, b2) in product(QUBIT_RAILS[0], QUBIT_RAILS[1]):
        state = FockBasisState.of(ModeId(c1, kbins[0]), ModeId(c2, kbins[1]))
        vec[2 * b1 + b2] = ket[state]
    return vec


PSI_MINUS = np.array([0, -1, 1, 0], dtype=complex) / math.sqrt(2)


def bell_fidelity(ket: KetVector, target: np.ndarray = PSI_MINUS) -> float:
    """``|<target|ket>|^2`` for a single-bin two-photon ket."""
    if ket.space.n_bins != 1:
        raise ValidationError("bell_fidelity is defined for single-bin kets")
    ket, _ = normalize(ket)
    return float(abs(np.vdot(target, two_qubit_amplitudes(ket))) ** 2)
