"""Sparse algebra of bosonic creation operators and Fock-basis kets.

Everything here is an immutable value. Creation operators commute, so an
operator polynomial is a complex-weighted sum of *monomials*, each monomial a
sorted multiset of modes. Kets are sparse maps from occupation-number basis
states to amplitudes.

Example
-------
>>> space = ModeSpace(("a", "b"))
>>> a = OperatorPoly.creation(space, space.mode("a"))
>>> ket = apply(a * a, KetVector.vacuum(space))
>>> round(ket.norm(), 12)
1.414213562373
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Tuple

from .errors import ConfigurationError, ZeroVectorError

#: coefficients with modulus at or below this are dropped on canonicalization
PRUNE_TOL = 1e-12


@dataclass(frozen=True, order=True)
class ModeId:
    """One bosonic mode: a channel label and a k-bin index."""

    channel: str
    kbin: int = 0

    def __str__(self):
        return f"{self.channel}[{self.kbin}]"


@dataclass(frozen=True)
class ModeSpace:
    """A closed, declared set of channels, each resolved into ``n_bins`` k-bins."""

    channels: Tuple[str, ...]
    n_bins: int = 1

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        if len(set(self.channels)) != len(self.channels):
            raise ConfigurationError(f"duplicate channel labels in {self.channels}")
        if self.n_bins < 1:
            raise ConfigurationError(f"n_bins must be >= 1, got {self.n_bins}")

    def mode(self, channel: str, kbin: int = 0) -> ModeId:
        m = ModeId(channel, kbin)
        if m not in self:
            raise ConfigurationError(f"mode {m} is not in {self}")
        return m

    def modes(self) -> Tuple[ModeId, ...]:
        return tuple(sorted(ModeId(c, j) for c in self.channels for j in range(self.n_bins)))

    def __contains__(self, mode) -> bool:
        return (
            isinstance(mode, ModeId)
            and mode.channel in self.channels
            and 0 <= mode.kbin < self.n_bins
        )

    def __str__(self):
        return f"ModeSpace({','.join(self.channels)}; n_bins={self.n_bins})"


class _Occupation:
    """Sorted multiset of modes; shared shape of monomials and basis states."""

    __slots__ = ("_factors", "_hash")

    def __init__(self, counts: Mapping[ModeId, int] | Iterable[Tuple[ModeId, int]] = ()):
        acc = {}
        items = counts.items() if isinstance(counts, Mapping) else counts
        for mode, n in items:
            if not isinstance(mode, ModeId):
                raise TypeError(f"expected ModeId, got {mode!r}")
            if int(n) != n or n < 1:
                raise ValueError(f"occupation of {mode} must be a positive integer, got {n}")
            acc[mode] = acc.get(mode, 0) + int(n)
        self._factors = tuple(sorted(acc.items()))
        self._hash = hash((type(self).__name__, self._factors))

    @classmethod
    def of(cls, *modes: ModeId):
        """Build from a list of modes, repeated modes raising the power."""
        return cls((m, 1) for m in modes)

    @property
    def factors(self) -> Tuple[Tuple[ModeId, int], ...]:
        return self._factors

    def count(self, mode: ModeId) -> int:
        for m, n in self._factors:
            if m == mode:
                return n
        return 0

    def as_dict(self):
        return dict(self._factors)

    @property
    def total(self) -> int:
        return sum(n for _, n in self._factors)

    def modes(self):
        return tuple(m for m, _ in self._factors)

    def merged(self, other: "_Occupation"):
        return type(self)(list(self._factors) + list(other._factors))

    def __iter__(self):
        return iter(self._factors)

    def __len__(self):
        return len(self._factors)

    def __eq__(self, other):
        return type(other) is type(self) and other._factors == self._factors

    def __lt__(self, other):
        return (self.total, self._factors) < (other.total, other._factors)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        inner = ", ".join(f"{m}^{n}" if n > 1 else str(m) for m, n in self._factors)
        return f"{type(self).__name__}({inner})"


class CreationMonomial(_Occupation):
    """Product of creation operators; the empty monomial is the identity."""

    __slots__ = ()

    def __mul__(self, other):
        if not isinstance(other, CreationMonomial):
            return NotImplemented
        return self.merged(other)


class FockBasisState(_Occupation):
    """Occupation-number basis state; the empty state is the vacuum."""

    __slots__ = ()


def _canonical(pairs, key_type) -> dict:
    acc = {}
    for key, coef in pairs:
        if not isinstance(key, key_type):
            raise TypeError(f"expected {key_type.__name__}, got {key!r}")
        acc[key] = acc.get(key, 0j) + complex(coef)
    return {k: acc[k] for k in sorted(acc) if abs(acc[k]) > PRUNE_TOL}


def _check_modes(space: ModeSpace, keys):
    for key in keys:
        for mode in key.modes():
            if mode not in space:
                raise ConfigurationError(f"mode {mode} is outside {space}")


class OperatorPoly:
    """Sparse complex-weighted sum of creation monomials over one ModeSpace."""

    __slots__ = ("space", "_terms")

    def __init__(self, space: ModeSpace, terms=()):
        pairs = terms.items() if isinstance(terms, Mapping) else ((m, c) for c, m in terms)
        canon = _canonical(pairs, CreationMonomial)
        _check_modes(space, canon)
        self.space = space
        self._terms = MappingProxyType(canon)

    @classmethod
    def creation(cls, space: ModeSpace, mode: ModeId) -> "OperatorPoly":
        return cls(space, {CreationMonomial.of(mode): 1.0})

    @classmethod
    def identity(cls, space: ModeSpace) -> "OperatorPoly":
        return cls(space, {CreationMonomial(): 1.0})

    @classmethod
    def zero(cls, space: ModeSpace) -> "OperatorPoly":
        return cls(space)

    @property
    def terms(self) -> Mapping[CreationMonomial, complex]:
        return self._terms

    def simplify(self) -> "OperatorPoly":
        # construction already canonicalizes; kept so callers can be explicit
        return OperatorPoly(self.space, self._terms)

    def degrees(self) -> set:
        return {m.total for m in self._terms}

    def _same_space(self, other):
        if other.space != self.space:
            raise ConfigurationError(f"mixed mode universes: {self.space} vs {other.space}")

    def __iter__(self) -> Iterator[Tuple[complex, CreationMonomial]]:
        return ((c, m) for m, c in self._terms.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __add__(self, other):
        if not isinstance(other, OperatorPoly):
            return NotImplemented
        self._same_space(other)
        return OperatorPoly(self.space, [(c, m) for m, c in self._terms.items()] + list(other))

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, OperatorPoly):
            self._same_space(other)
            pairs = [
                (c1 * c2, m1 * m2)
                for m1, c1 in self._terms.items()
                for m2, c2 in other._terms.items()
            ]
            return OperatorPoly(self.space, pairs)
        if isinstance(other, (int, float, complex)):
            return OperatorPoly(self.space, {m: c * other for m, c in self._terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        return self * (1.0 / other)

    def __pow__(self, n: int):
        out = OperatorPoly.identity(self.space)
        for _ in range(n):
            out = out * self
        return out

    def isclose(self, other: "OperatorPoly", tol: float = 1e-12) -> bool:
        self._same_space(other)
        keys = set(self._terms) | set(other._terms)
        return all(abs(self._terms.get(k, 0) - other._terms.get(k, 0)) <= tol for k in keys)

    def __eq__(self, other):
        return (
            isinstance(other, OperatorPoly)
            and other.space == self.space
            and dict(other._terms) == dict(self._terms)
        )

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"({c:.6g}){m!r}" for m, c in list(self._terms.items())[:6])
        more = "" if len(self._terms) <= 6 else f" + ... ({len(self._terms)} terms)"
        return f"OperatorPoly[{body or '0'}{more}]"


class KetVector:
    """Sparse ket over occupation-number basis states of one ModeSpace."""

    __slots__ = ("space", "_amps")

    def __init__(self, space: ModeSpace, amplitudes=()):
        pairs = amplitudes.items() if isinstance(amplitudes, Mapping) else amplitudes
        canon = _canonical(pairs, FockBasisState)
        _check_modes(space, canon)
        self.space = space
        self._amps = MappingProxyType(canon)

    @classmethod
    def vacuum(cls, space: ModeSpace) -> "KetVector":
        return cls(space, {FockBasisState(): 1.0})

    @classmethod
    def basis(cls, space: ModeSpace, state: FockBasisState, amplitude: complex = 1.0):
        return cls(space, {state: amplitude})

    @property
    def amplitudes(self) -> Mapping[FockBasisState, complex]:
        return self._amps

    def simplify(self) -> "KetVector":
        return KetVector(self.space, self._amps)

    def __getitem__(self, state: FockBasisState) -> complex:
        return self._amps.get(state, 0j)

    def __iter__(self):
        return iter(self._amps.items())

    def __len__(self):
        return len(self._amps)

    def __bool__(self):
        return bool(self._amps)

    def norm_sq(self) -> float:
        return math.fsum(abs(a) ** 2 for a in self._amps.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def photon_numbers(self) -> set:
        return {s.total for s in self._amps}

    def filter(self, predicate) -> "KetVector":
        """Keep only components whose basis state satisfies ``predicate``."""
        return KetVector(self.space, {s: a for s, a in self._amps.items() if predicate(s)})

    def _same_space(self, other):
        if other.space != self.space:
            raise ConfigurationError(f"mixed mode universes: {self.space} vs {other.space}")

    def __add__(self, other):
        if not isinstance(other, KetVector):
            return NotImplemented
        self._same_space(other)
        return KetVector(self.space, list(self._amps.items()) + list(other._amps.items()))

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex)):
            return KetVector(self.space, {s: a * scalar for s, a in self._amps.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def isclose(self, other: "KetVector", tol: float = 1e-12) -> bool:
        self._same_space(other)
        keys = set(self._amps) | set(other._amps)
        return all(abs(self[k] - other[k]) <= tol for k in keys)

    def __repr__(self):
        body = " + ".join(f"({a:.6g}){s!r}" for s, a in list(self._amps.items())[:6])
        more = "" if len(self._amps) <= 6 else f" + ... ({len(self._amps)} states)"
        return f"KetVector[{body or '0'}{more}]"


def _ladder_factor(n: int, p: int) -> float:
    # (b†)^p |n> = sqrt((n+1)...(n+p)) |n+p>
    f = 1.0
    for j in range(1, p + 1):
        f *= n + j
    return math.sqrt(f)


def apply(op: OperatorPoly, ket: KetVector) -> KetVector:
    """Act with a creation-operator polynomial on a ket."""
    if op.space != ket.space:
        raise ConfigurationError(f"mixed mode universes: {op.space} vs {ket.space}")
    out = []
    for mono, c in op.terms.items():
        for state, a in ket.amplitudes.items():
            occ = state.as_dict()
            factor = 1.0
            for mode, p in mono:
                n = occ.get(mode, 0)
                factor *= _ladder_factor(n, p)
                occ[mode] = n + p
            out.append((FockBasisState(occ), c * a * factor))
    return KetVector(ket.space, out)


def inner(a: KetVector, b: KetVector) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.space != b.space:
        raise ConfigurationError(f"mixed mode universes: {a.space} vs {b.space}")
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for s in small.amplitudes:
        if s in large.amplitudes:
            total += a[s].conjugate() * b[s]
    return total


def normalize(ket: KetVector) -> Tuple[KetVector, float]:
    """Return ``(ket / |ket|, |ket|)``; raises ZeroVectorError on the zero vector."""
    n = ket.norm()
    if n == 0.0:
        raise ZeroVectorError()
    return ket / n, n
