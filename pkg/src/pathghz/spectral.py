"""Discretized biphoton wave functions and their Schmidt analysis.

The single-ring joint amplitude is not derived from first principles here;
a small family of models stands in for it, discretized on a uniform k-grid
and normalized so that ``sum |phi(k_i, k_j)|^2 dk^2 = 1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ValidationError

NORM_TOL = 1e-12


class CoarseGridWarning(UserWarning):
    """A model width is below the grid spacing."""


@dataclass(frozen=True)
class KGrid:
    """Uniform grid of ``n_bins`` wavevectors centred on ``k0``.

    A single-bin grid is the monochromatic idealization: its bin width is
    only a unit of measure and defaults to 1.
    """

    k0: float = 0.0
    dk: float = 1.0
    n_bins: int = 1

    def __post_init__(self):
        if self.n_bins < 1:
            raise ValidationError(f"n_bins must be >= 1, got {self.n_bins}")
        if self.n_bins > 1 and not self.dk > 0:
            raise ValidationError(f"dk must be > 0 for a multi-bin grid, got {self.dk}")

    @property
    def weight(self) -> float:
        """Measure of one bin (``dk``, or 1 for a degenerate single bin)."""
        return self.dk if self.dk > 0 else 1.0

    @property
    def k(self) -> np.ndarray:
        offsets = np.arange(self.n_bins) - (self.n_bins - 1) / 2
        return self.k0 + offsets * self.weight

    def __len__(self):
        return self.n_bins


@dataclass(frozen=True)
class SingleBin:
    pass


@dataclass(frozen=True)
class SeparableGaussian:
    sigma: float
    center: float | None = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValidationError("SeparableGaussian.sigma must be > 0")


@dataclass(frozen=True)
class CorrelatedGaussian:
    """Gaussian in the sum and difference coordinates ``(k1 +- k2) / sqrt(2)``."""

    sigma_s: float
    sigma_a: float
    center: float | None = None

    def __post_init__(self):
        if not (self.sigma_s > 0 and self.sigma_a > 0):
            raise ValidationError("CorrelatedGaussian widths must be > 0")


BWFModel = Union[SingleBin, SeparableGaussian, CorrelatedGaussian]


class BWFMatrix:
    """Biphoton wave function sampled on a KGrid, unit L2 norm."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: KGrid, values):
        values = np.array(values, dtype=complex)
        if values.shape != (grid.n_bins, grid.n_bins):
            raise ValidationError(
                f"BWF shape {values.shape} does not match grid of {grid.n_bins} bins"
            )
        self.grid = grid
        self.values = values
        self.values.flags.writeable = False
        n2 = self.norm_sq()
        if abs(n2 - 1.0) > NORM_TOL:
            raise ValidationError(f"BWF is not normalized: sum |phi|^2 dk^2 = {n2!r}")

    @classmethod
    def normalized(cls, grid: KGrid, values) -> "BWFMatrix":
        values = np.asarray(values, dtype=complex)
        n = math.sqrt(float(np.sum(np.abs(values) ** 2))) * grid.weight
        if n == 0.0:
            raise ValidationError("BWF values are identically zero")
        return cls(grid, values / n)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2)) * self.grid.weight ** 2

    @property
    def mode_amplitudes(self) -> np.ndarray:
        """Amplitudes on the discrete (unit-normalized) bin modes; Frobenius norm 1."""
        return self.values * self.grid.weight

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.values - self.values.T)) <= tol * max(1.0, np.max(np.abs(self.values))))

    def rows(self):
        for i in range(self.grid.n_bins):
            for j in range(self.grid.n_bins):
                yield i, j, complex(self.values[i, j])


def discretize(model: BWFModel, grid: KGrid) -> BWFMatrix:
    """Sample ``model`` on ``grid`` and normalize."""
    if isinstance(model, SingleBin):
        if grid.n_bins != 1:
            raise ValidationError("SingleBin requires a one-bin grid")
        return BWFMatrix(grid, [[1.0 / grid.weight]])

    k = grid.k
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    c = grid.k0 if model.center is None else model.center
    if isinstance(model, SeparableGaussian):
        _warn_if_coarse(grid, model.sigma)
        v = np.exp(-((k - c) ** 2) / (2 * model.sigma ** 2))
        values = np.outer(v, v)
    elif isinstance(model, CorrelatedGaussian):
        _warn_if_coarse(grid, min(model.sigma_s, model.sigma_a))
        s = (k1 + k2 - 2 * c) / math.sqrt(2)
        a = (k1 - k2) / math.sqrt(2)
        values = np.exp(-(s ** 2) / (2 * model.sigma_s ** 2) - a ** 2 / (2 * model.sigma_a ** 2))
    else:
        raise ValidationError(f"unknown BWF model {model!r}")
    return BWFMatrix.normalized(grid, values)


def _warn_if_coarse(grid: KGrid, width: float):
    if grid.n_bins > 1 and width < grid.dk:
        warnings.warn(
            f"model width {width} is below the grid spacing {grid.dk}", CoarseGridWarning, stacklevel=3
        )


@dataclass(frozen=True)
class SchmidtResult:
    coefficients: np.ndarray
    purity: float

    @property
    def schmidt_number(self) -> float:
        return 1.0 / self.purity

    @property
    def separable(self) -> bool:
        return abs(self.purity - 1.0) <= 1e-10


def schmidt(bwf: BWFMatrix) -> SchmidtResult:
    """Schmidt coefficients (descending) and heralded purity ``sum lambda^4``."""
    s = np.linalg.svd(bwf.mode_amplitudes, compute_uv=False)
    return SchmidtResult(coefficients=s, purity=float(np.sum(s ** 4)))


def gaussian_purity(sigma_s: float, sigma_a: float) -> float:
    """Closed-form purity of the continuum CorrelatedGaussian."""
    return 2 * sigma_s * sigma_a / (sigma_s ** 2 + sigma_a ** 2)


def psi_phase(k1, k2, params, variant: str = "direct"):
    """Propagation phase of a pair leaving the source.

    ``"paper"`` is ``2 (k1 + k2)(L1 + L2 - L3)``; ``"direct"`` counts each pump
    and generated photon once and drops the factor 2.
    """
    base = (np.asarray(k1) + np.asarray(k2)) * (params.L1 + params.L2 - params.L3)
    if variant == "paper":
        return 2 * base
    if variant == "direct":
        return base
    raise ValidationError(f"unknown psi variant {variant!r}")
