import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pathghz.errors import ValidationError
from pathghz.params import SourceParams
from pathghz.spectral import (
    BWFMatrix,
    CoarseGridWarning,
    CorrelatedGaussian,
    KGrid,
    SeparableGaussian,
    SingleBin,
    discretize,
    gaussian_purity,
    psi_phase,
    schmidt,
)

# Fine enough that the rectangle rule is exact to ~1e-12 for these widths.
FINE = KGrid(k0=0.0, dk=0.05, n_bins=161)


def continuum_purity_by_quadrature(sigma_s, sigma_a, n=400, span=8.0):
    """Independent oracle: purity from the reduced density matrix on a dense grid."""
    k = np.linspace(-span, span, n)
    dk = k[1] - k[0]
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    s, a = (k1 + k2) / math.sqrt(2), (k1 - k2) / math.sqrt(2)
    f = np.exp(-s**2 / (2 * sigma_s**2) - a**2 / (2 * sigma_a**2))
    f /= math.sqrt(np.sum(f**2) * dk * dk)
    rho = f @ f.T * dk
    return float(np.trace(rho @ rho) * dk * dk)


def test_single_bin_is_unit():
    bwf = discretize(SingleBin(), KGrid())
    assert bwf.values.tolist() == [[1.0]]
    assert schmidt(bwf).coefficients.tolist() == [1.0]


def test_single_bin_needs_one_bin():
    with pytest.raises(ValidationError):
        discretize(SingleBin(), KGrid(dk=0.1, n_bins=3))


def test_multibin_grid_needs_spacing():
    with pytest.raises(ValidationError):
        KGrid(dk=0.0, n_bins=2)


def test_grid_is_centred():
    g = KGrid(k0=2.0, dk=0.5, n_bins=4)
    assert g.k.tolist() == [1.25, 1.75, 2.25, 2.75]


def test_separable_factorizes():
    bwf = discretize(SeparableGaussian(0.7, center=0.1), KGrid(dk=0.2, n_bins=9))
    v = bwf.values
    u = v[:, 4] / np.sqrt(v[4, 4])
    assert np.max(np.abs(v - np.outer(u, u))) < 1e-12


def test_separable_is_pure():
    bwf = discretize(SeparableGaussian(0.5), FINE)
    res = schmidt(bwf)
    assert res.purity == pytest.approx(1.0, abs=1e-10)
    assert res.separable


def test_unnormalized_matrix_rejected():
    with pytest.raises(ValidationError):
        BWFMatrix(KGrid(dk=1.0, n_bins=2), [[1, 0], [0, 1]])


def test_values_are_read_only():
    bwf = discretize(SingleBin(), KGrid())
    with pytest.raises(ValueError):
        bwf.values[0, 0] = 2


def test_coarse_grid_warns():
    with pytest.warns(CoarseGridWarning):
        discretize(SeparableGaussian(0.1), KGrid(dk=0.5, n_bins=3))


def test_gaussian_purity_formula_matches_quadrature():
    assert gaussian_purity(1.0, 0.5) == pytest.approx(continuum_purity_by_quadrature(1.0, 0.5), abs=1e-8)


@pytest.mark.parametrize("sigma_s, sigma_a", [(1.0, 0.5), (0.4, 0.8), (0.6, 0.6), (1.2, 0.3)])
def test_correlated_purity_matches_closed_form(sigma_s, sigma_a):
    bwf = discretize(CorrelatedGaussian(sigma_s, sigma_a), FINE)
    assert schmidt(bwf).purity == pytest.approx(gaussian_purity(sigma_s, sigma_a), abs=1e-6)


def test_schmidt_number_for_width_ratio_two():
    # K = (s^2 + a^2) / (2 s a) = 5/4 when s = 2a
    bwf = discretize(CorrelatedGaussian(1.0, 0.5), FINE)
    assert schmidt(bwf).schmidt_number == pytest.approx(1.25, abs=1e-6)


def test_purity_falls_as_ratio_leaves_one():
    ratios = [0.25, 0.5, 1.0, 2.0, 4.0]
    pur = [schmidt(discretize(CorrelatedGaussian(0.6 * q, 0.6), FINE)).purity for q in ratios]
    assert pur[0] < pur[1] < pur[2] > pur[3] > pur[4]


def test_psi_phase_values():
    src = SourceParams(L1=1.0, L2=0.5, L3=0.5)
    assert psi_phase(1.0, 1.0, src, "paper") == pytest.approx(4.0)
    assert psi_phase(1.0, 1.0, src, "direct") == pytest.approx(2.0)
    level = SourceParams(L1=0.3, L2=0.2, L3=0.5)
    for variant in ("paper", "direct"):
        assert psi_phase(1.3, 0.7, level, variant) == pytest.approx(0.0)
    with pytest.raises(ValidationError):
        psi_phase(1, 1, src, "other")


@given(
    st.floats(0.2, 2.0),
    st.floats(0.2, 2.0),
    st.integers(2, 7),
)
def test_schmidt_properties(sigma_s, sigma_a, n):
    bwf = discretize(CorrelatedGaussian(sigma_s, sigma_a), KGrid(dk=0.15, n_bins=n))
    res = schmidt(bwf)
    assert float(np.sum(res.coefficients**2)) == pytest.approx(1.0, abs=1e-12)
    assert 0 < res.purity <= 1 + 1e-12
    assert bwf.is_symmetric()
