import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pathghz.errors import ConfigurationError, ZeroVectorError
from pathghz.fock import (
    CreationMonomial,
    FockBasisState,
    KetVector,
    ModeId,
    ModeSpace,
    OperatorPoly,
    apply,
    inner,
    normalize,
)

SPACE = ModeSpace(("a", "b", "c"), 2)
MODES = SPACE.modes()


def ket1(mode, amp=1.0):
    return KetVector.basis(SPACE, FockBasisState.of(mode), amp)


def test_creation_on_vacuum():
    m = SPACE.mode("a")
    out = apply(OperatorPoly.creation(SPACE, m), KetVector.vacuum(SPACE))
    assert out.isclose(ket1(m))


def test_double_creation_ladder_factor():
    m = SPACE.mode("b", 1)
    out = apply(OperatorPoly.creation(SPACE, m) ** 2, KetVector.vacuum(SPACE))
    assert out[FockBasisState.of(m, m)] == pytest.approx(math.sqrt(2))
    assert len(out) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_ladder_on_occupied_mode(n):
    m = SPACE.mode("c")
    start = KetVector.basis(SPACE, FockBasisState([(m, n)]))
    out = apply(OperatorPoly.creation(SPACE, m), start)
    assert out[FockBasisState([(m, n + 1)])] == pytest.approx(math.sqrt(n + 1))


def test_inner_orthonormal():
    a, b = SPACE.mode("a"), SPACE.mode("b")
    assert inner(ket1(a), ket1(a)) == 1
    assert inner(ket1(a), ket1(b)) == 0


def test_inner_is_antilinear_in_first_argument():
    a = SPACE.mode("a")
    assert inner(ket1(a, 1j), ket1(a)) == pytest.approx(-1j)


def test_normalize_returns_norm():
    a = SPACE.mode("a")
    unit, n = normalize(ket1(a) * 2)
    assert n == pytest.approx(2.0)
    assert unit.isclose(ket1(a))


def test_normalize_zero_vector_raises():
    with pytest.raises(ZeroVectorError) as exc:
        normalize(KetVector(SPACE))
    assert exc.value.invariant == "nonzero-norm"


def test_mixed_spaces_rejected():
    other = ModeSpace(("x",))
    with pytest.raises(ConfigurationError):
        OperatorPoly.creation(SPACE, SPACE.mode("a")) + OperatorPoly.creation(other, other.mode("x"))
    with pytest.raises(ConfigurationError):
        apply(OperatorPoly.creation(other, other.mode("x")), KetVector.vacuum(SPACE))


def test_mode_outside_space_rejected():
    with pytest.raises(ConfigurationError):
        OperatorPoly.creation(SPACE, ModeId("z"))


def test_cancellation_prunes_terms():
    a = OperatorPoly.creation(SPACE, SPACE.mode("a"))
    assert len(a - a) == 0
    assert not (a - a)


def test_monomial_is_commutative():
    a, b = SPACE.mode("a"), SPACE.mode("b", 1)
    assert CreationMonomial.of(a, b) == CreationMonomial.of(b, a)
    assert CreationMonomial.of(a) * CreationMonomial.of(a) == CreationMonomial([(a, 2)])


def test_square_of_sum_has_cross_term_two():
    a = OperatorPoly.creation(SPACE, SPACE.mode("a"))
    b = OperatorPoly.creation(SPACE, SPACE.mode("b"))
    sq = (a + b) ** 2
    cross = CreationMonomial.of(SPACE.mode("a"), SPACE.mode("b"))
    assert sq.terms[cross] == pytest.approx(2)
    assert sq.degrees() == {2}


# -- properties ---------------------------------------------------------------

coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
mono = st.lists(st.sampled_from(MODES), min_size=0, max_size=3).map(lambda ms: CreationMonomial.of(*ms))
polys = st.lists(st.tuples(coef, mono), max_size=4).map(lambda terms: OperatorPoly(SPACE, terms))
kets = st.lists(
    st.tuples(st.lists(st.sampled_from(MODES), max_size=2).map(lambda ms: FockBasisState.of(*ms)), coef),
    max_size=4,
).map(lambda items: KetVector(SPACE, items))


@given(polys, polys, polys)
def test_product_is_associative_and_distributive(p, q, r):
    assert ((p * q) * r).isclose(p * (q * r), tol=1e-9)
    assert (p * (q + r)).isclose(p * q + p * r, tol=1e-9)


@given(polys, polys)
def test_product_is_commutative(p, q):
    assert (p * q).isclose(q * p, tol=1e-9)


@given(polys, polys, kets)
def test_apply_is_linear_and_composes(p, q, k):
    assert apply(p + q, k).isclose(apply(p, k) + apply(q, k), tol=1e-9)
    assert apply(p * q, k).isclose(apply(p, apply(q, k)), tol=1e-8)


@given(kets, kets)
def test_inner_hermitian(a, b):
    assert inner(a, b) == pytest.approx(inner(b, a).conjugate(), abs=1e-9)


@given(kets)
def test_normalize_gives_unit_norm(k):
    if k.norm() < 1e-6:
        return
    unit, n = normalize(k)
    assert unit.norm() == pytest.approx(1.0, abs=1e-12)
    assert (unit * n).isclose(k, tol=1e-9)
