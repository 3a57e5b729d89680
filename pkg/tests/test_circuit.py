import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pathghz.circuit import (
    DETECTOR_PORTS,
    ComponentSpec,
    Delay,
    DirectionalCoupler,
    ModeMap,
    PhaseShift,
    Swap,
    build_fanout,
    check_unitary,
    circuit_map,
    component_matrix,
    fanout_circuit,
    fanout_literal,
    heisenberg_rewrite,
    planar_swaps,
)
from pathghz.errors import ConfigurationError, ValidationError
from pathghz.fock import KetVector, ModeId, ModeSpace, OperatorPoly, apply
from pathghz.oracle import fanout_amplitudes
from pathghz.params import FANOUT_LENGTHS, HALF, FanoutParams
from pathghz.spectral import KGrid

ISQ = 1 / math.sqrt(2)


def test_closed_coupler_is_identity():
    assert np.array_equal(component_matrix(DirectionalCoupler(0.0, 1.0), 0.3), np.eye(2))


def test_balanced_coupler_matrix():
    m = component_matrix(DirectionalCoupler(HALF, HALF, sigma=1), 0.0)
    assert np.allclose(m, [[ISQ, 1j * ISQ], [1j * ISQ, ISQ]], atol=1e-15)
    assert np.max(np.abs(m.conj().T @ m - np.eye(2))) < 1e-15


def test_delay_at_opposite_k_cancels():
    d = Delay(1.7)
    assert component_matrix(d, 0.9) * component_matrix(d, -0.9) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "kind",
    [lambda: DirectionalCoupler(0.6, 0.6), lambda: DirectionalCoupler(0.6, 0.8, sigma=2), lambda: Delay(-1.0)],
)
def test_invalid_components(kind):
    with pytest.raises(ValidationError):
        kind()


def test_arity_checked():
    with pytest.raises(ValidationError):
        ComponentSpec(Swap(), ("a",), ("b",))


def test_phase_shift_matrix():
    assert component_matrix(PhaseShift(math.pi / 3), 0)[0, 0] == pytest.approx(cmath.exp(1j * math.pi / 3))


def test_channel2_rewrite():
    fan = FanoutParams(L20=0.4, L30=1.1, t1=0.6, r1=0.8)
    k = 1.3
    amp = fanout_literal(fan, "2", k)
    assert amp["D3,0"] == pytest.approx(-1j * 0.6 * cmath.exp(-1j * k * 1.1))
    assert amp["D2,0"] == pytest.approx(0.8 * cmath.exp(-1j * k * 0.4))


def test_channel3_rewrite_ideal():
    amp = fanout_literal(FanoutParams(), "3", 0.0)
    assert amp["D3,1"] == pytest.approx(-1j * ISQ)
    assert amp["D1,1"] == pytest.approx(ISQ)


def test_map_matches_literal():
    fan = FanoutParams(L_T=0.3, L10=0.9, L21=1.4, L31=0.2, t3=0.8, r3=0.6)
    grid = KGrid(k0=1.1, dk=0.2, n_bins=2)
    m = build_fanout(fan, grid)
    for j, k in enumerate(grid.k):
        for ch in "1234":
            got = {mo.channel: a for mo, a in m.image(ModeId(ch, j))}
            want = fanout_literal(fan, ch, float(k))
            assert set(got) == set(want)
            for port in want:
                assert got[port] == pytest.approx(want[port], abs=1e-14)


def test_identity_rewrite_unchanged():
    space = ModeSpace(("1", "2"))
    op = OperatorPoly.creation(space, space.mode("1")) * OperatorPoly.creation(space, space.mode("2")) * 0.5j
    assert heisenberg_rewrite(op, ModeMap.identity(space, KGrid())).isclose(op)


def test_identity_map_is_unitary():
    space = ModeSpace(("a", "b", "c"))
    assert check_unitary(ModeMap.identity(space, KGrid())).max_deviation == 0.0


def test_unmapped_mode_rejected():
    space = ModeSpace(("1", "9"))
    op = OperatorPoly.creation(space, space.mode("9"))
    with pytest.raises(ConfigurationError):
        heisenberg_rewrite(op, build_fanout(FanoutParams(), KGrid()))


def test_stray_wire_rejected():
    spec = [ComponentSpec(Swap(), ("a", "b"), ("c", "d"))]
    with pytest.raises(ConfigurationError):
        circuit_map(spec, ModeSpace(("a", "b")), ModeSpace(("c",)), KGrid())


def test_planar_swaps_sort_target():
    swaps, slots = planar_swaps(["x", "y", "z"], ["z", "x", "y"])
    assert len(swaps) == 2


def test_fanout_isometry_on_source_channels():
    rep = check_unitary(build_fanout(FanoutParams(t1=0.3, r1=math.sqrt(0.91)), KGrid(k0=0.7), vacuum_ports=False),
                        inputs=("1", "2", "3", "4"))
    assert rep.ok


def test_fanout_circuit_contains_crossings():
    kinds = {type(c.kind) for c in fanout_circuit(FanoutParams())}
    assert Swap in kinds and DirectionalCoupler in kinds


def test_rewrite_preserves_four_photon_norm():
    space = ModeSpace(("1", "2", "3", "4"))
    b = {c: OperatorPoly.creation(space, space.mode(c)) for c in "1234"}
    op = (b["1"] * b["2"] - b["3"] * b["4"]) * ISQ
    vac = KetVector.vacuum(space)
    before = apply(op**2, vac).norm()
    fan = build_fanout(FanoutParams(L10=0.3, L30=1.2), KGrid(k0=0.8))
    mapped = heisenberg_rewrite(op, fan)
    after = apply(mapped**2, KetVector.vacuum(mapped.space)).norm()
    assert after == pytest.approx(before, abs=1e-10)


lengths = st.fixed_dictionaries({n: st.floats(0, 5) for n in FANOUT_LENGTHS})
cross = st.floats(0, 1)


@given(lengths, cross, cross, cross, st.floats(-3, 3), st.sampled_from([-1, 1]))
def test_full_map_unitary(lens, t1, t2, t3, k, sigma):
    kw = dict(lens, sigma=sigma)
    for n, t in ((1, t1), (2, t2), (3, t3)):
        kw[f"t{n}"], kw[f"r{n}"] = t, math.sqrt(1 - t * t)
    rep = check_unitary(build_fanout(FanoutParams(**kw), KGrid(k0=k)))
    assert rep.max_deviation < 1e-12


@given(lengths, st.floats(-3, 3))
def test_map_matches_history_oracle(lens, k):
    fan = FanoutParams(**lens)
    m = build_fanout(fan, KGrid(k0=k))
    for ch in "1234":
        got = {mo.channel: a for mo, a in m.image(ModeId(ch, 0))}
        ref = fanout_amplitudes(fan, int(ch), k)
        for port in DETECTOR_PORTS:
            assert abs(got.get(port, 0) - ref.get(port, 0)) < 1e-12
