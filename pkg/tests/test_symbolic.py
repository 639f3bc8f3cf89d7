"""Tests for itinerary coding and the shift conjugacy in the Cantor regime."""

import cmath
import math

import numpy as np
import pytest

from tanatlas.core import BranchIndex, FamilyParams, branch_pole, evaluate, is_infinite, pole
from tanatlas.coding import (
    AlphabetOverflowError,
    Itinerary,
    LeftCantorRegionError,
    SingularValueHitError,
    itinerary_from_point,
    prepole_from_itinerary,
    verify_shift_conjugacy,
)

CANTOR_LAM = 0.3 * cmath.exp(1j * math.pi / 5)


def _params():
    return FamilyParams(CANTOR_LAM, 1, 2)


def test_depth_one_is_the_pole():
    fp = _params()
    for k in (-2, -1, 0, 1, 2):
        for j in (0, 1):
            z = prepole_from_itinerary(fp, Itinerary(((k, j, 0),)))
            assert abs(z - branch_pole(fp, k, j)) < 1e-14


def test_branch_pole_lattice_identity():
    fp = _params()
    assert abs(branch_pole(fp, 1, 0) - pole(fp, 1, 0)) < 1e-14
    assert abs(branch_pole(fp, -1, 0) - pole(fp, 0, 1)) < 1e-14


def test_prepole_order():
    fp = _params()
    it = Itinerary(((0, 0, 0), (1, 1, 0), (-1, 0, 0)))
    z = prepole_from_itinerary(fp, it)
    for step in range(it.depth - 1):
        z = evaluate(fp, z)
        assert abs(z) < 1e6
    z = evaluate(fp, z)
    assert is_infinite(z) or abs(z) > 1e6


def test_shift_relation_depth_up_to_five():
    fp = _params()
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(150):
        depth = int(rng.integers(2, 6))
        symbols = tuple((int(rng.integers(-2, 3)), int(rng.integers(0, 2)), 0)
                        for _ in range(depth))
        it = Itinerary(symbols)
        z = prepole_from_itinerary(fp, it)
        zt = prepole_from_itinerary(fp, it.tail())
        worst = max(worst, abs(evaluate(fp, z) - zt))
    assert worst < 1e-8


def test_nested_refinement_contracts():
    fp = _params()
    prefix = ((0, 0, 0), (1, 1, 0))
    spreads = []
    for depth_ext in range(1, 4):
        pts = []
        for k in (-2, -1, 0, 1, 2):
            for j in (0, 1):
                it = Itinerary(prefix * depth_ext + ((k, j, 0),))
                pts.append(prepole_from_itinerary(fp, it))
        re = [p.real for p in pts]
        im = [p.imag for p in pts]
        spreads.append(math.hypot(max(re) - min(re), max(im) - min(im)))
    assert spreads[1] < spreads[0] / 2
    assert spreads[2] < spreads[1] / 2


def test_itinerary_from_pole_base_case():
    fp = _params()
    it = itinerary_from_point(fp, pole(fp, 1, 0), 1)
    assert it.symbols == (BranchIndex(1, 0, 0),)


def test_codec_round_trip_depth_three():
    fp = _params()
    for k1 in (-2, 0, 2):
        for k2 in (-1, 1):
            for j1 in (0, 1):
                it = Itinerary(((k1, j1, 0), (k2, 1 - j1, 0), (1, j1, 0)))
                z = prepole_from_itinerary(fp, it)
                back = itinerary_from_point(fp, z, 3)
                assert back.symbols == it.symbols
                z2 = prepole_from_itinerary(fp, back)
                assert abs(z2 - z) < 1e-6


def test_sigma_compatibility():
    fp = _params()
    it = Itinerary(((2, 1, 0), (-1, 0, 0), (0, 1, 0), (1, 0, 0)))
    z = prepole_from_itinerary(fp, it)
    tail = itinerary_from_point(fp, evaluate(fp, z), 3)
    full = itinerary_from_point(fp, z, 4)
    assert full.symbols[1:] == tail.symbols


def test_first_symbol_rotation_symmetry():
    # replacing the first symbol's sheet j by j+1 multiplies the point by
    # exp(2 pi i / q); the rest of the orbit is unchanged
    fp = _params()
    rot = cmath.exp(2j * math.pi / fp.q)
    for sym in [((0, 0, 0), (1, 1, 0)), ((1, 1, 0), (-2, 0, 0), (0, 0, 0))]:
        it = Itinerary(sym)
        b0 = it.symbols[0]
        it2 = Itinerary(((b0.k, (b0.j + 1) % fp.q, b0.l),) + it.symbols[1:])
        z = prepole_from_itinerary(fp, it)
        z2 = prepole_from_itinerary(fp, it2)
        assert abs(z2 - rot * z) < 1e-12


def test_alphabet_overflow():
    fp = _params()
    with pytest.raises(AlphabetOverflowError):
        prepole_from_itinerary(fp, Itinerary(((7, 0, 0),)), k_max=3)


def test_left_cantor_region():
    fp = _params()
    with pytest.raises(LeftCantorRegionError):
        itinerary_from_point(fp, 0.001 + 0j, 2)  # inside the trap


def test_non_capture_parameter_rejected():
    shell = FamilyParams(2 * cmath.exp(1j * math.pi / 4), 3, 2)
    with pytest.raises(SingularValueHitError):
        prepole_from_itinerary(shell, Itinerary(((0, 0, 0), (1, 0, 0))))


def test_verify_shift_conjugacy_report_real_axis():
    # lambda on the positive real axis: the shift relation holds to rounding
    # even though the cell labels straddle the arctan cuts there (the coding
    # is convention-dependent on R+, and the contraction flag fires)
    fp = FamilyParams(0.1, 1, 2)
    rep = verify_shift_conjugacy(fp, depth=4, k_max=2)
    assert rep["max_residual"] < 1e-8
    assert rep["count"] == 10 + 100 + 1000 + 10000
    assert rep["min_separation_deepest"] > 1e-10


def test_verify_shift_conjugacy_contraction_off_axis():
    fp = _params()  # 0.3 e^(i pi/5), away from the symmetry axes
    rep = verify_shift_conjugacy(fp, depth=4, k_max=2)
    assert rep["max_residual"] < 1e-8
    assert all(r < 0.6 for r in rep["contraction_ratios"])
    assert rep["slow_contraction"] is False
    assert rep["min_separation_deepest"] > 1e-10


def test_verify_shift_near_boundary_flags_slow_contraction():
    fp = FamilyParams(0.88, 1, 2)
    rep = verify_shift_conjugacy(fp, depth=3, k_max=1)
    assert rep["max_residual"] < 1e-6  # still a conjugacy, just slower
    assert "slow_contraction" in rep


def test_depth_one_shift_residual_zero():
    # a depth-1 symbol maps to infinity in one step: the shift relation is
    # vacuous and the enumerated report starts clean at depth 1
    fp = FamilyParams(0.1, 1, 2)
    rep = verify_shift_conjugacy(fp, depth=1, k_max=2)
    assert rep["max_residual"] == 0.0
