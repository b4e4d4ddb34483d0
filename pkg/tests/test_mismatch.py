import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parity_readout import jpm, mismatch as mm
from parity_readout import protocol as pc

CHI = 2 * math.pi * 5e6
ratios = st.floats(-0.5, 0.5).filter(lambda r: abs(r) > 1e-6)


def _scenario(ratio, n_qubits=2):
    return mm.mismatch_amplitudes(mm.mismatch_register(n_qubits, CHI, ratio * CHI))


def test_zero_mismatch_limit():
    sc = _scenario(0.0)
    t_d, a0 = sc.pulse.t_d, sc.pulse.a0
    assert sc.amplitudes["01"] == pytest.approx(-0.5j * a0 * t_d)
    assert abs(sc.amplitudes["00"]) < 1e-12
    d = mm.intra_subspace_decoherence(sc, "odd")
    assert d.factor == pytest.approx(1.0)


@given(ratios)
def test_same_parity_symmetry(ratio):
    amps = _scenario(ratio).amplitudes
    assert amps["11"] == pytest.approx(-np.conj(amps["00"]), abs=1e-12)
    assert amps["10"] == pytest.approx(-np.conj(amps["01"]), abs=1e-12)
    assert abs(amps["00"]) == pytest.approx(abs(amps["11"]), rel=1e-12)
    assert abs(amps["01"]) == pytest.approx(abs(amps["10"]), rel=1e-12)


@given(ratios)
def test_explicit_two_qubit_formulas_match_drive_model(ratio):
    sc = _scenario(ratio)
    explicit = mm.two_qubit_amplitudes(sc.pulse.a0, CHI, ratio * CHI)
    for label, value in explicit.items():
        assert abs(sc.amplitudes[label] - value) < 1e-12 * max(1.0, abs(value))


def test_four_qubit_pattern_recorded_and_composed():
    assert mm.four_qubit_pattern(0.2) == (0.2, 0.1, -0.1)
    sc = _scenario(0.1, 4)
    assert sc.register.epsilons == (0.0, 0.1 * CHI, 0.05 * CHI, -0.05 * CHI)
    for shift in pc.band_shifts(sc.register):
        expected = pc.drive_amplitude_closed_form(shift.shift, sc.pulse)
        assert sc.amplitudes[shift.label] == pytest.approx(expected)


def test_occupation_series_accuracy():
    exp = mm.occupation_expansions(_scenario(0.01))
    assert exp["odd_rel_error"] < 1e-6
    # the even forms carry O(eps) and O(eps^2) remainders respectively
    assert exp["even_rel_error"] < 0.02
    assert exp["even_mid_rel_error"] < 1e-4
    assert mm.occupation_expansions(_scenario(0.0))["even_exact"] == 0


def test_even_occupation_square_law():
    slope = mm.even_occupation_exponent(CHI, np.geomspace(1e-3, 1e-2, 10))
    assert slope == pytest.approx(2.0, abs=0.05)


def test_odd_deficit_square_law():
    ratios = np.geomspace(1e-3, 1e-2, 10)
    deficit = [9.0 - abs(_scenario(r).amplitudes["01"]) ** 2 for r in ratios]
    assert mm.loglog_slope(ratios, np.array(deficit)) == pytest.approx(2.0, abs=0.05)


def test_odd_decoherence_series():
    rep = mm.intra_subspace_decoherence(_scenario(1e-2), "odd")
    assert abs(rep.exponent - rep.series_exponent) / abs(rep.exponent) < 1e-2


def test_even_decoherence_series_and_ordering():
    sc = _scenario(1e-2)
    even = mm.intra_subspace_decoherence(sc, "even")
    odd = mm.intra_subspace_decoherence(sc, "odd")
    assert abs(even.exponent - even.series_exponent) / abs(even.exponent) < 1e-2
    assert 1 - even.magnitude < 1e-3 * (1 - odd.magnitude)


@given(ratios)
def test_odd_decoherence_bounded_and_conjugate_symmetric(ratio):
    plus = mm.intra_subspace_decoherence(_scenario(ratio), "odd")
    minus = mm.intra_subspace_decoherence(_scenario(-ratio), "odd")
    assert plus.magnitude <= 1 + 1e-15
    assert plus.factor == pytest.approx(np.conj(minus.factor), abs=1e-12)


@given(st.floats(1e-4, 1e-2))
def test_even_decoherence_conjugate_symmetric_to_leading_order(ratio):
    # the even prefactor a0 / (2 (2 chi + eps)) is not even in eps
    plus = mm.intra_subspace_decoherence(_scenario(ratio), "even")
    minus = mm.intra_subspace_decoherence(_scenario(-ratio), "even")
    assert plus.magnitude <= 1.0
    assert abs(plus.exponent - np.conj(minus.exponent)) < 3 * ratio * abs(plus.exponent)


def test_basis_overlap_equal_probabilities():
    rep = mm.measurement_basis_overlap(3.0, -3.0)
    assert rep.overlap == 1.0 and rep.infidelity == 0.0
    with pytest.raises(ValueError):
        mm.measurement_basis_overlap(0.0, 0.0)


def test_damping_factors():
    assert mm.overlap_damping(3.0) == pytest.approx(81 * math.exp(-18) / 4)
    assert mm.overlap_damping(3.0) < 1e-5
    relax = mm.overlap_damping(3.0, jpm.DEFAULT_JPM)
    assert relax == pytest.approx(4.5**2 * math.exp(-9) / 4)
    assert 1e-4 < relax < 1e-2


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("params", [None, jpm.DEFAULT_JPM])
def test_overlap_approximation_remainder_is_higher_order(alpha, params):
    scaled = []
    for delta in (1e-2, 1e-3, 1e-4):
        rep = mm.measurement_basis_overlap(alpha, alpha * (1 + delta), params)
        scaled.append(abs(rep.infidelity - rep.infidelity_approx) / delta**2)
    # remainder / delta^2 shrinks linearly with delta
    assert scaled[1] < 0.2 * scaled[0] and scaled[2] < 0.2 * scaled[1]


@given(st.floats(0.01, 4), st.floats(0.01, 4))
def test_overlap_at_least_half(a, b):
    rep = mm.measurement_basis_overlap(a, b)
    assert 0.5 <= rep.overlap <= 1.0 + 1e-15
