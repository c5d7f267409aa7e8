import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from singlerail import fock, gates, transforms
from singlerail.gates import MeasurementVerdict

import oracles
from strategies import complexes

CS_AMP = math.sqrt(2 / 27)


# --- CS --------------------------------------------------------------------

@pytest.mark.parametrize("occ,sign", [((0, 0), 1), ((0, 1), 1), ((1, 0), 1), ((1, 1), -1)])
def test_cs_truth_table(occ, sign):
    res = gates.cs_gate(fock.make_basis_state(occ))
    assert res.herald_probability == pytest.approx(2 / 27, abs=1e-12)
    assert res.state.allclose(fock.make_basis_state(occ) * (sign * CS_AMP), 1e-12)


@given(complexes, complexes, complexes, complexes)
def test_cs_linear(a, b, c, d):
    if abs(a) + abs(b) + abs(c) + abs(d) < 1e-3:
        return
    # outputs are scaled relative to the input norm
    norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2 + abs(d) ** 2)
    out = gates.cs_gate((a, b, c, d)).state
    assert out.allclose(gates.two_qubits(a, b, c, -d) * (CS_AMP / norm), 1e-9)


@given(complexes, complexes, complexes, complexes)
def test_cs_twice_is_identity_up_to_herald(a, b, c, d):
    if abs(a) + abs(b) + abs(c) + abs(d) < 1e-3:
        return
    q = fock.normalize(gates.two_qubits(a, b, c, d))
    once = gates.cs_gate(q)
    twice = gates.cs_gate(once.normalized_state())
    assert twice.normalized_state().allclose(q, 1e-9)
    assert once.herald_probability * twice.herald_probability == pytest.approx((2 / 27) ** 2)


def test_cs_matches_permanent_oracle():
    u = transforms.cs_network().matrix
    for occ in ((0, 0), (0, 1), (1, 0), (1, 1)):
        amp = oracles.transition_amplitude(u, occ + (1, 1), occ + (1, 1))
        sign = -1 if occ == (1, 1) else 1
        assert amp == pytest.approx(sign * CS_AMP, abs=1e-12)


def test_lossy_cs_herald_drops_below_ideal_for_vacuum():
    assert gates.cs_gate((1, 0, 0, 0), efficiency=0.9).herald_probability == pytest.approx(0.81 * 2 / 27)


# --- producer ----------------------------------------------------------------

@pytest.mark.parametrize("chi,eta", [(-0.10074, 0.990244), (-0.33714, 0.91985)])
def test_reflectivity_values(chi, eta):
    assert gates.reflectivity_for_chi(chi) == pytest.approx(eta, abs=5e-6)


@given(st.floats(0.01, 2.0))
def test_reflectivity_solves_quadratic(x):
    chi = -x
    eta = gates.reflectivity_for_chi(chi)
    assert 0.5 < eta < 1
    c2 = chi * chi
    assert 4 * c2 * eta**2 + (1 - 4 * c2) * eta + c2 - 1 == pytest.approx(0, abs=1e-12)
    assert eta == pytest.approx(gates.reflectivity_for_chi_closed_form(chi), rel=1e-9)


@given(st.floats(-0.5, -0.01))
def test_producer_equal_magnitudes(chi):
    out = gates.superposition_producer(chi).state
    assert abs(out[(0,)]) == pytest.approx(abs(out[(1,)]), rel=1e-10)
    # positive relative sign for negative chi
    assert (out[(1,)] / out[(0,)]).real > 0


def test_producer_herald_is_born_probability():
    chi = -0.33714
    eta = gates.reflectivity_for_chi(chi)
    # direct sum over coherent components: herald sees exactly one photon
    total = 0.0
    u = transforms.beamsplitter(eta).matrix
    out = gates.superposition_producer(chi, cutoff=8).state
    for n_out in range(8):
        amp = 0
        for n in range(8):
            cn = math.exp(-chi * chi / 2) * chi**n / math.sqrt(math.factorial(n))
            amp += cn * oracles.transition_amplitude(u, (1, n), (n_out, 1))
        total += abs(amp) ** 2
        assert out[(n_out,)] == pytest.approx(amp, abs=1e-12)
    assert gates.working_point(chi, 8).herald_probability == pytest.approx(total, abs=1e-12)


def test_working_point_ratios():
    wp = gates.working_point(-0.10074)
    assert wp.second_order_coefficient_ratio == pytest.approx(wp.second_order_ratio / math.sqrt(2))
    assert wp.component_weight == pytest.approx(abs(wp.amplitudes[0]) ** 2)


def test_lossy_producer_is_mixed():
    res = gates.superposition_producer(-0.33714, efficiency=0.8)
    assert not res.is_pure
    assert res.herald_probability < gates.working_point(-0.33714).herald_probability


# --- superposition measurement -----------------------------------------------

def test_measurement_plus_minus():
    p = gates.superposition_measurement(gates.plus_state())
    m = gates.superposition_measurement(gates.minus_state())
    assert (p.plus, p.minus, p.inconclusive) == pytest.approx((0.5, 0, 0.5), abs=1e-12)
    assert (m.plus, m.minus, m.inconclusive) == pytest.approx((0, 0.5, 0.5), abs=1e-12)
    assert p.probability(MeasurementVerdict.PLUS) == p.plus


def test_measurement_basis_states_are_ambiguous():
    z = gates.superposition_measurement(fock.make_basis_state((0,)))
    assert z.plus == pytest.approx(0.25) and z.minus == pytest.approx(0.25)


@given(complexes, complexes)
def test_measurement_probabilities_sum(a, b):
    if abs(a) + abs(b) < 1e-3:
        return
    r = gates.superposition_measurement(fock.normalize(gates.qubit(a, b)), efficiency=0.85)
    assert r.plus + r.minus + r.inconclusive == pytest.approx(1, abs=1e-10)


def test_verdicts():
    assert gates.verdict((1, 0)) is MeasurementVerdict.PLUS
    assert gates.verdict((0, 1)) is MeasurementVerdict.MINUS
    assert gates.verdict((1, 1)) is MeasurementVerdict.INCONCLUSIVE


# --- Hadamard ------------------------------------------------------------

@given(complexes, complexes)
def test_hadamard_semantics(a, b):
    if abs(a) + abs(b) < 1e-2:
        return
    out = gates.hadamard_gate((a, b)).state
    assert fock.fidelity(out, gates.qubit(a + b, a - b)) == pytest.approx(1, abs=1e-10)


def test_hadamard_squared_is_identity():
    q = fock.normalize(gates.qubit(0.3, 0.8 - 0.2j))
    twice = gates.hadamard_gate(gates.hadamard_gate(q).state).state
    assert fock.fidelity(twice, q) == pytest.approx(1, abs=1e-12)


def hadamard_herald_by_enumeration(alpha, beta):
    """Sum heralded output probabilities from permanents over the full 5-mode unitary."""
    n = 5  # input, output, meter resource, two CS ancillas
    u = transforms.embed(transforms.cs_network(), (0, 1, 3, 4), n).matrix
    u = transforms.embed(transforms.beamsplitter(0.5), (2, 0), n).matrix @ u
    r = 1 / math.sqrt(2)
    inputs = {}
    for q, cq in ((0, alpha), (1, beta)):
        for r1 in (0, 1):
            for r2 in (0, 1):
                inputs[(q, r1, r2, 1, 1)] = cq * r * r
    total = 0.0
    for k in range(3):
        occ = (0, k, 1, 1, 1)
        amp = sum(a * oracles.transition_amplitude(u, occ_in, occ) for occ_in, a in inputs.items())
        total += abs(amp) ** 2
    return total


def test_hadamard_herald_matches_enumeration_oracle():
    assert gates.hadamard_gate((1, 0)).herald_probability == pytest.approx(1 / 54, abs=1e-12)
    assert hadamard_herald_by_enumeration(1, 0) == pytest.approx(1 / 54, abs=1e-12)
    assert gates.hadamard_gate((0, 1)).herald_probability == pytest.approx(
        hadamard_herald_by_enumeration(0, 1), abs=1e-12
    )


def test_hadamard_with_producer_resources_keeps_branch_labels():
    res = gates.hadamard_gate((1, 0), efficiency=0.9, resource_source=("producer", -0.33714), cutoff=4)
    assert res.herald_probability > 0
    # two producer detectors then four gate detectors
    assert all(len(b.reported) == 6 for b in res.ensemble)


def test_phase_gate():
    out = gates.phase_gate((1, 1), 0.5)
    assert out[(1,)] == pytest.approx(np.exp(0.5j))


def test_bad_qubit_input():
    with pytest.raises(ValueError):
        gates.cs_gate((1, 0))
    with pytest.raises(ValueError):
        gates.resource_ensemble("bogus")
