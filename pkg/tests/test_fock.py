import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from singlerail import fock
from singlerail.fock import CutoffError, ModeMismatchError, PureState, ZeroStateError

from strategies import complexes, states


def test_basis_state_and_vacuum():
    s = fock.make_basis_state((1, 0, 2))
    assert s[(1, 0, 2)] == 1
    assert s[(0, 0, 0)] == 0
    assert s.mode_count == 3 and len(s) == 1
    assert fock.vacuum(2)[(0, 0)] == 1


def test_cutoff_enforced():
    with pytest.raises(CutoffError):
        fock.make_basis_state((3, 4), cutoff=6)
    with pytest.raises(CutoffError):
        PureState(1, {(3,): 1.0}, cutoff=2)


def test_truncation_records_weight():
    s = PureState(1, {(0,): 1.0, (3,): 0.5}, cutoff=2, truncate=True)
    assert len(s) == 1
    assert s.truncated_weight == pytest.approx(0.25)


def test_pruning_of_tiny_amplitudes():
    s = PureState(1, {(0,): 1.0, (1,): 1e-16})
    assert list(s) == [(0,)]


def test_state_is_immutable():
    s = fock.make_basis_state((1,))
    with pytest.raises(TypeError):
        s.amplitudes[(0,)] = 1.0
    with pytest.raises(AttributeError):
        s.foo = 1


def test_bad_occupations():
    with pytest.raises(ModeMismatchError):
        PureState(2, {(1,): 1.0})
    with pytest.raises(ValueError):
        PureState(1, {(-1,): 1.0})


def test_normalize_zero_state():
    with pytest.raises(ZeroStateError):
        fock.normalize(PureState(1, {}))


def test_coherent_state_amplitudes():
    c = fock.coherent_state(0.3, cutoff=4)
    for n in range(5):
        assert c[(n,)] == pytest.approx(0.3**n / math.sqrt(math.factorial(n)))
    norm = fock.norm_squared(c * math.exp(-0.09 / 2))
    assert norm == pytest.approx(1, abs=1e-5)


def test_tensor_orders_modes():
    t = fock.tensor(fock.make_basis_state((1,)), fock.make_basis_state((0, 2)))
    assert list(t) == [(1, 0, 2)]


def test_tensor_mismatched_inner_product():
    with pytest.raises(ModeMismatchError):
        fock.inner_product(fock.vacuum(1), fock.vacuum(2))


def test_permute_modes():
    s = fock.make_basis_state((1, 2, 0))
    assert list(fock.permute_modes(s, (2, 0, 1))) == [(0, 1, 2)]
    with pytest.raises(ValueError):
        fock.permute_modes(s, (0, 0, 1))


@given(states(), states())
def test_inner_product_conjugate_symmetry(a, b):
    if a.mode_count != b.mode_count:
        return
    assert fock.inner_product(a, b) == pytest.approx(np.conj(fock.inner_product(b, a)), abs=1e-12)


@given(states(modes=2), states(modes=2), complexes)
def test_inner_product_linear_in_ket(a, b, z):
    lhs = fock.inner_product(a, b * z + a)
    rhs = z * fock.inner_product(a, b) + fock.inner_product(a, a)
    assert lhs == pytest.approx(rhs, abs=1e-9)


@given(states(modes=1), states(modes=2), states(modes=1))
def test_tensor_associative(a, b, c):
    left = fock.tensor(fock.tensor(a, b, cutoff=9), c, cutoff=9)
    right = fock.tensor(a, fock.tensor(b, c, cutoff=9), cutoff=9)
    assert left.allclose(right, 1e-12)


@given(states(modes=2), states(modes=1))
def test_tensor_norm_multiplies(a, b):
    t = fock.tensor(a, b, cutoff=6)
    assert fock.norm_squared(t) == pytest.approx(fock.norm_squared(a) * fock.norm_squared(b), rel=1e-12)


@given(states())
def test_normalize_gives_unit_norm(s):
    assert fock.norm_squared(fock.normalize(s)) == pytest.approx(1.0, abs=1e-12)


@given(states(), st.floats(0, 2 * math.pi))
def test_fidelity_ignores_global_phase(s, theta):
    assert fock.fidelity(s, s * np.exp(1j * theta)) == pytest.approx(1.0, abs=1e-12)
