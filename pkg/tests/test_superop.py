import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symrb.superop import (ValidationError, build_basis, devectorize_state,
                           expect, identity_transfer, index_to_word,
                           unitary_to_transfer, vectorize_effect,
                           vectorize_state, word_to_index)
from conftest import random_unitary


@pytest.mark.parametrize("n", [1, 2])
def test_basis_orthonormal(n):
    basis = build_basis(n)
    gram = np.array([[np.trace(a.conj().T @ b) for b in basis] for a in basis])
    assert np.max(np.abs(gram - np.eye(4**n))) < 1e-12


@given(st.integers(0, 255))
def test_index_word_roundtrip(idx):
    assert word_to_index(index_to_word(idx, 4)) == idx


def test_word_ordering_least_significant_first():
    assert index_to_word(1, 2) == "XI"
    assert index_to_word(4, 2) == "IX"


@pytest.mark.parametrize("n", [1, 2])
def test_identity_transfer_matches_identity_unitary(n):
    M = unitary_to_transfer(np.eye(2**n), n)
    assert np.max(np.abs(M.entries - np.eye(4**n))) < 1e-12


def test_transfer_composition_homomorphism():
    rng = np.random.default_rng(0)
    for n in (1, 2):
        for _ in range(5):
            U = random_unitary(rng, 2**n)
            V = random_unitary(rng, 2**n)
            lhs = unitary_to_transfer(V @ U, n).entries
            # rho -> U^dag rho U acts first in (UV)^dag rho (UV)... transfer
            # of the conjugation channel composes contravariantly
            rhs = (unitary_to_transfer(U, n) @ unitary_to_transfer(V, n)).entries
            assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_transfer_real_and_trace_preserving():
    rng = np.random.default_rng(1)
    for n in (1, 2):
        M = unitary_to_transfer(random_unitary(rng, 2**n), n)
        assert np.max(np.abs(M.entries.imag)) < 1e-10
        assert M.is_trace_preserving()


def test_non_unitary_rejected():
    with pytest.raises(ValidationError):
        unitary_to_transfer(np.ones((2, 2)), 1)


def test_state_roundtrip():
    rng = np.random.default_rng(2)
    for n in (1, 2):
        A = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
        rho = A @ A.conj().T
        rho /= np.trace(rho)
        back = devectorize_state(vectorize_state(rho))
        assert np.max(np.abs(back - rho)) < 1e-10


def test_state_validation():
    with pytest.raises(ValidationError):
        vectorize_state(np.diag([1.0, 1.0]))          # trace 2
    with pytest.raises(ValidationError):
        vectorize_state(np.array([[0.5, 1.0], [0.0, 0.5]]))   # not Hermitian


def test_effect_validation():
    with pytest.raises(ValidationError):
        vectorize_effect(np.diag([2.0, 0.0]))
    vectorize_effect(np.diag([2.0, 0.0]) / 2)


def test_expect_matches_trace_formula():
    rng = np.random.default_rng(3)
    for _ in range(10):
        U = random_unitary(rng, 2)
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = A @ A.conj().T
        rho /= np.trace(rho)
        E = np.diag([1.0, 0.0])
        p_direct = np.real(np.trace(E @ U.conj().T @ rho @ U))
        p = expect(vectorize_effect(E), unitary_to_transfer(U, 1),
                   vectorize_state(rho))
        assert abs(p - p_direct) < 1e-10


def test_expect_dimension_mismatch():
    E = vectorize_effect(np.diag([1.0, 0.0]))
    rho = vectorize_state(np.eye(4) / 4)
    with pytest.raises(ValidationError):
        expect(E, identity_transfer(2), rho)


def test_transfer_matmul_and_power():
    rng = np.random.default_rng(4)
    M = unitary_to_transfer(random_unitary(rng, 2), 1)
    assert np.max(np.abs((M @ M).entries - M.power(2).entries)) < 1e-12
