"""Pauli-Liouville representation of states, effects and channels.

Every channel is a 4^n x 4^n matrix of Hilbert-Schmidt inner products
against the normalized n-qubit Pauli basis; states become column vectors,
POVM effects row covectors.  The basis is ordered base-4 little-endian
over (I, X, Y, Z) per qubit, so index 0 is the all-identity word and
qubit 0 is the least significant digit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .numeric import POLICY

PAULI_LETTERS = "IXYZ"

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class ValidationError(ValueError):
    """Input fails a structural precondition (non-unitary, wrong trace, ...)."""


class ResourceLimitError(RuntimeError):
    """Requested size exceeds the configured qubit maximum."""


def index_to_word(index: int, n: int) -> str:
    """Pauli word of a linear index; qubit 0 is the least significant base-4 digit."""
    if not 0 <= index < 4**n:
        raise ValidationError(f"index {index} out of range for n={n}")
    return "".join(PAULI_LETTERS[(index >> (2 * j)) & 3] for j in range(n))

def word_to_index(word: str) -> int:
    idx = 0
    for j, letter in enumerate(word):
        idx += PAULI_LETTERS.index(letter) << (2 * j)
    return idx


@lru_cache(maxsize=8)
def build_basis(n: int) -> tuple[np.ndarray, ...]:
    """Ordered 4^n normalized Pauli matrices sigma_j = (tensor of Paulis) / 2^(n/2)."""
    if n < 1:
        raise ValidationError("need at least one qubit")
    if n > POLICY.max_qubits:
        raise ResourceLimitError(f"n={n} exceeds configured maximum {POLICY.max_qubits}")
    norm = 2.0 ** (-n / 2)
    basis = []
    for k in range(4**n):
        word = index_to_word(k, n)
        # qubit 0 is the leftmost tensor factor
        mat = _PAULI_1Q[word[0]]
        for letter in word[1:]:
            mat = np.kron(mat, _PAULI_1Q[letter])
        basis.append(norm * mat)
    return tuple(basis)


@dataclass(frozen=True)
class StateVector:
    """Column of coefficients rho_j = <sigma_j, rho>."""

    coefficients: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "coefficients", np.asarray(self.coefficients, dtype=complex))


@dataclass(frozen=True)
class EffectCovector:
    """Row of coefficients E_j = <E, sigma_j>."""

    coefficients: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "coefficients", np.asarray(self.coefficients, dtype=complex))


@dataclass(frozen=True)
class TransferMatrix:
    """Channel as M_jk = <sigma_j, C(sigma_k)> in the normalized Pauli basis."""

    entries: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=complex))
        if self.entries.shape != (4**self.n, 4**self.n):
            raise ValidationError("transfer matrix has wrong shape for n")

    @property
    def dim(self) -> int:
        return 2**self.n

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        if self.n != other.n:
            raise ValidationError("dimension mismatch")
        return TransferMatrix(self.entries @ other.entries, self.n)

    def power(self, k: int) -> "TransferMatrix":
        return TransferMatrix(np.linalg.matrix_power(self.entries, k), self.n)

    def is_trace_preserving(self, tol: float = POLICY.matrix_tol) -> bool:
        row0 = np.zeros(4**self.n)
        row0[0] = 1.0
        return bool(np.max(np.abs(self.entries[0] - row0)) < tol)


def identity_transfer(n: int) -> TransferMatrix:
    return TransferMatrix(np.eye(4**n, dtype=complex), n)


def unitary_to_transfer(U: np.ndarray, n: int) -> TransferMatrix:
    """Transfer matrix of the conjugation channel rho -> U^dag rho U."""
    U = np.asarray(U, dtype=complex)
    d = 2**n
    if U.shape != (d, d):
        raise ValidationError(f"expected {d}x{d} unitary for n={n}")
    if np.max(np.abs(U.conj().T @ U - np.eye(d))) > POLICY.matrix_tol:
        raise ValidationError("matrix is not unitary within tolerance")
    basis = build_basis(n)
    conj = [U.conj().T @ sigma @ U for sigma in basis]
    M = np.empty((4**n, 4**n), dtype=complex)
    for j, sigma_j in enumerate(basis):
        for k in range(4**n):
            M[j, k] = np.trace(sigma_j.conj().T @ conj[k])
    return TransferMatrix(M, n)


def vectorize_state(rho: np.ndarray) -> StateVector:
    """Coefficient vector of a density matrix against the normalized Pauli basis."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    n = int(round(np.log2(d)))
    if rho.shape != (d, d) or 2**n != d:
        raise ValidationError("density matrix dimension is not a power of two")
    if np.max(np.abs(rho - rho.conj().T)) > POLICY.matrix_tol:
        raise ValidationError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > POLICY.matrix_tol:
        raise ValidationError("density matrix does not have unit trace")
    basis = build_basis(n)
    coeffs = np.array([np.trace(sigma.conj().T @ rho) for sigma in basis])
    return StateVector(coeffs, n)


def devectorize_state(state: StateVector) -> np.ndarray:
    basis = build_basis(state.n)
    rho = np.zeros((2**state.n, 2**state.n), dtype=complex)
    for c, sigma in zip(state.coefficients, basis):
        rho += c * sigma
    return rho


def vectorize_effect(E: np.ndarray, check_povm: bool = True) -> EffectCovector:
    """Covector of a POVM effect; validates 0 <= E <= 1 unless check_povm=False."""
    E = np.asarray(E, dtype=complex)
    d = E.shape[0]
    n = int(round(np.log2(d)))
    if E.shape != (d, d) or 2**n != d:
        raise ValidationError("effect dimension is not a power of two")
    if np.max(np.abs(E - E.conj().T)) > POLICY.matrix_tol:
        raise ValidationError("effect is not Hermitian")
    if check_povm:
        eigs = np.linalg.eigvalsh(E)
        if eigs.min() < -1e-9 or eigs.max() > 1 + 1e-9:
            raise ValidationError("effect eigenvalues outside [0, 1]")
    basis = build_basis(n)
    coeffs = np.array([np.trace(E.conj().T @ sigma) for sigma in basis])
    return EffectCovector(coeffs, n)


def expect(E: EffectCovector, M: TransferMatrix, rho: StateVector) -> float:
    """Survival probability <E| M |rho), clamped to [0, 1]."""
    if not (E.n == M.n == rho.n):
        raise ValidationError("dimension mismatch between effect, channel and state")
    p = complex(E.coefficients @ (M.entries @ rho.coefficients))
    if abs(p.imag) > POLICY.prob_slack:
        raise ValidationError(f"probability has imaginary part {p.imag:.3g}")
    val = p.real
    if val < -POLICY.prob_slack or val > 1 + POLICY.prob_slack:
        raise ValidationError(f"probability {val:.6g} outside [0, 1] beyond slack")
    return float(min(1.0, max(0.0, val)))
