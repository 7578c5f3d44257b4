"""Gate library, Hamiltonian-perturbation noise, twirling and fidelity formulas.

Conventions: channels act by conjugation rho -> U^dag rho U; the noisy
implementation is written U_tilde = Lambda o U, so the extracted noise is
Lambda = U_tilde * U^-1 in Pauli-Liouville form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import SymmetryGroup
from .numeric import POLICY
from .superop import (TransferMatrix, ValidationError, identity_transfer,
                      unitary_to_transfer)


# ---------------------------------------------------------------------------
# gate library

def standard_gate(name: str, theta: float | None = None) -> np.ndarray:
    """Named gates of the universal set plus Bloch-axis rotations."""
    name = name.upper()
    if name == "T":
        return np.diag([np.exp(-1j * np.pi / 8), np.exp(1j * np.pi / 8)])
    if name == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    if name == "S":
        return np.array([[1, 0], [0, 1j]], dtype=complex)
    if name == "CNOT":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                        dtype=complex)
    if name in ("RX", "RY", "RZ"):
        if theta is None:
            raise ValidationError(f"{name} requires an angle")
        pauli = {"RX": np.array([[0, 1], [1, 0]]),
                 "RY": np.array([[0, -1j], [1j, 0]]),
                 "RZ": np.array([[1, 0], [0, -1]])}[name]
        return _expm_hermitian(-theta / 2 * pauli.astype(complex))
    raise ValidationError(f"unknown gate name {name!r}")


def _expm_hermitian(coeff_times_H: np.ndarray) -> np.ndarray:
    """exp(i * A) for Hermitian A, via eigendecomposition (exact, no series)."""
    A = np.asarray(coeff_times_H, dtype=complex)
    if np.max(np.abs(A - A.conj().T)) > POLICY.matrix_tol:
        raise ValidationError("generator is not Hermitian")
    vals, vecs = np.linalg.eigh(A)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T


def expm_unitary(H: np.ndarray) -> np.ndarray:
    """exp(-i H) for a Hermitian generator H."""
    return _expm_hermitian(-np.asarray(H, dtype=complex))


@dataclass(frozen=True)
class GateSpec:
    """Ideal target gate: tensor product of named local factors."""

    layout: tuple[str, ...]
    thetas: tuple[float | None, ...] = None

    def __post_init__(self):
        if self.thetas is None:
            object.__setattr__(self, "thetas", (None,) * len(self.layout))

    @property
    def n(self) -> int:
        return len(self.layout)

    def unitary(self) -> np.ndarray:
        U = np.eye(1, dtype=complex)
        for name, theta in zip(self.layout, self.thetas):
            U = np.kron(U, standard_gate(name, theta))
        return U

    def transfer(self) -> TransferMatrix:
        return unitary_to_transfer(self.unitary(), self.n)


# ---------------------------------------------------------------------------
# noise models

@dataclass(frozen=True)
class NoiseModel:
    """Either a perturbed Hamiltonian generator or an explicit noise channel."""

    kind: str                                   # "hamiltonian-perturbation" | "explicit-channel"
    generator: np.ndarray | None = None         # ideal H0 (hamiltonian kind)
    perturbation: np.ndarray | None = None      # V; implemented gate is exp(-i(H0 + eps V))
    epsilon: float = 0.0
    channel: TransferMatrix | None = None       # explicit Lambda

    def __post_init__(self):
        if self.kind == "explicit-channel":
            if self.channel is None or not self.channel.is_trace_preserving():
                raise ValidationError("explicit noise channel must be trace preserving")
        elif self.kind != "hamiltonian-perturbation":
            raise ValidationError(f"unknown noise model kind {self.kind!r}")


def single_t_noise(epsilon: float) -> NoiseModel:
    """H_eps = pi/8 sigma_z - eps sigma_x."""
    sz = np.diag([1.0, -1.0]).astype(complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    return NoiseModel("hamiltonian-perturbation", np.pi / 8 * sz, -sx, epsilon)


def two_t_noise(epsilon: float) -> NoiseModel:
    """H_eps = pi/8 (Z x 1 + 1 x Z - eps X x X)."""
    sz = np.diag([1.0, -1.0]).astype(complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    ident = np.eye(2, dtype=complex)
    H0 = np.pi / 8 * (np.kron(sz, ident) + np.kron(ident, sz))
    V = -np.pi / 8 * np.kron(sx, sx)
    return NoiseModel("hamiltonian-perturbation", H0, V, epsilon)


@dataclass(frozen=True)
class NoisyGate:
    """Ideal transfer, implemented transfer and the extracted noise channel."""

    ideal: TransferMatrix
    implemented: TransferMatrix
    noise: TransferMatrix               # Lambda with implemented = Lambda o ideal
    inversion_noise: TransferMatrix     # Lambda' applied with the inversion gate

    @property
    def n(self) -> int:
        return self.ideal.n


def perturbed_gate(model: NoiseModel, spec: GateSpec,
                   inversion_noise: TransferMatrix | None = None) -> NoisyGate:
    """Build the noisy gate for a noise model; Lambda = implemented * ideal^-1."""
    ideal = spec.transfer()
    n = spec.n
    if model.kind == "hamiltonian-perturbation":
        H = np.asarray(model.generator, dtype=complex) \
            + model.epsilon * np.asarray(model.perturbation, dtype=complex)
        if np.max(np.abs(H - H.conj().T)) > POLICY.matrix_tol:
            raise ValidationError("perturbed generator is not Hermitian")
        implemented = unitary_to_transfer(expm_unitary(H), n)
    else:
        implemented = model.channel @ ideal
    noise = TransferMatrix(implemented.entries @ np.linalg.inv(ideal.entries), n)
    if inversion_noise is None:
        inversion_noise = identity_transfer(n)
    return NoisyGate(ideal, implemented, noise, inversion_noise)


# ---------------------------------------------------------------------------
# twirling and fidelities

def twirl(Lambda: TransferMatrix, G: SymmetryGroup) -> TransferMatrix:
    """Lambda^G = |G|^-1 sum_g pi(g)^T Lambda pi(g), via monomial conjugation."""
    if Lambda.n != G.n:
        raise ValidationError("dimension mismatch between channel and group")
    acc = np.zeros_like(Lambda.entries)
    for g in range(G.order):
        acc += G.monomial(g).conjugate_dense(Lambda.entries)
    return TransferMatrix(acc / G.order, G.n)


def entanglement_fidelity(Lambda: TransferMatrix) -> float:
    """F_ent = Tr[Lambda] / d^2 in Pauli-Liouville form."""
    d = Lambda.dim
    return float(np.real(np.trace(Lambda.entries)) / d**2)


def average_fidelity_exact(Lambda: TransferMatrix) -> float:
    """E(F) = (d F_ent + 1) / (d + 1) = (Tr Lambda + d) / (d (d + 1))."""
    d = Lambda.dim
    return float((np.real(np.trace(Lambda.entries)) + d) / (d * (d + 1)))


def fidelity_from_lambdas(lambdas, d: int) -> float:
    """Average gate fidelity from the recovered per-subspace decay parameters."""
    total = float(np.sum(np.real(lambdas)))
    return (total + d) / (d * (d + 1))


# ---------------------------------------------------------------------------
# joint-diagonalizability diagnostics

def refined_eigenbasis(U: TransferMatrix, projectors: list[np.ndarray],
                       tol: float = 1e-9) -> tuple[np.ndarray, list[tuple[int, complex]]]:
    """Orthonormal basis diagonalizing U, refined block-wise per irrep subspace.

    Returns (V, slots) with V columns ordered per (irrep block, U-eigenvalue);
    slots lists (irrep index, U eigenvalue d_j) per column.
    """
    dim = U.entries.shape[0]
    cols = []
    slots = []
    for alpha, P in enumerate(projectors):
        # orthonormal basis of range(P)
        vals, vecs = np.linalg.eigh((P + P.conj().T) / 2)
        basis = vecs[:, vals > 0.5]
        if basis.shape[1] == 0:
            continue
        Ur = basis.conj().T @ U.entries @ basis
        evals, evecs = np.linalg.eig(Ur)
        # group columns by eigenvalue, re-orthonormalizing degenerate clusters
        order = np.argsort(np.round(np.angle(evals), 6))
        evals, evecs = evals[order], evecs[:, order]
        i = 0
        while i < len(evals):
            j = i
            while j < len(evals) and abs(evals[j] - evals[i]) < tol:
                j += 1
            block = np.linalg.qr(evecs[:, i:j])[0]
            for k in range(j - i):
                cols.append(basis @ block[:, k])
                slots.append((alpha, complex(evals[i])))
            i = j
    V = np.stack(cols, axis=1)
    if V.shape != (dim, dim):
        raise ValidationError("irrep projectors do not resolve the full space")
    return V, slots


def joint_diag_score(Lambda_G: TransferMatrix, U: TransferMatrix,
                     projectors: list[np.ndarray]) -> float:
    """||off-diagonal|| / ||diagonal|| of Lambda^G in the refined U eigenbasis."""
    V, _ = refined_eigenbasis(U, projectors)
    M = np.linalg.inv(V) @ Lambda_G.entries @ V
    diag = np.diag(np.diag(M))
    off = M - diag
    denom = np.linalg.norm(diag)
    return float(np.linalg.norm(off) / denom) if denom > 0 else 0.0


# ---------------------------------------------------------------------------
# chi_00 bound for the single-gate error

def _chi00_bound_holds(chi_l: float, chi_n: float, chi_comp: float) -> bool:
    lhs = abs(chi_comp - chi_l * chi_n)
    rhs = 2 * np.sqrt(max(0.0, (1 - chi_l) * chi_l * (1 - chi_n) * chi_n)) \
        + (1 - chi_l) * (1 - chi_n)
    return lhs <= rhs + 1e-15


def gate_error_bound(chi00_composite: float, chi00_symmetry: float,
                     resolution: float = 1e-9) -> tuple[float, float]:
    """Feasible interval for chi_00 of the target-gate noise alone.

    Inverts the composition inequality by bisecting the boundary of the
    feasible set; valid in the regime chi00_symmetry ~ 1.
    """
    if not (0 <= chi00_composite <= 1 and 0 <= chi00_symmetry <= 1):
        raise ValidationError("chi_00 inputs must lie in [0, 1]")

    def feasible(x: float) -> bool:
        return _chi00_bound_holds(x, chi00_symmetry, chi00_composite)

    # locate any feasible point: the feasible set can be a very narrow band
    # near 1, so probe geometrically fine near both endpoints as well as a
    # uniform grid and the natural candidate chi_comp/chi_n
    center = min(1.0, chi00_composite / chi00_symmetry) if chi00_symmetry > 0 else 1.0
    geom = np.concatenate([1.0 - np.geomspace(1e-14, 1.0, 60),
                           np.geomspace(1e-14, 1.0, 60)])
    probe = [center] + list(geom) + list(np.linspace(0, 1, 101))
    seed = next((x for x in probe if 0 <= x <= 1 and feasible(x)), None)
    if seed is None:
        raise ValidationError("empty feasible interval for chi_00 bound")

    def bisect(lo, hi, lo_feasible):
        # invariant: exactly one of lo/hi is feasible
        while hi - lo > resolution:
            mid = (lo + hi) / 2
            if feasible(mid) == lo_feasible:
                lo = mid
            else:
                hi = mid
        return lo if lo_feasible else hi

    lower = 0.0 if feasible(0.0) else bisect(0.0, seed, False)
    upper = 1.0 if feasible(1.0) else bisect(seed, 1.0, True)
    return float(lower), float(upper)
