"""Monomial (signed permutation) matrices.

Transfer matrices of Clifford channels and of qubit permutations are
signed permutations of the Pauli basis: exactly one entry +-1 per column.
Storing (perm, sign) instead of dense 4^n x 4^n matrices makes group
products, traces and twirls cheap even at n=4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Monomial:
    """M e_k = sign[k] * e_perm[k]."""

    perm: np.ndarray
    sign: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "perm", np.asarray(self.perm, dtype=np.int64))
        object.__setattr__(self, "sign", np.asarray(self.sign))

    @property
    def dim(self) -> int:
        return self.perm.size

    @staticmethod
    def identity(dim: int) -> "Monomial":
        return Monomial(np.arange(dim), np.ones(dim))

    @staticmethod
    def from_dense(M: np.ndarray, tol: float = 1e-8) -> "Monomial":
        """Extract (perm, sign) from a dense monomial matrix; raises if not monomial."""
        M = np.asarray(M)
        dim = M.shape[0]
        perm = np.empty(dim, dtype=np.int64)
        sign = np.empty(dim, dtype=M.dtype)
        for k in range(dim):
            col = M[:, k]
            nz = np.flatnonzero(np.abs(col) > tol)
            if nz.size != 1 or abs(abs(col[nz[0]]) - 1.0) > tol:
                raise ValueError("matrix is not a (signed) permutation")
            perm[k] = nz[0]
            sign[k] = col[nz[0]]
        return Monomial(perm, sign)

    def to_dense(self) -> np.ndarray:
        M = np.zeros((self.dim, self.dim), dtype=complex if np.iscomplexobj(self.sign) else float)
        M[self.perm, np.arange(self.dim)] = self.sign
        return M

    def __matmul__(self, other: "Monomial") -> "Monomial":
        # (self @ other) e_k = other.sign[k] * self.sign[op[k]] * e_{sp[op[k]]}
        return Monomial(self.perm[other.perm], other.sign * self.sign[other.perm])

    def inverse(self) -> "Monomial":
        inv_perm = np.empty(self.dim, dtype=np.int64)
        inv_perm[self.perm] = np.arange(self.dim)
        inv_sign = 1.0 / self.sign[inv_perm]
        return Monomial(inv_perm, inv_sign)

    def transpose(self) -> "Monomial":
        inv_perm = np.empty(self.dim, dtype=np.int64)
        inv_perm[self.perm] = np.arange(self.dim)
        return Monomial(inv_perm, self.sign[inv_perm])

    def trace(self) -> complex:
        fixed = self.perm == np.arange(self.dim)
        return complex(self.sign[fixed].sum())

    def apply(self, v: np.ndarray) -> np.ndarray:
        """M v for a vector or a (dim, k) batch of column vectors."""
        out = np.zeros_like(v, dtype=np.result_type(v, self.sign))
        out[self.perm] = (self.sign * v.T).T if v.ndim > 1 else self.sign * v
        return out

    def conjugate_dense(self, A: np.ndarray) -> np.ndarray:
        """M^T A M without forming dense M (M real orthogonal)."""
        # (M^T A M)[j, k] = sign[j] sign[k] A[perm[j], perm[k]]
        return np.multiply.outer(self.sign, self.sign) * A[np.ix_(self.perm, self.perm)]

    def key(self) -> bytes:
        sgn = np.asarray(np.round(self.sign.real).astype(np.int8))
        return self.perm.astype(np.int16).tobytes() + sgn.tobytes()

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and np.array_equal(self.perm, other.perm) \
            and np.allclose(self.sign, other.sign, atol=1e-10)

    def __hash__(self):
        return hash(self.key())
