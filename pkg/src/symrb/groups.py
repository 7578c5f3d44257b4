"""Symmetry groups of tensor-product gates and their character theory.

The full symmetry group is G = A_n x| Pi: the Kronecker product A_n of the
local abelian symmetry groups, extended by the permutations Pi of qubits
carrying identical local gates.  Elements are labelled (a, sigma) and act
on the Pauli basis as signed permutations; characters of G are obtained by
Mackey induction from the abelian characters and the stabilizer subgroups
of their Pi-orbits.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .chartables import ProductSymmetricTable
from .monomial import Monomial
from .numeric import POLICY
from .superop import unitary_to_transfer, ValidationError


class GroupConstructionError(RuntimeError):
    """Structural failure while building a symmetry group or its characters."""


class NonAbelianSymmetryError(GroupConstructionError):
    """The centralizer of the gate is non-abelian; fall back to G = A_n."""


# ---------------------------------------------------------------------------
# single-qubit Clifford channels

def _h_unitary() -> np.ndarray:
    return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def _s_unitary() -> np.ndarray:
    return np.array([[1, 0], [0, 1j]], dtype=complex)


@lru_cache(maxsize=1)
def clifford_channels_1q() -> tuple[tuple[Monomial, np.ndarray], ...]:
    """The 24 single-qubit Clifford channels as (monomial transfer, unitary) pairs."""
    gens = [(_h_unitary(),), (_s_unitary(),)]
    gen_pairs = []
    for (U,) in gens:
        gen_pairs.append((Monomial.from_dense(unitary_to_transfer(U, 1).entries.real), U))
    found: dict[bytes, tuple[Monomial, np.ndarray]] = {}
    frontier = [(Monomial.identity(4), np.eye(2, dtype=complex))]
    found[frontier[0][0].key()] = frontier[0]
    while frontier:
        new_frontier = []
        for mono, U in frontier:
            for gmono, gU in gen_pairs:
                prod = gmono @ mono
                key = prod.key()
                if key not in found:
                    entry = (prod, gU @ U)
                    found[key] = entry
                    new_frontier.append(entry)
        frontier = new_frontier
    assert len(found) == 24
    return tuple(found.values())


# ---------------------------------------------------------------------------
# local abelian symmetry groups

@dataclass
class LocalGroup:
    """Abelian subgroup of the single-qubit Clifford channels, with a cyclic
    generator decomposition so elements carry exponent labels."""

    name: str
    monomials: list[Monomial]          # 4x4 signed permutations, one per element
    unitaries: list[np.ndarray]        # representative 2x2 unitaries
    gen_indices: list[int]             # generator positions in `monomials`
    orders: tuple[int, ...]            # cyclic order of each generator
    exponents: np.ndarray              # (|A|, n_gens) exponent label per element

    @property
    def order(self) -> int:
        return len(self.monomials)

    def element_of_exponents(self, exps) -> int:
        match = np.all(self.exponents == np.asarray(exps), axis=1)
        idx = np.flatnonzero(match)
        if idx.size != 1:
            raise GroupConstructionError("exponent label not found")
        return int(idx[0])


def _element_order(mono: Monomial) -> int:
    acc = mono
    ident = Monomial.identity(mono.dim)
    for k in range(1, 65):
        if acc == ident:
            return k
        acc = acc @ mono
    raise GroupConstructionError("element order too large")


def _decompose_abelian(monos: list[Monomial], unitaries: list[np.ndarray],
                       name: str) -> LocalGroup:
    """Greedy cyclic decomposition of a small abelian matrix group."""
    keys = {m.key(): i for i, m in enumerate(monos)}
    orders = [_element_order(m) for m in monos]
    # candidates sorted by descending order, then a deterministic tie break that
    # prefers +1 signs (so the Z4 generator of A_T is the X -> +Y quarter turn)
    candidates = sorted(
        range(len(monos)),
        key=lambda i: (-orders[i], tuple(monos[i].perm), tuple(-np.real(monos[i].sign))),
    )
    ident = Monomial.identity(monos[0].dim)
    spanned: dict[bytes, tuple[int, ...]] = {ident.key(): ()}
    gen_indices: list[int] = []
    gen_orders: list[int] = []
    for i in candidates:
        if monos[i].key() in spanned:
            continue
        gen_indices.append(i)
        gen_orders.append(orders[i])
        new_span: dict[bytes, tuple[int, ...]] = {}
        for key, label in spanned.items():
            base = monos[keys[key]] if key != ident.key() else ident
            acc = base
            for e in range(gen_orders[-1]):
                k = acc.key()
                if e > 0 and k in spanned:
                    raise GroupConstructionError(
                        f"group {name} is not a clean direct product of cyclic factors")
                new_span[k] = label + (e,)
                acc = acc @ monos[i]
        spanned = new_span
        if len(spanned) == len(monos):
            break
    if len(spanned) != len(monos):
        raise GroupConstructionError(f"could not span group {name}")
    exponents = np.zeros((len(monos), len(gen_indices)), dtype=np.int64)
    for j, m in enumerate(monos):
        exponents[j] = spanned[m.key()]
    return LocalGroup(name, monos, unitaries, gen_indices, tuple(gen_orders), exponents)


def local_symmetry_group(gate: np.ndarray, name: str = "local") -> LocalGroup:
    """All single-qubit Clifford channels commuting with the gate channel.

    Raises NonAbelianSymmetryError when the centralizer is non-abelian, in
    which case the protocol should fall back to G = A_n without permutations.
    """
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (2, 2):
        raise ValidationError("automatic centralizer search supports single-qubit factors only")
    target = unitary_to_transfer(gate, 1).entries
    monos, unitaries = [], []
    for mono, U in clifford_channels_1q():
        C = mono.to_dense()
        if np.max(np.abs(C @ target - target @ C)) < POLICY.matrix_tol:
            monos.append(mono)
            unitaries.append(U)
    for m1 in monos:
        for m2 in monos:
            if not (m1 @ m2 == m2 @ m1):
                raise NonAbelianSymmetryError(
                    "centralizer is non-abelian; run the protocol with G = A_n")
    return _decompose_abelian(monos, unitaries, name)


# ---------------------------------------------------------------------------
# permutation part

def _pauli_digits(n: int) -> np.ndarray:
    k = np.arange(4**n)
    return np.stack([(k >> (2 * j)) & 3 for j in range(n)], axis=1)


def _perm_monomial(sigma: tuple[int, ...], n: int) -> Monomial:
    """Transfer matrix of the qubit permutation moving content of qubit j to sigma(j)."""
    digits = _pauli_digits(n)
    new_index = np.zeros(4**n, dtype=np.int64)
    for j in range(n):
        new_index += digits[:, j] << (2 * sigma[j])
    return Monomial(new_index, np.ones(4**n))


def _perm_unitary(sigma: tuple[int, ...], n: int) -> np.ndarray:
    """Permutation of tensor factors on (C^2)^n; qubit 0 is the leftmost factor."""
    d = 2**n
    P = np.zeros((d, d), dtype=complex)
    for b in range(d):
        bits = [(b >> (n - 1 - j)) & 1 for j in range(n)]
        new_b = 0
        for j in range(n):
            new_b |= bits[j] << (n - 1 - sigma[j])
        P[new_b, b] = 1.0
    return P


@dataclass
class PermutationPart:
    """Pi: the product of symmetric groups permuting identical local factors."""

    n: int
    blocks: list[tuple[int, ...]]      # qubit positions per identical-gate block
    perms: list[tuple[int, ...]]       # sigma as position maps j -> sigma(j)
    ptable: np.ndarray                 # composition table on perm indices
    pinv: np.ndarray                   # inverse indices
    monomials: list[Monomial]

    @property
    def order(self) -> int:
        return len(self.perms)

    def index_of(self, sigma: tuple[int, ...]) -> int:
        return self.perms.index(tuple(sigma))


def permutation_rep(layout: list[str]) -> PermutationPart:
    """Permutations of qubit positions within blocks of identical local gates."""
    n = len(layout)
    blocks_map: dict[str, list[int]] = {}
    for j, gate_name in enumerate(layout):
        blocks_map.setdefault(gate_name, []).append(j)
    blocks = [tuple(v) for v in blocks_map.values()]
    perms: list[tuple[int, ...]] = []
    for combo in itertools.product(*[itertools.permutations(b) for b in blocks]):
        sigma = list(range(n))
        for block, image in zip(blocks, combo):
            for src, dst in zip(block, image):
                sigma[src] = dst
        perms.append(tuple(sigma))
    perms.sort()
    index = {p: i for i, p in enumerate(perms)}
    m = len(perms)
    ptable = np.zeros((m, m), dtype=np.int64)
    pinv = np.zeros(m, dtype=np.int64)
    for i, s1 in enumerate(perms):
        for j, s2 in enumerate(perms):
            comp = tuple(s1[s2[k]] for k in range(n))
            ptable[i, j] = index[comp]
        inv = tuple(np.argsort(s1))
        pinv[i] = index[inv]
    monomials = [_perm_monomial(s, n) for s in perms]
    return PermutationPart(n, blocks, perms, ptable, pinv, monomials)


# ---------------------------------------------------------------------------
# the symmetry group G = A_n x| Pi

class SymmetryGroup:
    """Finite matrix group of signed Pauli-basis permutations with labels (a, sigma).

    Element index g = p_id * |A| + a_code; a_code is the mixed-radix code of
    the generator exponents over all local factors.  All label arithmetic is
    vectorized over numpy arrays.
    """

    def __init__(self, locals_: list[LocalGroup], perm_part: PermutationPart | None):
        self.locals = locals_
        self.n = len(locals_)
        if perm_part is None:
            ident = tuple(range(self.n))
            perm_part = PermutationPart(
                self.n, [tuple(range(self.n))], [ident],
                np.zeros((1, 1), dtype=np.int64), np.zeros(1, dtype=np.int64),
                [Monomial.identity(4**self.n)])
        self.perm_part = perm_part
        # exponent slots: one per (qubit, local generator)
        self.slot_qubit: list[int] = []
        self.slot_orders: list[int] = []
        for q, loc in enumerate(locals_):
            for d in loc.orders:
                self.slot_qubit.append(q)
                self.slot_orders.append(d)
        self.orders = np.array(self.slot_orders, dtype=np.int64)
        self.n_slots = len(self.slot_orders)
        self.a_order = int(np.prod(self.orders)) if self.n_slots else 1
        self.weights = np.ones(self.n_slots, dtype=np.int64)
        for s in range(1, self.n_slots):
            self.weights[s] = self.weights[s - 1] * self.orders[s - 1]
        codes = np.arange(self.a_order)
        self.EXP = np.stack(
            [(codes // self.weights[s]) % self.orders[s] for s in range(self.n_slots)],
            axis=1) if self.n_slots else np.zeros((1, 0), dtype=np.int64)
        self._build_action()
        self._check_normalization()
        self._build_monomials()
        self._class_data = None

    # -- construction helpers ------------------------------------------------

    def _qubit_slots(self, q: int) -> list[int]:
        return [s for s in range(self.n_slots) if self.slot_qubit[s] == q]

    def _build_action(self):
        """ACT[p, s]: phi_sigma(a)_s = a[ACT[p, s]], verified against matrices."""
        P = self.perm_part
        self.ACT = np.zeros((P.order, self.n_slots), dtype=np.int64)
        for p, sigma in enumerate(P.perms):
            sigma_inv = np.argsort(sigma)
            for s in range(self.n_slots):
                q = self.slot_qubit[s]
                src_q = int(sigma_inv[q])
                offset = self._qubit_slots(q).index(s)
                src_slots = self._qubit_slots(src_q)
                if len(src_slots) != len(self._qubit_slots(q)):
                    raise GroupConstructionError(
                        "permutation links factors with different local groups")
                self.ACT[p, s] = src_slots[offset]
        # verify P(sigma) A(a) = A(phi_sigma(a)) P(sigma) on the generators
        rng = np.random.default_rng(7)
        for _ in range(min(6, self.perm_part.order * self.a_order)):
            p = int(rng.integers(self.perm_part.order))
            a = int(rng.integers(self.a_order))
            lhs = self.perm_part.monomials[p] @ self._a_monomial(a)
            a2 = self.code_of_exponents((self.EXP[a][self.ACT[p]]) % self.orders)
            rhs = self._a_monomial(a2) @ self.perm_part.monomials[p]
            if not lhs == rhs:
                raise GroupConstructionError("semidirect action check failed")

    def _check_normalization(self):
        if self.perm_part.order == 1:
            return
        a_keys = {self._a_monomial(a).key() for a in range(self.a_order)}
        for p in range(self.perm_part.order):
            mono = self.perm_part.monomials[p]
            conj = mono @ self._a_monomial(1 if self.a_order > 1 else 0) @ mono.inverse()
            if conj.key() not in a_keys:
                raise GroupConstructionError("A_n is not normalized by Pi")

    def _local_monomial(self, q: int, exps) -> Monomial:
        loc = self.locals[q]
        mono = Monomial.identity(4)
        for gen_idx, e in zip(loc.gen_indices, exps):
            for _ in range(int(e)):
                mono = loc.monomials[gen_idx] @ mono
        return mono

    def _a_monomial(self, a_code: int) -> Monomial:
        exps = self.EXP[a_code]
        digits = _pauli_digits(self.n)
        new_index = np.zeros(4**self.n, dtype=np.int64)
        sign = np.ones(4**self.n)
        for q in range(self.n):
            local = self._local_monomial(q, exps[self._qubit_slots(q)])
            d = digits[:, q]
            new_index += local.perm[d] << (2 * q)
            sign = sign * np.real(local.sign[d])
        return Monomial(new_index, sign)

    def _build_monomials(self):
        dim = 4**self.n
        nA, nP = self.a_order, self.perm_part.order
        a_perm = np.zeros((nA, dim), dtype=np.int64)
        a_sign = np.zeros((nA, dim))
        for a in range(nA):
            mono = self._a_monomial(a)
            a_perm[a], a_sign[a] = mono.perm, mono.sign
        self.PERM = np.zeros((nA * nP, dim), dtype=np.int64)
        self.SIGN = np.zeros((nA * nP, dim))
        for p in range(nP):
            pp = self.perm_part.monomials[p].perm
            for a in range(nA):
                g = p * nA + a
                self.PERM[g] = a_perm[a][pp]
                self.SIGN[g] = a_sign[a][pp]

    # -- label arithmetic ----------------------------------------------------

    @property
    def order(self) -> int:
        return self.a_order * self.perm_part.order

    def code_of_exponents(self, exps) -> int:
        return int(np.dot(np.asarray(exps) % self.orders, self.weights))

    def split(self, g) -> tuple[np.ndarray, np.ndarray]:
        g = np.asarray(g)
        return g % self.a_order, g // self.a_order

    def join(self, a, p) -> np.ndarray:
        return np.asarray(p) * self.a_order + np.asarray(a)

    def compose(self, g1, g2) -> np.ndarray:
        """Vectorized g1 * g2 on element indices (scalars or equal-length arrays)."""
        scalar = np.isscalar(g1) and np.isscalar(g2)
        g1 = np.atleast_1d(np.asarray(g1))
        g2 = np.atleast_1d(np.asarray(g2))
        g1, g2 = np.broadcast_arrays(g1, g2)
        a1, p1 = self.split(g1)
        a2, p2 = self.split(g2)
        e2p = np.take_along_axis(self.EXP[a2], self.ACT[p1], axis=-1)
        e = (self.EXP[a1] + e2p) % self.orders
        out = self.join(e @ self.weights, self.perm_part.ptable[p1, p2])
        return int(out[0]) if scalar else out

    def inverse(self, g) -> np.ndarray:
        scalar = np.isscalar(g)
        g = np.atleast_1d(np.asarray(g))
        a, p = self.split(g)
        pinv = self.perm_part.pinv[p]
        e = (-self.EXP[a]) % self.orders
        e2 = np.take_along_axis(e, self.ACT[pinv], axis=-1)
        out = self.join(e2 @ self.weights, pinv)
        return int(out[0]) if scalar else out

    def identity_index(self) -> int:
        return 0

    def monomial(self, g: int) -> Monomial:
        return Monomial(self.PERM[g], self.SIGN[g])

    def transfer_dense(self, g: int) -> np.ndarray:
        return self.monomial(g).to_dense()

    def unitary(self, g: int) -> np.ndarray:
        a, p = int(g % self.a_order), int(g // self.a_order)
        exps = self.EXP[a]
        U = np.eye(1, dtype=complex)
        for q in range(self.n):
            loc = self.locals[q]
            Uq = np.eye(2, dtype=complex)
            for gen_idx, e in zip(loc.gen_indices, exps[self._qubit_slots(q)]):
                Uq = np.linalg.matrix_power(loc.unitaries[gen_idx], int(e)) @ Uq
            U = np.kron(U, Uq)
        # monomial(g) = M_a @ M_p and the transfer map is contravariant
        # (conjugation channels compose in reverse), so the permutation
        # unitary goes on the left
        return _perm_unitary(self.perm_part.perms[p], self.n) @ U

    def trace(self, g: int) -> float:
        fixed = self.PERM[g] == np.arange(4**self.n)
        return float(self.SIGN[g][fixed].sum())

    # -- conjugacy classes ---------------------------------------------------

    def conjugacy_classes(self):
        """(class_of, class_reps, class_sizes) with vectorized conjugation."""
        if self._class_data is not None:
            return self._class_data
        N = self.order
        all_g = np.arange(N)
        t_inv = self.inverse(all_g)
        class_of = np.full(N, -1, dtype=np.int64)
        reps, sizes = [], []
        for s in range(N):
            if class_of[s] >= 0:
                continue
            conj = self.compose(self.compose(t_inv, s), all_g)
            members = np.unique(conj)
            class_of[members] = len(reps)
            reps.append(s)
            sizes.append(members.size)
        self._class_data = (class_of, np.array(reps), np.array(sizes))
        return self._class_data


# ---------------------------------------------------------------------------
# public constructors

def tensor_power_group(local: LocalGroup | list[LocalGroup],
                       layout: list[str] | int) -> SymmetryGroup:
    """A_n: the Kronecker product of the local symmetry groups, no permutations."""
    if isinstance(local, LocalGroup):
        count = layout if isinstance(layout, int) else len(layout)
        locals_ = [local] * count
    else:
        locals_ = list(local)
    return SymmetryGroup(locals_, None)


def semidirect_group(A: SymmetryGroup, P: PermutationPart) -> SymmetryGroup:
    """G = A_n x| Pi; checks that Pi normalizes A_n."""
    if A.perm_part.order != 1:
        raise GroupConstructionError("first factor must be the abelian part A_n")
    if P.n != A.n:
        raise GroupConstructionError("permutation part acts on a different qubit count")
    return SymmetryGroup(A.locals, P)


def symmetry_group_for_copies(gate: np.ndarray, n: int, gate_name: str = "U") -> SymmetryGroup:
    """Full symmetry group of n identical copies of a single-qubit gate."""
    local = local_symmetry_group(gate, gate_name)
    A = tensor_power_group(local, n)
    if n == 1:
        return A
    return semidirect_group(A, permutation_rep([gate_name] * n))


# ---------------------------------------------------------------------------
# character theory

@dataclass
class CharacterTable:
    group: SymmetryGroup
    labels: list[tuple]                  # (orbit representative word, stabilizer irrep name)
    values: np.ndarray                   # (n_irreps, n_classes), complex
    class_reps: np.ndarray
    class_sizes: np.ndarray
    class_of: np.ndarray

    @property
    def dims(self) -> np.ndarray:
        ident_cls = self.class_of[self.group.identity_index()]
        return np.round(self.values[:, ident_cls].real).astype(int)

    def character_on_elements(self, irrep: int) -> np.ndarray:
        return self.values[irrep][self.class_of]

    def check(self, tol: float = POLICY.matrix_tol):
        G = self.group
        gram = (self.values * self.class_sizes) @ self.values.conj().T / G.order
        if np.max(np.abs(gram - np.eye(len(self.labels)))) > tol:
            raise GroupConstructionError("character orthogonality failed")
        if int(np.sum(self.dims**2)) != G.order:
            raise GroupConstructionError("sum of squared dimensions != |G|")


def abelian_characters(A: SymmetryGroup) -> CharacterTable:
    """1-dimensional characters of A_n: products of the local cyclic characters."""
    if A.perm_part.order != 1:
        raise GroupConstructionError("abelian_characters expects a trivial permutation part")
    N = A.order
    labels = [tuple(A.EXP[c]) for c in range(N)]
    phase = np.exp(2j * np.pi * (A.EXP / A.orders) @ A.EXP.T)  # chi_c(a) at [c, a]
    class_of = np.arange(N)
    table = CharacterTable(A, [(lab, "e") for lab in labels], phase,
                           np.arange(N), np.ones(N, dtype=np.int64), class_of)
    return table


def character_word_orbits(A: SymmetryGroup, P: PermutationPart):
    """Orbits of the abelian character labels under Pi.

    Returns a list of (representative word, stabilizer perm indices, orbit size).
    The action permutes label entries the same way Pi permutes exponent slots.
    """
    words = [tuple(A.EXP[c]) for c in range(A.order)]
    word_set = set(words)
    # chi labels move the same way exponent slots do under conjugation
    G_full = SymmetryGroup(A.locals, P)
    act = G_full.ACT           # phi_sigma(a)_s = a[ACT[p, s]]

    def move(word: tuple, p: int) -> tuple:
        return tuple(np.asarray(word)[act[P.pinv[p]]])

    orbits = []
    seen: set[tuple] = set()
    for w in sorted(words):
        if w in seen:
            continue
        orbit = {move(w, p) for p in range(P.order)}
        if any(m not in word_set for m in orbit):
            raise GroupConstructionError("orbit left the character label set")
        seen |= orbit
        rep = min(orbit)
        stab_perms = tuple(sorted(p for p in range(P.order) if move(rep, p) == rep))
        orbits.append((rep, stab_perms, len(orbit)))
    return orbits


def _stabilizer_table(G: SymmetryGroup, rep_word: tuple, stab_perms: tuple[int, ...]):
    """ProductSymmetricTable for the stabilizer of a character word, plus the
    per-Pi-index class lookup (or -1 outside the stabilizer)."""
    P = G.perm_part
    # cells: qubits grouped by (block, label value restricted to that qubit)
    qubit_label = {}
    for q in range(G.n):
        slots = [s for s in range(G.n_slots) if G.slot_qubit[s] == q]
        qubit_label[q] = tuple(rep_word[s] for s in slots)
    cells_map: dict[tuple, list[int]] = {}
    for b_idx, block in enumerate(P.blocks):
        for q in block:
            cells_map.setdefault((b_idx, qubit_label[q]), []).append(q)
    cells = [tuple(v) for v in cells_map.values()]
    table = ProductSymmetricTable(cells)
    stab_set = set(stab_perms)
    class_lookup = np.full(P.order, -1, dtype=np.int64)
    count = 0
    for p in range(P.order):
        sigma = P.perms[p]
        if all({sigma[q] for q in cell} == set(cell) for cell in cells):
            if p not in stab_set:
                raise GroupConstructionError("stabilizer does not match cell structure")
            class_lookup[p] = table.class_of(sigma)
            count += 1
    if count != len(stab_set):
        raise GroupConstructionError("stabilizer does not match cell structure")
    return table, class_lookup


def induced_characters(G: SymmetryGroup) -> CharacterTable:
    """Irreducible characters of G = A_n x| Pi via the Mackey-type formula."""
    A = tensor_power_group(G.locals, G.n)
    P = G.perm_part
    orbits = character_word_orbits(A, P)
    class_of, class_reps, class_sizes = G.conjugacy_classes()
    n_cls = class_reps.size
    all_g = np.arange(G.order)
    t_inv = G.inverse(all_g)

    # per class: exponents and perm indices of t^-1 s t over all t
    conj_exp, conj_p = [], []
    for s in class_reps:
        conj = G.compose(G.compose(t_inv, int(s)), all_g)
        ca, cp = G.split(conj)
        conj_exp.append(G.EXP[ca])
        conj_p.append(cp)

    labels, rows = [], []
    for rep_word, stab_perms, orbit_size in orbits:
        table, class_lookup = _stabilizer_table(G, rep_word, stab_perms)
        stab_order = len(stab_perms)
        gr_order = A.order * stab_order
        w_c = np.asarray(rep_word) / G.orders
        for irrep_name in sorted(table.irreps):
            theta = table.irreps[irrep_name]
            theta_by_p = np.zeros(P.order)
            mask = class_lookup >= 0
            theta_by_p[mask] = theta[class_lookup[mask]]
            row = np.zeros(n_cls, dtype=complex)
            for ci in range(n_cls):
                chi_a = np.exp(2j * np.pi * (conj_exp[ci] @ w_c))
                row[ci] = np.sum(chi_a * theta_by_p[conj_p[ci]]) / gr_order
            # dimension consistency: chi(e) = [G : G_r] * dim(theta)
            ident_cls = class_of[G.identity_index()]
            expected_dim = orbit_size * table.irrep_dims[irrep_name]
            if abs(row[ident_cls] - expected_dim) > 1e-8:
                raise GroupConstructionError(
                    f"induced dimension mismatch for {rep_word};{irrep_name}")
            labels.append((rep_word, irrep_name))
            rows.append(row)

    result = CharacterTable(G, labels, np.array(rows), class_reps, class_sizes, class_of)
    result.check()
    return result


def characters_of(G: SymmetryGroup) -> CharacterTable:
    """Character table of G: abelian table if Pi is trivial, else Mackey induction."""
    if G.perm_part.order == 1:
        return abelian_characters(G)
    return induced_characters(G)


# ---------------------------------------------------------------------------
# decomposition of the Pauli-Liouville representation and projectors

@dataclass
class IrrepDecomposition:
    entries: list[tuple[tuple, int, int]]   # (label, dimension, multiplicity)

    @property
    def total_dimension(self) -> int:
        return sum(d * m for _, d, m in self.entries)

    @property
    def num_parameters(self) -> int:
        return sum(m for _, _, m in self.entries)

    def present(self) -> list[tuple[tuple, int, int]]:
        return [(lab, d, m) for lab, d, m in self.entries if m > 0]

    def to_json(self) -> str:
        payload = [{"label": _label_str(lab), "dim": d, "multiplicity": m}
                   for lab, d, m in self.entries if m > 0]
        return json.dumps(payload, indent=2)


def _label_str(label: tuple) -> str:
    word, irrep_name = label
    word_part = ",".join(f"chi{c}" for c in word)
    return f"{word_part};{irrep_name}"


def decompose_transfer_rep(G: SymmetryGroup, chars: CharacterTable) -> IrrepDecomposition:
    """Multiplicities m_alpha = |G|^-1 sum chi_alpha(g)* phi(g), phi = PL trace."""
    class_of, class_reps, class_sizes = G.conjugacy_classes()
    phi = np.array([G.trace(int(s)) for s in class_reps])
    raw = (chars.values.conj() * (class_sizes * phi)).sum(axis=1) / G.order
    mults = np.round(raw.real).astype(int)
    resid = np.max(np.abs(raw - mults))
    if resid > POLICY.multiplicity_tol:
        raise GroupConstructionError(f"non-integer multiplicity, residual {resid:.3g}")
    if np.any(mults < 0):
        raise GroupConstructionError("negative multiplicity")
    dims = chars.dims
    entries = [(chars.labels[i], int(dims[i]), int(mults[i])) for i in range(len(mults))]
    total = sum(d * m for _, d, m in entries)
    if total != 4**G.n:
        raise GroupConstructionError(f"dimension count {total} != {4**G.n}")
    return IrrepDecomposition(entries)


def irrep_projector(G: SymmetryGroup, chars: CharacterTable, irrep: int) -> np.ndarray:
    """P^alpha = (dim_alpha / |G|) sum_g chi_alpha(g)* pi(g), dense 4^n x 4^n."""
    dim = 4**G.n
    chi = chars.character_on_elements(irrep).conj()
    d_alpha = chars.dims[irrep]
    proj = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for g in range(G.order):
        proj[G.PERM[g], cols] += chi[g] * G.SIGN[g]
    proj *= d_alpha / G.order
    return proj
