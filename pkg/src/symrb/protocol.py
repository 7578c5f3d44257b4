"""Monte-Carlo simulator of the benchmarking protocol.

A run interleaves uniformly random symmetry gates with the noisy target
gate, appends the exact group inversion, and measures a survival
probability per sequence.  Everything is reproducible from a master seed:
each record's RNG is derived by hashing (master seed, length, sequence
index, state id).
"""

from __future__ import annotations

import csv
import hashlib
import itertools
import json
from dataclasses import dataclass

import numpy as np

from .channels import (GateSpec, NoiseModel, NoisyGate, perturbed_gate,
                       single_t_noise, twirl, two_t_noise)
from .groups import SymmetryGroup, symmetry_group_for_copies
from .superop import (EffectCovector, StateVector, TransferMatrix,
                      ValidationError, vectorize_effect, vectorize_state)

SCHEMA_VERSION = 1
CSV_HEADER = ["length", "seq_id", "state_id", "effect_id", "survival", "shots", "seed"]
MAX_RECORDS = 2_000_000


# ---------------------------------------------------------------------------
# initial-state library

@dataclass(frozen=True)
class InitialState:
    """Density matrix plus the decay-parameter slots its data determines.

    ``pole_groups`` lists, for each non-unit signal pole expected in the
    period-subsampled survival series (ordered by increasing imaginary
    part at reference noise), the parameter slots that pole fills.
    """

    state_id: str
    rho: np.ndarray
    pole_groups: tuple[tuple[str, ...], ...] = ()

    @property
    def max_rank(self) -> int:
        return 1 + len(self.pole_groups)

    def vector(self) -> StateVector:
        return vectorize_state(self.rho)

    def effect(self) -> EffectCovector:
        """Measurement effect proportional to rho, rescaled to a valid POVM element."""
        top = float(np.linalg.eigvalsh(self.rho).max())
        return vectorize_effect(self.rho / top)


@dataclass(frozen=True)
class SlotTable:
    """All decay-parameter slots of a gate layout with their subspace weights."""

    trivial: str                        # slot pinned to the exact pole 1
    weights: dict[str, int]             # slot -> irrep dimension d_alpha

    @property
    def names(self) -> list[str]:
        return list(self.weights)

    @property
    def total_dimension(self) -> int:
        return sum(self.weights.values())


def initial_state_library(example: str) -> tuple[list[InitialState], SlotTable]:
    """States (with targeted slots) for the one- and two-qubit T layers."""
    i = 1j
    if example == "single-T":
        states = [
            InitialState("mixed", np.eye(2) / 2),
            InitialState("zplus", np.diag([1.0, 0.0]),
                         (("chi0.1",),)),
            InitialState("yplus", np.array([[1, -i], [i, 1]]) / 2,
                         (("chi1.0",), ("chi3.0",))),
        ]
        slots = SlotTable("chi0.0", {
            "chi0.0": 1, "chi0.1": 1, "chi1.0": 1, "chi3.0": 1,
        })
        return states, slots
    if example == "two-T":
        s = np.sqrt(2)
        states = [
            InitialState("s1_mixed", np.eye(4) / 4),
            InitialState("s2_zz", np.diag([0.5, 0.0, 0.0, 0.5]),
                         (("chi0chi0_e.zz",),)),
            InitialState("s3_zsym", np.diag([0.5, 0.25, 0.25, 0.0]),
                         (("chi0chi0_e.zsym",),)),
            InitialState("s4_xxyy", np.array([
                [0.25, 0, 0, -0.25], [0, 0.25, 0, 0],
                [0, 0, 0.25, 0], [-0.25, 0, 0, 0.25]]),
                (("chi1chi1_e.0",), ("chi3chi3_e.0",))),
            InitialState("s5_zanti", np.diag([0.25, 0.5, 0.0, 0.25]),
                         (("chi0chi0_sgn.0",),)),
            InitialState("s6_mix_a", np.array([
                [0.25, -i / 8, -i / 8, 0], [i / 8, 0.25, 0, i / 8],
                [i / 8, 0, 0.25, i / 8], [0, -i / 8, -i / 8, 0.25]]),
                (("chi0chi1_e.0",), ("chi0chi3_e.0",))),
            InitialState("s7_mix_b", np.array([
                [0.25, -i / 8, -i / 8, 0], [i / 8, 0.25, 0, -i / 8],
                [i / 8, 0, 0.25, -i / 8], [0, i / 8, i / 8, 0.25]]),
                (("chi0chi1_e.1",), ("chi0chi3_e.1",))),
            InitialState("s8_swapcoh", np.array([
                [0.25, 0, 0, 0], [0, 0.25, (0.25 - 0.25j) / s, 0],
                [0, (0.25 + 0.25j) / s, 0.25, 0], [0, 0, 0, 0.25]]),
                (("chi1chi3_e.0",),)),
        ]
        slots = SlotTable("chi0chi0_e.id", {
            "chi0chi0_e.id": 1, "chi0chi0_e.zz": 1, "chi0chi0_e.zsym": 1,
            "chi0chi0_sgn.0": 1,
            "chi1chi1_e.0": 1, "chi3chi3_e.0": 1,
            "chi0chi1_e.0": 2, "chi0chi1_e.1": 2,
            "chi0chi3_e.0": 2, "chi0chi3_e.1": 2,
            "chi1chi3_e.0": 2,
        })
        return states, slots
    raise ValidationError(f"unknown example {example!r}")


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class ExperimentConfig:
    """Serializable description of one simulated benchmarking experiment."""

    example: str                        # "single-T" | "two-T"
    epsilon: float
    lengths: tuple[int, ...]
    num_sequences: int                  # K, sequences per length
    shots: int = 0                      # 0 = store exact probabilities
    seed: int = 0
    state_ids: tuple[str, ...] | None = None   # None = full library

    def __post_init__(self):
        if not self.lengths or min(self.lengths) < 1:
            raise ValidationError("lengths must be >= 1")
        if len(set(self.lengths)) != len(self.lengths):
            raise ValidationError("duplicate lengths")
        if self.num_sequences < 1:
            raise ValidationError("need at least one sequence per length")
        if self.shots < 0:
            raise ValidationError("shots must be >= 0")

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "example": self.example,
            "epsilon": self.epsilon,
            "lengths": list(self.lengths),
            "num_sequences": self.num_sequences,
            "shots": self.shots,
            "seed": self.seed,
            "state_ids": list(self.state_ids) if self.state_ids else None,
        }

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        if d.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ValidationError("unsupported dataset schema version")
        return ExperimentConfig(
            example=d["example"], epsilon=float(d["epsilon"]),
            lengths=tuple(int(x) for x in d["lengths"]),
            num_sequences=int(d["num_sequences"]), shots=int(d["shots"]),
            seed=int(d["seed"]),
            state_ids=tuple(d["state_ids"]) if d.get("state_ids") else None,
        )

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class Scenario:
    """Runtime objects derived from a configuration."""

    config: ExperimentConfig
    gate: GateSpec
    noise: NoiseModel
    group: SymmetryGroup
    noisy: NoisyGate
    states: list[InitialState]
    slots: SlotTable

    @property
    def n(self) -> int:
        return self.gate.n

    @property
    def dim(self) -> int:
        return 2**self.gate.n

    def twirled_noise(self) -> TransferMatrix:
        return twirl(self.noisy.noise, self.group)


def build_scenario(config: ExperimentConfig) -> Scenario:
    from .channels import standard_gate
    if config.example == "single-T":
        gate = GateSpec(("T",))
        noise = single_t_noise(config.epsilon)
    elif config.example == "two-T":
        gate = GateSpec(("T", "T"))
        noise = two_t_noise(config.epsilon)
    else:
        raise ValidationError(f"unknown example {config.example!r}")
    group = symmetry_group_for_copies(standard_gate("T"), gate.n, "T")
    noisy = perturbed_gate(noise, gate)
    states, slots = initial_state_library(config.example)
    if config.state_ids is not None:
        by_id = {s.state_id: s for s in states}
        missing = set(config.state_ids) - set(by_id)
        if missing:
            raise ValidationError(f"unknown state ids {sorted(missing)}")
        states = [by_id[s] for s in config.state_ids]
    return Scenario(config, gate, noise, group, noisy, states, slots)


# ---------------------------------------------------------------------------
# sequence drawing and compilation

def derive_seed(master: int, length: int, seq_id: int, state_id: str) -> int:
    """Stable 64-bit per-record seed."""
    blob = f"{master}:{length}:{seq_id}:{state_id}".encode()
    return int.from_bytes(hashlib.blake2b(blob, digest_size=8).digest(), "big")


def draw_sequence(length: int, rng: np.random.Generator, order: int) -> np.ndarray:
    """iid uniform group-element indices."""
    return rng.integers(0, order, size=length, dtype=np.int64)


def inversion_element(sequence: np.ndarray, G: SymmetryGroup) -> int:
    """Group label of the exact inversion gate for a sequence."""
    total = 0
    for k in sequence:
        total = int(G.compose(int(k), total))
    return int(G.inverse(total))


def compile_sequence(sequence: np.ndarray, noisy: NoisyGate,
                     G: SymmetryGroup) -> TransferMatrix:
    """Transfer matrix of inversion o (noisy gate o symmetry gate)^length."""
    sequence = np.asarray(sequence, dtype=np.int64)
    if sequence.size and (sequence.min() < 0 or sequence.max() >= G.order):
        raise ValidationError("sequence index out of range")
    M = np.eye(4**G.n)
    for k in sequence:
        M = noisy.implemented.entries.real @ G.monomial(int(k)).to_dense() @ M
    M = noisy.inversion_noise.entries.real \
        @ G.monomial(inversion_element(sequence, G)).to_dense() @ M
    return TransferMatrix(M, G.n)


# ---------------------------------------------------------------------------
# experiment runner

@dataclass(frozen=True)
class SequenceOutcome:
    length: int
    seq_id: int
    state_id: str
    effect_id: str
    survival: float
    shots: int
    seed: int


@dataclass
class ExperimentDataset:
    config: ExperimentConfig
    records: list[SequenceOutcome]

    def series(self, state_id: str, lengths=None) -> tuple[np.ndarray, np.ndarray]:
        """(lengths, K-per-length survival matrix) for one state, sorted by length."""
        by_len: dict[int, list[float]] = {}
        for r in self.records:
            if r.state_id == state_id:
                by_len.setdefault(r.length, []).append(r.survival)
        if lengths is None:
            lengths = sorted(by_len)
        else:
            missing = [l for l in lengths if l not in by_len]
            if missing:
                raise ValidationError(f"no records at lengths {missing[:5]}")
        values = np.array([by_len[l] for l in lengths])
        return np.asarray(lengths), values

    def save(self, csv_path, sidecar_path) -> None:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in self.records:
                w.writerow([r.length, r.seq_id, r.state_id, r.effect_id,
                            f"{r.survival:.17g}", r.shots, r.seed])
        meta = {"schema_version": SCHEMA_VERSION,
                "config": self.config.to_dict(),
                "config_hash": self.config.hash()}
        with open(sidecar_path, "w") as fh:
            json.dump(meta, fh, indent=2)

    @staticmethod
    def load(csv_path, sidecar_path) -> "ExperimentDataset":
        with open(sidecar_path) as fh:
            meta = json.load(fh)
        config = ExperimentConfig.from_dict(meta["config"])
        records = []
        with open(csv_path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != CSV_HEADER:
                raise ValidationError(f"unexpected CSV header {header}")
            for row in reader:
                records.append(SequenceOutcome(
                    int(row[0]), int(row[1]), row[2], row[3],
                    float(row[4]), int(row[5]), int(row[6])))
        return ExperimentDataset(config, records)


def _apply_symmetry_batch(G: SymmetryGroup, indices: np.ndarray,
                          S: np.ndarray) -> np.ndarray:
    """Apply a per-column symmetry gate: column q gets monomial indices[q]."""
    K = S.shape[1]
    out = np.empty_like(S)
    cols = np.arange(K)[None, :]
    out[G.PERM[indices].T, cols] = G.SIGN[indices].T * S
    return out


class _GroupTables:
    """Dense lookup tables for fast batched simulation."""

    def __init__(self, G: SymmetryGroup):
        n = G.order
        ar = np.arange(n)
        self.compose = np.asarray(G.compose(ar[:, None], ar[None, :]),
                                  dtype=np.int64)
        self.inverse = np.asarray(G.inverse(ar), dtype=np.int64)
        # row-vector form: (M v)[j] = sign[ip[j]] * v[ip[j]]
        self.iperm = np.empty_like(G.PERM)
        for g in range(n):
            self.iperm[g, G.PERM[g]] = np.arange(G.PERM.shape[1])
        self.isign = np.take_along_axis(np.real(G.SIGN).astype(float),
                                        self.iperm, axis=1)

    def apply_rows(self, indices: np.ndarray, S: np.ndarray) -> np.ndarray:
        """Row r of S gets the monomial indices[r] applied."""
        return np.take_along_axis(S, self.iperm[indices], axis=1) \
            * self.isign[indices]


def run_experiment(config: ExperimentConfig) -> ExperimentDataset:
    scenario = build_scenario(config)
    return run_scenario(scenario)


def run_scenario(scenario: Scenario) -> ExperimentDataset:
    config = scenario.config
    total = len(config.lengths) * config.num_sequences * len(scenario.states)
    if total > MAX_RECORDS:
        raise ValidationError(f"experiment would produce {total} records "
                              f"(limit {MAX_RECORDS})")
    G = scenario.group
    Mimp = scenario.noisy.implemented.entries.real
    Linv = scenario.noisy.inversion_noise.entries.real
    identity_inv = np.allclose(Linv, np.eye(Linv.shape[0]))
    K = config.num_sequences
    records: list[SequenceOutcome] = []
    lengths_desc = sorted(config.lengths, reverse=True)
    lmax = lengths_desc[0]
    tables = _GroupTables(G)
    MimpT = np.ascontiguousarray(Mimp.T)
    for state in scenario.states:
        rho = state.vector().coefficients.real
        eff = state.effect().coefficients.real
        # one row per (length, sequence), longest first, so that active rows
        # always form a prefix while stepping through the circuit
        rows = [(length, q) for length in lengths_desc for q in range(K)]
        C = len(rows)
        seeds = [derive_seed(config.seed, length, q, state.state_id)
                 for length, q in rows]
        rngs = [np.random.default_rng(s) for s in seeds]
        seq = np.zeros((lmax, C), dtype=np.int64)
        for c, (length, _) in enumerate(rows):
            seq[:length, c] = draw_sequence(length, rngs[c], G.order)
        row_len = np.array([length for length, _ in rows])
        S = np.tile(rho, (C, 1))
        cum = np.zeros(C, dtype=np.int64)
        active = C
        outcomes: list[SequenceOutcome] = []
        for t in range(lmax):
            idx = seq[t, :active]
            S[:active] = tables.apply_rows(idx, S[:active]) @ MimpT
            cum[:active] = tables.compose[idx, cum[:active]]
            done = int(np.searchsorted(-row_len, -(t + 1)))
            if done < active:
                sl = slice(done, active)
                Sf = tables.apply_rows(tables.inverse[cum[sl]], S[sl])
                if not identity_inv:
                    Sf = Sf @ Linv.T
                F = np.clip(Sf @ eff, 0.0, 1.0)
                for j, c in enumerate(range(done, active)):
                    val = float(F[j])
                    if config.shots > 0:
                        val = rngs[c].binomial(config.shots, val) / config.shots
                    length, q = rows[c]
                    outcomes.append(SequenceOutcome(
                        length, q, state.state_id, state.state_id, val,
                        config.shots, seeds[c]))
                active = done
        records.extend(sorted(outcomes, key=lambda r: (r.length, r.seq_id)))
    return ExperimentDataset(config, records)


def sequence_average(dataset: ExperimentDataset, length: int,
                     state_id: str) -> float:
    vals = [r.survival for r in dataset.records
            if r.length == length and r.state_id == state_id]
    if not vals:
        raise ValidationError(f"no records at length {length} for {state_id!r}")
    return float(np.mean(vals))


# ---------------------------------------------------------------------------
# oracles and fitting models

def average_channel(scenario: Scenario, length: int) -> TransferMatrix:
    """Exact sequence-averaged channel Lambda' (Lambda^G U)^length."""
    LG = scenario.twirled_noise().entries
    U = scenario.gate.transfer().entries
    M = np.linalg.matrix_power(LG @ U.real, length)
    return TransferMatrix(scenario.noisy.inversion_noise.entries.real @ M,
                          scenario.n)


def exact_average_oracle(scenario: Scenario, length: int,
                         state: InitialState) -> float:
    C = average_channel(scenario, length)
    p = state.effect().coefficients.real @ C.entries @ state.vector().coefficients.real
    return float(np.clip(np.real(p), 0.0, 1.0))


def oracle_series(scenario: Scenario, lengths, state: InitialState) -> np.ndarray:
    """exact_average_oracle over many lengths, sharing the matrix powers."""
    LG = scenario.twirled_noise().entries.real
    step = LG @ scenario.gate.transfer().entries.real
    rho = state.vector().coefficients.real
    eff = state.effect().coefficients.real @ scenario.noisy.inversion_noise.entries.real
    out = []
    cur = rho.copy()
    prev = 0
    for length in sorted(lengths):
        cur = np.linalg.matrix_power(step, length - prev) @ cur
        prev = length
        out.append(float(np.clip(np.real(eff @ cur), 0.0, 1.0)))
    order = np.argsort(np.argsort(lengths))
    return np.array(out)[order]


def exhaustive_average(scenario: Scenario, length: int) -> TransferMatrix:
    """Average channel by brute-force enumeration of all |G|^length sequences."""
    G = scenario.group
    if G.order**length > 200_000:
        raise ValidationError("sequence space too large for enumeration")
    dim = 4**G.n
    acc = np.zeros((dim, dim))
    for seq in itertools.product(range(G.order), repeat=length):
        acc += compile_sequence(np.array(seq), scenario.noisy, G).entries.real
    return TransferMatrix(acc / G.order**length, G.n)


def model_predict(order: int, lambdas, eigenvalues, spam, length: int,
                  zeta: np.ndarray | None = None) -> float:
    """Forward fitting model: F(l) = sum_j (lambda_j d_j)^l xi_j (order 0),
    plus cross terms zeta_ij (x_j^l - x_i^l)/(x_j - x_i) at order 1."""
    x = np.asarray(lambdas, dtype=complex) * np.asarray(eigenvalues, dtype=complex)
    xi = np.asarray(spam, dtype=complex)
    value = np.sum(xi * x**length)
    if order == 1 and zeta is not None:
        m = len(x)
        for i_ in range(m):
            for j_ in range(m):
                if i_ == j_:
                    continue
                dx = x[j_] - x[i_]
                if abs(dx) < 1e-12:
                    term = length * x[j_]**(length - 1)
                else:
                    term = (x[j_]**length - x[i_]**length) / dx
                value += zeta[i_, j_] * term
    elif order not in (0, 1):
        raise ValidationError("model order must be 0 or 1")
    return float(np.real(value))


def variance_bound(d: int, length: int, r: float) -> float:
    """Leading-order bound 4 d (d+1) l r on the per-sequence survival variance."""
    if not 0 <= r <= 1:
        raise ValidationError("average infidelity r must lie in [0, 1]")
    return 4.0 * d * (d + 1) * length * r
