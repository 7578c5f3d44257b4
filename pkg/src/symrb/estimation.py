"""Decay-parameter recovery from survival series.

Pipeline: sequence-average the data, decimate by the gate period tau so
unitary eigenvalue phases drop out, extract signal poles with an ESPRIT
matrix pencil, map poles to parameter slots via the initial states'
declared targets, take tau-th roots, and assemble the average fidelity
with bootstrap confidence intervals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .protocol import ExperimentDataset, InitialState, Scenario, SlotTable
from .superop import ValidationError

CONJ_MERGE_TOL = 1e-8
REAL_IMAG_TOL = 1e-6


@dataclass(frozen=True)
class PencilConfig:
    """Matrix-pencil settings: pencil parameter and rank policy."""

    pencil: int | None = None           # P; None = auto from series length
    rank: int | None = None             # fixed rank M; None = threshold policy
    sigma_rel: float = 1e-3             # relative singular-value threshold

    def pencil_for(self, N: int) -> int:
        P = self.pencil if self.pencil is not None else max(4, N // 3)
        P = min(P, N - 2)
        if P < 1:
            raise ValidationError(f"series of length {N} too short for a pencil")
        return P


@dataclass(frozen=True)
class PoleSet:
    poles: np.ndarray
    amplitudes: np.ndarray | None = None
    residual: float = 0.0
    ill_conditioned: bool = False


@dataclass(frozen=True)
class FidelityEstimate:
    slot_lambdas: dict[str, complex]
    sum_lambda: float
    fidelity: float
    bootstrap_mean: float | None = None
    ci_low: float | None = None
    ci_high: float | None = None
    samples: int = 0


# ---------------------------------------------------------------------------
# pencil primitives

def build_hankel(series: np.ndarray, pencil: int) -> np.ndarray:
    """Hankel matrix H[i, k] = F(i + k), shape (N - P) x (P + 1)."""
    series = np.asarray(series)
    N = series.size
    if N < pencil + 2:
        raise ValidationError(f"need at least {pencil + 2} points, got {N}")
    rows = N - pencil
    idx = np.arange(rows)[:, None] + np.arange(pencil + 1)[None, :]
    return series[idx]


def _select_rank(sigmas: np.ndarray, config: PencilConfig,
                 max_rank: int | None) -> int:
    if sigmas.size == 0 or sigmas[0] < 1e-13:
        return 0
    if config.rank is not None:
        M = config.rank
    elif max_rank is not None:
        # expected count known from the irrep decomposition: extract exactly
        # that many (close poles can push sigmas below any fixed threshold;
        # spurious poles are removed by the amplitude cut afterwards)
        M = max_rank
    else:
        M = int(np.sum(sigmas > config.sigma_rel * sigmas[0]))
    if max_rank is not None:
        M = min(M, max_rank)
    return min(M, sigmas.size)


def esprit_poles(H: np.ndarray, config: PencilConfig,
                 max_rank: int | None = None) -> PoleSet:
    """Signal poles from a single Hankel matrix (right-singular-vector shift)."""
    _, sigmas, Vh = np.linalg.svd(H, full_matrices=False)
    M = _select_rank(sigmas, config, max_rank)
    if M == 0:
        return PoleSet(np.array([], dtype=complex))
    S = Vh.conj().T[:, :M]
    poles = np.linalg.eigvals(np.linalg.pinv(S[:-1]) @ S[1:])
    return PoleSet(poles)


def esprit_poles_multichannel(hankels: list[np.ndarray], config: PencilConfig,
                              max_rank: int | None = None) -> PoleSet:
    """Shared poles of several series: stack Hankels horizontally, shift the
    left singular vectors (the shared Vandermonde structure lives in the
    column space)."""
    H = np.hstack(hankels)
    U, sigmas, _ = np.linalg.svd(H, full_matrices=False)
    M = _select_rank(sigmas, config, max_rank)
    if M == 0:
        return PoleSet(np.array([], dtype=complex))
    S = U[:, :M]
    poles = np.linalg.eigvals(np.linalg.pinv(S[:-1]) @ S[1:])
    return PoleSet(poles)


def fit_amplitudes(series: np.ndarray, poles: np.ndarray,
                   exponents: np.ndarray | None = None) -> PoleSet:
    """Least-squares amplitudes of F(l) ~ sum_j xi_j x_j^l."""
    series = np.asarray(series, dtype=float)
    poles = np.asarray(poles, dtype=complex)
    if poles.size == 0:
        raise ValidationError("no poles to fit")
    gaps = np.abs(poles[:, None] - poles[None, :]) + np.eye(poles.size)
    if gaps.min() < 1e-10:
        raise ValidationError("poles must be distinct (merge first)")
    if exponents is None:
        exponents = np.arange(series.size)
    V = poles[None, :] ** np.asarray(exponents, dtype=float)[:, None]
    xi, *_ = np.linalg.lstsq(V, series.astype(complex), rcond=None)
    resid = float(np.sqrt(np.mean(np.abs(series - (V @ xi).real) ** 2)))
    cond = np.linalg.cond(V)
    return PoleSet(poles, xi, resid, ill_conditioned=bool(cond > 1e12))


# ---------------------------------------------------------------------------
# period subsampling

def check_period(eigenvalues: np.ndarray, tau: int, tol: float = 1e-10) -> bool:
    """All target-gate transfer eigenvalues satisfy d^tau = 1."""
    return bool(np.max(np.abs(np.asarray(eigenvalues) ** tau - 1.0)) < tol)


def find_period(eigenvalues: np.ndarray, tau_max: int = 64) -> int:
    for tau in range(1, tau_max + 1):
        if check_period(eigenvalues, tau):
            return tau
    raise ValidationError(
        f"no gate period <= {tau_max}; use direct (unsubsampled) estimation")


def period_subsample(lengths: np.ndarray, values: np.ndarray,
                     tau: int) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    """Partition (lengths, values) into residue classes mod tau.

    Returns residue -> (decimation indices k with l = r + tau k, values),
    each sorted by k.  tau = 1 returns the series unchanged under key 0.
    """
    lengths = np.asarray(lengths)
    out: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for r in range(tau):
        mask = lengths % tau == r
        if not mask.any():
            continue
        ls = lengths[mask]
        order = np.argsort(ls)
        out[r] = ((ls[order] - r) // tau, np.asarray(values)[mask][order])
    return out


def principal_root(pole: complex, tau: int) -> complex:
    """tau-th root on the principal branch; snaps to the real axis when the
    imaginary part is negligible (decays are expected to be real near 1)."""
    lam = abs(pole) ** (1.0 / tau) * np.exp(1j * np.angle(pole) / tau)
    if abs(lam.imag) < REAL_IMAG_TOL:
        lam = complex(lam.real)
    return complex(lam)


# ---------------------------------------------------------------------------
# slot pipeline

POLE_WINDOW = (0.2, 1.02)       # plausible decimated decay poles
AMP_REL_TOL = 0.05              # reject poles carrying < 5% of the top amplitude


def _decimated_poles(lengths: np.ndarray, series: np.ndarray, tau: int,
                     config: PencilConfig, max_rank: int) -> np.ndarray:
    """Pruned signal poles of the tau-decimated series.

    Noise poles surviving the rank cut are rejected in two steps: a
    plausibility window on the modulus, then a relative-amplitude cut from
    a least-squares refit (sampling-noise poles carry tiny amplitudes
    while every genuine subspace signal carries at least the smallest
    state-overlap weight).
    """
    subs = period_subsample(lengths, series, tau)
    channels = []
    for r, (ks, vals) in sorted(subs.items()):
        if not np.array_equal(ks, np.arange(ks[0], ks[0] + ks.size)):
            raise ValidationError("decimated lengths must be contiguous")
        channels.append(vals)
    if len(channels) == 1:
        H = build_hankel(channels[0], config.pencil_for(channels[0].size))
        poles = esprit_poles(H, config, max_rank).poles
    else:
        # one Hankel per residue channel, stacked horizontally; all blocks
        # must share the row count, so the pencil absorbs length differences
        rows = min(vals.size - config.pencil_for(vals.size)
                   for vals in channels)
        hankels = [build_hankel(vals, vals.size - rows) for vals in channels]
        poles = esprit_poles_multichannel(hankels, config, max_rank).poles
    poles = poles[(np.abs(poles) > POLE_WINDOW[0])
                  & (np.abs(poles) < POLE_WINDOW[1])]
    uniq: list[complex] = []
    for p in sorted(poles, key=lambda x: -abs(x)):
        if all(abs(p - u) > CONJ_MERGE_TOL for u in uniq):
            uniq.append(complex(p))
    if not uniq:
        return np.array([], dtype=complex)
    weight = np.zeros(len(uniq))
    for vals in channels:
        fit = fit_amplitudes(vals, np.array(uniq))
        weight += np.abs(fit.amplitudes)
    keep = weight > AMP_REL_TOL * weight.max()
    return np.array(uniq, dtype=complex)[keep]


def state_lambdas(lengths: np.ndarray, series: np.ndarray, state: InitialState,
                  tau: int, config: PencilConfig) -> dict[str, complex]:
    """Slot -> lambda for one initial state's sequence-averaged series.

    The extracted pole nearest 1 is the trace-preservation pole and is
    discarded (the trivial slot is pinned to 1 exactly); the remaining
    poles, ordered by increasing imaginary part, fill the state's declared
    groups.  If degeneracy collapses the extraction below the expected
    count, unfilled groups reuse the previous group's pole (or the trivial
    pole when none exists) — degenerate parameters share a value anyway.
    """
    out: dict[str, complex] = {}
    poles = _decimated_poles(lengths, series, tau, config, state.max_rank)
    if poles.size == 0:
        poles = np.array([1.0 + 0.0j])      # constant series: everything at 1
    keep = list(poles)
    trivial = min(keep, key=lambda x: abs(x - 1.0))
    keep.remove(trivial)
    keep.sort(key=lambda x: (x.imag, x.real))
    prev_pole = trivial
    for g, group in enumerate(state.pole_groups):
        pole = keep[g] if g < len(keep) else prev_pole
        prev_pole = pole
        lam = principal_root(pole, tau)
        for slot in group:
            out[slot] = lam
    return out


def estimate_lambdas(dataset: ExperimentDataset, states: list[InitialState],
                     trivial_slot: str, tau: int, config: PencilConfig,
                     resample: np.ndarray | None = None,
                     max_length: int | None = None) -> dict[str, complex]:
    """Slot -> lambda over all states of a dataset.

    ``resample`` optionally selects sequence indices (with repetition) for
    bootstrap averaging; ``max_length`` restricts the usable lengths.
    """
    slot_lambdas: dict[str, complex] = {trivial_slot: 1.0 + 0.0j}
    for state in states:
        lengths, values = dataset.series(state.state_id)
        if max_length is not None:
            mask = lengths <= max_length
            lengths, values = lengths[mask], values[mask]
        cols = values if resample is None else values[:, resample]
        series = cols.mean(axis=1)
        if not state.pole_groups:
            continue    # only pins the trivial slot, which is exact by trace preservation
        found = state_lambdas(lengths, series, state, tau, config)
        for slot, lam in found.items():
            if slot in slot_lambdas:
                raise ValidationError(f"slot {slot!r} filled twice")
            slot_lambdas[slot] = lam
    return slot_lambdas


def assemble_fidelity(slot_lambdas: dict[str, complex], slots: SlotTable,
                      d: int) -> tuple[float, float]:
    """(sum of lambda over the full space, average fidelity)."""
    missing = set(slots.weights) - set(slot_lambdas)
    if missing:
        raise ValidationError(f"unfilled parameter slots {sorted(missing)}")
    extra = set(slot_lambdas) - set(slots.weights)
    if extra:
        raise ValidationError(f"unknown parameter slots {sorted(extra)}")
    total = sum(slots.weights[s] * slot_lambdas[s] for s in slots.weights)
    total = float(np.real(total))
    return total, (total + d) / (d * (d + 1))


def estimate_fidelity(dataset: ExperimentDataset, scenario: Scenario, tau: int,
                      config: PencilConfig,
                      max_length: int | None = None) -> FidelityEstimate:
    lams = estimate_lambdas(dataset, scenario.states, scenario.slots.trivial,
                            tau, config, max_length=max_length)
    total, fid = assemble_fidelity(lams, scenario.slots, scenario.dim)
    return FidelityEstimate(lams, total, fid)


# ---------------------------------------------------------------------------
# bootstrap

def bootstrap_fidelity(dataset: ExperimentDataset, scenario: Scenario, tau: int,
                       config: PencilConfig, B: int = 100, m: int | None = None,
                       seed: int = 0,
                       max_length: int | None = None) -> FidelityEstimate:
    """Resample sequences with replacement, re-estimate B times, report the
    bootstrap mean and the 2.5/97.5 percentile interval."""
    K = dataset.config.num_sequences
    m = K if m is None else m
    if not 1 <= m <= K:
        raise ValidationError(f"resample size {m} outside [1, {K}]")
    rng = np.random.default_rng(seed)
    fids, last = [], None
    failures = 0
    for _ in range(B):
        resample = rng.integers(0, K, size=m)
        try:
            lams = estimate_lambdas(dataset, scenario.states,
                                    scenario.slots.trivial, tau, config,
                                    resample=resample, max_length=max_length)
            _, fid = assemble_fidelity(lams, scenario.slots, scenario.dim)
            fids.append(fid)
            last = lams
        except (ValidationError, np.linalg.LinAlgError):
            failures += 1
    if failures > 0.2 * B or not fids:
        raise ValidationError(
            f"bootstrap failed on {failures}/{B} resamples")
    fids = np.array(fids)
    total, point = assemble_fidelity(last, scenario.slots, scenario.dim)
    return FidelityEstimate(
        last, total, float(fids.mean()),
        bootstrap_mean=float(fids.mean()),
        ci_low=float(np.percentile(fids, 2.5)),
        ci_high=float(np.percentile(fids, 97.5)),
        samples=len(fids))
