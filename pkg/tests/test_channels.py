import numpy as np
import pytest
import scipy.linalg

from conftest import random_unitary
from symrb.channels import (GateSpec, NoiseModel, _chi00_bound_holds,
                            average_fidelity_exact, entanglement_fidelity,
                            expm_unitary, fidelity_from_lambdas,
                            gate_error_bound, perturbed_gate, single_t_noise,
                            standard_gate, twirl, two_t_noise)
from symrb.superop import (TransferMatrix, ValidationError,
                           identity_transfer, unitary_to_transfer)


# ---------------------------------------------------------------------------
# gates and exponentials

def test_standard_gates_unitary():
    for name in ("T", "H", "S", "CNOT"):
        U = standard_gate(name)
        assert np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) < 1e-12


def test_unknown_gate_rejected():
    with pytest.raises(ValidationError):
        standard_gate("Q")
    with pytest.raises(ValidationError):
        standard_gate("RX")         # rotation without an angle


def test_expm_matches_scipy():
    rng = np.random.default_rng(0)
    for _ in range(5):
        A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        H = (A + A.conj().T) / 2
        assert np.max(np.abs(expm_unitary(H)
                             - scipy.linalg.expm(-1j * H))) < 1e-10


def test_t_from_rz():
    # T equals a pi/4 Z-rotation up to global phase; transfer matrices agree
    Mt = GateSpec(("T",)).transfer().entries
    Mr = unitary_to_transfer(standard_gate("RZ", np.pi / 4), 1).entries
    assert np.max(np.abs(Mt - Mr)) < 1e-12


# ---------------------------------------------------------------------------
# noise models

@pytest.mark.parametrize("make,spec", [
    (single_t_noise, GateSpec(("T",))),
    (two_t_noise, GateSpec(("T", "T"))),
])
def test_zero_perturbation_gives_identity_noise(make, spec):
    gate = perturbed_gate(make(0.0), spec)
    assert np.max(np.abs(gate.noise.entries
                         - np.eye(4**spec.n))) < 1e-12


@pytest.mark.parametrize("make,spec", [
    (single_t_noise, GateSpec(("T",))),
    (two_t_noise, GateSpec(("T", "T"))),
])
def test_noise_channel_trace_preserving(make, spec):
    gate = perturbed_gate(make(0.1), spec)
    assert gate.noise.is_trace_preserving()
    assert np.max(np.abs(gate.noise.entries
                         @ gate.ideal.entries
                         - gate.implemented.entries)) < 1e-12


def test_explicit_channel_model():
    dep = 0.9 * np.eye(4)
    dep[0, 0] = 1.0
    model = NoiseModel("explicit-channel", channel=TransferMatrix(dep, 1))
    gate = perturbed_gate(model, GateSpec(("T",)))
    assert np.max(np.abs(gate.noise.entries - dep)) < 1e-12


def test_explicit_channel_must_be_tp():
    bad = 0.9 * np.eye(4)
    with pytest.raises(ValidationError):
        NoiseModel("explicit-channel", channel=TransferMatrix(bad, 1))


# ---------------------------------------------------------------------------
# twirling

def _random_mixed_unitary_channel(rng, n):
    """Random convex mixture of unitary conjugations (CPTP by construction)."""
    w = rng.dirichlet(np.ones(3))
    M = sum(wi * unitary_to_transfer(random_unitary(rng, 2**n), n).entries
            for wi in w)
    return TransferMatrix(M, n)


def test_twirl_projects_and_is_idempotent(t_group_1):
    rng = np.random.default_rng(1)
    L = _random_mixed_unitary_channel(rng, 1)
    LG = twirl(L, t_group_1)
    LGG = twirl(LG, t_group_1)
    assert np.max(np.abs(LG.entries - LGG.entries)) < 1e-12
    # the twirled channel commutes with every group element
    for g in range(t_group_1.order):
        M = t_group_1.monomial(g).to_dense()
        assert np.max(np.abs(M @ LG.entries - LG.entries @ M)) < 1e-10


def test_twirl_preserves_entanglement_fidelity(t_group_1, t_group_2):
    rng = np.random.default_rng(2)
    for G in (t_group_1, t_group_2):
        for _ in range(10):
            L = _random_mixed_unitary_channel(rng, G.n)
            assert abs(entanglement_fidelity(twirl(L, G))
                       - entanglement_fidelity(L)) < 1e-12


def test_fidelity_formulas_consistent():
    rng = np.random.default_rng(3)
    L = _random_mixed_unitary_channel(rng, 1)
    d = 2
    f_ent = entanglement_fidelity(L)
    assert abs(average_fidelity_exact(L) - (d * f_ent + 1) / (d + 1)) < 1e-12
    # sum over non-trivial eigen-parameters equals Tr - 1 (the TP eigenvalue)
    lams = np.trace(L.entries.real) - 1.0
    assert abs(fidelity_from_lambdas([1.0, lams], d)
               - average_fidelity_exact(L)) < 1e-12


def test_identity_channel_fidelity_one():
    assert average_fidelity_exact(identity_transfer(2)) == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# composite-error interval

def test_chi00_interval_contains_truth():
    """Oracle: for channels with known chi_00 = F_ent, the inversion interval
    of the composition inequality must contain the true factor value."""
    rng = np.random.default_rng(4)
    for _ in range(25):
        Ul = expm_unitary(0.05 * _random_hermitian(rng, 2))
        Un = expm_unitary(0.02 * _random_hermitian(rng, 2))
        L = unitary_to_transfer(Ul, 1)
        N = unitary_to_transfer(Un, 1)
        chi_l = entanglement_fidelity(L)
        chi_n = entanglement_fidelity(N)
        chi_c = entanglement_fidelity(L @ N)
        assert _chi00_bound_holds(chi_l, chi_n, chi_c)
        lo, hi = gate_error_bound(chi_c, chi_n)
        assert lo - 1e-6 <= chi_l <= hi + 1e-6


def _random_hermitian(rng, d):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (A + A.conj().T) / 2


def test_gate_error_bound_validates_inputs():
    with pytest.raises(ValidationError):
        gate_error_bound(1.2, 0.9)
