import numpy as np
import pytest

from symrb.channels import standard_gate
from symrb.groups import symmetry_group_for_copies


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-ish random unitary from the QR decomposition of a Ginibre matrix."""
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(A)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


@pytest.fixture(scope="session")
def t_group_1():
    return symmetry_group_for_copies(standard_gate("T"), 1, "T")


@pytest.fixture(scope="session")
def t_group_2():
    return symmetry_group_for_copies(standard_gate("T"), 2, "T")


@pytest.fixture(scope="session")
def t_group_3():
    return symmetry_group_for_copies(standard_gate("T"), 3, "T")
