"""Global numeric policy: one place for the tolerances used across the package."""

from dataclasses import dataclass


@dataclass(frozen=True)
class NumericPolicy:
    """Tolerances for matrix equality, validation and rounding checks."""

    matrix_tol: float = 1e-10       # generic matrix / unitarity comparisons
    hermitian_tol: float = 1e-12    # state vectorization round trips
    prob_slack: float = 1e-9        # allowed excursion of probabilities outside [0, 1]
    multiplicity_tol: float = 1e-8  # residual when rounding multiplicities to integers
    max_qubits: int = 4             # resource limit for basis construction


POLICY = NumericPolicy()
