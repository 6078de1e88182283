"""Weight estimation for a single supporting neuron.

Two fitters are provided: the iterative batch-projection rule (a
Kaczmarz-style step on the row-expanded design matrix, distribution-free)
and a damped least-squares solve used as the conventional baseline.  The
exterior criterion used for candidate selection lives here as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import Weights4

__all__ = [
    "FitParams",
    "DesignPair",
    "FitTrace",
    "FittingError",
    "expand_row",
    "expand_design",
    "fit_projection",
    "fit_least_squares",
    "exterior_criterion",
]

LS_DAMPING = 1e-8


class FittingError(ValueError):
    pass


@dataclass(frozen=True)
class FitParams:
    """Hyperparameters of the projection fitter."""

    chi: float = 1.9
    delta: float = 0.015
    split_ratio: float = 0.5  # validation fraction n_B / n
    max_steps: int = 200
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.chi <= 2:
            raise FittingError(f"chi must be in (0, 2], got {self.chi}")
        if not self.delta > 0:
            raise FittingError(f"delta must be > 0, got {self.delta}")
        if not 0 < self.split_ratio < 1:
            raise FittingError(f"split_ratio must be in (0, 1), got {self.split_ratio}")
        if self.max_steps < 1:
            raise FittingError(f"max_steps must be >= 1, got {self.max_steps}")


@dataclass(frozen=True)
class DesignPair:
    """Training and validation inputs/targets for one neuron (2 columns)."""

    U_A: np.ndarray
    y_A: np.ndarray
    U_B: np.ndarray
    y_B: np.ndarray

    def __post_init__(self):
        for name in ("U_A", "U_B"):
            U = getattr(self, name)
            if U.ndim != 2 or U.shape[1] != 2:
                raise FittingError(f"{name} must be (n, 2), got {U.shape}")
            if U.shape[0] < 1:
                raise FittingError(f"{name} must have at least one row")
        if len(self.y_A) != len(self.U_A) or len(self.y_B) != len(self.U_B):
            raise FittingError("target lengths do not match design rows")


@dataclass
class FitTrace:
    """Per-step record of one projection fit.

    ``e_B`` holds validation MSE at steps 0..k*; ``rse_A`` holds training
    residual squared error (sum over rows) at the same steps.
    """

    e_B: list = field(default_factory=list)
    rse_A: list = field(default_factory=list)
    steps_taken: int = 0
    stop_reason: str = ""  # "delta-rule" | "step-cap"

    def strictly_decreasing_recorded(self) -> bool:
        """Check the monotone-decrease contract on the recorded trace.

        Every step before the one that triggered the delta rule improved
        by at least delta, hence strictly; the triggering step itself is
        exempt (its improvement may be arbitrarily small or negative).
        """
        upto = self.steps_taken
        if self.stop_reason == "delta-rule":
            upto -= 1
        return all(self.e_B[k] < self.e_B[k - 1] for k in range(1, upto + 1))


def expand_row(v1: float, v2: float) -> np.ndarray:
    return np.array([1.0, v1, v2, v1 * v2])


def expand_design(U: np.ndarray) -> np.ndarray:
    """Row-wise feature map [1, v1, v2, v1*v2] for an (n, 2) matrix."""
    U = np.asarray(U, dtype=float)
    return np.column_stack([np.ones(len(U)), U[:, 0], U[:, 1], U[:, 0] * U[:, 1]])


def fit_projection(data: DesignPair, p: FitParams) -> tuple[Weights4, FitTrace]:
    """Iterative projection fit of the 4 neuron weights.

    Batch update on the expanded training design Phi_A:

        w <- w - chi * ||Phi_A||_F^-2 * Phi_A^T (Phi_A w - y_A)

    Stops when the validation MSE improvement drops below delta, or at
    the step cap.  Initial weights are N(0, 1) from the seeded generator.
    """
    phi_A = expand_design(data.U_A)
    phi_B = expand_design(data.U_B)
    y_A = np.asarray(data.y_A, dtype=float)
    y_B = np.asarray(data.y_B, dtype=float)

    norm2 = float(np.sum(phi_A * phi_A))
    if norm2 == 0.0:
        raise FittingError("degenerate design: expanded training matrix has zero norm")

    rng = np.random.default_rng(p.seed)
    w = rng.standard_normal(4)

    def e_B_of(w):
        r = phi_B @ w - y_B
        return float(np.mean(r * r))

    def rse_A_of(w):
        r = phi_A @ w - y_A
        return float(np.sum(r * r))

    trace = FitTrace(e_B=[e_B_of(w)], rse_A=[rse_A_of(w)])
    scale = p.chi / norm2
    for k in range(1, p.max_steps + 1):
        eta_A = phi_A @ w - y_A
        w = w - scale * (phi_A.T @ eta_A)
        trace.e_B.append(e_B_of(w))
        trace.rse_A.append(rse_A_of(w))
        trace.steps_taken = k
        if trace.e_B[k - 1] - trace.e_B[k] < p.delta:
            trace.stop_reason = "delta-rule"
            break
    else:
        trace.stop_reason = "step-cap"
    return Weights4.from_array(w), trace


def fit_least_squares(U: np.ndarray, y: np.ndarray) -> Weights4:
    """Damped least-squares fit on the expanded design.

    Solves the normal equations with Tikhonov damping eps=1e-8, which
    keeps rank-deficient designs (duplicate or constant columns)
    well-posed.
    """
    phi = expand_design(U)
    y = np.asarray(y, dtype=float)
    A = phi.T @ phi + LS_DAMPING * np.eye(4)
    b = phi.T @ y
    return Weights4.from_array(np.linalg.solve(A, b))


def exterior_criterion(predictions, targets) -> float:
    """Sum of squared residuals over all given examples."""
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if predictions.shape != targets.shape:
        raise FittingError(
            f"length mismatch: {predictions.shape} vs {targets.shape}"
        )
    if predictions.size < 1:
        raise FittingError("need at least one example")
    r = predictions - targets
    return float(np.sum(r * r))
