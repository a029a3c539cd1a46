"""Damped Newton iteration with a banded direct linear solver."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np
from scipy.linalg import lapack


class SingularJacobianError(RuntimeError):
    """Raised when the banded LU factorization hits a zero pivot."""

    def __init__(self, pivot_index: int):
        self.pivot_index = pivot_index
        super().__init__(f"singular banded matrix: zero pivot at index {pivot_index}")


class NoConvergenceError(RuntimeError):
    """Raised when Newton exhausts its iteration or line-search budget."""

    def __init__(self, report: "NewtonReport", message: str = "Newton iteration did not converge"):
        self.report = report
        super().__init__(f"{message} (residual history {report.residual_history})")


@dataclass(frozen=True)
class NewtonOptions:
    tol_residual: float = 1e-10   # max-norm of the residual
    max_iter: int = 25
    damping: str = "armijo"       # "armijo" (backtracking, factor 1/2) or "none"
    min_step: float = 2.0**-10    # smallest admissible line-search fraction

    def __post_init__(self) -> None:
        if self.tol_residual <= 0:
            raise ValueError("tol_residual must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.damping not in ("armijo", "none"):
            raise ValueError(f"unknown damping {self.damping!r}")


@dataclass
class NewtonReport:
    iterations: int = 0
    residual_history: List[float] = field(default_factory=list)
    converged: bool = False


@dataclass
class BandedJacobian:
    """Band storage of a square matrix, LAPACK layout: ab[u + i - j, j] = A[i, j]."""

    ab: np.ndarray   # shape (l + u + 1, n)
    lower: int = 5
    upper: int = 5

    @property
    def n(self) -> int:
        return self.ab.shape[1]

    def to_dense(self) -> np.ndarray:
        n = self.n
        dense = np.zeros((n, n))
        for j in range(n):
            i0 = max(0, j - self.upper)
            i1 = min(n, j + self.lower + 1)
            for i in range(i0, i1):
                dense[i, j] = self.ab[self.upper + i - j, j]
        return dense

    @classmethod
    def from_dense(cls, dense: np.ndarray, lower: int, upper: int) -> "BandedJacobian":
        n = dense.shape[0]
        ab = np.zeros((lower + upper + 1, n))
        for j in range(n):
            for i in range(max(0, j - upper), min(n, j + lower + 1)):
                ab[upper + i - j, j] = dense[i, j]
        return cls(ab=ab, lower=lower, upper=upper)


def banded_solve(jac: BandedJacobian, rhs: np.ndarray) -> np.ndarray:
    """Solve jac @ x = rhs by banded LU with partial pivoting (LAPACK gbsv)."""
    l, u = jac.lower, jac.upper
    n = jac.n
    # gbsv wants l extra rows on top for pivoting fill-in.
    afb = np.zeros((2 * l + u + 1, n), order="F")
    afb[l:, :] = jac.ab
    b = np.asarray(rhs, dtype=np.float64).reshape(n, 1)
    _, _, x, info = lapack.dgbsv(l, u, afb, b)
    if info > 0:
        raise SingularJacobianError(pivot_index=info - 1)
    if info < 0:
        raise ValueError(f"dgbsv: illegal argument {-info}")
    return x[:, 0].copy()


def newton_solve(
    residual_fn: Callable[[np.ndarray], np.ndarray],
    jacobian_fn: Callable[[np.ndarray], BandedJacobian],
    guess: np.ndarray,
    opts: NewtonOptions | None = None,
) -> tuple[np.ndarray, NewtonReport]:
    """Solve residual_fn(x) = 0 starting from guess.

    Returns the solution and a report.  With Armijo damping the step is halved
    while the trial residual max-norm fails to decrease; a line search that
    bottoms out at the minimum step aborts with NoConvergenceError so the
    residual history stays strictly decreasing.
    """
    opts = opts or NewtonOptions()
    x = np.array(guess, dtype=np.float64, copy=True)
    if not np.all(np.isfinite(x)):
        raise ValueError("Newton initial guess contains non-finite entries")

    r = residual_fn(x)
    rnorm = float(np.max(np.abs(r)))
    report = NewtonReport(iterations=0, residual_history=[rnorm], converged=rnorm <= opts.tol_residual)

    while not report.converged:
        if report.iterations >= opts.max_iter:
            raise NoConvergenceError(report)
        dx = banded_solve(jacobian_fn(x), -r)
        if opts.damping == "armijo":
            step = 1.0
            while True:
                x_trial = x + step * dx
                r_trial = residual_fn(x_trial)
                rnorm_trial = float(np.max(np.abs(r_trial)))
                if np.isfinite(rnorm_trial) and rnorm_trial < rnorm:
                    break
                step *= 0.5
                if step < opts.min_step:
                    raise NoConvergenceError(report, "Newton line search stalled")
        else:
            x_trial = x + dx
            r_trial = residual_fn(x_trial)
            rnorm_trial = float(np.max(np.abs(r_trial)))
        x, r, rnorm = x_trial, r_trial, rnorm_trial
        report.iterations += 1
        report.residual_history.append(rnorm)
        report.converged = rnorm <= opts.tol_residual

    return x, report
