"""Discrete commutation residuals and paired-trajectory experiments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import StepError
from .integrator import integrate, mode_label, step
from .tableau import ButcherTableau
from .vecfield import AffineMap, NonAffineMap, VectorField, l1, pushforward_residual


def _check(f, X: VectorField, Y: VectorField):
    if (f.n, f.m) != (X.dim, Y.dim):
        raise ValueError(f"map R^{f.n} -> R^{f.m} does not fit fields of dimension {X.dim} and {Y.dim}")


def discrete_residual(f: AffineMap, X: VectorField, Y: VectorField, T: ButcherTableau, h: float, x,
                      q: int | None = None) -> float:
    """``|| D_Y(f(x)) - f(D_X(x)) ||_1`` for one step of the chosen method.

    ``q=None`` uses the explicit recursion, otherwise ``q`` Picard sweeps.
    Stepper failures are re-raised with ``side`` set to ``"X"`` or ``"Y"``.
    """
    _check(f, X, Y)
    x = np.asarray(x, dtype=float)
    try:
        dx = step(X, T, h, x, q)
    except StepError as exc:
        raise exc.located(side="X") from exc
    try:
        dy = step(Y, T, h, f(x), q)
    except StepError as exc:
        raise exc.located(side="Y") from exc
    return l1(dy - f(dx))


def nonaffine_pushforward_residual(fnl: NonAffineMap, X: VectorField, Y: VectorField, x) -> float:
    """``|| Y(f(x)) - Tf_x X(x) ||_1``: continuous relatedness for a nonlinear map."""
    return pushforward_residual(fnl, X, Y, np.asarray(x, dtype=float))


@dataclass
class ExperimentRecord:
    """Both trajectories of a paired run plus per-step diagnostics.

    ``residuals[n] = ||y_n - f(x_n)||_1``.  If either stepper failed, every
    series is truncated to the common prefix and ``error`` says where.
    """

    h: float
    N: int
    tableau: str
    q: int | None
    xs: np.ndarray
    ys: np.ndarray
    fxs: np.ndarray
    residuals: np.ndarray
    constraint_abs: np.ndarray | None = None
    error: StepError | None = None
    system: str = ""

    @property
    def mode(self) -> str:
        return mode_label(self.q)

    @property
    def failed_step(self) -> int | None:
        return None if self.error is None else self.error.step

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.residuals)) * self.h

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals))

    @property
    def first_nonzero(self) -> int | None:
        """Index of the first step whose residual is not exactly zero."""
        nz = np.flatnonzero(self.residuals)
        return int(nz[0]) if nz.size else None


def trajectory_commute(f, X: VectorField, Y: VectorField, T: ButcherTableau, h: float, x0, N: int,
                       q: int | None = None, constraint: Callable[[np.ndarray], float] | None = None,
                       system: str = "") -> ExperimentRecord:
    """Integrate X from ``x0`` and Y from ``f(x0)`` for ``N`` steps and compare.

    ``f`` may be an :class:`AffineMap` or a :class:`NonAffineMap`; only the
    former is covered by the commutation theorems.
    """
    _check(f, X, Y)
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    tx = integrate(X, T, h, x0, N, q)
    ty = integrate(Y, T, h, f(x0), N, q)
    n = min(len(tx), len(ty))
    xs, ys = tx.points[:n], ty.points[:n]

    error = None
    if tx.error is not None and tx.error.step == n - 1:
        error = tx.error.located(side="X")
    elif ty.error is not None and ty.error.step == n - 1:
        error = ty.error.located(side="Y")

    fxs = np.array([f(x) for x in xs]).reshape(n, Y.dim)
    residuals = np.array([l1(y - fx) for y, fx in zip(ys, fxs)])
    cabs = None
    if constraint is not None:
        cabs = np.array([abs(constraint(y)) for y in ys])
    return ExperimentRecord(
        h=h, N=N, tableau=T.name, q=q, xs=xs, ys=ys, fxs=fxs, residuals=residuals,
        constraint_abs=cabs, error=error, system=system,
    )
