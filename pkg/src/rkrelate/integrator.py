"""Explicit and fixed-iteration implicit Runge-Kutta steppers.

Floating-point contract: every weighted sum is accumulated left to right in
ascending index order, ``acc = c1*v1; acc = acc + c2*v2; ...``, and stage
points are formed as ``x + h*acc``.  Two systems related by a coordinate
duplication therefore execute the same operations on the same bit patterns,
which is what makes commutation residuals exactly zero rather than merely
small.

The implicit path performs exactly ``q`` Picard sweeps from
``(X(x), ..., X(x))`` with no convergence test, damping or step control.
When ``h * ||A|| * Lip(X)`` is not small the iteration can diverge; that is
the caller's responsibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite
from typing import Sequence

import numpy as np

from .errors import EvaluationError, StepError
from .tableau import ButcherTableau
from .vecfield import VectorField


def _weighted_sum(coeffs: Sequence[float], vectors: Sequence[list]) -> list:
    acc = [coeffs[0] * v for v in vectors[0]]
    for c, vec in zip(coeffs[1:], vectors[1:]):
        acc = [a + c * v for a, v in zip(acc, vec)]
    return acc


def _offset(x: list, h: float, acc: list) -> list:
    return [xi + h * a for xi, a in zip(x, acc)]


def _eval(X: VectorField, point: list, **where) -> list:
    try:
        return X.raw(point)
    except EvaluationError as exc:
        raise StepError(str(exc), **where) from exc


def _as_state(X: VectorField, x) -> list:
    x = np.asarray(x, dtype=float)
    if x.shape != (X.dim,):
        raise ValueError(f"state has shape {x.shape}, field has dimension {X.dim}")
    return x.tolist()


def _explicit_stages(X: VectorField, A: list, s: int, h: float, x: list) -> list:
    k = [_eval(X, x, stage=0)]
    for i in range(1, s):
        k.append(_eval(X, _offset(x, h, _weighted_sum(A[i][:i], k)), stage=i))
    return k


def _implicit_stages(X: VectorField, A: list, s: int, h: float, x: list, q: int) -> list:
    xi = [_eval(X, x, iteration=0, stage=0)] * s
    for it in range(1, q + 1):
        xi = [_eval(X, _offset(x, h, _weighted_sum(A[i], xi)), iteration=it, stage=i) for i in range(s)]
    return xi


def _combine(b: list, h: float, x: list, stages: list) -> list:
    out = _offset(x, h, _weighted_sum(b, stages))
    for v in out:
        if not isfinite(v):
            raise StepError(f"state overflowed to {out}")
    return out


def explicit_stages(X: VectorField, T: ButcherTableau, h: float, x) -> list[np.ndarray]:
    """Stages ``k_i = X(x + h * sum_{j<i} a_ij k_j)``, computed in order."""
    if not T.explicit:
        raise ValueError(f"tableau {T.name!r} is implicit; use implicit_stages")
    k = _explicit_stages(X, T.A.tolist(), T.s, h, _as_state(X, x))
    return [np.array(v) for v in k]


def implicit_stages(X: VectorField, T: ButcherTableau, h: float, x, q: int) -> list[np.ndarray]:
    """``q`` sweeps of ``xi_i <- X(x + h * sum_j a_ij xi_j)`` from ``xi = (X(x),...,X(x))``.

    Each sweep uses only the previous iterate (Jacobi style), and the inner
    sum runs over all ``s`` stages.
    """
    if q < 1:
        raise ValueError("q must be a positive integer")
    xi = _implicit_stages(X, T.A.tolist(), T.s, h, _as_state(X, x), q)
    return [np.array(v) for v in xi]


def _stepper(X: VectorField, T: ButcherTableau, h: float, q: int | None):
    """A closure ``list -> list`` performing one step; validates arguments once."""
    A, b, s = T.A.tolist(), T.b.tolist(), T.s
    if q is None:
        if not T.explicit:
            raise ValueError(f"explicit mode needs an explicit tableau; {T.name!r} is implicit")
        return lambda x: _combine(b, h, x, _explicit_stages(X, A, s, h, x))
    if q < 1:
        raise ValueError("q must be a positive integer")
    return lambda x: _combine(b, h, x, _implicit_stages(X, A, s, h, x, q))


def step_explicit(X: VectorField, T: ButcherTableau, h: float, x) -> np.ndarray:
    return np.array(_stepper(X, T, h, None)(_as_state(X, x)))


def step_implicit(X: VectorField, T: ButcherTableau, h: float, x, q: int) -> np.ndarray:
    return np.array(_stepper(X, T, h, q)(_as_state(X, x)))


def step(X: VectorField, T: ButcherTableau, h: float, x, q: int | None = None) -> np.ndarray:
    """One step; ``q=None`` selects the explicit recursion."""
    return np.array(_stepper(X, T, h, q)(_as_state(X, x)))


def mode_label(q: int | None) -> str:
    return "explicit" if q is None else f"implicit({q})"


def parse_mode(text: str) -> int | None:
    """Inverse of :func:`mode_label`."""
    text = text.strip()
    if text == "explicit":
        return None
    if text.startswith("implicit(") and text.endswith(")"):
        return int(text[len("implicit("):-1])
    raise ValueError(f"mode must be 'explicit' or 'implicit(q)', got {text!r}")


@dataclass
class Trajectory:
    h: float
    points: np.ndarray  # shape (n_points, dim)
    tableau: str = ""
    q: int | None = None
    error: StepError | None = None

    @property
    def failed_step(self) -> int | None:
        return None if self.error is None else self.error.step

    @property
    def complete(self) -> bool:
        return self.error is None

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.points)) * self.h

    def __len__(self):
        return len(self.points)


def integrate(X: VectorField, T: ButcherTableau, h: float, x0, N: int, q: int | None = None) -> Trajectory:
    """Iterate the stepper ``N`` times from ``x0``.

    A failing step does not raise: the trajectory is returned truncated
    after the last good point, with ``error.step`` set to the index of the
    step that failed (``points[error.step]`` is the state it started from).
    """
    advance = _stepper(X, T, h, q)
    if N < 0:
        raise ValueError("N must be non-negative")
    x = _as_state(X, np.asarray(x0, dtype=float).reshape(-1))
    points = [x]
    error = None
    for n in range(N):
        try:
            x = advance(x)
        except StepError as exc:
            error = exc.located(step=n)
            break
        points.append(x)
    points = np.array(points, dtype=float).reshape(len(points), X.dim)
    return Trajectory(h=h, points=points, tableau=T.name, q=q, error=error)
