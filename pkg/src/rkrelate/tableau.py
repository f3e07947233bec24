"""Butcher tableaus for autonomous Runge-Kutta methods.

A tableau here is just the pair ``(A, b)``; no node vector ``c`` is kept
because every system this package integrates is autonomous.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import TableauError

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    A: np.ndarray
    b: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float)
        if A.ndim == 1 and A.size == 1:
            A = A.reshape(1, 1)
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def s(self) -> int:
        return int(self.b.shape[0])

    @property
    def explicit(self) -> bool:
        """True iff ``a[i, j] == 0`` whenever ``i <= j``."""
        return not np.any(np.triu(self.A) != 0.0)

    @property
    def kind(self) -> str:
        return "explicit" if self.explicit else "implicit"

    def __eq__(self, other):
        if not isinstance(other, ButcherTableau):
            return NotImplemented
        return (
            self.A.shape == other.A.shape
            and np.array_equal(self.A, other.A)
            and np.array_equal(self.b, other.b)
        )

    __hash__ = None

    def to_dict(self) -> dict[str, Any]:
        return {"s": self.s, "A": self.A.tolist(), "b": self.b.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __repr__(self):
        return f"ButcherTableau(name={self.name!r}, s={self.s}, {self.kind})"


@dataclass
class ValidationReport:
    valid: bool
    kind: str | None = None
    weight_sum: float | None = None
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.valid


def validate(tableau: ButcherTableau, strict: bool = False) -> ValidationReport:
    """Check dimensions, classify, and flag weights that don't sum to one.

    A dimension mismatch makes the report invalid (or raises
    :class:`TableauError` when ``strict``).  ``sum(b) != 1`` is only a
    warning: the commutation results hold for any weights.
    """
    A, b = tableau.A, tableau.b
    report = ValidationReport(valid=True)
    if b.ndim != 1 or b.size == 0:
        report.errors.append(f"b must be a non-empty vector, got shape {b.shape}")
    elif A.ndim != 2 or A.shape != (b.size, b.size):
        report.errors.append(f"A has shape {A.shape}, expected ({b.size}, {b.size}) to match b")
    if not report.errors and not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        report.errors.append("tableau entries must be finite")
    if report.errors:
        report.valid = False
        if strict:
            raise TableauError("; ".join(report.errors))
        return report

    report.kind = tableau.kind
    report.weight_sum = math.fsum(b.tolist())
    if abs(report.weight_sum - 1.0) > WEIGHT_SUM_TOL:
        report.warnings.append(
            f"weights sum to {report.weight_sum!r}, not 1: the method is inconsistent (order 0)"
        )
    return report


_SQRT3 = math.sqrt(3.0)

_BUILTINS: dict[str, tuple[list[list[float]], list[float]]] = {
    "euler": ([[0.0]], [1.0]),
    "heun": ([[0.0, 0.0], [1.0, 0.0]], [0.5, 0.5]),
    "rk4": (
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.5, 0.0, 0.0, 0.0],
            [0.0, 0.5, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ],
        [1 / 6, 1 / 3, 1 / 3, 1 / 6],
    ),
    "implicit-midpoint": ([[0.5]], [1.0]),
    # two-stage Gauss-Legendre, order 4
    "gauss2": (
        [
            [0.25, 0.25 - _SQRT3 / 6],
            [0.25 + _SQRT3 / 6, 0.25],
        ],
        [0.5, 0.5],
    ),
}

BUILTIN_NAMES: tuple[str, ...] = tuple(_BUILTINS)


def builtin(name: str) -> ButcherTableau:
    try:
        A, b = _BUILTINS[name]
    except KeyError:
        raise TableauError(
            f"unknown tableau {name!r}; available: {', '.join(BUILTIN_NAMES)}"
        ) from None
    return ButcherTableau(A, b, name=name)


def from_dict(data: dict[str, Any], name: str = "custom") -> ButcherTableau:
    """Build a tableau from ``{"s": int, "A": [[...]], "b": [...]}``.

    ``s`` is optional but, when present, must agree with ``A`` and ``b``.
    """
    try:
        A, b = data["A"], data["b"]
    except (KeyError, TypeError):
        raise TableauError('tableau object needs "A" and "b"') from None
    try:
        tab = ButcherTableau(A, b, name=data.get("name", name))
    except ValueError as exc:  # ragged rows
        raise TableauError(f"malformed tableau: {exc}") from None
    validate(tab, strict=True)
    if "s" in data and int(data["s"]) != tab.s:
        raise TableauError(f'"s" is {data["s"]} but b has {tab.s} entries')
    return tab


def load(source: str | dict | ButcherTableau) -> ButcherTableau:
    """Accept a builtin name, a JSON string/dict, or a tableau."""
    if isinstance(source, ButcherTableau):
        return source
    if isinstance(source, dict):
        return from_dict(source)
    text = source.strip()
    if text.startswith("{"):
        return from_dict(json.loads(text))
    return builtin(text)


def describe_builtins() -> list[str]:
    """One line per builtin, e.g. ``rk4 s=4 explicit``, in a fixed order."""
    lines = []
    for name in BUILTIN_NAMES:
        t = builtin(name)
        lines.append(f"{name} s={t.s} {t.kind}")
    return lines

