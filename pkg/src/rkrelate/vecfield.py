"""Vector fields on R^n, affine maps R^n -> R^m and the relatedness residual."""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite
from typing import Any, Callable, Sequence

import numpy as np

from .errors import EvaluationError, ExpressionSyntaxError
from .expr import Expression


class VectorField:
    """A map ``X: R^n -> R^n``.

    ``func`` receives the state as a list of ``dim`` Python floats and
    returns a sequence of ``dim`` numbers.  Both call paths check the
    output length and raise :class:`EvaluationError` on non-finite output,
    so singular points never slip through as NaN.
    """

    __slots__ = ("dim", "func", "name", "components")

    def __init__(self, dim: int, func: Callable[[list], Sequence[float]], name: str = "",
                 components: Sequence[str] | None = None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = int(dim)
        self.func = func
        self.name = name
        self.components = tuple(components) if components is not None else None

    def raw(self, xs: list) -> list:
        """Evaluate on a list of floats, returning a list of floats."""
        try:
            out = [float(v) for v in self.func(xs)]
        except (ZeroDivisionError, OverflowError) as exc:
            raise EvaluationError(f"{self.name or 'field'} failed at {xs}: {exc}") from None
        if len(out) != self.dim:
            raise EvaluationError(f"{self.name or 'field'} returned {len(out)} components, expected {self.dim}")
        for v in out:
            if not isfinite(v):
                raise EvaluationError(f"{self.name or 'field'} is singular at {xs}: {out}")
        return out

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"{self.name or 'field'} expects a state of length {self.dim}, got shape {x.shape}")
        return np.array(self.raw(x.tolist()))

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<VectorField{label} dim={self.dim}>"

    def to_dict(self) -> dict[str, Any]:
        if self.components is None:
            raise TypeError("only expression-defined fields are serializable")
        return {"dim": self.dim, "components": list(self.components)}


def parse_field(exprs: Sequence[str], dim: int, name: str = "") -> VectorField:
    """Build a field whose i-th component is ``exprs[i]`` over ``x1..x{dim}``."""
    if len(exprs) != dim:
        raise ValueError(f"got {len(exprs)} component expressions for dimension {dim}")
    compiled = []
    for i, text in enumerate(exprs):
        try:
            compiled.append(Expression(text, nvars=dim))
        except ExpressionSyntaxError as exc:
            raise ExpressionSyntaxError(f"component {i + 1}: {exc}") from None

    def evaluate(xs: list) -> list[float]:
        return [e(xs) for e in compiled]

    return VectorField(dim, evaluate, name=name, components=exprs)


def linear_field(M, name: str = "") -> VectorField:
    """The field ``x -> M x`` (written out per row, no BLAS reordering)."""
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"linear field needs a square matrix, got shape {M.shape}")
    rows = M.tolist()

    def evaluate(xs: list) -> list[float]:
        out = []
        for row in rows:
            acc = row[0] * xs[0]
            for a, v in zip(row[1:], xs[1:]):
                acc = acc + a * v
            out.append(acc)
        return out

    return VectorField(M.shape[0], evaluate, name=name)


def field_from_dict(data: dict[str, Any], name: str = "") -> VectorField:
    """``{"dim": n, "components": ["expr", ...]}``"""
    try:
        dim, comps = int(data["dim"]), data["components"]
    except (KeyError, TypeError, ValueError):
        raise ValueError('field object needs integer "dim" and list "components"') from None
    return parse_field(list(comps), dim, name=name)


@dataclass(frozen=True, eq=False)
class AffineMap:
    """``f(x) = L x + p`` with ``L`` of shape (m, n)."""

    L: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        L = np.array(self.L, dtype=float)
        if L.ndim == 1:
            L = L.reshape(-1, 1)
        if L.ndim != 2:
            raise ValueError(f"L must be a matrix, got shape {L.shape}")
        p = np.zeros(L.shape[0]) if self.p is None else np.array(self.p, dtype=float).reshape(-1)
        if p.shape != (L.shape[0],):
            raise ValueError(f"offset has length {p.size}, L has {L.shape[0]} rows")
        L.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "p", p)

    @classmethod
    def linear(cls, L) -> "AffineMap":
        return cls(L, None)

    @classmethod
    def duplication(cls, sources: Sequence[int], n: int, p=None) -> "AffineMap":
        """Coordinate duplication: output ``i`` copies input ``sources[i]`` (0-based)."""
        L = np.zeros((len(sources), n))
        for i, j in enumerate(sources):
            L[i, j] = 1.0
        return cls(L, p)

    @property
    def m(self) -> int:
        return self.L.shape[0]

    @property
    def n(self) -> int:
        return self.L.shape[1]

    @property
    def is_linear(self) -> bool:
        return not np.any(self.p)

    def linear_part(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"affine map expects length {self.n}, got shape {v.shape}")
        return self.L @ v

    def __call__(self, x) -> np.ndarray:
        return apply_affine(self, x)

    apply = __call__

    def jvp(self, x, v) -> np.ndarray:
        return self.linear_part(v)

    def to_dict(self) -> dict[str, Any]:
        return {"L": self.L.tolist(), "p": self.p.tolist()}

    def __repr__(self):
        return f"AffineMap(m={self.m}, n={self.n}, L={self.L.tolist()}, p={self.p.tolist()})"


def affine_from_dict(data: dict[str, Any]) -> AffineMap:
    """``{"L": [[...]], "p": [...]}``; ``p`` defaults to zero."""
    if "L" not in data:
        raise ValueError('affine map object needs "L"')
    return AffineMap(data["L"], data.get("p"))


def apply_affine(f: AffineMap, x) -> np.ndarray:
    """``L x + p``: matrix-vector product first, then the offset."""
    return f.linear_part(x) + f.p


class NonAffineMap:
    """A smooth map given by its values and its Jacobian-vector product.

    Only used for diagnostics; the commutation theorems need affine maps.
    """

    __slots__ = ("n", "m", "func", "jvp_func", "name")

    def __init__(self, n: int, m: int, func: Callable, jvp: Callable, name: str = ""):
        self.n, self.m = n, m
        self.func = func
        self.jvp_func = jvp
        self.name = name

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"map expects length {self.n}, got shape {x.shape}")
        out = np.asarray(self.func(x), dtype=float)
        if not np.all(np.isfinite(out)):
            raise EvaluationError(f"{self.name or 'map'} is non-finite at {x.tolist()}")
        return out

    apply = __call__

    def jvp(self, x, v) -> np.ndarray:
        """Tangent map at ``x`` applied to ``v``."""
        return np.asarray(self.jvp_func(np.asarray(x, dtype=float), np.asarray(v, dtype=float)), dtype=float)

    def __repr__(self):
        return f"<NonAffineMap {self.name} R^{self.n} -> R^{self.m}>"


def _check_dims(f, X: VectorField, Y: VectorField):
    if (f.n, f.m) != (X.dim, Y.dim):
        raise ValueError(f"map R^{f.n} -> R^{f.m} does not fit fields of dimension {X.dim} and {Y.dim}")


def l1(v) -> float:
    return float(np.sum(np.abs(v)))


def continuous_residual(f: AffineMap, X: VectorField, Y: VectorField, x) -> float:
    """``|| Y(L x + p) - L X(x) ||_1``; zero exactly where X and Y are f-related."""
    _check_dims(f, X, Y)
    return l1(Y(apply_affine(f, x)) - f.linear_part(X(x)))


def pushforward_residual(f, X: VectorField, Y: VectorField, x) -> float:
    """``|| Y(f(x)) - Tf_x X(x) ||_1`` for any map offering ``jvp``."""
    _check_dims(f, X, Y)
    return l1(Y(f(x)) - f.jvp(x, X(x)))
