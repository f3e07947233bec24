"""Ready-made related pairs ``(X, Y, f)``.

=====  =====================================================  ==========
name   relation                                               exactness
=====  =====================================================  ==========
ex1    restriction of a 2-d field to its unstable diagonal    bit-exact
ex2    same, on the offset line ``x2 = x1 + 1``               tolerance
ex3    two three-cell networks related by a fibration         bit-exact
ex4    parabola ``y2^2 = y1``; the map ``x -> (x^2, x)``      nonaffine
ex5    linear fields conjugated by ``[[1, -1], [1, 1]]``      tolerance
=====  =====================================================  ==========

"Bit-exact" pairs are related by pure coordinate duplication, so both
steppers perform identical floating-point operations and the discrete
commutation residual is exactly zero.  The other affine pairs are only
related up to rounding, since ``L`` and the offset reorder arithmetic.
"""

from __future__ import annotations

import inspect

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import ExpressionSyntaxError
from .expr import Expression
from .network import CellType, Fibration, Network, assemble, induced_map
from .vecfield import AffineMap, NonAffineMap, VectorField, linear_field, parse_field

EXACT_TOL = 0.0
AFFINE_TOL = 1e-12  # relative to max(1, ||x||_1)
NONAFFINE_ULPS = 8  # times eps * ||Y(f(x))||_1

EPS = float(np.finfo(float).eps)


@dataclass
class RelatedSystem:
    name: str
    X: VectorField
    Y: VectorField
    f: AffineMap | NonAffineMap
    tier: str  # "A" (bit-exact), "B" (rounding tolerance) or "nonaffine"
    default_x0: tuple[float, ...]
    constraint: Callable[[np.ndarray], float] | None = None
    params: dict[str, Any] = field(default_factory=dict)
    networks: tuple[Fibration, ...] = ()

    @property
    def affine(self) -> bool:
        return isinstance(self.f, AffineMap)

    def tolerance(self, x, fx=None, Yfx=None) -> float:
        """Allowed continuous residual at ``x`` for this system's tier."""
        if self.tier == "A":
            return EXACT_TOL
        if self.tier == "B":
            return AFFINE_TOL * max(1.0, float(np.sum(np.abs(x))))
        if Yfx is None:
            Yfx = self.Y(self.f(x))
        return NONAFFINE_ULPS * EPS * float(np.sum(np.abs(Yfx)))


SYSTEM_NAMES = ("ex1", "ex2", "ex3", "ex4", "ex5")

EX3_DEFAULTS = {
    "w1": "x1",
    # w2(y, x1, x2) = sin(x1) * x2 / y with y -> x1, x1 -> x2, x2 -> x3
    "w2": "sin(x2)*x3/x1",
    # w3(z, y) = y * z
    "w3": "x2*x1",
}

EX5_MAP = [[1.0, -1.0], [1.0, 1.0]]
EX5_X = [[0.0, -1.0], [-1.0, 0.0]]
EX5_X_AS_PRINTED = [[0.0, -1.0], [1.0, 0.0]]
EX5_Y = [[1.0, 0.0], [0.0, -1.0]]


def _ex1():
    X = parse_field(["-3*x1"], 1, name="ex1.X")
    Y = parse_field(["-x1 - 2*x2 + (x1 - x2)*x1^3", "-2*x1 - x2"], 2, name="ex1.Y")
    f = AffineMap.duplication([0, 0], 1)
    return RelatedSystem("ex1", X, Y, f, "A", (0.7,))


def _ex2():
    X = parse_field(["-3*x1 - 1"], 1, name="ex2.X")
    Y = parse_field(["-x1 - 2*x2 + 1", "-2*x1 - x2"], 2, name="ex2.Y")
    f = AffineMap.duplication([0, 0], 1, p=[0.0, 1.0])
    return RelatedSystem("ex2", X, Y, f, "B", (0.7,))


def ex3_networks(w1: str, w2: str, w3: str) -> Fibration:
    """The two networks of the fibration example and the cell map between them.

    Source: ``X = (w1(x1), w2(x2, x1, x1), w3(x3, x2))``.
    Target: ``Y = (w1(y1), w1(y2), w2(y3, y1, y2))``.
    ``psi = (0, 0, 1)`` induces ``f(x1, x2, x3) = (x1, x1, x2)``.
    """
    types = (
        CellType("w1", 1, 0, (w1,)),
        CellType("w2", 1, 2, (w2,)),
        CellType("w3", 1, 1, (w3,)),
    )
    source = Network(types, ("w1", "w2", "w3"), ((), (0, 0), (1,)))
    target = Network(types, ("w1", "w1", "w2"), ((), (), (0, 1)))
    return Fibration(source, target, (0, 0, 1))


def _ex3(w1: str = EX3_DEFAULTS["w1"], w2: str = EX3_DEFAULTS["w2"], w3: str = EX3_DEFAULTS["w3"]):
    for label, text, nargs in (("w1", w1, 1), ("w2", w2, 3), ("w3", w3, 2)):
        try:
            Expression(text, nvars=nargs)
        except ExpressionSyntaxError as exc:
            raise ExpressionSyntaxError(f"{label}: {exc}") from None
    F = ex3_networks(w1, w2, w3)
    X = assemble(F.source, name="ex3.X")
    Y = assemble(F.target, name="ex3.Y")
    return RelatedSystem(
        "ex3", X, Y, induced_map(F), "A", (1.0, 2.0, 3.0),
        params={"w1": w1, "w2": w2, "w3": w3}, networks=(F,),
    )


def parabola_map() -> NonAffineMap:
    return NonAffineMap(
        1, 2,
        func=lambda x: [x[0] * x[0], x[0]],
        jvp=lambda x, v: [2.0 * x[0] * v[0], v[0]],
        name="x -> (x^2, x)",
    )


def parabola_constraint(y) -> float:
    """Zero exactly on the parabola ``y2^2 = y1``."""
    return float(y[1] * y[1] - y[0])


def _ex4(g: str = "1"):
    try:
        gx = Expression(g, nvars=2)
    except ExpressionSyntaxError as exc:
        raise ExpressionSyntaxError(f"g: {exc}") from None

    def X(x):
        u = x[0]
        uu = u * u
        return [u * gx([uu, uu])]

    def Y(y):
        y1, y2 = y
        y2y2 = y2 * y2
        return [2.0 * y1 * gx([y1, y2y2]), y2 * gx([y2y2, y1])]

    return RelatedSystem(
        "ex4",
        VectorField(1, X, name="ex4.X"),
        VectorField(2, Y, name="ex4.Y"),
        parabola_map(),
        "nonaffine",
        (0.5,),
        constraint=parabola_constraint,
        params={"g": g},
    )


def _ex5(as_printed: bool = False):
    X = linear_field(EX5_X_AS_PRINTED if as_printed else EX5_X, name="ex5.X")
    Y = linear_field(EX5_Y, name="ex5.Y")
    return RelatedSystem(
        "ex5", X, Y, AffineMap.linear(EX5_MAP), "B", (1.0, 0.0),
        params={"as_printed": as_printed},
    )


_FACTORIES = {"ex1": _ex1, "ex2": _ex2, "ex3": _ex3, "ex4": _ex4, "ex5": _ex5}


def builtin_system(name: str, **params) -> RelatedSystem:
    """Assemble one of the example pairs.

    ``ex3`` accepts ``w1``, ``w2``, ``w3`` (expressions in 1, 3 and 2
    variables), ``ex4`` accepts ``g`` (two variables) and ``ex5`` accepts
    ``as_printed=True`` to use the matrix ``[[0, -1], [1, 0]]`` for X, which
    is not actually related to Y.
    """
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown system {name!r}; available: {', '.join(SYSTEM_NAMES)}") from None
    allowed = list(inspect.signature(factory).parameters)
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise ValueError(f"{name} does not take parameters {unknown}; accepted: {allowed}")
    return factory(**params)
