"""Typed coupled-cell networks, fibrations between them, and balanced quotients.

Cells are numbered from 0.  Each cell has a type and an ordered list of
input cells, one per input slot of its type.  A type's dynamics are
expressions in its own state followed by the states of its inputs in slot
order; for one-dimensional cells ``x1`` is the cell itself and ``x2, x3, ...``
are slots 1, 2, ...

A fibration ``F`` from network ``G`` (the source) to ``G'`` (the target) is
a cell map ``psi: cells(G') -> cells(G)`` that preserves types and input
slots, ``psi(in_j(c)) == in_j(psi(c))``.  It induces the duplication map
``R^{G} -> R^{G'}`` whose block for ``c`` copies the block of ``psi(c)``;
that map relates the two assembled vector fields.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import NetworkError
from .expr import Expression
from .vecfield import AffineMap, VectorField


@dataclass(frozen=True)
class CellType:
    name: str
    dim: int
    arity: int
    dynamics: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "dynamics", tuple(self.dynamics))
        if self.dim < 1:
            raise NetworkError(f"type {self.name!r}: state dimension must be positive")
        if self.arity < 0:
            raise NetworkError(f"type {self.name!r}: arity must be non-negative")
        if len(self.dynamics) != self.dim:
            raise NetworkError(
                f"type {self.name!r}: {len(self.dynamics)} dynamics components for dimension {self.dim}"
            )

    def compiled(self) -> list[Expression]:
        return [Expression(text) for text in self.dynamics]


@dataclass(frozen=True)
class Network:
    types: tuple[CellType, ...]
    cells: tuple[str, ...]  # type name per cell
    inputs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "inputs", tuple(tuple(int(i) for i in row) for row in self.inputs))
        names = [t.name for t in self.types]
        if len(set(names)) != len(names):
            raise NetworkError(f"duplicate type names in {names}")
        if len(self.inputs) != len(self.cells):
            raise NetworkError(f"{len(self.cells)} cells but {len(self.inputs)} input lists")
        by_name = self.type_map
        for c, tname in enumerate(self.cells):
            if tname not in by_name:
                raise NetworkError(f"cell {c}: unknown type {tname!r}")
            srcs = self.inputs[c]
            if len(srcs) != by_name[tname].arity:
                raise NetworkError(
                    f"cell {c}: type {tname!r} has arity {by_name[tname].arity}, got {len(srcs)} inputs"
                )
            for j, src in enumerate(srcs):
                if not 0 <= src < len(self.cells):
                    raise NetworkError(f"cell {c} slot {j}: no cell {src}")

    @property
    def type_map(self) -> dict[str, CellType]:
        return {t.name: t for t in self.types}

    @property
    def size(self) -> int:
        return len(self.cells)

    def cell_type(self, c: int) -> CellType:
        return self.type_map[self.cells[c]]

    def cell_dim(self, c: int) -> int:
        return self.cell_type(c).dim

    def offsets(self) -> list[int]:
        """Start of each cell's block in the phase space; last entry is the total dimension."""
        out = [0]
        for c in range(self.size):
            out.append(out[-1] + self.cell_dim(c))
        return out

    @property
    def dim(self) -> int:
        return self.offsets()[-1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "types": [
                {"name": t.name, "dim": t.dim, "arity": t.arity, "dynamics": list(t.dynamics)}
                for t in self.types
            ],
            "cells": [{"type": name} for name in self.cells],
            "inputs": [list(row) for row in self.inputs],
        }


def network_from_dict(data: dict[str, Any]) -> Network:
    try:
        types = [
            CellType(t["name"], int(t.get("dim", 1)), int(t["arity"]), tuple(t["dynamics"]))
            for t in data["types"]
        ]
        cells = [c["type"] if isinstance(c, dict) else c for c in data["cells"]]
        inputs = data["inputs"]
    except (KeyError, TypeError) as exc:
        raise NetworkError(f"malformed network description: {exc}") from None
    return Network(types, cells, inputs)


def _slot_dims(net: Network) -> dict[str, tuple[int, ...]]:
    """Slot dimensions per type, checking every cell of a type agrees."""
    seen: dict[str, tuple[int, ...]] = {}
    for c, tname in enumerate(net.cells):
        dims = tuple(net.cell_dim(src) for src in net.inputs[c])
        if tname in seen and seen[tname] != dims:
            raise NetworkError(
                f"cell {c}: inputs of type {tname!r} have dimensions {dims}, "
                f"other cells of the type use {seen[tname]}"
            )
        seen[tname] = dims
    return seen


def assemble(net: Network, name: str = "") -> VectorField:
    """The network vector field; block ``c`` is ``w_type(c)(x_c, x_in1(c), ...)``."""
    slot_dims = _slot_dims(net)
    compiled: dict[str, list[Expression]] = {}
    for t in net.types:
        exprs = t.compiled()
        if t.name not in slot_dims:
            continue  # declared but unused: slot dimensions unknown
        nargs = t.dim + sum(slot_dims[t.name])
        for k, e in enumerate(exprs):
            if e.nvars > nargs:
                raise NetworkError(
                    f"type {t.name!r} component {k + 1} uses x{e.nvars} "
                    f"but cells of this type only supply {nargs} arguments"
                )
        compiled[t.name] = exprs

    offs = net.offsets()
    plan = []
    for c, tname in enumerate(net.cells):
        blocks = [(offs[c], offs[c + 1])] + [(offs[s], offs[s + 1]) for s in net.inputs[c]]
        plan.append((compiled[tname], blocks))

    def evaluate(xs: list) -> list[float]:
        out: list[float] = []
        for exprs, blocks in plan:
            args = [v for lo, hi in blocks for v in xs[lo:hi]]
            out.extend(e(args) for e in exprs)
        return out

    return VectorField(net.dim, evaluate, name=name)


# --------------------------------------------------------------------------
# fibrations


@dataclass(frozen=True)
class Fibration:
    source: Network
    target: Network
    psi: tuple[int, ...]  # indexed by target cell, values are source cells

    def __post_init__(self):
        object.__setattr__(self, "psi", tuple(int(v) for v in self.psi))


@dataclass(frozen=True)
class Violation:
    cell: int  # target cell
    slot: int | None
    message: str

    def __str__(self):
        where = f"cell {self.cell}" if self.slot is None else f"cell {self.cell} slot {self.slot}"
        return f"{where}: {self.message}"


@dataclass
class FibrationReport:
    violations: list[Violation] = field(default_factory=list)
    # slot rule failed but a rule that allows permuting a cell's inputs would pass
    permutation_tolerant_would_pass: bool = False

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid

    @property
    def offending_cells(self) -> list[int]:
        return sorted({v.cell for v in self.violations})

    def __str__(self):
        if self.valid:
            return "valid fibration"
        lines = [str(v) for v in self.violations]
        if self.permutation_tolerant_would_pass:
            lines.append("note: valid up to permutation of input slots")
        return "\n".join(lines)


def validate_fibration(F: Fibration) -> FibrationReport:
    G, H, psi = F.source, F.target, F.psi
    report = FibrationReport()
    if len(psi) != H.size:
        report.violations.append(Violation(-1, None, f"psi has {len(psi)} entries, target has {H.size} cells"))
        return report
    for c, image in enumerate(psi):
        if not 0 <= image < G.size:
            report.violations.append(Violation(c, None, f"maps to {image}, source has {G.size} cells"))
    if report.violations:
        return report

    slot_only = True
    for c in range(H.size):
        image = psi[c]
        t_c, t_img = H.cell_type(c), G.cell_type(image)
        if t_c != t_img:
            report.violations.append(
                Violation(c, None, f"type {t_c.name!r} differs from type {t_img.name!r} of source cell {image}")
            )
            slot_only = False
            continue
        pushed = [psi[src] for src in H.inputs[c]]
        expected = list(G.inputs[image])
        for j, (got, want) in enumerate(zip(pushed, expected)):
            if got != want:
                report.violations.append(
                    Violation(c, j, f"psi(in_{j}) = {got} but source cell {image} reads cell {want} in slot {j}")
                )
        if pushed != expected and Counter(pushed) != Counter(expected):
            slot_only = False
    report.permutation_tolerant_would_pass = bool(report.violations) and slot_only
    return report


def induced_map(F: Fibration) -> AffineMap:
    """Linear duplication map from the source phase space to the target's."""
    report = validate_fibration(F)
    if not report.valid:
        raise NetworkError(f"not a fibration:\n{report}")
    src_offs = F.source.offsets()
    rows = []
    for c, image in enumerate(F.psi):
        rows.extend(range(src_offs[image], src_offs[image + 1]))
    return AffineMap.duplication(rows, F.source.dim)


# --------------------------------------------------------------------------
# partitions and quotients


@dataclass(frozen=True)
class Partition:
    classes: tuple  # class label per cell

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))

    @classmethod
    def from_groups(cls, groups: Sequence[Sequence[int]], size: int) -> "Partition":
        labels: list[int | None] = [None] * size
        for k, group in enumerate(groups):
            for c in group:
                if labels[c] is not None:
                    raise NetworkError(f"cell {c} is in more than one group")
                labels[c] = k
        missing = [c for c, lab in enumerate(labels) if lab is None]
        if missing:
            raise NetworkError(f"cells {missing} are in no group")
        return cls(tuple(labels))

    def ordered_labels(self) -> list:
        """Class labels in order of first appearance."""
        return list(dict.fromkeys(self.classes))

    def class_index(self) -> list[int]:
        """Per cell, the 0-based index of its class in first-appearance order."""
        index = {lab: k for k, lab in enumerate(self.ordered_labels())}
        return [index[lab] for lab in self.classes]


def balance_violation(net: Network, P: Partition) -> tuple[int, int, str] | None:
    """First pair of same-class cells that breaks balance, or None."""
    if len(P.classes) != net.size:
        raise NetworkError(f"partition covers {len(P.classes)} cells, network has {net.size}")
    cls = P.class_index()
    rep: dict[int, int] = {}
    for c in range(net.size):
        k = cls[c]
        if k not in rep:
            rep[k] = c
            continue
        r = rep[k]
        if net.cells[c] != net.cells[r]:
            return r, c, f"types {net.cells[r]!r} and {net.cells[c]!r} differ"
        a = [cls[s] for s in net.inputs[r]]
        b = [cls[s] for s in net.inputs[c]]
        if a != b:
            return r, c, f"input classes {a} and {b} differ"
    return None


def is_balanced(net: Network, P: Partition) -> bool:
    return balance_violation(net, P) is None


def quotient(net: Network, P: Partition) -> tuple[Network, AffineMap]:
    """Quotient network of a balanced partition and its embedding onto the polydiagonal."""
    bad = balance_violation(net, P)
    if bad is not None:
        r, c, why = bad
        raise NetworkError(f"unbalanced partition: cells {r} and {c} share a class but {why}")
    cls = P.class_index()
    nclass = max(cls) + 1 if cls else 0
    reps = [cls.index(k) for k in range(nclass)]
    used = {net.cells[r] for r in reps}
    Q = Network(
        types=[t for t in net.types if t.name in used],
        cells=[net.cells[r] for r in reps],
        inputs=[[cls[s] for s in net.inputs[r]] for r in reps],
    )
    return Q, induced_map(projection_fibration(net, P, Q))


def projection_fibration(net: Network, P: Partition, Q: Network | None = None) -> Fibration:
    """The fibration from the quotient onto ``net`` sending each cell to its class."""
    if Q is None:
        Q, _ = quotient(net, P)
    return Fibration(source=Q, target=net, psi=tuple(P.class_index()))


def fibration_from_dict(data: dict[str, Any], source: Network, target: Network) -> Fibration:
    """``{"psi": [source cell for each target cell]}``"""
    try:
        psi = data["psi"]
    except (KeyError, TypeError):
        raise NetworkError('fibration object needs "psi"') from None
    return Fibration(source, target, tuple(psi))
