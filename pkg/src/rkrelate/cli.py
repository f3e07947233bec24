"""Command-line front end.

Subcommands::

    rkrelate list-tableaus
    rkrelate run-example ex1 --tableau rk4 --h 0.01 --steps 10000 --x0 0.7
    rkrelate run-config experiment.json
    rkrelate check-related ex5 [--as-printed]
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import tableau as tableaus
from .errors import EvaluationError, ExpressionSyntaxError, NetworkError, StepError, TableauError
from .network import assemble, fibration_from_dict, induced_map, network_from_dict
from .output import write_csv, write_plots
from .relatedness import ExperimentRecord, nonaffine_pushforward_residual, trajectory_commute
from .systems import RelatedSystem, builtin_system
from .tableau import ButcherTableau
from .vecfield import AffineMap, affine_from_dict, continuous_residual, field_from_dict

DEFAULT_H = 0.01
DEFAULT_STEPS = 5000
DEFAULT_SEED = 20240101
DEFAULT_SAMPLES = 100

CONFIG_ERRORS = (ValueError, KeyError, TypeError, TableauError, NetworkError, ExpressionSyntaxError)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    system: RelatedSystem
    tableau: ButcherTableau
    h: float = DEFAULT_H
    N: int = DEFAULT_STEPS
    x0: tuple[float, ...] | None = None
    q: int | None = None
    out: Path = Path("out")
    plots: bool = True

    def __post_init__(self):
        if self.x0 is None:
            self.x0 = tuple(self.system.default_x0)
        self.x0 = tuple(float(v) for v in self.x0)
        if len(self.x0) != self.system.X.dim:
            raise ConfigError(f"x0 has {len(self.x0)} entries, {self.system.name} needs {self.system.X.dim}")
        if self.q is None and not self.tableau.explicit:
            raise ConfigError(f"tableau {self.tableau.name!r} is implicit; pass q for the iterative solver")
        if self.q is not None and self.q < 1:
            raise ConfigError("q must be a positive integer")
        if not (np.isfinite(self.h) and self.h != 0):
            raise ConfigError("h must be finite and nonzero")
        if self.N < 0:
            raise ConfigError("the step count must be non-negative")
        self.out = Path(self.out)


def _duplication_tier(f: AffineMap) -> str:
    if f.is_linear and np.all(np.isin(f.L, (0.0, 1.0))) and np.all(f.L.sum(axis=1) == 1.0):
        return "A"
    return "B"


def system_from_config(desc: Any) -> RelatedSystem:
    """Build a system from a builtin name or one of the JSON forms.

    * ``"ex1"`` or ``{"builtin": "ex3", "params": {...}}``
    * ``{"X": field, "Y": field, "f": affine map}``
    * ``{"network": net, "target": net, "fibration": {"psi": [...]}}``
    """
    if isinstance(desc, str):
        return builtin_system(desc)
    if not isinstance(desc, dict):
        raise ConfigError(f"cannot interpret system {desc!r}")
    if "builtin" in desc:
        return builtin_system(desc["builtin"], **desc.get("params", {}))
    if "network" in desc:
        src = network_from_dict(desc["network"])
        tgt = network_from_dict(desc["target"])
        F = fibration_from_dict(desc["fibration"], src, tgt)
        X, Y = assemble(src, name="X"), assemble(tgt, name="Y")
        x0 = desc.get("x0", [1.0] * X.dim)
        return RelatedSystem("network", X, Y, induced_map(F), "A", tuple(x0), networks=(F,))
    if {"X", "Y", "f"} <= desc.keys():
        X = field_from_dict(desc["X"], name="X")
        Y = field_from_dict(desc["Y"], name="Y")
        f = affine_from_dict(desc["f"])
        if (f.n, f.m) != (X.dim, Y.dim):
            raise ConfigError(f"f maps R^{f.n} -> R^{f.m} but the fields have dimensions {X.dim}, {Y.dim}")
        tier = desc.get("tier", _duplication_tier(f))
        x0 = desc.get("x0", [1.0] * X.dim)
        return RelatedSystem(desc.get("name", "custom"), X, Y, f, tier, tuple(x0))
    raise ConfigError('system needs "builtin", "network" or "X"/"Y"/"f"')


def config_from_dict(data: dict[str, Any], base_out: Path | None = None) -> ExperimentConfig:
    try:
        system = system_from_config(data["system"])
        tab = tableaus.load(data.get("tableau", "rk4"))
        out = Path(data.get("out", "out"))
        if base_out is not None and not out.is_absolute():
            out = base_out / out
        return ExperimentConfig(
            system=system,
            tableau=tab,
            h=float(data.get("h", DEFAULT_H)),
            N=int(data.get("N", data.get("steps", DEFAULT_STEPS))),
            x0=data.get("x0"),
            q=data.get("q"),
            out=out,
            plots=bool(data.get("plots", True)),
        )
    except ConfigError:
        raise
    except CONFIG_ERRORS as exc:
        raise ConfigError(str(exc)) from None


def run(config: ExperimentConfig, stream=None) -> tuple[int, ExperimentRecord]:
    """Run one paired experiment, write its files and print a summary."""
    stream = stream or sys.stdout
    S = config.system
    record = trajectory_commute(
        S.f, S.X, S.Y, config.tableau, config.h, config.x0, config.N,
        q=config.q, constraint=S.constraint, system=S.name,
    )
    write_csv(record, config.out)
    if config.plots:
        write_plots(record, config.out)

    print(f"system: {S.name}  tableau: {config.tableau.name}  mode: {record.mode}  "
          f"h: {config.h!r}  steps: {len(record.residuals) - 1}/{config.N}", file=stream)
    print(f"max residual: {record.max_residual!r}", file=stream)
    first = record.first_nonzero
    print(f"first nonzero residual step: {first if first is not None else 'none'}", file=stream)
    if record.constraint_abs is not None:
        print(f"final constraint |c(y_N)|: {float(record.constraint_abs[-1])!r}", file=stream)
    print(f"output: {config.out}", file=stream)
    if record.error is not None:
        print(f"error: stepper failed ({record.error}); partial output kept", file=sys.stderr)
        return 1, record
    return 0, record


def check_related(system: RelatedSystem, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                  scale: float = 2.0, stream=None) -> int:
    """Sample states uniformly in ``[-scale, scale]^n`` and compare both sides."""
    stream = stream or sys.stdout
    rng = np.random.default_rng(seed)
    worst, worst_ratio, failures, skipped = 0.0, 0.0, 0, 0
    for _ in range(samples):
        x = rng.uniform(-scale, scale, system.X.dim)
        try:
            if system.affine:
                r = continuous_residual(system.f, system.X, system.Y, x)
            else:
                r = nonaffine_pushforward_residual(system.f, system.X, system.Y, x)
            tol = system.tolerance(x)
        except EvaluationError:
            skipped += 1
            continue
        worst = max(worst, r)
        if r > tol:
            failures += 1
        if tol > 0:
            worst_ratio = max(worst_ratio, r / tol)
    checked = samples - skipped
    print(f"system: {system.name}  tier: {system.tier}  samples: {checked} (skipped {skipped} singular)", file=stream)
    print(f"max continuous residual: {worst!r}", file=stream)
    if system.tier != "A":
        print(f"worst residual / tolerance: {worst_ratio:.3g}", file=stream)
    print("related" if failures == 0 else f"NOT related: {failures} samples exceed tolerance", file=stream)
    return 0 if failures == 0 and checked > 0 else 1


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _params(items: Sequence[str] | None, as_printed: bool, name: str) -> dict[str, Any]:
    params: dict[str, Any] = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        params[key] = value
    if as_printed:
        if name != "ex5":
            raise ConfigError("--as-printed only applies to ex5")
        params["as_printed"] = True
    return params


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rkrelate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list-tableaus", help="list builtin Butcher tableaus")

    def system_args(p):
        p.add_argument("system", help="ex1 .. ex5")
        p.add_argument("--param", action="append", metavar="KEY=EXPR",
                       help="system parameter, e.g. g=1 for ex4 or w2='sin(x2)*x3/x1' for ex3")
        p.add_argument("--as-printed", action="store_true",
                       help="ex5 only: use the unrelated X = [[0,-1],[1,0]]")

    p = sub.add_parser("run-example", help="integrate a builtin pair and compare trajectories")
    system_args(p)
    p.add_argument("--tableau", default="rk4", help="builtin name or inline JSON")
    p.add_argument("--h", type=float, default=DEFAULT_H)
    p.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    p.add_argument("--x0", type=_floats)
    p.add_argument("--q", type=int, help="Picard sweeps; selects the implicit path")
    p.add_argument("--out", type=Path)
    p.add_argument("--no-plots", action="store_true")

    p = sub.add_parser("run-config", help="run one or more experiments from a JSON file")
    p.add_argument("config", type=Path)
    p.add_argument("--out", type=Path, help="base directory for relative output paths")
    p.add_argument("--jobs", type=int, default=None)

    p = sub.add_parser("check-related", help="sample the continuous relatedness residual")
    p.add_argument("system", nargs="?", help="ex1 .. ex5 (or use --config)")
    p.add_argument("--config", type=Path, help="JSON file with a system description")
    p.add_argument("--param", action="append", metavar="KEY=EXPR")
    p.add_argument("--as-printed", action="store_true")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return parser


def _load_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _run_config_file(path: Path, base_out: Path | None, jobs: int | None) -> int:
    data = _load_json(path)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    if "experiments" not in data:
        return run(config_from_dict(data, base_out))[0]
    base = Path(data.get("out", "out"))
    if base_out is not None:
        base = base_out / base
    configs = []
    for i, item in enumerate(data["experiments"]):
        if not isinstance(item, dict):
            raise ConfigError(f"experiment {i} is not a JSON object")
        item = dict(item)
        item.setdefault("out", str(i))
        configs.append(config_from_dict(item, base))
    if len({c.out for c in configs}) != len(configs):
        raise ConfigError("experiments must write to distinct output directories")

    def one(cfg):
        buf = io.StringIO()
        status, _ = run(cfg, stream=buf)
        return status, buf.getvalue()

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(one, configs))
    for status, text in results:
        sys.stdout.write(text)
    return max(status for status, _ in results)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list-tableaus":
            for line in tableaus.describe_builtins():
                print(line)
            return 0
        if args.command == "run-example":
            try:
                system = builtin_system(args.system, **_params(args.param, args.as_printed, args.system))
                cfg = ExperimentConfig(
                    system=system,
                    tableau=tableaus.load(args.tableau),
                    h=args.h,
                    N=args.steps,
                    x0=args.x0,
                    q=args.q,
                    out=args.out or Path("out") / args.system,
                    plots=not args.no_plots,
                )
            except ConfigError:
                raise
            except CONFIG_ERRORS as exc:
                raise ConfigError(str(exc)) from None
            return run(cfg)[0]
        if args.command == "run-config":
            return _run_config_file(args.config, args.out, args.jobs)
        if args.command == "check-related":
            try:
                if args.config is not None:
                    system = system_from_config(_load_json(args.config)["system"])
                elif args.system:
                    system = builtin_system(args.system, **_params(args.param, args.as_printed, args.system))
                else:
                    raise ConfigError("give a system name or --config")
            except ConfigError:
                raise
            except CONFIG_ERRORS as exc:
                raise ConfigError(str(exc)) from None
            return check_related(system, samples=args.samples, seed=args.seed)
    except ConfigError as exc:
        print(f"rkrelate: configuration error: {exc}", file=sys.stderr)
        return 2
    except (StepError, EvaluationError) as exc:
        print(f"rkrelate: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
