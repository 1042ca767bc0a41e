"""Command-line interface: ``framemult <command> [options]``.

Commands read frames and multiplier systems as JSON and write JSON (or a
plain table with ``--format table``).  Exit codes: 0 success, 1 a
verification check failed, 2 bad input, 3 enumeration capacity exceeded,
4 numerical or search failure.
"""
import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import frames as fr
from .errors import CapacityError, NumericalError, PreconditionError, SchemaError, SearchFailure
from .generators import KINDS, GeneratorSpec, generate
from .splitting import explicit_split, optimal_split, unit_split
from .unconditionality import (
    DEFAULT_K1,
    ENUMERATION_CUTOFF,
    exact_constant,
    khintchine_witness,
    randomized_constant,
)
from .verify import THEOREMS, run_check, run_suite

COMMANDS = ("analyze", "constant", "split", "witness", "generate", "verify")
EXIT_FAIL, EXIT_INPUT, EXIT_CAPACITY, EXIT_NUMERIC = 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    seed: int = 0
    trials: int = 200
    tol: Optional[float] = None
    k1: float = DEFAULT_K1
    format: str = "json"
    mode: str = "auto"
    kind: Optional[str] = None
    n: Optional[int] = None
    m: Optional[int] = None
    scale: float = 1.0
    k: Optional[list] = None
    suite: str = "all"
    seeds: Optional[list] = None

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.command in ("analyze", "constant", "split", "witness") and not self.input_path:
            raise UsageError(f"{self.command} needs --input")
        if self.command == "generate" and not self.input_path:
            if self.kind is None or self.n is None:
                raise UsageError("generate needs --kind and --n (or --input with a generator spec)")
        if self.command == "verify" and self.suite not in ("all",) + THEOREMS:
            raise UsageError(f"unknown suite {self.suite!r}")
        if self.trials < 1:
            raise UsageError("--trials must be at least 1")
        if self.seed < 0:
            raise UsageError("--seed must be non-negative")
        if self.tol is not None and not self.tol > 0:
            raise UsageError("--tol must be positive")
        if not self.k1 > 0:
            raise UsageError("--k1 must be positive")


def parse_seeds(text):
    """'1..20', '3', or '1,4,9'."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed range {text!r}") from None


def parse_ints(text):
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", dest="input_path")
    common.add_argument("--output", dest="output_path")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=200)
    common.add_argument("--tol", type=float)
    common.add_argument("--k1", type=float, default=DEFAULT_K1)
    common.add_argument("--format", choices=("json", "table"), default="json")

    parser = argparse.ArgumentParser(prog="framemult", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="spectral summary of each frame")
    p = sub.add_parser("constant", parents=[common], help="unconditionality constant")
    p.add_argument("--mode", choices=("auto", "exact", "random"), default="auto")
    sub.add_parser("split", parents=[common], help="explicit, optimal and unit weight splits")
    sub.add_parser("witness", parents=[common], help="random-sign witness for equal-norm systems")
    p = sub.add_parser("generate", parents=[common], help="write a generated frame or system")
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--k", type=parse_ints, help="replication counts, e.g. 1,2,3")
    p = sub.add_parser("verify", parents=[common], help="run bound checkers")
    p.add_argument("--suite", default="all", help="all or one of: " + ", ".join(THEOREMS))
    p.add_argument("--seeds", type=parse_seeds, help="seed range such as 1..20")
    return parser


def _read(path):
    with open(path) as fh:
        return fh.read()


def _load_system(path):
    obj = fr.loads(_read(path))
    return obj


def _as_system(obj):
    if isinstance(obj, fr.MultiplierSystem):
        return obj
    raise SchemaError("expected a multiplier system object with x and f")


def _analyze(cfg):
    obj = _load_system(cfg.input_path)
    tol = cfg.tol or 1e-10
    if isinstance(obj, fr.Frame):
        return {"frame": fr.spectral_summary(obj, tol).to_dict()}
    return {
        "x": fr.spectral_summary(obj.x, tol).to_dict(),
        "f": fr.spectral_summary(obj.f, tol).to_dict(),
    }


def _constant(cfg):
    sys_ = _as_system(_load_system(cfg.input_path))
    mode = cfg.mode
    if mode == "auto":
        mode = "exact" if sys_.n <= ENUMERATION_CUTOFF else "random"
    if mode == "exact":
        est = exact_constant(sys_)
    else:
        est = randomized_constant(sys_, cfg.trials, cfg.seed)
    out = est.to_dict()
    out["witness_vector"] = est.witness_vector.tolist()
    return out


def _split(cfg):
    sys_ = _as_system(_load_system(cfg.input_path))
    return {
        "explicit": explicit_split(sys_).to_dict(),
        "optimal": optimal_split(sys_, tol=cfg.tol or 1e-8).to_dict(),
        "unit": unit_split(sys_).to_dict(),
    }


def _witness(cfg):
    sys_ = _as_system(_load_system(cfg.input_path))
    return khintchine_witness(sys_, k1=cfg.k1, seed=cfg.seed).to_dict()


def _generate(cfg):
    base = None
    if cfg.input_path:
        data = json.loads(_read(cfg.input_path))
        if isinstance(data, dict) and "kind" in data:
            spec = GeneratorSpec.from_dict(data)
            return generate(spec).to_dict()
        base = _as_system(fr.MultiplierSystem.from_dict(data) if isinstance(data, dict) and "x" in data
                          else fr.Frame.from_dict(data))
    kind = cfg.kind or ("replicated" if base is not None else None)
    if kind is None:
        raise UsageError("generate needs --kind")
    n = cfg.n if cfg.n is not None else (base.n if base is not None else None)
    spec = GeneratorSpec(kind=kind, n=n, m=cfg.m, seed=cfg.seed, scale=cfg.scale, k=cfg.k)
    return generate(spec, base).to_dict()


def _verify(cfg):
    names = THEOREMS if cfg.suite == "all" else (cfg.suite,)
    tol = cfg.tol or 1e-8
    if cfg.input_path:
        sys_ = _as_system(_load_system(cfg.input_path))
        reports = [run_check(t, sys_, k1=cfg.k1, tol=tol, trials=cfg.trials, seed=cfg.seed)
                   for t in names]
    else:
        seeds = cfg.seeds or [cfg.seed]
        reports = run_suite(names, seeds, k1=cfg.k1, tol=tol, trials=cfg.trials)
    return [r.to_dict() for r in reports]


HANDLERS = {
    "analyze": _analyze,
    "constant": _constant,
    "split": _split,
    "witness": _witness,
    "generate": _generate,
    "verify": _verify,
}


def _flatten(prefix, value, rows):
    if isinstance(value, dict):
        for key, val in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), val, rows)
    elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
        for i, val in enumerate(value):
            _flatten(f"{prefix}[{i}]", val, rows)
    else:
        rows.append((prefix, value))


def format_table(result):
    if isinstance(result, list) and result and isinstance(result[0], dict) and "theorem_id" in result[0]:
        head = f"{'theorem':<26} {'status':<12} {'lhs':>14} {'rhs':>14} {'margin':>12}"
        lines = [head, "-" * len(head)]
        for r in result:
            lines.append(f"{r['theorem_id']:<26} {r['status']:<12} {r['lhs']:>14.8g} "
                         f"{r['rhs']:>14.8g} {r['margin']:>12.4g}")
        return "\n".join(lines)
    rows = []
    _flatten("", result, rows)
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def run(cfg: RunConfig):
    """Execute a validated config; return (exit code, output text)."""
    cfg.validate()
    result = HANDLERS[cfg.command](cfg)
    if cfg.format == "table":
        text = format_table(result)
    else:
        text = json.dumps(result, indent=1, default=_jsonable)
    code = 0
    if cfg.command == "verify" and any(r["status"] == "fail" for r in result):
        code = EXIT_FAIL
    return code, text


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__})
    try:
        code, text = run(cfg)
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
              file=sys.stderr)
        return EXIT_INPUT
    except (SchemaError, UsageError, PreconditionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (NumericalError, SearchFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
