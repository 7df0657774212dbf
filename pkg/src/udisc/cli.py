"""Command-line interface: ``udisc {psp,sweep,limits,asp,verify}``.

Exit codes: 0 success, 2 usage, 3 degenerate input, 4 resource limit,
5 verification failure.  Output is UTF-8 with LF line endings; JSON keys keep
a fixed order and CSV always starts with a header row.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .discriminator import (
    CopyConfig,
    DegeneratePriorError,
    Overlap,
    Priors,
    asp_monte_carlo,
    limit_data_infinite,
    limit_program_infinite,
    psp,
    psp_components,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_RESOURCE = 4
EXIT_VERIFY = 5

MAX_GRID_POINTS = 10**6
SWEEP_COLUMNS = ("s", "beta", "eta1", "a", "b", "c", "total")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunSpec:
    command: str
    config: CopyConfig
    priors: Priors
    overlap: Overlap | None = None
    s_grid: list | None = None
    beta_grid: list | None = None
    eta_grid: list | None = None
    samples: int = 10_000
    seed: int = 0
    fmt: str = "json"
    precision: int = 12
    max_copies: int = 14


# --------------------------------------------------------------------------
# formatting


def _round(x, digits: int):
    if x is None:
        return None
    if isinstance(x, float):
        if not math.isfinite(x):
            return None
        return float(f"{x:.{digits}g}")
    return x


def _rounded(obj, digits: int):
    if isinstance(obj, dict):
        return {k: _rounded(v, digits) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_rounded(v, digits) for v in obj]
    return _round(obj, digits)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else v for v in r])
    return buf.getvalue()


def _config_record(config: CopyConfig) -> dict:
    return {
        "n_A": config.n_A,
        "n_B": config.n_B,
        "n_C": config.n_C,
        "d": config.d,
        "swapped": config.swapped,
    }


def _priors_record(p: Priors) -> dict:
    return {"eta1": p.eta1, "eta2": p.eta2}


def breakdown_record(bd) -> dict:
    return {
        "command": "psp",
        "config": _config_record(bd.config),
        "priors": _priors_record(bd.priors),
        "overlap": {"s": bd.overlap.s, "beta": bd.overlap.beta},
        "coeff_a": bd.coeff_a,
        "coeff_b": bd.coeff_b,
        "coeff_c": bd.coeff_c,
        "blocks": [
            {
                "k": b.k,
                "diagram": [b.diagram.row1, b.diagram.row2],
                "dim_block": b.dim_block,
                "overlap_O": b.overlap_O,
                "q1": b.q1,
                "q2": b.q2,
                "regime": b.regime.value,
            }
            for b in bd.blocks
        ],
        "per_block": [
            {"k": t.k, "side": t.side, "contribution": t.contribution} for t in bd.per_block
        ],
        "total": bd.total,
    }


# --------------------------------------------------------------------------
# commands


def run_psp(spec: RunSpec) -> str:
    bd = psp(spec.config, spec.priors, spec.overlap)
    if spec.fmt == "csv":
        ov = spec.overlap
        row = [ov.s, ov.beta, spec.priors.eta1, bd.coeff_a, bd.coeff_b, bd.coeff_c, bd.total]
        return dump_csv(SWEEP_COLUMNS, [[_round(v, spec.precision) for v in row]])
    return dump_json(_rounded(breakdown_record(bd), spec.precision))


def sweep_rows(spec: RunSpec) -> list[list]:
    """Rows ``(s, beta, eta1, a, b, c, total)``, s-major then eta1."""
    if spec.s_grid is not None:
        overlaps = [Overlap.from_s(s) for s in spec.s_grid]
    else:
        overlaps = [Overlap.from_beta(b) for b in spec.beta_grid]
    etas = spec.eta_grid if spec.eta_grid is not None else [spec.priors.eta1]
    if len(overlaps) * len(etas) > MAX_GRID_POINTS:
        raise CliError(
            f"grid of {len(overlaps) * len(etas)} points exceeds {MAX_GRID_POINTS}", EXIT_RESOURCE
        )
    cos2 = np.array([o.cos2 for o in overlaps])
    sin2 = np.array([o.sin2 for o in overlaps])
    cfg = spec.config
    table = {}
    for eta in etas:
        pr = Priors(eta)
        if pr.degenerate:
            raise CliError(f"degenerate prior eta1={eta}", EXIT_DEGENERATE)
        side1, side2, outer = psp_components(cfg, pr, cos2, sin2)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            a = side1 / sin2**cfg.n_C
            b = side2 / sin2**cfg.n2
            c = outer / sin2**cfg.n2
        total = np.clip(side1 + side2 + outer, 0.0, 1.0)
        table[eta] = (a, b, c, total)
    rows = []
    for i, ov in enumerate(overlaps):
        for eta in etas:
            a, b, c, total = table[eta]
            vals = [a[i], b[i], c[i]]
            vals = [float(v) if (sin2[i] > 0.0 and math.isfinite(v)) else None for v in vals]
            rows.append([ov.s, ov.beta, eta, *vals, float(total[i])])
    return rows


def run_sweep(spec: RunSpec) -> str:
    rows = [[_round(v, spec.precision) for v in r] for r in sweep_rows(spec)]
    if spec.fmt == "csv":
        return dump_csv(SWEEP_COLUMNS, rows)
    record = {
        "command": "sweep",
        "config": _config_record(spec.config),
        "columns": list(SWEEP_COLUMNS),
        "rows": rows,
    }
    return dump_json(record)


def run_limits(spec: RunSpec) -> str:
    cfg = spec.config
    if cfg.n_A != cfg.n_C:
        raise CliError("limits needs equal program registers (--na == --nc)", EXIT_USAGE)
    m, n = cfg.n_A, cfg.n_B
    ov = spec.overlap
    c2n = ov.cos2**n
    record = {
        "command": "limits",
        "m": m,
        "n": n,
        "priors": _priors_record(spec.priors),
        "overlap": {"s": ov.s, "beta": ov.beta},
        "psp": psp(cfg, spec.priors, ov).total,
        "data_limit": limit_data_infinite(m, ov),
        "program_limit": limit_program_infinite(n, spec.priors, ov),
        "program_limit_bounds": {"e": c2n / (1.0 + c2n), "f": 1.0 / (1.0 + c2n)},
    }
    record = _rounded(record, spec.precision)
    if spec.fmt == "csv":
        header = ("m", "n", "s", "beta", "eta1", "psp", "data_limit", "program_limit")
        row = [m, n, record["overlap"]["s"], record["overlap"]["beta"], record["priors"]["eta1"],
               record["psp"], record["data_limit"], record["program_limit"]]
        return dump_csv(header, [row])
    return dump_json(record)


def run_asp(spec: RunSpec) -> str:
    if spec.priors.degenerate:
        raise CliError(f"degenerate prior eta1={spec.priors.eta1}", EXIT_DEGENERATE)
    mean, stderr = asp_monte_carlo(spec.config, spec.priors, spec.samples, spec.seed)
    record = _rounded(
        {
            "command": "asp",
            "config": _config_record(spec.config),
            "priors": _priors_record(spec.priors),
            "samples": spec.samples,
            "seed": spec.seed,
            "mean": mean,
            "stderr": stderr,
        },
        spec.precision,
    )
    if spec.fmt == "csv":
        return dump_csv(("samples", "seed", "mean", "stderr"), [[spec.samples, spec.seed, record["mean"], record["stderr"]]])
    return dump_json(record)


def run_verify(spec: RunSpec) -> tuple[str, bool]:
    from .oracle import ResourceError, max_dim, verify_config

    cfg = spec.config
    if cfg.d != 2:
        raise CliError("the oracle runs with d = 2 only", EXIT_USAGE)
    if cfg.N > spec.max_copies or 2**cfg.N > max_dim():
        raise CliError(
            f"N = {cfg.N} exceeds the oracle cap (max copies {spec.max_copies}, max dim {max_dim()})",
            EXIT_RESOURCE,
        )
    canon = cfg.canonical_priors(spec.priors)
    try:
        checks = verify_config(cfg, canon, pairs=min(spec.samples, 50), seed=spec.seed)
    except ResourceError as exc:
        raise CliError(str(exc), EXIT_RESOURCE) from exc
    ok = all(c.passed for c in checks)
    if spec.fmt == "csv":
        rows = [[c.heading, c.name, "pass" if c.passed else "fail", _round(c.residual, spec.precision), c.tolerance] for c in checks]
        return dump_csv(("heading", "check", "status", "residual", "tolerance"), rows), ok
    record = {
        "command": "verify",
        "config": _config_record(cfg),
        "priors": _priors_record(spec.priors),
        "checks": [
            {
                "heading": c.heading,
                "name": c.name,
                "passed": c.passed,
                "residual": _round(c.residual, spec.precision),
                "tolerance": c.tolerance,
            }
            for c in checks
        ],
        "passed": ok,
    }
    return dump_json(record), ok


# --------------------------------------------------------------------------
# argument parsing


def parse_grid(text: str) -> list[float]:
    """``"start:stop:num"`` (inclusive linspace) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}, want start:stop:num")
        start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
        if num < 1:
            raise argparse.ArgumentTypeError("grid needs at least one point")
        return np.linspace(start, stop, num).tolist()
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_common(p: argparse.ArgumentParser, overlap: bool = True, grids: bool = False):
    p.add_argument("--na", type=int, required=True, help="copies in program register A")
    p.add_argument("--nb", type=int, required=True, help="copies in data register B")
    p.add_argument("--nc", type=int, required=True, help="copies in program register C")
    p.add_argument("-d", type=int, default=2, help="single-copy Hilbert dimension")
    p.add_argument("--eta1", type=float, default=0.5, help="prior of the first state")
    if overlap:
        g = p.add_mutually_exclusive_group(required=not grids)
        g.add_argument("--s", type=float, help="overlap |<phi1|phi2>| in [0, 1]")
        g.add_argument("--beta", type=float, help="overlap angle in [0, pi]")
    if grids:
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--s-grid", type=parse_grid, help="s values: start:stop:num or a,b,c")
        g.add_argument("--beta-grid", type=parse_grid, help="beta values: start:stop:num or a,b,c")
        p.add_argument("--eta-grid", type=parse_grid, help="eta1 values (default: --eta1)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--precision", type=int, default=12, help="significant digits")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udisc",
        description="Pure-state success probabilities of universal programmable unambiguous discriminators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("psp", help="success probability and its breakdown")
    _add_common(p)

    p = sub.add_parser("sweep", help="table over an overlap grid and a prior grid")
    _add_common(p, overlap=False, grids=True)

    p = sub.add_parser("limits", help="large-register limits next to the finite value")
    _add_common(p)

    p = sub.add_parser("asp", help="Monte-Carlo average over Haar-random states")
    _add_common(p, overlap=False)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("verify", help="brute-force oracle checks (qubits)")
    _add_common(p, overlap=False)
    p.add_argument("--samples", type=int, default=50, help="random Euler pairs (at most 50)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-copies", type=int, default=14)
    return parser


def spec_from_args(args: argparse.Namespace) -> RunSpec:
    config = CopyConfig(args.na, args.nb, args.nc, args.d)
    priors = Priors(args.eta1)
    overlap = None
    if getattr(args, "s", None) is not None:
        overlap = Overlap.from_s(args.s)
    elif getattr(args, "beta", None) is not None:
        overlap = Overlap.from_beta(args.beta)
    spec = RunSpec(
        command=args.command,
        config=config,
        priors=priors,
        overlap=overlap,
        s_grid=getattr(args, "s_grid", None),
        beta_grid=getattr(args, "beta_grid", None),
        eta_grid=getattr(args, "eta_grid", None),
        samples=getattr(args, "samples", 10_000),
        seed=getattr(args, "seed", 0),
        fmt=args.format,
        precision=args.precision,
        max_copies=getattr(args, "max_copies", 14),
    )
    for s in spec.s_grid or []:
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"s grid value {s} outside [0, 1]")
    for b in spec.beta_grid or []:
        if not 0.0 <= b <= math.pi:
            raise ValueError(f"beta grid value {b} outside [0, pi]")
    for e in spec.eta_grid or []:
        if not 0.0 <= e <= 1.0:
            raise ValueError(f"eta grid value {e} outside [0, 1]")
    if spec.precision < 1 or spec.precision > 17:
        raise ValueError("precision must be between 1 and 17")
    if spec.samples < 1:
        raise ValueError("samples must be positive")
    return spec


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = sys.stdout
    err = sys.stderr
    try:
        spec = spec_from_args(args)
    except ValueError as exc:
        parser.print_usage(err)
        err.write(f"udisc: error: {exc}\n")
        return EXIT_USAGE
    if spec.config.swapped:
        err.write("udisc: note: n_A < n_C, registers A and C swapped (priors exchanged accordingly)\n")
    if spec.priors.degenerate and not (spec.command == "sweep" and spec.eta_grid):
        err.write(f"udisc: error: degenerate prior eta1={spec.priors.eta1}\n")
        return EXIT_DEGENERATE
    try:
        if spec.command == "psp":
            text = run_psp(spec)
        elif spec.command == "sweep":
            text = run_sweep(spec)
        elif spec.command == "limits":
            text = run_limits(spec)
        elif spec.command == "asp":
            text = run_asp(spec)
        else:
            text, ok = run_verify(spec)
            out.write(text)
            return EXIT_OK if ok else EXIT_VERIFY
    except CliError as exc:
        err.write(f"udisc: error: {exc}\n")
        return exc.code
    except DegeneratePriorError as exc:
        err.write(f"udisc: error: {exc}\n")
        return EXIT_DEGENERATE
    out.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
