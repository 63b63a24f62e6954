"""Command-line experiment runner.

Exit codes: 0 success, 1 validation error, 2 runtime error, 3 a property
suite failed.  Settings come from an optional flat config file
(``--config``); flags given on the command line win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from mobnil import __version__
from mobnil.config import FORMATS, RunConfig, load_config
from mobnil.errors import MobnilError, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME, EXIT_SUITE = 0, 1, 2, 3


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- argument helpers -------------------------------------------------------------

def _floats(text: str, count: int | None = None, flag: str = "") -> tuple:
    try:
        vals = tuple(float(eval_real(v)) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"{flag} expects {count} comma-separated numbers, got {len(vals)}")
    return vals


def eval_real(text: str) -> float:
    """A float, or sqrt(k) / sqrt(k)-m / p/q shorthands for the usual test values."""
    t = text.strip().replace(" ", "")
    if t.startswith("sqrt(") and ")" in t:
        k, rest = t[5:].split(")", 1)
        base = math.sqrt(float(k))
        return base + (float(rest) if rest else 0.0)
    if "/" in t:
        p, q = t.split("/", 1)
        return float(p) / float(q)
    return float(t)


def _ints(text: str, flag: str) -> list:
    try:
        return [int(float(v)) if "e" in v.lower() else int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat 'key = value' config file")
    p.add_argument("--threads", help="worker threads (integer or 'auto')")
    p.add_argument("--seed", type=int, help="64-bit seed for sampled checks")
    p.add_argument("--format", choices=FORMATS, dest="output_format")
    p.add_argument("--cache", dest="cache_path", help="Möbius cache file (MBT1)")
    p.add_argument("--memory-cap", type=int, dest="memory_cap_bytes")
    p.add_argument("--out", help="output file (default: stdout)")


def _add_phase(p: argparse.ArgumentParser):
    p.add_argument("--kind", required=True,
                   choices=("linear", "quadratic", "bracket", "periodic", "character", "nilseq", "tabulated"))
    p.add_argument("--alpha", type=eval_real)
    p.add_argument("--beta", type=eval_real)
    p.add_argument("--gamma", type=eval_real)
    p.add_argument("--q", type=int)
    p.add_argument("--index", type=int, help="character index (default: every character)")
    p.add_argument("--table", help="periodic values f(0),...,f(q-1), complex allowed (e.g. 1,-1,0.5j)")
    p.add_argument("--g", help="Heisenberg generator a1,a2,a3")
    p.add_argument("--x", help="starting point x1,x2,x3")
    p.add_argument("--f", default="bump3", help="F descriptor for nilseq")
    p.add_argument("--phase-csv", help="tabulated phase as 'n,phi' CSV")


def _config(args) -> RunConfig:
    cfg = load_config(getattr(args, "config", None))
    threads = getattr(args, "threads", None)
    if threads is not None and threads != "auto":
        try:
            threads = int(threads)
        except ValueError:
            raise UsageError("--threads expects an integer or 'auto'") from None
    return cfg.with_overrides(thread_count=threads, seed=getattr(args, "seed", None),
                              output_format=getattr(args, "output_format", None),
                              cache_path=getattr(args, "cache_path", None),
                              memory_cap_bytes=getattr(args, "memory_cap_bytes", None))


def phase_from_args(args):
    from mobnil.correlate import PhaseSpec
    from mobnil.phases.local import TabulatedPhase

    k = args.kind

    def need(*names):
        for n in names:
            if getattr(args, n.replace("-", "_")) is None:
                raise UsageError(f"--kind {k} requires --{n}")

    if k == "linear":
        need("alpha")
        return PhaseSpec(k, alpha=args.alpha)
    if k == "quadratic":
        need("alpha")
        return PhaseSpec(k, alpha=args.alpha, beta=args.beta or 0.0, gamma=args.gamma or 0.0)
    if k == "bracket":
        need("alpha", "beta")
        return PhaseSpec(k, alpha=args.alpha, beta=args.beta)
    if k == "periodic":
        need("table")
        try:
            table = tuple(complex(v.strip()) for v in args.table.split(","))
        except ValueError:
            raise UsageError(f"--table expects comma-separated numbers, got {args.table!r}") from None
        if args.q is not None and args.q != len(table):
            raise UsageError(f"--q {args.q} does not match the {len(table)} table entries")
        return PhaseSpec(k, q=len(table), table=table)
    if k == "character":
        need("q")
        return PhaseSpec(k, q=args.q, index=args.index)
    if k == "nilseq":
        need("g")
        x = _floats(args.x, 3, "--x") if args.x else (0.0, 0.0, 0.0)
        return PhaseSpec(k, g=_floats(args.g, 3, "--g"), x=x, F=args.f)
    need("phase-csv")
    phi = TabulatedPhase.from_csv(Path(args.phase_csv).read_text())
    return PhaseSpec(k, weight=lambda n: phi.contains(n).astype(np.float64), phase=phi)


def load_mobius(cfg: RunConfig, n_needed: int):
    """The cached table when it is long enough, otherwise a fresh sieve."""
    from mobnil import sieve
    if cfg.cache_path and Path(cfg.cache_path).exists():
        table = sieve.read_cache(cfg.cache_path)
        if table.n_max >= n_needed:
            return table
    return sieve.sieve_mobius(max(n_needed, 1), workers=cfg.thread_count, memory_cap=cfg.memory_cap_bytes)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(v):
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, complex):
        return [v.real, v.imag]
    raise TypeError(type(v).__name__)


# --- subcommands --------------------------------------------------------------------

def cmd_sieve(args, cfg: RunConfig) -> int:
    from mobnil import sieve
    out = args.out or cfg.cache_path
    if not out:
        raise UsageError("sieve needs --out or a cache_path in the config")
    t0 = time.perf_counter()
    table = sieve.sieve_mobius(args.n_max, args.strategy, cfg.thread_count, cfg.memory_cap_bytes)
    sieve.write_cache(table, out)
    summary = {"n_max": table.n_max, "path": str(out), "mertens": sieve.mertens(table, table.n_max)}
    if args.timing:
        summary["wall_s"] = time.perf_counter() - t0
    sys.stdout.write(_dumps(summary))
    return EXIT_OK


def cmd_corr(args, cfg: RunConfig) -> int:
    from mobnil import correlate
    n_list = _ints(args.n, "--n")
    if args.self_correlation:
        mob = load_mobius(cfg, 3 * max(n_list))
        fn = {"3term": correlate.self_correlation_3term,
              "parallelogram": correlate.self_correlation_parallelogram}[args.self_correlation]
        rows = []
        for N in sorted(n_list):
            t0 = time.perf_counter()
            rows.append(correlate.CorrelationRow(N, complex(fn(mob, N, truncate=cfg.truncate_shifts)),
                                                 time.perf_counter() - t0))
        spec = correlate.PhaseSpec("linear")
        report = correlate.CorrelationReport(spec, rows, None)
        body = report.to_dict(args.timing)
        body["phase"] = {"kind": "self_" + args.self_correlation, "truncate_shifts": cfg.truncate_shifts}
        text = report.to_csv(args.timing) if cfg.output_format == "csv" else _dumps(body)
        _emit(text, args.out)
        return EXIT_OK
    if args.kind is None:
        raise UsageError("corr requires --kind (or --self-correlation)")
    spec = phase_from_args(args)
    mob = load_mobius(cfg, max(n_list))
    report = correlate.correlate(mob, spec, n_list, cfg.thread_count)
    if cfg.output_format == "csv":
        # with every character requested, rows for one N follow the character index order
        text = report.to_csv(args.timing)
    else:
        text = report.to_json(args.timing) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_vaughan(args, cfg: RunConfig) -> int:
    from mobnil import vaughan
    from mobnil.correlate import phase_values
    spec = phase_from_args(args)
    params = vaughan.VaughanParams(args.N, args.U, args.V)
    top = 16 * args.N if args.delta is not None else 2 * args.N
    mob = load_mobius(cfg, top)

    def f(n):
        return phase_values(spec, n)
    dec = vaughan.decompose(f, params, mob, cfg.thread_count)
    body = {"phase": spec.describe(), "N": params.N, "U": params.U, "V": params.V,
            "decomposition": dec.to_dict()}
    if args.delta is not None:
        body["dichotomy"] = vaughan.inverse_dichotomy(f, params, mob, args.delta).to_dict()
    _emit(_dumps(body), args.out)
    return EXIT_OK


def cmd_nilflow(args, cfg: RunConfig) -> int:
    from mobnil.nilflow import heis_orbit
    from mobnil.numerics import fmt17
    g = _floats(args.g, 3, "--g")
    x = _floats(args.x, 3, "--x") if args.x else (0.0, 0.0, 0.0)
    if args.count < 1:
        raise UsageError("--count must be positive")
    n = np.arange(args.start, args.start + args.count, dtype=np.int64)
    u1, u2, u3 = heis_orbit(g, n, x)
    if cfg.output_format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "u1", "u2", "u3"])
        for row in zip(n.tolist(), u1, u2, u3):
            w.writerow([row[0], *(fmt17(v) for v in row[1:])])
        text = buf.getvalue()
    else:
        text = _dumps({"g": list(g), "x": list(x), "n": n.tolist(),
                       "u1": u1.tolist(), "u2": u2.tolist(), "u3": u3.tolist()})
    _emit(text, args.out)
    return EXIT_OK


def cmd_bohr(args, cfg: RunConfig) -> int:
    from mobnil.phases.bohr import BohrSetSpec, bohr_enumerate, bohr_property_report
    g = _floats(args.g, None, "--g")
    window = tuple(_ints(args.window, "--window")) if args.window else None
    if window is not None and len(window) != 2:
        raise UsageError("--window expects lo,hi")
    spec = BohrSetSpec(g, args.N, args.n0, args.rho, window)
    members = bohr_enumerate(spec)
    rep = bohr_property_report(spec, args.d)
    body = {"g": list(g), "N": args.N, "n0": args.n0, "rho": args.rho, "size": int(members.size),
            "report": {k: getattr(rep, k) for k in rep.__dataclass_fields__}, "holds": rep.holds}
    if args.members:
        body["members"] = members.tolist()
    _emit(_dumps(body), args.out)
    return EXIT_OK


def cmd_decompose(args, cfg: RunConfig) -> int:
    from mobnil.phases.decompose import heis_decompose
    g = _floats(args.g, 3, "--g")
    dec = heis_decompose(args.f, g, args.N, args.eps, seed=cfg.seed, check_budget=args.check_budget)
    _emit(_dumps(dec.to_dict()), args.out)
    return EXIT_OK


def cmd_check(args, cfg: RunConfig) -> int:
    from mobnil.checks import run_suite
    reports = run_suite(args.suite, cfg.seed)
    body = {"suite": args.suite, "passed": all(r.passed for r in reports),
            "suites": [r.to_dict(args.timing) for r in reports]}
    _emit(_dumps(body), args.out)
    return EXIT_OK if body["passed"] else EXIT_SUITE


# --- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="mobnil", description="Möbius correlation workbench")
    top.add_argument("--version", action="version", version=f"mobnil {__version__}")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sieve", help="sieve mu and write the binary cache")
    _add_common(p)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--strategy", choices=("segmented", "spf"), default="segmented")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(run=cmd_sieve)

    p = sub.add_parser("corr", help="correlations of mu with a test sequence")
    _add_common(p)
    _add_phase(p)
    p._option_string_actions["--kind"].required = False
    p.add_argument("--n", required=True, help="comma-separated list of N")
    p.add_argument("--self-correlation", choices=("3term", "parallelogram"))
    p.add_argument("--timing", action="store_true", help="fill the seconds column")
    p.set_defaults(run=cmd_corr)

    p = sub.add_parser("vaughan", help="Type I / Type II decomposition and dichotomy")
    _add_common(p)
    _add_phase(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--U", type=int)
    p.add_argument("--V", type=int)
    p.add_argument("--delta", type=float, help="also run the Type I / Type II dichotomy")
    p.set_defaults(run=cmd_vaughan)

    p = sub.add_parser("nilflow", help="Heisenberg orbit in the fundamental domain")
    _add_common(p)
    p.add_argument("--g", required=True)
    p.add_argument("--x")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p.set_defaults(run=cmd_nilflow)

    p = sub.add_parser("bohr", help="Bohr set enumeration and size statistics")
    _add_common(p)
    p.add_argument("--g", required=True, help="frequencies g1,...,gk")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--n0", type=int, default=0)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--window", help="lo,hi scan window")
    p.add_argument("--members", action="store_true")
    p.set_defaults(run=cmd_bohr)

    p = sub.add_parser("decompose", help="nilsequence to locally quadratic pieces")
    _add_common(p)
    p.add_argument("--g", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--f", default="bump3")
    p.add_argument("--check-budget", type=int, default=2000)
    p.set_defaults(run=cmd_decompose)

    p = sub.add_parser("check", help="run a property suite")
    _add_common(p)
    p.add_argument("--suite", default="all")
    p.add_argument("--timing", action="store_true")
    p.set_defaults(run=cmd_check)
    return top


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
        return args.run(args, cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (MobnilError, OSError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
