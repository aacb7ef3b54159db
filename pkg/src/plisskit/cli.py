"""Command-line front end.

Subcommands: ``exponents``, ``pliss``, ``constants``, ``cp-scan``, ``report-diff``.
Every subcommand accepts ``--config PATH``: a flat ``key = value`` file
(``#`` comments) whose keys are long flag names.  Precedence is
command-line flag > config file > built-in default.

Exit codes: 0 success, 1 semantic red flag, 2 usage, 3 map/domain error,
4 scheduler error, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cocycle import DEFAULT_WINDOW, ftle, oseledets_directions
from .cp import (
    DEFAULT_HORIZON,
    SchedulerInput,
    delta_lower_bound,
    s_interval,
    schedule_constants,
)
from .errors import (
    BadOrdering,
    DegenerateSplitting,
    EmptySequence,
    MapError,
    ReportIOError,
    SchedulerError,
)
from .experiment import (
    ScanConfig,
    default_threads,
    load_report,
    run_scan,
    sample_points,
    write_report,
)
from .maps import (
    MapDescriptor,
    arnold_cat,
    check_invertible,
    estimate_bounds,
    perturbed_cat,
    standard_map,
)
from .pliss import PlissParams, density_bound, pliss_times

EXIT_OK, EXIT_RED_FLAG, EXIT_USAGE, EXIT_MAP, EXIT_SCHED, EXIT_IO = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _at_least(k: int):
    def conv(text: str) -> int:
        v = _positive_int(text)
        if v < k:
            raise argparse.ArgumentTypeError(f"must be at least {k}, got {v}")
        return v
    return conv


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return v


def _s_value(text: str):
    return None if text.strip().lower() == "auto" else _finite(text)


def _add_map_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("map")
    g.add_argument("--map", choices=["cat", "pcat", "perturbed-cat", "std"], default="cat",
                   help="map family (default: cat)")
    g.add_argument("--eps", type=_finite, default=0.05, help="perturbed cat strength (default: 0.05)")
    g.add_argument("--K", type=_finite, default=1.5, help="standard map parameter (default: 1.5)")
    g.add_argument("--N", type=_positive_int, default=1, help="iterate power, the map is f^N (default: 1)")


def _map_from(args) -> MapDescriptor:
    if args.map == "cat":
        fmap = arnold_cat(args.N)
    elif args.map in ("pcat", "perturbed-cat"):
        fmap = perturbed_cat(args.eps, args.N)
    else:
        fmap = standard_map(args.K, args.N)
    check_invertible(fmap)
    return fmap


def build_parser() -> tuple:
    parser = argparse.ArgumentParser(
        prog="plisskit",
        description="Pliss times, CP-hyperbolic constants and Birkhoff scans on torus maps.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    subs = {}

    p = sub.add_parser("exponents", help="finite-time Lyapunov exponents at sampled points")
    _add_map_flags(p)
    p.add_argument("--n", type=_at_least(2), default=100_000, help="steps of f^N (default: 100000)")
    p.add_argument("--samples", type=_positive_int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=_at_least(2), default=DEFAULT_WINDOW,
                   help="window for the splitting check and frame burn-in")
    p.add_argument("--csv", metavar="PATH", help="also write the table as CSV")
    p.set_defaults(handler=cmd_exponents)
    subs["exponents"] = p

    p = sub.add_parser("pliss", help="Pliss times of a numeric sequence")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--seq", help="comma-separated values")
    src.add_argument("--file", help="file of whitespace/comma separated values")
    p.add_argument("--alpha3", type=_finite, required=False, help="threshold for forward averages")
    p.add_argument("--alpha1", type=_finite, help="lower bound on the terms (for the density bound)")
    p.add_argument("--alpha2", type=_finite, help="upper bound on the mean (for the density bound)")
    p.set_defaults(handler=cmd_pliss)
    subs["pliss"] = p

    p = sub.add_parser("constants", help="grid bounds and the CP constant schedule")
    _add_map_flags(p)
    p.add_argument("--t", type=_finite, default=0.96, help="19/20 < t < 1 (default: 0.96)")
    p.add_argument("--s", type=_s_value, default=None, help="s in the admissible interval, or 'auto'")
    p.add_argument("--grid", type=_at_least(2), default=512, help="grid density for alpha, beta")
    p.add_argument("--json", action="store_true", help="print JSON instead of text")
    p.set_defaults(handler=cmd_constants)
    subs["constants"] = p

    p = sub.add_parser("cp-scan", help="Birkhoff estimates of mu(Delta_i) and mu(CP)")
    _add_map_flags(p)
    p.add_argument("--t", type=_finite, default=0.96)
    p.add_argument("--s", type=_s_value, default=None)
    p.add_argument("--samples", type=_positive_int, default=100)
    p.add_argument("--orbit", type=_positive_int, default=10_000, help="orbit length per sample")
    p.add_argument("--window", type=_at_least(2), default=DEFAULT_WINDOW)
    p.add_argument("--H", type=_positive_int, default=DEFAULT_HORIZON, help="membership horizon")
    p.add_argument("--delta", type=_finite, default=0.1, help="clustering radius")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", type=_at_least(2), default=512)
    p.add_argument("--cluster-points", type=_positive_int, default=2000,
                   help="approximate cap on CP points fed to clustering")
    p.add_argument("--out", default="run", help="output directory (default: ./run)")
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="parallel samples (default: $PLISSKIT_THREADS or CPU count)")
    p.set_defaults(handler=cmd_cp_scan)
    subs["cp-scan"] = p

    p = sub.add_parser("report-diff", help="compare two report.json files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tol", type=_finite, default=0.0, help="absolute tolerance on numbers")
    p.set_defaults(handler=cmd_report_diff)
    subs["report-diff"] = p

    for sp in subs.values():
        sp.add_argument("--config", metavar="PATH", help="key = value file of defaults")
    return parser, subs


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

def read_config(path) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key] = value
    return values


def _config_argv(subparser: argparse.ArgumentParser, values: dict, path) -> list:
    out = []
    for key, value in values.items():
        opt = "--" + key
        action = subparser._option_string_actions.get(opt)
        if action is None or key == "config":
            raise UsageError(f"{path}: unknown key {key!r} for this subcommand")
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                out.append(opt)
            elif value.lower() not in ("0", "false", "no", "off"):
                raise UsageError(f"{path}: {key} expects true/false, got {value!r}")
        else:
            out.extend([opt, value])
    return out


def _expand_config(argv: list, subs: dict) -> list:
    """Splice config-file flags in front of the command-line flags (later flags win)."""
    if not argv or argv[0] not in subs:
        return argv
    cmd, rest = argv[0], argv[1:]
    path = None
    for i, tok in enumerate(rest):
        if tok == "--config" and i + 1 < len(rest):
            path = rest[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return argv
    try:
        values = read_config(path)
    except OSError as exc:
        raise ReportIOError(f"cannot read config {path}: {exc}") from exc
    return [cmd] + _config_argv(subs[cmd], values, path) + rest


def _config_echo(args, keys) -> str:
    lines = [f"# plisskit {args.command}"]
    for k in keys:
        v = getattr(args, k.replace("-", "_"))
        if v is None:
            v = "auto" if k == "s" else ""
            if v == "":
                continue
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_exponents(args) -> int:
    fmap = _map_from(args)
    pts = sample_points(args.samples, args.seed)
    rows = []
    print(f"# {fmap.name}  n={args.n}  samples={args.samples}")
    print(f"{'sample':>6} {'x0':>10} {'y0':>10} {'lambda_u':>14} {'lambda_s':>14} {'residual':>11}  splitting")
    for i, p in enumerate(pts):
        est = ftle(fmap, p, args.n, burn_in=args.window)
        try:
            oseledets_directions(fmap, p, args.window)
            split = "ok"
        except DegenerateSplitting:
            split = "DegenerateSplitting"
        rows.append((i, float(p[0]), float(p[1]), est.lambda_u, est.lambda_s, est.residual, split))
        print(f"{i:>6} {p[0]:>10.6f} {p[1]:>10.6f} {est.lambda_u:>14.10f} {est.lambda_s:>14.10f} "
              f"{est.residual:>11.3e}  {split}")
    lu = float(np.mean([r[3] for r in rows]))
    ls = float(np.mean([r[4] for r in rows]))
    print(f"mean lambda_u={lu:.10f} lambda_s={ls:.10f}")
    if args.csv:
        try:
            with open(args.csv, "w", encoding="utf-8") as fh:
                fh.write("sample_id,x0,y0,lambda_u,lambda_s,residual,splitting\n")
                for r in rows:
                    fh.write(",".join([str(r[0])] + [repr(v) for v in r[1:6]] + [r[6]]) + "\n")
        except OSError as exc:
            raise ReportIOError(f"cannot write {args.csv}: {exc}") from exc
    return EXIT_OK


def _read_sequence(args) -> np.ndarray:
    if args.seq is not None:
        text = args.seq
    elif args.file is not None:
        try:
            text = Path(args.file).read_text(encoding="utf-8")
        except OSError as exc:
            raise ReportIOError(f"cannot read {args.file}: {exc}") from exc
    else:
        raise UsageError("give the sequence with --seq or --file")
    tokens = text.replace(",", " ").split()
    try:
        return np.array([float(t) for t in tokens])
    except ValueError as exc:
        raise UsageError(f"sequence contains a non-number: {exc}")


def cmd_pliss(args) -> int:
    if args.alpha3 is None:
        raise UsageError("--alpha3 is required")
    seq = _read_sequence(args)
    times = pliss_times(seq, args.alpha3)
    print("times:", " ".join(str(int(k)) for k in times))
    print(f"count: {times.size} of {seq.size}")
    print(f"density: {times.size / seq.size:.6g}")
    if args.alpha1 is not None and args.alpha2 is not None:
        bound = density_bound(PlissParams(args.alpha1, args.alpha2, args.alpha3))
        print(f"bound: {bound:.6g}")
    return EXIT_OK


def cmd_constants(args) -> int:
    fmap = _map_from(args)
    bounds = estimate_bounds(fmap, args.grid)
    c = schedule_constants(SchedulerInput(args.t, args.s, bounds, fmap.N))
    lo, hi = s_interval(args.t)
    ratios = c.side_ratios()
    lower = delta_lower_bound(c.t, c.s)
    if args.json:
        doc = {
            "map": fmap.to_dict(),
            "bounds": bounds.to_dict(),
            "constants": c.to_dict(DEFAULT_HORIZON),
            "s_interval": [lo, hi],
            "side_ratios": list(ratios),
            "side_margins": list(c.side_margins),
            "paper_lower_bound": lower,
        }
        del doc["constants"]["H"]
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    print(f"map          {fmap.name}")
    print(f"alpha        {bounds.alpha:.10g}")
    print(f"beta         {bounds.beta:.10g}")
    print(f"r_estimate   {bounds.r_estimate:.10g}   (grid {bounds.grid_density}x{bounds.grid_density})")
    print(f"t            {c.t:g}")
    print(f"s interval   ({lo:.5f}, {hi:.5f})")
    print(f"s            {c.s:.7g}")
    print(f"delta_t      {c.delta_t:.7g}")
    print(f"sigma        {c.sigma:.5f}")
    print(f"sigma_t1     {c.sigma_t1:.5f}")
    print(f"sigma_t2     {c.sigma_t2:.5f}")
    print(f"rho          {c.rho:.5f}")
    print(f"rho_t1       {c.rho_t1:.5f}")
    print(f"rho_t2       {c.rho_t2:.5f}")
    print(f"eta          {c.eta:.5f}")
    for i, (r, m) in enumerate(zip(ratios, c.side_margins), 1):
        print(f"side {i}       sigma_t{i} rho_t{i} / (sigma rho) = {r:.5f} > sigma = {c.sigma:.5f}"
              f"   (log margin {m:.4g})")
    print(f"Delta bound  (t - st)/(1 - st) = {lower:.5f}")
    return EXIT_OK


SCAN_KEYS = ("map", "eps", "K", "N", "t", "s", "samples", "orbit", "window", "H",
             "delta", "seed", "grid", "cluster-points")


def cmd_cp_scan(args) -> int:
    fmap = _map_from(args)
    config = ScanConfig(
        map=fmap,
        samples=args.samples,
        orbit_length=args.orbit,
        window=args.window,
        horizon=args.H,
        t=args.t,
        s=args.s,
        delta=args.delta,
        seed=args.seed,
        grid_density=args.grid,
        cluster_points=args.cluster_points,
    )
    threads = args.threads if args.threads is not None else default_threads()
    report = run_scan(config, threads=threads)
    out = Path(args.out)
    write_report(report, out)
    try:
        (out / "config.txt").write_text(_config_echo(args, SCAN_KEYS), encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(f"cannot write {out / 'config.txt'}: {exc}") from exc
    print(report.summary_line())
    if report.hypothesis_ok and report.mu_cp == 0:
        return EXIT_RED_FLAG
    return EXIT_OK


def _flatten(d, prefix=""):
    out = {}
    if isinstance(d, dict):
        for k, v in d.items():
            out.update(_flatten(v, f"{prefix}{k}."))
    elif isinstance(d, list):
        for i, v in enumerate(d):
            out.update(_flatten(v, f"{prefix}{i}."))
    else:
        out[prefix[:-1]] = d
    return out


def cmd_report_diff(args) -> int:
    a, b = _flatten(load_report(args.a)), _flatten(load_report(args.b))
    diffs = []
    for key in sorted(set(a) | set(b)):
        va, vb = a.get(key, "<missing>"), b.get(key, "<missing>")
        numeric = all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (va, vb))
        if numeric:
            if abs(va - vb) > args.tol:
                diffs.append(f"{key}: {va!r} != {vb!r} (|diff|={abs(va - vb):.3g})")
        elif va != vb:
            diffs.append(f"{key}: {va!r} != {vb!r}")
    for line in diffs:
        print(line)
    if diffs:
        print(f"{len(diffs)} field(s) differ")
        return EXIT_RED_FLAG
    print("identical")
    return EXIT_OK


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        argv = _expand_config(argv, subs)
        args = parser.parse_args(argv)
        return args.handler(args)
    except SystemExit as exc:
        # argparse reports usage errors with status 2
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, EmptySequence, BadOrdering) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MapError, DegenerateSplitting) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MAP
    except SchedulerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHED
    except (ReportIOError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
