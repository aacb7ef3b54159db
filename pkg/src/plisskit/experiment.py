"""End-to-end scans: Birkhoff estimates of mu(Delta_i), mu(CP) and class counts.

The reference measure is whatever Lebesgue-generic orbits equidistribute to;
starting points come from a seeded jittered grid.  Along each orbit the
indicator of every Delta_i is evaluated at orbit indices ``window <= k <
orbit_length - horizon`` and the time averages are pooled over samples.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .cocycle import DEFAULT_WINDOW, LyapunovEstimate, OrbitSegment, ftle_on_segment
from .cp import (
    DEFAULT_HORIZON,
    EPS_CMP,
    CPConstants,
    SchedulerInput,
    angle_bound,
    check_hypothesis,
    delta_lower_bound,
    schedule_constants,
    segment_flags,
)
from .errors import NotConverged, OrbitTooShort, ReportIOError
from .maps import MapBounds, MapDescriptor, estimate_bounds, orbit, torus_distance

log = logging.getLogger(__name__)

REPORT_KEYS = (
    "bounds", "constants", "mu_delta", "mu_cp", "paper_lower_bound",
    "hypothesis_ok", "cluster_count", "config",
)
CSV_COLUMNS = (
    "sample_id", "x0", "y0", "lambda_u", "lambda_s", "residual",
    "d1", "d2", "d3", "d4", "d5", "cp", "cos_angle",
)


@dataclass(frozen=True)
class ScanConfig:
    map: MapDescriptor
    samples: int = 100
    orbit_length: int = 10_000
    window: int = DEFAULT_WINDOW
    horizon: int = DEFAULT_HORIZON
    t: float = 0.96
    s: Optional[float] = None
    delta: float = 0.1
    seed: int = 0
    grid_density: int = 512
    cluster_points: int = 2000

    def __post_init__(self):
        if self.samples < 0:
            raise ValueError("samples must be non-negative")
        if self.orbit_length < self.window + self.horizon + 1:
            raise OrbitTooShort(
                f"orbit_length={self.orbit_length} leaves no fully windowed index "
                f"(window={self.window}, horizon={self.horizon})"
            )
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    def to_dict(self) -> dict:
        return {
            "map": self.map.to_dict(),
            "samples": self.samples,
            "orbit_length": self.orbit_length,
            "window": self.window,
            "horizon": self.horizon,
            "t": self.t,
            "s": "auto" if self.s is None else self.s,
            "delta": self.delta,
            "seed": self.seed,
            "grid_density": self.grid_density,
            "cluster_points": self.cluster_points,
            "sampling": "jittered uniform grid (Lebesgue)",
        }


@dataclass
class SampleRecord:
    sample_id: int
    x0: float
    y0: float
    lyapunov: LyapunovEstimate
    halves: tuple
    flags: tuple  # d1..d5 at the starting point
    cp: bool
    cos_angle: float
    counts: np.ndarray  # hits of Delta_1..Delta_5 and CP over the evaluated indices
    n_evaluated: int
    angle_checked: int
    angle_violations: int
    max_cos_checked: float
    cluster_candidates: np.ndarray = field(repr=False)


@dataclass
class CPScanReport:
    config: ScanConfig
    bounds: MapBounds
    consts: CPConstants
    mu_delta: tuple
    mu_cp: float
    paper_lower_bound: float
    hypothesis_ok: bool
    cluster_count: int
    samples: list
    lyapunov: Optional[LyapunovEstimate] = None

    @property
    def angle_checked(self) -> int:
        return sum(r.angle_checked for r in self.samples)

    @property
    def angle_violations(self) -> int:
        return sum(r.angle_violations for r in self.samples)

    @property
    def max_cos_checked(self) -> float:
        return max((r.max_cos_checked for r in self.samples), default=0.0)

    def to_dict(self) -> dict:
        return {
            "bounds": self.bounds.to_dict(),
            "constants": self.consts.to_dict(self.config.horizon),
            "mu_delta": [float(m) for m in self.mu_delta],
            "mu_cp": float(self.mu_cp),
            "paper_lower_bound": float(self.paper_lower_bound),
            "hypothesis_ok": bool(self.hypothesis_ok),
            "cluster_count": int(self.cluster_count),
            "config": self.config.to_dict(),
        }

    def summary_line(self) -> str:
        hyp = "ok" if self.hypothesis_ok else "fail"
        def fmt(v):
            return np.format_float_positional(v, precision=6, unique=True, trim="0")

        return (
            f"mu_cp={fmt(self.mu_cp)} bound={fmt(self.paper_lower_bound)} "
            f"hypothesis={hyp} clusters={self.cluster_count}"
        )


# ---------------------------------------------------------------------------
# Birkhoff averages
# ---------------------------------------------------------------------------

def birkhoff_measure(
    fmap: MapDescriptor,
    p,
    orbit_length: int,
    predicate: Callable[[np.ndarray], np.ndarray],
    window: int = DEFAULT_WINDOW,
    horizon: int = DEFAULT_HORIZON,
) -> float:
    """Fraction of ``f^k p``, ``window <= k < orbit_length - horizon``, where ``predicate`` holds.

    ``predicate`` receives the evaluated orbit points as one ``(K, 2)`` array
    (consecutive iterates) and returns K booleans.
    """
    if orbit_length - horizon - window < 1:
        raise OrbitTooShort(
            f"orbit_length={orbit_length} leaves no index with a full window ({window}) and horizon ({horizon})"
        )
    pts = orbit(fmap, p, orbit_length - 1)[window:orbit_length - horizon]
    hits = np.asarray(predicate(pts), dtype=bool)
    if hits.shape != (len(pts),):
        raise ValueError("predicate must return one boolean per orbit point")
    return float(hits.mean())


# ---------------------------------------------------------------------------
# clustering
# ---------------------------------------------------------------------------

def cluster_cp_points(points, delta: float) -> int:
    """Connected components of the graph joining points at toroidal distance < delta."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n == 0:
        return 0
    # scipy is slow to import and only needed here
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components
    from scipy.spatial import cKDTree

    tree = cKDTree(pts, boxsize=1.0)
    pairs = tree.query_pairs(r=delta, output_type="ndarray")
    if len(pairs):
        pairs = pairs[torus_distance(pts[pairs[:, 0]], pts[pairs[:, 1]]) < delta]
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    count, _ = connected_components(graph, directed=False)
    return int(count)


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

def sample_points(samples: int, seed: int) -> np.ndarray:
    """One uniform point per cell of a ceil(sqrt(samples))-sided grid, row by row."""
    if samples == 0:
        return np.zeros((0, 2))
    g = math.isqrt(samples - 1) + 1
    rng = np.random.default_rng(seed)
    jitter = rng.random((samples, 2))
    cells = np.arange(samples)
    pts = np.stack([(cells % g + jitter[:, 0]) / g, (cells // g + jitter[:, 1]) / g], axis=-1)
    return np.where(pts >= 1.0, 0.0, pts)


def _cluster_stride(config: ScanConfig) -> int:
    evaluated = config.orbit_length - config.horizon - config.window
    return max(1, math.ceil(config.samples * evaluated / max(config.cluster_points, 1)))


def analyze_sample(sample_id: int, p0, config: ScanConfig, consts: CPConstants) -> SampleRecord:
    w, H, L = config.window, config.horizon, config.orbit_length
    pad = w + H + 2
    seg = OrbitSegment.build(config.map, p0, forward=L + pad, backward=pad)
    est, halves = ftle_on_segment(seg, L, burn_in=w)
    flags = segment_flags(seg, consts, seg.offset + np.arange(L), H, w)

    stacked = flags.stacked
    cp = flags.cp
    ev = slice(w, L - H)
    counts = np.append(stacked[:, ev].sum(axis=1), cp[ev].sum())

    pre = flags.d1[ev] & flags.d3_next[ev]
    cos_pre = flags.cos_angle[ev][pre]
    bound = angle_bound(consts.sigma, consts.beta)
    violations = int(np.count_nonzero(~(cos_pre <= bound + EPS_CMP)))

    k_ev = np.arange(w, L - H)[::_cluster_stride(config)]
    candidates = seg.points[seg.offset + k_ev[cp[k_ev]]]

    return SampleRecord(
        sample_id=sample_id,
        x0=float(p0[0]),
        y0=float(p0[1]),
        lyapunov=est,
        halves=halves,
        flags=tuple(bool(v) for v in stacked[:, 0]),
        cp=bool(cp[0]),
        cos_angle=float(flags.cos_angle[0]),
        counts=counts,
        n_evaluated=L - H - w,
        angle_checked=int(pre.sum()),
        angle_violations=violations,
        max_cos_checked=float(cos_pre.max()) if cos_pre.size else 0.0,
        cluster_candidates=candidates,
    )


def pooled_lyapunov(records: Sequence[SampleRecord]) -> Optional[LyapunovEstimate]:
    """Sample-mean exponents; the residual compares pooled first and second halves."""
    if not records:
        return None
    h = np.array([r.halves for r in records])
    lu = float(np.mean([r.lyapunov.lambda_u for r in records]))
    ls = float(np.mean([r.lyapunov.lambda_s for r in records]))
    m = h.mean(axis=0)
    residual = float(max(abs(m[0] - m[2]), abs(m[1] - m[3])))
    return LyapunovEstimate(lu, ls, records[0].lyapunov.n, residual)


def assemble_report(
    config: ScanConfig,
    bounds: MapBounds,
    consts: CPConstants,
    records: Sequence[SampleRecord],
) -> CPScanReport:
    records = sorted(records, key=lambda r: r.sample_id)
    total = sum(r.n_evaluated for r in records)
    if total:
        counts = np.sum([r.counts for r in records], axis=0)
        mu = counts / total
        mu_delta = tuple(float(v) for v in mu[:5])
        mu_cp = float(mu[5])
    else:
        mu_delta, mu_cp = (0.0,) * 5, 0.0

    lyap = pooled_lyapunov(records)
    hypothesis_ok = False
    if lyap is not None:
        try:
            hypothesis_ok = check_hypothesis(lyap, bounds, iterate=config.map.N)
        except NotConverged as exc:
            log.warning("hypothesis not decided: %s", exc)

    if records:
        cand = np.concatenate([r.cluster_candidates for r in records])
    else:
        cand = np.zeros((0, 2))
    clusters = cluster_cp_points(cand, config.delta)
    return CPScanReport(
        config=config,
        bounds=bounds,
        consts=consts,
        mu_delta=mu_delta,
        mu_cp=mu_cp,
        paper_lower_bound=delta_lower_bound(consts.t, consts.s),
        hypothesis_ok=bool(hypothesis_ok),
        cluster_count=clusters,
        samples=list(records),
        lyapunov=lyap,
    )


def run_scan(config: ScanConfig, threads: int = 1) -> CPScanReport:
    """Bounds, constants, per-sample orbit flags and the pooled report.

    Samples are independent; with ``threads > 1`` they run on a thread pool and
    are merged by sample index, so the result does not depend on scheduling.
    """
    bounds = estimate_bounds(config.map, config.grid_density)
    consts = schedule_constants(SchedulerInput(config.t, config.s, bounds, config.map.N))
    starts = sample_points(config.samples, config.seed)
    log.info("scan %s: %d samples x %d steps", config.map.name, config.samples, config.orbit_length)

    def work(i):
        return analyze_sample(i, starts[i], config, consts)

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(work, range(len(starts))))
    else:
        records = [work(i) for i in range(len(starts))]
    return assemble_report(config, bounds, consts, records)


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def report_json(report: CPScanReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def _flag(v: bool) -> int:
    return 1 if v else 0


def write_report(report: CPScanReport, path) -> tuple:
    """Write ``report.json`` and ``samples.csv`` into directory ``path``."""
    out = Path(path)
    json_path, csv_path = out / "report.json", out / "samples.csv"
    try:
        out.mkdir(parents=True, exist_ok=True)
        json_path.write_text(report_json(report), encoding="utf-8")
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for r in report.samples:
                writer.writerow([
                    r.sample_id, repr(r.x0), repr(r.y0),
                    repr(r.lyapunov.lambda_u), repr(r.lyapunov.lambda_s), repr(r.lyapunov.residual),
                    *[_flag(v) for v in r.flags], _flag(r.cp), repr(r.cos_angle),
                ])
    except OSError as exc:
        raise ReportIOError(f"cannot write report to {out}: {exc}") from exc
    return json_path, csv_path


def load_report(path) -> dict:
    """Read a report back; ``path`` is the run directory or the JSON file itself."""
    p = Path(path)
    if p.is_dir():
        p = p / "report.json"
    try:
        with open(p, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ReportIOError(f"cannot read report {p}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ReportIOError(f"{p} is not valid JSON: {exc}") from exc


def default_threads() -> int:
    env = os.environ.get("PLISSKIT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
