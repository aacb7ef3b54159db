"""CP-hyperbolic constants and finite-horizon membership tests.

The constant schedule: given ``alpha``, ``beta`` (bounds for ``f^N``) and
``19/20 < t < 1``, put ``delta_t = t max(-log alpha, log beta)``, pick ``s``
in ``(3/(4t), (5t - 4)/t)`` and set::

    sigma = exp(-s delta_t)     sigma_t1 = alpha       sigma_t2 = 1/beta
    rho   = exp(-2 s delta_t)   rho_t1 = rho_t2 = alpha/beta
    eta   = 1 - (1/sigma - sigma)^2 / (2 beta^2)

Membership of a point in Delta_1 .. Delta_5 is decided up to a horizon H,
comparing cumulative log-norms against ``n log(bound)`` with an absolute
slack ``EPS_CMP``.  The cat map sits exactly on the lower bounds, so the
slack is what keeps rounding from flipping those comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .cocycle import DEFAULT_WINDOW, DirectionPair, LyapunovEstimate, OrbitSegment
from .errors import (
    NotConverged,
    PreconditionNotMet,
    SideConditionViolated,
    SOutOfRange,
    TOutOfRange,
    TTooSmall,
)
from .maps import MapBounds, MapDescriptor

T_MIN = 19 / 20
EPS_CMP = 1e-9
DEFAULT_HORIZON = 64
MAX_RESIDUAL = 1e-3


def s_interval(t: float) -> tuple:
    """Open interval of admissible ``s``; nonempty exactly when ``t > 19/20``."""
    return 3.0 / (4.0 * t), (5.0 * t - 4.0) / t


def delta_lower_bound(t: float, s: float) -> float:
    """``(t - st) / (1 - st)``, the guaranteed measure of each Delta_i."""
    return (t - s * t) / (1.0 - s * t)


@dataclass(frozen=True)
class SchedulerInput:
    t: float
    s: Optional[float]  # None means Auto (interval midpoint)
    bounds: MapBounds
    N: int = 1


@dataclass(frozen=True)
class CPConstants:
    sigma: float
    sigma_t1: float
    sigma_t2: float
    rho: float
    rho_t1: float
    rho_t2: float
    eta: float
    delta_t: float
    s: float
    provenance: SchedulerInput
    side_margins: tuple  # log(sigma_ti rho_ti / (sigma rho)) - log(sigma), i = 1, 2

    @property
    def t(self) -> float:
        return self.provenance.t

    @property
    def beta(self) -> float:
        return self.provenance.bounds.beta

    def side_ratios(self) -> tuple:
        sr = self.sigma * self.rho
        return (self.sigma_t1 * self.rho_t1 / sr, self.sigma_t2 * self.rho_t2 / sr)

    def to_dict(self, H: int) -> dict:
        return {
            "t": self.t,
            "s": self.s,
            "delta_t": self.delta_t,
            "sigma": self.sigma,
            "rho": self.rho,
            "sigma_t1": self.sigma_t1,
            "sigma_t2": self.sigma_t2,
            "rho_t1": self.rho_t1,
            "rho_t2": self.rho_t2,
            "eta": self.eta,
            "N": self.provenance.N,
            "H": int(H),
        }


def schedule_constants(inp: SchedulerInput) -> CPConstants:
    t = float(inp.t)
    if not t > T_MIN:
        raise TTooSmall(f"t must exceed 19/20, got t={t!r}")
    if not t < 1.0:
        raise TOutOfRange(f"t must be below 1, got t={t!r}")
    lo, hi = s_interval(t)
    if inp.s is None:
        s = 0.5 * (lo + hi)
    else:
        s = float(inp.s)
        if not lo < s < hi:
            raise SOutOfRange(f"s must lie in ({lo:.6g}, {hi:.6g}) for t={t}, got s={s}")

    alpha, beta = inp.bounds.alpha, inp.bounds.beta
    log_a, log_b = math.log(alpha), math.log(beta)
    delta_t = t * max(-log_a, log_b)
    sigma = math.exp(-s * delta_t)
    rho = math.exp(-2.0 * s * delta_t)
    rho_t = alpha / beta
    eta = 1.0 - (1.0 / sigma - sigma) ** 2 / (2.0 * beta * beta)

    # log(sigma_ti rho_ti) - log(sigma rho) - log(sigma), with log(sigma rho sigma) = -4 s delta_t
    margins = (
        log_a + (log_a - log_b) + 4.0 * s * delta_t,
        -log_b + (log_a - log_b) + 4.0 * s * delta_t,
    )
    if not (margins[0] > 0 and margins[1] > 0):
        raise SideConditionViolated(
            f"sigma_ti rho_ti / (sigma rho) > sigma fails (log margins {margins[0]:.3g}, {margins[1]:.3g})"
        )
    if not 0.0 < eta < 1.0:
        raise SideConditionViolated(f"eta = {eta} is outside (0, 1)")

    return CPConstants(
        sigma=sigma,
        sigma_t1=alpha,
        sigma_t2=1.0 / beta,
        rho=rho,
        rho_t1=rho_t,
        rho_t2=rho_t,
        eta=eta,
        delta_t=delta_t,
        s=s,
        provenance=inp,
        side_margins=margins,
    )


def check_hypothesis(
    est: LyapunovEstimate,
    bounds: MapBounds,
    iterate: int = 1,
    max_residual: float = MAX_RESIDUAL,
) -> bool:
    """``min(lambda_u, -lambda_s) > (19/20) N r_estimate`` for exponents of ``f^N``.

    ``bounds.r_estimate`` is a per-step rate of ``f`` and the exponents are per
    step of ``f^N``, hence the factor ``iterate``.
    """
    if not est.residual < max_residual:
        raise NotConverged(
            f"half-window residual {est.residual:.3g} is not below {max_residual:g}; use a longer run"
        )
    return min(est.lambda_u, -est.lambda_s) > T_MIN * iterate * bounds.r_estimate


@dataclass(frozen=True)
class DeltaFlags:
    d1: bool
    d2: bool
    d3: bool
    d4: bool
    d5: bool
    horizon: int

    def as_tuple(self) -> tuple:
        return (self.d1, self.d2, self.d3, self.d4, self.d5)

    @property
    def all(self) -> bool:
        return all(self.as_tuple())


@dataclass
class OrbitFlags:
    """Per-orbit-index flags; ``d3_next[k]`` is Delta_3 at ``f^{k+1} p``."""

    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    d4: np.ndarray
    d5: np.ndarray
    d3_next: np.ndarray
    cos_angle: np.ndarray
    horizon: int

    @property
    def stacked(self) -> np.ndarray:
        return np.stack([self.d1, self.d2, self.d3, self.d4, self.d5])

    @property
    def cp(self) -> np.ndarray:
        """Delta_1 and ... and Delta_5 and f^-1(Delta_3)."""
        return self.stacked.all(axis=0) & self.d3_next

    def at(self, k: int) -> DeltaFlags:
        return DeltaFlags(
            bool(self.d1[k]), bool(self.d2[k]), bool(self.d3[k]),
            bool(self.d4[k]), bool(self.d5[k]), self.horizon,
        )


def _bounded_sums(seq: np.ndarray, idx: np.ndarray, step: int, H: int, lo: float, hi: float) -> np.ndarray:
    """For every start in ``idx``: ``n lo <= sum of n terms <= n hi`` for n = 1..H (with slack).

    Terms are read at ``idx, idx + step, ...``.  NaN terms make the flag false.
    """
    acc = np.zeros(idx.shape)
    ok = np.ones(idx.shape, dtype=bool)
    for n in range(1, H + 1):
        acc += seq[idx + step * (n - 1)]
        ok &= (acc <= n * hi + EPS_CMP) & (acc >= n * lo - EPS_CMP)
    return ok


def segment_flags(
    seg: OrbitSegment,
    consts: CPConstants,
    idx: np.ndarray,
    horizon: int = DEFAULT_HORIZON,
    window: int = DEFAULT_WINDOW,
    dirs: Optional[DirectionPair] = None,
) -> OrbitFlags:
    """Delta flags at segment indices ``idx``.

    Directions along the orbit are re-estimated at every point rather than
    transported, since forward transport of E drifts into the expanding
    direction within a few dozen steps.  ``dirs`` (if given) replaces the
    estimates at ``seg.offset``.
    """
    idx = np.asarray(idx, dtype=np.int64)
    E, degE = seg.stable_directions(window)
    F, degF = seg.unstable_directions(window)
    if dirs is not None:
        E, degE, F, degF = E.copy(), degE.copy(), F.copy(), degF.copy()
        E[seg.offset], F[seg.offset] = dirs.E, dirs.F
        degE[seg.offset] = degF[seg.offset] = False
    E = np.where(degE[:, None], np.nan, E)
    F = np.where(degF[:, None], np.nan, F)

    if idx.size and (idx.min() - horizon < 0 or idx.max() + horizon + 1 >= len(seg)):
        raise ValueError("segment padding too small for the horizon")

    wf = np.einsum("kij,kj->ki", seg.jf, E)
    wb = np.einsum("kij,kj->ki", seg.jb, F)
    a = np.log(np.hypot(wf[:, 0], wf[:, 1]))
    b = np.log(np.hypot(wb[:, 0], wb[:, 1]))

    log = math.log
    c = consts
    d1 = _bounded_sums(a, idx, 1, horizon, log(c.sigma_t1), log(c.sigma))
    d2 = _bounded_sums(2 * a - seg.logdet_f, idx, 1, horizon, log(c.rho_t1), log(c.rho))
    ext = np.append(idx, idx[-1] + 1) if idx.size else idx
    d3_ext = _bounded_sums(b, ext, -1, horizon, log(c.sigma_t2), log(c.sigma))
    d4 = _bounded_sums(2 * b - seg.logdet_b, idx, -1, horizon, log(c.rho_t2), log(c.rho))
    cos = np.abs(np.einsum("ki,ki->k", E[idx], F[idx]))
    d5 = cos <= c.eta + EPS_CMP
    d3 = d3_ext[:idx.size]
    d3_next = d3_ext[1:] if idx.size else d3_ext
    return OrbitFlags(d1, d2, d3, d4, d5, d3_next, cos, horizon)


def _padding(horizon: int, window: int) -> int:
    return horizon + window + 2


def orbit_flags(
    fmap: MapDescriptor,
    p,
    length: int,
    consts: CPConstants,
    horizon: int = DEFAULT_HORIZON,
    window: int = DEFAULT_WINDOW,
) -> OrbitFlags:
    """Flags at ``f^k p`` for ``k = 0 .. length - 1``."""
    pad = _padding(horizon, window)
    seg = OrbitSegment.build(fmap, p, forward=length + pad, backward=pad)
    return segment_flags(seg, consts, seg.offset + np.arange(length), horizon, window)


def check_membership(
    fmap: MapDescriptor,
    p,
    dirs: DirectionPair,
    consts: CPConstants,
    H: int = DEFAULT_HORIZON,
    window: int = DEFAULT_WINDOW,
) -> DeltaFlags:
    """Finite-horizon (CP1)-(CP5) at ``p`` with directions ``dirs`` at ``p``.

    Later orbit points use the window estimator for their own E and F.
    """
    if H < 1:
        raise ValueError("horizon must be at least 1")
    pad = _padding(H, window)
    seg = OrbitSegment.build(fmap, p, forward=pad, backward=pad)
    flags = segment_flags(seg, consts, np.array([seg.offset]), H, window, dirs=dirs)
    return flags.at(0)


def angle_bound(sigma: float, beta: float) -> float:
    """``1 - (1/sigma - sigma)^2 / (2 beta^2)``."""
    return 1.0 - (1.0 / sigma - sigma) ** 2 / (2.0 * beta * beta)


def angle_bound_check(consts: CPConstants, flags_pair, dirs: DirectionPair) -> bool:
    """On ``x`` in Delta_1 with ``f(x)`` in Delta_3, check ``|cos angle(E, F)| <= angle_bound``."""
    at_x, at_fx = flags_pair
    if not (at_x.d1 and at_fx.d3):
        raise PreconditionNotMet("angle bound needs x in Delta_1 and f(x) in Delta_3")
    cos = abs(float(np.dot(dirs.E, dirs.F)))
    return cos <= angle_bound(consts.sigma, consts.beta) + EPS_CMP


def cp_predicate(
    fmap: MapDescriptor,
    consts: CPConstants,
    horizon: int = DEFAULT_HORIZON,
    window: int = DEFAULT_WINDOW,
) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised CP indicator for consecutive orbit points ``pts[k] = f^k pts[0]``."""

    def predicate(pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if len(pts) == 0:
            return np.zeros(0, dtype=bool)
        return orbit_flags(fmap, pts[0], len(pts), consts, horizon, window).cp

    return predicate
