"""Tangent cocycle numerics: FTLEs, Oseledets direction estimates, log-norm sequences.

Products of Jacobians are never formed as single matrices over long
stretches.  Growth is carried as QR scale factors on the log scale, which is
the only safe way to handle ``||df^n||`` ~ exp(n) for n in the thousands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateSplitting
from .maps import Direction, MapDescriptor, TorusPoint, check_invertible, jacobians, orbit

DEFAULT_WINDOW = 40

# Singular-value ratio below which a window shows no hyperbolic splitting.
# The ratio is measured against (1 + w)^2, the largest ratio a unit shear
# [[1, 1], [0, 1]] can produce over w steps, so parabolic growth is not
# mistaken for a splitting.
SPLIT_RATIO_TOL = 1e-6


def split_threshold(window: int) -> float:
    """Log singular-value gap a window must exceed to count as hyperbolic."""
    return math.log1p(SPLIT_RATIO_TOL) + 2.0 * math.log1p(window)


@dataclass(frozen=True)
class LyapunovEstimate:
    lambda_u: float
    lambda_s: float
    n: int
    residual: float


@dataclass(frozen=True)
class DirectionPair:
    """Stable estimate ``E``, unstable estimate ``F`` and ``|cos angle(E, F)|``."""

    E: np.ndarray
    F: np.ndarray
    cos_angle: float

    @classmethod
    def from_vectors(cls, E, F) -> "DirectionPair":
        E = _unit(np.asarray(E, dtype=float))
        F = _unit(np.asarray(F, dtype=float))
        return cls(E, F, float(min(abs(E @ F), 1.0)))

    def swapped(self) -> "DirectionPair":
        return DirectionPair(self.F, self.E, self.cos_angle)


@dataclass(frozen=True)
class CocycleTrace:
    """An orbit segment with QR-accumulated frames.

    ``log_norm_frame[k]`` holds ``(log R11, log |R22|)`` of step k, so the
    cumulative sum of the first column is ``log ||d_p f^k e1||``.
    ``log_norm_E[k]`` is ``log ||d f restricted to E||`` at ``f^k p`` with E
    re-estimated at every orbit point.
    """

    base: TorusPoint
    n: int
    log_norm_E: np.ndarray
    log_norm_frame: np.ndarray
    frames: np.ndarray


def _unit(v: np.ndarray) -> np.ndarray:
    nrm = math.hypot(v[0], v[1])
    if nrm == 0.0:
        raise ValueError("direction vector must be nonzero")
    return v / nrm


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    """Flip unit vectors (rows of ``v``) so the first nonzero coordinate is positive."""
    flip = (v[..., 0] < 0) | ((v[..., 0] == 0) & (v[..., 1] < 0))
    return np.where(flip[..., None], -v, v)


def contracting_directions(J: np.ndarray, window: int):
    """Most-contracted right singular direction of every length-``window`` product.

    ``J`` is a sequence of step Jacobians, shape ``(M, 2, 2)``.  For each start
    ``i`` in ``0 .. M - window`` the product ``J[i+w-1] ... J[i]`` is
    factored as ``Q R`` by stepwise QR; its singular vectors are those of the
    accumulated triangular factor, which is kept rescaled so that nothing
    overflows.

    Returns ``(v, log_s1, log_s2)`` with ``v`` of shape ``(K, 2)`` and the log
    singular values of each product, ``K = M - window + 1``.
    """
    M = J.shape[0]
    K = M - window + 1
    if window < 1 or K < 1:
        raise ValueError(f"need at least {window} Jacobians, got {M}")
    q1x = np.ones(K)
    q1y = np.zeros(K)
    t11 = np.ones(K)
    t12 = np.zeros(K)
    t22 = np.ones(K)
    logscale = np.zeros(K)
    for j in range(window):
        Jj = J[j:j + K]
        a, b, c, d = Jj[:, 0, 0], Jj[:, 0, 1], Jj[:, 1, 0], Jj[:, 1, 1]
        m1x = a * q1x + b * q1y
        m1y = c * q1x + d * q1y
        # second frame column is the 90-degree rotation of the first
        m2x = b * q1x - a * q1y
        m2y = d * q1x - c * q1y
        r11 = np.hypot(m1x, m1y)
        q1x = m1x / r11
        q1y = m1y / r11
        r12 = q1x * m2x + q1y * m2y
        r22 = q1x * m2y - q1y * m2x
        n11 = r11 * t11
        n12 = r11 * t12 + r12 * t22
        n22 = r22 * t22
        s = np.maximum(np.maximum(np.abs(n11), np.abs(n12)), np.abs(n22))
        t11, t12, t22 = n11 / s, n12 / s, n22 / s
        logscale += np.log(s)

    T = np.zeros((K, 2, 2))
    T[:, 0, 0] = t11
    T[:, 0, 1] = t12
    T[:, 1, 1] = t22
    _, S, Vh = np.linalg.svd(T)
    log_s1 = logscale + np.log(S[:, 0])

    logdet = np.log(np.abs(J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]))
    csum = np.concatenate([[0.0], np.cumsum(logdet)])
    log_det_window = csum[window:window + K] - csum[:K]
    log_s2 = log_det_window - log_s1
    return _canonical_sign(Vh[:, 1, :]), log_s1, log_s2


@dataclass(eq=False)
class OrbitSegment:
    """Orbit of ``f^N`` around a base point, padded on both sides.

    ``points[offset]`` is the base point; ``points[offset + k]`` is ``f^{kN} p``
    for ``-offset <= k < len(points) - offset``.
    """

    fmap: MapDescriptor
    points: np.ndarray
    offset: int
    _dirs: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, fmap: MapDescriptor, p, forward: int, backward: int = 0) -> "OrbitSegment":
        fwd = orbit(fmap, p, forward, Direction.FORWARD)
        if backward > 0:
            back = orbit(fmap, p, backward, Direction.BACKWARD)
            pts = np.concatenate([back[:0:-1], fwd])
        else:
            pts = fwd
        return cls(fmap, pts, backward)

    def __len__(self):
        return self.points.shape[0]

    @cached_property
    def jf(self) -> np.ndarray:
        return jacobians(self.fmap, self.points, Direction.FORWARD)

    @cached_property
    def jb(self) -> np.ndarray:
        return jacobians(self.fmap, self.points, Direction.BACKWARD)

    @cached_property
    def logdet_f(self) -> np.ndarray:
        J = self.jf
        return np.log(np.abs(J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]))

    @cached_property
    def logdet_b(self) -> np.ndarray:
        J = self.jb
        return np.log(np.abs(J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]))

    def stable_directions(self, window: int):
        """``(E, degenerate)`` per segment index; NaN where the forward window runs off the end."""
        key = ("s", window)
        if key not in self._dirs:
            M = len(self)
            E = np.full((M, 2), np.nan)
            degenerate = np.ones(M, dtype=bool)
            if M >= window:
                v, l1, l2 = contracting_directions(self.jf, window)
                K = v.shape[0]
                E[:K] = v
                degenerate[:K] = (l1 - l2) < split_threshold(window)
            self._dirs[key] = (E, degenerate)
        return self._dirs[key]

    def unstable_directions(self, window: int):
        """``(F, degenerate)`` per segment index, estimated from the backward cocycle."""
        key = ("u", window)
        if key not in self._dirs:
            M = len(self)
            F = np.full((M, 2), np.nan)
            degenerate = np.ones(M, dtype=bool)
            if M >= window:
                v, l1, l2 = contracting_directions(self.jb[::-1], window)
                K = v.shape[0]
                F[M - K:] = v[::-1]
                degenerate[M - K:] = ((l1 - l2) < split_threshold(window))[::-1]
            self._dirs[key] = (F, degenerate)
        return self._dirs[key]


def _step_norms(J: np.ndarray, V: np.ndarray) -> np.ndarray:
    """``log ||J_i v_i||`` for stacked Jacobians and vectors."""
    w = np.einsum("kij,kj->ki", J, V)
    return np.log(np.hypot(w[:, 0], w[:, 1]))


def _track(rows, v0: float, v1: float):
    """Transport ``(v0, v1)`` through 2x2 rows ``[a, b, c, d]``; returns per-step log growth."""
    logs = []
    append = logs.append
    hypot, log = math.hypot, math.log
    for a, b, c, d in rows:
        w0 = a * v0 + b * v1
        w1 = c * v0 + d * v1
        r = hypot(w0, w1)
        v0 = w0 / r
        v1 = w1 / r
        append(log(r))
    return logs, (v0, v1)


def ftle_on_segment(seg: OrbitSegment, n: int, burn_in: int):
    """FTLE over orbit indices ``0 .. n-1`` of ``seg``.

    Returns the estimate and the half-window exponents ``(lu1, ls1, lu2, ls2)``.
    """
    if n < 2:
        raise ValueError("ftle needs n >= 2")
    burn_in = min(burn_in, seg.offset)
    start = seg.offset - burn_in
    stop = seg.offset + n
    if stop > len(seg):
        raise ValueError("segment too short for the requested window")
    rows = seg.jf[start:stop].reshape(-1, 4).tolist()
    logs, _ = _track(rows, 1.0, 0.0)
    r11 = np.array(logs[burn_in:])
    # for an orthonormal frame |R11 R22| = |det J|
    r22 = seg.logdet_f[seg.offset:stop] - r11
    h = n // 2
    lu1, lu2 = r11[:h].sum() / h, r11[h:].sum() / (n - h)
    ls1, ls2 = r22[:h].sum() / h, r22[h:].sum() / (n - h)
    lu, ls = r11.sum() / n, r22.sum() / n
    residual = max(abs(lu1 - lu2), abs(ls1 - ls2))
    est = LyapunovEstimate(float(max(lu, ls)), float(min(lu, ls)), n, float(residual))
    return est, (float(lu1), float(ls1), float(lu2), float(ls2))


def ftle(fmap: MapDescriptor, p, n: int, burn_in: int = DEFAULT_WINDOW) -> LyapunovEstimate:
    """Finite-time Lyapunov exponents of ``f^N`` over ``n`` steps from ``p``.

    The QR frame is aligned on the backward orbit (``burn_in`` steps ending at
    ``p``) before accumulation starts, so the sum over ``0 .. n-1`` carries no
    start-up transient.  ``lambda_s`` follows from ``|R11 R22| = |det J|``.
    """
    check_invertible(fmap)
    seg = OrbitSegment.build(fmap, p, forward=n, backward=burn_in)
    return ftle_on_segment(seg, n, burn_in)[0]


def oseledets_directions(fmap: MapDescriptor, p, window: int = DEFAULT_WINDOW) -> DirectionPair:
    """Stable/unstable direction estimates at ``p`` from forward/backward windows.

    Raises DegenerateSplitting when either window's singular values are not
    separated beyond what parabolic growth produces.
    """
    if window < 2:
        raise ValueError("window must be at least 2")
    check_invertible(fmap)
    seg = OrbitSegment.build(fmap, p, forward=window, backward=window)
    E, degE = seg.stable_directions(window)
    F, degF = seg.unstable_directions(window)
    i = seg.offset
    if degE[i] or degF[i]:
        raise DegenerateSplitting(
            f"{fmap.name}: no hyperbolic splitting visible at "
            f"({seg.points[i, 0]:.6g}, {seg.points[i, 1]:.6g}) over window {window}"
        )
    return DirectionPair.from_vectors(E[i], F[i])


def step_log_norms(fmap: MapDescriptor, p, v, n: int, direction=Direction.FORWARD) -> np.ndarray:
    """``log ||d f^{+-N} u_k||`` along the orbit, with ``u_k`` the normalised transport of ``v``.

    Forward transport of a contracting vector is numerically unstable (rounding
    feeds the expanding direction), so use :func:`stable_log_norms` for long
    stable sequences.
    """
    v = np.asarray(v, dtype=float)
    if abs(math.hypot(v[0], v[1]) - 1.0) > 1e-9:
        raise ValueError("v must be a unit vector")
    if n == 0:
        return np.empty(0)
    pts = orbit(fmap, p, n - 1, direction)
    rows = jacobians(fmap, pts, direction).reshape(-1, 4).tolist()
    logs, _ = _track(rows, float(v[0]), float(v[1]))
    return np.array(logs)


def log_det_sequence(fmap: MapDescriptor, p, n: int, direction=Direction.FORWARD) -> np.ndarray:
    if n == 0:
        return np.empty(0)
    pts = orbit(fmap, p, n - 1, direction)
    J = jacobians(fmap, pts, direction)
    return np.log(np.abs(J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]))


def stable_log_norms(fmap: MapDescriptor, p, n: int, window: int = DEFAULT_WINDOW) -> np.ndarray:
    """``a_k = log ||d f restricted to E(f^k p)||`` for k < n, E re-estimated at each point.

    NaN marks points where no splitting is visible.
    """
    seg = OrbitSegment.build(fmap, p, forward=n + window, backward=0)
    E, deg = seg.stable_directions(window)
    a = _step_norms(seg.jf[:n], np.nan_to_num(E[:n]))
    return np.where(deg[:n], np.nan, a)


def unstable_log_norms(fmap: MapDescriptor, p, n: int, window: int = DEFAULT_WINDOW) -> np.ndarray:
    """``b_k = log ||d f^-1 restricted to F(f^-k p)||`` for k < n (the backward analogue)."""
    seg = OrbitSegment.build(fmap, p, forward=0, backward=n + window)
    F, deg = seg.unstable_directions(window)
    idx = seg.offset - np.arange(n)
    b = _step_norms(seg.jb[idx], np.nan_to_num(F[idx]))
    return np.where(deg[idx], np.nan, b)


def cocycle_trace(fmap: MapDescriptor, p, n: int, window: int = DEFAULT_WINDOW) -> CocycleTrace:
    """QR-frame trace of ``n`` steps starting from the identity frame at ``p``."""
    pts = orbit(fmap, p, max(n - 1, 0))[:n]
    J = jacobians(fmap, pts, Direction.FORWARD)
    frames = np.empty((n, 2, 2))
    logs = np.empty((n, 2))
    Q = np.eye(2)
    for k in range(n):
        Q, R = np.linalg.qr(J[k] @ Q)
        # make the diagonal of R positive so log R11 is a growth rate
        sgn = np.where(np.diag(R) < 0, -1.0, 1.0)
        Q = Q * sgn
        R = sgn[:, None] * R
        frames[k] = Q
        logs[k] = np.log(np.abs(np.diag(R)))
    a = stable_log_norms(fmap, p, n, window) if n else np.empty(0)
    base = TorusPoint(*map(float, pts[0])) if n else TorusPoint(float(p[0]), float(p[1]))
    return CocycleTrace(base, n, a, logs, frames)
