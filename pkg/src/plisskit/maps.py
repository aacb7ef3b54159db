"""Torus diffeomorphism families with closed-form Jacobians.

Three families live on the flat torus [0,1)^2:

* ``cat``: the Arnold cat map (x, y) -> (2x + y, x + y) mod 1.
* ``perturbed-cat``: the cat map followed by the shear
  (x, y) -> (x + eps sin(2 pi y) / (2 pi), y) mod 1.
* ``std``: the standard map
  (x, y) -> (x + y + K sin(2 pi x) / (2 pi), y + K sin(2 pi x) / (2 pi)) mod 1.

A :class:`MapDescriptor` stands for the iterate ``f^N``.  Single-point helpers
(:func:`apply`, :func:`jacobian`, :func:`orbit`) use plain floats; the ``*_points``
variants are vectorised over arrays of shape ``(..., 2)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import NonInvertibleParameters

TWO_PI = 2.0 * math.pi

CAT = np.array([[2.0, 1.0], [1.0, 1.0]])
CAT_INV = np.array([[1.0, -1.0], [-1.0, 2.0]])


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class Family(str, enum.Enum):
    ARNOLD_CAT = "cat"
    PERTURBED_CAT = "perturbed-cat"
    STANDARD = "std"


class TorusPoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class MapDescriptor:
    """A map family with its parameter, representing the iterate ``f^N``.

    ``param`` is eps for the perturbed cat map and K for the standard map; it
    is ignored by the plain cat map.
    """

    family: Family
    param: float = 0.0
    N: int = 1

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "param", float(self.param))
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"iterate power N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))

    @property
    def name(self) -> str:
        if self.family is Family.ARNOLD_CAT:
            label = "cat"
        elif self.family is Family.PERTURBED_CAT:
            label = f"perturbed-cat(eps={self.param:g})"
        else:
            label = f"std(K={self.param:g})"
        return label if self.N == 1 else f"{label}^{self.N}"

    def to_dict(self) -> dict:
        return {"family": self.family.value, "param": self.param, "N": self.N}

    @classmethod
    def from_dict(cls, d: dict) -> "MapDescriptor":
        return cls(Family(d["family"]), d.get("param", 0.0), d.get("N", 1))


def arnold_cat(N: int = 1) -> MapDescriptor:
    return MapDescriptor(Family.ARNOLD_CAT, 0.0, N)


def perturbed_cat(eps: float, N: int = 1) -> MapDescriptor:
    return MapDescriptor(Family.PERTURBED_CAT, eps, N)


def standard_map(K: float, N: int = 1) -> MapDescriptor:
    return MapDescriptor(Family.STANDARD, K, N)


def check_invertible(fmap: MapDescriptor) -> None:
    if fmap.family is Family.PERTURBED_CAT and not abs(fmap.param) < 1.0:
        raise NonInvertibleParameters(
            f"perturbed cat map needs |eps| < 1, got eps={fmap.param}"
        )
    if not math.isfinite(fmap.param):
        raise NonInvertibleParameters(f"map parameter must be finite, got {fmap.param}")


# ---------------------------------------------------------------------------
# mod-1 reduction and toroidal distance
# ---------------------------------------------------------------------------

def frac(v: float) -> float:
    r = v - math.floor(v)
    # tiny negative inputs round up to exactly 1.0
    return 0.0 if r >= 1.0 else r


def frac_array(v):
    v = np.asarray(v, dtype=float)
    r = v - np.floor(v)
    return np.where(r >= 1.0, 0.0, r)


def torus_distance(p, q):
    """Euclidean distance on the flat torus, minimised over the 9 nearest translates."""
    d = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    shifts = np.array([-1.0, 0.0, 1.0])
    dx = np.abs(d[..., 0, None] + shifts).min(axis=-1)
    dy = np.abs(d[..., 1, None] + shifts).min(axis=-1)
    out = np.hypot(dx, dy)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# one application of the base map f (scalar)
# ---------------------------------------------------------------------------

def _scalar_step(fmap: MapDescriptor, direction: Direction) -> Callable[[float, float], tuple]:
    eps_or_k = fmap.param
    amp = eps_or_k / TWO_PI
    sin = math.sin

    if fmap.family is Family.ARNOLD_CAT:
        if direction is Direction.FORWARD:
            def step(x, y):
                return frac(2.0 * x + y), frac(x + y)
        else:
            def step(x, y):
                return frac(x - y), frac(2.0 * y - x)

    elif fmap.family is Family.PERTURBED_CAT:
        if direction is Direction.FORWARD:
            def step(x, y):
                u = frac(2.0 * x + y)
                v = frac(x + y)
                return frac(u + amp * sin(TWO_PI * v)), v
        else:
            def step(x, y):
                u = x - amp * sin(TWO_PI * y)
                return frac(u - y), frac(2.0 * y - u)

    else:
        if direction is Direction.FORWARD:
            def step(x, y):
                y1 = y + amp * sin(TWO_PI * x)
                return frac(x + y1), frac(y1)
        else:
            def step(x, y):
                x0 = frac(x - y)
                return x0, frac(y - amp * sin(TWO_PI * x0))

    return step


# ---------------------------------------------------------------------------
# one application of the base map f (vectorised) and its Jacobian
# ---------------------------------------------------------------------------

def _base_points(fmap: MapDescriptor, pts: np.ndarray, direction: Direction) -> np.ndarray:
    x, y = pts[..., 0], pts[..., 1]
    amp = fmap.param / TWO_PI
    fam = fmap.family
    if direction is Direction.FORWARD:
        if fam is Family.STANDARD:
            y1 = y + amp * np.sin(TWO_PI * x)
            return np.stack([frac_array(x + y1), frac_array(y1)], axis=-1)
        u, v = frac_array(2.0 * x + y), frac_array(x + y)
        if fam is Family.PERTURBED_CAT:
            u = frac_array(u + amp * np.sin(TWO_PI * v))
        return np.stack([u, v], axis=-1)

    if fam is Family.STANDARD:
        x0 = frac_array(x - y)
        return np.stack([x0, frac_array(y - amp * np.sin(TWO_PI * x0))], axis=-1)
    u = x - amp * np.sin(TWO_PI * y) if fam is Family.PERTURBED_CAT else x
    return np.stack([frac_array(u - y), frac_array(2.0 * y - u)], axis=-1)


def _base_jacobians(fmap: MapDescriptor, pts: np.ndarray, direction: Direction) -> np.ndarray:
    """Jacobian of one application of f (or f^-1) at each point of ``pts``."""
    shape = pts.shape[:-1]
    fam = fmap.family
    if fam is Family.ARNOLD_CAT:
        m = CAT if direction is Direction.FORWARD else CAT_INV
        return np.broadcast_to(m, shape + (2, 2)).copy()

    k = fmap.param
    out = np.empty(shape + (2, 2))
    x, y = pts[..., 0], pts[..., 1]
    if fam is Family.PERTURBED_CAT:
        if direction is Direction.FORWARD:
            # shear factor [[1, eps cos(2 pi v)], [0, 1]] applied after the cat matrix
            c = k * np.cos(TWO_PI * (x + y))
            out[..., 0, 0] = 2.0 + c
            out[..., 0, 1] = 1.0 + c
            out[..., 1, 0] = 1.0
            out[..., 1, 1] = 1.0
        else:
            c = k * np.cos(TWO_PI * y)
            out[..., 0, 0] = 1.0
            out[..., 0, 1] = -1.0 - c
            out[..., 1, 0] = -1.0
            out[..., 1, 1] = 2.0 + c
        return out

    if direction is Direction.FORWARD:
        c = k * np.cos(TWO_PI * x)
        out[..., 0, 0] = 1.0 + c
        out[..., 0, 1] = 1.0
        out[..., 1, 0] = c
        out[..., 1, 1] = 1.0
    else:
        c = k * np.cos(TWO_PI * (x - y))
        out[..., 0, 0] = 1.0
        out[..., 0, 1] = -1.0
        out[..., 1, 0] = -c
        out[..., 1, 1] = 1.0 + c
    return out


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def _as_points(p) -> np.ndarray:
    pts = np.asarray(p, dtype=float)
    if pts.shape[-1:] != (2,):
        raise ValueError(f"points must have trailing dimension 2, got shape {pts.shape}")
    return frac_array(pts)


def apply_points(fmap: MapDescriptor, pts, direction=Direction.FORWARD) -> np.ndarray:
    """Image of every point of ``pts`` (shape ``(..., 2)``) under ``f^{+-N}``."""
    check_invertible(fmap)
    direction = Direction(direction)
    q = _as_points(pts)
    for _ in range(fmap.N):
        q = _base_points(fmap, q, direction)
    return q


def jacobians(fmap: MapDescriptor, pts, direction=Direction.FORWARD) -> np.ndarray:
    """Jacobians of ``f^{+-N}`` at every point, shape ``(..., 2, 2)``.

    For N > 1 the per-factor Jacobians are multiplied along the factor orbit.
    """
    check_invertible(fmap)
    direction = Direction(direction)
    q = _as_points(pts)
    total = _base_jacobians(fmap, q, direction)
    for _ in range(fmap.N - 1):
        q = _base_points(fmap, q, direction)
        total = _base_jacobians(fmap, q, direction) @ total
    return total


def apply(fmap: MapDescriptor, p, direction=Direction.FORWARD) -> TorusPoint:
    """Return ``f^N(p)`` (or ``f^-N(p)``) reduced into [0,1)^2."""
    check_invertible(fmap)
    step = _scalar_step(fmap, Direction(direction))
    x, y = frac(float(p[0])), frac(float(p[1]))
    for _ in range(fmap.N):
        x, y = step(x, y)
    return TorusPoint(x, y)


def jacobian(fmap: MapDescriptor, p, direction=Direction.FORWARD) -> np.ndarray:
    """Exact 2x2 Jacobian of ``f^{+-N}`` at a single point."""
    return jacobians(fmap, np.asarray(p, dtype=float).reshape(1, 2), direction)[0]


def orbit(fmap: MapDescriptor, p, n: int, direction=Direction.FORWARD) -> np.ndarray:
    """Points ``p, f^N p, ..., f^{nN} p`` as an ``(n + 1, 2)`` array.

    Runs a scalar loop; this is several times faster than stepping numpy
    arrays of a single point.
    """
    check_invertible(fmap)
    if n < 0:
        raise ValueError("orbit length must be non-negative")
    step = _scalar_step(fmap, Direction(direction))
    N = fmap.N
    x, y = frac(float(p[0])), frac(float(p[1]))
    out = [(x, y)]
    append = out.append
    if N == 1:
        for _ in range(n):
            x, y = step(x, y)
            append((x, y))
    else:
        for _ in range(n):
            for _ in range(N):
                x, y = step(x, y)
            append((x, y))
    return np.array(out, dtype=float)


# ---------------------------------------------------------------------------
# global derivative bounds
# ---------------------------------------------------------------------------

def singular_values(m: np.ndarray) -> np.ndarray:
    """Closed-form singular values of a stack of 2x2 matrices, largest first."""
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    fro2 = a * a + b * b + c * c + d * d
    det = np.abs(a * d - b * c)
    root = np.sqrt(np.maximum(fro2 * fro2 - 4.0 * det * det, 0.0))
    s1 = np.sqrt(0.5 * (fro2 + root))
    s2 = np.divide(det, s1, out=np.zeros_like(s1), where=s1 > 0)
    return np.stack([s1, s2], axis=-1)


def spectral_norm(m: np.ndarray):
    return singular_values(m)[..., 0]


@dataclass(frozen=True)
class MapBounds:
    """Grid estimates of ``alpha_N = (sup ||df^-N||)^-1`` and ``beta_N = sup ||df^N||``.

    ``r_estimate`` is ``max(-log alpha, log beta) / N``, the finite-grid
    stand-in for the growth rate R(f).  Grid maxima under-estimate suprema
    unless the Jacobian is constant, so ``grid_density`` always travels with
    the numbers.
    """

    alpha: float
    beta: float
    r_estimate: float
    grid_density: int

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "r_estimate": self.r_estimate,
            "grid_density": self.grid_density,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MapBounds":
        return cls(float(d["alpha"]), float(d["beta"]), float(d["r_estimate"]), int(d["grid_density"]))


def grid_points(grid_density: int) -> np.ndarray:
    """The ``g x g`` grid ``{(i/g, j/g)}``; grids for g and 2g are nested."""
    ticks = np.arange(grid_density) / grid_density
    gx, gy = np.meshgrid(ticks, ticks, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel()], axis=-1)


def estimate_bounds(fmap: MapDescriptor, grid_density: int = 512) -> MapBounds:
    if grid_density < 2:
        raise ValueError("grid_density must be at least 2")
    pts = grid_points(grid_density)
    beta = float(spectral_norm(jacobians(fmap, pts, Direction.FORWARD)).max())
    inv_norm = float(spectral_norm(jacobians(fmap, pts, Direction.BACKWARD)).max())
    alpha = 1.0 / inv_norm
    r = max(-math.log(alpha), math.log(beta)) / fmap.N
    return MapBounds(alpha, beta, max(r, 0.0), int(grid_density))
