"""Reference implementations written straight from the map formulas.

Nothing here imports plisskit internals; the tests compare the package
against these.
"""

from __future__ import annotations

import math

import numpy as np

TAU = 2.0 * math.pi
GOLDEN_LOG = math.log((3.0 + math.sqrt(5.0)) / 2.0)


def wrap(v: float) -> float:
    return v - math.floor(v)


def forward(family: str, param: float, x: float, y: float):
    if family == "cat":
        return wrap(2 * x + y), wrap(x + y)
    if family == "perturbed-cat":
        u, v = 2 * x + y, x + y
        return wrap(u + param * math.sin(TAU * v) / TAU), wrap(v)
    s = param * math.sin(TAU * x) / TAU
    return wrap(x + y + s), wrap(y + s)


def forward_jacobian(family: str, param: float, x: float, y: float) -> np.ndarray:
    """Df at (x, y), by the chain rule on the formula."""
    cat = np.array([[2.0, 1.0], [1.0, 1.0]])
    if family == "cat":
        return cat
    if family == "perturbed-cat":
        v = x + y
        shear = np.array([[1.0, param * math.cos(TAU * v)], [0.0, 1.0]])
        return shear @ cat
    c = param * math.cos(TAU * x)
    return np.array([[1.0, 0.0], [0.0, 1.0]]) + np.array([[c, 1.0], [c, 0.0]])


def product_log_norms(family: str, param: float, N: int, base_orbit, v, n: int) -> np.ndarray:
    """Cumulative log ||D f^{kN}(p) v|| for k = 1..n from explicit matrix products.

    ``base_orbit[j]`` is the j-th iterate of the base map.  The points are
    taken as given because two correct floating-point orbits of a chaotic
    map part ways after a few dozen steps; only the cocycle is rebuilt here.
    """
    M = np.eye(2)
    out = []
    j = 0
    for _ in range(n):
        for _ in range(N):
            x, y = base_orbit[j]
            M = forward_jacobian(family, param, x, y) @ M
            j += 1
        out.append(math.log(np.linalg.norm(M @ np.asarray(v, dtype=float))))
    return np.array(out)


def finite_difference_jacobian(family: str, param: float, x: float, y: float, h: float = 1e-6):
    def lift(a, b):
        d = np.array(a) - np.array(b)
        return d - np.round(d)

    cols = []
    for e in (np.array([h, 0.0]), np.array([0.0, h])):
        plus = forward(family, param, x + e[0], y + e[1])
        minus = forward(family, param, x - e[0], y - e[1])
        cols.append(lift(plus, minus) / (2 * h))
    return np.stack(cols, axis=1)


def pliss_brute(seq, alpha3: float) -> list:
    """k is a Pliss time iff every forward average from k is at most alpha3."""
    seq = list(seq)
    L = len(seq)
    out = []
    for k in range(L):
        ok = True
        total = 0.0
        for m in range(k + 1, L + 1):
            total += seq[m - 1]
            if total > alpha3 * (m - k):
                ok = False
                break
        if ok:
            out.append(k)
    return out


def torus_distance(p, q) -> float:
    best = math.inf
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            best = min(best, math.hypot(p[0] - q[0] + i, p[1] - q[1] + j))
    return best


def components(points, delta: float, dist=torus_distance) -> int:
    """Union-find over all pairs closer than delta."""
    n = len(points)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if dist(points[i], points[j]) < delta:
                parent[find(i)] = find(j)
    return len({find(i) for i in range(n)})


def schedule(t: float, alpha: float, beta: float, s: float | None = None) -> dict:
    """Constant schedule from its defining formulas, in plain floats."""
    delta_t = t * max(-math.log(alpha), math.log(beta))
    lo, hi = 3 / (4 * t), (5 * t - 4) / t
    if s is None:
        s = (lo + hi) / 2
    sigma = math.exp(-s * delta_t)
    rho = sigma ** 2
    return {
        "delta_t": delta_t,
        "interval": (lo, hi),
        "s": s,
        "sigma": sigma,
        "rho": rho,
        "sigma_t1": alpha,
        "sigma_t2": 1 / beta,
        "rho_t1": alpha / beta,
        "rho_t2": alpha / beta,
        "eta": 1 - (1 / sigma - sigma) ** 2 / (2 * beta ** 2),
    }
