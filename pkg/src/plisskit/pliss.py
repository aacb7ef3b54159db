"""Pliss times of finite real sequences.

Index ``k`` of a length-L sequence is a Pliss time for threshold ``alpha3``
when every forward partial average starting at ``k`` stays at or below it::

    (S_m - S_k) / (m - k) <= alpha3     for all k < m <= L,

with ``S`` the prefix sums (``S_0 = 0``).  Writing ``b_k = S_k - alpha3 * k``
this says ``b_k >= b_m`` for all later ``m``, i.e. ``k`` is a weak record of
``b`` read from the right, which a single backward scan finds.

If every term is at least ``alpha1`` and the mean is at most ``alpha2 < alpha3``
then at least ``L (alpha3 - alpha2) / (alpha3 - alpha1)`` indices are Pliss
times: the running maximum of ``b`` from the right only drops at Pliss times,
by at most ``alpha3 - alpha1`` each, and drops by at least
``(alpha3 - alpha2) L`` in total.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadOrdering, EmptySequence


@dataclass(frozen=True)
class PlissParams:
    alpha1: float
    alpha2: float
    alpha3: float

    def __post_init__(self):
        if not (self.alpha1 < self.alpha2 < self.alpha3):
            raise BadOrdering(
                f"need alpha1 < alpha2 < alpha3, got {self.alpha1}, {self.alpha2}, {self.alpha3}"
            )


@dataclass(frozen=True)
class PlissResult:
    times: np.ndarray
    density: float
    bound: float


def _drift(seq, alpha3: float) -> np.ndarray:
    """``b_k = S_k - alpha3 k`` for k = 0..L.  Shared by the scan and the oracle."""
    a = np.asarray(seq, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise EmptySequence("Pliss times need a nonempty 1-d sequence")
    S = np.concatenate([[0.0], np.cumsum(a)])
    return S - alpha3 * np.arange(a.size + 1)


def pliss_times(seq, alpha3: float) -> np.ndarray:
    """Sorted Pliss times of ``seq`` for threshold ``alpha3`` (inclusive), in O(L)."""
    b = _drift(seq, alpha3)
    L = b.size - 1
    # suffix maximum of b over m > k
    later_max = np.maximum.accumulate(b[:0:-1])[::-1]
    return np.flatnonzero(b[:L] >= later_max).astype(np.int64)


def pliss_oracle(seq, alpha3: float) -> np.ndarray:
    """Reference O(L^2) version of :func:`pliss_times` checking every (k, m) pair."""
    b = _drift(seq, alpha3).tolist()
    L = len(b) - 1
    out = []
    for k in range(L):
        if all(b[m] <= b[k] for m in range(k + 1, L + 1)):
            out.append(k)
    return np.array(out, dtype=np.int64)


def density_bound(params: PlissParams) -> float:
    """Guaranteed density ``(alpha3 - alpha2) / (alpha3 - alpha1)`` of Pliss times."""
    a1, a2, a3 = params.alpha1, params.alpha2, params.alpha3
    if not (a1 < a2 < a3):
        raise BadOrdering(f"need alpha1 < alpha2 < alpha3, got {a1}, {a2}, {a3}")
    return (a3 - a2) / (a3 - a1)


def pliss(seq, params: PlissParams) -> PlissResult:
    times = pliss_times(seq, params.alpha3)
    return PlissResult(times, times.size / len(seq), density_bound(params))
