"""Pliss times: where every forward average stays below a threshold.

A sequence whose mean is well below alpha3 must have many such indices.
Here we build sequences with terms >= alpha1 and mean <= alpha2 and compare
the observed fraction of Pliss times with (alpha3 - alpha2)/(alpha3 - alpha1).
"""

from __future__ import annotations

import numpy as np

from plisskit import PlissParams, pliss, pliss_oracle, pliss_times

seq = [-1, -1, 1, -1]
print("worked example", seq, "->", pliss_times(seq, 0.0).tolist())

rng = np.random.default_rng(0)
prm = PlissParams(alpha1=-1.0, alpha2=0.0, alpha3=0.5)
print(f"\nguaranteed density (a3-a2)/(a3-a1) = {(0.5 - 0.0) / (0.5 + 1.0):.4f}")
print(f"{'n':>6} {'kind':>10} {'density':>8} {'oracle ok':>9}")
for n in (50, 500, 5000):
    # iid terms in [-1, 1] centred on -0.1
    noisy = np.clip(rng.normal(-0.1, 0.6, size=n), -1, 1)
    noisy -= max(0.0, noisy.mean())
    # adversarial: low terms first, then a block of large ones at the end
    k = n // 3
    tail_heavy = np.concatenate([np.full(n - k, -1.0), np.full(k, 2.0)])
    for name, s in (("noisy", noisy), ("tail-heavy", tail_heavy)):
        res = pliss(s, prm)
        # the quadratic oracle is only run on the shorter sequences
        same = str(np.array_equal(res.times, pliss_oracle(s, prm.alpha3))) if n <= 500 else "-"
        print(f"{n:>6} {name:>10} {res.density:8.4f} {same:>9}")

# Pliss times of a random walk drift: the threshold controls how many survive
walk = rng.normal(size=2000)
for a3 in (-0.5, 0.0, 0.5, 1.0):
    print(f"alpha3 = {a3:+.1f}: {pliss_times(walk, a3).size:5d} of {walk.size} indices")
