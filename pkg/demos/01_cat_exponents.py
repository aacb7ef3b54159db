"""Lyapunov exponents of the cat map and its perturbations.

The cat map has a constant Jacobian, so both exponents are logs of its
eigenvalues and the finite-time estimate should land on them to rounding.
Perturbing it with a small shear keeps it hyperbolic with nearby exponents.
The standard map at K = 0 is a pure shear: zero exponents and no splitting.
"""

from __future__ import annotations

import math

from plisskit import DegenerateSplitting, arnold_cat, ftle, oseledets_directions, perturbed_cat, standard_map

exact = math.log((3 + math.sqrt(5)) / 2)
p = (0.1234, 0.5678)

est = ftle(arnold_cat(), p, 100_000)
print(f"cat:         lambda_u = {est.lambda_u:.12f}   exact {exact:.12f}")
print(f"             lambda_s = {est.lambda_s:.12f}   residual {est.residual:.1e}")

# f^2 doubles the exponent
est2 = ftle(arnold_cat(2), p, 50_000)
print(f"cat^2:       lambda_u = {est2.lambda_u:.12f}   2 x exact {2 * exact:.12f}")

for eps in (0.05, 0.3):
    e = ftle(perturbed_cat(eps), p, 100_000)
    d = oseledets_directions(perturbed_cat(eps), p)
    print(f"pcat({eps:<4}): lambda_u = {e.lambda_u:.6f}  lambda_s = {e.lambda_s:.6f}  "
          f"|cos(E, F)| = {d.cos_angle:.4f}")

# a parabolic map: growth is only linear, so no window shows a splitting
shear = standard_map(0.0)
e = ftle(shear, (0.0, 0.0), 10_000)
print(f"shear:       lambda_u = {e.lambda_u:.2e}")
try:
    oseledets_directions(shear, p)
except DegenerateSplitting as exc:
    print(f"             {type(exc).__name__}: {exc}")
