"""Birkhoff estimates of the CP set on three maps.

A scan samples starting points, follows each orbit, and records how often
the orbit sits in each Delta_i and in CP.  For the cat map every point
qualifies.  A small perturbation keeps the measure above the guaranteed
bound.  The shear fails the exponent hypothesis outright.

The scans here are smaller than the acceptance runs so the script finishes
in a few seconds; pass --full for 100 samples of 10^4 steps.
"""

from __future__ import annotations

import sys
import tempfile

from plisskit import ScanConfig, arnold_cat, load_report, perturbed_cat, run_scan, standard_map, write_report

full = "--full" in sys.argv
size = dict(samples=100, orbit_length=10_000) if full else dict(samples=16, orbit_length=2_000)

for fmap in (arnold_cat(), perturbed_cat(0.05), perturbed_cat(0.5), standard_map(0.0)):
    report = run_scan(ScanConfig(fmap, **size), threads=4)
    mu = " ".join(f"{m:.3f}" for m in report.mu_delta)
    print(f"{fmap.name:24s} mu_delta = [{mu}]")
    print(f"{'':24s} {report.summary_line()}")
    print(f"{'':24s} angle checks {report.angle_checked}, violations {report.angle_violations}")

# reports round-trip through JSON and CSV
with tempfile.TemporaryDirectory() as tmp:
    json_path, csv_path = write_report(report, tmp)
    back = load_report(tmp)
    print("\nreloaded keys:", sorted(back))
    print(open(csv_path, encoding="utf-8").readline().strip())
