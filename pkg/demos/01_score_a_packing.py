"""Scoring and validating circle packings.

The benchmark takes a packing as a list of (x, y, r) circles in the unit
square. A packing is valid when every circle lies inside the square and no
two circles overlap (to a 1e-9 tolerance); its score is the sum of radii,
or exactly 0 when anything is violated.
"""

from evoloop.benchmarks.circle_packing import Packing, packing_diagnostics, score, validate

# The largest single circle the square admits: inscribed, radius 1/2.
inscribed = Packing(circles=((0.5, 0.5, 0.5),))
print("inscribed circle:", score(inscribed, n_required=1))

# Two circles meeting exactly at the center: tangency is legal.
tangent_pair = Packing(circles=((0.25, 0.5, 0.25), (0.75, 0.5, 0.25)))
print("tangent pair:", score(tangent_pair, n_required=2))

# Push one circle 1% past the wall and the whole packing scores 0.
too_big = Packing(circles=((0.5, 0.5, 0.51),))
report = validate(too_big, n_required=1)
print("\noversized circle valid?", report.valid)
for violation in report.violations:
    print(f"  {violation.kind} at circles {violation.indices}: magnitude {violation.magnitude:.6f}")
print("oversized circle score:", score(too_big, n_required=1))

# Diagnostics summarize slack and violations for the analyzer.
print("\ndiagnostics for the tangent pair:")
print(packing_diagnostics(tangent_pair, n_required=2))
