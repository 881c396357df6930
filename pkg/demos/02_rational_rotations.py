"""Exact rational directions, rotations, and lattice periods.

A rational unit direction admits an exactly orthogonal rational rotation
sending the last axis onto it; scaled by the lcm of its denominators the
rotation maps the integer lattice into itself, which keeps unit-periodic
potentials exactly periodic along the rotated axes.
"""

import numpy as np
from fractions import Fraction

from sigmacell import (
    RationalUnitVector,
    check_periodicity,
    checkerboard,
    rationalize_direction,
    rotation_from_direction,
)

print("rationalizing real directions:")
for nu, tol in (((0.6, 0.8), 1e-6), ((1 / np.sqrt(2), 1 / np.sqrt(2)), 0.02),
                ((np.cos(1.0), np.sin(1.0)), 1e-3)):
    mu = rationalize_direction(np.array(nu), tol)
    err = np.abs(mu.as_float() - np.array(nu)).max()
    print(f"  {np.round(nu, 5)}  tol={tol:g}  ->  {mu}   (err {err:.2e})")

print("\nexact rotations and their lattice periods:")
for comps in (((0, 1), (1, 1)), ((3, 5), (4, 5)), ((20, 29), (21, 29))):
    nu = RationalUnitVector(tuple(Fraction(*c) for c in comps))
    R = rotation_from_direction(nu)
    print(f"  nu = {nu}: period {R.period}")
    for row in R.matrix:
        print("      [" + ", ".join(str(v) for v in row) + "]")

print("\nperiodicity of the checkerboard along the rotated axes (period 5):")
nu = RationalUnitVector((Fraction(3, 5), Fraction(4, 5)))
R = rotation_from_direction(nu)
rep = check_periodicity(checkerboard(2.0), R, samples=1000, seed=3)
print(f"  shifts {R.lattice_vectors().tolist()}  ->  {'pass' if rep.passed else 'FAIL'}")

print("\na dimension-3 example:")
nu3 = RationalUnitVector((Fraction(2, 3), Fraction(2, 3), Fraction(1, 3)))
R3 = rotation_from_direction(nu3)
print(f"  nu = {nu3}: period {R3.period}")
for row in R3.matrix:
    print("      [" + ", ".join(str(v) for v in row) + "]")
