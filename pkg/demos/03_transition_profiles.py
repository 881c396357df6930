"""Mollified step profiles: the boundary data of every cell problem.

The sharp two-phase step convolved with a compactly supported kernel
reduces to a one-dimensional profile in the normal coordinate; outside
the kernel support it equals the wells exactly.
"""

import numpy as np

from sigmacell import Mollifier, TransitionProfile, homogeneous_quartic
from sigmacell.oned import profile_energy_1d

wells = homogeneous_quartic().wells

for shape in ("bump", "polynomial"):
    prof = TransitionProfile(wells, Mollifier(shape, radius=0.5), dim=2)
    s = np.array([-0.5, -0.25, 0.0, 0.25, 0.5])
    vals = prof(s)[:, 0]
    print(f"{shape} kernel, radius 1/2:")
    print("  s      :", "  ".join(f"{x:+.2f}" for x in s))
    print("  profile:", "  ".join(f"{v:+.4f}" for v in vals))
    e = profile_energy_1d(homogeneous_quartic(), prof, T=4.0)
    print(f"  1D energy of the profile on [-2, 2]: {e:.4f}"
          f"  (the optimal transition costs 8/3 = {8 / 3:.4f})")
    print()

prof = TransitionProfile(wells, Mollifier("bump", 0.5), dim=2)
print("scale law: the width scales like 1/T")
for T in (1.0, 2.0, 4.0):
    half = prof.at_scale(T).support_radius
    print(f"  scale T={T:g}: transition supported in |s| <= {half:g}")
