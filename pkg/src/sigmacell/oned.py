"""One-dimensional reference solutions.

Independent cross-checks for the cell solver: the optimal transition on
an interval is computed by collocation on the Euler-Lagrange boundary
value problem (a completely different method from the grid descent), and
field energies of known 1D profiles are integrated by quadrature.

Valid whenever the spatial weight varies only along the interface
normal, which covers the homogeneous oracle and stripe-normal runs.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_bvp

from .potential import Potential
from .profile import TransitionProfile

__all__ = ["transition_bvp_energy", "profile_energy_1d"]


def _normal_weight(pot: Potential, nu: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    nu = np.asarray(nu, dtype=float)

    def f(s: np.ndarray) -> np.ndarray:
        pts = np.asarray(s, dtype=float)[..., None] * nu
        return pot.spatial_factor(pts)

    return f


def transition_bvp_energy(
    pot: Potential,
    profile: TransitionProfile,
    T: float,
    nu: Optional[np.ndarray] = None,
    mesh: int = 801,
) -> float:
    """Energy per unit area of the optimal 1D transition on [-T/2, T/2].

    Solves 2 u'' = f(s) W0'(u) with the mollified-step boundary values by
    collocation, then integrates f(s) W0(u) + u'^2 on a fine grid.  Only
    scalar phases are supported (the oracle use case).
    """
    if pot.d != 1:
        raise ValueError("the 1D oracle supports scalar phases only")
    nu = np.asarray(nu if nu is not None else [0.0, 1.0], dtype=float)
    f = _normal_weight(pot, nu)
    half = T / 2.0
    ua = float(profile.at_scale(1.0)(np.array(-half))[0])
    ub = float(profile.at_scale(1.0)(np.array(half))[0])

    def rhs(s, y):
        u, du = y
        w = f(s)
        wp = pot.base.dp(u[..., None])[..., 0]
        return np.vstack([du, 0.5 * w * wp])

    def bc(ya, yb):
        return np.array([ya[0] - ua, yb[0] - ub])

    s0 = np.linspace(-half, half, 41)
    y0 = np.vstack([np.tanh(s0), 1.0 / np.cosh(s0) ** 2])
    sol = solve_bvp(rhs, bc, s0, y0, tol=1e-10, max_nodes=200000)
    if not sol.success:
        raise RuntimeError(f"1D collocation failed: {sol.message}")

    s = np.linspace(-half, half, mesh)
    u = sol.sol(s)[0]
    du = sol.sol(s)[1]
    integrand = f(s) * pot.base(u[..., None]) + du**2
    return float(np.trapezoid(integrand, s))


def profile_energy_1d(
    pot: Potential,
    profile: TransitionProfile,
    T: float,
    nu: Optional[np.ndarray] = None,
    mesh: int = 20001,
) -> float:
    """Energy per unit area of the mollified-step profile itself."""
    nu = np.asarray(nu if nu is not None else [0.0] * 1 + [1.0], dtype=float)
    f = _normal_weight(pot, nu)
    half = T / 2.0
    s = np.linspace(-half, half, mesh)
    p = profile.at_scale(1.0)
    u = p(s)
    du = p.slope(s)
    integrand = f(s) * pot.base(u) + (du * du).sum(axis=-1)
    return float(np.trapezoid(integrand, s))
