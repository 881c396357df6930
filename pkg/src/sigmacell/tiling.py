"""Tiling competitors: replicate a small-cube minimizer across a large cube.

A converged T-cell solution is copied into integer-shifted cubes laid out
along the interface plane of an S-cell, blended to the mollified step
over a thin shell by a tensorized smoothstep cutoff (gradient bounded by
a multiple of the shell parameter m), with the mollified step filling the
rest.  Integer shifts keep the potential evaluations inside each copy
identical to the original, so the copied blocks carry exactly the T-cell
energy.  The construction yields an admissible S-cell field, hence an
upper bound for g(S), and a measured subadditivity remainder.

Copies paste the small-cube boundary traces, so the T-cell solve must use
the all-faces Dirichlet class (`tangential="dirichlet"`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional

import numpy as np

from .cell import (
    CellGrid,
    CellState,
    SolverOptions,
    assemble_energy_parts,
    boundary_values,
    minimize_cell,
)
from .lattice import RationalRotation
from .potential import Potential
from .profile import TransitionProfile

__all__ = ["TilingPlan", "plan_tiling", "build_competitor", "subadditivity_gap", "SubadditivityReport"]


@dataclass(frozen=True)
class TilingPlan:
    """Copy layout for one (T, S, m) tiling."""

    dim: int
    T: float
    S: float
    m: int
    count: int
    centers: np.ndarray  # physical prism centers on the interface plane, (M, N)
    shifts: np.ndarray  # integer lattice points near the centers, (M, N)
    rotation: Optional[RationalRotation]

    @property
    def shell_width(self) -> float:
        return 1.0 / self.m

    def reference_centers(self) -> np.ndarray:
        """Copy centers in reference coordinates (exact rational, as float)."""
        if self.rotation is None:
            return self.shifts.astype(float)
        out = np.empty_like(self.shifts, dtype=float)
        M = self.rotation.matrix
        n = self.rotation.dim
        for k, x in enumerate(self.shifts):
            for i in range(n):
                out[k, i] = float(sum(M[j][i] * Fraction(int(x[j])) for j in range(n)))
        return out


def plan_tiling(
    T: float,
    S: float,
    m: int,
    rotation: Optional[RationalRotation] = None,
    dim: int = 2,
) -> TilingPlan:
    """Lay out the copies: centers on the interface plane, integer shifts.

    The number of copies per tangential axis is
    floor((S - 1/T) / (T + sqrt(N) + 2)); enlarged copies are validated
    to be pairwise disjoint and contained in the shrunken cube.
    """
    root_n = float(np.sqrt(dim))
    if not S > T + 3.0 + root_n:
        raise ValueError(f"tiling requires S > T + 3 + sqrt(N) = {T + 3 + root_n:.6g}, got S={S}")
    if not 2 <= m < T:
        raise ValueError(f"shell parameter must satisfy 2 <= m < T, got m={m}, T={T}")
    pitch = T + root_n + 2.0
    per_axis = int(np.floor((S - 1.0 / T) / pitch))
    count = per_axis ** (dim - 1)
    R = np.eye(dim) if rotation is None else rotation.as_float()

    centers = []
    shifts = []
    offsets = [(j - (per_axis - 1) / 2.0) * pitch for j in range(per_axis)]
    for combo in product(offsets, repeat=dim - 1):
        ref = np.array(list(combo) + [0.0])
        p = R @ ref
        x = np.rint(p).astype(np.int64)
        if np.linalg.norm(p - x) > root_n:
            raise RuntimeError("integer shift unexpectedly far from its prism center")
        centers.append(p)
        shifts.append(x)
    centers = np.array(centers).reshape(count, dim)
    shifts = np.array(shifts, dtype=np.int64).reshape(count, dim)

    plan = TilingPlan(dim, float(T), float(S), int(m), count, centers, shifts, rotation)
    _validate_geometry(plan)
    return plan


def _validate_geometry(plan: TilingPlan) -> None:
    half_enlarged = (plan.T + plan.shell_width) / 2.0
    bound = (plan.S - 1.0 / plan.T) / 2.0
    refs = plan.reference_centers()
    for k, c in enumerate(refs):
        if (np.abs(c) + half_enlarged > bound + 1e-12).any():
            raise ValueError(f"enlarged copy {k} leaves the shrunken cube")
    for i in range(len(refs)):
        for j in range(i + 1, len(refs)):
            if np.abs(refs[i] - refs[j]).max() < 2 * half_enlarged - 1e-12:
                raise ValueError(f"enlarged copies {i} and {j} overlap")


def _closed_node_array(state: CellState) -> np.ndarray:
    """Node values including the duplicate endpoint on periodic axes."""
    u = state.u
    for ax, per in enumerate(state.grid.box.periodic):
        if per:
            sl = [slice(None)] * u.ndim
            sl[ax] = slice(0, 1)
            u = np.concatenate([u, u[tuple(sl)]], axis=ax)
    return u


@dataclass
class CompetitorField:
    state: CellState
    plan: TilingPlan
    copy_slices: list


def _smooth_ramp(t: np.ndarray, inner: float, outer: float) -> np.ndarray:
    """1 inside `inner`, 0 beyond `outer`, cubic smoothstep between."""
    s = np.clip((t - inner) / (outer - inner), 0.0, 1.0)
    return 1.0 - (3.0 * s * s - 2.0 * s**3)


def build_competitor(
    u_T: CellState,
    plan: TilingPlan,
    profile: TransitionProfile,
    s_grid: CellGrid,
) -> CompetitorField:
    """Assemble the S-cell competitor from the T-cell solution.

    Copies are pasted node-for-node (grids must share the mesh and the
    copy centers must land on grid nodes); the shell around each copy
    blends the normally-shifted mollified step into the ambient one with
    a cutoff whose gradient is bounded by 3m.
    """
    t_grid = u_T.grid
    if abs(t_grid.h - s_grid.h) > 1e-12:
        raise ValueError("copy and target grids must share the mesh size")
    if abs(t_grid.T - plan.T) > 1e-12 or abs(s_grid.T - plan.S) > 1e-12:
        raise ValueError("grids do not match the tiling plan")
    if t_grid.dim != plan.dim or s_grid.dim != plan.dim:
        raise ValueError("dimension mismatch")

    h = s_grid.h
    dim = plan.dim
    phi = profile.at_scale(1.0)
    pts = s_grid.box.node_points()
    u = phi(pts[..., -1])

    u_copy = _closed_node_array(u_T)
    n_copy = u_copy.shape[0]
    refs = plan.reference_centers()
    half_in = plan.T / 2.0
    half_out = (plan.T + plan.shell_width) / 2.0
    copy_slices = []
    for c in refs:
        lo_idx = []
        for ax in range(dim):
            pos = (c[ax] - half_in - s_grid.box.lo[ax]) / h
            if abs(pos - round(pos)) > 1e-9:
                raise ValueError("copy corner does not land on a grid node; choose h dividing 1/period")
            lo_idx.append(int(round(pos)))
        block = tuple(slice(i, i + n_copy) for i in lo_idx)
        u[block] = u_copy
        copy_slices.append(block)

        # blend shell: between the copy face and the enlarged face
        dist = np.max(np.abs(pts - c), axis=-1)
        shell = (dist > half_in) & (dist <= half_out + 1e-15)
        if shell.any():
            w = np.ones_like(dist)
            for ax in range(dim):
                w = w * _smooth_ramp(np.abs(pts[..., ax] - c[ax]), half_in, half_out)
            shifted = phi(pts[..., -1] - c[-1])
            ambient = phi(pts[..., -1])
            blend = w[..., None] * shifted + (1.0 - w[..., None]) * ambient
            u[shell] = blend[shell]

    # exact boundary data on the non-periodic faces
    bmask = s_grid.box.boundary_mask()
    data = boundary_values(s_grid, profile)
    u[bmask] = data[bmask]
    return CompetitorField(CellState(s_grid, u), plan, copy_slices)


@dataclass
class SubadditivityReport:
    T: float
    S: float
    m: int
    e_S: float
    g_S: float
    g_T: float
    remainder: float
    solver_converged: bool


def subadditivity_gap(
    u_T: CellState,
    T: float,
    S: float,
    m: int,
    pot: Potential,
    profile: TransitionProfile,
    opts: SolverOptions = SolverOptions(),
) -> SubadditivityReport:
    """Competitor energy density on the S-cell versus the solved value.

    e_S comes from assembling the tiled competitor; the S-cell solve is
    warm-started at the competitor, so its g(S) can only be lower.  The
    remainder e_S - g(T) is measured, not bounded.
    """
    t_grid = u_T.grid
    plan = plan_tiling(T, S, m, t_grid.rotation, t_grid.dim)
    s_grid = CellGrid(t_grid.dim, S, t_grid.h, t_grid.rotation, t_grid.tangential)
    comp = build_competitor(u_T, plan, profile, s_grid)
    area_S = S ** (t_grid.dim - 1)
    area_T = T ** (t_grid.dim - 1)
    e_S = assemble_energy_parts(s_grid, pot, comp.state).total / area_S
    g_T = assemble_energy_parts(t_grid, pot, u_T).total / area_T
    res, _ = minimize_cell(s_grid, pot, profile, opts, init=comp.state)
    return SubadditivityReport(T, S, m, e_S, res.g, g_T, e_S - g_T, res.converged)
