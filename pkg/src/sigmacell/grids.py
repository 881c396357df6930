"""Midpoint-quadrature energy models on rectangular grids.

A field lives on the nodes of a uniform grid; the energy

    sum_cells  h^N [ wW * f(y(x_c)) * W0(u_c) + wG * |grad u_c|^2 ]

is assembled with the field value at each cell center taken as the
corner average and the gradient as first-order edge differences averaged
to the center.  The spatial weight f is evaluated once per model at the
(mapped) cell centers and cached; the map carries either a rotation
(cell problems) or a 1/eps dilation (diffuse-interface energies).

The gradient returned is the exact derivative of this discrete sum with
respect to the node values.  Axes may be periodic: the node array then
omits the duplicate endpoint and assembly wraps around.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Optional

import numpy as np

__all__ = ["BoxGrid", "EnergyParts", "EnergyModel", "node_quadrature_weights"]


@dataclass(frozen=True)
class BoxGrid:
    """Uniform rectangular grid with per-axis periodicity."""

    lo: tuple
    hi: tuple
    h: float
    periodic: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        per = tuple(bool(v) for v in self.periodic)
        if not (len(lo) == len(hi) == len(per)):
            raise ValueError("lo, hi, periodic must have equal length")
        if self.h <= 0:
            raise ValueError("mesh size must be positive")
        for a, b in zip(lo, hi):
            if b <= a:
                raise ValueError("box extents must be increasing")
            ratio = (b - a) / self.h
            if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
                raise ValueError(f"mesh {self.h} does not divide extent {b - a}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "periodic", per)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def cells(self) -> tuple:
        return tuple(int(round((b - a) / self.h)) for a, b in zip(self.lo, self.hi))

    @property
    def shape(self) -> tuple:
        """Node counts per axis (periodic axes omit the duplicate endpoint)."""
        return tuple(c if p else c + 1 for c, p in zip(self.cells, self.periodic))

    def node_axes(self) -> list:
        out = []
        for a, n, p in zip(self.lo, self.shape, self.periodic):
            out.append(a + self.h * np.arange(n))
        return out

    def node_points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.node_axes(), indexing="ij")
        return np.stack(mesh, axis=-1)

    def cell_centers(self) -> np.ndarray:
        axes = [a + self.h * (np.arange(c) + 0.5) for a, c in zip(self.lo, self.cells)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1)

    def boundary_mask(self) -> np.ndarray:
        """True on non-periodic boundary nodes."""
        mask = np.zeros(self.shape, dtype=bool)
        for ax, p in enumerate(self.periodic):
            if p:
                continue
            sl = [slice(None)] * self.dim
            sl[ax] = 0
            mask[tuple(sl)] = True
            sl[ax] = -1
            mask[tuple(sl)] = True
        return mask


@dataclass(frozen=True)
class EnergyParts:
    total: float
    potential: float
    gradient: float


class EnergyModel:
    """Discrete energy and its exact gradient on a BoxGrid."""

    def __init__(
        self,
        grid: BoxGrid,
        pot,
        y_map: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        weight_potential: float = 1.0,
        weight_gradient: float = 1.0,
    ):
        self.grid = grid
        self.pot = pot
        self.wW = float(weight_potential)
        self.wG = float(weight_gradient)
        centers = grid.cell_centers()
        if y_map is not None:
            centers = y_map(centers)
        self._factor = np.asarray(pot.spatial_factor(centers), dtype=float)
        self._offsets = list(product((0, 1), repeat=grid.dim))

    def _extend(self, u: np.ndarray) -> np.ndarray:
        for ax, p in enumerate(self.grid.periodic):
            if p:
                sl = [slice(None)] * u.ndim
                sl[ax] = slice(0, 1)
                u = np.concatenate([u, u[tuple(sl)]], axis=ax)
        return u

    def _corner(self, u_ext: np.ndarray, off) -> np.ndarray:
        sl = tuple(slice(1, None) if o else slice(0, -1) for o in off)
        return u_ext[sl]

    def _center_values(self, u: np.ndarray):
        u_ext = self._extend(u)
        corners = [self._corner(u_ext, off) for off in self._offsets]
        n = self.grid.dim
        ubar = sum(corners) / (1 << n)
        dus = []
        for ax in range(n):
            acc = None
            for off, c in zip(self._offsets, corners):
                term = c if off[ax] else -c
                acc = term if acc is None else acc + term
            dus.append(acc / ((1 << (n - 1)) * self.grid.h))
        return ubar, dus

    def energy_parts(self, u: np.ndarray) -> EnergyParts:
        u = np.asarray(u, dtype=float)
        if not np.isfinite(u).all():
            raise ValueError("field contains non-finite values")
        n = self.grid.dim
        hN = self.grid.h**n
        ubar, dus = self._center_values(u)
        pot_density = self._factor * self.pot.base(ubar)
        grad2 = sum((du * du).sum(axis=-1) for du in dus)
        e_pot = self.wW * hN * float(pot_density.sum())
        e_grad = self.wG * hN * float(grad2.sum())
        return EnergyParts(e_pot + e_grad, e_pot, e_grad)

    def energy(self, u: np.ndarray) -> float:
        return self.energy_parts(u).total

    def gradient(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if not np.isfinite(u).all():
            raise ValueError("field contains non-finite values")
        n = self.grid.dim
        h = self.grid.h
        hN = h**n
        ubar, dus = self._center_values(u)
        q = (self.wW * hN / (1 << n)) * self._factor[..., None] * self.pot.base.dp(ubar)
        gs = [(self.wG * h ** (n - 1) / (1 << max(n - 2, 0)) * (2.0 if n == 1 else 1.0)) * du for du in dus]
        # scatter to corners of the extended array, then fold periodic wrap
        ext_shape = tuple(s + (1 if p else 0) for s, p in zip(u.shape[:-1], self.grid.periodic))
        g_ext = np.zeros(ext_shape + (u.shape[-1],), dtype=float)
        for off in self._offsets:
            contrib = q
            for ax in range(n):
                contrib = contrib + (gs[ax] if off[ax] else -gs[ax])
            sl = tuple(slice(1, None) if o else slice(0, -1) for o in off)
            g_ext[sl] += contrib
        for ax in reversed(range(n)):
            if self.grid.periodic[ax]:
                first = [slice(None)] * g_ext.ndim
                last = [slice(None)] * g_ext.ndim
                first[ax] = slice(0, 1)
                last[ax] = slice(-1, None)
                g_ext[tuple(first)] += g_ext[tuple(last)]
                keep = [slice(None)] * g_ext.ndim
                keep[ax] = slice(0, -1)
                g_ext = g_ext[tuple(keep)]
        return g_ext


def node_quadrature_weights(grid: BoxGrid) -> np.ndarray:
    """Weights w with sum_cells h^N u_c = sum_nodes w * u (midpoint rule)."""
    n = grid.dim
    w = np.ones(grid.cells)
    # scatter h^N / 2^n per corner, same layout as the energy scatter
    coef = grid.h**n / (1 << n)
    ext_shape = tuple(s + (1 if p else 0) for s, p in zip(grid.shape, grid.periodic))
    out = np.zeros(ext_shape)
    for off in product((0, 1), repeat=n):
        sl = tuple(slice(1, None) if o else slice(0, -1) for o in off)
        out[sl] += coef * w
    for ax in reversed(range(n)):
        if grid.periodic[ax]:
            first = [slice(None)] * out.ndim
            last = [slice(None)] * out.ndim
            first[ax] = slice(0, 1)
            last[ax] = slice(-1, None)
            out[tuple(first)] += out[tuple(last)]
            keep = [slice(None)] * out.ndim
            keep[ax] = slice(0, -1)
            out = out[tuple(keep)]
    return out
