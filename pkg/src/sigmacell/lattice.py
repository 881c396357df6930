"""Exact rational directions and rotations.

Directions on the unit sphere with rational coordinates admit rotations
with rational entries; scaled by the lcm of the entry denominators, such
a rotation maps the standard lattice into Z^N.  Cube edges taken as
multiples of that lattice period keep a unit-periodic potential exactly
periodic along the rotated axes, which is what makes tiling arguments
work without any interpolation error.

All algebra here runs in `fractions.Fraction`; invariants are checked
with zero tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "RationalUnitVector",
    "RationalRotation",
    "rationalize_direction",
    "rotation_from_direction",
    "lattice_period",
    "check_periodicity",
    "random_rational_directions",
]


def _as_fraction_tuple(components: Iterable) -> tuple:
    return tuple(Fraction(c) for c in components)


@dataclass(frozen=True)
class RationalUnitVector:
    """A point of Q^N on the unit sphere, stored exactly."""

    components: tuple

    def __post_init__(self):
        comps = _as_fraction_tuple(self.components)
        if len(comps) < 2:
            raise ValueError("directions need dimension >= 2")
        if sum(c * c for c in comps) != 1:
            raise ValueError("components must have exact unit norm")
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return len(self.components)

    def as_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.components])

    def denominator_lcm(self) -> int:
        return lcm(*[c.denominator for c in self.components])

    def __iter__(self):
        return iter(self.components)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"


def _mat_mul(A: Sequence[Sequence[Fraction]], B: Sequence[Sequence[Fraction]]) -> tuple:
    n = len(A)
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def _mat_det(A: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(A)
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    det = Fraction(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in [list(r) for r in A[1:]]]
        det += (-1) ** j * A[0][j] * _mat_det(minor)
    return det


@dataclass(frozen=True)
class RationalRotation:
    """Exactly orthogonal rational matrix with det = 1 and its lattice period."""

    matrix: tuple
    period: int

    def __post_init__(self):
        M = tuple(tuple(Fraction(v) for v in row) for row in self.matrix)
        n = len(M)
        if any(len(row) != n for row in M):
            raise ValueError("matrix must be square")
        for i in range(n):
            for j in range(n):
                dot = sum(M[k][i] * M[k][j] for k in range(n))
                if dot != (1 if i == j else 0):
                    raise ValueError("matrix is not exactly orthogonal")
        if _mat_det(M) != 1:
            raise ValueError("matrix must have determinant 1")
        period = int(self.period)
        for row in M:
            for v in row:
                if (period * v).denominator != 1:
                    raise ValueError("period does not clear all denominators")
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "period", period)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def as_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.matrix])

    def column(self, j: int) -> tuple:
        return tuple(self.matrix[i][j] for i in range(self.dim))

    def lattice_vectors(self) -> np.ndarray:
        """Integer vectors period * (column j), one per column."""
        n = self.dim
        out = np.empty((n, n), dtype=np.int64)
        for j in range(n):
            for i in range(n):
                v = self.period * self.matrix[i][j]
                out[j, i] = int(v)
        return out

    @classmethod
    def identity(cls, dim: int) -> "RationalRotation":
        M = tuple(
            tuple(Fraction(1) if i == j else Fraction(0) for j in range(dim)) for i in range(dim)
        )
        return cls(M, 1)


def lattice_period(matrix) -> int:
    """Smallest positive integer clearing every entry denominator."""
    if isinstance(matrix, RationalRotation):
        rows = matrix.matrix
    else:
        rows = tuple(tuple(Fraction(v) for v in row) for row in matrix)
    return lcm(*[v.denominator for row in rows for v in row])


def _stereographic_point(t: Sequence[Fraction], pole_axis: int, sign: int, dim: int) -> tuple:
    """Map a rational parameter t in Q^(dim-1) to a rational sphere point.

    The distinguished coordinate sits at `pole_axis` with orientation
    `sign`; the map is mu_pole = (1 - |t|^2) / (1 + |t|^2),
    mu_rest = 2 t / (1 + |t|^2).
    """
    t2 = sum(ti * ti for ti in t)
    denom = 1 + t2
    mu_pole = sign * (1 - t2) / denom
    rest = [2 * ti / denom for ti in t]
    comps = []
    k = 0
    for i in range(dim):
        if i == pole_axis:
            comps.append(mu_pole)
        else:
            comps.append(rest[k])
            k += 1
    return tuple(comps)


def rationalize_direction(nu, tol: float) -> RationalUnitVector:
    """Approximate a real unit direction by an exact rational one.

    Searches rational points obtained by inverse stereographic projection
    of rational parameters with increasing denominator; the first
    denominator level with a hit opens a window up to twice that level,
    and among all candidates within the componentwise tolerance the one
    with the smallest coordinate-denominator lcm (ties broken
    lexicographically) is returned.
    """
    if tol < 1e-9:
        raise ValueError("tolerance below 1e-9 would blow up denominators")
    nu = np.asarray(nu, dtype=float)
    dim = nu.size
    norm = float(np.linalg.norm(nu))
    if abs(norm - 1.0) > 1e-12:
        raise ValueError("input direction must be a unit vector (within 1e-12)")
    nu = nu / norm

    pole_axis = int(np.argmax(np.abs(nu)))
    sign = 1 if nu[pole_axis] >= 0 else -1
    rest = np.delete(nu, pole_axis)
    t_star = rest / (1.0 + sign * nu[pole_axis])

    def candidates_at(q: int):
        grids = []
        for ts in t_star:
            lo = Fraction(int(np.floor(ts * q)), q)
            hi = Fraction(int(np.ceil(ts * q)), q)
            grids.append((lo,) if lo == hi else (lo, hi))
        out = []
        idx = [0] * len(grids)
        while True:
            out.append(tuple(g[i] for g, i in zip(grids, idx)))
            for k in range(len(grids)):
                idx[k] += 1
                if idx[k] < len(grids[k]):
                    break
                idx[k] = 0
            else:
                break
        return out

    q_max = int(np.ceil(4.0 / tol)) + 1
    hits: list = []
    q_hit = None
    q = 1
    while q <= q_max:
        for t in candidates_at(q):
            mu = _stereographic_point(t, pole_axis, sign, dim)
            err = max(abs(float(c) - nu[i]) for i, c in enumerate(mu))
            if err <= tol:
                hits.append(mu)
                if q_hit is None:
                    q_hit = q
        if q_hit is not None and q >= 2 * q_hit:
            break
        q += 1
    if not hits:
        raise RuntimeError("no rational direction found within tolerance")

    def key(mu):
        return (lcm(*[c.denominator for c in mu]), mu)

    best = min(set(hits), key=key)
    return RationalUnitVector(best)


def rotation_from_direction(nu: RationalUnitVector) -> RationalRotation:
    """Exact rotation sending the last coordinate axis to `nu`.

    Built as the composition of two reflections: one through the bisector
    of e_N and nu (which swaps them), one fixing nu (restoring
    orientation).  Both have rational entries because the squared norms
    involved are rational.
    """
    n = nu.dim
    e_last = tuple(Fraction(1) if i == n - 1 else Fraction(0) for i in range(n))
    if nu.components == e_last:
        return RationalRotation.identity(n)

    def householder(w: tuple) -> tuple:
        w2 = sum(wi * wi for wi in w)
        return tuple(
            tuple(
                (Fraction(1) if i == j else Fraction(0)) - 2 * w[i] * w[j] / w2
                for j in range(n)
            )
            for i in range(n)
        )

    w = tuple(e_last[i] - nu.components[i] for i in range(n))
    H1 = householder(w)
    z = tuple(H1[i][0] for i in range(n))  # image of e_1, orthogonal to nu
    H2 = householder(z)
    R = _mat_mul(H2, H1)
    return RationalRotation(R, lattice_period(R))


@dataclass
class PeriodicityReport:
    passed: bool
    samples: int
    shifts: np.ndarray
    failures: list

    def first_failure(self):
        return self.failures[0] if self.failures else None


def check_periodicity(pot, rotation: RationalRotation, samples: int, seed: int) -> PeriodicityReport:
    """Verify W(x + period * R e_i, p) = W(x, p) on random samples.

    For piecewise-constant spatial weights the comparison is bit-exact;
    smooth weights are compared to 1e-12 relative.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    n = rotation.dim
    d = pot.d
    shifts = rotation.lattice_vectors()
    x = rng.uniform(0.0, 1.0, size=(samples, n))
    p = rng.uniform(-2.0, 2.0, size=(samples, d))
    w0 = pot(x, p)
    failures = []
    for i in range(n):
        shifted = x + shifts[i]
        wi = pot(shifted, p)
        if pot.piecewise:
            bad = wi != w0
        else:
            bad = np.abs(wi - w0) > 1e-12 * np.maximum(1.0, np.abs(w0))
        if bad.any():
            j = int(np.argmax(bad))
            failures.append((x[j].copy(), p[j].copy(), i))
    return PeriodicityReport(not failures, samples, shifts, failures)


def random_rational_directions(dim: int, count: int, seed: int, max_denominator: int = 40) -> list:
    """Exact rational unit vectors from random stereographic parameters."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        q = int(rng.integers(1, max_denominator + 1))
        t = tuple(Fraction(int(rng.integers(-2 * q, 2 * q + 1)), q) for _ in range(dim - 1))
        pole_axis = int(rng.integers(0, dim))
        sign = 1 if rng.integers(0, 2) else -1
        mu = _stereographic_point(t, pole_axis, sign, dim)
        out.append(RationalUnitVector(mu))
    return out
