"""Orthonormal indicator basis of L^2([0, T]) on a uniform grid.

The i-th basis function is ``e_i = sqrt(m / T) * 1_[t_i, t_{i+1})`` (indices
start at 0). Indicators of ``[0, t]`` for grid nodes ``t`` are represented
exactly, which keeps every Brownian quantity ``B_t`` exact in chaos.
"""
from dataclasses import dataclass
import math

import numpy as np

NODE_TOL = 1e-12


@dataclass(frozen=True)
class TimeGrid:
    T: float
    m: int

    def __post_init__(self):
        if not (self.T > 0) or not math.isfinite(self.T):
            raise ValueError(f"horizon T must be positive, got {self.T}")
        if isinstance(self.m, bool) or not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise ValueError(f"cell count m must be a positive integer, got {self.m}")

    @property
    def dt(self):
        return self.T / self.m

    @property
    def nodes(self):
        return np.arange(self.m + 1) * self.dt

    @property
    def midpoints(self):
        return (np.arange(self.m) + 0.5) * self.dt

    def node_index(self, t):
        """Index k with ``t == k*T/m``; raises if t is not a node."""
        k = t / self.dt
        kr = round(k)
        if abs(k - kr) > NODE_TOL * max(1.0, abs(k)) or not 0 <= kr <= self.m:
            raise ValueError(f"t={t} is not a node of the grid (T={self.T}, m={self.m})")
        return int(kr)

    def is_node(self, t):
        try:
            self.node_index(t)
        except ValueError:
            return False
        return True


def make_uniform_grid(T, m):
    return TimeGrid(float(T), m)


class L2Function:
    """Element of L^2([0, T]) stored as its coefficients in the indicator basis."""

    __slots__ = ("grid", "coeffs")

    def __init__(self, grid, coeffs):
        c = np.array(coeffs, dtype=np.float64).reshape(-1)
        if c.shape[0] != grid.m:
            raise ValueError(f"expected {grid.m} coefficients, got {c.shape[0]}")
        c.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("L2Function is immutable")

    def _check(self, other):
        if not isinstance(other, L2Function):
            return NotImplemented
        if other.grid != self.grid:
            raise ValueError("L2 functions live on different grids")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return L2Function(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return L2Function(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return L2Function(self.grid, float(scalar) * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self):
        return L2Function(self.grid, -self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, L2Function)
            and other.grid == self.grid
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def __repr__(self):
        return f"L2Function(T={self.grid.T}, m={self.grid.m}, coeffs={self.coeffs.tolist()})"

    def norm2(self):
        return inner_product(self, self)

    def __call__(self, s):
        """Pointwise value; right-continuous at cell boundaries, zero outside [0, T)."""
        s = np.asarray(s, dtype=np.float64)
        k = np.floor(s / self.grid.dt).astype(int)
        inside = (s >= 0) & (k < self.grid.m)
        vals = np.where(inside, self.coeffs[np.clip(k, 0, self.grid.m - 1)], 0.0)
        return vals / math.sqrt(self.grid.dt)


def zero(grid):
    return L2Function(grid, np.zeros(grid.m))


def unit(grid, i):
    """Basis function e_i (0-based)."""
    if not 0 <= i < grid.m:
        raise IndexError(f"mode {i} out of range for m={grid.m}")
    c = np.zeros(grid.m)
    c[i] = 1.0
    return L2Function(grid, c)


def inner_product(f, g):
    if f.grid != g.grid:
        raise ValueError("L2 functions live on different grids")
    return math.fsum(f.coeffs * g.coeffs)


def indicator(grid, t):
    """Coefficients of 1_[0, t]; ``t`` must be a grid node."""
    k = grid.node_index(t)
    c = np.zeros(grid.m)
    c[:k] = math.sqrt(grid.dt)
    return L2Function(grid, c)


def project(func, grid):
    """Midpoint collocation: ``f_i = func(midpoint_i) * sqrt(T/m)``.

    Exact for functions that are constant on each cell. This is also the
    fallback for indicators of off-node times, which it only approximates.
    """
    vals = np.array([float(func(s)) for s in grid.midpoints])
    return L2Function(grid, vals * math.sqrt(grid.dt))
