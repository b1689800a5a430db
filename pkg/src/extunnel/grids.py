"""Uniform 1D grid, complex fields on it and on its Cartesian square.

The grid is periodic (endpoint excluded), sized so that x = 0 -- the
splitting coordinate between "left" and "right" detection -- is an exact
grid point.  All quadratures are trapezoidal; on a periodic grid that is a
plain rectangle sum, and sub-interval integrals give boundary points half
weight.  The x = 0 sample is shared half/half between the two sides so
that left + right == total norm exactly.

Field2D stores Phi(x1, x2) row-major with x1 as the slow index; the binary
snapshot format is a little-endian header (n_points: int64, x_min: float64,
dx: float64) followed by interleaved (re, im) float64 pairs.
"""

import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

_HEADER = struct.Struct("<qdd")


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on [x_min, x_min + n*dx)."""

    x_min: float
    x_max: float
    n_points: int
    dx: float = field(init=False)
    dk: float = field(init=False)
    origin_index: int = field(init=False)

    def __post_init__(self):
        if not _is_power_of_two(self.n_points):
            raise ValueError(f"n_points must be a power of two, got {self.n_points}")
        if not (self.x_min < 0.0 < self.x_max):
            raise ValueError("grid must straddle x = 0")
        dx = (self.x_max - self.x_min) / self.n_points
        i0 = round(-self.x_min / dx)
        if abs(-self.x_min / dx - i0) > 1e-9:
            raise ValueError("x = 0 must fall on a grid point "
                             "(x_min must be an integer multiple of dx)")
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "dk", 2.0 * np.pi / (self.n_points * dx))
        object.__setattr__(self, "origin_index", i0)

    @classmethod
    def symmetric(cls, half_width: float, n_points: int) -> "Grid1D":
        return cls(-half_width, half_width, n_points)

    @property
    def x(self) -> np.ndarray:
        # anchored at the origin so x = 0 is exact
        return (np.arange(self.n_points) - self.origin_index) * self.dx

    @property
    def k(self) -> np.ndarray:
        """Wave numbers in FFT order."""
        return 2.0 * np.pi * sfft.fftfreq(self.n_points, d=self.dx)

    def side_weights(self, side: str) -> np.ndarray:
        """Quadrature weights for one half line, half weight at x = 0."""
        x = self.x
        if side == "L":
            w = (x < 0.0).astype(float)
        elif side == "R":
            w = (x > 0.0).astype(float)
        else:
            raise ValueError(f"side must be 'L' or 'R', got {side!r}")
        w[self.origin_index] = 0.5
        return w

    def region_weights(self, x_lo: float, x_hi: float) -> np.ndarray:
        """Trapezoid weights for [x_lo, x_hi]; endpoints on a sample get 1/2."""
        if not x_lo < x_hi:
            raise ValueError("x_lo must be < x_hi")
        x = self.x
        eps = 1e-9 * self.dx
        w = ((x > x_lo + eps) & (x < x_hi - eps)).astype(float)
        w[np.abs(x - x_lo) <= eps] = 0.5
        w[np.abs(x - x_hi) <= eps] = 0.5
        return w


@dataclass
class Field1D:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError("values length does not match grid")

    def copy(self) -> "Field1D":
        return Field1D(self.grid, self.values.copy())


@dataclass
class Field2D:
    """Two-particle field Phi(x1, x2) on the Cartesian square of one grid."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        n = self.grid.n_points
        if self.values.shape != (n, n):
            raise ValueError("values shape does not match grid")

    def copy(self) -> "Field2D":
        return Field2D(self.grid, self.values.copy())


def norm(f) -> float:
    """L2 norm squared, integral of |f|^2 over the full domain."""
    dx = f.grid.dx
    total = float(np.sum(np.abs(f.values) ** 2))
    if f.values.ndim == 2:
        return total * dx * dx
    return total * dx


def inner_product(f: Field1D, g: Field1D, x_lo: float, x_hi: float) -> complex:
    """Integral of conj(f) g over [x_lo, x_hi] by trapezoid on grid points."""
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    w = f.grid.region_weights(x_lo, x_hi)
    return complex(np.sum(np.conj(f.values) * g.values * w) * f.grid.dx)


def half_line_overlap(f: Field1D, g: Field1D, side: str) -> complex:
    """Integral of conj(f) g over one half line, split at x = 0."""
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    w = f.grid.side_weights(side)
    return complex(np.sum(np.conj(f.values) * g.values * w) * f.grid.dx)


def quadrant_norm(phi: Field2D, quadrant: str) -> float:
    """Probability in one quadrant of configuration space, split at x = 0.

    quadrant is two letters, the side of x1 then x2 ('LL', 'LR', 'RL',
    'RR').  The x = 0 row/column carries half weight on each side, so the
    four quadrants sum exactly to the total norm.
    """
    if quadrant not in ("LL", "LR", "RL", "RR"):
        raise ValueError(f"unknown quadrant {quadrant!r}")
    g = phi.grid
    w1 = g.side_weights(quadrant[0])
    w2 = g.side_weights(quadrant[1])
    rho_w2 = np.abs(phi.values) ** 2 @ w2
    return float(w1 @ rho_w2) * g.dx * g.dx


def save_field(path, f) -> None:
    """Write the binary snapshot format (works for Field1D and Field2D)."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(f.grid.n_points, f.grid.x[0], f.grid.dx))
        data = np.empty(f.values.size * 2, dtype="<f8")
        data[0::2] = f.values.real.ravel()
        data[1::2] = f.values.imag.ravel()
        fh.write(data.tobytes())


def load_field(path):
    """Read a snapshot written by save_field; 1D or 2D inferred from size."""
    with open(path, "rb") as fh:
        n, x_min, dx = _HEADER.unpack(fh.read(_HEADER.size))
        raw = np.frombuffer(fh.read(), dtype="<f8")
    grid = Grid1D(x_min, x_min + n * dx, n)
    values = raw[0::2] + 1j * raw[1::2]
    if values.size == n * n:
        return Field2D(grid, values.reshape(n, n))
    if values.size == n:
        return Field1D(grid, values)
    raise ValueError("snapshot size matches neither a 1D nor a 2D field")
