"""Potential profiles: single/double rectangular barriers, linear bias
ramp, and the softened window-limited Coulomb term.

Barrier arrays are sampled as exact cell averages: each sample carries the
mean of V over [x - dx/2, x + dx/2], which preserves the integral of V on
any grid and keeps coarse (2D) and fine (1D) grids mutually consistent.
The bias is a linear ramp from 0 at the left edge of the barrier region to
-bias (eV, unit charge) at its right edge, flat outside: the standard
resonant-tunneling-diode convention.

The Coulomb term follows the softened, window-limited form

    V_C(x1, x2) = [q^2/(4 pi eps_r eps_0)] f(x1,x2) / sqrt((x1-x2)^2 + a_C^2)
    f(x1, x2)   = exp(-(x1^2 + x2^2) / sigma_C)

with sigma_C entering linearly as printed in the source expression (an
implicit nm^2 decay scale).  Set window_squared=True to divide by
sigma_C^2 instead.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ResolutionError
from .grids import Grid1D
from .units import COULOMB_EV_NM


@dataclass(frozen=True)
class BarrierSpec:
    kind: str                    # "single" | "double"
    height: float                # eV
    width: float                 # nm, each barrier
    well_width: float = 0.0      # nm, double only
    bias: float = 0.0            # V across the device region

    def __post_init__(self):
        if self.kind not in ("single", "double"):
            raise ValueError(f"kind must be 'single' or 'double', got {self.kind!r}")
        if not self.height > 0:
            raise ValueError("height must be positive")
        if not self.width > 0:
            raise ValueError("width must be positive")
        if self.kind == "double" and not self.well_width > 0:
            raise ValueError("double barrier needs a positive well_width")

    def regions(self):
        """Barrier slabs as (lo, hi, height), symmetric about x = 0."""
        if self.kind == "single":
            return [(-self.width / 2.0, self.width / 2.0, self.height)]
        lo = self.well_width / 2.0
        hi = lo + self.width
        return [(-hi, -lo, self.height), (lo, hi, self.height)]

    @property
    def device_half_extent(self) -> float:
        """Outer edge of the barrier region; also the bias ramp extent."""
        return self.regions()[-1][1]


@dataclass(frozen=True)
class CoulombSpec:
    strength_C: float            # dimensionless prefactor C
    a_C: float = 1.2             # nm, softening length
    sigma_C: float = 5.0         # window decay scale (nm^2 as printed)
    epsilon_r: float = 11.6
    window_squared: bool = False  # alternative reading: divide by sigma_C^2

    def __post_init__(self):
        if not self.a_C > 0:
            raise ValueError("a_C must be positive (softens the x1 = x2 divergence)")
        if not self.sigma_C > 0:
            raise ValueError("sigma_C must be positive")


def sample_barrier(spec: BarrierSpec, grid: Grid1D) -> np.ndarray:
    """V_B(x) + bias ramp on grid points (eV), barrier part cell-averaged."""
    regions = spec.regions()
    narrowest = min(hi - lo for lo, hi, _ in regions)
    if spec.kind == "double":
        narrowest = min(narrowest, spec.well_width)
    if narrowest < grid.dx:
        raise ResolutionError(
            f"feature of {narrowest:.3g} nm is narrower than dx = {grid.dx:.3g} nm")
    x = grid.x
    v = np.zeros_like(x)
    for lo, hi, h in regions:
        overlap = np.minimum(x + grid.dx / 2.0, hi) - np.maximum(x - grid.dx / 2.0, lo)
        v += h * np.clip(overlap, 0.0, None) / grid.dx
    if spec.bias != 0.0:
        a = spec.device_half_extent
        ramp = np.where(x <= -a, 0.0,
                        np.where(x >= a, -spec.bias,
                                 -spec.bias * (x + a) / (2.0 * a)))
        v = v + ramp
    return v


def sample_coulomb(spec: CoulombSpec, grid: Grid1D) -> np.ndarray:
    """Unscaled V_C(x1, x2) on the grid square (eV); multiply by C to use."""
    x1 = grid.x[:, None]
    x2 = grid.x[None, :]
    denom = spec.sigma_C ** 2 if spec.window_squared else spec.sigma_C
    window = np.exp(-(x1 ** 2 + x2 ** 2) / denom)
    coeff = COULOMB_EV_NM / spec.epsilon_r
    return coeff * window / np.sqrt((x1 - x2) ** 2 + spec.a_C ** 2)


def total_potential_2d(barrier: BarrierSpec, coulomb: Optional[CoulombSpec],
                       grid: Grid1D) -> np.ndarray:
    """V(x1,x2) = V_B(x1) + V_B(x2) + C V_C(x1,x2); separable if coulomb is None."""
    vb = sample_barrier(barrier, grid)
    v2 = vb[:, None] + vb[None, :]
    if coulomb is not None and coulomb.strength_C != 0.0:
        v2 = v2 + coulomb.strength_C * sample_coulomb(coulomb, grid)
    return v2


def staircase_profile(spec: BarrierSpec, ramp_segments: int = 64) -> "Profile":
    """Exact piecewise-constant profile for frequency-domain work.

    Without bias the rectangular slabs are represented exactly; the bias
    ramp is staircased into ramp_segments steps (converged well below the
    resonance-location tolerance vs 256 steps).
    """
    from .scattering import Profile  # local import keeps module layering flat

    a = spec.device_half_extent
    if spec.bias == 0.0:
        segments = []
        edges = sorted({-a, a} | {e for lo, hi, _ in spec.regions() for e in (lo, hi)})
        for lo, hi in zip(edges[:-1], edges[1:]):
            xm = 0.5 * (lo + hi)
            h = 0.0
            for rlo, rhi, rh in spec.regions():
                if rlo <= xm <= rhi:
                    h = rh
            segments.append((hi - lo, h))
        return Profile(-a, tuple(segments), 0.0, 0.0)
    xs = np.linspace(-a, a, ramp_segments + 1)
    segments = []
    for lo, hi in zip(xs[:-1], xs[1:]):
        xm = 0.5 * (lo + hi)
        h = 0.0
        for rlo, rhi, rh in spec.regions():
            if rlo <= xm <= rhi:
                h = rh
        segments.append((hi - lo, h - spec.bias * (xm + a) / (2.0 * a)))
    return Profile(-a, tuple(segments), 0.0, -spec.bias)
