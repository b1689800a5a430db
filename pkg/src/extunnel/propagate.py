"""Unitary time evolution by second-order (Strang) split-step spectral
stepping, in 1D and in the 2D configuration space.

One step is exp(-i V dt/2h) FFT^-1 exp(-i T dt/h) FFT exp(-i V dt/2h); the
two half potential factors of consecutive steps are merged, so the cost
per step is one FFT pair plus two pointwise multiplies.  Each factor is
unitary, so the norm is conserved to round-off for any dt; accuracy in dt
is a separate question answered by the halving convergence test.

Boundaries are periodic.  Instead of an absorbing layer (which would eat
the very probability being integrated), the domain must be large enough
that nothing reaches the edges: a guard band at each edge is monitored
every step and the run aborts if probability appears there.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.fft as sfft

from .errors import DomainTooSmallError, InteractionNotFinishedError
from .grids import Field1D, Field2D
from .units import Constants, GAAS

_FFT_WORKERS = 2


@dataclass
class PropagatorConfig:
    t_end: float                   # fs
    dt: float = 0.25               # fs
    snapshot_stride: int = 20      # steps between on_snapshot calls
    guard_fraction: float = 0.05   # width of each edge guard band
    guard_threshold: float = 1e-4  # max probability tolerated in the bands

    def __post_init__(self):
        if self.t_end <= 0 or self.dt <= 0:
            raise ValueError("t_end and dt must be positive")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))


def _guard_mass_1d(psi: np.ndarray, n_guard: int, dx: float) -> float:
    m = np.sum(np.abs(psi[:n_guard]) ** 2) + np.sum(np.abs(psi[-n_guard:]) ** 2)
    return float(m) * dx


def _guard_mass_2d(psi: np.ndarray, n_guard: int, dx: float) -> float:
    m = np.sum(np.abs(psi[:n_guard, :]) ** 2) + np.sum(np.abs(psi[-n_guard:, :]) ** 2) \
        + np.sum(np.abs(psi[:, :n_guard]) ** 2) + np.sum(np.abs(psi[:, -n_guard:]) ** 2)
    return float(m) * dx * dx


def _evolve(values, grid, v, cfg, on_snapshot, wrap_cls, constants,
            stop_when=None):
    two_d = values.ndim == 2
    dt = cfg.dt
    hbar = constants.hbar
    k = grid.k
    if two_d:
        kinetic = constants.kinetic_coeff * (k[:, None] ** 2 + k[None, :] ** 2)
    else:
        kinetic = constants.kinetic_coeff * k ** 2
    exp_k = np.exp(-1j * kinetic * dt / hbar)
    exp_v = np.exp(-1j * v * dt / hbar)
    exp_v_half = np.exp(-0.5j * v * dt / hbar)
    n_guard = max(2, int(round(cfg.guard_fraction * grid.n_points)))
    guard_mass = _guard_mass_2d if two_d else _guard_mass_1d
    if two_d:
        fft = lambda a: sfft.fft2(a, workers=_FFT_WORKERS, overwrite_x=True)
        ifft = lambda a: sfft.ifft2(a, workers=_FFT_WORKERS, overwrite_x=True)
    else:
        fft = lambda a: sfft.fft(a, overwrite_x=True)
        ifft = lambda a: sfft.ifft(a, overwrite_x=True)

    def emit(step, psi):
        if on_snapshot is not None:
            on_snapshot(step * dt, wrap_cls(grid, psi.copy()))

    emit(0, values)
    psi = exp_v_half * values
    n = cfg.n_steps
    for step in range(1, n + 1):
        buf = fft(psi)
        np.multiply(buf, exp_k, out=buf)
        psi = ifft(buf)
        # the pending half potential factor is a pure phase, so the guard
        # bands can be checked on the in-flight array every step
        gm = guard_mass(psi, n_guard, grid.dx)
        if gm > cfg.guard_threshold:
            raise DomainTooSmallError(
                f"guard-band probability {gm:.2e} at t = {step * dt:.1f} fs; "
                "wrap-around would corrupt the run")
        if step == n:
            psi = exp_v_half * psi
            emit(step, psi)
        elif step % cfg.snapshot_stride == 0:
            psi = exp_v_half * psi
            emit(step, psi)
            if stop_when is not None and stop_when(step * dt, wrap_cls(grid, psi)):
                return psi
            psi = exp_v_half * psi
        else:
            np.multiply(psi, exp_v, out=psi)
    return psi


def evolve_1d(psi0: Field1D, v: np.ndarray, cfg: PropagatorConfig,
              on_snapshot: Optional[Callable] = None,
              constants: Constants = GAAS,
              stop_when: Optional[Callable] = None) -> Field1D:
    """Evolve a 1D field under H = -(hbar^2/2m) d2/dx2 + V(x).

    on_snapshot(t_fs, Field1D) is called at t = 0, at every
    snapshot_stride steps, and at t_end.  stop_when(t, Field1D), polled at
    snapshot boundaries, ends the run early when it returns True.
    Returns the final field.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != psi0.values.shape:
        raise ValueError("potential shape does not match field")
    final = _evolve(psi0.values, psi0.grid, v, cfg, on_snapshot, Field1D,
                    constants, stop_when)
    return Field1D(psi0.grid, final)


def evolve_2d(phi0: Field2D, v2: np.ndarray, cfg: PropagatorConfig,
              on_snapshot: Optional[Callable] = None,
              constants: Constants = GAAS) -> Field2D:
    """Evolve a two-particle field under Phi's configuration-space
    Hamiltonian; works for non-separable V(x1, x2).  The stepping commutes
    with particle exchange, so (anti)symmetry is preserved to round-off.
    """
    v2 = np.asarray(v2, dtype=float)
    if v2.shape != phi0.values.shape:
        raise ValueError("potential shape does not match field")
    final = _evolve(phi0.values, phi0.grid, v2, cfg, on_snapshot, Field2D, constants)
    return Field2D(phi0.grid, final)


def split_components(psi: Field1D, barrier_half_extent: float,
                     max_barrier_mass: float = 1e-3):
    """Split a scattered field into its x < 0 and x > 0 restrictions.

    For a left-incident packet these are the reflected and transmitted
    components.  Only meaningful once the barrier interaction is over:
    raises InteractionNotFinishedError if the probability inside
    |x| <= barrier_half_extent exceeds max_barrier_mass.
    """
    g = psi.grid
    strip = g.region_weights(-barrier_half_extent, barrier_half_extent) \
        if barrier_half_extent > 0 else np.zeros(g.n_points)
    strip_mass = float(np.sum(np.abs(psi.values) ** 2 * strip) * g.dx)
    if strip_mass > max_barrier_mass:
        raise InteractionNotFinishedError(
            f"barrier-region probability {strip_mass:.2e} exceeds "
            f"{max_barrier_mass:.0e}; components still overlap the barrier")
    x = g.x
    left = np.where(x < 0.0, psi.values, 0.0)
    right = np.where(x > 0.0, psi.values, 0.0)
    return Field1D(g, left), Field1D(g, right)
