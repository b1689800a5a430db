"""Two-particle states with exchange, and the same-side / opposite-side
detection probabilities by three routes.

Routes:

* quadrant route -- Born-rule integration of |Phi(x1,x2)|^2 over the
  regions of configuration space where each particle is left or right of
  x = 0, from an actual 2D field (works for any interaction);
* analytic route -- products of one-particle half-line integrals of the
  two evolved 1D fields (separable potentials only).  With a from the
  left and b from the right, writing I_L = <b|a> over the left half line
  and I_R over the right one,

      P_LL = [m_L(a) m_L(b) -/+ |I_L|^2] / eta
      P_RR = [m_R(a) m_R(b) -/+ |I_R|^2] / eta
      P_LR = [m_L(a) m_R(b) + m_R(a) m_L(b) -/+ 2 Re(I_L conj(I_R))] / eta

  (upper sign fermions, lower bosons, no exchange term for
  distinguishable particles; eta = 1 -/+ |<a|b>|^2 at t0).  After the
  interaction these are the reflected/transmitted component overlaps and
  the masses become the single-particle R and T coefficients;
* limiting formulas -- the two closed-form regimes, identical reflected
  and transmitted shapes (maximal overlap) or orthogonal ones (minimal).

Probabilities exclude a barrier strip |x| <= w, reported separately as
p_barrier, so the four numbers partition unity exactly.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStateError, InteractionNotFinishedError
from .grids import Field1D, Field2D

FERMION = "fermion"
BOSON = "boson"
DISTINGUISHABLE = "distinguishable"
_KINDS = (FERMION, BOSON, DISTINGUISHABLE)


def exchange_sign(stats: str) -> float:
    """-1 for fermions, +1 for bosons, 0 for no exchange term."""
    if stats not in _KINDS:
        raise ValueError(f"unknown statistics {stats!r}")
    return {FERMION: -1.0, BOSON: 1.0, DISTINGUISHABLE: 0.0}[stats]


@dataclass(frozen=True)
class ProbabilityTriple:
    p_lr: float
    p_ll: float
    p_rr: float
    p_barrier: float
    t: float

    def __post_init__(self):
        s = self.p_lr + self.p_ll + self.p_rr + self.p_barrier
        if abs(s - 1.0) > 1e-6:
            raise ValueError(f"probabilities sum to {s}, not 1")

    def as_row(self):
        return (self.t, self.p_lr, self.p_ll, self.p_rr, self.p_barrier)


def build_two_particle(a: Field1D, b: Field1D, stats: str) -> Field2D:
    """(Anti)symmetrized two-particle state from one-particle fields.

    Phi(x1,x2) = [a(x1) b(x2) -/+ a(x2) b(x1)] / sqrt(2 (1 -/+ |<a|b>|^2)),
    the determinant/permanent of the 2x2 packet matrix; bare product for
    distinguishable particles.
    """
    if a.grid != b.grid:
        raise ValueError("packets live on different grids")
    sign = exchange_sign(stats)
    dx = a.grid.dx
    if sign == 0.0:
        return Field2D(a.grid, np.outer(a.values, b.values))
    overlap = complex(np.sum(np.conj(a.values) * b.values) * dx)
    denom = 1.0 + sign * abs(overlap) ** 2
    if stats == FERMION and denom < 1e-12:
        raise DegenerateStateError(
            "identical packets cannot form an anti-symmetric state")
    direct = np.outer(a.values, b.values)
    phi = (direct + sign * direct.T) / np.sqrt(2.0 * denom)
    return Field2D(a.grid, phi)


def _region_masses(grid, strip_half_width):
    x = grid.x
    if strip_half_width > 0:
        in_l = grid.region_weights(x[0] - grid.dx, -strip_half_width)
        in_r = grid.region_weights(strip_half_width, x[-1] + grid.dx)
    else:
        in_l = grid.side_weights("L")
        in_r = grid.side_weights("R")
    return in_l, in_r


def probabilities_2d(phi: Field2D, t: float = 0.0, strip_half_width: float = 0.0,
                     require_finished: bool = False,
                     max_barrier_mass: float = 1e-3) -> ProbabilityTriple:
    """Quadrant probabilities of a two-particle field.

    The configuration-space square is partitioned into LL/RR/LR regions
    outside the barrier strip plus everything touching the strip
    (p_barrier).  With require_finished the strip content must already be
    below max_barrier_mass (the post-interaction condition).
    """
    g = phi.grid
    in_l, in_r = _region_masses(g, strip_half_width)
    rho = np.abs(phi.values) ** 2
    d2 = g.dx * g.dx
    p_ll = float(in_l @ rho @ in_l) * d2
    p_rr = float(in_r @ rho @ in_r) * d2
    p_lr = float(in_l @ rho @ in_r + in_r @ rho @ in_l) * d2
    total = float(rho.sum()) * d2
    p_barrier = max(total - p_ll - p_rr - p_lr, 0.0)
    if require_finished and p_barrier > max_barrier_mass:
        raise InteractionNotFinishedError(
            f"barrier-strip probability {p_barrier:.2e} exceeds {max_barrier_mass:.0e}")
    return ProbabilityTriple(p_lr=p_lr, p_ll=p_ll, p_rr=p_rr,
                             p_barrier=p_barrier, t=t)


def probabilities_analytic(a: Field1D, b: Field1D, stats: str, t: float = 0.0,
                           strip_half_width: float = 0.0,
                           initial_overlap: complex = 0.0) -> ProbabilityTriple:
    """Separable-potential probabilities from the two evolved 1D fields.

    Exactly equals the quadrant route applied to the (anti)symmetrized
    product of the same two fields, at any time; after the interaction it
    reduces to the reflected/transmitted component formulas.
    initial_overlap is <a|b> at t0 (enters the normalization for
    non-disjoint packets).
    """
    if a.grid != b.grid:
        raise ValueError("packets live on different grids")
    sign = exchange_sign(stats)
    g = a.grid
    in_l, in_r = _region_masses(g, strip_half_width)
    dx = g.dx
    av, bv = a.values, b.values
    rho_a, rho_b = np.abs(av) ** 2, np.abs(bv) ** 2
    cross = np.conj(bv) * av
    m_l_a = float(rho_a @ in_l) * dx
    m_r_a = float(rho_a @ in_r) * dx
    m_l_b = float(rho_b @ in_l) * dx
    m_r_b = float(rho_b @ in_r) * dx
    i_l = complex(cross @ in_l) * dx          # <b|a> over the left region
    i_r = complex(cross @ in_r) * dx
    if sign == 0.0:
        eta = 1.0
        p_ll = m_l_a * m_l_b
        p_rr = m_r_a * m_r_b
        p_lr = m_l_a * m_r_b + m_r_a * m_l_b
    else:
        eta = 1.0 + sign * abs(initial_overlap) ** 2
        if stats == FERMION and eta < 1e-12:
            raise DegenerateStateError("identical packets (Pauli forbidden)")
        p_ll = (m_l_a * m_l_b + sign * abs(i_l) ** 2) / eta
        p_rr = (m_r_a * m_r_b + sign * abs(i_r) ** 2) / eta
        p_lr = (m_l_a * m_r_b + m_r_a * m_l_b
                + sign * 2.0 * float(np.real(i_l * np.conj(i_r)))) / eta
    total_a = float(rho_a.sum()) * dx
    total_b = float(rho_b.sum()) * dx
    total = total_a * total_b if sign == 0.0 else \
        (total_a * total_b + sign * abs(complex(cross.sum()) * dx) ** 2) / eta
    p_barrier = max(total - p_ll - p_rr - p_lr, 0.0)
    return ProbabilityTriple(p_lr=p_lr, p_ll=p_ll, p_rr=p_rr,
                             p_barrier=p_barrier, t=t)


def limit_probabilities(r_coeff: float, t_coeff: float, regime: str,
                        stats: str, t: float = 0.0) -> ProbabilityTriple:
    """Closed-form limits for identical (max overlap) or orthogonal
    (min overlap) reflected/transmitted components.

    max overlap:  P_LL = P_RR = R T -/+ R T,  P_LR = (R +/- T)^2
    min overlap:  P_LL = P_RR = R T,          P_LR = R^2 + T^2
    (upper fermions / lower bosons; the min-overlap case is statistics
    independent and equals the distinguishable result).
    """
    if abs(r_coeff + t_coeff - 1.0) > 1e-9:
        raise ValueError(f"R + T = {r_coeff + t_coeff}, expected 1")
    sign = exchange_sign(stats)
    rt = r_coeff * t_coeff
    if regime == "min_overlap" or sign == 0.0:
        if regime not in ("min_overlap", "max_overlap"):
            raise ValueError(f"unknown regime {regime!r}")
        p_ll = p_rr = rt
        p_lr = r_coeff ** 2 + t_coeff ** 2
    elif regime == "max_overlap":
        p_ll = p_rr = rt + sign * rt
        p_lr = (r_coeff - sign * t_coeff) ** 2
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return ProbabilityTriple(p_lr=p_lr, p_ll=p_ll, p_rr=p_rr,
                             p_barrier=max(0.0, 1.0 - p_ll - p_rr - p_lr), t=t)
