"""Frequency-domain ground truth: transfer-matrix scattering amplitudes
for piecewise-constant potentials, resonance location, the mono-energetic
scattering-operator probabilities, and packet-weighted k-space integrals.

Conventions.  A Profile is a staircase between two flat contacts:
x <= x_left sits at v_left, x >= x_right at v_right.  Scattering states
use the global plane-wave phase convention

    left incidence:   psi_k(x) = e^{i kL x} + r e^{-i kL x}   (x <= x_left)
                      psi_k(x) = t e^{i kR x}                 (x >= x_right)

with kL/kR the local wave numbers, so r(k) and t(k) can be combined
directly with spectral amplitudes of fields on the same axis.  Right-
incidence amplitudes r', t' come from the mirrored profile.  Transmission
and reflection probabilities carry the flux factors, T = (kR/kL)|t|^2,
so T + R = 1 also for biased profiles; the flux-normalized 2x2 scattering
matrix is unitary.

Inside each constant segment the propagation of (psi, psi') across width w
is exact:  with q = sqrt((E - V)/kinetic_coeff) (complex for E < V),

    [[cos(q w),        sin(q w)/q],
     [-q sin(q w),     cos(q w)  ]]

which covers oscillatory, evanescent and q = 0 segments in one formula.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import BracketError, UnsupportedEnergyError
from .grids import Grid1D
from .units import Constants, GAAS


@dataclass(frozen=True)
class Profile:
    """Piecewise-constant potential between two flat contacts."""

    x_left: float
    segments: Tuple[Tuple[float, float], ...]   # (width nm, V eV)
    v_left: float = 0.0
    v_right: float = 0.0

    @property
    def x_right(self) -> float:
        return self.x_left + sum(w for w, _ in self.segments)

    def reversed(self) -> "Profile":
        return Profile(-self.x_right, tuple(reversed(self.segments)),
                       self.v_right, self.v_left)


def profile_from_sampled(v: np.ndarray, grid: Grid1D, atol: float = 1e-12) -> Profile:
    """Staircase profile of a sampled potential (each sample = one cell)."""
    v = np.asarray(v, dtype=float)
    if v.shape != (grid.n_points,):
        raise ValueError("potential length does not match grid")
    v_left = float(v[0])
    v_right = float(v[-1])
    inner = np.nonzero((np.abs(v - v_left) > atol) | (np.abs(v - v_right) > atol))[0]
    if inner.size == 0:
        return Profile(0.0, (), v_left, v_right)
    i0, i1 = int(inner[0]), int(inner[-1])
    segments = []
    for val in v[i0:i1 + 1]:
        if segments and segments[-1][1] == val:
            segments[-1][0] += grid.dx
        else:
            segments.append([grid.dx, float(val)])
    x_left = grid.x[i0] - grid.dx / 2.0
    return Profile(x_left, tuple((w, h) for w, h in segments), v_left, v_right)


@dataclass(frozen=True)
class ScatteringAmplitudes:
    k: float          # incident wave number on the left contact
    k_left: float
    k_right: float
    r: complex
    t: complex
    r_prime: complex
    t_prime: complex

    @property
    def R(self) -> float:
        return abs(self.r) ** 2

    @property
    def T(self) -> float:
        return (self.k_right / self.k_left) * abs(self.t) ** 2

    def s_matrix(self) -> np.ndarray:
        """Flux-normalized scattering matrix [[r, t'], [t, r']]."""
        lam = math.sqrt(self.k_right / self.k_left)
        return np.array([[self.r, self.t_prime / lam],
                         [self.t * lam, self.r_prime]])

    def unitarity_defect(self) -> float:
        s = self.s_matrix()
        return float(np.max(np.abs(s.conj().T @ s - np.eye(2))))


def _one_sided(profile: Profile, energies: np.ndarray, kc: float):
    """Vectorized left-incidence (r, t) for total energies `energies`."""
    e = np.asarray(energies, dtype=float)
    kl = np.sqrt((e - profile.v_left) / kc)
    kr = np.sqrt((e - profile.v_right) / kc)
    m00 = np.ones_like(e, dtype=complex)
    m01 = np.zeros_like(m00)
    m10 = np.zeros_like(m00)
    m11 = np.ones_like(m00)
    for w, v in profile.segments:
        q = np.sqrt((e - v).astype(complex) / kc)
        c = np.cos(q * w)
        s_over_q = w * np.sinc(q * w / np.pi)     # sin(q w)/q, regular at q = 0
        s_times_q = -q * q * s_over_q
        n00 = c * m00 + s_over_q * m10
        n01 = c * m01 + s_over_q * m11
        n10 = s_times_q * m00 + c * m10
        n11 = s_times_q * m01 + c * m11
        m00, m01, m10, m11 = n00, n01, n10, n11
    el = np.exp(1j * kl * profile.x_left)
    er = np.exp(1j * kr * profile.x_right)
    a_plus = (m00 + 1j * kl * m01) * el          # response to incident e^{+ikx}
    b_plus = (m10 + 1j * kl * m11) * el
    a_minus = (m00 - 1j * kl * m01) / el         # response to r e^{-ikx}
    b_minus = (m10 - 1j * kl * m11) / el
    r = (b_plus - 1j * kr * a_plus) / (1j * kr * a_minus - b_minus)
    t = (a_plus + r * a_minus) / er
    return kl, kr, r, t


def transfer_matrix(profile: Profile, energy: float,
                    constants: Constants = GAAS) -> ScatteringAmplitudes:
    """Scattering amplitudes at one total energy (eV above the left-contact zero)."""
    if energy <= max(profile.v_left, profile.v_right):
        raise UnsupportedEnergyError(
            f"E = {energy} eV is evanescent in a contact "
            f"(contacts at {profile.v_left}, {profile.v_right} eV)")
    kc = constants.kinetic_coeff
    e = np.array([energy])
    kl, kr, r, t = _one_sided(profile, e, kc)
    # mirrored coordinates map right incidence onto left incidence, same energy axis
    _, _, rp, tp = _one_sided(profile.reversed(), e, kc)
    return ScatteringAmplitudes(
        k=float(kl[0]), k_left=float(kl[0]), k_right=float(kr[0]),
        r=complex(r[0]), t=complex(t[0]),
        r_prime=complex(rp[0]), t_prime=complex(tp[0]))


def transmission_scan(profile: Profile, energies: np.ndarray,
                      constants: Constants = GAAS):
    """Vectorized (T, R, t, r) over an energy array (left incidence)."""
    e = np.asarray(energies, dtype=float)
    if np.any(e <= max(profile.v_left, profile.v_right)):
        raise UnsupportedEnergyError("scan contains evanescent contact energies")
    kl, kr, r, t = _one_sided(profile, e, constants.kinetic_coeff)
    T = (kr / kl) * np.abs(t) ** 2
    R = np.abs(r) ** 2
    return T, R, t, r


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def find_resonance(profile: Profile, e_lo: float, e_hi: float,
                   tol: float = 1e-5, constants: Constants = GAAS) -> float:
    """Golden-section maximization of |t(E)|^2 in [e_lo, e_hi].

    Requires a single interior maximum; raises BracketError if the coarse
    scan peaks at a bracket edge.
    """
    coarse = np.linspace(e_lo, e_hi, 257)
    T, _, _, _ = transmission_scan(profile, coarse, constants)
    i = int(np.argmax(T))
    if i == 0 or i == coarse.size - 1:
        raise BracketError(
            f"no interior |t|^2 maximum in [{e_lo}, {e_hi}] eV")
    a, b = coarse[i - 1], coarse[i + 1]

    def negT(e):
        return -transmission_scan(profile, np.array([e]), constants)[0][0]

    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = negT(c), negT(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = negT(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = negT(d)
    return 0.5 * (a + b)


def monoenergetic_probabilities(amp: ScatteringAmplitudes):
    """Two-particle probabilities for mono-energetic fermionic inputs.

    Built symbolically from the flux-normalized scattering matrix, so the
    algebraic cancellations are evaluated numerically:
        P_LR = |t' t - r r'|^2,  P_LL = |r t' - t' r|^2,  P_RR = |t r' - r' t|^2.
    For any unitary s this gives (1, 0, 0).
    """
    s = amp.s_matrix()
    r, tp, t, rp = s[0, 0], s[0, 1], s[1, 0], s[1, 1]
    p_lr = abs(tp * t - r * rp) ** 2
    p_ll = abs(r * tp - tp * r) ** 2
    p_rr = abs(t * rp - rp * t) ** 2
    return p_lr, p_ll, p_rr


def packet_coefficients(g: np.ndarray, grid: Grid1D, profile: Profile,
                        incident_from: str = "L",
                        constants: Constants = GAAS):
    """Packet-weighted transmission and reflection, T and R of Eq-style
    k-integrals: T = sum |g|^2 T(k) dk, R likewise.

    g is a spectral amplitude in FFT order on `grid` (local wave numbers
    of the contact the packet starts in).  Returns (T, R).
    """
    if incident_from not in ("L", "R"):
        raise ValueError("incident_from must be 'L' or 'R'")
    prof = profile if incident_from == "L" else profile.reversed()
    v_local = prof.v_left
    ks = grid.k if incident_from == "L" else -grid.k
    w2 = np.abs(np.asarray(g)) ** 2 * grid.dk
    wrong_side = float(np.sum(w2[ks <= 0]))
    if wrong_side > 1e-8:
        raise ValueError(
            f"packet has {wrong_side:.2e} momentum mass against its travel "
            "direction; k-space coefficients are not meaningful")
    sel = (ks > 0) & (w2 > 1e-16)
    energies = constants.kinetic_coeff * ks[sel] ** 2 + v_local
    T, R, _, _ = transmission_scan(prof, energies, constants)
    return float(np.sum(w2[sel] * T)), float(np.sum(w2[sel] * R))


def overlap_I_rt(g: np.ndarray, grid: Grid1D, profile: Profile,
                 constants: Constants = GAAS) -> complex:
    """Half-line overlap of the a-reflected and b-transmitted components,
    I^{r,t}_{a,b} = sum |g(k)|^2 r(k) conj(t(k)) dk, for the symmetric
    mirror-packet configuration (g is the left packet's amplitude).

    Restricted to unbiased symmetric profiles; the companion coefficients
    come from packet_coefficients.
    """
    if profile.v_left != profile.v_right:
        raise ValueError("I^{r,t} k-space evaluation requires an unbiased profile")
    ks = grid.k
    w2 = np.abs(np.asarray(g)) ** 2 * grid.dk
    wrong_side = float(np.sum(w2[ks <= 0]))
    if wrong_side > 1e-8:
        raise ValueError("packet has momentum mass at k <= 0")
    sel = (ks > 0) & (w2 > 1e-16)
    energies = constants.kinetic_coeff * ks[sel] ** 2
    _, _, t, r = transmission_scan(profile, energies, constants)
    return complex(np.sum(w2[sel] * r * np.conj(t)))


def integral_identity_check(g_a: np.ndarray, g_b: np.ndarray, grid: Grid1D) -> float:
    """|I^{r,t}_{a,b} + I^{t,r}_{a,b}|, evaluated through the identity
    that the sum equals the full-line packet overlap integral
    sum g_a(k) conj(g_b(k)) dk, which vanishes for disjoint momentum
    supports and stays nonzero for overlapping ones."""
    return abs(complex(np.sum(np.asarray(g_a) * np.conj(np.asarray(g_b)) * grid.dk)))
