"""N-particle all-on-one-side probabilities from correlation matrices.

For N identical particles in a Slater state of (generally non-orthogonal)
one-particle packets psi_1..psi_N, the probability of detecting all N on
the right of the barrier is

    P_RN = det(M) / det(G)        (fermions)
    P_RN = perm(M) / perm(G)      (bosons)

with M the half-line overlap matrix M[l,j] = int_0^inf conj(psi_l) psi_j dx
at the detection time and G the full-line Gram matrix.  M is Hermitian and
positive semidefinite; its diagonal holds the one-particle transmission
(packet started left) or reflection (started right) coefficients.  The
determinant ratio is evaluated through slogdet so strongly overlapping
sets (tiny determinants on both sides) stay finite.

Two constructors are provided: from evolved 1D fields, and directly in
k space from transfer-matrix amplitudes against the packet spectral
density, which is what the phase-space sweep uses (each matrix entry's
time phase cancels, so the k-space matrix is the asymptotic
post-interaction one and is reused across the whole sweep).

The dimensionless phase-space distance between packets i and j follows
the convention |<psi_i|psi_j>|^2 = exp(-d):

    d = (x_i - x_j)^2 / (4 sigma_x^2) + (k_i - k_j)^2 sigma_x^2

with sigma_x the position standard deviation used by gaussian().
"""

import itertools
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .errors import DegenerateStateError
from .exchange import BOSON, DISTINGUISHABLE, FERMION
from .grids import Field1D, half_line_overlap
from .scattering import Profile, transmission_scan
from .units import Constants, GAAS

_PSD_TOL = 1e-10


def phase_space_distance(dx: float, dk: float, sigma_x: float) -> float:
    """Dimensionless packet separation; |overlap|^2 = exp(-d)."""
    return dx * dx / (4.0 * sigma_x * sigma_x) + dk * dk * sigma_x * sigma_x


def position_shift_for_distance(d: float, sigma_x: float) -> float:
    """Position-only spacing realizing phase-space distance d."""
    return 2.0 * sigma_x * math.sqrt(d)


@dataclass
class CorrelationMatrix:
    """Half-line overlap matrix plus the full-line Gram normalizer."""

    half: np.ndarray     # N x N complex, int_0^inf conj(psi_l) psi_j
    gram: np.ndarray     # N x N complex, full-line overlaps
    sides: tuple         # 'L' / 'R' per packet (diagnostic)

    def __post_init__(self):
        self.half = np.asarray(self.half, dtype=complex)
        self.gram = np.asarray(self.gram, dtype=complex)
        n = self.half.shape[0]
        if self.half.shape != (n, n) or self.gram.shape != (n, n):
            raise ValueError("matrices must be square and of equal size")
        if np.max(np.abs(self.half - self.half.conj().T)) > 1e-9:
            raise ValueError("half-line matrix is not Hermitian")
        lo = np.linalg.eigvalsh(self.half).min()
        if lo < -_PSD_TOL:
            raise ValueError(f"half-line matrix has eigenvalue {lo:.2e} < 0")

    @property
    def n(self) -> int:
        return self.half.shape[0]

    @property
    def diagonal(self) -> np.ndarray:
        """Per-packet T (started left) or R (started right)."""
        return self.half.diagonal().real.copy()


def correlation_matrix(packets: Sequence[Field1D], sides: Sequence[str],
                       detect_side: str = "R") -> CorrelationMatrix:
    """Half-line and Gram matrices of evolved packets at a common time.

    detect_side selects which half line the overlaps integrate over
    ("R" for the all-right probability, "L" for all-left).
    """
    if len(packets) != len(sides):
        raise ValueError("one side label per packet required")
    grid = packets[0].grid
    for p in packets[1:]:
        if p.grid != grid:
            raise ValueError("packets live on different grids")
    n = len(packets)
    half = np.empty((n, n), dtype=complex)
    gram = np.empty((n, n), dtype=complex)
    dx = grid.dx
    for l in range(n):
        for j in range(l, n):
            half[l, j] = half_line_overlap(packets[l], packets[j], detect_side)
            gram[l, j] = complex(np.sum(np.conj(packets[l].values)
                                        * packets[j].values) * dx)
            half[j, l] = np.conj(half[l, j])
            gram[j, l] = np.conj(gram[l, j])
    return CorrelationMatrix(half=half, gram=gram, sides=tuple(sides))


def correlation_matrix_kspace(g2: np.ndarray, k: np.ndarray, profile: Profile,
                              shifts: Sequence[float],
                              constants: Constants = GAAS) -> CorrelationMatrix:
    """Asymptotic correlation matrix for one right packet plus left packets.

    g2 is the normalized momentum density |g(k)|^2 dk of the base left
    packet on the positive-k grid `k`; the right packet is its mirror.
    shifts are the additional left packets' distances behind the base one
    (position-only spacing; entry 0 is implicit for the base packet).

    Entries (0 = right packet, j >= 1 = left packet with shift D_j):
        M[0,0] = sum g2 |r|^2            M[0,j] = sum g2 conj(r) t e^{-i k D_j}
        M[j,l] = sum g2 |t|^2 e^{i k (D_j - D_l)}
        G[j,l] = sum g2 e^{i k (D_j - D_l)},  G[0,j] = 0 (opposite momenta)
    """
    if profile.v_left != profile.v_right:
        raise ValueError("k-space correlation matrix requires an unbiased profile")
    energies = constants.kinetic_coeff * np.asarray(k) ** 2
    _, _, t, r = transmission_scan(profile, energies, constants)
    deltas = np.concatenate([[0.0], np.asarray(shifts, dtype=float)])
    n = len(deltas)
    half = np.empty((n, n), dtype=complex)
    gram = np.eye(n, dtype=complex)
    half[0, 0] = np.sum(g2 * np.abs(r) ** 2)
    for j in range(1, n):
        half[0, j] = np.sum(g2 * np.conj(r) * t * np.exp(-1j * k * deltas[j]))
        half[j, 0] = np.conj(half[0, j])
        for l in range(j, n):
            ph = np.exp(1j * k * (deltas[j] - deltas[l]))
            half[j, l] = np.sum(g2 * np.abs(t) ** 2 * ph)
            half[l, j] = np.conj(half[j, l])
            gram[j, l] = np.sum(g2 * ph)
            gram[l, j] = np.conj(gram[j, l])
    sides = ("R",) + ("L",) * (n - 1)
    return CorrelationMatrix(half=half, gram=gram, sides=sides)


def permanent(m: np.ndarray) -> complex:
    """Permanent by Ryser's formula with Gray-code subset updates."""
    m = np.asarray(m)
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n > 20:
        raise ValueError("permanent limited to n <= 20")
    row_sum = np.zeros(n, dtype=complex)
    total = 0.0 + 0j
    gray = 0
    sign = 1 if n % 2 == 0 else -1
    for i in range(1, 2 ** n):
        new_gray = i ^ (i >> 1)
        bit = gray ^ new_gray
        col = bit.bit_length() - 1
        if new_gray & bit:
            row_sum += m[:, col]
        else:
            row_sum -= m[:, col]
        gray = new_gray
        total += (-1) ** (bin(gray).count("1")) * np.prod(row_sum)
    return total * sign


def _log_ratio(num: np.ndarray, den: np.ndarray):
    """det(num)/det(den) through slogdet; None if the denominator vanishes."""
    sn, ln = np.linalg.slogdet(num)
    sd, ld = np.linalg.slogdet(den)
    if sd == 0 or ld == -np.inf:
        return None
    if sn == 0:
        return 0.0
    return float((sn / sd).real * np.exp(ln - ld))


def prob_all_right(m: CorrelationMatrix, stats: str = FERMION) -> float:
    """Probability of detecting every packet on the right at the matrix time."""
    if stats == FERMION:
        val = _log_ratio(m.half, m.gram)
        if val is None:
            raise DegenerateStateError(
                "singular Gram matrix: linearly dependent packet set")
    elif stats == BOSON:
        den = permanent(m.gram)
        if abs(den) < 1e-300:
            raise DegenerateStateError("vanishing permanent normalizer")
        val = (permanent(m.half) / den).real
    elif stats == DISTINGUISHABLE:
        val = float(np.prod(m.diagonal))
    else:
        raise ValueError(f"unknown statistics {stats!r}")
    if val < -_PSD_TOL:
        raise ValueError(f"probability {val:.2e} below -{_PSD_TOL:.0e}: PSD violation")
    return min(max(val, 0.0), 1.0)


def brute_force_prob(packets: Sequence[Field1D], sides: Sequence[str],
                     stats: str = FERMION) -> float:
    """Oracle: direct double permutation expansion of |Phi_N|^2 integrated
    over the all-right orthant, O((N!)^2); N <= 4."""
    n = len(packets)
    if n > 4:
        raise ValueError("brute force limited to N <= 4")
    grid = packets[0].grid
    dx = grid.dx
    w_r = grid.side_weights("R")
    half = np.empty((n, n), dtype=complex)
    gram = np.empty((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            prod = np.conj(packets[a].values) * packets[b].values
            half[a, b] = np.sum(prod * w_r) * dx
            gram[a, b] = np.sum(prod) * dx
    if stats == DISTINGUISHABLE:
        return float(np.prod(half.diagonal().real))
    sgn = {FERMION: -1.0, BOSON: 1.0}[stats]
    num = 0.0 + 0j
    den = 0.0 + 0j
    perms = list(itertools.permutations(range(n)))
    parities = []
    for p in perms:
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        parities.append(sgn ** inv)
    for p, fp in zip(perms, parities):
        for q, fq in zip(perms, parities):
            term_h = fp * fq
            term_g = fp * fq
            for l in range(n):
                term_h *= half[p[l], q[l]]
                term_g *= gram[p[l], q[l]]
            num += term_h
            den += term_g
    if abs(den) < 1e-300:
        raise DegenerateStateError("vanishing normalization (identical packets)")
    return float((num / den).real)


def cascade_bound_check(m: CorrelationMatrix, tol: float = _PSD_TOL) -> List[tuple]:
    """Verify det(M_K+1) <= D_{K+1} det(M_K) down the leading minors.

    Returns one (K, lhs, rhs, ok) row per step, K = N-1 .. 1, with
    lhs = det(M_{K+1}) and rhs = D_{K+1} det(M_K); also checks that the
    Schur factor lhs/rhs stays in [0, 1] (up to tol) when defined.
    """
    n = m.n
    d = m.diagonal
    minors = [1.0]
    for kk in range(1, n + 1):
        minors.append(float(np.linalg.det(m.half[:kk, :kk]).real))
    rows = []
    for kk in range(n - 1, 0, -1):
        lhs = minors[kk + 1]
        rhs = d[kk] * minors[kk]
        ok = lhs <= rhs + tol and lhs >= -tol
        if rhs > tol:
            factor = lhs / rhs
            ok = ok and (-tol <= factor <= 1.0 + tol)
        rows.append((kk, lhs, rhs, ok))
    return rows


@dataclass(frozen=True)
class PhaseSpaceLayout:
    """One mirrored right packet plus a chain of left packets spaced by d."""

    x0: float           # base left packet center (negative)
    k0: float           # base left packet wave number (positive)
    sigma_x: float
    n_packets: int
    d: float

    def left_shifts(self) -> np.ndarray:
        """Distances of the extra left packets behind the base one."""
        step = position_shift_for_distance(self.d, self.sigma_x)
        return step * np.arange(1, self.n_packets - 1)


def phase_space_sweep(g2: np.ndarray, k: np.ndarray, profile: Profile,
                      sigma_x: float, n_values: Sequence[int],
                      d_values: Sequence[float], stats: str = FERMION,
                      constants: Constants = GAAS):
    """P_RN / T^(N-2) over a (N, d) grid; rows of (N, d, P_norm).

    g2/k as in correlation_matrix_kspace.  The largest N's matrix is built
    once per d and the smaller N values use its leading blocks.
    """
    n_values = sorted(set(int(n) for n in n_values))
    if any(n < 2 for n in n_values):
        raise ValueError("N must be >= 2")
    n_max = n_values[-1]
    energies = constants.kinetic_coeff * np.asarray(k) ** 2
    t_scan, _, _, _ = transmission_scan(profile, energies, constants)
    t_coeff = float(np.sum(g2 * t_scan))
    rows = []
    for d in d_values:
        shifts = position_shift_for_distance(d, sigma_x) * np.arange(1, n_max - 1)
        m = correlation_matrix_kspace(g2, k, profile, shifts, constants)
        for n in n_values:
            sub = CorrelationMatrix(half=m.half[:n, :n], gram=m.gram[:n, :n],
                                    sides=m.sides[:n])
            try:
                p = prob_all_right(sub, stats)
            except DegenerateStateError:
                p = 0.0   # coincident packets: the d -> 0 limit is zero
            rows.append((n, float(d), p / t_coeff ** (n - 2)))
    return rows
