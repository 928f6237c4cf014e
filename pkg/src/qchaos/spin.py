"""Angular-momentum substrate: spin operators, Clebsch-Gordan coefficients,
spin coherent states, projection onto the zero-magnetization subspace of two
equal spins, and Husimi phase-space functions.

Conventions used throughout the package:

* basis ordering is always m = +j ... -j (index i holds m = j - i);
* exp(-i theta J_n) rotates expectation vectors right-handedly by +theta
  about axis n;
* the two-spin zero-magnetization subspace is spanned by |I,-m>|J,m> with
  m = +J ... -J, and phase-space points on it are labelled by
  (delta_theta, delta_phi) with delta_theta in [0, pi]: the J spin sits at
  polar angle delta_theta (azimuth 0) and the I spin at pi - delta_theta
  (azimuth delta_phi).  delta_theta = 0 is the product ket |I,-I>|J,J>,
  delta_theta = pi is |I,I>|J,-J>.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .exceptions import DomainError

__all__ = [
    "SpinQuantum", "build_spin_ops", "clebsch_gordan", "cg_fixed_m_table",
    "spin_coherent", "project_fz0_coherent", "projected_family",
    "phase_grid", "husimi", "husimi_entropy", "basis_entropy",
]


def _check_half_integer(x, name="j"):
    two = 2.0 * x
    if abs(two - round(two)) > 1e-9:
        raise DomainError(f"{name} = {x} is not a half-integer")
    return round(two) / 2.0


@dataclass(frozen=True)
class SpinQuantum:
    """Spin magnitude j with 2j a non-negative integer."""

    j: float

    def __post_init__(self):
        j = _check_half_integer(self.j)
        if j < 0:
            raise DomainError(f"spin magnitude must be >= 0, got {self.j}")
        object.__setattr__(self, "j", j)

    @property
    def dim(self) -> int:
        return int(round(2 * self.j)) + 1


def build_spin_ops(j):
    """Jx, Jy, Jz matrices in the |j,m> basis ordered m = j ... -j.

    Returns a dict with keys 'x', 'y', 'z'.  Satisfies
    [J_i, J_j] = i eps_ijk J_k and Jx^2+Jy^2+Jz^2 = j(j+1).
    """
    j = SpinQuantum(j).j
    d = int(round(2 * j)) + 1
    m = np.arange(j, -j - 1, -1.0)
    jz = np.diag(m).astype(complex)
    # J+ |j,m> = sqrt((j-m)(j+m+1)) |j,m+1>; m+1 sits one row above
    raise_coeff = np.sqrt((j - m[1:]) * (j + m[1:] + 1.0))
    jp = np.zeros((d, d), dtype=complex)
    jp[np.arange(d - 1), np.arange(1, d)] = raise_coeff
    jx = (jp + jp.conj().T) / 2.0
    jy = (jp - jp.conj().T) / 2.0j
    return {"x": jx, "y": jy, "z": jz}


@lru_cache(maxsize=64)
def _cg_block(two_j1: int, two_j2: int, two_m: int):
    """All CG columns <j1 m1; j2 M-m1 | F M> for fixed (j1, j2, M).

    The coupling operator J1.J2 is real symmetric tridiagonal in the fixed-M
    product basis; its eigenvectors are the coupled states |F,M> with
    eigenvalue [F(F+1) - j1(j1+1) - j2(j2+1)]/2, all distinct.  Diagonalizing
    it yields every column at machine precision regardless of j, which is the
    point: the closed-form factorial sum cancels catastrophically for j
    beyond ~40.

    Returns (m1_values descending, F_values ascending, table) with
    table[i, k] = <j1 m1_i; j2 M-m1_i | F_k M>, Condon-Shortley signs.
    """
    j1, j2, M = two_j1 / 2.0, two_j2 / 2.0, two_m / 2.0
    m1_max = min(j1, M + j2)
    m1_min = max(-j1, M - j2)
    if m1_max < m1_min - 1e-9:
        raise DomainError(f"no states with M={M} for j1={j1}, j2={j2}")
    n = int(round(m1_max - m1_min)) + 1
    m1 = m1_max - np.arange(n)
    m2 = M - m1
    diag = m1 * m2
    # <m1+1, m2-1 | J1.J2 | m1, m2> = c+(j1,m1) c-(j2,m2) / 2
    a, b = m1[1:], m2[1:]
    off = 0.5 * np.sqrt((j1 - a) * (j1 + a + 1.0)) * np.sqrt((j2 + b) * (j2 - b + 1.0))
    if n == 1:
        vec = np.ones((1, 1))
        evals = diag.copy()
    else:
        evals, vec = eigh_tridiagonal(diag, off)
    # eigenvalue -> F, ascending; F is a half-integer when j1+j2 is
    F_raw = (-1.0 + np.sqrt(1.0 + 4.0 * (2.0 * evals + j1 * (j1 + 1) + j2 * (j2 + 1)))) / 2.0
    F = np.round(2.0 * F_raw) / 2.0
    if np.max(np.abs(F - F_raw)) > 1e-6:
        raise DomainError("eigenvalue-to-F recovery failed; inputs inadmissible")
    # Condon-Shortley: the stretched coefficient (largest m1) is positive --
    # its factorial sum collapses to a single +1 term.
    top = vec[0, :]
    sign = np.where(top >= 0, 1.0, -1.0)
    return m1, F, vec * sign


def cg_fixed_m_table(j1, j2, M):
    """CG table for fixed total projection M; see _cg_block."""
    j1 = _check_half_integer(j1, "j1")
    j2 = _check_half_integer(j2, "j2")
    M = _check_half_integer(M, "M")
    return _cg_block(int(round(2 * j1)), int(round(2 * j2)), int(round(2 * M)))


def clebsch_gordan(j1, m1, j2, m2, F, M):
    """<j1 m1; j2 m2 | F M> with Condon-Shortley phases.

    Returns 0 when m1 + m2 != M.  Raises DomainError on inadmissible
    quantum numbers.
    """
    vals = [_check_half_integer(v, n) for v, n in
            ((j1, "j1"), (m1, "m1"), (j2, "j2"), (m2, "m2"), (F, "F"), (M, "M"))]
    j1, m1, j2, m2, F, M = vals
    if abs(m1) > j1 + 1e-9 or abs(m2) > j2 + 1e-9:
        raise DomainError("projection exceeds spin magnitude")
    if F < abs(j1 - j2) - 1e-9 or F > j1 + j2 + 1e-9:
        raise DomainError(f"F={F} violates the triangle rule for j1={j1}, j2={j2}")
    if abs(M) > F + 1e-9:
        raise DomainError(f"|M|={abs(M)} exceeds F={F}")
    if abs((j1 + j2) - F - round((j1 + j2) - F)) > 1e-9:
        raise DomainError("F is incompatible with j1+j2 (integer offset required)")
    if abs(m1 + m2 - M) > 1e-9:
        return 0.0
    m1v, Fv, table = cg_fixed_m_table(j1, j2, M)
    i = int(round(m1v[0] - m1))
    k = int(np.argmin(np.abs(Fv - F)))
    return float(table[i, k])


def spin_coherent(j, theta, phi):
    """Spin coherent state |theta, phi>, the minimum-uncertainty state with
    <J>/j pointing along (theta, phi).  theta=0 gives |j, j>."""
    j = SpinQuantum(j).j
    if not (0.0 <= theta <= np.pi):
        raise DomainError(f"theta must lie in [0, pi], got {theta}")
    d = int(round(2 * j)) + 1
    m = np.arange(j, -j - 1, -1.0)
    ket = np.zeros(d, dtype=complex)
    if theta == 0.0:
        ket[0] = 1.0
        return ket
    if theta == np.pi:
        ket[-1] = 1.0
        return ket
    # amplitudes ~ mu^{j-m} sqrt(binom(2j, j-m)), mu = tan(theta/2) e^{i phi};
    # log magnitudes avoid overflow for large j
    ln_binom = 0.5 * (gammaln(2 * j + 1) - gammaln(j - m + 1) - gammaln(j + m + 1))
    ln_mag = (j - m) * np.log(np.tan(theta / 2.0)) + ln_binom
    ln_mag -= ln_mag.max()
    ket = np.exp(ln_mag) * np.exp(1j * (j - m) * phi)
    return ket / np.linalg.norm(ket)


def _check_delta(delta_theta, delta_phi):
    if not (0.0 <= delta_theta <= np.pi):
        raise DomainError(f"delta_theta must lie in [0, pi], got {delta_theta}")
    if not np.isfinite(delta_phi):
        raise DomainError("delta_phi must be finite")


def project_fz0_coherent(J, delta_theta, delta_phi):
    """Product of two spin coherent states (equal magnitudes, opposite
    polar angles) projected onto the zero total-z-projection subspace and
    normalized.

    Amplitudes on |I,-m>|J,m> are proportional to
    (cot^2(delta_theta/2) e^{i delta_phi})^m * binom(2J, J+m); the limits
    delta_theta -> 0, pi are the product kets at the poles.
    """
    J = SpinQuantum(J).j
    _check_delta(delta_theta, delta_phi)
    d = int(round(2 * J)) + 1
    m = np.arange(J, -J - 1, -1.0)
    ket = np.zeros(d, dtype=complex)
    if delta_theta < 1e-12:
        ket[0] = 1.0
        return ket
    if delta_theta > np.pi - 1e-12:
        ket[-1] = 1.0
        return ket
    ln_binom = gammaln(2 * J + 1) - gammaln(J - m + 1) - gammaln(J + m + 1)
    ln_cot2 = 2.0 * (np.log(np.cos(delta_theta / 2.0)) - np.log(np.sin(delta_theta / 2.0)))
    ln_mag = m * ln_cot2 + ln_binom
    ln_mag -= ln_mag.max()
    ket = np.exp(ln_mag) * np.exp(1j * m * delta_phi)
    return ket / np.linalg.norm(ket)


def phase_grid(resolution):
    """Cell-centered grid uniform in (cos delta_theta, delta_phi).

    Returns (points, weight): points has shape (resolution**2, 2) and weight
    is the common area element, resolution**2 * weight = 4 pi.
    """
    if resolution < 2:
        raise DomainError("resolution must be >= 2")
    u = -1.0 + (np.arange(resolution) + 0.5) * (2.0 / resolution)
    phi = (np.arange(resolution) + 0.5) * (2.0 * np.pi / resolution)
    th = np.arccos(u)
    TH, PH = np.meshgrid(th, phi, indexing="ij")
    pts = np.column_stack([TH.ravel(), PH.ravel()])
    weight = (2.0 / resolution) * (2.0 * np.pi / resolution)
    return pts, weight


def projected_family(J, points):
    """Rows are projected coherent states at the given (dtheta, dphi) points."""
    J = SpinQuantum(J).j
    d = int(round(2 * J)) + 1
    m = np.arange(J, -J - 1, -1.0)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    out = np.zeros((len(pts), d), dtype=complex)
    ln_binom = gammaln(2 * J + 1) - gammaln(J - m + 1) - gammaln(J + m + 1)
    for k, (dt, dp) in enumerate(pts):
        _check_delta(dt, dp)
        if dt < 1e-12:
            out[k, 0] = 1.0
        elif dt > np.pi - 1e-12:
            out[k, -1] = 1.0
        else:
            ln_mag = m * 2.0 * (np.log(np.cos(dt / 2.0)) - np.log(np.sin(dt / 2.0))) + ln_binom
            ln_mag -= ln_mag.max()
            v = np.exp(ln_mag) * np.exp(1j * m * dp)
            out[k] = v / np.linalg.norm(v)
    return out


@lru_cache(maxsize=8)
def _cached_family(two_j: int, resolution: int):
    pts, weight = phase_grid(resolution)
    return projected_family(two_j / 2.0, pts), weight


def husimi(psi, points, J=None):
    """Q(dtheta, dphi) = |<dtheta, dphi | psi>|^2 against the normalized
    projected coherent states.  psi must live in the 2J+1 dimensional
    zero-magnetization block."""
    psi = np.asarray(psi, dtype=complex)
    d = psi.shape[0]
    if J is None:
        J = (d - 1) / 2.0
    if int(round(2 * J)) + 1 != d:
        raise DomainError(f"state dimension {d} does not match J={J}")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise DomainError("grid must be nonempty")
    fam = projected_family(J, pts)
    return np.abs(fam.conj() @ psi) ** 2


def husimi_entropy(psi, resolution=64):
    """Phase-space (Wehrl-style) entropy -sum w Q ln Q of the Husimi
    distribution on the uniform (cos dtheta, dphi) grid.

    Q <= 1 pointwise, so the sum is non-negative; it converges to the
    continuum integral as the grid refines.  Only rankings of this number
    are consumed downstream (the regular/chaotic eigenstate filter).
    """
    if resolution < 16:
        raise DomainError("resolution must be >= 16 points per axis")
    psi = np.asarray(psi, dtype=complex)
    d = psi.shape[0]
    fam, weight = _cached_family(int(round(d - 1)), resolution)
    q = np.abs(fam.conj() @ psi) ** 2
    return float(weight * np.sum(_neg_q_ln_q(q)))


def _neg_q_ln_q(q):
    out = np.zeros_like(q)
    mask = q > 1e-300
    out[mask] = -q[mask] * np.log(q[mask])
    return out


def basis_entropy(amplitudes):
    """Shannon entropy (natural log) of |c_i|^2 for one ket or for each
    column of a matrix of kets.  For states in the zero-magnetization block
    the product basis is the Schmidt basis, so this is the entanglement."""
    a = np.asarray(amplitudes)
    p = np.abs(a) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(p > 1e-300, -p * np.log(np.where(p > 1e-300, p, 1.0)), 0.0)
    return t.sum(axis=0)
