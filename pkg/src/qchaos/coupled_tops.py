"""Kicked coupled-tops: Floquet block on the zero-magnetization subspace,
the classical two-spin map, chaos classification, dynamical and eigenstate
entanglement, and the regular/chaotic eigenstate filter.

The system is two equal spins coupled isotropically, with a periodic kick
about z acting on one of them.  Quantumly one period is
U = exp(-i (alpha/J) F^2 / 2) exp(-i beta Jz), block-diagonal in the total
z-projection; everything here lives in the largest (zero) block, dimension
2J+1, where the product basis is simultaneously the Schmidt basis.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import schur

from .exceptions import DomainError, NumericError
from .spin import (SpinQuantum, basis_entropy, cg_fixed_m_table,
                   husimi_entropy, projected_family)

__all__ = [
    "CoupledTopsSpec", "TwoSpinState", "FloquetEigensystem",
    "floquet_coupled_block", "state_from_delta", "classical_coupled_step",
    "lyapunov_classify", "floquet_eigensystem", "eigenstate_entanglement",
    "evolve_entanglement_history", "spectral_entanglement_history",
    "long_time_average_map", "percival_filter",
    "chaotic_subspace_random_entanglement",
    "LYAPUNOV_STEPS", "LYAPUNOV_THRESHOLD", "LYAPUNOV_DELTA0",
    "TIME_AVG_WINDOW", "DEFAULT_GRID", "SQ_PERCENTILE",
]

LYAPUNOV_STEPS = 1000
LYAPUNOV_THRESHOLD = 0.02      # per step
LYAPUNOV_DELTA0 = 1e-8
TIME_AVG_WINDOW = (300, 320)   # inclusive
DEFAULT_GRID = 60
SQ_PERCENTILE = 75.0


@dataclass(frozen=True)
class CoupledTopsSpec:
    """Equal spins I = J; alpha is the classical coupling strength (the
    quantum block uses alpha/J), beta the kick angle."""

    J: float
    alpha: float
    beta: float = np.pi / 2

    def __post_init__(self):
        SpinQuantum(self.J)
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise DomainError("alpha and beta must be finite")

    @property
    def dim(self) -> int:
        return int(round(2 * self.J)) + 1


@dataclass
class TwoSpinState:
    i_vec: np.ndarray
    j_vec: np.ndarray

    def __post_init__(self):
        self.i_vec = np.asarray(self.i_vec, dtype=float)
        self.j_vec = np.asarray(self.j_vec, dtype=float)
        for v in (self.i_vec, self.j_vec):
            if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > 1e-9:
                raise DomainError("spin vectors must be unit 3-vectors")


@dataclass
class FloquetEigensystem:
    phases: np.ndarray            # eigenphases in [0, 2pi)
    vectors: np.ndarray           # orthonormal columns, U v_k = e^{i phi_k} v_k
    residual: float = field(default=0.0)


def floquet_coupled_block(spec: CoupledTopsSpec):
    """(2J+1)x(2J+1) unitary on the uncoupled basis |I,-m>|J,m>, m=+J..-J.

    Element (m', m) = exp(-i beta m) * sum_F exp(-i alpha F(F+1)/(2J))
    <F0|I,-m';J,m'><F0|I,-m;J,m>.
    """
    J = SpinQuantum(spec.J).j
    m1, F, table = cg_fixed_m_table(J, J, 0.0)
    # table rows are indexed by m1 = m_I descending; our basis is labelled by
    # m = m_J = -m_I descending, i.e. rows reversed
    C = table[::-1, :]
    m = np.arange(J, -J - 1, -1.0)
    phases = np.exp(-1j * (spec.alpha / J) * F * (F + 1.0) / 2.0)
    U = (C * phases) @ C.T
    return U * np.exp(-1j * spec.beta * m)[None, :]


def state_from_delta(delta_theta, delta_phi):
    """Classical phase-space point for the difference coordinates: the J spin
    at polar angle delta_theta (azimuth 0), the I spin at pi - delta_theta
    (azimuth delta_phi); total z-projection is zero."""
    if not (0.0 <= delta_theta <= np.pi):
        raise DomainError("delta_theta must lie in [0, pi]")
    ti = np.pi - delta_theta
    i_vec = np.array([np.sin(ti) * np.cos(delta_phi),
                      np.sin(ti) * np.sin(delta_phi),
                      np.cos(ti)])
    j_vec = np.array([np.sin(delta_theta), 0.0, np.cos(delta_theta)])
    return TwoSpinState(i_vec, j_vec)


def _rotate_about(axis, angle, v):
    """Rodrigues rotation, broadcast over leading axes."""
    c = np.cos(angle)[..., None] if np.ndim(angle) else np.cos(angle)
    s = np.sin(angle)[..., None] if np.ndim(angle) else np.sin(angle)
    ndotv = np.sum(axis * v, axis=-1, keepdims=True)
    return v * c + np.cross(axis, v) * s + axis * ndotv * (1.0 - c)


def _step_vectors(i_vec, j_vec, alpha, beta):
    """Vectorized classical step on arrays of shape (..., 3)."""
    cb, sb = np.cos(beta), np.sin(beta)
    jk = np.empty_like(j_vec)
    jk[..., 0] = cb * j_vec[..., 0] - sb * j_vec[..., 1]
    jk[..., 1] = sb * j_vec[..., 0] + cb * j_vec[..., 1]
    jk[..., 2] = j_vec[..., 2]
    F = i_vec + jk
    Fn = np.linalg.norm(F, axis=-1, keepdims=True)
    safe = Fn > 1e-14
    axis = np.where(safe, F / np.where(safe, Fn, 1.0), 0.0)
    angle = alpha * Fn[..., 0]
    return _rotate_about(axis, angle, i_vec), _rotate_about(axis, angle, jk)


def classical_coupled_step(state: TwoSpinState, alpha, beta):
    """Kick the J spin about z by beta, then precess both spins about their
    instantaneous sum by alpha*|F|.  |F| = 0 makes the precession the
    identity.  Conserves both norms and the total z-projection."""
    i2, j2 = _step_vectors(state.i_vec, state.j_vec, alpha, beta)
    return TwoSpinState(i2, j2)


@dataclass
class LyapunovResult:
    chaotic: bool
    rate: float


def lyapunov_classify(delta, spec: CoupledTopsSpec, n_steps=LYAPUNOV_STEPS,
                      threshold=LYAPUNOV_THRESHOLD, delta0=LYAPUNOV_DELTA0):
    """Two-trajectory stretching rate with per-step renormalization.

    delta is a (delta_theta, delta_phi) pair.  Classified chaotic when the
    mean log stretching per step exceeds the threshold.
    """
    if n_steps < 500:
        raise DomainError("n_steps must be >= 500 for a stable estimate")
    dt, dp = delta
    rate = _lyapunov_rates(np.array([dt]), np.array([dp]),
                           spec.alpha, spec.beta, n_steps, delta0)[0]
    return LyapunovResult(chaotic=bool(rate > threshold), rate=float(rate))


def _lyapunov_rates(dths, dphs, alpha, beta, n_steps, delta0):
    ti = np.pi - dths
    Ia = np.stack([np.sin(ti) * np.cos(dphs), np.sin(ti) * np.sin(dphs), np.cos(ti)], -1)
    Ja = np.stack([np.sin(dths), np.zeros_like(dths), np.cos(dths)], -1)
    # partner trajectory: I tilted about x by delta0
    c, s = np.cos(delta0), np.sin(delta0)
    Ib = np.stack([Ia[..., 0], c * Ia[..., 1] - s * Ia[..., 2],
                   s * Ia[..., 1] + c * Ia[..., 2]], -1)
    Jb = Ja.copy()
    acc = np.zeros(len(dths))
    for _ in range(n_steps):
        Ia, Ja = _step_vectors(Ia, Ja, alpha, beta)
        Ib, Jb = _step_vectors(Ib, Jb, alpha, beta)
        dI = Ib - Ia
        dJ = Jb - Ja
        dist = np.sqrt(np.sum(dI * dI, -1) + np.sum(dJ * dJ, -1))
        dist = np.maximum(dist, 1e-300)
        acc += np.log(dist / delta0)
        f = (delta0 / dist)[..., None]
        Ib = Ia + dI * f
        Jb = Ja + dJ * f
        Ib /= np.linalg.norm(Ib, axis=-1, keepdims=True)
        Jb /= np.linalg.norm(Jb, axis=-1, keepdims=True)
    return acc / n_steps


def floquet_eigensystem(U):
    """Orthonormal eigensystem of a unitary via complex Schur decomposition
    (exactly diagonal for normal matrices)."""
    U = np.asarray(U, dtype=complex)
    d = U.shape[0]
    if np.max(np.abs(U @ U.conj().T - np.eye(d))) > 1e-8:
        raise DomainError("input is not unitary")
    T, Z = schur(U, output="complex")
    phases = np.mod(np.angle(np.diag(T)), 2.0 * np.pi)
    residual = float(np.max(np.abs(U @ Z - Z * np.exp(1j * phases)[None, :])))
    if residual > 1e-8:
        raise NumericError(f"eigensystem residual {residual:.3e} exceeds 1e-8")
    return FloquetEigensystem(phases=phases, vectors=Z, residual=residual)


def eigenstate_entanglement(es: FloquetEigensystem):
    """Entanglement of each eigenstate: Shannon entropy of |c_m|^2 in the
    product (= Schmidt) basis, natural log."""
    return basis_entropy(es.vectors)


def evolve_entanglement_history(psi0, U, n_steps):
    """E(n) for n = 0..n_steps under repeated application of U."""
    psi = np.asarray(psi0, dtype=complex).copy()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise DomainError("initial state must be normalized")
    out = np.empty(n_steps + 1)
    out[0] = basis_entropy(psi)
    for n in range(1, n_steps + 1):
        psi = U @ psi
        out[n] = basis_entropy(psi)
    return out


def spectral_entanglement_history(psi0, es: FloquetEigensystem, steps):
    """E(n) at the given steps via the eigenphase expansion
    c_m(n) = sum_k a_k e^{i n phi_k} <m|k>; equivalent to iterating U."""
    a = es.vectors.conj().T @ np.asarray(psi0, dtype=complex)
    out = np.empty(len(steps))
    for i, n in enumerate(steps):
        c = es.vectors @ (a * np.exp(1j * n * es.phases))
        out[i] = basis_entropy(c)
    return out


def long_time_average_map(spec: CoupledTopsSpec, points, window=TIME_AVG_WINDOW,
                          es: FloquetEigensystem = None):
    """Mean entanglement over the late-time window for projected coherent
    initial states at each grid point.  Returns an array aligned with points."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise DomainError("grid must be nonempty")
    if es is None:
        es = floquet_eigensystem(floquet_coupled_block(spec))
    P0 = projected_family(spec.J, pts).T          # (d, n)
    A = es.vectors.conj().T @ P0
    w0, w1 = window
    acc = np.zeros(P0.shape[1])
    for n in range(w0, w1 + 1):
        Cn = es.vectors @ (A * np.exp(1j * n * es.phases)[:, None])
        acc += basis_entropy(Cn)
    return acc / (w1 - w0 + 1)


def percival_filter(es: FloquetEigensystem, sq_threshold=None, jz_threshold=0.0,
                    resolution=64):
    """Split eigenstates into chaotic and regular sets.

    Chaotic means phase-space entropy above sq_threshold (default: the 75th
    percentile across the spectrum) AND mean z-projection of the kicked spin
    above jz_threshold.  The filter is deliberately crude; thresholds are
    knobs.  Returns (chaotic_indices, regular_indices).
    """
    d = es.vectors.shape[0]
    J = (d - 1) / 2.0
    sq = np.array([husimi_entropy(es.vectors[:, k], resolution) for k in range(d)])
    m = np.arange(J, -J - 1, -1.0)
    jz_mean = (np.abs(es.vectors) ** 2 * m[:, None]).sum(axis=0)
    if sq_threshold is None:
        sq_threshold = np.percentile(sq, SQ_PERCENTILE)
    chaotic = (sq > sq_threshold) & (jz_mean > jz_threshold)
    idx = np.arange(d)
    return idx[chaotic], idx[~chaotic]


def eigenstate_diagnostics(es: FloquetEigensystem, resolution=64):
    """Per-eigenstate (eigenphase, entanglement, S_Q, <Jz>) for export."""
    d = es.vectors.shape[0]
    J = (d - 1) / 2.0
    m = np.arange(J, -J - 1, -1.0)
    sq = np.array([husimi_entropy(es.vectors[:, k], resolution) for k in range(d)])
    jz_mean = (np.abs(es.vectors) ** 2 * m[:, None]).sum(axis=0)
    return es.phases, eigenstate_entanglement(es), sq, jz_mean


def chaotic_subspace_random_entanglement(es: FloquetEigensystem, chaotic_indices,
                                         n_samples=100, seed=0):
    """Mean entanglement of random kets supported on the chaotic eigenstates,
    with Gaussian real and imaginary parts for every expansion coefficient."""
    chaotic_indices = np.asarray(chaotic_indices, dtype=int)
    if chaotic_indices.size == 0:
        raise DomainError("chaotic set is empty")
    rng = np.random.default_rng(seed)
    sub = es.vectors[:, chaotic_indices]
    k = sub.shape[1]
    z = rng.standard_normal((k, n_samples)) + 1j * rng.standard_normal((k, n_samples))
    psi = sub @ z
    psi /= np.linalg.norm(psi, axis=0)
    return float(np.mean(basis_entropy(psi)))
