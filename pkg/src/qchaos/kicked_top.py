"""Kicked-top Floquet operators (with and without time-reversal symmetry),
the classical map on the unit sphere, Poincare sections, and the
time-reversal identity check.

One period is: linear precession by alpha about x, then an impulsive twist
about z whose angle is proportional to the z-projection.  Quantum map:
U = exp(-i lambda Jz^2 / 2j) exp(-i alpha Jx).
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .spin import SpinQuantum, build_spin_ops

__all__ = [
    "KickedTopSpec", "KickedTopNoTRSpec", "floquet_kicked_top",
    "floquet_kicked_top_no_tr", "classical_kicked_top_step",
    "poincare_section", "time_reversal_check", "rotation_about",
]


@dataclass(frozen=True)
class KickedTopSpec:
    j: float
    alpha: float = 1.4
    lam: float = 7.0       # twist strength, the chaoticity knob

    def __post_init__(self):
        SpinQuantum(self.j)
        if not (np.isfinite(self.alpha) and np.isfinite(self.lam)):
            raise DomainError("alpha and lam must be finite")


@dataclass(frozen=True)
class KickedTopNoTRSpec:
    """Three twist-plus-rotation factors, one per axis x, y, z."""

    j: float
    lams: tuple = (7.0, 7.5, 8.0)
    alphas: tuple = (1.4, 1.1, 0.9)

    def __post_init__(self):
        SpinQuantum(self.j)
        if len(self.lams) != 3 or len(self.alphas) != 3:
            raise DomainError("need one (lam, alpha) pair per axis")
        if not all(np.isfinite(v) for v in (*self.lams, *self.alphas)):
            raise DomainError("parameters must be finite")


def _expm_hermitian(H, scale=1.0):
    """exp(-i * scale * H) for Hermitian H via spectral decomposition."""
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * scale * w)) @ V.conj().T


def rotation_about(j, axis, angle):
    """exp(-i angle J_axis): right-handed rotation of expectations by +angle."""
    ops = build_spin_ops(j)
    return _expm_hermitian(ops[axis], angle)


def floquet_kicked_top(spec: KickedTopSpec):
    """U = exp(-i lam Jz^2/(2j)) exp(-i alpha Jx); unitary of size 2j+1."""
    ops = build_spin_ops(spec.j)
    m = np.diag(ops["z"]).real
    twist = np.exp(-1j * spec.lam * m ** 2 / (2.0 * spec.j))
    rot = _expm_hermitian(ops["x"], spec.alpha)
    return twist[:, None] * rot


def floquet_kicked_top_no_tr(spec: KickedTopNoTRSpec):
    """Product of twist-plus-rotation factors about x, y and z; the z factor
    acts first.  Generic parameters break time reversal."""
    ops = build_spin_ops(spec.j)
    U = np.eye(SpinQuantum(spec.j).dim, dtype=complex)
    for axis, lam, alpha in zip("xyz", spec.lams, spec.alphas):
        Jn = ops[axis]
        gen = lam * (Jn @ Jn) / (2.0 * spec.j) + alpha * Jn
        U = U @ _expm_hermitian(gen)
    return U


def _rot_x(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _rot_z(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def classical_kicked_top_step(p, alpha, lam):
    """One period of the classical map: p' = R_z(lam * (R_x(alpha) p)_z) R_x(alpha) p."""
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise DomainError("expected a 3-vector")
    q = p @ _rot_x(alpha).T
    if q.ndim == 1:
        out = q @ _rot_z(lam * q[2]).T
        return out / np.linalg.norm(out)   # kill roundoff drift; |p'| = 1 exactly
    out = np.empty_like(q)
    ang = lam * q[..., 2]
    c, s = np.cos(ang), np.sin(ang)
    out[..., 0] = c * q[..., 0] - s * q[..., 1]
    out[..., 1] = s * q[..., 0] + c * q[..., 1]
    out[..., 2] = q[..., 2]
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def poincare_section(spec: KickedTopSpec, seeds, n_steps):
    """Iterate the classical map; returns (n_seeds, n_steps, 3) of the mapped
    points (the seed itself is not included)."""
    if n_steps < 1:
        raise DomainError("n_steps must be >= 1")
    pts = np.asarray(seeds, dtype=float).reshape(-1, 3)
    norms = np.linalg.norm(pts, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise DomainError("seeds must lie on the unit sphere")
    out = np.empty((len(pts), n_steps, 3))
    cur = pts.copy()
    for k in range(n_steps):
        cur = classical_kicked_top_step(cur, spec.alpha, spec.lam)
        out[:, k, :] = cur
    return out


def time_reversal_check(U, T_rotation):
    """Residual of the antiunitary reversal identity.

    With T = T_rot K (K = conjugation in the standard basis), time-reversal
    invariance means T U T^{-1} = U^dagger; the returned number is
    max |T_rot conj(U) T_rot^dagger - U^dagger|.
    """
    U = np.asarray(U, dtype=complex)
    T = np.asarray(T_rotation, dtype=complex)
    if U.shape != T.shape or U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DomainError("U and T_rotation must be square matrices of equal size")
    lhs = T @ U.conj() @ T.conj().T
    return float(np.max(np.abs(lhs - U.conj().T)))
