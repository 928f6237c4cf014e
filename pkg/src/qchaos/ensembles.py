"""Random states and random-matrix ensembles (CUE, COE, GOE, GUE), the 2x2
symmetric-unitary eigenphase-spacing law, and closed forms for the typical
entanglement of random vectors in a fixed-Schmidt-basis subspace.

Seeds: every sampler takes either an integer seed or a numpy Generator.
Parallel callers must supply disjoint seeds; the package-wide convention is
child k of a run seed s = np.random.SeedSequence(s).spawn(...)[k].
"""

import numpy as np
from scipy.special import digamma

from .exceptions import DomainError

__all__ = [
    "sample_state", "sample_unitary", "sample_hermitian",
    "coe2_spacing_pdf", "coe2_spacing_support", "sample_coe2_spacings",
    "harmonic", "typical_entanglement",
]

EULER_GAMMA = np.euler_gamma


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_state(d, field="complex", seed=None):
    """Normalized random vector with i.i.d. Gaussian components before
    normalization -- the uniform measure on the real or complex unit sphere."""
    if d < 1:
        raise DomainError("d must be >= 1")
    rng = _rng(seed)
    if field == "complex":
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    elif field == "real":
        v = rng.standard_normal(d).astype(complex)
    else:
        raise DomainError(f"unknown field {field!r}")
    return v / np.linalg.norm(v)


def sample_unitary(d, kind="cue", seed=None):
    """Haar-random unitary (cue) or symmetric unitary U^T U (coe).

    CUE uses QR of a complex Ginibre matrix with the phase fix
    Q <- Q diag(r_kk/|r_kk|) that makes the distribution exactly Haar.
    """
    if d < 1:
        raise DomainError("d must be >= 1")
    rng = _rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    if kind == "cue":
        return q
    if kind == "coe":
        return q.T @ q
    raise DomainError(f"unknown circular ensemble {kind!r}")


def sample_hermitian(d, kind="goe", seed=None):
    """GOE: (A + A^T)/2 with real Gaussian A; GUE: (A + A^dagger)/2 complex."""
    if d < 2:
        raise DomainError("d must be >= 2")
    rng = _rng(seed)
    if kind == "goe":
        a = rng.standard_normal((d, d))
        return ((a + a.T) / 2.0).astype(complex)
    if kind == "gue":
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        return (a + a.conj().T) / 2.0
    raise DomainError(f"unknown Gaussian ensemble {kind!r}")


def coe2_spacing_support(R):
    """Support edges (a, b) of the positive spacing branch, 0 < a < b < 2pi."""
    if not (0.0 < R <= 1.0):
        raise DomainError("R must lie in (0, 1]")
    a = np.pi - 2.0 * np.arcsin(np.sqrt(R))
    return a, 2.0 * np.pi - a


def coe2_spacing_pdf(R, alpha_spacing):
    """Eigenphase-spacing density of the 2x2 symmetric unitary with fixed
    reflection weight R and uniform phases.

    P(alpha) = |sin(alpha/2)| / (4 pi sqrt(R - cos^2(alpha/2))) on the two
    signed branches alpha in (-2pi, 2pi) with cos^2(alpha/2) < R; zero
    elsewhere.  Integrates to 1 over both branches, exhibiting square-root
    divergences at the edges (level repulsion kills the density near 0).
    """
    if not (0.0 < R <= 1.0):
        raise DomainError("R must lie in (0, 1]")
    a = np.asarray(alpha_spacing, dtype=float)
    c2 = np.cos(a / 2.0) ** 2
    inside = (c2 < R) & (np.abs(a) < 2.0 * np.pi)
    out = np.zeros_like(a)
    denom = np.sqrt(np.where(inside, R - c2, 1.0))
    out = np.where(inside, np.abs(np.sin(a / 2.0)) / (4.0 * np.pi * denom), 0.0)
    return out if out.ndim else float(out)


def sample_coe2_spacings(R, n, seed=None):
    """Signed eigenphase spacings of n sampled 2x2 symmetric unitaries
    [[sqrt(R) e^{i g}, sqrt(T) e^{i e}], [sqrt(T) e^{i e}, -sqrt(R) e^{i(2e-g)}]]
    with independent uniform phases, T = 1 - R.

    Each spectrum defines two complementary arcs between its eigenphases;
    labelling is arbitrary, so one arc is chosen uniformly and given a
    uniform sign.  (Taking the principal-value angle difference instead
    would overweight short arcs by the branch-cut position.)
    """
    if not (0.0 < R <= 1.0):
        raise DomainError("R must lie in (0, 1]")
    rng = _rng(seed)
    g = rng.uniform(0.0, 2.0 * np.pi, n)
    e = rng.uniform(0.0, 2.0 * np.pi, n)
    pick = rng.integers(0, 2, n)
    sign = rng.integers(0, 2, n) * 2 - 1
    sr, st = np.sqrt(R), np.sqrt(1.0 - R)
    out = np.empty(n)
    for k in range(n):
        M = np.array([[sr * np.exp(1j * g[k]), st * np.exp(1j * e[k])],
                      [st * np.exp(1j * e[k]), -sr * np.exp(1j * (2 * e[k] - g[k]))]])
        ev = np.linalg.eigvals(M)
        arc = np.mod(np.angle(ev[0]) - np.angle(ev[1]), 2.0 * np.pi)
        out[k] = sign[k] * (arc if pick[k] else 2.0 * np.pi - arc)
    return out


def harmonic(x):
    """Harmonic number H_x: exact partial sum for integer x, digamma
    continuation psi(x+1) + gamma otherwise."""
    if x <= 0:
        raise DomainError("harmonic argument must be positive")
    if abs(x - round(x)) < 1e-12:
        n = int(round(x))
        return float(np.sum(1.0 / np.arange(1, n + 1)))
    return float(digamma(x + 1.0) + EULER_GAMMA)


def typical_entanglement(kind, d, d2=None):
    """Closed-form mean entanglement of random states (natural log).

    kind:
      real_subspace     H_{d/2} + ln 4 - 2   (time-reversal-invariant vectors
                                              in a fixed-Schmidt-basis subspace)
      complex_subspace  H_d - 1
      page              sum_{k=d1+1}^{d1 d2} 1/k - (d1-1)/(2 d2),  d2 >= d1
                        (full bipartite product space; here d = d1)
      linear_real       1 - 3/(d+2)          (linear entropy)
      linear_complex    1 - 2/(d+1)
    """
    if d < 1:
        raise DomainError("d must be >= 1")
    if kind == "real_subspace":
        return harmonic(d / 2.0) + np.log(4.0) - 2.0
    if kind == "complex_subspace":
        return harmonic(float(d)) - 1.0
    if kind == "page":
        if d2 is None or d2 < d:
            raise DomainError("page requires d2 >= d1")
        ks = np.arange(d + 1, d * d2 + 1, dtype=float)
        return float(np.sum(1.0 / ks) - (d - 1.0) / (2.0 * d2))
    if kind == "linear_real":
        return 1.0 - 3.0 / (d + 2.0)
    if kind == "linear_complex":
        return 1.0 - 2.0 / (d + 1.0)
    raise DomainError(f"unknown typical-entanglement kind {kind!r}")
