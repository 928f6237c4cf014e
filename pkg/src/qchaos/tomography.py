"""Continuous-measurement tomography: Heisenberg observable histories under
Floquet driving, noisy record synthesis, linear maximum-likelihood inversion
with a positivity-constrained refinement, and information-gain metrics.

The estimation chain: parametrize rho = 1/d + sum_a r_a E_a over an
orthonormal traceless Hermitian basis, build the design matrix
O_ia = Tr(O_i E_a) from the measured observable's Heisenberg history,
invert the record by pseudoinverse (singular values below 1e-10 of the
largest are treated as zero), and when the linear estimate is unphysical,
find the closest physical state in the inverse-covariance metric: weakly
measured directions are cheap to move, well measured ones are pinned.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import DomainError
from .kicked_top import (KickedTopNoTRSpec, KickedTopSpec, floquet_kicked_top,
                         floquet_kicked_top_no_tr)
from .spin import build_spin_ops
from .ensembles import sample_state, sample_unitary

__all__ = [
    "operator_basis", "bloch_vector", "rho_from_bloch", "observable_history",
    "design_matrix", "MeasurementRecord", "simulate_record",
    "ReconstructionResult", "reconstruct", "info_metrics", "fidelity",
    "TomographyConfig", "TomographyReport", "tomography_experiment",
    "driver_history", "PINV_RTOL", "NULL_WEIGHT_FACTOR",
]

PINV_RTOL = 1e-10          # singular values below PINV_RTOL * s_max count as zero
NULL_WEIGHT_FACTOR = 1e-6  # metric weight of null directions, x smallest kept s^2
DRIVERS = ("kicked_top", "kicked_top_no_tr", "coe_fixed", "cue_fixed", "haar_fresh")


@lru_cache(maxsize=16)
def _basis_layout(d: int):
    """Index bookkeeping for the generalized Gell-Mann basis of su(d).

    Order: for each pair a<b (row-major) the symmetric then antisymmetric
    element, then the d-1 diagonal ladder matrices.
    """
    iu = np.triu_indices(d, 1)
    n_off = iu[0].size
    flat_up = iu[0] * d + iu[1]
    flat_lo = iu[1] * d + iu[0]
    diag_flat = np.arange(d) * d + np.arange(d)
    sym = np.arange(0, 2 * n_off, 2)
    asym = np.arange(1, 2 * n_off, 2)
    diag = np.arange(2 * n_off, d * d - 1)
    H = np.zeros((d - 1, d))
    for l in range(1, d):
        H[l - 1, :l] = 1.0
        H[l - 1, l] = -l
        H[l - 1] /= np.sqrt(l * (l + 1.0))
    return flat_up, flat_lo, diag_flat, sym, asym, diag, H


def operator_basis(d):
    """d^2-1 orthonormal traceless Hermitian matrices, Tr(E_a E_b) = delta."""
    if d < 2:
        raise DomainError("d must be >= 2")
    flat_up, flat_lo, diag_flat, sym, asym, diag, H = _basis_layout(d)
    D = d * d - 1
    E = np.zeros((D, d * d), dtype=complex)
    isq2 = 1.0 / np.sqrt(2.0)
    E[sym[:, None], np.stack([flat_up, flat_lo], 1)] = isq2
    E[asym, flat_up] = -1j * isq2
    E[asym, flat_lo] = 1j * isq2
    E[diag[:, None], diag_flat[None, :]] = H
    return E.reshape(D, d, d)


def bloch_vector(rho):
    """Components of rho (or a stack of rhos) on the operator basis."""
    rho = np.asarray(rho, dtype=complex)
    single = rho.ndim == 2
    if single:
        rho = rho[None]
    d = rho.shape[-1]
    flat_up, flat_lo, diag_flat, sym, asym, diag, H = _basis_layout(d)
    rf = rho.reshape(rho.shape[0], -1)
    r = np.empty((rho.shape[0], d * d - 1))
    off = rf[:, flat_up]
    r[:, sym] = np.sqrt(2.0) * off.real
    r[:, asym] = -np.sqrt(2.0) * off.imag
    r[:, diag] = rf[:, diag_flat].real @ H.T
    return r[0] if single else r


def rho_from_bloch(r, d):
    """rho = 1/d + sum_a r_a E_a for one vector or a stack."""
    r = np.asarray(r, dtype=float)
    single = r.ndim == 1
    if single:
        r = r[None]
    flat_up, flat_lo, diag_flat, sym, asym, diag, H = _basis_layout(d)
    rho = np.zeros((r.shape[0], d * d), dtype=complex)
    off = (r[:, sym] - 1j * r[:, asym]) / np.sqrt(2.0)
    rho[:, flat_up] = off
    rho[:, flat_lo] = off.conj()
    rho[:, diag_flat] = r[:, diag] @ H + 1.0 / d
    rho = rho.reshape(-1, d, d)
    return rho[0] if single else rho


def observable_history(U, O0, n_steps):
    """Heisenberg history O_i = (U^dag)^i O_0 U^i for i = 1..n_steps."""
    U = np.asarray(U, dtype=complex)
    O = np.asarray(O0, dtype=complex)
    if U.shape != O.shape or U.ndim != 2:
        raise DomainError("U and O0 must be square matrices of equal size")
    if np.max(np.abs(O - O.conj().T)) > 1e-10:
        raise DomainError("O0 must be Hermitian")
    out = np.empty((n_steps,) + O.shape, dtype=complex)
    cur = O
    Ud = U.conj().T
    for i in range(n_steps):
        cur = Ud @ cur @ U
        out[i] = cur
    return out


def design_matrix(history):
    """Rows Tr(O_i E_a); also returns the traceful offsets Tr(O_i)/d."""
    hist = np.asarray(history, dtype=complex)
    d = hist.shape[-1]
    rows = bloch_vector(hist)  # Tr(O E_a) = components since basis orthonormal
    offsets = np.einsum("ikk->i", hist).real / d
    return rows, offsets


@dataclass
class MeasurementRecord:
    values: np.ndarray
    sigma: float
    n_steps: int
    seed: object = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.n_steps,):
            raise DomainError("record length must equal n_steps")
        if self.sigma < 0:
            raise DomainError("sigma must be >= 0")


def simulate_record(rho0, history, sigma, seed=None):
    """M_i = Tr(O_i rho0) + sigma W_i with i.i.d. standard normal W."""
    rho0 = np.asarray(rho0, dtype=complex)
    hist = np.asarray(history, dtype=complex)
    clean = np.einsum("ijk,kj->i", hist, rho0).real
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    noise = rng.standard_normal(len(clean)) if sigma > 0 else np.zeros(len(clean))
    return MeasurementRecord(values=clean + sigma * noise, sigma=float(sigma),
                             n_steps=len(clean), seed=seed)


@dataclass
class ReconstructionResult:
    r_ml: np.ndarray
    covariance_inverse_eigenvalues: np.ndarray
    rho_bar: np.ndarray
    entropy_E: float
    fisher: float
    rank: int
    objective: float
    iterations: int
    converged: bool


def _weighted_design(rows):
    """Full SVD split into kept/null directions plus the positivity metric
    weights (s_k^2 on kept directions, a tiny floor on the rest)."""
    n, D = rows.shape
    U, s, Vt = np.linalg.svd(rows, full_matrices=True)
    smax = s[0] if len(s) else 0.0
    keep = s > PINV_RTOL * smax if smax > 0 else np.zeros(0, bool)
    s_kept = s[keep]
    rank = int(keep.sum())
    V = Vt.T  # (D, D) complete orthonormal basis of parameter space
    w = np.full(D, (s_kept.min() ** 2) * NULL_WEIGHT_FACTOR if rank else 1.0)
    w[:rank] = s_kept ** 2
    return U[:, :len(s)], s, V, w, rank, keep


def _solve_positivity(Rml, V, w, d, warm=None, tol=1e-8, max_iter=10000,
                      omega=1.8):
    """Projected gradient on f(r) = (r-r_ml)^T W (r-r_ml) over physical
    states, with the PSD projection implemented as eigenvalue clipping plus
    trace renormalization.  The fixed-point update is over-relaxed
    (x <- x + omega (P(x - eta grad) - x), omega in (0,2)) to speed up the
    crawl along weakly weighted directions; the stall test and the returned
    state use the feasible projected iterate.  States leave the batch when
    their relative objective change drops below tol.

    Returns (r_bar, objective, iterations, converged)."""
    single = Rml.ndim == 1
    R = Rml[None] if single else Rml
    ns = R.shape[0]
    Xml = R @ V
    x = _project_x(R, V, d) if warm is None else (warm if warm.ndim == 2 else warm[None]) @ V
    eta = 1.0 / (2.0 * w.max())
    out_x = x.copy()
    iters = np.zeros(ns, int)
    objs = np.full(ns, np.inf)
    conv = np.zeros(ns, bool)
    active = np.arange(ns)
    dx0 = x - Xml
    objprev = ((dx0 * dx0) * w).sum(1)
    xml_a = Xml
    it = 0
    while len(active) and it < max_iter:
        it += 1
        xg = x - eta * 2.0 * w * (x - xml_a)
        xp = _project_x(xg @ V.T, V, d)
        dx = xp - xml_a
        obj = ((dx * dx) * w).sum(1)
        rel = np.abs(obj - objprev) / np.maximum(obj, 1e-300)
        done = rel < tol
        if done.any():
            idx = active[done]
            out_x[idx] = xp[done]
            iters[idx] = it
            objs[idx] = obj[done]
            conv[idx] = True
            kp = ~done
            active = active[kp]
            x, xp, obj, xml_a = x[kp], xp[kp], obj[kp], xml_a[kp]
        x = x + omega * (xp - x)
        objprev = obj
    if len(active):
        out_x[active] = xp
        iters[active] = max_iter
        objs[active] = objprev
    out = out_x @ V.T
    if single:
        return out[0], float(objs[0]), int(iters[0]), bool(conv[0])
    return out, objs, iters, conv


def _project_x(R, V, d):
    """Clip rho(r) to the PSD cone, renormalize the trace, return in V basis."""
    rho = rho_from_bloch(R, d)
    if rho.ndim == 2:
        rho = rho[None]
    ev, W = np.linalg.eigh(rho)
    ev = np.clip(ev, 0.0, None)
    tot = ev.sum(1, keepdims=True)
    ev = np.where(tot > 0, ev / np.where(tot > 0, tot, 1.0), 1.0 / d)
    rho = (W * ev[:, None, :]) @ W.conj().transpose(0, 2, 1)
    return bloch_vector(rho) @ V


def reconstruct(record, history, sigma=None, tol=1e-8, max_iter=10000):
    """Maximum-likelihood inversion of a measurement record with positivity.

    Builds the design matrix from the history, solves the linear problem by
    pseudoinverse, and if the linear estimate has eigenvalues below -1e-9
    refines it to the closest physical state in the inverse-covariance
    metric.  Diagnostics carry the information metrics of the accumulated
    record.
    """
    if isinstance(record, MeasurementRecord):
        values = record.values
        if sigma is None:
            sigma = record.sigma
    else:
        values = np.asarray(record, dtype=float)
        if sigma is None:
            raise DomainError("sigma required when record is a bare array")
    hist = np.asarray(history, dtype=complex)
    if len(values) == 0:
        raise DomainError("empty record")
    if len(values) != len(hist):
        raise DomainError("record and history lengths differ")
    d = hist.shape[-1]
    rows, offsets = design_matrix(hist)
    Usv, s, V, w, rank, keep = _weighted_design(rows)
    y = values - offsets
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    r_ml = V[:, :len(s)] @ (s_inv * (Usv.T @ y))
    scale = sigma ** 2 if sigma and sigma > 0 else 1.0
    cov_inv = np.zeros(d * d - 1)
    cov_inv[:rank] = (s[keep] ** 2) / scale
    entropy_E, fisher = info_metrics(cov_inv)
    rho_ml = rho_from_bloch(r_ml, d)
    if np.linalg.eigvalsh(rho_ml).min() >= -1e-9:
        return ReconstructionResult(
            r_ml=r_ml, covariance_inverse_eigenvalues=cov_inv, rho_bar=rho_ml,
            entropy_E=entropy_E, fisher=fisher, rank=rank,
            objective=0.0, iterations=0, converged=True)
    r_bar, obj, iters, conv = _solve_positivity(r_ml, V, w, d, tol=tol,
                                                max_iter=max_iter)
    return ReconstructionResult(
        r_ml=r_ml, covariance_inverse_eigenvalues=cov_inv,
        rho_bar=rho_from_bloch(r_bar, d), entropy_E=entropy_E, fisher=fisher,
        rank=rank, objective=float(obj), iterations=int(iters),
        converged=bool(conv))


def info_metrics(covariance_inverse_eigenvalues):
    """(entropy, fisher) of the accumulated information.

    Entropy is the Shannon entropy (natural log) of the normalized nonzero
    eigenvalues of the inverse covariance; its ceiling log(d^2-1) is reached
    for perfectly even sampling of operator space.  Fisher is 1/Tr(C) on the
    measured subspace, 1 / sum_k 1/lambda_k.
    """
    lam = np.asarray(covariance_inverse_eigenvalues, dtype=float)
    if lam.size == 0 or np.all(lam <= 0):
        raise DomainError("need at least one positive eigenvalue")
    if lam.min() < 0:
        raise DomainError("eigenvalues must be non-negative")
    nz = lam[lam > 0]
    p = nz / nz.sum()
    entropy = float(-(p * np.log(p)).sum())
    fisher = float(1.0 / np.sum(1.0 / nz))
    return entropy, fisher


def fidelity(psi, rho_bar):
    """<psi| rho |psi> clipped into [0, 1]; psi is a pure target state."""
    psi = np.asarray(psi, dtype=complex)
    rho = np.asarray(rho_bar, dtype=complex)
    if rho.shape != (psi.shape[0], psi.shape[0]):
        raise DomainError("dimension mismatch")
    val = float(np.real(psi.conj() @ rho @ psi))
    if val < -1e-9 or val > 1.0 + 1e-9:
        raise DomainError(f"fidelity {val} outside [0, 1] beyond tolerance")
    return min(max(val, 0.0), 1.0)


def driver_history(driver, j, n_steps, alpha=1.4, lam=7.0,
                   notr_lams=(7.0, 7.5, 8.0), notr_alphas=(1.4, 1.1, 0.9),
                   seed=None):
    """Heisenberg history of O_0 = J_z for the named driving policy."""
    if driver not in DRIVERS:
        raise DomainError(f"unknown driver {driver!r}; choose from {DRIVERS}")
    ops = build_spin_ops(j)
    O0 = ops["z"]
    d = O0.shape[0]
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if driver == "kicked_top":
        U = floquet_kicked_top(KickedTopSpec(j=j, alpha=alpha, lam=lam))
        return observable_history(U, O0, n_steps)
    if driver == "kicked_top_no_tr":
        U = floquet_kicked_top_no_tr(
            KickedTopNoTRSpec(j=j, lams=tuple(notr_lams), alphas=tuple(notr_alphas)))
        return observable_history(U, O0, n_steps)
    if driver == "coe_fixed":
        return observable_history(sample_unitary(d, "coe", rng), O0, n_steps)
    if driver == "cue_fixed":
        return observable_history(sample_unitary(d, "cue", rng), O0, n_steps)
    # haar_fresh: a new Haar unitary composed in at every step
    out = np.empty((n_steps, d, d), dtype=complex)
    cur = O0.astype(complex)
    for i in range(n_steps):
        U = sample_unitary(d, "cue", rng)
        cur = U.conj().T @ cur @ U
        out[i] = cur
    return out


@dataclass
class TomographyConfig:
    driver: str = "kicked_top"
    j: float = 10.0
    alpha: float = 1.4
    lam: float = 7.0
    sigma: float = None          # defaults to 0.05 * j
    n_steps: int = 200
    n_states: int = 100
    seed: int = 0
    fidelity_stride: int = 5     # reconstruct at multiples of this step
    notr_lams: tuple = (7.0, 7.5, 8.0)
    notr_alphas: tuple = (1.4, 1.1, 0.9)
    positivity_tol: float = 1e-8
    positivity_max_iter: int = 10000

    def __post_init__(self):
        if self.driver not in DRIVERS:
            raise DomainError(f"unknown driver {self.driver!r}")
        if self.sigma is None:
            self.sigma = 0.05 * self.j
        if self.sigma < 0:
            raise DomainError("sigma must be >= 0")
        if self.n_steps < 1 or self.n_states < 1:
            raise DomainError("n_steps and n_states must be >= 1")
        if self.fidelity_stride < 1:
            raise DomainError("fidelity_stride must be >= 1")


@dataclass
class TomographyReport:
    config: TomographyConfig
    steps: np.ndarray            # 1..n_steps
    entropy_E: np.ndarray        # per step
    fisher: np.ndarray           # per step
    rank: np.ndarray             # per step
    fidelity_steps: np.ndarray   # steps where reconstruction ran
    mean_fidelity: np.ndarray    # aligned with fidelity_steps
    solver_converged: np.ndarray = field(default=None)

    def fidelity_at(self, step):
        idx = np.where(self.fidelity_steps == step)[0]
        if idx.size == 0:
            raise DomainError(f"no reconstruction was run at step {step}")
        return float(self.mean_fidelity[idx[0]])


def _experiment_streams(seed):
    ss = np.random.SeedSequence(seed)
    kids = ss.spawn(3)
    # stream 0: target states, 1: detector noise, 2: driver randomness.
    return tuple(np.random.default_rng(k) for k in kids)


def tomography_experiment(config: TomographyConfig):
    """Average-case tomography run: shared Haar target ensemble, one noisy
    record per target, per-step information metrics, reconstructions on the
    fidelity stride (the final step and step min(100, n_steps) always
    included).  The target and noise streams depend only on the seed, not on
    the driver, so runs with equal seeds are paired across drivers."""
    cfg = config
    state_rng, noise_rng, driver_rng = _experiment_streams(cfg.seed)
    hist = driver_history(cfg.driver, cfg.j, cfg.n_steps, alpha=cfg.alpha,
                          lam=cfg.lam, notr_lams=cfg.notr_lams,
                          notr_alphas=cfg.notr_alphas, seed=driver_rng)
    d = hist.shape[-1]
    rows, offsets = design_matrix(hist)
    # shared Haar targets
    targets = np.stack([sample_state(d, "complex", state_rng)
                        for _ in range(cfg.n_states)], axis=1)      # (d, ns)
    rho_targets = np.einsum("is,js->sij", targets, targets.conj())
    r_true = bloch_vector(rho_targets)                               # (ns, D)
    clean = r_true @ rows.T + offsets[None, :]
    noise = noise_rng.standard_normal((cfg.n_states, cfg.n_steps))
    records = clean + cfg.sigma * noise

    fid_steps = sorted(set(range(cfg.fidelity_stride, cfg.n_steps + 1,
                                 cfg.fidelity_stride))
                       | {cfg.n_steps, min(100, cfg.n_steps)})
    steps = np.arange(1, cfg.n_steps + 1)
    entropy = np.empty(cfg.n_steps)
    fisher = np.empty(cfg.n_steps)
    rank = np.empty(cfg.n_steps, int)
    scale = cfg.sigma ** 2 if cfg.sigma > 0 else 1.0
    mean_fid = []
    conv_flags = []
    warm = None
    for s in steps:
        sub = rows[:s]
        if s in fid_steps:
            Usv, sv, V, w, rk, keep = _weighted_design(sub)
            s_inv = np.zeros_like(sv)
            s_inv[keep] = 1.0 / sv[keep]
            y = records[:, :s] - offsets[None, :s]
            Rml = (y @ Usv[:, :len(sv)]) * s_inv @ V.T[:len(sv)]
            lam_nz = (sv[keep] ** 2) / scale
        else:
            sv = np.linalg.svd(sub, compute_uv=False)
            keep = sv > PINV_RTOL * sv[0]
            rk = int(keep.sum())
            lam_nz = (sv[keep] ** 2) / scale
        p = lam_nz / lam_nz.sum()
        entropy[s - 1] = -(p * np.log(p)).sum()
        fisher[s - 1] = 1.0 / np.sum(1.0 / lam_nz)
        rank[s - 1] = rk
        if s in fid_steps:
            rho_ml = rho_from_bloch(Rml, d)
            min_eig = np.linalg.eigvalsh(rho_ml).min(axis=1)
            if np.all(min_eig >= -1e-9):
                rbar = Rml
                conv = np.ones(cfg.n_states, bool)
            else:
                rbar, _, _, conv = _solve_positivity(
                    Rml, V, w, d, warm=warm, tol=cfg.positivity_tol,
                    max_iter=cfg.positivity_max_iter)
            warm = rbar
            rho_bar = rho_from_bloch(rbar, d)
            fids = np.einsum("is,sij,js->s", targets.conj(), rho_bar, targets).real
            mean_fid.append(float(np.clip(fids, 0.0, 1.0).mean()))
            conv_flags.append(bool(np.all(conv)))
    return TomographyReport(
        config=cfg, steps=steps, entropy_E=entropy, fisher=fisher, rank=rank,
        fidelity_steps=np.asarray(fid_steps), mean_fidelity=np.asarray(mean_fid),
        solver_converged=np.asarray(conv_flags))
