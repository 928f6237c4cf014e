"""Command-line experiment runner: seeded, config-driven, deterministic.

Every command writes CSV/JSON artifacts plus a manifest recording the config
hash, seed, library versions and output checksums.  Identical config and
seed produce byte-identical artifacts.

Exit codes: 0 success, 2 config/domain error, 3 numeric failure.
"""

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import RunConfig, parse_config
from .coupled_tops import (CoupledTopsSpec, _lyapunov_rates, eigenstate_diagnostics,
                           floquet_coupled_block, floquet_eigensystem,
                           long_time_average_map, _step_vectors)
from .discord import (bell_state, discord, entropies, merging_markup,
                      mixed_zero_plus_state, protocol_yield_delta, _PROTOCOLS)
from .exceptions import DomainError, NumericError
from .kicked_top import KickedTopSpec, poincare_section
from .spin import husimi, phase_grid
from .tomography import TomographyConfig, tomography_experiment, driver_history, design_matrix, PINV_RTOL

__all__ = ["dispatch", "main"]


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("" if v is None else _fmt(v) for v in row) + "\n")


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _resolve_threads(cfg: RunConfig):
    if cfg.threads and cfg.threads > 0:
        return cfg.threads
    env = os.environ.get("QCHAOS_THREADS", "")
    if env.strip().isdigit() and int(env) > 0:
        return int(env)
    return 1


def _chunked(n, k):
    """Split range(n) into at most k contiguous chunks."""
    k = max(1, min(k, n))
    bounds = np.linspace(0, n, k + 1).astype(int)
    return [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _map_chunks(fn, n, threads):
    slices = _chunked(n, threads)
    if len(slices) == 1:
        return [fn(slices[0])]
    with ThreadPoolExecutor(max_workers=len(slices)) as pool:
        return list(pool.map(fn, slices))


# ---------------------------------------------------------------- commands

def _cmd_poincare(cfg, out_dir, threads):
    p = cfg.params
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(1)[0])
    rows = []
    if p["system"] == "kicked_top":
        v = rng.standard_normal((p["n_seeds"], 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        traj = poincare_section(KickedTopSpec(j=1, alpha=p["alpha"], lam=p["lambda"]),
                                v, p["n_steps"])
        for sid in range(traj.shape[0]):
            for step in range(traj.shape[1]):
                x, y, z = traj[sid, step]
                rows.append((sid, step + 1, x, y, z))
    else:
        dth = np.arccos(rng.uniform(-1.0, 1.0, p["n_seeds"]))
        dph = rng.uniform(0.0, 2.0 * np.pi, p["n_seeds"])
        ti = np.pi - dth
        I = np.stack([np.sin(ti) * np.cos(dph), np.sin(ti) * np.sin(dph), np.cos(ti)], -1)
        J = np.stack([np.sin(dth), np.zeros_like(dth), np.cos(dth)], -1)
        for step in range(1, p["n_steps"] + 1):
            I, J = _step_vectors(I, J, p["alpha"], p["beta"])
            z = J[:, 2]
            dphi = np.arctan2(I[:, 1], I[:, 0]) - np.arctan2(J[:, 1], J[:, 0])
            s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
            for sid in range(p["n_seeds"]):
                rows.append((sid, step, s[sid] * np.cos(dphi[sid]),
                             s[sid] * np.sin(dphi[sid]), z[sid]))
        rows.sort(key=lambda r: (r[0], r[1]))
    path = os.path.join(out_dir, "poincare.csv")
    _write_csv(path, ["seed_id", "step", "X", "Y", "Z"], rows)
    return [path]


def _eigensystem_for(p):
    spec = CoupledTopsSpec(J=p["J"], alpha=p["alpha"], beta=p["beta"])
    return spec, floquet_eigensystem(floquet_coupled_block(spec))


def _cmd_husimi(cfg, out_dir, threads):
    p = cfg.params
    spec, es = _eigensystem_for(p)
    pts, _ = phase_grid(p["resolution"])
    rows = []
    for k in p["states"]:
        if not (0 <= k < spec.dim):
            raise DomainError(f"eigenstate index {k} outside 0..{spec.dim - 1}")
        q = husimi(es.vectors[:, k], pts, J=spec.J)
        for (dt, dp), qv in zip(pts, q):
            rows.append((k, dt, dp, qv))
    path = os.path.join(out_dir, "husimi.csv")
    _write_csv(path, ["state_index", "delta_theta", "delta_phi", "Q"], rows)
    return [path]


def _cmd_floquet_spectrum(cfg, out_dir, threads):
    p = cfg.params
    _, es = _eigensystem_for(p)
    phases, ent, sq, jz = eigenstate_diagnostics(es, resolution=p["resolution"])
    rows = list(zip(phases, ent, sq, jz))
    path = os.path.join(out_dir, "floquet_spectrum.csv")
    _write_csv(path, ["eigenphase", "entanglement", "S_Q", "Jz_mean"], rows)
    return [path]


def _cmd_entanglement_map(cfg, out_dir, threads):
    p = cfg.params
    spec, es = _eigensystem_for(p)
    pts, _ = phase_grid(p["grid"])
    w0, w1 = int(p["window"][0]), int(p["window"][1])

    emaps = _map_chunks(
        lambda sl: long_time_average_map(spec, pts[sl], window=(w0, w1), es=es),
        len(pts), threads)
    e_avg = np.concatenate(emaps)
    rates = np.concatenate(_map_chunks(
        lambda sl: _lyapunov_rates(pts[sl, 0], pts[sl, 1], spec.alpha, spec.beta,
                                   p["lyapunov_steps"], 1e-8),
        len(pts), threads))
    cls = np.where(rates > p["lyapunov_threshold"], "chaotic", "regular")
    rows = [(pts[i, 0], pts[i, 1], e_avg[i], rates[i], cls[i]) for i in range(len(pts))]
    path = os.path.join(out_dir, "entanglement_map.csv")
    with open(path, "w", newline="") as fh:
        fh.write("delta_theta,delta_phi,E_avg,lyapunov_rate,classification\n")
        for dt, dp, e, r, c in rows:
            fh.write(f"{_fmt(dt)},{_fmt(dp)},{_fmt(e)},{_fmt(r)},{c}\n")
    return [path]


def _cmd_entanglement_history(cfg, out_dir, threads):
    p = cfg.params
    spec, es = _eigensystem_for(p)
    from .spin import project_fz0_coherent
    from .coupled_tops import spectral_entanglement_history
    psi0 = project_fz0_coherent(spec.J, p["delta_theta"], p["delta_phi"])
    steps = np.arange(0, p["n_steps"] + 1)
    hist = spectral_entanglement_history(psi0, es, steps)
    path = os.path.join(out_dir, "entanglement_history.csv")
    _write_csv(path, ["step", "entanglement"], list(zip(steps, hist)))
    return [path]


def _tomo_config(p, seed):
    sigma = p["sigma"] if p["sigma"] >= 0 else 0.05 * p["j"]
    return TomographyConfig(
        driver=p.get("driver", "kicked_top"), j=p["j"], alpha=p["alpha"],
        lam=p["lambda"], sigma=sigma, n_steps=p["n_steps"],
        n_states=p.get("n_states", 100),
        fidelity_stride=p.get("fidelity_stride", 5),
        notr_lams=tuple(p.get("notr_lams", (7.0, 7.5, 8.0))),
        notr_alphas=tuple(p.get("notr_alphas", (1.4, 1.1, 0.9))),
        seed=seed)


def _cmd_tomography(cfg, out_dir, threads):
    rep = tomography_experiment(_tomo_config(cfg.params, cfg.seed))
    fid = {int(s): f for s, f in zip(rep.fidelity_steps, rep.mean_fidelity)}
    rows = [(int(s), fid.get(int(s)), rep.entropy_E[i], rep.fisher[i], int(rep.rank[i]))
            for i, s in enumerate(rep.steps)]
    path = os.path.join(out_dir, "tomography.csv")
    _write_csv(path, ["step", "mean_fidelity", "entropy_E", "fisher", "rank"], rows)
    return [path]


def _info_curves(history, sigma):
    """Per-step entropy/fisher/rank of the accumulated design matrix."""
    rows, _ = design_matrix(history)
    n = len(rows)
    scale = sigma ** 2 if sigma > 0 else 1.0
    ent = np.empty(n)
    fish = np.empty(n)
    rank = np.empty(n, int)
    for s in range(1, n + 1):
        sv = np.linalg.svd(rows[:s], compute_uv=False)
        keep = sv > PINV_RTOL * sv[0]
        lam = (sv[keep] ** 2) / scale
        p = lam / lam.sum()
        ent[s - 1] = -(p * np.log(p)).sum()
        fish[s - 1] = 1.0 / np.sum(1.0 / lam)
        rank[s - 1] = int(keep.sum())
    return ent, fish, rank


def _cmd_rmt_baseline(cfg, out_dir, threads):
    p = cfg.params
    sigma = p["sigma"] if p["sigma"] >= 0 else 0.05 * p["j"]
    paths = []
    ss = np.random.SeedSequence(cfg.seed)
    for di, driver in enumerate(p["drivers"]):
        ensemble = driver in ("coe_fixed", "cue_fixed", "haar_fresh")
        n_draws = p["n_draws"] if ensemble else 1
        kids = np.random.SeedSequence((cfg.seed, di)).spawn(n_draws)

        def one(draw, driver=driver, kids=kids):
            hist = driver_history(
                driver, p["j"], p["n_steps"], alpha=p["alpha"], lam=p["lambda"],
                notr_lams=tuple(p["notr_lams"]), notr_alphas=tuple(p["notr_alphas"]),
                seed=np.random.default_rng(kids[draw]))
            return _info_curves(hist, sigma)

        if n_draws > 1 and threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                curves = list(pool.map(one, range(n_draws)))
        else:
            curves = [one(k) for k in range(n_draws)]
        ent = np.mean([c[0] for c in curves], axis=0)
        fish = np.mean([c[1] for c in curves], axis=0)
        rank = np.mean([c[2] for c in curves], axis=0)
        rows = [(s + 1, ent[s], fish[s], rank[s]) for s in range(p["n_steps"])]
        path = os.path.join(out_dir, f"rmt_{driver}.csv")
        _write_csv(path, ["step", "entropy_E", "fisher", "rank"], rows)
        paths.append(path)
    return paths


def _load_state_file(path):
    with open(path) as fh:
        obj = json.load(fh)
    try:
        dims = tuple(int(v) for v in obj["dims"])
        re = np.asarray(obj["rho_re"], dtype=float)
        im = np.asarray(obj["rho_im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"state file must contain dims, rho_re, rho_im: {exc}")
    return re + 1j * im, dims


def _cmd_discord(cfg, out_dir, threads):
    p = cfg.params
    if p["state"] == "zero_plus":
        rho, dims = mixed_zero_plus_state()
    elif p["state"] == "bell":
        rho, dims = bell_state()
    else:
        rho, dims = _load_state_file(p["state_file"])
    ent = entropies(rho, dims)
    res = discord(rho, dims, search_resolution=p["search_resolution"])
    markup = merging_markup(rho, dims, res.projectors)
    deltas = {name: protocol_yield_delta(rho, dims, name, res.projectors)
              for name in _PROTOCOLS}
    report = {
        "S_A": ent["S_A"], "S_B": ent["S_B"], "S_AB": ent["S_AB"],
        "I": ent["I_AB"], "S_A_given_B": ent["S_A_given_B"],
        "discord": res.value,
        "optimal_angles": list(res.angles),
        "post_measurement_conditional_entropy": res.conditional_entropy,
        "markup": markup,
        "protocol_deltas": deltas,
        "units": "bits",
    }
    path = os.path.join(out_dir, "discord.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [path]


_HANDLERS = {
    "poincare": _cmd_poincare,
    "husimi": _cmd_husimi,
    "floquet-spectrum": _cmd_floquet_spectrum,
    "entanglement-map": _cmd_entanglement_map,
    "entanglement-history": _cmd_entanglement_history,
    "tomography": _cmd_tomography,
    "rmt-baseline": _cmd_rmt_baseline,
    "discord": _cmd_discord,
}


def dispatch(cfg: RunConfig):
    """Run one command; returns the list of written artifact paths
    (manifest.json included, always last)."""
    out_dir = cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    threads = _resolve_threads(cfg)
    paths = _HANDLERS[cfg.command](cfg, out_dir, threads)
    canonical = json.dumps(cfg.raw, sort_keys=True, separators=(",", ":"))
    manifest = {
        "command": cfg.command,
        "config_hash": hashlib.sha256(canonical.encode()).hexdigest(),
        "seed": cfg.seed,
        "versions": {
            "qchaos": __version__,
            "numpy": np.__version__,
            "python": ".".join(map(str, sys.version_info[:3])),
        },
        "outputs": {os.path.basename(p): _sha256(p) for p in paths},
    }
    mpath = os.path.join(out_dir, "manifest.json")
    with open(mpath, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths + [mpath]


def main(argv=None):
    ap = argparse.ArgumentParser(prog="qchaos",
                                 description="seeded quantum-chaos experiments")
    ap.add_argument("--config", required=True, help="config file (key=value or JSON)")
    ap.add_argument("--out", default=None, help="output directory (overrides config)")
    ap.add_argument("--seed", type=int, default=None, help="seed override")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker threads (else env QCHAOS_THREADS, else 1)")
    args = ap.parse_args(argv)
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
        if args.out is not None:
            cfg.out_dir = args.out
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.raw["seed"] = args.seed
        if args.threads is not None:
            cfg.threads = args.threads
        dispatch(cfg)
    except (DomainError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": {"type": "config", "message": str(exc)}}),
              file=sys.stderr)
        return 2
    except NumericError as exc:
        print(json.dumps({"error": {"type": "numeric", "message": str(exc)}}),
              file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
