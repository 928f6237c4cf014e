"""Heat map of long-time average entanglement over the phase-space grid.

The color scale is [0, ref] when --ref is given (use the subspace maximum
log(2J+1)); otherwise it spans the data.
"""

import numpy as np

from .common import build_parser, floats, read_csv_columns, run, save_figure

import matplotlib.pyplot as plt


def render(argv=None):
    args = build_parser("Long-time entanglement map").parse_args(argv)
    data = read_csv_columns(
        args.infile,
        ["delta_theta", "delta_phi", "E_avg", "lyapunov_rate", "classification"])
    th = np.array(floats(data["delta_theta"]))
    ph = np.array(floats(data["delta_phi"]))
    e = np.array(floats(data["E_avg"]))
    u = np.cos(th)
    nu = np.unique(u).size
    nph = np.unique(ph).size
    order = np.lexsort((ph, u))
    img = e[order].reshape(nu, nph)
    fig, ax = plt.subplots(figsize=(5.4, 4.2))
    vmax = args.ref if args.ref is not None else float(np.nanmax(e))
    im = ax.imshow(img, origin="lower", aspect="auto",
                   extent=[0, 2 * np.pi, -1, 1], cmap="viridis",
                   vmin=0.0, vmax=vmax)
    ax.set_xlabel(r"$\delta\phi$")
    ax.set_ylabel(r"$\cos\,\delta\theta$")
    cb = fig.colorbar(im, ax=ax)
    cb.set_label("E (nats)")
    fig.tight_layout()
    save_figure(fig, args.out)
    return 0


def main(argv=None):
    return run(render, argv)


if __name__ == "__main__":
    raise SystemExit(main())
