"""Phase-space heat maps of Husimi distributions, one panel per state."""

import numpy as np

from .common import build_parser, floats, read_csv_columns, run, save_figure

import matplotlib.pyplot as plt


def render(argv=None):
    args = build_parser("Husimi heat map", with_ref=False).parse_args(argv)
    data = read_csv_columns(args.infile,
                            ["state_index", "delta_theta", "delta_phi", "Q"])
    sid = np.array([int(v) for v in data["state_index"]])
    th = np.array(floats(data["delta_theta"]))
    ph = np.array(floats(data["delta_phi"]))
    q = np.array(floats(data["Q"]))
    states = np.unique(sid)[:6]
    fig, axes = plt.subplots(1, len(states), figsize=(4.0 * len(states), 3.4),
                             squeeze=False)
    for ax, k in zip(axes[0], states):
        sel = sid == k
        u = np.cos(th[sel])
        nu = np.unique(u).size
        nph = np.unique(ph[sel]).size
        order = np.lexsort((ph[sel], u))
        img = q[sel][order].reshape(nu, nph)
        im = ax.imshow(img, origin="lower", aspect="auto",
                       extent=[0, 2 * np.pi, -1, 1], cmap="inferno")
        ax.set_title(f"state {k}")
        ax.set_xlabel(r"$\delta\phi$")
        ax.set_ylabel(r"$\cos\,\delta\theta$")
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.tight_layout()
    save_figure(fig, args.out)
    return 0


def main(argv=None):
    return run(render, argv)


if __name__ == "__main__":
    raise SystemExit(main())
