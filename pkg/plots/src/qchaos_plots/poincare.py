"""Scatter of (Y, Z) points of classical trajectories, one color per seed."""

import numpy as np

from .common import build_parser, floats, read_csv_columns, run, save_figure

import matplotlib.pyplot as plt


def render(argv=None):
    args = build_parser("Poincare section scatter", with_ref=False).parse_args(argv)
    data = read_csv_columns(args.infile, ["seed_id", "step", "X", "Y", "Z"])
    sid = np.array([int(v) for v in data["seed_id"]])
    y = np.array(floats(data["Y"]))
    z = np.array(floats(data["Z"]))
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    cmap = plt.get_cmap("tab20")
    for k in np.unique(sid):
        sel = sid == k
        ax.plot(y[sel], z[sel], ".", markersize=1.5, color=cmap(int(k) % 20))
    ax.set_xlabel("Y")
    ax.set_ylabel("Z")
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.set_aspect("equal")
    save_figure(fig, args.out)
    return 0


def main(argv=None):
    return run(render, argv)


if __name__ == "__main__":
    raise SystemExit(main())
