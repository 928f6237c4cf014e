"""Entanglement versus kick number, with an optional typical-value line."""

import numpy as np

from .common import (build_parser, draw_reference, floats, read_csv_columns,
                     run, save_figure)

import matplotlib.pyplot as plt


def render(argv=None):
    args = build_parser("Dynamical entanglement history").parse_args(argv)
    data = read_csv_columns(args.infile, ["step", "entanglement"])
    step = np.array(floats(data["step"]))
    ent = np.array(floats(data["entanglement"]))
    fig, ax = plt.subplots(figsize=(5.6, 3.6))
    ax.plot(step, ent, "-", linewidth=1.0)
    ax.set_xlabel("kick")
    ax.set_ylabel("entanglement (nats)")
    draw_reference(ax, args.ref)
    fig.tight_layout()
    save_figure(fig, args.out)
    return 0


def main(argv=None):
    return run(render, argv)


if __name__ == "__main__":
    raise SystemExit(main())
