"""Tomography information curves: whichever of mean_fidelity, entropy_E and
fisher the CSV provides, versus step.  --ref draws the information ceiling
(e.g. log(d^2 - 1)) on the entropy panel.

Accepts both the tomography schema (step, mean_fidelity, entropy_E, fisher,
rank) and the rmt-baseline schema (step, entropy_E, fisher, rank).
"""

import numpy as np

from .common import (build_parser, draw_reference, floats,
                     read_csv_columns, run, save_figure)

import matplotlib.pyplot as plt


def render(argv=None):
    args = build_parser("Tomography information curves").parse_args(argv)
    data = read_csv_columns(args.infile, ["step", "entropy_E", "fisher"],
                            optional=("mean_fidelity", "rank"))
    step = np.array(floats(data["step"]))
    panels = [("entropy_E", "entropy"), ("fisher", "Fisher information")]
    if "mean_fidelity" in data:
        panels.insert(0, ("mean_fidelity", "mean fidelity"))
    fig, axes = plt.subplots(1, len(panels), figsize=(4.0 * len(panels), 3.4))
    axes = np.atleast_1d(axes)
    for ax, (col, label) in zip(axes, panels):
        y = np.array(floats(data[col]))
        ok = ~np.isnan(y)
        ax.plot(step[ok], y[ok], "-" if ok.all() else "o-", markersize=2.5)
        ax.set_xlabel("step")
        ax.set_ylabel(label)
        if col == "entropy_E":
            draw_reference(ax, args.ref)
        if col == "fisher":
            ax.set_yscale("log")
    fig.tight_layout()
    save_figure(fig, args.out)
    return 0


def main(argv=None):
    return run(render, argv)


if __name__ == "__main__":
    raise SystemExit(main())
