"""Eigenstate diagnostics: entanglement list plot plus the S_Q vs <Jz>
scatter used to separate regular from chaotic states."""

import numpy as np

from .common import (build_parser, draw_reference, floats, read_csv_columns,
                     run, save_figure)

import matplotlib.pyplot as plt


def render(argv=None):
    args = build_parser("Floquet eigenstate diagnostics").parse_args(argv)
    data = read_csv_columns(args.infile,
                            ["eigenphase", "entanglement", "S_Q", "Jz_mean"])
    ent = np.array(floats(data["entanglement"]))
    sq = np.array(floats(data["S_Q"]))
    jz = np.array(floats(data["Jz_mean"]))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax1.plot(np.arange(len(ent)), ent, "o", markersize=2.5)
    ax1.set_xlabel("eigenstate index")
    ax1.set_ylabel("entanglement")
    draw_reference(ax1, args.ref)
    ax2.plot(sq, jz, "o", markersize=2.5)
    ax2.set_xlabel(r"$S_Q$")
    ax2.set_ylabel(r"$\langle J_z \rangle$")
    fig.tight_layout()
    save_figure(fig, args.out)
    return 0


def main(argv=None):
    return run(render, argv)


if __name__ == "__main__":
    raise SystemExit(main())
