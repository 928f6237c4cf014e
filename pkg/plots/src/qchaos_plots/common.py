"""Shared plumbing for the figure scripts: headless deterministic rendering,
CSV schema validation, and the common --in/--out/--ref argument set.

Figures are pure functions of their input files; no physics is recomputed
here.  Outputs are PNG + SVG with embedded timestamps and random ids
suppressed, so identical inputs give byte-identical files.
"""

import argparse
import csv
import sys

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "qchaos-plots"

import matplotlib.pyplot as plt  # noqa: E402


class SchemaError(Exception):
    pass


def read_csv_columns(path, required, optional=()):
    """Load named columns; raises SchemaError naming the missing column."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header row")
        for col in required:
            if col not in header:
                raise SchemaError(f"{path}: missing required column `{col}`")
        idx = {c: header.index(c) for c in list(required) +
               [c for c in optional if c in header]}
        data = {c: [] for c in idx}
        for row in reader:
            if not row:
                continue
            for c, i in idx.items():
                data[c].append(row[i])
    return data


def floats(vals):
    return [float(v) if v != "" else float("nan") for v in vals]


def build_parser(description, with_ref=True):
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--in", dest="infile", required=True, help="input artifact")
    ap.add_argument("--out", dest="out", required=True,
                    help="output path without extension (.png and .svg written)")
    if with_ref:
        ap.add_argument("--ref", dest="ref", type=float, default=None,
                        help="reference value drawn as a dashed line")
    return ap


def save_figure(fig, out):
    png, svg = out + ".png", out + ".svg"
    fig.savefig(png, dpi=150, metadata={"Software": None})
    fig.savefig(svg, metadata={"Date": None})
    plt.close(fig)
    return [png, svg]


def draw_reference(ax, value, axis="y"):
    if value is None:
        return
    label = f"reference = {value:g}"
    if axis == "y":
        ax.axhline(value, color="k", linestyle="--", linewidth=1.0, label=label)
    else:
        ax.axvline(value, color="k", linestyle="--", linewidth=1.0, label=label)
    ax.legend(loc="best", fontsize=8)


def run(render, argv=None):
    """Entry-point wrapper: argument parsing plus schema-error reporting."""
    try:
        return render(argv)
    except SchemaError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return 2
