"""Bar chart of the entropic quantities and protocol yield losses from a
discord JSON report."""

import json

from .common import SchemaError, build_parser, run, save_figure

import matplotlib.pyplot as plt


def render(argv=None):
    args = build_parser("Discord report bar chart", with_ref=False).parse_args(argv)
    with open(args.infile) as fh:
        rep = json.load(fh)
    for key in ("S_A", "S_B", "S_AB", "I", "discord", "markup", "protocol_deltas"):
        if key not in rep:
            raise SchemaError(f"{args.infile}: missing required field `{key}`")
    labels = ["S_A", "S_B", "S_AB", "I", "discord", "markup"]
    values = [rep[k] for k in labels]
    for name, v in sorted(rep["protocol_deltas"].items()):
        labels.append(name)
        values.append(v)
    fig, ax = plt.subplots(figsize=(7.0, 3.6))
    ax.bar(range(len(values)), values, color="tab:blue")
    ax.set_xticks(range(len(values)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("bits")
    fig.tight_layout()
    save_figure(fig, args.out)
    return 0


def main(argv=None):
    return run(render, argv)


if __name__ == "__main__":
    raise SystemExit(main())
