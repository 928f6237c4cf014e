import json
import math
import xml.etree.ElementTree as ET

import pytest

from qchaos_plots import (discord_report, entanglement_history,
                          entanglement_map, floquet_spectrum, husimi,
                          poincare, tomography_curves)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _poincare_csv(path):
    lines = ["seed_id,step,X,Y,Z"]
    for sid in range(2):
        for step in range(1, 6):
            y = 0.1 * step - 0.3 + 0.05 * sid
            z = 0.2 * step - 0.5
            x = math.sqrt(max(0.0, 1 - y * y - z * z))
            lines.append(f"{sid},{step},{x},{y},{z}")
    path.write_text("\n".join(lines) + "\n")


def _husimi_csv(path):
    lines = ["state_index,delta_theta,delta_phi,Q"]
    n = 4
    for k in (0, 2):
        for i in range(n):
            u = -1 + (i + 0.5) * 2 / n
            for jj in range(n):
                ph = (jj + 0.5) * 2 * math.pi / n
                lines.append(f"{k},{math.acos(u)},{ph},{0.1 * (i + jj + k + 1)}")
    path.write_text("\n".join(lines) + "\n")


def _spectrum_csv(path):
    lines = ["eigenphase,entanglement,S_Q,Jz_mean"]
    for k in range(11):
        lines.append(f"{0.6 * k},{3.0 + 0.1 * k},{0.05 + 0.01 * k},{k - 5}")
    path.write_text("\n".join(lines) + "\n")


def _map_csv(path):
    lines = ["delta_theta,delta_phi,E_avg,lyapunov_rate,classification"]
    n = 4
    for i in range(n):
        u = -1 + (i + 0.5) * 2 / n
        for jj in range(n):
            ph = (jj + 0.5) * 2 * math.pi / n
            cls = "chaotic" if (i + jj) % 2 else "regular"
            lines.append(f"{math.acos(u)},{ph},{4.0 + 0.1 * i},{0.1 * jj},{cls}")
    path.write_text("\n".join(lines) + "\n")


def _history_csv(path):
    lines = ["step,entanglement"]
    for k in range(40):
        lines.append(f"{k},{5.28 * (1 - math.exp(-k / 5.0))}")
    path.write_text("\n".join(lines) + "\n")


def _tomo_csv(path, with_fid=True):
    header = "step,mean_fidelity,entropy_E,fisher,rank" if with_fid \
        else "step,entropy_E,fisher,rank"
    lines = [header]
    for k in range(1, 31):
        ent = 6.087 * (1 - math.exp(-k / 8.0))
        fish = 1e-4 * k
        if with_fid:
            fid = f"{min(0.9, 0.03 * k)}" if k % 5 == 0 else ""
            lines.append(f"{k},{fid},{ent},{fish},{min(k, 24)}")
        else:
            lines.append(f"{k},{ent},{fish},{min(k, 24)}")
    path.write_text("\n".join(lines) + "\n")


def _discord_json(path):
    rep = {"S_A": 1.0, "S_B": 0.6, "S_AB": 1.0, "I": 0.6,
           "S_A_given_B": 0.399124, "discord": 0.201752, "markup": 0.201752,
           "protocol_deltas": {"teleportation": 0.201752, "superdense": 0.201752,
                               "distillation": 0.201752, "merging": 0.201752}}
    path.write_text(json.dumps(rep))


CASES = [
    (poincare, _poincare_csv, "pc.csv", []),
    (husimi, _husimi_csv, "hu.csv", []),
    (floquet_spectrum, _spectrum_csv, "fs.csv", ["--ref", "4.98"]),
    (entanglement_map, _map_csv, "em.csv", ["--ref", "5.71"]),
    (entanglement_history, _history_csv, "eh.csv", ["--ref", "5.28"]),
    (tomography_curves, _tomo_csv, "tc.csv", ["--ref", "6.087"]),
    (discord_report, _discord_json, "dr.json", []),
]


@pytest.mark.parametrize("mod,maker,name,extra", CASES,
                         ids=[c[0].__name__.split(".")[-1] for c in CASES])
def test_renders_nonempty_png_and_svg(tmp_path, mod, maker, name, extra):
    src = tmp_path / name
    maker(src)
    out = tmp_path / "fig"
    assert mod.main(["--in", str(src), "--out", str(out)] + extra) == 0
    png = (tmp_path / "fig.png").read_bytes()
    assert png.startswith(PNG_MAGIC) and len(png) > 1000
    svg = (tmp_path / "fig.svg").read_text()
    ET.fromstring(svg)          # well-formed XML
    assert len(svg) > 1000


@pytest.mark.parametrize("mod,maker,name,extra", CASES,
                         ids=[c[0].__name__.split(".")[-1] for c in CASES])
def test_byte_stable(tmp_path, mod, maker, name, extra):
    src = tmp_path / name
    maker(src)
    for tag in ("a", "b"):
        assert mod.main(["--in", str(src), "--out", str(tmp_path / tag)] + extra) == 0
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


@pytest.mark.parametrize("module,maker,name,column", [
    (poincare, _poincare_csv, "pc.csv", "Z"),
    (entanglement_history, _history_csv, "eh.csv", "entanglement"),
    (tomography_curves, _tomo_csv, "tc.csv", "entropy_E"),
])
def test_schema_error_names_column(tmp_path, capsys, module, maker, name, column):
    src = tmp_path / name
    maker(src)
    text = src.read_text().splitlines()
    text[0] = text[0].replace(column, column + "_renamed")
    src.write_text("\n".join(text) + "\n")
    code = module.main(["--in", str(src), "--out", str(tmp_path / "fig")])
    assert code != 0
    assert column in capsys.readouterr().err


class TestReferenceLines:
    def test_entropy_ceiling_line_rendered(self, tmp_path):
        src = tmp_path / "tc.csv"
        _tomo_csv(src)
        ref = f"{math.log(440):.6g}"
        assert tomography_curves.main(
            ["--in", str(src), "--out", str(tmp_path / "with"), "--ref", ref]) == 0
        assert tomography_curves.main(
            ["--in", str(src), "--out", str(tmp_path / "without")]) == 0
        with_svg = (tmp_path / "with.svg").read_text()
        without_svg = (tmp_path / "without.svg").read_text()
        assert f"reference = {float(ref):g}" in with_svg
        assert with_svg != without_svg

    def test_history_typical_value_line(self, tmp_path):
        src = tmp_path / "eh.csv"
        _history_csv(src)
        assert entanglement_history.main(
            ["--in", str(src), "--out", str(tmp_path / "h"), "--ref", "5.28"]) == 0
        assert "reference = 5.28" in (tmp_path / "h.svg").read_text()

    def test_rmt_schema_without_fidelity(self, tmp_path):
        src = tmp_path / "rmt.csv"
        _tomo_csv(src, with_fid=False)
        assert tomography_curves.main(
            ["--in", str(src), "--out", str(tmp_path / "r"), "--ref", "6.087"]) == 0
