import json
import os

import numpy as np
import pytest

from qchaos.cli import dispatch, main
from qchaos.config import parse_config
from qchaos.exceptions import DomainError


class TestParseConfig:
    def test_key_value_form(self):
        cfg = parse_config("command=poincare\nalpha=1.4\nlambda=7.0\nseed=42\n")
        assert cfg.command == "poincare"
        assert cfg.params["alpha"] == 1.4
        assert cfg.params["lambda"] == 7.0
        assert cfg.seed == 42
        assert cfg.params["n_steps"] == 500   # default filled

    def test_json_form(self):
        cfg = parse_config(json.dumps(
            {"command": "discord", "state": "bell", "seed": 7}))
        assert cfg.command == "discord"
        assert cfg.params["state"] == "bell"
        assert cfg.seed == 7

    def test_bad_value_names_key(self):
        with pytest.raises(DomainError, match="`lambda`"):
            parse_config("command=poincare\nlambda=abc\n")

    def test_empty_input(self):
        with pytest.raises(DomainError, match="command required"):
            parse_config("")

    def test_unknown_command(self):
        with pytest.raises(DomainError, match="unknown command"):
            parse_config("command=teleport\n")

    def test_unknown_key_rejected_and_named(self):
        with pytest.raises(DomainError, match="`warp_factor`"):
            parse_config("command=poincare\nwarp_factor=9\n")

    def test_missing_required_named(self):
        with pytest.raises(DomainError, match="`alpha`"):
            parse_config("command=entanglement-history\ndelta_theta=1\ndelta_phi=0\n")

    def test_multiple_errors_all_reported(self):
        with pytest.raises(DomainError) as err:
            parse_config("command=tomography\nj=0.3\nsigma=-2\n")
        assert "`j`" in str(err.value) and "`sigma`" in str(err.value)

    def test_comments_ignored(self):
        cfg = parse_config("# a comment\ncommand=discord\n")
        assert cfg.command == "discord"


def _run(tmp_path, text, name="run"):
    out = tmp_path / name
    cfg = parse_config(text)
    cfg.out_dir = str(out)
    return cfg, dispatch(cfg)


class TestDispatch:
    def test_poincare_csv_schema(self, tmp_path):
        cfg, paths = _run(tmp_path, "command=poincare\nn_seeds=3\nn_steps=5\nseed=1\n")
        csv = [p for p in paths if p.endswith("poincare.csv")][0]
        lines = open(csv).read().splitlines()
        assert lines[0] == "seed_id,step,X,Y,Z"
        assert len(lines) == 1 + 3 * 5
        x, y, z = (float(v) for v in lines[1].split(",")[2:])
        assert abs(x * x + y * y + z * z - 1.0) < 1e-9

    def test_poincare_coupled_variant(self, tmp_path):
        cfg, paths = _run(tmp_path,
                          "command=poincare\nsystem=coupled_tops\nalpha=6.0\n"
                          "n_seeds=2\nn_steps=4\nseed=3\n")
        lines = open(paths[0]).read().splitlines()
        assert len(lines) == 1 + 2 * 4

    def test_determinism_byte_identical(self, tmp_path):
        text = "command=poincare\nn_seeds=4\nn_steps=50\nseed=11\n"
        _, paths1 = _run(tmp_path, text, "a")
        _, paths2 = _run(tmp_path, text, "b")
        a = open(paths1[0], "rb").read()
        b = open(paths2[0], "rb").read()
        assert a == b
        m1 = json.load(open(paths1[-1]))
        m2 = json.load(open(paths2[-1]))
        assert m1["outputs"] == m2["outputs"]

    def test_seed_changes_output(self, tmp_path):
        _, p1 = _run(tmp_path, "command=poincare\nn_seeds=4\nn_steps=50\nseed=1\n", "a")
        _, p2 = _run(tmp_path, "command=poincare\nn_seeds=4\nn_steps=50\nseed=2\n", "b")
        assert open(p1[0], "rb").read() != open(p2[0], "rb").read()

    def test_manifest_contents(self, tmp_path):
        cfg, paths = _run(tmp_path, "command=discord\nseed=5\n")
        manifest = json.load(open(paths[-1]))
        assert manifest["command"] == "discord"
        assert manifest["seed"] == 5
        assert "qchaos" in manifest["versions"]
        assert "discord.json" in manifest["outputs"]
        import hashlib
        digest = hashlib.sha256(open(paths[0], "rb").read()).hexdigest()
        assert manifest["outputs"]["discord.json"] == digest

    def test_discord_report_values(self, tmp_path):
        cfg, paths = _run(tmp_path, "command=discord\n")
        rep = json.load(open(paths[0]))
        assert rep["discord"] == pytest.approx(0.201752, abs=1e-5)
        assert rep["S_A_given_B"] == pytest.approx(0.399124, abs=1e-5)
        assert rep["post_measurement_conditional_entropy"] == pytest.approx(
            0.600876, abs=1e-5)
        assert rep["markup"] == pytest.approx(0.201752, abs=1e-5)
        for v in rep["protocol_deltas"].values():
            assert v == pytest.approx(0.201752, abs=1e-5)

    def test_husimi_and_spectrum_small(self, tmp_path):
        cfg, paths = _run(tmp_path,
                          "command=husimi\nJ=5\nalpha=6.0\nstates=0,3\nresolution=16\n")
        lines = open(paths[0]).read().splitlines()
        assert lines[0] == "state_index,delta_theta,delta_phi,Q"
        assert len(lines) == 1 + 2 * 16 * 16
        cfg, paths = _run(tmp_path, "command=floquet-spectrum\nJ=5\nalpha=6.0\n"
                                    "resolution=16\n", "spec")
        lines = open(paths[0]).read().splitlines()
        assert lines[0] == "eigenphase,entanglement,S_Q,Jz_mean"
        assert len(lines) == 1 + 11

    def test_entanglement_map_small(self, tmp_path):
        cfg, paths = _run(tmp_path,
                          "command=entanglement-map\nJ=10\nalpha=6.0\ngrid=6\n"
                          "window=50,60\nlyapunov_steps=500\nseed=0\n")
        lines = open(paths[0]).read().splitlines()
        assert lines[0] == "delta_theta,delta_phi,E_avg,lyapunov_rate,classification"
        assert len(lines) == 1 + 36
        assert all(l.rsplit(",", 1)[1] in ("chaotic", "regular") for l in lines[1:])

    def test_entanglement_history_small(self, tmp_path):
        cfg, paths = _run(tmp_path,
                          "command=entanglement-history\nJ=10\nalpha=6.0\n"
                          "delta_theta=1.2\ndelta_phi=0.5\nn_steps=20\n")
        lines = open(paths[0]).read().splitlines()
        assert lines[0] == "step,entanglement"
        assert len(lines) == 22
        assert float(lines[1].split(",")[1]) >= 0.0

    def test_entanglement_map_global_chaos_mean(self, tmp_path):
        # at alpha=6 the late-time map is flat at the random-state value 5.28
        cfg, paths = _run(tmp_path,
                          "command=entanglement-map\nJ=150\nalpha=6.0\ngrid=12\n"
                          "lyapunov_steps=500\nseed=0\n")
        rows = open(paths[0]).read().splitlines()[1:]
        e = np.array([float(r.split(",")[2]) for r in rows])
        assert abs(e.mean() - 5.28) < 0.05
        assert e.std() < 0.05

    def test_tomography_small(self, tmp_path):
        cfg, paths = _run(tmp_path,
                          "command=tomography\nj=2\nn_steps=12\nn_states=3\n"
                          "fidelity_stride=6\nseed=0\n")
        lines = open(paths[0]).read().splitlines()
        assert lines[0] == "step,mean_fidelity,entropy_E,fisher,rank"
        assert len(lines) == 13
        filled = [l for l in lines[1:] if l.split(",")[1] != ""]
        assert len(filled) == 2     # steps 6 and 12

    def test_rmt_baseline_small(self, tmp_path):
        cfg, paths = _run(tmp_path,
                          "command=rmt-baseline\nj=2\nn_steps=10\nn_draws=2\n"
                          "drivers=kicked_top,coe_fixed\nseed=0\n")
        names = sorted(os.path.basename(p) for p in paths)
        assert "rmt_kicked_top.csv" in names and "rmt_coe_fixed.csv" in names
        lines = open([p for p in paths if p.endswith("rmt_coe_fixed.csv")][0]).read().splitlines()
        assert lines[0] == "step,entropy_E,fisher,rank"
        assert len(lines) == 11


class TestMain:
    def _write(self, tmp_path, text):
        p = tmp_path / "cfg.txt"
        p.write_text(text)
        return str(p)

    def test_success_exit_zero(self, tmp_path, capsys):
        cfgfile = self._write(tmp_path, "command=discord\n")
        code = main(["--config", cfgfile, "--out", str(tmp_path / "o")])
        assert code == 0

    def test_config_error_exit_two(self, tmp_path, capsys):
        cfgfile = self._write(tmp_path, "command=poincare\nlambda=abc\n")
        code = main(["--config", cfgfile])
        assert code == 2
        err = capsys.readouterr().err
        assert json.loads(err)["error"]["type"] == "config"

    def test_missing_file_exit_two(self, tmp_path):
        assert main(["--config", str(tmp_path / "nope.txt")]) == 2

    def test_seed_override_recorded(self, tmp_path):
        cfgfile = self._write(tmp_path, "command=discord\nseed=1\n")
        out = tmp_path / "o2"
        assert main(["--config", cfgfile, "--out", str(out), "--seed", "99"]) == 0
        manifest = json.load(open(out / "manifest.json"))
        assert manifest["seed"] == 99

    def test_env_threads_honored(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QCHAOS_THREADS", "2")
        cfgfile = self._write(tmp_path,
                              "command=entanglement-map\nJ=6\nalpha=6.0\ngrid=4\n"
                              "window=20,25\nlyapunov_steps=500\n")
        assert main(["--config", cfgfile, "--out", str(tmp_path / "o3")]) == 0
