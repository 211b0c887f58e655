"""Command-line contract: exit codes, reports, determinism."""

import json

import pytest

from noiselab.cli import main

REP3 = {
    "code": {"builtin": "repetition", "n": 3},
    "noise": {
        "channels": [
            {"support": [0], "probs": {"I": 0.9, "X": 0.1}},
            {"support": [1], "probs": {"I": 0.8, "X": 0.2}},
            {"support": [2], "probs": {"I": 0.95, "X": 0.05}},
        ]
    },
}

FIVE_QUBIT = {
    "code": {"builtin": "five-qubit"},
    "noise": {
        "channels": [
            {
                "support": [i],
                "probs": {"I": 0.9, "X": 0.1 / 3, "Y": 0.1 / 3, "Z": 0.1 / 3},
            }
            for i in range(5)
        ]
    },
}


def toric_negative_config():
    from noiselab.codes import toric_vertical_z_loop
    from noiselab.pauli import support

    sites = sorted(support(toric_vertical_z_loop(3)))
    return {
        "code": {"builtin": "toric", "d": 3},
        "noise": {
            "channels": [{"support": sites, "probs": {"III": 0.9, "ZZZ": 0.1}}]
        },
    }


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


class TestCheck:
    def test_identifiable_exit_zero(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", FIVE_QUBIT)
        assert main(["check", cfg]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["identifiable"] is True
        assert report["rank_meas"] == report["rank_logical"] == 15
        assert report["config_sha256"]

    def test_not_identifiable_exit_two(self, tmp_path):
        cfg = write(tmp_path, "c.json", toric_negative_config())
        out = tmp_path / "report.json"
        assert main(["check", cfg, "--out", str(out)]) == 2
        report = json.loads(out.read_text())
        assert report["rank_meas"] < report["rank_logical"]

    def test_malformed_json_exit_one(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"code": ')
        assert main(["check", str(path)]) == 1
        assert "line" in capsys.readouterr().err

    def test_schema_violation_exit_one(self, tmp_path, capsys):
        cfg = write(
            tmp_path, "bad.json", {"code": {"builtin": "nonsense"}, "noise": {"channels": []}}
        )
        assert main(["check", cfg]) == 1
        err = capsys.readouterr().err
        assert "config invalid" in err

    def test_bad_probability_sum_exit_one(self, tmp_path, capsys):
        cfg = dict(REP3)
        cfg = json.loads(json.dumps(REP3))
        cfg["noise"]["channels"][0]["probs"]["X"] = 0.5
        path = write(tmp_path, "bad.json", cfg)
        assert main(["check", path]) == 1
        assert "sum" in capsys.readouterr().err


class TestSimulate:
    def test_deterministic_files(self, tmp_path):
        cfg = write(tmp_path, "c.json", REP3)
        a = tmp_path / "a.synd"
        b = tmp_path / "b.synd"
        assert main(["simulate", cfg, "--rounds", "20000", "--seed", "5", "--out", str(a)]) == 0
        assert main(["simulate", cfg, "--rounds", "20000", "--seed", "5", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        sidecar = json.loads((tmp_path / "a.synd.json").read_text())
        assert sidecar["seed"] == 5
        assert sidecar["pairing"] == "single"

    def test_csv_flag(self, tmp_path):
        cfg = write(tmp_path, "c.json", REP3)
        out = tmp_path / "d.synd"
        csv = tmp_path / "d.csv"
        assert main(
            ["simulate", cfg, "--rounds", "100", "--seed", "1",
             "--out", str(out), "--csv", str(csv)]
        ) == 0
        lines = csv.read_text().strip().splitlines()
        assert lines[0] == "g0,g1"
        assert len(lines) == 101

    def test_zero_rounds(self, tmp_path):
        cfg = write(tmp_path, "c.json", REP3)
        out = tmp_path / "empty.synd"
        assert main(["simulate", cfg, "--rounds", "0", "--seed", "1", "--out", str(out)]) == 0
        from noiselab.simulate import load_dataset

        assert load_dataset(out).rows == 0

    def test_file_size(self, tmp_path):
        cfg = write(tmp_path, "c.json", REP3)
        out = tmp_path / "d.synd"
        n = 4096
        assert main(["simulate", cfg, "--rounds", str(n), "--seed", "1", "--out", str(out)]) == 0
        assert out.stat().st_size == 29 + 8 * n


class TestEstimate:
    def test_exact_mode(self, tmp_path):
        cfg = write(tmp_path, "c.json", REP3)
        out = tmp_path / "est.json"
        assert main(["estimate", cfg, "--exact", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        moments = {m["element"]: m["value"] for m in report["logical_moments"]}
        assert moments["IIZ"] == pytest.approx(0.9, rel=1e-9)
        assert report["logical_channel"]["cosets"][0]["representative"] == "III"
        masses = [c["coset_mass"] for c in report["logical_channel"]["cosets"]]
        assert masses[0] == pytest.approx(0.9 * 0.8 * 0.95, rel=1e-9)

    def test_empirical_mode_within_errors(self, tmp_path):
        cfg = write(tmp_path, "c.json", REP3)
        data = tmp_path / "d.synd"
        assert main(
            ["simulate", cfg, "--rounds", "1000000", "--seed", "3", "--out", str(data)]
        ) == 0
        out = tmp_path / "est.json"
        assert main(["estimate", cfg, "--data", str(data), "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        moments = {
            m["element"]: (m["value"], m["stderr"]) for m in report["logical_moments"]
        }
        value, stderr = moments["IIZ"]
        assert abs(value - 0.9) < 5 * stderr

    def test_non_logical_target_exit_one(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", REP3)
        assert main(["estimate", cfg, "--exact", "--targets", "XII"]) == 1
        assert "XII" in capsys.readouterr().err

    def test_not_identifiable_exit_two(self, tmp_path):
        cfg = write(tmp_path, "c.json", toric_negative_config())
        out = tmp_path / "est.json"
        assert main(["estimate", cfg, "--exact", "--out", str(out)]) == 2
        report = json.loads(out.read_text())
        assert "logical_moments" not in report
        assert report["rank_meas"] < report["rank_logical"]

    def test_measurement_noise_block(self, tmp_path):
        cfg = {
            "code": {
                "kind": "data-syndrome",
                "n": 3,
                "generators": ["ZZI", "IZZ"],
                "redundancy": [[0], [1], [0], [1]],
            },
            "noise": {
                "channels": [
                    {"support": [0], "probs": {"I": 0.9, "X": 0.1}},
                    {"support": [1], "probs": {"I": 0.8, "X": 0.2}},
                    {"support": [2], "probs": {"I": 0.95, "X": 0.05}},
                ]
            },
            "measurement_noise": {"q": 0.1},
        }
        path = write(tmp_path, "ds.json", cfg)
        out = tmp_path / "est.json"
        assert (
            main(
                [
                    "estimate", path, "--exact",
                    "--targets", "III|1000,ZII|0000",
                    "--out", str(out),
                ]
            )
            == 0
        )
        report = json.loads(out.read_text())
        moments = {m["element"]: m["value"] for m in report["logical_moments"]}
        assert moments["III|1000"] == pytest.approx(0.8, rel=1e-9)
        assert moments["ZII|0000"] == pytest.approx(0.8, rel=1e-9)

    def test_data_syndrome_empirical_pipeline(self, tmp_path):
        cfg = {
            "code": {
                "kind": "data-syndrome",
                "n": 3,
                "generators": ["ZZI", "IZZ"],
                "redundancy": [[0], [1], [0], [1]],
            },
            "noise": {
                "channels": [
                    {"support": [0], "probs": {"I": 0.9, "X": 0.1}},
                    {"support": [1], "probs": {"I": 0.8, "X": 0.2}},
                    {"support": [2], "probs": {"I": 0.95, "X": 0.05}},
                ]
            },
            "measurement_noise": {"q": 0.1},
        }
        path = write(tmp_path, "ds.json", cfg)
        data = tmp_path / "d.synd"
        assert main(["simulate", path, "--rounds", "400000", "--seed", "9",
                     "--out", str(data)]) == 0
        out = tmp_path / "est.json"
        assert main(["estimate", path, "--data", str(data),
                     "--targets", "III|1000,ZII|0000", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["ds_normalization"]["constant"] == 1.0
        rows = {m["element"]: m for m in report["logical_moments"]}
        for element, truth in [("III|1000", 0.8), ("ZII|0000", 0.8)]:
            assert abs(rows[element]["value"] - truth) < 5 * rows[element]["stderr"]

    def test_measurement_noise_requires_ds(self, tmp_path, capsys):
        cfg = json.loads(json.dumps(REP3))
        cfg["measurement_noise"] = {"q": 0.1}
        path = write(tmp_path, "c.json", cfg)
        assert main(["check", path]) == 1
        assert "data-syndrome" in capsys.readouterr().err


class TestThreads:
    def test_env_var_default(self, monkeypatch):
        from noiselab.cli import _default_threads

        monkeypatch.setenv("NOISE_LAB_THREADS", "3")
        assert _default_threads() == 3
        monkeypatch.setenv("NOISE_LAB_THREADS", "junk")
        assert _default_threads() >= 1

    def test_threads_flag_does_not_change_output(self, tmp_path):
        cfg = write(tmp_path, "c.json", REP3)
        a = tmp_path / "a.synd"
        b = tmp_path / "b.synd"
        base = ["simulate", cfg, "--rounds", "40000", "--seed", "2"]
        assert main(base + ["--out", str(a), "--threads", "1"]) == 0
        assert main(base + ["--out", str(b), "--threads", "4"]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestOracle:
    def test_comparison_against_estimate(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.json", REP3)
        est = tmp_path / "est.json"
        assert main(["estimate", cfg, "--exact", "--out", str(est)]) == 0
        orc = tmp_path / "orc.json"
        assert main(["oracle", cfg, "--against", str(est), "--out", str(orc)]) == 0
        report = json.loads(orc.read_text())
        assert report["max_deviation_vs_estimate"] < 1e-9

    def test_cap_exit_one(self, tmp_path, capsys):
        cfg = {
            "code": {"builtin": "toric", "d": 3},
            "noise": {
                "channels": [{"support": [0], "probs": {"I": 0.9, "X": 0.1}}]
            },
        }
        path = write(tmp_path, "c.json", cfg)
        assert main(["oracle", path]) == 1
        assert "exceeds" in capsys.readouterr().err.lower()

    def test_channel_matches_estimate_report(self, tmp_path):
        cfg = write(tmp_path, "c.json", FIVE_QUBIT)
        est = tmp_path / "est.json"
        orc = tmp_path / "orc.json"
        assert main(["estimate", cfg, "--exact", "--out", str(est)]) == 0
        assert main(["oracle", cfg, "--out", str(orc)]) == 0
        a = json.loads(est.read_text())["logical_channel"]["cosets"]
        b = json.loads(orc.read_text())["logical_channel"]["cosets"]
        assert [c["representative"] for c in a] == [c["representative"] for c in b]
        for ca, cb in zip(a, b):
            assert ca["probability"] == pytest.approx(cb["probability"], abs=1e-10)
