import json
import math
from pathlib import Path

import pytest

from fracshape.cli import CliError, RunConfig, main
from fracshape.specfun import FracParams, gamma_ns


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestConstants:

    def test_defaults(self, capsys):
        summary = run_json(capsys, "constants")
        assert summary["command"] == "constants"
        assert summary["params"] == {"n": "2", "s": "0.5"}
        assert summary["results"]["gamma_ns"] == pytest.approx(2.0 / math.pi, rel=1e-15)
        assert summary["results"]["c_ns"] == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-15)

    def test_order_override(self, capsys):
        summary = run_json(capsys, "constants", "--s", "0.25")
        want = gamma_ns(FracParams(2, 0.25))
        assert summary["results"]["gamma_ns"] == pytest.approx(want, rel=1e-15)
        assert summary["params"]["s"] == "0.25"


class TestErrors:

    @pytest.mark.parametrize("argv", [
        ("constants", "--s", "1.5"),
        ("constants", "--n", "2.5"),
        ("no-such-command",),
        ("seminorm-ratio",),                          # missing required --eps
        ("critical-plane", "--domain", "gadget"),
        ("critical-plane", "--domain", "ball", "--e", "0,0"),
        ("slab-measure", "--domain", "ball", "--gamma", "0.5"),
    ])
    def test_invalid_invocations_exit_two(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code == 2
        payload = json.loads(err)
        assert payload["error"]

    def test_integer_flags_reject_scientific_notation(self, capsys):
        code, _, err = run(capsys, "seminorm-ratio", "--eps", "0.01",
                           "--n-pairs", "1e4")
        assert code == 2
        assert "n-pairs" in json.loads(err)["error"]


class TestRunConfig:

    def test_json_round_trip(self):
        cfg = RunConfig("seminorm-ratio", {"s": "0.5", "eps": "1e-2"},
                        seed=7, output_path="out")
        assert RunConfig.from_json(cfg.to_json()) == cfg

    def test_unknown_keys_rejected(self):
        with pytest.raises(CliError):
            RunConfig.from_json('{"command": "constants", "extra": 1}')

    def test_config_file_wins_over_flags(self, capsys, tmp_path):
        cfg_file = tmp_path / "run.json"
        cfg_file.write_text(json.dumps({
            "command": "constants", "params": {"s": "0.75"}, "seed": 3}))
        summary = run_json(capsys, "constants", "--config", str(cfg_file),
                           "--s", "0.25")
        assert summary["params"]["s"] == "0.75"
        assert summary["seed"] == 3

    def test_config_command_mismatch(self, capsys, tmp_path):
        cfg_file = tmp_path / "run.json"
        cfg_file.write_text(json.dumps({"command": "constants"}))
        code, _, err = run(capsys, "critical-plane", "--domain", "ball",
                           "--config", str(cfg_file))
        assert code == 2
        assert "does not match" in json.loads(err)["error"]


class TestCriticalPlane:

    def test_centered_ball_has_no_offset(self, capsys):
        summary = run_json(capsys, "critical-plane", "--domain", "ball")
        plane = summary["results"]["plane"]
        assert abs(plane["lambda"]) <= 2e-6
        assert plane["case"] != "unresolved"

    def test_params_echoed_verbatim(self, capsys):
        summary = run_json(capsys, "critical-plane", "--domain", "bump:1e-3",
                           "--tol", "1e-5")
        assert summary["params"]["domain"] == "bump:1e-3"
        assert summary["params"]["tol"] == "1e-5"


class TestArtifacts:

    ARGS = ("stability-probe", "--eps", "0.02,0.01", "--n-pairs", "2000")

    def test_rerun_is_byte_identical(self, capsys, tmp_path):
        out = str(tmp_path)
        code, stdout1, _ = run(capsys, *self.ARGS, "--out", out)
        assert code == 0
        arts = [Path(p) for p in json.loads(stdout1)["artifacts"]]
        assert len(arts) == 2 and all(p.exists() for p in arts)
        first = {p: p.read_bytes() for p in arts}

        code, stdout2, _ = run(capsys, *self.ARGS, "--out", out)
        assert code == 0
        assert stdout2 == stdout1
        for p, blob in first.items():
            assert p.read_bytes() == blob

    def test_summary_file_mirrors_stdout(self, capsys, tmp_path):
        _, stdout, _ = run(capsys, *self.ARGS, "--out", str(tmp_path))
        summary = json.loads(stdout)
        json_art = next(p for p in summary["artifacts"] if p.endswith(".json"))
        assert json.loads(Path(json_art).read_text()) == summary

    def test_seed_changes_artifact_name(self, capsys, tmp_path):
        _, out1, _ = run(capsys, *self.ARGS, "--out", str(tmp_path), "--seed", "0")
        _, out2, _ = run(capsys, *self.ARGS, "--out", str(tmp_path), "--seed", "1")
        names1 = {Path(p).name for p in json.loads(out1)["artifacts"]}
        names2 = {Path(p).name for p in json.loads(out2)["artifacts"]}
        assert names1.isdisjoint(names2)

    def test_csv_rows_match_grid(self, capsys, tmp_path):
        _, stdout, _ = run(capsys, *self.ARGS, "--out", str(tmp_path))
        csv_art = next(p for p in json.loads(stdout)["artifacts"]
                       if p.endswith(".csv"))
        lines = Path(csv_art).read_text().splitlines()
        assert lines[0].startswith("eps,")
        assert len(lines) == 3  # header + one row per grid value
