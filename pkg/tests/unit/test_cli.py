"""Unit tests for the command-line front end."""

import json

import numpy as np
import pytest

import src.initializers.identity as identity
from src.cli import main, resolve_run_config
from src.cli.commands import EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED
from src.micro_net import load_snapshot, stem_name, weight_name
from src.tensor_core import read_matrix_binary, read_matrix_csv
from src.utils import Config


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    """Run every command from a scratch directory so logs and runs stay out of the repo."""
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _json_lines(out: str):
    return [json.loads(line) for line in out.splitlines() if line.startswith("{")]


class TestDumpInit:
    """Test the dump-init command."""

    def test_stacked_identity(self, workdir, capsys):
        """Test dump-init writes matching CSV, binary and sidecar files."""
        code = main(["dump-init", "--method", "idi", "--dout", "4", "--din", "2", "--out", "out"])
        assert code == EXIT_OK
        expected = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
        csv = read_matrix_csv(workdir / "out" / "idi.csv")
        np.testing.assert_array_equal(csv, expected)
        np.testing.assert_array_equal(read_matrix_binary(workdir / "out" / "idi.bin"), csv)

        sidecar = json.loads((workdir / "out" / "idi.json").read_text())
        assert sidecar["kind"] == "matrix"
        assert sidecar["shape"] == [4, 2]
        assert _json_lines(capsys.readouterr().out)[0]["shape"] == [4, 2]

    def test_kernel_written_as_matrix_view(self, workdir):
        """Test kernels are dumped as their matrix view."""
        argv = ["dump-init", "--method", "idic", "--k", "3", "--cin", "2", "--cout", "5", "--out", "k"]
        assert main(argv) == EXIT_OK
        sidecar = json.loads((workdir / "k" / "idic.json").read_text())
        assert sidecar["kernel_shape"] == [3, 3, 2, 5]
        assert read_matrix_csv(workdir / "k" / "idic.csv").shape == (5, 18)

    def test_hadamard_size_rejected(self, capsys):
        """Test a non power of two Hadamard size exits with a usage error."""
        assert main(["dump-init", "--method", "hadamard", "--n", "6"]) == EXIT_USAGE
        assert "size must be a power of two" in capsys.readouterr().err

    def test_missing_dims(self, capsys):
        """Test matrix methods need both dimensions."""
        assert main(["dump-init", "--method", "idiz"]) == EXIT_USAGE
        assert "--dout" in capsys.readouterr().err

    def test_zero_dims(self, capsys):
        """Test zero-sized dimensions exit with a usage error."""
        argv = ["dump-init", "--method", "idi", "--dout", "0", "--din", "2", "--out", "z"]
        assert main(argv) == EXIT_USAGE
        assert "dimensions must be positive" in capsys.readouterr().err


class TestVerify:
    """Test the verify command."""

    def test_list(self, capsys):
        """Test verify --list names checks without running them."""
        assert main(["verify", "gradients", "--list"]) == EXIT_OK
        listing = json.loads(capsys.readouterr().out)
        assert listing
        assert {c["suite"] for c in listing} == {"gradients"}

    def test_initializers_pass(self, workdir, capsys):
        """Test the initializer suite passes and writes its verdict."""
        assert main(["verify", "initializers", "--out", "verdict.json"]) == EXIT_OK
        verdict = json.loads((workdir / "verdict.json").read_text())
        assert verdict["passed"]
        capsys.readouterr()

    def test_broken_identity_fails(self, monkeypatch, capsys):
        """Test a corrupted initializer fails verification."""
        original = identity.idi

        def broken(d_out, d_in, *args, **kwargs):
            w = original(d_out, d_in, *args, **kwargs)
            if d_in > 1:
                w[0, -1] += 0.5
            return w

        monkeypatch.setattr(identity, "idi", broken)
        assert main(["verify", "initializers"]) == EXIT_VERIFY_FAILED
        verdict = json.loads(capsys.readouterr().out)
        failed = {r["name"] for r in verdict["checks"] if not r["passed"]}
        assert "idi_identity_transition" in failed


class TestExperiment:
    """Test the experiment command."""

    def test_toy_residual(self, workdir, capsys):
        """Test the toy experiment writes its report and timing."""
        assert main(["experiment", "toy", "--r", "1", "--out", "toy"]) == EXIT_OK
        (result,) = _json_lines(capsys.readouterr().out)
        assert result["summary"]["final_product"] == pytest.approx(1.187, abs=1e-2)
        out = workdir / "toy"
        assert (out / "timing.json").exists()
        report = json.loads((out / "toy-r1-0.json").read_text())
        assert report["metadata"]["config"]["params"]["r"] == 1
        assert "elapsed_s" not in json.dumps(report)

    def test_same_seed_same_bytes(self, workdir):
        """Test identical seeds give byte-identical report files."""
        for name in ("a", "b"):
            argv = ["experiment", "toy", "--steps", "50", "--seed", "3", "--out", name]
            assert main(argv) == EXIT_OK
        files = sorted(p.name for p in (workdir / "a").iterdir() if p.name != "timing.json")
        assert files
        for name in files:
            assert (workdir / "a" / name).read_bytes() == (workdir / "b" / name).read_bytes()

    def test_unknown_config_key(self, workdir, capsys):
        """Test unknown config keys exit with a usage error."""
        path = workdir / "bad.yaml"
        path.write_text("experiments:\n  toy:\n    bogus: 1\n")
        assert main(["experiment", "toy", "--config", str(path)]) == EXIT_USAGE
        assert "bogus" in capsys.readouterr().err

    def test_unknown_mode_is_usage_error(self, capsys):
        """Test a bad choice is rejected before any training starts."""
        assert main(["experiment", "symmetry", "--mode", "adam", "--out", "s"]) == EXIT_USAGE
        assert "mode must be one of" in capsys.readouterr().err

    def test_rank_widths_checked(self, capsys):
        """Test a hidden width below d0 exits with a usage error."""
        assert main(["experiment", "rank", "--d0", "8", "--dh", "4", "--out", "r"]) == EXIT_USAGE
        assert "must exceed" in capsys.readouterr().err

    def test_internal_error_propagates(self, monkeypatch):
        """Test a ValueError from inside a run is a crash, not a usage error."""

        def broken(config):
            raise ValueError("internal failure")

        monkeypatch.setattr("src.cli.run_config.toy_dynamics", broken)
        with pytest.raises(ValueError, match="internal failure"):
            main(["experiment", "toy", "--steps", "1", "--out", "t"])

    def test_rank(self, capsys):
        """Test the rank experiment from the command line."""
        argv = ["experiment", "rank", "--init", "idinit", "--steps", "2", "--out", "rank"]
        assert main(argv) == EXIT_OK
        (result,) = _json_lines(capsys.readouterr().out)
        assert result["summary"]["max_rank"] >= 8

    def test_several_seeds_on_workers(self, workdir, capsys):
        """Test seeds fan out to worker processes with their own directories."""
        argv = ["experiment", "toy", "--steps", "10", "--seeds", "0,1", "--workers", "2"]
        argv += ["--out", "multi"]
        assert main(argv) == EXIT_OK
        results = _json_lines(capsys.readouterr().out)
        assert [r["seed"] for r in results] == [0, 1]
        for seed in (0, 1):
            assert (workdir / "multi" / f"toy-{seed}" / f"toy-r1-{seed}.json").exists()

    def test_default_run_directory(self, workdir, monkeypatch):
        """Test the timestamped default output directory."""
        stamp = staticmethod(lambda dt=None: "STAMP")
        monkeypatch.setattr("src.cli.commands.TimeUtils.run_stamp", stamp)
        assert main(["experiment", "toy", "--steps", "5", "--format", "json"]) == EXIT_OK
        run = workdir / "runs" / "toy-0-STAMP"
        assert sorted(p.name for p in run.iterdir()) == ["timing.json", "toy-r1-0.json"]

    def test_saved_weights_roundtrip(self, workdir, capsys):
        """Test --save-weights writes snapshots that load back and match their CSV export."""
        argv = ["experiment", "longstem", "--stem-depth", "2", "--width", "4", "--n-samples", "16"]
        argv += ["--batch-size", "8", "--epochs", "2", "--snapshot-epochs", "1", "--save-weights"]
        argv += ["--out", "ls"]
        assert main(argv) == EXIT_OK
        (result,) = _json_lines(capsys.readouterr().out)
        weights = workdir / "ls" / "weights"
        assert result["weights_dir"] == str(weights.relative_to(workdir))
        assert sorted(p.name for p in weights.iterdir()) == ["epoch-1", "final"]

        final = load_snapshot(weights / "final")
        assert {stem_name(0, 0), stem_name(0, 1), weight_name(1)} <= set(final.names())
        for name in final.names():
            if final[name].ndim == 2:
                assert final[name].shape == (4, 4)
                csv = read_matrix_csv(weights / "final" / "csv" / f"{name}.csv")
                np.testing.assert_array_equal(csv, final[name])
        assert set(load_snapshot(weights / "epoch-1").names()) == set(final.names())

    def test_save_weights_needs_training(self, workdir, capsys):
        """Test experiments without a training loop reject --save-weights."""
        assert main(["experiment", "toy", "--save-weights", "--out", "toy"]) == EXIT_USAGE
        assert "trains no weights" in capsys.readouterr().err
        assert not (workdir / "toy").exists()


class TestRunConfig:
    """Test config layering."""

    def test_precedence(self):
        """Test flags beat the config file, which beats defaults."""
        defaults = Config(data={"experiments": {"toy": {"lr": 0.1, "steps": 10}}})
        file_config = Config(data={"toy": {"lr": 0.2, "depth": 3}})
        run = resolve_run_config("toy", defaults, file_config, overrides={"lr": 0.3, "steps": None})
        assert run.params.lr == 0.3
        assert run.params.steps == 10
        assert run.params.depth == 3
        assert run.seeds == [0]

    def test_runs_section(self):
        """Test runs.* settings apply unless overridden."""
        defaults = Config(data={"runs": {"format": "json", "workers": 2}})
        run = resolve_run_config("toy", defaults)
        assert run.format == "json"
        assert run.workers == 2
        assert resolve_run_config("toy", defaults, fmt="csv").format == "csv"

    def test_echo_excludes_output(self):
        """Test the echoed config leaves out the output directory."""
        run = resolve_run_config("rank", out_dir="somewhere")
        echo = run.echo(4)
        assert echo["seed"] == 4
        assert "somewhere" not in json.dumps(echo)
