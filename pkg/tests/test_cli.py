import json
import math

import pytest

from hamflow.cli import main


@pytest.fixture
def run(capsys):
    def _run(*argv):
        code = main(list(argv))
        cap = capsys.readouterr()
        return code, cap.out, cap.err
    return _run


@pytest.fixture(scope="module")
def small_dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_ds") / "ds"
    code = main(["gen", "--basis", "b1", "--delta", "d3", "--seed", "42",
                 "--out", str(out), "--resolution", "32"])
    assert code == 0
    return out


class TestCard:
    def test_default_spec(self, run):
        code, out, _ = run("card")
        assert code == 0 and out.strip() == "242"

    def test_b3d3(self, run):
        code, out, _ = run("card", "--basis", "b3", "--delta", "d3")
        assert code == 0 and out.strip() == "19682"

    def test_trig_flag(self, run):
        code, out, _ = run("card", "--basis", "b2", "--delta", "d3", "--trig")
        assert code == 0 and out.strip() == "19682"

    def test_bad_basis_is_validation_error(self, run):
        code, _, err = run("card", "--basis", "b9")
        assert code == 2 and "validation error" in err


class TestEnum:
    def test_full_b1d3(self, run):
        code, out, _ = run("enum", "--basis", "b1", "--delta", "d3")
        lines = out.strip().splitlines()
        assert code == 0 and len(lines) == 8
        assert lines[-1] == "x + y"

    def test_range(self, run):
        code, out, _ = run("enum", "--basis", "b1", "--delta", "d3",
                           "--lo", "0", "--hi", "3")
        assert code == 0 and len(out.strip().splitlines()) == 3

    def test_out_of_range(self, run):
        code, _, err = run("enum", "--basis", "b1", "--delta", "d3",
                           "--hi", "9")
        assert code == 2


class TestField:
    def test_pendulum_lines(self, run):
        code, out, _ = run("field", "--ham", "1/2*x^2 + cos(y)")
        assert code == 0
        assert out.splitlines() == ["dx: sin(y)", "dy: x"]

    def test_json_mode(self, run):
        code, out, _ = run("field", "--ham", "1/2*(y^2 + x^2)", "--json")
        assert code == 0
        assert json.loads(out) == {"dx": "-y", "dy": "x"}

    def test_parse_error(self, run):
        code, _, err = run("field", "--ham", "x + (")
        assert code == 2

    def test_missing_flag_is_usage_error(self, run):
        with pytest.raises(SystemExit) as exc:
            run("field")
        assert exc.value.code == 1

    def test_unknown_command_is_usage_error(self, run):
        with pytest.raises(SystemExit) as exc:
            run("frobnicate")
        assert exc.value.code == 1


class TestDist:
    def test_euclid_sign_flip(self, run):
        # leading-dash values need the --flag=value spelling
        code, out, _ = run("dist", "--a=x", "--b=-x")
        assert code == 0
        assert float(out) == pytest.approx(math.sqrt(2))
        assert out.strip() == repr(math.sqrt(2))

    def test_jaccard_disjoint(self, run):
        code, out, _ = run("dist", "--a", "x", "--b", "y",
                           "--metric", "jaccard")
        assert code == 0 and float(out) == 1.0

    def test_jaccard_reordered_is_zero(self, run):
        code, out, _ = run("dist",
                           "--a", "x^3 + x*y^2 + x^2*y + y^3",
                           "--b", "y^3 + x*y^2 + x^2*y + x^3",
                           "--metric", "jaccard")
        assert code == 0 and float(out) == 0.0

    def test_levenshtein_reordered_is_positive(self, run):
        code, out, _ = run("dist",
                           "--a", "x^3 + x*y^2 + x^2*y + y^3",
                           "--b", "y^3 + x*y^2 + x^2*y + x^3",
                           "--metric", "levenshtein")
        assert code == 0 and int(out) > 0

    def test_identical(self, run):
        for metric in ("euclid", "jaccard", "levenshtein"):
            code, out, _ = run("dist", "--a", "x + y", "--b", "x + y",
                               "--metric", metric)
            assert code == 0 and float(out) == 0.0


class TestRender:
    def test_writes_tensor_and_pngs(self, run, tmp_path):
        stem = tmp_path / "r"
        code, out, _ = run("render", "--ham", "1/2*(y^2 + x^2)",
                           "--out", str(stem), "--resolution", "32")
        assert code == 0
        written = json.loads(out)["written"]
        assert len(written) == 4
        from pathlib import Path
        assert all(Path(p).exists() for p in written)

    def test_no_png(self, run, tmp_path):
        stem = tmp_path / "r"
        code, out, _ = run("render", "--ham", "x*y", "--out", str(stem),
                           "--resolution", "32", "--no-png")
        assert code == 0
        assert json.loads(out)["written"] == [f"{stem}.symf"]


class TestGenVerifyScore:
    def test_gen_counts(self, run, small_dataset):
        meta = json.loads((small_dataset / "meta.json").read_text())
        assert meta["counts"]["records"] == 400

    def test_verify_ok(self, run, small_dataset):
        code, out, _ = run("verify", "--dataset", str(small_dataset),
                           "--fraction", "0.02")
        assert code == 0
        assert json.loads(out)["ok"] is True

    def test_verify_failure_exit_code(self, run, small_dataset, tmp_path):
        import shutil
        copy = tmp_path / "bad"
        shutil.copytree(small_dataset, copy)
        victim = next((copy / "tensors").glob("*.symf"))
        victim.write_bytes(victim.read_bytes()[:-4] + b"\0\0\0\0")
        code, out, _ = run("verify", "--dataset", str(copy),
                           "--fraction", "1.0")
        assert code == 3
        assert json.loads(out)["ok"] is False

    def test_verify_missing_dir_is_validation(self, run, tmp_path):
        code, _, err = run("verify", "--dataset", str(tmp_path / "nope"))
        assert code == 2

    def test_score_roundtrip(self, run, small_dataset, tmp_path):
        from hamflow.datakit import iter_records
        preds = tmp_path / "p.jsonl"
        with open(preds, "w") as f:
            for rec in iter_records(small_dataset):
                f.write(json.dumps({"sample_id": rec["sample_id"],
                                    "predicted": rec["hamiltonian"]}) + "\n")
        code, out, _ = run("score", "--dataset", str(small_dataset),
                           "--predictions", str(preds))
        assert code == 0
        rep = json.loads(out)
        assert rep["exact_match_rate"] == 1.0 and rep["token_f1"] == 1.0


class TestVocab:
    def test_stdout_json(self, run):
        code, out, _ = run("vocab", "--basis", "b1", "--delta", "d3")
        assert code == 0
        assert len(json.loads(out)) == 4

    def test_write_file(self, run, tmp_path):
        p = tmp_path / "v.json"
        code, out, _ = run("vocab", "--basis", "b2", "--delta", "d5",
                           "--out", str(p))
        assert code == 0
        assert json.loads(out)["size"] == 20
        assert len(json.loads(p.read_text())) == 20


class TestConfigFile:
    def test_config_supplies_defaults(self, run, tmp_path):
        cfg = tmp_path / "conf.ini"
        cfg.write_text("basis = b1\ndelta = d3\n")
        code, out, _ = run("--config", str(cfg), "card")
        assert code == 0 and out.strip() == "8"

    def test_flags_override_config(self, run, tmp_path):
        cfg = tmp_path / "conf.ini"
        cfg.write_text("basis = b1\ndelta = d3\n")
        code, out, _ = run("--config", str(cfg), "card", "--basis", "b2")
        assert code == 0 and out.strip() == "242"

    def test_resolved_config_echoed_to_stderr(self, run):
        code, _, err = run("card")
        assert code == 0 and err.startswith("config: card ")

    def test_bad_config_line(self, run, tmp_path):
        cfg = tmp_path / "conf.ini"
        cfg.write_text("not a pair\n")
        code, _, err = run("--config", str(cfg), "card")
        assert code == 2
