import csv
import importlib
import json

import pytest

import bajra_verify
import settings
from bajra.sampling import make_rng, random_family_spec
from conftest import spec_dict


def run(capsys, *argv):
    code = bajra_verify.main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_verify_invariance_identity(capsys, write_spec):
    code, report = run(capsys, "verify-invariance", write_spec(spec_dict()))
    assert code == 0
    assert report["passed"] is True
    assert report["residuals"]["max_invariance"] < 1e-13
    assert report["tolerances"] == {"invariance": 1e-9}
    assert report["wall_time"] >= 0


def test_verify_invariance_tan(capsys, write_spec):
    path = write_spec(spec_dict(gamma=-1.0, domain=(-1.2, 1.2), split1=("exp", [0.3])))
    code, report = run(capsys, "verify-invariance", path, "--grid", "21")
    assert code == 0
    assert report["residuals"]["grid_size"] == 21 * 21


def test_verify_invariance_rejects_dependent_spec(capsys, write_spec):
    code, report = run(capsys, "verify-invariance", write_spec(spec_dict(f_coeffs=(1, 2, 2, 4))))
    assert code == 2
    assert report["verdict"] == "NotIndependent"
    assert "NotIndependent" in report["error"]


def test_verify_invariance_tolerance_failure(capsys, write_spec, tmp_path):
    path = write_spec(spec_dict(split1=("exp", [0.5]), perturb={"target": "q1", "epsilon": 0.5}))
    out = tmp_path / "report.json"
    code, report = run(capsys, "verify-invariance", path, "--out", str(out))
    assert code == 1
    assert report["passed"] is False
    assert json.loads(out.read_text(encoding="utf-8")) == report


def test_verify_invariance_csv(capsys, write_spec, tmp_path):
    target = tmp_path / "residuals.csv"
    code, _ = run(capsys, "verify-invariance", write_spec(spec_dict()), "--grid", "5", "--csv", str(target))
    assert code == 0
    with open(target, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["x", "y", "residual"]
    assert len(rows) == 26


def test_verify_diagonal_builtin(capsys):
    code, report = run(capsys, "verify-diagonal", "--builtin", "arithmetic")
    assert code == 0
    assert report["diagonal_checks"]["mean"]["order1"] < 1e-9
    assert report["diagonal_checks"]["mean"]["points"] == 17


def test_verify_diagonal_spec_with_system(capsys, write_spec):
    path = write_spec(spec_dict(gamma=-1.0, split1=("quadratic", [0.5])))
    code, report = run(capsys, "verify-diagonal", path, "--system")
    assert code == 0
    assert report["diagonal_checks"]["system"]["fourth"] < 1e-8


def test_verify_diagonal_pathological_step(capsys):
    code, report = run(capsys, "verify-diagonal", "--builtin", "arithmetic", "--h", "1e-12")
    assert code == 1
    assert report["passed"] is False


def test_verify_diagonal_unknown_builtin(capsys):
    code, report = run(capsys, "verify-diagonal", "--builtin", "harmonic")
    assert code == 2
    assert report["verdict"] == "UnknownBuiltin"


def test_classify_random_family(capsys, write_spec):
    spec = random_family_spec(make_rng(99), -0.25)
    code, report = run(capsys, "classify", write_spec(spec.to_dict()))
    assert code == 0
    assert report["details"]["gamma"] == pytest.approx(-0.25, abs=1e-8)
    assert report["verdict"].startswith("ConfirmedFamily")


def test_classify_builtin_arithmetic(capsys):
    code, report = run(capsys, "classify", "--builtin", "arithmetic")
    assert code == 0
    assert report["details"]["gamma"] == pytest.approx(0.0, abs=1e-12)


def test_classify_mismatched_schwarzian_spec(capsys, write_spec):
    path = write_spec(spec_dict(gamma=-1.0, split1=("exp", [0.5]), g_gamma=1.0))
    code, report = run(capsys, "classify", path)
    assert code == 1
    assert "cond3" in report["details"]["failed"]
    assert report["verdict"].startswith("NecessaryFail")


def test_classify_perturbed_spec(capsys, write_spec):
    spec = random_family_spec(make_rng(5), 1.0).to_dict()
    spec["perturb"] = {"target": "p1", "epsilon": 0.01}
    code, report = run(capsys, "classify", write_spec(spec))
    assert code == 1
    assert report["details"]["kind"] == "NecessaryFail"


def test_recover_tan(capsys):
    code, report = run(capsys, "recover", "--builtin", "tan", "--x0", "0", "--domain", "-0.5", "0.5")
    assert code == 0
    assert report["details"]["gamma"] == pytest.approx(-1.0, abs=1e-8)
    assert report["details"]["u"] == pytest.approx([1.0, 0.0], abs=1e-12)
    assert report["details"]["v"] == pytest.approx([0.0, 1.0], abs=1e-12)


def test_recover_identity_and_mobius(capsys):
    code, report = run(capsys, "recover", "--builtin", "identity", "--x0", "0", "--domain", "-1", "1")
    assert code == 0
    assert report["details"]["gamma"] == pytest.approx(0.0, abs=1e-12)
    code, report = run(capsys, "recover", "--builtin", "mobius", "--params", "2", "1", "1", "3",
                       "--x0", "0.2", "--domain", "-1", "1")
    assert code == 0


def test_recover_cubic_fails(capsys):
    code, report = run(capsys, "recover", "--builtin", "cubic", "--x0", "0", "--domain", "-1", "1")
    assert code == 1
    assert report["verdict"] == "NonConstantSchwarzian"


def test_sweep_small(capsys):
    code, report = run(capsys, "sweep", "--draws", "1", "--grid", "9", "--seed", "3")
    assert code == 0
    assert report["details"]["families"] == 7
    assert report["residuals"]["max_invariance"] <= 1e-9


def test_unknown_command_is_a_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        bajra_verify.main(["integrate"])
    assert excinfo.value.code == 2


def test_broken_command_module(monkeypatch):
    real_import = importlib.import_module

    def import_module(name, *args):
        if name == "commands.sweep_command":
            raise ImportError("sweep is broken")
        return real_import(name, *args)

    monkeypatch.setattr(importlib, "import_module", import_module)
    monkeypatch.setattr(settings, "LOG_LEVEL", "INFO")
    with pytest.raises(SystemExit):
        bajra_verify.build_parser().parse_args(["sweep"])
    monkeypatch.setattr(settings, "LOG_LEVEL", "DEBUG")
    with pytest.raises(ImportError, match="sweep is broken"):
        bajra_verify.build_parser()


def test_log_file_is_appended():
    assert settings.LOGGING_CONFIG["handlers"]["file"]["mode"] == "a"
