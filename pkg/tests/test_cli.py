import json
import subprocess
import sys

import pytest

from mmes_lab.cli import SEED_ENV, dispatch, main
from mmes_lab.mmes import example_2x4_state
from mmes_lab.qmat import PureState, random_density_matrix
from mmes_lab.statefile import write_state


@pytest.fixture(autouse=True)
def _clear_seed_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


@pytest.fixture
def example_2x4(tmp_path):
    path = tmp_path / "example_2x4.json"
    write_state(example_2x4_state(), path)
    return path


def run_json(argv, capsys):
    code, report = dispatch(argv + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_mmes_check_example(example_2x4, capsys):
    code, payload, _ = run_json(["mmes-check", "--input", str(example_2x4), "--small-side", "a"], capsys)
    assert code == 0
    assert payload["data"]["certificate"]["rank"] == 2
    assert payload["data"]["certificate"]["verdict"] is True
    assert payload["parameters"]["small_side"] == "A"


def test_mmes_check_negative(tmp_path, capsys):
    path = tmp_path / "rand.json"
    write_state(random_density_matrix((2, 2), 0), path)
    code, payload, _ = run_json(["mmes-check", "--input", str(path)], capsys)
    assert code == 1
    assert payload["verdicts"][0]["witness"] > 0


def test_teleport_random_seed_7(capsys):
    code, payload, _ = run_json(["teleport", "--d", "2", "--random", "--seed", "7"], capsys)
    assert code == 0
    outcomes = payload["data"]["outcomes"]
    assert len(outcomes) == 8
    for o in outcomes:
        assert o["fidelity_after_correction"] == pytest.approx(1, abs=1e-9)
        assert o["probability"] == pytest.approx(1 / 8, abs=1e-10)


def test_teleport_from_file(tmp_path, capsys):
    path = tmp_path / "psi.json"
    write_state(PureState.from_vector([0.6, 0.8j]), path)
    code, payload, _ = run_json(["teleport", "--d", "2", "--state", str(path)], capsys)
    assert code == 0 and len(payload["data"]["outcomes"]) == 8
    assert dispatch(["teleport", "--d", "3", "--state", str(path)])[0] == 2


def test_json_is_deterministic(capsys):
    argv = ["teleport", "--d", "3", "--random", "--seed", "11"]
    first = run_json(argv, capsys)[2]
    second = run_json(argv, capsys)[2]
    assert first == second


@pytest.mark.parametrize(
    "argv",
    [
        ["teleport", "--d", "2", "--random"],
        ["locc", "--d", "3", "--subset", "0,0;1,1", "--trials", "50"],
        ["channel-demo"],
        ["xxz", "--j", "1", "--delta", "1"],
    ],
)
def test_env_seed_is_default(argv, monkeypatch, capsys):
    monkeypatch.setenv(SEED_ENV, "7")
    code, payload, from_env = run_json(argv, capsys)
    assert payload["seed"] == 7
    monkeypatch.delenv(SEED_ENV)
    _, _, explicit = run_json(argv + ["--seed", "7"], capsys)
    assert from_env == explicit


def test_fef_honors_env_seed(tmp_path, monkeypatch, capsys):
    path = tmp_path / "rho.json"
    write_state(random_density_matrix((2, 2), 3), path)
    monkeypatch.setenv(SEED_ENV, "5")
    code, payload, _ = run_json(["fef", "--input", str(path), "--restarts", "4"], capsys)
    assert code == 0 and payload["seed"] == 5
    assert 0.25 <= payload["data"]["value"] <= 1


def test_default_seed_zero(capsys):
    _, payload, _ = run_json(["xxz", "--j", "1", "--delta", "4"], capsys)
    assert payload["seed"] == 0
    assert payload["data"]["ground_state"]["degeneracy"] == 2
    assert payload["data"]["antiferromagnetic_regime"] is True


def test_verify_d2(capsys):
    code, payload, _ = run_json(["verify", "--d", "2"], capsys)
    assert code == 0
    assert all(v["passed"] for v in payload["verdicts"])


def test_verify_literal_kraus_fails(capsys):
    code, payload, _ = run_json(["verify", "--d", "2", "--kraus", "literal"], capsys)
    assert code == 1
    failed = [v["name"] for v in payload["verdicts"] if not v["passed"]]
    assert failed == ["channel:trace_preserving"]


def test_locc_perfect_and_impossible(capsys):
    code, payload, _ = run_json(["locc", "--d", "2", "--subset", "0,0;1,0"], capsys)
    assert code == 0
    assert payload["data"]["setting"] == "hadamard(0)"
    assert set(payload["data"]["success_rates"].values()) == {1.0}
    code, payload, _ = run_json(["locc", "--d", "2", "--subset", "0,0;0,1;1,0"], capsys)
    assert code == 1
    assert "best_setting" in payload["data"]


@pytest.mark.parametrize(
    "argv",
    [
        ["locc", "--d", "4", "--subset", "0,0;1,1"],
        ["locc", "--d", "3", "--subset", "0,0;x"],
        ["locc", "--d", "3", "--subset", ";"],
        ["channel-demo", "--p", "2"],
        ["xxz", "--j", "1", "--delta", "1", "--seed", "-1"],
        ["xxz", "--j", "1", "--delta", "1", "--seed", str(2**64)],
        ["teleport", "--d", "2"],
        ["nonsense"],
        [],
    ],
)
def test_invalid_input_exit_2(argv, capsys):
    assert main(argv) == 2


def test_bad_file_diagnostics(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text('{"dims": [2, 2],\n "kind": }')
    assert main(["mmes-check", "--input", str(broken)]) == 2
    assert "broken.json:2:" in capsys.readouterr().err
    unnormalized = tmp_path / "bad.json"
    unnormalized.write_text(json.dumps({"dims": [1, 2], "kind": "pure", "data": [[1, 0], [1, 0]]}))
    assert main(["fef", "--input", str(unnormalized)]) == 2
    assert "norm" in capsys.readouterr().err
    assert main(["fef", "--input", str(tmp_path / "missing.json")]) == 2


def test_module_entry_point(example_2x4):
    proc = subprocess.run(
        [sys.executable, "-m", "mmes_lab", "mmes-check", "--input", str(example_2x4), "--small-side", "a"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "[PASS] is_mmes" in proc.stdout
