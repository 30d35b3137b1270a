import json

import pytest

from main import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_tree(tmp_path, data, name="tree.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


TWO_LEAVES = {"kind": "product", "children": [{"kind": "leaf", "eps": 0.01}, {"kind": "leaf", "eps": 0.01}]}


class TestCompose:
    def test_two_leaf_product(self, capsys, tmp_path):
        code, out, _ = run(capsys, "compose", write_tree(tmp_path, TWO_LEAVES))
        payload = json.loads(out)
        assert code == 0
        assert payload["schema_version"] == 1
        assert payload["bound"] == pytest.approx(0.019999, abs=1e-6)
        assert "nodes" not in payload

    def test_single_leaf(self, capsys, tmp_path):
        code, out, _ = run(capsys, "compose", write_tree(tmp_path, {"kind": "leaf", "eps": 0.03}))
        assert code == 0 and json.loads(out)["bound"] == 0.03

    def test_verbose_breakdown(self, capsys, tmp_path):
        tree = {"kind": "tensor", "children": [TWO_LEAVES, {"kind": "leaf", "eps": 0.02}]}
        code, out, _ = run(capsys, "compose", write_tree(tmp_path, tree), "--verbose")
        nodes = json.loads(out)["nodes"]
        assert [n["path"] for n in nodes][-2:] == ["root.children[1]", "root"]

    def test_csv(self, capsys, tmp_path):
        code, out, _ = run(capsys, "compose", write_tree(tmp_path, TWO_LEAVES), "--format", "csv", "--method", "sum")
        assert out.splitlines() == ["path,kind,qubits,bound", "root,product,1,0.02"]

    def test_bad_leaf_names_path(self, capsys, tmp_path):
        tree = {"kind": "product", "children": [{"kind": "leaf", "eps": 0.01}, {"kind": "leaf", "eps": 1.5}]}
        code, _, err = run(capsys, "compose", write_tree(tmp_path, tree))
        assert code == 2
        assert "root.children[1]" in err

    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert run(capsys, "compose", str(path))[0] == 2

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "compose", str(tmp_path / "absent.json"))[0] == 2


class TestBudget:
    def test_both_regimes(self, capsys):
        code, out, _ = run(capsys, "budget", "--n-r", "100", "--eps", "0.01")
        payload = json.loads(out)
        assert code == 0
        assert payload["solutions"]["gpi"]["total_tcount"] == pytest.approx(3515.9, abs=0.5)
        assert payload["solutions"]["opnorm"]["total_tcount"] == pytest.approx(3643.1, abs=0.5)
        assert payload["cost_delta"] == pytest.approx(127.3, abs=2)
        assert payload["threshold"] == pytest.approx(56.25)
        assert payload["gpi_advantage"] is True

    def test_single_rotation(self, capsys):
        code, out, _ = run(capsys, "budget", "--n-r", "1", "--c", "1", "--distance", "gpi")
        solution = json.loads(out)["solutions"]["gpi"]
        assert solution["per_gate_eps"] == pytest.approx(0.01, rel=1e-12)
        assert "cost_delta" not in json.loads(out)

    def test_values_round_trip(self, capsys):
        from budget import cost_model, equal_split_gpi

        _, out, _ = run(capsys, "budget", "--n-r", "37", "--eps", "0.003")
        expected = equal_split_gpi(37, 0.003, model=cost_model("KMM15"))
        assert json.loads(out)["solutions"]["gpi"]["per_gate_eps"] == expected.per_gate_eps

    def test_optimality_check(self, capsys):
        code, out, _ = run(capsys, "budget", "--n-r", "3", "--c", "1", "--verify-trials", "2000")
        assert code == 0
        assert json.loads(out)["optimality"]["violated"] is False

    def test_infeasible(self, capsys):
        code, _, err = run(capsys, "budget", "--n-r", "10", "--eps", "0.01", "--delta", "0.01")
        assert code == 3
        assert "delta" in err

    def test_csv(self, capsys):
        _, out, _ = run(capsys, "budget", "--n-r", "100", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "regime,per_gate_eps,per_gate_tcount,total_tcount,total_tcount_int"
        assert [line.split(",")[0] for line in lines[1:]] == ["gpi", "opnorm"]

    def test_bad_model(self, capsys):
        assert run(capsys, "budget", "--n-r", "10", "--model", "SK97")[0] == 2

    def test_missing_required_flag(self, capsys):
        assert run(capsys, "budget")[0] == 2


class TestQft:
    def test_full_census(self, capsys):
        code, out, _ = run(capsys, "qft", "--n", "8")
        payload = json.loads(out)
        assert code == 0
        assert payload["census_total"] == 28
        assert payload["reports"]["gpi"]["pruned"] == []

    def test_pruned(self, capsys):
        _, out, _ = run(capsys, "qft", "--n", "8", "--k-max", "5", "--eps", "0.5")
        report = json.loads(out)["reports"]["gpi"]
        assert report["pruned"] == [6, 7, 8]
        assert report["eps_qft_gpi"] < report["eps_qft_opnorm"]

    def test_minimal(self, capsys):
        _, out, _ = run(capsys, "qft", "--n", "2", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "k,count,kept,error_gpi,error_opnorm"
        assert len(lines) == 2 and lines[1].startswith("2,1,true,")

    def test_pruning_exhausts_budget(self, capsys):
        assert run(capsys, "qft", "--n", "8", "--k-max", "5")[0] == 3


class TestQpe:
    def test_bits_and_both_regimes(self, capsys):
        code, out, _ = run(capsys, "qpe", "--n", "8", "--p", "0.75")
        payload = json.loads(out)
        assert code == 0
        assert payload["t"] == 10
        assert set(payload["reports"]) == {"gpi", "opnorm"}
        assert payload["tcount_delta"] > 0

    def test_phase_error_exhausts_budget(self, capsys):
        assert run(capsys, "qpe", "--n", "8", "--eps-total", "0.01", "--eps-qpe", "0.01")[0] == 3


class TestValidate:
    def test_custom_run(self, capsys):
        code, out, err = run(capsys, "validate", "--kind", "product", "--n-qubits", "1", "--m", "3",
                             "--eps", "0.05", "--trials", "20")
        assert code == 0
        assert "violations: 0" in err
        assert json.loads(out)["runs"][0]["trials"] == 20

    def test_identical_files_for_same_seed(self, capsys, tmp_path):
        for name in ("a", "b"):
            run(capsys, "validate", "--kind", "tensor", "--n-qubits", "1", "--m", "3", "--eps", "0.05",
                "--trials", "15", "--seed", "42", "--output-dir", str(tmp_path / name))
        files = sorted(p.name for p in (tmp_path / "a").iterdir())
        assert files == ["validate_0_tensor_n1_m3.csv"]
        assert (tmp_path / "a" / files[0]).read_bytes() == (tmp_path / "b" / files[0]).read_bytes()

    def test_default_grid(self, capsys):
        code, out, err = run(capsys, "validate", "--trials", "20")
        assert code == 0
        assert len(json.loads(out)["runs"]) == 4
        assert err.strip().endswith("violations: 0")

    def test_archive(self, capsys, tmp_path):
        from database.db import get_runs

        db = str(tmp_path / "runs.db")
        run(capsys, "validate", "--trials", "5", "--db", db)
        assert len(get_runs(db)) == 4

    def test_partial_custom_flags(self, capsys):
        assert run(capsys, "validate", "--kind", "product")[0] == 2


class TestFigures:
    def test_twelve_files(self, capsys, tmp_path):
        code, out, _ = run(capsys, "figures", "--output-dir", str(tmp_path))
        assert code == 0
        assert len(json.loads(out)["files"]) == 12
        assert len(list(tmp_path.glob("fig*_eps*.csv"))) == 12


class TestConfigAndErrors:
    def test_config_file_defaults(self, capsys, tmp_path):
        config = tmp_path / "run.env"
        config.write_text("N_R=10\nEPS=0.02\nDISTANCE=opnorm\nBOGUS=1\n")
        code, out, _ = run(capsys, "--config", str(config), "budget")
        payload = json.loads(out)
        assert code == 0
        assert payload["n_r"] == 10 and payload["eps"] == 0.02
        assert list(payload["solutions"]) == ["opnorm"]

    def test_flag_beats_config(self, capsys, tmp_path):
        config = tmp_path / "run.env"
        config.write_text("N_R=10\nEPS=0.02\n")
        _, out, _ = run(capsys, "--config", str(config), "budget", "--eps", "0.05")
        assert json.loads(out)["eps"] == 0.05

    def test_missing_config(self, capsys, tmp_path):
        assert run(capsys, "--config", str(tmp_path / "nope.env"), "budget", "--n-r", "5")[0] == 2

    def test_unwritable_output(self, capsys, tmp_path):
        blocker = tmp_path / "file.txt"
        blocker.write_text("")
        code, _, _ = run(capsys, "budget", "--n-r", "5", "-o", str(blocker / "out.json"))
        assert code == 4

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "out" / "budget.json"
        code, out, _ = run(capsys, "budget", "--n-r", "5", "-o", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["command"] == "budget"

    def test_estimate_env_with_validate(self, capsys, tmp_path):
        config = tmp_path / "estimate.env"
        config.write_text("MODEL=Selinger15\nEPS=0.001\nLOG_BASE=2\nLOG_LEVEL=INFO\n")
        code, out, err = run(capsys, "--config", str(config), "validate", "--trials", "5")
        assert code == 0
        assert len(json.loads(out)["runs"]) == 4
        assert "violations: 0" in err

    def test_config_does_not_expand_environment(self, capsys, tmp_path, monkeypatch):
        from main import load_config_file

        monkeypatch.setenv("GPI_TEST_EPS", "0.05")
        config = tmp_path / "run.env"
        config.write_text("N_R=10\nEPS=${GPI_TEST_EPS}\n")
        assert load_config_file(str(config))["EPS"] == "${GPI_TEST_EPS}"
        code, out, _ = run(capsys, "--config", str(config), "budget")
        assert code == 2
        assert out == ""
