"""CLI subcommands, exit codes, and JSON output round trips."""

import json

import pytest

from matrixfirst.cli import run
from matrixfirst.matrix import Matrix


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return {
        "identity": write("identity.csv", "1,0\n0,1\n"),
        "singular": write("singular.csv", "1,2\n2,4\n"),
        "symmetric": write("symmetric.csv", "2,1\n1,2\n"),
        "swap": write("swap.csv", "0,1\n1,0\n"),
        "basis": write("basis.csv", "1,1\n1,-1\n"),
        "vectors": write("vectors.csv", "1,0\n1,1\n"),
        "json_matrix": write(
            "matrix.json",
            json.dumps({"rows": 2, "cols": 2, "data": [["1", "2"], ["3", "4"]]}),
        ),
        "rect": write("rect.csv", "1\n1\n"),
    }


def run_json(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, json.loads(captured.out)


class TestExitCodes:
    def test_success_is_zero(self, files, capsys):
        assert run(["ref", "--in", files["identity"]]) == 0

    def test_singular_inverse_is_one(self, files, capsys):
        code = run(["inv", "--in", files["singular"]])
        captured = capsys.readouterr()
        assert code == 1
        assert "rank 1" in captured.err
        assert "free columns [1]" in captured.err

    def test_inconsistent_solve_is_one(self, files, capsys):
        assert run(["solve", "--in", files["singular"], "--rhs", "1,1"]) == 1

    def test_unknown_subcommand_is_two(self, files, capsys):
        assert run(["frobnicate"]) == 2

    def test_unreadable_file_is_two(self, capsys):
        assert run(["ref", "--in", "/nonexistent/nope.csv"]) == 2

    def test_malformed_matrix_is_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2\n3,banana\n")
        assert run(["ref", "--in", str(bad)]) == 2

    def test_deterministic_across_runs(self, files, capsys):
        first = run_json(capsys, ["ref", "--in", files["identity"], "--json"])
        second = run_json(capsys, ["ref", "--in", files["identity"], "--json"])
        assert first == second


class TestRefCommand:
    def test_json_pivots(self, files, capsys):
        code, payload = run_json(capsys, ["ref", "--in", files["identity"], "--json"])
        assert code == 0
        assert payload["pivots"] == [[0, 0], [1, 1]]
        assert payload["free_cols"] == []

    def test_round_trip_of_emitted_matrix(self, files, capsys):
        _, payload = run_json(capsys, ["ref", "--in", files["singular"], "--json"])
        parsed = Matrix.from_json(payload["ref"])
        assert parsed == Matrix.from_rows([[1, 2], [0, 0]])

    def test_trace_included_on_request(self, files, capsys):
        _, payload = run_json(
            capsys, ["ref", "--in", files["singular"], "--json", "--trace"]
        )
        assert payload["trace"]["steps"][0]["op"] == {
            "kind": "AddMultiple", "src": 0, "factor": "-2", "dst": 1,
        }
        assert "eliminate below pivot (0,0)" in payload["trace"]["steps"][0]["annotation"]

    def test_json_input_file(self, files, capsys):
        code, payload = run_json(capsys, ["ref", "--in", files["json_matrix"], "--json"])
        assert code == 0
        assert payload["rank"] == 2


class TestSolveAndFactor:
    def test_parametric_solution(self, files, capsys):
        _, payload = run_json(
            capsys, ["solve", "--in", files["singular"], "--rhs", "1,2", "--json"]
        )
        assert payload["kind"] == "parametric"

    def test_lu_record(self, files, capsys):
        _, payload = run_json(capsys, ["lu", "--in", files["swap"], "--json"])
        assert set(payload) == {"L", "R", "perm", "ex"}
        assert payload["ex"] == 1

    def test_det(self, files, capsys):
        _, payload = run_json(capsys, ["det", "--in", files["json_matrix"], "--json"])
        assert payload["det"] == "-2"

    def test_qr_orthogonality(self, files, capsys):
        _, payload = run_json(capsys, ["qr", "--in", files["symmetric"], "--json"])
        q = Matrix.from_json(payload["Q"])
        from matrixfirst.matrix import is_orthogonal

        assert is_orthogonal(q, tol=1e-12).orthogonal

    def test_lstsq(self, files, capsys):
        _, payload = run_json(
            capsys, ["lstsq", "--in", files["rect"], "--rhs", "0,2", "--json"]
        )
        assert payload["x"][0] == pytest.approx(1.0)

    def test_zero_pivot_exit_one(self, files, capsys):
        assert run(["lu", "--in", files["swap"], "--pivoting", "none"]) == 1


class TestBasisCommands:
    def test_basis_check(self, files, capsys):
        _, payload = run_json(
            capsys, ["basis-check", "--in", files["vectors"], "--dim", "2", "--json"]
        )
        assert payload["is_basis"]
        assert payload["rank"] == payload["count"] == 2

    def test_change_basis(self, files, capsys):
        _, payload = run_json(
            capsys,
            ["change-basis", "--in", files["symmetric"], "--basis", files["basis"], "--json"],
        )
        rep = Matrix.from_json(payload["representation"])
        assert rep == Matrix.from_rows([[3, 0], [0, 1]])


class TestEigenCommands:
    def test_eig_with_certificate(self, files, capsys):
        code, payload = run_json(capsys, ["eig", "--in", files["symmetric"], "--json"])
        assert code == 0
        values = sorted(e["re"] for e in payload["eigenvalues"])
        assert values == pytest.approx([1.0, 3.0])
        assert max(payload["minpoly_residuals"]) < 1e-9

    def test_minpoly(self, files, capsys):
        _, payload = run_json(capsys, ["minpoly", "--in", files["symmetric"], "--json"])
        assert payload["minpoly"] == "x^2 - 4x + 3"

    def test_minpoly_float_input_is_domain_error(self, files, capsys):
        # the exact Krylov track refuses lossy input
        assert run(["minpoly", "--in", files["symmetric"], "--float"]) == 1

    def test_krylov(self, files, capsys):
        _, payload = run_json(
            capsys, ["krylov", "--in", files["symmetric"], "--b", "1,0", "--json"]
        )
        assert payload["annihilator"] == "x^2 - 4x + 3"
        assert payload["iterates"] == [["1", "0"], ["2", "1"], ["5", "4"]]

    def test_charpoly_cost(self, capsys):
        _, payload = run_json(capsys, ["charpoly-cost", "--n", "5", "--json"])
        assert payload["permutation_terms"] == 120
        assert run(["charpoly-cost", "--n", "9"]) == 1


class TestGsCompare:
    def test_identity_both_tiny(self, files, capsys):
        _, payload = run_json(capsys, ["gs-compare", "--in", files["identity"], "--json"])
        assert payload["gram_schmidt_deviation"] <= 1e-15
        assert payload["householder_deviation"] <= 1e-15

    def test_hilbert_shows_instability(self, capsys):
        _, payload = run_json(capsys, ["gs-compare", "--hilbert", "10", "--json"])
        assert payload["ratio"] >= 1e6

    def test_well_conditioned_same_order(self, tmp_path, capsys):
        import random

        rng = random.Random(5)
        rows = "\n".join(
            ",".join(repr(rng.uniform(-1, 1)) for _ in range(5)) for _ in range(5)
        )
        path = tmp_path / "well.csv"
        path.write_text(rows + "\n")
        _, payload = run_json(capsys, ["gs-compare", "--in", str(path), "--json"])
        assert payload["gram_schmidt_deviation"] < 1e-12
        assert payload["householder_deviation"] < 1e-12


class TestFloatParsing:
    def test_float_flag_required_for_float_entries(self, tmp_path, capsys):
        path = tmp_path / "floaty.csv"
        path.write_text("0.5,1\n0,1\n")
        assert run(["ref", "--in", str(path)]) == 2  # floats rejected in rational parse
        assert run(["ref", "--in", str(path), "--float"]) == 0

    def test_tol_env_override(self, tmp_path, capsys, monkeypatch):
        path = tmp_path / "noise.csv"
        path.write_text("1,0\n0.000001,1\n")
        monkeypatch.setenv("MATRIXFIRST_TOL", "0.001")
        code, payload = run_json(capsys, ["ref", "--in", str(path), "--float", "--json"])
        assert code == 0
        assert payload["exchange_count"] == 0
        assert payload["pivots"] == [[0, 0], [1, 1]]
        monkeypatch.setenv("MATRIXFIRST_TOL", "not-a-number")
        assert run(["ref", "--in", str(path), "--float"]) == 2
