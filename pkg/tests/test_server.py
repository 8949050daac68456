"""The v1 HTTP JSON API: session lifecycle, compute wrappers, error codes."""

import pytest
from fastapi.testclient import TestClient

from matrixfirst.bench import verify_transcript
from matrixfirst.server import create_app


@pytest.fixture
def client():
    return TestClient(create_app())


def matrix_json(rows):
    return {
        "rows": len(rows),
        "cols": len(rows[0]),
        "data": [[str(v) for v in row] for row in rows],
    }


SWAP_MATRIX = matrix_json([[0, 1], [1, 0]])


class TestSessionLifecycle:
    def test_create_and_get(self, client):
        created = client.post(
            "/v1/session", json={"matrix": SWAP_MATRIX, "mode": "reduce_to_ref"}
        )
        assert created.status_code == 200
        body = created.json()
        sid = body["id"]
        assert body["state"]["status"] == "in_progress"
        assert body["state"]["analysis"]["rank"] == 2

        fetched = client.get(f"/v1/session/{sid}")
        assert fetched.status_code == 200
        assert fetched.json()["current"]["data"] == [["0", "1"], ["1", "0"]]

    def test_hint_apply_export_cycle(self, client):
        sid = client.post(
            "/v1/session", json={"matrix": SWAP_MATRIX, "mode": "reduce_to_ref"}
        ).json()["id"]
        hint = client.post(f"/v1/session/{sid}/hint").json()
        assert hint["op"] == {"kind": "Swap", "i": 0, "j": 1}
        assert hint["resulting_pivot"] == [0, 0]

        applied = client.post(f"/v1/session/{sid}/op", json={"op": hint["op"]})
        assert applied.json()["accepted"]
        assert applied.json()["state"]["status"] == "goal_reached"

        transcript = client.get(f"/v1/session/{sid}/export").json()
        ok, message = verify_transcript(transcript)
        assert ok, message

    def test_rejected_op_keeps_state(self, client):
        sid = client.post(
            "/v1/session", json={"matrix": SWAP_MATRIX, "mode": "reduce_to_ref"}
        ).json()["id"]
        before = client.get(f"/v1/session/{sid}").json()["current"]
        rejected = client.post(
            f"/v1/session/{sid}/op",
            json={"op": {"kind": "Scale", "i": 0, "factor": "0"}},
        )
        assert rejected.status_code == 200
        assert not rejected.json()["accepted"]
        after = client.get(f"/v1/session/{sid}").json()["current"]
        assert before == after

    def test_whatif_preview(self, client):
        sid = client.post(
            "/v1/session", json={"matrix": SWAP_MATRIX, "mode": "reduce_to_ref"}
        ).json()["id"]
        preview = client.post(
            f"/v1/session/{sid}/whatif", json={"op": {"kind": "Swap", "i": 0, "j": 1}}
        )
        assert preview.json()["would_reach_goal"]
        assert client.get(f"/v1/session/{sid}").json()["status"] == "in_progress"

    def test_krylov_session_over_the_wire(self, client):
        created = client.post(
            "/v1/session",
            json={
                "matrix": matrix_json([[2, 0], [0, 3]]),
                "mode": "krylov",
                "b": ["1", "1"],
            },
        ).json()
        sid = created["id"]
        hint = client.post(f"/v1/session/{sid}/hint").json()
        assert hint["op"] == {"kind": "AppendIterate"}
        for _ in range(2):
            client.post(f"/v1/session/{sid}/op", json={"op": {"kind": "AppendIterate"}})
        state = client.get(f"/v1/session/{sid}").json()
        assert state["status"] == "goal_reached"
        assert state["annihilator"] == "x^2 - 5x + 6"


class TestErrorContract:
    def test_unknown_session_is_404(self, client):
        response = client.get("/v1/session/nope")
        assert response.status_code == 404
        assert set(response.json()) == {"code", "message"}

    def test_malformed_matrix_is_400(self, client):
        response = client.post(
            "/v1/session", json={"matrix": {"rows": 2, "cols": 2, "data": [["x"]]}}
        )
        assert response.status_code == 400
        assert response.json()["code"] == "bad_request"

    def test_float_session_is_400(self, client):
        response = client.post(
            "/v1/session",
            json={"matrix": {"rows": 1, "cols": 1, "data": [[0.5]], "domain": "float"}},
        )
        assert response.status_code == 400

    def test_hint_after_goal_is_409(self, client):
        sid = client.post(
            "/v1/session",
            json={"matrix": matrix_json([[1, 0], [0, 1]]), "mode": "reduce_to_rref"},
        ).json()["id"]
        response = client.post(f"/v1/session/{sid}/hint")
        assert response.status_code == 409
        assert response.json()["code"] == "goal_reached"

    def test_illegal_whatif_is_400(self, client):
        sid = client.post(
            "/v1/session", json={"matrix": SWAP_MATRIX, "mode": "reduce_to_ref"}
        ).json()["id"]
        response = client.post(
            f"/v1/session/{sid}/whatif",
            json={"op": {"kind": "Scale", "i": 0, "factor": "0"}},
        )
        assert response.status_code == 400

    def test_singular_inverse_is_400(self, client):
        response = client.post(
            "/v1/compute/inv", json={"matrix": matrix_json([[1, 2], [2, 4]])}
        )
        assert response.status_code == 400
        assert response.json()["code"] == "singular_matrix"

    def test_unknown_compute_op_is_400(self, client):
        response = client.post(
            "/v1/compute/spectralize", json={"matrix": matrix_json([[1]])}
        )
        assert response.status_code == 400


class TestCompute:
    def test_ref(self, client):
        response = client.post(
            "/v1/compute/ref",
            json={"matrix": matrix_json([[1, 2], [2, 4]]), "args": {"trace": True}},
        ).json()
        assert response["pivots"] == [[0, 0]]
        assert response["free_cols"] == [1]
        assert response["rank"] == 1
        assert response["ref"]["data"] == [["1", "2"], ["0", "0"]]
        assert len(response["trace"]["steps"]) == 1

    def test_solve_parametric(self, client):
        response = client.post(
            "/v1/compute/solve",
            json={"matrix": matrix_json([[1, 2]]), "args": {"b": ["3"]}},
        ).json()
        assert response["kind"] == "parametric"
        assert response["particular"] == ["3", "0"]
        assert response["nullspace_basis"] == [["-2", "1"]]

    def test_solve_inconsistent(self, client):
        response = client.post(
            "/v1/compute/solve",
            json={"matrix": matrix_json([[1, 2], [2, 4]]), "args": {"b": ["1", "1"]}},
        ).json()
        assert response["kind"] == "inconsistent"

    def test_lu_record_shape(self, client):
        response = client.post(
            "/v1/compute/lu", json={"matrix": matrix_json([[0, 1], [1, 0]])}
        ).json()
        assert set(response) == {"L", "R", "perm", "ex"}
        assert response["ex"] == 1

    def test_det(self, client):
        response = client.post(
            "/v1/compute/det", json={"matrix": matrix_json([[1, 2], [3, 4]])}
        ).json()
        assert response["det"] == "-2"

    def test_qr_converts_to_float(self, client):
        response = client.post(
            "/v1/compute/qr", json={"matrix": matrix_json([[1, 0], [0, 1]])}
        ).json()
        assert response["Q"]["domain"] == "float"

    def test_lstsq(self, client):
        response = client.post(
            "/v1/compute/lstsq",
            json={
                "matrix": {"rows": 2, "cols": 1, "data": [[1.0], [1.0]]},
                "args": {"b": [0.0, 2.0]},
            },
        ).json()
        assert response["x"][0] == pytest.approx(1.0)
        assert response["residual_norm"] == pytest.approx(2 ** 0.5)

    def test_minpoly(self, client):
        response = client.post(
            "/v1/compute/minpoly",
            json={"matrix": matrix_json([[2, 0, 0], [0, 2, 0], [0, 0, 3]])},
        ).json()
        assert response["minpoly"] == "x^2 - 5x + 6"
        assert response["coefficients"] == ["6", "-5", "1"]

    def test_eig_with_certificate(self, client):
        response = client.post(
            "/v1/compute/eig", json={"matrix": matrix_json([[2, 1], [1, 2]])}
        ).json()
        values = sorted((e["re"], e["im"]) for e in response["eigenvalues"])
        assert values[0] == pytest.approx((1.0, 0.0))
        assert values[1] == pytest.approx((3.0, 0.0))
        assert response["minpoly"] == "x^2 - 4x + 3"
        assert max(response["minpoly_residuals"]) < 1e-9

    def test_eig_float_has_no_certificate(self, client):
        response = client.post(
            "/v1/compute/eig",
            json={"matrix": {"rows": 1, "cols": 1, "data": [[2.5]]}},
        ).json()
        assert "minpoly" not in response
        assert response["eigenvalues"][0]["re"] == pytest.approx(2.5)
