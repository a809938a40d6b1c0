"""
API tests through FastAPI's TestClient.
"""
import math
import pytest
from fastapi.testclient import TestClient

from main import app

BASE_URL = "/api/v1"


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as test_client:
        yield test_client


def test_health_check(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"


def test_root_lists_endpoints(client):
    endpoints = client.get("/").json()["endpoints"]
    assert set(endpoints) == {"graphs", "bounds", "estimator", "experiments"}


# ============================================================================
# Graphs
# ============================================================================

def test_complete_graph_spectrum(client):
    response = client.post(f"{BASE_URL}/graphs/spectrum", json={"kind": "complete", "T": 4})
    assert response.status_code == 200
    body = response.json()
    assert body["eigenvalues"] == [4.0, 4.0, 4.0, 0.0]
    assert body["edge_count"] == 6
    assert body["source"] == "closed_form"


def test_custom_graph_spectrum(client):
    response = client.post(f"{BASE_URL}/graphs/spectrum", json={"T": 4, "edges": [[1, 2], [3, 4]]})
    body = response.json()
    assert body["component_count"] == 2
    assert body["fiedler"] == pytest.approx(0.0, abs=1e-10)


def test_spectrum_rejects_kind_and_edges(client):
    response = client.post(f"{BASE_URL}/graphs/spectrum", json={"kind": "path", "T": 3, "edges": [[1, 2]]})
    assert response.status_code == 422


def test_self_loop_is_a_bad_request(client):
    response = client.post(f"{BASE_URL}/graphs/spectrum", json={"T": 3, "edges": [[2, 2]]})
    assert response.status_code == 400
    assert "Self-loops" in response.json()["detail"]


def test_quadratic_variation(client):
    body = {"graph": {"kind": "path", "T": 2}, "signal": [[0.0], [1.0]]}
    response = client.post(f"{BASE_URL}/graphs/quadratic-variation", json=body)
    assert response.json()["quadratic_variation"] == 1.0


# ============================================================================
# Bounds
# ============================================================================

def test_bound_report(client):
    body = {
        "mu": 1.0, "b1": 1.0, "b2": 1.0, "b3": 2.0, "lambda_min_CtC": 1.0,
        "laplacian_eigenvalues": [0.0, 3.0, 3.0, 3.0],
        "n": 1, "sigma": 1.0, "design_norm": 1.0, "S_T": 1.0, "delta": math.exp(-1),
    }
    response = client.post(f"{BASE_URL}/bounds/report", json=body)
    assert response.status_code == 200
    report = response.json()
    assert report["lambda_bar_prime"] == pytest.approx(0.1)
    assert report["regime"] == "small_mu"
    assert report["bias_bound"] == pytest.approx(4.0)
    assert report["variance_bound"] == pytest.approx(47.5)


def test_bound_report_invariant_violation(client):
    body = {
        "mu": 1.0, "b1": 1.0, "b2": 2.0, "b3": 2.0,
        "graph": {"kind": "star", "T": 4},
        "n": 1, "sigma": 1.0, "design_norm": 1.0, "S_T": 1.0,
    }
    response = client.post(f"{BASE_URL}/bounds/report", json=body)
    assert response.status_code == 422
    assert "b2 must be < b3" in response.json()["detail"]


def test_mu_star_rand_samp(client):
    body = {"rule": "rand_samp", "n": 5, "T": 100, "sigma": 0.0, "S_T": 1.0, "theta": 0.5, "c": 2.0}
    response = client.post(f"{BASE_URL}/bounds/mu-star", json=body)
    assert response.json()["mu_star"] == pytest.approx(0.02)


def test_mu_star_star_example(client):
    body = {"rule": "star", "n": 1, "T": 27, "sigma": 1.0, "S_T": 1.0, "c": 1.0,
            "lmin": 27.0, "lmax": 27.0, "design_norm": 1.0}
    response = client.post(f"{BASE_URL}/bounds/mu-star", json=body)
    assert response.json()["mu_star"] == pytest.approx(3 * 2 ** (1 / 3) - 1)


def test_mu_star_sync_computes_gamma(client):
    body = {"rule": "sync", "n": 50, "T": 10, "sigma": 0.0, "S_T": 1.0, "p_sum": 1.0, "p_max": 1.0, "c": 2.0}
    body_gamma = client.post(f"{BASE_URL}/bounds/mu-star", json=body).json()
    assert body_gamma["gamma"] == pytest.approx(10.0)
    assert body_gamma["mu_star"] == pytest.approx(0.2 * (50 * 1.0 / 10 + 100.0))


def test_mu_star_missing_inputs(client):
    body = {"rule": "complete", "n": 1, "T": 8, "sigma": 1.0, "S_T": 1.0}
    response = client.post(f"{BASE_URL}/bounds/mu-star", json=body)
    assert response.status_code == 400
    assert "lmin" in response.json()["detail"]


def test_gamma(client):
    response = client.get(f"{BASE_URL}/bounds/gamma", params={"n": 50, "p_max": 1.0, "T": 1})
    assert response.json()["gamma"] == pytest.approx(10.0)


# ============================================================================
# Estimator
# ============================================================================

def test_solve_constant_signal(client):
    body = {
        "graph": {"kind": "path", "T": 3},
        "n": 1,
        "blocks": [[[1.0]], [[1.0]], [[1.0]]],
        "y": [2.0, 2.0, 2.0],
        "mu": 1.0,
    }
    response = client.post(f"{BASE_URL}/estimator/solve", json=body)
    assert response.status_code == 200
    result = response.json()
    assert result["converged"]
    for row in result["estimate"]:
        assert row[0] == pytest.approx(2.0, abs=1e-8)


def test_solve_singular_system(client):
    body = {
        "graph": {"kind": "path", "T": 2},
        "n": 2,
        "blocks": [[[1.0, 0.0]], []],
        "y": [1.0],
        "mu": 1.0,
    }
    response = client.post(f"{BASE_URL}/estimator/solve", json=body)
    assert response.status_code == 422

    body["allow_rank_deficient"] = True
    response = client.post(f"{BASE_URL}/estimator/solve", json=body)
    assert response.status_code == 200
    assert response.json()["rank_deficient"]


def test_solve_block_width_mismatch(client):
    body = {
        "graph": {"kind": "path", "T": 2},
        "n": 2,
        "blocks": [[[1.0, 0.0, 3.0]], [[0.0, 1.0]]],
        "y": [1.0, 1.0],
        "mu": 1.0,
    }
    response = client.post(f"{BASE_URL}/estimator/solve", json=body)
    assert response.status_code == 400


# ============================================================================
# Experiments
# ============================================================================

def test_list_presets(client):
    presets = client.get(f"{BASE_URL}/experiments/presets").json()
    assert len(presets) == 8
    assert presets[0]["config"]["T_grid"] == [50, 100, 200, 400]


def test_run_small_experiment(client):
    config = {
        "graph_kind": "complete",
        "measurement_model": "sparse_rows",
        "theta": 0.5,
        "n": 2,
        "sigma": 0.5,
        "S_T_rule": "1",
        "T_grid": [12, 16],
        "trials": 2,
        "base_seed": 3,
    }
    response = client.post(f"{BASE_URL}/experiments/run", json={"config": config, "fresh": True})
    assert response.status_code == 200
    result = response.json()
    assert len(result["rows"]) == 4
    assert [a["T"] for a in result["aggregates"]] == [12, 16]

    rows = client.get(f"{BASE_URL}/experiments/{result['experiment_key']}/rows").json()
    assert len(rows) == 4


def test_run_needs_exactly_one_source(client):
    response = client.post(f"{BASE_URL}/experiments/run", json={})
    assert response.status_code == 400
    response = client.post(f"{BASE_URL}/experiments/run", json={"preset": "nope"})
    assert response.status_code == 400
