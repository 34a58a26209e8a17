import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from symrec.pipeline import parse_config, run_experiment
from symrec.service import create_app
from symrec.synth import make_recording

from test_pipeline import write_config, write_corpus


@pytest.fixture(scope="module")
def bundle_path(tmp_path_factory):
    tmp_path = tmp_path_factory.mktemp("service")
    write_corpus(tmp_path, per_class=10)
    config = parse_config(write_config(tmp_path, epochs=40))
    out = tmp_path / "run"
    run_experiment(config, out_dir=out)
    return out / "bundle.json"


@pytest.fixture()
def client(bundle_path):
    return TestClient(create_app(bundle_path=bundle_path))


def sample_body(k=None, seed=3):
    rec = make_recording("+", np.random.default_rng(seed))
    body = {"recording": json.loads(__import__("symrec").serialize_recording(rec))}
    if k is not None:
        body["k"] = k
    return body


class TestClassifyEndpoint:
    def test_response_schema(self, client):
        response = client.post("/classify", json=sample_body())
        assert response.status_code == 200
        payload = response.json()
        assert isinstance(payload, list)
        assert 1 <= len(payload) <= 10
        probs = []
        for entry in payload:
            assert isinstance(entry, dict) and len(entry) == 1
            ((symbol_id, probability),) = entry.items()
            assert symbol_id == str(int(symbol_id))  # string-keyed integer ids
            assert 0 < probability <= 1
            probs.append(probability)
        assert probs == sorted(probs, reverse=True)

    def test_k_limits_entries(self, client):
        payload = client.post("/classify", json=sample_body(k=2)).json()
        assert len(payload) == 2

    def test_k_capped_at_ten(self, client):
        payload = client.post("/classify", json=sample_body(k=50)).json()
        assert len(payload) <= 10

    def test_identical_requests_identical_responses(self, client):
        body = sample_body()
        first = client.post("/classify", json=body).json()
        second = client.post("/classify", json=body).json()
        assert first == second

    def test_not_json_is_400(self, client):
        response = client.post(
            "/classify", content=b"not json", headers={"content-type": "application/json"}
        )
        assert response.status_code == 400

    def test_missing_recording_field_is_400(self, client):
        assert client.post("/classify", json={"points": []}).status_code == 400

    def test_bad_recording_is_400(self, client):
        assert client.post("/classify", json={"recording": []}).status_code == 400
        assert (
            client.post("/classify", json={"recording": [[{"x": 1}]]}).status_code == 400
        )

    def test_bad_k_is_400(self, client):
        body = sample_body()
        body["k"] = "many"
        assert client.post("/classify", json=body).status_code == 400

    def test_oversized_body_is_413(self, bundle_path):
        app = create_app(bundle_path=bundle_path, max_body_bytes=200)
        client = TestClient(app)
        assert client.post("/classify", json=sample_body()).status_code == 413

    def test_no_model_is_503(self):
        client = TestClient(create_app())
        assert client.post("/classify", json=sample_body()).status_code == 503


class TestHealthAndReload:
    def test_health_reports_model(self, client):
        payload = client.get("/health").json()
        assert payload["status"] == "ok"
        assert payload["model"]["symbol_count"] == 5
        assert payload["model"]["topology"] == [80, 16, 5]
        assert payload["uptime_s"] >= 0

    def test_degraded_without_model(self):
        client = TestClient(create_app())
        payload = client.get("/health").json()
        assert payload["status"] == "degraded"
        assert payload["model"] is None

    def test_symbols_endpoint(self, client):
        payload = client.get("/symbols").json()
        assert len(payload) == 5
        assert all(isinstance(k, str) and k == str(int(k)) for k in payload)

    def test_reload_swaps_hash(self, tmp_path):
        write_corpus(tmp_path, per_class=6)
        config = parse_config(write_config(tmp_path, epochs=4))
        out = tmp_path / "run"
        run_experiment(config, seed=1, out_dir=out)
        client = TestClient(create_app(bundle_path=out / "bundle.json"))
        first_hash = client.get("/health").json()["model"]["hash"]

        run_experiment(config, seed=2, out_dir=out)  # retrain in place
        reload_payload = client.post("/reload").json()
        assert reload_payload["status"] == "reloaded"
        second_hash = client.get("/health").json()["model"]["hash"]
        assert second_hash == reload_payload["hash"]
        assert second_hash != first_hash

    def test_reload_without_file_is_409(self):
        client = TestClient(create_app())
        assert client.post("/reload").status_code == 409


class TestFrontendIntegration:
    FIXTURE = __import__("pathlib").Path(__file__).parents[1] / "frontend" / "tests" / "fixtures" / "capture.json"
    DIST = __import__("pathlib").Path(__file__).parents[1] / "frontend" / "dist"

    @pytest.mark.skipif(not DIST.is_dir(), reason="frontend bundle not built")
    def test_static_bundle_served(self, bundle_path):
        client = TestClient(create_app(bundle_path=bundle_path, static_dir=self.DIST))
        page = client.get("/ui/")
        assert page.status_code == 200
        assert "<canvas" in page.text
        script = client.get("/ui/main.js")
        assert script.status_code == 200

    @pytest.mark.skipif(not FIXTURE.exists(), reason="capture fixture not built")
    def test_browser_capture_classifies(self, client):
        recording = json.loads(self.FIXTURE.read_text())
        response = client.post("/classify", json={"recording": recording, "k": 5})
        assert response.status_code == 200
        payload = response.json()
        assert 1 <= len(payload) <= 5
