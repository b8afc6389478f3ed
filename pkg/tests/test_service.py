import numpy as np
from fastapi.testclient import TestClient

from skewbm import __version__
from skewbm.service import app

client = TestClient(app)


class TestMeta:
    def test_health(self):
        r = client.get("/health")
        assert r.status_code == 200
        assert r.json() == {"name": "skewbm", "version": __version__}

    def test_checks_listing(self):
        r = client.get("/checks")
        assert r.status_code == 200
        names = r.json()["checks"]
        assert "flux-jump" in names and len(names) == len(set(names))


class TestDensityEndpoint:
    BASE = {"alpha": 0.3, "x": 1.0, "t": 1.0, "y_min": -2.0, "y_max": 2.0,
            "y_steps": 5, "ell_min": 0.0, "ell_max": 1.0, "ell_steps": 3,
            "side": "above"}

    def test_csv_shape_and_determinism(self):
        r1 = client.post("/density", json=self.BASE)
        r2 = client.post("/density", json=self.BASE)
        assert r1.status_code == 200
        assert r1.headers["content-type"].startswith("text/csv")
        assert r1.content == r2.content
        lines = r1.text.strip().split("\n")
        assert lines[0] == "y,ell,continuous,atom"
        assert len(lines) == 1 + 5 * 3

    def test_csv_roundtrip_precision(self):
        r = client.post("/density", json=self.BASE)
        rows = [line.split(",") for line in r.text.strip().split("\n")[1:]]
        from skewbm import atom_weight, joint_density_continuous

        for y_s, l_s, c_s, a_s in rows:
            y, ell = float(y_s), float(l_s)
            assert float(c_s) == float(
                joint_density_continuous(1.0, y, ell, 1.0, 0.3, side="above"))
            assert float(a_s) == float(atom_weight(1.0, y, 1.0))

    def test_nonnegative_sweep(self):
        req = dict(self.BASE, y_min=-3.0, y_max=3.0, y_steps=25, ell_max=3.0,
                   ell_steps=13)
        r = client.post("/density", json=req)
        vals = np.array([float(line.split(",")[2])
                         for line in r.text.strip().split("\n")[1:]])
        assert np.all(vals >= 0.0)

    def test_grid_with_zero_needs_side(self):
        req = dict(self.BASE, y_min=-1.0, y_max=1.0, y_steps=3)
        req.pop("side")
        r = client.post("/density", json=req)
        assert r.status_code == 422
        req["side"] = "avg"
        assert client.post("/density", json=req).status_code == 200

    def test_alpha_bounds_enforced(self):
        assert client.post("/density", json=dict(self.BASE, alpha=1.0)).status_code == 422
        assert client.post("/density", json=dict(self.BASE, t=0.0)).status_code == 422

    def test_json_format(self):
        r = client.post("/density", json=dict(self.BASE, format="json"))
        body = r.json()
        assert set(body) == {"y", "ell", "continuous", "atom"}
        assert len(body["y"]) == 15


class TestSampleEndpoint:
    def test_deterministic_csv(self):
        req = {"alpha": 0.3, "x": 1.0, "t": 1.0, "n_samples": 10, "seed": 42}
        r1 = client.post("/sample", json=req)
        r2 = client.post("/sample", json=req)
        assert r1.content == r2.content
        lines = r1.text.strip().split("\n")
        assert lines[0] == "y,ell,hit"
        assert len(lines) == 11

    def test_interface_start_always_hits(self):
        req = {"alpha": 0.5, "x": 0.0, "t": 1.0, "n_samples": 200, "seed": 1,
               "format": "json"}
        body = client.post("/sample", json=req).json()
        assert all(h == 1 for h in body["hit"])


class TestSimulateEndpoint:
    def test_reflected_walk(self):
        req = {"alpha": 1.0, "x": 0.0, "t": 1.0, "n": 400, "n_paths": 100,
               "seed": 3, "format": "json"}
        body = client.post("/simulate", json=req).json()
        assert set(body) == {"terminal", "local_time", "occupation_pos"}
        assert min(body["terminal"]) >= 0.0

    def test_step_floor_enforced(self):
        req = {"alpha": 0.5, "x": 0.0, "t": 1.0, "n": 99, "n_paths": 10, "seed": 3}
        assert client.post("/simulate", json=req).status_code == 422

    def test_oversized_drift_rejected(self):
        req = {"alpha": 0.5, "x": 0.0, "t": 1.0, "v": 30.0, "n": 400,
               "n_paths": 10, "seed": 3}
        assert client.post("/simulate", json=req).status_code == 400


class TestVerifyEndpoint:
    def test_subset_run(self):
        req = {"seed": 5, "names": ["flux-jump", "reflection-joint",
                                    "normalization-x0-t1-a0.5"]}
        r = client.post("/verify", json=req)
        assert r.status_code == 200
        body = r.json()
        assert body["overall_pass"] is True
        assert body["seed"] == 5
        assert {c["name"] for c in body["checks"]} == set(req["names"])

    def test_unknown_name_rejected(self):
        r = client.post("/verify", json={"seed": 5, "names": ["no-such-check"]})
        assert r.status_code == 400

    def test_custom_suite_unknown_kind_rejected(self):
        r = client.post("/verify", json={
            "checks": [{"name": "a", "kind": "bogus-kind", "params": {}}]})
        assert r.status_code == 400

    def test_custom_suite_runs(self):
        r = client.post("/verify", json={
            "seed": 2,
            "checks": [
                {"name": "quick-flux", "kind": "flux-jump",
                 "params": {"n_tuples": 50}, "seed": 7},
            ]})
        body = r.json()
        assert body["overall_pass"] is True
        assert body["checks"][0]["kind"] == "flux-jump"
