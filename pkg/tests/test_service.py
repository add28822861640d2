from fastapi.testclient import TestClient

from frobdyn.service.app import app

client = TestClient(app)

INTRO = {
    "p": 3,
    "e": 1,
    "d": 1,
    "group": [{"type": "torus", "rank": 3}],
    "map": {
        "blocks": [[[1, 0, 0], [0, 3, 0], [0, 0, 3]]],
        "denominator": 1,
        "translation": ["1", "1", "1"],
    },
}


def test_healthz():
    assert client.get("/healthz").json() == {"status": "ok"}


class TestAnalyzeEndpoint:
    def test_worked_example(self):
        r = client.post("/analyze", json={"system": INTRO})
        assert r.status_code == 200
        v = r.json()["verdict"]
        assert v["conditionB"] == {
            "sigma": [1],
            "vector": [1, 0, 0],
            "vectorNormalForm": [1, 0, 0],
            "factor": "C1",
            "verified": True,
        }
        assert v["conditionC"]["dimZ"] == 2
        assert (v["conditionC"]["n0"], v["conditionC"]["r"]) == (1, 1)
        assert v["conditionA"]["constructed"] is False

    def test_dense_case(self):
        doc = {
            "p": 3,
            "d": 1,
            "group": [{"type": "torus", "rank": 1}],
            "map": {"blocks": [[[3]]], "translation": ["1"]},
        }
        r = client.post(
            "/analyze", json={"system": doc, "options": {"orbit_steps": 25}}
        )
        assert r.status_code == 200
        v = r.json()["verdict"]
        assert v["conditionB"] is None and v["conditionC"] is None
        assert v["conditionA"]["evidence"]["verdict"] == "DENSE-EVIDENCE"

    def test_invalid_p(self):
        bad = dict(INTRO, p=4)
        r = client.post("/analyze", json={"system": bad})
        assert r.status_code == 422

    def test_shape_mismatch(self):
        bad = dict(INTRO)
        bad = {**INTRO, "map": {"blocks": [[[1, 0], [0, 3]]]}}
        r = client.post("/analyze", json={"system": bad})
        assert r.status_code == 422


class TestSimulateEndpoint:
    def test_orbit_rows(self):
        r = client.post(
            "/simulate",
            json={"system": INTRO, "start": ["t1", "t1", "t1"], "steps": 2},
        )
        assert r.status_code == 200
        rows = r.json()["rows"]
        assert len(rows) == 3
        assert rows[1]["exponents"] == [["1"], ["3"], ["3"]]
        assert rows[2]["exponents"] == [["1"], ["9"], ["9"]]

    def test_correspondence_modulus(self):
        doc = {
            "p": 3,
            "d": 1,
            "group": [{"type": "torus", "rank": 1}],
            "map": {"blocks": [[["1"]]], "denominator": 2, "translation": ["1"]},
        }
        r = client.post(
            "/simulate",
            json={
                "system": doc,
                "start": ["t1"],
                "steps": 2,
                "torsion_rule": "enumerate",
            },
        )
        assert r.status_code == 200
        assert [row["modulus"] for row in r.json()["rows"]] == [1, 2, 2]


class TestReduceEndpoint:
    def test_worked_example(self):
        r = client.post("/reduce", json={"system": INTRO})
        assert r.status_code == 200
        nf = r.json()["normal_form"]
        assert nf["nStar"] == 1
        fac = nf["factors"][0]
        assert fac["unipotentSizes"] == [1]
        assert fac["frobeniusBlocks"] == [
            {"exponent": 1, "size": 1},
            {"exponent": 1, "size": 1},
        ]
        assert nf["bezout"]["ell0"] == 2
        assert nf["matrixIdentityVerified"] is True


class TestJordanEndpoint:
    def test_identity(self):
        r = client.post(
            "/jordan", json={"q": 3, "matrix": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}
        )
        assert r.status_code == 200
        assert r.json()["blocks"] == [
            {"eigenvalue": ["1"], "size": 1},
            {"eigenvalue": ["1"], "size": 1},
            {"eigenvalue": ["1"], "size": 1},
        ]

    def test_quaternion(self):
        r = client.post(
            "/jordan",
            json={
                "q": 4,
                "ring": {"kind": "quaternion", "a": -1, "b": -1},
                "matrix": [[["2", "0", "0", "0"], ["0", "1", "0", "0"]],
                           [["0", "0", "0", "0"], ["2", "0", "0", "0"]]],
            },
        )
        assert r.status_code == 200
        assert r.json()["blocks"] == [
            {"eigenvalue": ["2", "0", "0", "0"], "size": 2}
        ]

    def test_precondition_violation(self):
        r = client.post("/jordan", json={"q": 3, "matrix": [[1, 0], [0, 2]]})
        assert r.status_code == 422


class TestFSetEndpoint:
    def test_membership(self):
        req = {
            "field": {"p": 3, "e": 1, "d": 1},
            "fset": {
                "basis": ["t1"],
                "gamma": {"exponents": [["0"]], "torsion": ["0"]},
                "generators": [{"exponents": [["1"]], "torsion": ["0"]}],
                "steps": [1],
            },
            "point": {"exponents": [["9"]], "torsion": ["0"]},
        }
        r = client.post("/fset-member", json=req)
        assert r.status_code == 200
        body = r.json()
        assert body["member"] is True
        assert body["certificate"]["orbit_exponents"] == [2]
        req["point"] = {"exponents": [["5"]], "torsion": ["0"]}
        r2 = client.post("/fset-member", json=req)
        assert r2.json()["member"] is False


class TestFrobEqEndpoints:
    def test_count(self):
        req = {
            "eq": {
                "q": 2,
                "poly": ["0", "1"],
                "c0": "0",
                "terms": [{"c": "1", "delta": 1}],
            },
            "n_max": 1024,
        }
        r = client.post("/count-frobeq", json=req)
        assert r.status_code == 200
        assert r.json()["count"] == 11

    def test_solve(self):
        req = {
            "eq": {
                "q": 3,
                "poly": ["0", "1"],
                "c0": "0",
                "terms": [{"c": "1", "delta": 1}],
            },
            "n": 9,
        }
        r = client.post("/solve-frobeq", json=req)
        assert r.json() == {"solvable": True, "solution": [2]}


class TestAbstractFactorAnalyze:
    def test_matrix_level_verdict(self):
        doc = {
            "p": 3,
            "d": 1,
            "group": [
                {"type": "torus", "rank": 1},
                {
                    "type": "abstract",
                    "rank": 1,
                    "dim": 2,
                    "ring": {"kind": "quadratic", "trace": 1, "norm": 3},
                    "label": "A",
                },
            ],
            "map": {
                "blocks": [[[3]], [[[0, 1]]]],
                "translation": ["1"],
            },
        }
        r = client.post("/analyze", json={"system": doc})
        assert r.status_code == 200
        v = r.json()["verdict"]
        # class exponent 1: torus block (dim 1) + abelian block (dim 2) = 3 > 1
        assert v["conditionC"]["dimZ"] == 3
        assert v["conditionC"]["matrixLevel"] is True
        assert v["conditionC"]["verified"] is True
