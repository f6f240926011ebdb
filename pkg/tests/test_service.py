import json
import time

import pytest
from fastapi.testclient import TestClient

from gridsolve.service import create_app
from gridsolve.sheet import dumps, load_sample


@pytest.fixture()
def client():
    with TestClient(create_app(data_dir=None, max_jobs=4)) as c:
        yield c


def upload_sample(client, name):
    got = client.post(f"/workbooks/from-sample/{name}")
    assert got.status_code == 201
    return got.json()["id"]


def wait_for_job(client, job_id, budget=30.0):
    deadline = time.time() + budget
    while time.time() < deadline:
        got = client.get(f"/jobs/{job_id}").json()
        if got["status"] != "running":
            return got
        time.sleep(0.02)
    raise AssertionError("job did not settle in time")


def test_upload_and_fetch_round_trip(client):
    doc = json.loads(dumps(load_sample("ta")))
    got = client.post("/workbooks", json=doc)
    assert got.status_code == 201
    wb_id = got.json()["id"]

    fetched = client.get(f"/workbooks/{wb_id}")
    assert fetched.status_code == 200
    body = fetched.json()
    assert body["workbook"]["sheets"][0]["cells"]["B3"]["formula"] == "[0,0.25,0.5,1]"
    assert body["view_mode"] == "constraints"

    # duplicate upload gets a distinct id
    second = client.post("/workbooks", json=doc)
    assert second.json()["id"] != wb_id


def test_upload_malformed_is_400(client):
    got = client.post("/workbooks", json={"version": 7})
    assert got.status_code == 400
    assert got.json()["code"] == "bad_workbook"

    bad_cell = {
        "version": 1,
        "sheets": [{"name": "S", "cells": {"B3": {"formula": "COUNT(", "pinned": None}}}],
    }
    got = client.post("/workbooks", json=bad_cell)
    assert got.status_code == 400
    assert got.json()["cell"] == "B3"


def test_patch_cell_formula_and_pin(client):
    got = client.post("/workbooks", json={"version": 1, "sheets": [{"name": "S", "cells": {}}]})
    wb_id = got.json()["id"]

    r1 = client.patch(f"/workbooks/{wb_id}/cells/B3", json={"formula": "[0..9]"})
    assert r1.status_code == 200 and r1.json()["revision"] == 1

    r2 = client.patch(f"/workbooks/{wb_id}/cells/B3", json={"pinned": "7"})
    assert r2.json()["revision"] == 2

    r3 = client.patch(f"/workbooks/{wb_id}/cells/B3", json={"formula": "COUNT("})
    assert r3.status_code == 422
    body = r3.json()
    assert body["code"] == "parse_error" and body["cell"] == "B3"
    assert isinstance(body["position"], int)

    assert client.patch(f"/workbooks/zzz/cells/B3", json={"formula": ""}).status_code == 404


def test_copy_endpoint(client):
    wb_id = upload_sample(client, "ta")
    got = client.post(
        f"/workbooks/{wb_id}/copy",
        json={"src": "B3", "dst_range": "G3:G4", "mode": "all_append"},
    )
    assert got.status_code == 200
    grid = client.get(f"/workbooks/{wb_id}").json()["workbook"]
    assert grid["sheets"][0]["cells"]["G3"]["formula"] == "[0,0.25,0.5,1]"

    # F3 references column B; shifting it five columns left leaves the grid
    oob = client.post(
        f"/workbooks/{wb_id}/copy",
        json={"src": "F3", "dst_range": "A3", "mode": "all_append"},
    )
    assert oob.status_code == 409
    assert oob.json()["code"] == "out_of_grid"


def test_solve_lifecycle_sendmory(client):
    wb_id = upload_sample(client, "sendmory")
    got = client.post(f"/workbooks/{wb_id}/solve", json={})
    assert got.status_code == 202
    job_id = got.json()["job_id"]

    status = wait_for_job(client, job_id)
    assert status["status"] == "sat"
    assert status["stale"] is False

    first = client.post(f"/jobs/{job_id}/next")
    assert first.status_code == 200
    solution = first.json()["solution"]
    assert [solution[a] for a in ("B3", "C3", "D3", "E3")] == ["9", "5", "6", "7"]
    assert [solution[a] for a in ("B4", "C4", "D4", "E5")] == ["1", "0", "8", "2"]

    second = client.post(f"/jobs/{job_id}/next")
    assert second.json() == {"exhausted": True, "position": 0}

    # the solution was overlaid on the live workbook
    overlay = client.get(f"/workbooks/{wb_id}").json()["solution"]
    assert overlay["B3"] == "9"


def test_solve_unsat(client):
    got = client.post("/workbooks", json={"version": 1, "sheets": [{"name": "S", "cells": {}}]})
    wb_id = got.json()["id"]
    client.patch(f"/workbooks/{wb_id}/cells/B1", json={"formula": "[1]"})
    client.patch(f"/workbooks/{wb_id}/cells/B2", json={"formula": "[1]"})
    client.patch(f"/workbooks/{wb_id}/cells/B3", json={"formula": "ALLDIFFERENT([B1,B2])"})

    job_id = client.post(f"/workbooks/{wb_id}/solve", json={}).json()["job_id"]
    status = wait_for_job(client, job_id)
    assert status["status"] == "unsat"
    assert client.post(f"/jobs/{job_id}/next").status_code == 409


def test_solve_rejects_unlowerable(client):
    got = client.post("/workbooks", json={"version": 1, "sheets": [{"name": "S", "cells": {}}]})
    wb_id = got.json()["id"]
    client.patch(f"/workbooks/{wb_id}/cells/B1", json={"formula": "[Morning]"})
    got = client.post(f"/workbooks/{wb_id}/solve", json={})
    assert got.status_code == 422
    body = got.json()
    assert body["code"] == "lowering_failed"
    assert body["diagnostics"][0]["code"] == "unresolved_symbol"
    assert body["diagnostics"][0]["cell"] == "B1"


def test_edit_during_job_marks_stale(client):
    wb_id = upload_sample(client, "ta")
    job_id = client.post(f"/workbooks/{wb_id}/solve", json={}).json()["job_id"]
    wait_for_job(client, job_id)
    client.patch(f"/workbooks/{wb_id}/cells/B3", json={"formula": "[0,0.25]"})
    got = client.get(f"/jobs/{job_id}").json()
    assert got["stale"] is True


def test_view_endpoint(client):
    wb_id = upload_sample(client, "ta")
    got = client.post(f"/workbooks/{wb_id}/view", json={"mode": "solution"})
    assert got.status_code == 200
    assert client.get(f"/workbooks/{wb_id}").json()["view_mode"] == "solution"
    texts_before = client.get(f"/workbooks/{wb_id}").json()["workbook"]
    client.post(f"/workbooks/{wb_id}/view", json={"mode": "constraints"})
    assert client.get(f"/workbooks/{wb_id}").json()["workbook"] == texts_before


def test_samples_endpoints(client):
    got = client.get("/samples")
    assert got.json() == {"samples": ["employee", "ta", "sendmory"]}
    assert client.post("/workbooks/from-sample/nope").status_code == 404


def test_export_clpfd(client):
    wb_id = upload_sample(client, "sendmory")
    got = client.get(f"/workbooks/{wb_id}/export/clpfd")
    assert got.status_code == 200
    assert got.headers["content-type"].startswith("text/plain")
    assert "all_different([B3,C3,D3,E3,B4,C4,D4,E5])" in got.text


def test_status_reads_fast_during_adversarial_solve(client):
    # an 18-queens-style alldifferent chain that cannot finish quickly
    doc = {"version": 1, "sheets": [{"name": "S", "cells": {}}]}
    wb_id = client.post("/workbooks", json=doc).json()["id"]
    for col in range(2, 14):
        addr = f"{chr(64 + col)}1"
        client.patch(f"/workbooks/{wb_id}/cells/{addr}", json={"formula": "[1..11]"})
    cells = ",".join(f"{chr(64 + c)}1" for c in range(2, 14))
    client.patch(f"/workbooks/{wb_id}/cells/A9", json={"formula": f"ALLDIFFERENT([{cells}])"})

    job_id = client.post(
        f"/workbooks/{wb_id}/solve", json={"timeout_ms": 3000}
    ).json()["job_id"]
    # while it runs, status reads stay fast
    samples = []
    for _ in range(10):
        t0 = time.perf_counter()
        got = client.get(f"/jobs/{job_id}")
        samples.append(time.perf_counter() - t0)
        assert got.status_code == 200
    assert max(samples) < 0.1, samples
    status = wait_for_job(client, job_id, budget=10)
    assert status["status"] == "timeout"


def test_job_capacity_429():
    with TestClient(create_app(data_dir=None, max_jobs=1)) as client:
        wb_id = upload_sample(client, "ta")
        doc = {"version": 1, "sheets": [{"name": "S", "cells": {}}]}
        slow_id = client.post("/workbooks", json=doc).json()["id"]
        for col in range(2, 14):
            addr = f"{chr(64 + col)}1"
            client.patch(f"/workbooks/{slow_id}/cells/{addr}", json={"formula": "[1..11]"})
        cells = ",".join(f"{chr(64 + c)}1" for c in range(2, 14))
        client.patch(
            f"/workbooks/{slow_id}/cells/A9", json={"formula": f"ALLDIFFERENT([{cells}])"}
        )
        first = client.post(f"/workbooks/{slow_id}/solve", json={"timeout_ms": 5000})
        assert first.status_code == 202
        second = client.post(f"/workbooks/{wb_id}/solve", json={})
        assert second.status_code == 429
        wait_for_job(client, first.json()["job_id"], budget=15)


def test_persistence_round_trip(tmp_path):
    with TestClient(create_app(data_dir=str(tmp_path), max_jobs=2)) as client:
        wb_id = upload_sample(client, "ta")
        client.patch(f"/workbooks/{wb_id}/cells/Z9", json={"formula": "[1..3]"})
    assert (tmp_path / f"{wb_id}.gsw").exists()

    with TestClient(create_app(data_dir=str(tmp_path), max_jobs=2)) as client:
        got = client.get(f"/workbooks/{wb_id}")
        assert got.status_code == 200
        assert got.json()["workbook"]["sheets"][0]["cells"]["Z9"]["formula"] == "[1..3]"
