import json

import pytest

from gridsolve.cli import main
from gridsolve.sheet import dumps, load_sample

from fixtures import FIG9_TA_SOLUTION


@pytest.fixture()
def sendmory_file(tmp_path):
    path = tmp_path / "sendmory.gsw"
    path.write_text(dumps(load_sample("sendmory")))
    return str(path)


@pytest.fixture()
def ta_file(tmp_path):
    path = tmp_path / "ta.gsw"
    path.write_text(dumps(load_sample("ta")))
    return str(path)


@pytest.fixture()
def unsat_file(tmp_path):
    doc = {
        "version": 1,
        "sheets": [
            {
                "name": "S",
                "cells": {
                    "B1": {"formula": "[1]", "pinned": None},
                    "B2": {"formula": "[1]", "pinned": None},
                    "B3": {"formula": "ALLDIFFERENT([B1,B2])", "pinned": None},
                },
            }
        ],
    }
    path = tmp_path / "unsat.gsw"
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture()
def slow_file(tmp_path):
    cells = {f"{chr(65 + i)}1": {"formula": "[1..11]", "pinned": None} for i in range(12)}
    refs = ",".join(f"{chr(65 + i)}1" for i in range(12))
    cells["A9"] = {"formula": f"ALLDIFFERENT([{refs}])", "pinned": None}
    doc = {"version": 1, "sheets": [{"name": "S", "cells": cells}]}
    path = tmp_path / "big.gsw"
    path.write_text(json.dumps(doc))
    return str(path)


def test_solve_sendmory_exit_0(sendmory_file, capsys):
    assert main(["solve", sendmory_file]) == 0
    out = capsys.readouterr().out
    assert "B3 = 9" in out and "E5 = 2" in out


def test_solve_unsat_exit_1(unsat_file, capsys):
    assert main(["solve", unsat_file]) == 1
    assert "UNSAT" in capsys.readouterr().out


def test_solve_timeout_exit_2(slow_file):
    assert main(["solve", slow_file, "--timeout", "50"]) == 2


def test_solve_missing_file_exit_3(tmp_path):
    assert main(["solve", str(tmp_path / "nope.gsw")]) == 3


def test_solve_json_out(sendmory_file, tmp_path):
    out = tmp_path / "solutions.json"
    assert main(["solve", sendmory_file, "--all", "5", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["status"] == "sat"
    assert len(doc["solutions"]) == 1
    assert doc["solutions"][0]["B3"] == "9"


def test_solve_csv_rows_sorted(ta_file, capsys):
    assert main(["solve", ta_file, "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "solution,addr,value"
    addrs = [line.split(",")[1] for line in lines[1:]]
    # row-major: all row-3 cells before row-4 cells, columns ascending inside
    assert addrs[:4] == ["B3", "C3", "D3", "E3"]
    assert addrs == sorted(addrs, key=lambda a: (int(a[1:]), a[0]))


def test_check_accepts_published_ta_solution(ta_file, tmp_path, capsys):
    sol = tmp_path / "fig9.json"
    sol.write_text(json.dumps(FIG9_TA_SOLUTION))
    assert main(["check", ta_file, str(sol)]) == 0
    assert "OK" in capsys.readouterr().out


def test_check_rejects_all_zeros_naming_count(ta_file, tmp_path, capsys):
    zeros = {addr: "0" for addr in FIG9_TA_SOLUTION}
    sol = tmp_path / "zeros.json"
    sol.write_text(json.dumps(zeros))
    assert main(["check", ta_file, str(sol)]) == 1
    out = capsys.readouterr().out
    assert "COUNT" in out or "SUM" in out or "+" in out


def test_check_missing_cell_exit_3(ta_file, tmp_path, capsys):
    partial = dict(FIG9_TA_SOLUTION)
    partial.pop("B3")
    sol = tmp_path / "partial.json"
    sol.write_text(json.dumps(partial))
    assert main(["check", ta_file, str(sol)]) == 3


def test_check_accepts_solve_output(sendmory_file, tmp_path):
    out = tmp_path / "solutions.json"
    assert main(["solve", sendmory_file, "--out", str(out)]) == 0
    assert main(["check", sendmory_file, str(out)]) == 0


def test_emit_writes_program(sendmory_file, tmp_path):
    out = tmp_path / "prog.pl"
    assert main(["emit", sendmory_file, "--out", str(out)]) == 0
    assert "all_different" in out.read_text()


def test_samples_list_and_dump(tmp_path, capsys):
    assert main(["samples", "list"]) == 0
    assert capsys.readouterr().out.split() == ["employee", "ta", "sendmory"]
    out = tmp_path / "ta.gsw"
    assert main(["samples", "dump", "ta", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["version"] == 1


def test_cli_matches_service_results(sendmory_file):
    import time

    from fastapi.testclient import TestClient

    from gridsolve.service import create_app

    doc = json.loads(open(sendmory_file).read())
    with TestClient(create_app()) as client:
        wb_id = client.post("/workbooks", json=doc).json()["id"]
        job_id = client.post(f"/workbooks/{wb_id}/solve", json={}).json()["job_id"]
        for _ in range(200):
            if client.get(f"/jobs/{job_id}").json()["status"] != "running":
                break
            time.sleep(0.02)
        service_solution = client.post(f"/jobs/{job_id}/next").json()["solution"]

    import io
    from contextlib import redirect_stdout

    buf = io.StringIO()
    with redirect_stdout(buf):
        assert main(["solve", sendmory_file, "--format", "csv"]) == 0
    cli_solution = {}
    for line in buf.getvalue().strip().splitlines()[1:]:
        _, addr, value = line.split(",")
        cli_solution[addr] = value
    assert cli_solution == service_solution
