"""HTTP/JSON service for the interactive solve loop.

Endpoints (all payloads UTF-8 JSON):
    POST   /workbooks                      upload a workbook file
    GET    /workbooks/{id}                 current grid, tables, view, overlay
    PATCH  /workbooks/{id}/cells/{addr}    set formula or pin
    POST   /workbooks/{id}/copy            copy-with-transform macros
    POST   /workbooks/{id}/solve           start an async solve job
    POST   /workbooks/{id}/view            switch constraint/solution view
    GET    /workbooks/{id}/export/clpfd    emitted program text
    GET    /jobs/{job_id}                  status snapshot (never blocks)
    POST   /jobs/{job_id}/next             advance the solution cursor
    GET    /samples                        sample names
    POST   /workbooks/from-sample/{name}   load a shipped sample

Environment: GRIDSOLVE_PORT (default 7717), GRIDSOLVE_DATA_DIR (optional
persistence), GRIDSOLVE_MAX_JOBS (default 4).
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from pathlib import Path
from typing import Optional

from fastapi import Body, FastAPI, Response
from fastapi.responses import JSONResponse, PlainTextResponse

from ..compiler import LoweringError, emit_clpfd
from ..fd import SolveConfig, VarOrder
from ..formula import (
    OutOfGridError,
    ParseError,
    col_to_letters,
    format_value,
    parse_cell_ref,
)
from ..formula.parser import parse_cell_range, parse_value_literal
from ..sheet import (
    BadCopyError,
    CopyMode,
    SAMPLE_NAMES,
    ViewMode,
    Workbook,
    WorkbookError,
    WorkbookLoadError,
    dumps,
    load_sample,
    workbook_from_dict,
    workbook_to_dict,
)
from .jobs import JobManager, JobStatus

DEFAULT_PORT = 7717


class WorkbookEntry:
    def __init__(self, wb: Workbook):
        self.workbook = wb
        self.lock = threading.Lock()  # single writer per workbook


def _error(status: int, code: str, message: str, cell: str = "") -> JSONResponse:
    payload = {"code": code, "message": message}
    if cell:
        payload["cell"] = cell
    return JSONResponse(payload, status_code=status)


def _diag_response(err: LoweringError) -> JSONResponse:
    diags = [
        {"severity": d.severity, "cell": d.cell, "code": d.code, "message": d.message}
        for d in err.diagnostics
    ]
    first_cell = err.diagnostics[0].cell if err.diagnostics else ""
    return JSONResponse(
        {
            "code": "lowering_failed",
            "message": str(err),
            "cell": first_cell,
            "diagnostics": diags,
        },
        status_code=422,
    )


def create_app(
    data_dir: Optional[str] = None, max_jobs: Optional[int] = None
) -> FastAPI:
    data_dir = data_dir if data_dir is not None else os.environ.get("GRIDSOLVE_DATA_DIR")
    if max_jobs is None:
        max_jobs = int(os.environ.get("GRIDSOLVE_MAX_JOBS", "4"))

    app = FastAPI(title="gridsolve", version="0.1.0")
    workbooks: dict[str, WorkbookEntry] = {}
    jobs = JobManager(max_jobs=max_jobs)

    # -- persistence -------------------------------------------------------

    def persist(wb_id: str) -> None:
        if not data_dir:
            return
        path = Path(data_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / f"{wb_id}.gsw").write_text(dumps(workbooks[wb_id].workbook), "utf-8")

    if data_dir and Path(data_dir).is_dir():
        for file in sorted(Path(data_dir).glob("*.gsw")):
            try:
                wb = workbook_from_dict(json.loads(file.read_text("utf-8")))
            except (WorkbookError, ValueError):
                continue
            workbooks[file.stem] = WorkbookEntry(wb)

    def entry_or_none(wb_id: str) -> Optional[WorkbookEntry]:
        return workbooks.get(wb_id)

    def register(wb: Workbook) -> str:
        wb_id = uuid.uuid4().hex[:12]
        workbooks[wb_id] = WorkbookEntry(wb)
        persist(wb_id)
        return wb_id

    # -- workbooks -----------------------------------------------------------

    @app.post("/workbooks", status_code=201)
    def upload_workbook(body: dict = Body(...)):
        try:
            wb = workbook_from_dict(body)
        except WorkbookLoadError as err:
            return _error(400, "bad_workbook", str(err), err.cell)
        except WorkbookError as err:
            return _error(400, "bad_workbook", str(err))
        wb_id = register(wb)
        return {"id": wb_id, "revision": wb.revision}

    @app.get("/workbooks/{wb_id}")
    def get_workbook(wb_id: str):
        entry = entry_or_none(wb_id)
        if entry is None:
            return _error(404, "not_found", f"no workbook {wb_id}")
        wb = entry.workbook
        overlay = {}
        for sheet in wb.sheets:
            for (col, row), cell in sheet.cells.items():
                if cell.solution_overlay is not None:
                    overlay[f"{col_to_letters(col)}{row}"] = format_value(
                        cell.solution_overlay
                    )
        return {
            "id": wb_id,
            "revision": wb.revision,
            "view_mode": wb.view_mode.value,
            "workbook": workbook_to_dict(wb),
            "solution": overlay or None,
        }

    @app.patch("/workbooks/{wb_id}/cells/{addr}")
    def patch_cell(wb_id: str, addr: str, body: dict = Body(...)):
        entry = entry_or_none(wb_id)
        if entry is None:
            return _error(404, "not_found", f"no workbook {wb_id}")
        try:
            ref = parse_cell_ref(addr)
        except ParseError as err:
            return _error(422, "bad_address", str(err), addr)
        if "formula" not in body and "pinned" not in body:
            return _error(422, "bad_request", "body needs 'formula' or 'pinned'")
        with entry.lock:
            wb = entry.workbook
            try:
                if "formula" in body:
                    wb.set_cell_formula(ref, str(body["formula"] or ""))
                if "pinned" in body:
                    raw = body["pinned"]
                    if raw is None:
                        wb.set_pinned(ref, None)
                    else:
                        wb.set_pinned(ref, parse_value_literal(str(raw)))
            except ParseError as err:
                return JSONResponse(
                    {
                        "code": "parse_error",
                        "message": str(err),
                        "cell": addr,
                        "position": err.position,
                        "expected": list(err.expected),
                    },
                    status_code=422,
                )
            persist(wb_id)
            return {"revision": wb.revision}

    @app.post("/workbooks/{wb_id}/copy")
    def copy_cells(wb_id: str, body: dict = Body(...)):
        entry = entry_or_none(wb_id)
        if entry is None:
            return _error(404, "not_found", f"no workbook {wb_id}")
        try:
            src = parse_cell_ref(str(body.get("src", "")))
            raw_dst = body.get("dst_range", [])
            if isinstance(raw_dst, str):
                dst = list(parse_cell_range(raw_dst))
            else:
                dst = [ref for part in raw_dst for ref in parse_cell_range(str(part))]
            mode = CopyMode(str(body.get("mode", "all_append")))
            index = int(body.get("index", 0))
        except (ParseError, ValueError) as err:
            return _error(422, "bad_request", str(err))
        if not dst:
            return _error(422, "bad_request", "dst_range is empty")
        with entry.lock:
            try:
                entry.workbook.copy_cell(src, dst, mode, index)
            except OutOfGridError as err:
                return _error(409, "out_of_grid", str(err))
            except BadCopyError as err:
                return _error(422, "bad_copy", str(err))
            persist(wb_id)
            return {"revision": entry.workbook.revision}

    @app.post("/workbooks/{wb_id}/view")
    def set_view(wb_id: str, body: dict = Body(...)):
        entry = entry_or_none(wb_id)
        if entry is None:
            return _error(404, "not_found", f"no workbook {wb_id}")
        try:
            mode = ViewMode(str(body.get("mode", "")))
        except ValueError:
            return _error(422, "bad_request", "mode must be constraints|solution")
        with entry.lock:
            entry.workbook.set_view(mode)
            return {"revision": entry.workbook.revision}

    @app.get("/workbooks/{wb_id}/export/clpfd", response_class=PlainTextResponse)
    def export_clpfd(wb_id: str):
        entry = entry_or_none(wb_id)
        if entry is None:
            return Response("no such workbook\n", status_code=404, media_type="text/plain")
        try:
            return emit_clpfd(entry.workbook)
        except LoweringError as err:
            return _diag_response(err)

    # -- solving -----------------------------------------------------------

    def _config_from(body: Optional[dict]) -> SolveConfig:
        body = body or {}
        var_order = VarOrder(str(body.get("var_order", "first_fail")))
        return SolveConfig(
            var_order=var_order,
            max_solutions=int(body.get("max_solutions", 1000)),
            timeout_ms=int(body.get("timeout_ms", 10000)),
        )

    @app.post("/workbooks/{wb_id}/solve", status_code=202)
    def solve(wb_id: str, body: Optional[dict] = Body(None)):
        entry = entry_or_none(wb_id)
        if entry is None:
            return _error(404, "not_found", f"no workbook {wb_id}")
        try:
            config = _config_from(body)
        except ValueError as err:
            return _error(422, "bad_request", str(err))
        with entry.lock:
            snapshot = entry.workbook.snapshot()
        try:
            job = jobs.start(wb_id, snapshot, config)
        except LoweringError as err:
            return _diag_response(err)
        if job is None:
            return _error(429, "too_many_jobs", "solver capacity reached, retry later")
        return {"job_id": job.id}

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            return _error(404, "not_found", f"no job {job_id}")
        entry = entry_or_none(job.workbook_id)
        stale = bool(entry and entry.workbook.revision > job.snapshot_revision)
        payload = {
            "status": job.status.value,
            "solution_count": len(job.solutions),
            "stale": stale,
        }
        if job.error:
            payload["error"] = job.error
        return payload

    @app.post("/jobs/{job_id}/next")
    def job_next(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            return _error(404, "not_found", f"no job {job_id}")
        if job.status is not JobStatus.SAT:
            return _error(409, "not_sat", f"job is {job.status.value}")
        got = job.next_solution()
        if got.exhausted:
            return {"exhausted": True, "position": got.position}
        if got.timed_out:
            return {"exhausted": False, "timeout": True, "position": got.position}
        entry = entry_or_none(job.workbook_id)
        if entry is not None:
            with entry.lock:
                values = {
                    (parse_cell_ref(addr).col, parse_cell_ref(addr).row): parse_value_literal(text)
                    for addr, text in got.solution.items()
                }
                entry.workbook.set_solution(values)
        return {"solution": got.solution, "position": got.position}

    # -- samples --------------------------------------------------------------

    @app.get("/samples")
    def samples():
        return {"samples": list(SAMPLE_NAMES)}

    @app.post("/workbooks/from-sample/{name}", status_code=201)
    def from_sample(name: str):
        try:
            wb = load_sample(name)
        except WorkbookError as err:
            return _error(404, "unknown_sample", str(err))
        wb_id = register(wb)
        return {"id": wb_id, "revision": wb.revision}

    # -- static frontend (optional) ---------------------------------------

    static_dir = os.environ.get("GRIDSOLVE_STATIC_DIR")
    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def main() -> None:
    import uvicorn

    port = int(os.environ.get("GRIDSOLVE_PORT", str(DEFAULT_PORT)))
    uvicorn.run(create_app(), host="127.0.0.1", port=port)


if __name__ == "__main__":
    main()
