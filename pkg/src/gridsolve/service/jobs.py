"""Asynchronous solve jobs with resumable solution cursors.

A job snapshots the workbook at launch, finds the first solution on a
worker thread, and then serves "next solution" requests by resuming the
same search state. Status reads never touch the search thread.
"""

from __future__ import annotations

import enum
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Optional

from ..compiler import VarMap, lift_solution, lower
from ..fd import EXHAUSTED, TIMEOUT, CspInstance, SearchState, SolveConfig, solve_next
from ..formula import format_value
from ..sheet import Workbook


class JobStatus(enum.Enum):
    RUNNING = "running"
    SAT = "sat"
    UNSAT = "unsat"
    TIMEOUT = "timeout"
    ERROR = "error"


@dataclass
class NextResult:
    solution: Optional[dict[str, str]] = None
    exhausted: bool = False
    timed_out: bool = False
    position: int = -1


class SolveJob:
    def __init__(
        self,
        workbook_id: str,
        snapshot: Workbook,
        instance: CspInstance,
        varmap: VarMap,
        config: SolveConfig,
    ):
        self.id = uuid.uuid4().hex[:12]
        self.workbook_id = workbook_id
        self.snapshot = snapshot
        self.snapshot_revision = snapshot.revision
        self.instance = instance
        self.varmap = varmap
        self.config = config
        self.status = JobStatus.RUNNING
        self.error = ""
        self.started_at = time.time()
        self.solutions: list[dict[str, str]] = []
        self.position = -1  # cursor: before the first solution
        self.exhausted = False
        self._state = SearchState(instance, config)
        self._lock = threading.Lock()  # one next() consumer at a time

    def _lift(self, assignment) -> dict[str, str]:
        values = lift_solution(assignment, self.varmap, self.snapshot)
        return {ref.text(): format_value(v) for ref, v in values.items()}

    def run_first(self) -> None:
        """Worker-thread entry: search for the first solution."""
        try:
            got = solve_next(self._state)
            if got is EXHAUSTED:
                self.status = JobStatus.UNSAT
                self.exhausted = True
            elif got is TIMEOUT:
                self.status = JobStatus.TIMEOUT
            else:
                self.solutions.append(self._lift(got))
                self.status = JobStatus.SAT
        except Exception as err:  # surface solver bugs as job errors
            self.error = str(err)
            self.status = JobStatus.ERROR

    def next_solution(self) -> NextResult:
        """Advance the cursor, resuming the search past the frontier."""
        with self._lock:
            if self.position + 1 < len(self.solutions):
                self.position += 1
                return NextResult(
                    solution=self.solutions[self.position], position=self.position
                )
            if self.exhausted or len(self.solutions) >= self.config.max_solutions:
                return NextResult(exhausted=True, position=self.position)
            got = solve_next(self._state)
            if got is EXHAUSTED:
                self.exhausted = True
                return NextResult(exhausted=True, position=self.position)
            if got is TIMEOUT:
                return NextResult(timed_out=True, position=self.position)
            self.solutions.append(self._lift(got))
            self.position = len(self.solutions) - 1
            return NextResult(
                solution=self.solutions[self.position], position=self.position
            )


class JobManager:
    def __init__(self, max_jobs: int = 4):
        self.max_jobs = max_jobs
        self.jobs: dict[str, SolveJob] = {}
        self._lock = threading.Lock()

    def running_count(self) -> int:
        return sum(1 for j in self.jobs.values() if j.status is JobStatus.RUNNING)

    def start(
        self,
        workbook_id: str,
        snapshot: Workbook,
        config: SolveConfig,
    ) -> Optional[SolveJob]:
        """Launch a job on its own thread; None when at capacity."""
        instance, varmap = lower(snapshot)
        with self._lock:
            if self.running_count() >= self.max_jobs:
                return None
            job = SolveJob(workbook_id, snapshot, instance, varmap, config)
            self.jobs[job.id] = job
        thread = threading.Thread(
            target=job.run_first, name=f"solve-{job.id}", daemon=True
        )
        thread.start()
        return job

    def get(self, job_id: str) -> Optional[SolveJob]:
        return self.jobs.get(job_id)
