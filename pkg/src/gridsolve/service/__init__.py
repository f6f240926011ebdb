"""HTTP service exposing workbook editing and the solve lifecycle."""

from .app import create_app
from .jobs import JobManager, JobStatus, SolveJob

__all__ = ["JobManager", "JobStatus", "SolveJob", "create_app"]
