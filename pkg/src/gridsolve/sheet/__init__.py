"""Workbook model, file format, and sample problems."""

from .fileio import (
    WorkbookLoadError,
    dumps,
    load,
    loads,
    save,
    workbook_from_dict,
    workbook_to_dict,
)
from .model import (
    Addr,
    BadCopyError,
    Cell,
    CopyMode,
    DuplicateNameError,
    FactTable,
    MapTable,
    NonBijectiveError,
    Sheet,
    UnknownSampleError,
    ViewMode,
    Workbook,
    WorkbookError,
    addr_of,
)
from .samples import SAMPLE_NAMES, build_employee, build_sendmory, build_ta, load_sample

__all__ = [
    "Addr",
    "BadCopyError",
    "Cell",
    "CopyMode",
    "DuplicateNameError",
    "FactTable",
    "MapTable",
    "NonBijectiveError",
    "SAMPLE_NAMES",
    "Sheet",
    "UnknownSampleError",
    "ViewMode",
    "Workbook",
    "WorkbookError",
    "WorkbookLoadError",
    "addr_of",
    "build_employee",
    "build_sendmory",
    "build_ta",
    "dumps",
    "load",
    "load_sample",
    "loads",
    "save",
    "workbook_from_dict",
    "workbook_to_dict",
]
