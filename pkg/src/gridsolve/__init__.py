"""gridsolve: a constraint spreadsheet.

Attach finite-domain constraints to grid cells, compile the grid into a
CSP, solve it by propagation and backtracking search, and scroll through
the solutions interactively.
"""

__version__ = "0.1.0"
