"""Rho-algorithm extrapolation at infinity, scalar and vector variants.

The table is built column by column from the recurrence

    rho(i, -1) = 0,   rho(i, 0) = S_i,
    rho(i, j+1) = rho(i+1, j-1) + (x(i+j+1) - x(i)) / (rho(i+1, j) - rho(i, j)),

where the reciprocal of a difference vector is the Samelson inverse
conj(y)/|y|^2.  Entries whose denominator nearly vanishes are flagged
invalid and poison only their dependents.  Only even columns approximate
the limit; odd columns are auxiliary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NoAccelerantAvailableError

__all__ = ["RhoTable", "rho_scalar", "rho_vector", "select"]

DENOM_TOL = 1e-14


@dataclass
class RhoTable:
    """Extrapolation table: columns[j][i] = rho(i, j), with validity flags."""

    nodes: np.ndarray                 # strictly increasing abscissae
    columns: list                     # j -> array of shape (len(nodes)-j, dim)
    valid: list                       # j -> bool array of shape (len(nodes)-j,)
    scalar: bool = False

    @property
    def n_columns(self) -> int:
        return len(self.columns)

    def entry(self, i: int, j: int):
        value = self.columns[j][i]
        return value[0] if self.scalar else value


def _build(S: np.ndarray, nodes: np.ndarray) -> tuple[list, list]:
    m, dim = S.shape
    columns = [S.copy()]
    valid = [np.ones(m, dtype=bool)]
    prev_prev = np.zeros((m + 1, dim))           # virtual column j = -1
    prev_prev_valid = np.ones(m + 1, dtype=bool)
    for j in range(m - 1):
        cur, cur_valid = columns[j], valid[j]
        nxt = np.zeros((m - j - 1, dim))
        nxt_valid = np.zeros(m - j - 1, dtype=bool)
        for i in range(m - j - 1):
            if not (cur_valid[i] and cur_valid[i + 1] and prev_prev_valid[i + 1]):
                continue
            diff = cur[i + 1] - cur[i]
            norm2 = float(diff @ diff)
            scale = float(cur[i] @ cur[i]) + float(cur[i + 1] @ cur[i + 1])
            if norm2 <= (DENOM_TOL * (1.0 + np.sqrt(scale))) ** 2:
                continue
            dx = nodes[i + j + 1] - nodes[i]
            nxt[i] = prev_prev[i + 1] + dx * diff / norm2
            nxt_valid[i] = True
        columns.append(nxt)
        valid.append(nxt_valid)
        prev_prev, prev_prev_valid = cur, cur_valid
    return columns, valid


def rho_vector(sequences: np.ndarray, nodes) -> RhoTable:
    """Vector rho table for a sequence of real vectors (rows of `sequences`)."""
    S = np.asarray(sequences, dtype=float)
    if S.ndim != 2:
        raise ValueError("sequences must be a (terms, dim) array")
    nodes = np.asarray(nodes, dtype=float)
    if nodes.size != S.shape[0] or nodes.size < 2:
        raise ValueError("need one strictly increasing node per term, at least two")
    if np.any(np.diff(nodes) <= 0):
        raise ValueError("nodes must be strictly increasing")
    columns, valid = _build(S, nodes)
    return RhoTable(nodes=nodes, columns=columns, valid=valid, scalar=False)


def rho_scalar(sequence, nodes) -> RhoTable:
    """Scalar rho table; delegates to the vector algorithm on length-1 vectors."""
    S = np.asarray(sequence, dtype=float).reshape(-1, 1)
    table = rho_vector(S, nodes)
    table.scalar = True
    return table


def select(table: RhoTable, mode: str = "diagonal"):
    """Extract an accelerated sequence: "diagonal" (rho(0, 2m)) or "column:j"."""
    if mode == "diagonal":
        picks = [(0, j) for j in range(0, table.n_columns, 2) if table.valid[j][0]]
    elif mode.startswith("column"):
        j = int(mode.split(":", 1)[1]) if ":" in mode else 0
        if j >= table.n_columns:
            raise NoAccelerantAvailableError(f"table has no column {j}")
        picks = [(i, j) for i in range(table.columns[j].shape[0]) if table.valid[j][i]]
    else:
        raise ValueError(f"unknown selection mode {mode!r}")
    if not picks:
        raise NoAccelerantAvailableError(f"no valid entries for selection {mode!r}")
    values = [table.entry(i, j) for i, j in picks]
    return np.array(values)
