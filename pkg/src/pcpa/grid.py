"""Grid topology, incidence/admittance construction and H/H-bar partitioning.

The grid is an undirected connected graph whose lines carry a designated
direction (taken from the source file's from/to ordering).  All matrices
are dense numpy arrays; desk-scale systems (<= a few hundred buses) make
this the simplest exactly-testable representation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class GridError(ValueError):
    """Raised for malformed or inconsistent grid descriptions."""


@dataclass(frozen=True)
class Line:
    id: int
    from_bus: int
    to_bus: int
    reactance: float


@dataclass(frozen=True)
class GridTopology:
    """Buses and directed lines of a connected power grid.

    ``buses`` is an ordered list of bus ids; ``lines`` an ordered list of
    :class:`Line`.  Line order is stable and defines the column order of
    the incidence matrix.
    """

    buses: tuple[int, ...]
    lines: tuple[Line, ...]
    _bus_index: dict[int, int] = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if len(set(self.buses)) != len(self.buses):
            raise GridError("duplicate bus id")
        index = {b: i for i, b in enumerate(self.buses)}
        object.__setattr__(self, "_bus_index", index)
        for ln in self.lines:
            if ln.from_bus == ln.to_bus:
                raise GridError(f"line {ln.id} joins bus {ln.from_bus} to itself")
            if ln.from_bus not in index or ln.to_bus not in index:
                raise GridError(f"line {ln.id} references unknown bus")
            if not (ln.reactance > 0.0 and np.isfinite(ln.reactance)):
                raise GridError(f"line {ln.id} has nonpositive reactance")
        if self.n_buses and self._component_count() != 1:
            raise GridError("grid graph is not connected")

    @property
    def n_buses(self) -> int:
        return len(self.buses)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    def bus_index(self, bus_id: int) -> int:
        try:
            return self._bus_index[bus_id]
        except KeyError:
            raise GridError(f"unknown bus id {bus_id}") from None

    def reactances(self) -> np.ndarray:
        return np.array([ln.reactance for ln in self.lines], dtype=float)

    def adjacency_lists(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {b: [] for b in self.buses}
        for ln in self.lines:
            adj[ln.from_bus].append(ln.to_bus)
            adj[ln.to_bus].append(ln.from_bus)
        return adj

    def _component_count(self) -> int:
        adj = self.adjacency_lists()
        seen: set[int] = set()
        comps = 0
        for start in self.buses:
            if start in seen:
                continue
            comps += 1
            stack = [start]
            seen.add(start)
            while stack:
                u = stack.pop()
                for v in adj[u]:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
        return comps


def build_incidence(grid: GridTopology) -> np.ndarray:
    """Incidence matrix D (|V| x |E|): +1 at a line's from-bus, -1 at its to-bus."""
    D = np.zeros((grid.n_buses, grid.n_lines))
    for j, ln in enumerate(grid.lines):
        D[grid.bus_index(ln.from_bus), j] = 1.0
        D[grid.bus_index(ln.to_bus), j] = -1.0
    return D


def build_admittance(D: np.ndarray, reactances: np.ndarray) -> np.ndarray:
    """Admittance (weighted Laplacian) A = D Gamma D^T with Gamma = diag(1/r)."""
    reactances = np.asarray(reactances, dtype=float)
    if D.shape[1] != reactances.shape[0]:
        raise GridError(
            f"dimension mismatch: D has {D.shape[1]} columns, "
            f"{reactances.shape[0]} reactances given"
        )
    return (D / reactances) @ D.T


def admittance_from_topology(grid: GridTopology) -> np.ndarray:
    """A built entrywise from the case analysis (off-diagonal -1/r, zero row sums).

    Independent of :func:`build_admittance`; used as its cross-check.
    """
    n = grid.n_buses
    A = np.zeros((n, n))
    for ln in grid.lines:
        i, j = grid.bus_index(ln.from_bus), grid.bus_index(ln.to_bus)
        A[i, j] -= 1.0 / ln.reactance
        A[j, i] -= 1.0 / ln.reactance
    for i in range(n):
        A[i, i] = -A[i, :].sum()
    return A


@dataclass(frozen=True)
class PartitionedView:
    """Submatrix views of A and D induced by an attacked bus set V_H."""

    grid: GridTopology
    bus_ids_H: tuple[int, ...]
    bus_ids_Hbar: tuple[int, ...]
    line_ids_H: tuple[int, ...]
    idx_H: np.ndarray        # row/col positions of V_H in A
    idx_Hbar: np.ndarray
    eidx_H: np.ndarray       # column positions of E_H in D
    A_HH: np.ndarray
    A_HHbar: np.ndarray
    A_HbarH: np.ndarray
    A_HbarHbar: np.ndarray
    A_HG: np.ndarray
    D_H: np.ndarray

    def reassemble(self) -> np.ndarray:
        """Put the four A-blocks back in the parent index order (identity check)."""
        n = self.grid.n_buses
        A = np.zeros((n, n))
        A[np.ix_(self.idx_H, self.idx_H)] = self.A_HH
        A[np.ix_(self.idx_H, self.idx_Hbar)] = self.A_HHbar
        A[np.ix_(self.idx_Hbar, self.idx_H)] = self.A_HbarH
        A[np.ix_(self.idx_Hbar, self.idx_Hbar)] = self.A_HbarHbar
        return A


def partition(grid: GridTopology, A: np.ndarray, D: np.ndarray,
              bus_ids_H) -> PartitionedView:
    """Split A and D into the H / H-bar blocks for the attacked bus set."""
    bus_ids_H = tuple(sorted(bus_ids_H))
    if not bus_ids_H:
        raise GridError("V_H is empty")
    for b in bus_ids_H:
        grid.bus_index(b)
    if len(bus_ids_H) == grid.n_buses:
        raise GridError("V_H must be a proper subset of V")
    h_set = set(bus_ids_H)
    bus_ids_Hbar = tuple(b for b in grid.buses if b not in h_set)
    idx_H = np.array([grid.bus_index(b) for b in bus_ids_H])
    idx_Hbar = np.array([grid.bus_index(b) for b in bus_ids_Hbar])
    line_ids_H = tuple(ln.id for ln in grid.lines
                       if ln.from_bus in h_set and ln.to_bus in h_set)
    eidx_H = np.array([j for j, ln in enumerate(grid.lines)
                       if ln.from_bus in h_set and ln.to_bus in h_set], dtype=int)
    return PartitionedView(
        grid=grid,
        bus_ids_H=bus_ids_H,
        bus_ids_Hbar=bus_ids_Hbar,
        line_ids_H=line_ids_H,
        idx_H=idx_H,
        idx_Hbar=idx_Hbar,
        eidx_H=eidx_H,
        A_HH=A[np.ix_(idx_H, idx_H)],
        A_HHbar=A[np.ix_(idx_H, idx_Hbar)],
        A_HbarH=A[np.ix_(idx_Hbar, idx_H)],
        A_HbarHbar=A[np.ix_(idx_Hbar, idx_Hbar)],
        A_HG=A[idx_H, :],
        D_H=D[np.ix_(idx_H, eidx_H)] if len(eidx_H) else np.zeros((len(idx_H), 0)),
    )


# ---------------------------------------------------------------------------
# Canonical grid file (JSON): the toolkit's source-of-truth format.

def grid_to_dict(grid: GridTopology, injections: np.ndarray,
                 loads: np.ndarray | None = None) -> dict:
    loads = np.zeros(grid.n_buses) if loads is None else np.asarray(loads)
    return {
        "buses": [
            {"id": int(b), "p_base": float(injections[i]), "load": float(loads[i])}
            for i, b in enumerate(grid.buses)
        ],
        "lines": [
            {"id": int(ln.id), "from": int(ln.from_bus), "to": int(ln.to_bus),
             "reactance": float(ln.reactance)}
            for ln in grid.lines
        ],
    }


def grid_from_dict(doc: dict) -> tuple[GridTopology, np.ndarray, np.ndarray]:
    """Parse the canonical JSON structure -> (topology, injections, loads)."""
    try:
        buses = [int(b["id"]) for b in doc["buses"]]
        p = np.array([float(b["p_base"]) for b in doc["buses"]])
        loads = np.array([float(b.get("load", 0.0)) for b in doc["buses"]])
        lines = tuple(
            Line(int(l["id"]), int(l["from"]), int(l["to"]), float(l["reactance"]))
            for l in doc["lines"]
        )
    except (KeyError, TypeError) as exc:
        raise GridError(f"malformed canonical grid document: {exc}") from exc
    return GridTopology(tuple(buses), lines), p, loads


def save_grid(path, grid: GridTopology, injections: np.ndarray,
              loads: np.ndarray | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(grid_to_dict(grid, injections, loads), fh, indent=1)


def load_grid(path) -> tuple[GridTopology, np.ndarray, np.ndarray]:
    with open(path) as fh:
        return grid_from_dict(json.load(fh))
