"""Attacked-area construction (degree-based greedy search) and certification.

An area is certified when three conditions hold: the attacked side is no
larger than the healthy side, a bipartite matching over the boundary lines
saturates V_H, and A_{Hbar|H} has full column rank.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .grid import GridError, GridTopology, build_admittance, build_incidence, partition

RANK_TOL = 1e-8
MAX_RETRIES = 50


class AreaError(ValueError):
    """Raised when an attacked area cannot be built or certified."""


@dataclass(frozen=True)
class AttackedArea:
    bus_ids_H: tuple[int, ...]
    line_ids_H: tuple[int, ...]
    boundary_lines: tuple[int, ...]      # line ids with exactly one endpoint in V_H
    assumption1_ok: bool
    matching_cover_ok: bool
    full_column_rank_ok: bool
    seed: int

    @property
    def certified(self) -> bool:
        return (self.assumption1_ok and self.matching_cover_ok
                and self.full_column_rank_ok)

    @property
    def size(self) -> int:
        return len(self.bus_ids_H)


def _hopcroft_karp(adj: dict[int, list[int]]) -> dict[int, int]:
    """Maximum matching of a bipartite graph given as left -> right adjacency.

    Deterministic: left vertices and their neighbor lists are processed in
    the order given.  Returns the left -> right matching dict.
    """
    INF = float("inf")
    match_l: dict[int, int] = {}
    match_r: dict[int, int] = {}
    lefts = list(adj.keys())

    def bfs() -> bool:
        from collections import deque
        dist = {}
        queue = deque()
        for u in lefts:
            if u not in match_l:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r.get(v)
                if w is None:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        bfs.dist = dist
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r.get(v)
            if w is None or (bfs.dist[w] == bfs.dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        bfs.dist[u] = INF
        return False

    while bfs():
        for u in lefts:
            if u not in match_l:
                dfs(u)
    return match_l


def check_matching_cover(grid: GridTopology, bus_ids_H
                         ) -> tuple[bool, dict[int, int]]:
    """Maximum bipartite matching between V_H and V_Hbar over boundary lines.

    True iff the matching saturates V_H (Assumption 2).
    """
    h_set = set(bus_ids_H)
    adj: dict[int, list[int]] = {b: [] for b in sorted(h_set)}
    for ln in grid.lines:
        if (ln.from_bus in h_set) != (ln.to_bus in h_set):
            u, v = ((ln.from_bus, ln.to_bus) if ln.from_bus in h_set
                    else (ln.to_bus, ln.from_bus))
            if v not in adj[u]:
                adj[u].append(v)
    for u in adj:
        adj[u].sort()
    matching = _hopcroft_karp(adj)
    return len(matching) == len(h_set), matching


def check_full_column_rank(A_HbarH: np.ndarray, rank_tol: float = RANK_TOL) -> bool:
    """True iff the smallest singular value exceeds rank_tol times the largest."""
    if A_HbarH.size == 0 or A_HbarH.shape[0] < A_HbarH.shape[1]:
        return False
    s = np.linalg.svd(A_HbarH, compute_uv=False)
    return bool(s[-1] > rank_tol * s[0])


def _induced_components(grid: GridTopology, bus_ids_H, line_ids_H) -> int:
    h = list(bus_ids_H)
    line_set = set(line_ids_H)
    adj = {b: [] for b in h}
    for ln in grid.lines:
        if ln.id in line_set:
            adj[ln.from_bus].append(ln.to_bus)
            adj[ln.to_bus].append(ln.from_bus)
    seen: set[int] = set()
    comps = 0
    for s in h:
        if s in seen:
            continue
        comps += 1
        stack = [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
    return comps


def count_cycles(grid: GridTopology, area: AttackedArea) -> int:
    """Cycle-space dimension |E_H| - |V_H| + components of the induced subgraph."""
    comps = _induced_components(grid, area.bus_ids_H, area.line_ids_H)
    return len(area.line_ids_H) - len(area.bus_ids_H) + comps


def _grow_area(grid: GridTopology, seed_bus: int, target_size: int) -> list[int]:
    """Greedy growth: repeatedly add the candidate neighbor with the largest
    number of neighbors outside the current V_H, ties broken by lowest id."""
    adj = grid.adjacency_lists()
    v_h = {seed_bus}
    while len(v_h) < target_size:
        candidates = sorted({v for u in v_h for v in adj[u] if v not in v_h})
        if not candidates:
            raise AreaError("greedy growth exhausted the component")
        ext = [(-len([w for w in adj[v] if w not in v_h]), v) for v in candidates]
        ext.sort()
        v_h.add(ext[0][1])
    return sorted(v_h)


def _certify(grid: GridTopology, A: np.ndarray, D: np.ndarray,
             bus_ids_H: list[int], seed: int) -> AttackedArea:
    h_set = set(bus_ids_H)
    line_ids_H = tuple(ln.id for ln in grid.lines
                       if ln.from_bus in h_set and ln.to_bus in h_set)
    boundary = tuple(ln.id for ln in grid.lines
                     if (ln.from_bus in h_set) != (ln.to_bus in h_set))
    a1 = len(bus_ids_H) <= grid.n_buses - len(bus_ids_H)
    cover, _ = check_matching_cover(grid, bus_ids_H)
    view = partition(grid, A, D, bus_ids_H)
    rank_ok = check_full_column_rank(view.A_HbarH)
    return AttackedArea(
        bus_ids_H=tuple(bus_ids_H),
        line_ids_H=line_ids_H,
        boundary_lines=boundary,
        assumption1_ok=a1,
        matching_cover_ok=cover,
        full_column_rank_ok=rank_ok,
        seed=seed,
    )


def dbgs(grid: GridTopology, target_size: int, rng_seed: int,
         max_retries: int = MAX_RETRIES) -> AttackedArea:
    """Degree-based greedy search for a certified attacked area.

    Deterministic given (grid, target_size, rng_seed).  Reseeds the random
    seed-bus choice up to ``max_retries`` times when certification fails.
    """
    if not (1 <= target_size <= grid.n_buses // 2):
        raise AreaError(
            f"target size {target_size} violates Assumption 1 on a "
            f"{grid.n_buses}-bus grid (must be in [1, {grid.n_buses // 2}])"
        )
    D = build_incidence(grid)
    A = build_admittance(D, grid.reactances())
    rng = np.random.default_rng(rng_seed)
    last = None
    for _ in range(max_retries):
        seed_bus = int(rng.choice(grid.buses))
        bus_ids_H = _grow_area(grid, seed_bus, target_size)
        area = _certify(grid, A, D, bus_ids_H, seed=rng_seed)
        if area.certified:
            return area
        last = area
    raise AreaError(
        f"no certified area of size {target_size} found in {max_retries} "
        f"seeds (last flags: a1={last.assumption1_ok}, "
        f"cover={last.matching_cover_ok}, rank={last.full_column_rank_ok})"
    )


def find_area_with_line_count(grid: GridTopology, target_size: int,
                              target_lines: int, max_seeds: int = 200
                              ) -> AttackedArea:
    """Scan rng seeds for a certified area with a given |E_H| (experiment setup)."""
    for seed in range(max_seeds):
        try:
            area = dbgs(grid, target_size, rng_seed=seed, max_retries=1)
        except AreaError:
            continue
        if len(area.line_ids_H) == target_lines:
            return area
    raise AreaError(
        f"no certified size-{target_size} area with {target_lines} internal "
        f"lines found in {max_seeds} seeds"
    )


# ---------------------------------------------------------------------------
# Area description file

def save_area(path, area: AttackedArea) -> None:
    with open(path, "w") as fh:
        json.dump({
            "bus_ids_H": list(area.bus_ids_H),
            "line_ids_H": list(area.line_ids_H),
            "boundary_lines": list(area.boundary_lines),
            "assumption1_ok": area.assumption1_ok,
            "matching_cover_ok": area.matching_cover_ok,
            "full_column_rank_ok": area.full_column_rank_ok,
            "seed": area.seed,
        }, fh, indent=1)


def load_area(path) -> AttackedArea:
    with open(path) as fh:
        doc = json.load(fh)
    try:
        return AttackedArea(
            bus_ids_H=tuple(doc["bus_ids_H"]),
            line_ids_H=tuple(doc["line_ids_H"]),
            boundary_lines=tuple(doc["boundary_lines"]),
            assumption1_ok=bool(doc["assumption1_ok"]),
            matching_cover_ok=bool(doc["matching_cover_ok"]),
            full_column_rank_ok=bool(doc["full_column_rank_ok"]),
            seed=int(doc["seed"]),
        )
    except (KeyError, TypeError) as exc:
        raise GridError(f"malformed area file: {exc}") from exc
