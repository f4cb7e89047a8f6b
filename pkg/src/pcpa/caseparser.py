"""MATPOWER-style case text parser.

Only the ``mpc.bus``, ``mpc.gen`` and ``mpc.branch`` tables are read, and
only the columns the DC model needs: bus id and Pd, generator bus and Pg,
branch from/to/reactance/status.  Everything else is ignored.  The parser
is a converter into the canonical in-memory representation
(:class:`~pcpa.grid.GridTopology` plus per-unit injections/loads).
"""

from __future__ import annotations

import re
from importlib import resources

import numpy as np

from .grid import GridError, GridTopology, Line

_TABLE_RE = re.compile(
    r"mpc\.(?P<name>bus|gen|branch)\s*=\s*\[(?P<body>.*?)\];", re.DOTALL
)


def _parse_table(body: str) -> list[list[float]]:
    rows = []
    for raw in body.splitlines():
        line = raw.split("%", 1)[0].strip().rstrip(";").strip()
        if not line:
            continue
        try:
            rows.append([float(tok) for tok in line.split()])
        except ValueError as exc:
            raise GridError(f"malformed table row: {raw.strip()!r}") from exc
    return rows


def parse_case_file(text: str) -> tuple[GridTopology, np.ndarray, np.ndarray]:
    """Parse MATPOWER-style case text -> (topology, injections p, loads l).

    Injections and loads are per-unit on the case's baseMVA; p is
    generation minus load per bus.
    """
    tables = {m.group("name"): _parse_table(m.group("body"))
              for m in _TABLE_RE.finditer(text)}
    if "bus" not in tables:
        raise GridError("case text has no bus table")
    if "branch" not in tables:
        raise GridError("case text has no branch table")

    m_base = 100.0
    m = re.search(r"mpc\.baseMVA\s*=\s*([0-9.eE+-]+)\s*;", text)
    if m:
        m_base = float(m.group(1))

    bus_ids = []
    loads = []
    for row in tables["bus"]:
        if len(row) < 3:
            raise GridError("bus row too short")
        bus_ids.append(int(row[0]))
        loads.append(row[2] / m_base)
    if len(set(bus_ids)) != len(bus_ids):
        raise GridError("duplicate bus id in bus table")
    index = {b: i for i, b in enumerate(bus_ids)}

    gen = np.zeros(len(bus_ids))
    for row in tables.get("gen", []):
        if len(row) < 2:
            raise GridError("gen row too short")
        b = int(row[0])
        if b not in index:
            raise GridError(f"generator at unknown bus {b}")
        gen[index[b]] += row[1] / m_base

    lines = []
    for k, row in enumerate(tables["branch"]):
        if len(row) < 4:
            raise GridError("branch row too short")
        status = row[10] if len(row) > 10 else 1.0
        if status == 0.0:
            continue
        f, t, x = int(row[0]), int(row[1]), row[3]
        if x <= 0.0:
            raise GridError(f"branch {f}-{t} has nonpositive reactance {x}")
        lines.append(Line(id=k, from_bus=f, to_bus=t, reactance=x))

    grid = GridTopology(tuple(bus_ids), tuple(lines))
    p = gen - np.array(loads)
    return grid, p, np.array(loads)


_BUNDLED = {"ieee30": "ieee30.m", "ieee118": "ieee118.m"}


def bundled_case_text(name: str) -> str:
    if name not in _BUNDLED:
        raise GridError(f"no bundled case named {name!r} "
                        f"(available: {sorted(_BUNDLED)})")
    return resources.files("pcpa.data").joinpath(_BUNDLED[name]).read_text()


def load_case(name_or_path: str) -> tuple[GridTopology, np.ndarray, np.ndarray]:
    """Load a bundled case by name ('ieee30', 'ieee118') or a .m file by path."""
    if name_or_path in _BUNDLED:
        return parse_case_file(bundled_case_text(name_or_path))
    with open(name_or_path) as fh:
        return parse_case_file(fh.read())
