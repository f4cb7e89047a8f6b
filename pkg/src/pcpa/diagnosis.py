"""Prior-weighted diagnosis of physical attacks from blinded measurements.

Builds the weighted-l1 program over the attacked-area lines (with the
shedding ratio as an extra scalar unknown when islanding occurred and the
injection change could not be recovered), solves it with the bounded
simplex, and reports the estimated attack vector.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass

import numpy as np

from .areas import AttackedArea
from .attack import MeasurementSet
from .grid import GridTopology, PartitionedView
from .lp import LinearProgramInstance, LPSolution, solve_lp
from .reconstruct import ReconstructionReport, reconstruct

C_MIN = 1e-3
BIP_RESIDUAL_TOL = 1e-6
MAX_BIP_EDGES = 16


class DiagnosisError(ValueError):
    pass


class PriorMismatchError(DiagnosisError):
    """Prior file does not match the area (wrong id or dimension)."""


@dataclass(frozen=True)
class PriorVector:
    y: np.ndarray                # per-line attack probability over E_H
    provenance: str              # uniform | oracle | file | model

    def __post_init__(self):
        if np.any(self.y < 0.0) or np.any(self.y > 1.0):
            raise DiagnosisError("prior entries must lie in [0, 1]")

    def weights(self, c_min: float = C_MIN) -> np.ndarray:
        return np.clip(1.0 - self.y, c_min, 1.0)


def uniform_prior(area: AttackedArea) -> PriorVector:
    """No information: y = 0 everywhere, i.e. a plain l1 objective."""
    return PriorVector(np.zeros(len(area.line_ids_H)), "uniform")


def oracle_prior(area: AttackedArea, attacked_line_ids) -> PriorVector:
    fset = set(attacked_line_ids)
    y = np.array([1.0 if lid in fset else 0.0 for lid in area.line_ids_H])
    return PriorVector(y, "oracle")


@dataclass(frozen=True)
class DiagnosisResult:
    x_H: np.ndarray | None
    delta_H: np.ndarray | None
    alpha: float | None
    status: str
    objective: float | None
    unidentifiable_lines: tuple[int, ...]
    reconstruction: ReconstructionReport | None


def build_d_prime(D: np.ndarray, reactances: np.ndarray,
                  theta_post: np.ndarray) -> np.ndarray:
    """D' = D Gamma [D^T theta']: column e scaled by the post-attack angle
    drop across line e over its reactance."""
    if theta_post.shape[0] != D.shape[0]:
        raise DiagnosisError("theta' dimension does not match D")
    drops = D.T @ theta_post
    return (D / reactances) * drops


def _merge_theta_post(view: PartitionedView, theta_post_H: np.ndarray,
                      theta_post_Hbar: np.ndarray) -> np.ndarray:
    theta = np.zeros(view.grid.n_buses)
    theta[view.idx_H] = theta_post_H
    theta[view.idx_Hbar] = theta_post_Hbar
    return theta


def assemble_p2(view: PartitionedView, D: np.ndarray, reactances: np.ndarray,
                theta: np.ndarray, theta_post: np.ndarray,
                prior: PriorVector, *, delta_H: np.ndarray | None,
                delta_Hbar_total: float = 0.0,
                p_H: np.ndarray | None = None,
                c_min: float = C_MIN) -> LinearProgramInstance:
    """Equality-constrained weighted-l1 program for the attack vector.

    ``delta_H = None`` adds the scalar shedding-ratio variable with
    delta_H = (1 - alpha) p_H, tied to the healthy area's total change.
    """
    m = len(view.eidx_H)
    if len(prior.y) != m:
        raise PriorMismatchError(
            f"prior has {len(prior.y)} entries, area has {m} lines")
    D_prime = build_d_prime(D, reactances, theta_post)
    Dp_H = D_prime[np.ix_(view.idx_H, view.eidx_H)]
    rhs = view.A_HG @ (theta - theta_post)

    if delta_H is not None:
        A_eq = Dp_H
        b_eq = delta_H - rhs
        c = prior.weights(c_min)
        lower = np.zeros(m)
        upper = np.ones(m)
    else:
        if p_H is None:
            raise DiagnosisError("p_H required when delta_H is unknown")
        nh = len(view.idx_H)
        A_eq = np.zeros((nh + 1, m + 1))
        A_eq[:nh, :m] = -Dp_H
        A_eq[:nh, m] = -p_H
        b_eq = np.concatenate([rhs - p_H, [-delta_Hbar_total - p_H.sum()]])
        A_eq[nh, m] = -p_H.sum()
        c = np.concatenate([prior.weights(c_min), [0.0]])
        lower = np.zeros(m + 1)
        upper = np.ones(m + 1)
    return LinearProgramInstance(c=c, A_eq=A_eq, b_eq=b_eq,
                                 lower=lower, upper=upper)


def diagnose(grid: GridTopology, view: PartitionedView, area: AttackedArea,
             meas: MeasurementSet, prior: PriorVector,
             recover_p: bool = True, c_min: float = C_MIN) -> DiagnosisResult:
    """Full pipeline: reconstruct hidden measurements, branch on islanding,
    assemble the weighted program and solve it."""
    D = np.zeros((grid.n_buses, grid.n_lines))
    for j, ln in enumerate(grid.lines):
        D[grid.bus_index(ln.from_bus), j] = 1.0
        D[grid.bus_index(ln.to_bus), j] = -1.0
    r = grid.reactances()

    report = reconstruct(grid, view, meas, recover_p=recover_p)
    theta_post = _merge_theta_post(view, report.theta_post_H,
                                   meas.theta_post_Hbar)
    drops_H = (D.T @ theta_post)[view.eidx_H]
    unidentifiable = tuple(
        lid for lid, d in zip(view.line_ids_H, drops_H) if abs(d) < 1e-12)

    p_Hbar = meas.p[view.idx_Hbar]
    delta_Hbar_total = float((p_Hbar - meas.p_post_Hbar).sum())
    lp = assemble_p2(
        view, D, r, meas.theta, theta_post, prior,
        delta_H=report.delta_H,
        delta_Hbar_total=delta_Hbar_total,
        p_H=meas.p[view.idx_H],
        c_min=c_min,
    )
    sol: LPSolution = solve_lp(lp)
    if sol.status != "optimal":
        return DiagnosisResult(None, None, None, sol.status, None,
                               unidentifiable, report)
    m = len(view.eidx_H)
    x_hat = sol.x[:m]
    if report.delta_H is not None:
        delta_hat, alpha_hat = report.delta_H, report.alpha
    else:
        alpha_hat = float(sol.x[m])
        delta_hat = (1.0 - alpha_hat) * meas.p[view.idx_H]
    return DiagnosisResult(
        x_H=x_hat,
        delta_H=delta_hat,
        alpha=alpha_hat,
        status="optimal",
        objective=sol.objective,
        unidentifiable_lines=unidentifiable,
        reconstruction=report,
    )


def brute_force_bip(view: PartitionedView, D: np.ndarray,
                    reactances: np.ndarray, theta: np.ndarray,
                    theta_post: np.ndarray, delta_H: np.ndarray,
                    max_edges: int = MAX_BIP_EDGES,
                    tol: float = BIP_RESIDUAL_TOL) -> np.ndarray:
    """Exhaustive binary attack-vector search (the integer formulation).

    Returns the feasible x in {0,1}^|E_H| of minimum cardinality, ties
    broken lexicographically; its own enumeration is the oracle.
    """
    m = len(view.eidx_H)
    if m > max_edges:
        raise DiagnosisError(f"|E_H| = {m} exceeds enumeration limit {max_edges}")
    D_prime = build_d_prime(D, reactances, theta_post)
    Dp_H = D_prime[np.ix_(view.idx_H, view.eidx_H)]
    target = delta_H - view.A_HG @ (theta - theta_post)
    best = None
    for bits in itertools.product((0, 1), repeat=m):
        x = np.array(bits, dtype=float)
        if best is not None and x.sum() > best.sum():
            continue
        if np.max(np.abs(Dp_H @ x - target), initial=0.0) <= tol:
            if best is None or x.sum() < best.sum():
                best = x
    if best is None:
        raise DiagnosisError("no feasible binary attack vector")
    return best


# ---------------------------------------------------------------------------
# Prior exchange and report files

def area_id(area: AttackedArea) -> str:
    payload = json.dumps([list(area.bus_ids_H), list(area.line_ids_H)])
    return hashlib.sha1(payload.encode()).hexdigest()[:12]


def save_prior(path, area: AttackedArea, prior: PriorVector) -> None:
    with open(path, "w") as fh:
        json.dump({
            "area_id": area_id(area),
            "edges": list(area.line_ids_H),
            "y": [float(v) for v in prior.y],
        }, fh, indent=1)


def load_prior(path, area: AttackedArea) -> PriorVector:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("area_id") != area_id(area):
        raise PriorMismatchError(
            f"prior file area id {doc.get('area_id')!r} does not match area "
            f"{area_id(area)!r}")
    if list(doc.get("edges", [])) != list(area.line_ids_H):
        raise PriorMismatchError("prior file edge order does not match area")
    y = np.array(doc["y"], dtype=float)
    if y.shape[0] != len(area.line_ids_H):
        raise PriorMismatchError(
            f"prior has {y.shape[0]} entries for {len(area.line_ids_H)} lines")
    return PriorVector(y, "file")


def result_to_dict(res: DiagnosisResult) -> dict:
    doc = {
        "status": res.status,
        "objective": res.objective,
        "x_H": None if res.x_H is None else res.x_H.tolist(),
        "delta_H": None if res.delta_H is None else res.delta_H.tolist(),
        "alpha": res.alpha,
        "unidentifiable_lines": list(res.unidentifiable_lines),
    }
    if res.reconstruction is not None:
        doc["reconstruction"] = {
            "residual": res.reconstruction.residual,
            "islanding": res.reconstruction.islanding,
            "rank_A_HbarH": res.reconstruction.rank_A_HbarH,
        }
    return doc
