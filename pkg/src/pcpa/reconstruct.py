"""Recovery of quantities hidden by the cyber attack.

From the healthy-area measurements alone: which buses were touched,
the attacked area's post-attack phase angles (least squares on the
healthy block equations), whether islanding occurred, and the attacked
area's post-attack injections via the shared shedding ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attack import MeasurementSet
from .grid import GridTopology, PartitionedView

SUPPORT_TOL = 1e-6
ISLANDING_TOL = 1e-6
RESIDUAL_TOL = 1e-6


class ReconstructionError(ValueError):
    pass


@dataclass(frozen=True)
class ReconstructionReport:
    theta_post_H: np.ndarray
    residual: float
    islanding: bool
    p_post_H: np.ndarray | None
    delta_H: np.ndarray | None
    alpha: float | None
    rank_A_HbarH: int


def localize_attacked_buses(A: np.ndarray, theta: np.ndarray,
                            theta_post: np.ndarray, delta: np.ndarray,
                            bus_ids, tol: float = SUPPORT_TOL) -> set[int]:
    """Bus ids where |A (theta - theta') - delta| exceeds tol; the support
    is contained in the attacked area."""
    resid = A @ (theta - theta_post) - delta
    return {b for b, v in zip(bus_ids, resid) if abs(v) > tol}


def reconstruct_theta_H(view: PartitionedView, theta: np.ndarray,
                        theta_post_Hbar: np.ndarray, delta_Hbar: np.ndarray
                        ) -> tuple[np.ndarray, float]:
    """Solve the healthy-block equations for the hidden angles.

    A_{Hbar|H} theta'_H = A_{Hbar|H} theta_H
                          + A_{Hbar|Hbar} (theta_Hbar - theta'_Hbar)
                          - delta_Hbar
    by least squares; the system is overdetermined (|V_Hbar| >= |V_H|) and
    the residual doubles as a consistency check.
    """
    M = view.A_HbarH
    if M.shape[0] < M.shape[1]:
        raise ReconstructionError("healthy side smaller than attacked side")
    zero_cols = np.nonzero(np.max(np.abs(M), axis=0) == 0.0)[0]
    if zero_cols.size:
        uncovered = [view.bus_ids_H[int(j)] for j in zero_cols]
        raise ReconstructionError(
            f"buses {uncovered} have no boundary line; angles unrecoverable"
        )
    theta_H = theta[view.idx_H]
    theta_Hbar = theta[view.idx_Hbar]
    rhs = M @ theta_H + view.A_HbarHbar @ (theta_Hbar - theta_post_Hbar) - delta_Hbar
    sol, _, rank, _ = np.linalg.lstsq(M, rhs, rcond=None)
    if rank < M.shape[1]:
        raise ReconstructionError("A_{Hbar|H} is column rank deficient")
    residual = float(np.max(np.abs(M @ sol - rhs)))
    if residual > RESIDUAL_TOL:
        raise ReconstructionError(
            f"inconsistent healthy-block system (residual {residual:.3e})"
        )
    return sol, residual


def detect_islanding(p_Hbar: np.ndarray, p_post_Hbar: np.ndarray,
                     tol: float = ISLANDING_TOL) -> bool:
    """Islanding occurred iff some healthy-area injection changed."""
    return bool(np.max(np.abs(p_Hbar - p_post_Hbar), initial=0.0) > tol)


def reconstruct_p_H(grid: GridTopology, view: PartitionedView, p: np.ndarray,
                    p_post_Hbar: np.ndarray, tol: float = ISLANDING_TOL
                    ) -> tuple[np.ndarray, np.ndarray, float]:
    """Recover p'_H from the shedding ratio observed at a boundary neighbor.

    Picks the V_Hbar bus adjacent to the attacked area with the largest
    |p_v| among those whose injection changed, and applies its ratio
    p'_v / p_v uniformly over V_H.  Returns (p'_H, delta_H, alpha).
    """
    h_set = set(view.bus_ids_H)
    adj = grid.adjacency_lists()
    boundary = {v for u in h_set for v in adj[u] if v not in h_set}
    pos_of = {b: i for i, b in enumerate(view.bus_ids_Hbar)}
    best = None
    for v in sorted(boundary):
        i = pos_of[v]
        if abs(p[view.idx_Hbar[i]]) < tol:
            continue
        if abs(p[view.idx_Hbar[i]] - p_post_Hbar[i]) <= tol:
            continue
        if best is None or abs(p[view.idx_Hbar[i]]) > abs(p[view.idx_Hbar[best]]):
            best = i
    if best is None:
        raise ReconstructionError(
            "no boundary neighbor with a changed nonzero injection; "
            "p'_H unavailable"
        )
    alpha = float(p_post_Hbar[best] / p[view.idx_Hbar[best]])
    p_H = p[view.idx_H]
    p_post_H = alpha * p_H
    return p_post_H, p_H - p_post_H, alpha


def reconstruct(grid: GridTopology, view: PartitionedView,
                meas: MeasurementSet, recover_p: bool = True
                ) -> ReconstructionReport:
    """Full reconstruction pipeline from a blinded measurement set."""
    p_Hbar = meas.p[view.idx_Hbar]
    delta_Hbar = p_Hbar - meas.p_post_Hbar
    theta_post_H, residual = reconstruct_theta_H(
        view, meas.theta, meas.theta_post_Hbar, delta_Hbar
    )
    islanding = detect_islanding(p_Hbar, meas.p_post_Hbar)
    p_post_H = delta_H = alpha = None
    if not islanding:
        p_post_H = meas.p[view.idx_H].copy()
        delta_H = np.zeros(len(view.idx_H))
        alpha = 1.0
    elif recover_p:
        try:
            p_post_H, delta_H, alpha = reconstruct_p_H(
                grid, view, meas.p, meas.p_post_Hbar
            )
        except ReconstructionError:
            pass  # optional: diagnosis proceeds with delta_H unknown
    return ReconstructionReport(
        theta_post_H=theta_post_H,
        residual=residual,
        islanding=islanding,
        p_post_H=p_post_H,
        delta_H=delta_H,
        alpha=alpha,
        rank_A_HbarH=int(np.linalg.matrix_rank(view.A_HbarH)),
    )
