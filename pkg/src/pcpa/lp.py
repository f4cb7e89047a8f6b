"""Deterministic bounded-variable primal simplex.

Solves  min c'x  s.t.  A x = b,  l <= x <= u  with a two-phase method.
Bland's smallest-index rule makes every run deterministic and rules out
cycling; the scale of the diagnosis programs (tens of variables) makes a
dense implementation the simplest correct choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
MAX_ITER = 10_000


class LPError(ValueError):
    pass


@dataclass(frozen=True)
class LinearProgramInstance:
    c: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        m, n = self.A_eq.shape
        if not (self.c.shape == (n,) and self.b_eq.shape == (m,)
                and self.lower.shape == (n,) and self.upper.shape == (n,)):
            raise LPError("inconsistent LP dimensions")
        if np.any(self.lower > self.upper):
            raise LPError("lower bound exceeds upper bound")


@dataclass(frozen=True)
class LPSolution:
    status: str                  # optimal | infeasible | unbounded | iteration_limit
    x: np.ndarray | None
    objective: float | None


class _Simplex:
    """One tableau over structural + artificial columns."""

    AT_LOWER, AT_UPPER, BASIC = 0, 1, 2

    def __init__(self, A, b, lower, upper):
        m, n = A.shape
        self.n, self.m = n, m
        self.ncols = n + m
        self.state = np.empty(self.ncols, dtype=int)
        self.xval = np.zeros(self.ncols)
        for j in range(n):
            if np.isfinite(lower[j]):
                self.state[j], self.xval[j] = self.AT_LOWER, lower[j]
            elif np.isfinite(upper[j]):
                self.state[j], self.xval[j] = self.AT_UPPER, upper[j]
            else:
                self.state[j], self.xval[j] = self.AT_LOWER, 0.0
        # artificial column signs follow the start residual so the initial
        # artificial basis is feasible (values = |residual| >= 0)
        resid0 = b - A @ self.xval[:n]
        sign = np.where(resid0 >= 0.0, 1.0, -1.0)
        self.A = np.hstack([A, np.diag(sign)])
        self.lower = np.concatenate([lower, np.zeros(m)])
        self.upper = np.concatenate([upper, np.full(m, np.inf)])
        self.b = b
        self.basis = list(range(n, n + m))
        self.state[n:] = self.BASIC
        self._set_basic_values()

    def _set_basic_values(self):
        nonbasic = [j for j in range(self.ncols) if self.state[j] != self.BASIC]
        resid = self.b - self.A[:, nonbasic] @ self.xval[nonbasic]
        xb = np.linalg.solve(self.A[:, self.basis], resid)
        self.xval[self.basis] = xb

    def run(self, c: np.ndarray) -> str:
        for _ in range(MAX_ITER):
            B = self.A[:, self.basis]
            y = np.linalg.solve(B.T, c[self.basis])
            entering = -1
            sigma = 0.0
            for j in range(self.ncols):
                st = self.state[j]
                if st == self.BASIC:
                    continue
                d = c[j] - y @ self.A[:, j]
                if st == self.AT_LOWER and d < -PIVOT_TOL:
                    entering, sigma = j, 1.0
                    break
                if st == self.AT_UPPER and d > PIVOT_TOL:
                    entering, sigma = j, -1.0
                    break
            if entering < 0:
                return "optimal"
            w = np.linalg.solve(B, self.A[:, entering])

            # ratio test: how far the entering variable can move
            t_best = self.upper[entering] - self.lower[entering]
            leaving = -1         # index into basis; -1 = bound flip
            leave_to = None
            for i, bi in enumerate(self.basis):
                step = sigma * w[i]
                if step > PIVOT_TOL:
                    t = (self.xval[bi] - self.lower[bi]) / step
                    dest = self.AT_LOWER
                elif step < -PIVOT_TOL:
                    if not np.isfinite(self.upper[bi]):
                        continue
                    t = (self.upper[bi] - self.xval[bi]) / (-step)
                    dest = self.AT_UPPER
                else:
                    continue
                t = max(t, 0.0)
                if t < t_best - PIVOT_TOL or (
                        t < t_best + PIVOT_TOL
                        and (leaving < 0 or bi < self.basis[leaving])):
                    t_best, leaving, leave_to = t, i, dest
            if not np.isfinite(t_best):
                return "unbounded"

            # apply the step
            self.xval[entering] += sigma * t_best
            for i, bi in enumerate(self.basis):
                self.xval[bi] -= sigma * t_best * w[i]
            if leaving < 0:
                self.state[entering] = (
                    self.AT_UPPER if sigma > 0 else self.AT_LOWER)
            else:
                out = self.basis[leaving]
                self.state[out] = leave_to
                self.xval[out] = (self.lower[out] if leave_to == self.AT_LOWER
                                  else self.upper[out])
                self.basis[leaving] = entering
                self.state[entering] = self.BASIC
                self._set_basic_values()
        return "iteration_limit"


def solve_lp(lp: LinearProgramInstance) -> LPSolution:
    """Two-phase bounded simplex; deterministic for identical inputs."""
    m, n = lp.A_eq.shape
    sx = _Simplex(lp.A_eq.astype(float), lp.b_eq.astype(float),
                  lp.lower.astype(float), lp.upper.astype(float))

    # phase 1: drive artificials to zero
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    status = sx.run(c1)
    if status != "optimal":
        return LPSolution(status=status, x=None, objective=None)
    if float(sx.xval[n:].sum()) > FEAS_TOL:
        return LPSolution(status="infeasible", x=None, objective=None)

    # phase 2: artificials pinned at zero
    sx.upper[n:] = 0.0
    sx.xval[n:] = np.where(sx.state[n:] == _Simplex.BASIC, sx.xval[n:], 0.0)
    c2 = np.concatenate([lp.c.astype(float), np.zeros(m)])
    status = sx.run(c2)
    if status != "optimal":
        return LPSolution(status=status, x=None, objective=None)
    x = sx.xval[:n].copy()
    return LPSolution(status="optimal", x=x, objective=float(lp.c @ x))
