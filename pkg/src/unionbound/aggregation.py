"""Polynomial-size models: binomial moments, Prékopa–Gao, and PG tightened by U1."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .hailperin import BoundResult, finish_bounds
from .lp import LPProblem, solve_lp
from .model import E1, Instance, YVector

U1_TOL = 1e-9


def _num(mode):
    if mode == "exact":
        return lambda a, b=1: Fraction(a, b)
    return lambda a, b=1: a / b


def _solve_pair(lp: LPProblem, model: str, mode: str) -> BoundResult:
    lo = solve_lp(lp.with_sense("minimize"), mode)
    if not lo.optimal:
        return finish_bounds(model, None, None, mode)
    hi = solve_lp(lp.with_sense("maximize"), mode)
    return finish_bounds(model, lo.objective_value, hi.objective_value, mode)


def bm_lp(inst: Instance, mode: str = "float") -> LPProblem:
    n = inst.n
    s1 = sum(inst.p1, 0)
    s2 = sum(inst.p2.values(), 0)
    rows = [([k for k in range(1, n + 1)], s1),
            ([comb(k, 2) for k in range(1, n + 1)], s2)]
    return LPProblem(n, [1] * n, "maximize", rows)


def bm_bounds(inst: Instance, mode: str = "float") -> BoundResult:
    """Binomial moment bounds: only the two aggregated moments are used."""
    return _solve_pair(bm_lp(inst, mode), "bm", mode)


def _var(n: int, k: int, i: int) -> int:
    return (k - 1) * n + i


@dataclass(frozen=True)
class U1Facet:
    """``sum_{j != i} y^k_j - (k-1) y^k_i >= 0``."""

    i: int
    k: int

    def coefficients(self, n: int) -> dict:
        return {(self.k, (j,)): (-(self.k - 1) if j == self.i else 1) for j in range(n)}

    def dense_row(self, n: int) -> list:
        row = [0] * (n * n)
        for j in range(n):
            row[_var(n, self.k, j)] = -(self.k - 1) if j == self.i else 1
        return row


def u1_facets(n: int) -> list:
    return [U1Facet(i, k) for k in range(1, n + 1) for i in range(n)]


def pg_lp(inst: Instance, mode: str = "float", with_u1: bool = False) -> LPProblem:
    n = inst.n
    num = _num(mode)
    nv = n * n
    obj = [0] * nv
    for k in range(1, n + 1):
        for i in range(n):
            obj[_var(n, k, i)] = num(1, k)
    eq = []
    for i in range(n):
        row = [0] * nv
        for k in range(1, n + 1):
            row[_var(n, k, i)] = 1
        eq.append((row, inst.p1[i]))
    for i in range(n):
        row = [0] * nv
        for k in range(2, n + 1):
            row[_var(n, k, i)] = k - 1
        eq.append((row, sum((inst.pair(i, j) for j in range(n) if j != i), 0)))
    ge = [(f.dense_row(n), 0) for f in u1_facets(n)] if with_u1 else []
    return LPProblem(nv, obj, "maximize", eq, ge)


def pg_bounds(inst: Instance, mode: str = "float") -> BoundResult:
    return _solve_pair(pg_lp(inst, mode), "pg", mode)


def ipg_bounds(inst: Instance, mode: str = "float") -> BoundResult:
    """PG with every U1 facet, i.e. the exact image cone of the E1 map."""
    return _solve_pair(pg_lp(inst, mode, with_u1=True), "ipg", mode)


def u1_contains(y: YVector, tol: float | None = None) -> bool:
    """Membership of an E1 vector in U1 (nonnegativity plus every U1 facet)."""
    if y.family != E1:
        raise ValueError(f"u1_contains needs an E1 vector, got {y.family}")
    n = y.n
    exact = all(isinstance(v, (int, Fraction)) for v in y.values.values())
    if tol is None:
        tol = 0 if exact else U1_TOL
    for v in y.values.values():
        if v < -tol:
            return False
    for k in y.levels():
        level = [y[(k, (i,))] for i in range(n)]
        total = sum(level, 0)
        for i in range(n):
            if total - level[i] - (k - 1) * level[i] < -tol:
                return False
    return True
