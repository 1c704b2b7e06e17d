"""Exact bounds from the full atom model (one variable per nonempty subset)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from fractions import Fraction

from .lp import LPProblem, solve_lp
from .model import AtomVector, Instance, pairs, to_mask

OK = "ok"
PROB_INFEASIBLE = "prob_infeasible"
# reasons carried in BoundResult.detail
LP_INFEASIBLE = "lp_infeasible"
ZMIN_EXCEEDS_ONE = "zmin_exceeds_one"

MAX_HAILPERIN_N = 20
ZMIN_TOL = 1e-9


@dataclass(frozen=True)
class BoundResult:
    status: str
    lb: object = None
    ub: object = None
    model: str = ""
    cuts_added: int = 0
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == OK

    def to_json(self) -> dict:
        d = asdict(self)
        for key in ("lb", "ub"):
            if d[key] is not None:
                d[key] = float(d[key])
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def finish_bounds(model: str, zmin, zmax, mode: str, cuts_added: int = 0) -> BoundResult:
    """Apply the feasibility test and the ``min{1, .}`` clamp to raw optima.

    ``zmin``/``zmax`` are ``None`` when the LP was infeasible.
    """
    if zmin is None or zmax is None:
        return BoundResult(PROB_INFEASIBLE, model=model, cuts_added=cuts_added, detail=LP_INFEASIBLE)
    tol = 0 if mode == "exact" else ZMIN_TOL
    if zmin > 1 + tol:
        return BoundResult(PROB_INFEASIBLE, zmin, zmax, model, cuts_added, ZMIN_EXCEEDS_ONE)
    one = Fraction(1) if mode == "exact" else 1.0
    ub = min(one, zmax)
    lb = zmin
    if mode != "exact":
        lb, ub = max(0.0, float(lb)), float(ub)
        lb = min(lb, ub)
    return BoundResult(OK, lb, ub, model, cuts_added)


def hailperin_lp(inst: Instance) -> LPProblem:
    n = inst.n
    atoms = range(1, 1 << n)
    rows = []
    for i in range(n):
        bit = 1 << i
        rows.append(([1 if S & bit else 0 for S in atoms], inst.p1[i]))
    for (i, j) in pairs(n):
        q = to_mask((i, j))
        rows.append(([1 if S & q == q else 0 for S in atoms], inst.p2[(i, j)]))
    return LPProblem((1 << n) - 1, [1] * ((1 << n) - 1), "maximize", rows)


def _solve_both(inst: Instance, mode: str):
    if inst.n > MAX_HAILPERIN_N:
        raise ValueError(f"exact model limited to n <= {MAX_HAILPERIN_N}")
    lp = hailperin_lp(inst)
    lo = solve_lp(lp.with_sense("minimize"), mode)
    if not lo.optimal:
        return None, None
    hi = solve_lp(lp, mode)
    return lo, hi


def hailperin_bounds(inst: Instance, mode: str = "float") -> BoundResult:
    """Sharp lower/upper bounds on the union probability."""
    lo, hi = _solve_both(inst, mode)
    if lo is None:
        return finish_bounds("hailperin", None, None, mode)
    return finish_bounds("hailperin", lo.objective_value, hi.objective_value, mode)


def atom_certificate(inst: Instance, target, mode: str = "exact") -> AtomVector:
    """A feasible atom vector whose union mass equals ``target``.

    Mixes the minimising and maximising vertices; ``target`` must lie in
    ``[lb, ub]`` of :func:`hailperin_bounds`.
    """
    lo, hi = _solve_both(inst, mode)
    if lo is None:
        raise ValueError("instance is not probability-consistent")
    res = finish_bounds("hailperin", lo.objective_value, hi.objective_value, mode)
    if not res.ok:
        raise ValueError("instance is not probability-consistent")
    if mode == "exact":
        target = Fraction(target)
    tol = 0 if mode == "exact" else 1e-9
    if not res.lb - tol <= target <= res.ub + tol:
        raise ValueError(f"target {target} outside [{res.lb}, {res.ub}]")
    zlo, zhi = lo.objective_value, hi.objective_value
    if zhi == zlo:
        lam = 1
    else:
        lam = (zhi - target) / (zhi - zlo)
        if mode != "exact":
            lam = min(1.0, max(0.0, lam))
    mass = {}
    for S, (a, b) in enumerate(zip(lo.primal, hi.primal), start=1):
        v = lam * a + (1 - lam) * b
        if v > 0:
            mass[S] = v
    return AtomVector(inst.n, mass)


__all__ = ["BoundResult", "hailperin_bounds", "atom_certificate", "finish_bounds",
           "hailperin_lp", "OK", "PROB_INFEASIBLE"]
