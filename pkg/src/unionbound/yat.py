"""The degree-2/3 aggregation model and its tightening by binomial QPBF cuts.

Variables are ``y^1_i`` for each event and ``y^k_Q`` for each pair ``Q`` and
level ``2 <= k <= n``.  Every inequality of the model is the pair-coordinate
row of a nonnegative QPBF at some level, so the model is a finite list of
rows.  Rather than loading all of them (about ``n^4`` rows, which makes a
dense tableau slow well before ``n = 10``), the solver generates them: it
solves with the rows found so far, scans the full list at the optimum and
adds the violated ones until none remain.  The optimum is that of the
complete model.

The tightened model adds rows of ``C(sum_{w in W} w - gamma, 2)`` for
four-literal sets ``W`` and ``gamma in {1, 2}``, one violated cut per round
by default.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .hailperin import ZMIN_TOL, BoundResult, finish_bounds
from .lp import MAXIMIZE, FloatTableau, LPProblem
from .model import E2, Instance, YVector, e2_from_pairs, pairs, preimage_feasible
from .qpbf import (CoefficientBlock, LiteralSet, catalog_g2_g3, gen_binomial_qpbf,
                   qpbf_to_row)

log = logging.getLogger(__name__)

CUT_TOL = 1e-7
# largest literal set of the binomial cuts; each size s adds C(n, s) 2^s (s - 2) candidates
DEFAULT_W_SIZE = 4
CATALOG_TOL = 1e-10
CATALOG_BATCH = 64
# rows whose surplus exceeds this at an optimum are dropped from the tableau
PURGE_SLACK = 1e-6
DEFAULT_MAX_ROUNDS = 200
MAX_U2_N = 12

CATALOG = "catalog_g2g3"
BINOMIAL = "binomial_g4"


# ---------------------------------------------------------------------------
# row pools


@dataclass(frozen=True)
class _Pool:
    """Dense rows for every level, plus identifying labels."""

    labels: list       # per function
    rows: dict         # k -> (F, P) array

    def stacked(self):
        """All rows as one array with a parallel (k, function index) list."""
        ks = sorted(self.rows)
        mats = [self.rows[k] for k in ks]
        ids = [(k, t) for k in ks for t in range(len(self.labels))]
        return np.vstack(mats), ids


@lru_cache(maxsize=16)
def _catalog_pool(n: int) -> _Pool:
    gens = catalog_g2_g3(n)
    # pure Z_iZ_j rows are the variable bounds y^k_Q >= 0
    gens = [g for g in gens if not (len(g.f.a2) == 1 and g.f.a0 == 0 and not any(g.f.a1))]
    block = CoefficientBlock.from_functions(n, [g.f for g in gens])
    return _Pool([g.label for g in gens], {k: block.rows(k) for k in range(2, n + 1)})


def _binomial_keys(n: int, size: int):
    for idx in combinations(range(n), size):
        for mask in range(1 << size):
            for gamma in range(1, size - 1):
                yield idx, mask, gamma


@lru_cache(maxsize=16)
def _binomial_candidates(n: int, max_size: int = 4):
    """Binomial generators for set sizes 4..max_size, in (size, indices, mask, gamma) order."""
    cands, fs = [], []
    for size in range(4, max_size + 1):
        for idx, mask, gamma in _binomial_keys(n, size):
            w = LiteralSet.from_mask(idx, mask)
            cands.append((idx, mask, gamma, w))
            fs.append(gen_binomial_qpbf(w, gamma, n))
    block = CoefficientBlock.from_functions(n, fs) if fs else None
    rows = {k: block.rows(k) for k in range(2, n + 1)} if fs else {}
    return cands, fs, rows


# ---------------------------------------------------------------------------


@dataclass
class CutDescriptor:
    source: str
    k: int
    row: dict
    violation: float
    w: LiteralSet | None = None
    gamma: int = 0
    indices: tuple = ()
    polarity: int = 0
    label: str = ""


class YatModel:
    """Equality system of the E2 aggregation plus level rows.

    Rows come from two places: explicit rows added with :meth:`add_row`
    (cuts) and the catalog, which is never loaded whole.  Each sense keeps
    a warm tableau; every round drops rows that are slack at the optimum
    and loads the violated rows of both kinds that are not loaded yet, so
    the final point satisfies all of them.
    """

    def __init__(self, inst: Instance, cap: bool = True):
        self.inst = inst
        self.cap = cap
        n = self.n = inst.n
        self.P = pairs(n)
        Pn = self.Pn = len(self.P)
        self.nv = n + (n - 1) * Pn
        obj = np.zeros(self.nv)
        obj[:n] = 1.0
        for k in range(2, n + 1):
            obj[self._sl(k)] = 1.0 / comb(k, 2)
        self.objective = obj
        eq = []
        for i in range(n):
            r = np.zeros(self.nv)
            r[i] = 1.0
            hit = np.array([i in Q for Q in self.P], dtype=float)
            for k in range(2, n + 1):
                r[self._sl(k)] = hit / (k - 1)
            eq.append((r, float(inst.p1[i])))
        for q, Q in enumerate(self.P):
            r = np.zeros(self.nv)
            for k in range(2, n + 1):
                r[n + (k - 2) * Pn + q] = 1.0
            eq.append((r, float(inst.p2[Q])))
        self.eq = eq
        self.rows: list = []          # explicit rows: (level, pair-coefficient array)
        self._explicit = None         # dense stack of self.rows, rebuilt on demand
        self._tableaus: dict = {}     # sense -> FloatTableau
        self.catalog_added = 0

    def _sl(self, k: int) -> slice:
        start = self.n + (k - 2) * self.Pn
        return slice(start, start + self.Pn)

    def _dense(self, k: int, c: np.ndarray):
        r = np.zeros(self.nv)
        r[self._sl(k)] = c
        return r, 0.0

    def add_row(self, k: int, coeffs: np.ndarray):
        self.rows.append((k, np.asarray(coeffs, dtype=float)))
        self._explicit = None

    def lp(self, sense: str) -> LPProblem:
        """The LP with the explicit rows only (no catalog rows)."""
        return LPProblem(self.nv, self.objective, sense, self.eq,
                         [self._dense(k, c) for k, c in self.rows])

    def level_pairs(self, x: np.ndarray) -> dict:
        return {k: x[self._sl(k)] for k in range(2, self.n + 1)}

    def to_yvector(self, x: np.ndarray) -> YVector:
        return e2_from_pairs(self.n, {k: v.tolist() for k, v in self.level_pairs(x).items()},
                             x[:self.n].tolist())

    def _violated(self, x: np.ndarray, active: set) -> list:
        """Violated rows not loaded in the tableau, most violated first."""
        viol = []
        if self.rows:
            if self._explicit is None:
                self._explicit = np.array([self._dense(k, c)[0] for k, c in self.rows])
            vals = self._explicit @ x
            for t in np.flatnonzero(vals < -CATALOG_TOL):
                if ("row", int(t)) not in active:
                    k, c = self.rows[t]
                    viol.append((vals[t], ("row", int(t)), k, c))
        if self.n >= 2:
            pool = _catalog_pool(self.n)
            Y = self.level_pairs(x)
            for k, R in pool.rows.items():
                vals = R @ Y[k]
                for t in np.flatnonzero(vals < -CATALOG_TOL):
                    if ("cat", k, int(t)) not in active:
                        viol.append((vals[t], ("cat", k, int(t)), k, R[t]))
        viol.sort(key=lambda v: v[0])
        return viol

    def solve(self, sense: str):
        """Optimise over the equalities, the explicit rows and the full catalog."""
        tab = self._tableaus.get(sense)
        if tab is None:
            ge = []
            if self.cap and sense == MAXIMIZE:
                # objective <= 1 leaves min(1, max) unchanged once the minimum
                # is at most 1, and spares the search over a flat face above 1
                ge.append((-self.objective, -1.0))
            tab = self._tableaus[sense] = FloatTableau(
                LPProblem(self.nv, self.objective, sense, self.eq, ge), keys=[None] * len(ge))
        level, purged = None, set()
        while True:
            sol = tab.solution(duals=False)
            if not sol.optimal:
                return sol
            # while the objective sits on a plateau each row may be dropped
            # once; otherwise the point could cycle through the same rows
            v = sol.objective_value
            if level is None or abs(v - level) > 1e-9 * (1.0 + abs(v)):
                level, purged = v, set()
            purged.update(tab.purge(PURGE_SLACK, keep=purged))
            viol = self._violated(sol.primal, set(tab.keys))[:CATALOG_BATCH]
            if not viol:
                return sol
            self.catalog_added += sum(1 for v in viol if v[1][0] == "cat")
            tab.add_ge_rows([self._dense(k, c) for _, _, k, c in viol], [key for _, key, _, _ in viol])


def yat_bounds(inst: Instance) -> BoundResult:
    """Bounds from the degree-2/3 aggregation model."""
    model = YatModel(inst)
    lo = model.solve("minimize")
    if not lo.optimal:
        return finish_bounds("yat", None, None, "float")
    if lo.objective_value > 1 + ZMIN_TOL:
        return finish_bounds("yat", lo.objective_value, lo.objective_value, "float")
    hi = model.solve("maximize")
    return finish_bounds("yat", lo.objective_value, hi.objective_value, "float")


def yat_lp_full(inst: Instance) -> LPProblem:
    """The complete model with every catalog row loaded (no row generation)."""
    model = YatModel(inst)
    pool = _catalog_pool(inst.n)
    for k, R in sorted(pool.rows.items()):
        for row in R:
            model.add_row(k, row)
    return model.lp("maximize")


# ---------------------------------------------------------------------------
# separation and the cut loop


def _separate_arrays(n: int, Y: dict, tol: float = CUT_TOL, size: int = DEFAULT_W_SIZE,
                     batch: int = 1) -> list:
    """Up to ``batch`` most violated candidates as ``(cut, dense row)`` pairs."""
    cands, fs, rows = _binomial_candidates(n, size)
    if not cands:
        return []
    found = []
    for k in sorted(rows):
        vals = rows[k] @ Y[k]
        hit = np.flatnonzero(vals < -tol)
        if len(hit) > batch:
            hit = hit[np.argsort(vals[hit], kind="stable")[:batch]]
        found.extend((float(vals[t]), k, int(t)) for t in hit)
    # stable sort on the value keeps (k, indices, mask, gamma) order on ties
    found.sort(key=lambda f: f[0])
    out = []
    for v, k, t in found[:batch]:
        idx, mask, gamma, w = cands[t]
        cut = CutDescriptor(BINOMIAL, k, qpbf_to_row(fs[t], k), v, w, gamma, idx, mask,
                            f"G[{','.join(str(i + 1) for i in idx)}/{mask:0{len(idx)}b}/{gamma}]")
        out.append((cut, rows[k][t]))
    return out


def separate_g4(y: YVector, n: int | None = None, tol: float = CUT_TOL,
                size: int = DEFAULT_W_SIZE) -> CutDescriptor | None:
    """Most violated binomial cut at ``y``, or ``None``.

    Candidates are every 4-subset of indices, 16 polarity masks (bit ``t``
    set means the t-th index enters as ``1 - Z``), ``gamma in {1, 2}`` and
    every level ``2 <= k <= n``.  ``size > 4`` adds the sets of sizes 5 up
    to ``size`` with ``1 <= gamma <= |W| - 2``.  Ties keep the first
    candidate in (k, size, indices, mask, gamma) order.
    """
    if y.family != E2:
        raise ValueError(f"separation needs an E2 vector, got {y.family}")
    n = y.n if n is None else n
    Y = {k: y.pair_level(k) for k in range(2, n + 1)}
    found = _separate_arrays(n, Y, tol, size)
    return found[0][0] if found else None


@dataclass
class QPBRun:
    result: BoundResult
    cuts: list = field(default_factory=list)
    max_trace: list = field(default_factory=list)
    min_trace: list = field(default_factory=list)
    hit_round_limit: bool = False
    base: BoundResult | None = None     # the model before any cut


def qpb_minus_run(inst: Instance, max_rounds: int = DEFAULT_MAX_ROUNDS, batch: int = 1,
                  w_size: int = DEFAULT_W_SIZE) -> QPBRun:
    """Cutting-plane loop on top of the degree-2/3 model.

    After the uncut minimum (which settles feasibility), runs the
    maximisation loop, then the minimisation loop, sharing the cut pool;
    each sense gets up to ``max_rounds`` separation rounds adding up to
    ``batch`` cuts each.  The traces record the objective after every
    round, index 0 being the value before that sense's first cut.
    """
    if max_rounds < 0:
        raise ValueError("max_rounds must be nonnegative")
    if batch < 1:
        raise ValueError("batch must be at least 1")
    if w_size < 4:
        raise ValueError("w_size must be at least 4")
    model = YatModel(inst)
    run = QPBRun(BoundResult("pending"))
    lo = model.solve("minimize")
    if not lo.optimal or lo.objective_value > 1 + ZMIN_TOL:
        z = lo.objective_value
        run.result = finish_bounds("qpbm", z, z, "float")
        run.base = finish_bounds("yat", z, z, "float")
        return run
    values = {}
    for sense, trace in (("maximize", run.max_trace), ("minimize", run.min_trace)):
        rounds = 0
        while True:
            sol = model.solve(sense)
            if not sol.optimal:
                run.result = finish_bounds("qpbm", None, None, "float", len(run.cuts))
                return run
            trace.append(sol.objective_value)
            Y = model.level_pairs(sol.primal)
            if rounds >= max_rounds:
                if max_rounds:
                    run.hit_round_limit = run.hit_round_limit or bool(
                        _separate_arrays(model.n, Y, size=w_size))
                break
            found = _separate_arrays(model.n, Y, size=w_size, batch=batch)
            if not found:
                break
            for cut, dense in found:
                model.add_row(cut.k, dense)
                run.cuts.append(cut)
                log.debug("%s round %d: %s at k=%d violation %.3g",
                          sense, rounds + 1, cut.label, cut.k, cut.violation)
            rounds += 1
        values[sense] = sol.objective_value
    if run.hit_round_limit:
        log.info("cut loop stopped at max_rounds=%d with violated cuts remaining", max_rounds)
    run.base = finish_bounds("yat", lo.objective_value, run.max_trace[0], "float")
    run.result = finish_bounds("qpbm", values["minimize"], values["maximize"], "float", len(run.cuts))
    return run


def qpb_minus_bounds(inst: Instance, max_rounds: int = DEFAULT_MAX_ROUNDS, batch: int = 1,
                     w_size: int = DEFAULT_W_SIZE) -> BoundResult:
    return qpb_minus_run(inst, max_rounds, batch, w_size).result


def write_cut_log(cuts, stream=None) -> str:
    """CSV with one line per accepted cut: round, k, indices, polarity, gamma, violation."""
    out = stream if stream is not None else io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["round", "k", "indices", "polarity", "gamma", "violation"])
    for r, c in enumerate(cuts, start=1):
        writer.writerow([r, c.k, " ".join(str(i + 1) for i in c.indices),
                         format(c.polarity, f"0{len(c.indices)}b"), c.gamma, f"{c.violation:.6e}"])
    return out.getvalue() if stream is None else ""


# ---------------------------------------------------------------------------


def u2_member_oracle(y: YVector, n: int | None = None) -> bool:
    """Exact membership of an E2 vector in the image cone, level by level."""
    if y.family != E2:
        raise ValueError(f"U2 membership needs an E2 vector, got {y.family}")
    n = y.n if n is None else n
    if n > MAX_U2_N:
        raise ValueError(f"U2 oracle limited to n <= {MAX_U2_N}")
    return all(preimage_feasible(y, k, n) for k in y.levels())


def catalog_rows_hold(y: YVector, exact: bool = True) -> bool:
    """Whether ``y`` satisfies ``y^1 >= 0`` and every catalog row at every level >= 2."""
    n = y.n
    if any(y[(1, (i,))] < 0 for i in range(n)):
        return False
    gens = catalog_g2_g3(n)
    for k in range(2, n + 1):
        level = {Q: y[(k, Q)] for Q in pairs(n)}
        for g in gens:
            row = qpbf_to_row(g.f, k)
            val = sum((c * (Fraction(level[Q]) if exact else level[Q]) for Q, c in row.items()), 0)
            if val < 0:
                return False
    return True
