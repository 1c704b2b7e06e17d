"""Dense two-phase simplex over equality and >= rows, exact or floating.

Both arithmetic modes run the same algorithm: the problem is brought to
standard form (shifted lower bounds, surplus columns for >= rows, artificial
columns where no unit column is available), phase 1 minimises the sum of
artificials, and phase 2 optimises the real objective.

The exact mode keeps lists of :class:`fractions.Fraction`, pivots in pure
Python and follows Bland's rule, so it terminates.  The float mode keeps
its tableau in a numpy array and delegates the pivot loop to
:mod:`unionbound.kernels`: most-negative pricing with a Bland fallback on
degenerate stretches, a Harris ratio test, and a fresh tableau computed
from the original matrix every ``REINVERT_EVERY`` pivots so rounding error
does not accumulate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9
OPT_TOL = 1e-9
MAX_ITER = 200_000
REINVERT_EVERY = 100
# pivots since the last reinversion below which an optimal tableau is trusted
REFRESH_MIN = 100
EXACT_MAX_CELLS = 4_000_000

MAXIMIZE = "maximize"
MINIMIZE = "minimize"
OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LPError(ValueError):
    """Malformed LP or a problem outside the configured size guard."""


@dataclass
class LPProblem:
    """``max/min c.x`` s.t. ``A x = b``, ``G x >= h``, ``x >= lower``."""

    num_vars: int
    objective: Sequence
    sense: str = MAXIMIZE
    eq_rows: list = field(default_factory=list)
    ge_rows: list = field(default_factory=list)
    var_lower_bounds: Sequence | None = None

    def __post_init__(self):
        if self.sense not in (MAXIMIZE, MINIMIZE):
            raise LPError(f"unknown sense {self.sense!r}")
        if len(self.objective) != self.num_vars:
            raise LPError("objective length does not match num_vars")
        for kind, rows in (("eq", self.eq_rows), ("ge", self.ge_rows)):
            for idx, (coeffs, _) in enumerate(rows):
                if len(coeffs) != self.num_vars:
                    raise LPError(f"{kind} row {idx} has length {len(coeffs)}, expected {self.num_vars}")
        if self.var_lower_bounds is not None and len(self.var_lower_bounds) != self.num_vars:
            raise LPError("var_lower_bounds length does not match num_vars")

    def with_sense(self, sense: str) -> "LPProblem":
        return LPProblem(self.num_vars, self.objective, sense, self.eq_rows,
                         self.ge_rows, self.var_lower_bounds)


@dataclass
class LPSolution:
    """Solver outcome.

    For an optimal solution the dual vectors satisfy
    ``objective_value == duals_eq.b + duals_ge.h + (c - A'u - G'v).lower``;
    for minimisation ``duals_ge >= 0`` and the reduced costs
    ``c - A'u - G'v`` are ``>= 0``, for maximisation both signs flip.
    """

    status: str
    objective_value: object = None
    primal: object = None
    duals_eq: object = None
    duals_ge: object = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


# ---------------------------------------------------------------------------
# standard form


@dataclass
class _Standard:
    A: list            # rows of the standard matrix (python lists)
    b: list
    sign: list         # +1/-1 applied to each original row
    n_x: int
    n_slack: int
    art_rows: list     # rows that receive an artificial column
    unit_col: list     # per row, column holding +e_i in the initial matrix
    c_min: list        # phase-2 costs (minimisation form) over x columns
    shift: list        # lower bounds
    n_eq: int


def _standard_form(p: LPProblem, conv) -> _Standard:
    nv = p.num_vars
    lower = [conv(v) for v in p.var_lower_bounds] if p.var_lower_bounds is not None else [conv(0)] * nv
    rows, rhs, sign, unit_col, art_rows = [], [], [], [], []
    n_slack = len(p.ge_rows)
    zero = conv(0)

    def shifted(coeffs, b):
        coeffs = [conv(a) for a in coeffs]
        b = conv(b) - sum((a * l for a, l in zip(coeffs, lower) if l != 0), zero)
        return coeffs, b

    for coeffs, b in p.eq_rows:
        coeffs, b = shifted(coeffs, b)
        s = -1 if b < 0 else 1
        rows.append([s * a for a in coeffs] + [zero] * n_slack)
        rhs.append(s * b)
        sign.append(s)
    for t, (coeffs, h) in enumerate(p.ge_rows):
        coeffs, h = shifted(coeffs, h)
        slack = [zero] * n_slack
        if h <= 0:
            # -g.x + s = -h >= 0: surplus column is a ready unit column
            slack[t] = conv(1)
            rows.append([-a for a in coeffs] + slack)
            rhs.append(-h)
            sign.append(-1)
        else:
            slack[t] = conv(-1)
            rows.append(list(coeffs) + slack)
            rhs.append(h)
            sign.append(1)
    n_art = 0
    for i in range(len(rows)):
        is_ge = i >= len(p.eq_rows)
        if is_ge and sign[i] == -1:
            unit_col.append(nv + (i - len(p.eq_rows)))
        else:
            unit_col.append(nv + n_slack + n_art)
            art_rows.append(i)
            n_art += 1
    c = [conv(v) for v in p.objective]
    c_min = c if p.sense == MINIMIZE else [-v for v in c]
    return _Standard(rows, rhs, sign, nv, n_slack, art_rows, unit_col, c_min, lower, len(p.eq_rows))


def _recover(p: LPProblem, st: _Standard, x_std, pi, conv):
    """Map standard-form primal/dual values back to the caller's problem."""
    nv = p.num_vars
    x = [x_std[j] + st.shift[j] for j in range(nv)]
    c = [conv(v) for v in p.objective]
    value = sum((ci * xi for ci, xi in zip(c, x)), conv(0))
    duals = [st.sign[i] * pi[i] for i in range(len(pi))]
    if p.sense == MAXIMIZE:
        duals = [-d for d in duals]
    return x, value, duals[:st.n_eq], duals[st.n_eq:]


# ---------------------------------------------------------------------------
# float mode


def _float_matrix(rows, nv):
    if not rows:
        return np.zeros((0, nv)), np.zeros(0)
    A = np.array([np.asarray(r, dtype=float) for r, _ in rows], dtype=float).reshape(len(rows), nv)
    b = np.array([float(v) for _, v in rows], dtype=float)
    return A, b


def _reinvert(T, basis, A, b, cost, primal=True):
    """Recompute the tableau for ``basis`` from the original rows."""
    m = T.shape[0] - 1
    N = T.shape[1] - 1
    if m == 0:
        T[0, :N] = cost
        T[0, N] = 0.0
        return
    try:
        sol = np.linalg.solve(A[:, basis], np.column_stack([A, b]))
    except np.linalg.LinAlgError:
        return
    T[:m] = sol
    T[:m, basis] = np.eye(m)
    rhs = T[:m, N]
    if primal:
        rhs[rhs < 0.0] = 0.0
    cb = cost[basis]
    T[m, :N] = cost - cb @ T[:m, :N]
    T[m, basis] = 0.0
    T[m, N] = -(cb @ rhs)


class FloatTableau:
    """A solved float LP that accepts further ``>=`` rows.

    Construction runs both phases.  :meth:`add_ge_rows` appends rows to the
    optimal tableau and restores optimality with the dual simplex, and
    :meth:`purge` drops rows that are strictly slack at the optimum.  That
    is what a cutting-plane loop needs: each round costs a few pivots on a
    small tableau instead of a fresh solve.
    """

    def __init__(self, p: LPProblem, max_iter: int = MAX_ITER, keys=None):
        self.problem = LPProblem(p.num_vars, p.objective, p.sense, list(p.eq_rows),
                                 list(p.ge_rows), p.var_lower_bounds)
        self.keys = list(keys) if keys is not None else [None] * len(p.ge_rows)
        if len(self.keys) != len(self.problem.ge_rows):
            raise LPError("keys must match the >= rows")
        self.max_iter = max_iter
        self.iterations = 0
        self._build()

    # -- construction ------------------------------------------------------

    def _build(self):
        p = self.problem
        nv = self.nv = p.num_vars
        self.lower = (np.asarray(p.var_lower_bounds, dtype=float) if p.var_lower_bounds is not None
                      else np.zeros(nv))
        A_eq, b_eq = _float_matrix(p.eq_rows, nv)
        G, h = _float_matrix(p.ge_rows, nv)
        b_eq = b_eq - A_eq @ self.lower
        h = h - G @ self.lower
        m1, m2 = len(b_eq), len(h)
        m = m1 + m2
        sign = np.ones(m)
        sign[:m1][b_eq < 0] = -1.0
        ge_neg = h <= 0
        sign[m1:][ge_neg] = -1.0
        art_rows = np.concatenate([np.arange(m1), m1 + np.flatnonzero(~ge_neg)]).astype(np.int64)
        n_s, n_a = m2, len(art_rows)
        N = nv + n_s + n_a

        A = np.zeros((m, N))
        A[:m1, :nv] = A_eq
        A[m1:, :nv] = G
        A[m1 + np.arange(m2), nv + np.arange(m2)] = -1.0
        A *= sign[:, None]
        A[art_rows, nv + n_s + np.arange(n_a)] = 1.0
        b = np.concatenate([b_eq, h]) * sign

        basis = np.empty(m, dtype=np.int64)
        basis[art_rows] = nv + n_s + np.arange(n_a)
        neg_rows = m1 + np.flatnonzero(ge_neg)
        basis[neg_rows] = nv + np.flatnonzero(ge_neg)

        T = np.zeros((m + 1, N + 1))
        T[:m, :N] = A
        T[:m, N] = b
        b_scale = 1.0 + (float(np.max(np.abs(b))) if m else 0.0)
        self.n_eq = m1
        self.sign = sign
        self.rows = np.arange(m)      # original row index of each row of A
        self.A, self.b, self.T, self.basis = A, b, T, basis
        self.status = OPTIMAL
        self._since = 0

        if n_a:
            T[m, :nv + n_s] = -T[art_rows, :nv + n_s].sum(axis=0)
            T[m, N] = -T[art_rows, N].sum()
            cost1 = np.zeros(N)
            cost1[nv + n_s:] = 1.0
            status = self._primal(cost1, np.ones(N, dtype=np.uint8))
            if status == kernels.ITERATION_LIMIT:
                raise RuntimeError("simplex iteration limit reached in phase 1")
            T, basis = self.T, self.basis
            if -T[m, N] > FEAS_TOL * b_scale:
                self.status = INFEASIBLE
                return
            # drive artificials out of the basis; a row with no usable pivot is
            # redundant, and so is the original row owning its artificial
            keep = np.ones(m, dtype=bool)
            a_keep = np.ones(m, dtype=bool)
            for i in range(m):
                if basis[i] >= nv + n_s:
                    row = np.abs(T[i, :nv + n_s])
                    j = int(np.argmax(row)) if row.size else -1
                    if j >= 0 and row[j] > 1e-7:
                        kernels.pivot(T, basis, i, j)
                    else:
                        keep[i] = False
                        a_keep[art_rows[basis[i] - nv - n_s]] = False
            rows = np.flatnonzero(keep)
            cols = np.arange(nv + n_s)
            self.T = np.ascontiguousarray(T[np.append(rows, m)][:, np.append(cols, N)])
            self.basis = np.ascontiguousarray(basis[rows])
            self.rows = np.flatnonzero(a_keep)
            self.A = np.ascontiguousarray(A[np.ix_(self.rows, cols)])
            self.b = b[self.rows]

        self.cost = np.zeros(self.A.shape[1])
        self.cost[:nv] = self._min_objective()
        _reinvert(self.T, self.basis, self.A, self.b, self.cost)
        self._since = 0
        self._optimise()

    def _min_objective(self):
        c = np.asarray(self.problem.objective, dtype=float)
        return c if self.problem.sense == MINIMIZE else -c

    # -- pivoting ----------------------------------------------------------

    def _refresh(self, cost, primal=True):
        _reinvert(self.T, self.basis, self.A, self.b, cost, primal)
        self._since = 0

    def _primal(self, cost, allowed):
        """Primal simplex in chunks, reinverting every ``REINVERT_EVERY`` pivots."""
        total = 0
        while True:
            chunk = max(0, min(REINVERT_EVERY - self._since, self.max_iter - total))
            status, it = kernels.run_simplex(self.T, self.basis, allowed, chunk, OPT_TOL,
                                             PIVOT_TOL, FEAS_TOL, kernels.DANTZIG)
            total += it
            self._since += it
            self.iterations += it
            if status == kernels.UNBOUNDED:
                return status
            if status == kernels.OPTIMAL and self._since < REFRESH_MIN:
                return status
            self._refresh(cost)
            if status == kernels.OPTIMAL:
                if not np.any((allowed != 0) & (self.T[-1, :-1] < -OPT_TOL)):
                    return status
            if total >= self.max_iter:
                return kernels.ITERATION_LIMIT

    def _dual(self, allowed):
        """Dual simplex until the basis is primal feasible."""
        total = 0
        while True:
            chunk = max(0, min(REINVERT_EVERY - self._since, self.max_iter - total))
            status, it = kernels.run_dual_simplex(self.T, self.basis, allowed, chunk, OPT_TOL,
                                                  PIVOT_TOL, FEAS_TOL)
            total += it
            self._since += it
            self.iterations += it
            if status == kernels.INFEASIBLE:
                return status
            if status == kernels.OPTIMAL and self._since < REFRESH_MIN:
                return status
            self._refresh(self.cost, primal=False)
            if status == kernels.OPTIMAL and not np.any(self.T[:-1, -1] < -FEAS_TOL):
                return status
            if total >= self.max_iter:
                return kernels.ITERATION_LIMIT

    def _optimise(self, dual=False):
        allowed = np.ones(self.T.shape[1] - 1, dtype=np.uint8)
        if dual:
            status = self._dual(allowed)
            if status == kernels.INFEASIBLE:
                self.status = INFEASIBLE
                return
            if status == kernels.ITERATION_LIMIT:
                raise RuntimeError("dual simplex iteration limit reached")
            rhs = self.T[:-1, -1]
            rhs[rhs < 0.0] = 0.0
        status = self._primal(self.cost, allowed)
        if status == kernels.ITERATION_LIMIT:
            raise RuntimeError("simplex iteration limit reached in phase 2")
        self.status = UNBOUNDED if status == kernels.UNBOUNDED else OPTIMAL

    # -- row management ----------------------------------------------------

    def add_ge_rows(self, rows, keys=None):
        """Append rows ``g.x >= h`` and re-optimise.

        Only an optimal tableau is extended in place; otherwise the whole
        problem is rebuilt.  ``keys`` label the rows for :meth:`purge`.
        """
        rows = list(rows)
        if not rows:
            return
        keys = list(keys) if keys is not None else [None] * len(rows)
        if len(keys) != len(rows):
            raise LPError("keys must match the rows")
        n_ge = len(self.problem.ge_rows)
        self.problem.ge_rows.extend(rows)
        self.keys.extend(keys)
        if self.status != OPTIMAL:
            self._build()
            return
        nv = self.nv
        G, h = _float_matrix(rows, nv)
        h = h - G @ self.lower
        k = len(h)
        m, N = self.A.shape
        # -g.x + s = -h, so the new surplus column starts basic
        A = np.zeros((m + k, N + k))
        A[:m, :N] = self.A
        A[m:, :nv] = -G
        A[m + np.arange(k), N + np.arange(k)] = 1.0
        T = np.zeros((m + k + 1, N + k + 1))
        T[:m, :N] = self.T[:m, :N]
        T[:m, -1] = self.T[:m, -1]
        new = np.zeros((k, N + k + 1))
        new[:, :N + k] = A[m:]
        new[:, -1] = -h
        new -= new[:, self.basis] @ T[:m]
        T[m:m + k] = new
        T[-1, :N] = self.T[m, :N]
        T[-1, -1] = self.T[m, -1]
        first = self.n_eq + n_ge
        self.sign = np.concatenate([self.sign, -np.ones(k)])
        self.rows = np.concatenate([self.rows, first + np.arange(k)])
        self.A, self.b, self.T = A, np.concatenate([self.b, -h]), T
        self.basis = np.concatenate([self.basis, N + np.arange(k)])
        self.cost = np.concatenate([self.cost, np.zeros(k)])
        self._optimise(dual=True)

    def purge(self, min_slack: float = 1e-6, keep=()) -> list:
        """Drop keyed ``>=`` rows whose surplus is basic and above ``min_slack``.

        Rows without a key, or with a key in ``keep``, are kept.  The
        current basis stays optimal for the smaller problem.  Returns the
        keys of the dropped rows.
        """
        if self.status != OPTIMAL:
            return []
        nv, m = self.nv, self.A.shape[0]
        rhs = self.T[:m, -1]
        drop_t = np.flatnonzero((self.basis >= nv) & (rhs > min_slack))
        drop_t = np.array([t for t in drop_t
                           if (key := self.keys[self.basis[t] - nv]) is not None and key not in keep],
                          dtype=np.int64)
        if drop_t.size == 0:
            return []
        ge_drop = np.sort(self.basis[drop_t] - nv)
        col_keep = np.ones(self.A.shape[1], dtype=bool)
        col_keep[nv + ge_drop] = False
        t_keep = np.ones(m, dtype=bool)
        t_keep[drop_t] = False
        a_keep = ~np.isin(self.rows, self.n_eq + ge_drop)
        self.T = np.ascontiguousarray(self.T[np.append(t_keep, True)][:, np.append(col_keep, True)])
        self.A = np.ascontiguousarray(self.A[np.ix_(a_keep, col_keep)])
        self.b = self.b[a_keep]
        self.cost = self.cost[col_keep]
        # renumber surplus columns and original rows past the dropped ones
        shift_col = np.cumsum(~col_keep)
        basis = self.basis[t_keep]
        self.basis = np.ascontiguousarray(basis - shift_col[basis])
        n_orig = len(self.sign)
        orig_keep = np.ones(n_orig, dtype=bool)
        orig_keep[self.n_eq + ge_drop] = False
        shift_orig = np.cumsum(~orig_keep)
        rows = self.rows[a_keep]
        self.rows = rows - shift_orig[rows]
        self.sign = self.sign[orig_keep]
        drop = set(ge_drop.tolist())
        dropped = [self.keys[t] for t in sorted(drop)]
        self.problem.ge_rows = [r for t, r in enumerate(self.problem.ge_rows) if t not in drop]
        self.keys = [key for t, key in enumerate(self.keys) if t not in drop]
        return dropped

    def solution(self, duals: bool = True) -> LPSolution:
        """Current solution.  ``duals=False`` reads the primal point straight
        off the tableau and skips the two factorisations."""
        if self.status != OPTIMAL:
            return LPSolution(self.status, iterations=self.iterations)
        A, b, T, basis = self.A, self.b, self.T, self.basis
        m, N = A.shape
        b_scale = 1.0 + (float(np.max(np.abs(b))) if m else 0.0)
        x_std = np.zeros(N)
        x_std[basis] = T[:m, -1]
        if not duals:
            np.clip(x_std, 0.0, None, out=x_std)
            x = x_std[:self.nv] + self.lower
            value = float(np.dot(np.asarray(self.problem.objective, dtype=float), x))
            return LPSolution(OPTIMAL, value, x, None, None, self.iterations)
        pi = np.zeros(m)
        if m:
            B = A[:, basis]
            try:
                # refine basic values against the original matrix
                refined = np.linalg.solve(B, b)
                if (np.all(refined >= -FEAS_TOL * b_scale)
                        and np.allclose(refined, T[:m, -1], atol=1e-7 * b_scale)):
                    x_std[basis] = refined
                pi = np.linalg.solve(B.T, self.cost[basis])
            except np.linalg.LinAlgError:
                pass
        np.clip(x_std, 0.0, None, out=x_std)
        x = x_std[:self.nv] + self.lower
        duals = np.zeros(len(self.sign))
        duals[self.rows] = pi
        duals *= self.sign
        if self.problem.sense == MAXIMIZE:
            duals = -duals
        value = float(np.dot(np.asarray(self.problem.objective, dtype=float), x))
        return LPSolution(OPTIMAL, value, x, duals[:self.n_eq], duals[self.n_eq:], self.iterations)


def _solve_float(p: LPProblem, max_iter: int) -> LPSolution:
    return FloatTableau(p, max_iter).solution()


# ---------------------------------------------------------------------------
# exact mode


def _to_fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _pivot_exact(T, basis, r, c):
    row = T[r]
    piv = row[c]
    if piv != 1:
        row = [v / piv for v in row]
        T[r] = row
    nz = [(j, v) for j, v in enumerate(row) if v]
    for i, other in enumerate(T):
        if i == r:
            continue
        f = other[c]
        if f:
            for j, v in nz:
                other[j] -= f * v
    basis[r] = c


def _simplex_exact(T, basis, allowed, max_iter):
    m = len(T) - 1
    obj = T[m]
    it = 0
    while True:
        c = next((j for j, d in enumerate(obj[:-1]) if allowed[j] and d < 0), -1)
        if c < 0:
            return kernels.OPTIMAL, it
        if it >= max_iter:
            return kernels.ITERATION_LIMIT, it
        r, best = -1, None
        for i in range(m):
            a = T[i][c]
            if a > 0:
                ratio = T[i][-1] / a
                if r < 0 or ratio < best or (ratio == best and basis[i] < basis[r]):
                    r, best = i, ratio
        if r < 0:
            return kernels.UNBOUNDED, it
        _pivot_exact(T, basis, r, c)
        obj = T[m]
        it += 1


def _solve_exact(p: LPProblem, max_iter: int, max_cells: int) -> LPSolution:
    st = _standard_form(p, _to_fraction)
    m = len(st.A)
    n_x, n_s, n_a = st.n_x, st.n_slack, len(st.art_rows)
    N = n_x + n_s + n_a
    if (m + 1) * (N + 1) > max_cells:
        raise LPError(f"exact mode size guard: {(m + 1) * (N + 1)} cells > {max_cells}")
    zero, one = Fraction(0), Fraction(1)
    T = []
    for i in range(m):
        T.append(list(st.A[i]) + [zero] * n_a + [st.b[i]])
    for t, i in enumerate(st.art_rows):
        T[i][n_x + n_s + t] = one
    basis = list(st.unit_col)
    iters = 0

    if n_a:
        obj = [zero] * (N + 1)
        for i in st.art_rows:
            for j in range(n_x + n_s):
                obj[j] -= T[i][j]
            obj[N] -= T[i][N]
        T.append(obj)
        status, it = _simplex_exact(T, basis, [True] * N, max_iter)
        iters += it
        if status == kernels.ITERATION_LIMIT:
            raise RuntimeError("simplex iteration limit reached in phase 1")
        if T[m][N] != 0:
            return LPSolution(INFEASIBLE, iterations=iters)
        T.pop()
        keep = []
        for i in range(m):
            if basis[i] >= n_x + n_s:
                j = next((j for j in range(n_x + n_s) if T[i][j] != 0), -1)
                if j >= 0:
                    _pivot_exact(T, basis, i, j)
                    keep.append(i)
            else:
                keep.append(i)
        T = [T[i] for i in keep]
        basis = [basis[i] for i in keep]

    m = len(T)
    cost = list(st.c_min) + [zero] * (n_s + n_a)
    obj = list(cost) + [zero]
    for i in range(m):
        cb = cost[basis[i]]
        if cb:
            row = T[i]
            for j in range(N + 1):
                if row[j]:
                    obj[j] -= cb * row[j]
    T.append(obj)
    allowed = [True] * (n_x + n_s) + [False] * n_a
    status, it = _simplex_exact(T, basis, allowed, max_iter)
    iters += it
    if status == kernels.ITERATION_LIMIT:
        raise RuntimeError("simplex iteration limit reached in phase 2")
    if status == kernels.UNBOUNDED:
        return LPSolution(UNBOUNDED, iterations=iters)
    x_std = [zero] * N
    for i in range(m):
        x_std[basis[i]] = T[i][N]
    # a dropped row's artificial is zero in every kept row, so its dual reads 0
    pi = [-T[m][st.unit_col[i]] for i in range(len(st.A))]
    x, value, du, dv = _recover(p, st, x_std[:n_x], pi, _to_fraction)
    return LPSolution(OPTIMAL, value, x, du, dv, iters)


# ---------------------------------------------------------------------------


def solve_lp(p: LPProblem, mode: str = "float", *, max_iter: int = MAX_ITER,
             exact_max_cells: int = EXACT_MAX_CELLS) -> LPSolution:
    """Solve ``p`` in ``"float"`` or ``"exact"`` arithmetic.

    Raises :class:`LPError` on an unknown mode or when the exact tableau
    would exceed ``exact_max_cells`` entries.
    """
    if mode == "float":
        return _solve_float(p, max_iter)
    if mode == "exact":
        return _solve_exact(p, max_iter, exact_max_cells)
    raise LPError(f"unknown mode {mode!r}")


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        v = float(v)
    return repr(float(v))


def _linear(coeffs, names) -> str:
    terms = []
    for a, name in zip(coeffs, names):
        if a == 0:
            continue
        s = _fmt(a)
        if s.startswith("-"):
            terms.append(f"- {s[1:]} {name}")
        else:
            terms.append(f"+ {s} {name}")
    if not terms:
        return "0 " + names[0] if names else "0"
    out = " ".join(terms)
    return out[2:] if out.startswith("+ ") else out


def write_lp_text(p: LPProblem, names: Sequence[str] | None = None) -> str:
    """Render ``p`` in CPLEX LP text format for external cross-checking."""
    names = list(names) if names is not None else [f"x{j + 1}" for j in range(p.num_vars)]
    lines = ["\\ generated by unionbound", "Maximize" if p.sense == MAXIMIZE else "Minimize",
             " obj: " + _linear(p.objective, names), "Subject To"]
    for i, (coeffs, b) in enumerate(p.eq_rows):
        lines.append(f" e{i + 1}: {_linear(coeffs, names)} = {_fmt(b)}")
    for i, (coeffs, h) in enumerate(p.ge_rows):
        lines.append(f" g{i + 1}: {_linear(coeffs, names)} >= {_fmt(h)}")
    lines.append("Bounds")
    lower = p.var_lower_bounds if p.var_lower_bounds is not None else [0] * p.num_vars
    for name, lb in zip(names, lower):
        lines.append(f" {name} >= {_fmt(lb)}")
    lines.append("End")
    return "\n".join(lines) + "\n"
