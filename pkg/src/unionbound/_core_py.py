"""Numpy fallback for the compiled kernels in ``_core.pyx``.

Same signatures, same return conventions, same tie-breaking.
"""

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
ITERATION_LIMIT = 2
INFEASIBLE = 3
BLAND = 0
DANTZIG = 1
DEGENERATE_LIMIT = 50

_CHUNK_BITS = 16


def pivot(T, basis, r, c):
    """Pivot the tableau in place on entry (r, c)."""
    T[r] /= T[r, c]
    T[r, c] = 1.0
    col = T[:, c].copy()
    col[r] = 0.0
    nz = np.flatnonzero(col)
    if nz.size:
        T[nz] -= np.outer(col[nz], T[r])
        T[nz, c] = 0.0
    basis[r] = c


def run_simplex(T, basis, allowed, max_iter, opt_tol, piv_tol, feas_tol, rule):
    m = T.shape[0] - 1
    allowed = np.asarray(allowed, dtype=bool)
    bland = rule == BLAND
    degenerate = 0
    it = 0
    while True:
        d = T[m, :-1]
        cand = np.flatnonzero(allowed & (d < -opt_tol))
        if cand.size == 0:
            return OPTIMAL, it
        if it >= max_iter:
            return ITERATION_LIMIT, it
        # argmin returns the first index on ties, as the compiled scan does
        c = cand[0] if bland else cand[np.argmin(d[cand])]
        col = T[:m, c]
        rows = np.flatnonzero(col > piv_tol)
        if rows.size == 0:
            return UNBOUNDED, it
        a = col[rows]
        rhs = np.maximum(T[rows, -1], 0.0)
        theta = ((rhs + feas_tol) / a).min()
        ok = rhs / a <= theta
        amax = a[ok].max()
        r = rows[ok][np.argmax(a[ok])]
        if bland:
            good = ok & (a >= 0.01 * amax)
            r = rows[good][np.argmin(basis[rows[good]])]
        if T[r, -1] / T[r, c] <= 1e-12:
            degenerate += 1
        else:
            degenerate = 0
            bland = rule == BLAND
        if degenerate > DEGENERATE_LIMIT:
            bland = True
        pivot(T, basis, r, c)
        rhs = T[:m, -1]
        rhs[(rhs < 0.0) & (rhs > -feas_tol)] = 0.0
        it += 1


def run_dual_simplex(T, basis, allowed, max_iter, opt_tol, piv_tol, feas_tol):
    m = T.shape[0] - 1
    allowed = np.asarray(allowed, dtype=bool)
    it = 0
    while True:
        rhs = T[:m, -1]
        r = int(np.argmin(rhs)) if m else 0
        if m == 0 or rhs[r] >= -feas_tol:
            return OPTIMAL, it
        if it >= max_iter:
            return ITERATION_LIMIT, it
        row = T[r, :-1]
        cols = np.flatnonzero(allowed & (row < -piv_tol))
        if cols.size == 0:
            return INFEASIBLE, it
        a = -row[cols]
        d = np.maximum(T[m, cols], 0.0)
        theta = ((d + opt_tol) / a).min()
        ok = d / a <= theta
        c = cols[ok][np.argmax(a[ok])]
        pivot(T, basis, r, c)
        obj = T[m, :-1]
        obj[(obj < 0.0) & (obj > -opt_tol)] = 0.0
        it += 1


def qpbf_min(a0, a1, a2):
    a1 = np.asarray(a1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    n = a1.shape[0]
    upper = np.triu(a2, 1)
    scale = abs(a0) + np.abs(a1).sum() + np.abs(upper).sum()
    tie = 1e-12 * (1.0 + scale)
    best, best_mask = float(a0), 0
    total = 1 << n
    chunk = min(total, 1 << _CHUNK_BITS)
    shifts = np.arange(n, dtype=np.int64)
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        Z = ((masks[:, None] >> shifts) & 1).astype(float)
        vals = a0 + Z @ a1 + np.einsum("pi,ij,pj->p", Z, upper, Z)
        i = int(np.argmin(vals))
        v = float(vals[i])
        if v < best - tie:
            best = v
            best_mask = int(masks[i])
            # lowest mask within the tie band of the new best
            near = np.flatnonzero(vals <= best + tie)
            best_mask = int(masks[near[0]])
            best = min(best, float(vals[near].min()))
        elif v <= best + tie:
            near = np.flatnonzero(vals <= best + tie)
            cand = int(masks[near[0]])
            if cand < best_mask:
                best_mask = cand
            best = min(best, v)
    return best, best_mask
