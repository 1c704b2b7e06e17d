"""Quadratic pseudo-Boolean functions and the valid inequalities they induce.

A QPBF ``f(Z) = a0 + sum_i a1_i Z_i + sum_{i<j} a2_ij Z_i Z_j`` on
``{0,1}^n`` is kept in multilinear normal form, so two functions are equal
exactly when their coefficients are.  Evaluated on a level-k E2 vector,
the same coefficients give the linear form
``a0 y^k_∅ + sum a1_i y^k_i + sum a2_ij y^k_ij``; :func:`qpbf_to_row`
rewrites it in pair coordinates only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, lcm
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .model import pairs

MAX_MIN_N = 24
_EXACT_CHUNK_BITS = 16


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _clean(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


@dataclass(frozen=True)
class QPBF:
    n: int
    a0: object = 0
    a1: tuple = ()
    a2: Mapping = field(default_factory=dict)

    def __post_init__(self):
        a1 = tuple(_clean(v) for v in self.a1) if self.a1 else (0,) * self.n
        if len(a1) != self.n:
            raise ValueError(f"expected {self.n} linear coefficients, got {len(a1)}")
        a2 = {}
        for (i, j), v in self.a2.items():
            if i == j or not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"bad quadratic index ({i}, {j})")
            key = (i, j) if i < j else (j, i)
            a2[key] = a2.get(key, 0) + v
        object.__setattr__(self, "a0", _clean(self.a0))
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", {k: _clean(v) for k, v in sorted(a2.items()) if v != 0})

    # -- construction -------------------------------------------------------

    @classmethod
    def constant(cls, n: int, c) -> "QPBF":
        return cls(n, c)

    @classmethod
    def literal(cls, n: int, i: int, positive: bool = True) -> "QPBF":
        """``Z_i`` or ``1 - Z_i``."""
        a1 = [0] * n
        a1[i] = 1 if positive else -1
        return cls(n, 0 if positive else 1, tuple(a1))

    @classmethod
    def product(cls, n: int, lits: Sequence) -> "QPBF":
        """Product of at most two literals given as ``(index, positive)``."""
        f = cls.constant(n, 1)
        for i, pos in lits:
            f = f * cls.literal(n, i, pos)
        return f

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "QPBF"):
        if other.n != self.n:
            raise ValueError("QPBF dimension mismatch")

    def __add__(self, other):
        if not isinstance(other, QPBF):
            return QPBF(self.n, self.a0 + other, self.a1, self.a2)
        self._check(other)
        a2 = dict(self.a2)
        for k, v in other.a2.items():
            a2[k] = a2.get(k, 0) + v
        return QPBF(self.n, self.a0 + other.a0,
                    tuple(a + b for a, b in zip(self.a1, other.a1)), a2)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other if isinstance(other, QPBF) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QPBF":
        return QPBF(self.n, c * self.a0, tuple(c * v for v in self.a1),
                    {k: c * v for k, v in self.a2.items()})

    def __mul__(self, other):
        if not isinstance(other, QPBF):
            return self.scale(other)
        self._check(other)
        if self.a2 and (other.a2 or any(other.a1)) or other.a2 and any(self.a1):
            raise ValueError("product would exceed degree two")
        n = self.n
        a0 = self.a0 * other.a0
        a1 = [self.a0 * b + other.a0 * a for a, b in zip(self.a1, other.a1)]
        a2 = {k: self.a0 * v for k, v in other.a2.items()}
        for k, v in self.a2.items():
            a2[k] = a2.get(k, 0) + other.a0 * v
        for i in range(n):
            if not self.a1[i]:
                continue
            for j in range(n):
                c = self.a1[i] * other.a1[j]
                if not c:
                    continue
                if i == j:
                    a1[i] += c  # Z_i^2 = Z_i
                else:
                    key = (min(i, j), max(i, j))
                    a2[key] = a2.get(key, 0) + c
        return QPBF(n, a0, tuple(a1), a2)

    __rmul__ = __mul__

    # -- inspection ---------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(v) for v in (self.a0, *self.a1, *self.a2.values()))

    def arrays(self):
        """``(a0, a1, A2)`` as floats with ``A2`` symmetric, zero diagonal."""
        A2 = np.zeros((self.n, self.n))
        for (i, j), v in self.a2.items():
            A2[i, j] = A2[j, i] = float(v)
        return float(self.a0), np.array([float(v) for v in self.a1]), A2

    def __call__(self, z) -> object:
        return qpbf_eval(self, z)

    def to_text(self) -> str:
        """``a0 | i:a1_i ... | i,j:a2_ij ...`` with 1-based indices."""
        lin = " ".join(f"{i + 1}:{_fmt(v)}" for i, v in enumerate(self.a1) if v != 0)
        quad = " ".join(f"{i + 1},{j + 1}:{_fmt(v)}" for (i, j), v in self.a2.items())
        return f"{_fmt(self.a0)} | {lin} | {quad}".replace("  ", " ").strip()

    @classmethod
    def from_text(cls, n: int, text: str) -> "QPBF":
        parts = [p.strip() for p in text.split("|")]
        if len(parts) != 3:
            raise ValueError(f"expected three '|'-separated fields in {text!r}")
        a0 = _parse_num(parts[0])
        a1 = [0] * n
        for tok in parts[1].split():
            i, v = tok.split(":")
            a1[int(i) - 1] = _parse_num(v)
        a2 = {}
        for tok in parts[2].split():
            ij, v = tok.split(":")
            i, j = (int(t) - 1 for t in ij.split(","))
            a2[(i, j)] = _parse_num(v)
        return cls(n, a0, tuple(a1), a2)


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return repr(v)


def _parse_num(tok: str):
    if "/" in tok:
        return _clean(Fraction(tok))
    try:
        return int(tok)
    except ValueError:
        return float(tok)


def _bits(z, n: int) -> tuple:
    if isinstance(z, int):
        return tuple(z >> i & 1 for i in range(n))
    bits = tuple(int(b) for b in z)
    if len(bits) != n:
        raise ValueError(f"point has {len(bits)} coordinates, function has {n}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("Boolean point entries must be 0 or 1")
    return bits


def chi(n: int, S: Iterable[int]) -> tuple:
    """Characteristic vector of ``S`` as a Boolean point."""
    S = set(S)
    return tuple(1 if i in S else 0 for i in range(n))


def qpbf_eval(f: QPBF, z) -> object:
    """Value of ``f`` at a Boolean point (bit tuple or bitmask)."""
    bits = _bits(z, f.n)
    val = f.a0
    for i, b in enumerate(bits):
        if b:
            val = val + f.a1[i]
    for (i, j), v in f.a2.items():
        if bits[i] and bits[j]:
            val = val + v
    return val


def _exact_min(f: QPBF):
    coeffs = [f.a0, *f.a1, *f.a2.values()]
    den = lcm(*(Fraction(c).denominator for c in coeffs)) if coeffs else 1
    a0 = int(f.a0 * den)
    a1 = np.array([int(v * den) for v in f.a1], dtype=object)
    bound = abs(a0) + sum(abs(int(v)) for v in a1) + sum(abs(int(v * den)) for v in f.a2.values())
    dtype = np.int64 if bound < 2**62 else object
    a1 = a1.astype(dtype)
    A2 = np.zeros((f.n, f.n), dtype=dtype)
    for (i, j), v in f.a2.items():
        A2[i, j] = int(v * den)
    n = f.n
    total = 1 << n
    chunk = min(total, 1 << _EXACT_CHUNK_BITS)
    shifts = np.arange(n, dtype=np.int64)
    best, best_mask = None, 0
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        Z = ((masks[:, None] >> shifts) & 1).astype(dtype)
        vals = a0 + Z @ a1 + ((Z @ A2) * Z).sum(axis=1) if n else np.full(len(masks), a0, dtype=dtype)
        i = int(np.argmin(vals))  # first occurrence = lowest mask in the chunk
        if best is None or vals[i] < best:
            best, best_mask = vals[i], int(masks[i])
    return _clean(Fraction(int(best), den)), best_mask


def qpbf_min(f: QPBF):
    """Exact minimum over all ``2^n`` points and its lowest-bitmask minimiser.

    Rational coefficients are minimised in exact integer arithmetic; float
    coefficients go through the compiled Gray-code kernel.
    """
    if f.n > MAX_MIN_N:
        raise ValueError(f"brute-force minimisation limited to n <= {MAX_MIN_N}")
    if f.is_exact:
        value, mask = _exact_min(f)
    else:
        a0, a1, A2 = f.arrays()
        value, mask = kernels.qpbf_min(a0, np.ascontiguousarray(a1), np.ascontiguousarray(A2))
    return value, _bits(int(mask), f.n)


def qpbf_is_nonneg(f: QPBF, tol: float = 1e-12) -> bool:
    value, _ = qpbf_min(f)
    return value >= 0 if f.is_exact else value >= -tol


def k_square(n: int, k: int) -> QPBF:
    """``(k - sum_i Z_i)^2`` reduced with ``Z_i^2 = Z_i``."""
    lin = QPBF(n, k, tuple([-1] * n))
    return lin * lin


def qpbf_to_row(f: QPBF, k: int, n: int | None = None) -> dict:
    """Pair-coordinate coefficients of ``L_f(y^k)`` after eliminating y^k_∅, y^k_i.

    ``coeff(Q={i,j}) = a0/C(k,2) + (a1_i + a1_j)/(k-1) + a2_ij``.
    """
    n = f.n if n is None else n
    if n != f.n:
        raise ValueError("dimension mismatch")
    if not 2 <= k <= n:
        raise ValueError(f"level {k} outside 2..{n}")
    exact = f.is_exact
    c0 = Fraction(f.a0, comb(k, 2)) if exact else f.a0 / comb(k, 2)
    row = {}
    for i, j in pairs(n):
        lin = f.a1[i] + f.a1[j]
        lin = Fraction(lin, k - 1) if exact else lin / (k - 1)
        row[(i, j)] = _clean(c0 + lin + f.a2.get((i, j), 0))
    return row


def canonicalize_nonneg(f: QPBF, k: int) -> QPBF:
    """Shift ``f`` by a multiple of ``(k - sum Z)^2`` until it is nonnegative.

    The level-k pair row is unchanged, because that square maps to the zero
    row at level k.  The shift leaves the values on points with exactly k
    ones alone, so the result is nonnegative precisely when ``f`` is
    nonnegative there, i.e. when its level-k row is a valid inequality.
    """
    if not 2 <= k <= f.n:
        raise ValueError(f"level {k} outside 2..{f.n}")
    gamma, _ = qpbf_min(f)
    if gamma >= 0:
        return f
    return f - k_square(f.n, k).scale(gamma)


# ---------------------------------------------------------------------------
# generator families


@dataclass(frozen=True)
class Generator:
    """A catalog function together with a readable label."""

    label: str
    f: QPBF


def catalog_g2_g3(n: int) -> list:
    """The six extremal patterns used by the degree-2/3 model, all index choices.

    Unary ``Z_i``; per pair ``Z_iZ_j``, ``Z_i(1-Z_j)``, ``(1-Z_i)Z_j``,
    ``(1-Z_i)(1-Z_j)``; per triple the sum ``Z_iZ_jZ_l + (1-Z_i)(1-Z_j)(1-Z_l)``
    and, for each pivot ``i``, ``Z_i(1-Z_j)(1-Z_l) + (1-Z_i)Z_jZ_l``.  The
    cubic ones are entered through their quadratic expansions.
    """
    out = []
    for i in range(n):
        out.append(Generator(f"Z{i + 1}", QPBF.literal(n, i)))
    for i, j in combinations(range(n), 2):
        a, b = i + 1, j + 1
        out.append(Generator(f"Z{a}Z{b}", QPBF.product(n, [(i, True), (j, True)])))
        out.append(Generator(f"Z{a}(1-Z{b})", QPBF.product(n, [(i, True), (j, False)])))
        out.append(Generator(f"(1-Z{a})Z{b}", QPBF.product(n, [(i, False), (j, True)])))
        out.append(Generator(f"(1-Z{a})(1-Z{b})", QPBF.product(n, [(i, False), (j, False)])))
    for i, j, l in combinations(range(n), 3):
        a1 = [0] * n
        a1[i] = a1[j] = a1[l] = -1
        out.append(Generator(f"T0[{i + 1},{j + 1},{l + 1}]",
                             QPBF(n, 1, tuple(a1), {(i, j): 1, (i, l): 1, (j, l): 1})))
        for p, (q, r) in ((i, (j, l)), (j, (i, l)), (l, (i, j))):
            a1 = [0] * n
            a1[p] = 1
            out.append(Generator(f"T{p + 1}[{i + 1},{j + 1},{l + 1}]",
                                 QPBF(n, 0, tuple(a1), {(p, q): -1, (p, r): -1, (q, r): 1})))
    return out


def gen_g2_g3(n: int) -> list:
    return [g.f for g in catalog_g2_g3(n)]


@dataclass(frozen=True)
class LiteralSet:
    """Literals ``Z_i`` (positive) or ``1 - Z_i`` (negative), one per index."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(sorted((int(i), bool(pos)) for i, pos in self.entries))
        idx = [i for i, _ in entries]
        if len(set(idx)) != len(idx):
            raise ValueError("a literal set may use each index at most once")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_mask(cls, indices: Sequence[int], negative_mask: int) -> "LiteralSet":
        """Bit ``t`` of ``negative_mask`` makes the t-th index a ``1 - Z`` literal."""
        return cls(tuple((i, not (negative_mask >> t & 1)) for t, i in enumerate(indices)))

    def __len__(self):
        return len(self.entries)

    def linear(self, n: int) -> QPBF:
        f = QPBF.constant(n, 0)
        for i, pos in self.entries:
            f = f + QPBF.literal(n, i, pos)
        return f


def gen_binomial_qpbf(w: LiteralSet, gamma: int, n: int | None = None) -> QPBF:
    """``C(sum_{w in W} w - gamma, 2)`` expanded to multilinear quadratic form."""
    if n is None:
        n = max(i for i, _ in w.entries) + 1
    if len(w) < 4:
        raise ValueError("binomial generators need at least four literals")
    if not 1 <= gamma <= len(w) - 2:
        raise ValueError(f"gamma must lie in 1..{len(w) - 2}")
    if any(i >= n for i, _ in w.entries):
        raise ValueError("literal index exceeds n")
    t = w.linear(n) - gamma
    return (t * t - t).scale(Fraction(1, 2))


# ---------------------------------------------------------------------------
# dense row matrices used by the models


@dataclass(frozen=True)
class CoefficientBlock:
    """Stacked QPBF coefficients: ``A0`` (F,), ``A1`` (F, n), ``A2`` (F, P)."""

    A0: np.ndarray
    A1: np.ndarray
    A2: np.ndarray

    @classmethod
    def from_functions(cls, n: int, fs: Sequence[QPBF]) -> "CoefficientBlock":
        P = pairs(n)
        A0 = np.array([float(f.a0) for f in fs])
        A1 = np.array([[float(v) for v in f.a1] for f in fs]).reshape(len(fs), n)
        A2 = np.array([[float(f.a2.get(Q, 0)) for Q in P] for f in fs]).reshape(len(fs), len(P))
        return cls(A0, A1, A2)

    def rows(self, k: int) -> np.ndarray:
        """Pair-coordinate rows at level k for every stacked function."""
        n = self.A1.shape[1]
        I, J = np.array(pairs(n), dtype=np.int64).reshape(-1, 2).T
        return (self.A0[:, None] / comb(k, 2)
                + (self.A1[:, I] + self.A1[:, J]) / (k - 1)
                + self.A2)


@lru_cache(maxsize=32)
def catalog_block(n: int) -> CoefficientBlock:
    return CoefficientBlock.from_functions(n, gen_g2_g3(n))
