"""Problem data, atom vectors and the aggregation maps E0, E1, E2.

Indices are 0-based internally; the JSON instance format is 1-based.
Subsets of ``V = {0..n-1}`` are bitmasks with element ``i`` at bit ``i``,
so atoms enumerate in binary-counter order.  Unordered pairs are the
tuples ``(i, j)`` with ``i < j``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .lp import LPProblem, solve_lp

E0, E1, E2 = "E0", "E1", "E2"
FAMILIES = (E0, E1, E2)

MAX_GENERATE_N = 24
MAX_PREIMAGE_N = 16
EXACT_PREIMAGE_N = 10


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def members(mask: int) -> tuple:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def to_mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def pairs(n: int) -> list:
    return list(combinations(range(n), 2))


def level_masks(n: int, k: int) -> list:
    """All k-subsets of V as bitmasks, in increasing bitmask order."""
    return sorted(to_mask(c) for c in combinations(range(n), k))


@dataclass(frozen=True)
class Instance:
    """Single-event probabilities ``p1[i]`` and pairwise ``p2[(i, j)]``."""

    n: int
    p1: tuple
    p2: Mapping

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if len(self.p1) != self.n:
            raise ValueError(f"expected {self.n} single-event probabilities, got {len(self.p1)}")
        expected = set(pairs(self.n))
        if set(self.p2) != expected:
            missing = sorted(expected - set(self.p2))
            extra = sorted(set(self.p2) - expected)
            raise ValueError(f"pair probabilities incomplete: missing={missing} extra={extra}")
        for v in list(self.p1) + list(self.p2.values()):
            if not 0 <= v <= 1:
                raise ValueError(f"probability {v} outside [0, 1]")
        object.__setattr__(self, "p1", tuple(self.p1))
        object.__setattr__(self, "p2", dict(sorted(self.p2.items())))

    @classmethod
    def symmetric(cls, n: int, p, q) -> "Instance":
        return cls(n, (p,) * n, {pr: q for pr in pairs(n)})

    def pair(self, i: int, j: int):
        return self.p2[(i, j) if i < j else (j, i)]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p1": [float(v) for v in self.p1],
            "p2": [{"i": i + 1, "j": j + 1, "p": float(v)} for (i, j), v in self.p2.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Instance":
        try:
            n = int(data["n"])
            p1 = tuple(float(v) for v in data["p1"])
            p2 = {}
            for entry in data["p2"]:
                i, j = int(entry["i"]) - 1, int(entry["j"]) - 1
                if not (0 <= i < n and 0 <= j < n) or i == j:
                    raise ValueError(f"bad pair index ({i + 1}, {j + 1})")
                key = (min(i, j), max(i, j))
                if key in p2:
                    raise ValueError(f"duplicate pair {key[0] + 1},{key[1] + 1}")
                p2[key] = float(entry["p"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed instance JSON: {exc}") from exc
        return cls(n, p1, p2)

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def loads(cls, text: str) -> "Instance":
        return cls.from_json(json.loads(text))


@dataclass(frozen=True)
class AtomVector:
    """Nonnegative masses on nonempty subsets, keyed by bitmask."""

    n: int
    mass: Mapping = field(default_factory=dict)

    def __post_init__(self):
        top = 1 << self.n
        for S, v in self.mass.items():
            if not 0 < S < top:
                raise ValueError(f"atom {S} is not a nonempty subset of {self.n} events")
            if v < 0:
                raise ValueError(f"negative mass {v} on atom {S}")
        object.__setattr__(self, "mass", {S: v for S, v in sorted(self.mass.items()) if v != 0})

    @property
    def total(self):
        return sum(self.mass.values(), 0)

    def dumps(self) -> str:
        """Debug format: one ``bitmask value`` line per atom."""
        return "".join(f"{S} {v}\n" for S, v in self.mass.items())

    @classmethod
    def loads(cls, n: int, text: str) -> "AtomVector":
        mass = {}
        for line in text.splitlines():
            if line.strip():
                S, v = line.split()
                mass[int(S)] = Fraction(v) if "/" in v else float(v)
        return cls(n, mass)


@dataclass(frozen=True)
class YVector:
    """Aggregated values keyed by ``(k, Q)`` with ``Q`` a sorted index tuple.

    E0 uses ``Q = ()``, E1 uses ``Q = (i,)``, E2 uses every ``Q`` of size at
    most two with ``|Q| <= k``.
    """

    n: int
    family: str
    values: Mapping

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown aggregation family {self.family!r}")

    def __getitem__(self, key):
        return self.values.get(key, 0)

    def levels(self) -> list:
        return sorted({k for k, _ in self.values})

    def pair_level(self, k: int) -> np.ndarray:
        """E2 values ``y^k_Q`` over the pairs, in :func:`pairs` order."""
        return np.array([float(self[(k, Q)]) for Q in pairs(self.n)])


@dataclass(frozen=True)
class Violation:
    rule: str
    witness: tuple
    amount: float


@dataclass(frozen=True)
class Diagnostics:
    consistent: bool
    violations: tuple = ()


def validate_instance(inst: Instance, tol: float = 0.0) -> Diagnostics:
    """Screen the instance against necessary consistency conditions.

    Passing the screen does not mean a probability space exists; that is
    decided by the exact model in :mod:`unionbound.hailperin`.
    """
    # compare differences so exact data stays exact against a float tolerance
    found = []
    for i, p in enumerate(inst.p1):
        if p - 1 > tol:
            found.append(Violation("p_i<=1", (i,), float(p - 1)))
        if -p > tol:
            found.append(Violation("p_i>=0", (i,), float(-p)))
    for (i, j), q in inst.p2.items():
        if -q > tol:
            found.append(Violation("p_ij>=0", (i, j), float(-q)))
        for a in (i, j):
            if q - inst.p1[a] > tol:
                found.append(Violation("p_ij<=p_i", (i, j, a), float(q - inst.p1[a])))
        excess = inst.p1[i] + inst.p1[j] - q - 1
        if excess > tol:
            found.append(Violation("p_i+p_j-p_ij<=1", (i, j), float(excess)))
    return Diagnostics(not found, tuple(found))


def instance_from_atoms(x: AtomVector) -> Instance:
    n = x.n
    zero = Fraction(0) if any(isinstance(v, Fraction) for v in x.mass.values()) else 0.0
    p1 = [zero] * n
    p2 = {pr: zero for pr in pairs(n)}
    for S, v in x.mass.items():
        idx = members(S)
        for i in idx:
            p1[i] += v
        for pr in combinations(idx, 2):
            p2[pr] += v
    return Instance(n, tuple(p1), p2)


def generate_atoms(n: int, seed: int, zero_atom_fraction: float = 0.0,
                   empty_mass=None) -> AtomVector:
    """Random sub-probability on the nonempty atoms, with exact rational masses.

    Integer weights are drawn uniformly on ``[1, 2**20]``, a seeded
    ``zero_atom_fraction`` of the atoms is forced to zero, and the whole
    vector is scaled so the nonempty atoms carry ``1 - empty_mass``; the
    remaining mass sits on the empty atom.  ``empty_mass=None`` draws it
    uniformly from ``[0, 1)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > MAX_GENERATE_N:
        raise ValueError(f"n={n} exceeds the atom enumeration guard ({MAX_GENERATE_N})")
    if not 0 <= zero_atom_fraction < 1:
        raise ValueError("zero_atom_fraction must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    size = (1 << n) - 1
    weights = rng.integers(1, 2**20, size=size, endpoint=True)
    n_zero = int(math.floor(zero_atom_fraction * size))
    if n_zero:
        weights[rng.choice(size, size=n_zero, replace=False)] = 0
    e = rng.random() if empty_mass is None else empty_mass
    e = Fraction(e).limit_denominator(2**20) if not isinstance(e, Fraction) else e
    if not 0 <= e <= 1:
        raise ValueError("empty_mass must lie in [0, 1]")
    total = int(weights.sum())
    if total == 0:
        return AtomVector(n, {})
    scale = (1 - e) / total
    return AtomVector(n, {S + 1: int(w) * scale for S, w in enumerate(weights) if w})


def generate_instance(n: int, seed: int, zero_atom_fraction: float = 0.0,
                      empty_mass=None) -> Instance:
    """Probability-consistent random instance, deterministic in its arguments."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return instance_from_atoms(generate_atoms(n, seed, zero_atom_fraction, empty_mass))


def aggregate(x: AtomVector, family: str) -> YVector:
    """Image of ``x`` under the aggregation map of ``family``."""
    if family not in FAMILIES:
        raise ValueError(f"unknown aggregation family {family!r}")
    n = x.n
    zero = Fraction(0) if any(isinstance(v, Fraction) for v in x.mass.values()) else 0.0
    vals = {}
    if family == E0:
        for k in range(1, n + 1):
            vals[(k, ())] = zero
    elif family == E1:
        for k in range(1, n + 1):
            for i in range(n):
                vals[(k, (i,))] = zero
    else:
        for k in range(1, n + 1):
            vals[(k, ())] = zero
            for i in range(n):
                vals[(k, (i,))] = zero
            if k >= 2:
                for pr in pairs(n):
                    vals[(k, pr)] = zero
    for S, v in x.mass.items():
        idx = members(S)
        k = len(idx)
        if family == E0:
            vals[(k, ())] += v
            continue
        for i in idx:
            vals[(k, (i,))] += v
        if family == E2:
            vals[(k, ())] += v
            for pr in combinations(idx, 2):
                vals[(k, pr)] += v
    return YVector(n, family, vals)


def e2_from_pairs(n: int, level_pairs: Mapping, level1: Iterable | None = None) -> YVector:
    """Build an E2 vector from ``{k: pair values}`` by filling the redundant entries.

    ``y^k_i = sum_{Q ∋ i} y^k_Q / (k-1)`` and ``y^k_∅ = sum_Q y^k_Q / C(k,2)``.
    """
    P = pairs(n)
    vals = {}
    if level1 is not None:
        l1 = list(level1)
        for i in range(n):
            vals[(1, (i,))] = l1[i]
        vals[(1, ())] = sum(l1, 0)
    for k, row in level_pairs.items():
        row = list(row)
        exact = all(isinstance(v, (int, Fraction)) for v in row)
        div = (lambda a, b: Fraction(a) / b) if exact else (lambda a, b: a / b)
        for Q, v in zip(P, row):
            vals[(k, Q)] = v
        for i in range(n):
            vals[(k, (i,))] = div(sum((v for Q, v in zip(P, row) if i in Q), 0), k - 1)
        vals[(k, ())] = div(sum(row, 0), math.comb(k, 2))
    return YVector(n, E2, vals)


def preimage_feasible(y: YVector, k: int, n: int | None = None, mode: str | None = None) -> bool:
    """Whether some ``x >= 0`` on the k-subsets aggregates to ``y`` at level k.

    Solved exactly for ``n <= 10`` and in floating point otherwise, unless
    ``mode`` overrides.
    """
    n = y.n if n is None else n
    if n != y.n:
        raise ValueError("dimension mismatch between y and n")
    if n > MAX_PREIMAGE_N:
        raise ValueError(f"preimage LP limited to n <= {MAX_PREIMAGE_N}")
    if not 1 <= k <= n:
        raise ValueError(f"level {k} out of range")
    if mode is None:
        mode = "exact" if n <= EXACT_PREIMAGE_N else "float"
    atoms = level_masks(n, k)
    rows = []
    for (lvl, Q), v in y.values.items():
        if lvl != k:
            continue
        qmask = to_mask(Q)
        rows.append(([1 if (S & qmask) == qmask else 0 for S in atoms], v))
    if not rows:
        return True
    sol = solve_lp(LPProblem(len(atoms), [0] * len(atoms), "maximize", rows), mode)
    return sol.optimal
