"""Seeded batch experiments and relative-error reports.

For every ``n`` the harness draws ``count`` consistent instances, takes the
sharp bounds of the full atom model as the reference ``opt``, and scores
each model side by ``100 * |bound - opt| / opt``.  Cells with ``opt = 0``
are skipped and counted.  The standard deviation is the population one.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .aggregation import bm_bounds, ipg_bounds, pg_bounds
from .hailperin import MAX_HAILPERIN_N, BoundResult, hailperin_bounds
from .model import Instance, generate_instance
from .yat import DEFAULT_MAX_ROUNDS, DEFAULT_W_SIZE, qpb_minus_run, yat_bounds

log = logging.getLogger(__name__)

MODELS = ("hailperin", "bm", "pg", "ipg", "yat", "qpbm")
SIDES = ("lb", "ub")
DEFAULT_ZERO_FRAC = 0.3


@dataclass(frozen=True)
class StatsRow:
    n: int
    model: str
    bound_side: str
    mean: float
    std: float
    max: float
    instances: int
    skipped: int = 0


@dataclass
class InstanceRecord:
    n: int
    index: int
    seed: int
    results: dict = field(default_factory=dict)    # model -> BoundResult
    cuts: list = field(default_factory=list)       # accepted cuts of the qpbm run


def parse_models(models) -> list:
    """``"bm,pg"`` or an iterable of tags -> validated list, order kept."""
    tags = [t.strip() for t in models.split(",")] if isinstance(models, str) else list(models)
    tags = [t for t in tags if t]
    unknown = [t for t in tags if t not in MODELS]
    if unknown:
        raise ValueError(f"unknown model tag(s): {', '.join(unknown)}; choose from {', '.join(MODELS)}")
    return tags


def instance_seed(seed: int, n: int, j: int) -> int:
    return int(np.random.SeedSequence([seed, n, j]).generate_state(1)[0])


def solve_models(inst: Instance, models, mode: str = "float",
                 max_rounds: int = DEFAULT_MAX_ROUNDS, batch: int = 1, w_size: int = DEFAULT_W_SIZE):
    """Run each model on ``inst``.  Returns ``(results, qpbm_run_or_None)``.

    ``yat`` and ``qpbm`` are cutting-plane models and always run in float.
    """
    out, run = {}, None
    for tag in models:
        if tag == "hailperin":
            out[tag] = hailperin_bounds(inst, mode)
        elif tag == "bm":
            out[tag] = bm_bounds(inst, mode)
        elif tag == "pg":
            out[tag] = pg_bounds(inst, mode)
        elif tag == "ipg":
            out[tag] = ipg_bounds(inst, mode)
        elif tag == "yat":
            out[tag] = yat_bounds(inst)
        elif tag == "qpbm":
            run = qpb_minus_run(inst, max_rounds, batch, w_size)
            out[tag] = run.result
        else:
            raise ValueError(f"unknown model tag {tag!r}")
    return out, run


def run_records(n_list, count: int, seed: int, models, zero_frac: float = DEFAULT_ZERO_FRAC,
                mode: str = "float", max_rounds: int = DEFAULT_MAX_ROUNDS, batch: int = 1,
                w_size: int = DEFAULT_W_SIZE) -> list:
    models = parse_models(models)
    if count < 0:
        raise ValueError("count must be nonnegative")
    for n in n_list:
        if not 2 <= n <= MAX_HAILPERIN_N:
            raise ValueError(f"n={n} outside the reference model range 2..{MAX_HAILPERIN_N}")
    need = list(models) if "hailperin" in models else ["hailperin"] + list(models)
    records = []
    for n in n_list:
        for j in range(count):
            s = instance_seed(seed, n, j)
            inst = generate_instance(n, s, zero_frac)
            results, run = solve_models(inst, need, mode, max_rounds, batch, w_size)
            records.append(InstanceRecord(n, j, s, results, run.cuts if run else []))
    return records


def _error(bound, opt) -> float:
    return 100.0 * abs(float(bound) - float(opt)) / float(opt)


def summarize(records, models) -> list:
    """StatsRow per (n, model, side), in n order then model order."""
    models = parse_models(models)
    rows = []
    for n in sorted({r.n for r in records}):
        group = [r for r in records if r.n == n]
        for tag in models:
            for side in SIDES:
                errs, skipped = [], 0
                for r in group:
                    ref, res = r.results["hailperin"], r.results[tag]
                    opt = getattr(ref, side) if ref.ok else None
                    if opt is None or float(opt) == 0.0 or not res.ok:
                        skipped += 1
                        continue
                    errs.append(_error(getattr(res, side), opt))
                if skipped:
                    log.info("n=%d %s %s: %d instance(s) skipped", n, tag, side, skipped)
                if errs:
                    a = np.array(errs)
                    rows.append(StatsRow(n, tag, side, float(a.mean()), float(a.std()),
                                         float(a.max()), len(errs), skipped))
                else:
                    rows.append(StatsRow(n, tag, side, math.nan, math.nan, math.nan, 0, skipped))
    return rows


def run_benchmark(n_list, count: int, seed: int, models, zero_frac: float = DEFAULT_ZERO_FRAC,
                  mode: str = "float", max_rounds: int = DEFAULT_MAX_ROUNDS, batch: int = 1,
                  w_size: int = DEFAULT_W_SIZE) -> list:
    """Seeded batch -> list of :class:`StatsRow`.  ``count=0`` gives an empty table."""
    if count == 0:
        parse_models(models)
        return []
    records = run_records(n_list, count, seed, models, zero_frac, mode, max_rounds, batch, w_size)
    return summarize(records, models)


def strictly_improved(records, better: str, worse: str, side: str = "ub", tol: float = 1e-7) -> int:
    """Instances where ``better`` is tighter than ``worse`` on ``side`` by more than ``tol``."""
    count = 0
    for r in records:
        a, b = r.results[better], r.results[worse]
        if not (a.ok and b.ok):
            continue
        gap = float(b.ub) - float(a.ub) if side == "ub" else float(a.lb) - float(b.lb)
        count += gap > tol
    return count


def _cell(v: float) -> str:
    return "nan" if math.isnan(v) else f"{v:.2f}"


def emit_report(table, fmt: str = "csv") -> str:
    """Render rows as ``n | model | side | mean | std | max`` with 2 decimals."""
    header = ["n", "model", "side", "mean", "std", "max"]
    body = [[str(r.n), r.model, r.bound_side, _cell(r.mean), _cell(r.std), _cell(r.max)] for r in table]
    notes = [f"n={r.n} {r.model} {r.bound_side}: {r.skipped} instance(s) skipped (opt = 0 or no bound)"
             for r in table if r.skipped]
    if fmt == "csv":
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(body)
        text = out.getvalue()
        return text + "".join(f"# {line}\n" for line in notes)
    if fmt == "markdown":
        lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
        lines += ["| " + " | ".join(row) + " |" for row in body]
        if notes:
            lines.append("")
            lines += [f"* {line}" for line in notes]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


__all__ = ["StatsRow", "InstanceRecord", "MODELS", "parse_models", "instance_seed", "solve_models",
           "run_records", "summarize", "run_benchmark", "strictly_improved", "emit_report"]
