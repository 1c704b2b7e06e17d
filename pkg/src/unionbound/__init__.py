"""Bounds on the probability of a union of events from single and pairwise data.

The sharp bounds come from the full atom LP; cheaper relaxations aggregate
the atoms (binomial moments, per-event levels, per-pair levels) and are
tightened by valid rows derived from nonnegative quadratic pseudo-Boolean
functions.
"""

__version__ = "0.1.0"

from .aggregation import bm_bounds, ipg_bounds, pg_bounds, u1_contains
from .bench import StatsRow, emit_report, run_benchmark
from .hailperin import BoundResult, atom_certificate, hailperin_bounds
from .kernels import BACKEND
from .lp import FloatTableau, LPProblem, LPSolution, solve_lp
from .model import (AtomVector, Instance, YVector, aggregate, generate_atoms, generate_instance,
                    instance_from_atoms, preimage_feasible, validate_instance)
from .qpbf import QPBF, LiteralSet, gen_binomial_qpbf, gen_g2_g3, qpbf_eval, qpbf_min, qpbf_to_row
from .yat import qpb_minus_bounds, qpb_minus_run, separate_g4, u2_member_oracle, yat_bounds

__all__ = [
    "AtomVector", "BACKEND", "BoundResult", "FloatTableau", "Instance", "LPProblem", "LPSolution",
    "LiteralSet", "QPBF", "StatsRow", "YVector", "aggregate", "atom_certificate", "bm_bounds",
    "emit_report", "gen_binomial_qpbf", "gen_g2_g3", "generate_atoms", "generate_instance",
    "hailperin_bounds", "instance_from_atoms", "ipg_bounds", "pg_bounds", "preimage_feasible",
    "qpb_minus_bounds", "qpb_minus_run", "qpbf_eval", "qpbf_min", "qpbf_to_row", "run_benchmark",
    "separate_g4", "solve_lp", "u1_contains", "u2_member_oracle", "validate_instance", "yat_bounds",
]
