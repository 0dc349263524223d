"""Central tolerance record.

Every decider, oracle and solver in the package compares against the same
epsilon story, collected here.  Instances are immutable; pass a modified
copy (``dataclasses.replace``) to tighten or loosen individual knobs.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # rank / product detection, relative to the largest singular value
    rank: float = 1e-9
    # PSD slack for eigenvalue checks
    psd: float = 1e-9
    # orthonormality of bases and eigenvector columns
    ortho: float = 1e-10
    # allowed Hermiticity defect before an input is rejected
    hermiticity: float = 1e-8
    # angular tolerance for the anti-parallel eigenvalue test (radians)
    angular: float = 1e-8
    # concurrence-sum identity in the three-state deciders
    concurrence_sum: float = 1e-8
    # state matching up to a global phase (generic)
    phase: float = 1e-9
    # state matching in the unique-entangled-member decider
    match_phase: float = 1e-8
    # feasibility solver: success threshold on the max constraint violation
    feasibility: float = 1e-7
    # feasibility solver: stall detection window and minimum improvement
    stall_window: int = 500
    stall_improvement: float = 1e-12
    max_iterations: int = 20000
    # residual above which a stalled run is reported as an empirical
    # infeasibility margin
    stall_margin: float = 1e-4


DEFAULT = Tolerances()

ENV_TOL = "SEPDISC_TOL"


def from_env(base: Tolerances = DEFAULT) -> Tolerances:
    """Return ``base`` with the rank/PSD tolerance overridden by $SEPDISC_TOL.

    The override is off by default; it only applies when the variable is set
    to a parseable positive float.
    """
    raw = os.environ.get(ENV_TOL)
    if raw is None:
        return base
    try:
        value = float(raw)
    except ValueError:
        return base
    if value <= 0:
        return base
    return dataclasses.replace(base, rank=value, psd=value)
