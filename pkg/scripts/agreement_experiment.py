#!/usr/bin/env python3
"""Decider-versus-solver agreement experiment with margin statistics.

Samples random orthonormal bases of {phi}^perp on two qubits (half Haar
mixed, half locally rotated members of the distinguishable family), runs the
analytic decider and the relaxed feasibility solver on each, and prints the
agreement rate plus the distribution of infeasibility margins.

    python scripts/agreement_experiment.py --bases 1000 --seed 42
"""

import argparse
import sys
import time

import numpy as np

from sepdisc.config import DEFAULT
from sepdisc.discrimination import VerdictStatus, decide_2x2_basis
from sepdisc.sampling import random_basis_of_complement, random_entangled_2x2, random_unitary
from sepdisc.separability import FeasibilityProblem, feasibility_solve
from sepdisc.states import PureState, QUBIT_PAIR
from sepdisc.verify import _random_family_pair


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--bases", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    tol = DEFAULT
    t0 = time.time()
    feasible_residuals = []
    infeasible_margins = []
    disagreements = 0
    for i in range(args.bases):
        if i % 2 == 0:
            phi = random_entangled_2x2(rng, 0.05)
            basis = random_basis_of_complement(rng, phi)
        else:
            phi, basis, _ = _random_family_pair(rng)
            u = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
            phi = PureState(QUBIT_PAIR, u @ phi.amplitudes)
            basis = [PureState(QUBIT_PAIR, u @ s.amplitudes) for s in basis]
        verdict = decide_2x2_basis(phi, basis, tol)
        outcome = feasibility_solve(
            FeasibilityProblem(
                space=QUBIT_PAIR,
                projectors=[s.density() for s in basis],
                p0=phi.density(),
                tol=tol,
            )
        )
        if verdict.status is VerdictStatus.DISTINGUISHABLE:
            feasible_residuals.append(outcome.residual)
            if not (outcome.feasible and outcome.residual < tol.feasibility):
                disagreements += 1
        else:
            infeasible_margins.append(outcome.residual)
            if outcome.feasible or outcome.residual <= tol.stall_margin:
                disagreements += 1

    elapsed = time.time() - t0
    feas = np.array(feasible_residuals)
    infeas = np.array(infeasible_margins)
    print(f"bases: {args.bases}  disagreements: {disagreements}  time: {elapsed:.1f}s")
    if feas.size:
        print(f"feasible side ({feas.size}): max residual {feas.max():.3e}")
    if infeas.size:
        print(
            f"infeasible side ({infeas.size}): min margin {infeas.min():.3e}  "
            f"p1 {np.percentile(infeas, 1):.3e}  median {np.median(infeas):.3e}"
        )
    return 0 if disagreements == 0 else 1


if __name__ == "__main__":
    sys.exit(run())
