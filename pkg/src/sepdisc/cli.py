"""Command-line interface.

Subcommands: ``decide`` (verdict report on a state file), ``construct``
(emit state files for the shipped families), ``sweep`` (tetrahedron grid to
CSV), ``verify`` (property suites).  Exit codes for decide: 0
distinguishable, 1 indistinguishable, 2 undecided, 3 input error.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import config
from .constructions import (
    FamilyParams,
    SubspaceFamily,
    TetraPoint,
    basis_for_targets,
    basis_from_unitary,
    concurrence_triple_of_unitary,
    family_sep_not_locc,
    in_tetrahedron,
    indistinguishable_subspace,
    locc_basis_sch2,
    subspace_spec_from_pair,
    tetra_unitary,
    verify_subspace_properties,
)
from .discrimination import DiscriminationInstance, VerdictStatus, decide
from .errors import SepdiscError, StateFileError
from .states import magic_basis, orthonormal_completion
from .statefile import (
    parse_statefile,
    serialize_statefile,
    verdict_report,
    warn,
)
from .verify import SUITES

EXIT_BY_STATUS = {
    VerdictStatus.DISTINGUISHABLE: 0,
    VerdictStatus.INDISTINGUISHABLE: 1,
    VerdictStatus.UNDECIDED: 2,
}
EXIT_INPUT_ERROR = 3


class Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which collides with the
    # "undecided" exit code; input problems always exit 3
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser() -> Parser:
    parser = Parser(prog="sepdisc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    p_decide = sub.add_parser("decide", help="decide distinguishability of a state file")
    p_decide.add_argument("file", help="state file path, or - for stdin")
    p_decide.add_argument("--max-iterations", type=int, default=None, help="feasibility solver cap")

    p_construct = sub.add_parser("construct", help="emit a state file for a shipped construction")
    csub = p_construct.add_subparsers(dest="what", required=True, parser_class=Parser)
    p_fam = csub.add_parser("family", help="three-state family from angles alpha beta gamma")
    p_fam.add_argument("alpha", type=float)
    p_fam.add_argument("beta", type=float)
    p_fam.add_argument("gamma", type=float)
    p_tgt = csub.add_parser("targets", help="basis with prescribed concurrences c1 c2 c3")
    p_tgt.add_argument("c1", type=float)
    p_tgt.add_argument("c2", type=float)
    p_tgt.add_argument("c3", type=float)
    p_tet = csub.add_parser("tetra", help="basis achieving a tetrahedron point x1 x2 x3")
    p_tet.add_argument("x1", type=float)
    p_tet.add_argument("x2", type=float)
    p_tet.add_argument("x3", type=float)
    p_sub = csub.add_parser("subspace", help="orthocomplement basis of an indistinguishable subspace")
    p_sub.add_argument("kind", choices=["dim7", "dim6"])
    p_locc = csub.add_parser("locc-basis", help="LOCC-distinguishable basis of {phi}^perp")
    p_locc.add_argument("file", help="state file carrying phi (or a single state)")

    p_sweep = sub.add_parser("sweep", help="tetrahedron grid sweep to CSV")
    p_sweep.add_argument("--step", type=float, default=0.05)
    p_sweep.add_argument("--output", required=True, help="CSV output path")

    p_verify = sub.add_parser("verify", help="run verification suites")
    p_verify.add_argument("suite", choices=sorted(SUITES) + ["all"])
    p_verify.add_argument("--seed", type=int, default=42)
    p_verify.add_argument("--bases", type=int, default=None, help="sample count for the agreement experiment")
    return parser


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def cmd_decide(args, tol) -> int:
    try:
        text = _read_text(args.file)
        data = parse_statefile(text)
    except (OSError, StateFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    for w in data.warnings:
        warn(w)
    try:
        instance = DiscriminationInstance.from_pure(
            data.space,
            [st for _, st in data.states],
            data.phi[1] if data.phi else None,
        )
        verdict = decide(instance, tol, max_iterations=args.max_iterations)
    except SepdiscError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    diagnostics = dict(verdict.diagnostics)
    # codimension-2 instances: attach the structural subspace report
    if not data.phi and len(data.states) == data.space.dim - 2:
        comp = orthonormal_completion([st for _, st in data.states])
        spec = subspace_spec_from_pair(comp[0], comp[1])
        report = verify_subspace_properties(spec)
        diagnostics["subspace_properties"] = {
            "unique_product_vector": report.p0.passed,
            "entangled_members_need_three_products": report.p1.passed,
            "difference_combinations_need_three_products": report.p2.passed,
        }
        verdict = type(verdict)(
            status=verdict.status,
            theorem=verdict.theorem,
            certificate=verdict.certificate,
            reason=verdict.reason,
            locc_flag=verdict.locc_flag,
            diagnostics=diagnostics,
        )
    print(verdict_report(verdict, text, [name for name, _ in data.states]))
    return EXIT_BY_STATUS[verdict.status]


def cmd_construct(args, tol) -> int:
    try:
        if args.what == "family":
            phi, basis = family_sep_not_locc(FamilyParams(args.alpha, args.beta, args.gamma))
            names = [f"psi{k+1}" for k in range(3)]
            print(serialize_statefile(phi.space, list(zip(names, basis)), ("phi", phi)))
        elif args.what == "targets":
            phi, basis = basis_for_targets(args.c1, args.c2, args.c3)
            names = [f"psi{k+1}" for k in range(3)]
            print(serialize_statefile(phi.space, list(zip(names, basis)), ("phi", phi)))
        elif args.what == "tetra":
            u = tetra_unitary(TetraPoint(args.x1, args.x2, args.x3), tol)
            basis = basis_from_unitary(u, tol=tol)
            phi = magic_basis()[3]
            names = [f"psi{k+1}" for k in range(3)]
            print(serialize_statefile(phi.space, list(zip(names, basis)), ("phi", phi)))
        elif args.what == "subspace":
            kind = SubspaceFamily.BIPARTITE_3X3_DIM7 if args.kind == "dim7" else SubspaceFamily.TRIPARTITE_222_DIM6
            spec = indistinguishable_subspace(kind)
            names = [f"psi{k+1}" for k in range(len(spec.complement))]
            print(serialize_statefile(spec.space, list(zip(names, spec.complement))))
        elif args.what == "locc-basis":
            text = _read_text(args.file)
            data = parse_statefile(text)
            if data.phi is not None:
                phi = data.phi[1]
            elif len(data.states) == 1:
                phi = data.states[0][1]
            else:
                raise StateFileError("locc-basis needs a phi entry or a single state")
            basis = locc_basis_sch2(phi, tol)
            names = [f"psi{k+1}" for k in range(len(basis))]
            print(serialize_statefile(phi.space, list(zip(names, basis)), ("phi", phi)))
        else:  # pragma: no cover
            return EXIT_INPUT_ERROR
    except (OSError, SepdiscError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return 0


def cmd_sweep(args, tol) -> int:
    if not 0.0 < args.step <= 0.25:
        print("error: step must be in (0, 0.25]", file=sys.stderr)
        return EXIT_INPUT_ERROR
    from .discrimination import decide_max_ent_basis

    ticks = np.arange(0.0, 1.0 + args.step / 2, args.step)
    rows = []
    for x1 in ticks:
        for x2 in ticks:
            for x3 in ticks:
                x = np.array([x1, x2, x3])
                if not in_tetrahedron(x, slack=1e-9):
                    continue
                u = tetra_unitary(TetraPoint(float(x1), float(x2), float(x3)), tol)
                achieved = concurrence_triple_of_unitary(u)
                verdict = decide_max_ent_basis(basis_from_unitary(u, tol=tol), tol)
                rows.append(
                    [
                        f"{x1:.6f}",
                        f"{x2:.6f}",
                        f"{x3:.6f}",
                        f"{achieved[0]:.12f}",
                        f"{achieved[1]:.12f}",
                        f"{achieved[2]:.12f}",
                        f"{float(np.max(np.abs(achieved - x))):.3e}",
                        verdict.status.value,
                    ]
                )
    try:
        with open(args.output, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["x1", "x2", "x3", "achieved1", "achieved2", "achieved3", "max_error", "decide_status"]
            )
            writer.writerows(rows)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    print(f"wrote {len(rows)} rows to {args.output}")
    return 0


def cmd_verify(args, tol) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    results = []
    for name in names:
        if name == "theorem2" and args.bases:
            from .verify import suite_theorem2

            results.extend(suite_theorem2(seed=args.seed, tol=tol, n_bases=args.bases))
        else:
            results.extend(SUITES[name](seed=args.seed, tol=tol))
    failures = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        extra = f"  {r.detail}" if r.detail else ""
        print(f"[{mark}] {r.name}: count={r.count} worst={r.worst:.3e}{extra}")
        failures += int(not r.passed)
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 0 if failures == 0 else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    tol = config.from_env()
    if args.command == "decide":
        return cmd_decide(args, tol)
    if args.command == "construct":
        return cmd_construct(args, tol)
    if args.command == "sweep":
        return cmd_sweep(args, tol)
    if args.command == "verify":
        return cmd_verify(args, tol)
    return EXIT_INPUT_ERROR  # pragma: no cover


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
