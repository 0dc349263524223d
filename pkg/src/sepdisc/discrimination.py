"""Deciders for perfect discrimination by separable operations.

The dispatcher :func:`decide` routes an instance to the sharpest applicable
analytic decider (full product-basis criterion, the concurrence-sum decider
on 2x2, its embedded multipartite reduction, the unique-entangled-member
decider) and falls back to the PSD+PPT feasibility solver.  Distinguishable
verdicts carry a POVM certificate whose validity is re-checkable
independently of the decider that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import CountMismatch, InvalidInstance, NotMaxEnt, PhiProduct, WrongForm
from .linalg import hermitian_eig, maxabs, partial_transpose
from .separability import (
    FeasibilityProblem,
    ProductDecomposition,
    PptRecord,
    SepStatus,
    antiparallel_test,
    feasibility_solve,
    ppt_oracle,
    rank2_separability,
)
from .states import (
    PureState,
    StateSpace,
    concurrence,
    orthonormal_completion,
)
from .tensor_rank import (
    ProductVector,
    Schmidt2Kind,
    cut_rank,
    entry_distance,
    schmidt2_classify,
    try_factor,
)


class VerdictStatus(Enum):
    DISTINGUISHABLE = "distinguishable"
    INDISTINGUISHABLE = "indistinguishable"
    UNDECIDED = "undecided"


class LoccFlag(Enum):
    LOCC_INDISTINGUISHABLE = "locc_indistinguishable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Reason:
    code: str
    message: str
    data: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PovmCertificate:
    """POVM elements with per-element separability evidence."""

    elements: tuple[np.ndarray, ...]
    evidence: tuple[object, ...]  # ProductDecomposition | PptRecord per element
    lambdas: tuple[float, ...] | None = None


@dataclass(frozen=True)
class Verdict:
    status: VerdictStatus
    theorem: str | None = None
    certificate: PovmCertificate | None = None
    reason: Reason | None = None
    locc_flag: LoccFlag = LoccFlag.UNKNOWN
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DiscriminationInstance:
    """Orthogonal pure states (or support projectors) to be discriminated,
    with an optional declared residual state phi when they span {phi}^perp."""

    space: StateSpace
    states: tuple[PureState, ...] = ()
    projectors: tuple[np.ndarray, ...] = ()
    phi: PureState | None = None

    @classmethod
    def from_pure(cls, space: StateSpace, states, phi: PureState | None = None, tol: Tolerances = DEFAULT):
        states = tuple(states)
        if not states:
            raise InvalidInstance("need at least one state")
        gram = np.array([[a.inner(b) for b in states] for a in states])
        if maxabs(gram - np.eye(len(states))) > 1e-9:
            raise InvalidInstance("states must be orthonormal within 1e-9")
        if phi is not None:
            if len(states) != space.dim - 1:
                raise InvalidInstance("a declared phi requires exactly D-1 states")
            overlaps = [abs(phi.inner(s)) for s in states]
            if max(overlaps) > 1e-9:
                raise InvalidInstance("declared phi must be orthogonal to every state")
        return cls(space=space, states=states, phi=phi)

    @classmethod
    def from_projectors(cls, space: StateSpace, projectors, tol: Tolerances = DEFAULT):
        projectors = tuple(np.asarray(p, dtype=complex) for p in projectors)
        for p in projectors:
            w = hermitian_eig(p, tol).values
            if np.any((w > 1e-8) & (np.abs(w - 1.0) > 1e-8)) or w[0] < -1e-8:
                raise InvalidInstance("inputs must be projectors")
        for i, p in enumerate(projectors):
            for q in projectors[i + 1 :]:
                if maxabs(p @ q) > 1e-9:
                    raise InvalidInstance("projector supports must be orthogonal")
        return cls(space=space, projectors=projectors)

    @property
    def n(self) -> int:
        return len(self.states) if self.states else len(self.projectors)

    def projector_list(self) -> list[np.ndarray]:
        if self.states:
            return [s.density() for s in self.states]
        return list(self.projectors)


def validate_certificate(cert: PovmCertificate, instance: DiscriminationInstance, tol: Tolerances = DEFAULT) -> dict:
    """Independent re-check of a certificate: completeness, correctness, PSD,
    and reassembly of the separability evidence."""
    d = instance.space.dim
    total = sum(cert.elements)
    completeness = maxabs(total - np.eye(d))
    psd_min = min(float(hermitian_eig(e, tol).values[0]) for e in cert.elements)
    rhos = instance.projector_list()
    correctness = 0.0
    for k, el in enumerate(cert.elements):
        for j, rho in enumerate(rhos):
            tr = float(np.real(np.trace(el @ rho)))
            correctness = max(correctness, abs(tr - (1.0 if k == j else 0.0)))
    evidence_resid = 0.0
    evidence_ok = True
    for el, ev in zip(cert.elements, cert.evidence):
        if isinstance(ev, ProductDecomposition):
            evidence_resid = max(evidence_resid, ev.residual(el))
        elif isinstance(ev, PptRecord):
            evidence_ok = evidence_ok and ev.exact
        else:
            evidence_ok = False
    lambdas_ok = True
    if cert.lambdas is not None:
        lam = np.asarray(cert.lambdas)
        lambdas_ok = bool(np.all(lam >= -1e-12) and abs(lam.sum() - 1.0) <= 1e-8)
    return {
        "completeness": completeness,
        "correctness": correctness,
        "psd_min": psd_min,
        "evidence_residual": evidence_resid,
        "evidence_exact": evidence_ok,
        "lambdas_ok": lambdas_ok,
        "valid": completeness <= 1e-8
        and correctness <= 1e-7
        and psd_min >= -1e-9
        and evidence_resid <= 1e-8
        and evidence_ok
        and lambdas_ok,
    }


def _locc_flag_2x2(space: StateSpace, n_entangled: int) -> LoccFlag:
    # cited sufficient condition: two or more entangled members of a 2x2
    # basis cannot be told apart by LOCC
    if space.dims == (2, 2) and n_entangled >= 2:
        return LoccFlag.LOCC_INDISTINGUISHABLE
    return LoccFlag.UNKNOWN


def decide_2x2_basis(phi: PureState, basis, tol: Tolerances = DEFAULT) -> Verdict:
    """Concurrence-sum decider for three orthonormal states against an
    entangled residual state on 2x2."""
    basis = list(basis)
    if phi.space.dims != (2, 2) or len(basis) != 3:
        raise InvalidInstance("expected three 2x2 states plus a residual state")
    c_phi = concurrence(phi)
    if c_phi <= tol.rank:
        raise PhiProduct("residual state is a product state; route through decide()")
    cs = [concurrence(s) for s in basis]
    entangled = [c > tol.rank for c in cs]
    flag = _locc_flag_2x2(phi.space, sum(entangled))
    theorem = "C2" if c_phi > 1.0 - 1e-8 else "T2"

    for k, (s, ent) in enumerate(zip(basis, entangled)):
        if not ent:
            continue
        res = antiparallel_test(s, phi, tol)
        if not res.passed:
            return Verdict(
                status=VerdictStatus.INDISTINGUISHABLE,
                theorem=theorem,
                reason=Reason(
                    "antiparallel_failed",
                    f"member {k} fails the anti-parallel eigenvalue condition",
                    {"member": k, "angle_defect": res.angle_defect},
                ),
                locc_flag=flag,
            )
    total = float(sum(cs))
    if abs(total - c_phi) > tol.concurrence_sum:
        return Verdict(
            status=VerdictStatus.INDISTINGUISHABLE,
            theorem=theorem,
            reason=Reason(
                "concurrence_sum",
                f"concurrence sum {total:.9f} != {c_phi:.9f}",
                {"sum": total, "c_phi": c_phi, "concurrences": cs},
            ),
            locc_flag=flag,
        )

    lambdas = tuple(c / c_phi for c in cs)
    p_phi = phi.density()
    elements = []
    evidence = []
    for s, lam in zip(basis, lambdas):
        r2 = rank2_separability(s, phi, lam, tol)
        if r2.verdict.status is not SepStatus.SEPARABLE:
            return Verdict(
                status=VerdictStatus.UNDECIDED,
                theorem=theorem,
                reason=Reason(
                    "internal_inconsistency",
                    "analytic conditions hold but the certificate element failed its separability check",
                    {"lambda": lam},
                ),
                locc_flag=flag,
            )
        elements.append(s.density() + lam * p_phi)
        evidence.append(r2.verdict.evidence)
    cert = PovmCertificate(tuple(elements), tuple(evidence), lambdas)
    return Verdict(
        status=VerdictStatus.DISTINGUISHABLE,
        theorem=theorem,
        certificate=cert,
        locc_flag=flag,
        diagnostics={"concurrences": cs, "c_phi": c_phi},
    )


def decide_max_ent_basis(basis, tol: Tolerances = DEFAULT) -> Verdict:
    """Concurrence-sum decider when the residual state is maximally
    entangled; the anti-parallel condition is automatic there."""
    basis = list(basis)
    if len(basis) != 3 or basis[0].space.dims != (2, 2):
        raise InvalidInstance("expected three orthonormal 2x2 states")
    phi = orthonormal_completion(basis)[0]
    if concurrence(phi) <= 1.0 - 1e-8:
        raise NotMaxEnt(
            f"residual state has concurrence {concurrence(phi):.9f}; use decide_2x2_basis"
        )
    return decide_2x2_basis(phi, basis, tol)


def _product_prefix_match(psi: PureState, prefix: dict[int, np.ndarray], core: tuple[int, ...], tol: Tolerances):
    """Factor psi as (prefix factors) x (state on core parties); None if its
    prefix factors are missing or differ from the given ones."""
    dims = psi.space.dims
    vec = psi.amplitudes
    from .tensor_rank import cut_matrix

    core_vec = vec
    core_dims = list(dims)
    positions = list(range(len(dims)))
    for party, factor in sorted(prefix.items()):
        i = positions.index(party)
        m = cut_matrix(core_vec, tuple(core_dims), (i,))
        u, s, vh = np.linalg.svd(m, full_matrices=False)
        if s.size > 1 and s[1] > tol.rank * s[0]:
            return None
        if abs(np.vdot(u[:, 0], factor)) < 1.0 - 1e-9:
            return None
        phase = np.vdot(factor, u[:, 0])
        core_vec = s[0] * vh[0, :] * phase
        del positions[i]
        del core_dims[i]
    core_vec = core_vec / np.linalg.norm(core_vec)
    return PureState(StateSpace(tuple(core_dims)), core_vec)


def decide_multipartite_sch2(phi: PureState, basis, tol: Tolerances = DEFAULT) -> Verdict:
    """Decider when the residual state is a product prefix times a bipartite
    entangled pair: every entangled member must share the prefix and embed in
    the pair's 2x2 Schmidt subspace, where the concurrence-sum conditions
    apply."""
    basis = list(basis)
    dims = phi.space.dims
    k = phi.space.nparties
    if len(basis) != phi.space.dim - 1:
        raise InvalidInstance("expected a full basis of the orthocomplement")

    ranks = [cut_rank(phi.amplitudes, dims, (p,), tol) for p in range(k)]
    core = tuple(p for p in range(k) if ranks[p] == 2)
    if len(core) != 2 or any(r > 2 for r in ranks):
        raise WrongForm("residual state is not a product prefix times a bipartite entangled pair")

    prefix: dict[int, np.ndarray] = {}
    from .tensor_rank import cut_matrix

    vec = phi.amplitudes
    core_dims = list(dims)
    positions = list(range(k))
    for party in [p for p in range(k) if ranks[p] == 1]:
        i = positions.index(party)
        m = cut_matrix(vec, tuple(core_dims), (i,))
        u, s, vh = np.linalg.svd(m, full_matrices=False)
        prefix[party] = u[:, 0]
        vec = s[0] * vh[0, :]
        vec = vec / np.linalg.norm(vec)
        del positions[i]
        del core_dims[i]
    phi_core = PureState(StateSpace(tuple(core_dims)), vec)

    info_m = cut_matrix(phi_core.amplitudes, phi_core.space.dims, (0,))
    u, s, vh = np.linalg.svd(info_m, full_matrices=False)
    left = u[:, :2]
    right = vh[:2, :].T

    def embed(core_state: PureState) -> PureState | None:
        amp = cut_matrix(core_state.amplitudes, core_state.space.dims, (0,))
        coeff = left.conj().T @ amp @ right.conj()
        if abs(np.linalg.norm(coeff) - 1.0) > 1e-8:
            return None
        return PureState.normalized(StateSpace((2, 2)), coeff.reshape(4))

    phi_emb = embed(phi_core)
    embedded = []
    lambdas = []
    c_phi = concurrence(phi_emb)
    cs_sum = 0.0
    for j, psi in enumerate(basis):
        if try_factor(psi.amplitudes, dims) is not None:
            lambdas.append(0.0)
            continue
        core_state = _product_prefix_match(psi, prefix, core, tol)
        if core_state is None:
            return Verdict(
                status=VerdictStatus.INDISTINGUISHABLE,
                theorem="T4",
                reason=Reason(
                    "prefix_mismatch",
                    f"entangled member {j} does not carry the residual state's product prefix",
                    {"member": j},
                ),
            )
        emb = embed(core_state)
        if emb is None:
            return Verdict(
                status=VerdictStatus.INDISTINGUISHABLE,
                theorem="T4",
                reason=Reason(
                    "embedding_failed",
                    f"entangled member {j} leaves the 2x2 subspace spanned by the residual pair",
                    {"member": j},
                ),
            )
        res = antiparallel_test(emb, phi_emb, tol)
        if not res.passed:
            return Verdict(
                status=VerdictStatus.INDISTINGUISHABLE,
                theorem="T4",
                reason=Reason(
                    "antiparallel_failed",
                    f"embedded member {j} fails the anti-parallel eigenvalue condition",
                    {"member": j, "angle_defect": res.angle_defect},
                ),
            )
        c = concurrence(emb)
        cs_sum += c
        embedded.append((j, emb, c))
        lambdas.append(None)  # filled below

    if abs(cs_sum - c_phi) > tol.concurrence_sum:
        return Verdict(
            status=VerdictStatus.INDISTINGUISHABLE,
            theorem="T4",
            reason=Reason(
                "concurrence_sum",
                f"embedded concurrence sum {cs_sum:.9f} != {c_phi:.9f}",
                {"sum": cs_sum, "c_phi": c_phi},
            ),
        )

    lam_map = {j: c / c_phi for j, _, c in embedded}
    lambdas = [lam_map.get(j, 0.0) for j in range(len(basis))]
    p_phi = phi.density()
    elements = []
    evidence = []
    for j, (psi, lam) in enumerate(zip(basis, lambdas)):
        r2 = rank2_separability(psi, phi, lam, tol)
        if r2.verdict.status is not SepStatus.SEPARABLE:
            return Verdict(
                status=VerdictStatus.UNDECIDED,
                theorem="T4",
                reason=Reason("internal_inconsistency", "certificate element failed its separability check", {"member": j}),
            )
        elements.append(psi.density() + lam * p_phi)
        evidence.append(r2.verdict.evidence)
    cert = PovmCertificate(tuple(elements), tuple(evidence), tuple(lambdas))
    return Verdict(status=VerdictStatus.DISTINGUISHABLE, theorem="T4", certificate=cert)


def decide_h3(phi: PureState, basis, tol: Tolerances = DEFAULT) -> Verdict:
    """Decider when the residual state splits into two orthogonal product
    vectors differing in three or more parties: the basis must contain the
    unique complementary entangled state and otherwise products."""
    basis = list(basis)
    cls = schmidt2_classify(phi, tol)
    if cls.kind is not Schmidt2Kind.SCHMIDT2 or not cls.decomposition.orthogonal:
        raise WrongForm("residual state is not an orthogonal two-term product superposition")
    dec = cls.decomposition
    if entry_distance(dec.a, dec.b, tol) < 3:
        raise WrongForm("product terms differ in fewer than three parties")

    a_vec = dec.a.assemble()
    b_vec = dec.b.assemble()
    cos_t = np.linalg.norm(a_vec)
    sin_t = np.linalg.norm(b_vec)
    candidate = sin_t * (a_vec / cos_t) - cos_t * (b_vec / sin_t)

    ent_indices = [j for j, s in enumerate(basis) if try_factor(s.amplitudes, phi.space.dims) is None]
    if len(ent_indices) != 1:
        return Verdict(
            status=VerdictStatus.INDISTINGUISHABLE,
            theorem="T5",
            reason=Reason(
                "entangled_count",
                f"basis has {len(ent_indices)} entangled members; exactly one is required",
                {"count": len(ent_indices)},
            ),
        )
    j = ent_indices[0]
    match = abs(np.vdot(candidate, basis[j].amplitudes))
    if match < 1.0 - tol.match_phase:
        return Verdict(
            status=VerdictStatus.INDISTINGUISHABLE,
            theorem="T5",
            reason=Reason(
                "wrong_entangled_member",
                "the entangled member is not the complementary superposition of the residual pair",
                {"overlap": float(match)},
            ),
        )

    lambdas = tuple(1.0 if i == j else 0.0 for i in range(len(basis)))
    p_phi = phi.density()
    elements = []
    evidence = []
    for i, (s, lam) in enumerate(zip(basis, lambdas)):
        r2 = rank2_separability(s, phi, lam, tol)
        if r2.verdict.status is not SepStatus.SEPARABLE:
            return Verdict(
                status=VerdictStatus.UNDECIDED,
                theorem="T5",
                reason=Reason("internal_inconsistency", "certificate element failed its separability check", {"member": i}),
            )
        elements.append(s.density() + lam * p_phi)
        evidence.append(r2.verdict.evidence)
    cert = PovmCertificate(tuple(elements), tuple(evidence), lambdas)
    return Verdict(status=VerdictStatus.DISTINGUISHABLE, theorem="T5", certificate=cert)


class SubspaceKind(Enum):
    NO_DISTINGUISHABLE_BASIS = "no_distinguishable_basis"
    HAS_LOCC_BASIS = "has_locc_basis"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class SubspaceVerdict:
    kind: SubspaceKind
    basis: tuple[PureState, ...] | None = None
    classification: object = None


def subspace_verdict(phi: PureState, tol: Tolerances = DEFAULT) -> SubspaceVerdict:
    """Trichotomy for the orthocomplement of an entangled state: either no
    basis is distinguishable by separable operations, or an explicitly
    LOCC-distinguishable basis exists."""
    cls = schmidt2_classify(phi, tol)
    if cls.kind is Schmidt2Kind.PRODUCT:
        raise PhiProduct("subspace question requires an entangled state")
    if cls.kind is Schmidt2Kind.AT_LEAST_3:
        return SubspaceVerdict(kind=SubspaceKind.NO_DISTINGUISHABLE_BASIS, classification=cls)
    if cls.kind is Schmidt2Kind.SCHMIDT2 and cls.decomposition.orthogonal:
        from .constructions import locc_basis_sch2

        basis = tuple(locc_basis_sch2(phi, tol))
        return SubspaceVerdict(kind=SubspaceKind.HAS_LOCC_BASIS, basis=basis, classification=cls)
    return SubspaceVerdict(kind=SubspaceKind.UNDECIDED, classification=cls)


def try_product_decomposition(op: np.ndarray, space: StateSpace, tol: Tolerances = DEFAULT) -> ProductDecomposition | None:
    """Product decomposition of a PSD operator that is diagonal in some
    orthogonal product basis, found eigenspace by eigenspace; None when an
    eigenspace admits no orthonormal product basis this way."""
    eig = hermitian_eig(op, tol)
    scale = max(1.0, float(eig.values[-1]))
    weights: list[float] = []
    vectors: list[ProductVector] = []
    i = 0
    vals = eig.values
    while i < len(vals):
        j = i
        while j + 1 < len(vals) and abs(vals[j + 1] - vals[i]) <= 1e-8 * scale:
            j += 1
        lam = float(np.mean(vals[i : j + 1]))
        if lam > 1e-9 * scale:
            block = eig.vectors[:, i : j + 1]
            # project the standard basis into the eigenspace and pick product
            # directions greedily
            proj = block @ block.conj().T
            chosen: list[np.ndarray] = []
            resid = proj.copy()
            for _ in range(j - i + 1):
                norms = np.linalg.norm(resid, axis=0)
                order = np.argsort(-norms)
                found = None
                for idx in order:
                    if norms[idx] < 1e-9:
                        break
                    cand = resid[:, idx] / norms[idx]
                    pv = try_factor(cand, space.dims)
                    if pv is not None:
                        found = pv
                        break
                if found is None:
                    return None
                vec = found.assemble()
                vec = vec / np.linalg.norm(vec)
                chosen.append(vec)
                weights.append(lam)
                vectors.append(found)
                resid = resid - np.outer(vec, vec.conj() @ resid)
        i = j + 1
    dec = ProductDecomposition(tuple(weights), tuple(vectors))
    if dec.residual(op) > 1e-8:
        return None
    return dec


def _pure_projector_separability(state: PureState, tol: Tolerances):
    pv = try_factor(state.amplitudes, state.space.dims)
    if pv is not None:
        return ProductDecomposition((1.0,), (pv,))
    return None


def _decide_full_basis(instance: DiscriminationInstance, tol: Tolerances) -> Verdict:
    elements = []
    evidence = []
    for j, s in enumerate(instance.states):
        dec = _pure_projector_separability(s, tol)
        if dec is None:
            return Verdict(
                status=VerdictStatus.INDISTINGUISHABLE,
                theorem="T1",
                reason=Reason(
                    "entangled_member",
                    f"basis member {j} is entangled, so its projector cannot be separable",
                    {"member": j},
                ),
            )
        elements.append(s.density())
        evidence.append(dec)
    cert = PovmCertificate(tuple(elements), tuple(evidence), None)
    return Verdict(status=VerdictStatus.DISTINGUISHABLE, theorem="T1", certificate=cert)


def _decide_full_span_projectors(instance: DiscriminationInstance, tol: Tolerances) -> Verdict:
    """Full-span case for projector inputs: distinguishable iff every
    projector is separable."""
    elements = []
    evidence = []
    space = instance.space
    for j, p in enumerate(instance.projectors):
        eig = hermitian_eig(p, tol)
        rank = int(np.sum(eig.values > 0.5))
        if rank == 1:
            st = PureState.normalized(space, eig.vectors[:, -1])
            dec = _pure_projector_separability(st, tol)
            if dec is None:
                return Verdict(
                    status=VerdictStatus.INDISTINGUISHABLE,
                    theorem="T1",
                    reason=Reason("entangled_member", f"projector {j} is an entangled pure projector", {"member": j}),
                )
            elements.append(p)
            evidence.append(dec)
            continue
        if rank == 2:
            cols = eig.vectors[:, eig.values > 0.5]
            r2 = rank2_separability(
                PureState.normalized(space, cols[:, 0]),
                PureState.normalized(space, cols[:, 1]),
                1.0,
                tol,
            )
            if r2.verdict.status is SepStatus.SEPARABLE:
                elements.append(p)
                evidence.append(r2.verdict.evidence)
                continue
            return Verdict(
                status=VerdictStatus.INDISTINGUISHABLE,
                theorem="T1",
                reason=Reason("entangled_member", f"projector {j} is entangled", {"member": j}),
            )
        dec = try_product_decomposition(p, space, tol)
        if dec is not None:
            elements.append(p)
            evidence.append(dec)
            continue
        verdict = ppt_oracle(p, space, None, tol)
        if verdict.status is SepStatus.ENTANGLED:
            return Verdict(
                status=VerdictStatus.INDISTINGUISHABLE,
                theorem="T1",
                reason=Reason("entangled_member", f"projector {j} is entangled (negative partial transpose)", {"member": j}),
            )
        if verdict.status is SepStatus.SEPARABLE:
            elements.append(p)
            evidence.append(verdict.evidence)
            continue
        return Verdict(
            status=VerdictStatus.UNDECIDED,
            theorem="T1",
            reason=Reason("separability_unknown", f"projector {j} is PPT but not certified separable", {"member": j}),
        )
    cert = PovmCertificate(tuple(elements), tuple(evidence), None)
    return Verdict(status=VerdictStatus.DISTINGUISHABLE, theorem="T1", certificate=cert)


def _try_completability(instance: DiscriminationInstance, p0: np.ndarray, tol: Tolerances) -> Verdict | None:
    """Allocate the whole residual to a single element and check all the
    resulting elements for explicit product decompositions."""
    projectors = instance.projector_list()
    n = len(projectors)
    per_element: list[ProductDecomposition | None] = []
    for j, p in enumerate(projectors):
        dec = try_product_decomposition(p, instance.space, tol)
        per_element.append(dec)
    for k in range(n):
        if any(per_element[j] is None for j in range(n) if j != k):
            continue
        big = try_product_decomposition(projectors[k] + p0, instance.space, tol)
        if big is None:
            continue
        elements = []
        evidence = []
        lambdas = []
        for j, p in enumerate(projectors):
            if j == k:
                elements.append(p + p0)
                evidence.append(big)
                lambdas.append(1.0)
            else:
                elements.append(p)
                evidence.append(per_element[j])
                lambdas.append(0.0)
        cert = PovmCertificate(tuple(elements), tuple(evidence), tuple(lambdas))
        return Verdict(
            status=VerdictStatus.DISTINGUISHABLE,
            theorem="T1",
            certificate=cert,
            diagnostics={"path": "completability", "residual_assigned_to": k},
        )
    return None


def feasibility_point_residual(
    e_ops, projectors, p0: np.ndarray, space: StateSpace, tol: Tolerances = DEFAULT
) -> float:
    """Largest constraint violation of a candidate point of the relaxed
    problem (PSD blocks, PPT per cut, affine sum)."""
    from .linalg import min_eigenvalues
    from .tensor_rank import proper_cuts as _cuts

    e = np.stack([np.asarray(x, dtype=complex) for x in e_ops])
    p = np.stack(projectors)
    res = float(np.linalg.norm(e.sum(axis=0) - p0))
    res = max(res, float(max(0.0, -min_eigenvalues(e).min())))
    for cut in _cuts(space.nparties):
        pt = partial_transpose(p + e, space.dims, cut)
        res = max(res, float(max(0.0, -min_eigenvalues(pt).min())))
    return res


def _decide_feasibility(instance: DiscriminationInstance, tol: Tolerances, max_iterations: int | None = None) -> Verdict:
    projectors = instance.projector_list()
    d = instance.space.dim
    p0 = np.eye(d, dtype=complex) - sum(projectors)
    p0 = (p0 + p0.conj().T) / 2.0

    fast = _try_completability(instance, p0, tol)
    if fast is not None:
        # the analytic allocation doubles as an explicit feasible point of
        # the relaxation; verify it directly instead of iterating
        e_ops = [el - pk for el, pk in zip(fast.certificate.elements, projectors)]
        point_res = feasibility_point_residual(e_ops, projectors, p0, instance.space, tol)
        return Verdict(
            status=fast.status,
            theorem=fast.theorem,
            certificate=fast.certificate,
            diagnostics={**fast.diagnostics, "feasibility": {"residual": point_res, "verified_point": True}},
        )

    problem = FeasibilityProblem(
        space=instance.space,
        projectors=projectors,
        p0=p0,
        tol=tol,
        max_iterations=max_iterations,
    )
    outcome = feasibility_solve(problem)
    diag = {
        "residual": outcome.residual,
        "best_residual": outcome.best_residual,
        "iterations": outcome.iterations,
        "stalled": outcome.stalled,
        **outcome.diagnostics,
    }

    if outcome.feasible:
        elements = tuple(p + e for p, e in zip(projectors, outcome.e_ops))
        dims2 = instance.space.dims
        exact = instance.space.nparties == 2 and dims2 in {(2, 2), (2, 3), (3, 2)}
        if exact:
            evidence = tuple(
                PptRecord(min_eigenvalue=0.0, exact=True, cuts=tuple(problem.cuts)) for _ in elements
            )
            cert = PovmCertificate(elements, evidence, None)
            return Verdict(
                status=VerdictStatus.DISTINGUISHABLE,
                theorem="T1",
                certificate=cert,
                diagnostics=diag,
            )
        upgraded = []
        for el in elements:
            dec = try_product_decomposition(el, instance.space, tol)
            if dec is None:
                upgraded = None
                break
            upgraded.append(dec)
        if upgraded is not None:
            cert = PovmCertificate(elements, tuple(upgraded), None)
            return Verdict(status=VerdictStatus.DISTINGUISHABLE, theorem="T1", certificate=cert, diagnostics=diag)
        return Verdict(
            status=VerdictStatus.UNDECIDED,
            theorem="T1",
            reason=Reason(
                "ppt_feasible_relaxation",
                "PPT-feasible (relaxation): a relaxed solution exists but separability is not certified",
                {"residual": outcome.residual},
            ),
            diagnostics=diag,
        )
    return Verdict(
        status=VerdictStatus.UNDECIDED,
        theorem="T1",
        reason=Reason(
            "feasibility_stall",
            "the relaxed feasibility solver stalled; empirical evidence of infeasibility, not a certificate",
            {"residual": outcome.residual, "stalled": outcome.stalled},
        ),
        diagnostics=diag,
    )


def decide(instance: DiscriminationInstance, tol: Tolerances = DEFAULT, max_iterations: int | None = None) -> Verdict:
    """Dispatch an instance to the sharpest applicable decision path."""
    space = instance.space
    d = space.dim

    if instance.projectors:
        total_rank = int(round(sum(float(np.real(np.trace(p))) for p in instance.projectors)))
        if total_rank == d:
            return _decide_full_span_projectors(instance, tol)
        return _decide_feasibility(instance, tol, max_iterations)

    states = list(instance.states)
    n = len(states)
    if n == d:
        return _decide_full_basis(instance, tol)

    phi = instance.phi
    if phi is None and n == d - 1:
        phi = orthonormal_completion(states, tol)[0]

    if phi is not None and n == d - 1:
        cls = schmidt2_classify(phi, tol)
        if cls.kind is Schmidt2Kind.PRODUCT:
            # a product residual state admits only product bases
            for j, s in enumerate(states):
                if try_factor(s.amplitudes, space.dims) is None:
                    return Verdict(
                        status=VerdictStatus.INDISTINGUISHABLE,
                        theorem="T1",
                        reason=Reason(
                            "entangled_member_product_phi",
                            f"member {j} is entangled while the residual state is product",
                            {"member": j},
                        ),
                    )
            p0 = phi.density()
            elements = []
            evidence = []
            lambdas = []
            for j, s in enumerate(states):
                pv = try_factor(s.amplitudes, space.dims)
                lam = 1.0 if j == 0 else 0.0
                el = s.density() + lam * p0
                if j == 0:
                    pv_phi = try_factor(phi.amplitudes, space.dims)
                    elements.append(el)
                    evidence.append(ProductDecomposition((1.0, 1.0), (pv, pv_phi)))
                else:
                    elements.append(el)
                    evidence.append(ProductDecomposition((1.0,), (pv,)))
                lambdas.append(lam)
            cert = PovmCertificate(tuple(elements), tuple(evidence), tuple(lambdas))
            return Verdict(status=VerdictStatus.DISTINGUISHABLE, theorem="T1", certificate=cert)
        if space.dims == (2, 2):
            return decide_2x2_basis(phi, states, tol)
        if cls.kind is Schmidt2Kind.AT_LEAST_3:
            return Verdict(
                status=VerdictStatus.INDISTINGUISHABLE,
                theorem="T6",
                reason=Reason(
                    "orthogonal_schmidt_number",
                    "the residual state needs at least three orthogonal product terms, so no basis of its orthocomplement is distinguishable",
                    {"reason": cls.reason.value if cls.reason else None},
                ),
            )
        if cls.kind is Schmidt2Kind.SCHMIDT2 and cls.decomposition.orthogonal:
            h = entry_distance(cls.decomposition.a, cls.decomposition.b, tol)
            if h >= 3:
                return decide_h3(phi, states, tol)
            return decide_multipartite_sch2(phi, states, tol)
        return Verdict(
            status=VerdictStatus.UNDECIDED,
            theorem="T6",
            reason=Reason("classification_undecided", "the residual state's product structure could not be settled", {}),
        )

    return _decide_feasibility(instance, tol, max_iterations)


@dataclass(frozen=True)
class SeparableState:
    """Density matrix with an explicit product decomposition."""

    matrix: np.ndarray
    decomposition: ProductDecomposition


class SeparableOperation:
    """Measure with the POVM, then prepare the separable output state that
    matches the observed outcome."""

    def __init__(self, povm: PovmCertificate, outputs: list[SeparableState]):
        if len(outputs) != len(povm.elements):
            raise CountMismatch("one output state per POVM element required")
        for out in outputs:
            if out.decomposition.residual(out.matrix) > 1e-8:
                raise CountMismatch("output state decomposition does not reassemble it")
        self.povm = povm
        self.outputs = outputs

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = None
        for el, sigma in zip(self.povm.elements, self.outputs):
            p = float(np.real(np.trace(el @ rho)))
            term = p * sigma.matrix
            out = term if out is None else out + term
        return out


def build_separable_operation(povm: PovmCertificate, outputs) -> SeparableOperation:
    return SeparableOperation(povm, list(outputs))
