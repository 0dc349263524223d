"""Separability tests and the convex feasibility solver.

Four analytic oracles (trace lemma, rank-2 case analysis, anti-parallel
eigenvalue test, PPT) plus a cyclic-Dykstra solver for the PSD+PPT
relaxation of the POVM feasibility problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import NotPsd, PhiProduct, PreconditionViolated
from .linalg import (
    dag,
    frob,
    hermitian_eig,
    maxabs,
    min_eigenvalues,
    partial_transpose,
    psd_project,
)
from .states import PureState, StateSpace, coeff_matrix
from .tensor_rank import ProductVector, product_vectors_in_span, proper_cuts, try_factor


class SepStatus(Enum):
    SEPARABLE = "separable"
    ENTANGLED = "entangled"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class ProductDecomposition:
    """Convex decomposition sum_i w_i |p_i><p_i| into product projectors."""

    weights: tuple[float, ...]
    vectors: tuple[ProductVector, ...]

    def reassemble(self) -> np.ndarray:
        out = None
        for w, pv in zip(self.weights, self.vectors):
            v = pv.assemble()
            v = v / np.linalg.norm(v)
            term = w * np.outer(v, v.conj())
            out = term if out is None else out + term
        return out

    def residual(self, target: np.ndarray) -> float:
        scale = max(frob(target), 1e-300)
        return frob(self.reassemble() - target) / scale


@dataclass(frozen=True)
class PtWitness:
    """Negative partial-transpose eigenvector certifying entanglement."""

    cut: tuple[int, ...]
    eigenvalue: float
    eigenvector: np.ndarray


@dataclass(frozen=True)
class PptRecord:
    """PPT finding: all partial transposes PSD; exact iff the space is 2x2 or 2x3."""

    min_eigenvalue: float
    exact: bool
    cuts: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class SeparabilityVerdict:
    status: SepStatus
    evidence: ProductDecomposition | PtWitness | PptRecord | None = None
    detail: dict = field(default_factory=dict)


class Lemma1Status(Enum):
    HOLDS_BOTH_WAYS = "holds_both_ways"
    VIOLATION = "violation"


@dataclass(frozen=True)
class Lemma1Result:
    status: Lemma1Status
    trace_side: bool  # tr(E rho) = 1
    psd_side: bool  # E - P >= 0
    consistent: bool  # the two sides agree, as the equivalence demands
    trace_value: float
    min_eigenvalue: float


def support_projector(rho: np.ndarray, tol: Tolerances = DEFAULT) -> np.ndarray:
    eig = hermitian_eig(rho, tol)
    lam_max = float(eig.values[-1])
    keep = eig.values > tol.rank * max(lam_max, 0.0)
    v = eig.vectors[:, keep]
    return v @ dag(v)


def lemma1_check(e: np.ndarray, rho: np.ndarray, tol: Tolerances = DEFAULT) -> Lemma1Result:
    """Evaluate both sides of the equivalence tr(E rho)=1 <=> E - P >= 0,
    for 0 <= E <= I and the support projector P of the density matrix rho."""
    ew = hermitian_eig(e, tol).values
    if ew[0] < -tol.psd or ew[-1] > 1.0 + tol.psd:
        raise PreconditionViolated(
            f"operator must satisfy 0 <= E <= I; spectrum in [{ew[0]:.3e}, {ew[-1]:.3e}]"
        )
    rw = hermitian_eig(rho, tol).values
    if rw[0] < -tol.psd or abs(np.trace(rho).real - 1.0) > 1e-8:
        raise PreconditionViolated("rho must be a density matrix")

    p = support_projector(rho, tol)
    trace_value = float(np.real(np.trace(e @ rho)))
    trace_side = abs(trace_value - 1.0) <= 1e-9
    min_eig = float(hermitian_eig(e - p, tol).values[0])
    psd_side = min_eig >= -tol.psd
    status = Lemma1Status.HOLDS_BOTH_WAYS if (trace_side and psd_side) else Lemma1Status.VIOLATION
    return Lemma1Result(
        status=status,
        trace_side=trace_side,
        psd_side=psd_side,
        consistent=trace_side == psd_side,
        trace_value=trace_value,
        min_eigenvalue=min_eig,
    )


class Rank2Case(Enum):
    BOTH_PRODUCT = "i"
    PSI_PRODUCT_LAMBDA_ZERO = "ii"
    TWO_TERM = "iii"
    ENTANGLED = "entangled"


@dataclass(frozen=True)
class Rank2Result:
    verdict: SeparabilityVerdict
    case: Rank2Case


def rank2_separability(
    psi: PureState, phi: PureState, lam: float, tol: Tolerances = DEFAULT
) -> Rank2Result:
    """Exact separability of |psi><psi| + lam |phi><phi| for orthogonal unit
    states.

    Separable only in three situations: both states product; psi product with
    lam = 0; or both entangled with the support spanned by two product
    vectors a, b such that the cross terms |a><b| cancel, which pins lam to a
    single value.
    """
    if lam < 0:
        raise PreconditionViolated("lam must be nonnegative")
    if abs(psi.inner(phi)) > 1e-9:
        raise PreconditionViolated("states must be orthogonal")
    target = psi.density() + lam * phi.density()

    pv_psi = try_factor(psi.amplitudes, psi.space.dims)
    pv_phi = try_factor(phi.amplitudes, phi.space.dims)

    if pv_psi is not None and pv_phi is not None:
        weights, vectors = [1.0], [pv_psi]
        if lam > 0:
            weights.append(float(lam))
            vectors.append(pv_phi)
        dec = ProductDecomposition(tuple(weights), tuple(vectors))
        return Rank2Result(
            SeparabilityVerdict(SepStatus.SEPARABLE, dec, {"residual": dec.residual(target)}),
            Rank2Case.BOTH_PRODUCT,
        )

    if pv_psi is not None:  # phi entangled
        if lam <= 1e-12:
            dec = ProductDecomposition((1.0,), (pv_psi,))
            return Rank2Result(
                SeparabilityVerdict(SepStatus.SEPARABLE, dec, {"residual": dec.residual(target)}),
                Rank2Case.PSI_PRODUCT_LAMBDA_ZERO,
            )
        return Rank2Result(
            SeparabilityVerdict(
                SepStatus.ENTANGLED,
                _pt_witness_if_any(target, psi.space, tol),
                {"reason": "mixture of a product state and an entangled state"},
            ),
            Rank2Case.ENTANGLED,
        )

    if pv_phi is not None or lam <= 1e-12:
        # psi entangled: pure entangled state at lam=0, or entangled+product mixture
        return Rank2Result(
            SeparabilityVerdict(
                SepStatus.ENTANGLED,
                _pt_witness_if_any(target, psi.space, tol),
                {"reason": "psi is entangled"},
            ),
            Rank2Case.ENTANGLED,
        )

    # both entangled: the support must be spanned by exactly two product vectors
    span = product_vectors_in_span(psi, phi, tol)
    if span.infinitely_many or len(span.vectors) < 2:
        return Rank2Result(
            SeparabilityVerdict(
                SepStatus.ENTANGLED,
                _pt_witness_if_any(target, psi.space, tol),
                {"reason": f"support contains {len(span.vectors)} product directions"},
            ),
            Rank2Case.ENTANGLED,
        )
    a, b = span.vectors
    a_hat = a.assemble()
    a_hat = a_hat / np.linalg.norm(a_hat)
    b_hat = b.assemble()
    b_hat = b_hat / np.linalg.norm(b_hat)
    gram = np.array([[1.0, np.vdot(a_hat, b_hat)], [np.vdot(b_hat, a_hat), 1.0]], dtype=complex)
    rhs = np.array(
        [
            [np.vdot(a_hat, psi.amplitudes), np.vdot(a_hat, phi.amplitudes)],
            [np.vdot(b_hat, psi.amplitudes), np.vdot(b_hat, phi.amplitudes)],
        ],
        dtype=complex,
    )
    coords = np.linalg.solve(gram, rhs)
    alpha, beta = coords[0, 0], coords[1, 0]
    gamma, delta = coords[0, 1], coords[1, 1]
    cross = alpha * np.conj(beta) + lam * gamma * np.conj(delta)
    scale = abs(alpha * beta) + lam * abs(gamma * delta)
    if abs(cross) <= 1e-9 * max(scale, 1e-30):
        wa = float(abs(alpha) ** 2 + lam * abs(gamma) ** 2)
        wb = float(abs(beta) ** 2 + lam * abs(delta) ** 2)
        dec = ProductDecomposition((wa, wb), (a, b))
        resid = dec.residual(target)
        if resid <= 1e-8:
            return Rank2Result(
                SeparabilityVerdict(SepStatus.SEPARABLE, dec, {"residual": resid}),
                Rank2Case.TWO_TERM,
            )
    return Rank2Result(
        SeparabilityVerdict(
            SepStatus.ENTANGLED,
            _pt_witness_if_any(target, psi.space, tol),
            {"reason": "cross terms do not cancel", "cross": abs(cross)},
        ),
        Rank2Case.ENTANGLED,
    )


def _pt_witness_if_any(op: np.ndarray, space: StateSpace, tol: Tolerances) -> PtWitness | None:
    tr = float(np.real(np.trace(op)))
    rho = op / tr if tr > 0 else op
    worst = None
    for cut in proper_cuts(space.nparties):
        eig = hermitian_eig(partial_transpose(rho, space.dims, cut), tol)
        if worst is None or eig.values[0] < worst.eigenvalue:
            worst = PtWitness(cut=cut, eigenvalue=float(eig.values[0]), eigenvector=eig.vectors[:, 0])
    if worst is not None and worst.eigenvalue < -1e-9:
        return worst
    return None


@dataclass(frozen=True)
class AntiparallelResult:
    passed: bool
    lambda_star: float
    eigenvalues: tuple[complex, complex]
    angle_defect: float
    reason: str = ""


def antiparallel_test(psi: PureState, phi: PureState, tol: Tolerances = DEFAULT) -> AntiparallelResult:
    """Anti-parallel eigenvalue test for the 2x2 coefficient matrices.

    Pass iff the eigenvalues of M_psi M_phi^{-1} are negative real multiples
    of each other; returns lambda* = C(psi)/C(phi) alongside.
    """
    m_phi = coeff_matrix(phi)
    c_phi = abs(np.linalg.det(m_phi))
    if c_phi <= 1e-12:
        raise PhiProduct("reference state has a singular coefficient matrix")
    m_psi = coeff_matrix(psi)
    c_psi = abs(np.linalg.det(m_psi))
    lam_star = float(c_psi / c_phi)
    if c_psi <= 1e-12:
        return AntiparallelResult(False, lam_star, (0j, 0j), np.inf, "psi is a product state")
    t = m_psi @ np.linalg.inv(m_phi)
    tr = t[0, 0] + t[1, 1]
    det = t[0, 0] * t[1, 1] - t[0, 1] * t[1, 0]
    disc = np.sqrt(complex(tr * tr - 4.0 * det))
    mu1, mu2 = (tr + disc) / 2.0, (tr - disc) / 2.0
    ratio = -mu1 / mu2
    defect = abs(np.angle(ratio))
    if defect < tol.angular:
        return AntiparallelResult(True, lam_star, (complex(mu1), complex(mu2)), float(defect))
    return AntiparallelResult(
        False, lam_star, (complex(mu1), complex(mu2)), float(defect), "eigenvalue ratio not negative real"
    )


_EXACT_PPT_DIMS = {(2, 2), (2, 3), (3, 2)}


def ppt_oracle(
    rho: np.ndarray, space: StateSpace, bipartition=None, tol: Tolerances = DEFAULT
) -> SeparabilityVerdict:
    """PPT criterion: entanglement verdicts are always sound; separability is
    claimed only on 2x2 and 2x3 spaces where PPT is exact."""
    w = hermitian_eig(rho, tol).values
    scale = max(1.0, float(w[-1]))
    if w[0] < -tol.psd * scale:
        raise NotPsd(f"input has negative eigenvalue {w[0]:.3e}")
    tr = float(np.real(np.trace(rho)))
    if tr <= 0:
        raise NotPsd("input has nonpositive trace")
    rho_n = rho / tr

    cuts = [tuple(bipartition)] if bipartition is not None else list(proper_cuts(space.nparties))
    min_eig = np.inf
    worst: PtWitness | None = None
    for cut in cuts:
        eig = hermitian_eig(partial_transpose(rho_n, space.dims, cut), tol)
        lw = float(eig.values[0])
        if lw < min_eig:
            min_eig = lw
            worst = PtWitness(cut=cut, eigenvalue=lw, eigenvector=eig.vectors[:, 0])
    if min_eig < -1e-9:
        return SeparabilityVerdict(SepStatus.ENTANGLED, worst, {"min_pt_eigenvalue": min_eig})

    if bipartition is not None:
        dl, dr = space.cut_shape(tuple(bipartition))
        exact = (dl, dr) in _EXACT_PPT_DIMS
    else:
        exact = space.nparties == 2 and space.dims in _EXACT_PPT_DIMS
    record = PptRecord(min_eigenvalue=float(min_eig), exact=exact, cuts=tuple(cuts))
    if exact:
        return SeparabilityVerdict(SepStatus.SEPARABLE, record, {})
    return SeparabilityVerdict(SepStatus.UNDECIDED, record, {"reason": "PPT necessary only"})


@dataclass
class FeasibilityProblem:
    """PSD operators E_k with sum E_k = P0 and P_k + E_k PPT per cut.

    ``projectors`` are the mutually orthogonal support projectors of the
    states under discrimination; ``p0`` the residual projector.
    """

    space: StateSpace
    projectors: list[np.ndarray]
    p0: np.ndarray
    cuts: list[tuple[int, ...]] = field(default_factory=list)
    tol: Tolerances = DEFAULT
    max_iterations: int | None = None
    check_every: int = 5
    project_support: bool = True
    # when P0 has rank 1 the blocks are forced to E_k = lam_k P0 and the
    # problem is solved exactly through interval intersection; set False to
    # force the iterative path
    use_rank1_path: bool = True

    def __post_init__(self):
        d = self.space.dim
        if not self.cuts:
            self.cuts = list(proper_cuts(self.space.nparties))
        self.projectors = [np.asarray(p, dtype=complex) for p in self.projectors]
        for p in self.projectors:
            if p.shape != (d, d):
                raise PreconditionViolated("projector dimension mismatch")
        total = sum(self.projectors)
        ident = np.eye(d)
        p0 = np.asarray(self.p0, dtype=complex)
        if maxabs(ident - total - p0) > 1e-10:
            raise PreconditionViolated("P0 must equal I - sum(P_k) within 1e-10")
        if float(min_eigenvalues(p0)) < -1e-10:
            raise PreconditionViolated("P0 must be PSD")
        for i, p in enumerate(self.projectors):
            for q in self.projectors[i + 1 :]:
                if maxabs(p @ q) > 1e-9:
                    raise PreconditionViolated("projectors must be mutually orthogonal")


@dataclass(frozen=True)
class FeasibilityOutcome:
    feasible: bool
    e_ops: np.ndarray | None
    residual: float
    best_residual: float
    iterations: int
    stalled: bool
    diagnostics: dict = field(default_factory=dict)


def _pt_stack(m: np.ndarray, dims: tuple[int, ...], cut: tuple[int, ...]) -> np.ndarray:
    return partial_transpose(m, dims, cut)


class _PencilBlock:
    """Constraint profile of one block in the rank-1 parametrization.

    With E_k = lam * P0 the block constraints read lam >= 0 and
    PT_c(P_k) + lam * PT_c(P0) >= 0 per cut; the violation
    v(lam) = max(-lam, max_c -lambda_min(A_c + lam B_c)) is convex in lam,
    so its sublevel sets are intervals.
    """

    def __init__(self, pk: np.ndarray, p0: np.ndarray, dims, cuts):
        self.mats = [
            (partial_transpose(pk, dims, cut), partial_transpose(p0, dims, cut)) for cut in cuts
        ]

    def violations(self, lams: np.ndarray) -> np.ndarray:
        lams = np.asarray(lams, dtype=float)
        worst = np.full(lams.shape, -np.inf)
        for a, b in self.mats:
            stack = a[None, :, :] + lams[:, None, None] * b[None, :, :]
            worst = np.maximum(worst, -np.linalg.eigvalsh(stack)[:, 0])
        return np.maximum(worst, -lams)

    def violation(self, lam: float) -> float:
        return float(self.violations(np.array([lam]))[0])

    def minimize(self, lo: float = -0.05, hi: float = 1.05):
        """(lam_peak, min violation) via grid bracketing + ternary refinement."""
        xs = np.linspace(lo, hi, 45)
        vs = self.violations(xs)
        i = int(np.argmin(vs))
        a, b = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
        for _ in range(70):
            m1, m2 = a + (b - a) / 3.0, b - (b - a) / 3.0
            if self.violation(m1) > self.violation(m2):
                a = m1
            else:
                b = m2
        peak = (a + b) / 2.0
        return peak, self.violation(peak)

    def interval_at(self, level: float, peak: float, vmin: float, window: float = 1.5):
        """Sublevel interval {lam : v(lam) <= level}, or None if empty."""
        if vmin > level:
            return None

        def _edge(outside: float, inside: float) -> float:
            for _ in range(60):
                mid = (outside + inside) / 2.0
                if self.violation(mid) <= level:
                    inside = mid
                else:
                    outside = mid
            return inside

        lo = -window
        hi = 1.0 + window
        left = lo if self.violation(lo) <= level else _edge(lo, peak)
        right = hi if self.violation(hi) <= level else _edge(hi, peak)
        return float(left), float(right)


def _solve_rank1(problem: FeasibilityProblem) -> FeasibilityOutcome:
    """Exact decision when P0 = |w><w|.

    PSD blocks summing to a rank-1 projector are forced to E_k = lam_k P0,
    so the problem collapses to intervals of lam intersected with the
    simplex.  Feasible points are verified by direct eigenvalue checks;
    infeasibility is reported with the smallest uniform violation level at
    which the intervals would meet the simplex.
    """
    tol = problem.tol
    dims = problem.space.dims
    n = len(problem.projectors)
    p0 = np.asarray(problem.p0, dtype=complex)

    blocks = [_PencilBlock(pk, p0, dims, problem.cuts) for pk in problem.projectors]
    peaks = np.empty(n)
    vmins = np.empty(n)
    for k, blk in enumerate(blocks):
        peaks[k], vmins[k] = blk.minimize()

    diagnostics: dict = {"path": "rank1-exact"}

    if np.all(vmins <= tol.feasibility):
        ivs = []
        for k, blk in enumerate(blocks):
            iv = blk.interval_at(0.0, peaks[k], vmins[k])
            # a block grazing the boundary contributes its peak as a
            # singleton interval
            ivs.append(iv if iv is not None else (float(peaks[k]), float(peaks[k])))
        lows = np.array([iv[0] for iv in ivs])
        highs = np.array([iv[1] for iv in ivs])
        # water-fill from the interval floors toward the target sum, then
        # clamp; tiny overshoots sit at quadratic minima and stay harmless
        lam = lows.copy()
        need = 1.0 - lam.sum()
        if need > 0:
            room = highs - lows
            if room.sum() > 0:
                lam = lam + room * min(1.0, need / room.sum())
        excess = lam.sum() - 1.0
        lam = lam - excess / n
        e = np.stack([lk * p0 for lk in lam])
        res = max(0.0, float(max(blk.violation(float(lam[k])) for k, blk in enumerate(blocks))))
        if res <= tol.feasibility:
            diagnostics["lambdas"] = [float(x) for x in lam]
            return FeasibilityOutcome(
                feasible=True,
                e_ops=e,
                residual=res,
                best_residual=res,
                iterations=0,
                stalled=False,
                diagnostics=diagnostics,
            )

    # infeasible: the smallest uniform violation level t at which every
    # sublevel interval is nonempty and the interval sums bracket 1; the
    # monotone pieces are answered from vectorized violation profiles
    grid = np.linspace(-0.6, 1.6, 1201)
    rights = []
    lefts = []
    for blk in blocks:
        prof = blk.violations(grid)
        i0 = int(np.argmin(prof))
        rights.append((np.maximum.accumulate(prof[i0:]), grid[i0:]))
        lv = np.maximum.accumulate(prof[: i0 + 1][::-1])
        lefts.append((lv, grid[: i0 + 1][::-1]))

    def upper_sum(t: float) -> float:
        return float(sum(np.interp(t, v, l) for v, l in rights))

    def lower_sum(t: float) -> float:
        return float(sum(np.interp(t, v, l) for v, l in lefts))

    t_ne = float(vmins.max())

    def _solve_monotone(f, target: float, increasing: bool) -> float:
        lo, hi = t_ne, 4.0
        for _ in range(80):
            mid = (lo + hi) / 2.0
            val = f(mid)
            ok = val >= target if increasing else val <= target
            if ok:
                hi = mid
            else:
                lo = mid
        return hi

    t_u = _solve_monotone(upper_sum, 1.0, True) if upper_sum(t_ne) < 1.0 else t_ne
    t_l = _solve_monotone(lower_sum, 1.0, False) if lower_sum(t_ne) > 1.0 else t_ne
    margin = max(t_ne, t_u, t_l)
    diagnostics["infeasibility_margin"] = margin
    return FeasibilityOutcome(
        feasible=False,
        e_ops=None,
        residual=margin,
        best_residual=margin,
        iterations=0,
        stalled=True,
        diagnostics=diagnostics,
    )


def feasibility_solve(problem: FeasibilityProblem) -> FeasibilityOutcome:
    """Cyclic Dykstra projections onto the affine sum constraint, the PSD
    cones, and the per-cut PPT cones.

    Since every E_k is squeezed between 0 and P0, the iterate is also
    projected onto the support subspace of P0 (an implied linear constraint
    that sharpens convergence).  Non-convergence is detected by a stall in
    the best residual and reported as a result, not an error.
    """
    tol = problem.tol
    dims = problem.space.dims
    d = problem.space.dim
    n = len(problem.projectors)
    cuts = problem.cuts
    cap = problem.max_iterations or tol.max_iterations

    p = np.stack(problem.projectors)
    p0 = np.asarray(problem.p0, dtype=complex)

    supp = support_projector(p0, tol)
    rank_p0 = int(round(float(np.real(np.trace(supp)))))

    if problem.use_rank1_path and rank_p0 == 1:
        eig = hermitian_eig(p0, tol)
        w = eig.vectors[:, -1]
        if maxabs(p0 - np.outer(w, w.conj())) <= 1e-9:
            return _solve_rank1(problem)

    e = np.broadcast_to(p0 / n, (n, d, d)).copy()
    r_psd = np.zeros_like(e)
    r_ppt = {cut: np.zeros_like(e) for cut in cuts}

    def residual_of(e_cur: np.ndarray) -> tuple[float, dict]:
        parts = {"affine": float(np.linalg.norm(e_cur.sum(axis=0) - p0))}
        parts["psd"] = float(max(0.0, -min_eigenvalues(e_cur).min()))
        worst_ppt = 0.0
        for cut in cuts:
            pt = _pt_stack(p + e_cur, dims, cut)
            worst_ppt = max(worst_ppt, float(max(0.0, -min_eigenvalues(pt).min())))
        parts["ppt"] = worst_ppt
        return max(parts.values()), parts

    best = np.inf
    best_iter = 0
    res = np.inf
    parts: dict = {}
    it = 0
    while it < cap:
        it += 1
        # PSD cones
        y = e + r_psd
        yp = psd_project(y)
        r_psd = y - yp
        e = yp
        # PPT cones
        for cut in cuts:
            y = e + r_ppt[cut]
            z = _pt_stack(p + y, dims, cut)
            zp = psd_project(z)
            yp = _pt_stack(zp, dims, cut) - p
            r_ppt[cut] = y - yp
            e = yp
        # implied support constraint (linear subspace, no correction term)
        if problem.project_support and rank_p0 < d:
            e = supp @ e @ supp
        # affine sum constraint (affine subspace, no correction term)
        shift = (e.sum(axis=0) - p0) / n
        e = e - shift
        e = (e + dag(e)) / 2.0

        if it % problem.check_every == 0 or it == cap:
            res, parts = residual_of(e)
            if res < best - tol.stall_improvement:
                best = res
                best_iter = it
            if res <= tol.feasibility:
                return FeasibilityOutcome(
                    feasible=True,
                    e_ops=e,
                    residual=res,
                    best_residual=min(best, res),
                    iterations=it,
                    stalled=False,
                    diagnostics=parts,
                )
            if it - best_iter >= tol.stall_window:
                return FeasibilityOutcome(
                    feasible=False,
                    e_ops=e,
                    residual=res,
                    best_residual=best,
                    iterations=it,
                    stalled=True,
                    diagnostics=parts,
                )
    return FeasibilityOutcome(
        feasible=False,
        e_ops=e,
        residual=res,
        best_residual=best,
        iterations=it,
        stalled=False,
        diagnostics={**parts, "iteration_cap": cap},
    )
