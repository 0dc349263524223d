import math

import numpy as np
import pytest

from sepdisc.constructions import FamilyParams, family_sep_not_locc, gamma_range, locc_basis_sch2
from sepdisc.errors import InvalidInstance, NotMaxEnt, PhiProduct
from sepdisc.linalg import kron_all
from sepdisc.discrimination import (
    DiscriminationInstance,
    LoccFlag,
    SeparableState,
    SubspaceKind,
    VerdictStatus,
    build_separable_operation,
    decide,
    decide_2x2_basis,
    decide_h3,
    decide_max_ent_basis,
    decide_multipartite_sch2,
    subspace_verdict,
    try_product_decomposition,
    validate_certificate,
)
from sepdisc.sampling import (
    random_basis_of_complement,
    random_product_basis,
    random_pure_state,
    random_unitary,
)
from sepdisc.separability import ProductDecomposition, SepStatus, rank2_separability
from sepdisc.states import (
    PureState,
    QUBIT_PAIR,
    StateSpace,
    basis_state,
    concurrence,
    ket,
    orthonormal_completion,
    phi_plus,
)
from sepdisc.tensor_rank import is_product, try_factor
from tests.conftest import bell, ghz_theta, w_state

S3 = StateSpace((2, 2, 2))


def _family(alpha=0.3, beta=0.4, frac=0.5):
    lo, hi = gamma_range(alpha, beta)
    return family_sep_not_locc(FamilyParams(alpha, beta, lo + frac * (hi - lo)))


class TestFullBasis:
    def test_standard_basis_distinguishable(self):
        basis = [ket(QUBIT_PAIR, f"{i}{j}") for i in range(2) for j in range(2)]
        inst = DiscriminationInstance.from_pure(QUBIT_PAIR, basis)
        v = decide(inst)
        assert v.status is VerdictStatus.DISTINGUISHABLE
        assert v.theorem == "T1"
        assert validate_certificate(v.certificate, inst)["valid"]

    def test_bell_basis_indistinguishable(self):
        basis = [phi_plus(), bell("phi-"), bell("psi+"), bell("psi-")]
        inst = DiscriminationInstance.from_pure(QUBIT_PAIR, basis)
        v = decide(inst)
        assert v.status is VerdictStatus.INDISTINGUISHABLE
        assert v.reason.code == "entangled_member"

    def test_random_product_bases(self, rng):
        for space in (QUBIT_PAIR, StateSpace((3, 3))):
            for _ in range(5):
                basis = random_product_basis(rng, space)
                v = decide(DiscriminationInstance.from_pure(space, basis))
                assert v.status is VerdictStatus.DISTINGUISHABLE

    def test_random_mixed_bases_indistinguishable(self, rng):
        for _ in range(5):
            u = random_unitary(rng, 4)
            basis = [PureState(QUBIT_PAIR, u[:, j]) for j in range(4)]
            if all(concurrence(s) < 1e-9 for s in basis):
                continue
            v = decide(DiscriminationInstance.from_pure(QUBIT_PAIR, basis))
            assert v.status is VerdictStatus.INDISTINGUISHABLE


class TestTwoQubitBasis:
    def test_family_distinguishable_with_flag(self):
        phi, basis = _family()
        v = decide_2x2_basis(phi, basis)
        assert v.status is VerdictStatus.DISTINGUISHABLE
        assert v.theorem == "T2"
        assert v.locc_flag is LoccFlag.LOCC_INDISTINGUISHABLE
        inst = DiscriminationInstance.from_pure(QUBIT_PAIR, basis, phi)
        assert validate_certificate(v.certificate, inst)["valid"]

    def test_bell_triple_concurrence_sum(self):
        v = decide_2x2_basis(phi_plus(), [bell("phi-"), bell("psi+"), bell("psi-")])
        assert v.status is VerdictStatus.INDISTINGUISHABLE
        assert v.reason.code == "concurrence_sum"
        assert abs(v.reason.data["sum"] - 3.0) < 1e-9

    def test_one_zero_zero_basis(self):
        v = decide_2x2_basis(phi_plus(), [bell("phi-"), ket(QUBIT_PAIR, "01"), ket(QUBIT_PAIR, "10")])
        assert v.status is VerdictStatus.DISTINGUISHABLE
        assert np.allclose(v.certificate.lambdas, [1.0, 0.0, 0.0])

    def test_product_phi_raises(self):
        basis = [ket(QUBIT_PAIR, "01"), ket(QUBIT_PAIR, "10"), ket(QUBIT_PAIR, "11")]
        with pytest.raises(PhiProduct):
            decide_2x2_basis(ket(QUBIT_PAIR, "00"), basis)

    def test_lambda_uniqueness_perturbation(self):
        phi, basis = _family()
        v = decide_2x2_basis(phi, basis)
        for psi, lam in zip(basis, v.certificate.lambdas):
            for d in (-1e-3, 1e-3):
                lam_p = lam + d
                if lam_p < 0:
                    continue
                r = rank2_separability(psi, phi, lam_p)
                assert r.verdict.status is SepStatus.ENTANGLED


class TestMaxEntBasis:
    def test_equal_thirds(self):
        from sepdisc.constructions import TetraPoint, basis_from_unitary, tetra_unitary

        basis = basis_from_unitary(tetra_unitary(TetraPoint(1 / 3, 1 / 3, 1 / 3)))
        v = decide_max_ent_basis(basis)
        assert v.status is VerdictStatus.DISTINGUISHABLE
        assert v.theorem == "C2"

    def test_product_members_fail_sum(self):
        basis = [ket(QUBIT_PAIR, "01"), ket(QUBIT_PAIR, "10"), None]
        # complete the two products to a basis of {phi+}^perp with bell("phi-")
        basis[2] = bell("phi-")
        # reorder so the residual state is phi+
        v = decide_max_ent_basis([basis[0], basis[1], basis[2]])
        assert v.status is VerdictStatus.DISTINGUISHABLE  # concurrences (0,0,1)

        all_product = [ket(QUBIT_PAIR, "01"), ket(QUBIT_PAIR, "10"), bell("phi+") if False else None]
        # a genuinely failing sum: three states with concurrences (1,1,1)
        v = decide_max_ent_basis([bell("phi-"), bell("psi+"), bell("psi-")])
        assert v.status is VerdictStatus.INDISTINGUISHABLE

    def test_not_max_ent_rejected(self):
        phi, basis = _family()
        with pytest.raises(NotMaxEnt):
            decide_max_ent_basis(basis)


class TestDispatcher:
    def test_declared_phi_routes_2x2(self):
        phi, basis = _family()
        inst = DiscriminationInstance.from_pure(QUBIT_PAIR, basis, phi)
        v = decide(inst)
        assert v.status is VerdictStatus.DISTINGUISHABLE
        assert v.theorem == "T2"

    def test_undeclared_phi_computed(self):
        phi, basis = _family()
        inst = DiscriminationInstance.from_pure(QUBIT_PAIR, basis)
        v = decide(inst)
        assert v.status is VerdictStatus.DISTINGUISHABLE

    def test_product_phi_product_basis(self):
        basis = [ket(QUBIT_PAIR, "01"), ket(QUBIT_PAIR, "10"), ket(QUBIT_PAIR, "11")]
        inst = DiscriminationInstance.from_pure(QUBIT_PAIR, basis, ket(QUBIT_PAIR, "00"))
        v = decide(inst)
        assert v.status is VerdictStatus.DISTINGUISHABLE
        assert validate_certificate(v.certificate, inst)["valid"]

    def test_product_phi_entangled_member(self):
        phi = ket(QUBIT_PAIR, "00")
        entangled = PureState.normalized(
            QUBIT_PAIR, ket(QUBIT_PAIR, "01").amplitudes + ket(QUBIT_PAIR, "10").amplitudes
        )
        other = PureState.normalized(
            QUBIT_PAIR, ket(QUBIT_PAIR, "01").amplitudes - ket(QUBIT_PAIR, "10").amplitudes
        )
        inst = DiscriminationInstance.from_pure(
            QUBIT_PAIR, [entangled, other, ket(QUBIT_PAIR, "11")], phi
        )
        v = decide(inst)
        assert v.status is VerdictStatus.INDISTINGUISHABLE
        assert v.reason.code == "entangled_member_product_phi"

    def test_w_complement_indistinguishable(self, rng):
        w = w_state(S3)
        basis = random_basis_of_complement(rng, w)
        inst = DiscriminationInstance.from_pure(S3, basis, w)
        v = decide(inst)
        assert v.status is VerdictStatus.INDISTINGUISHABLE
        assert v.theorem == "T6"

    def test_three_products_plus_one_distinguishable(self):
        # a completable product triple plus an entangled companion
        products = [ket(S3, "000"), ket(S3, "011"), ket(S3, "101")]
        companion = PureState.normalized(
            S3, ket(S3, "110").amplitudes + ket(S3, "001").amplitudes
        )
        inst = DiscriminationInstance.from_pure(S3, products + [companion])
        v = decide(inst)
        assert v.status is VerdictStatus.DISTINGUISHABLE
        assert v.theorem == "T1"
        assert validate_certificate(v.certificate, inst)["valid"]
        # the certificate is itself a verified point of the relaxed
        # feasibility problem
        assert v.diagnostics["feasibility"]["residual"] < 1e-7

    def test_projector_instance_full_span(self):
        p_bell = phi_plus().density() + bell("phi-").density()
        p_rest = ket(QUBIT_PAIR, "01").density() + ket(QUBIT_PAIR, "10").density()
        inst = DiscriminationInstance.from_projectors(QUBIT_PAIR, [p_bell, p_rest])
        v = decide(inst)
        # the bell block is separable (|00><00| + |11><11| span), the rest too
        assert v.status is VerdictStatus.DISTINGUISHABLE

    def test_projector_instance_entangled_block(self):
        p1 = phi_plus().density()
        p2 = np.eye(4) - p1
        inst = DiscriminationInstance.from_projectors(QUBIT_PAIR, [p1, p2])
        v = decide(inst)
        assert v.status is VerdictStatus.INDISTINGUISHABLE


class TestH3:
    def test_ghz_locc_basis(self):
        phi = ghz_theta(S3, math.pi / 6)
        basis = locc_basis_sch2(phi)
        v = decide_h3(phi, basis)
        assert v.status is VerdictStatus.DISTINGUISHABLE
        assert v.theorem == "T5"
        inst = DiscriminationInstance.from_pure(S3, basis, phi)
        assert validate_certificate(v.certificate, inst)["valid"]

    def test_two_entangled_members_rejected(self):
        phi = ghz_theta(S3, 0.5)
        basis = locc_basis_sch2(phi)
        # mix two product members from different sectors (they differ on at
        # least two parties, so the mixtures are genuinely entangled)
        products = basis[1:]
        i, j = 0, None
        from sepdisc.tensor_rank import entry_distance, try_factor

        pv_i = try_factor(products[i].amplitudes, S3.dims)
        for cand in range(1, len(products)):
            pv_c = try_factor(products[cand].amplitudes, S3.dims)
            if entry_distance(pv_i, pv_c) >= 2:
                j = cand
                break
        assert j is not None
        v1, v2 = products[i].amplitudes, products[j].amplitudes
        mixed1 = PureState.normalized(S3, (v1 + v2) / math.sqrt(2))
        mixed2 = PureState.normalized(S3, (v1 - v2) / math.sqrt(2))
        assert not is_product(mixed1)
        tampered = [basis[0], mixed1, mixed2] + [
            s for k, s in enumerate(products) if k not in (i, j)
        ]
        v = decide_h3(phi, tampered)
        assert v.status is VerdictStatus.INDISTINGUISHABLE
        assert v.reason.code == "entangled_count"

    def test_wrong_entangled_member(self):
        # swap the unique entangled member for an orthogonal state that mixes
        # in a product of the complement: the overlap check rejects it
        phi = ghz_theta(S3, 0.5)
        basis = locc_basis_sch2(phi)
        good = basis[0]
        prod = basis[1]
        wrong = PureState.normalized(S3, 0.8 * good.amplitudes + 0.6 * prod.amplitudes)
        other = PureState.normalized(S3, 0.6 * good.amplitudes - 0.8 * prod.amplitudes)
        tampered = [wrong, other] + basis[2:]
        v = decide_h3(phi, tampered)
        assert v.status is VerdictStatus.INDISTINGUISHABLE
        assert v.reason.code in ("wrong_entangled_member", "entangled_count")


class TestMultipartiteSch2:
    def _embed_family(self, alpha=0.3, beta=0.4, frac=0.5):
        phi22, fam = _family(alpha, beta, frac)
        e0 = np.array([1, 0], dtype=complex)
        e1 = np.array([0, 1], dtype=complex)
        phi = PureState.normalized(S3, np.kron(e0, phi22.amplitudes))
        basis = [PureState.normalized(S3, np.kron(e0, s.amplitudes)) for s in fam]
        for i in range(2):
            for j in range(2):
                basis.append(PureState(S3, kron_all([e1, np.eye(2)[:, i], np.eye(2)[:, j]])))
        return phi, basis

    def test_embedded_family_distinguishable(self):
        phi, basis = self._embed_family()
        v = decide_multipartite_sch2(phi, basis)
        assert v.status is VerdictStatus.DISTINGUISHABLE
        assert v.theorem == "T4"
        inst = DiscriminationInstance.from_pure(S3, basis, phi)
        assert validate_certificate(v.certificate, inst)["valid"]

    def test_prefix_mismatch_indistinguishable(self):
        phi, basis = self._embed_family()
        e1 = np.array([0, 1], dtype=complex)
        _, fam = _family()
        bad = PureState.normalized(S3, np.kron(e1, fam[0].amplitudes))
        rest = orthonormal_completion([phi, bad])
        inst = DiscriminationInstance.from_pure(S3, [bad] + rest, phi)
        v = decide(inst)
        assert v.status is VerdictStatus.INDISTINGUISHABLE
        assert v.reason.code == "prefix_mismatch"

    def test_bipartite_3x3_embedded_family(self):
        # two qutrits, residual state entangled on the {0,1}x{0,1} block: the
        # embedded concurrence-sum decider applies with an empty prefix
        s33 = StateSpace((3, 3))
        phi22, fam = _family()

        def embed(vec4):
            out = np.zeros(9, dtype=complex)
            out[[0, 1, 3, 4]] = vec4  # row-major {0,1}x{0,1} block of 3x3
            return out

        phi = PureState.normalized(s33, embed(phi22.amplitudes))
        basis = [PureState.normalized(s33, embed(s.amplitudes)) for s in fam]
        for i, j in [(0, 2), (1, 2), (2, 0), (2, 1), (2, 2)]:
            basis.append(basis_state(s33, (i, j)))
        inst = DiscriminationInstance.from_pure(s33, basis, phi)
        v = decide(inst)
        assert v.status is VerdictStatus.DISTINGUISHABLE
        assert v.theorem == "T4"
        assert validate_certificate(v.certificate, inst)["valid"]

    def test_embedding_violation_indistinguishable(self):
        # an entangled member sharing the prefix but using a third level of
        # the second pair needs a 2x3 embedding, which is disallowed
        s223 = StateSpace((2, 2, 3))
        e0 = np.array([1, 0], dtype=complex)
        phi22, _ = _family()
        pad = np.zeros(6, dtype=complex)
        pad[[0, 1, 3, 4]] = phi22.amplitudes  # embed 2x2 into 2x3
        phi = PureState.normalized(s223, np.kron(e0, pad))
        outside = np.zeros(6, dtype=complex)
        outside[[1, 5]] = [1 / math.sqrt(2), 1 / math.sqrt(2)]  # uses level 2
        bad = PureState.normalized(s223, np.kron(e0, outside))
        assert abs(phi.inner(bad)) < 1e-12
        rest = orthonormal_completion([phi, bad])
        inst = DiscriminationInstance.from_pure(s223, [bad] + rest, phi)
        v = decide(inst)
        assert v.status is VerdictStatus.INDISTINGUISHABLE
        assert v.reason.code in ("embedding_failed", "antiparallel_failed", "concurrence_sum")


class TestSubspaceVerdict:
    def test_w_no_basis(self):
        sv = subspace_verdict(w_state(S3))
        assert sv.kind is SubspaceKind.NO_DISTINGUISHABLE_BASIS

    def test_ghz_has_locc_basis(self):
        for theta in np.linspace(0.2, math.pi / 2 - 0.2, 5):
            sv = subspace_verdict(ghz_theta(S3, theta))
            assert sv.kind is SubspaceKind.HAS_LOCC_BASIS
            v = decide_h3(ghz_theta(S3, theta), list(sv.basis))
            assert v.status is VerdictStatus.DISTINGUISHABLE

    def test_superposed_product_no_basis(self):
        plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
        vec = 0.6 * ket(S3, "000").amplitudes + 0.8 * kron_all([plus] * 3)
        sv = subspace_verdict(PureState.normalized(S3, vec))
        assert sv.kind is SubspaceKind.NO_DISTINGUISHABLE_BASIS

    def test_product_phi_rejected(self):
        with pytest.raises(PhiProduct):
            subspace_verdict(ket(S3, "000"))


class TestSeparableOperation:
    def test_standard_basis_channel(self):
        basis = [ket(QUBIT_PAIR, f"{i}{j}") for i in range(2) for j in range(2)]
        inst = DiscriminationInstance.from_pure(QUBIT_PAIR, basis)
        cert = decide(inst).certificate
        outputs = [
            SeparableState(s.density(), ProductDecomposition((1.0,), (try_factor(s.amplitudes, (2, 2)),)))
            for s in basis
        ]
        channel = build_separable_operation(cert, outputs)
        for j, s in enumerate(basis):
            out = channel.apply(s.density())
            assert np.max(np.abs(out - outputs[j].matrix)) < 1e-7

    def test_family_channel_and_trace_preservation(self, rng):
        phi, basis = _family()
        v = decide_2x2_basis(phi, basis)
        sigma = [ket(QUBIT_PAIR, "00"), ket(QUBIT_PAIR, "01"), ket(QUBIT_PAIR, "10")]
        outputs = [
            SeparableState(s.density(), ProductDecomposition((1.0,), (try_factor(s.amplitudes, (2, 2)),)))
            for s in sigma
        ]
        channel = build_separable_operation(v.certificate, outputs)
        for j, s in enumerate(basis):
            assert np.max(np.abs(channel.apply(s.density()) - outputs[j].matrix)) < 1e-7
        for _ in range(100):
            psi = random_pure_state(rng, QUBIT_PAIR)
            out = channel.apply(psi.density())
            assert abs(np.trace(out).real - 1.0) < 1e-10

    def test_count_mismatch(self):
        phi, basis = _family()
        v = decide_2x2_basis(phi, basis)
        from sepdisc.errors import CountMismatch

        with pytest.raises(CountMismatch):
            build_separable_operation(v.certificate, [])


def test_instance_validation():
    with pytest.raises(InvalidInstance):
        DiscriminationInstance.from_pure(QUBIT_PAIR, [phi_plus(), phi_plus()])
    with pytest.raises(InvalidInstance):
        DiscriminationInstance.from_pure(QUBIT_PAIR, [phi_plus()], phi_plus())


def test_try_product_decomposition_diagonal():
    op = np.diag([0.0, 1.0, 1.0, 1.0]).astype(complex)
    dec = try_product_decomposition(op, QUBIT_PAIR)
    assert dec is not None
    assert dec.residual(op) < 1e-10
    bellop = phi_plus().density()
    assert try_product_decomposition(bellop, QUBIT_PAIR) is None
