import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spintomo import (
    IncompleteQuorumError,
    Quorum,
    SingularGramError,
    completeness_check,
    dual_via_gram_inverse,
    dual_via_gram_schmidt,
    gram_matrix,
    gram_schmidt_basis,
    hs_inner,
    hs_norm,
    random_hermitian,
    random_operator,
    reproducing_kernel_residual,
    superop_from_frame,
    verify_spanning_definitions,
)
from spintomo.spin import pauli_quorum

from conftest import EYE2, SX, SY, SZ, random_quorum


def duality_matrix(q, dual):
    return np.array(
        [[hs_inner(b, c) for c in q.elements] for b in dual.elements]
    )


class TestCompleteness:
    def test_pauli_complete(self):
        report = completeness_check(pauli_quorum()[0])
        assert report.complete and report.rank == 4

    def test_traceless_paulis_incomplete(self):
        report = completeness_check(Quorum.from_elements([SX, SY, SZ]))
        assert not report.complete
        assert report.rank == 3
        witness = report.defect_witness
        assert hs_norm(witness) == pytest.approx(1, abs=1e-12)
        assert np.abs(witness - EYE2 / np.sqrt(2)).max() <= 1e-12

    def test_random_hermitian_quartets_complete(self):
        # rank 4 iff the 4x4 coefficient matrix has nonzero determinant
        for seed in range(100):
            q = random_quorum(2, 4, seed)
            det = np.linalg.det(q.coefficient_matrix())
            report = completeness_check(q)
            assert report.complete == (abs(det) > 1e-10)
            assert report.complete

    def test_witness_orthogonal_to_all_elements(self):
        q = random_quorum(3, 5, seed=7)
        report = completeness_check(q)
        assert not report.complete
        assert max(abs(hs_inner(report.defect_witness, c)) for c in q.elements) <= 1e-10


class TestGramSchmidt:
    def test_pauli_already_orthogonal(self):
        q, _ = pauli_quorum()
        basis, kept, _ = gram_schmidt_basis(q)
        assert kept == [True] * 4
        for y, c in zip(basis, q.elements):
            assert np.abs(y - c / np.sqrt(2)).max() <= 1e-12

    def test_proportional_element_dropped(self):
        q = Quorum.from_elements([SZ, 2 * SZ, SX])
        basis, kept, coeffs = gram_schmidt_basis(q)
        assert kept == [True, False, True]
        assert np.abs(basis[0] - SZ / np.sqrt(2)).max() <= 1e-12
        assert np.abs(basis[1] - SX / np.sqrt(2)).max() <= 1e-12
        assert np.all(coeffs[:, 1] == 0)

    def test_random_quorum_orthonormal(self):
        q = random_quorum(2, 4, seed=11)
        basis, _, coeffs = gram_schmidt_basis(q)
        gram = np.array([[hs_inner(a, b) for b in basis] for a in basis])
        assert np.abs(gram - np.eye(4)).max() <= 1e-10
        # coeffs reproduce the basis from the original elements
        for k, y in enumerate(basis):
            rebuilt = sum(coeffs[k, n] * q.elements[n] for n in range(4))
            assert np.abs(rebuilt - y).max() <= 1e-10

    def test_all_zero_quorum_rejected(self):
        with pytest.raises(ValueError, match="all-zero"):
            gram_schmidt_basis(Quorum.from_elements([np.zeros((2, 2))]))


class TestDualConstruction:
    def test_pauli_dual_gram_schmidt(self):
        q, expected = pauli_quorum()
        dual = dual_via_gram_schmidt(q)
        for b, e in zip(dual.elements, expected.elements):
            assert np.abs(b - e).max() <= 1e-12

    def test_pauli_dual_gram_inverse(self):
        q, expected = pauli_quorum()
        assert np.abs(gram_matrix(q) - 2 * np.eye(4)).max() <= 1e-12
        dual = dual_via_gram_inverse(q)
        for b, e in zip(dual.elements, expected.elements):
            assert np.abs(b - e).max() <= 1e-12

    def test_subspace_dual_with_dropped_element(self):
        q = Quorum.from_elements([SZ, 2 * SZ, SX])
        dual = dual_via_gram_schmidt(q, allow_subspace=True)
        assert dual.kept_mask == (True, False, True)
        assert np.abs(dual.elements[0] - SZ / 2).max() <= 1e-12
        assert np.abs(dual.elements[1]).max() == 0
        assert np.abs(dual.elements[2] - SX / 2).max() <= 1e-12

    def test_incomplete_without_flag_raises(self):
        q = Quorum.from_elements([SX, SY, SZ])
        with pytest.raises(IncompleteQuorumError) as err:
            dual_via_gram_schmidt(q)
        assert err.value.report.rank == 3

    def test_orthonormal_basis_is_self_dual(self):
        q = Quorum.from_elements([SX / np.sqrt(2), SY / np.sqrt(2), SZ / np.sqrt(2), EYE2 / np.sqrt(2)])
        dual = dual_via_gram_inverse(q)
        for b, c in zip(dual.elements, q.elements):
            assert np.abs(b - c).max() <= 1e-12

    def test_duality_relation_random_d3(self):
        q = random_quorum(3, 9, seed=5)
        dual_gs = dual_via_gram_schmidt(q)
        dual_gram = dual_via_gram_inverse(q)
        for dual in (dual_gs, dual_gram):
            assert np.abs(duality_matrix(q, dual) - np.eye(9)).max() <= 1e-10
        for a, b in zip(dual_gs.elements, dual_gram.elements):
            assert hs_norm(a - b) <= 1e-8

    def test_dependent_set_rejected_by_gram_inverse(self):
        q = Quorum.from_elements([SZ, 2 * SZ, SX])
        with pytest.raises(SingularGramError):
            dual_via_gram_inverse(q)

    @given(st.integers(0, 500), st.sampled_from([2, 3]))
    @settings(max_examples=25, deadline=None)
    def test_dual_route_agreement(self, seed, dim):
        q = random_quorum(dim, dim * dim, seed)
        dual_gs = dual_via_gram_schmidt(q)
        dual_gram = dual_via_gram_inverse(q)
        assert max(
            hs_norm(a - b) for a, b in zip(dual_gs.elements, dual_gram.elements)
        ) <= 1e-8

    def test_elimination_leaves_retained_duals_unchanged(self, rng):
        q = random_quorum(2, 4, seed=21)
        base = dual_via_gram_schmidt(q)
        combo = 0.3 * q.elements[0] - 1.7 * q.elements[2] + 0.4j * q.elements[3]
        extended = Quorum.from_elements(list(q.elements) + [combo])
        dual = dual_via_gram_schmidt(extended)
        assert dual.kept_mask == (True, True, True, True, False)
        for n in range(4):
            assert hs_norm(dual.elements[n] - base.elements[n]) <= 1e-9
        assert hs_norm(dual.elements[4]) <= 1e-12


class TestReproducingKernel:
    def test_pauli_pair(self):
        q, dual = pauli_quorum()
        assert reproducing_kernel_residual(q, dual) <= 1e-12

    def test_orthonormal_self_pair(self):
        q = Quorum.from_elements([SX / np.sqrt(2), SY / np.sqrt(2), SZ / np.sqrt(2), EYE2 / np.sqrt(2)])
        dual = dual_via_gram_inverse(q)
        assert reproducing_kernel_residual(q, dual) <= 1e-12

    def test_random_independent_pair(self):
        q = random_quorum(2, 4, seed=3)
        dual = dual_via_gram_inverse(q)
        assert reproducing_kernel_residual(q, dual) <= 1e-10


class TestSpanningDefinitions:
    def test_pauli_all_pass(self):
        q, dual = pauli_quorum()
        report = verify_spanning_definitions(q, dual, trials=50, seed=42)
        assert report.complete and report.definitions_agree
        assert all(chk.passed for chk in report.checks.values())
        assert report.checks["i"].residual <= 1e-10
        assert report.checks["iii"].residual <= 1e-10
        assert report.checks["iv"].residual <= 1e-10

    def test_incomplete_fails_consistently(self):
        q = Quorum.from_elements([SX, SY, SZ])
        dual = dual_via_gram_schmidt(q, allow_subspace=True)
        report = verify_spanning_definitions(q, dual, trials=20, seed=0)
        assert not report.complete and report.definitions_agree
        assert not any(chk.passed for chk in report.checks.values())
        assert np.abs(report.defect_witness - EYE2 / np.sqrt(2)).max() <= 1e-12

    def test_random_complete_d3(self):
        q = random_quorum(3, 9, seed=12)
        dual = dual_via_gram_inverse(q)
        report = verify_spanning_definitions(q, dual, trials=50, seed=1)
        assert report.complete and report.definitions_agree
        assert all(chk.residual <= 1e-9 for chk in report.checks.values())

    def test_frame_identity_whenever_complete(self):
        for seed in range(10):
            q = random_quorum(2, 6, seed)  # overcomplete, needs elimination
            assert completeness_check(q).complete
            dual = dual_via_gram_schmidt(q)
            s = superop_from_frame(q.elements, dual.elements)
            assert np.abs(s - np.eye(4)).max() <= 1e-10

    def test_parseval_sum_rule(self):
        q = random_quorum(3, 9, seed=8)
        dual = dual_via_gram_inverse(q)
        rng = np.random.default_rng(99)
        for _ in range(100):
            a = random_operator(3, rng)
            total = sum(
                hs_inner(a, c) * hs_inner(b, a)
                for c, b in zip(q.elements, dual.elements)
            )
            norm_sq = hs_norm(a) ** 2
            assert abs(total - norm_sq) <= 1e-9 * (1 + norm_sq)

    def test_reconstruction_bound(self):
        q = random_quorum(2, 4, seed=17)
        dual = dual_via_gram_inverse(q)
        rng = np.random.default_rng(5)
        for _ in range(50):
            a = random_operator(2, rng)
            recon = sum(hs_inner(b, a) * c for c, b in zip(q.elements, dual.elements))
            assert hs_norm(a - recon) <= 1e-9 * (1 + hs_norm(a))


class TestQuorumType:
    def test_labels_default(self):
        q = Quorum.from_elements([SX, SY])
        assert q.labels == ("C_0", "C_1")

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(ValueError):
            Quorum.from_elements([SX, np.eye(3)])

    def test_empty_rejected(self):
        with pytest.raises(Exception):
            Quorum.from_elements([])

    def test_elements_immutable(self):
        q = Quorum.from_elements([SX])
        with pytest.raises(ValueError):
            q.elements[0][0, 0] = 5.0
