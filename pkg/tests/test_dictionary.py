import numpy as np
import pytest

import exemplar_lca as xl
from exemplar_lca.dictionary import (
    MaterializedOperator,
    MatrixFreeOperator,
    check_operator,
    materialize_gramian,
    matrix_free_operator,
    resolve_operator,
)
from exemplar_lca.workload import OpCounter
from exemplar_lca.validation import DataError


class TestBuildDictionary:
    def test_hand_normalization(self):
        d = xl.build_dictionary([[3, 4], [0, 5]], [0, 1], 2)
        np.testing.assert_allclose(d.atoms, [[0.6, 0.8], [0.0, 1.0]], atol=1e-6)
        np.testing.assert_allclose(d.atom_norms, [5.0, 5.0], atol=1e-6)
        assert d.m == 2 and d.n == 2 and d.class_count == 2

    def test_identity_rows_unchanged(self):
        eye = np.eye(3, dtype=np.float32)
        d = xl.build_dictionary(eye, [0, 1, 2], 3)
        np.testing.assert_array_equal(d.atoms, eye)
        np.testing.assert_allclose(d.atom_norms, 1.0)

    def test_norms_recomputed_posthoc(self, rng):
        feats = rng.uniform(0, 255, size=(500, 784)).astype(np.float32)
        d = xl.build_dictionary(feats, np.arange(500) % 10, 10)
        norms = np.linalg.norm(d.atoms.astype(np.float64), axis=1)
        assert np.abs(norms - 1.0).max() <= 1e-6
        expected = np.linalg.norm(feats.astype(np.float64), axis=1)
        np.testing.assert_allclose(d.atom_norms, expected, rtol=1e-6)

    def test_row_order_preserved(self, rng):
        feats = rng.standard_normal((10, 5)).astype(np.float32)
        d = xl.build_dictionary(feats, np.arange(10) % 2, 2)
        for i in range(10):
            np.testing.assert_allclose(
                d.atoms[i] * d.atom_norms[i], feats[i], rtol=1e-5, atol=1e-6
            )

    def test_zero_norm_row_rejected_with_index(self):
        feats = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]], dtype=np.float32)
        with pytest.raises(DataError, match="row 1"):
            xl.build_dictionary(feats, [0, 0, 1], 2)

    def test_label_out_of_range_rejected(self):
        with pytest.raises(DataError, match="out of range"):
            xl.build_dictionary(np.eye(2, dtype=np.float32), [0, 2], 2)

    def test_missing_class_rejected(self):
        with pytest.raises(DataError, match="class 2 has no atoms"):
            xl.build_dictionary(np.eye(3, dtype=np.float32), [0, 1, 1], 3)

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            xl.build_dictionary(np.zeros((0, 4), dtype=np.float32), [], 1)
        with pytest.raises(DataError):
            xl.build_dictionary(np.zeros((4, 0), dtype=np.float32), [0, 0, 0, 1], 2)

    def test_non_finite_rejected(self):
        feats = np.array([[1.0, np.nan], [0.0, 1.0]], dtype=np.float32)
        with pytest.raises(DataError, match="non-finite"):
            xl.build_dictionary(feats, [0, 1], 2)

    def test_normalization_idempotent(self, rng):
        feats = rng.standard_normal((40, 16)).astype(np.float32) * 7.5
        d1 = xl.build_dictionary(feats, np.arange(40) % 4, 4)
        d2 = xl.build_dictionary(d1.atoms, d1.labels, d1.class_count)
        np.testing.assert_array_equal(d1.atoms, d2.atoms)

    def test_atoms_immutable(self, small_dict):
        with pytest.raises(ValueError):
            small_dict.atoms[0, 0] = 9.0


class TestAppendAtoms:
    def test_append_one(self, small_dict):
        d = xl.append_atoms(small_dict, [[2.0, 0.0, 0.0, 0.0]], [1])
        assert d.m == small_dict.m + 1
        np.testing.assert_array_equal(d.atoms[:6], small_dict.atoms)
        np.testing.assert_array_equal(d.atom_norms[:6], small_dict.atom_norms)
        np.testing.assert_allclose(d.atoms[6], [1, 0, 0, 0])
        assert d.atom_norms[6] == pytest.approx(2.0)

    def test_new_class_grows_count(self, small_dict):
        d = xl.append_atoms(small_dict, [[0, 0, 0, 3.0]], [3])
        assert d.class_count == 4

    def test_gap_in_classes_rejected(self, small_dict):
        with pytest.raises(DataError, match="class 3 has no atoms"):
            xl.append_atoms(small_dict, [[0, 0, 0, 3.0]], [4])

    def test_width_mismatch_rejected(self, small_dict):
        with pytest.raises(DataError, match="width"):
            xl.append_atoms(small_dict, [[1.0, 2.0]], [0])

    def test_zero_row_rejected(self, small_dict):
        with pytest.raises(DataError, match="zero L2 norm"):
            xl.append_atoms(small_dict, [[0.0, 0.0, 0.0, 0.0]], [0])

    def test_arithmetic_cost_linear_in_p_independent_of_m(self, rng):
        # operation count scales with P and does not depend on M
        counts = {}
        for m in (64, 512):
            feats = rng.standard_normal((m, 16)).astype(np.float32)
            base = xl.build_dictionary(feats, np.arange(m) % 4, 4)
            for p in (1, 10, 100):
                extra = rng.standard_normal((p, 16)).astype(np.float32)
                counter = OpCounter()
                xl.append_atoms(base, extra, np.zeros(p, dtype=int), counter=counter)
                counts[(m, p)] = counter.total
        for p in (1, 10, 100):
            assert counts[(64, p)] == counts[(512, p)]
        assert counts[(64, 100)] == 100 * counts[(64, 1)]
        assert counts[(64, 10)] == 10 * counts[(64, 1)]


class TestGramian:
    def test_orthonormal_identity(self, ortho_dict):
        op = materialize_gramian(ortho_dict)
        np.testing.assert_allclose(op.gram, np.eye(4), atol=1e-7)

    def test_duplicate_atoms(self):
        d = xl.build_dictionary([[1.0, 0.0], [1.0, 0.0]], [0, 1], 2)
        op = materialize_gramian(d)
        np.testing.assert_allclose(op.gram, [[1, 1], [1, 1]], atol=1e-6)

    def test_matches_bruteforce_inner_products(self, rng):
        feats = rng.standard_normal((50, 20)).astype(np.float32)
        d = xl.build_dictionary(feats, np.arange(50) % 5, 5)
        op = materialize_gramian(d)
        atoms = d.atoms.astype(np.float64)
        expected = np.empty((50, 50))
        for i in range(50):
            for j in range(50):
                expected[i, j] = float(np.dot(atoms[i], atoms[j]))
        assert np.abs(op.gram - expected).max() <= 1e-6
        # float64 accumulation against the double loop
        assert np.abs(op.gram.astype(np.float64) - expected).max() <= 1e-6

    def test_symmetry_exact_and_unit_diagonal(self, rng):
        feats = rng.standard_normal((30, 8)).astype(np.float32)
        d = xl.build_dictionary(feats, np.arange(30) % 3, 3)
        op = materialize_gramian(d)
        np.testing.assert_array_equal(op.gram, op.gram.T)
        assert np.abs(np.diagonal(op.gram) - 1.0).max() <= 1e-6

    def test_budget_rejection_suggests_matrix_free(self, small_dict):
        with pytest.raises(DataError, match="144 bytes.*budget is 100"):
            materialize_gramian(small_dict, budget_bytes=100)
        with pytest.raises(DataError, match="matrix_free"):
            materialize_gramian(small_dict, budget_bytes=100)

    def test_resolve_operator_auto(self, small_dict):
        assert isinstance(resolve_operator(small_dict, "auto"), MaterializedOperator)
        assert isinstance(
            resolve_operator(small_dict, "auto", budget_bytes=10), MatrixFreeOperator
        )
        with pytest.raises(DataError, match="unknown backend"):
            resolve_operator(small_dict, "sideways")


class TestInhibition:
    def test_zero_activations(self, small_dict):
        op = materialize_gramian(small_dict)
        np.testing.assert_array_equal(
            xl.inhibition(op, np.zeros(6)), np.zeros(6)
        )

    def test_hand_case_excludes_diagonal(self):
        d = xl.build_dictionary([[1.0, 0.0], [1.0, 0.0]], [0, 1], 2)
        op = materialize_gramian(d)
        out = xl.inhibition(op, np.array([0.5, 0.0]))
        np.testing.assert_allclose(out, [0.0, 0.5], atol=1e-7)

    def test_backends_agree_sparse(self, rng):
        feats = rng.standard_normal((100, 32)).astype(np.float32)
        d = xl.build_dictionary(feats, np.arange(100) % 10, 10)
        mat, mf = materialize_gramian(d), matrix_free_operator(d)
        a = np.zeros(100)
        a[rng.choice(100, size=5, replace=False)] = rng.standard_normal(5)
        out_mat, out_mf = mat.apply(a), mf.apply(a)
        scale = max(np.abs(out_mat).max(), 1e-12)
        assert np.abs(out_mat - out_mf).max() <= 1e-6 * scale

    def test_backend_equivalence_100_random_pairs(self, rng):
        for trial in range(100):
            m = int(rng.integers(5, 60))
            n = int(rng.integers(3, 24))
            feats = rng.standard_normal((m, n)).astype(np.float32)
            d = xl.build_dictionary(feats, np.zeros(m, dtype=int), 1)
            k = int(rng.integers(1, max(2, m // 3)))
            a = np.zeros(m)
            a[rng.choice(m, size=k, replace=False)] = rng.standard_normal(k)
            out_mat = materialize_gramian(d).apply(a)
            out_mf = matrix_free_operator(d).apply(a)
            scale = max(np.abs(out_mat).max(), 1e-12)
            assert np.abs(out_mat - out_mf).max() <= 1e-6 * scale

    def test_length_mismatch_rejected(self, small_dict):
        op = materialize_gramian(small_dict)
        with pytest.raises(DataError, match="length 4, expected 6"):
            xl.inhibition(op, np.zeros(4))

    def test_batch_matches_single(self, rng, small_dict):
        acts = rng.standard_normal((3, 6)).astype(np.float32)
        acts[np.abs(acts) < 0.9] = 0.0
        for op in (materialize_gramian(small_dict), matrix_free_operator(small_dict)):
            batch = op.apply_batch(acts.copy())
            for i in range(3):
                single = op.apply(acts[i].astype(np.float64))
                np.testing.assert_allclose(batch[i], single, rtol=1e-4, atol=1e-5)

    def test_operator_dictionary_identity_enforced(self, small_dict):
        grown = xl.append_atoms(small_dict, [[1.0, 0, 0, 0]], [0])
        op = materialize_gramian(small_dict)
        with pytest.raises(DataError, match="different dictionary"):
            check_operator(op, grown)
