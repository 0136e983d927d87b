import numpy as np
import pytest

from mrvae.core.exceptions import DimensionError
from mrvae.linalg.decomp import MAX_DIM, svd, sym_eig
from mrvae.linalg.random import RngStream


def _random_symmetric(rng, n):
    a = rng.standard_normal((n, n))
    return a + a.T


class TestSymEig:
    @pytest.mark.parametrize("n", [1, 2, 5, 16])
    def test_reconstructs_input(self, rng, n):
        m = _random_symmetric(rng, n)
        spec = sym_eig(m)
        np.testing.assert_allclose(spec.reconstruct(), m, atol=1e-10)

    def test_eigenvalues_descending_and_match_numpy(self, rng):
        m = _random_symmetric(rng, 12)
        spec = sym_eig(m)
        assert np.all(np.diff(spec.eigvals) <= 0)
        np.testing.assert_allclose(spec.eigvals, np.sort(np.linalg.eigvalsh(m))[::-1], atol=1e-10)

    def test_orthonormal_vectors_with_sign_convention(self, rng):
        spec = sym_eig(_random_symmetric(rng, 9))
        v = spec.eigvecs
        np.testing.assert_allclose(v.T @ v, np.eye(9), atol=1e-12)
        idx = np.argmax(np.abs(v), axis=0)
        assert np.all(v[idx, np.arange(9)] > 0)

    def test_diagonal_input_is_exact(self):
        spec = sym_eig(np.diag([1.0, 5.0, 3.0]))
        np.testing.assert_array_equal(spec.eigvals, [5.0, 3.0, 1.0])

    def test_rejects_non_symmetric(self):
        with pytest.raises(DimensionError):
            sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_non_square(self):
        with pytest.raises(DimensionError):
            sym_eig(np.ones((2, 3)))

    def test_rejects_oversized(self):
        with pytest.raises(DimensionError):
            sym_eig(np.eye(MAX_DIM + 1))

    def test_deterministic(self, rng):
        m = _random_symmetric(rng, 7)
        a, b = sym_eig(m), sym_eig(m)
        np.testing.assert_array_equal(a.eigvecs, b.eigvecs)
        np.testing.assert_array_equal(a.eigvals, b.eigvals)


class TestSvd:
    @pytest.mark.parametrize("shape", [(8, 4), (4, 8), (6, 6), (10, 1)])
    def test_reconstructs_input(self, rng, shape):
        m = rng.standard_normal(shape)
        left, sing, right = svd(m)
        np.testing.assert_allclose((left * sing) @ right.T, m, atol=1e-10)
        k = min(shape)
        np.testing.assert_allclose(left.T @ left, np.eye(k), atol=1e-10)
        np.testing.assert_allclose(right.T @ right, np.eye(k), atol=1e-10)

    def test_singular_values_match_numpy(self, rng):
        m = rng.standard_normal((9, 5))
        _, sing, _ = svd(m)
        np.testing.assert_allclose(sing, np.linalg.svd(m, compute_uv=False), atol=1e-10)

    def test_rank_deficient_completes_basis(self):
        m = np.zeros((5, 3))
        m[:, 0] = [1.0, 2.0, 0.0, 0.0, 1.0]
        left, sing, right = svd(m)
        assert sing[1] == 0.0 and sing[2] == 0.0
        np.testing.assert_allclose(left.T @ left, np.eye(3), atol=1e-12)
        np.testing.assert_allclose((left * sing) @ right.T, m, atol=1e-12)

    def test_right_vectors_follow_sign_convention(self):
        left, sing, right = svd(RngStream(7).standard_normal((6, 3)))
        idx = np.argmax(np.abs(right), axis=0)
        assert np.all(right[idx, np.arange(3)] > 0)
