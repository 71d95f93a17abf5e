import threading

import numpy as np
import pytest

from mimodist import (
    NotPSDError,
    NumericalError,
    RngStream,
    ShapeError,
    correlated_gaussian_sample,
    hpd_solve,
    pseudo_inverse,
    sample_standard_complex_gaussian,
)
from mimodist.numerics import psd_sqrt, require_hermitian


def random_psd(rng, M, K):
    """Rank-K PSD matrix G G^H from a complex Gaussian factor."""
    G = np.sqrt(0.5) * (rng.standard_normal((M, K)) + 1j * rng.standard_normal((M, K)))
    return G @ G.conj().T


class TestStandardComplexGaussian:
    def test_moments_at_large_n(self):
        x = sample_standard_complex_gaussian(10**6, RngStream(42))
        assert abs(x.mean()) < 0.005
        power = np.abs(x) ** 2
        # |x|^2 is exponential with unit mean and unit variance
        assert abs(power.mean() - 1.0) < 0.01
        assert abs(power.var() - 1.0) < 0.01

    def test_repeated_calls_are_identical(self):
        s = RngStream(7, 3)
        a = sample_standard_complex_gaussian(1, s)
        b = sample_standard_complex_gaussian(1, s)
        assert a == b

    def test_stream_separation(self):
        a = sample_standard_complex_gaussian(4, RngStream(7, 0))
        b = sample_standard_complex_gaussian(4, RngStream(7, 1))
        assert not np.allclose(a, b)

    def test_empty_dimension_rejected(self):
        with pytest.raises(ShapeError):
            sample_standard_complex_gaussian(0, RngStream(1))

    def test_thread_count_does_not_change_streams(self):
        expected = [sample_standard_complex_gaussian(100, RngStream(5, i)) for i in range(4)]
        got = [None] * 4

        def work(i):
            got[i] = sample_standard_complex_gaussian(100, RngStream(5, i))

        threads = [threading.Thread(target=work, args=(i,)) for i in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for e, g in zip(expected, got):
            np.testing.assert_array_equal(e, g)

    def test_invalid_stream_parameters(self):
        with pytest.raises(ShapeError):
            RngStream(-1)
        with pytest.raises(ShapeError):
            RngStream(3, -2)


class TestCorrelatedGaussianSample:
    def test_identity_covariance_matches_standard_sampler(self):
        n = 10**5
        x = correlated_gaussian_sample(np.eye(4), RngStream(11), size=n)
        power = np.abs(x) ** 2
        assert np.allclose(power.mean(axis=1), 1.0, atol=0.02)
        assert abs(x.mean()) < 0.01

    def test_empirical_covariance_of_rank_deficient_input(self, rng_np):
        C = random_psd(rng_np, M=6, K=2)
        n = 10**5
        x = correlated_gaussian_sample(C, RngStream(12), size=n)
        C_hat = (x @ x.conj().T) / n
        rel = np.linalg.norm(C_hat - C) / np.linalg.norm(C)
        assert rel < 0.02

    def test_zero_covariance_gives_zero_vector(self):
        x = correlated_gaussian_sample(np.zeros((3, 3)), RngStream(1))
        np.testing.assert_array_equal(x, np.zeros(3))

    def test_non_hermitian_rejected(self):
        C = np.array([[1.0, 1.0], [0.0, 1.0]])
        with pytest.raises(ShapeError):
            correlated_gaussian_sample(C, RngStream(1))

    def test_negative_eigenvalue_rejected(self):
        C = np.diag([1.0, -0.5])
        with pytest.raises(NotPSDError):
            correlated_gaussian_sample(C, RngStream(1))

    def test_convergence_rate_consistent_with_sqrt_n(self, rng_np):
        C = random_psd(rng_np, M=4, K=4)

        def err(n, idx):
            x = correlated_gaussian_sample(C, RngStream(99, idx), size=n)
            return np.linalg.norm((x @ x.conj().T) / n - C) / np.linalg.norm(C)

        # average a few streams to stabilize the ratio; expect ~10x decay
        # between n and 100 n
        e_small = np.mean([err(10**3, i) for i in range(5)])
        e_large = np.mean([err(10**5, 10 + i) for i in range(5)])
        assert e_small / e_large > 3.0

    def test_sqrt_factor_reproduces_matrix(self, rng_np):
        C = random_psd(rng_np, M=5, K=3)
        L = psd_sqrt(C)
        np.testing.assert_allclose(L @ L.conj().T, C, atol=1e-12 * np.linalg.norm(C))


class TestHpdSolve:
    def test_identity(self, rng_np):
        B = rng_np.standard_normal((4, 2)) + 1j * rng_np.standard_normal((4, 2))
        np.testing.assert_allclose(hpd_solve(np.eye(4), B), B, atol=1e-14)

    def test_scalar_scaling(self):
        X = hpd_solve(2.0 * np.eye(3), np.eye(3))
        np.testing.assert_allclose(X, 0.5 * np.eye(3), atol=1e-14)

    def test_residual_on_random_hpd(self, rng_np):
        G = rng_np.standard_normal((8, 8)) + 1j * rng_np.standard_normal((8, 8))
        A = G @ G.conj().T + np.eye(8)
        B = rng_np.standard_normal((8, 3)) + 1j * rng_np.standard_normal((8, 3))
        X = hpd_solve(A, B)
        assert np.linalg.norm(A @ X - B) / np.linalg.norm(B) < 1e-10

    def test_vector_rhs_keeps_shape(self, rng_np):
        A = 3.0 * np.eye(5)
        b = rng_np.standard_normal(5) + 0j
        x = hpd_solve(A, b)
        assert x.shape == (5,)
        np.testing.assert_allclose(x, b / 3.0, atol=1e-14)

    def test_non_pd_reports_pivot(self):
        A = np.diag([1.0, 1.0, -1.0])
        with pytest.raises(NumericalError) as exc:
            hpd_solve(A, np.eye(3))
        assert exc.value.pivot == 2

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            hpd_solve(np.eye(3), np.eye(4))


class TestPseudoInverse:
    def test_diagonal_rank_deficient(self):
        P = pseudo_inverse(np.diag([2.0, 0.0]))
        np.testing.assert_allclose(P, np.diag([0.5, 0.0]), atol=1e-14)

    def test_full_rank_inverse(self, rng_np):
        C = random_psd(rng_np, M=5, K=5) + np.eye(5)
        P = pseudo_inverse(C)
        np.testing.assert_allclose(C @ P, np.eye(5), atol=1e-9)

    def test_projects_onto_column_span(self, rng_np):
        # C = p H H^H with K < M: C^+ C acts as identity on span(H)
        H = np.sqrt(0.5) * (rng_np.standard_normal((8, 3)) + 1j * rng_np.standard_normal((8, 3)))
        C = 2.0 * H @ H.conj().T
        P = pseudo_inverse(C)
        s = rng_np.standard_normal(3) + 1j * rng_np.standard_normal(3)
        u = H @ s
        np.testing.assert_allclose(P @ C @ u, u, atol=1e-9 * np.linalg.norm(u))

    @pytest.mark.parametrize("K", [1, 3, 6])
    def test_moore_penrose_identities(self, rng_np, K):
        C = random_psd(rng_np, M=6, K=K)
        P = pseudo_inverse(C)
        scale = np.linalg.norm(C)
        assert np.linalg.norm(C @ P @ C - C) / scale < 1e-9
        assert np.linalg.norm(P @ C @ P - P) / np.linalg.norm(P) < 1e-9
        assert np.linalg.norm(C @ P - (C @ P).conj().T) / np.linalg.norm(C @ P) < 1e-9
        assert np.linalg.norm(P @ C - (P @ C).conj().T) / np.linalg.norm(P @ C) < 1e-9

    def test_zero_matrix(self):
        np.testing.assert_array_equal(pseudo_inverse(np.zeros((3, 3))), np.zeros((3, 3)))

    def test_non_hermitian_rejected(self):
        with pytest.raises(ShapeError):
            pseudo_inverse(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestRequireHermitian:
    def test_sampled_covariances_are_hermitian_to_tolerance(self, rng_np):
        C = random_psd(rng_np, M=7, K=4)
        rel = np.linalg.norm(C - C.conj().T) / np.linalg.norm(C)
        assert rel <= 1e-12
        require_hermitian(C)

    def test_rectangular_rejected(self):
        with pytest.raises(ShapeError):
            require_hermitian(np.ones((2, 3)))
