import numpy as np
import pytest

from mimodist import (
    ConfigError,
    RngStream,
    ScenarioConfig,
    ShapeError,
    diag_of,
    sample_channel,
)


class TestScenarioConfig:
    def test_defaults_are_valid(self):
        cfg = ScenarioConfig()
        assert cfg.M == 200 and cfg.kappa == 0.99 and cfg.boff_db == 7.0
        assert cfg.snr_db == pytest.approx(0.0)

    @pytest.mark.parametrize(
        "field,value,fragment",
        [
            ("kappa", 1.5, "[0,1]"),
            ("kappa", -0.1, "[0,1]"),
            ("M", 0, "M"),
            ("K", 0, "K"),
            ("p", 0.0, "p"),
            ("sigma2", -1.0, "sigma2"),
            ("alpha", -0.2, "alpha"),
            ("boff_db", -3.0, "boff_db"),
            ("trials", 0, "trials"),
            ("combiner", "ZF", "combiner"),
            ("distortion_mode", "sparse", "distortion_mode"),
            ("diag_scope", "combiner_only", "diag_scope"),
        ],
    )
    def test_validation_names_offending_key(self, field, value, fragment):
        with pytest.raises(ConfigError) as exc:
            ScenarioConfig(**{field: value})
        assert fragment in str(exc.value)

    def test_pathloss_must_match_ue_count(self):
        with pytest.raises(ConfigError):
            ScenarioConfig(K=3, pathloss=(1.0, 1.0))
        with pytest.raises(ConfigError):
            ScenarioConfig(K=2, pathloss=(1.0, -1.0))

    def test_with_updates_revalidates(self):
        cfg = ScenarioConfig(K=4)
        assert cfg.with_updates(K=6).K == 6
        with pytest.raises(ConfigError):
            cfg.with_updates(kappa=2.0)


class TestSampleChannel:
    def test_mean_column_energy(self):
        # E{||h_k||^2} = M for unit-variance fading
        cfg = ScenarioConfig(M=200, K=10, trials=1)
        total = 0.0
        trials = 10**4 // 10
        for t in range(trials):
            H = sample_channel(cfg, RngStream(3, t)).H
            total += np.mean(np.sum(np.abs(H) ** 2, axis=0))
        assert abs(total / trials / cfg.M - 1.0) < 0.01

    def test_mean_received_power_per_antenna(self):
        # E{[C_uu]_mm} = p K
        cfg = ScenarioConfig(M=200, K=10, p=2.0, trials=1)
        total = 0.0
        trials = 1000
        for t in range(trials):
            C = sample_channel(cfg, RngStream(4, t)).C_uu
            total += float(np.real(np.diagonal(C)).mean())
        assert abs(total / trials / (cfg.p * cfg.K) - 1.0) < 0.02

    def test_fixed_seed_reproduces_channel(self):
        cfg = ScenarioConfig(M=16, K=3, trials=1)
        a = sample_channel(cfg, RngStream(9, 5))
        b = sample_channel(cfg, RngStream(9, 5))
        np.testing.assert_array_equal(a.H, b.H)
        np.testing.assert_array_equal(a.C_uu, b.C_uu)

    def test_covariance_recomputable_and_psd(self):
        cfg = ScenarioConfig(M=12, K=4, p=3.0, trials=1)
        chan = sample_channel(cfg, RngStream(1, 0))
        rebuilt = cfg.p * chan.H @ chan.H.conj().T
        rel = np.linalg.norm(chan.C_uu - rebuilt) / np.linalg.norm(chan.C_uu)
        assert rel <= 1e-12
        lam = np.linalg.eigvalsh(chan.C_uu)
        assert lam[0] >= -1e-10 * lam[-1]

    @pytest.mark.parametrize("M,K", [(8, 3), (4, 6)])
    def test_rank_is_min_m_k(self, M, K):
        cfg = ScenarioConfig(M=M, K=K, trials=1)
        for t in range(20):
            C = sample_channel(cfg, RngStream(2, t)).C_uu
            lam = np.linalg.eigvalsh(C)
            rank = int(np.sum(lam > 1e-10 * lam[-1]))
            assert rank == min(M, K)

    def test_columns_statistically_independent(self):
        cfg = ScenarioConfig(M=8, K=3, trials=1)
        trials = 10**4
        cross = np.zeros((cfg.M, cfg.M), dtype=complex)
        for t in range(trials):
            H = sample_channel(cfg, RngStream(6, t)).H
            cross += np.outer(H[:, 0], H[:, 1].conj())
        cross /= trials
        assert np.max(np.abs(cross)) <= 3.0 / np.sqrt(trials)

    def test_pathloss_scales_column_power(self):
        cfg = ScenarioConfig(M=64, K=2, trials=1, pathloss=(1.0, 4.0))
        powers = np.zeros(2)
        trials = 400
        for t in range(trials):
            H = sample_channel(cfg, RngStream(8, t)).H
            powers += np.sum(np.abs(H) ** 2, axis=0) / cfg.M
        powers /= trials
        assert abs(powers[0] - 1.0) < 0.1
        assert abs(powers[1] - 4.0) < 0.4


class TestDiagOf:
    def test_diagonal_input_unchanged(self):
        D = np.diag([1.0, 2.0, 3.0])
        np.testing.assert_array_equal(diag_of(D), D)

    def test_all_ones(self):
        np.testing.assert_array_equal(diag_of(np.ones((2, 2))), np.eye(2))

    def test_idempotent(self, rng_np):
        C = rng_np.standard_normal((4, 4)) + 1j * rng_np.standard_normal((4, 4))
        once = diag_of(C)
        np.testing.assert_array_equal(diag_of(once), once)

    def test_rejects_non_square(self):
        with pytest.raises(ShapeError):
            diag_of(np.ones((2, 3)))
