"""Instantaneous SINRs and ergodic spectral efficiency.

Per coherence block the achievable rate of UE k is lower bounded by
log2(1 + gamma_k), where gamma_k treats inter-user interference, the
additive distortion, and noise as worst-case uncorrelated noise. With
imperfect UE transmit hardware a fraction (1 - kappa) of each UE's power
turns into transmit distortion received over the same effective channel,
which adds a self-interference term to the denominator and caps the SINR
at kappa / (1 - kappa). The ergodic bound averages log2(1 + gamma) over
independent channel realizations.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, ScenarioConfig, diag_of, sample_channel
from .combining import _channel_matrix, _gains_vector, make_combiner
from .errors import NumericalError, ShapeError
from .hardware import (
    amplifier_gain_coeff,
    bussgang_gain_third_order,
    distortion_covariance_third_order,
)
from .numerics import RngStream, hpd_solve

IDEAL_UE = "ideal_ue"
IMPAIRED_UE = "impaired_ue"


@dataclass(frozen=True)
class SinrReport:
    """Per-UE SINRs and SEs for one channel realization."""

    gamma: np.ndarray
    se: np.ndarray
    variant: str
    distortion_mode: str


@dataclass(frozen=True)
class ErgodicResult:
    """Monte Carlo estimate of the ergodic SE bound.

    ``per_ue_se`` and ``per_ue_stderr`` have one entry per UE;
    ``trial_mean_se`` keeps the UE-averaged SE of every trial so paired
    comparisons between runs with the same seed stay possible.
    """

    per_ue_se: np.ndarray
    per_ue_stderr: np.ndarray
    trial_mean_se: np.ndarray
    trials: int
    config: ScenarioConfig

    @property
    def mean_se(self) -> float:
        """SE per UE averaged over UEs and trials (bit/s/Hz)."""
        return float(np.mean(self.trial_mean_se))

    @property
    def mean_se_stderr(self) -> float:
        if self.trials < 2:
            return float("nan")
        return float(np.std(self.trial_mean_se, ddof=1) / np.sqrt(self.trials))


def _interference_terms(H, D, v: np.ndarray, p: float):
    """Effective channels G = D H and the weights w = G^H v."""
    H = _channel_matrix(H)
    d = _gains_vector(D)
    G = d[:, None] * H
    w = G.conj().T @ np.asarray(v, dtype=complex)
    return G, w


def sinr_impaired_ue(v, H, D, C_eta, p, sigma2, kappa, k) -> float:
    """SINR of UE k with transmit-hardware quality kappa in [0, 1].

        kappa p |v^H D h_k|^2
        -----------------------------------------------------------------
        sum_{i != k} p |v^H D h_i|^2 + (1-kappa) p |v^H D h_k|^2
            + v^H C_eta v + sigma2 ||v||^2

    kappa = 1 recovers the ideal-UE SINR; kappa = 0 leaves no desired
    signal at all.
    """
    if not 0.0 <= kappa <= 1.0:
        raise ShapeError(f"kappa must be in [0,1], got {kappa}")
    v = np.asarray(v, dtype=complex)
    if not np.any(v):
        raise ShapeError("combining vector must be nonzero")
    _, w = _interference_terms(H, D, v, p)
    pw = p * np.abs(w) ** 2
    signal = kappa * pw[k]
    C_eta = np.asarray(C_eta)
    distortion = float(np.real(np.vdot(v, C_eta @ v)))
    noise = sigma2 * float(np.real(np.vdot(v, v)))
    interference = float(np.sum(pw)) - pw[k] + (1.0 - kappa) * pw[k]
    return float(signal / (interference + distortion + noise))


def sinr_ideal_ue(v, H, D, C_eta, p, sigma2, k) -> float:
    """SINR of UE k with ideal UE hardware (kappa = 1)."""
    return sinr_impaired_ue(v, H, D, C_eta, p, sigma2, 1.0, k)


def sinr_optimal(H, D, C_eta, p, sigma2, k) -> float:
    """Maximum SINR of UE k over all combining vectors.

    Closed form of the generalized Rayleigh quotient maximum:
    p (Dh_k)^H (sum_{i != k} p Dh_i h_i^H D^H + C_eta + sigma2 I)^{-1} Dh_k.
    """
    H = _channel_matrix(H)
    d = _gains_vector(D)
    M = H.shape[0]
    G = d[:, None] * H
    g_k = G[:, k]
    A_k = p * (G @ G.conj().T) - p * np.outer(g_k, g_k.conj())
    A_k += np.asarray(C_eta) + sigma2 * np.eye(M)
    x = hpd_solve(A_k, g_k)
    return float(p * np.real(np.vdot(g_k, x)))


def _distortion_pair(cfg: ScenarioConfig, C_full: np.ndarray):
    """Covariances used for combiner construction and SINR evaluation."""
    if cfg.distortion_mode == "full":
        return C_full, C_full
    C_diag = diag_of(C_full)
    if cfg.diag_scope == "both":
        return C_diag, C_diag
    return C_full, C_diag  # sinr_only: combiner keeps the full covariance


def evaluate_realization(cfg: ScenarioConfig, chan: ChannelRealization) -> SinrReport:
    """Per-UE SINRs and SE bounds for one realization under ``cfg``."""
    a = amplifier_gain_coeff(cfg.alpha, cfg.boff_db, cfg.p, cfg.K)
    gains = bussgang_gain_third_order(a, chan.C_uu)
    C_full = distortion_covariance_third_order(a, chan.C_uu)
    C_comb, C_sinr = _distortion_pair(cfg, C_full)
    comb = make_combiner(
        cfg.combiner, chan, gains, C_comb, cfg.p, cfg.sigma2, cfg.distortion_mode
    )
    gamma = np.empty(cfg.K)
    for k in range(cfg.K):
        gamma[k] = sinr_impaired_ue(
            comb.V[:, k], chan, gains, C_sinr, cfg.p, cfg.sigma2, cfg.kappa, k
        )
    variant = IDEAL_UE if cfg.kappa == 1.0 else IMPAIRED_UE
    return SinrReport(
        gamma=gamma,
        se=np.log2(1.0 + gamma),
        variant=variant,
        distortion_mode=cfg.distortion_mode,
    )


def _trial_row(cfg: ScenarioConfig, t: int) -> np.ndarray:
    rng = RngStream(cfg.seed, t)
    chan = sample_channel(cfg, rng)
    try:
        return evaluate_realization(cfg, chan).se
    except NumericalError as err:
        raise NumericalError(f"trial {t}: {err}", pivot=err.pivot) from err


def ergodic_se(cfg: ScenarioConfig, n_threads: int = 1) -> ErgodicResult:
    """Average the per-realization SE bound over ``cfg.trials`` blocks.

    Trial t draws its channel from the stream (cfg.seed, t), so the
    result is a pure function of the config no matter how many worker
    threads fill in the trials; aggregation always runs in trial order
    over the preallocated per-trial array.
    """
    se = np.empty((cfg.trials, cfg.K))

    def fill(lo: int, hi: int) -> None:
        for t in range(lo, hi):
            se[t] = _trial_row(cfg, t)

    n_threads = max(1, int(n_threads))
    if n_threads == 1 or cfg.trials < 2 * n_threads:
        fill(0, cfg.trials)
    else:
        bounds = np.linspace(0, cfg.trials, n_threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            futures = [
                pool.submit(fill, int(lo), int(hi))
                for lo, hi in zip(bounds[:-1], bounds[1:])
            ]
            for f in futures:
                f.result()

    return ErgodicResult(
        per_ue_se=se.mean(axis=0),
        per_ue_stderr=se.std(axis=0, ddof=1) / np.sqrt(cfg.trials)
        if cfg.trials > 1
        else np.full(cfg.K, np.nan),
        trial_mean_se=se.mean(axis=1),
        trials=cfg.trials,
        config=cfg,
    )
