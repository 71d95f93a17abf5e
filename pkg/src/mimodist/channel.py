"""Rayleigh block-fading channel generation.

Channels are i.i.d. CN(0, I_M) per UE and redrawn independently in every
coherence block (one Monte Carlo trial = one block). The conditional
covariance of the noise-free received signal, C_uu = p * H * H^H, is
carried alongside H because every distortion quantity downstream is a
function of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, ShapeError
from .numerics import RngStream, _standard_complex

COMBINERS = ("MR", "DA-MR", "DA-MMSE")
DISTORTION_MODES = ("full", "diagonal")
DIAG_SCOPES = ("both", "sinr_only")


@dataclass(frozen=True)
class ScenarioConfig:
    """All parameters of one simulated uplink scenario.

    Powers (`p`, `sigma2`) are linear; `boff_db` is the amplifier back-off
    in dB; `alpha` the normalized third-order nonlinearity strength;
    `kappa` the UE transmit-hardware quality in [0, 1] (1 = ideal UE).
    `pathloss` optionally scales per-UE channel variances for near-far
    diagnostics and defaults to equal unit gains.
    """

    M: int = 200
    K: int = 10
    p: float = 1.0
    sigma2: float = 1.0
    alpha: float = 1.0 / 3.0
    boff_db: float = 7.0
    kappa: float = 0.99
    combiner: str = "DA-MMSE"
    distortion_mode: str = "full"
    diag_scope: str = "both"
    trials: int = 2000
    seed: int = 1
    pathloss: tuple[float, ...] | None = None

    def __post_init__(self):
        _require(self.M >= 1, "M", "an integer >= 1", self.M)
        _require(self.K >= 1, "K", "an integer >= 1", self.K)
        _require(self.p > 0, "p", "a power > 0", self.p)
        _require(self.sigma2 > 0, "sigma2", "a power > 0", self.sigma2)
        _require(self.alpha >= 0, "alpha", "a value >= 0", self.alpha)
        _require(self.boff_db >= 0, "boff_db", "a dB value >= 0", self.boff_db)
        _require(0 <= self.kappa <= 1, "kappa", "a value in [0,1]", self.kappa)
        _require(self.trials >= 1, "trials", "an integer >= 1", self.trials)
        _require(0 <= self.seed < 2**64, "seed", "a 64-bit integer", self.seed)
        _require(
            self.combiner in COMBINERS, "combiner", f"one of {COMBINERS}", self.combiner
        )
        _require(
            self.distortion_mode in DISTORTION_MODES,
            "distortion_mode",
            f"one of {DISTORTION_MODES}",
            self.distortion_mode,
        )
        _require(
            self.diag_scope in DIAG_SCOPES,
            "diag_scope",
            f"one of {DIAG_SCOPES}",
            self.diag_scope,
        )
        if self.pathloss is not None:
            if len(self.pathloss) != self.K:
                raise ConfigError(
                    f"pathloss must have K={self.K} entries, got {len(self.pathloss)}"
                )
            if any(b <= 0 for b in self.pathloss):
                raise ConfigError("pathloss entries must be > 0")

    def with_updates(self, **kwargs) -> "ScenarioConfig":
        """Copy with the given fields replaced (re-runs validation)."""
        return replace(self, **kwargs)

    @property
    def snr_db(self) -> float:
        return 10.0 * np.log10(self.p / self.sigma2)


def _require(ok: bool, key: str, expected: str, got) -> None:
    if not ok:
        raise ConfigError(f"invalid {key}: expected {expected}, got {got!r}")


@dataclass(frozen=True)
class ChannelRealization:
    """One channel draw: H (M x K) and its signal covariance p * H * H^H."""

    H: np.ndarray
    C_uu: np.ndarray

    @property
    def M(self) -> int:
        return self.H.shape[0]

    @property
    def K(self) -> int:
        return self.H.shape[1]


def sample_channel(cfg: ScenarioConfig, rng: RngStream) -> ChannelRealization:
    """Draw H with columns h_k ~ CN(0, beta_k * I_M), i.i.d. across UEs."""
    gen = rng.generator()
    H = _standard_complex(gen, (cfg.M, cfg.K))
    if cfg.pathloss is not None:
        H = H * np.sqrt(np.asarray(cfg.pathloss, dtype=float))
    C_uu = cfg.p * (H @ H.conj().T)
    return ChannelRealization(H=H, C_uu=C_uu)


def diag_of(C: np.ndarray) -> np.ndarray:
    """Zero the off-diagonal entries: C ⊙ I."""
    C = np.asarray(C)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {C.shape}")
    return np.diag(np.diag(C))
