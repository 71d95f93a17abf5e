"""Per-antenna receiver nonlinearities and their Bussgang decomposition.

A quasi-memoryless nonlinearity g_m applied to a Gaussian input u splits
into z = D u + eta with D diagonal and eta uncorrelated with u. For the
third-order AM-AM model

    g_m(u) = u - a_m |u|^2 u

both the gain matrix and the distortion covariance have closed forms in
the entries rho_ij of the input covariance:

    d_m          = 1 - 2 a_m rho_mm
    [C_eta]_ij   = 2 a_i a_j |rho_ij|^2 rho_ij

The same decomposition can be estimated empirically for an arbitrary
deterministic map, which serves as the sampling oracle for the closed
forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ShapeError
from .numerics import RngStream, _standard_complex, psd_sqrt, require_hermitian

IDEAL = "ideal"
THIRD_ORDER = "third_order"
CUSTOM = "custom"

# Samples drawn per batch by the empirical estimator. Results do not
# depend on this value (the generator stream is consumed sequentially).
_BATCH = 1 << 16


@dataclass(frozen=True)
class NonlinearityModel:
    """Memoryless per-antenna map: ideal, third-order AM-AM, or custom.

    For ``third_order``, ``a`` holds the M non-negative coefficients (in
    1/power units). Custom maps receive the antenna's samples as a 1-D
    complex array and must return an equally shaped array; they must be
    deterministic and side-effect free.
    """

    kind: str
    a: np.ndarray | None = None
    maps: tuple[Callable[[np.ndarray], np.ndarray], ...] | None = None

    @staticmethod
    def ideal() -> "NonlinearityModel":
        return NonlinearityModel(kind=IDEAL)

    @staticmethod
    def third_order(a) -> "NonlinearityModel":
        a = np.atleast_1d(np.asarray(a, dtype=float))
        if np.any(a < 0):
            raise ShapeError("third-order coefficients must be >= 0")
        return NonlinearityModel(kind=THIRD_ORDER, a=a)

    @staticmethod
    def custom(maps: Sequence[Callable[[np.ndarray], np.ndarray]]) -> "NonlinearityModel":
        return NonlinearityModel(kind=CUSTOM, maps=tuple(maps))


@dataclass(frozen=True)
class BussgangDecomposition:
    """Diagonal gain and distortion covariance of one nonlinearity.

    ``gains`` holds the diagonal of the M x M gain matrix D (exposed via
    the ``D`` property), ``C_eta`` the M x M Hermitian PSD distortion
    covariance. ``mode`` records whether the decomposition came from the
    closed form ("analytic") or from sampling ("empirical"); empirical
    results also carry ``eta_u_cross``, the residual sample
    cross-correlation between distortion and input, which converges to
    zero as the sample count grows.
    """

    gains: np.ndarray
    C_eta: np.ndarray
    mode: str
    eta_u_cross: np.ndarray | None = None

    @property
    def D(self) -> np.ndarray:
        return np.diag(self.gains.astype(complex))


def amplifier_gain_coeff(alpha: float, boff_db: float, p: float, K: int) -> float:
    """Third-order coefficient a = alpha / (b_off * p * K).

    The nonlinearity strength alpha is normalized to the average input
    power p*K scaled by the linear back-off b_off = 10^(boff_db/10), so
    all antennas share the same coefficient.
    """
    if alpha < 0 or boff_db < 0 or p <= 0 or K < 1:
        raise ShapeError("need alpha >= 0, boff_db >= 0, p > 0, K >= 1")
    return alpha / (10.0 ** (boff_db / 10.0) * p * K)


def apply_nonlinearity(model: NonlinearityModel, u: np.ndarray) -> np.ndarray:
    """Apply the per-antenna maps elementwise.

    ``u`` is one vector (M,) or a batch (M, n) of input samples; the map
    of antenna m acts on row m.
    """
    u = np.asarray(u, dtype=complex)
    if model.kind == IDEAL:
        return u.copy()
    if model.kind == THIRD_ORDER:
        a = model.a
        if a.size > 1 and a.size != u.shape[0]:
            raise ShapeError(f"{a.size} coefficients for {u.shape[0]} antennas")
        a_col = a.reshape(-1, *([1] * (u.ndim - 1)))
        return u - a_col * (np.abs(u) ** 2) * u
    if model.kind == CUSTOM:
        if len(model.maps) != u.shape[0]:
            raise ShapeError(f"{len(model.maps)} maps for {u.shape[0]} antennas")
        u2 = u if u.ndim == 2 else u[:, None]
        out = np.empty_like(u2)
        for m, g in enumerate(model.maps):
            out[m] = np.asarray(g(u2[m]), dtype=complex)
        return out if u.ndim == 2 else out[:, 0]
    raise ShapeError(f"unknown nonlinearity kind {model.kind!r}")


def bussgang_gain_third_order(a, C_uu: np.ndarray) -> np.ndarray:
    """Gains d_m = 1 - 2 a_m rho_mm for the third-order model.

    Returns the real (M,) diagonal of D; rho_mm are the diagonal entries
    of the conditional input covariance.
    """
    rho = np.real(np.diagonal(np.asarray(C_uu)))
    a = np.broadcast_to(np.asarray(a, dtype=float), rho.shape)
    return 1.0 - 2.0 * a * rho


def distortion_covariance_third_order(a, C_uu: np.ndarray) -> np.ndarray:
    """Distortion covariance [C_eta]_ij = 2 a_i a_j |rho_ij|^2 rho_ij.

    Equivalently 2 A (C_uu ⊙ C_uu* ⊙ C_uu) A with A = diag(a); Hermitian
    PSD by the Schur product theorem.
    """
    C_uu = np.asarray(C_uu)
    a = np.broadcast_to(np.asarray(a, dtype=float), (C_uu.shape[0],))
    return 2.0 * np.outer(a, a) * (np.abs(C_uu) ** 2 * C_uu)


def analytic_bussgang_third_order(a, C_uu: np.ndarray) -> BussgangDecomposition:
    """Closed-form decomposition of the third-order model for a fixed C_uu."""
    return BussgangDecomposition(
        gains=bussgang_gain_third_order(a, C_uu),
        C_eta=distortion_covariance_third_order(a, C_uu),
        mode="analytic",
    )


def empirical_bussgang(
    model: NonlinearityModel,
    C_uu: np.ndarray,
    n_samples: int,
    rng: RngStream,
) -> BussgangDecomposition:
    """Estimate the decomposition of an arbitrary map by sampling.

    Draws u ~ CN(0, C_uu), applies the model, and estimates

        d_m    = E{g_m(u_m) u_m*} / rho_mm
        C_eta  = E{z z^H} - D C_uu D^H

    Antennas with rho_mm = 0 get d_m = 0 by convention. Needs at least
    1000 samples for the moment estimates to be meaningful.
    """
    if n_samples < 1000:
        raise ShapeError(f"n_samples must be >= 1000, got {n_samples}")
    C_uu = require_hermitian(C_uu)
    M = C_uu.shape[0]
    L = psd_sqrt(C_uu)
    gen = rng.generator()

    s_zu = np.zeros((M, M), dtype=complex)
    s_zz = np.zeros((M, M), dtype=complex)
    s_uu = np.zeros((M, M), dtype=complex)
    done = 0
    while done < n_samples:
        b = min(_BATCH, n_samples - done)
        u = L @ _standard_complex(gen, (M, b))
        z = apply_nonlinearity(model, u)
        uh = u.conj().T
        s_zu += z @ uh
        s_zz += z @ z.conj().T
        s_uu += u @ uh
        done += b

    rho = np.real(np.diagonal(C_uu))
    # d_m is complex for a general map; rho_mm = 0 antennas get d_m = 0.
    gains = np.where(
        rho > 0, np.diagonal(s_zu) / n_samples / np.where(rho > 0, rho, 1.0), 0.0
    )
    D = np.diag(gains)
    C_zz = s_zz / n_samples
    C_eta = C_zz - D @ C_uu @ D.conj().T
    C_eta = 0.5 * (C_eta + C_eta.conj().T)
    eta_u_cross = s_zu / n_samples - D @ (s_uu / n_samples)
    return BussgangDecomposition(
        gains=gains, C_eta=C_eta, mode="empirical", eta_u_cross=eta_u_cross
    )


def clip_probability(a: float, rho_mm: float) -> float:
    """Probability that |u_m| exceeds the monotonic range 1/sqrt(3a).

    For u_m ~ CN(0, rho_mm), |u_m|^2 is exponential with mean rho_mm, so
    P(|u_m| > 1/sqrt(3a)) = exp(-1/(3 a rho_mm)). A linear amplifier
    (a = 0) never clips.
    """
    if a < 0 or rho_mm <= 0:
        raise ShapeError("need a >= 0 and rho_mm > 0")
    if a == 0.0:
        return 0.0
    return math.exp(-1.0 / (3.0 * a * rho_mm))
