"""Closed-form Gaussian moments of the third-order distortion model.

Every expression here is an exact expectation over i.i.d. Rayleigh
fading with the shared amplifier coefficient a = alpha/(b_off p K), and
doubles as the analytic oracle for the Monte Carlo engine. dB-to-linear
conversion of the back-off happens here and nowhere deeper: all internal
math is linear scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ShapeError


def _boff_linear(boff_db: float) -> float:
    if boff_db < 0:
        raise ShapeError(f"back-off must be >= 0 dB, got {boff_db}")
    return 10.0 ** (boff_db / 10.0)


def lemma2_correlated(alpha: float, boff_db: float, p: float, M: int, K: int) -> float:
    """Mean received distortion power with MR combining, full correlation.

    E{h_k^H C_eta h_k} / E{||h_k||^2}
        = (2 alpha^2 p / b_off^2) (K + 6 + 9/K + 4/K^2 + 2M(K+1)/K^2)

    The M-proportional term is the contribution of the off-diagonal
    (correlated) distortion entries.
    """
    _check_mk(M, K)
    b = _boff_linear(boff_db)
    return (2.0 * alpha**2 * p / b**2) * (
        K + 6.0 + 9.0 / K + 4.0 / K**2 + 2.0 * M * (K + 1.0) / K**2
    )


def lemma2_uncorrelated(alpha: float, boff_db: float, p: float, K: int) -> float:
    """Same quantity when the distortion correlation is neglected.

    E{h_k^H C_eta_diag h_k} / E{||h_k||^2}
        = (2 alpha^2 p / b_off^2) (K + 6 + 11/K + 6/K^2)

    Independent of the antenna count.
    """
    _check_mk(1, K)
    b = _boff_linear(boff_db)
    return (2.0 * alpha**2 * p / b**2) * (K + 6.0 + 11.0 / K + 6.0 / K**2)


def distortion_ratio(M: int, K: int) -> float:
    """Correlated-to-uncorrelated distortion power ratio with MR.

    1 + 2(M - 1)/((K + 2)(K + 3)): always >= 1, independent of the
    amplifier parameters, growing in M and shrinking in K.
    """
    _check_mk(M, K)
    return 1.0 + 2.0 * (M - 1.0) / ((K + 2.0) * (K + 3.0))


def ue_distortion_moment(alpha: float, boff_db: float, M: int, K: int) -> float:
    """Mean squared effective-channel gain E{|h_k^H D h_k|^2} / E{||h_k||^2}.

    Scaling this by the UE transmit-distortion power p(1 - kappa) gives
    the mean UE self-distortion term seen after MR combining:

        (M+1) - 4 alpha (MK + K + M + 3) / (b_off K)
              + 4 alpha^2 (MK^2 + 8K + 11 + 2MK + K^2 + M) / (b_off^2 K^2)
    """
    _check_mk(M, K)
    b = _boff_linear(boff_db)
    return (
        (M + 1.0)
        - 4.0 * alpha * (M * K + K + M + 3.0) / (b * K)
        + 4.0
        * alpha**2
        * (M * K**2 + 8.0 * K + 11.0 + 2.0 * M * K + K**2 + M)
        / (b**2 * K**2)
    )


def lna_signal_to_distortion(alpha: float, boff_db: float) -> float:
    """Per-antenna ratio of linearly amplified signal to distortion power.

    [D C_uu D^H]_mm / [C_eta]_mm = b_off^2 (1 - 2 alpha/b_off)^2 / (2 alpha^2);
    the mean input power cancels. A linear amplifier (alpha = 0) has no
    distortion at all, reported as infinity.
    """
    if alpha < 0:
        raise ShapeError(f"alpha must be >= 0, got {alpha}")
    if alpha == 0.0:
        return math.inf
    b = _boff_linear(boff_db)
    return b**2 * (1.0 - 2.0 * alpha / b) ** 2 / (2.0 * alpha**2)


def distortion_corr_coeff(xi_u: complex) -> complex:
    """Distortion correlation coefficient from the signal one: |xi|^2 xi.

    Cubing the magnitude while keeping the phase means distortion terms
    are always less correlated than the signals that generated them.
    """
    xi_u = complex(xi_u)
    if abs(xi_u) > 1.0 + 1e-12:
        raise ShapeError(f"|xi_u| must be <= 1, got {abs(xi_u)}")
    return abs(xi_u) ** 2 * xi_u


@dataclass(frozen=True)
class ClosedFormReport:
    """All closed-form distortion figures for one (alpha, b_off, p, M, K)."""

    corr_distortion: float
    uncorr_distortion: float
    ratio: float
    ue_moment: float
    lna_sdr: float


def closed_form_report(
    alpha: float, boff_db: float, p: float, M: int, K: int
) -> ClosedFormReport:
    return ClosedFormReport(
        corr_distortion=lemma2_correlated(alpha, boff_db, p, M, K),
        uncorr_distortion=lemma2_uncorrelated(alpha, boff_db, p, K),
        ratio=distortion_ratio(M, K),
        ue_moment=ue_distortion_moment(alpha, boff_db, M, K),
        lna_sdr=lna_signal_to_distortion(alpha, boff_db),
    )


def _check_mk(M: int, K: int) -> None:
    if M < 1 or K < 1:
        raise ShapeError(f"need M >= 1 and K >= 1, got M={M}, K={K}")
