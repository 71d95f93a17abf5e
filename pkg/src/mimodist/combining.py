"""Receive combining: MR, distortion-aware MR, distortion-aware MMSE.

The distortion-aware MMSE (DA-MMSE) combiner maximizes the per-UE SINR
by whitening inter-user interference, noise, and the distortion
covariance it is given; passing the diagonal approximation of the
distortion covariance instead of the full matrix yields the combiner an
analyst would build under the uncorrelated-distortion model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import DegenerateCombinerError, ShapeError
from .numerics import hpd_solve

MR = "MR"
DA_MR = "DA-MR"
DA_MMSE = "DA-MMSE"


@dataclass(frozen=True)
class CombinerSet:
    """Combining vectors for all UEs: column k of V detects UE k.

    ``distortion_mode`` records which distortion covariance ("full" or
    "diagonal") went into the construction; it is None for combiners that
    do not consume one (MR, DA-MR).
    """

    V: np.ndarray
    kind: str
    distortion_mode: str | None = None


def _channel_matrix(H) -> np.ndarray:
    if isinstance(H, ChannelRealization):
        return H.H
    H = np.asarray(H)
    if H.ndim != 2:
        raise ShapeError(f"channel matrix must be 2-D, got shape {H.shape}")
    return H


def _gains_vector(D) -> np.ndarray:
    """Accept Bussgang gains as a (M,) vector or an M x M diagonal matrix."""
    D = np.asarray(D)
    if D.ndim == 1:
        return D
    if D.ndim == 2 and D.shape[0] == D.shape[1]:
        return np.diagonal(D).copy()
    raise ShapeError(f"gain matrix must be a vector or square, got shape {D.shape}")


def mr_combiner(H) -> CombinerSet:
    """Maximum-ratio combining v_k = h_k / sqrt(M).

    The normalization is the square root of the mean channel energy
    E{||h_k||^2} = M under i.i.d. unit-variance fading; it has no effect
    on SINRs (which are scale invariant) but keeps the weights bounded.
    """
    H = _channel_matrix(H)
    return CombinerSet(V=H / np.sqrt(H.shape[0]), kind=MR)


def da_mr_combiner(H, D) -> CombinerSet:
    """Distortion-aware MR: v_k = D h_k / ||D h_k||, unit norm per UE."""
    H = _channel_matrix(H)
    d = _gains_vector(D)
    G = d[:, None] * H
    norms = np.linalg.norm(G, axis=0)
    for k, nk in enumerate(norms):
        if nk == 0.0:
            raise DegenerateCombinerError(
                f"effective channel D h_k is zero for UE {k}", ue=k
            )
    return CombinerSet(V=G / norms, kind=DA_MR)


def da_mmse_combiner(
    H,
    D,
    C_eta: np.ndarray,
    p: float,
    sigma2: float,
    distortion_mode: str = "full",
) -> CombinerSet:
    """SINR-maximizing combiner for the distorted received signal.

    For each UE k,

        v_k = p (sum_{i != k} p Dh_i h_i^H D^H + C_eta + sigma2 I)^{-1} D h_k

    computed with a Hermitian positive-definite solve (sigma2 > 0 makes
    the matrix PD). The leading scalar p does not change any SINR but is
    kept for a literal correspondence with the estimator definition.
    """
    H = _channel_matrix(H)
    d = _gains_vector(D)
    M, K = H.shape
    G = d[:, None] * H
    S_all = p * (G @ G.conj().T)
    base = S_all + C_eta + sigma2 * np.eye(M)
    V = np.empty_like(G)
    for k in range(K):
        g_k = G[:, k]
        A_k = base - p * np.outer(g_k, g_k.conj())
        V[:, k] = p * hpd_solve(A_k, g_k)
    return CombinerSet(V=V, kind=DA_MMSE, distortion_mode=distortion_mode)


def make_combiner(
    kind: str,
    H,
    D,
    C_eta: np.ndarray,
    p: float,
    sigma2: float,
    distortion_mode: str = "full",
) -> CombinerSet:
    """Dispatch on the combiner name used in configs."""
    if kind == MR:
        return mr_combiner(H)
    if kind == DA_MR:
        return da_mr_combiner(H, D)
    if kind == DA_MMSE:
        return da_mmse_combiner(H, D, C_eta, p, sigma2, distortion_mode)
    raise ShapeError(f"unknown combiner kind {kind!r}")
