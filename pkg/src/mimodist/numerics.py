"""Complex-matrix kernel and reproducible random sampling.

Everything downstream (channel draws, distortion statistics, combiners)
is built on the handful of primitives in this module: circularly
symmetric complex Gaussian sampling, Hermitian positive-definite solves,
and an eigendecomposition-based pseudoinverse. All functions are pure:
given the same arguments (including the same `RngStream` value) they
return the same result on every platform and under any thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs

from .errors import NotPSDError, NumericalError, ShapeError

# Relative eigenvalue cutoff below which a PSD matrix is treated as rank
# deficient (the signal covariance p*H*H^H has exact rank K < M, so a
# relative threshold separates signal eigenvalues from rounding noise).
RANK_CUTOFF = 1e-12

# Eigenvalues below -PSD_TOL * lambda_max mean the input is not PSD.
PSD_TOL = 1e-10

# Relative Frobenius tolerance for Hermitian-ness checks.
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class RngStream:
    """Handle for one reproducible random stream.

    A stream is identified by ``(master_seed, stream_index)``. The pair is
    hashed into a counter-based Philox generator, so distinct indices give
    statistically independent streams and the same pair always reproduces
    the same sequence. Sampling functions take the stream *value* and
    derive a fresh generator internally, which keeps them pure: calling a
    sampler twice with the same stream returns identical output. Use a
    distinct ``stream_index`` per Monte Carlo trial (never share one
    stream across concurrent work).
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < 2**64):
            raise ShapeError("master_seed must be a non-negative 64-bit integer")
        if int(self.stream_index) < 0:
            raise ShapeError("stream_index must be non-negative")

    def generator(self) -> np.random.Generator:
        """Fresh Philox generator keyed by (master_seed, stream_index)."""
        seq = np.random.SeedSequence([int(self.master_seed), int(self.stream_index)])
        return np.random.Generator(np.random.Philox(seq))


def _standard_complex(gen: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) samples: independent real/imag parts of variance 1/2."""
    re = gen.standard_normal(shape)
    im = gen.standard_normal(shape)
    return np.sqrt(0.5) * (re + 1j * im)


def sample_standard_complex_gaussian(n: int, rng: RngStream) -> np.ndarray:
    """Draw ``n`` i.i.d. CN(0, 1) scalars.

    Each sample has independent real and imaginary parts of variance 1/2,
    i.e. unit complex variance E{|x|^2} = 1.
    """
    if n < 1:
        raise ShapeError(f"sample count must be >= 1, got {n}")
    return _standard_complex(rng.generator(), int(n))


def require_hermitian(C: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate that ``C`` is square and Hermitian within ``tol``.

    Returns the exactly Hermitian average (C + C^H)/2 so downstream
    eigendecompositions see a symmetric input.
    """
    C = np.asarray(C)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {C.shape}")
    scale = np.linalg.norm(C)
    if scale > 0:
        asym = np.linalg.norm(C - C.conj().T) / scale
        if asym > tol:
            raise ShapeError(
                f"matrix is not Hermitian: relative asymmetry {asym:.3e} > {tol:.1e}"
            )
    return 0.5 * (C + C.conj().T)


def psd_sqrt(C: np.ndarray) -> np.ndarray:
    """Square root L of a Hermitian PSD matrix with L @ L^H = C.

    Uses an eigendecomposition rather than a triangular factorization
    because the covariances handled here are routinely rank deficient.
    Eigenvalues in [-PSD_TOL*lambda_max, 0) are clipped to zero; anything
    lower raises NotPSDError.
    """
    C = require_hermitian(C)
    lam, V = np.linalg.eigh(C)
    lam_max = float(lam[-1]) if lam.size else 0.0
    if lam_max <= 0.0:
        if lam.size and lam[0] < -PSD_TOL * max(abs(lam_max), 1.0):
            raise NotPSDError(f"matrix has negative eigenvalue {lam[0]:.3e}")
        return np.zeros_like(C)
    if lam[0] < -PSD_TOL * lam_max:
        raise NotPSDError(
            f"matrix is not PSD: min eigenvalue {lam[0]:.3e} "
            f"< -{PSD_TOL:.1e} * {lam_max:.3e}"
        )
    return V * np.sqrt(np.clip(lam, 0.0, None))


def correlated_gaussian_sample(
    C: np.ndarray, rng: RngStream, size: int | None = None
) -> np.ndarray:
    """Draw from CN(0, C) for Hermitian PSD ``C``.

    Returns L @ w where w is standard complex Gaussian and L L^H = C.
    With ``size=None`` one vector of shape (M,) is returned, else an
    (M, size) array of independent samples.
    """
    L = psd_sqrt(C)
    M = L.shape[0]
    shape = (M,) if size is None else (M, int(size))
    return L @ _standard_complex(rng.generator(), shape)


def hpd_solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve A @ X = B for Hermitian positive-definite ``A`` via Cholesky.

    Raises NumericalError with the failing pivot index when the
    factorization detects a non-positive-definite matrix.
    """
    A = require_hermitian(A, tol=1e-8).astype(complex, copy=False)
    B = np.asarray(B, dtype=complex)
    if B.shape[0] != A.shape[0]:
        raise ShapeError(f"rhs has {B.shape[0]} rows, expected {A.shape[0]}")
    potrf, potrs = get_lapack_funcs(("potrf", "potrs"), (A, B))
    c, info = potrf(A, lower=1, overwrite_a=False)
    if info != 0:
        raise NumericalError(
            f"Cholesky factorization failed at pivot {info - 1}", pivot=info - 1
        )
    x, info = potrs(c, B.reshape(B.shape[0], -1), lower=1)
    if info != 0:
        raise NumericalError(f"triangular solve failed (info={info})")
    return x.reshape(B.shape)


def pseudo_inverse(C: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a Hermitian PSD matrix.

    Eigenvalues below RANK_CUTOFF * lambda_max are treated as exact zeros,
    which cleanly truncates the rank-K structure of sampled covariances.
    """
    C = require_hermitian(C)
    lam, V = np.linalg.eigh(C)
    lam_max = float(np.max(np.abs(lam))) if lam.size else 0.0
    if lam_max == 0.0:
        return np.zeros_like(C)
    inv = np.where(lam > RANK_CUTOFF * lam_max, 1.0, 0.0) / np.where(
        lam > RANK_CUTOFF * lam_max, lam, 1.0
    )
    return (V * inv) @ V.conj().T
