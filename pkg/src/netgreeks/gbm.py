"""Correlated terminal asset sampling under the risk-neutral measure.

External assets follow correlated geometric Brownian motions; only the
terminal value matters for the valuation, so draws are single-step:

    A_T^i = a_t^i exp((r - sigma_i^2 / 2) tau + sqrt(tau) sigma_i (L z)_i)

with L the lower Cholesky factor of the correlation matrix and z iid
standard normals.  Normals are generated counter-based (Philox keyed by the
seed, one block-aligned slot per draw and asset), so draw i is bit-identical
no matter how the work is chunked or threaded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

__all__ = [
    "GbmParams",
    "TerminalDraw",
    "TerminalPartials",
    "cholesky_factor",
    "normal_variates",
    "sample_terminal",
    "terminal_partials",
]


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GbmParams:
    """Current asset values, volatilities, short rate, horizon, correlation."""

    a_t: np.ndarray
    sigma: np.ndarray
    r: float
    tau: float
    corr: np.ndarray

    def __post_init__(self):
        a_t = _frozen(np.atleast_1d(self.a_t))
        sigma = _frozen(np.atleast_1d(self.sigma))
        corr = _frozen(self.corr)
        n = a_t.shape[0]
        if sigma.shape != (n,) or corr.shape != (n, n):
            raise ValueError(f"inconsistent shapes: a_t {a_t.shape}, sigma {sigma.shape}, corr {corr.shape}")
        if np.any(a_t <= 0.0):
            raise ValueError("asset values must be strictly positive")
        if np.any(sigma <= 0.0):
            raise ValueError("volatilities must be strictly positive")
        if not self.tau > 0.0:
            raise ValueError("horizon tau must be strictly positive")
        if not np.allclose(corr, corr.T, atol=1e-12):
            raise ValueError("correlation matrix must be symmetric")
        if not np.allclose(np.diag(corr), 1.0, atol=1e-12):
            raise ValueError("correlation matrix must have unit diagonal")
        # full PSD check happens at factorization; reject the clearly indefinite
        if np.linalg.eigvalsh(corr).min() < -1e-8:
            raise ValueError("correlation matrix is not positive semi-definite")
        object.__setattr__(self, "a_t", a_t)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "corr", corr)

    @property
    def n(self) -> int:
        return self.a_t.shape[0]


@dataclass(frozen=True)
class TerminalDraw:
    """Raw normals z and the terminal asset values they map to."""

    z: np.ndarray
    a_T: np.ndarray


@dataclass(frozen=True)
class TerminalPartials:
    """Pathwise partials of A_T, each shaped like a_T."""

    da_t: np.ndarray      # dA_T / da_t^i, per asset
    dsigma: np.ndarray    # dA_T / dsigma_i, per asset
    dr: np.ndarray        # dA_T / dr
    dtau: np.ndarray      # dA_T / dtau


def cholesky_factor(corr: np.ndarray, jitter: float = 1e-12) -> np.ndarray:
    """Lower Cholesky factor with one jitter retry for boundary matrices.

    Perfectly correlated blocks sit on the PSD boundary and make the plain
    factorization fail; a single diagonal bump of `jitter` resolves those
    while leaving the sampled law unchanged at double precision.
    """
    corr = np.asarray(corr, dtype=float)
    try:
        return np.linalg.cholesky(corr)
    except np.linalg.LinAlgError:
        pass
    bumped = corr + jitter * np.eye(corr.shape[0])
    try:
        return np.linalg.cholesky(bumped)
    except np.linalg.LinAlgError as exc:
        raise ValueError("correlation matrix is not positive semi-definite") from exc


def _words_per_draw(n: int) -> int:
    # Philox advances in blocks of four 64-bit words; pad each draw row to a
    # whole number of blocks so chunk offsets are reachable exactly.
    return 4 * ((n + 3) // 4)


def normal_variates(seed: int, count: int, n: int, start: int = 0) -> np.ndarray:
    """Standard normals for draws [start, start+count), shape (count, n).

    Counter-based: the value at (draw, asset) depends only on the seed, so
    any chunking of the draw range reproduces the same numbers bit for bit.
    """
    pad = _words_per_draw(n)
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(start * (pad // 4))
    u = np.random.Generator(bitgen).random((count, pad))[:, :n]
    # keep uniforms away from exact zero; ndtri(tiny) is about -38
    return ndtri(np.maximum(u, np.finfo(float).tiny))


def sample_terminal(params: GbmParams, z: np.ndarray,
                    L: np.ndarray | None = None) -> TerminalDraw:
    """Map standard normals z (..., n) to terminal asset values."""
    z = np.asarray(z, dtype=float)
    if L is None:
        L = cholesky_factor(params.corr)
    y = z @ L.T
    drift = (params.r - 0.5 * params.sigma**2) * params.tau
    a_T = params.a_t * np.exp(drift + np.sqrt(params.tau) * params.sigma * y)
    return TerminalDraw(z=z, a_T=a_T)


def terminal_partials(params: GbmParams, draw: TerminalDraw,
                      L: np.ndarray | None = None) -> TerminalPartials:
    """Pathwise derivatives of A_T in spot, volatility, rate and horizon.

    All four differentiate the sampling map at fixed z, which is the
    correct coupling for pathwise Greek estimators.
    """
    if L is None:
        L = cholesky_factor(params.corr)
    y = draw.z @ L.T
    sig = params.sigma
    tau = params.tau
    sqrt_tau = np.sqrt(tau)
    a_T = draw.a_T
    return TerminalPartials(
        da_t=a_T / params.a_t,
        dsigma=a_T * (-sig * tau + sqrt_tau * y),
        dr=a_T * tau,
        dtau=a_T * (params.r - 0.5 * sig**2 + sig * y / (2.0 * sqrt_tau)),
    )
