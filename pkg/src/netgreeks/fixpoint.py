"""Self-consistent claim valuation by monotone fixed-point iteration.

Given realized external assets a, equity and debt values solve

    s_i = max(0, v_i - d_i),   r_i = min(d_i, v_i),   v = a + m_s s + m_d r.

Under the admissibility rules the map is monotone and has a unique fixed
point for strictly positive a; iterating from s = 0, r = min(d, a) converges
from below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import ClaimVector, FirmNetwork, SolvencyVector

__all__ = [
    "FixedPointConfig",
    "FixedPointSolution",
    "BatchSolution",
    "ConvergenceError",
    "DEFAULT_CONFIG",
    "eval_g",
    "solve_claims",
    "solve_claims_batch",
    "solvency",
]


@dataclass(frozen=True)
class FixedPointConfig:
    """Stopping rule: sup-norm tolerance on successive iterates."""

    tol: float = 1e-12
    max_iter: int = 10_000

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError("tol must be strictly positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


DEFAULT_CONFIG = FixedPointConfig()


class ConvergenceError(RuntimeError):
    """Iteration did not reach tolerance; carries the last iterate."""

    def __init__(self, message, claims=None, residual=None, iterations=None, draw=None):
        super().__init__(message)
        self.claims = claims
        self.residual = residual
        self.iterations = iterations
        self.draw = draw


@dataclass(frozen=True)
class FixedPointSolution:
    claims: ClaimVector
    xi: SolvencyVector
    iterations: int
    residual: float
    residual_history: tuple[float, ...] | None = None


@dataclass(frozen=True)
class BatchSolution:
    """Vectorized solution over a batch of asset scenarios (rows)."""

    s: np.ndarray            # (B, n)
    r: np.ndarray            # (B, n)
    v: np.ndarray            # firm value at the returned claims
    xi: np.ndarray           # (B, n), floats in {0, 1}
    iterations: int
    residuals: np.ndarray    # (B,) final sup-norm per scenario


def eval_g(net: FirmNetwork, a, claims: ClaimVector) -> ClaimVector:
    """One application of the valuation map at claims x."""
    a = np.asarray(a, dtype=float)
    v = a + net.m_s @ claims.s + net.m_d @ claims.r
    return ClaimVector(s=np.maximum(0.0, v - net.d), r=np.minimum(net.d, v))


def _picard(net, a, cfg, s0, r0, record):
    """Shared iteration core over (B, n) arrays.

    Returns (s, r, v, xi, iterations, residuals, history).  The returned
    claims are the iterate at which the residual ||g(x) - x|| was measured,
    so the post-condition ||x - g(a, x)||_inf <= tol holds exactly.
    """
    d = net.d
    ms_t = net.m_s.T
    md_t = net.m_d.T
    s, r = s0, r0
    history = [] if record else None
    for it in range(1, cfg.max_iter + 1):
        v = a + s @ ms_t + r @ md_t
        s_new = np.maximum(0.0, v - d)
        r_new = np.minimum(d, v)
        resid = np.maximum(np.abs(s_new - s), np.abs(r_new - r)).max(axis=1)
        if record:
            history.append(float(resid.max()))
        if resid.max() <= cfg.tol:
            xi = (v > d).astype(float)
            return s, r, v, xi, it, resid, history
        s, r = s_new, r_new
    worst = int(np.argmax(resid))
    raise ConvergenceError(
        f"no convergence after {cfg.max_iter} iterations "
        f"(worst scenario {worst}, residual {resid[worst]:.3e})",
        claims=ClaimVector(s=s_new[worst], r=r_new[worst]),
        residual=float(resid[worst]),
        iterations=cfg.max_iter,
        draw=worst,
    )


def solve_claims_batch(net: FirmNetwork, a, cfg: FixedPointConfig = DEFAULT_CONFIG,
                       x0=None) -> BatchSolution:
    """Solve the fixed point for each row of a (B, n) scenario array."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[1] != net.n:
        raise ValueError(f"scenario array has {a.shape[1]} columns, network has {net.n} firms")
    if np.any(a <= 0.0):
        raise ValueError("external asset values must be strictly positive")
    if x0 is None:
        s0 = np.zeros_like(a)
        r0 = np.minimum(net.d, a)
    else:
        s0 = np.array(np.broadcast_to(x0[0], a.shape), dtype=float)
        r0 = np.array(np.broadcast_to(x0[1], a.shape), dtype=float)
    s, r, v, xi, it, resid, _ = _picard(net, a, cfg, s0, r0, record=False)
    return BatchSolution(s=s, r=r, v=v, xi=xi, iterations=it, residuals=resid)


def solve_claims(net: FirmNetwork, a, cfg: FixedPointConfig = DEFAULT_CONFIG,
                 x0: ClaimVector | None = None,
                 record_residuals: bool = False) -> FixedPointSolution:
    """Solve the valuation fixed point for one asset vector a > 0."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape != (1, net.n):
        raise ValueError(f"expected asset vector of length {net.n}, got shape {a.shape[1:]}")
    if np.any(a <= 0.0):
        raise ValueError("external asset values must be strictly positive")
    if x0 is None:
        s0 = np.zeros_like(a)
        r0 = np.minimum(net.d, a)
    else:
        s0 = x0.s[None, :].copy()
        r0 = x0.r[None, :].copy()
    s, r, v, xi, it, resid, history = _picard(net, a, cfg, s0, r0, record=record_residuals)
    return FixedPointSolution(
        claims=ClaimVector(s=s[0], r=r[0]),
        xi=SolvencyVector(xi[0]),
        iterations=it,
        residual=float(resid[0]),
        residual_history=tuple(history) if record_residuals else None,
    )


def solvency(net: FirmNetwork, a, claims: ClaimVector) -> SolvencyVector:
    """Solvency indicators at given claims: 1 iff v_i > d_i (ties insolvent)."""
    a = np.asarray(a, dtype=float)
    v = a + net.m_s @ claims.s + net.m_d @ claims.r
    return SolvencyVector((v > net.d).astype(float))
