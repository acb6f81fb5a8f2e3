"""Single-firm structural approximations for pure debt networks.

Instead of valuing the whole network jointly, each firm is treated as a
standalone structural-model firm whose assets include the market value of
its debt holdings, priced as debt minus a put on the counterparty's own
(approximate) firm value.  This ignores the correlation that cross-holdings
induce between firm values, so the resulting contagion sensitivities are a
local, independence-based approximation to the exact network quantities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blackscholes import d_pair, norm_cdf, put_delta, put_price
from .fixpoint import ConvergenceError, FixedPointConfig, DEFAULT_CONFIG
from .network import FirmNetwork
from .sensitivity import SensitivityError

__all__ = [
    "LocalValuationState",
    "local_fixed_point",
    "local_delta",
    "marginal_contagion",
    "independent_default_delta",
]


def _require_debt_only(net: FirmNetwork) -> None:
    if np.any(net.m_s != 0.0):
        raise ValueError("local approximation is defined for pure debt cross-holdings (m_s = 0)")


def _put_price_ext(spot, strike, r, tau, vol):
    """Put value extended continuously to non-positive spot (certain default)."""
    spot = np.asarray(spot, dtype=float)
    safe = np.maximum(spot, 1e-300)
    value = put_price(safe, strike, r, tau, vol)
    return np.where(spot > 0.0, value, strike * np.exp(-r * tau) - spot)


def _put_delta_ext(spot, strike, r, tau, vol):
    spot = np.asarray(spot, dtype=float)
    safe = np.maximum(spot, 1e-300)
    value = put_delta(safe, strike, r, tau, vol)
    return np.where(spot > 0.0, value, -1.0)


def _default_prob_ext(spot, strike, r, tau, vol):
    spot = np.asarray(spot, dtype=float)
    safe = np.maximum(spot, 1e-300)
    _, d_minus = d_pair(safe, strike, r, tau, vol)
    return np.where(spot > 0.0, norm_cdf(-d_minus), 1.0)


@dataclass(frozen=True)
class LocalValuationState:
    """Converged per-firm equity, default probability and firm volatility."""

    equity: np.ndarray
    pd: np.ndarray
    firm_vol: np.ndarray
    r: float
    tau: float


def local_fixed_point(net: FirmNetwork, a_t, r: float, tau: float, firm_vol,
                      cfg: FixedPointConfig = DEFAULT_CONFIG) -> LocalValuationState:
    """Self-consistent standalone equity values with put-adjusted holdings.

    Iterates E_i = a_i + sum_j m_d_ij (d_j - P(E_j + d_j, d_j)) - d_i, where
    P is a European put on counterparty firm value E_j + d_j struck at its
    debt, with the counterparty's firm volatility.  Equity may go negative
    here; it is a book value, not a limited-liability claim.
    """
    _require_debt_only(net)
    a_t = np.asarray(a_t, dtype=float)
    firm_vol = np.broadcast_to(np.asarray(firm_vol, dtype=float), (net.n,)).copy()
    if np.any(firm_vol <= 0.0) or not tau > 0.0:
        raise ValueError("firm volatilities and tau must be strictly positive")
    d = net.d
    equity = a_t - d
    for _ in range(cfg.max_iter):
        put = _put_price_ext(equity + d, d, r, tau, firm_vol)
        new = a_t + net.m_d @ (d - put) - d
        resid = np.abs(new - equity).max()
        if resid <= cfg.tol:
            pd = _default_prob_ext(new + d, d, r, tau, firm_vol)
            return LocalValuationState(equity=new, pd=pd, firm_vol=firm_vol,
                                       r=float(r), tau=float(tau))
        equity = new
    raise ConvergenceError(
        f"local valuation did not converge in {cfg.max_iter} iterations "
        f"(residual {resid:.3e})",
        residual=float(resid), iterations=cfg.max_iter)


def local_delta(state: LocalValuationState, net: FirmNetwork) -> np.ndarray:
    """Equity response dE/da from the local valuation, (I + m_d diag(put_delta))^{-1}.

    put_delta lies in [-1, 0], so the correction term propagates losses from
    counterparties in distress while staying near the identity when every
    counterparty is safe.
    """
    _require_debt_only(net)
    pdelta = _put_delta_ext(state.equity + net.d, net.d, state.r, state.tau,
                            state.firm_vol)
    lhs = np.eye(net.n) + net.m_d * pdelta[None, :]
    try:
        return np.linalg.solve(lhs, np.eye(net.n))
    except np.linalg.LinAlgError as exc:
        raise SensitivityError(f"singular local sensitivity system: {exc}") from exc


def marginal_contagion(net: FirmNetwork, pd, shock) -> np.ndarray:
    """Expected loss propagation (I - m_d diag(pd))^{-1} shock.

    Amplifies an initial loss vector through debt holdings, counting a
    holding only when the issuer defaults (probability pd, treated as
    independent across firms).
    """
    _require_debt_only(net)
    pd = np.asarray(pd, dtype=float)
    shock = np.asarray(shock, dtype=float)
    if np.any((pd < 0.0) | (pd > 1.0)):
        raise ValueError("default probabilities must lie in [0, 1]")
    lhs = np.eye(net.n) - net.m_d * pd[None, :]
    try:
        return np.linalg.solve(lhs, shock)
    except np.linalg.LinAlgError as exc:
        raise SensitivityError(f"singular contagion system: {exc}") from exc


def independent_default_delta(net: FirmNetwork, pd) -> np.ndarray:
    """Approximate debt-recovery sensitivity (I - diag(pd) m_d)^{-1} diag(pd).

    Replaces the random solvency pattern by independent marginals: exact
    whenever each pd_i is 0 or 1 (deterministic pattern), an approximation
    otherwise because joint defaults are correlated through the network.
    """
    _require_debt_only(net)
    pd = np.asarray(pd, dtype=float)
    if np.any((pd < 0.0) | (pd > 1.0)):
        raise ValueError("default probabilities must lie in [0, 1]")
    lhs = np.eye(net.n) - pd[:, None] * net.m_d
    try:
        return np.linalg.solve(lhs, np.diag(pd))
    except np.linalg.LinAlgError as exc:
        raise SensitivityError(f"singular contagion system: {exc}") from exc
