"""Exact sensitivities of the valuation fixed point via implicit differentiation.

Away from the default boundary the fixed point x* = (s; r) is piecewise
linear in the external assets a.  Holding the solvency pattern xi fixed,

    dx*/da = W E,   W = (I - dg/dx)^{-1},   E = (diag(xi); diag(1 - xi)),

where dg/dx = diag((xi; 1-xi)) [[m_s, m_d], [m_s, m_d]].  W acts as an
exposure-weighted chain of holdings: its Neumann series accumulates the
impact of a marginal asset change along every holding path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import FirmNetwork, SolvencyVector

__all__ = [
    "SensitivityError",
    "ClaimsJacobian",
    "jacobian_g",
    "weighting_matrix",
    "claims_sensitivity",
    "dxda_batch",
    "threat_index",
    "aggregate_impact",
    "outside_sensitivity",
]


class SensitivityError(RuntimeError):
    """Singular sensitivity system; admissibility was violated upstream."""


def _xi_array(xi, n: int) -> np.ndarray:
    if isinstance(xi, SolvencyVector):
        arr = xi.xi
    else:
        arr = np.asarray(xi, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"solvency vector has shape {arr.shape}, expected ({n},)")
    if not np.all((arr == 0.0) | (arr == 1.0)):
        raise ValueError("solvency entries must be 0 or 1")
    return arr


@dataclass(frozen=True)
class ClaimsJacobian:
    """Sensitivities dx*/da (2n x n) at a fixed solvency pattern."""

    dxda: np.ndarray
    xi: np.ndarray

    @property
    def n(self) -> int:
        return self.dxda.shape[1]

    @property
    def u_s(self) -> np.ndarray:
        """Equity block ds*/da."""
        return self.dxda[: self.n]

    @property
    def u_d(self) -> np.ndarray:
        """Debt block dr*/da."""
        return self.dxda[self.n:]


def jacobian_g(net: FirmNetwork, xi) -> np.ndarray:
    """Jacobian of the valuation map in x at solvency pattern xi (2n x 2n)."""
    xi = _xi_array(xi, net.n)
    blocks = np.block([[net.m_s, net.m_d], [net.m_s, net.m_d]])
    weights = np.concatenate([xi, 1.0 - xi])
    return weights[:, None] * blocks


def weighting_matrix(net: FirmNetwork, xi) -> np.ndarray:
    """W = (I - dg/dx)^{-1}, materialized explicitly.

    Solved column-by-column with an LU factorization; W is entrywise
    non-negative with ones on the diagonal dominating each row's own block.
    """
    J = jacobian_g(net, xi)
    eye = np.eye(2 * net.n)
    try:
        return np.linalg.solve(eye - J, eye)
    except np.linalg.LinAlgError as exc:
        raise SensitivityError(f"singular sensitivity system: {exc}") from exc


def claims_sensitivity(net: FirmNetwork, xi) -> ClaimsJacobian:
    """dx*/da away from the default boundary, by one linear solve."""
    xi_arr = _xi_array(xi, net.n)
    n = net.n
    J = jacobian_g(net, xi_arr)
    mask = np.concatenate([xi_arr, 1.0 - xi_arr])
    rhs = mask[:, None] * np.vstack([np.eye(n), np.eye(n)])
    try:
        dxda = np.linalg.solve(np.eye(2 * n) - J, rhs)
    except np.linalg.LinAlgError as exc:
        raise SensitivityError(f"singular sensitivity system: {exc}") from exc
    return ClaimsJacobian(dxda=dxda, xi=xi_arr)


def dxda_batch(net: FirmNetwork, xi_batch: np.ndarray) -> np.ndarray:
    """Stacked dx*/da for a (B, n) batch of solvency patterns -> (B, 2n, n)."""
    xi_batch = np.asarray(xi_batch, dtype=float)
    B, n = xi_batch.shape
    blocks = np.block([[net.m_s, net.m_d], [net.m_s, net.m_d]])
    mask = np.concatenate([xi_batch, 1.0 - xi_batch], axis=1)     # (B, 2n)
    lhs = np.eye(2 * n) - mask[:, :, None] * blocks
    rhs = mask[:, :, None] * np.vstack([np.eye(n), np.eye(n)])
    try:
        return np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise SensitivityError(f"singular sensitivity system: {exc}") from exc


def threat_index(net: FirmNetwork, xi) -> np.ndarray:
    """Marginal impact of firm-level asset injections on total debt recovery.

    Defined for pure debt networks (m_s = 0):

        mu^T = 1^T (I - diag(1-xi) m_d)^{-1} diag(1-xi),

    i.e. the gradient of sum_i r*_i with respect to a.  Solvent firms score
    zero; an isolated insolvent firm scores one; holdings of distressed
    debt amplify the score along chains of distress.
    """
    if np.any(net.m_s != 0.0):
        raise ValueError("threat index is defined for pure debt cross-holdings (m_s = 0)")
    xi = _xi_array(xi, net.n)
    fail = 1.0 - xi
    lhs = np.eye(net.n) - fail[:, None] * net.m_d
    try:
        y = np.linalg.solve(lhs.T, np.ones(net.n))
    except np.linalg.LinAlgError as exc:
        raise SensitivityError(f"singular sensitivity system: {exc}") from exc
    return fail * y


def aggregate_impact(net: FirmNetwork, xi) -> np.ndarray:
    """Column sums 1^T dx*/da: total claim-value response per asset shock."""
    xi_arr = _xi_array(xi, net.n)
    n = net.n
    J = jacobian_g(net, xi_arr)
    try:
        y = np.linalg.solve((np.eye(2 * n) - J).T, np.ones(2 * n))
    except np.linalg.LinAlgError as exc:
        raise SensitivityError(f"singular sensitivity system: {exc}") from exc
    return xi_arr * y[:n] + (1.0 - xi_arr) * y[n:]


def outside_sensitivity(net: FirmNetwork, xi) -> np.ndarray:
    """Jacobian of outside-investor value in a; columns sum to one.

    Differentiating the conservation identity sum_i v_out_i = sum_i a_i
    forces each column sum to equal one exactly: a marginal unit of outside
    assets is redistributed, never created or destroyed.
    """
    jac = claims_sensitivity(net, xi)
    out_s = net.outside_fraction_s()
    out_d = net.outside_fraction_d()
    return out_s[:, None] * jac.u_s + out_d[:, None] * jac.u_d
