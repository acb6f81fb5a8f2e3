"""Shared test utilities: random admissible networks and finite differences."""

from __future__ import annotations

import numpy as np

from netgreeks import FirmNetwork, FixedPointConfig, solve_claims

TIGHT = FixedPointConfig(tol=1e-14, max_iter=50_000)


def random_holdings(rng, n, cap=0.9, density=0.6):
    """Random holding matrix with zero diagonal and column sums below cap."""
    m = np.zeros((n, n))
    for j in range(n):
        mask = rng.random(n) < density
        mask[j] = False
        if not mask.any():
            continue
        raw = rng.random(n) * mask
        m[:, j] = raw / raw.sum() * rng.uniform(0.05, cap)
    return m


def random_network(rng, n, cap=0.9, debt_only=False, density=0.6):
    m_d = random_holdings(rng, n, cap=cap, density=density)
    m_s = np.zeros((n, n)) if debt_only else random_holdings(rng, n, cap=cap, density=density)
    d = rng.uniform(0.5, 2.0, size=n)
    return FirmNetwork(m_s=m_s, m_d=m_d, d=d)


def random_interior_scenario(rng, n, cap=0.9, debt_only=False, margin=1e-3,
                             tries=50):
    """Network and assets whose fixed point sits away from every default boundary."""
    for _ in range(tries):
        net = random_network(rng, n, cap=cap, debt_only=debt_only)
        a = rng.uniform(0.2, 3.0, size=n)
        sol = solve_claims(net, a, TIGHT)
        v = a + net.m_s @ sol.claims.s + net.m_d @ sol.claims.r
        if np.abs(v - net.d).min() > margin * net.d.max():
            return net, a, sol
    raise AssertionError("no interior scenario found")


def fd_claims_jacobian(net, a, h=1e-6):
    """Central-difference dx*/da; exact on the piecewise-linear fixed point."""
    n = net.n
    jac = np.zeros((2 * n, n))
    for j in range(n):
        step = h * max(1.0, abs(a[j]))
        up = a.copy()
        up[j] += step
        dn = a.copy()
        dn[j] -= step
        x_up = solve_claims(net, up, TIGHT).claims.x
        x_dn = solve_claims(net, dn, TIGHT).claims.x
        jac[:, j] = (x_up - x_dn) / (2.0 * step)
    return jac
