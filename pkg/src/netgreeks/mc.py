"""Monte Carlo pricing and network Greeks.

Prices are discounted expectations of the fixed-point claims over terminal
asset draws.  Greeks combine the exact per-scenario sensitivities dx*/da
with the pathwise partials of the sampling map (the solvency pattern is
locally constant in every parameter, so the kink contributes nothing):

    d x_t / d theta = E[ d(e^{-r tau})/d theta x* + e^{-r tau} dx*/da dA_T/d theta ]

Only rho and theta pick up a discount-derivative term.  Estimates stream
through fixed-size chunks; per-chunk moments are combined with a pairwise
merge in deterministic order, so results are bit-identical for any thread
count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fixpoint import DEFAULT_CONFIG, ConvergenceError, FixedPointConfig, solve_claims_batch
from .gbm import GbmParams, cholesky_factor, normal_variates
from .network import FirmNetwork
from .sensitivity import dxda_batch

__all__ = [
    "MC_CHUNK",
    "PriceResult",
    "GreekReport",
    "price_claims",
    "mc_greeks",
    "delta_total",
]

MC_CHUNK = 8192
# cap chunk memory for large networks; depends on n only, never on threads
_CHUNK_BUDGET = 2_097_152


def _chunk_size(n: int) -> int:
    return min(MC_CHUNK, max(128, _CHUNK_BUDGET // max(1, n * n)))


@dataclass
class _RunningStat:
    """Mergeable mean/M2 accumulator (Welford form) over the leading axis."""

    count: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def from_samples(cls, x: np.ndarray) -> "_RunningStat":
        count = x.shape[0]
        mean = x.mean(axis=0)
        m2 = np.square(x - mean).sum(axis=0)
        return cls(count=count, mean=mean, m2=m2)

    def merge(self, other: "_RunningStat") -> "_RunningStat":
        total = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / total)
        m2 = self.m2 + other.m2 + np.square(delta) * (self.count * other.count / total)
        return _RunningStat(count=total, mean=mean, m2=m2)

    @property
    def se(self) -> np.ndarray:
        if self.count < 2:
            return np.full_like(np.asarray(self.mean, dtype=float), np.nan)
        return np.sqrt(self.m2 / (self.count - 1) / self.count)


def _tree_merge(stats: list[_RunningStat]) -> _RunningStat:
    # pairwise in index order: the reduction tree is a function of the chunk
    # count alone, which keeps float rounding independent of scheduling
    while len(stats) > 1:
        merged = []
        for i in range(0, len(stats) - 1, 2):
            merged.append(stats[i].merge(stats[i + 1]))
        if len(stats) % 2:
            merged.append(stats[-1])
        stats = merged
    return stats[0]


@dataclass
class PriceResult:
    """Discounted claim prices, stacked (equity_1..n, debt_1..n)."""

    price: np.ndarray
    se: np.ndarray
    draws: int
    seed: int
    boundary_hits: int

    def to_dict(self) -> dict:
        return {
            "price": self.price.tolist(),
            "se": self.se.tolist(),
            "draws": self.draws,
            "seed": self.seed,
            "boundary_hits": self.boundary_hits,
        }


@dataclass
class GreekReport:
    """Prices and Greeks with standard errors.

    Vectors over claims have length 2n (equity block then debt block).
    delta and vega are (2n, n): sensitivity of each claim to each firm's
    spot or volatility.  delta_uniform / vega_uniform are the row sums,
    i.e. the response to bumping every firm's parameter at once, accumulated
    per draw so their standard errors are valid.  pi is the undiscounted
    aggregate terminal-asset sensitivity per firm; delta_total its
    market-value counterpart 1' Delta.
    """

    n: int
    draws: int
    seed: int
    price: np.ndarray
    price_se: np.ndarray
    delta: np.ndarray
    delta_se: np.ndarray
    vega: np.ndarray
    vega_se: np.ndarray
    theta: np.ndarray
    theta_se: np.ndarray
    rho: np.ndarray
    rho_se: np.ndarray
    pi: np.ndarray
    pi_se: np.ndarray
    delta_total: np.ndarray
    delta_total_se: np.ndarray
    delta_uniform: np.ndarray
    delta_uniform_se: np.ndarray
    vega_uniform: np.ndarray
    vega_uniform_se: np.ndarray
    default_prob: np.ndarray
    default_prob_se: np.ndarray
    boundary_hits: int

    def to_dict(self) -> dict:
        out = {"n": self.n, "draws": self.draws, "seed": self.seed,
               "boundary_hits": self.boundary_hits}
        for name in ("price", "delta", "vega", "theta", "rho", "pi",
                     "delta_total", "delta_uniform", "vega_uniform",
                     "default_prob"):
            out[name] = getattr(self, name).tolist()
            out[name + "_se"] = getattr(self, name + "_se").tolist()
        return out

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def _mc_chunk(net, gbm, L, cfg, seed, start, count, boundary_rel, want_greeks):
    z = normal_variates(seed, count, gbm.n, start=start)
    y = z @ L.T
    sig = gbm.sigma
    tau = gbm.tau
    sqrt_tau = np.sqrt(tau)
    a_T = gbm.a_t * np.exp((gbm.r - 0.5 * sig**2) * tau + sqrt_tau * sig * y)
    try:
        sol = solve_claims_batch(net, a_T, cfg)
    except ConvergenceError as exc:
        raise ConvergenceError(
            f"scenario solve failed at draw {start + (exc.draw or 0)}: {exc}",
            claims=exc.claims, residual=exc.residual,
            iterations=exc.iterations, draw=start + (exc.draw or 0),
        ) from exc
    x = np.hstack([sol.s, sol.r])
    disc = np.exp(-gbm.r * tau)
    boundary = int(np.any(np.abs(sol.v - net.d) <= boundary_rel * net.d, axis=1).sum())

    out = {"price": disc * x, "solvent": sol.xi}
    if want_greeks:
        dxda = dxda_batch(net, sol.xi)
        da_t = a_T / gbm.a_t
        dsigma = a_T * (-sig * tau + sqrt_tau * y)
        dr = a_T * tau
        dtau = a_T * (gbm.r - 0.5 * sig**2 + sig * y / (2.0 * sqrt_tau))
        delta = disc * dxda * da_t[:, None, :]
        vega = disc * dxda * dsigma[:, None, :]
        out["delta"] = delta
        out["vega"] = vega
        out["delta_total"] = delta.sum(axis=1)
        out["delta_uniform"] = delta.sum(axis=2)
        out["vega_uniform"] = vega.sum(axis=2)
        # rho and theta carry the discount-factor derivative alongside the
        # pathwise term; theta is quoted as -d(price)/d(tau)
        out["rho"] = disc * (-tau * x + np.einsum("bkj,bj->bk", dxda, dr))
        out["theta"] = -disc * (-gbm.r * x + np.einsum("bkj,bj->bk", dxda, dtau))
        out["pi"] = dxda.sum(axis=1)
    return {name: _RunningStat.from_samples(arr) for name, arr in out.items()}, boundary


def _run_chunks(net, gbm, draws, seed, cfg, boundary_rel, want_greeks, threads):
    if net.n != gbm.n:
        raise ValueError(f"network has {net.n} firms, asset model has {gbm.n}")
    if draws < 2:
        raise ValueError("need at least 2 draws for standard errors")
    L = cholesky_factor(gbm.corr)
    size = _chunk_size(gbm.n)
    tasks = [(start, min(size, draws - start)) for start in range(0, draws, size)]

    def work(task):
        start, count = task
        return _mc_chunk(net, gbm, L, cfg, seed, start, count, boundary_rel, want_greeks)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]

    names = results[0][0].keys()
    stats = {name: _tree_merge([res[0][name] for res in results]) for name in names}
    boundary = sum(res[1] for res in results)
    return stats, boundary


def price_claims(net: FirmNetwork, gbm: GbmParams, draws: int, seed: int,
                 cfg: FixedPointConfig = DEFAULT_CONFIG,
                 boundary_rel: float = 1e-9, threads: int = 1) -> PriceResult:
    """Discounted claim prices by plain Monte Carlo."""
    stats, boundary = _run_chunks(net, gbm, draws, seed, cfg, boundary_rel,
                                  want_greeks=False, threads=threads)
    price = stats["price"]
    return PriceResult(price=price.mean, se=price.se, draws=draws, seed=seed,
                       boundary_hits=boundary)


def mc_greeks(net: FirmNetwork, gbm: GbmParams, draws: int, seed: int,
              cfg: FixedPointConfig = DEFAULT_CONFIG,
              boundary_rel: float = 1e-9, threads: int = 1) -> GreekReport:
    """Prices plus delta, vega, theta, rho and systemic aggregates.

    boundary_rel flags draws with any firm value within boundary_rel * d_i
    of its default boundary, where the one-sided sensitivities make the
    pathwise estimator locally biased; hits are counted, not dropped.
    """
    stats, boundary = _run_chunks(net, gbm, draws, seed, cfg, boundary_rel,
                                  want_greeks=True, threads=threads)
    solvent = stats["solvent"]
    return GreekReport(
        n=net.n, draws=draws, seed=seed,
        price=stats["price"].mean, price_se=stats["price"].se,
        delta=stats["delta"].mean, delta_se=stats["delta"].se,
        vega=stats["vega"].mean, vega_se=stats["vega"].se,
        theta=stats["theta"].mean, theta_se=stats["theta"].se,
        rho=stats["rho"].mean, rho_se=stats["rho"].se,
        pi=stats["pi"].mean, pi_se=stats["pi"].se,
        delta_total=stats["delta_total"].mean, delta_total_se=stats["delta_total"].se,
        delta_uniform=stats["delta_uniform"].mean, delta_uniform_se=stats["delta_uniform"].se,
        vega_uniform=stats["vega_uniform"].mean, vega_uniform_se=stats["vega_uniform"].se,
        default_prob=1.0 - solvent.mean, default_prob_se=solvent.se,
        boundary_hits=boundary,
    )


def delta_total(report: GreekReport) -> np.ndarray:
    """Aggregate market-value delta 1' Delta per firm (column sums)."""
    return report.delta.sum(axis=0)
