"""Experiment configs, runners and deterministic file output.

Every runner takes an ExperimentConfig parsed from JSON, derives all
randomness from the config seed with stable per-task indices, and writes
CSV (17 significant digits) or JSON.  Work is parallelized across
independent tasks with results merged in submission order, so output files
are byte-identical for any thread count.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .fixpoint import FixedPointConfig, solve_claims_batch
from .gbm import GbmParams, normal_variates
from .local import independent_default_delta, local_delta, local_fixed_point, marginal_contagion
from .mc import mc_greeks, price_claims
from .netgen import er_network, member_seed
from .network import FirmNetwork, load_network, validate_network
from .sensitivity import dxda_batch
from .symmetric import (SymmetricParams, symmetric_expost, symmetric_greeks,
                        symmetric_pi, symmetric_price)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "run_symmetric_grid",
    "run_two_firm",
    "run_er_sweep",
    "run_price",
    "run_greeks",
    "run_local_compare",
    "run_validate",
    "run_experiment",
]

KINDS = ("symmetric-grid", "two-firm", "er-sweep", "price", "greeks",
         "local-compare", "validate")


class ConfigError(ValueError):
    """Malformed or incomplete experiment configuration."""


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def write_csv(path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def _grid(obj, key) -> tuple[float, ...]:
    """Accept a list of values or {start, stop, step} (stop inclusive)."""
    if isinstance(obj, (int, float)):
        return (float(obj),)
    if isinstance(obj, (list, tuple)):
        return tuple(float(v) for v in obj)
    if isinstance(obj, dict):
        try:
            start, stop, step = float(obj["start"]), float(obj["stop"]), float(obj["step"])
        except KeyError as exc:
            raise ConfigError(f"{key}: grid spec needs start/stop/step, missing {exc}") from exc
        if step <= 0 or stop < start:
            raise ConfigError(f"{key}: need step > 0 and stop >= start")
        count = int(round((stop - start) / step)) + 1
        return tuple(start + i * step for i in range(count))
    raise ConfigError(f"{key}: expected number, list or start/stop/step mapping")


@dataclass
class ExperimentConfig:
    """Union of the per-kind settings; from_dict validates what each kind needs."""

    kind: str
    out: str | None = None
    seed: int = 0
    draws: int = 10_000
    threads: int = 1
    networks: int = 200
    n: int = 30
    d: float = 1.0
    r: float = 0.0
    tau: float = 1.0
    sigma: tuple[float, ...] = (0.4,)
    a0: tuple[float, ...] = ()
    w_s: tuple[float, ...] = (0.0,)
    w_d: tuple[float, ...] = (0.0,)
    k_mean: tuple[float, ...] = ()
    network: str | None = None
    a_t: tuple[float, ...] | None = None
    corr: list | None = None
    firm_vol: tuple[float, ...] | None = None
    sinkhorn: bool = False
    tol: float = 1e-12
    max_iter: int = 10_000

    REQUIRED = {
        "symmetric-grid": ("a0", "w_s", "w_d", "sigma"),
        "two-firm": ("a0", "w_d", "sigma", "d"),
        "er-sweep": ("k_mean", "w_d", "a0", "sigma", "n", "networks"),
        "price": ("network", "a_t", "sigma"),
        "greeks": ("network", "a_t", "sigma"),
        "local-compare": ("network", "a_t", "sigma", "firm_vol"),
        "validate": ("network",),
    }

    @classmethod
    def from_dict(cls, obj: dict, kind: str | None = None) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        obj = dict(obj)
        cfg_kind = obj.pop("kind", kind)
        if cfg_kind is None:
            raise ConfigError("config needs a 'kind'")
        if kind is not None and cfg_kind != kind:
            raise ConfigError(f"config kind {cfg_kind!r} does not match requested {kind!r}")
        if cfg_kind not in KINDS:
            raise ConfigError(f"unknown kind {cfg_kind!r}; expected one of {KINDS}")

        missing = [key for key in cls.REQUIRED[cfg_kind] if key not in obj]
        if missing:
            raise ConfigError(f"{cfg_kind}: missing required keys {missing}")

        kwargs = {"kind": cfg_kind}
        grid_keys = ("sigma", "a0", "w_s", "w_d", "k_mean", "a_t", "firm_vol")
        simple = {"out": str, "network": str, "seed": int, "draws": int,
                  "threads": int, "networks": int, "n": int, "d": float,
                  "r": float, "tau": float, "sinkhorn": bool, "tol": float,
                  "max_iter": int}
        try:
            for key, value in obj.items():
                if key in grid_keys:
                    kwargs[key] = _grid(value, key)
                elif key in simple:
                    kwargs[key] = simple[key](value)
                elif key == "corr":
                    kwargs[key] = value
                else:
                    raise ConfigError(f"unknown config key {key!r}")
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value for {key!r}: {exc}") from exc
        cfg = cls(**kwargs)
        if cfg.draws < 2:
            raise ConfigError("draws must be at least 2")
        if cfg.threads < 1:
            raise ConfigError("threads must be at least 1")
        return cfg

    @classmethod
    def from_json(cls, path, kind: str | None = None) -> "ExperimentConfig":
        try:
            obj = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(obj, kind=kind)

    def fixed_point_config(self) -> FixedPointConfig:
        return FixedPointConfig(tol=self.tol, max_iter=self.max_iter)


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _task_seed(base: int, *tags: int) -> int:
    seq = np.random.SeedSequence(entropy=base, spawn_key=tuple(tags))
    return int(seq.generate_state(1, np.uint64)[0])


def _ordered_map(fn, tasks, threads: int) -> list:
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


# ---------------------------------------------------------------------------
# closed-form symmetric grid

SYMMETRIC_GRID_HEADER = [
    "a0", "w_s", "w_d", "sigma", "d", "r", "tau",
    "s_star", "r_star", "xi",
    "s_t", "r_t", "delta_s", "delta_r", "vega_s", "vega_r",
    "theta_s", "theta_r", "rho_s", "rho_r", "pi",
]


def run_symmetric_grid(cfg: ExperimentConfig, out=None) -> list[list]:
    """Closed-form prices and Greeks over the (a0, w_s, w_d, sigma) grid."""
    rows = []
    for a0, w_s, w_d, sigma in product(cfg.a0, cfg.w_s, cfg.w_d, cfg.sigma):
        p = SymmetricParams(w_s=w_s, w_d=w_d, d=cfg.d, a_t=a0, sigma=sigma,
                            r=cfg.r, tau=cfg.tau)
        s_star, r_star, xi = symmetric_expost(a0, p)
        s_t, r_t = symmetric_price(p)
        g = symmetric_greeks(p)
        rows.append([a0, w_s, w_d, sigma, cfg.d, cfg.r, cfg.tau,
                     s_star, r_star, xi, s_t, r_t,
                     g.delta_s, g.delta_r, g.vega_s, g.vega_r,
                     g.theta_s, g.theta_r, g.rho_s, g.rho_r,
                     symmetric_pi(p)])
    if out is not None:
        write_csv(out, SYMMETRIC_GRID_HEADER, rows)
    return rows


# ---------------------------------------------------------------------------
# two-firm mutual debt experiment

TWO_FIRM_HEADER = ["draw", "seed", "a1_T", "a2_T", "v1", "v2", "xi1", "xi2"]


def run_two_firm(cfg: ExperimentConfig, out=None) -> list[list]:
    """Per-draw firm values for two firms with mutual debt holdings.

    Assets are independent; any correlation between realized firm values is
    generated by the cross-holdings alone.
    """
    w_d = cfg.w_d[0]
    a0 = cfg.a0[0]
    sigma = cfg.sigma[0]
    m_d = np.array([[0.0, w_d], [w_d, 0.0]])
    net = FirmNetwork(m_s=np.zeros((2, 2)), m_d=m_d, d=np.full(2, cfg.d))
    gbm = GbmParams(a_t=np.full(2, a0), sigma=np.full(2, sigma), r=cfg.r,
                    tau=cfg.tau, corr=np.eye(2))
    z = normal_variates(cfg.seed, cfg.draws, 2)
    drift = (cfg.r - 0.5 * sigma**2) * cfg.tau
    a_T = a0 * np.exp(drift + np.sqrt(cfg.tau) * sigma * z)
    sol = solve_claims_batch(net, a_T, cfg.fixed_point_config())
    rows = [[i, cfg.seed, a_T[i, 0], a_T[i, 1], sol.v[i, 0], sol.v[i, 1],
             int(sol.xi[i, 0]), int(sol.xi[i, 1])] for i in range(cfg.draws)]
    if out is not None:
        write_csv(out, TWO_FIRM_HEADER, rows)
    return rows


# ---------------------------------------------------------------------------
# random-network contagion sweep

ER_SWEEP_HEADER = [
    "k_mean", "w_d", "a0", "sigma", "d", "r", "tau", "n", "networks", "draws",
    "seed", "s_price", "r_price", "v_price", "capital_ratio", "asset_ratio",
    "default_prob",
    "delta_s_hat", "delta_r_hat", "delta_total_hat",
    "vega_s_hat", "vega_r_hat", "vega_total_hat",
    "theta_s_hat", "theta_r_hat", "theta_total_hat",
    "rho_s_hat", "rho_r_hat", "rho_total_hat",
    "pi_hat", "boundary_hits",
]


def _member_aggregates(net, a0, sigma, r, tau, draws, seed, fp_cfg):
    n = net.n
    gbm = GbmParams(a_t=np.full(n, a0), sigma=np.full(n, sigma), r=r, tau=tau,
                    corr=np.eye(n))
    rep = mc_greeks(net, gbm, draws, seed, cfg=fp_cfg)
    return {
        "s_price": rep.price[:n].mean(),
        "r_price": rep.price[n:].mean(),
        "default_prob": rep.default_prob.mean(),
        "delta_s": rep.delta[:n].sum() / n,
        "delta_r": rep.delta[n:].sum() / n,
        "vega_s": rep.vega[:n].sum() / n,
        "vega_r": rep.vega[n:].sum() / n,
        "theta_s": rep.theta[:n].mean(),
        "theta_r": rep.theta[n:].mean(),
        "rho_s": rep.rho[:n].mean(),
        "rho_r": rep.rho[n:].mean(),
        "pi": rep.pi.mean(),
        "boundary_hits": rep.boundary_hits,
    }


def run_er_sweep(cfg: ExperimentConfig, out=None) -> list[list]:
    """Ensemble-averaged prices and Greeks over (k_mean, w_d, a0) cells.

    Networks are drawn once per (k_mean, w_d) and reused across the a0 grid;
    Monte Carlo seeds are derived per (cell, member).  Firm-level quantities
    are averaged over firms, then over ensemble members.
    """
    sigma = cfg.sigma[0]
    fp_cfg = cfg.fixed_point_config()
    rows = []
    for ki, k_mean in enumerate(cfg.k_mean):
        for wi, w_d in enumerate(cfg.w_d):
            net_seeds = [_task_seed(cfg.seed, 0, ki, wi, m) for m in range(cfg.networks)]
            nets = [er_network(cfg.n, k_mean, w_d, seed=s, d=cfg.d,
                               sinkhorn=cfg.sinkhorn) for s in net_seeds]

            tasks = [(ai, m) for ai in range(len(cfg.a0)) for m in range(cfg.networks)]

            def work(task, nets=nets, ki=ki, wi=wi):
                ai, m = task
                seed = _task_seed(cfg.seed, 1, ki, wi, ai, m)
                return _member_aggregates(nets[m], cfg.a0[ai], sigma, cfg.r,
                                          cfg.tau, cfg.draws, seed, fp_cfg)

            results = _ordered_map(work, tasks, cfg.threads)
            for ai, a0 in enumerate(cfg.a0):
                cell = results[ai * cfg.networks:(ai + 1) * cfg.networks]
                mean = {key: float(np.mean([c[key] for c in cell]))
                        for key in cell[0] if key != "boundary_hits"}
                hits = int(sum(c["boundary_hits"] for c in cell))
                v_price = mean["s_price"] + mean["r_price"]
                rows.append([
                    k_mean, w_d, a0, sigma, cfg.d, cfg.r, cfg.tau, cfg.n,
                    cfg.networks, cfg.draws, cfg.seed,
                    mean["s_price"], mean["r_price"], v_price,
                    mean["s_price"] / v_price if v_price else np.nan,
                    a0 / v_price if v_price else np.nan,
                    mean["default_prob"],
                    mean["delta_s"], mean["delta_r"],
                    mean["delta_s"] + mean["delta_r"],
                    mean["vega_s"], mean["vega_r"],
                    mean["vega_s"] + mean["vega_r"],
                    mean["theta_s"], mean["theta_r"],
                    mean["theta_s"] + mean["theta_r"],
                    mean["rho_s"], mean["rho_r"],
                    mean["rho_s"] + mean["rho_r"],
                    mean["pi"], hits,
                ])
            _progress(f"er-sweep: k_mean={k_mean:g} w_d={w_d:g} done "
                      f"({len(rows)}/{len(cfg.k_mean) * len(cfg.w_d) * len(cfg.a0)} rows)")
    if out is not None:
        write_csv(out, ER_SWEEP_HEADER, rows)
    return rows


# ---------------------------------------------------------------------------
# pricing and Greeks for a network from file

def _gbm_from_config(cfg: ExperimentConfig, net: FirmNetwork) -> GbmParams:
    a_t = np.asarray(cfg.a_t, dtype=float)
    if a_t.shape == (1,):
        a_t = np.full(net.n, a_t[0])
    sigma = np.asarray(cfg.sigma, dtype=float)
    if sigma.shape == (1,):
        sigma = np.full(net.n, sigma[0])
    corr = np.eye(net.n) if cfg.corr is None else np.asarray(cfg.corr, dtype=float)
    try:
        return GbmParams(a_t=a_t, sigma=sigma, r=cfg.r, tau=cfg.tau, corr=corr)
    except ValueError as exc:
        raise ConfigError(f"bad asset model: {exc}") from exc


def _load_net(cfg: ExperimentConfig) -> FirmNetwork:
    try:
        return load_network(cfg.network)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load network {cfg.network}: {exc}") from exc


def run_price(cfg: ExperimentConfig, out=None) -> dict:
    net = _load_net(cfg)
    res = price_claims(net, _gbm_from_config(cfg, net), cfg.draws, cfg.seed,
                       cfg=cfg.fixed_point_config(), threads=cfg.threads)
    payload = res.to_dict()
    payload["n"] = net.n
    if out is not None:
        Path(out).write_text(json.dumps(payload, indent=2) + "\n")
    return payload


def run_greeks(cfg: ExperimentConfig, out=None) -> dict:
    net = _load_net(cfg)
    rep = mc_greeks(net, _gbm_from_config(cfg, net), cfg.draws, cfg.seed,
                    cfg=cfg.fixed_point_config(), threads=cfg.threads)
    payload = rep.to_dict()
    if out is not None:
        Path(out).write_text(json.dumps(payload, indent=2) + "\n")
    return payload


# ---------------------------------------------------------------------------
# exact vs local approximation comparison

LOCAL_COMPARE_HEADER = [
    "i", "j", "m_d", "pd_i", "pd_j",
    "exact_drda", "exact_se", "independent_drda", "contagion_amplification",
    "local_equity_delta",
]


def run_local_compare(cfg: ExperimentConfig, out=None) -> list[list]:
    """Exact Monte Carlo debt sensitivities against local approximations.

    exact_drda is E[dr*/da] entrywise; independent_drda its
    independent-marginal approximation at the Monte Carlo default
    probabilities; contagion_amplification the loss-propagation matrix; and
    local_equity_delta the put-adjusted equity response.
    """
    net = _load_net(cfg)
    n = net.n
    gbm = _gbm_from_config(cfg, net)
    fp_cfg = cfg.fixed_point_config()

    chunk = max(128, 2_097_152 // max(1, n * n))
    total = np.zeros((n, n))
    total_sq = np.zeros((n, n))
    solvent = np.zeros(n)
    drift = (cfg.r - 0.5 * gbm.sigma**2) * cfg.tau
    for start in range(0, cfg.draws, chunk):
        count = min(chunk, cfg.draws - start)
        z = normal_variates(cfg.seed, count, n, start=start)
        a_T = gbm.a_t * np.exp(drift + np.sqrt(cfg.tau) * gbm.sigma * z)
        sol = solve_claims_batch(net, a_T, fp_cfg)
        u_d = dxda_batch(net, sol.xi)[:, n:, :]
        total += u_d.sum(axis=0)
        total_sq += np.square(u_d).sum(axis=0)
        solvent += sol.xi.sum(axis=0)
    exact = total / cfg.draws
    var = np.maximum(total_sq / cfg.draws - np.square(exact), 0.0)
    exact_se = np.sqrt(var / cfg.draws)
    pd = 1.0 - solvent / cfg.draws

    indep = independent_default_delta(net, pd)
    amplification = marginal_contagion(net, pd, np.eye(n))
    state = local_fixed_point(net, gbm.a_t, cfg.r, cfg.tau, cfg.firm_vol, cfg=fp_cfg)
    ldelta = local_delta(state, net)

    rows = []
    for i in range(n):
        for j in range(n):
            rows.append([i, j, net.m_d[i, j], pd[i], pd[j],
                         exact[i, j], exact_se[i, j], indep[i, j],
                         amplification[i, j], ldelta[i, j]])
    if out is not None:
        write_csv(out, LOCAL_COMPARE_HEADER, rows)
    return rows


# ---------------------------------------------------------------------------
# validation

def run_validate(cfg: ExperimentConfig, out=None) -> bool:
    try:
        with open(cfg.network) as fh:
            obj = json.load(fh)
        m_s, m_d, d = obj["m_s"], obj["m_d"], obj["d"]
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"cannot read network {cfg.network}: {exc}") from exc
    report = validate_network(m_s, m_d, d)
    lines = [f"network: {cfg.network}"]
    for name in ("shapes_consistent", "no_self_holdings", "no_short_positions",
                 "sub_stochastic_columns", "strict_external_holding",
                 "positive_debt", "strict_all_columns"):
        lines.append(f"  {name}: {getattr(report, name)}")
    lines.append("OK" if report.ok else "FAILED: " + "; ".join(report.failures))
    text = "\n".join(lines)
    print(text)
    if out is not None:
        Path(out).write_text(text + "\n")
    return report.ok


RUNNERS = {
    "symmetric-grid": run_symmetric_grid,
    "two-firm": run_two_firm,
    "er-sweep": run_er_sweep,
    "price": run_price,
    "greeks": run_greeks,
    "local-compare": run_local_compare,
    "validate": run_validate,
}


def run_experiment(cfg: ExperimentConfig, out=None):
    """Dispatch to the runner for cfg.kind; out overrides cfg.out."""
    return RUNNERS[cfg.kind](cfg, out=out if out is not None else cfg.out)
