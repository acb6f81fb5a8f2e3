"""Cross-holding network types, validation and accounting identities.

A network of n firms is described by two n x n holding matrices and a debt
vector.  Entry (i, j) of m_s is the fraction of firm j's equity held by firm
i; entry (i, j) of m_d is the fraction of firm j's debt held by firm i.
Whatever fraction of a claim is not held inside the network is held by
outside investors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "NetworkError",
    "ValidationReport",
    "FirmNetwork",
    "ClaimVector",
    "SolvencyVector",
    "validate_network",
    "firm_value",
    "outside_value",
    "symmetric_network",
    "load_network",
    "save_network",
]


class NetworkError(ValueError):
    """Raised when holding matrices or debt violate the admissibility rules."""


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the admissibility checks, one flag per rule.

    ``strict_all_columns`` is informational only: it records whether every
    column sum of both matrices is strictly below one, which some
    monotonicity results need but admissibility does not.
    """

    shapes_consistent: bool
    no_self_holdings: bool
    no_short_positions: bool
    sub_stochastic_columns: bool
    strict_external_holding: bool
    positive_debt: bool
    strict_all_columns: bool
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def validate_network(m_s, m_d, d) -> ValidationReport:
    """Check raw holding matrices and debt for admissibility.

    Total on finite inputs: never raises, always returns a report.  The
    rules are: zero diagonals, no negative holdings, column sums at most
    one, at least one column of each matrix strictly below one (some value
    leaks to outside investors), and strictly positive debt.
    """
    failures = []
    m_s = np.asarray(m_s, dtype=float)
    m_d = np.asarray(m_d, dtype=float)
    d = np.asarray(d, dtype=float)

    shapes = (
        m_s.ndim == 2
        and m_s.shape[0] == m_s.shape[1]
        and m_d.shape == m_s.shape
        and d.shape == (m_s.shape[0],)
    )
    if not shapes:
        failures.append(
            f"shape mismatch: m_s {m_s.shape}, m_d {m_d.shape}, d {d.shape}"
        )
        return ValidationReport(False, False, False, False, False, False, False,
                                tuple(failures))

    no_self = not (np.any(np.diag(m_s) != 0.0) or np.any(np.diag(m_d) != 0.0))
    if not no_self:
        failures.append("self-holding: nonzero diagonal entry")

    no_short = bool(np.all(m_s >= 0.0) and np.all(m_d >= 0.0))
    if not no_short:
        failures.append("short position: negative holding fraction")

    # tiny slack for accumulated rounding in column sums
    cs_s = m_s.sum(axis=0)
    cs_d = m_d.sum(axis=0)
    sub_stochastic = bool(np.all(cs_s <= 1.0 + 1e-12) and np.all(cs_d <= 1.0 + 1e-12))
    if not sub_stochastic:
        failures.append("column sum above one: holdings exceed the claim")

    strict_external = bool(np.any(cs_s < 1.0) and np.any(cs_d < 1.0))
    if not strict_external:
        failures.append("external holding: no column with sum strictly below one")

    positive_debt = bool(np.all(d > 0.0))
    if not positive_debt:
        failures.append("debt-positive: nominal debt must be strictly positive")

    strict_all = bool(np.all(cs_s < 1.0) and np.all(cs_d < 1.0))

    return ValidationReport(
        shapes_consistent=True,
        no_self_holdings=no_self,
        no_short_positions=no_short,
        sub_stochastic_columns=sub_stochastic,
        strict_external_holding=strict_external,
        positive_debt=positive_debt,
        strict_all_columns=strict_all,
        failures=tuple(failures),
    )


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FirmNetwork:
    """Admissible cross-holding network: matrices m_s, m_d and debt vector d.

    Immutable after construction; invalid inputs raise NetworkError.
    """

    m_s: np.ndarray
    m_d: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        m_s = _frozen_array(self.m_s)
        m_d = _frozen_array(self.m_d)
        d = _frozen_array(self.d)
        report = validate_network(m_s, m_d, d)
        if not report.ok:
            raise NetworkError("inadmissible network: " + "; ".join(report.failures))
        object.__setattr__(self, "m_s", m_s)
        object.__setattr__(self, "m_d", m_d)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def outside_fraction_s(self) -> np.ndarray:
        """Fraction of each firm's equity held outside the network."""
        return 1.0 - self.m_s.sum(axis=0)

    def outside_fraction_d(self) -> np.ndarray:
        """Fraction of each firm's debt held outside the network."""
        return 1.0 - self.m_d.sum(axis=0)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m_s": self.m_s.tolist(),
            "m_d": self.m_d.tolist(),
            "d": self.d.tolist(),
        }


@dataclass(frozen=True)
class ClaimVector:
    """Equity values s and recovery debt values r, stacked as x = (s; r)."""

    s: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        s = _frozen_array(np.atleast_1d(self.s))
        r = _frozen_array(np.atleast_1d(self.r))
        if s.shape != r.shape or s.ndim != 1:
            raise ValueError(f"claim blocks must be equal-length vectors, got {s.shape} and {r.shape}")
        if np.any(s < 0.0) or np.any(r < 0.0):
            raise ValueError("claim values must be non-negative")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "r", r)

    @property
    def n(self) -> int:
        return self.s.shape[0]

    @property
    def x(self) -> np.ndarray:
        """Stacked 2n-vector (s; r)."""
        return np.concatenate([self.s, self.r])


@dataclass(frozen=True)
class SolvencyVector:
    """Indicator per firm: 1 where firm value strictly exceeds debt, else 0."""

    xi: np.ndarray

    def __post_init__(self):
        xi = _frozen_array(np.atleast_1d(self.xi))
        if xi.ndim != 1 or not np.all((xi == 0.0) | (xi == 1.0)):
            raise ValueError("solvency entries must be 0 or 1")
        object.__setattr__(self, "xi", xi)

    @property
    def n(self) -> int:
        return self.xi.shape[0]

    def all_solvent(self) -> bool:
        return bool(np.all(self.xi == 1.0))

    def all_insolvent(self) -> bool:
        return bool(np.all(self.xi == 0.0))


def firm_value(net: FirmNetwork, claims: ClaimVector, a) -> np.ndarray:
    """Total firm value v = a + m_s s + m_d r."""
    a = np.asarray(a, dtype=float)
    if a.shape != (net.n,) or claims.n != net.n:
        raise ValueError(f"dimension mismatch: network n={net.n}, a {a.shape}, claims n={claims.n}")
    return a + net.m_s @ claims.s + net.m_d @ claims.r


def outside_value(net: FirmNetwork, claims: ClaimVector) -> np.ndarray:
    """Value accruing to outside investors per firm.

    Summed over firms this equals the total external assets whenever the
    claims are a self-consistent valuation (no value is created or lost by
    cross-holdings).
    """
    if claims.n != net.n:
        raise ValueError(f"dimension mismatch: network n={net.n}, claims n={claims.n}")
    return net.outside_fraction_s() * claims.s + net.outside_fraction_d() * claims.r


def symmetric_network(n: int, w_s: float, w_d: float, d: float = 1.0) -> FirmNetwork:
    """Fully symmetric network: every firm holds w/(n-1) of every other firm."""
    if n < 2:
        raise ValueError("symmetric network needs at least two firms")
    off = np.ones((n, n)) - np.eye(n)
    return FirmNetwork(m_s=off * (w_s / (n - 1)), m_d=off * (w_d / (n - 1)),
                       d=np.full(n, float(d)))


def load_network(path) -> FirmNetwork:
    """Read a network from a JSON file with keys n, m_s, m_d, d."""
    with open(path) as fh:
        obj = json.load(fh)
    try:
        n = int(obj["n"])
        net = FirmNetwork(m_s=obj["m_s"], m_d=obj["m_d"], d=obj["d"])
    except KeyError as exc:
        raise NetworkError(f"network file {path} missing key {exc}") from exc
    if net.n != n:
        raise NetworkError(f"network file {path}: n={n} does not match matrix size {net.n}")
    return net


def save_network(net: FirmNetwork, path) -> None:
    Path(path).write_text(json.dumps(net.to_dict(), indent=2) + "\n")
