"""Degree-sequence mathematics of (alpha, beta) power law graphs.

An (alpha, beta)-PLG has ``floor(e^alpha / i^beta)`` nodes of degree ``i`` for
``1 <= i <= floor(e^(alpha/beta))``.  Everything here is deterministic; the
random matching model lives in :mod:`plgtsp.sampling`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_NODE_CAP = 10**7
NODE_CAP_ENV = "PLGTSP_NODE_CAP"

# Relative slack applied before flooring, so that e.g. e^(ln 100) / 10^2,
# which evaluates to 0.99999999999999..., counts as 1.
_FLOOR_RTOL = 1e-12

_ZETA_TERMS = 4096


class NodeCapError(OverflowError):
    """A degree sequence would exceed the configured node cap."""


def node_cap() -> int:
    """Current node cap; ``PLGTSP_NODE_CAP`` overrides the default."""
    raw = os.environ.get(NODE_CAP_ENV)
    if raw is None:
        return DEFAULT_NODE_CAP
    return int(raw)


def robust_floor(x: float) -> int:
    return math.floor(x + _FLOOR_RTOL * max(1.0, abs(x)))


@lru_cache(maxsize=4096)
def zeta(s: float) -> float:
    """Riemann zeta for real ``s > 1``.

    Direct partial sum of the first 4096 terms, then the Euler-Maclaurin tail
    (integral, half-term and two derivative corrections).  The neglected
    remainder is below 1e-15 for every s > 1.
    """
    s = float(s)
    if not s > 1.0:
        raise ValueError(f"zeta(s) requires s > 1, got {s}")
    n = _ZETA_TERMS
    i = np.arange(n, 0, -1, dtype=float)
    head = float(np.sum(i ** -s))
    tail = (
        n ** (1.0 - s) / (s - 1.0)
        - 0.5 * n ** -s
        + s * n ** (-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n ** (-s - 3.0) / 720.0
    )
    return head + tail


@dataclass(frozen=True)
class PowerLawParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be a positive finite number, got {self.alpha}")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be a positive finite number, got {self.beta}")

    @classmethod
    def from_scale(cls, scale: float, beta: float) -> "PowerLawParams":
        """Parameters with ``e^alpha == scale`` (e.g. ``from_scale(1000, 2.5)``)."""
        return cls(math.log(scale), beta)

    @property
    def scale(self) -> float:
        """``e^alpha``, the number of degree-1 nodes before flooring."""
        return math.exp(self.alpha)

    @property
    def max_degree(self) -> int:
        return max(1, robust_floor(math.exp(self.alpha / self.beta)))


@dataclass(frozen=True)
class DegreeSequence:
    counts: dict[int, int]
    max_degree: int

    @property
    def node_count(self) -> int:
        return sum(self.counts.values())

    @property
    def volume(self) -> int:
        return sum(i * y for i, y in self.counts.items())

    def degrees(self) -> np.ndarray:
        """Per-node degree array; nodes are numbered by ascending degree."""
        ks = sorted(self.counts)
        return np.repeat(np.array(ks, dtype=np.int64), [self.counts[k] for k in ks])


def _counts_array(params: PowerLawParams) -> np.ndarray:
    delta = params.max_degree
    i = np.arange(1, delta + 1, dtype=float)
    x = params.scale / i**params.beta
    return np.floor(x + _FLOOR_RTOL * np.maximum(1.0, x)).astype(np.int64)


def degree_sequence(params: PowerLawParams, cap: int | None = None) -> DegreeSequence:
    cap = node_cap() if cap is None else cap
    delta = params.max_degree
    # every degree 1..delta has y_i >= 1, so delta alone can blow the cap
    if delta > cap:
        raise NodeCapError(f"max degree {delta} already exceeds node cap {cap}")
    y = _counts_array(params)
    total = int(y.sum())
    if total > cap:
        raise NodeCapError(f"degree sequence has {total} nodes, cap is {cap}")
    counts = {i + 1: int(c) for i, c in enumerate(y) if c > 0}
    return DegreeSequence(counts=counts, max_degree=delta)


def asymptotic_counts(params: PowerLawParams) -> tuple[float, float]:
    """Regime-dependent estimates ``(n, m)`` of node and edge counts."""
    a, b = params.alpha, params.beta
    ea = math.exp(a)
    if b > 1:
        n_est = zeta(b) * ea
    elif b == 1:
        n_est = a * ea
    else:
        n_est = math.exp(a / b) / (1.0 - b)
    if b > 2:
        m_est = 0.5 * zeta(b - 1) * ea
    elif b == 2:
        m_est = 0.25 * a * ea
    else:
        m_est = 0.5 * math.exp(2 * a / b) / (2.0 - b)
    return n_est, m_est


def interval_volume(params: PowerLawParams, a: int, b: int) -> int:
    """Exact sum of degrees of nodes whose degree lies in ``[a, b]``."""
    delta = params.max_degree
    if not (1 <= a <= b <= delta):
        raise ValueError(f"need 1 <= a <= b <= {delta}, got a={a}, b={b}")
    y = _counts_array(params)
    i = np.arange(a, b + 1, dtype=np.int64)
    return int(np.sum(y[a - 1 : b] * i))


def volume_upper_bound(params: PowerLawParams, x: float) -> float:
    """Closed-form bound ``e^(2a/b) / ((b-2) x^(b-2))`` on vol([x*Delta, Delta])."""
    b = params.beta
    if not b > 2:
        raise ValueError(f"volume bound needs beta > 2, got {b}")
    if not 0 < x <= 1:
        raise ValueError(f"x must lie in (0, 1], got {x}")
    return math.exp(2 * params.alpha / b) / ((b - 2) * x ** (b - 2))
