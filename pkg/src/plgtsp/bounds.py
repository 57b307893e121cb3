"""Closed-form approximation ratios, expectations and inapproximability bounds.

Every bound is a function of the exponent ``beta`` alone and is only defined
on its validity interval; evaluating outside raises :class:`BoundDomainError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .model import PowerLawParams, zeta


class BoundId(str, Enum):
    MST_GRAPHIC = "mst_graphic"
    CHRISTOFIDES_GRAPHIC = "christofides_graphic"
    MS_GRAPHIC_STATED = "ms_graphic_stated"
    MS_GRAPHIC_WITH_T = "ms_graphic_with_t"
    MUCHA_GRAPHIC = "mucha_graphic"
    ONETWO_DET = "onetwo_det"
    ONETWO_LARGE = "onetwo_large"
    EK_BETA_GT2 = "ek_beta_gt2"
    ONETWO_RANDOM_GT2 = "onetwo_random_gt2"
    ONETWO_RANDOM_1TO2 = "onetwo_random_1to2"
    ONETWO_RANDOM_EQ2 = "onetwo_random_eq2"
    LB_SIMPLE = "lb_simple"
    LB_PACKING = "lb_packing"
    REF_7_5 = "ref_7_5"
    REF_8_7 = "ref_8_7"


class BoundDomainError(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = False

    def __contains__(self, x: float) -> bool:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above and below

    def __str__(self) -> str:
        hi = "inf" if math.isinf(self.hi) else f"{self.hi:g}"
        return f"{'[' if self.lo_closed else '('}{self.lo:g}, {hi}{']' if self.hi_closed else ')'}"


# beyond this the sampled graphs stop being connected; the tree-based ratios
# remain defined and are quoted past it, the removable-pairing ones are not
GRAPHIC_MAX_BETA = 2.48
# zeta(beta - 1) = 2 has its root at ~2.7287, so the quoted 2.729 lies inside
LARGE_EXPONENT_MIN = 2.729
BETA_STAR = math.log(516 / 36) / math.log(4 / 3)


def lower_ratio_base(beta: float) -> float:
    """max{2, zeta(beta) + 1/2}: per-node tour cost floor in units of e^alpha."""
    return max(2.0, zeta(beta) + 0.5)


def t_beta(beta: float) -> float:
    """Extra removable-edge mass (coefficient of e^alpha) from high-degree nodes."""
    if not 2 < beta:
        raise BoundDomainError(f"t_beta needs beta > 2, got {beta}")
    base = (beta - 2) * (zeta(beta - 1) / 2 - zeta(beta) + 1)
    return base ** ((beta - 1) / (beta - 2)) / (beta - 1)


def deg1_neighbor_term(beta: float) -> float:
    """Expected A1 per e^alpha (degree-1 neighbours of high-degree nodes), beta > 2."""
    z1 = zeta(beta - 1)
    return (1 / ((beta - 2) * (beta - 1)) - 1 / (4 * z1)) / (z1 ** (beta - 1) * 2 ** (beta - 1))


def deg2_neighbor_term(beta: float) -> float:
    """Expected A2 per e^alpha (degree-2 neighbours of high-degree nodes), beta > 2."""
    z1 = zeta(beta - 1)
    return (2 ** (-beta * (beta - 1)) * z1 ** (1 - beta) / ((beta - 1) * (beta - 2))
            + z1 ** (-beta) * (2 ** (-(beta * beta + 1)) - 2 ** (-2 * beta)))


def ek_coefficient(beta: float) -> float:
    """Expected 2-edge count of an optimum cycle cover per e^alpha.

    Both neighbour terms bound nonnegative quantities, so a negative value is
    clamped to 0.
    """
    return 0.5 + max(0.0, deg1_neighbor_term(beta)) + max(0.0, deg2_neighbor_term(beta))


def _random_ratio(z: float, e: float) -> float:
    return (11 / 9 * z + 29 / 36 * e) / (z + e)


def _mst(b):
    return 2 * zeta(b) / lower_ratio_base(b)


def _christofides(b):
    return 0.5 + zeta(b) / lower_ratio_base(b)


def _ms_numerator(b):
    return 2 / 3 * zeta(b - 1) + 2 / 3 * zeta(b) + 5 / 6


def _ms_stated(b):
    return _ms_numerator(b) / (0.5 + lower_ratio_base(b))


def _ms_with_t(b):
    return (_ms_numerator(b) - 2 / 3 * t_beta(b)) / (0.5 + lower_ratio_base(b))


def _mucha(b):
    return 10 / 9 + zeta(b) / 3 / lower_ratio_base(b)


def _onetwo_det(b):
    z = zeta(b)
    return (11 / 9 * z + 29 / 72) / (z + 0.5)


def _onetwo_large(b):
    z = zeta(b)
    return (2 * z + 0.5 * zeta(b - 1) - 1) / (z + 0.5)


def lb_simple_denominator(beta: float) -> float:
    """Filler scale per gadget unit for the plain embedding (regime switch at BETA_STAR)."""
    return 3 ** beta * 516 if beta <= BETA_STAR else 4 ** beta * 36


def lb_packing_denominator(beta: float) -> float:
    return 3 ** (beta - 1) * 2 * (beta - 1) * 354


def _gap(d: float, b: float) -> float:
    x = d * (zeta(b) + 0.5)
    return (x + 1) / x


@dataclass(frozen=True)
class BoundSpec:
    id: BoundId
    domain: Interval
    fn: Callable[[float], float]
    formula: str


_OPEN_ANY = Interval(1.0, math.inf)
_SPECS = [
    BoundSpec(BoundId.MST_GRAPHIC, _OPEN_ANY, _mst,
              "2 z(b) / max(2, z(b) + 1/2)"),
    BoundSpec(BoundId.CHRISTOFIDES_GRAPHIC, _OPEN_ANY,
              _christofides, "1/2 + z(b) / max(2, z(b) + 1/2)"),
    BoundSpec(BoundId.MS_GRAPHIC_STATED, Interval(2.0, GRAPHIC_MAX_BETA, hi_closed=True), _ms_stated,
              "(2/3 z(b-1) + 2/3 z(b) + 5/6) / (1/2 + max(2, z(b) + 1/2))"),
    BoundSpec(BoundId.MS_GRAPHIC_WITH_T, Interval(2.0, GRAPHIC_MAX_BETA, hi_closed=True), _ms_with_t,
              "(2/3 z(b-1) + 2/3 z(b) + 5/6 - 2/3 t(b)) / (1/2 + max(2, z(b) + 1/2)), "
              "t(b) = [(b-2)(z(b-1)/2 - z(b) + 1)]^((b-1)/(b-2)) / (b-1)"),
    BoundSpec(BoundId.MUCHA_GRAPHIC, _OPEN_ANY, _mucha,
              "10/9 + (1/3) z(b) / max(2, z(b) + 1/2)"),
    BoundSpec(BoundId.ONETWO_DET, _OPEN_ANY, _onetwo_det, "(11/9 z(b) + 29/72) / (z(b) + 1/2)"),
    BoundSpec(BoundId.ONETWO_LARGE, Interval(LARGE_EXPONENT_MIN, math.inf, lo_closed=True),
              _onetwo_large, "(2 z(b) + 1/2 z(b-1) - 1) / (z(b) + 1/2)"),
    BoundSpec(BoundId.EK_BETA_GT2, Interval(2.0, math.inf), ek_coefficient,
              "1/2 + max(0, a1(b)) + max(0, a2(b))"),
    BoundSpec(BoundId.ONETWO_RANDOM_GT2, Interval(2.0, math.inf),
              lambda b: _random_ratio(zeta(b), ek_coefficient(b)),
              "(11/9 z(b) + 29/36 E_k(b)) / (z(b) + E_k(b))"),
    BoundSpec(BoundId.ONETWO_RANDOM_1TO2, Interval(1.0, 2.0),
              lambda b: _random_ratio(zeta(b), 5 / 4), "(11/9 z(b) + 29/36 * 5/4) / (z(b) + 5/4)"),
    BoundSpec(BoundId.ONETWO_RANDOM_EQ2, Interval(2.0, 2.0, True, True),
              lambda b: _random_ratio(zeta(b), 5 / 8), "(11/9 z(2) + 29/36 * 5/8) / (z(2) + 5/8)"),
    BoundSpec(BoundId.LB_SIMPLE, _OPEN_ANY, lambda b: _gap(lb_simple_denominator(b), b),
              "(D z' + 1) / (D z'), z' = z(b) + 1/2, D = 3^b 516 for b <= b*, 4^b 36 above"),
    BoundSpec(BoundId.LB_PACKING, _OPEN_ANY, lambda b: _gap(lb_packing_denominator(b), b),
              "(D z' + 1) / (D z'), z' = z(b) + 1/2, D = 3^(b-1) 2 (b-1) 354"),
    BoundSpec(BoundId.REF_7_5, _OPEN_ANY, lambda b: 7 / 5, "7/5"),
    BoundSpec(BoundId.REF_8_7, _OPEN_ANY, lambda b: 8 / 7, "8/7"),
]
SPECS = {s.id: s for s in _SPECS}


def validity(bound: BoundId | str) -> Interval:
    return SPECS[BoundId(bound)].domain


def evaluate_bound(bound: BoundId | str, beta: float) -> float:
    spec = SPECS[BoundId(bound)]
    if beta not in spec.domain:
        raise BoundDomainError(f"{spec.id.value} is defined for beta in {spec.domain}, got {beta}")
    return float(spec.fn(beta))


def crossover(a: BoundId | str, b: BoundId | str, lo: float, hi: float, tol: float = 1e-6) -> float:
    """Root of ``evaluate(a) - evaluate(b)`` on ``[lo, hi]`` by bisection."""
    f = lambda x: evaluate_bound(a, x) - evaluate_bound(b, x)
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change of {BoundId(a).value} - {BoundId(b).value} on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RatioCurve:
    bound: BoundId
    samples: list[tuple[float, float]]

    def csv_rows(self) -> list[str]:
        return [f"{b:.6f},{v:.6f},{self.bound.value}" for b, v in self.samples]


CSV_HEADER = "beta,value,bound_id"


def curve_betas(lo: float, hi: float, step: float | None) -> list[float]:
    if hi < lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    if lo == hi or step is None:
        return [lo]
    if step <= 0:
        raise ValueError("step must be positive")
    count = math.floor((hi - lo) / step + 1e-9) + 1
    return [round(lo + i * step, 10) for i in range(count)]


def emit_curve(bound: BoundId | str, lo: float, hi: float, step: float | None) -> RatioCurve:
    bound = BoundId(bound)
    dom = validity(bound)
    if lo not in dom or hi not in dom:
        raise BoundDomainError(f"{bound.value} is defined for beta in {dom}, range [{lo}, {hi}] is not")
    return RatioCurve(bound, [(b, evaluate_bound(bound, b)) for b in curve_betas(lo, hi, step)])


def curves_csv(curves: list[RatioCurve]) -> str:
    lines = [CSV_HEADER]
    for c in curves:
        lines += c.csv_rows()
    return "\n".join(lines) + "\n"


# per-figure curve sets: (bound, lo, hi, step)
FIGURES: dict[str, list[tuple[BoundId, float, float, float | None]]] = {
    "graphic": [
        (BoundId.MST_GRAPHIC, 1.25, 2.48, 0.01),
        (BoundId.CHRISTOFIDES_GRAPHIC, 1.25, 2.48, 0.01),
        (BoundId.MUCHA_GRAPHIC, 1.25, 2.48, 0.01),
        (BoundId.MS_GRAPHIC_WITH_T, 2.4, 2.48, 0.01),
        (BoundId.REF_7_5, 1.25, 2.48, 0.01),
    ],
    "onetwo": [
        (BoundId.ONETWO_DET, 1.1, 9.0, 0.1),
        (BoundId.ONETWO_LARGE, 2.729, 9.0, 0.1),
        (BoundId.REF_8_7, 1.1, 9.0, 0.1),
    ],
    "random_gt2": [
        (BoundId.ONETWO_RANDOM_GT2, 2.1, 7.0, 0.1),
        (BoundId.ONETWO_DET, 2.1, 7.0, 0.1),
    ],
    "random_all": [
        (BoundId.ONETWO_RANDOM_1TO2, 1.5, 1.99, 0.01),
        (BoundId.ONETWO_RANDOM_EQ2, 2.0, 2.0, None),
        (BoundId.ONETWO_RANDOM_GT2, 2.01, 3.0, 0.01),
    ],
    "lower": [
        (BoundId.LB_SIMPLE, 1.1, 3.0, 0.01),
        (BoundId.LB_PACKING, 1.1, 3.0, 0.01),
    ],
}


def figure_csv(name: str) -> str:
    return curves_csv([emit_curve(*args) for args in FIGURES[name]])


def analytic_tour_lower_bound(params: PowerLawParams) -> float:
    """max{2, zeta(beta) + 1/2} * e^alpha."""
    if not params.beta > 1:
        raise BoundDomainError(f"tour lower bound needs beta > 1, got {params.beta}")
    return lower_ratio_base(params.beta) * params.scale


def catalog() -> list[dict]:
    return [{"id": s.id.value, "validity": str(s.domain), "formula": s.formula} for s in _SPECS]
