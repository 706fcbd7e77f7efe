"""Closed-form analytics of the interference term.

For a model, the interference term of c_j is

    gamma_j = p_j^c - P(cbar = c_j | a_1) p_1^a - P(chat = c_j | a_2) p_2^a

and its normalized form is lambda_j = gamma_j / (2 sqrt(prod_j)) with
prod_j = P(cbar = c_j | a_1) p_1^a P(chat = c_j | a_2) p_2^a. When
|lambda_j| <= 1 the term can be written as a cosine, theta_j = arccos(lambda_j)
("trigonometric" regime); otherwise the regime is labelled "hyperbolic".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, NamedTuple

from .errors import RangeError, ZeroDenominator
from .prob_core import TOL, ModelSpec, marginal_c

TRIGONOMETRIC = "trigonometric"
HYPERBOLIC = "hyperbolic"
UNDEFINED = "undefined"


def _prob(p: float, name: str) -> float:
    p = float(p)
    if math.isnan(p) or p < -TOL or p > 1.0 + TOL:
        raise RangeError(f"{name} = {p!r} is outside [0, 1]", field=name)
    return min(max(p, 0.0), 1.0)


def gamma_analytic(model: ModelSpec) -> tuple[float, float]:
    """(gamma_1, gamma_2) of the nonclassical total probability formula."""
    p_a1 = model.a_law.p_1
    p_a2 = 1.0 - p_a1
    p_c = marginal_c(model)
    return tuple(
        p_c[j - 1] - model.cbar_given_a1.p(j) * p_a1 - model.chat_given_a2.p(j) * p_a2 for j in (1, 2)
    )


@dataclass(frozen=True)
class InterferenceReport:
    gamma: tuple[float, float]
    lam: tuple[float | None, float | None]
    theta: tuple[float | None, float | None]
    regime: tuple[str, str]
    denominators: tuple[float, float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "gamma": list(self.gamma),
            "lambda": list(self.lam),
            "theta": list(self.theta),
            "regime": list(self.regime),
            "denominators": list(self.denominators),
        }


def _regime(gamma: float, prod: float) -> tuple[float | None, float | None, str]:
    if prod <= 0.0:
        return None, None, UNDEFINED
    lam = gamma / (2.0 * math.sqrt(prod))
    if abs(lam) <= 1.0 + TOL:
        return lam, math.acos(min(1.0, max(-1.0, lam))), TRIGONOMETRIC
    return lam, None, HYPERBOLIC


def lambda_theta(model: ModelSpec) -> InterferenceReport:
    """lambda_j, theta_j and the regime per j. Undefined values are None."""
    p_a1 = model.a_law.p_1
    p_a2 = 1.0 - p_a1
    gamma = gamma_analytic(model)
    prods = tuple(model.cbar_given_a1.p(j) * p_a1 * model.chat_given_a2.p(j) * p_a2 for j in (1, 2))
    parts = [_regime(g, d) for g, d in zip(gamma, prods)]
    return InterferenceReport(
        gamma=gamma,
        lam=(parts[0][0], parts[1][0]),
        theta=(parts[0][1], parts[1][1]),
        regime=(parts[0][2], parts[1][2]),
        denominators=prods,
    )


# ---------------------------------------------------------------------------
# the independent case: cbar and chat independent of a


def gamma_independent(p_a1: float, p_c: float, p_bar: float, p_hat: float) -> float:
    """gamma_j when cbar and chat are independent of a (laws p_bar, p_hat)."""
    return p_c - p_bar * p_a1 - p_hat * (1.0 - p_a1)


def independent_model(p_a1: float, p_c1: float, p_bar1: float, p_hat1: float) -> ModelSpec:
    """Model in which c, cbar and chat are all independent of a."""
    return ModelSpec.from_probabilities(p_a1, p_c1, p_c1, p_bar1, p_hat1, cbar_given_a2=p_bar1, chat_given_a1=p_hat1)


def classical_interval(p_a1: float, p_c: float) -> tuple[float, float]:
    """Admissible p_j^cbar for which a matching p_j^chat gives gamma_j = 0."""
    p_a1 = _prob(p_a1, "p_a1")
    p_c = _prob(p_c, "p_c")
    if not 0.0 < p_a1 < 1.0:
        raise RangeError("p_a1 must lie strictly inside (0, 1)", field="p_a1")
    p_a2 = 1.0 - p_a1
    lo = min(1.0, max(0.0, (p_c - p_a2) / p_a1))
    hi = min(1.0, p_c / p_a1)
    return lo, max(lo, hi)


def classical_design(p_a1: float, p_c: float, t: float) -> tuple[float, float]:
    """(p_j^cbar, p_j^chat) making gamma_j vanish; ``t`` in [0, 1] picks p_j^cbar
    linearly inside :func:`classical_interval`."""
    t = _prob(t, "t")
    lo, hi = classical_interval(p_a1, p_c)
    p_a1 = float(p_a1)
    p_bar = min(max(lo + t * (hi - lo), lo), hi)
    p_hat = (float(p_c) - p_a1 * p_bar) / (1.0 - p_a1)
    return p_bar, min(max(p_hat, 0.0), 1.0)


@dataclass(frozen=True)
class RegimeCheck:
    gamma: float
    lam: float
    t1: float
    t2: float
    sqrt_pc: float
    lam_le_1: bool
    sum_ge_sqrt_pc: bool
    lam_ge_minus_1: bool
    absdiff_le_sqrt_pc: bool

    @property
    def upper_holds(self) -> bool:
        """lambda <= 1 iff t1 + t2 >= sqrt(p_c)."""
        return self.lam_le_1 == self.sum_ge_sqrt_pc

    @property
    def lower_holds(self) -> bool:
        """lambda >= -1 iff |t1 - t2| <= sqrt(p_c)."""
        return self.lam_ge_minus_1 == self.absdiff_le_sqrt_pc

    @property
    def passed(self) -> bool:
        return self.upper_holds and self.lower_holds


def regime_equivalences(p_a1: float, p_c: float, p_bar: float, p_hat: float) -> RegimeCheck:
    """Evaluate both sides of the two regime equivalences in the independent case.

    ``t1 = sqrt(p_bar p_a1)``, ``t2 = sqrt(p_hat p_a2)``. Comparisons against
    the boundary use the package tolerance on both sides, so ties are
    resolved consistently.
    """
    p_a1 = _prob(p_a1, "p_a1")
    p_c, p_bar, p_hat = _prob(p_c, "p_c"), _prob(p_bar, "p_bar"), _prob(p_hat, "p_hat")
    t1 = math.sqrt(p_bar * p_a1)
    t2 = math.sqrt(p_hat * (1.0 - p_a1))
    if t1 * t2 == 0.0:
        raise ZeroDenominator("t1 * t2 = 0: lambda is undefined")
    gamma = gamma_independent(p_a1, p_c, p_bar, p_hat)
    lam = gamma / (2.0 * t1 * t2)
    root = math.sqrt(p_c)
    return RegimeCheck(
        gamma=gamma,
        lam=lam,
        t1=t1,
        t2=t2,
        sqrt_pc=root,
        lam_le_1=lam <= 1.0 + TOL,
        sum_ge_sqrt_pc=t1 + t2 >= root - TOL,
        lam_ge_minus_1=lam >= -1.0 - TOL,
        absdiff_le_sqrt_pc=abs(t1 - t2) <= root + TOL,
    )


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    raw_hi: float
    unbounded_above: bool = False

    @property
    def capped(self) -> bool:
        return self.raw_hi > self.hi

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def to_dict(self) -> dict[str, Any]:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "raw_hi": None if math.isinf(self.raw_hi) else self.raw_hi,
            "unbounded_above": self.unbounded_above,
            "capped": self.capped,
        }


def perturbation_interval(p_a1: float, p_c: float) -> Interval:
    """Range of a common law p_j^cbar = p_j^chat keeping |lambda_j| <= 1.

    The upper endpoint p_c / (1 - 2 sqrt(p_a1 p_a2)) is capped at 1; at
    p_a1 = 1/2 it is infinite and reported as unbounded above.
    """
    p_a1 = _prob(p_a1, "p_a1")
    p_c = _prob(p_c, "p_c")
    if not 0.0 < p_a1 < 1.0:
        raise RangeError("p_a1 must lie strictly inside (0, 1)", field="p_a1")
    two_s = 2.0 * math.sqrt(p_a1 * (1.0 - p_a1))
    lo = p_c / (1.0 + two_s)
    den = 1.0 - two_s
    if den <= TOL:
        return Interval(lo, 1.0, math.inf, unbounded_above=True)
    raw = p_c / den
    return Interval(lo, min(1.0, raw), raw)


# ---------------------------------------------------------------------------
# the two-slit form


class FormulaValue(NamedTuple):
    value: float
    valid: bool


def _flag(value: float) -> FormulaValue:
    return FormulaValue(value, -TOL <= value <= 1.0 + TOL)


def two_slit_prob(p_A1: float, p_A2: float, theta: float) -> FormulaValue:
    """P(A1) + P(A2) + 2 sqrt(P(A1) P(A2)) cos(theta), flagged valid iff in [0, 1]."""
    p_A1, p_A2 = _prob(p_A1, "p_A1"), _prob(p_A2, "p_A2")
    if p_A1 <= 0.0 or p_A2 <= 0.0:
        raise RangeError("slit probabilities must be positive")
    return _flag(p_A1 + p_A2 + 2.0 * math.sqrt(p_A1 * p_A2) * math.cos(theta))


def tpf_eval(p_C_given_A1: float, p_C_given_A2: float, p_A1: float, p_A2: float, theta: float) -> FormulaValue:
    """Total probability with the cosine interference term, flagged like two_slit_prob."""
    a = _prob(p_C_given_A1, "p_C_given_A1")
    b = _prob(p_C_given_A2, "p_C_given_A2")
    p_A1, p_A2 = _prob(p_A1, "p_A1"), _prob(p_A2, "p_A2")
    if p_A1 <= 0.0 or p_A2 <= 0.0:
        raise RangeError("P(A_i) must be positive")
    if abs(p_A1 + p_A2 - 1.0) > TOL:
        raise RangeError(f"P(A_1) + P(A_2) = {p_A1 + p_A2!r} != 1")
    x = a * p_A1
    y = b * p_A2
    return _flag(x + y + 2.0 * math.sqrt(x * y) * math.cos(theta))
