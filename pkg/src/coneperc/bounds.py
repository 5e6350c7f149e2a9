"""Survival criteria and probability bounds for the homogeneous process.

Notation: the process runs on the homogeneous tree where every vertex has
d+1 neighbours ("td"); "tdplus" is the variant with one neighbouring
subtree of the origin removed, so the origin has d neighbours. V is the
event that infinitely many vertices are informed. The two mean criteria

* survives      if E[d**R] >  1 + P[R=0]
* dies out      if E[d**R] <= 2 - 1/d

are sharp enough for many laws; between them, the fixed points rho (lower
flavor) and psi (upper flavor) of :mod:`coneperc.gf` sandwich the survival
probability:

* on tdplus:  1 - rho <= P[V] <= 1 - psi
* on td:      1 - (1 - rho**((d+1)/d)) P[R=0] - E[rho**(((d+1)/d) d**R)]
                 <= P[V] <= 1 - E[psi**(((d+1)/(d-1)) (d**R - 1))]

Dying out makes rho = psi = 1 and every bound endpoint 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .distributions import RadiusDistribution
from .gf import (
    LOWER,
    UPPER,
    GeneratingFunction,
    d_power,
    power_expectation,
    smallest_fixed_point,
)

__all__ = [
    "SURVIVES",
    "DIES_OUT",
    "INCONCLUSIVE",
    "Verdict",
    "SurvivalBounds",
    "classify_plus",
    "survival_bounds_plus",
    "survival_bounds_full",
    "bernoulli_exact",
]

SURVIVES = "survives"
DIES_OUT = "dies_out"
INCONCLUSIVE = "inconclusive"

GRAPH_TD = "td"
GRAPH_TDPLUS = "tdplus"


@dataclass(frozen=True)
class Verdict:
    """Outcome of the mean criteria, with the inequality that fired.

    ``criterion`` identifies the rule: ``mean_above_survival_threshold``,
    ``mean_at_most_extinction_threshold`` (ties die out), or
    ``between_thresholds``. ``mean_d_power`` may be ``math.inf``.
    """

    kind: str
    criterion: str
    mean_d_power: float
    survive_threshold: float  # 1 + P[R=0]
    die_threshold: float      # 2 - 1/d


@dataclass(frozen=True)
class SurvivalBounds:
    """Interval [lower, upper] for the survival probability on one graph."""

    graph: str
    lower: float
    upper: float
    rho: float
    psi: float
    verdict: Verdict


def _check_engine_inputs(dist: RadiusDistribution, d: int) -> None:
    if d < 2 or d != int(d):
        raise ValueError(f"branching number d={d} must be an integer >= 2")
    if not 0.0 < dist.p0 < 1.0:
        raise ValueError(
            f"survival analysis needs 0 < P[R=0] < 1, got P[R=0]={dist.p0}"
        )


def classify_plus(dist: RadiusDistribution, d: int) -> Verdict:
    """Apply the two mean criteria.

    The verdict transfers verbatim to the full tree: survival probability is
    positive on one graph exactly when it is positive on the other.
    """
    _check_engine_inputs(dist, d)
    m = dist.expected_d_power(d)
    survive_at = 1.0 + dist.p0
    die_at = 2.0 - 1.0 / d
    if m > survive_at:
        kind, criterion = SURVIVES, "mean_above_survival_threshold"
    elif m <= die_at:
        kind, criterion = DIES_OUT, "mean_at_most_extinction_threshold"
    else:
        kind, criterion = INCONCLUSIVE, "between_thresholds"
    return Verdict(kind, criterion, m, survive_at, die_at)


def _fixed_points(dist: RadiusDistribution, d: int) -> tuple[float, float]:
    rho = smallest_fixed_point(GeneratingFunction(dist, d, LOWER)).root
    psi = smallest_fixed_point(GeneratingFunction(dist, d, UPPER)).root
    return rho, psi


def _clamp_unit(x: float) -> float:
    # valid inputs keep x inside [0,1] up to float round-off
    assert -1e-9 <= x <= 1.0 + 1e-9, f"bound endpoint {x} far outside [0, 1]"
    return min(1.0, max(0.0, x))


def _ordered(lower: float, upper: float) -> tuple[float, float]:
    # when the two comparison processes coincide (radii in {0,1}) the
    # endpoint formulas agree mathematically but can invert by one ulp
    assert lower <= upper + 1e-9, f"bound inversion beyond round-off: {lower} > {upper}"
    return min(lower, upper), upper


def survival_bounds_plus(dist: RadiusDistribution, d: int) -> SurvivalBounds:
    """Sandwich [1 - rho, 1 - psi] for the survival probability on tdplus."""
    _check_engine_inputs(dist, d)
    rho, psi = _fixed_points(dist, d)
    lower, upper = _ordered(_clamp_unit(1.0 - rho), _clamp_unit(1.0 - psi))
    return SurvivalBounds(
        graph=GRAPH_TDPLUS,
        lower=lower,
        upper=upper,
        rho=rho,
        psi=psi,
        verdict=classify_plus(dist, d),
    )


def survival_bounds_full(dist: RadiusDistribution, d: int) -> SurvivalBounds:
    """Survival probability sandwich on the full tree (origin has d+1 neighbours)."""
    _check_engine_inputs(dist, d)
    rho, psi = _fixed_points(dist, d)
    a = (d + 1.0) / d
    b = (d + 1.0) / (d - 1.0)
    lower = (
        1.0
        - (1.0 - math.pow(rho, a)) * dist.p0
        - power_expectation(dist, rho, lambda k: a * d_power(d, k))
    )
    upper = 1.0 - power_expectation(dist, psi, lambda k: b * (d_power(d, k) - 1.0))
    lower, upper = _ordered(_clamp_unit(lower), _clamp_unit(upper))
    return SurvivalBounds(
        graph=GRAPH_TD,
        lower=lower,
        upper=upper,
        rho=rho,
        psi=psi,
        verdict=classify_plus(dist, d),
    )


def bernoulli_exact(p: float, d: int) -> float:
    """Exact survival probability on the full tree for Bernoulli radii.

    For radii in {0, 1} the two comparison processes coincide with the
    frontier itself, so the sandwich closes: P[V] = p (1 - psi**(d+1)) with
    psi the smallest root of p x**d - x + 1 - p = 0, and P[V] = 0 for
    p <= 1/d. Computed by bracketed root finding, independently of the
    pgf iteration, so the two routes can cross-check each other.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"bernoulli parameter p={p} outside (0, 1)")
    if d < 2 or d != int(d):
        raise ValueError(f"branching number d={d} must be an integer >= 2")
    if p <= 1.0 / d:
        return 0.0
    poly = lambda s: p * s**d - s + 1.0 - p
    # the polynomial is positive at 0, has its minimum at s_min where
    # p d s**(d-1) = 1, and its two roots straddle s_min; bracketing with
    # s_min isolates the smallest root even near criticality, where values
    # close to s = 1 cancel to below float resolution
    s_min = (1.0 / (p * d)) ** (1.0 / (d - 1))
    if s_min >= 1.0 or poly(s_min) >= 0.0:
        return 0.0  # indistinguishable from critical at double precision
    psi = brentq(poly, 0.0, s_min, xtol=1e-16, rtol=8.9e-16)
    return p * (1.0 - psi ** (d + 1))
