"""Generating functions of the frontier-bounding branching processes.

The informed frontier of a cone percolation on a rooted d-ary view of the
tree is sandwiched between two integer branching processes driven by the
radius law R:

* ``lower`` flavor: offspring 0 with probability P[R=0], otherwise d**k
  with probability P[R=k];   pgf  phi(s) = E[s**(d**R)] + (1 - s) P[R=0].
* ``upper`` flavor: offspring d (d**k - 1)/(d - 1) with probability
  P[R=k];                    pgf  phi(s) = E[s**(d (d**R - 1)/(d - 1))].

Their extinction probabilities (the smallest fixed points of the pgfs on
[0, 1]) give the survival bounds in :mod:`coneperc.bounds`. Everything here
is a pure function of immutable inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import RadiusDistribution

__all__ = [
    "LOWER",
    "UPPER",
    "GeneratingFunction",
    "FixedPointResult",
    "FixedPointError",
    "smallest_fixed_point",
    "extinction_by_generation",
    "power_expectation",
    "d_power",
]

LOWER = "lower"
UPPER = "upper"

# Series over unbounded support stop once the unexplored PMF mass falls
# below this; each dropped term is at most its mass since the base is <= 1.
_TAIL_TOL = 1e-15

_FIXED_POINT_TOL = 1e-14
_RESIDUAL_TOL = 1e-12
_MAX_ITER = 10**6


class FixedPointError(RuntimeError):
    """Fixed-point iteration failed to converge within the iteration cap."""


def d_power(d: int, k: int) -> float:
    """d**k as a float, saturating to inf instead of raising on overflow."""
    if k * math.log(d) > 709.0:  # exp overflow threshold for float64
        return math.inf
    return float(d) ** k


def power_expectation(dist: RadiusDistribution, base: float, exponent) -> float:
    """E[base**exponent(R)] for base in [0, 1] and exponent(k) >= 0.

    ``exponent`` maps k to a float (may overflow to inf for large k; the
    corresponding term then underflows to 0 for base < 1). Uses the C
    ``pow`` conventions: 0**0 = 1 and base**inf = 0 for base < 1. The tail
    of an unbounded-support series is cut when the remaining mass is below
    1e-15, so the absolute truncation error is below that.
    """
    if not 0.0 <= base <= 1.0:
        raise ValueError(f"base {base} outside [0, 1]")
    if base == 1.0:
        return 1.0
    bound = dist.support_bound
    if bound is not None:
        return math.fsum(
            dist.pmf(k) * math.pow(base, exponent(k)) for k in range(bound + 1)
        )
    p = dist.p  # geometric tail: remaining mass after k terms is p**(k+1)
    acc = 0.0
    k = 0
    while p ** (k + 1) >= _TAIL_TOL:
        acc += dist.pmf(k) * math.pow(base, exponent(k))
        k += 1
    return acc + dist.pmf(k) * math.pow(base, exponent(k))


@dataclass(frozen=True)
class GeneratingFunction:
    """Offspring pgf of one of the two comparison processes.

    The radius law and branching number d fix the exponent map; ``flavor``
    selects it: ``lower`` uses d**k plus the additive (1-s) P[R=0] term,
    ``upper`` uses d (d**k - 1)/(d - 1).
    """

    dist: RadiusDistribution
    d: int
    flavor: str

    def __post_init__(self):
        if self.d < 2 or self.d != int(self.d):
            raise ValueError(f"branching number d={self.d} must be an integer >= 2")
        if self.flavor not in (LOWER, UPPER):
            raise ValueError(f"flavor must be {LOWER!r} or {UPPER!r}, got {self.flavor!r}")

    def exponent(self, k: int) -> float:
        """Offspring count contributed by a radius-k vertex."""
        dk = d_power(self.d, k)
        if self.flavor == LOWER:
            return dk
        return self.d * (dk - 1.0) / (self.d - 1.0)

    def mean(self) -> float:
        """Mean offspring; ``math.inf`` when E[d**R] diverges."""
        m = self.dist.expected_d_power(self.d)
        if self.flavor == LOWER:
            return m - self.dist.p0
        if math.isinf(m):
            return math.inf
        return self.d / (self.d - 1.0) * (m - 1.0)

    def __call__(self, s: float) -> float:
        """phi(s) for s in [0, 1]; phi(1) = 1 exactly."""
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"pgf argument {s} outside [0, 1]")
        if s == 1.0:
            return 1.0
        value = power_expectation(self.dist, s, self.exponent)
        if self.flavor == LOWER:
            value += (1.0 - s) * self.dist.p0
        return value

    def derivative(self, s: float) -> float:
        """phi'(s) on [0, 1); used for the Newton step from below."""
        if not 0.0 <= s < 1.0:
            raise ValueError(f"derivative argument {s} outside [0, 1)")

        def term(k: int) -> float:
            e = self.exponent(k)
            if e == 0.0 or math.isinf(e):  # inf * 0 would be nan; term decays to 0
                return 0.0
            if s == 0.0:
                return 1.0 if e == 1.0 else 0.0
            return e * math.pow(s, e - 1.0)

        bound = self.dist.support_bound
        if bound is not None:
            acc = math.fsum(self.dist.pmf(k) * term(k) for k in range(bound + 1))
        else:
            # e * s**(e-1) is maximized near e ~ -1/ln(s); beyond that the
            # terms decay, so the PMF-mass cut is safe once terms shrink too.
            acc = 0.0
            k = 0
            p = self.dist.p
            while p ** (k + 1) >= _TAIL_TOL:
                acc += self.dist.pmf(k) * term(k)
                k += 1
            acc += self.dist.pmf(k) * term(k)
        if self.flavor == LOWER:
            acc -= self.dist.p0
        return acc


def smallest_fixed_point(gf: GeneratingFunction) -> "FixedPointResult":
    """Smallest s in [0, 1] with phi(s) = s.

    Subcritical or critical mean (<= 1) certifies the root is exactly 1, so
    that case returns immediately; this also covers the near-critical regime
    where plain iteration crawls. Otherwise iterate s -> phi(s) from 0,
    which climbs monotonically to the smallest root, and accelerate with a
    Newton step from below: for a convex pgf the tangent at any point left
    of the root crosses the diagonal at or before the root, so taking the
    larger of the two candidates keeps a monotone under-approximation while
    converging quadratically near simple roots.
    """
    p0 = gf.dist.p0
    if not 0.0 < p0 < 1.0:
        raise ValueError(f"fixed-point solver needs 0 < P[R=0] < 1, got {p0}")
    mean = gf.mean()
    if mean <= 1.0:
        return FixedPointResult(root=1.0, iterations=0, residual=0.0,
                                is_supercritical=False)

    s = 0.0
    iterations = 0
    while iterations < _MAX_ITER:
        iterations += 1
        f = gf(s)
        candidate = f
        deriv = gf.derivative(s)
        if deriv < 1.0:
            newton = s + (f - s) / (1.0 - deriv)
            if math.isfinite(newton) and f < newton < 1.0:
                candidate = newton
        if abs(candidate - s) < _FIXED_POINT_TOL:
            s = candidate
            break
        s = candidate
    residual = abs(gf(s) - s)
    if residual > _RESIDUAL_TOL:
        raise FixedPointError(
            f"no fixed point to tolerance after {iterations} iterations "
            f"(residual {residual:.3e})"
        )
    return FixedPointResult(root=s, iterations=iterations, residual=residual,
                            is_supercritical=s < 1.0)


def extinction_by_generation(gf: GeneratingFunction, g: int) -> float:
    """g-th functional iterate of phi from 0.

    This is the probability the comparison process is extinct within g
    generations; it is non-decreasing in g and converges to the smallest
    fixed point.
    """
    if g < 0:
        raise ValueError(f"generation count {g} must be >= 0")
    s = 0.0
    for _ in range(g):
        s = gf(s)
    return s


@dataclass(frozen=True)
class FixedPointResult:
    """Smallest non-negative pgf fixed point with convergence diagnostics."""

    root: float
    iterations: int
    residual: float
    is_supercritical: bool
