"""Integer radius-of-influence laws.

Each spreading vertex informs everything within a random graph distance R,
so the whole model is parametrized by the law of R on {0, 1, 2, ...}.
Supported families:

* ``bernoulli(p)``   -- P[R=1] = p = 1 - P[R=0]
* ``geometric(p)``   -- P[R=k] = (1-p) p**k, k = 0, 1, 2, ...
* ``binomial(n, p)`` -- P[R=k] = C(n,k) p**k (1-p)**(n-k)
* ``explicit(w)``    -- finite PMF given by a weight list (normalized)

Instances are immutable and safe to share across workers. Sampling draws
exactly one uniform from the supplied generator per variate (inverse CDF),
which the compiled simulation kernels reproduce call for call.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = ["RadiusDistribution", "DistSpecError", "parse_dist"]

# Raw explicit weights further than this from 1 trigger a normalization warning.
_NORMALIZE_WARN_TOL = 1e-9

_FAMILIES = ("bernoulli", "geometric", "binomial", "pmf")


class DistSpecError(ValueError):
    """Malformed distribution spec string.

    ``position`` is the 0-based index into the spec where parsing failed.
    """

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class RadiusDistribution:
    """Immutable law of the radius of influence R.

    Use the classmethod constructors; the raw constructor is an internal
    detail. ``weights`` is only populated for the ``pmf`` family (already
    normalized, trailing zeros stripped).
    """

    family: str
    p: float = 0.0
    n: int = 0
    weights: tuple[float, ...] = ()
    # cumulative PMF over the finite support; None for geometric
    _cdf: np.ndarray | None = field(default=None, repr=False, compare=False)

    # -- constructors -------------------------------------------------

    @classmethod
    def bernoulli(cls, p: float) -> "RadiusDistribution":
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"bernoulli parameter p={p} outside [0, 1]")
        return cls("bernoulli", p=p)

    @classmethod
    def geometric(cls, p: float) -> "RadiusDistribution":
        p = float(p)
        if not 0.0 <= p < 1.0:
            raise ValueError(f"geometric parameter p={p} outside [0, 1)")
        return cls("geometric", p=p)

    @classmethod
    def binomial(cls, n: int, p: float) -> "RadiusDistribution":
        if n != int(n) or n < 0:
            raise ValueError(f"binomial count n={n} must be a non-negative integer")
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"binomial parameter p={p} outside [0, 1]")
        return cls("binomial", p=p, n=int(n))

    @classmethod
    def explicit(cls, weights) -> "RadiusDistribution":
        w = [float(x) for x in weights]
        if not w:
            raise ValueError("explicit PMF needs at least one weight")
        if any(x < 0 or not math.isfinite(x) for x in w):
            raise ValueError(f"explicit PMF weights must be finite and >= 0, got {w}")
        total = math.fsum(w)
        if total <= 0.0:
            raise ValueError("explicit PMF weights sum to zero")
        if abs(total - 1.0) > _NORMALIZE_WARN_TOL:
            warnings.warn(
                f"explicit PMF weights sum to {total!r}; renormalizing",
                stacklevel=2,
            )
        if abs(total - 1.0) > 1e-12:
            # normalization is idempotent: one division lands within a few
            # ulps of 1, so re-parsing the canonical form is exact
            w = [x / total for x in w]
        while len(w) > 1 and w[-1] == 0.0:  # keep the support bound honest
            w.pop()
        return cls("pmf", weights=tuple(w))

    def __post_init__(self):
        table = self._pmf_table()
        if table is not None:
            object.__setattr__(self, "_cdf", np.cumsum(np.asarray(table, dtype=np.float64)))

    def _pmf_table(self) -> list[float] | None:
        if self.family == "bernoulli":
            return [1.0 - self.p, self.p]
        if self.family == "binomial":
            q = 1.0 - self.p
            return [math.comb(self.n, k) * self.p**k * q ** (self.n - k)
                    for k in range(self.n + 1)]
        if self.family == "pmf":
            return list(self.weights)
        return None  # geometric: unbounded support

    # -- basic queries -------------------------------------------------

    @property
    def p0(self) -> float:
        """P[R = 0]."""
        return self.pmf(0)

    @property
    def support_bound(self) -> int | None:
        """Largest k with P[R = k] > 0, or None for unbounded support."""
        if self.family == "geometric":
            return 0 if self.p == 0.0 else None
        return len(self._cdf) - 1

    @property
    def radius_at_most_one(self) -> bool:
        """True when R never exceeds 1 (enables the level-count fast path)."""
        b = self.support_bound
        return b is not None and b <= 1

    def pmf(self, k: int) -> float:
        """P[R = k]; zero outside the support."""
        if k < 0:
            return 0.0
        if self.family == "geometric":
            if self.p == 0.0:
                return 1.0 if k == 0 else 0.0
            return (1.0 - self.p) * self.p**k
        table = self._cdf
        if k >= len(table):
            return 0.0
        return float(table[k] - (table[k - 1] if k > 0 else 0.0))

    def cdf(self, k: int) -> float:
        """P[R <= k]; 0 for k < 0, non-decreasing, tends to 1."""
        if k < 0:
            return 0.0
        if self.family == "geometric":
            if self.p == 0.0:
                return 1.0
            return 1.0 - self.p ** (k + 1)
        table = self._cdf
        if k >= len(table) - 1:
            return 1.0
        return float(table[k])

    def sample(self, rng: np.random.Generator) -> int:
        """Draw one radius by inverting the CDF on a single uniform.

        Consumes exactly one ``rng.random()`` call; the compiled kernels
        rely on that contract to stay stream-compatible.
        """
        u = rng.random()
        if self.family == "geometric":
            if self.p == 0.0:
                return 0
            return int(math.floor(math.log1p(-u) / math.log(self.p)))
        k = int(np.searchsorted(self._cdf, u, side="right"))
        last = len(self._cdf) - 1
        return k if k < last else last

    def expected_d_power(self, d: int) -> float:
        """E[d**R], or ``math.inf`` when the series diverges.

        Divergence happens exactly for geometric radii with p*d >= 1.
        """
        if d < 2 or d != int(d):
            raise ValueError(f"branching number d={d} must be an integer >= 2")
        d = int(d)
        if self.family == "geometric":
            if self.p * d >= 1.0:
                return math.inf
            return (1.0 - self.p) / (1.0 - self.p * d)
        if self.family == "bernoulli":
            return 1.0 - self.p + self.p * d
        if self.family == "binomial":
            return (self.p * d + 1.0 - self.p) ** self.n
        # explicit PMF; d**k saturates to inf beyond float range
        return math.fsum(
            self.pmf(k) * (math.inf if k * math.log(d) > 709.0 else float(d) ** k)
            for k in range(len(self._cdf))
        )

    # -- spec-string round-trip ---------------------------------------

    def spec(self) -> str:
        """Canonical spec string; ``parse_dist`` round-trips it."""
        if self.family == "bernoulli":
            return f"bernoulli:p={self.p!r}"
        if self.family == "geometric":
            return f"geometric:p={self.p!r}"
        if self.family == "binomial":
            return f"binomial:n={self.n},p={self.p!r}"
        return "pmf:" + ",".join(repr(w) for w in self.weights)

    def __str__(self) -> str:
        return self.spec()


def _parse_float(text: str, position: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise DistSpecError(f"expected a number, got {text.strip()!r}", position) from None


def _parse_kv(rest: str, offset: int, keys: tuple[str, ...]) -> dict[str, float]:
    """Parse ``key=value`` pairs with absolute error positions."""
    found: dict[str, float] = {}
    cursor = offset
    for chunk in rest.split(","):
        if "=" not in chunk:
            raise DistSpecError("expected 'key=value'", cursor)
        key, _, value = chunk.partition("=")
        key = key.strip()
        if key not in keys:
            raise DistSpecError(f"unknown parameter {key!r} (expected {'/'.join(keys)})", cursor)
        if key in found:
            raise DistSpecError(f"duplicate parameter {key!r}", cursor)
        found[key] = _parse_float(value, cursor + len(key) + 1)
        cursor += len(chunk) + 1
    missing = [k for k in keys if k not in found]
    if missing:
        raise DistSpecError(f"missing parameter {missing[0]!r}", len(rest) + offset)
    return found


def parse_dist(spec: str) -> RadiusDistribution:
    """Parse ``family:key=value,...`` (or ``pmf:w0,w1,...``) into a law.

    Grammar: ``bernoulli:p=<x>``, ``geometric:p=<x>``,
    ``binomial:n=<int>,p=<x>``, ``pmf:<w>,<w>,...``. Raises
    :class:`DistSpecError` with a position for syntax problems and
    ``ValueError`` for out-of-range parameters.
    """
    s = spec.strip()
    if not s:
        raise DistSpecError("empty distribution spec", 0)
    if ":" not in s:
        raise DistSpecError("expected ':' after the family name", len(s))
    family, _, rest = s.partition(":")
    family = family.strip().lower()
    offset = len(family) + 1
    if family not in _FAMILIES:
        raise DistSpecError(
            f"unknown family {family!r} (expected one of {', '.join(_FAMILIES)})", 0
        )
    if not rest.strip():
        raise DistSpecError("missing parameters after ':'", offset)

    if family == "pmf":
        weights = []
        cursor = offset
        for chunk in rest.split(","):
            weights.append(_parse_float(chunk, cursor))
            cursor += len(chunk) + 1
        return RadiusDistribution.explicit(weights)
    if family == "bernoulli":
        kv = _parse_kv(rest, offset, ("p",))
        return RadiusDistribution.bernoulli(kv["p"])
    if family == "geometric":
        kv = _parse_kv(rest, offset, ("p",))
        return RadiusDistribution.geometric(kv["p"])
    kv = _parse_kv(rest, offset, ("n", "p"))
    n = kv["n"]
    if n != int(n):
        raise DistSpecError(f"binomial n={n} must be an integer", offset)
    return RadiusDistribution.binomial(int(n), kv["p"])
