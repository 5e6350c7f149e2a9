"""Depth-heterogeneous cone percolation on the pruned tree.

Here the radius law may depend on the vertex depth z. Chopping the tree
into blocks of n levels embeds a branching process in a varying
environment whose generation-j individuals are the informed vertices at
depth (j+1)n reachable from a depth-jn ancestor within n steps. A product
bound on the block-crossing probability (valid by the Harris/FKG positive
association of the crossing events) gives a computable lower bound c_j on
the mean offspring; if liminf_j c_j > 1 the process survives with positive
probability. Failure of the criterion proves nothing.

Environments are a finite per-depth prefix plus an eventually-constant or
eventually-periodic tail, which makes the liminf an exact finite minimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .distributions import RadiusDistribution, parse_dist

__all__ = [
    "HeteroEnvironment",
    "CertificationReport",
    "CertificationWindowError",
    "crossing_lower_bound",
    "mean_lower_bound",
    "certify_survival",
    "certify_survival_sweep",
    "load_environment",
    "parse_environment",
]


class CertificationWindowError(RuntimeError):
    """j_max is too small to cover one full period of the tail; raise it."""


@dataclass(frozen=True)
class HeteroEnvironment:
    """Depth-indexed family of radius laws: finite prefix + repeating tail.

    ``distribution_at(z)`` is ``prefix[z]`` for z < len(prefix) and cycles
    through ``period`` beyond. Every depth needs P[R_z = 0] < 1 (a depth
    that never spreads kills every crossing through it).
    """

    prefix: tuple[RadiusDistribution, ...]
    period: tuple[RadiusDistribution, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("environment needs a non-empty repeating tail")
        for z, dist in enumerate(self.prefix + self.period):
            if dist.p0 >= 1.0:
                raise ValueError(
                    f"environment level {z} has P[R=0] = 1 and can never spread"
                )

    @classmethod
    def homogeneous(cls, dist: RadiusDistribution) -> "HeteroEnvironment":
        return cls(prefix=(), period=(dist,))

    @classmethod
    def constant_tail(cls, levels) -> "HeteroEnvironment":
        """Levels as given, with the last one repeating forever."""
        levels = tuple(levels)
        if not levels:
            raise ValueError("environment needs at least one level")
        return cls(prefix=levels[:-1], period=(levels[-1],))

    @classmethod
    def periodic(cls, levels, period_len: int) -> "HeteroEnvironment":
        """Levels as given, with the last ``period_len`` of them repeating."""
        levels = tuple(levels)
        if not 1 <= period_len <= len(levels):
            raise ValueError(
                f"period length {period_len} outside 1..{len(levels)}"
            )
        return cls(prefix=levels[:-period_len], period=levels[-period_len:])

    @property
    def prefix_len(self) -> int:
        return len(self.prefix)

    @property
    def period_len(self) -> int:
        return len(self.period)

    def distribution_at(self, z: int) -> RadiusDistribution:
        if z < 0:
            raise ValueError(f"depth {z} must be >= 0")
        if z < len(self.prefix):
            return self.prefix[z]
        return self.period[(z - len(self.prefix)) % len(self.period)]


def crossing_lower_bound(env: HeteroEnvironment, d: int, n: int, j: int) -> float:
    """Product lower bound on the block-crossing probability.

    Crossing the j-th block means a fixed vertex at depth (j+1)n gets
    informed within n steps from its depth-jn ancestor; along the
    connecting path this requires, for every k < n, some path vertex at
    offset i <= k to have radius at least k+1-i. Positive association of
    those events bounds the probability from below by

        prod_{k<n} [ 1 - prod_{i<=k} P[R_{jn+i} < k+1-i] ].
    """
    if n < 1:
        raise ValueError(f"block length n={n} must be >= 1")
    if j < 0:
        raise ValueError(f"block index j={j} must be >= 0")
    if d < 2:
        raise ValueError(f"branching number d={d} must be an integer >= 2")
    result = 1.0
    for k in range(n):
        miss = 1.0
        for i in range(k + 1):
            miss *= env.distribution_at(j * n + i).cdf(k - i)
        result *= 1.0 - miss
    return result


def mean_lower_bound(env: HeteroEnvironment, d: int, n: int, j: int) -> float:
    """d**n times the crossing bound: a lower bound on the block process's
    mean offspring at generation j."""
    return float(d) ** n * crossing_lower_bound(env, d, n, j)


@dataclass(frozen=True)
class CertificationReport:
    """Outcome of the liminf supercriticality check for one block length.

    ``certified`` proves survival with positive probability; an uncertified
    report is not a proof of extinction (the criterion is one-sided).
    """

    n: int
    c_values: tuple[float, ...]
    liminf_estimate: float
    certified: bool
    j_max: int


def _tail_window(env: HeteroEnvironment, n: int) -> tuple[int, int]:
    """First block index fully inside the periodic tail, and the period of
    the c_j sequence from there on."""
    j_start = math.ceil(env.prefix_len / n)
    period_j = env.period_len // math.gcd(n, env.period_len)
    return j_start, period_j


def certify_survival(
    env: HeteroEnvironment, d: int, n: int, j_max: int = 64
) -> CertificationReport:
    """Evaluate c_j = d**n * crossing bound for j = 0..j_max and take the
    exact liminf over the eventually-periodic tail.

    Once a block starts inside the tail, c_j repeats with period
    period_len/gcd(n, period_len) in j, so the liminf is the minimum over
    one full cycle; no truncation heuristics are involved.
    """
    if n < 1:
        raise ValueError(f"block length n={n} must be >= 1")
    if j_max < 1:
        raise ValueError(f"j_max={j_max} must be >= 1")
    j_start, period_j = _tail_window(env, n)
    needed = j_start + period_j - 1
    if j_max < needed:
        raise CertificationWindowError(
            f"j_max={j_max} does not cover one full tail period; "
            f"needs at least {needed}"
        )
    c_values = tuple(mean_lower_bound(env, d, n, j) for j in range(j_max + 1))
    liminf = min(c_values[j_start:j_start + period_j])
    return CertificationReport(
        n=n,
        c_values=c_values,
        liminf_estimate=liminf,
        certified=liminf > 1.0,
        j_max=j_max,
    )


def certify_survival_sweep(
    env: HeteroEnvironment, d: int, n_max: int, j_max: int = 64
) -> CertificationReport | None:
    """Try block lengths n = 1..n_max, returning the first certifying
    report (the criterion only needs to hold for some n), or None.

    ``j_max`` is grown automatically when a block length needs a longer
    window than requested.
    """
    if n_max < 1:
        raise ValueError(f"n_max={n_max} must be >= 1")
    for n in range(1, n_max + 1):
        j_start, period_j = _tail_window(env, n)
        report = certify_survival(env, d, n, max(j_max, j_start + period_j - 1))
        if report.certified:
            return report
    return None


def parse_environment(text: str) -> HeteroEnvironment:
    """Parse the line-oriented environment format.

    One distribution spec per line (depth 0 first); blank lines and '#'
    comments are skipped. An optional final line ``tail: constant``
    (default) or ``tail: periodic=<k>`` makes the last, or last k,
    distributions repeat forever.
    """
    lines = []
    tail_rule: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().startswith("tail:"):
            if tail_rule is not None:
                raise ValueError(f"line {lineno}: duplicate tail rule")
            tail_rule = line.partition(":")[2].strip().lower()
            continue
        if tail_rule is not None:
            raise ValueError(f"line {lineno}: tail rule must be the last line")
        try:
            lines.append(parse_dist(line))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    if not lines:
        raise ValueError("environment file lists no distributions")
    if tail_rule is None or tail_rule == "constant":
        return HeteroEnvironment.constant_tail(lines)
    if tail_rule.startswith("periodic="):
        try:
            k = int(tail_rule.partition("=")[2])
        except ValueError:
            raise ValueError(f"bad period in tail rule {tail_rule!r}") from None
        return HeteroEnvironment.periodic(lines, k)
    raise ValueError(
        f"unknown tail rule {tail_rule!r} (expected 'constant' or 'periodic=<k>')"
    )


def load_environment(path) -> HeteroEnvironment:
    """Read an environment file; see :func:`parse_environment`."""
    return parse_environment(Path(path).read_text())
