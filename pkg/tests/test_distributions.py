import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from coneperc import DistSpecError, RadiusDistribution, parse_dist

BERN = RadiusDistribution.bernoulli
GEO = RadiusDistribution.geometric
BINOM = RadiusDistribution.binomial
PMF = RadiusDistribution.explicit


class TestPmf:
    def test_bernoulli_mass_at_one(self):
        assert BERN(0.7).pmf(1) == 0.7
        assert BERN(0.7).pmf(0) == pytest.approx(0.3)

    def test_geometric(self):
        # (1-p) p^k
        assert GEO(0.5).pmf(2) == pytest.approx(0.125)

    def test_binomial_at_zero(self):
        # direct binomial formula: C(4,0) 0.25^0 0.75^4 = 81/256
        assert BINOM(4, 0.25).pmf(0) == pytest.approx(81 / 256, abs=1e-15)

    def test_outside_support(self):
        assert BERN(0.7).pmf(-1) == 0.0
        assert BERN(0.7).pmf(2) == 0.0
        assert BINOM(3, 0.5).pmf(4) == 0.0

    @pytest.mark.parametrize("dist,ks", [
        (BERN(0.35), range(3)),
        (GEO(0.45), range(60)),
        (BINOM(5, 0.3), range(7)),
        (PMF([0.2, 0.3, 0.5]), range(4)),
    ])
    def test_partial_sums_reach_one_monotonically(self, dist, ks):
        partial = 0.0
        previous = 0.0
        for k in ks:
            partial += dist.pmf(k)
            assert partial >= previous
            previous = partial
        bound = dist.support_bound
        if bound is None:
            assert partial == pytest.approx(1.0, abs=1e-10)
        else:
            assert partial == pytest.approx(1.0, abs=1e-12)


class TestCdf:
    def test_bernoulli(self):
        assert BERN(0.7).cdf(0) == pytest.approx(0.3)

    def test_geometric_partial_sum_oracle(self):
        expected = math.fsum(GEO(0.4).pmf(k) for k in range(2))
        assert expected == pytest.approx(0.84)
        assert GEO(0.4).cdf(1) == pytest.approx(0.84)

    def test_negative_argument_is_empty_event(self):
        for dist in (BERN(0.3), GEO(0.2), BINOM(4, 0.5), PMF([0.5, 0.5])):
            assert dist.cdf(-1) == 0.0

    @pytest.mark.parametrize("dist", [BERN(0.6), GEO(0.35), BINOM(6, 0.2),
                                      PMF([0.1, 0.4, 0.5])])
    def test_matches_cumulative_pmf(self, dist):
        acc = 0.0
        for k in range(40):
            acc += dist.pmf(k)
            assert dist.cdf(k) == pytest.approx(acc, abs=1e-12)
        assert dist.cdf(10**6) == pytest.approx(1.0, abs=1e-10)


class TestSampling:
    def test_degenerate_pmf_always_zero(self):
        rng = np.random.default_rng(0)
        dist = PMF([1.0])
        assert all(dist.sample(rng) == 0 for _ in range(200))

    def test_bernoulli_clt(self):
        rng = np.random.default_rng(1)
        draws = [BERN(0.7).sample(rng) for _ in range(100_000)]
        tol = 3 * math.sqrt(0.7 * 0.3 / 100_000)
        assert np.mean(draws) == pytest.approx(0.7, abs=tol)

    def test_geometric_clt_at_zero(self):
        rng = np.random.default_rng(2)
        draws = [GEO(0.5).sample(rng) for _ in range(100_000)]
        frac0 = np.mean(np.asarray(draws) == 0)
        tol = 3 * math.sqrt(0.5 * 0.5 / 100_000)
        assert frac0 == pytest.approx(0.5, abs=tol)

    @pytest.mark.parametrize("dist", [BERN(0.35), GEO(0.45), BINOM(5, 0.3),
                                      PMF([0.2, 0.3, 0.5])])
    def test_chi_squared_goodness_of_fit(self, dist):
        n = 100_000
        rng = np.random.default_rng(3)
        draws = np.asarray([dist.sample(rng) for _ in range(n)])
        # bin the geometric tail so every expected count is comfortable
        kmax = dist.support_bound if dist.support_bound is not None else 12
        observed = [np.sum(draws == k) for k in range(kmax)]
        observed.append(np.sum(draws >= kmax))
        expected = [n * dist.pmf(k) for k in range(kmax)]
        expected.append(n * (1.0 - dist.cdf(kmax - 1)))
        keep = [i for i, e in enumerate(expected) if e > 1e-9]
        result = stats.chisquare([observed[i] for i in keep],
                                 [expected[i] for i in keep])
        assert result.pvalue > 1e-3

    def test_reproducible_for_equal_stream_state(self):
        a = [GEO(0.3).sample(np.random.default_rng(7)) for _ in range(1)]
        b = [GEO(0.3).sample(np.random.default_rng(7)) for _ in range(1)]
        assert a == b


class TestExpectedDPower:
    def test_bernoulli_two_term_sum(self):
        # 1 - p + p d
        assert BERN(0.5).expected_d_power(2) == pytest.approx(1.5)
        assert BERN(0.7).expected_d_power(3) == pytest.approx(0.3 + 0.7 * 3)

    @pytest.mark.parametrize("p,d", [(0.2, 2), (0.3, 3), (0.15, 4), (0.45, 2)])
    def test_geometric_against_partial_sum_oracle(self, p, d):
        # term-by-term partial sums; the dropped tail is geometric with
        # ratio p*d < 1, so its size is bounded by term/(1 - p*d)
        terms = [(1 - p) * (p * d) ** k for k in range(10_000)]
        tail_bound = terms[-1] * p * d / (1 - p * d)
        oracle = math.fsum(terms)
        assert tail_bound < 1e-12
        assert GEO(p).expected_d_power(d) == pytest.approx(oracle, rel=1e-10)

    def test_geometric_divergence(self):
        assert GEO(0.5).expected_d_power(2) == math.inf
        assert GEO(0.6).expected_d_power(2) == math.inf
        assert GEO(0.25).expected_d_power(4) == math.inf

    @pytest.mark.parametrize("n,p,d", [(4, 0.5, 2), (4, 0.25, 4), (6, 0.1, 3)])
    def test_binomial_against_brute_sum(self, n, p, d):
        oracle = math.fsum(
            math.comb(n, k) * p**k * (1 - p) ** (n - k) * d**k
            for k in range(n + 1)
        )
        assert BINOM(n, p).expected_d_power(d) == pytest.approx(oracle, rel=1e-12)

    def test_explicit_brute_sum(self):
        dist = PMF([0.2, 0.3, 0.5])
        assert dist.expected_d_power(2) == pytest.approx(0.2 + 0.6 + 2.0)

    def test_rejects_bad_d(self):
        with pytest.raises(ValueError):
            BERN(0.5).expected_d_power(1)


class TestConstruction:
    def test_parameter_ranges(self):
        with pytest.raises(ValueError):
            BERN(1.2)
        with pytest.raises(ValueError):
            GEO(1.0)
        with pytest.raises(ValueError):
            BINOM(-1, 0.5)
        with pytest.raises(ValueError):
            PMF([0.5, -0.1])
        with pytest.raises(ValueError):
            PMF([])

    def test_boundary_p0_is_allowed_by_constructor(self):
        # engines reject these later; plumbing tests need them
        assert BERN(0.0).p0 == 1.0
        assert BERN(1.0).p0 == 0.0
        assert PMF([1.0]).p0 == 1.0

    def test_normalization_warning(self):
        with pytest.warns(UserWarning, match="renormaliz"):
            dist = PMF([0.2, 0.9])
        assert dist.pmf(0) == pytest.approx(0.2 / 1.1)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            PMF([0.5, 0.5])  # exact sum: no warning

    def test_trailing_zeros_trimmed(self):
        assert PMF([0.5, 0.5, 0.0]).support_bound == 1

    def test_immutable(self):
        dist = BERN(0.4)
        with pytest.raises(AttributeError):
            dist.p = 0.9

    def test_radius_at_most_one_flag(self):
        assert BERN(0.4).radius_at_most_one
        assert PMF([0.3, 0.7]).radius_at_most_one
        assert not BINOM(2, 0.5).radius_at_most_one
        assert not GEO(0.3).radius_at_most_one


class TestParse:
    def test_examples(self):
        assert parse_dist("bernoulli:p=0.7") == BERN(0.7)
        assert parse_dist("pmf:0.2,0.3,0.5") == PMF([0.2, 0.3, 0.5])
        assert parse_dist("binomial:n=4,p=0.25") == BINOM(4, 0.25)

    def test_out_of_range_parameter(self):
        with pytest.raises(ValueError, match="outside"):
            parse_dist("geometric:p=1.5")

    def test_syntax_errors_carry_positions(self):
        with pytest.raises(DistSpecError) as err:
            parse_dist("bernoulli")
        assert err.value.position == len("bernoulli")
        with pytest.raises(DistSpecError) as err:
            parse_dist("bernoulli:0.7")
        assert err.value.position == len("bernoulli:")
        with pytest.raises(DistSpecError) as err:
            parse_dist("wat:p=0.5")
        assert err.value.position == 0
        with pytest.raises(DistSpecError):
            parse_dist("bernoulli:q=0.5")
        with pytest.raises(DistSpecError):
            parse_dist("pmf:0.5,oops")
        with pytest.raises(DistSpecError):
            parse_dist("binomial:n=4")  # missing p

    @given(st.sampled_from(["bernoulli", "geometric", "binomial", "pmf"]),
           st.data())
    @settings(max_examples=60, deadline=None)
    def test_round_trip(self, family, data):
        if family == "bernoulli":
            dist = BERN(data.draw(st.floats(0.0, 1.0)))
        elif family == "geometric":
            dist = GEO(data.draw(st.floats(0.0, 0.99)))
        elif family == "binomial":
            dist = BINOM(data.draw(st.integers(0, 8)),
                         data.draw(st.floats(0.0, 1.0)))
        else:
            raw = data.draw(st.lists(st.floats(0.01, 1.0), min_size=1,
                                     max_size=6))
            total = sum(raw)
            dist = PMF([w / total for w in raw])
        assert parse_dist(dist.spec()) == dist
