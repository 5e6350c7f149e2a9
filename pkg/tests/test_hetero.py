import math

import numpy as np
import pytest

from coneperc import (
    REACHED_DEPTH,
    CertificationWindowError,
    HeteroEnvironment,
    RadiusDistribution,
    StopPolicy,
    certify_survival,
    certify_survival_sweep,
    classify_plus,
    crossing_lower_bound,
    estimate_survival,
    load_environment,
    mean_lower_bound,
    parse_environment,
)
from conftest import three_sigma

BERN = RadiusDistribution.bernoulli
GEO = RadiusDistribution.geometric
PMF = RadiusDistribution.explicit

HOM_HALF = HeteroEnvironment.homogeneous(BERN(0.5))


def random_periodic_env(rng):
    def level():
        kind = rng.choice(["bernoulli", "geometric", "pmf"])
        if kind == "bernoulli":
            return BERN(rng.uniform(0.2, 0.95))
        if kind == "geometric":
            return GEO(rng.uniform(0.1, 0.5))
        w = rng.uniform(0.05, 1.0, size=int(rng.integers(2, 5)))
        w[0] = min(w[0], 0.85 * w.sum())  # keep P[R=0] < 1
        return PMF(w / w.sum())

    prefix = [level() for _ in range(int(rng.integers(0, 3)))]
    period = [level() for _ in range(int(rng.integers(1, 4)))]
    return HeteroEnvironment(tuple(prefix), tuple(period))


class TestEnvironment:
    def test_indexing_constant_tail(self):
        env = HeteroEnvironment.constant_tail([BERN(0.1), BERN(0.2), BERN(0.3)])
        assert env.distribution_at(0) == BERN(0.1)
        assert env.distribution_at(1) == BERN(0.2)
        for z in (2, 3, 17):
            assert env.distribution_at(z) == BERN(0.3)

    def test_indexing_periodic(self):
        env = HeteroEnvironment.periodic([BERN(0.1), BERN(0.8), BERN(0.2)], 2)
        assert env.distribution_at(0) == BERN(0.1)
        assert [env.distribution_at(z).p for z in range(1, 7)] == \
            [0.8, 0.2, 0.8, 0.2, 0.8, 0.2]

    def test_rejects_never_spreading_level(self):
        with pytest.raises(ValueError, match="never spread"):
            HeteroEnvironment.constant_tail([BERN(0.5), PMF([1.0])])

    def test_allows_p0_zero(self):
        HeteroEnvironment.homogeneous(BERN(1.0))  # always spreads: fine here

    def test_negative_depth(self):
        with pytest.raises(ValueError):
            HOM_HALF.distribution_at(-1)

    def test_validation(self):
        with pytest.raises(ValueError):
            HeteroEnvironment((), ())
        with pytest.raises(ValueError):
            HeteroEnvironment.periodic([BERN(0.5)], 2)


class TestCrossingLowerBound:
    def test_single_level_is_spread_probability(self):
        for dist in (BERN(0.7), GEO(0.4), PMF([0.3, 0.3, 0.4])):
            env = HeteroEnvironment.homogeneous(dist)
            expected = 1.0 - dist.cdf(0)
            assert crossing_lower_bound(env, 2, 1, 0) == pytest.approx(expected)

    def test_two_level_bernoulli_expansion(self):
        # factors: k=0: 1 - P[R<1] = p; k=1: 1 - P[R<2] P[R<1] = 1 - 1*(1-p)
        # (Bernoulli radii never exceed 1, so P[R<2] = 1); product = p^2
        p = 0.5
        value = crossing_lower_bound(HOM_HALF, 2, 2, 0)
        assert value == pytest.approx(p * p)
        # Monte Carlo oracle for the exact fixed-path event:
        # cross two levels in two steps iff R0 >= 1 and (R0 >= 2 or R1 >= 1)
        rng = np.random.default_rng(3)
        draws = rng.random((100_000, 2)) < p
        freq = np.mean(draws[:, 0] & draws[:, 1])
        assert value <= freq + three_sigma(p * p, 100_000)
        assert value == pytest.approx(freq, abs=three_sigma(p * p, 100_000))

    def test_rare_spread_level(self):
        eps = 1e-3
        env = HeteroEnvironment.homogeneous(PMF([1 - eps, eps]))
        assert crossing_lower_bound(env, 2, 1, 5) == pytest.approx(eps)

    def test_block_index_shifts_depths(self):
        env = HeteroEnvironment.constant_tail([BERN(0.9), BERN(0.2)])
        # j=0 uses depth 0 (p=0.9), j>=1 uses the constant tail (p=0.2)
        assert crossing_lower_bound(env, 2, 1, 0) == pytest.approx(0.9)
        assert crossing_lower_bound(env, 2, 1, 1) == pytest.approx(0.2)
        assert crossing_lower_bound(env, 2, 1, 9) == pytest.approx(0.2)

    def test_multi_step_slack_uses_longer_radii(self):
        # a level that never spreads one step but always jumps two:
        # crossing a 2-block starting with it succeeds via the jump
        jumper = PMF([0.0, 0.0, 1.0])
        env = HeteroEnvironment.constant_tail([jumper, BERN(0.5)])
        value = crossing_lower_bound(env, 2, 2, 0)
        # k=0: 1 - P[R0 < 1] = 1; k=1: 1 - P[R0 < 2] P[R1 < 1] = 1 - 0 = 1
        assert value == pytest.approx(1.0)

    def test_in_unit_interval(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            env = random_periodic_env(rng)
            value = crossing_lower_bound(env, int(rng.integers(2, 5)),
                                         int(rng.integers(1, 5)),
                                         int(rng.integers(0, 4)))
            assert 0.0 <= value <= 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            crossing_lower_bound(HOM_HALF, 2, 0, 0)
        with pytest.raises(ValueError):
            crossing_lower_bound(HOM_HALF, 2, 1, -1)


class TestMeanLowerBound:
    def test_homogeneous_bernoulli_is_dp(self):
        for d in (2, 3, 4):
            for p in (0.2, 0.5, 0.9):
                env = HeteroEnvironment.homogeneous(BERN(p))
                assert mean_lower_bound(env, d, 1, 0) == pytest.approx(d * p)

    def test_two_block_value(self):
        # d^2 times the two-level product p^2 (see crossing test): 4 * 0.25
        assert mean_lower_bound(HOM_HALF, 2, 2, 0) == pytest.approx(1.0)

    def test_vanishing_environment(self):
        env = HeteroEnvironment.homogeneous(PMF([1 - 1e-9, 1e-9]))
        assert mean_lower_bound(env, 2, 3, 0) == pytest.approx(0.0, abs=1e-8)


class TestCertify:
    def test_constant_bernoulli_iff_dp_above_one(self):
        for d in (2, 3):
            for p in np.linspace(0.05, 0.95, 19):
                env = HeteroEnvironment.homogeneous(BERN(p))
                report = certify_survival(env, d, 1, j_max=8)
                assert report.certified == (d * p > 1.0), (d, p)

    def test_boundary_is_not_certified(self):
        report = certify_survival(HeteroEnvironment.homogeneous(BERN(0.5)),
                                  2, 1, j_max=8)
        assert report.liminf_estimate == pytest.approx(1.0)
        assert not report.certified

    def test_alternating_levels(self):
        env = HeteroEnvironment.periodic([BERN(0.9), BERN(0.2)], 2)
        report = certify_survival(env, 2, 1, j_max=9)
        assert report.c_values[:4] == pytest.approx((1.8, 0.4, 1.8, 0.4))
        assert report.liminf_estimate == pytest.approx(0.4)
        assert not report.certified
        assert len(report.c_values) == 10

    def test_liminf_ignores_prefix(self):
        env = HeteroEnvironment.constant_tail([BERN(0.05), BERN(0.9)])
        report = certify_survival(env, 2, 1, j_max=8)
        assert report.c_values[0] == pytest.approx(0.1)
        assert report.liminf_estimate == pytest.approx(1.8)
        assert report.certified

    def test_window_error(self):
        env = HeteroEnvironment(
            (BERN(0.5),) * 7, (BERN(0.6), BERN(0.7), BERN(0.8)))
        with pytest.raises(CertificationWindowError):
            certify_survival(env, 2, 1, j_max=7)
        certify_survival(env, 2, 1, j_max=9)  # j_start 7 + period 3 - 1

    def test_sweep_finds_block_length_two(self):
        # per level: A spreads two steps with mass 0.9, B spreads one step
        # with mass 0.4; single levels certify nothing (2*0.4 = 0.8), but
        # 2-blocks give 4 * 0.9 * (1 - 0.1*0.6) = 3.384 > 1
        a = PMF([0.1, 0.0, 0.9])
        b = PMF([0.6, 0.4])
        env = HeteroEnvironment.periodic([a, b], 2)
        assert not certify_survival(env, 2, 1, j_max=8).certified
        report2 = certify_survival(env, 2, 2, j_max=8)
        assert report2.liminf_estimate == pytest.approx(4 * 0.9 * 0.94)
        assert report2.certified
        best = certify_survival_sweep(env, 2, 4, j_max=8)
        assert best is not None and best.n == 2

    def test_sweep_none_when_hopeless(self):
        env = HeteroEnvironment.homogeneous(BERN(0.1))
        assert certify_survival_sweep(env, 2, 4, j_max=8) is None

    def test_representation_independence(self):
        base = HeteroEnvironment.periodic([BERN(0.3), BERN(0.8), BERN(0.6)], 2)
        # extend the prefix with one tail period: same depth map
        extended = HeteroEnvironment.periodic(
            [BERN(0.3), BERN(0.8), BERN(0.6), BERN(0.8), BERN(0.6)], 2)
        for n in (1, 2, 3):
            for j in range(8):
                assert mean_lower_bound(base, 2, n, j) == pytest.approx(
                    mean_lower_bound(extended, 2, n, j))

    def test_certified_environment_is_not_classified_dead(self):
        # one-sided consistency with the homogeneous mean criteria
        rng = np.random.default_rng(10)
        for _ in range(40):
            dist = BERN(rng.uniform(0.1, 0.95))
            d = int(rng.integers(2, 5))
            if dist.p0 in (0.0, 1.0):
                continue
            env = HeteroEnvironment.homogeneous(dist)
            best = certify_survival_sweep(env, d, 3, j_max=8)
            if best is not None:
                assert classify_plus(dist, d).kind != "dies_out"


class TestAgainstSimulation:
    def test_single_level_bound_is_exact(self):
        # crossing one level from depth j requires exactly R_j >= 1
        env = HeteroEnvironment.constant_tail([BERN(0.9), GEO(0.4)])
        policy = StopPolicy(depth_target=1, generation_cap=8, node_cap=10**5)
        for j, expected in ((0, 0.9), (1, 1 - GEO(0.4).cdf(0))):
            bound = crossing_lower_bound(env, 2, 1, j)
            assert bound == pytest.approx(expected)
            est = estimate_survival("tdplus", 2, env, policy, n_runs=20_000,
                                    master_seed=50 + j, depth_offset=j)
            assert est.point == pytest.approx(
                bound, abs=three_sigma(bound, 20_000))

    def test_bound_is_below_simulated_crossing(self):
        # positive-association direction on random periodic environments
        rng = np.random.default_rng(77)
        for trial in range(8):
            env = random_periodic_env(rng)
            n = int(rng.integers(1, 4))
            j = int(rng.integers(0, 3))
            bound = mean_lower_bound(env, 2, n, j) / 2**n
            policy = StopPolicy(depth_target=n, generation_cap=4 * n + 8,
                                node_cap=2**22)
            est = estimate_survival("tdplus", 2, env, policy, n_runs=3_000,
                                    master_seed=600 + trial,
                                    depth_offset=j * n)
            assert bound <= est.point + three_sigma(max(bound, 0.02), 3_000), \
                (trial, n, j, bound, est.point)


class TestEnvFile:
    GOOD = """\
# depth 0 then depth 1; the last two repeat
bernoulli:p=0.9

geometric:p=0.3
pmf:0.5,0.5
tail: periodic=2
"""

    def test_parse_periodic(self):
        env = parse_environment(self.GOOD)
        assert env.prefix_len == 1
        assert env.period_len == 2
        assert env.distribution_at(0) == BERN(0.9)
        assert env.distribution_at(1) == GEO(0.3)
        assert env.distribution_at(2) == PMF([0.5, 0.5])
        assert env.distribution_at(3) == GEO(0.3)

    def test_default_tail_is_constant(self):
        env = parse_environment("bernoulli:p=0.4\nbernoulli:p=0.6\n")
        assert env.distribution_at(10) == BERN(0.6)

    def test_explicit_constant_tail(self):
        env = parse_environment("bernoulli:p=0.4\ntail: constant\n")
        assert env.distribution_at(5) == BERN(0.4)

    def test_load_from_disk(self, tmp_path):
        path = tmp_path / "env.txt"
        path.write_text(self.GOOD)
        assert load_environment(path) == parse_environment(self.GOOD)

    def test_errors_carry_line_numbers(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_environment("bernoulli:p=0.5\nbogus:what\n")

    def test_tail_rule_must_be_last(self):
        with pytest.raises(ValueError, match="last line"):
            parse_environment("tail: constant\nbernoulli:p=0.5\n")

    def test_duplicate_tail_rule(self):
        with pytest.raises(ValueError, match="duplicate"):
            parse_environment("bernoulli:p=0.5\ntail: constant\ntail: constant\n")

    def test_unknown_tail_rule(self):
        with pytest.raises(ValueError, match="unknown tail rule"):
            parse_environment("bernoulli:p=0.5\ntail: sometimes\n")

    def test_empty_file(self):
        with pytest.raises(ValueError, match="no distributions"):
            parse_environment("# nothing\n")

    def test_bad_period(self):
        with pytest.raises(ValueError):
            parse_environment("bernoulli:p=0.5\ntail: periodic=2\n")
        with pytest.raises(ValueError):
            parse_environment("bernoulli:p=0.5\ntail: periodic=x\n")
