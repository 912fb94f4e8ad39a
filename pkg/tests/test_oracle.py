import math

import numpy as np
import pytest
from scipy.special import ive

from masep.algebra import build_B, build_B1, build_B2, pairs
from masep.model import state
from masep.oracle import (StateBudgetExceeded, UniformizationParams, explore_reachable,
                          poisson_depth, single_particle_closed_form, uniformized_distribution)


def bessel_walk(m, t, p):
    q = 1 - p
    z = 2 * math.sqrt(p * q) * t
    # I_m(z) e^{-t} = ive(m, z) e^{z - t}
    return (p / q) ** (m / 2) * ive(abs(m), z) * math.exp(z - t)


class TestExplore:
    def test_random_walk(self):
        g = explore_reachable(state([0], [1]), 0.5, 2)
        assert sorted(s.positions[0] for s in g.states) == [-2, -1, 0, 1, 2]

    def test_two_particles_depth_one(self):
        g = explore_reachable(state([0, 1], [1, 2]), 0.7, 1)
        assert len(g) == 5
        assert len(g.arcs) == 4
        assert g.frontier == set(range(1, 5))

    def test_depth_zero(self):
        g = explore_reachable(state([0, 1], [1, 2]), 0.7, 0)
        assert len(g) == 1 and g.arcs == []

    def test_equal_target_arcs_merged(self):
        g = explore_reachable(state([0, 1, 2], [1, 1, 1]), 0.5, 3)
        keys = [(a, b) for a, b, _ in g.arcs]
        assert len(keys) == len(set(keys))

    def test_exit_rates(self):
        g = explore_reachable(state([0, 1, 2], [2, 1, 3]), 0.3, 3)
        Q = g.generator()
        np.testing.assert_allclose(np.asarray(Q.sum(axis=1)).ravel()[~np.isin(
            np.arange(len(g)), list(g.frontier))], 0.0, atol=1e-14)
        assert np.all(g.exit <= 3 + 1e-12)
        assert np.all(g.exit >= 3 * 0.3 - 1e-12)

    def test_budget(self):
        with pytest.raises(StateBudgetExceeded) as exc:
            explore_reachable(state([0, 1], [1, 2]), 0.5, 10, max_states=20)
        assert exc.value.frontier >= 0

    def test_negative_depth(self):
        with pytest.raises(ValueError):
            explore_reachable(state([0], [1]), 0.5, -1)


class TestMasterEquation:
    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("p", [0.7, 0.2])
    def test_adjacent_pair_in_rates(self, n, p):
        """In-rates to (x, x+1, ij) reproduce the two-site master equation:
        p P(x-1,x+1) + p B P(x-1,x) + q P(x,x+2) + q B1 P(x,x+1)
        - (2p + q B2) P(x,x+1)."""
        q = 1 - p
        x = 4
        B, B1, B2 = build_B(n), build_B1(n), build_B2(n)

        def rate(src, dst):
            g = explore_reachable(src, p, 1)
            b = g.index.get(dst)
            return 0.0 if b is None else g.generator()[0, b]

        for ij in pairs(n):
            target = state([x, x + 1], ij)
            assert rate(state([x - 1, x + 1], ij), target) == pytest.approx(p)
            assert rate(state([x, x + 2], ij), target) == pytest.approx(q)
            for lm in pairs(n):
                assert rate(state([x - 1, x], lm), target) == pytest.approx(p * B[ij, lm])
                if lm != ij:
                    assert rate(state([x, x + 1], lm), target) == pytest.approx(q * B1[ij, lm])
            assert rate(target, target) == pytest.approx(-(2 * p + q * B2[ij, ij]))


class TestUniformization:
    def test_t0(self):
        d = uniformized_distribution(state([0, 2], [2, 1]), 0.0, 0.5)
        assert d.probs == {state([0, 2], [2, 1]): 1.0}

    @pytest.mark.parametrize("p", [0.7, 0.3, 0.5])
    def test_single_particle_bessel(self, p):
        d = uniformized_distribution(state([0], [1]), 1.0, p)
        for m in range(-8, 9):
            assert d[state([m], [1])] == pytest.approx(bessel_walk(m, 1.0, p), abs=1e-10)

    @pytest.mark.parametrize("t", [0.5, 2.0])
    def test_staying_probability_right_only(self, t):
        d = uniformized_distribution(state([0, 1], [1, 2]), t, 1.0)
        assert d[state([0, 1], [1, 2])] == pytest.approx(math.exp(-2 * t), abs=1e-12)

    def test_conservation(self):
        d = uniformized_distribution(state([0, 1, 2], [3, 1, 2]), 0.5, 0.5)
        assert d.info["leaked"] <= d.info["poisson_tail"] + 1e-12
        assert d.info["poisson_tail"] < 1e-12
        assert abs(d.total() - 1) < 1e-11

    def test_monotone_refinement(self):
        init = state([0, 1], [2, 1])
        lo = uniformized_distribution(init, 1.0, 0.6, UniformizationParams(depth=8))
        hi = uniformized_distribution(init, 1.0, 0.6, UniformizationParams(depth=20))
        for s, v in lo.probs.items():
            assert hi[s] >= v - 1e-12

    def test_lambda_too_small(self):
        with pytest.raises(ValueError):
            uniformized_distribution(state([0, 1], [1, 2]), 1.0, 0.5, UniformizationParams(lam=1.0))

    def test_poisson_depth(self):
        from scipy.stats import poisson
        K = poisson_depth(2.0, 1e-12)
        assert poisson.sf(K, 2.0) < 1e-12 <= poisson.sf(K - 1, 2.0)
        assert poisson_depth(0.0, 1e-12) == 0


class TestClosedForm:
    def test_t0(self):
        assert single_particle_closed_form(0, 0.0, 0.4) == 1.0
        assert single_particle_closed_form(2, 0.0, 0.4) == 0.0

    @pytest.mark.parametrize("m", range(0, 7))
    def test_poisson_specialisation(self, m):
        t = 1.3
        want = math.exp(-t) * t ** m / math.factorial(m)
        assert single_particle_closed_form(m, t, 1.0) == pytest.approx(want, rel=1e-13)

    def test_right_only_never_left(self):
        assert single_particle_closed_form(-1, 2.0, 1.0) == 0.0
        assert single_particle_closed_form(1, 2.0, 0.0) == 0.0

    @pytest.mark.parametrize("p", [0.1, 0.5, 0.85])
    @pytest.mark.parametrize("t", [0.3, 2.0, 7.0])
    def test_bessel(self, p, t):
        for m in range(-10, 11):
            assert single_particle_closed_form(m, t, p) == pytest.approx(
                bessel_walk(m, t, p), rel=1e-10, abs=1e-15)

    def test_sums_to_one(self):
        total = math.fsum(single_particle_closed_form(m, 3.0, 0.35) for m in range(-60, 61))
        assert total == pytest.approx(1.0, abs=1e-13)
