import math

import numpy as np
import pytest

from locprob.analytic import failure_prob_sum
from locprob.model import bhat_distribution, make_network, make_shadow_model
from locprob.montecarlo import (
    ProbEstimate,
    TrialProtocol,
    estimate,
    run_trial,
    sample_center_realization,
    sample_realization,
    wilson_interval,
)
from locprob.shadowing import failure_prob_shadow


def wilson_se(est: ProbEstimate) -> float:
    return (est.ci_high - est.ci_low) / 2.0 / 1.959963984540054


class TestWilsonInterval:
    def test_extremes(self):
        lo, hi = wilson_interval(0, 100)
        assert lo == 0.0 and 0.0 < hi < 0.06
        lo, hi = wilson_interval(100, 100)
        assert hi == 1.0 and 0.94 < lo < 1.0

    def test_contains_point_estimate(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            t = int(rng.integers(1, 10_000))
            s = int(rng.integers(0, t + 1))
            lo, hi = wilson_interval(s, t)
            assert 0.0 <= lo <= s / t <= hi <= 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            wilson_interval(1, 0)
        with pytest.raises(ValueError):
            wilson_interval(5, 4)


class TestSampling:
    def test_radii_inside_disk_and_flag_count(self):
        rng = np.random.default_rng(0)
        net = make_network(400, 100)
        real = sample_realization(rng, net)
        assert real.radii.max() <= 1.0
        assert real.radii.min() >= 0.0
        assert np.abs(real.angles).max() <= math.pi
        assert int(real.l_flags.sum()) == 100

    def test_area_uniformity(self):
        # the square-root transform makes P(radius <= rho) = rho^2
        rng = np.random.default_rng(12)
        net = make_network(1000, 0)
        radii = np.concatenate([sample_realization(rng, net).radii for _ in range(1000)])
        for rho in (0.3, 0.7):
            want = rho * rho
            se = math.sqrt(want * (1.0 - want) / radii.size)
            got = float((radii <= rho).mean())
            assert abs(got - want) < 4.0 * se

    def test_same_seed_reproduces_realization(self):
        net = make_network(64, 16)
        one = sample_realization(np.random.default_rng(77), net)
        two = sample_realization(np.random.default_rng(77), net)
        assert np.array_equal(one.radii, two.radii)
        assert np.array_equal(one.angles, two.angles)
        assert np.array_equal(one.l_flags, two.l_flags)

    def test_center_realization_pins_probe(self):
        rng = np.random.default_rng(5)
        net = make_network(200, 50)
        real = sample_center_realization(rng, net)
        assert real.radii[0] == 0.0
        assert not real.l_flags[0]

    def test_center_anchor_labels_are_bernoulli(self):
        rng = np.random.default_rng(6)
        net = make_network(200, 50)
        counts = [sample_center_realization(rng, net).l_flags.sum() for _ in range(4000)]
        mean = float(np.mean(counts))
        want = (net.n - 1) * net.k / net.n
        se = math.sqrt((net.n - 1) * 0.25 * 0.75 / 4000)
        assert abs(mean - want) < 4.0 * se

    def test_coverage_count_is_binomial(self):
        # probe at the center: nodes within the coverage ratio follow
        # binomial(n-1, b^2)
        rng = np.random.default_rng(8)
        net = make_network(100, 30)
        b = 0.3
        counts = [
            int((sample_center_realization(rng, net).radii[1:] <= b).sum())
            for _ in range(20_000)
        ]
        want = (net.n - 1) * b * b
        se = math.sqrt((net.n - 1) * b * b * (1 - b * b) / 20_000)
        assert abs(float(np.mean(counts)) - want) < 4.0 * se


class TestRunTrial:
    def test_too_few_anchors_always_fail(self):
        rng = np.random.default_rng(1)
        net = make_network(50, 2)
        for protocol in (TrialProtocol(), TrialProtocol(probe="all_nl_nodes")):
            real = sample_realization(rng, net)
            assert not run_trial(real, 1.0, protocol).any()

    def test_full_coverage_from_center_succeeds(self):
        rng = np.random.default_rng(2)
        net = make_network(50, 3)
        real = sample_realization(rng, net)
        assert run_trial(real, 1.0, TrialProtocol()).all()

    def test_all_blind_nodes_are_probed(self):
        rng = np.random.default_rng(3)
        net = make_network(40, 15)
        out = run_trial(sample_realization(rng, net), 0.4, TrialProtocol(probe="all_nl_nodes"))
        assert out.shape == (25,)

    def test_shadow_requires_parameters_and_rng(self):
        rng = np.random.default_rng(4)
        net = make_network(20, 10)
        real = sample_realization(rng, net)
        protocol = TrialProtocol(shadow_draw="per_node")
        with pytest.raises(ValueError, match="shadow"):
            run_trial(real, 0.2, protocol, shadow=None, rng=rng)
        dist = bhat_distribution(0.2, 1.0, 0.48)
        with pytest.raises(ValueError, match="rng"):
            run_trial(real, 0.2, protocol, shadow=dist, rng=None)
        with pytest.raises(ValueError, match="does not match"):
            run_trial(real, 0.3, protocol, shadow=dist, rng=rng)

    def test_protocol_validation(self):
        with pytest.raises(ValueError):
            TrialProtocol(probe="corner")
        with pytest.raises(ValueError):
            TrialProtocol(shadow_draw="sometimes")

    def test_per_link_runs_both_protocols(self):
        rng = np.random.default_rng(9)
        net = make_network(30, 12)
        dist = bhat_distribution(0.25, 2.0, 0.48)
        protocol = TrialProtocol(probe="all_nl_nodes", shadow_draw="per_link")
        out = run_trial(sample_realization(rng, net), 0.25, protocol, dist, rng)
        assert out.shape == (18,)
        center = TrialProtocol(probe="center_node", shadow_draw="per_link")
        out = run_trial(sample_realization(rng, net), 0.25, center, dist, rng)
        assert out.shape == (1,)


class TestEstimate:
    def test_matches_fixed_coverage_theory(self):
        net = make_network(300, 240)
        sim = estimate(net, 0.099, trials=100_000, seed=31)
        want = failure_prob_sum(net, 0.099).p_loc
        assert abs(sim.p_hat - want) <= 3.0 * wilson_se(sim)

    def test_oracle_agreement_across_network_sizes(self):
        # 12 (n, a, b) combinations at 1e5 trials each
        cells = [
            (50, 0.2, 0.2), (50, 0.2, 0.35), (50, 0.5, 0.2), (50, 0.8, 0.35),
            (300, 0.2, 0.099), (300, 0.5, 0.099), (300, 0.8, 0.15), (300, 0.95, 0.3),
            (1000, 0.2, 0.05), (1000, 0.5, 0.06), (1000, 0.8, 0.08), (1000, 0.9, 0.1),
        ]
        for i, (n, a, b) in enumerate(cells):
            net = make_network(n, round(n * (1.0 - a)))
            sim = estimate(net, b, trials=100_000, seed=5000 + i)
            want = failure_prob_sum(net, b).p_loc
            assert abs(sim.p_hat - want) <= 3.0 * wilson_se(sim), (n, a, b)

    def test_deterministic_across_runs_and_workers(self):
        net = make_network(120, 60)
        one = estimate(net, 0.2, trials=9000, seed=17, workers=1)
        again = estimate(net, 0.2, trials=9000, seed=17, workers=1)
        four = estimate(net, 0.2, trials=9000, seed=17, workers=4)
        assert one == again == four

    def test_seed_changes_the_draws(self):
        net = make_network(120, 60)
        assert estimate(net, 0.2, trials=5000, seed=1).successes != estimate(
            net, 0.2, trials=5000, seed=2
        ).successes

    def test_field_protocol_pools_blind_probes(self):
        net = make_network(80, 20)
        sim = estimate(net, 0.3, TrialProtocol(probe="all_nl_nodes"), trials=500, seed=5)
        assert sim.realizations == 500
        assert sim.trials == 500 * 60
        assert 0.0 <= sim.ci_low <= sim.p_hat <= sim.ci_high <= 1.0

    def test_boundary_clipping_depresses_field_protocol(self):
        # boundary probes see a clipped coverage disk, so the field estimate
        # sits below the interior-node protocol
        net = make_network(300, 240)
        interior = estimate(net, 0.099, trials=40_000, seed=23)
        field = estimate(
            net, 0.099, TrialProtocol(probe="all_nl_nodes"), trials=2000, seed=23
        )
        assert field.p_hat < interior.p_hat

    def test_shadowed_center_probe_matches_mixture_integral(self):
        model = make_shadow_model(0.0, -80.0, 0.1, 3.5, 12.0, 40.0)
        net = make_network(50, 10)
        dist = bhat_distribution(0.2, model.sigma1, model.b_hat_max)
        sim = estimate(
            net, 0.2, TrialProtocol(shadow_draw="per_node"), shadow=dist,
            trials=100_000, seed=41,
        )
        want = failure_prob_shadow(net, dist).p_loc
        assert abs(sim.p_hat - want) <= 3.0 * wilson_se(sim)

    def test_validation(self):
        net = make_network(20, 10)
        with pytest.raises(ValueError):
            estimate(net, 0.2, trials=0)
        with pytest.raises(ValueError):
            estimate(net, 0.2, workers=0)
        with pytest.raises(ValueError):
            estimate(net, 1.5)
        with pytest.raises(ValueError, match="blind"):
            estimate(make_network(20, 20), 0.2, TrialProtocol(probe="all_nl_nodes"))
