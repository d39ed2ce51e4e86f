"""Tests for the classical Metropolis-Hastings sampler."""

import numpy as np
import pytest

from qwmcmc.analysis import tv_distance
from qwmcmc.mcmc import ChainResult, ProposalSpec, mh_run, proposal_weights
from qwmcmc.targets import (
    ExpectedDistribution,
    GaussianComponent,
    Grid,
    TargetSpec,
    discretize_target,
)


def bimodal_pi(n_x=10):
    grid = Grid(n_x, -10, 10)
    spec = TargetSpec(
        (GaussianComponent(1, -5, 1), GaussianComponent(1, 5, 1)), grid
    )
    return discretize_target(spec)


class TestProposalSpec:
    def test_offsets_cover_k_per_direction(self):
        w = proposal_weights(ProposalSpec(k=2))
        assert set(w) == {-2, -1, 1, 2}
        w = proposal_weights(ProposalSpec(k=8))
        assert set(w) == {d for d in range(-8, 9) if d != 0}

    def test_weights_symmetric_and_normalized(self):
        w = proposal_weights(ProposalSpec(k=16, sigma=4))
        assert sum(w.values()) == pytest.approx(1.0, abs=1e-12)
        for d in range(1, 17):
            assert w[d] == pytest.approx(w[-d], abs=1e-15)
        assert w[1] == max(w.values())

    def test_default_sigma(self):
        assert ProposalSpec(k=16).sigma == 8.0

    @pytest.mark.parametrize("kwargs", [dict(k=1), dict(k=3), dict(k=0), dict(k=4, sigma=0)])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            ProposalSpec(**kwargs)


class TestMhRun:
    def test_deterministic_given_seed(self):
        pi = bimodal_pi(6)
        a = mh_run(pi, ProposalSpec(k=4), iters=3000, seed=42)
        b = mh_run(pi, ProposalSpec(k=4), iters=3000, seed=42)
        assert (a.samples == b.samples).all()
        assert a.acceptance_rate == b.acceptance_rate
        c = mh_run(pi, ProposalSpec(k=4), iters=3000, seed=43)
        assert not (a.samples == c.samples).all()

    def test_chain_stays_on_grid(self):
        pi = bimodal_pi(5)
        r = mh_run(pi, ProposalSpec(k=16), iters=20000, seed=0)
        assert r.samples.min() >= 0
        assert r.samples.max() < len(pi)

    def test_uniform_target_accepts_interior_proposals(self):
        # On a flat target every in-range proposal is accepted; with the
        # chain far from the edges no proposal can leave the grid.
        pi = ExpectedDistribution(np.full(1024, 1 / 1024))
        r = mh_run(pi, ProposalSpec(k=2), iters=400, seed=1)
        assert r.acceptance_rate == 1.0

    def test_boundary_proposals_rejected_not_wrapped(self):
        pi = ExpectedDistribution(np.full(4, 0.25))
        r = mh_run(pi, ProposalSpec(k=8), iters=5000, seed=2)
        assert r.samples.min() >= 0 and r.samples.max() <= 3
        assert r.acceptance_rate < 1.0

    def test_burn_in_and_thinning_counts(self):
        pi = bimodal_pi(6)
        r = mh_run(pi, ProposalSpec(k=4), iters=100_000, seed=3,
                   burn_in_fraction=0.1, thinning=10)
        assert len(r.samples) == 9000
        assert r.raw_length == 100_000
        assert r.histogram.sum() == 9000

    def test_histogram_matches_samples(self):
        pi = bimodal_pi(5)
        r = mh_run(pi, ProposalSpec(k=6), iters=5000, seed=5)
        assert (np.bincount(r.samples, minlength=len(pi)) == r.histogram).all()
        lo, hi = r.mode_occupancy
        assert lo + hi == pytest.approx(1.0)
        assert lo == pytest.approx(np.mean(r.samples < len(pi) // 2))

    def test_long_run_matches_target(self):
        grid = Grid(5, -5, 5)
        pi = discretize_target(TargetSpec.single_gaussian(0, 1, grid))
        r = mh_run(pi, ProposalSpec(k=16), iters=1_000_000, seed=7)
        hist = r.histogram / r.histogram.sum()
        assert tv_distance(hist, pi.probs) <= 0.05

    def test_local_proposal_traps_in_one_mode(self):
        pi = bimodal_pi()
        r = mh_run(pi, ProposalSpec(k=16), iters=100_000, seed=11,
                   burn_in_fraction=0.1, thinning=10)
        assert max(r.mode_occupancy) > 0.9

    def test_wide_proposal_visits_both_modes(self):
        pi = bimodal_pi()
        r = mh_run(pi, ProposalSpec(k=256), iters=100_000, seed=11,
                   burn_in_fraction=0.1, thinning=10)
        assert min(r.mode_occupancy) > 0.25

    def test_greedy_mode_is_not_ergodic(self):
        # The greedy rule climbs to one peak and stays, so its histogram
        # never approaches a bimodal target.
        pi = bimodal_pi(9)
        r = mh_run(pi, ProposalSpec(k=16), iters=50_000, seed=13,
                   acceptance_mode="greedy")
        hist = r.histogram / r.histogram.sum()
        assert tv_distance(hist, pi.probs) >= 0.5

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(iters=0, seed=0),
            dict(iters=10, seed=0, burn_in_fraction=1.0),
            dict(iters=10, seed=0, burn_in_fraction=-0.1),
            dict(iters=10, seed=0, thinning=0),
            dict(iters=10, seed=0, acceptance_mode="bogus"),
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            mh_run(bimodal_pi(5), ProposalSpec(k=4), **kwargs)

    def test_rng_algorithm_recorded(self):
        r = mh_run(bimodal_pi(5), ProposalSpec(k=4), iters=10, seed=0)
        assert "PCG64" in r.rng_algorithm
