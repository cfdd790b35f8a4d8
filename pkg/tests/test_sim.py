import math

import numpy as np
import pytest

from raidlab import builders
from raidlab.ctmc import mean_time_to_absorption, build_ctmc
from raidlab.declustering import CopysetScheme
from raidlab.disk import MomentSet
from raidlab.queueing import harmonic, mg1_wait, mg1_head_of_line_wait, \
    gim1_erlang2_wait
from raidlab.rebuild import vacation_stats, vsm_wait
from raidlab.disk import Deterministic
from raidlab.sim import (
    SimConfig, confidence, sim_code_mttdl, sim_copyset_loss,
    sim_generic_mttdl, sim_hraid_mttdl, sim_queue,
)


class TestConfidence:
    def test_constant_samples(self):
        mean, hw = confidence([5.0, 5.0, 5.0])
        assert mean == 5.0
        assert hw == 0.0

    def test_unit_exponential(self):
        rng = np.random.default_rng(4)
        mean, hw = confidence(rng.exponential(1.0, 10_000))
        assert mean == pytest.approx(1.0, abs=0.05)
        assert hw == pytest.approx(0.02, abs=0.01)
        assert mean - hw <= 1.0 <= mean + hw

    def test_coverage_rate(self):
        rng = np.random.default_rng(9)
        covered = 0
        for _ in range(500):
            mean, hw = confidence(rng.exponential(1.0, 40), level=0.95)
            covered += (mean - hw <= 1.0 <= mean + hw)
        # binomial(500, 0.95): nearly all mass within (0.92, 0.98)
        assert 0.92 <= covered / 500 <= 0.985

    def test_needs_two(self):
        with pytest.raises(ValueError):
            confidence([1.0])


class TestReplay:
    def test_bit_identical(self):
        cfg = SimConfig(nodes=2, disks_per_node=4, intra_tolerance=1,
                        delta=1e-5, replications=200, seed=99)
        a = sim_hraid_mttdl(cfg)
        b = sim_hraid_mttdl(cfg)
        assert a.estimate == b.estimate
        assert a.half_width == b.half_width

    def test_seed_changes_estimate(self):
        cfg1 = SimConfig(nodes=2, disks_per_node=4, intra_tolerance=1,
                         delta=1e-5, replications=200, seed=1)
        cfg2 = SimConfig(nodes=2, disks_per_node=4, intra_tolerance=1,
                         delta=1e-5, replications=200, seed=2)
        assert sim_hraid_mttdl(cfg1).estimate != sim_hraid_mttdl(cfg2).estimate


class TestHraid:
    def test_first_failure_kills(self):
        # k = ell = 0, one disk per node, no controllers: min of N exponentials
        n = 8
        delta = 1e-4
        cfg = SimConfig(nodes=n, disks_per_node=1, delta=delta,
                        replications=4000, seed=7)
        rep = sim_hraid_mttdl(cfg)
        want = 1.0 / (n * delta)
        assert abs(rep.estimate - want) <= 2 * rep.half_width

    def test_single_node_matches_ctmc(self):
        # one node, 10 disks, tolerate 1, no repair
        cfg = SimConfig(nodes=1, disks_per_node=10, intra_tolerance=1,
                        delta=1e-5, replications=6000, seed=21)
        rep = sim_hraid_mttdl(cfg)
        chain = build_ctmc([(0, 1, 10e-5), (1, 2, 9e-5)], absorbing=[2])
        want, _, _ = mean_time_to_absorption(chain)
        assert abs(rep.estimate - want) <= 2 * rep.half_width

    def test_intra_beats_inter_at_equal_redundancy(self):
        # double intra / single inter outlasts single intra / double inter
        common = dict(nodes=4, disks_per_node=4, delta=1e-5, gamma=1e-7,
                      replications=4000, seed=13)
        strong_intra = sim_hraid_mttdl(SimConfig(inter_tolerance=1,
                                                 intra_tolerance=2, **common))
        strong_inter = sim_hraid_mttdl(SimConfig(inter_tolerance=2,
                                                 intra_tolerance=1, **common))
        assert strong_intra.estimate - strong_intra.half_width > \
            strong_inter.estimate + strong_inter.half_width

    def test_controller_breakdown_recorded(self):
        cfg = SimConfig(nodes=4, disks_per_node=2, delta=1e-6, gamma=1e-4,
                        replications=500, seed=3)
        rep = sim_hraid_mttdl(cfg)
        assert rep.breakdown["controller"] > 0.5
        assert rep.breakdown["controller"] + rep.breakdown["disk"] == \
            pytest.approx(1.0)


class TestGenericMttdl:
    def test_any_failure_predicate(self):
        n, delta = 12, 1e-4
        rep = sim_generic_mttdl(n, delta, mu=0.0, tolerance=0,
                                reps=40_000, seed=5)
        assert abs(rep.estimate - 1 / (n * delta)) <= 2 * rep.half_width

    def test_fast_path_matches_event_loop(self):
        kw = dict(n=10, delta=1 / 2000, mu=1.0, regime="angus", tolerance=1,
                  reps=4000)
        fast = sim_generic_mttdl(seed=11, method="fast", **kw)
        loop = sim_generic_mttdl(seed=12, method="loop", **kw)
        overlap = abs(fast.estimate - loop.estimate) <= \
            fast.half_width + loop.half_width
        assert overlap

    def test_chen_regime_matches_chain(self):
        delta, mu = 1 / 800.0, 0.8
        n, kappa = 8, 2
        edges = []
        for i in range(kappa + 1):
            edges.append((i, i + 1, (n - i) * delta))
            if i > 0:
                edges.append((i, i - 1, mu))
        chain = build_ctmc(edges, absorbing=[kappa + 1])
        want, _, _ = mean_time_to_absorption(chain)
        rep = sim_generic_mttdl(n, delta, mu, regime="chen", tolerance=kappa,
                                reps=20_000, seed=31)
        assert abs(rep.estimate - want) <= 2.5 * rep.half_width

    def test_code_predicate_mirrors_chain(self):
        # raid5(6) column predicate equals a plain threshold of 1
        code = builders.raid5(6)
        delta, mu = 1e-4, 0.05
        rep = sim_code_mttdl(code, delta, mu, regime="chen", reps=3000,
                             seed=17)
        edges = [(0, 1, 6 * delta), (1, 0, mu), (1, 2, 5 * delta)]
        chain = build_ctmc(edges, absorbing=[2])
        want, _, _ = mean_time_to_absorption(chain)
        assert abs(rep.estimate - want) <= 3 * rep.half_width


class TestCopysetSim:
    def test_exact_enumeration_small(self):
        perms = [list(range(9)), [0, 3, 6, 1, 4, 7, 2, 5, 8]]
        scheme = CopysetScheme(9, 3, 4, scheme="copyset", permutations=perms)
        rep = sim_copyset_loss(scheme, fail_count=3)
        assert rep.extras.get("exact")
        assert rep.estimate == pytest.approx(6 / 84)

    def test_random_scheme_montecarlo(self):
        scheme = CopysetScheme(9, 3, 4, scheme="random")
        rep = sim_copyset_loss(scheme, fail_count=3, reps=20_000, seed=2)
        assert abs(rep.estimate - 54 / 84) <= 3 * rep.half_width

    def test_zero_failures(self):
        scheme = CopysetScheme(9, 3, 4, scheme="random")
        rep = sim_copyset_loss(scheme, fail_count=0)
        assert rep.estimate == 0.0

    def test_big_cluster_outage_is_near_certain_loss(self):
        scheme = CopysetScheme(5000, 3, 50, scheme="random")
        rep = sim_copyset_loss(scheme, fail_fraction=0.01, reps=300, seed=8)
        assert rep.estimate > 0.9
        wider = CopysetScheme(5000, 3, 100, scheme="random")
        rep = sim_copyset_loss(wider, fail_fraction=0.01, reps=300, seed=8)
        assert rep.estimate > 0.99


MS = 1.0  # arrival rates below are per ms


class TestQueueSim:
    def test_mm1_wait(self):
        res = sim_queue("mg1", {"arrival_rate": 0.05, "service": ("exp", 10.0)},
                        n_customers=400_000, seed=42)
        # rho = 0.5: W = 10
        assert res["wait"] == pytest.approx(10.0, rel=0.05)

    def test_md1_wait_analytic(self):
        svc = MomentSet.deterministic(8.0)
        want = mg1_wait(50.0, svc).wait
        res = sim_queue("mg1", {"arrival_rate": 0.05, "service": ("det", 8.0)},
                        n_customers=400_000, seed=43)
        assert res["wait"] == pytest.approx(want, rel=0.05)

    def test_gim1_erlang2(self):
        want = gim1_erlang2_wait(50.0, 0.1)
        res = sim_queue("gim1_erlang2",
                        {"arrival_rate": 0.05, "service_mean": 10.0},
                        n_customers=400_000, seed=44)
        assert res["wait"] == pytest.approx(want, rel=0.07)

    def test_priority_high_class(self):
        svc = MomentSet.exponential(10.0)
        lam_h = 0.03
        lam_l = 0.03
        # pooled second moment with identical classes
        want = mg1_head_of_line_wait((lam_h + lam_l) * 1000.0, svc,
                                     lam_h * 10.0)
        res = sim_queue("mg1_priority",
                        {"arrival_rate_high": lam_h, "arrival_rate_low": lam_l,
                         "service_high": ("exp", 10.0),
                         "service_low": ("exp", 10.0)},
                        n_customers=400_000, seed=45)
        assert res["wait_high"] == pytest.approx(want, rel=0.05)

    def test_fj_two_way_flatto_hahn(self):
        rho = 0.5
        res = sim_queue("fj", {"arrival_rate": 0.05, "ways": 2,
                               "service": ("exp", 10.0)},
                        n_customers=300_000, seed=46)
        r = 10.0 / (1 - rho)
        want = (12 - rho) / 8 * r
        assert res["response"] == pytest.approx(want, rel=0.03)

    def test_fj_bounded_by_harmonic_max(self):
        rho = 0.5
        r = 10.0 / (1 - rho)
        for ways in (2, 4, 8):
            res = sim_queue("fj", {"arrival_rate": 0.05, "ways": ways,
                                   "service": ("exp", 10.0)},
                            n_customers=150_000, seed=47)
            assert res["response"] <= harmonic(ways) * r * 1.01

    def test_vsm_wait_analytic(self):
        svc = MomentSet.exponential(10.0)
        v1 = Deterministic(12.0)
        v2 = Deterministic(8.0)
        lam_s = 50.0
        vac = vacation_stats(v1, v2, lam_s)
        want = vsm_wait(lam_s, svc, vac).wait
        res = sim_queue("vsm", {"arrival_rate": 0.05,
                                "service": ("exp", 10.0),
                                "vacation1": ("det", 12.0),
                                "vacation2": ("det", 8.0)},
                        n_customers=300_000, seed=48)
        assert res["wait"] == pytest.approx(want, rel=0.03)
        assert res["mean_units_per_idle"] == pytest.approx(vac.n_track,
                                                           rel=0.03)

    def test_zero_vacations_reduce_to_mg1(self):
        base = sim_queue("mg1", {"arrival_rate": 0.05,
                                 "service": ("exp", 10.0)},
                         n_customers=200_000, seed=50)
        vsm = sim_queue("vsm", {"arrival_rate": 0.05,
                                "service": ("exp", 10.0),
                                "vacation1": ("det", 0.0),
                                "vacation2": ("det", 0.0)},
                        n_customers=200_000, seed=50)
        assert vsm["wait"] == pytest.approx(base["wait"], rel=0.05)

    def test_pcm_slower_than_vsm(self):
        vsm = sim_queue("vsm", {"arrival_rate": 0.05,
                                "service": ("exp", 10.0),
                                "vacation1": ("det", 8.33),
                                "vacation2": ("det", 8.33)},
                        n_customers=200_000, seed=51)
        pcm = sim_queue("pcm", {"arrival_rate": 0.05,
                                "service": ("exp", 10.0),
                                "rebuild_service": ("det", 8.33)},
                        n_customers=200_000, seed=51)
        assert pcm["response"] >= vsm["response"]

    def test_unstable_rejected(self):
        with pytest.raises(ValueError):
            sim_queue("mg1", {"arrival_rate": 0.2, "service": ("exp", 10.0)})


class TestTightOracle:
    def test_mg1_within_two_percent_at_half_load(self):
        svc = MomentSet(8.0, 100.0, 1800.0)
        want = mg1_wait(62.5, svc).wait  # rho = 0.5
        spec = ("erlang", 2, 8.0)
        import raidlab.sim as S
        # distribution with matching first two moments: Erlang-2 mean 8
        # (m2 = 96) is close; use the exact M/G/1 formula for that service
        from raidlab.disk import MomentSet as MS
        erl = MS(8.0, 96.0, 1536.0)
        want = mg1_wait(62.5, erl).wait
        res = sim_queue("mg1", {"arrival_rate": 0.0625, "service": spec},
                        n_customers=600_000, seed=77)
        assert abs(res["wait"] - want) <= 0.02 * want


class TestConvergence:
    def test_ci_shrinks_like_root_n(self):
        kw = dict(n=10, delta=1 / 2000, mu=1.0, regime="chen", tolerance=1)
        small = sim_generic_mttdl(reps=1000, seed=5, **kw)
        big = sim_generic_mttdl(reps=16_000, seed=5, **kw)
        ratio = small.half_width / big.half_width
        assert 2.5 <= ratio <= 6.5  # expect ~4 with sampling noise
