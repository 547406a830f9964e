import json

import numpy as np
import pytest

from gbsiso.baselines import c4k1, petersen, star5
from gbsiso.graph import Graph, brute_force_isomorphism, generate, is_witness, isomorphic_copy
from gbsiso.pipeline import Config, Outcome, Pair, report, run, run_corpus

K3, P3 = generate("complete", 3), generate("path", 3)


def test_spectral_rejection():
    v = run(K3, P3)
    assert v.outcome is Outcome.NOT_ISOMORPHIC and v.reason == "spectral" and v.trace == []


def test_order_mismatch():
    v = run(K3, generate("path", 4))
    assert v.outcome is Outcome.NOT_ISOMORPHIC and v.reason == "order_mismatch"


def test_cospectral_pair_rejected_by_correlations():
    v = run(star5(), c4k1())
    assert v.outcome is Outcome.NOT_ISOMORPHIC
    assert v.reason == "invalid_sigma" and v.order <= 2


@pytest.mark.parametrize("seed", range(30))
def test_planted_pairs(seed):
    g = generate("erdos_renyi", 6, seed, p=0.5)
    h, _ = isomorphic_copy(g, seed + 1)
    v = run(g, h)
    assert v.outcome is Outcome.ISOMORPHIC
    assert is_witness(g, h, v.witness)


def test_empty_graphs():
    g = generate("empty", 5)
    v = run(g, g)
    assert v.outcome is Outcome.ISOMORPHIC and is_witness(g, g, v.witness)


def test_petersen_needs_enumeration():
    g = petersen()
    h, _ = isomorphic_copy(g, 4)
    v = run(g, h, Config(kmax=2))
    assert v.outcome is Outcome.ISOMORPHIC
    assert [s.sigma_popcount for s in v.trace] == [100, 100]


def test_indeterminate_when_capped():
    g = petersen()
    h, _ = isomorphic_copy(g, 4)
    v = run(g, h, Config(kmax=1, enum_cap=5))
    assert v.outcome is Outcome.INDETERMINATE and v.exit_code == 2
    assert v.count_bound == 3628800


def test_guard_downgrades_to_indeterminate():
    g = petersen()
    v = run(g, isomorphic_copy(g, 1)[0], Config(kmax=3, max_entries=500))
    assert v.outcome is Outcome.INDETERMINATE and v.reason == "guard"
    assert "exceeds guard" in v.diagnostic


def test_weighted_graphs():
    a = np.array([[0, 0.5, 0.2], [0.5, 0, 1.0], [0.2, 1.0, 0.3]])
    g = Graph(a)
    h, _ = isomorphic_copy(g, 2)
    v = run(g, h)
    assert v.outcome is Outcome.ISOMORPHIC and is_witness(g, h, v.witness, 1e-12)
    b = a.copy()
    b[0, 1] = b[1, 0] = 0.5001
    assert run(g, Graph(b)).outcome is Outcome.NOT_ISOMORPHIC


def test_monotone_trace_and_agreement():
    rng = np.random.default_rng(3)
    for trial in range(60):
        n = int(rng.integers(4, 9))
        g = generate("erdos_renyi", n, trial, p=0.5)
        h = generate("random_regular", n, trial, d=2) if trial % 2 else isomorphic_copy(g, trial)[0]
        v = run(g, h)
        pops = [s.sigma_popcount for s in v.trace]
        assert pops == sorted(pops, reverse=True)
        if v.definite:
            assert (v.outcome is Outcome.ISOMORPHIC) == (brute_force_isomorphism(g, h) is not None)


def test_report_is_deterministic_json():
    cfg = Config()
    g = petersen()
    h, _ = isomorphic_copy(g, 9)
    a = json.dumps(report(run(g, h, cfg), cfg), sort_keys=True)
    b = json.dumps(report(run(g, h, cfg), cfg), sort_keys=True)
    assert a == b
    assert "millis" not in a
    assert set(json.loads(a)) >= {"verdict", "reason", "order", "witness", "trace", "config", "versions"}


def test_timings_opt_in():
    cfg = Config(timings=True)
    rep = report(run(star5(), c4k1(), cfg), cfg)
    assert "millis" in rep["trace"][0]


def test_config_validation():
    for bad in (dict(kmax=0), dict(alpha=1.0), dict(tau_rel=0), dict(enum_cap=0), dict(seed=-1)):
        with pytest.raises(ValueError):
            Config(**bad)


class TestCorpus:
    def test_empty(self):
        out = run_corpus([])
        assert out["pairs"] == [] and out["summary"]["pairs"] == 0

    def test_planted_aggregate(self):
        pairs = []
        for s in range(100):
            g = generate("erdos_renyi", 4 + s % 5, s, p=0.5)
            pairs.append(Pair(f"p{s}", g, isomorphic_copy(g, s)[0], True))
        out = run_corpus(pairs, Config(kmax=2), baselines=())
        assert out["summary"]["verdicts"]["NOT_ISOMORPHIC"] == 0
        assert out["summary"]["agreement"] == out["summary"]["definite_with_truth"]

    def test_named_and_threads(self):
        pairs = [Pair("k3p3", K3, P3, False), Pair("cospec", star5(), c4k1(), False)]
        serial = run_corpus(pairs, Config())
        threaded = run_corpus(pairs, Config(threads=2))
        assert serial == threaded
        assert serial["pairs"][0]["reason"] == "spectral"
        assert serial["summary"]["wl1"]["distinguished"] == 2

    def test_failure_recorded(self, monkeypatch):
        import gbsiso.pipeline as pl

        real_run = pl.run

        def flaky(g1, g2, config):
            if g1.order == 5:
                raise FloatingPointError("boom")
            return real_run(g1, g2, config)

        monkeypatch.setattr(pl, "run", flaky)
        out = run_corpus([Pair("bad", star5(), c4k1()), Pair("ok", K3, P3)], Config())
        assert out["pairs"][0]["error"] == "FloatingPointError: boom"
        assert out["pairs"][1]["verdict"] == "NOT_ISOMORPHIC"
        assert out["summary"]["verdicts"]["ERROR"] == 1

    def test_guard_in_corpus(self):
        out = run_corpus([Pair("g", K3, K3)], Config(kmax=1, max_order=0))
        assert out["pairs"][0]["verdict"] == "INDETERMINATE"
