import numpy as np
import pytest

from geodecomp.conjugacy import (RATIONALE_GENERAL, RATIONALE_NEGATIVE, RATIONALE_SKEW, ConjugacyConfig,
                                 compare_pair, gradient_part, rotational_part, sphere_field, verify_hypotheses)
from geodecomp.fields import NumericVectorField, linear_field, rikitake
from geodecomp.geometry import custom, euclidean, minkowski, symplectic

FAST = ConjugacyConfig(grid_k=7, trials=8, T=30.0)
SINK = linear_field(-np.eye(2))
SPIRAL = linear_field([[-1, -1], [1, -1]])


@pytest.mark.parametrize("R", [1.0, 10.0])
def test_linear_sink_attracting(R):
    cfg = ConjugacyConfig(box_R=R, grid_k=7, trials=8, T=40.0)
    r = verify_hypotheses(euclidean(2), SINK, cfg)
    assert r.structure_admissible and r.origin_is_equilibrium_of_gradient_part
    assert r.unique_equilibrium_in_box and np.allclose(r.equilibria_found, 0, atol=1e-9)
    assert r.attraction_verdict == "attracting" and r.criterion_applicable and r.sampled
    assert all(v < cfg.eps * R for v in r.attraction_stats["forward_final_norms"])


def test_source_repelling():
    r = verify_hypotheses(euclidean(2), linear_field(np.eye(2)), FAST)
    assert r.attraction_verdict == "repelling" and r.criterion_applicable


def test_nonlinear_sink():
    X = NumericVectorField(2, lambda p: -p - p ** 3 + np.array([-p[1], p[0]]), vectorized=True)
    r = verify_hypotheses(euclidean(2), X, ConjugacyConfig(box_R=2.0, grid_k=7, trials=8, T=30.0))
    assert r.attraction_verdict == "attracting" and r.criterion_applicable


def test_rotation_has_no_isolated_equilibrium():
    r = verify_hypotheses(euclidean(2), linear_field([[0, -1], [1, 0]]), FAST)
    assert r.structure_admissible and not r.unique_equilibrium_in_box
    assert not r.criterion_applicable and len(r.equilibria_found) > 1


def test_structures_rejected_with_rationale():
    r = verify_hypotheses(minkowski(3), rikitake(1, 0), FAST)
    assert not r.structure_admissible and not r.criterion_applicable
    assert "indefinite" in r.rationale[0] and "(2,1)" in r.rationale[0]
    assert verify_hypotheses(symplectic(2), SINK, FAST).rationale == [RATIONALE_SKEW]
    assert verify_hypotheses(custom([[1, 1], [0, 1]]), SINK, FAST).rationale == [RATIONALE_GENERAL]
    assert verify_hypotheses(custom(-np.eye(2)), SINK, FAST).rationale == [RATIONALE_NEGATIVE]


def test_parts_of_spiral():
    s = euclidean(2)
    for p in np.random.default_rng(0).uniform(-2, 2, (10, 2)):
        assert np.allclose(gradient_part(s, SPIRAL)(p), -p, atol=1e-12)
        assert np.allclose(rotational_part(s, SPIRAL)(p), [-p[1], p[0]], atol=1e-12)
        assert abs(p @ sphere_field(s, SPIRAL)(p)) <= 1e-12


def test_compare_pair_sink_and_spiral():
    rep = compare_pair(euclidean(2), SINK, euclidean(2), SPIRAL, FAST)
    assert rep.reduction_valid
    assert max(max(d) for d in rep.trace_norm_drift) <= 1e-6
    u1, u2 = rep.rotational_parts
    p = np.array([0.3, -0.8])
    assert np.allclose(u1(p), 0, atol=1e-12) and np.allclose(u2(p), [0.8, 0.3], atol=1e-12)
    d = rep.to_dict()
    assert d["sampled"] and d["reduction_valid"] and d["first"]["attraction_verdict"] == "attracting"


def test_compare_pair_mismatched_verdicts():
    rep = compare_pair(euclidean(2), SINK, euclidean(2), linear_field(np.eye(2)), FAST)
    assert not rep.reduction_valid
    assert rep.first.criterion_applicable and rep.second.criterion_applicable


def test_compare_pair_sink_and_rotation():
    rep = compare_pair(euclidean(2), SINK, euclidean(2), linear_field([[0, -1], [1, 0]]), FAST)
    assert not rep.reduction_valid and not rep.second.criterion_applicable


def test_minkowski_plane_rejected():
    r = verify_hypotheses(minkowski(2), linear_field([[-1, 1], [1, -1]]), FAST)
    assert not r.structure_admissible and "(1,1)" in r.rationale[0]


def test_compare_pair_rikitake_minkowski():
    rep = compare_pair(minkowski(3), rikitake(1, 0), minkowski(3), rikitake(2, 0), FAST)
    assert not rep.reduction_valid and rep.rotational_parts == ()
    assert not rep.first.structure_admissible and rep.first.rationale


def test_threads_do_not_change_results():
    a = verify_hypotheses(euclidean(2), SPIRAL, ConjugacyConfig(grid_k=5, trials=6, T=20.0, threads=1))
    b = verify_hypotheses(euclidean(2), SPIRAL, ConjugacyConfig(grid_k=5, trials=6, T=20.0, threads=3))
    assert a.to_dict() == b.to_dict()


def test_workers_env(monkeypatch):
    monkeypatch.setenv("GEODECOMP_THREADS", "4")
    assert ConjugacyConfig().workers() == 4
    assert ConjugacyConfig(threads=2).workers() == 2
    monkeypatch.delenv("GEODECOMP_THREADS")
    assert ConjugacyConfig().workers() == 1
