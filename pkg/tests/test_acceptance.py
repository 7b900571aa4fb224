"""Acceptance criteria, one test each, at the contract tolerances.

Every test prints a single ``criterion N ... PASS|FAIL`` line (visible with
``pytest -s`` or ``python3 tests/test_acceptance.py``) and then asserts.
"""
import random
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from geodecomp.conjugacy import RATIONALE_SKEW, ConjugacyConfig, verify_hypotheses
from geodecomp.decomp import decompose_at
from geodecomp.fields import from_poly, linear_field, lotka_volterra, rikitake
from geodecomp.flow import IntegratorConfig, first_integral_drift, norm2, quadratic_form
from geodecomp.geometry import (bracket_left, bracket_right, commutator, custom, euclidean, is_left_bB_symmetric,
                                minkowski, symplectic)
from geodecomp.poincare import check_gradient_like, reconstruct_potential
from geodecomp.poly import parse_poly
from geodecomp.polyfield import (decompose_exact, hstar_minus_h, linear_poly, lotka_volterra_poly,
                                 orthogonality_left, orthogonality_right, poly_gradient_like, rikitake_poly)
from geodecomp.quadrature import QuadratureConfig

from conftest import rand_field, rand_fraction, rand_gram, rand_poly, skew_rotation, symmetric_members
from golden import lv_cases, rik_cases
from transcendental import FIELDS

FLOW_CFG = IntegratorConfig(T=10.0, rtol=1e-10, atol=1e-12)


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number:2d} {title}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, f"criterion {number} failed: {detail}"
    return emit


def test_criterion_01_golden_closed_forms(report):
    rng = random.Random(101)
    worst, count, mismatches = 0.0, 0, []
    for _ in range(24):
        lv = [rand_fraction(rng, 9, 7) for _ in range(4)]
        rk = [abs(rand_fraction(rng, 9, 7)) for _ in range(2)]
        for case in lv_cases(*lv) + rik_cases(*rk):
            t0 = time.perf_counter()
            d = decompose_exact(case.structure, case.X, case.side)
            worst = max(worst, time.perf_counter() - t0)
            count += 1
            if d.H.to_text() != case.H.to_text() or d.u.to_text() != [c.to_text() for c in case.u]:
                mismatches.append((case.name, lv, rk))
    ok = not mismatches and worst < 1.0
    report(1, "golden exact decompositions", ok,
           f"{count} decompositions over 24 parameter sets, {len(mismatches)} mismatches, slowest {worst:.3f} s")


def test_criterion_02_rikitake_a_zero_gradient(report):
    rng = random.Random(102)
    s = minkowski(3)
    bad = []
    for _ in range(10):
        mu = abs(rand_fraction(rng, 20, 7))
        X = rikitake_poly(mu, 0)
        r = check_gradient_like(s, X, "right")
        if not (decompose_exact(s, X).u.is_zero() and r.verdict and r.max_residual == 0):
            bad.append(mu)
    report(2, "Rikitake a=0 is a Minkowski gradient system", not bad, f"10 values of mu, failures {bad}")


def test_criterion_03_uniqueness_round_trip(report):
    rng = random.Random(103)
    t0 = time.perf_counter()
    failures = 0
    for _ in range(100):
        n = rng.randint(1, 5)
        s = rand_gram(rng, n)
        side = rng.choice(["right", "left"])
        H0 = rand_poly(rng, n, 4, min_deg=1)
        u0 = skew_rotation(rng, s, 4, side)
        assert orthogonal(s, u0, side)
        d = decompose_exact(s, poly_gradient_like(s, H0, side) + u0, side)
        failures += not (d.H == H0 and d.u == u0)
    elapsed = time.perf_counter() - t0
    report(3, "uniqueness round trip", failures == 0 and elapsed < 30,
           f"100 instances, {failures} failures, {elapsed:.1f} s")


def orthogonal(s, u, side):
    return (orthogonality_right(s, u) if side == "right" else orthogonality_left(s, u)).is_zero()


def test_criterion_04_exact_numeric_agreement(report):
    rng = random.Random(104)
    nrng = np.random.default_rng(104)
    q = QuadratureConfig.gauss_legendre(32)
    lv = [abs(rand_fraction(rng, 9, 4)) for _ in range(4)]
    rk = [abs(rand_fraction(rng, 9, 4)) for _ in range(2)]
    A = [[rand_fraction(rng) for _ in range(3)] for _ in range(3)]
    cases = [("lotka_volterra", lotka_volterra_poly(*lv), lotka_volterra(*map(float, lv))),
             ("rikitake", rikitake_poly(*rk), rikitake(*map(float, rk))),
             ("linear", linear_poly(A), linear_field([[float(v) for v in r] for r in A]))]
    t0 = time.perf_counter()
    err_H = err_u = 0.0
    for name, Xp, Xn in cases:
        n = Xp.dimension
        structures = [euclidean(n), rand_gram(rng, n), minkowski(n)] + ([symplectic(n)] if n % 2 == 0 else [])
        for s in structures:
            exact = {side: decompose_exact(s, Xp, side) for side in ("right", "left")}
            for x in nrng.uniform(-2, 2, (50, n)):
                d = decompose_at(s, Xn, x, q)
                xf = [Fraction(v) for v in x]
                for side, H, u in (("right", d.H, d.u), ("left", d.H_star, d.u_star)):
                    e = exact[side]
                    err_H = max(err_H, abs(H - float(e.H.eval(xf))))
                    err_u = max(err_u, float(np.max(np.abs(u - [float(c) for c in e.u.eval(xf)]))))
    elapsed = time.perf_counter() - t0
    ok = err_H <= 1e-10 and err_u <= 1e-9 and elapsed < 10
    report(4, "exact and numeric decompositions agree", ok,
           f"max |dH| {err_H:.1e}, max |du| {err_u:.1e}, {elapsed:.1f} s")


def test_criterion_05_orthogonality_transcendental(report):
    nrng = np.random.default_rng(105)
    q = QuadratureConfig.adaptive_simpson(1e-12)
    worst = 0.0
    grams = []
    while len(grams) < 5:
        G = nrng.standard_normal((3, 3)) + 1.5 * np.eye(3)
        if np.max(np.abs(G - G.T)) > 0.1 and np.linalg.cond(G) < 50:
            grams.append(custom(G))
    for s in grams:
        for f in FIELDS:
            for x in nrng.uniform(-2, 2, (100, 3)):
                d = decompose_at(s, f, x, q)
                worst = max(worst, d.orthogonality_residual, d.orthogonality_residual_star)
    report(5, "orthogonality for transcendental fields", worst <= 1e-9,
           f"5 fields x 5 general G x 100 points, max residual {worst:.1e}")


def test_criterion_06_hstar_minus_h(report):
    rng = random.Random(106)
    sym_ok = skew_ok = True
    for _ in range(20):
        n = rng.choice([2, 4])
        X = rand_field(rng, n, 3)
        sym_ok &= hstar_minus_h(rand_gram(rng, n, "symmetric"), X).is_zero()
        k = rand_gram(rng, n, "skew")
        skew_ok &= decompose_exact(k, X, "left").H == -decompose_exact(k, X, "right").H
    nrng = np.random.default_rng(106)
    q = QuadratureConfig.adaptive_simpson(1e-12)
    worst = 0.0
    for f in FIELDS:
        s = custom(nrng.standard_normal((3, 3)) + 1.5 * np.eye(3))
        A = (s.G - s.G.T) / 2
        for x in nrng.uniform(-1.5, 1.5, (5, 3)):
            d = decompose_at(s, f, x, q)
            ref = 2 * quad(lambda t: f(t * x) @ A @ x, 0, 1, epsabs=1e-13)[0]
            worst = max(worst, abs(d.H_star - d.H - ref))
    ok = sym_ok and skew_ok and worst <= 1e-9
    report(6, "H* - H relation", ok,
           f"symmetric exact zero {sym_ok}, skew H* = -H {skew_ok}, general residual {worst:.1e}")


def test_criterion_07_poincare_suite(report):
    rng = random.Random(107)
    complete = sound = 0
    sound_cases = 0
    for _ in range(100):
        n = rng.randint(1, 5)
        s = rand_gram(rng, n)
        side = rng.choice(["right", "left"])
        complete += check_gradient_like(s, poly_gradient_like(s, rand_poly(rng, n, 4, min_deg=1), side), side).verdict
        X = rand_field(rng, n, 3) if rng.random() < 0.5 else poly_gradient_like(s, rand_poly(rng, n, 3), side)
        if check_gradient_like(s, X, side).verdict:
            sound_cases += 1
            sound += (X - poly_gradient_like(s, reconstruct_potential(s, X, side), side)).is_zero()
    s4 = symplectic(4)
    ham = all(reconstruct_potential(s4, poly_gradient_like(s4, H0, "left"), "skew_unified") == H0
              for H0 in (rand_poly(rng, 4, 4, min_deg=1) for _ in range(10)))
    ok = complete == 100 and sound == sound_cases and sound_cases > 0 and ham
    report(7, "Poincare lemma suite", ok,
           f"completeness {complete}/100, soundness {sound}/{sound_cases}, symplectic(4) round trip {ham}")


def test_criterion_08_conservation_flows(report):
    rng = random.Random(108)
    t0 = time.perf_counter()
    drifts = {}
    # N along B^{-1} u: Rikitake/Minkowski and random symmetric structures
    systems = [(minkowski(3), rikitake_poly(1, Fraction(1, 2)))]
    systems += [(rand_gram(rng, 3, "symmetric"), rand_field(rng, 3, 2)) for _ in range(3)]
    for i, (s, X) in enumerate(systems):
        u = decompose_exact(s, X).u
        drifts[f"N#{i}"] = first_integral_drift(from_poly(u.apply_matrix(s.gram)), norm2, [0.6, -0.4, 0.8], FLOW_CFG)
    # F_b along u: level sets of a definite form are compact, so u is complete
    nrng = np.random.default_rng(108)
    for i in range(3):
        M = nrng.standard_normal((3, 3))
        s = custom([[Fraction(v).limit_denominator(100) for v in r] for r in (M @ M.T + np.eye(3))])
        u = decompose_exact(s, rand_field(rng, 3, 2)).u
        drifts[f"Fb#{i}"] = first_integral_drift(from_poly(u), quadratic_form(s.G), [0.5, 0.3, -0.2], FLOW_CFG)
    s = minkowski(3)
    drifts["Fb#rikitake"] = first_integral_drift(from_poly(decompose_exact(s, rikitake_poly(2, 3)).u),
                                                 quadratic_form(s.G), [1.0, 2.0, 3.0], FLOW_CFG)
    # H* along its Hamiltonian field: Lotka-Volterra under symplectic(2) and a coercive symplectic(4) system
    s2 = symplectic(2)
    Hs = decompose_exact(s2, lotka_volterra_poly(2, 1, 1, 3), "left").H
    ham_systems = [(s2, Hs, [0.5, 1 / 3]),
                   (symplectic(4), parse_poly("x1^2/2 + x2^2 + x3^2 + x4^2/2 + x1^4 + x2*x3*x4", 4),
                    [0.3, -0.2, 0.4, 0.1])]
    for i, (s, H, x0) in enumerate(ham_systems):
        Hc = H.compile()
        drifts[f"H*#{i}"] = first_integral_drift(from_poly(poly_gradient_like(s, H, "left")),
                                                 lambda p, Hc=Hc: float(Hc(p)), x0, FLOW_CFG)
    elapsed = time.perf_counter() - t0
    worst = max(drifts.values())
    report(8, "conservation along flows", worst <= 1e-6 and elapsed < 20,
           f"{len(drifts)} flows, max drift {worst:.1e}, {elapsed:.1f} s")


def test_criterion_09_bracket_identities(report):
    nrng = np.random.default_rng(109)
    worst = {}

    def track(key, value):
        worst[key] = max(worst.get(key, 0.0), float(np.max(np.abs(value))))

    for _ in range(50):
        A, A2 = nrng.standard_normal((2, 3, 3))
        M = nrng.standard_normal((3, 3))
        sym = custom(M + M.T + 0.5 * np.eye(3))
        track("symmetric collapse", bracket_left(sym, A, A2) - commutator(A, A2))
        track("symmetric collapse", bracket_right(sym, A, A2) - commutator(A, A2))
        K = nrng.standard_normal((4, 4))
        skew = custom(K - K.T)
        B, B2 = nrng.standard_normal((2, 4, 4))
        track("skew collapse", bracket_left(skew, B, B2) + commutator(B, B2))
        track("skew collapse", bracket_right(skew, B, B2) + commutator(B, B2))
        S, S2 = symmetric_members(skew, nrng, 2, "left")
        C = commutator(S, S2)
        track("skew closure", C.T @ skew.G + skew.G @ C)
        assert is_left_bB_symmetric(skew, C, tol=1e-9)[0]
        s = custom(nrng.standard_normal((3, 3)) + 3 * np.eye(3))
        L, L2 = symmetric_members(s, nrng, 2, "left")
        track("left matrix identity", bracket_left(s, L, L2).T @ s.G + s.G.T @ commutator(L, L2))
        R, R2 = symmetric_members(s, nrng, 2, "right")
        track("right matrix identity", -commutator(R, R2).T @ s.G.T - s.G @ bracket_right(s, R, R2))
    ok = max(worst.values()) <= 1e-10
    report(9, "bracket and symmetry-set identities", ok,
           "50 pairs per case, " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_criterion_10_conjugacy_hypotheses(report):
    cfg = ConjugacyConfig(grid_k=7, trials=8, T=40.0)
    sink = verify_hypotheses(euclidean(2), linear_field(-np.eye(2)), cfg)
    sink_ok = (sink.attraction_verdict == "attracting" and sink.unique_equilibrium_in_box
               and sink.criterion_applicable)
    rot = verify_hypotheses(euclidean(2), linear_field([[0, -1], [1, 0]]), cfg)
    rot_ok = not rot.criterion_applicable
    mink = verify_hypotheses(minkowski(3), rikitake(1, 0), cfg)
    mink_ok = (not mink.structure_admissible and not mink.criterion_applicable
               and any("indefinite" in r and "diffeomorphically" in r for r in mink.rationale))
    skew = verify_hypotheses(symplectic(2), linear_field(-np.eye(2)), cfg)
    skew_ok = skew.rationale == [RATIONALE_SKEW] and not skew.criterion_applicable
    ok = sink_ok and rot_ok and mink_ok and skew_ok
    report(10, "conjugacy hypothesis checker", ok,
           f"-x applicable {sink_ok}, rotation rejected {rot_ok}, Minkowski rejected with rationale {mink_ok}, "
           f"symplectic rejected with rationale {skew_ok}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
