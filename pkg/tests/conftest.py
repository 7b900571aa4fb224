"""Shared random generators for exact and numeric tests."""
from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from geodecomp.geometry import custom
from geodecomp.poly import Poly, PolyVectorField
from geodecomp.errors import SingularGram


def rand_fraction(rng: random.Random, num: int = 5, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def rand_gram(rng: random.Random, n: int, kind: str = "general"):
    """Random invertible rational Gram matrix of the requested symmetry."""
    while True:
        m = [[rand_fraction(rng) for _ in range(n)] for _ in range(n)]
        if kind == "symmetric":
            m = [[m[i][j] + m[j][i] for j in range(n)] for i in range(n)]
        elif kind == "skew":
            m = [[m[i][j] - m[j][i] for j in range(n)] for i in range(n)]
        try:
            return custom(m)
        except SingularGram:
            continue


def rand_poly(rng: random.Random, n: int, deg: int, terms: int = 6, min_deg: int = 0) -> Poly:
    out = {}
    for _ in range(terms):
        d = rng.randint(min_deg, deg)
        e = [0] * n
        for _ in range(d):
            e[rng.randrange(n)] += 1
        out[tuple(e)] = rand_fraction(rng)
    return Poly(n, out)


def rand_field(rng: random.Random, n: int, deg: int) -> PolyVectorField:
    return PolyVectorField([rand_poly(rng, n, deg) for _ in range(n)])


def skew_rotation(rng, s, deg: int, side: str = "right") -> PolyVectorField:
    """u0 = M K(x) x with K skew: x^T G u0 = 0 for M = B (right), u0^T G x = 0 for M = B^T (left)."""
    n = s.dimension
    xs = Poly.variables(n)
    K = [[Poly.zero(n)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            k = rand_poly(rng, n, deg - 1, terms=3)
            K[i][j], K[j][i] = k, -k
    Kx = PolyVectorField([sum((K[i][j] * xs[j] for j in range(n)), Poly.zero(n)) for i in range(n)])
    return Kx.apply_matrix(s.b_matrix if side == "right" else s.b_star)


def symmetric_members(s, rng, count, side="left"):
    """Random float members of the left (right) b-symmetric matrix set."""
    n = s.dimension
    out = []
    for _ in range(count):
        M = rng.standard_normal((n, n))
        S = M + M.T
        # left: A = G^{-T} S ; right: A = G^{-1} S
        out.append(s.B_star @ S if side == "left" else s.B @ S)
    return out


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def nrng():
    return np.random.default_rng(20240611)
