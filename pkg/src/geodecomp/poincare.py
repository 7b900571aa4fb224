"""Solvability of X = gradient-like(H) and recovery of the potential.

The test is a matrix identity on the Jacobian ``DX`` (``G`` the Gram matrix):

========================  =========================
side                      identity
========================  =========================
left                      DX^T G   == G^T DX
right                     DX^T G^T == G DX
symmetric_unified         DX^T G   == G DX      (G symmetric)
skew_unified              DX^T G + G DX == 0    (G skew)
========================  =========================

For exact polynomial fields the identity is checked as an identity of
polynomial matrices, which decides the question globally.  For numeric
fields it is checked at sample points: one bad point certifies failure,
passing all points is only statistical evidence.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence, Union

import numpy as np
from scipy.stats import qmc

from .decomp import eval_H
from .errors import DimensionMismatch
from .fields import NumericVectorField
from .geometry import GeometricStructure
from .poly import Poly, PolyVectorField, ray_integral
from .polyfield import sigma_left, sigma_right
from .quadrature import DEFAULT, QuadratureConfig

SideName = Literal["left", "right", "symmetric_unified", "skew_unified"]
NUMERIC_THRESHOLD = 1e-8
DEFAULT_SAMPLES = 64


@dataclass
class SolvabilityReport:
    side: str
    verdict: bool
    max_residual: float
    sample_points: list = field(default_factory=list)
    worst_point: list | None = None
    mode: str = "polynomial"
    threshold: float = 0.0

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "verdict": self.verdict,
            "max_residual": self.max_residual,
            "mode": self.mode,
            "threshold": self.threshold,
            "worst_point": self.worst_point,
            "sample_points": [list(map(float, p)) for p in self.sample_points],
        }


def _matrices(s: GeometricStructure, side: str, exact: bool):
    """Return (L, R, sign) so that the identity reads DX^T L == sign * R DX."""
    g = s.gram if exact else s.G
    if side == "left":
        return g, g.T, 1
    if side == "right":
        return g.T, g, 1
    if side == "symmetric_unified":
        if not s.is_symmetric:
            raise ValueError("symmetric_unified side needs a symmetric structure")
        return g, g, 1
    if side == "skew_unified":
        if not s.is_skew:
            raise ValueError("skew_unified side needs a skew-symmetric structure")
        return g, g, -1
    raise ValueError(f"unknown side {side!r}")


def _identity_residual(J, L, R, sign):
    return J.T @ L - sign * (R @ J)


def check_gradient_like(s: GeometricStructure, X: Union[PolyVectorField, NumericVectorField],
                        side: SideName = "right", samples: Union[int, Sequence, None] = None,
                        seed: int = 0, threshold: float = NUMERIC_THRESHOLD) -> SolvabilityReport:
    """Decide (polynomial) or sample-test (numeric) the solvability identity."""
    if X.dimension != s.dimension:
        raise DimensionMismatch(f"field dimension {X.dimension} != structure dimension {s.dimension}")
    if isinstance(X, PolyVectorField):
        if not s.exact:
            raise TypeError("polynomial mode needs a rational Gram matrix")
        return _check_poly(s, X, side)
    return _check_numeric(s, X, side, samples, seed, threshold)


def _check_poly(s: GeometricStructure, X: PolyVectorField, side: str) -> SolvabilityReport:
    L, R, sign = _matrices(s, side, exact=True)
    n = s.dimension
    J = np.empty((n, n), dtype=object)
    for i, row in enumerate(X.jacobian()):
        for j, p in enumerate(row):
            J[i, j] = p
    # object-array matmul with Poly entries and Fraction matrices
    D = _identity_residual(J, L, R, sign)
    worst = 0.0
    for p in D.flat:
        p = p if isinstance(p, Poly) else Poly.constant(n, p)
        worst = max(worst, max((float(abs(c)) for _, c in p.terms), default=0.0))
    return SolvabilityReport(side, worst == 0.0, worst, mode="polynomial", threshold=0.0)


def sample_points(n: int, count: int = DEFAULT_SAMPLES, seed: int = 0) -> np.ndarray:
    """Scrambled Halton points in [-1, 1]^n."""
    return 2.0 * qmc.Halton(d=n, scramble=True, seed=seed).random(count) - 1.0


def _check_numeric(s, X, side, samples, seed, threshold) -> SolvabilityReport:
    if samples is None:
        samples = DEFAULT_SAMPLES
    pts = sample_points(s.dimension, samples, seed) if isinstance(samples, int) else np.asarray(samples, float)
    if pts.ndim != 2 or len(pts) == 0 or pts.shape[1] != s.dimension:
        raise DimensionMismatch("numeric solvability check needs a nonempty (m, n) array of samples")
    L, R, sign = _matrices(s, side, exact=False)
    jacs = X.jacobian_many(pts)
    res = np.array([np.max(np.abs(_identity_residual(J, L, R, sign))) for J in jacs])
    k = int(np.argmax(res))
    worst = float(res[k])
    return SolvabilityReport(side, worst <= threshold, worst, list(pts), list(map(float, pts[k])),
                             mode="sampled", threshold=threshold)


def reconstruct_potential(s: GeometricStructure, X: Union[PolyVectorField, NumericVectorField],
                          side: SideName = "left", x=None, q: QuadratureConfig = DEFAULT):
    """Potential normalized by H(0) = 0.

    left (and both unified sides): int_0^1 b(X(tx), x) dt;
    right: int_0^1 b(x, X(tx)) dt.  Returns an exact Poly for polynomial
    fields, otherwise the value at ``x``.
    """
    use_right = side == "right"
    if side not in ("left", "right", "symmetric_unified", "skew_unified"):
        raise ValueError(f"unknown side {side!r}")
    if isinstance(X, PolyVectorField):
        sigma = sigma_right(s, X) if use_right else sigma_left(s, X)
        H = ray_integral(sigma)
        return H if x is None else H.eval(list(x))
    if x is None:
        raise ValueError("numeric reconstruction needs a point")
    return eval_H(s, X, x, q, side="right" if use_right else "left")
