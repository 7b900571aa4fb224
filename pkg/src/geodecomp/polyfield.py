"""Exact decompositions of polynomial vector fields.

Everything here runs over the rationals: for a polynomial field ``X`` and a
structure with rational Gram matrix the potential ``H`` and the remainder
``u`` come out as exact polynomials, so identities such as
``x^T G u(x) == 0`` are checked as equalities of polynomials.

Side conventions (``G`` is the Gram matrix, ``B = G^{-1}``):

* right: ``sigma = x^T G X(x)``, ``X = B grad H + u`` with ``b(x, u) = 0``;
* left: ``sigma* = X(x)^T G x``, ``X = B^T grad H* + u*`` with ``b(u*, x) = 0``.

For a skew-symmetric form the left potential is the Hamiltonian: with the
canonical ``J`` as Gram matrix, ``B^T grad H* = J grad H*``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .errors import DimensionMismatch
from .geometry import GeometricStructure, to_fraction
from .poly import Poly, PolyVectorField, ray_integral

Side = Literal["right", "left"]


def _require_exact(s: GeometricStructure, X: PolyVectorField | None = None):
    if not s.exact:
        raise TypeError("exact decomposition needs a rational Gram matrix")
    if X is not None and X.dimension != s.dimension:
        raise DimensionMismatch(f"field has dimension {X.dimension}, structure {s.dimension}")


def sigma_right(s: GeometricStructure, X: PolyVectorField) -> Poly:
    """b(x, X(x)) = x^T G X(x)."""
    _require_exact(s, X)
    return PolyVectorField.identity(s.dimension).pair(s.gram, X)


def sigma_left(s: GeometricStructure, X: PolyVectorField) -> Poly:
    """b(X(x), x) = X(x)^T G x."""
    _require_exact(s, X)
    return X.pair(s.gram, PolyVectorField.identity(s.dimension))


def poly_gradient_like(s: GeometricStructure, F: Poly, side: Side = "right") -> PolyVectorField:
    """B grad F (right) or B^T grad F (left)."""
    _require_exact(s)
    if F.nvars != s.dimension:
        raise DimensionMismatch(f"function has {F.nvars} variables, structure dimension {s.dimension}")
    m = s.b_matrix if side == "right" else s.b_star
    return F.gradient().apply_matrix(m)


@dataclass(frozen=True)
class ExactDecomposition:
    side: str
    H: Poly
    u: PolyVectorField

    def gradient_part(self, s: GeometricStructure) -> PolyVectorField:
        return poly_gradient_like(s, self.H, self.side)


def decompose_exact(s: GeometricStructure, X: PolyVectorField, side: Side = "right") -> ExactDecomposition:
    """Unique splitting X = gradient-like(H) + u with H(0) = 0.

    The orthogonality condition on ``u`` holds identically as polynomials.
    """
    if side not in ("right", "left"):
        raise ValueError(f"side must be 'right' or 'left', got {side!r}")
    sigma = sigma_right(s, X) if side == "right" else sigma_left(s, X)
    H = ray_integral(sigma)
    u = X - poly_gradient_like(s, H, side)
    return ExactDecomposition(side, H, u)


def skew_pairing(s: GeometricStructure, X: PolyVectorField) -> Poly:
    """A_b(X(x), x) where A_b is the skew part of b."""
    _require_exact(s, X)
    half = Fraction(1, 2)
    skew = (s.gram - s.gram.T) * half
    return X.pair(skew, PolyVectorField.identity(s.dimension))


def hstar_minus_h(s: GeometricStructure, X: PolyVectorField) -> Poly:
    """2 * int_0^1 A_b(X(t x), x) dt as an exact polynomial.

    ``A_b(X(tx), x) = A_b(X(tx), tx) / t`` so this is twice the ray integral
    of the skew pairing polynomial.
    """
    return ray_integral(skew_pairing(s, X)) * 2


def orthogonality_right(s: GeometricStructure, u: PolyVectorField) -> Poly:
    """x^T G u(x); zero polynomial for a right remainder."""
    return PolyVectorField.identity(s.dimension).pair(s.gram, u)


def orthogonality_left(s: GeometricStructure, u: PolyVectorField) -> Poly:
    """u(x)^T G x; zero polynomial for a left remainder."""
    return u.pair(s.gram, PolyVectorField.identity(s.dimension))


# ---------------------------------------------------------------------------
# named systems as exact polynomial fields
# ---------------------------------------------------------------------------

def lotka_volterra_poly(alpha, beta, gamma, delta) -> PolyVectorField:
    """(alpha x - beta x y, delta x y - gamma y)."""
    a, b, g, d = (to_fraction(v) for v in (alpha, beta, gamma, delta))
    x, y = Poly.variables(2)
    return PolyVectorField([a * x - b * x * y, d * x * y - g * y])


def rikitake_poly(mu, a) -> PolyVectorField:
    """(-mu x + y z, -mu y + x (z - a), 1 - x y)."""
    mu, a = to_fraction(mu), to_fraction(a)
    x, y, z = Poly.variables(3)
    return PolyVectorField([-mu * x + y * z, -mu * y + x * (z - a), 1 - x * y])


def linear_poly(A) -> PolyVectorField:
    """X(x) = A x with rational A."""
    rows = [[to_fraction(v) for v in row] for row in A]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("linear field needs a square matrix")
    xs = Poly.variables(n)
    return PolyVectorField([sum((xs[j] * rows[i][j] for j in range(n)), Poly.zero(n)) for i in range(n)])
