"""Geometric structures on R^n: nondegenerate bilinear forms and their pairs.

A structure is stored through its Gram matrix ``G`` with ``b(x, y) = x^T G y``.
The companion ``B = G^{-1}`` satisfies ``<x, y> = b(x, B y)`` and its adjoint
with respect to ``b`` is ``B_star = B^T``.

Two numeric modes are supported.  When every Gram entry is rational (int,
Fraction or a ``"p/q"`` string) the structure is *exact*: matrices are numpy
object arrays of :class:`fractions.Fraction` and all identities hold with
equality.  Otherwise matrices are float64 and checks use tolerances.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, OddSymplecticDimension, SingularGram

RCOND_MIN = 1e-12
EIG_DEGENERATE = 1e-10
FLOAT_TOL = 1e-10


class Kind(enum.Enum):
    EUCLIDEAN = "euclidean"
    SYMPLECTIC = "symplectic"
    MINKOWSKI = "minkowski"
    CUSTOM_SYMMETRIC = "custom_symmetric"
    CUSTOM_SKEW = "custom_skew"
    CUSTOM_GENERAL = "custom_general"


# ---------------------------------------------------------------------------
# exact matrix helpers
# ---------------------------------------------------------------------------

def to_fraction(value) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string into a Fraction.

    Floats are rejected: they would silently carry binary rounding into
    exact computations.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact rational: {value!r}")


def is_exact_entry(value) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, (int, Fraction, Rational)):
        return True
    if isinstance(value, str):
        try:
            Fraction(value.strip())
        except ValueError:
            return False
        return True
    return False


def exact_matrix(rows) -> np.ndarray:
    """Object array of Fractions from nested rationals."""
    arr = np.array(rows, dtype=object)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {arr.shape}")
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = to_fraction(v)
    return out


def exact_identity(n: int) -> np.ndarray:
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = Fraction(int(i == j))
    return out


def exact_inverse(m: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse over the rationals.  Raises SingularGram."""
    n = m.shape[0]
    aug = [list(m[i]) + list(exact_identity(n)[i]) for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularGram("Gram matrix is singular (exact determinant 0)")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return np.array([row[n:] for row in aug], dtype=object)


def max_abs(m: np.ndarray) -> float:
    """Max-abs entry as a float; exact zero stays 0.0."""
    if m.size == 0:
        return 0.0
    return float(max(abs(v) for v in m.flat))


def _is_exact_array(m: np.ndarray) -> bool:
    return m.dtype == object


def as_matrix(a, n: int | None = None, exact: bool = False) -> np.ndarray:
    """Coerce ``a`` to an n-by-n matrix, exact if requested and possible."""
    if isinstance(a, np.ndarray) and a.dtype == object:
        m = a
    elif exact and all(is_exact_entry(v) for v in np.asarray(a, dtype=object).flat):
        m = exact_matrix(a)
    else:
        m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise DimensionMismatch(f"expected {n}x{n}, got {m.shape[0]}x{m.shape[1]}")
    return m


def canonical_symplectic(n: int) -> list[list[int]]:
    """J_n = [[0, I_m], [-I_m, 0]] for n = 2m."""
    if n <= 0 or n % 2:
        raise OddSymplecticDimension(f"symplectic structures need even n, got {n}")
    m = n // 2
    J = [[0] * n for _ in range(n)]
    for i in range(m):
        J[i][m + i] = 1
        J[m + i][i] = -1
    return J


def canonical_minkowski(n: int, q: int = 1) -> list[list[int]]:
    """diag(1, ..., 1, -1, ..., -1) with q trailing minus signs."""
    if n <= 0 or not 1 <= q <= n:
        raise DimensionMismatch(f"invalid Minkowski signature for n={n}, q={q}")
    return [[(1 if i < n - q else -1) if i == j else 0 for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# structures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BilinearDecomposition:
    symmetric_part: np.ndarray
    skew_part: np.ndarray

    def skew_pairing(self, x, y):
        """A_b(x, y) = (b(x, y) - b(y, x)) / 2."""
        return np.asarray(x) @ self.skew_part @ np.asarray(y)


@dataclass(frozen=True, eq=False)
class GeometricStructure:
    """A nondegenerate bilinear form b(x, y) = x^T G y with its pair (b, B).

    Use the factories :func:`euclidean`, :func:`symplectic`,
    :func:`minkowski`, :func:`custom` or :func:`make_structure` rather than
    calling the constructor directly.
    """

    dimension: int
    gram: np.ndarray
    b_matrix: np.ndarray
    b_star: np.ndarray
    kind: Kind
    signature: tuple[int, int] | None = None
    exact: bool = False
    _float_cache: dict = field(default_factory=dict, repr=False, compare=False)

    # float views, used by the numeric modules regardless of mode
    @property
    def G(self) -> np.ndarray:
        return self._as_float("G", self.gram)

    @property
    def B(self) -> np.ndarray:
        return self._as_float("B", self.b_matrix)

    @property
    def B_star(self) -> np.ndarray:
        return self._as_float("B_star", self.b_star)

    def _as_float(self, key, m):
        if key not in self._float_cache:
            self._float_cache[key] = np.array(m, dtype=float)
        return self._float_cache[key]

    @property
    def is_symmetric(self) -> bool:
        return _is_symmetric(self.gram)

    @property
    def is_skew(self) -> bool:
        return _is_skew(self.gram)

    @property
    def is_positive_definite(self) -> bool:
        return self.signature is not None and self.signature[1] == 0

    def bilinear_parts(self) -> BilinearDecomposition:
        g = self.gram
        half = Fraction(1, 2) if self.exact else 0.5
        return BilinearDecomposition((g + g.T) * half, (g - g.T) * half)

    def describe(self) -> str:
        if self.kind is Kind.MINKOWSKI:
            p, q = self.signature
            return f"minkowski({p},{q})"
        return self.kind.value

    def __repr__(self) -> str:
        return f"GeometricStructure(n={self.dimension}, kind={self.describe()}, exact={self.exact})"


def _is_symmetric(g: np.ndarray) -> bool:
    if _is_exact_array(g):
        return bool(np.all(g == g.T))
    return bool(np.allclose(g, g.T, rtol=0.0, atol=FLOAT_TOL * max(1.0, np.abs(g).max())))


def _is_skew(g: np.ndarray) -> bool:
    if _is_exact_array(g):
        return bool(np.all(g == -g.T))
    return bool(np.allclose(g, -g.T, rtol=0.0, atol=FLOAT_TOL * max(1.0, np.abs(g).max())))


def _signature(g: np.ndarray) -> tuple[int, int]:
    eig = np.linalg.eigvalsh(np.array(g, dtype=float))
    if np.any(np.abs(eig) < EIG_DEGENERATE):
        raise SingularGram(f"symmetric Gram matrix has a near-zero eigenvalue: {eig}")
    return int(np.sum(eig > 0)), int(np.sum(eig < 0))


def custom(gram, exact: bool | None = None) -> GeometricStructure:
    """Build a structure from an arbitrary Gram matrix and classify it.

    ``exact=None`` chooses rational mode whenever all entries are rational.
    """
    raw = np.asarray(gram, dtype=object)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1] or raw.shape[0] == 0:
        raise DimensionMismatch(f"Gram matrix must be square and nonempty, got shape {raw.shape}")
    n = raw.shape[0]
    if exact is None:
        exact = all(is_exact_entry(v) for v in raw.flat)
    if exact:
        g = exact_matrix(gram)
        b = exact_inverse(g)
    else:
        g = np.array(raw, dtype=float)
        if not np.all(np.isfinite(g)):
            raise SingularGram("Gram matrix has non-finite entries")
        cond = np.linalg.cond(g)
        if not np.isfinite(cond) or 1.0 / cond < RCOND_MIN:
            raise SingularGram(f"Gram matrix is numerically singular (cond={cond:.3g})")
        b = np.linalg.inv(g)

    signature = None
    if _is_symmetric(g):
        signature = _signature(g)
        p, q = signature
        if _equal(g, np.eye(n, dtype=int)):
            kind = Kind.EUCLIDEAN
        elif p >= 1 and q >= 1:
            kind = Kind.MINKOWSKI
        else:
            kind = Kind.CUSTOM_SYMMETRIC
    elif _is_skew(g):
        if n % 2:
            raise SingularGram("skew-symmetric Gram matrix in odd dimension is singular")
        kind = Kind.SYMPLECTIC if _equal(g, np.array(canonical_symplectic(n))) else Kind.CUSTOM_SKEW
    else:
        kind = Kind.CUSTOM_GENERAL
    return GeometricStructure(n, g, b, b.T.copy(), kind, signature, exact)


def _equal(g: np.ndarray, ref: np.ndarray) -> bool:
    if _is_exact_array(g):
        return bool(np.all(g == ref))
    return bool(np.allclose(g, ref, rtol=0.0, atol=FLOAT_TOL))


def euclidean(n: int) -> GeometricStructure:
    if n <= 0:
        raise DimensionMismatch("dimension must be positive")
    return custom([[int(i == j) for j in range(n)] for i in range(n)])


def symplectic(n: int) -> GeometricStructure:
    return custom(canonical_symplectic(n))


def minkowski(n: int, q: int = 1) -> GeometricStructure:
    """Canonical Minkowski structure with signature (n - q, q); default (n-1, 1)."""
    return custom(canonical_minkowski(n, q))


def make_structure(kind: str, n: int | None = None, gram=None) -> GeometricStructure:
    """Dispatch on a descriptor: euclidean/symplectic/minkowski need ``n``,
    custom needs ``gram``.  A ``gram`` given alongside ``n`` must agree with it."""
    kind = kind.lower()
    if kind == "custom":
        if gram is None:
            raise DimensionMismatch("custom structure requires a Gram matrix")
        s = custom(gram)
        if n is not None and s.dimension != n:
            raise DimensionMismatch(f"Gram matrix is {s.dimension}x{s.dimension}, dimension is {n}")
        return s
    if n is None:
        raise DimensionMismatch(f"{kind} structure requires a dimension")
    factories = {"euclidean": euclidean, "symplectic": symplectic, "minkowski": minkowski}
    if kind not in factories:
        raise ValueError(f"unknown structure kind {kind!r}")
    return factories[kind](n)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def _vector(s: GeometricStructure, x) -> np.ndarray:
    raw = np.asarray(x, dtype=object)
    if raw.shape != (s.dimension,):
        raise DimensionMismatch(f"expected a vector of length {s.dimension}, got shape {raw.shape}")
    if s.exact and all(is_exact_entry(c) for c in raw):
        return np.array([to_fraction(c) for c in raw], dtype=object)
    return raw.astype(float)


def eval_b(s: GeometricStructure, x, y):
    """b(x, y) = x^T G y (exact when the structure and both vectors are rational)."""
    xv, yv = _vector(s, x), _vector(s, y)
    if xv.dtype == object and yv.dtype == object:
        return xv @ s.gram @ yv
    return float(np.asarray(xv, float) @ s.G @ np.asarray(yv, float))


def is_b_normal(s: GeometricStructure, tol: float = FLOAT_TOL) -> bool:
    """B B* == B* B, equivalently (B*)* == B."""
    b, bs = s.b_matrix, s.b_star
    res = max_abs(b @ bs - bs @ b)
    return res == 0 if s.exact else res <= tol


def _operator(s: GeometricStructure, A) -> np.ndarray:
    return as_matrix(A, s.dimension, exact=s.exact)


def _membership(s: GeometricStructure, lhs: np.ndarray, rhs: np.ndarray, tol: float):
    res = max_abs(lhs - rhs)
    exact = lhs.dtype == object and rhs.dtype == object
    return (res == 0 if exact else res <= tol), res


def is_left_bB_symmetric(s: GeometricStructure, A, tol: float = FLOAT_TOL) -> tuple[bool, float]:
    """Test A^T G == G^T A.  Returns (verdict, max-abs residual)."""
    a = _operator(s, A)
    g = s.gram if a.dtype == object else s.G
    return _membership(s, a.T @ g, g.T @ a, tol)


def is_right_bB_symmetric(s: GeometricStructure, A, tol: float = FLOAT_TOL) -> tuple[bool, float]:
    """Test A^T G^T == G A.  Returns (verdict, max-abs residual)."""
    a = _operator(s, A)
    g = s.gram if a.dtype == object else s.G
    return _membership(s, a.T @ g.T, g @ a, tol)


def commutator(A, A2) -> np.ndarray:
    a, a2 = np.asarray(A), np.asarray(A2)
    if a.shape != a2.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"commutator needs equal square shapes, got {a.shape} and {a2.shape}")
    return a @ a2 - a2 @ a


def _pair(s: GeometricStructure, A, A2):
    a, a2 = _operator(s, A), _operator(s, A2)
    exact = a.dtype == object and a2.dtype == object
    if not exact:
        a, a2 = np.asarray(a, float), np.asarray(a2, float)
    return a, a2, exact


def bracket_left(s: GeometricStructure, A, A2) -> np.ndarray:
    """A B (B*)^{-1} A' - A' B (B*)^{-1} A, with (B*)^{-1} = G^T."""
    a, a2, exact = _pair(s, A, A2)
    m = s.b_matrix @ s.gram.T if exact else s.B @ s.G.T
    return a @ m @ a2 - a2 @ m @ a


def bracket_right(s: GeometricStructure, A, A2) -> np.ndarray:
    """A B* B^{-1} A' - A' B* B^{-1} A, with B^{-1} = G."""
    a, a2, exact = _pair(s, A, A2)
    m = s.b_star @ s.gram if exact else s.B_star @ s.G
    return a @ m @ a2 - a2 @ m @ a
