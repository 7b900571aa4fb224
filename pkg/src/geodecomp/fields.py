"""Numeric C^1 vector fields on R^n.

A :class:`NumericVectorField` wraps an evaluator and, optionally, an analytic
Jacobian.  Evaluators marked ``vectorized`` accept an array of shape
``(n, m)`` (m points as columns) and return ``(n, m)``; the Jacobian then
returns ``(n, n, m)``.  Scalar evaluators are looped over transparently.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch, NonFiniteValue
from .poly import PolyVectorField


def default_step(x: np.ndarray) -> np.ndarray:
    return 1e-6 * np.maximum(1.0, np.abs(x))


# overflow is reported as NonFiniteValue by the finiteness checks, not as a warning
def _quiet():
    return np.errstate(over="ignore", invalid="ignore")


@dataclass(frozen=True)
class NumericVectorField:
    dimension: int
    eval: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    label: str = ""
    vectorized: bool = False

    def __call__(self, x) -> np.ndarray:
        x = self._point(x)
        with _quiet():
            out = np.asarray(self.eval(x[:, None] if self.vectorized else x), dtype=float).reshape(-1)
        if out.shape != (self.dimension,):
            raise DimensionMismatch(f"{self.label or 'field'} returned shape {out.shape}, expected ({self.dimension},)")
        if not np.all(np.isfinite(out)):
            raise NonFiniteValue(f"{self.label or 'field'} is not finite at {x}")
        return out

    def _point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise DimensionMismatch(f"expected a point of length {self.dimension}, got shape {x.shape}")
        return x

    def eval_many(self, pts) -> np.ndarray:
        """Evaluate at the rows of ``pts`` (m, n); returns (m, n)."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise DimensionMismatch(f"expected points of shape (m, {self.dimension}), got {pts.shape}")
        with _quiet():
            if self.vectorized:
                out = np.asarray(self.eval(pts.T), dtype=float).T
            else:
                out = np.array([np.asarray(self.eval(p), dtype=float) for p in pts])
        if out.shape != pts.shape:
            raise DimensionMismatch(f"{self.label or 'field'} returned shape {out.shape}, expected {pts.shape}")
        if not np.all(np.isfinite(out)):
            raise NonFiniteValue(f"{self.label or 'field'} produced non-finite values")
        return out

    def jacobian_at(self, x) -> np.ndarray:
        """DX(x): analytic if available, else central differences."""
        x = self._point(x)
        if self.jacobian is None:
            return fd_jacobian(self, x)
        with _quiet():
            J = np.asarray(self.jacobian(x[:, None] if self.vectorized else x), dtype=float)
        J = J.reshape(self.dimension, self.dimension)
        if not np.all(np.isfinite(J)):
            raise NonFiniteValue(f"Jacobian of {self.label or 'field'} is not finite at {x}")
        return J

    def jacobian_many(self, pts) -> np.ndarray:
        """Jacobians at the rows of ``pts``; returns (m, n, n)."""
        pts = np.asarray(pts, dtype=float)
        if self.jacobian is not None and self.vectorized:
            with _quiet():
                J = np.moveaxis(np.asarray(self.jacobian(pts.T), dtype=float), -1, 0)
            if not np.all(np.isfinite(J)):
                raise NonFiniteValue(f"Jacobian of {self.label or 'field'} produced non-finite values")
            return J
        if self.jacobian is None and self.vectorized:
            return _fd_jacobian_batch(self, pts)
        return np.array([self.jacobian_at(p) for p in pts])

    def with_label(self, label: str) -> "NumericVectorField":
        return NumericVectorField(self.dimension, self.eval, self.jacobian, label, self.vectorized)


def fd_jacobian(f: NumericVectorField, x, h=None) -> np.ndarray:
    """Central-difference Jacobian; column i is (X(x + h e_i) - X(x - h e_i)) / 2h.

    ``h`` may be a scalar or a per-coordinate array; the default is
    ``1e-6 * max(1, |x_i|)``.
    """
    x = np.asarray(x, dtype=float)
    n = f.dimension
    if x.shape != (n,):
        raise DimensionMismatch(f"expected a point of length {n}, got shape {x.shape}")
    steps = default_step(x) if h is None else np.broadcast_to(np.asarray(h, dtype=float), (n,))
    if np.any(steps <= 0):
        raise ValueError("finite-difference step must be positive")
    E = np.diag(steps)
    pts = np.concatenate([x + E, x - E])
    vals = f.eval_many(pts)
    return ((vals[:n] - vals[n:]) / (2 * steps[:, None])).T


def _fd_jacobian_batch(f: NumericVectorField, pts: np.ndarray) -> np.ndarray:
    m, n = pts.shape
    steps = default_step(pts)  # (m, n)
    shifts = steps[:, :, None] * np.eye(n)[None]  # (m, i, n)
    plus = (pts[:, None, :] + shifts).reshape(-1, n)
    minus = (pts[:, None, :] - shifts).reshape(-1, n)
    vals = f.eval_many(np.concatenate([plus, minus]))
    vp, vm = vals[: m * n].reshape(m, n, n), vals[m * n:].reshape(m, n, n)
    # vp[k, i, :] = X(x_k + h e_i); Jacobian column i
    return np.transpose((vp - vm) / (2 * steps[:, :, None]), (0, 2, 1))


# ---------------------------------------------------------------------------
# built-in systems
# ---------------------------------------------------------------------------

def lotka_volterra(alpha, beta, gamma, delta) -> NumericVectorField:
    """Predator-prey field (alpha x - beta x y, delta x y - gamma y)."""
    a, b, g, d = (float(v) for v in (alpha, beta, gamma, delta))

    def f(p):
        x, y = p[0], p[1]
        return np.array([a * x - b * x * y, d * x * y - g * y])

    def jac(p):
        x, y = p[0], p[1]
        return np.array([[a - b * y, -b * x], [d * y, d * x - g]])

    return NumericVectorField(2, f, jac, f"lotka_volterra({alpha},{beta},{gamma},{delta})", vectorized=True)


def rikitake(mu, a) -> NumericVectorField:
    """Two-disk dynamo field (-mu x + y z, -mu y + x (z - a), 1 - x y)."""
    m, a_ = float(mu), float(a)

    def f(p):
        x, y, z = p[0], p[1], p[2]
        return np.array([-m * x + y * z, -m * y + x * (z - a_), 1.0 - x * y])

    def jac(p):
        x, y, z = p[0], p[1], p[2]
        zero = np.zeros_like(x)
        return np.array([
            [-m + zero, z, y],
            [z - a_, -m + zero, x],
            [-y, -x, zero],
        ])

    return NumericVectorField(3, f, jac, f"rikitake({mu},{a})", vectorized=True)


def linear_field(A) -> NumericVectorField:
    """X(x) = A x."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"linear field needs a square matrix, got shape {A.shape}")
    n = A.shape[0]

    def f(p):
        return A @ p

    def jac(p):
        p = np.asarray(p)
        return np.broadcast_to(A[..., None], (n, n) + p.shape[1:]) if p.ndim > 1 else A

    return NumericVectorField(n, f, jac, "linear", vectorized=True)


def from_poly(X: PolyVectorField, label: str = "polynomial") -> NumericVectorField:
    """Float evaluator and Jacobian compiled from an exact polynomial field."""
    n = X.dimension
    comps = [c.compile() for c in X]
    jac = [[X[i].partial(j).compile() for j in range(n)] for i in range(n)]

    def f(p):
        return np.array([c(p) for c in comps])

    def J(p):
        return np.array([[jac[i][j](p) for j in range(n)] for i in range(n)])

    return NumericVectorField(n, f, J, label, vectorized=True)
