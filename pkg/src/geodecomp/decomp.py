"""Pointwise numeric decomposition of black-box C^1 fields.

For a point ``x`` the potentials are ray integrals over ``t`` in [0, 1]::

    H(x)  = int x^T G X(t x) dt              (right)
    H*(x) = int X(t x)^T G x dt              (left)

and their gradients come from differentiating under the integral, which
needs the Jacobian ``DX``::

    grad H(x)  = int G   X(tx) + t DX(tx)^T G^T x dt
    grad H*(x) = int G^T X(tx) + t DX(tx)^T G   x dt

The remainders are ``u = X - B grad H`` and ``u* = X - B^T grad H*``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal, Union

import numpy as np

from .errors import DimensionMismatch
from .fields import NumericVectorField
from .geometry import GeometricStructure
from .poly import Poly
from .quadrature import DEFAULT, QuadratureConfig, integrate

Side = Literal["right", "left"]


def _point(s: GeometricStructure, X: NumericVectorField, x) -> np.ndarray:
    if X.dimension != s.dimension:
        raise DimensionMismatch(f"field dimension {X.dimension} != structure dimension {s.dimension}")
    x = np.asarray(x, dtype=float)
    if x.shape != (s.dimension,):
        raise DimensionMismatch(f"expected a point of length {s.dimension}, got shape {x.shape}")
    return x


def _ray_values(X: NumericVectorField, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    return X.eval_many(t[:, None] * x[None, :])


def eval_H(s: GeometricStructure, X: NumericVectorField, x, q: QuadratureConfig = DEFAULT,
           side: Side = "right") -> float:
    """Potential H (right) or H* (left) at ``x``; exactly 0 at the origin."""
    x = _point(s, X, x)
    if not np.any(x):
        return 0.0
    w = s.G.T @ x if side == "right" else s.G @ x  # x^T G X = (G^T x).X ; X^T G x = X.(G x)
    return float(integrate(lambda t: _ray_values(X, x, t) @ w, q)[0])


def _grad_integrand(s: GeometricStructure, X: NumericVectorField, x: np.ndarray):
    """Integrand rows [sigma/t, sigma*/t, grad H, grad H*] at ray nodes t."""
    G = s.G
    wr, wl = G.T @ x, G @ x

    def f(t):
        pts = t[:, None] * x[None, :]
        vals = X.eval_many(pts)
        jacs = X.jacobian_many(pts)  # (m, n, n), [k, i, j] = dX_i/dx_j
        # DX^T w for each node: sum_i dX_i/dx_j w_i
        dr = np.einsum("kij,i->kj", jacs, wr)
        dl = np.einsum("kij,i->kj", jacs, wl)
        grad_r = vals @ G.T + t[:, None] * dr
        grad_l = vals @ G + t[:, None] * dl
        return np.column_stack([vals @ wr, vals @ wl, grad_r, grad_l])

    return f


def eval_grad_H(s: GeometricStructure, X: NumericVectorField, x, q: QuadratureConfig = DEFAULT,
                side: Side = "right") -> np.ndarray:
    x = _point(s, X, x)
    n = s.dimension
    if not np.any(x):
        # at the origin grad H = G X(0) (right) or G^T X(0) (left)
        x0 = X(x)
        return s.G @ x0 if side == "right" else s.G.T @ x0
    res = integrate(_grad_integrand(s, X, x), q)
    return res[2:2 + n] if side == "right" else res[2 + n:]


@dataclass(frozen=True)
class PointDecomposition:
    point: np.ndarray
    X: np.ndarray
    H: float
    H_star: float
    grad_H: np.ndarray
    grad_H_star: np.ndarray
    gradient_part: np.ndarray
    gradient_part_star: np.ndarray
    u: np.ndarray
    u_star: np.ndarray
    orthogonality_residual: float
    orthogonality_residual_star: float

    @property
    def reconstruction_residual(self) -> float:
        return float(np.max(np.abs(self.gradient_part + self.u - self.X)))

    def to_dict(self) -> dict:
        def vec(v):
            return [float(c) for c in v]

        return {
            "point": vec(self.point),
            "X": vec(self.X),
            "H": float(self.H),
            "H_star": float(self.H_star),
            "grad_H": vec(self.grad_H),
            "grad_H_star": vec(self.grad_H_star),
            "gradient_part": vec(self.gradient_part),
            "gradient_part_star": vec(self.gradient_part_star),
            "u": vec(self.u),
            "u_star": vec(self.u_star),
            "orthogonality_residual": float(self.orthogonality_residual),
            "orthogonality_residual_star": float(self.orthogonality_residual_star),
        }


def decompose_at(s: GeometricStructure, X: NumericVectorField, x,
                 q: QuadratureConfig = DEFAULT) -> PointDecomposition:
    """Both splittings of X at one point, with orthogonality residuals
    |b(x, u(x))| and |b(u*(x), x)|."""
    x = _point(s, X, x)
    n = s.dimension
    Xx = X(x)
    if not np.any(x):
        # empty ray: H(0) = 0 and the gradient integrands are constant in t
        H = Hs = 0.0
        gr, gl = s.G @ Xx, s.G.T @ Xx
    else:
        res = integrate(_grad_integrand(s, X, x), q)
        H, Hs, gr, gl = float(res[0]), float(res[1]), res[2:2 + n], res[2 + n:]
    gp, gps = s.B @ gr, s.B_star @ gl
    u, us = Xx - gp, Xx - gps
    return PointDecomposition(
        point=x, X=Xx, H=H, H_star=Hs, grad_H=gr, grad_H_star=gl,
        gradient_part=gp, gradient_part_star=gps, u=u, u_star=us,
        orthogonality_residual=abs(float(x @ s.G @ u)),
        orthogonality_residual_star=abs(float(us @ s.G @ x)),
    )


@dataclass(frozen=True)
class LieIdentityCheck:
    lhs: float
    rhs: float
    residual: float
    expressions: tuple = ()


def lie_derivative_identity_check(s: GeometricStructure, grad_F: Callable[[np.ndarray], np.ndarray],
                                  x) -> LieIdentityCheck:
    """Lie derivative of F along its own gradient-like field.

    ``lhs = <B grad F, grad F>`` and ``rhs = grad F^T B grad F``.  The left
    field gives ``<B^T grad F, grad F>`` and ``grad F^T B^T grad F``; all four
    are the same quadratic form, so ``residual`` is their spread.  For skew
    ``G`` the common value is 0 (F is a first integral).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (s.dimension,):
        raise DimensionMismatch(f"expected a point of length {s.dimension}, got shape {x.shape}")
    g = np.asarray(grad_F(x), dtype=float)
    B, Bs = s.B, s.B_star
    vals = (float(np.dot(B @ g, g)), float(g @ B @ g), float(np.dot(Bs @ g, g)), float(g @ Bs @ g))
    return LieIdentityCheck(vals[0], vals[1], max(vals) - min(vals), vals)
