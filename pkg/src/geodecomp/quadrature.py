"""Quadrature on [0, 1] for vector-valued integrands.

Integrands take an array of nodes ``t`` of shape (m,) and return an array of
shape (m, k).  Both schemes evaluate many nodes per call so vectorized
fields stay fast.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import NonFiniteValue, QuadratureNonconvergence

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureConfig:
    """``scheme`` is "gauss" (``nodes`` points) or "simpson" (absolute ``tol``)."""

    scheme: str = "gauss"
    nodes: int = 32
    tol: float = 1e-10
    max_depth: int = 50
    max_evals: int = 2_000_000

    def __post_init__(self):
        if self.scheme not in ("gauss", "simpson"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if self.nodes < 2:
            raise ValueError("Gauss-Legendre needs at least 2 nodes")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")

    @classmethod
    def gauss_legendre(cls, k: int = 32) -> "QuadratureConfig":
        return cls("gauss", nodes=k)

    @classmethod
    def adaptive_simpson(cls, tol: float = 1e-10, max_depth: int = 50) -> "QuadratureConfig":
        return cls("simpson", tol=tol, max_depth=max_depth)


DEFAULT = QuadratureConfig()


@lru_cache(maxsize=32)
def unit_gauss_legendre(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the k-point rule mapped affinely to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(k)
    return 0.5 * (x + 1.0), 0.5 * w


def integrate(f: Integrand, config: QuadratureConfig = DEFAULT) -> np.ndarray:
    if config.scheme == "gauss":
        t, w = unit_gauss_legendre(config.nodes)
        vals = _checked(f, t)
        return w @ vals
    return adaptive_simpson(f, config.tol, config.max_depth, config.max_evals)


def _checked(f: Integrand, t: np.ndarray) -> np.ndarray:
    vals = np.asarray(f(t), dtype=float)
    if vals.ndim == 1:
        vals = vals[:, None]
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue("integrand is not finite on [0, 1]")
    return vals


def adaptive_simpson(f: Integrand, tol: float = 1e-10, max_depth: int = 50,
                     max_evals: int = 2_000_000, initial: int = 8) -> np.ndarray:
    """Breadth-first adaptive Simpson with Richardson correction.

    Each panel carries its share of the tolerance (proportional to its
    width); a panel is accepted when the two-halves estimate differs from
    the whole-panel estimate by at most 15 times that share, max-norm over
    integrand components.  Noisy integrands never settle, so the total
    number of integrand evaluations is capped as well as the depth.
    """
    edges = np.linspace(0.0, 1.0, initial + 1)
    a, b = edges[:-1], edges[1:]
    m = 0.5 * (a + b)
    vals = _checked(f, np.concatenate([a, m, b]))
    fa, fm, fb = np.split(vals, 3)
    whole = ((b - a) / 6.0)[:, None] * (fa + 4 * fm + fb)
    ptol = np.full(a.shape, tol / initial)
    total = np.zeros(vals.shape[1])
    evals = len(vals)

    for _ in range(max_depth):
        evals += 2 * len(a)
        if evals > max_evals:
            raise QuadratureNonconvergence(f"adaptive Simpson exceeded {max_evals} evaluations at tol={tol}")
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        v = _checked(f, np.concatenate([lm, rm]))
        flm, frm = np.split(v, 2)
        h = ((b - a) / 12.0)[:, None]
        left = h * (fa + 4 * flm + fm)
        right = h * (fm + 4 * frm + fb)
        diff = left + right - whole
        done = np.max(np.abs(diff), axis=1) <= 15.0 * ptol
        total += np.sum((left + right + diff / 15.0)[done], axis=0)
        keep = ~done
        if not keep.any():
            return total
        # split surviving panels into halves
        a, m, b = np.concatenate([a[keep], m[keep]]), np.concatenate([lm[keep], rm[keep]]), np.concatenate([m[keep], b[keep]])
        fa, fm, fb = (np.concatenate([fa[keep], fm[keep]]), np.concatenate([flm[keep], frm[keep]]),
                      np.concatenate([fm[keep], fb[keep]]))
        whole = np.concatenate([left[keep], right[keep]])
        ptol = np.concatenate([ptol[keep], ptol[keep]]) / 2.0
    raise QuadratureNonconvergence(f"adaptive Simpson did not reach tol={tol} within depth {max_depth}")
