"""Trajectory integration and first-integral drift.

Two explicit schemes: classical RK4 with a fixed step, and the adaptive
Dormand-Prince 5(4) pair with the usual PI-free step controller.  The
5th-order solution is propagated (local extrapolation) and the first
stage reuses the last stage of the previous accepted step.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BlowUp, DimensionMismatch, MaxStepsExceeded, NonFiniteValue
from .fields import NumericVectorField


@dataclass(frozen=True)
class IntegratorConfig:
    scheme: str = "dp54"
    T: float = 10.0
    h: float = 1e-2
    rtol: float = 1e-10
    atol: float = 1e-12
    max_steps: int = 1_000_000
    blowup: float = 1e8

    def __post_init__(self):
        if self.scheme not in ("dp54", "rk4"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not self.T > 0:
            raise ValueError("horizon T must be positive")
        if self.scheme == "rk4" and not self.h > 0:
            raise ValueError("RK4 needs a positive step")
        if self.scheme == "dp54" and not (self.rtol > 0 and self.atol > 0):
            raise ValueError("DP54 needs positive tolerances")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")


@dataclass
class FlowTrace:
    times: np.ndarray
    states: np.ndarray
    accepted: int = 0
    rejected: int = 0
    min_step: float = float("nan")
    max_step: float = float("nan")

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def step_stats(self) -> dict:
        return {"accepted": self.accepted, "rejected": self.rejected,
                "min_step": self.min_step, "max_step": self.max_step}

    def to_csv(self) -> str:
        """CSV text with header ``t,x1,...,xn``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.states.shape[1]
        w.writerow(["t"] + [f"x{i + 1}" for i in range(n)])
        for t, x in zip(self.times, self.states):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in x])
        return buf.getvalue()


# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _rhs(X) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(X, NumericVectorField):
        return X
    return lambda x: np.asarray(X(x), dtype=float)


def _guard(x: np.ndarray, bound: float, t: float):
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue(f"state became non-finite at t={t}")
    if np.linalg.norm(x) > bound:
        raise BlowUp(f"|x| exceeded {bound:g} at t={t:.6g}")


def integrate(X, x0, cfg: IntegratorConfig = IntegratorConfig()) -> FlowTrace:
    """Solve x' = X(x), x(0) = x0 on [0, T]."""
    x0 = np.asarray(x0, dtype=float)
    if isinstance(X, NumericVectorField) and x0.shape != (X.dimension,):
        raise DimensionMismatch(f"x0 has shape {x0.shape}, field dimension is {X.dimension}")
    f = _rhs(X)
    if cfg.scheme == "rk4":
        return _rk4(f, x0, cfg)
    return _dp54(f, x0, cfg)


def _rk4(f, x0, cfg) -> FlowTrace:
    nsteps = int(np.ceil(cfg.T / cfg.h - 1e-12))
    if nsteps > cfg.max_steps:
        raise MaxStepsExceeded(f"{nsteps} RK4 steps exceed max_steps={cfg.max_steps}")
    h = cfg.T / nsteps
    times = np.linspace(0.0, cfg.T, nsteps + 1)
    states = np.empty((nsteps + 1, x0.size))
    states[0] = x = x0
    for i in range(nsteps):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        _guard(x, cfg.blowup, times[i + 1])
        states[i + 1] = x
    return FlowTrace(times, states, nsteps, 0, h, h)


def _initial_step(f, x0, k0, cfg) -> float:
    # Hairer-Norsett-Wanner starting step heuristic, order 5
    scale = cfg.atol + cfg.rtol * np.abs(x0)
    d0 = np.sqrt(np.mean((x0 / scale) ** 2))
    d1 = np.sqrt(np.mean((k0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, cfg.T)
    k1 = f(x0 + h0 * k0)
    d2 = np.sqrt(np.mean(((k1 - k0) / scale) ** 2)) / h0
    h1 = max(1e-6, h0 * 1e-3) if max(d1, d2) <= 1e-15 else (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, cfg.T)


def _dp54(f, x0, cfg) -> FlowTrace:
    t, x = 0.0, x0.copy()
    times, states = [0.0], [x0.copy()]
    k = [None] * 7
    k[0] = f(x)
    h = _initial_step(f, x, k[0], cfg)
    accepted = rejected = 0
    hmin, hmax = np.inf, 0.0
    while t < cfg.T:
        if accepted + rejected >= cfg.max_steps:
            raise MaxStepsExceeded(f"DP54 exceeded {cfg.max_steps} steps at t={t:.6g}")
        last = t + h >= cfg.T
        if last:
            h = cfg.T - t
        for s in range(1, 7):
            k[s] = f(x + h * sum(a * k[j] for j, a in enumerate(_A[s]) if a))
        x_new = x + h * sum(b * k[j] for j, b in enumerate(_B5) if b)
        err_vec = h * sum(e * k[j] for j, e in enumerate(_E) if e)
        scale = cfg.atol + cfg.rtol * np.maximum(np.abs(x), np.abs(x_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if not np.isfinite(err):
            raise NonFiniteValue(f"non-finite error estimate at t={t:.6g}")
        if err <= 1.0:
            t = cfg.T if last else t + h
            x = x_new
            _guard(x, cfg.blowup, t)
            k[0] = k[6]
            accepted += 1
            hmin, hmax = min(hmin, h), max(hmax, h)
            times.append(t)
            states.append(x.copy())
            factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            rejected += 1
            factor = max(0.2, 0.9 * err ** -0.2)
        h *= factor
        if t < cfg.T and h < 1e-14 * max(1.0, abs(t)):
            raise MaxStepsExceeded(f"step size underflow at t={t:.6g}")
    return FlowTrace(np.array(times), np.array(states), accepted, rejected, float(hmin), float(hmax))


def drift_along(trace: FlowTrace, F: Callable[[np.ndarray], float]) -> float:
    """max_t |F(x(t)) - F(x(0))| over the accepted steps."""
    f0 = F(trace.states[0])
    return float(max(abs(F(x) - f0) for x in trace.states))


def first_integral_drift(X, F: Callable[[np.ndarray], float], x0,
                         cfg: IntegratorConfig = IntegratorConfig()) -> float:
    return drift_along(integrate(X, x0, cfg), F)


def lie_derivative(X, grad_F: Callable[[np.ndarray], np.ndarray], x) -> float:
    """<X(x), grad F(x)>."""
    x = np.asarray(x, dtype=float)
    return float(np.dot(_rhs(X)(x), np.asarray(grad_F(x), dtype=float)))


# common first integrals ----------------------------------------------------

def norm2(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(x @ x)


def quadratic_form(G) -> Callable[[np.ndarray], float]:
    """F_b(x) = x^T G x."""
    G = np.asarray(G, dtype=float)
    return lambda x: float(np.asarray(x) @ G @ np.asarray(x))


def quadratic_form_gradient(G) -> Callable[[np.ndarray], np.ndarray]:
    G = np.asarray(G, dtype=float)
    return lambda x: (G + G.T) @ np.asarray(x, dtype=float)
