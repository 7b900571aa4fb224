"""Smooth non-polynomial fields on R^3 with analytic Jacobians.

Analytic Jacobians matter: finite-difference noise (~1e-10) would stop
adaptive Simpson from ever meeting a 1e-12 tolerance.
"""
import numpy as np

from geodecomp.fields import NumericVectorField


def _f1(p):
    x, y, z = p
    return np.array([np.sin(y), x * np.cos(z), np.exp(-x ** 2)])


def _j1(p):
    x, y, z = p
    o = np.zeros_like(x)
    return np.array([[o, np.cos(y), o], [np.cos(z), o, -x * np.sin(z)], [-2 * x * np.exp(-x ** 2), o, o]])


def _f2(p):
    x, y, z = p
    return np.array([np.exp(0.3 * x) - 1 + y, np.sin(x * z), np.tanh(y)])


def _j2(p):
    x, y, z = p
    o, one = np.zeros_like(x), np.ones_like(x)
    return np.array([[0.3 * np.exp(0.3 * x), one, o],
                     [z * np.cos(x * z), o, x * np.cos(x * z)],
                     [o, 1 / np.cosh(y) ** 2, o]])


def _f3(p):
    x, y, z = p
    return np.array([np.cos(x) * y, np.sin(z) + x * y, np.exp(y) * z])


def _j3(p):
    x, y, z = p
    o = np.zeros_like(x)
    return np.array([[-np.sin(x) * y, np.cos(x), o], [y, x, np.cos(z)], [o, np.exp(y) * z, np.exp(y)]])


def _f4(p):
    x, y, z = p
    return np.array([np.arctan(x + z), np.log(1 + y ** 2), np.sin(x) * np.cos(y)])


def _j4(p):
    x, y, z = p
    o = np.zeros_like(x)
    r = 1 / (1 + (x + z) ** 2)
    return np.array([[r, o, r], [o, 2 * y / (1 + y ** 2), o], [np.cos(x) * np.cos(y), -np.sin(x) * np.sin(y), o]])


def _f5(p):
    x, y, z = p
    return np.array([x * np.exp(-y ** 2), np.sin(x + y + z), 1 / (1 + z ** 2)])


def _j5(p):
    x, y, z = p
    o = np.zeros_like(x)
    c = np.cos(x + y + z)
    e = np.exp(-y ** 2)
    return np.array([[e, -2 * x * y * e, o], [c, c, c], [o, o, -2 * z / (1 + z ** 2) ** 2]])


FIELDS = [NumericVectorField(3, f, j, f"t{i + 1}", vectorized=True)
          for i, (f, j) in enumerate([(_f1, _j1), (_f2, _j2), (_f3, _j3), (_f4, _j4), (_f5, _j5)])]
