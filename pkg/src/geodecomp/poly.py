"""Sparse multivariate polynomials with exact rational coefficients.

Terms are kept in graded lexicographic order (total degree first, then
lexicographic with ``x1 > x2 > ...``), so two equal polynomials have
identical term tuples, identical text and identical hashes.

Text format::

    3/2*x1^2*x2 - x3 + 1/3

Variables are ``x1..xn``; when ``n <= 3`` the aliases ``x, y, z`` are also
accepted on input.  Coefficients are integers or ``p/q``.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegreeLimitExceeded, DimensionMismatch, NonzeroConstantTerm, SpecParseError
from .geometry import to_fraction

MAX_DEGREE = 64

Monomial = tuple[int, ...]


def _order_key(exps: Monomial):
    return (sum(exps), tuple(-e for e in exps))


class Poly:
    """Immutable polynomial in ``nvars`` variables over Q."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Monomial, object] | Iterable = ()):
        if nvars <= 0:
            raise DimensionMismatch("a polynomial needs at least one variable")
        acc: dict[Monomial, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise DimensionMismatch(f"monomial {exps} has {len(exps)} exponents, expected {nvars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if sum(exps) > MAX_DEGREE:
                raise DegreeLimitExceeded(f"total degree {sum(exps)} exceeds {MAX_DEGREE}")
            acc[exps] = acc.get(exps, Fraction(0)) + (c if isinstance(c, Fraction) else to_fraction(c))
        self.nvars = nvars
        self.terms: tuple[tuple[Monomial, Fraction], ...] = tuple(
            sorted(((e, c) for e, c in acc.items() if c != 0), key=lambda t: _order_key(t[0]))
        )
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        """The coordinate x_{i+1} (0-based index)."""
        if not 0 <= i < nvars:
            raise DimensionMismatch(f"variable index {i} out of range for {nvars} variables")
        return cls(nvars, {tuple(int(k == i) for k in range(nvars)): 1})

    @classmethod
    def variables(cls, nvars: int) -> list["Poly"]:
        return [cls.var(nvars, i) for i in range(nvars)]

    # -- inspection ---------------------------------------------------------

    def as_dict(self) -> dict[Monomial, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def constant_term(self) -> Fraction:
        return self.as_dict().get((0,) * self.nvars, Fraction(0))

    def homogeneous_part(self, k: int) -> "Poly":
        return Poly(self.nvars, {e: c for e, c in self.terms if sum(e) == k})

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.terms))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionMismatch(f"cannot combine polynomials in {self.nvars} and {other.nvars} variables")
            return other
        return Poly.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        acc = self.as_dict()
        for e, c in other.terms:
            acc[e] = acc.get(e, Fraction(0)) + c
        return Poly(self.nvars, acc)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = to_fraction(other)
            return Poly(self.nvars, {e: c * v for e, v in self.terms})
        other = self._coerce(other)
        acc: dict[Monomial, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, Fraction(0)) + c1 * c2
        return Poly(self.nvars, acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (1 / to_fraction(other))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Poly.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c) -> "Poly":
        return self * c

    def partial(self, i: int) -> "Poly":
        """d/dx_{i+1} (0-based index)."""
        if not 0 <= i < self.nvars:
            raise DimensionMismatch(f"variable index {i} out of range for {self.nvars} variables")
        acc = {}
        for e, c in self.terms:
            if e[i]:
                d = list(e)
                d[i] -= 1
                acc[tuple(d)] = c * e[i]
        return Poly(self.nvars, acc)

    def gradient(self) -> "PolyVectorField":
        return PolyVectorField([self.partial(i) for i in range(self.nvars)])

    # -- evaluation ---------------------------------------------------------

    def __call__(self, point):
        return self.eval(point)

    def eval(self, point):
        """Evaluate at a point.  Exact when the point is rational."""
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point has {len(point)} coordinates, expected {self.nvars}")
        total = 0
        for e, c in self.terms:
            term = c
            for xi, k in zip(point, e):
                if k:
                    term = term * xi**k
            total = total + term
        return total if self.terms else Fraction(0)

    def compile(self):
        """Return a vectorized float evaluator ``f(x)`` for ``x`` of shape (n, ...)."""
        if not self.terms:
            return lambda x: np.zeros(np.shape(x)[1:])
        exps = np.array([e for e, _ in self.terms], dtype=float)
        coef = np.array([float(c) for _, c in self.terms])

        def f(x):
            x = np.asarray(x, dtype=float)
            mon = np.prod(x[None, ...] ** exps.reshape(exps.shape + (1,) * (x.ndim - 1)), axis=1)
            return np.tensordot(coef, mon, axes=1)

        return f

    # -- substitution -------------------------------------------------------

    def scale_vars(self, t) -> "Poly":
        """p(t * x) for a rational t."""
        t = to_fraction(t)
        return Poly(self.nvars, {e: c * t ** sum(e) for e, c in self.terms})

    # -- text ---------------------------------------------------------------

    def to_text(self, names: Sequence[str] | None = None) -> str:
        names = list(names) if names else [f"x{i + 1}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for idx, (e, c) in enumerate(self.terms):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            factors = [n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k]
            coeff = str(mag)
            if factors:
                body = "*".join(factors) if mag == 1 else coeff + "*" + "*".join(factors)
            else:
                body = coeff
            if idx == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Poly({self.nvars}, {self.to_text()!r})"

    @classmethod
    def from_text(cls, text: str, nvars: int) -> "Poly":
        return parse_poly(text, nvars)

    def to_json(self) -> list[dict]:
        return [{"c": str(c), "e": list(e)} for e, c in self.terms]

    @classmethod
    def from_json(cls, terms: Sequence[Mapping], nvars: int) -> "Poly":
        try:
            return cls(nvars, [(tuple(t["e"]), to_fraction(t["c"])) for t in terms])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, DimensionMismatch):
                raise
            raise SpecParseError(f"bad polynomial term list: {exc}") from exc


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z]\w*)|(\*\*|[-+*/^()]))")


def _var_names(nvars: int) -> dict[str, int]:
    names = {f"x{i + 1}": i for i in range(nvars)}
    if nvars <= 3:
        names.update({a: i for i, a in enumerate("xyz"[:nvars])})
    return names


def parse_poly(text: str, nvars: int) -> Poly:
    """Parse the polynomial text format (also accepts ``**`` and parentheses)."""
    names = _var_names(nvars)
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SpecParseError(f"unexpected character at {pos} in {text!r}")
        num, ident, op = m.groups()
        if num is not None:
            tokens.append(("num", Fraction(num)))
        elif ident is not None:
            if ident not in names:
                raise SpecParseError(f"unknown variable {ident!r} (expected one of {sorted(names)})")
            tokens.append(("var", names[ident]))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    if not tokens:
        raise SpecParseError("empty polynomial text")
    parser = _Parser(tokens, nvars)
    result = parser.expr()
    if parser.i != len(tokens):
        raise SpecParseError(f"trailing input in {text!r}")
    return result


class _Parser:
    # expr := term (('+'|'-') term)* ; term := power (('*'|'/') power)* ;
    # unary := '-' unary | power ; power := atom ('^' int)?
    def __init__(self, tokens, nvars):
        self.tokens, self.i, self.n = tokens, 0, nvars

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self):
        out = self.unary()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.unary()
            out = out + rhs if op == "+" else out - rhs
        return out

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.term()

    def term(self):
        out = self.power()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.power()
            if op == "*":
                out = out * rhs
                continue
            if rhs.degree > 0 or rhs.is_zero():
                raise SpecParseError("can only divide by a nonzero constant")
            out = out / rhs.constant_term()
        return out

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num" or val.denominator != 1:
                raise SpecParseError("exponents must be nonnegative integers")
            base = base ** int(val)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return Poly.constant(self.n, val)
        if kind == "var":
            return Poly.var(self.n, val)
        if (kind, val) == ("op", "("):
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise SpecParseError("unbalanced parentheses")
            return inner
        raise SpecParseError(f"unexpected token {val!r}")


def ray_integral(p: Poly) -> Poly:
    """q(x) = int_0^1 p(t x) / t dt, computed degree by degree (divide by k).

    Requires p(0) = 0, otherwise the integrand has a 1/t singularity.
    """
    if p.constant_term() != 0:
        raise NonzeroConstantTerm(f"ray integral needs p(0) = 0, got constant {p.constant_term()}")
    return Poly(p.nvars, {e: c / sum(e) for e, c in p.terms})


class PolyVectorField:
    """An n-tuple of polynomials in n variables."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[Poly]):
        comps = tuple(components)
        if not comps:
            raise DimensionMismatch("a vector field needs at least one component")
        n = len(comps)
        for c in comps:
            if not isinstance(c, Poly) or c.nvars != n:
                raise DimensionMismatch(f"every component must be a Poly in {n} variables")
        self.components = comps

    @classmethod
    def zero(cls, n: int) -> "PolyVectorField":
        return cls([Poly.zero(n)] * n)

    @classmethod
    def identity(cls, n: int) -> "PolyVectorField":
        return cls(Poly.variables(n))

    @classmethod
    def from_text(cls, texts: Sequence[str]) -> "PolyVectorField":
        n = len(texts)
        return cls([parse_poly(t, n) for t in texts])

    @property
    def dimension(self) -> int:
        return len(self.components)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __eq__(self, other):
        return isinstance(other, PolyVectorField) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def _check(self, other):
        if not isinstance(other, PolyVectorField) or other.dimension != self.dimension:
            raise DimensionMismatch("vector fields must have the same dimension")

    def __add__(self, other):
        self._check(other)
        return PolyVectorField([a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        self._check(other)
        return PolyVectorField([a - b for a, b in zip(self, other)])

    def __neg__(self):
        return PolyVectorField([-a for a in self])

    def __mul__(self, c):
        return PolyVectorField([a * c for a in self])

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self)

    def apply_matrix(self, m) -> "PolyVectorField":
        """Return M X for a rational matrix M."""
        m = np.asarray(m, dtype=object)
        n = self.dimension
        if m.shape != (n, n):
            raise DimensionMismatch(f"matrix shape {m.shape} does not match dimension {n}")
        return PolyVectorField([
            sum((self[j] * m[i, j] for j in range(n) if m[i, j] != 0), Poly.zero(n))
            for i in range(n)
        ])

    def pair(self, m, other: "PolyVectorField") -> Poly:
        """Scalar polynomial self^T M other."""
        self._check(other)
        return sum((self[i] * (other[j] * m[i, j])
                    for i in range(self.dimension) for j in range(self.dimension) if m[i, j] != 0),
                   Poly.zero(self.dimension))

    def jacobian(self) -> list[list[Poly]]:
        """Matrix of partials, entry [i][j] = dX_i/dx_j."""
        return [[c.partial(j) for j in range(self.dimension)] for c in self]

    def eval(self, point):
        return [c.eval(point) for c in self]

    def __call__(self, point):
        return self.eval(point)

    def scale_vars(self, t) -> "PolyVectorField":
        return PolyVectorField([c.scale_vars(t) for c in self])

    def to_text(self, names=None) -> list[str]:
        return [c.to_text(names) for c in self]

    def to_json(self) -> list[list[dict]]:
        return [c.to_json() for c in self]

    @classmethod
    def from_json(cls, components) -> "PolyVectorField":
        n = len(components)
        return cls([Poly.from_json(c, n) for c in components])

    def __repr__(self):
        return f"PolyVectorField({self.to_text()!r})"
