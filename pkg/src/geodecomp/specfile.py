"""System spec files: a structure plus a field, in JSON.

Example::

    {
      "dimension": 3,
      "structure": {"kind": "minkowski"},
      "field": {"kind": "builtin", "name": "rikitake",
                "params": {"mu": "1", "a": "1/2"}}
    }

Rationals are strings ``"p/q"`` (plain integers are accepted too); floats
are refused so that exact mode never sees a rounded value.  A custom
structure carries ``"gram"``; a polynomial field carries ``"components"``,
one term list per component with terms ``{"c": "p/q", "e": [e1, ..., en]}``.
The ``linear`` builtin takes its matrix under ``params["matrix"]``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from .errors import DimensionMismatch, SpecParseError
from .fields import NumericVectorField, from_poly, linear_field, lotka_volterra, rikitake
from .geometry import GeometricStructure, make_structure, minkowski, to_fraction
from .poly import Poly, PolyVectorField
from .polyfield import linear_poly, lotka_volterra_poly, rikitake_poly

STRUCTURE_KINDS = ("euclidean", "symplectic", "minkowski", "custom")
BUILTINS = {
    "lotka_volterra": ("alpha", "beta", "gamma", "delta"),
    "rikitake": ("mu", "a"),
    "linear": ("matrix",),
}
BUILTIN_DIMENSION = {"lotka_volterra": 2, "rikitake": 3}


def _rational(v, where: str) -> Fraction:
    if isinstance(v, bool) or isinstance(v, float):
        raise SpecParseError(f"{where}: rationals must be strings 'p/q' or integers, got {v!r}")
    try:
        return to_fraction(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SpecParseError(f"{where}: cannot parse rational {v!r}") from exc


def _matrix(rows, n: int, where: str) -> list[list[Fraction]]:
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise DimensionMismatch(f"{where}: expected a {n}x{n} matrix")
    return [[_rational(v, where) for v in r] for r in rows]


def _fmt(c: Fraction) -> str:
    return str(c)


@dataclass(frozen=True)
class SystemSpec:
    dimension: int
    structure_kind: str
    field_kind: str
    gram: tuple | None = None
    minkowski_q: int = 1
    name: str | None = None
    params: Mapping[str, Any] = field(default_factory=dict)
    components: PolyVectorField | None = None

    # -- parsing --------------------------------------------------------------

    @classmethod
    def from_dict(cls, d: Mapping) -> "SystemSpec":
        if not isinstance(d, Mapping):
            raise SpecParseError("spec must be a JSON object")
        try:
            n = d["dimension"]
            st, fd = d["structure"], d["field"]
        except KeyError as exc:
            raise SpecParseError(f"spec is missing key {exc}") from exc
        if isinstance(n, bool) or not isinstance(n, int) or n <= 0:
            raise SpecParseError(f"dimension must be a positive integer, got {n!r}")
        if not isinstance(st, Mapping) or not isinstance(fd, Mapping):
            raise SpecParseError("structure and field must be objects")

        skind = st.get("kind")
        if skind not in STRUCTURE_KINDS:
            raise SpecParseError(f"unknown structure kind {skind!r}")
        gram = None
        if skind == "custom":
            if "gram" not in st:
                raise SpecParseError("custom structure needs a 'gram' matrix")
            gram = tuple(tuple(r) for r in _matrix(st["gram"], n, "structure.gram"))
        q = st.get("q", 1)
        if isinstance(q, bool) or not isinstance(q, int):
            raise SpecParseError(f"structure.q must be an integer, got {q!r}")

        fkind = fd.get("kind")
        if fkind == "builtin":
            name = fd.get("name")
            if name not in BUILTINS:
                raise SpecParseError(f"unknown builtin field {name!r}")
            raw = fd.get("params", {})
            if not isinstance(raw, Mapping):
                raise SpecParseError("field.params must be an object")
            missing = [k for k in BUILTINS[name] if k not in raw]
            extra = [k for k in raw if k not in BUILTINS[name]]
            if missing or extra:
                raise SpecParseError(f"{name} params: missing {missing}, unexpected {extra}")
            if name == "linear":
                params = {"matrix": tuple(tuple(r) for r in _matrix(raw["matrix"], n, "params.matrix"))}
            else:
                if BUILTIN_DIMENSION[name] != n:
                    raise DimensionMismatch(f"{name} is {BUILTIN_DIMENSION[name]}-dimensional, spec says {n}")
                params = {k: _rational(raw[k], f"params.{k}") for k in BUILTINS[name]}
            spec = cls(n, skind, "builtin", gram, q, name, params)
        elif fkind == "polynomial":
            comps = fd.get("components")
            if not isinstance(comps, list) or len(comps) != n:
                raise DimensionMismatch(f"polynomial field needs {n} components")
            for c in comps:
                if not isinstance(c, list):
                    raise SpecParseError("each component must be a list of terms")
                for t in c:
                    if isinstance(t, Mapping) and isinstance(t.get("c"), float):
                        raise SpecParseError("polynomial coefficients must be 'p/q' strings")
            X = PolyVectorField([Poly.from_json(c, n) for c in comps])
            spec = cls(n, skind, "polynomial", gram, q, components=X)
        else:
            raise SpecParseError(f"unknown field kind {fkind!r}")
        spec.structure()  # surface SingularGram and dimension errors at parse time
        return spec

    @classmethod
    def loads(cls, text: str) -> "SystemSpec":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecParseError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(d)

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        st: dict = {"kind": self.structure_kind}
        if self.gram is not None:
            st["gram"] = [[_fmt(v) for v in r] for r in self.gram]
        if self.structure_kind == "minkowski" and self.minkowski_q != 1:
            st["q"] = self.minkowski_q
        if self.field_kind == "builtin":
            if self.name == "linear":
                params = {"matrix": [[_fmt(v) for v in r] for r in self.params["matrix"]]}
            else:
                params = {k: _fmt(self.params[k]) for k in BUILTINS[self.name]}
            fd = {"kind": "builtin", "name": self.name, "params": params}
        else:
            fd = {"kind": "polynomial", "components": self.components.to_json()}
        return {"dimension": self.dimension, "structure": st, "field": fd}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    # -- realization ----------------------------------------------------------

    def structure(self) -> GeometricStructure:
        if self.structure_kind == "custom":
            return make_structure("custom", self.dimension, [list(r) for r in self.gram])
        if self.structure_kind == "minkowski":
            return minkowski(self.dimension, self.minkowski_q)
        return make_structure(self.structure_kind, self.dimension)

    def poly_field(self) -> PolyVectorField:
        """Every supported field is polynomial, so this always succeeds."""
        if self.field_kind == "polynomial":
            return self.components
        p = self.params
        if self.name == "lotka_volterra":
            return lotka_volterra_poly(p["alpha"], p["beta"], p["gamma"], p["delta"])
        if self.name == "rikitake":
            return rikitake_poly(p["mu"], p["a"])
        return linear_poly(p["matrix"])

    def numeric_field(self) -> NumericVectorField:
        if self.field_kind == "polynomial":
            return from_poly(self.components)
        p = self.params
        if self.name == "lotka_volterra":
            return lotka_volterra(p["alpha"], p["beta"], p["gamma"], p["delta"])
        if self.name == "rikitake":
            return rikitake(p["mu"], p["a"])
        return linear_field([[float(v) for v in r] for r in p["matrix"]])
