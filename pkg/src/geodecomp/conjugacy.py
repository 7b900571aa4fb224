"""Sampled verification of the hypotheses of the conjugacy criterion.

The criterion: with ``b`` an inner product, write ``X = X^g + X^r`` (gradient
part plus rotational part).  If the gradient parts of two fields both have
the origin as their unique equilibrium and it is globally attracting (or
both globally repelling), then the fields are conjugate whenever their
rotational parts are.

Nothing here constructs a conjugacy.  The checks are finite: a grid over a
box for equilibria, a finite number of trajectories for attraction, so a
positive verdict is sampled evidence, not a certificate.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import product

import numpy as np
from scipy.optimize import root

from .decomp import decompose_at
from .errors import BlowUp, GeoDecompError, MaxStepsExceeded, NonFiniteValue
from .fields import NumericVectorField
from .flow import FlowTrace, IntegratorConfig, integrate, norm2
from .geometry import GeometricStructure
from .quadrature import DEFAULT, QuadratureConfig

EQUILIBRIUM_TOL = 1e-8
ROOT_MERGE_TOL = 1e-6

RATIONALE_SKEW = (
    "skew-symmetric structure: the gradient-like part is a Hamiltonian field, "
    "which conserves its potential, so the origin cannot be asymptotically stable"
)
RATIONALE_INDEFINITE = (
    "indefinite symmetric structure with signature {sig}: the flow of the gradient-like "
    "part need not map R x (a level set of the potential) diffeomorphically onto "
    "R^n minus the origin, even when the origin is globally attracting"
)
RATIONALE_NEGATIVE = "negative definite symmetric structure: not an inner product"
RATIONALE_GENERAL = "structure is not symmetric: the criterion needs an inner product"


@dataclass(frozen=True)
class ConjugacyConfig:
    box_R: float = 5.0
    grid_k: int = 11
    trials: int = 32
    T: float = 50.0
    eps: float = 1e-3
    seed: int = 0
    rtol: float = 1e-8
    atol: float = 1e-10
    trace_count: int = 2
    trace_T: float = 10.0
    threads: int | None = None
    quadrature: QuadratureConfig = DEFAULT

    def workers(self) -> int:
        if self.threads is not None:
            return max(1, self.threads)
        env = os.environ.get("GEODECOMP_THREADS")
        return max(1, int(env)) if env else 1


@dataclass
class HypothesisReport:
    structure_admissible: bool
    origin_is_equilibrium_of_gradient_part: bool = False
    origin_residual: float | None = None
    unique_equilibrium_in_box: bool = False
    equilibria_found: list = field(default_factory=list)
    attraction_verdict: str = "inconclusive"
    attraction_stats: dict = field(default_factory=dict)
    criterion_applicable: bool = False
    rationale: list = field(default_factory=list)
    sampled: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


def gradient_part(s: GeometricStructure, X: NumericVectorField, q: QuadratureConfig = DEFAULT) -> NumericVectorField:
    """X^g = B grad H evaluated pointwise by quadrature."""
    return NumericVectorField(s.dimension, lambda x: decompose_at(s, X, x, q).gradient_part,
                              None, f"gradient_part[{X.label}]")


def rotational_part(s: GeometricStructure, X: NumericVectorField, q: QuadratureConfig = DEFAULT) -> NumericVectorField:
    """u = X - B grad H."""
    return NumericVectorField(s.dimension, lambda x: decompose_at(s, X, x, q).u,
                              None, f"rotational_part[{X.label}]")


def sphere_field(s: GeometricStructure, X: NumericVectorField, q: QuadratureConfig = DEFAULT) -> NumericVectorField:
    """B^{-1} u = G u, tangent to spheres centred at the origin."""
    G = s.G
    return NumericVectorField(s.dimension, lambda x: G @ decompose_at(s, X, x, q).u,
                              None, f"sphere_field[{X.label}]")


def _admissibility(s: GeometricStructure) -> list[str]:
    if s.is_skew:
        return [RATIONALE_SKEW]
    if not s.is_symmetric:
        return [RATIONALE_GENERAL]
    p, q = s.signature
    if p and q:
        return [RATIONALE_INDEFINITE.format(sig=f"({p},{q})")]
    if q:
        return [RATIONALE_NEGATIVE]
    return []


def _scan_equilibria(Xg: NumericVectorField, n: int, cfg: ConjugacyConfig) -> list[np.ndarray]:
    """Grid scan over [-R, R]^n with Newton-type refinement in sign-change cells."""
    axis = np.linspace(-cfg.box_R, cfg.box_R, cfg.grid_k)
    grid = np.array(list(product(axis, repeat=n)))
    vals = np.array([Xg(p) for p in grid]).reshape((cfg.grid_k,) * n + (n,))
    cell = axis[1] - axis[0]
    roots: list[np.ndarray] = []
    for idx in product(range(cfg.grid_k - 1), repeat=n):
        corners = vals[tuple(slice(i, i + 2) for i in idx)].reshape(-1, n)
        lo, hi = corners.min(axis=0), corners.max(axis=0)
        if np.any(lo > EQUILIBRIUM_TOL) or np.any(hi < -EQUILIBRIUM_TOL):
            continue
        centre = axis[list(idx)] + 0.5 * cell
        try:
            sol = root(Xg, centre, method="hybr", options={"xtol": 1e-12})
        except GeoDecompError:
            continue
        z = sol.x
        if not np.all(np.abs(z - centre) <= cell):  # left the cell neighbourhood
            continue
        if np.max(np.abs(Xg(z))) > EQUILIBRIUM_TOL:
            continue
        if not any(np.max(np.abs(z - r)) <= ROOT_MERGE_TOL for r in roots):
            roots.append(z)
    return roots


def _trial_ends(Xg, starts, cfg: ConjugacyConfig) -> list:
    icfg = IntegratorConfig(T=cfg.T, rtol=cfg.rtol, atol=cfg.atol, max_steps=200_000)

    def run(x0):
        try:
            return float(np.linalg.norm(integrate(Xg, x0, icfg).final))
        except (BlowUp, MaxStepsExceeded, NonFiniteValue):
            return None

    workers = cfg.workers()
    if workers == 1:
        return [run(x0) for x0 in starts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, starts))  # map keeps trial order


def _sphere_starts(n: int, count: int, radius: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((count, n))
    return radius * v / np.linalg.norm(v, axis=1, keepdims=True)


def _attraction(Xg: NumericVectorField, n: int, cfg: ConjugacyConfig) -> tuple[str, dict]:
    starts = _sphere_starts(n, cfg.trials, cfg.box_R, cfg.seed)
    limit = cfg.eps * cfg.box_R
    forward = _trial_ends(Xg, starts, cfg)
    stats = {"trials": cfg.trials, "radius": cfg.box_R, "T": cfg.T, "threshold": limit,
             "forward_final_norms": forward}
    if all(r is not None and r < limit for r in forward):
        return "attracting", stats
    reverse = NumericVectorField(n, lambda x: -Xg(x), None, f"-{Xg.label}")
    backward = _trial_ends(reverse, starts, cfg)
    stats["backward_final_norms"] = backward
    if all(r is not None and r < limit for r in backward):
        return "repelling", stats
    return "inconclusive", stats


def verify_hypotheses(s: GeometricStructure, X: NumericVectorField,
                      cfg: ConjugacyConfig = ConjugacyConfig()) -> HypothesisReport:
    reasons = _admissibility(s)
    if reasons:
        return HypothesisReport(structure_admissible=False, rationale=reasons)
    n = s.dimension
    Xg = gradient_part(s, X, cfg.quadrature)
    origin_res = float(np.linalg.norm(Xg(np.zeros(n))))
    report = HypothesisReport(structure_admissible=True, origin_residual=origin_res,
                              origin_is_equilibrium_of_gradient_part=origin_res <= EQUILIBRIUM_TOL)
    roots = _scan_equilibria(Xg, n, cfg)
    report.equilibria_found = [list(map(float, r)) for r in roots]
    report.unique_equilibrium_in_box = (
        len(roots) == 1 and float(np.max(np.abs(roots[0]))) <= ROOT_MERGE_TOL
    )
    if not report.origin_is_equilibrium_of_gradient_part:
        report.rationale.append("origin is not an equilibrium of the gradient part")
    if not report.unique_equilibrium_in_box:
        report.rationale.append(f"gradient part has {len(roots)} distinct equilibria in the box, "
                                "need exactly the origin")
        return report
    report.attraction_verdict, report.attraction_stats = _attraction(Xg, n, cfg)
    if report.attraction_verdict == "inconclusive":
        report.rationale.append("origin is neither attracting nor repelling for every sampled start")
    report.criterion_applicable = (report.origin_is_equilibrium_of_gradient_part
                                   and report.attraction_verdict in ("attracting", "repelling"))
    return report


@dataclass
class PairReport:
    first: HypothesisReport
    second: HypothesisReport
    reduction_valid: bool
    rotational_parts: tuple = ()
    traces: tuple = ()
    trace_norm_drift: tuple = ()

    def to_dict(self) -> dict:
        return {
            "first": self.first.to_dict(),
            "second": self.second.to_dict(),
            "reduction_valid": self.reduction_valid,
            "trace_norm_drift": [list(d) for d in self.trace_norm_drift],
            "sampled": True,
        }


def _sphere_traces(s, X, cfg: ConjugacyConfig) -> tuple[list[FlowTrace], list[float]]:
    field_ = sphere_field(s, X, cfg.quadrature)
    starts = _sphere_starts(s.dimension, cfg.trace_count, 1.0, cfg.seed + 1)
    icfg = IntegratorConfig(T=cfg.trace_T, rtol=1e-10, atol=1e-12)
    traces, drifts = [], []
    for x0 in starts:
        tr = integrate(field_, x0, icfg)
        traces.append(tr)
        drifts.append(max(abs(norm2(x) - norm2(x0)) for x in tr.states))
    return traces, drifts


def compare_pair(s1: GeometricStructure, X1: NumericVectorField, s2: GeometricStructure,
                 X2: NumericVectorField, cfg: ConjugacyConfig = ConjugacyConfig()) -> PairReport:
    """Check both hypothesis sets and extract the rotational parts.

    ``reduction_valid`` means conjugacy of the fields reduces to conjugacy of
    their rotational parts; deciding the latter is left to the caller.
    """
    r1, r2 = verify_hypotheses(s1, X1, cfg), verify_hypotheses(s2, X2, cfg)
    valid = (r1.criterion_applicable and r2.criterion_applicable
             and r1.attraction_verdict == r2.attraction_verdict)
    if not (r1.structure_admissible and r2.structure_admissible):
        return PairReport(r1, r2, False)
    rot = (rotational_part(s1, X1, cfg.quadrature), rotational_part(s2, X2, cfg.quadrature))
    t1, d1 = _sphere_traces(s1, X1, cfg)
    t2, d2 = _sphere_traces(s2, X2, cfg)
    return PairReport(r1, r2, valid, rot, (t1, t2), (d1, d2))
