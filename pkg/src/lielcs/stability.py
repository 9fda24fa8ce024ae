"""Internal and input-output stability classification.

Verdicts come with named witnesses.  Compactness facts carry a provenance
tag: ``computed`` when derived from the chart or the algebra, ``declared``
when taken from catalog metadata.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import algebra as A
from .algebra import LieAlgebra, Subspace
from .groups import GroupRealization, MatrixGroup, SemidirectGroup
from .jordan import ZERO, ELLIPTIC, classify_operator, dynamical_split, jordan_decompose
from .model import LCSSpec, SpecError, drift_flow, g0_compactness

INV_TOL = 1e-9
QUAD_POINTS = 256

ASYMPTOTICALLY_STABLE = "asymptotically_stable"
STABLE = "stable"
UNSTABLE = "unstable"
UNDETERMINED = "undetermined"
BIBO_STABLE = "bibo_stable"
NOT_BIBO_STABLE = "not_bibo_stable"

# unstable means some zero-control orbit is unbounded in positive time
INSTABILITY_CONVENTION = "complement"


class UnsupportedError(SpecError):
    """The requested construction is outside the supported group shapes."""


@dataclass
class StabilityReport:
    internal_verdict: str | None = None
    bibo_verdict: str | None = None
    witnesses: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"internal_verdict": self.internal_verdict, "bibo_verdict": self.bibo_verdict,
                "witnesses": _jsonable(self.witnesses)}


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


# --------------------------------------------------------------------------
# Internal stability


def _restriction(D, sub: Subspace) -> np.ndarray:
    Q = sub.basis_matrix
    return Q.T @ np.asarray(D, dtype=float) @ Q


def restricted_ellipticity(alg: LieAlgebra, D) -> bool:
    """Whether ``D`` restricted to the central subspace is elliptic (or zero)."""
    D = A.require_derivation(alg, D)
    split = dynamical_split(D, with_constants=False)
    if split.zero.is_trivial:
        return True
    return classify_operator(_restriction(D, split.zero)) in (ELLIPTIC, ZERO)


def classify_internal(alg: LieAlgebra, D) -> StabilityReport:
    """Internal stability of the zero-control flow of ``D``.

    Checked in order: nontrivial unstable subspace, non-elliptic central
    restriction, everything contracting, elliptic central restriction.
    """
    D = A.require_derivation(alg, D)
    split = dynamical_split(D, with_constants=False)
    dims = dict(split.dims)
    restr_class = ZERO if split.zero.is_trivial else classify_operator(_restriction(D, split.zero))
    elliptic = restr_class in (ELLIPTIC, ZERO)
    w = {"dims": dims, "central_restriction_class": restr_class, "restriction_elliptic": elliptic,
         "instability_convention": INSTABILITY_CONVENTION}
    if dims["plus"] > 0:
        w["rule"] = "unstable subspace is nontrivial"
        return StabilityReport(UNSTABLE, None, w)
    if not elliptic:
        w["rule"] = "central restriction is not elliptic"
        return StabilityReport(UNSTABLE, None, w)
    if dims["minus"] == alg.dim:
        w["rule"] = "whole algebra contracts"
        return StabilityReport(ASYMPTOTICALLY_STABLE, None, w)
    if dims["plus"] == 0 and elliptic:
        w["rule"] = "no unstable part and elliptic central restriction"
        return StabilityReport(STABLE, None, w)
    w["rule"] = "no rule applies"  # unreachable: the cases above are exhaustive
    return StabilityReport(UNDETERMINED, None, w)


# --------------------------------------------------------------------------
# Fixed and recurrent points


@dataclass(frozen=True)
class RecurrencePredicates:
    spec: LCSSpec
    hyperbolic: np.ndarray
    nilpotent: np.ndarray
    times: tuple[float, ...] = tuple(0.5 * k for k in range(1, 21))

    def is_fixed(self, g) -> bool:
        G = self.spec.group
        worst = max(float(G.distance(drift_flow(self.spec, g, t), g)) for t in self.times)
        return worst < 1e-8

    def is_recurrent_algebraic(self, Y) -> bool:
        Y = np.asarray(Y, dtype=float)
        scale = max(1.0, float(np.linalg.norm(Y)))
        r = max(np.linalg.norm(self.hyperbolic @ Y), np.linalg.norm(self.nilpotent @ Y))
        return bool(r <= INV_TOL * scale)


def fixed_and_recurrent_predicates(spec: LCSSpec) -> RecurrencePredicates:
    jd = jordan_decompose(spec.derivation)
    return RecurrencePredicates(spec, jd.hyperbolic, jd.nilpotent)


# --------------------------------------------------------------------------
# Adapted metric


def _torus_of_g0(group: GroupRealization, zero: Subspace):
    """Generators and periods of a torus realizing ``G^0``."""
    if zero.is_trivial:
        return np.zeros((group.dim, 0)), ()
    if isinstance(group, SemidirectGroup):
        gens = [np.eye(group.dim)[:, group.n + j] for j, p in enumerate(group.periods) if p]
        periods = tuple(p for p in group.periods if p)
    else:
        gens = [np.asarray(g, dtype=float) for g in group.metadata.torus_generators]
        periods = tuple(group.metadata.torus_periods)
    if not gens:
        raise UnsupportedError(f"{group.name}: G^0 is not realized as a torus")
    T = np.array(gens).T
    if not A.same_subspace(A.span(T.T, group.dim), zero, 1e-7):
        raise UnsupportedError(f"{group.name}: G^0 is not the realized torus")
    return T, periods


def _elliptic_invariant_product(R) -> np.ndarray:
    """Gram matrix making ``exp(tR)`` an isometry for semisimple ``R`` with
    imaginary spectrum."""
    k = R.shape[0]
    if np.max(np.abs(R), initial=0.0) < 1e-12:
        return np.eye(k)
    w, V = np.linalg.eig(R)
    Vi = np.linalg.inv(V)
    M = np.real(Vi.conj().T @ Vi)
    M = 0.5 * (M + M.T)
    return M / np.max(np.linalg.eigvalsh(M))


def build_adapted_metric(spec: LCSSpec, points: int = QUAD_POINTS) -> np.ndarray:
    """Gram matrix on ``g^-`` (orthonormal basis of the stable subspace) that
    is invariant under ``Ad(G^0)`` and under the elliptic part of the flow.

    ``G^0`` must be trivial or a torus; the average over it uses the
    ``points``-point trapezoid rule per circle factor.
    """
    D = spec.derivation
    split = dynamical_split(D, with_constants=False)
    if split.minus.is_trivial:
        raise UnsupportedError("adapted metric needs a nontrivial stable subspace")
    Q = split.minus.basis_matrix
    jd = split.jordan
    M0 = _elliptic_invariant_product(Q.T @ jd.elliptic @ Q)
    T, periods = _torus_of_g0(spec.group, split.zero)
    if T.shape[1] == 0:
        return M0
    alg = spec.group.algebra
    adT = [Q.T @ A.ad(alg, T[:, j]) @ Q for j in range(T.shape[1])]
    grids = [np.arange(points) * (p / points) for p in periods]
    acc = np.zeros_like(M0)
    count = 0
    for thetas in itertools.product(*grids):
        Adg = expm(sum(th * a for th, a in zip(thetas, adT)))
        acc += Adg.T @ M0 @ Adg
        count += 1
    M = acc / count
    return 0.5 * (M + M.T)


def adapted_metric_residuals(spec: LCSSpec, M, samples: int = 50, seed: int = 0,
                             times=tuple(0.1 * k for k in range(1, 101))) -> dict:
    """Invariance residuals of an adapted metric (Ad over ``G^0``, elliptic flow)."""
    split = dynamical_split(spec.derivation, with_constants=False)
    Q = split.minus.basis_matrix
    RE = Q.T @ split.jordan.elliptic @ Q
    iso = max(float(np.max(np.abs(expm(t * RE).T @ M @ expm(t * RE) - M))) for t in times)
    ad_res = 0.0
    T, periods = _torus_of_g0(spec.group, split.zero)
    rng = np.random.default_rng(seed)
    alg = spec.group.algebra
    for _ in range(samples if T.shape[1] else 0):
        th = rng.uniform(0, 1, T.shape[1]) * np.array(periods)
        Adg = Q.T @ expm(A.ad(alg, T @ th)) @ Q
        ad_res = max(ad_res, float(np.max(np.abs(Adg.T @ M @ Adg - M))))
    return {"ad_invariance": ad_res, "elliptic_isometry": iso}


# --------------------------------------------------------------------------
# Homomorphisms


@dataclass(frozen=True, eq=False)
class HomomorphismSpec:
    """A homomorphism known through its differential ``f``.

    ``coordinate_map`` (optional) realizes it on group elements as a linear
    map of flat chart coordinates; ``None`` with an identical target means
    the identity.
    """

    name: str
    source: LieAlgebra
    target: LieAlgebra
    differential: np.ndarray
    image_g0_compact_declared: bool = False
    target_realization: GroupRealization | None = None
    coordinate_map: np.ndarray | None = None

    def __post_init__(self):
        f = np.asarray(self.differential, dtype=float)
        if f.shape != (self.target.dim, self.source.dim):
            raise SpecError(f"differential must have shape {(self.target.dim, self.source.dim)}")
        object.__setattr__(self, "differential", f)
        r = self.homomorphism_residual()
        if r > INV_TOL:
            raise SpecError(f"{self.name}: differential does not preserve brackets (residual {r:.3g})")

    def homomorphism_residual(self) -> float:
        f = self.differential
        n = self.source.dim
        worst = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                lhs = f @ A.bracket(self.source, np.eye(n)[i], np.eye(n)[j])
                rhs = A.bracket(self.target, f[:, i], f[:, j])
                worst = max(worst, float(np.max(np.abs(lhs - rhs), initial=0.0)))
        return worst

    @property
    def kernel(self) -> Subspace:
        return A.null_space(self.differential)

    def project(self, points) -> np.ndarray:
        """Apply the homomorphism to a batch of source elements."""
        if self.target_realization is None:
            raise UnsupportedError(f"{self.name}: no target realization for projecting trajectories")
        if self.coordinate_map is None:
            return np.asarray(points, dtype=float)
        pts = np.asarray(points, dtype=float)
        out = pts @ np.asarray(self.coordinate_map, dtype=float).T
        G = self.target_realization
        return G._wrap(out) if isinstance(G, SemidirectGroup) else out

    def to_json(self) -> dict:
        return {"name": self.name, "source": self.source.name, "target": self.target.name,
                "differential": self.differential.tolist(),
                "image_g0_compact_declared": self.image_g0_compact_declared}


def induced_target_derivation(hom: HomomorphismSpec, D_source) -> np.ndarray:
    """``D_target`` with ``f D_source = D_target f`` for surjective ``f``."""
    f = hom.differential
    return f @ np.asarray(D_source, dtype=float) @ np.linalg.pinv(f)


@dataclass
class ConjugationResult:
    intertwines: bool
    residual: float
    images: dict
    images_match: bool
    mismatches: list

    def to_json(self) -> dict:
        return {"intertwines": self.intertwines, "residual": self.residual,
                "image_dims": {k: v.dim for k, v in self.images.items()},
                "images_match": self.images_match, "mismatches": self.mismatches}


def check_conjugation(hom: HomomorphismSpec, D_source, D_target) -> ConjugationResult:
    """Intertwining ``f D_source = D_target f`` and images of the dynamical
    subspaces versus those of the target."""
    f = hom.differential
    Ds = np.asarray(D_source, dtype=float)
    Dt = np.asarray(D_target, dtype=float)
    res = float(np.max(np.abs(f @ Ds - Dt @ f), initial=0.0))
    ss = dynamical_split(Ds, with_constants=False)
    images = {k: A.image(f, getattr(ss, k)) for k in ("plus", "zero", "minus")}
    if res > INV_TOL:
        return ConjugationResult(False, res, images, False, ["intertwining fails"])
    st = dynamical_split(Dt, with_constants=False)
    img_f = A.column_span(f)
    mismatches = []
    for key in ("plus", "zero", "minus"):
        want = A.intersection(getattr(st, key), img_f)
        if not A.same_subspace(images[key], want, 1e-7):
            mismatches.append(key)
    return ConjugationResult(True, res, images, not mismatches, mismatches)


def classify_bibo(spec: LCSSpec, hom: HomomorphismSpec) -> StabilityReport:
    """Input-output stability relative to ``hom``.

    Needs a flow-invariant kernel.  Stable when the unstable subspace lies in
    the kernel and the image of the central subspace is certified compact.
    """
    D = spec.derivation
    f = hom.differential
    ker = hom.kernel
    inv = A.invariance_residual(D, ker)
    w: dict = {"kernel_dim": ker.dim, "kernel_invariance_residual": inv}
    if inv > INV_TOL:
        w["kernel_invariant"] = False
        w["rule"] = "kernel not invariant"
        return StabilityReport(None, UNDETERMINED, w)
    w["kernel_invariant"] = True
    split = dynamical_split(D, with_constants=False)
    w["dims"] = dict(split.dims)
    contained = A.is_subspace_of(split.plus, ker, 1e-7)
    w["unstable_in_kernel"] = contained
    if not contained:
        Qp = split.plus.basis_matrix
        j = int(np.argmax(np.linalg.norm(f @ Qp, axis=0)))
        w["witness_unstable_vector"] = Qp[:, j]
        w["rule"] = "unstable subspace not contained in the kernel"
        return StabilityReport(None, NOT_BIBO_STABLE, w)
    img0 = A.image(f, split.zero)
    w["image_g0_dim"] = img0.dim
    if img0.is_trivial:
        w["image_g0_compact"] = {"value": True, "provenance": "computed", "note": "image of G^0 is trivial"}
        w["rule"] = "unstable subspace in kernel, trivial image of G^0"
        return StabilityReport(None, BIBO_STABLE, w)
    closure = A.smallest_invariant_subalgebra(
        hom.target, np.zeros((hom.target.dim,) * 2), list(img0.basis_matrix.T)
    )
    gen = A.subalgebra(hom.target, closure)
    ct = A.is_compact_type(gen)
    w["image_g0_compact_type"] = ct.classification
    if ct.is_compact_type and hom.image_g0_compact_declared:
        w["image_g0_compact"] = {"value": True, "provenance": "declared",
                                 "note": "compact-type image, compactness declared in the catalog"}
        w["rule"] = "unstable subspace in kernel, compact image of G^0"
        return StabilityReport(None, BIBO_STABLE, w)
    w["image_g0_compact"] = {"value": None, "provenance": "declared" if ct.is_compact_type else "computed",
                             "note": "compactness of the image of G^0 not certified"}
    w["rule"] = "compactness of the image of G^0 cannot be certified"
    return StabilityReport(None, UNDETERMINED, w)


# --------------------------------------------------------------------------
# Simulation cross-check


@dataclass
class CrosscheckReport:
    verdict: str
    probes: int
    bounded: int
    unbounded: int
    inconclusive: int
    agreement: float
    agrees: bool
    max_sup_gauge: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def periodic_probe_values(spec: LCSSpec, n: int, pattern: int, repeats: int, seed: int) -> np.ndarray:
    """Random ``pattern``-piece controls followed by their negation, repeated.

    Periodic inputs make the plateau test of the boundedness verdict exact up
    to transients; the sign flip keeps pure rotations periodic too.
    """
    from .simulator import random_control_values

    base = random_control_values(spec, n, pattern, seed)
    period = np.concatenate([base, -base], axis=1)
    return np.tile(period, (1, repeats, 1))


def bibo_simulation_crosscheck(spec: LCSSpec, hom: HomomorphismSpec, n: int, horizon: float = 100.0,
                               seed: int = 0, report: StabilityReport | None = None) -> CrosscheckReport:
    """Boundedness of projected random trajectories against :func:`classify_bibo`.

    A stable verdict agrees when every probe is bounded; an unstable verdict
    agrees when some probe (random or constant vertex control) is unbounded.
    """
    from .simulator import classify_gauge, simulate_batch

    if hom.target_realization is None:
        raise UnsupportedError(f"{hom.name}: target has no realization")
    report = report or classify_bibo(spec, hom)
    verdict = report.bibo_verdict
    pattern, period_len = 4, 10.0
    repeats = max(1, int(round(horizon / period_len)))
    vals = periodic_probe_values(spec, n, pattern, repeats, seed)
    if verdict == NOT_BIBO_STABLE:
        # constant vertex controls join the search
        verts = spec.vertices()[: n]
        vals[n - len(verts):] = verts[:, None, :]
    bp = np.arange(vals.shape[1]) * (period_len / (2 * pattern))
    T = bp[-1] + period_len / (2 * pattern)
    times, pts = simulate_batch(spec, spec.group.identity(), vals, bp, T, T / 1000.0)
    gauge = hom.target_realization.distance_to_identity(hom.project(pts))
    counts = {"bounded": 0, "unbounded": 0, "inconclusive": 0}
    sup = 0.0
    for g in gauge:
        v = classify_gauge(times, g)
        counts[v.verdict] += 1
        sup = max(sup, v.sup_gauge)
    total = len(gauge)
    if verdict == BIBO_STABLE:
        agree = counts["bounded"] / total
        ok = counts["bounded"] == total
    elif verdict == NOT_BIBO_STABLE:
        agree = 1.0 if counts["unbounded"] else 0.0
        ok = counts["unbounded"] > 0
    else:
        agree, ok = math.nan, False
    return CrosscheckReport(verdict, total, counts["bounded"], counts["unbounded"],
                            counts["inconclusive"], agree, ok, sup)


def full_report(spec: LCSSpec, homs=()) -> dict:
    """Internal verdict plus one input-output verdict per homomorphism."""
    internal = classify_internal(spec.group.algebra, spec.derivation)
    out = {"internal": internal.to_json(), "g0_compact": g0_compactness(spec).to_json(), "bibo": {}}
    for h in homs:
        out["bibo"][h.name] = classify_bibo(spec, h).to_json()
    return out
