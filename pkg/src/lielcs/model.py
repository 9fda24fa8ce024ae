"""Linear control systems: drift, control directions, range and signals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import algebra as A
from .algebra import AlgebraError, Subspace
from .groups import GroupRealization, MatrixGroup, SemidirectGroup
from .jordan import DynamicalSplitting, dynamical_split

MEMBER_TOL = 1e-9


class SpecError(ValueError):
    """Invalid system data."""


@dataclass(frozen=True, eq=False)
class LCSSpec:
    """A linear control system ``g' = X(g) + sum u_i Y^i(g)`` on a realized group.

    ``drift_kind`` is ``"inner"`` (``drift`` is the vector ``X0``) or
    ``"derivation"`` (``drift`` is the matrix ``D``).  ``omega`` holds the
    half-widths of the box control range.
    """

    group: GroupRealization
    drift_kind: str
    drift: np.ndarray
    controls: np.ndarray
    omega: np.ndarray
    name: str = ""
    derivation: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dim = self.group.dim
        drift = np.asarray(self.drift, dtype=float)
        if self.drift_kind == "inner":
            if drift.shape != (dim,):
                raise SpecError(f"inner drift needs a vector of length {dim}")
            D = A.ad(self.group.algebra, drift)
        elif self.drift_kind == "derivation":
            if drift.shape != (dim, dim):
                raise SpecError(f"derivation drift needs a {dim}x{dim} matrix")
            ok, r = A.is_derivation(self.group.algebra, drift)
            if not ok:
                raise SpecError(f"drift matrix is not a derivation (Leibniz residual {r:.3g})")
            D = drift
        else:
            raise SpecError(f"unknown drift kind {self.drift_kind!r}")
        controls = np.atleast_2d(np.asarray(self.controls, dtype=float))
        if controls.size == 0:
            controls = np.zeros((0, dim))
        if controls.shape[1] != dim:
            raise SpecError(f"control vectors must have length {dim}")
        omega = np.atleast_1d(np.asarray(self.omega, dtype=float))
        if omega.shape != (controls.shape[0],):
            raise SpecError("omega needs one half-width per control vector")
        if np.any(~np.isfinite(omega)) or np.any(omega <= 0):
            raise SpecError("omega half-widths must be positive and finite (0 must be interior)")
        for arr in (drift, D, controls, omega):
            arr.setflags(write=False)
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "derivation", D)
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "omega", omega)
        # the chart must be able to integrate this drift
        if isinstance(self.group, MatrixGroup):
            self.group.inner_vector(D)
        elif isinstance(self.group, SemidirectGroup):
            self.group.translation_block(D)

    @property
    def m(self) -> int:
        return self.controls.shape[0]

    @property
    def inner_vector(self) -> np.ndarray:
        if self.drift_kind == "inner":
            return self.drift
        return self.group.inner_vector(self.derivation)

    def control_vector(self, u) -> np.ndarray:
        """Algebra element ``sum u_i Y^i``; broadcasts over leading axes."""
        return np.asarray(u, dtype=float) @ self.controls

    def vertices(self) -> np.ndarray:
        m = self.m
        signs = np.array(np.meshgrid(*([[-1.0, 1.0]] * m), indexing="ij")).reshape(m, -1).T
        return signs * self.omega

    def in_omega(self, u, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(np.asarray(u, dtype=float)) <= self.omega + tol))

    def scaled(self, factor: float) -> "LCSSpec":
        return LCSSpec(self.group, self.drift_kind, self.drift, self.controls, self.omega * factor,
                       name=self.name)

    def time_reversed(self) -> "LCSSpec":
        """System with drift and control fields negated."""
        return LCSSpec(self.group, self.drift_kind, -self.drift, -self.controls, self.omega,
                       name=f"{self.name}-reversed")

    def to_json(self) -> dict:
        drift = {"kind": self.drift_kind}
        drift["vector" if self.drift_kind == "inner" else "matrix"] = self.drift.tolist()
        return {
            "group": self.group.name,
            "drift": drift,
            "controls": self.controls.tolist(),
            "omega": self.omega.tolist(),
        }


# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ControlSignal:
    """Piecewise-constant control.

    Piece ``i`` is active on ``[breakpoints[i], breakpoints[i+1])``; the last
    piece runs until ``end`` (infinite by default).
    """

    breakpoints: np.ndarray
    values: np.ndarray
    end: float = math.inf

    def __post_init__(self):
        bp = np.atleast_1d(np.asarray(self.breakpoints, dtype=float))
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        if bp.ndim != 1 or len(bp) != len(vals):
            raise SpecError("need exactly one value per piece")
        if len(bp) == 0 or bp[0] != 0.0:
            raise SpecError("first breakpoint must be 0")
        if np.any(np.diff(bp) <= 0):
            raise SpecError("breakpoints must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise SpecError("control values must be finite")
        if not self.end > bp[-1]:
            raise SpecError("control end must come after the last breakpoint")
        bp.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zero(cls, m: int, end: float = math.inf) -> "ControlSignal":
        return cls([0.0], np.zeros((1, m)), end)

    @classmethod
    def constant(cls, value, end: float = math.inf) -> "ControlSignal":
        return cls([0.0], [np.asarray(value, dtype=float)], end)

    @classmethod
    def uniform(cls, values, duration: float) -> "ControlSignal":
        values = np.atleast_2d(np.asarray(values, dtype=float))
        p = len(values)
        return cls(np.arange(p) * (duration / p), values, duration)

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def piece_index(self, t) -> np.ndarray:
        return np.searchsorted(self.breakpoints, t, side="right") - 1

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t >= self.end):
            raise SpecError("control evaluated outside its domain")
        return self.values[self.piece_index(t)]

    def shift(self, s: float) -> "ControlSignal":
        """The shifted control ``t -> u(t + s)``."""
        if s < 0 or s >= self.end:
            raise SpecError("shift outside the control domain")
        if s == 0:
            return self
        i = int(self.piece_index(s))
        bp = np.concatenate([[0.0], self.breakpoints[i + 1:] - s])
        return ControlSignal(bp, self.values[i:], self.end - s)

    def concat(self, other: "ControlSignal", at: float) -> "ControlSignal":
        """Follow this control on ``[0, at)`` and ``other`` (restarted) after."""
        if not 0 < at <= self.end:
            raise SpecError("concatenation point outside the control domain")
        keep = self.breakpoints < at
        bp = np.concatenate([self.breakpoints[keep], other.breakpoints + at])
        vals = np.concatenate([self.values[keep], other.values])
        return ControlSignal(bp, vals, other.end + at)

    def to_json(self) -> dict:
        return {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist(),
                "end": None if math.isinf(self.end) else self.end}

    @classmethod
    def from_json(cls, doc) -> "ControlSignal":
        end = doc.get("end")
        return cls(doc["breakpoints"], doc["values"], math.inf if end is None else float(end))


# --------------------------------------------------------------------------


def induced_derivation(spec: LCSSpec) -> np.ndarray:
    return np.array(spec.derivation)


@dataclass(frozen=True)
class LarcResult:
    holds: bool
    achieved: Subspace


def larc_check(spec: LCSSpec) -> LarcResult:
    S = A.smallest_invariant_subalgebra(spec.group.algebra, spec.derivation, list(spec.controls))
    return LarcResult(S.dim == spec.group.dim, S)


def drift_flow(spec: LCSSpec, g, t: float) -> np.ndarray:
    if not np.isfinite(t):
        raise SpecError("flow time must be finite")
    if t == 0:
        return np.array(g, dtype=float)
    G = spec.group
    if isinstance(G, MatrixGroup):
        return G.flow_inner(spec.inner_vector, g, t)
    return G.flow(spec.derivation, g, t)


class DynamicalSubgroups:
    """Splitting of the algebra plus membership tests for ``G^-``, ``G^0``, ``G^+``."""

    def __init__(self, spec: LCSSpec, split: DynamicalSplitting | None = None):
        self.spec = spec
        self.split = split or dynamical_split(spec.derivation, with_constants=False)

    def _in(self, sub: Subspace, g) -> bool:
        Y = self.spec.group.log(g)
        return A.distance_to(sub, Y) <= MEMBER_TOL * max(1.0, float(np.linalg.norm(Y)))

    def in_Gminus(self, g) -> bool:
        return self._in(self.split.minus, g)

    def in_Gzero(self, g) -> bool:
        return self._in(self.split.zero, g)

    def in_Gplus(self, g) -> bool:
        return self._in(self.split.plus, g)


def dynamical_subgroup_coords(spec: LCSSpec) -> DynamicalSubgroups:
    return DynamicalSubgroups(spec)


@dataclass(frozen=True)
class Fact:
    """A boolean fact with its provenance: ``computed`` or ``declared``."""

    value: bool | None
    provenance: str
    note: str = ""

    def to_json(self) -> dict:
        return {"value": self.value, "provenance": self.provenance, "note": self.note}


def check_decomposability(spec: LCSSpec, split: DynamicalSplitting | None = None) -> Fact:
    """Whether ``G = G^- G^{+,0}``.

    The algebra always splits; at group level solvable groups decompose,
    and so does any group whose central subalgebra is everything.  Otherwise
    the catalog declaration is reported as such.
    """
    split = split or dynamical_split(spec.derivation, with_constants=False)
    meta = spec.group.metadata
    if split.zero.dim == spec.group.dim:
        return Fact(True, "computed", "G = G^0")
    if meta.is_solvable:
        return Fact(True, "computed", "solvable group")
    return Fact(meta.decomposable_declared, "declared", "taken from catalog metadata")


def g0_compactness(spec: LCSSpec, split: DynamicalSplitting | None = None) -> Fact:
    """Compactness of the central subgroup ``G^0`` with provenance.

    ``value`` is None when neither the chart nor the catalog settles it.
    """
    split = split or dynamical_split(spec.derivation, with_constants=False)
    G = spec.group
    meta = G.metadata
    if split.zero.is_trivial:
        return Fact(True, "computed", "G^0 is trivial")
    if G.kind == "exp_coordinates":
        return Fact(False, "computed", "G^0 = exp(g^0) is a nontrivial vector group")
    if isinstance(G, SemidirectGroup):
        trans = A.Subspace(G.dim, np.eye(G.dim)[:, : G.n])
        if not A.intersection(split.zero, trans).is_trivial:
            return Fact(False, "computed", "G^0 contains a line of translations")
        if all(G.periods):
            return Fact(True, "computed", "G^0 is the torus quotient factor")
        return Fact(False, "computed", "G^0 contains a non-periodic quotient factor")
    if meta.compact_declared:
        return Fact(True, "declared", "closed subgroup of a group declared compact")
    if meta.torus_generators:
        torus = A.span(np.array(meta.torus_generators), G.dim)
        if A.same_subspace(split.zero, torus, 1e-7):
            return Fact(True, "declared", "G^0 is the declared torus")
    return Fact(None, "unknown", "no chart argument or declaration covers G^0")
