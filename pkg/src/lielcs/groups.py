"""Concrete realizations of connected Lie groups.

Three kinds cover every example group:

``matrix_inner``
    A faithful matrix representation; elements are ``rep_dim x rep_dim``
    matrices and drifts are inner derivations ``ad(X0)``.
``exp_coordinates``
    A simply connected nilpotent group charted globally by ``exp``;
    elements are coordinate vectors and products use the (finite)
    Baker-Campbell-Hausdorff series.
``semidirect``
    ``R^n x| K`` with ``K`` abelian, acting through commuting generators
    ``A_j``; elements are ``(v, theta)`` with periodic angles wrapped.

All element operations broadcast over leading batch axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm, logm

from . import algebra as alg_mod
from .algebra import AlgebraError, LieAlgebra, Subspace

HOM_TOL = 1e-9


class ChartError(ValueError):
    """Element outside the chart where coordinates are defined."""


@dataclass(frozen=True)
class GroupMetadata:
    is_solvable: bool
    is_nilpotent: bool
    compact_declared: bool = False
    torus_generators: tuple[tuple[float, ...], ...] = ()
    torus_periods: tuple[float, ...] = ()
    toral_component_trivial: bool = True
    decomposable_declared: bool | None = None

    def to_json(self) -> dict:
        return {
            "is_solvable": self.is_solvable,
            "is_nilpotent": self.is_nilpotent,
            "compact_declared": self.compact_declared,
            "torus_generators": [list(g) for g in self.torus_generators],
            "torus_periods": list(self.torus_periods),
            "toral_component_trivial": self.toral_component_trivial,
            "decomposable_declared": self.decomposable_declared,
        }


def computed_metadata(alg: LieAlgebra, **declared) -> GroupMetadata:
    return GroupMetadata(
        is_solvable=alg_mod.is_solvable(alg), is_nilpotent=alg_mod.is_nilpotent(alg), **declared
    )


class GroupRealization:
    """Common element interface; subclasses fill in the chart."""

    kind: str = ""
    algebra: LieAlgebra
    metadata: GroupMetadata
    name: str

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def element_shape(self) -> tuple[int, ...]:
        raise NotImplementedError

    def identity(self) -> np.ndarray:
        raise NotImplementedError

    def multiply(self, g, h) -> np.ndarray:
        raise NotImplementedError

    def inverse(self, g) -> np.ndarray:
        raise NotImplementedError

    def exp(self, Y) -> np.ndarray:
        raise NotImplementedError

    def log(self, g) -> np.ndarray:
        raise NotImplementedError

    def distance(self, g, h) -> np.ndarray:
        raise NotImplementedError

    def distance_to_identity(self, g) -> np.ndarray:
        return self.distance(g, self.identity())

    def flat_coordinates(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=float)
        nd = len(self.element_shape)
        return g.reshape(g.shape[: g.ndim - nd] + (-1,))

    def coordinate_names(self) -> list[str]:
        raise NotImplementedError

    def check_derivation(self, D) -> np.ndarray:
        return alg_mod.require_derivation(self.algebra, D)

    def flow(self, D, g, t) -> np.ndarray:
        """Automorphism flow ``phi_t`` with differential ``exp(tD)``."""
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"name": self.name, "kind": self.kind, "algebra": self.algebra.to_json(),
                "metadata": self.metadata.to_json()}


# --------------------------------------------------------------------------


class MatrixGroup(GroupRealization):
    kind = "matrix_inner"

    def __init__(self, name: str, algebra: LieAlgebra, embed, metadata: GroupMetadata | None = None):
        self.name = name
        self.algebra = algebra
        embed = np.asarray(embed, dtype=float)
        if embed.ndim != 3 or embed.shape[0] != algebra.dim or embed.shape[1] != embed.shape[2]:
            raise AlgebraError("embed must have shape (dim, rep_dim, rep_dim)")
        self.embed = embed
        self.rep_dim = embed.shape[1]
        self.metadata = metadata or computed_metadata(algebra)
        r = self.homomorphism_residual()
        if r > HOM_TOL:
            raise AlgebraError(f"embedding of {name} is not a Lie algebra homomorphism (residual {r:.3g})")
        flat = embed.reshape(algebra.dim, -1).T
        if np.linalg.matrix_rank(flat, tol=1e-9) < algebra.dim:
            raise AlgebraError("embedding is not injective")
        self._pinv = np.linalg.pinv(flat)

    def homomorphism_residual(self) -> float:
        E = self.embed
        comm = np.einsum("iab,jbc->ijac", E, E) - np.einsum("jab,ibc->ijac", E, E)
        img = np.einsum("ijk,kab->ijab", self.algebra.structure_constants, E)
        return float(np.max(np.abs(comm - img), initial=0.0))

    @property
    def element_shape(self):
        return (self.rep_dim, self.rep_dim)

    def hat(self, Y) -> np.ndarray:
        return np.einsum("...i,iab->...ab", np.asarray(Y, dtype=float), self.embed)

    def vee(self, M) -> np.ndarray:
        M = np.asarray(M, dtype=float)
        return M.reshape(M.shape[:-2] + (-1,)) @ self._pinv.T

    def identity(self):
        return np.eye(self.rep_dim)

    def multiply(self, g, h):
        return np.matmul(g, h)

    def inverse(self, g):
        return np.linalg.inv(g)

    def exp(self, Y):
        return expm(self.hat(Y))

    def log(self, g):
        g = np.asarray(g, dtype=float)
        w = np.linalg.eigvals(g)
        if np.any((np.abs(w.imag) < 1e-12) & (w.real <= 0)):
            raise ChartError("element outside chart: eigenvalue on the closed negative real axis")
        L = logm(g)
        if np.max(np.abs(np.imag(L)), initial=0.0) > 1e-9:
            raise ChartError("element outside chart: logarithm is not real")
        L = np.real(L)
        Y = self.vee(L)
        if np.max(np.abs(self.hat(Y) - L), initial=0.0) > 1e-7:
            raise ChartError("element outside chart: logarithm leaves the Lie algebra")
        return Y

    def distance(self, g, h):
        d = np.asarray(g, dtype=float) - np.asarray(h, dtype=float)
        return np.sqrt(np.sum(d * d, axis=(-2, -1)))

    def coordinate_names(self):
        return [f"g{i}{j}" for i in range(self.rep_dim) for j in range(self.rep_dim)]

    def inner_vector(self, D) -> np.ndarray:
        """``X0`` with ``ad(X0) = D``; only inner derivations are supported."""
        D = self.check_derivation(D)
        A = alg_mod.ad_basis(self.algebra)  # ad(X0) = sum x_i A[i]
        M = A.reshape(self.dim, -1).T
        x, *_ = np.linalg.lstsq(M, D.reshape(-1), rcond=None)
        if np.max(np.abs(M @ x - D.reshape(-1)), initial=0.0) > 1e-9:
            raise AlgebraError(
                f"derivation is not inner; {self.name} matrix realization only supports ad(X0) drifts"
            )
        return x

    def flow_inner(self, X0, g, t):
        Xh = self.hat(X0)
        return expm(t * Xh) @ np.asarray(g, dtype=float) @ expm(-t * Xh)

    def flow(self, D, g, t):
        return self.flow_inner(self.inner_vector(D), g, t)


# --------------------------------------------------------------------------

# B_n / n! for x / (e^x - 1)
_BERNOULLI = (1.0, -0.5, 1.0 / 12.0, 0.0, -1.0 / 720.0)


class NilpotentGroup(GroupRealization):
    kind = "exp_coordinates"

    def __init__(self, name: str, algebra: LieAlgebra, metadata: GroupMetadata | None = None):
        self.name = name
        self.algebra = algebra
        self.metadata = metadata or computed_metadata(algebra)
        if not self.metadata.is_nilpotent or not alg_mod.is_nilpotent(algebra):
            raise AlgebraError("exponential coordinates require a nilpotent algebra")
        self.step = alg_mod.nilpotency_step(algebra)
        if self.step > 4:
            raise AlgebraError("exponential coordinates implemented up to nilpotency step 4")
        self.C = np.ascontiguousarray(algebra.structure_constants)

    @property
    def element_shape(self):
        return (self.dim,)

    @property
    def field_coefficients(self) -> np.ndarray:
        """Series coefficients of the right-trivialized inverse ``dexp``."""
        return np.array(_BERNOULLI[: max(self.step, 1)])

    def _br(self, x, y):
        return np.einsum("...i,...j,ijk->...k", x, y, self.C)

    def identity(self):
        return np.zeros(self.dim)

    def multiply(self, g, h):
        X = np.asarray(g, dtype=float)
        Y = np.asarray(h, dtype=float)
        X, Y = np.broadcast_arrays(X, Y)
        XY = self._br(X, Y)
        Z = X + Y + 0.5 * XY
        if self.step >= 3:
            Z = Z + (self._br(X, XY) - self._br(Y, XY)) / 12.0
        if self.step >= 4:
            Z = Z - self._br(Y, self._br(X, XY)) / 24.0
        return Z

    def inverse(self, g):
        return -np.asarray(g, dtype=float)

    def exp(self, Y):
        return np.array(Y, dtype=float)

    def log(self, g):
        return np.array(g, dtype=float)

    def distance(self, g, h):
        return np.linalg.norm(np.asarray(g, dtype=float) - np.asarray(h, dtype=float), axis=-1)

    def coordinate_names(self):
        return list(self.algebra.basis_names)

    def flow(self, D, g, t):
        D = self.check_derivation(D)
        return np.asarray(g, dtype=float) @ expm(t * D).T


# --------------------------------------------------------------------------


class SemidirectGroup(GroupRealization):
    """``R^n x| K`` with ``K = R^k`` or a torus acting by ``exp(sum theta_j A_j)``.

    Algebra basis: translations ``t_1..t_n`` then ``a_1..a_k`` with
    ``[a_j, t] = A_j t``.  Periodic factors carry their period.
    """

    kind = "semidirect"

    def __init__(self, name: str, generators, periods=None, basis_names=(), metadata=None):
        A = np.asarray(generators, dtype=float)
        if A.ndim != 3 or A.shape[1] != A.shape[2]:
            raise AlgebraError("generators must have shape (k, n, n)")
        k, n, _ = A.shape
        for i in range(k):
            for j in range(k):
                if np.max(np.abs(A[i] @ A[j] - A[j] @ A[i]), initial=0.0) > 1e-12:
                    raise AlgebraError("quotient generators must commute")
        self.name = name
        self.A = np.ascontiguousarray(A)
        self.n, self.k = n, k
        self.periods = tuple(periods) if periods is not None else (None,) * k
        if len(self.periods) != k:
            raise AlgebraError("one period entry per quotient factor")
        d = n + k
        c = np.zeros((d, d, d))
        for j in range(k):
            for i in range(n):
                c[n + j, i, :n] = A[j][:, i]
                c[i, n + j, :n] = -A[j][:, i]
        self.algebra = LieAlgebra(name, c, tuple(basis_names))
        self.metadata = metadata or computed_metadata(self.algebra)

    @property
    def element_shape(self):
        return (self.n + self.k,)

    def _wrap(self, x):
        x = np.array(x, dtype=float)
        for j, p in enumerate(self.periods):
            if p:
                th = x[..., self.n + j]
                x[..., self.n + j] = th - p * np.round(th / p)
        return x

    def rho(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.n == 0:
            return np.zeros(theta.shape[:-1] + (0, 0))
        return expm(np.einsum("...j,jab->...ab", theta, self.A))

    def identity(self):
        return np.zeros(self.n + self.k)

    def multiply(self, g, h):
        g = np.asarray(g, dtype=float)
        h = np.asarray(h, dtype=float)
        g, h = np.broadcast_arrays(g, h)
        n = self.n
        v = g[..., :n] + np.einsum("...ab,...b->...a", self.rho(g[..., n:]), h[..., :n])
        return self._wrap(np.concatenate([v, g[..., n:] + h[..., n:]], axis=-1))

    def inverse(self, g):
        g = np.asarray(g, dtype=float)
        n = self.n
        v = -np.einsum("...ab,...b->...a", self.rho(-g[..., n:]), g[..., :n])
        return self._wrap(np.concatenate([v, -g[..., n:]], axis=-1))

    def _phi(self, theta):
        """``int_0^1 exp(s sum theta_j A_j) ds`` via an augmented exponential."""
        n = self.n
        theta = np.asarray(theta, dtype=float)
        M = np.zeros(theta.shape[:-1] + (2 * n, 2 * n))
        M[..., :n, :n] = np.einsum("...j,jab->...ab", theta, self.A)
        M[..., :n, n:] = np.eye(n)
        return expm(M)[..., :n, n:]

    def exp(self, Y):
        Y = np.asarray(Y, dtype=float)
        n = self.n
        v = np.einsum("...ab,...b->...a", self._phi(Y[..., n:]), Y[..., :n])
        return self._wrap(np.concatenate([v, Y[..., n:]], axis=-1))

    def log(self, g):
        g = self._wrap(g)
        n = self.n
        P = self._phi(g[..., n:])
        if np.any(np.abs(np.linalg.det(P)) < 1e-10):
            raise ChartError("element outside chart: translation part not reachable by exp")
        z = np.linalg.solve(P, g[..., :n, None])[..., 0]
        return np.concatenate([z, g[..., n:]], axis=-1)

    def distance(self, g, h):
        d = np.asarray(g, dtype=float) - np.asarray(h, dtype=float)
        d = self._wrap(d)
        return np.linalg.norm(d, axis=-1)

    def coordinate_names(self):
        names = self.algebra.basis_names
        return [f"v_{names[i]}" for i in range(self.n)] + [f"theta_{names[self.n + j]}" for j in range(self.k)]

    def translation_block(self, D) -> np.ndarray:
        """``Dv`` for derivations ``D = Dv (+) 0``; other shapes are rejected."""
        D = self.check_derivation(D)
        n = self.n
        if np.max(np.abs(D[n:, :]), initial=0.0) > 1e-12 or np.max(np.abs(D[:n, n:]), initial=0.0) > 1e-12:
            raise AlgebraError(
                "semidirect charts support derivations acting on translations only (D = Dv + 0)"
            )
        return np.ascontiguousarray(D[:n, :n])

    def flow(self, D, g, t):
        Dv = self.translation_block(D)
        g = np.asarray(g, dtype=float)
        n = self.n
        v = g[..., :n] @ expm(t * Dv).T
        return np.concatenate([v, g[..., n:]], axis=-1)
