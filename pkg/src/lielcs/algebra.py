"""Finite-dimensional real Lie algebras given by structure constants.

Everything here works in coordinates with respect to a fixed basis
``e_0, ..., e_{n-1}``.  Vectors are 1-D float arrays, linear operators are
square matrices acting on column coordinates, and subspaces are stored as
orthonormal column bases.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

#: Absolute singular-value threshold used for every rank decision.
RANK_TOL = 1e-9
JACOBI_TOL = 1e-10
LEIBNIZ_TOL = 1e-10


class AlgebraError(ValueError):
    """Invalid algebra data or incompatible dimensions."""


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Real Lie algebra with ``[e_i, e_j] = sum_k c[i, j, k] e_k``."""

    name: str
    structure_constants: np.ndarray
    basis_names: tuple[str, ...] = ()

    def __post_init__(self):
        c = np.array(self.structure_constants, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise AlgebraError(f"structure constants must be n x n x n, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise AlgebraError("structure constants must be finite")
        if np.max(np.abs(c + c.transpose(1, 0, 2)), initial=0.0) > 1e-12:
            raise AlgebraError("structure constants are not antisymmetric")
        c.setflags(write=False)
        object.__setattr__(self, "structure_constants", c)
        names = tuple(self.basis_names) or tuple(f"e{i + 1}" for i in range(c.shape[0]))
        if len(names) != c.shape[0]:
            raise AlgebraError("basis_names length does not match dimension")
        object.__setattr__(self, "basis_names", names)

    @property
    def dim(self) -> int:
        return self.structure_constants.shape[0]

    @classmethod
    def from_brackets(cls, name, dim, brackets, basis_names=()):
        """Build from a sparse list ``(i, j, k, value)`` with i < j.

        Antisymmetry is filled in automatically.
        """
        c = np.zeros((dim, dim, dim))
        for i, j, k, value in brackets:
            if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
                raise AlgebraError(f"bracket index out of range: {(i, j, k)}")
            if i == j:
                raise AlgebraError(f"diagonal bracket entry {(i, j, k)}")
            c[i, j, k] = value
            c[j, i, k] = -value
        return cls(name, c, tuple(basis_names))

    def basis(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim)
        v[i] = 1.0
        return v

    def to_json(self) -> dict:
        c = self.structure_constants
        entries = [
            [i, j, k, float(c[i, j, k])]
            for i in range(self.dim)
            for j in range(i + 1, self.dim)
            for k in range(self.dim)
            if c[i, j, k] != 0.0
        ]
        return {
            "name": self.name,
            "dim": self.dim,
            "basis": list(self.basis_names),
            "structure_constants": entries,
        }


def algebra_from_json(doc: dict) -> LieAlgebra:
    try:
        dim = int(doc["dim"])
        name = str(doc.get("name", "custom"))
        basis = doc.get("basis") or ()
        entries = doc.get("structure_constants", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise AlgebraError(f"malformed algebra document: {exc}") from exc
    if dim <= 0:
        raise AlgebraError("dim must be positive")
    for entry in entries:
        if len(entry) != 4:
            raise AlgebraError(f"structure constant entry must be [i, j, k, value]: {entry}")
        if not entry[0] < entry[1]:
            raise AlgebraError(f"structure constant entries need i < j: {entry}")
    return LieAlgebra.from_brackets(
        name, dim, [(int(i), int(j), int(k), float(v)) for i, j, k, v in entries], basis
    )


def load_algebra(path) -> LieAlgebra:
    return algebra_from_json(json.loads(Path(path).read_text()))


def _vec(alg: LieAlgebra, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (alg.dim,):
        raise AlgebraError(f"expected a vector of length {alg.dim}, got shape {x.shape}")
    return x


def _op(alg: LieAlgebra, D) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    if D.shape != (alg.dim, alg.dim):
        raise AlgebraError(f"expected a {alg.dim}x{alg.dim} operator, got shape {D.shape}")
    if not np.all(np.isfinite(D)):
        raise AlgebraError("operator has non-finite entries")
    return D


def bracket(alg: LieAlgebra, x, y) -> np.ndarray:
    """Lie bracket ``[x, y]`` in basis coordinates."""
    return np.einsum("i,j,ijk->k", _vec(alg, x), _vec(alg, y), alg.structure_constants)


def ad(alg: LieAlgebra, x) -> np.ndarray:
    """Matrix of ``ad(x) = [x, .]``; column j is ``[x, e_j]``."""
    return np.einsum("i,ijk->kj", _vec(alg, x), alg.structure_constants)


def ad_basis(alg: LieAlgebra) -> np.ndarray:
    """Stack of ``ad(e_i)`` matrices, shape ``(dim, dim, dim)``."""
    return alg.structure_constants.transpose(0, 2, 1).copy()


def check_jacobi(alg: LieAlgebra, tol: float = JACOBI_TOL) -> tuple[bool, float]:
    """Largest Jacobi residual over all basis triples."""
    c = alg.structure_constants
    # [[e_i, e_j], e_k] expanded through the structure constants
    double = np.einsum("ijm,mkl->ijkl", c, c)
    cyc = double + double.transpose(1, 2, 0, 3) + double.transpose(2, 0, 1, 3)
    residual = float(np.max(np.abs(cyc), initial=0.0))
    return residual <= tol, residual


def leibniz_residual(alg: LieAlgebra, D) -> float:
    D = _op(alg, D)
    c = alg.structure_constants
    lhs = np.einsum("ijk,lk->ijl", c, D)  # D[e_i, e_j]
    # [D e_i, e_j] + [e_i, D e_j]
    rhs = np.einsum("ai,ajk->ijk", D, c) + np.einsum("bj,ibk->ijk", D, c)
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def is_derivation(alg: LieAlgebra, D, tol: float = LEIBNIZ_TOL) -> tuple[bool, float]:
    r = leibniz_residual(alg, D)
    return r <= tol, r


def require_derivation(alg: LieAlgebra, D) -> np.ndarray:
    D = _op(alg, D)
    ok, r = is_derivation(alg, D)
    if not ok:
        raise AlgebraError(f"operator is not a derivation of {alg.name} (Leibniz residual {r:.3g})")
    return D


def is_abelian(alg: LieAlgebra) -> bool:
    return float(np.max(np.abs(alg.structure_constants), initial=0.0)) <= RANK_TOL


# --------------------------------------------------------------------------
# Subspaces


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of ``R^parent_dim`` spanned by orthonormal columns."""

    parent_dim: int
    basis_matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        B = np.asarray(self.basis_matrix, dtype=float).reshape(self.parent_dim, -1)
        B.setflags(write=False)
        object.__setattr__(self, "basis_matrix", B)

    @property
    def dim(self) -> int:
        return self.basis_matrix.shape[1]

    @property
    def is_trivial(self) -> bool:
        return self.dim == 0

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the subspace."""
        return self.basis_matrix @ self.basis_matrix.T

    def __repr__(self):
        return f"Subspace(parent_dim={self.parent_dim}, dim={self.dim})"


def span(vectors, parent_dim: int | None = None, tol: float = RANK_TOL) -> Subspace:
    """Orthonormalized span of the given vectors (rows or a list)."""
    V = np.asarray(vectors, dtype=float)
    if V.size == 0:
        if parent_dim is None:
            raise AlgebraError("parent_dim required for an empty span")
        return Subspace(parent_dim, np.zeros((parent_dim, 0)))
    V = np.atleast_2d(V)
    n = V.shape[1] if parent_dim is None else parent_dim
    if V.shape[1] != n:
        raise AlgebraError("vector length does not match parent dimension")
    return column_span(V.T, tol)


def column_span(M, tol: float = RANK_TOL) -> Subspace:
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if M.shape[1] == 0:
        return Subspace(n, np.zeros((n, 0)))
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > tol))
    return Subspace(n, U[:, :rank])


def null_space(M, tol: float = RANK_TOL) -> Subspace:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[1]
    if M.shape[0] == 0:
        return Subspace(n, np.eye(n))
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > tol))
    return Subspace(n, Vt[rank:].T)


def full_space(n: int) -> Subspace:
    return Subspace(n, np.eye(n))


def zero_space(n: int) -> Subspace:
    return Subspace(n, np.zeros((n, 0)))


def _same_parent(a: Subspace, b: Subspace):
    if a.parent_dim != b.parent_dim:
        raise AlgebraError(f"subspaces live in different spaces ({a.parent_dim} vs {b.parent_dim})")


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _same_parent(a, b)
    return column_span(np.hstack([a.basis_matrix, b.basis_matrix]))


def intersection(a: Subspace, b: Subspace) -> Subspace:
    _same_parent(a, b)
    if a.is_trivial or b.is_trivial:
        return zero_space(a.parent_dim)
    # x = A s = B t  <=>  [A, -B] (s, t) = 0
    K = null_space(np.hstack([a.basis_matrix, -b.basis_matrix]))
    return column_span(a.basis_matrix @ K.basis_matrix[: a.dim])


def orthogonal_complement(a: Subspace) -> Subspace:
    if a.is_trivial:
        return full_space(a.parent_dim)
    return null_space(a.basis_matrix.T)


def distance_to(a: Subspace, v) -> float:
    """Euclidean distance from ``v`` to the subspace."""
    v = np.asarray(v, dtype=float)
    if v.shape != (a.parent_dim,):
        raise AlgebraError("vector length does not match parent dimension")
    return float(np.linalg.norm(v - a.basis_matrix @ (a.basis_matrix.T @ v)))


def contains(a: Subspace, v, tol: float = RANK_TOL) -> bool:
    v = np.asarray(v, dtype=float)
    return distance_to(a, v) <= tol * max(1.0, float(np.linalg.norm(v)))


def is_subspace_of(a: Subspace, b: Subspace, tol: float = RANK_TOL) -> bool:
    _same_parent(a, b)
    if a.is_trivial:
        return True
    R = a.basis_matrix - b.basis_matrix @ (b.basis_matrix.T @ a.basis_matrix)
    return float(np.max(np.abs(R), initial=0.0)) <= tol


def same_subspace(a: Subspace, b: Subspace, tol: float = RANK_TOL) -> bool:
    return a.dim == b.dim and is_subspace_of(a, b, tol)


def image(M, a: Subspace) -> Subspace:
    """Image of a subspace under a (possibly rectangular) linear map."""
    M = np.asarray(M, dtype=float)
    if M.shape[1] != a.parent_dim:
        raise AlgebraError("map and subspace dimensions disagree")
    return column_span(M @ a.basis_matrix)


def invariance_residual(D, a: Subspace) -> float:
    """Largest component of ``D a`` outside ``a``."""
    D = np.asarray(D, dtype=float)
    DA = D @ a.basis_matrix
    R = DA - a.basis_matrix @ (a.basis_matrix.T @ DA)
    return float(np.max(np.abs(R), initial=0.0))


def restrict(D, a: Subspace) -> np.ndarray:
    """Matrix of ``D|_a`` in the orthonormal basis of an invariant subspace."""
    B = a.basis_matrix
    return B.T @ np.asarray(D, dtype=float) @ B


# --------------------------------------------------------------------------
# Structure


def center(alg: LieAlgebra) -> Subspace:
    """Null space of the stacked ``ad(e_i)`` operators."""
    # z is central iff [e_i, z] = 0 for every i
    stacked = ad_basis(alg).reshape(alg.dim * alg.dim, alg.dim)
    return null_space(stacked)


def killing_form(alg: LieAlgebra) -> np.ndarray:
    """Gram matrix ``K_ij = tr(ad(e_i) ad(e_j))``."""
    A = ad_basis(alg)
    K = np.einsum("iab,jba->ij", A, A)
    return 0.5 * (K + K.T)


COMPACT_TYPE = "compact_semisimple_mod_center"
NOT_COMPACT_TYPE = "not_compact_type"


@dataclass(frozen=True)
class CompactTypeResult:
    classification: str
    killing_eigenvalues: tuple[float, ...]
    witness: tuple[float, ...] | None = None
    reason: str = ""

    @property
    def is_compact_type(self) -> bool:
        return self.classification == COMPACT_TYPE


def is_compact_type(alg: LieAlgebra, tol: float = 1e-9) -> CompactTypeResult:
    """Killing form negative semidefinite with kernel equal to the center."""
    K = killing_form(alg)
    w, V = np.linalg.eigh(K)
    evals = tuple(float(x) for x in w)
    if w[-1] > tol:
        return CompactTypeResult(
            NOT_COMPACT_TYPE, evals, tuple(V[:, -1]), "Killing form has a positive direction"
        )
    kernel = column_span(V[:, np.abs(w) <= tol])
    z = center(alg)
    if not same_subspace(kernel, z, 1e-7):
        extra = orthogonal_complement(z)
        witness_space = intersection(kernel, extra)
        witness = witness_space.basis_matrix[:, 0] if witness_space.dim else kernel.basis_matrix[:, 0]
        return CompactTypeResult(
            NOT_COMPACT_TYPE,
            evals,
            tuple(witness),
            "Killing kernel is strictly larger than the center",
        )
    return CompactTypeResult(COMPACT_TYPE, evals)


def lower_central_series(alg: LieAlgebra) -> list[Subspace]:
    """Dimensions shrink until stable; the last entry is the stable term."""
    series = [full_space(alg.dim)]
    while True:
        cur = series[-1]
        imgs = [
            bracket(alg, alg.basis(i), cur.basis_matrix[:, j])
            for i in range(alg.dim)
            for j in range(cur.dim)
        ]
        nxt = span(imgs, alg.dim) if imgs else zero_space(alg.dim)
        if nxt.dim == cur.dim:
            return series
        series.append(nxt)


def derived_series(alg: LieAlgebra) -> list[Subspace]:
    series = [full_space(alg.dim)]
    while True:
        cur = series[-1]
        B = cur.basis_matrix
        imgs = [bracket(alg, B[:, i], B[:, j]) for i in range(cur.dim) for j in range(i + 1, cur.dim)]
        nxt = span(imgs, alg.dim) if imgs else zero_space(alg.dim)
        if nxt.dim == cur.dim:
            return series
        series.append(nxt)


def is_nilpotent(alg: LieAlgebra) -> bool:
    return lower_central_series(alg)[-1].is_trivial


def is_solvable(alg: LieAlgebra) -> bool:
    return derived_series(alg)[-1].is_trivial


def nilpotency_step(alg: LieAlgebra) -> int:
    """Smallest s with ``g^(s+1) = 0`` in the lower central series."""
    series = lower_central_series(alg)
    if not series[-1].is_trivial:
        raise AlgebraError(f"{alg.name} is not nilpotent")
    return len(series) - 1


def smallest_invariant_subalgebra(alg: LieAlgebra, D, generators) -> Subspace:
    """Closure of ``span(generators)`` under ``D`` and brackets.

    Saturation: repeatedly adjoin ``D`` images and pairwise brackets until
    the rank stops growing.
    """
    D = require_derivation(alg, D)
    gens = [_vec(alg, g) for g in generators]
    S = span(gens, alg.dim) if gens else zero_space(alg.dim)
    for _ in range(alg.dim + 1):
        B = S.basis_matrix
        new = [B[:, i] for i in range(S.dim)]
        new += [D @ B[:, i] for i in range(S.dim)]
        new += [bracket(alg, B[:, i], B[:, j]) for i in range(S.dim) for j in range(i + 1, S.dim)]
        nxt = span(new, alg.dim) if new else zero_space(alg.dim)
        if nxt.dim == S.dim:
            return nxt
        S = nxt
    return S


def bracket_closure_residual(alg: LieAlgebra, S: Subspace) -> float:
    B = S.basis_matrix
    worst = 0.0
    for i in range(S.dim):
        for j in range(i + 1, S.dim):
            worst = max(worst, distance_to(S, bracket(alg, B[:, i], B[:, j])))
    return worst


def subalgebra(alg: LieAlgebra, S: Subspace, name: str | None = None) -> LieAlgebra:
    """Structure constants of a subalgebra in its orthonormal basis."""
    if bracket_closure_residual(alg, S) > 1e-8:
        raise AlgebraError("subspace is not closed under the bracket")
    B = S.basis_matrix
    k = S.dim
    c = np.zeros((k, k, k))
    for i in range(k):
        for j in range(k):
            c[i, j] = B.T @ bracket(alg, B[:, i], B[:, j])
    c = 0.5 * (c - c.transpose(1, 0, 2))
    return LieAlgebra(name or f"sub({alg.name})", c)
