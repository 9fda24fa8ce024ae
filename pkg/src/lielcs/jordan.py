"""Additive Jordan decomposition and the stable/central/unstable splitting.

For a real operator ``A`` we compute commuting parts ``A = E + H + N`` with
``E`` elliptic (semisimple, imaginary spectrum), ``H`` hyperbolic
(semisimple, real spectrum) and ``N`` nilpotent.  The semisimple part is
assembled from spectral projectors onto generalized eigenspaces of the
complexified operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .algebra import (
    LieAlgebra,
    Subspace,
    bracket,
    column_span,
    require_derivation,
    zero_space,
)

CLUSTER_TOL = 1e-7
PART_TOL = 1e-8
SPLIT_TOL = 1e-7


class NumericalError(ArithmeticError):
    """Raised when a decomposition cannot be computed reliably."""


class ClusteringError(NumericalError):
    def __init__(self, message, eigenvalues=()):
        super().__init__(message)
        self.eigenvalues = tuple(eigenvalues)


@dataclass(frozen=True, eq=False)
class JordanDecomposition:
    elliptic: np.ndarray
    hyperbolic: np.ndarray
    nilpotent: np.ndarray
    eigenvalues: tuple[complex, ...]
    # private spectral data reused by the splitting
    clusters: tuple[complex, ...] = ()
    multiplicities: tuple[int, ...] = ()
    projectors: tuple[np.ndarray, ...] = ()

    @property
    def semisimple(self) -> np.ndarray:
        return self.elliptic + self.hyperbolic

    def to_json(self) -> dict:
        return {
            "elliptic": self.elliptic.tolist(),
            "hyperbolic": self.hyperbolic.tolist(),
            "nilpotent": self.nilpotent.tolist(),
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
        }


def _cluster(eigs: np.ndarray, tol: float):
    """Single-linkage clustering; ambiguous gaps raise."""
    n = len(eigs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    dist = np.abs(eigs[:, None] - eigs[None, :])
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i, j] < tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    members = list(groups.values())
    for a in range(len(members)):
        for b in range(a + 1, len(members)):
            gap = np.min(dist[np.ix_(members[a], members[b])])
            if gap < 10 * tol:
                bad = [complex(eigs[members[a][0]]), complex(eigs[members[b][0]])]
                raise ClusteringError(
                    f"eigenvalues {bad[0]:.10g} and {bad[1]:.10g} are {gap:.3g} apart, "
                    f"too close to separate at tolerance {tol:g}",
                    bad,
                )
    return members


def _generalized_eigenspace(A: np.ndarray, lam: complex, mult: int) -> np.ndarray:
    n = A.shape[0]
    M = np.linalg.matrix_power(A - lam * np.eye(n), mult)
    _, s, Vh = np.linalg.svd(M)
    return Vh[n - mult:].conj().T


def _realify(M: np.ndarray, scale: float, what: str) -> np.ndarray:
    residue = float(np.max(np.abs(M.imag), initial=0.0))
    if residue > PART_TOL * max(1.0, scale):
        raise NumericalError(f"{what} has imaginary residue {residue:.3g} after realification")
    return np.ascontiguousarray(M.real)


def jordan_decompose(A, tol: float = CLUSTER_TOL) -> JordanDecomposition:
    """Split ``A`` into commuting elliptic, hyperbolic and nilpotent parts.

    Raises
    ------
    ClusteringError
        If two eigenvalue clusters are within ten times ``tol`` of merging.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"operator must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("operator has non-finite entries")
    n = A.shape[0]
    if n == 0:
        z = np.zeros((0, 0))
        return JordanDecomposition(z, z, z, ())
    eigs = np.linalg.eigvals(A)
    groups = _cluster(eigs, tol)
    centers = [complex(np.mean(eigs[g])) for g in groups]
    mults = [len(g) for g in groups]
    blocks = [_generalized_eigenspace(A, lam, m) for lam, m in zip(centers, mults)]
    W = np.hstack(blocks)
    try:
        Winv = np.linalg.inv(W)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("generalized eigenvectors are not independent") from exc
    projectors = []
    col = 0
    for m, block in zip(mults, blocks):
        projectors.append(block @ Winv[col:col + m])
        col += m
    S = sum(lam * P for lam, P in zip(centers, projectors))
    Hc = sum(lam.real * P for lam, P in zip(centers, projectors))
    scale = float(np.linalg.norm(A))
    S = _realify(S, scale, "semisimple part")
    H = _realify(Hc, scale, "hyperbolic part")
    E = S - H
    N = A - S
    return JordanDecomposition(
        elliptic=E,
        hyperbolic=H,
        nilpotent=N,
        eigenvalues=tuple(complex(z) for z in eigs),
        clusters=tuple(centers),
        multiplicities=tuple(mults),
        projectors=tuple(projectors),
    )


def _vanishes(M: np.ndarray) -> bool:
    return float(np.linalg.norm(M)) < PART_TOL


ELLIPTIC = "elliptic"
HYPERBOLIC = "hyperbolic"
NILPOTENT = "nilpotent"
SEMISIMPLE = "semisimple"
MIXED = "mixed"
ZERO = "zero"


def classify_operator(A) -> str:
    """Name the nonvanishing Jordan parts of ``A``.

    Returns ``"zero"`` when all three parts vanish; otherwise one of
    elliptic, hyperbolic, nilpotent, semisimple or mixed.
    """
    A = np.asarray(A, dtype=float)
    if A.size == 0 or _vanishes(A):
        return ZERO
    jd = jordan_decompose(A)
    e, h, n = (not _vanishes(jd.elliptic), not _vanishes(jd.hyperbolic), not _vanishes(jd.nilpotent))
    if not h and not n:
        return ELLIPTIC
    if not e and not n:
        return HYPERBOLIC
    if not e and not h:
        return NILPOTENT
    if not n:
        return SEMISIMPLE
    return MIXED


# --------------------------------------------------------------------------
# Splitting


@dataclass(frozen=True, eq=False)
class DynamicalSplitting:
    plus: Subspace
    zero: Subspace
    minus: Subspace
    lambda_min_abs: float
    contraction_c: float
    hyperbolic_eigenvalues: tuple[float, ...]
    jordan: JordanDecomposition

    @property
    def dims(self) -> dict:
        return {"plus": self.plus.dim, "zero": self.zero.dim, "minus": self.minus.dim}

    def oblique_projectors(self) -> dict[str, np.ndarray]:
        """Projectors along the direct sum ``plus + zero + minus``."""
        out = {}
        for key, sel in (("plus", lambda r: r > SPLIT_TOL), ("zero", lambda r: abs(r) <= SPLIT_TOL), ("minus", lambda r: r < -SPLIT_TOL)):
            n = self.plus.parent_dim
            P = np.zeros((n, n), dtype=complex)
            for lam, Pl in zip(self.jordan.clusters, self.jordan.projectors):
                if sel(lam.real):
                    P = P + Pl
            out[key] = P.real
        return out


def dynamical_split(A, with_constants: bool = True) -> DynamicalSplitting:
    """Stable, central and unstable subspaces of the hyperbolic part of ``A``."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    jd = jordan_decompose(A)
    parts = {"plus": [], "zero": [], "minus": []}
    nonzero = []
    for lam, P in zip(jd.clusters, jd.projectors):
        r = lam.real
        key = "plus" if r > SPLIT_TOL else "minus" if r < -SPLIT_TOL else "zero"
        parts[key].append(P)
        if key != "zero":
            nonzero.append(abs(r))

    def range_of(Ps):
        if not Ps:
            return zero_space(n)
        return column_span(sum(Ps).real, 1e-7)

    plus, zero, minus = (range_of(parts[k]) for k in ("plus", "zero", "minus"))
    lam_min = min(nonzero) if nonzero else float("inf")
    split = DynamicalSplitting(
        plus=plus,
        zero=zero,
        minus=minus,
        lambda_min_abs=lam_min,
        contraction_c=1.0,
        hyperbolic_eigenvalues=tuple(sorted({round(z.real, 9) for z in jd.clusters})),
        jordan=jd,
    )
    if with_constants and not minus.is_trivial:
        c, _ = contraction_constants(split, A)
        split = DynamicalSplitting(plus, zero, minus, lam_min, c, split.hyperbolic_eigenvalues, jd)
    return split


def _restricted_norms(A, basis, metric, step, count):
    """Norms of ``exp(k step A)`` on ``span(basis)``, ``k = 0..count-1``."""
    Q = basis
    k = Q.shape[1]
    G = np.eye(k) if metric is None else np.asarray(metric, dtype=float)
    # coordinates a in the basis Q; |Qa|_M^2 = a^T G a with G = L L^T
    L = np.linalg.cholesky(G)
    Linv = np.linalg.inv(L)
    R = Q.T @ A @ Q  # restriction; V^- is invariant
    T = L.T @ expm(step * R) @ Linv.T
    out = np.empty(count)
    cur = np.eye(k)
    for i in range(count):
        out[i] = np.linalg.norm(cur, 2)
        cur = T @ cur
    return out


def contraction_constants(split: DynamicalSplitting, A, metric=None, horizon: float = 50.0):
    """Constants ``(c, lam)`` with ``|exp(tA)|_{V^-}| <= exp(-t lam) / c``.

    ``lam`` is the spectral gap shrunk by a 0.1% margin.  ``c`` is the
    largest constant for which the bound holds on the grid
    ``t = 0, 0.1, ..., horizon``.  The bound is re-checked on a grid ten
    times finer, and ``c`` is lowered to the fine-grid value whenever the
    two disagree by more than 5%.

    ``metric`` is an optional Gram matrix in the orthonormal basis of
    ``split.minus``.
    """
    if split.minus.is_trivial:
        raise ValueError("contraction constants need a nontrivial stable subspace")
    A = np.asarray(A, dtype=float)
    lam = split.lambda_min_abs * (1.0 - 1e-3)
    n_fine = int(round(horizon / 0.01)) + 1
    t = np.arange(n_fine) * 0.01
    ratio = _restricted_norms(A, split.minus.basis_matrix, metric, 0.01, n_fine) * np.exp(t * lam)
    cinv = float(np.max(ratio[::10]))
    if np.max(ratio) > 1.05 * cinv:
        cinv = float(np.max(ratio))
    return 1.0 / cinv, lam


def hyperbolic_eigenspaces(jd: JordanDecomposition) -> dict[float, np.ndarray]:
    """Real eigenvalue of the hyperbolic part -> oblique projector onto it."""
    groups: dict[float, np.ndarray] = {}
    keys: list[float] = []
    for lam, P in zip(jd.clusters, jd.projectors):
        r = lam.real
        match = next((k for k in keys if abs(k - r) < SPLIT_TOL), None)
        if match is None:
            keys.append(r)
            groups[r] = P
        else:
            groups[match] = groups[match] + P
    return {k: v.real for k, v in groups.items()}


def verify_grading(alg: LieAlgebra, D) -> tuple[bool, float]:
    """Check ``[g_lam, g_mu]`` lands in ``g_{lam+mu}`` (or vanishes)."""
    D = require_derivation(alg, D)
    jd = jordan_decompose(D)
    spaces = hyperbolic_eigenspaces(jd)
    bases = {k: column_span(P, 1e-7).basis_matrix for k, P in spaces.items()}
    worst = 0.0
    n = alg.dim
    for lam, Bl in bases.items():
        for mu, Bm in bases.items():
            target = next((k for k in spaces if abs(k - (lam + mu)) < SPLIT_TOL), None)
            Pt = spaces[target] if target is not None else np.zeros((n, n))
            for i in range(Bl.shape[1]):
                for j in range(Bm.shape[1]):
                    b = bracket(alg, Bl[:, i], Bm[:, j])
                    worst = max(worst, float(np.max(np.abs(b - Pt @ b), initial=0.0)))
    return worst < PART_TOL, worst
