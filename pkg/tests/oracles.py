"""Independent oracles shared by the unit and acceptance tests."""

import numpy as np
import sympy as sp


def classical_internal_verdict(M) -> str:
    """Internal verdict of ``x' = Mx`` on R^n from exact rational arithmetic.

    Eigenvalue real parts come from the rational factorization of the
    characteristic polynomial; the critical part is semisimple when
    ``ker q(M) = ker q(M)^2`` for every irreducible factor ``q`` with roots on
    the imaginary axis.
    """
    M = sp.Matrix(M)
    x = sp.Symbol("x")
    _, factors = sp.factor_list(M.charpoly(x).as_expr(), x)
    worst = -1
    critical = []
    for q, _mult in factors:
        roots = sp.Poly(q, x).nroots(n=60)
        re = [sp.re(r) for r in roots]
        if any(r > sp.Float("1e-40") for r in re):
            worst = 1
        elif any(abs(r) <= sp.Float("1e-40") for r in re):
            worst = max(worst, 0)
            critical.append(q)
    if worst == 1:
        return "unstable"
    if worst == -1:
        return "asymptotically_stable"
    n = M.shape[0]
    for q in critical:
        Q = sp.zeros(n, n)
        for k, coeff in enumerate(reversed(sp.Poly(q, x).all_coeffs())):
            Q += coeff * M**k
        if Q.rank() != (Q * Q).rank():
            return "unstable"
    return "stable"


_BLOCKS = {
    "contract": lambda r: [[-int(r.integers(1, 4))]],
    "expand": lambda r: [[int(r.integers(1, 4))]],
    "zero": lambda r: [[0]],
    "rotation": lambda r: (lambda b: [[0, -b], [b, 0]])(int(r.integers(1, 4))),
    "nil2": lambda r: [[0, 1], [0, 0]],
    "spiral_in": lambda r: (lambda a, b: [[-a, -b], [b, -a]])(int(r.integers(1, 3)), int(r.integers(1, 3))),
    "spiral_out": lambda r: (lambda a, b: [[a, -b], [b, a]])(int(r.integers(1, 3)), int(r.integers(1, 3))),
}


def _block_diag(blocks, n):
    J = sp.zeros(n, n)
    k = 0
    for b in blocks:
        B = sp.Matrix(b)
        J[k:k + B.shape[0], k:k + B.shape[0]] = B
        k += B.shape[0]
    return J


def constructed_matrix(rng, n: int = 4) -> sp.Matrix:
    """Rational matrix ``P J P^-1`` with prescribed real Jordan blocks.

    ``P`` is a product of unit triangular integer matrices so ``P^-1`` stays
    integral.  Covers the critical cases random matrices almost never hit.
    """
    names = list(_BLOCKS)
    weights = np.array([3, 1, 2, 3, 2, 3, 1], dtype=float)
    weights /= weights.sum()
    if rng.uniform() < 0.15:
        b = int(rng.integers(1, 3))
        # one Jordan block of size 2 at +-ib: critical but not semisimple
        J = sp.Matrix([[0, -b, 1, 0], [b, 0, 0, 1], [0, 0, 0, -b], [0, 0, b, 0]])
    else:
        blocks, used = [], 0
        while used < n:
            name = names[int(rng.choice(len(names), p=weights))]
            b = _BLOCKS[name](rng)
            if used + len(b) > n:
                continue
            if name == "nil2" and any(len(x) == 1 and x[0][0] == 0 for x in blocks):
                continue  # keep Jordan chains at 0 of length <= 2
            if name == "zero" and any(x == [[0, 1], [0, 0]] for x in blocks):
                continue
            blocks.append(b)
            used += len(b)
        J = _block_diag(blocks, n)
    L = sp.eye(n)
    U = sp.eye(n)
    # sparse entries keep P well conditioned: defective blocks stay resolvable
    for i in range(n):
        for j in range(i):
            if rng.uniform() < 0.3:
                L[i, j] = int(rng.choice([-1, 1]))
            if rng.uniform() < 0.3:
                U[j, i] = int(rng.choice([-1, 1]))
    P = L * U
    return P * J * P.inv()


def random_rational_matrix(rng, n: int = 4) -> sp.Matrix:
    """Matrix with entries in {-2, -3/2, ..., 2}."""
    return sp.Matrix(n, n, [sp.Rational(int(v), 2) for v in rng.integers(-4, 5, n * n)])


def classical_cases(count: int, seed: int, n: int = 4):
    """Half generic rational matrices, half constructed ones with critical spectra."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        M = random_rational_matrix(rng, n) if i % 2 == 0 else constructed_matrix(rng, n)
        out.append((np.array(M.evalf(), dtype=float), classical_internal_verdict(M)))
    return out
