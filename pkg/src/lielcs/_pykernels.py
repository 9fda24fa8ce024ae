"""Pure numpy versions of the RK4 chart kernels.

Same signatures and in-place semantics as the compiled module; the batch
dimension is vectorized, the time loop runs in Python.
"""

import numpy as np


def _exp_field(Y, U, D, C, coeffs):
    out = Y @ D.T + coeffs[0] * U
    term = U
    for c in coeffs[1:]:
        term = np.einsum("bi,bj,ijk->bk", Y, term, C)
        out = out + c * term
    return out


def rk4_exp_coords(Y, U, D, C, coeffs, h, nsteps):
    """Exponential-coordinate field ``DY + sum_k coeffs[k] ad_Y^k U``."""
    if len(coeffs) <= 2:
        # at most one bracket: the field is affine in Y for fixed U
        L = np.einsum("bj,ijk->bki", U, C)  # L @ y == ad_y U
        M = D[None] + (coeffs[1] if len(coeffs) == 2 else 0.0) * L
        f = lambda y: np.einsum("bij,bj->bi", M, y) + coeffs[0] * U
    else:
        f = lambda y: _exp_field(y, U, D, C, coeffs)
    y = Y.copy()
    for _ in range(nsteps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    Y[...] = y


def rk4_semidirect(X, Z, W, Dv, A, h, nsteps):
    """Semidirect chart field ``v' = Dv v + z + sum_l w_l A_l v``, ``theta' = w``."""
    n = Dv.shape[0]
    M = Dv[None] + np.einsum("bl,lij->bij", W, A)

    def f(x):
        v = np.einsum("bij,bj->bi", M, x[:, :n]) + Z
        return np.concatenate([v, W], axis=1)

    x = X.copy()
    for _ in range(nsteps):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    X[...] = x
