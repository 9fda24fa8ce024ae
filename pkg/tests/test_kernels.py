import os
import subprocess
import sys

import numpy as np
import pytest

from lielcs import _pykernels, catalog, kernels

try:
    from lielcs import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def _exp_inputs(rng, B=6, d=5, ncoef=4):
    C = rng.normal(size=(d, d, d))
    C = C - C.transpose(1, 0, 2)
    coeffs = np.array([1.0, -0.5, 1.0 / 12, 0.0, -1.0 / 720][:ncoef])
    return (rng.uniform(-0.5, 0.5, (B, d)), rng.uniform(-1, 1, (B, d)),
            rng.normal(size=(d, d)) * 0.3, C, coeffs)


@needs_ext
@pytest.mark.parametrize("ncoef", [1, 2, 3, 5])
def test_exp_coords_backends_agree(ncoef, rng):
    Y, U, D, C, coeffs = _exp_inputs(rng, ncoef=ncoef)
    a, b = Y.copy(), Y.copy()
    _pykernels.rk4_exp_coords(a, U, D, C, coeffs, 1e-3, 500)
    _ckernels.rk4_exp_coords(b, U, D, C, coeffs, 1e-3, 500)
    assert np.max(np.abs(a - b)) < 1e-11
    assert np.max(np.abs(a - Y)) > 1e-3  # something actually moved


@needs_ext
def test_semidirect_backends_agree(rng):
    B, n, k = 7, 2, 1
    X = rng.uniform(-1, 1, (B, n + k))
    Z, W = rng.uniform(-1, 1, (B, n)), rng.uniform(-1, 1, (B, k))
    Dv = np.diag([-1.0, -0.5])
    Agen = np.array([[[0.0, -1.0], [1.0, 0.0]]])
    a, b = X.copy(), X.copy()
    _pykernels.rk4_semidirect(a, Z, W, Dv, Agen, 1e-3, 800)
    _ckernels.rk4_semidirect(b, Z, W, Dv, Agen, 1e-3, 800)
    assert np.max(np.abs(a - b)) < 1e-11


def test_rk4_matches_exact_affine_solution(rng):
    # with one bracket coefficient zeroed the field is linear: y' = D y + u
    d = 3
    Y0 = rng.uniform(-1, 1, (2, d))
    U = rng.uniform(-1, 1, (2, d))
    D = np.diag([-1.0, 0.5, -2.0])
    y = Y0.copy()
    kernels.rk4_exp_coords(y, U, D, np.zeros((d, d, d)), np.array([1.0]), 1e-3, 1000)
    e = np.exp(np.diag(D))
    exact = Y0 * e + U * (e - 1) / np.diag(D)
    assert np.max(np.abs(y - exact)) < 1e-11


def _run(code, pure):
    env = dict(os.environ)
    env.pop("LIELCS_PURE", None)
    if pure:
        env["LIELCS_PURE"] = "1"
    return subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                          text=True, check=True).stdout.strip()


def test_pure_flag_selects_fallback():
    assert _run("import lielcs.kernels as k; print(k.BACKEND)", pure=True) == "python"
    expected = "cython" if _ckernels is not None else "python"
    assert _run("import lielcs.kernels as k; print(k.BACKEND)", pure=False) == expected


def test_simulation_identical_across_backends():
    code = (
        "import numpy as np\n"
        "from lielcs import catalog, simulator\n"
        "for name in ('heisenberg_stable', 'se2_bounded'):\n"
        "    s = simulator.reach_sample(catalog.packaged_scenario(name).spec, 5.0, 20, 4, seed=9)\n"
        "    print(repr(np.round(s.points, 10).ravel().tolist()))\n"
    )
    assert _run(code, pure=True) == _run(code, pure=False)


def test_backend_is_known():
    assert kernels.BACKEND in ("cython", "python")
