"""Trajectories of linear control systems and the empirical checks built on them.

Matrix realizations are solved exactly piece by piece: on a piece with
constant control ``u`` the solution is ``exp(t(X0 + U)) x exp(-t X0)``.
Chart realizations use fixed-step RK4 (step ``1e-3``) through the kernels in
:mod:`lielcs.kernels`; zero-control pieces use the exact drift flow.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.spatial.distance import pdist

from . import kernels
from .algebra import is_abelian
from .groups import ChartError, MatrixGroup, NilpotentGroup, SemidirectGroup
from .jordan import contraction_constants, dynamical_split
from .model import ControlSignal, LCSSpec, SpecError, drift_flow, g0_compactness, larc_check

CHART_STEP = 1e-3
UNBOUNDED_GAUGE = 1e3


def workers() -> int:
    """Worker count from ``LCS_WORKERS`` (default: machine parallelism)."""
    try:
        return max(1, int(os.environ.get("LCS_WORKERS", "")))
    except ValueError:
        return os.cpu_count() or 1


# --------------------------------------------------------------------------
# Core batched integration


def _output_times(breakpoints, T, dt_out):
    n = int(math.floor(T / dt_out + 1e-9))
    grid = np.arange(n + 1) * dt_out
    t = np.concatenate([grid, breakpoints[breakpoints < T], [T]])
    t = np.sort(t[t <= T])
    keep = np.concatenate([[True], np.diff(t) > 1e-12])
    t = t[keep]
    t[-1] = T
    return t


def _segments_matrix(spec, G: MatrixGroup, x, U, taus, pieces, method):
    X0h = G.hat(spec.inner_vector)
    out = [x]
    cache = {}
    for tau, p in zip(taus, pieces):
        if method == "rk4":
            x = _matrix_rk4(X0h, G.hat(U[:, p]), x, tau)
        else:
            key = (p, round(tau, 14))
            if key not in cache:
                cache[key] = (expm(tau * (X0h[None] + G.hat(U[:, p]))), expm(-tau * X0h))
            L, R = cache[key]
            x = L @ x @ R
        out.append(x)
    return out


def _matrix_rk4(X0h, Uh, x, tau):
    """Generic RK4 for ``x' = (X0 + U) x - x X0`` (cross-check route)."""
    nsteps = max(1, int(math.ceil(tau / CHART_STEP - 1e-9)))
    h = tau / nsteps
    M = X0h[None] + Uh

    def f(y):
        return M @ y - y @ X0h

    for _ in range(nsteps):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def _segments_nilpotent(spec, G: NilpotentGroup, x, U, taus, pieces):
    D = np.ascontiguousarray(spec.derivation, dtype=float)
    coeffs = np.ascontiguousarray(G.field_coefficients)
    out = [x]
    y = np.ascontiguousarray(x, dtype=float).copy()
    for tau, p in zip(taus, pieces):
        Up = np.ascontiguousarray(U[:, p])
        if not np.any(Up):
            y = np.ascontiguousarray(y @ expm(tau * D).T)
        else:
            nsteps = max(1, int(math.ceil(tau / CHART_STEP - 1e-9)))
            kernels.rk4_exp_coords(y, Up, D, G.C, coeffs, tau / nsteps, nsteps)
        out.append(y.copy())
    return out


def _segments_semidirect(spec, G: SemidirectGroup, x, U, taus, pieces):
    Dv = G.translation_block(spec.derivation)
    n = G.n
    out = [x]
    y = np.ascontiguousarray(x, dtype=float).copy()
    for tau, p in zip(taus, pieces):
        Up = U[:, p]
        if not np.any(Up):
            y[:, :n] = y[:, :n] @ expm(tau * Dv).T
        else:
            nsteps = max(1, int(math.ceil(tau / CHART_STEP - 1e-9)))
            Z = np.ascontiguousarray(Up[:, :n])
            W = np.ascontiguousarray(Up[:, n:])
            kernels.rk4_semidirect(y, Z, W, Dv, G.A, tau / nsteps, nsteps)
        y = np.ascontiguousarray(G._wrap(y))
        out.append(y.copy())
    return out


def _simulate_chunk(spec, x0, values, breakpoints, times, method):
    G = spec.group
    U = spec.control_vector(values)  # (B, P, dim)
    taus = np.diff(times)
    pieces = np.searchsorted(breakpoints, times[:-1], side="right") - 1
    # overflow is reported below as a chart exit
    with np.errstate(over="ignore", invalid="ignore"):
        if isinstance(G, MatrixGroup):
            pts = _segments_matrix(spec, G, x0, U, taus, pieces, method)
        elif isinstance(G, NilpotentGroup):
            pts = _segments_nilpotent(spec, G, x0, U, taus, pieces)
        elif isinstance(G, SemidirectGroup):
            pts = _segments_semidirect(spec, G, x0, U, taus, pieces)
        else:
            raise TypeError(f"unsupported realization {type(G).__name__}")
    points = np.stack(pts, axis=1)
    axes = tuple(range(2, points.ndim))
    finite = np.all(np.isfinite(points), axis=axes) if axes else np.isfinite(points)
    if not np.all(finite):
        first_bad = int(np.argmin(np.all(finite, axis=0)))
        raise ChartError(f"trajectory left the chart; last valid time {times[max(first_bad - 1, 0)]:.6g}")
    return points


def simulate_batch(spec: LCSSpec, x0, values, breakpoints, T: float, dt_out: float,
                   method: str = "auto"):
    """Integrate a batch of controls sharing breakpoints.

    Parameters
    ----------
    x0 : array
        One element, or a batch with a leading axis matching ``values``.
    values : array, shape (B, P, m)
        Control values per trajectory and piece.
    breakpoints : array, shape (P,)
        Piece start times, ``breakpoints[0] == 0``.

    Returns
    -------
    times : array, shape (T_out,)
    points : array, shape (B, T_out) + element shape
    """
    if not (T > 0 and math.isfinite(T)):
        raise SpecError("horizon must be positive and finite")
    if not (dt_out > 0 and math.isfinite(dt_out)):
        raise SpecError("output step must be positive and finite")
    values = np.asarray(values, dtype=float)
    if values.ndim != 3 or values.shape[2] != spec.m:
        raise SpecError(f"control values must have shape (B, P, {spec.m})")
    if not spec.in_omega(values):
        raise SpecError("control values leave the control range")
    breakpoints = np.asarray(breakpoints, dtype=float)
    if breakpoints.shape != (values.shape[1],) or breakpoints[0] != 0.0:
        raise SpecError("breakpoints must start at 0 with one entry per piece")
    B = values.shape[0]
    shape = spec.group.element_shape
    x0 = np.asarray(x0, dtype=float)
    if x0.shape == shape:
        x0 = np.broadcast_to(x0, (B,) + shape)
    if x0.shape != (B,) + shape:
        raise SpecError(f"initial condition shape {x0.shape} does not match {(B,) + shape}")
    x0 = np.ascontiguousarray(x0)
    times = _output_times(breakpoints, T, dt_out)
    nw = min(workers(), B)
    if nw <= 1 or B < 8:
        return times, _simulate_chunk(spec, x0, values, breakpoints, times, method)
    bounds = np.linspace(0, B, nw + 1).astype(int)
    with ThreadPoolExecutor(max_workers=nw) as pool:
        futures = [
            pool.submit(_simulate_chunk, spec, x0[a:b], values[a:b], breakpoints, times, method)
            for a, b in zip(bounds[:-1], bounds[1:])
            if b > a
        ]
        parts = [f.result() for f in futures]
    return times, np.concatenate(parts, axis=0)


# --------------------------------------------------------------------------
# Single trajectories


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    points: np.ndarray
    control: ControlSignal
    gauge: np.ndarray
    coordinate_names: tuple[str, ...] = ()

    def to_csv(self, fh) -> None:
        coords = self.points.reshape(len(self.times), -1)
        header = ["time", "gauge"] + list(self.coordinate_names)
        fh.write(",".join(header) + "\n")
        for t, g, row in zip(self.times, self.gauge, coords):
            fh.write(",".join(repr(float(v)) for v in (t, g, *row)) + "\n")


def integrate(spec: LCSSpec, x0, u: ControlSignal, T: float, dt_out: float,
              method: str = "auto") -> Trajectory:
    """Trajectory of ``spec`` from ``x0`` under ``u`` on ``[0, T]``.

    ``method="rk4"`` forces the generic one-step solver on matrix
    realizations (used to cross-validate the exact solver).
    """
    if u.m != spec.m:
        raise SpecError(f"control has {u.m} channels, system has {spec.m}")
    if not (T > 0 and math.isfinite(T)):
        raise SpecError("horizon must be positive and finite")
    if u.end < T:
        raise SpecError(f"control defined only up to {u.end}, horizon is {T}")
    keep = u.breakpoints < T
    times, pts = simulate_batch(spec, x0, u.values[keep][None], u.breakpoints[keep], T, dt_out, method)
    points = pts[0]
    gauge = spec.group.distance_to_identity(points)
    return Trajectory(times, points, u, gauge, tuple(spec.group.coordinate_names()))


# --------------------------------------------------------------------------
# Random controls and reachable sets


def random_control_values(spec: LCSSpec, n: int, pieces: int, seed: int, start: int = 0) -> np.ndarray:
    """Per-sample control values: Omega vertices with probability 1/2, else uniform.

    Sample ``i`` draws from its own stream seeded by ``(seed, start + i)``.
    """
    out = np.empty((n, pieces, spec.m))
    for i in range(n):
        rng = np.random.default_rng([seed, start + i])
        vertex = rng.random(pieces) < 0.5
        signs = rng.choice([-1.0, 1.0], size=(pieces, spec.m))
        interior = rng.uniform(-1.0, 1.0, size=(pieces, spec.m))
        out[i] = np.where(vertex[:, None], signs, interior) * spec.omega
    return out


def vertex_control_values(spec: LCSSpec, n: int, pieces: int, seed: int) -> np.ndarray:
    out = np.empty((n, pieces, spec.m))
    for i in range(n):
        rng = np.random.default_rng([seed, i, 1])
        out[i] = rng.choice([-1.0, 1.0], size=(pieces, spec.m)) * spec.omega
    return out


@dataclass(frozen=True, eq=False)
class ReachSample:
    horizon: float
    points: np.ndarray
    controls_used: int
    max_gauge: float
    seed: int
    pieces: int
    times: np.ndarray | None = field(default=None, repr=False)
    trajectories: np.ndarray | None = field(default=None, repr=False)

    def to_json(self, group=None) -> dict:
        pts = self.points.reshape(len(self.points), -1)
        return {
            "seed": self.seed,
            "horizon": self.horizon,
            "pieces": self.pieces,
            "controls_used": self.controls_used,
            "max_gauge": self.max_gauge,
            "points": pts.tolist(),
        }


def reach_sample(spec: LCSSpec, horizon: float, n_controls: int, pieces: int, seed: int,
                 x0=None, dt_out: float | None = None, keep_trajectories: bool = False,
                 values=None) -> ReachSample:
    """Endpoints of random trajectories from ``x0`` (identity by default).

    The running maximum of the gauge is taken over every output sample, so
    the result also probes the reachable set up to ``horizon``.
    """
    if not horizon > 0:
        raise SpecError("horizon must be positive")
    if values is None:
        values = random_control_values(spec, n_controls, pieces, seed)
    else:
        values = np.asarray(values, dtype=float)
    pieces = values.shape[1]
    bp = np.arange(pieces) * (horizon / pieces)
    dt_out = dt_out or horizon / 200.0
    x0 = spec.group.identity() if x0 is None else x0
    times, pts = simulate_batch(spec, x0, values, bp, horizon, dt_out)
    gauge = spec.group.distance_to_identity(pts)
    return ReachSample(
        horizon=float(horizon),
        points=pts[:, -1],
        controls_used=len(values),
        max_gauge=float(np.max(gauge)),
        seed=seed,
        pieces=pieces,
        times=times if keep_trajectories else None,
        trajectories=pts if keep_trajectories else None,
    )


# --------------------------------------------------------------------------
# Cocycle


def _random_element(spec, rng, scale=1.0):
    Y = rng.uniform(-scale, scale, spec.group.dim)
    return spec.group.exp(Y)


def cocycle_check(spec: LCSSpec, samples: int, seed: int = 0, max_pieces: int = 5) -> float:
    """Largest ``dist(phi(t, gh, u), phi(t, g, u) phi_t(h))`` over random draws."""
    G = spec.group
    worst = 0.0
    for i in range(samples):
        rng = np.random.default_rng([seed, i, 7])
        g = _random_element(spec, rng)
        h = _random_element(spec, rng)
        t = float(rng.uniform(0.0, 5.0)) or 5.0
        pieces = int(rng.integers(1, max_pieces + 1))
        vals = rng.uniform(-1.0, 1.0, (pieces, spec.m)) * spec.omega
        bp = np.sort(np.concatenate([[0.0], rng.uniform(0.0, t, pieces - 1)]))
        bp = np.unique(bp)
        vals = vals[: len(bp)]
        x0 = np.stack([G.multiply(g, h), g])
        _, pts = simulate_batch(spec, x0, np.stack([vals, vals]), bp, t, t)
        lhs = pts[0, -1]
        rhs = G.multiply(pts[1, -1], drift_flow(spec, h, t))
        scale = max(1.0, float(G.distance_to_identity(rhs)))
        worst = max(worst, float(G.distance(lhs, rhs)) / scale)
    return worst


# --------------------------------------------------------------------------
# Boundedness


@dataclass(frozen=True)
class BoundednessVerdict:
    verdict: str
    sup_gauge: float
    growth_exponent_estimate: float
    growth_rate_estimate: float = 0.0
    growth_kind: str = "none"

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _fit(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    ss = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - float(np.sum((y - pred) ** 2)) / ss if ss > 0 else 1.0
    return float(coef[0]), r2


def classify_gauge(times, gauge) -> BoundednessVerdict:
    """Tri-state boundedness verdict for a gauge curve.

    Unbounded needs ``sup > 1e3`` and a positive growth slope; bounded needs
    the last-quarter maximum within 5% of the maximum over the middle half.
    """
    times = np.asarray(times, dtype=float)
    gauge = np.asarray(gauge, dtype=float)
    T = times[-1]
    sup = float(np.max(gauge))
    tail = (times >= 0.5 * T) & (times > 0) & (gauge > 0)
    p = r = 0.0
    kind = "none"
    if np.count_nonzero(tail) >= 3:
        lt, lg = np.log(times[tail]), np.log(gauge[tail])
        p, r2_pow = _fit(lt, lg)
        r, r2_exp = _fit(times[tail], lg)
        if p > 0 or r > 0:
            kind = "exponential" if r2_exp > r2_pow else "polynomial"
    if sup > UNBOUNDED_GAUGE and (p > 0 or r > 0):
        verdict = "unbounded"
    else:
        last = gauge[times >= 0.75 * T]
        mid = gauge[(times >= 0.25 * T) & (times <= 0.75 * T)]
        if np.max(last) <= 1.05 * np.max(mid):
            verdict = "bounded"
        else:
            verdict = "inconclusive"
    return BoundednessVerdict(verdict, sup, p, r, kind)


def boundedness_probe(spec: LCSSpec, x0, u: ControlSignal, horizon: float,
                      project=None, target_group=None, dt_out: float | None = None) -> BoundednessVerdict:
    """Integrate and classify the (optionally projected) gauge curve.

    ``project`` maps batches of elements to elements of ``target_group``;
    it implements an output homomorphism.
    """
    if horizon < 50:
        raise SpecError("boundedness probes need a horizon of at least 50")
    traj = integrate(spec, x0, u, horizon, dt_out or horizon / 1000.0)
    if project is None:
        gauge = traj.gauge
    else:
        gauge = target_group.distance_to_identity(project(traj.points))
    return classify_gauge(traj.times, gauge)


# --------------------------------------------------------------------------
# Stable / unstable manifolds


@dataclass(frozen=True)
class StableManifoldReport:
    passed: bool
    t_final: float
    minus_trials: int
    minus_failures: int
    worst_minus_gauge: float
    plus_trials: int
    plus_failures: int
    smallest_plus_peak: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def stable_manifold_probe(spec: LCSSpec, trials: int, seed: int = 0,
                          plus_component_min: float = 0.01) -> StableManifoldReport:
    """Random starts in ``exp(g^-)`` must contract to ``e``; starts with a
    ``g^+`` component of size at least ``plus_component_min`` must leave the
    ball of gauge ``1e3``, both by ``t = 40 / lambda``."""
    split = dynamical_split(spec.derivation, with_constants=False)
    if split.minus.is_trivial:
        raise SpecError("stable manifold probe needs a nontrivial stable subspace")
    G = spec.group
    t_final = 40.0 / split.lambda_min_abs
    Qm, Qp = split.minus.basis_matrix, split.plus.basis_matrix
    proj = split.oblique_projectors()
    Pm, P0 = proj["minus"], proj["zero"]
    worst = 0.0
    mfail = 0
    for i in range(trials):
        rng = np.random.default_rng([seed, i, 11])
        a = rng.normal(size=Qm.shape[1])
        a *= rng.uniform(0.0, 1.0) / np.linalg.norm(a)
        end = G.distance_to_identity(drift_flow(spec, G.exp(Qm @ a), t_final))
        worst = max(worst, float(end))
        mfail += int(end >= 1e-6)
    pfail = 0
    smallest_peak = math.inf
    ptrials = trials if not split.plus.is_trivial else 0
    grid = np.linspace(0.0, t_final, 401)[1:]
    for i in range(ptrials):
        rng = np.random.default_rng([seed, i, 13])
        b = rng.normal(size=Qp.shape[1])
        b *= rng.uniform(plus_component_min, 1.0) / np.linalg.norm(b)
        rest = rng.uniform(-1.0, 1.0, G.dim)
        Y = Qp @ b + Pm @ rest + P0 @ rest
        g = G.exp(Y)
        peak = 0.0
        for t in grid:
            peak = max(peak, float(G.distance_to_identity(drift_flow(spec, g, t))))
            if peak > UNBOUNDED_GAUGE:
                break
        smallest_peak = min(smallest_peak, peak)
        pfail += int(peak <= UNBOUNDED_GAUGE)
    return StableManifoldReport(
        passed=(mfail == 0 and pfail == 0),
        t_final=t_final,
        minus_trials=trials,
        minus_failures=mfail,
        worst_minus_gauge=worst,
        plus_trials=ptrials,
        plus_failures=pfail,
        smallest_plus_peak=smallest_peak if ptrials else float("nan"),
    )


# --------------------------------------------------------------------------
# Uniform bound on the G^- factor of reachable points


class NotBoundedType(SpecError):
    """The system does not satisfy the hypotheses of the bounded-orbit bound."""


def minus_component(spec: LCSSpec, split, points) -> np.ndarray:
    """Coordinates of the ``G^-`` factor of ``g = a k`` (``a`` in ``G^-``,
    ``k`` in ``G^0``) in the orthonormal basis of ``g^-``.

    Supported when ``G^-`` is a vector group sitting in the chart linearly:
    abelian exponential coordinates, or translations of a semidirect chart.
    """
    G = spec.group
    P = split.oblique_projectors()["minus"]
    Q = split.minus.basis_matrix
    pts = np.asarray(points, dtype=float)
    if isinstance(G, NilpotentGroup) and is_abelian(G.algebra):
        return pts @ (Q.T @ P).T
    if isinstance(G, SemidirectGroup):
        lifted = np.concatenate([pts[..., : G.n], np.zeros(pts.shape[:-1] + (G.k,))], axis=-1)
        return lifted @ (Q.T @ P).T
    raise NotBoundedType(
        f"G^- component extraction is not implemented for {G.kind} realization {G.name}"
    )


@dataclass(frozen=True, eq=False)
class MainBound:
    R: float
    c: float
    lam: float
    diam_K: float
    metric: np.ndarray = field(repr=False)
    samples: int = 0

    def to_json(self) -> dict:
        return {"R": self.R, "c": self.c, "lambda": self.lam, "diam_K": self.diam_K,
                "metric": self.metric.tolist(), "samples": self.samples}


def _require_bounded_type(spec, split):
    if not split.plus.is_trivial:
        raise NotBoundedType(f"g^+ is nontrivial (dim {split.plus.dim})")
    if split.minus.is_trivial:
        raise NotBoundedType("g^- is trivial; no contraction rate exists")
    compact = g0_compactness(spec, split)
    if compact.value is not True:
        raise NotBoundedType(f"G^0 is not known to be compact ({compact.note})")


def minus_gauge(spec, split, metric, points) -> np.ndarray:
    a = minus_component(spec, split, points)
    return np.sqrt(np.einsum("...i,ij,...j->...", a, metric, a))


def theorem_main_bound(spec: LCSSpec, seed: int = 0, n_samples: int = 2000,
                       pieces: int = 4, metric=None) -> MainBound:
    """``R = diam(K) / (c (1 - exp(-lam)))`` bounding the ``G^-`` factor of
    every point reachable from the identity.

    ``K`` is estimated from the ``G^-`` factors of a horizon-1 reach sample;
    distances use the adapted metric on ``g^-``.
    """
    from .stability import build_adapted_metric

    split = dynamical_split(spec.derivation, with_constants=False)
    _require_bounded_type(spec, split)
    if not is_abelian_subspace(spec, split.minus):
        raise NotBoundedType("g^- is not abelian; adapted distance on G^- not implemented")
    M = build_adapted_metric(spec) if metric is None else np.asarray(metric, dtype=float)
    c, lam = contraction_constants(split, spec.derivation, metric=M)
    sample = reach_sample(spec, 1.0, n_samples, pieces, seed, dt_out=0.05)
    a = minus_component(spec, split, sample.points)
    L = np.linalg.cholesky(M)
    pts = np.vstack([a @ L, np.zeros((1, a.shape[1]))])  # identity is in the closure
    diam = float(np.max(pdist(pts))) if len(pts) > 1 else 0.0
    R = diam / (c * (1.0 - math.exp(-lam)))
    return MainBound(R, c, lam, diam, M, n_samples)


def is_abelian_subspace(spec, sub) -> bool:
    from .algebra import bracket_closure_residual, bracket

    B = sub.basis_matrix
    for i in range(sub.dim):
        for j in range(i + 1, sub.dim):
            if np.linalg.norm(bracket(spec.group.algebra, B[:, i], B[:, j])) > 1e-9:
                return False
    return True


# --------------------------------------------------------------------------
# Control sets


@dataclass(frozen=True)
class ControlSetEstimate:
    is_compact_candidate: bool
    hull_gauge: float
    identity_in_closure: bool
    forward_verdict: BoundednessVerdict
    backward_max_gauge: float
    return_gauges: tuple[float, ...]

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["forward_verdict"] = self.forward_verdict.to_json()
        d["return_gauges"] = list(self.return_gauges)
        return d


def _return_search(spec, x, seed, n, drive_time=8.0, rest_time=8.0, pieces=4, rounds=15):
    """Smallest gauge reached from ``x`` by a driven phase then zero control.

    Random controls first, then a cross-entropy refinement of the best ones.
    """
    bp = np.concatenate([np.arange(pieces) * (drive_time / pieces), [drive_time]])
    rng = np.random.default_rng([seed, 17])

    def evaluate(vals):
        full = np.concatenate([vals, np.zeros((len(vals), 1, spec.m))], axis=1)
        T = drive_time + rest_time
        _, pts = simulate_batch(spec, x, full, bp, T, T)
        return spec.group.distance_to_identity(pts[:, -1])

    vals = random_control_values(spec, n, pieces, seed)
    scores = evaluate(vals)
    best = float(np.min(scores))
    n_elite = max(4, n // 10)
    for _ in range(rounds):
        if best < 1e-3:  # margin below the 1e-2 acceptance radius
            break
        elite = vals[np.argsort(scores)[:n_elite]]
        mu, sd = elite.mean(axis=0), elite.std(axis=0) + 1e-3 * spec.omega
        vals = np.clip(mu + sd * rng.standard_normal((n,) + mu.shape), -spec.omega, spec.omega)
        scores = evaluate(vals)
        best = min(best, float(np.min(scores)))
    return best


def estimate_control_set(spec: LCSSpec, horizon: float, n: int, seed: int = 0,
                         probes: int = 20, pieces: int = 10) -> ControlSetEstimate:
    """Empirical evidence that the closure of the orbit from ``e`` is a
    compact control set: bounded forward samples, and return to ``e`` from
    sampled points."""
    if not larc_check(spec).holds:
        raise SpecError("control set estimation requires the Lie algebra rank condition")
    fwd = reach_sample(spec, horizon, n, pieces, seed, keep_trajectories=True)
    envelope = np.max(spec.group.distance_to_identity(fwd.trajectories), axis=0)
    verdict = classify_gauge(fwd.times, envelope)
    back = reach_sample(spec.time_reversed(), horizon, n, pieces, seed + 1)
    starts = fwd.points[:probes]
    gauges = tuple(_return_search(spec, x, seed + 100 + i, 64) for i, x in enumerate(starts))
    return ControlSetEstimate(
        is_compact_candidate=verdict.verdict == "bounded",
        hull_gauge=fwd.max_gauge,
        identity_in_closure=all(g < 1e-2 for g in gauges),
        forward_verdict=verdict,
        backward_max_gauge=back.max_gauge,
        return_gauges=gauges,
    )
