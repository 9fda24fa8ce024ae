"""Command-line front end: ``lielcs {analyze,simulate,verify,catalog}``.

Exit codes: 0 success, 1 a verification suite failed, 2 invalid input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import simulator as sim
from .algebra import AlgebraError, is_compact_type
from .catalog import (
    Scenario,
    ScenarioError,
    derivation_fixtures,
    describe_group,
    group_names,
    catalog_group,
    packaged_scenario,
    packaged_scenario_names,
    resolve_scenario,
)
from .groups import ChartError, MatrixGroup
from .jordan import NumericalError, classify_operator, contraction_constants, dynamical_split, jordan_decompose, verify_grading
from .model import ControlSignal, SpecError, check_decomposability, g0_compactness, larc_check
from .stability import (
    BIBO_STABLE,
    NOT_BIBO_STABLE,
    UnsupportedError,
    bibo_simulation_crosscheck,
    check_conjugation,
    classify_bibo,
    classify_internal,
    induced_target_derivation,
)

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _seed(args, scenario: Scenario) -> int:
    if args.seed is not None:
        return args.seed
    return scenario.seed if scenario.seed is not None else 0


# --------------------------------------------------------------------------
# analyze


def analyze_scenario(sc: Scenario) -> dict:
    spec = sc.spec
    D = spec.derivation
    jd = jordan_decompose(D)
    split = dynamical_split(D, with_constants=False)
    report = {
        "scenario": sc.name,
        "group": spec.group.name,
        "realization": spec.group.kind,
        "system": spec.to_json(),
        "jordan": {**jd.to_json(), "class": classify_operator(D)},
        "splitting": {"dims": split.dims, "lambda_min_abs": split.lambda_min_abs},
        "larc": {"holds": larc_check(spec).holds, "achieved_dim": larc_check(spec).achieved.dim},
        "algebra_compact_type": is_compact_type(spec.group.algebra).classification,
        "metadata": spec.group.metadata.to_json(),
        "g0_compact": g0_compactness(spec, split).to_json(),
        "decomposable": check_decomposability(spec, split).to_json(),
    }
    if not split.minus.is_trivial:
        c, lam = contraction_constants(split, D)
        report["contraction"] = {"c": c, "lambda": lam}
    else:
        report["contraction"] = None
    report["internal"] = classify_internal(spec.group.algebra, D).to_json()
    bibo = {}
    for h in sc.homomorphisms:
        entry = classify_bibo(spec, h).to_json()
        Dt = induced_target_derivation(h, D)
        entry["conjugation"] = check_conjugation(h, D, Dt).to_json()
        entry["homomorphism"] = h.to_json()
        bibo[h.name] = entry
    report["bibo"] = bibo
    return report


def cmd_analyze(args) -> int:
    if not args.scenario:
        raise SpecError("analyze needs --scenario")
    sc = resolve_scenario(args.scenario)
    _emit(_dump(analyze_scenario(sc)), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# simulate


def _parse_control(text: str, spec, horizon: float, seed: int) -> ControlSignal:
    if text == "zero":
        return ControlSignal.zero(spec.m)
    if text.startswith("random:"):
        try:
            pieces = int(text.split(":", 1)[1])
        except ValueError as exc:
            raise SpecError(f"bad control source {text!r}") from exc
        if pieces < 1:
            raise SpecError("random controls need at least one piece")
        values = sim.random_control_values(spec, 1, pieces, seed)[0]
        return ControlSignal.uniform(values, horizon)
    path = text[5:] if text.startswith("file:") else text
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SpecError(f"cannot read control file {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    return ControlSignal.from_json(doc)


def _parse_x0(text: str, spec):
    if text in (None, "identity", "e"):
        return spec.group.identity()
    try:
        Y = np.asarray(json.loads(text), dtype=float)
    except (json.JSONDecodeError, ValueError) as exc:
        raise SpecError("--x0 must be 'identity' or a JSON list of algebra coordinates") from exc
    if Y.shape != (spec.group.dim,):
        raise SpecError(f"--x0 needs {spec.group.dim} algebra coordinates")
    return spec.group.exp(Y)


def cmd_simulate(args) -> int:
    if not args.scenario:
        raise SpecError("simulate needs --scenario")
    sc = resolve_scenario(args.scenario)
    spec = sc.spec
    horizon = 10.0 if args.horizon is None else args.horizon
    dt_out = 0.1 if args.dt_out is None else args.dt_out
    if not (horizon > 0 and math.isfinite(horizon)):
        raise SpecError("--horizon must be positive")
    if not (dt_out > 0 and math.isfinite(dt_out)):
        raise SpecError("--dt-out must be positive")
    u = _parse_control(args.control, spec, horizon, _seed(args, sc))
    traj = sim.integrate(spec, _parse_x0(args.x0, spec), u, horizon, dt_out)
    buf = io.StringIO()
    traj.to_csv(buf)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# verify


def _suite(name, status, **detail):
    return {"suite": name, "status": status, **detail}


def verify_scenario(sc: Scenario, seed: int) -> list[dict]:
    spec = sc.spec
    D = spec.derivation
    rows = []
    ok, worst = verify_grading(spec.group.algebra, D)
    rows.append(_suite("grading", "pass" if ok else "fail", residual=worst, tolerance=1e-8))

    tol = 1e-6 if isinstance(spec.group, MatrixGroup) else 1e-4
    r = sim.cocycle_check(spec, 200, seed)
    rows.append(_suite("cocycle", "pass" if r < tol else "fail", residual=r, tolerance=tol))

    split = dynamical_split(D, with_constants=False)
    if split.minus.is_trivial:
        rows.append(_suite("stable_manifold", "not applicable", reason="g^- is trivial"))
    else:
        rep = sim.stable_manifold_probe(spec, 50, seed)
        rows.append(_suite("stable_manifold", "pass" if rep.passed else "fail", **rep.to_json()))

    try:
        bound = sim.theorem_main_bound(spec, seed=seed)
    except (sim.NotBoundedType, UnsupportedError) as exc:
        rows.append(_suite("theorem_main_bound", "not applicable", reason=str(exc)))
    else:
        sample = sim.reach_sample(spec, 20.0, 1000, 20, seed + 1, dt_out=0.1, keep_trajectories=True)
        worst = float(np.max(sim.minus_gauge(spec, split, bound.metric, sample.trajectories)))
        passed = math.isfinite(bound.R) and worst <= bound.R
        rows.append(_suite("theorem_main_bound", "pass" if passed else "fail", R=bound.R, c=bound.c,
                           lam=bound.lam, diam_K=bound.diam_K, max_minus_gauge=worst, samples=1000))

    for h in sc.homomorphisms:
        verdict = classify_bibo(spec, h)
        name = f"bibo_crosscheck[{h.name}]"
        if verdict.bibo_verdict not in (BIBO_STABLE, NOT_BIBO_STABLE) or h.target_realization is None:
            rows.append(_suite(name, "not applicable", verdict=verdict.bibo_verdict))
            continue
        rep = bibo_simulation_crosscheck(spec, h, 100, seed=seed, report=verdict)
        rows.append(_suite(name, "pass" if rep.agrees else "fail", **rep.to_json()))
    return rows


def _table(results: dict) -> str:
    lines = [f"{'scenario':<24} {'suite':<40} status"]
    for scen, rows in results.items():
        for row in rows:
            lines.append(f"{scen:<24} {row['suite']:<40} {row['status']}")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    if args.all_catalog:
        scenarios = [packaged_scenario(n) for n in packaged_scenario_names()]
    elif args.scenario:
        scenarios = [resolve_scenario(args.scenario)]
    else:
        raise SpecError("verify needs --scenario or --all-catalog")
    results = {}
    for sc in scenarios:
        results[sc.name] = verify_scenario(sc, _seed(args, sc))
    all_pass = all(r["status"] != "fail" for rows in results.values() for r in rows)
    sys.stdout.write(_table(results))
    sys.stdout.write("ALL PASS\n" if all_pass else "FAILURES\n")
    if args.out:
        Path(args.out).write_text(_dump({"all_pass": all_pass, "results": results}))
    return EXIT_OK if all_pass else EXIT_FAIL


# --------------------------------------------------------------------------
# catalog


def cmd_catalog(args) -> int:
    lines = ["groups:"]
    for name in group_names():
        G = catalog_group("R^2" if name == "R^n" else name)
        line = describe_group(G)
        if name == "R^n":
            line = "R^n: dim n, nilpotent (abelian) [exp_coordinates]"
        lines.append("  " + line)
    lines.append("derivation fixtures:")
    for label, G, _ in derivation_fixtures():
        lines.append(f"  {label} on {G.name}")
    lines.append("scenarios:")
    for name in packaged_scenario_names():
        sc = packaged_scenario(name)
        homs = ", ".join(h.name for h in sc.homomorphisms)
        lines.append(f"  {name}: group {sc.spec.group.name}, {sc.spec.m} controls" + (f", homomorphisms {homs}" if homs else ""))
    _emit("\n".join(lines) + "\n", getattr(args, "out", None))
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", metavar="PATH", help="scenario file (or packaged scenario name)")
    common.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--horizon", type=float, default=None, help="simulation horizon")
    common.add_argument("--dt-out", type=float, default=None, help="output sampling step")

    parser = argparse.ArgumentParser(prog="lielcs", description="Linear control systems on Lie groups")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common], help="algebraic report for a scenario")
    p.set_defaults(func=cmd_analyze)
    p = sub.add_parser("simulate", parents=[common], help="trajectory CSV")
    p.add_argument("--control", default="zero", help="zero, random:<pieces>, or a control JSON file")
    p.add_argument("--x0", default="identity", help="'identity' or JSON algebra coordinates of log(x0)")
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("verify", parents=[common], help="run the property suites")
    p.add_argument("--all-catalog", action="store_true", help="verify every packaged scenario")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("catalog", parents=[common], help="list groups, fixtures and scenarios")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, SpecError, AlgebraError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalError, ChartError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
