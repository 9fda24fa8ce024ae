"""Catalog of realized groups, derivation fixtures, homomorphisms and scenarios.

Scenario files are JSON documents with ``schema_version`` 1::

    {
      "schema_version": 1,
      "name": "se2_bounded",
      "group": "se2",
      "drift": {"kind": "derivation", "matrix": [[-1, 0, 0], [0, -1, 0], [0, 0, 0]]},
      "controls": [[1, 0, 0], [0, 0, 1]],
      "omega": [1, 1],
      "homomorphisms": [...],
      "analysis": ["analyze", "verify"],
      "seed": 42
    }

``group`` is a catalog name or an inline realization.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .algebra import AlgebraError, LieAlgebra, algebra_from_json
from .groups import GroupMetadata, GroupRealization, MatrixGroup, NilpotentGroup, SemidirectGroup, computed_metadata
from .model import LCSSpec, SpecError
from .stability import HomomorphismSpec

SCHEMA_VERSION = 1
SAMPLING_COMMANDS = {"verify", "simulate"}


class ScenarioError(SpecError):
    """Invalid scenario document; ``line`` points at the offending entry when known."""

    def __init__(self, message, source=None, line=None):
        self.source, self.line = source, line
        where = f"{source}:{line}: " if source and line else f"{source}: " if source else ""
        super().__init__(where + message)


def _unit(n, i, j):
    M = np.zeros((n, n))
    M[i, j] = 1.0
    return M


# --------------------------------------------------------------------------
# Groups


def real_space(n: int) -> NilpotentGroup:
    alg = LieAlgebra.from_brackets(f"R^{n}", n, [], [f"x{i + 1}" for i in range(n)])
    return NilpotentGroup(f"R^{n}", alg)


def heisenberg3() -> NilpotentGroup:
    # e1 = E12, e2 = E23, e3 = E13
    alg = LieAlgebra.from_brackets("heisenberg3", 3, [(0, 1, 2, 1.0)], ("e1", "e2", "e3"))
    return NilpotentGroup("heisenberg3", alg)


def aff_plus() -> MatrixGroup:
    alg = LieAlgebra.from_brackets("aff_plus", 2, [(0, 1, 1, 1.0)], ("X", "Y"))
    return MatrixGroup("aff_plus", alg, [_unit(2, 0, 0), _unit(2, 0, 1)])


def se2() -> SemidirectGroup:
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    meta = GroupMetadata(is_solvable=True, is_nilpotent=False, torus_generators=((0.0, 0.0, 1.0),),
                         torus_periods=(2 * math.pi,))
    return SemidirectGroup("se2", J[None], periods=[2 * math.pi], basis_names=("e1", "e2", "r"), metadata=meta)


def so2() -> SemidirectGroup:
    meta = GroupMetadata(is_solvable=True, is_nilpotent=True, compact_declared=True,
                         torus_generators=((1.0,),), torus_periods=(2 * math.pi,))
    return SemidirectGroup("so2", np.zeros((1, 0, 0)), periods=[2 * math.pi], basis_names=("r",), metadata=meta)


def so3() -> MatrixGroup:
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k], eps[j, i, k] = 1.0, -1.0
    L = -eps  # (L_i)_{jk} = -eps_{ijk}
    alg = LieAlgebra.from_brackets("so3", 3, [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (0, 2, 1, -1.0)],
                                   ("L1", "L2", "L3"))
    meta = computed_metadata(alg, compact_declared=True, torus_generators=((0.0, 0.0, 1.0),),
                             torus_periods=(2 * math.pi,))
    return MatrixGroup("so3", alg, L, meta)


def sl2() -> MatrixGroup:
    alg = LieAlgebra.from_brackets("sl2", 3, [(0, 1, 1, 2.0), (0, 2, 2, -2.0), (1, 2, 0, 1.0)], ("H", "E", "F"))
    H = np.diag([1.0, -1.0])
    meta = computed_metadata(alg, decomposable_declared=False)
    return MatrixGroup("sl2", alg, [H, _unit(2, 0, 1), _unit(2, 1, 0)], meta)


_BUILDERS = {
    "heisenberg3": heisenberg3,
    "aff_plus": aff_plus,
    "se2": se2,
    "so2": so2,
    "so3": so3,
    "sl2": sl2,
}


def group_names() -> list[str]:
    return ["R^n"] + sorted(_BUILDERS)


def catalog_group(name: str) -> GroupRealization:
    m = re.fullmatch(r"R\^(\d+)", name)
    if m:
        n = int(m.group(1))
        if n < 1:
            raise SpecError("R^n needs n >= 1")
        return real_space(n)
    if name not in _BUILDERS:
        raise SpecError(f"unknown catalog group {name!r}; available: {', '.join(group_names())}")
    return _BUILDERS[name]()


def group_from_json(doc) -> GroupRealization:
    if isinstance(doc, str):
        return catalog_group(doc)
    if not isinstance(doc, dict):
        raise SpecError("group must be a catalog name or an object")
    kind = doc.get("kind")
    meta_doc = dict(doc.get("metadata", {}))
    for key in ("torus_generators",):
        if key in meta_doc:
            meta_doc[key] = tuple(tuple(float(x) for x in g) for g in meta_doc[key])
    if "torus_periods" in meta_doc:
        meta_doc["torus_periods"] = tuple(float(p) for p in meta_doc["torus_periods"])
    if kind == "semidirect":
        G = SemidirectGroup(doc.get("name", "custom"), doc["generators"], doc.get("periods"),
                            tuple(doc.get("basis", ())))
        meta = computed_metadata(G.algebra, **meta_doc)
        G.metadata = meta
        return G
    alg = algebra_from_json(doc["algebra"])
    meta = computed_metadata(alg, **meta_doc)
    if kind == "exp_coordinates":
        return NilpotentGroup(doc.get("name", alg.name), alg, meta)
    if kind == "matrix_inner":
        return MatrixGroup(doc.get("name", alg.name), alg, doc["embed"], meta)
    raise SpecError(f"unknown realization kind {kind!r}")


def describe_group(G: GroupRealization) -> str:
    meta = G.metadata
    tags = []
    if meta.is_nilpotent:
        tags.append("nilpotent")
    elif meta.is_solvable:
        tags.append("solvable")
    if meta.compact_declared:
        tags.append("compact (declared)")
    elif meta.torus_generators:
        tags.append("G0 compact (declared)")
    if meta.decomposable_declared is False:
        tags.append("not decomposable (declared)")
    return f"{G.name}: dim {G.dim}" + "".join(f", {t}" for t in tags) + f" [{G.kind}]"


# --------------------------------------------------------------------------
# Derivation and homomorphism fixtures


def derivation_fixtures() -> list[tuple[str, GroupRealization, np.ndarray]]:
    """Named ``(group, derivation)`` pairs spanning every catalog group."""
    rng = np.random.default_rng(5)
    out = [
        ("R^4 random", real_space(4), rng.uniform(-2, 2, (4, 4))),
        ("heisenberg3 nilpotent", heisenberg3(), _unit(3, 0, 1)),
        ("heisenberg3 stable", heisenberg3(), np.diag([-1.0, -1.0, -2.0])),
        ("heisenberg3 saddle", heisenberg3(), np.diag([1.0, -1.0, 0.0])),
        ("se2 contracting", se2(), np.diag([-1.0, -1.0, 0.0])),
        ("so2 zero", so2(), np.zeros((1, 1))),
    ]
    from .algebra import ad

    for gname, x0 in (("sl2", [1.0, 0.0, 0.0]), ("sl2", [0.3, 1.0, -0.7]), ("so3", [0.0, 0.0, 1.0]),
                      ("so3", [1.0, -2.0, 0.5]), ("aff_plus", [1.0, 0.0]), ("aff_plus", [-1.0, 2.0])):
        G = catalog_group(gname)
        out.append((f"{gname} ad{tuple(x0)}", G, ad(G.algebra, np.array(x0))))
    return out


def _hom_from_json(doc, source_group: GroupRealization, source_name: str) -> HomomorphismSpec:
    target_ref = doc.get("target", source_name)
    target = source_group if target_ref == source_name else group_from_json(target_ref)
    f = np.asarray(doc.get("differential", np.eye(source_group.dim)), dtype=float)
    cmap = doc.get("coordinate_map")
    same = target is source_group
    if cmap is None and not same:
        realization = None
    else:
        realization = target
    return HomomorphismSpec(
        name=doc.get("name", f"{source_name}->{target.name}"),
        source=source_group.algebra,
        target=target.algebra,
        differential=f,
        image_g0_compact_declared=bool(doc.get("image_g0_compact_declared", False)),
        target_realization=realization,
        coordinate_map=None if cmap is None else np.asarray(cmap, dtype=float),
    )


# --------------------------------------------------------------------------
# Scenarios


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    spec: LCSSpec
    homomorphisms: tuple[HomomorphismSpec, ...]
    seed: int | None
    analysis: tuple
    document: dict = field(repr=False)

    def to_json(self) -> dict:
        return self.document


def _line_of(text: str | None, key: str) -> int | None:
    if not text:
        return None
    for i, line in enumerate(text.splitlines(), 1):
        if f'"{key}"' in line:
            return i
    return None


def scenario_from_json(doc, source=None, text=None) -> Scenario:
    """Validate a scenario document and build its system and homomorphisms."""

    def fail(msg, key=None):
        raise ScenarioError(msg, source, _line_of(text, key) if key else None)

    if not isinstance(doc, dict):
        fail("scenario must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        fail(f"schema_version must be {SCHEMA_VERSION}", "schema_version")
    for key in ("group", "drift", "controls", "omega"):
        if key not in doc:
            fail(f"missing required field {key!r}")
    try:
        group = group_from_json(doc["group"])
    except (SpecError, AlgebraError, KeyError, TypeError, ValueError) as exc:
        fail(f"group: {exc}", "group")
    drift = doc["drift"]
    if not isinstance(drift, dict) or drift.get("kind") not in ("inner", "derivation"):
        fail("drift must have kind 'inner' or 'derivation'", "drift")
    value = drift.get("vector") if drift["kind"] == "inner" else drift.get("matrix")
    if value is None:
        fail("drift needs 'vector' (inner) or 'matrix' (derivation)", "drift")
    name = str(doc.get("name", "scenario"))
    try:
        spec = LCSSpec(group, drift["kind"], np.asarray(value, dtype=float),
                       np.asarray(doc["controls"], dtype=float), np.asarray(doc["omega"], dtype=float), name)
    except (SpecError, AlgebraError, ValueError, TypeError) as exc:
        fail(str(exc), "drift" if "deriv" in str(exc) or "drift" in str(exc) else "controls")
    homs = []
    for h in doc.get("homomorphisms", []):
        try:
            homs.append(_hom_from_json(h, group, group.name if isinstance(doc["group"], dict) else doc["group"]))
        except (SpecError, AlgebraError, ValueError, TypeError) as exc:
            fail(f"homomorphism: {exc}", "homomorphisms")
    analysis = tuple(doc.get("analysis", ()))
    seed = doc.get("seed")
    if seed is not None and not isinstance(seed, int):
        fail("seed must be an integer", "seed")
    if seed is None and any((a if isinstance(a, str) else a.get("command")) in SAMPLING_COMMANDS for a in analysis):
        fail("seed is required when a sampling command is requested", "analysis")
    return Scenario(name, spec, tuple(homs), seed, analysis, doc)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror or exc}", str(path)) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc.msg}", str(path), exc.lineno) from exc
    return scenario_from_json(doc, str(path), text)


def packaged_scenario_names() -> list[str]:
    root = resources.files("lielcs") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def packaged_scenario(name: str) -> Scenario:
    root = resources.files("lielcs") / "scenarios"
    fname = name if name.endswith(".json") else name + ".json"
    entry = root / fname
    if not entry.is_file():
        raise ScenarioError(f"no packaged scenario {name!r}", fname)
    text = entry.read_text()
    return scenario_from_json(json.loads(text), fname, text)


def resolve_scenario(ref: str) -> Scenario:
    """A path on disk, else a packaged scenario of the same (base)name."""
    p = Path(ref)
    if p.exists():
        return load_scenario(p)
    stem = p.name[:-5] if p.name.endswith(".json") else p.name
    if stem in packaged_scenario_names():
        return packaged_scenario(stem)
    return load_scenario(p)
