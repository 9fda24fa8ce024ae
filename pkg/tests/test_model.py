import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lielcs import catalog
from lielcs.model import (
    ControlSignal,
    DynamicalSubgroups,
    LCSSpec,
    SpecError,
    check_decomposability,
    drift_flow,
    g0_compactness,
    larc_check,
)

pieces = st.lists(st.floats(0.05, 2.0), min_size=1, max_size=6)


def _signal(lengths, seed, m=2):
    r = np.random.default_rng(seed)
    bp = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    return ControlSignal(bp, r.uniform(-1, 1, (len(lengths), m)), float(np.sum(lengths)))


def test_spec_validation():
    G = catalog.heisenberg3()
    with pytest.raises(SpecError, match="not a derivation"):
        LCSSpec(G, "derivation", np.diag([1.0, 1.0, 1.0]), [[1, 0, 0]], [1.0])
    with pytest.raises(SpecError, match="positive"):
        LCSSpec(G, "derivation", np.zeros((3, 3)), [[1, 0, 0]], [0.0])
    with pytest.raises(SpecError):
        LCSSpec(G, "derivation", np.zeros((3, 3)), [[1, 0]], [1.0])
    with pytest.raises(SpecError):
        LCSSpec(G, "sideways", np.zeros((3, 3)), [[1, 0, 0]], [1.0])


def test_inner_spec_matches_ad():
    sc = catalog.packaged_scenario("sl2_adH")
    assert np.allclose(sc.spec.derivation, np.diag([0.0, 2.0, -2.0]))
    assert np.allclose(sc.spec.inner_vector, [1, 0, 0])


def test_vertices_and_omega():
    sc = catalog.packaged_scenario("se2_bounded")
    V = sc.spec.vertices()
    assert V.shape == (4, 2) and sc.spec.in_omega(V)
    assert not sc.spec.in_omega([[1.5, 0.0]])
    assert np.allclose(sc.spec.scaled(2.0).omega, [2, 2])


@given(pieces, st.integers(0, 1000), st.floats(0.0, 1.0))
def test_shift_property(lengths, seed, frac):
    u = _signal(lengths, seed)
    s = frac * u.end * 0.999
    v = u.shift(s)
    ts = np.linspace(0, v.end, 50, endpoint=False)
    assert np.array_equal(v(ts), u(ts + s)) or np.allclose(v(ts), u(ts + s))


@given(pieces, pieces, st.integers(0, 1000))
def test_concat_property(a, b, seed):
    u, w = _signal(a, seed), _signal(b, seed + 1)
    at = u.end
    c = u.concat(w, at)
    t1 = np.linspace(0, at, 20, endpoint=False)
    t2 = np.linspace(0, w.end, 20, endpoint=False)
    # a time one ulp below a breakpoint may round onto it after the offset
    t2 = t2[np.min(np.abs(t2[:, None] - w.breakpoints[None, 1:]), axis=1, initial=1.0) > 1e-9]
    assert np.allclose(c(t1), u(t1))
    assert np.allclose(c(t2 + at), w(t2))


def test_signal_validation_and_json():
    with pytest.raises(SpecError):
        ControlSignal([0.0, 0.0], [[1.0], [2.0]])
    with pytest.raises(SpecError):
        ControlSignal([0.5], [[1.0]])
    u = ControlSignal([0.0, 1.0], [[1.0], [-1.0]], 3.0)
    with pytest.raises(SpecError):
        u(3.0)
    back = ControlSignal.from_json(u.to_json())
    assert np.array_equal(back.values, u.values) and back.end == 3.0
    assert math.isinf(ControlSignal.from_json(ControlSignal.zero(1).to_json()).end)


@pytest.mark.parametrize("name", catalog.packaged_scenario_names())
def test_packaged_scenarios_satisfy_larc(name):
    assert larc_check(catalog.packaged_scenario(name).spec).holds


def test_larc_failure():
    G = catalog.catalog_group("R^2")
    spec = LCSSpec(G, "derivation", np.diag([-1.0, -2.0]), [[1.0, 0.0]], [1.0])
    r = larc_check(spec)
    assert not r.holds and r.achieved.dim == 1


def test_single_control_se2_fails_larc():
    sc = catalog.packaged_scenario("se2_bounded")
    spec = LCSSpec(sc.spec.group, "derivation", sc.spec.derivation, [[1, 0, 0]], [1.0])
    # span(e1) is already D-invariant and abelian
    assert larc_check(spec).achieved.dim == 1


@pytest.mark.parametrize("name", catalog.packaged_scenario_names())
def test_drift_flow_is_a_one_parameter_group(name, rng):
    spec = catalog.packaged_scenario(name).spec
    G = spec.group
    g = G.exp(rng.uniform(-0.5, 0.5, G.dim))
    assert G.distance(drift_flow(spec, drift_flow(spec, g, 0.3), 0.4), drift_flow(spec, g, 0.7)) < 1e-10
    assert G.distance(drift_flow(spec, G.identity(), 2.0), G.identity()) < 1e-12


def test_dynamical_subgroup_membership():
    spec = catalog.packaged_scenario("sl2_adH").spec
    sub = DynamicalSubgroups(spec)
    G = spec.group
    assert sub.in_Gminus(G.exp([0, 0, 0.7])) and not sub.in_Gminus(G.exp([0, 0.7, 0]))
    assert sub.in_Gplus(G.exp([0, 0.7, 0])) and sub.in_Gzero(G.exp([0.4, 0, 0]))


def test_compactness_facts():
    sc = {n: catalog.packaged_scenario(n).spec for n in catalog.packaged_scenario_names()}
    f = g0_compactness(sc["se2_bounded"])
    assert f.value is True and f.provenance == "computed"
    f = g0_compactness(sc["so3_elliptic"])
    assert f.value is True and f.provenance == "declared"
    assert g0_compactness(sc["heisenberg_nilpotent"]).value is False
    assert g0_compactness(sc["r4_stable"]).value is True
    assert g0_compactness(sc["aff_plus_contracting"]).value is None


def test_decomposability_facts():
    assert check_decomposability(catalog.packaged_scenario("se2_bounded").spec).value is True
    f = check_decomposability(catalog.packaged_scenario("sl2_adH").spec)
    assert f.value is False and f.provenance == "declared"
