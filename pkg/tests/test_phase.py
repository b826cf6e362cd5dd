import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpattractors.errors import DimensionMismatch, DomainMismatch, NoDeepTime, NotInSigma
from mpattractors.phase import (
    BOUNDARY,
    EXTERIOR,
    INTERIOR,
    Bornology,
    Cone,
    Field,
    GridDomain,
    LocMetric,
    TimeArrow,
    annulus,
    cone_contains,
    deep_time_sampler,
    depth,
    from_mask,
    periodic_box,
    strip,
)


# --- cones -----------------------------------------------------------------


def test_cone_contains_examples():
    assert cone_contains(Cone.orthant(1, 1), (0.0, -3.0))
    assert not cone_contains(Cone.orthant(2, 0), (-0.1, 1.0))
    assert cone_contains(Cone.halfspace((1, 0)), (2.0, 5.0))


def test_cone_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        cone_contains(Cone.orthant(2, 0), (1.0, 2.0, 3.0))


CONES = [Cone.orthant(1, 0), Cone.orthant(2, 0), Cone.orthant(1, 1), Cone.orthant(1, 2),
         Cone.orthant(3, 1), Cone.halfspace((1.0, 2.0)), Cone.halfspace((0.3, -1.0, 2.0))]


@pytest.mark.parametrize("cone", CONES, ids=repr)
def test_cone_closure_on_random_pairs(cone):
    rng = np.random.default_rng(7)
    kept = []
    while len(kept) < 1000:
        h = rng.normal(size=cone.dim) * 5
        if cone.contains(h):
            kept.append(h)
    assert cone.contains(np.zeros(cone.dim))
    for a, b, lam in zip(kept, kept[::-1], rng.uniform(0, 10, size=len(kept))):
        assert cone.contains(a + b)
        assert cone.contains(lam * a)


@pytest.mark.parametrize("cone", CONES, ids=repr)
def test_interior_witness_margin(cone):
    w = cone.interior_witness
    assert cone.contains(w)
    assert cone.boundary_distance(w) == pytest.approx(1.0)


@given(st.lists(st.floats(0, 50), min_size=2, max_size=2), st.lists(st.floats(0, 50), min_size=1, max_size=1),
       st.lists(st.floats(0, 50), min_size=3, max_size=3))
def test_whole_cone_depth_monotone_under_addition(a, s, b):
    arrow = TimeArrow.whole_cone(Cone.orthant(2, 1))
    h1 = np.array(a + s)
    h2 = np.array(b)
    assert arrow.depth(h1 + h2) >= arrow.depth(h1)


# --- depth and deep times -----------------------------------------------------


def test_whole_cone_depth_is_distance_to_hyperplane():
    arrow = TimeArrow.whole_cone(Cone.orthant(1, 2))
    assert depth(arrow, (3.0, 7.0, -2.0)) == 3.0


def test_annulus_depth_example():
    dom = annulus(1.0, 40.0, 0.5)
    arrow = TimeArrow.domain_arrow(dom)
    assert abs(depth(arrow, (10.0, 0.0)) - 9.0) <= dom.spacing
    assert abs(depth(arrow, (6.0, 8.0)) - 9.0) <= dom.spacing


def test_depth_outside_sigma():
    arrow = TimeArrow.domain_arrow(annulus(1.0, 10.0, 0.5))
    with pytest.raises(NotInSigma):
        arrow.depth((0.0, 0.0))
    with pytest.raises(NotInSigma):
        arrow.depth((30.0, 0.0))


def _brute_depth(dom):
    bcells = np.argwhere(dom.mask == BOUNDARY)
    out = {}
    for cell in np.argwhere(dom.mask == INTERIOR):
        out[tuple(cell)] = np.sqrt(((bcells - cell) ** 2).sum(axis=1)).min() * dom.spacing
    return out


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_distance_transform_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    inside = np.zeros((64, 64), dtype=bool)
    inside[2:-2, 2:-2] = rng.random((60, 60)) > 0.25
    dom = from_mask(inside, 0.5)
    oracle = _brute_depth(dom)
    for cell, d in oracle.items():
        assert abs(dom.depth[cell] - d) <= dom.spacing
    # the transform is exact at cell centres
    err = max(abs(dom.depth[c] - d) for c, d in oracle.items())
    assert err < 1e-9


def test_depth_bounded_by_distance_to_cone_boundary():
    # boundary of C = R^d is empty, so only the mask boundary counts; check cells against brute force
    dom = strip(6.0, 8.0, 0.5)
    d = dom.depth
    assert d.max() == pytest.approx(3.0)
    assert (d[dom.boundary] == 0).all()


def test_deep_time_whole_cone():
    arrow = TimeArrow.whole_cone(Cone.orthant(1, 0))
    np.testing.assert_array_equal(deep_time_sampler(arrow, 5.0), [5.0])


def test_deep_time_strip_capacity():
    arrow = TimeArrow.domain_arrow(strip(10.0, 20.0, 1.0))
    with pytest.raises(NoDeepTime) as exc:
        deep_time_sampler(arrow, 6.0)
    assert exc.value.max_depth == pytest.approx(5.0)


def test_deep_time_annulus_argmax():
    dom = annulus(1.0, 40.0, 0.25)
    arrow = TimeArrow.domain_arrow(dom)
    h = deep_time_sampler(arrow, 15.0)
    # oracle: max over cells of min(|x| - 1, 40 - |x|) -> |x| = 20.5, depth 19.5
    assert abs(np.linalg.norm(h) - 20.5) <= dom.spacing
    assert abs(arrow.depth(h) - 19.5) <= dom.spacing
    # deterministic
    np.testing.assert_array_equal(h, deep_time_sampler(arrow, 15.0))


@pytest.mark.parametrize("arrow", [
    TimeArrow.whole_cone(Cone.orthant(2, 0)),
    TimeArrow.whole_cone(Cone.orthant(1, 1)),
    TimeArrow.whole_cone(Cone.halfspace((1.0, 1.0))),
    TimeArrow.domain_arrow(annulus(1.0, 12.0, 0.5)),
])
def test_probe_times_are_deep(arrow):
    for D in (0.0, 1.5, 4.0):
        probes = arrow.probe_times(D)
        assert len(probes) == 9
        for h in probes:
            assert arrow.depth(h) >= D - 1e-12


# --- grid domains and fields ------------------------------------------------


def test_grid_invariants_rejected():
    with pytest.raises(ValueError):
        GridDomain(0.0, np.zeros(4, dtype=np.int8), (True,))
    bad = np.array([EXTERIOR, INTERIOR, BOUNDARY], dtype=np.int8)
    with pytest.raises(ValueError):
        GridDomain(1.0, bad, (False,))
    with pytest.raises(ValueError):
        GridDomain(1.0, np.array([INTERIOR, BOUNDARY, INTERIOR, INTERIOR], dtype=np.int8), (True,))


def test_descriptor_roundtrip(tmp_path):
    dom = annulus(1.0, 5.0, 0.5)
    dom.save(tmp_path / "dom.json")
    desc = json.loads((tmp_path / "dom.json").read_text())
    assert set(desc) == {"spacing", "extents", "mask_rle", "periodic"}
    back = GridDomain.load(tmp_path / "dom.json")
    np.testing.assert_array_equal(back.mask, dom.mask)
    assert back.hash == dom.hash


def test_field_binary_roundtrip(tmp_path):
    dom = annulus(1.0, 5.0, 0.5)
    rng = np.random.default_rng(3)
    u = Field(dom, rng.normal(size=dom.extents))
    files = u.save(tmp_path / "u.bin")
    raw = files[0].read_bytes()
    assert len(raw) == 8 * int(dom.active.sum())
    side = json.loads(files[1].read_text())
    assert side["sup_norm"] == u.sup_norm()
    v = Field.load(tmp_path / "u.bin", dom)
    np.testing.assert_array_equal(u.values, v.values)
    with pytest.raises(DomainMismatch):
        Field.load(tmp_path / "u.bin", annulus(1.0, 6.0, 0.5))


def test_field_rejects_nonfinite():
    dom = periodic_box(8, 8.0)
    with pytest.raises(ValueError):
        Field(dom, np.full(8, np.nan))


# --- local metric -------------------------------------------------------------


def test_loc_distance_examples():
    dom = periodic_box(64, 64.0)
    metric = LocMetric(dom, (32,))
    u = Field(dom, np.sin(np.arange(64)))
    assert metric(u, u) == 0.0
    v = Field(dom, u.values + 0.5)
    assert metric(u, v) == pytest.approx(0.5, abs=1e-15)


def test_loc_distance_far_difference_is_small():
    dom = periodic_box((41, 41), 41.0)
    metric = LocMetric(dom, (20, 20))
    u = Field.constant(dom, 0.0)
    x, y = np.meshgrid(np.arange(41) - 20, np.arange(41) - 20, indexing="ij")
    K = 12
    v = Field(dom, np.where(np.hypot(x, y) > K, 3.0, 0.0))
    assert metric(u, v) <= 2.0 ** -K + 1e-15


def test_loc_distance_domain_mismatch():
    a, b = periodic_box(8, 8.0), periodic_box(9, 8.0)
    with pytest.raises(DomainMismatch):
        LocMetric(a, (4,))(Field.constant(a, 0), Field.constant(b, 0))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_loc_distance_metric_axioms(seed):
    dom = annulus(1.0, 6.0, 0.5)
    metric = LocMetric(dom)
    rng = np.random.default_rng(seed)
    u, v, w = (Field(dom, rng.normal(scale=rng.uniform(0.01, 3), size=dom.extents)) for _ in range(3))
    duv, dvw, duw = metric(u, v), metric(v, w), metric(u, w)
    assert 0 <= duv <= 1
    assert duv == metric(v, u)
    assert duw <= duv + dvw + 1e-15


def test_bornology_membership():
    dom = periodic_box(8, 8.0)
    b = Bornology(norm_bound=2.0)
    assert b.contains([Field.constant(dom, 1.5), Field.constant(dom, -2.0)])
    assert not b.contains([Field.constant(dom, 2.5)])
    with_constraint = Bornology(norm_bound=10, constraint=lambda u: abs(u.values.mean()), residual_tol=0.1)
    assert not with_constraint.member_ok(Field.constant(dom, 1.0))
