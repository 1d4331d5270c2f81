import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riesz_lab.errors import InvalidArgument
from riesz_lab.geometry import (
    Ball,
    Box,
    DisjointUnion,
    Interval,
    Product,
    box,
    diameter,
    format_domain,
    geometry_report,
    hausdorff_distance,
    inradius,
    normalize_unit_volume,
    parse_domain,
    scale,
    surface,
    volume,
)

pos = st.floats(0.1, 5.0)


@st.composite
def domains(draw):
    kind = draw(st.sampled_from(["interval", "box2", "box3", "ball1", "ball2", "ball3", "prod2", "prod3"]))
    if kind == "interval":
        return Interval(draw(pos))
    if kind == "box2":
        return Box((draw(pos), draw(pos)))
    if kind == "box3":
        return Box((draw(pos), draw(pos), draw(pos)))
    if kind.startswith("ball"):
        return Ball(draw(pos), int(kind[-1]))
    if kind == "prod2":
        return Product(Interval(draw(pos)), draw(pos))
    return Product(draw(st.sampled_from([Box((draw(pos), draw(pos))), Ball(draw(pos), 2)])), draw(pos))


def test_volume_examples():
    assert volume(Box((2, 0.5))) == 1.0
    assert volume(Ball(1, 2)) == pytest.approx(math.pi, rel=1e-15)
    assert volume(Product(Interval(0.5), 2)) == 1.0


def test_surface_examples():
    assert surface(Box((1, 1))) == 4.0
    assert surface(Ball(1, 3)) == pytest.approx(4 * math.pi, rel=1e-15)
    assert surface(Product(Interval(0.5), 2)) == pytest.approx(5.0)
    assert surface(Interval(3.0)) == 2.0


def test_inradius_and_diameter_examples():
    assert inradius(Box((1, 1))) == 0.5
    assert inradius(Box((4, 0.25))) == 0.125
    assert inradius(Ball(0.3, 2)) == 0.3
    assert diameter(Box((3, 4))) == pytest.approx(5.0)
    assert diameter(Ball(1, 2)) == 2.0
    assert diameter(Product(Interval(1), 1)) == pytest.approx(math.sqrt(2))


def test_scale_and_normalize_examples():
    assert scale(Box((1, 1)), 2) == Box((2, 2))
    assert scale(Ball(1, 2), 0.5) == Ball(0.5, 2)
    assert volume(scale(Box((2, 0.5)), 3)) == pytest.approx(9.0)
    D, t = normalize_unit_volume(Box((2, 0.5)))
    assert D == Box((2.0, 0.5)) and t == 1.0
    D, t = normalize_unit_volume(Ball(1, 2))
    assert t == pytest.approx(math.pi ** -0.5, rel=1e-15)
    assert D.radius == pytest.approx(0.5641895835477563)
    D, t = normalize_unit_volume(Box((2, 2)))
    assert t == 0.5 and D == Box((1.0, 1.0))


def test_interval_is_one_dimensional_box():
    assert box(2.0) == Interval(2.0)
    assert volume(Box((2.0,))) == volume(Interval(2.0))
    assert surface(Box((2.0,))) == surface(Interval(2.0))


def test_invalid_parameters():
    with pytest.raises(InvalidArgument):
        Box((1.0, 0.0))
    with pytest.raises(InvalidArgument):
        Ball(1.0, 4)
    with pytest.raises(InvalidArgument):
        Interval(-1.0)
    with pytest.raises(InvalidArgument):
        DisjointUnion((Box((1, 1)), Interval(1)))


def test_geometry_report_examples():
    r = geometry_report(Box((1, 1)))
    assert (r.volume, r.surface, r.inradius) == (1.0, 4.0, 0.5)
    assert r.diameter == pytest.approx(math.sqrt(2))
    assert r.lower_ok and r.upper_ok
    r = geometry_report(Ball(1, 2))
    assert r.surface == pytest.approx(2 * math.pi) and r.lower_ok and r.upper_ok
    r = geometry_report(Box((10, 0.1)))
    assert r.surface == pytest.approx(20.2)
    assert r.lower_bound == pytest.approx(1 / 20.2) and r.upper_bound == pytest.approx(2 / 20.2)
    assert r.diameter == pytest.approx(math.hypot(10, 0.1))


@settings(max_examples=300, deadline=None)
@given(domains(), st.floats(0.2, 5.0))
def test_scaling_laws(D, t):
    d = D.dim
    S = scale(D, t)
    assert volume(S) == pytest.approx(t**d * volume(D), rel=1e-12)
    assert surface(S) == pytest.approx(t ** (d - 1) * surface(D), rel=1e-12)
    assert inradius(S) == pytest.approx(t * inradius(D), rel=1e-12)
    assert diameter(S) == pytest.approx(t * diameter(D), rel=1e-12)


@settings(max_examples=1000, deadline=None)
@given(domains())
def test_inradius_bounds(D):
    v, s, r = volume(D), surface(D), inradius(D)
    assert v / s <= r * (1 + 1e-12)
    assert r <= D.dim * v / s * (1 + 1e-12)


def test_hausdorff_examples():
    assert hausdorff_distance(Ball(1, 2), Ball(0.6, 2)) == pytest.approx(0.4, abs=1e-15)
    assert hausdorff_distance(Box((1, 1)), Box((1.2, 0.8))) == pytest.approx(0.1, abs=1e-12)
    assert hausdorff_distance(Box((1, 1)), Ball(0.5, 2)) == pytest.approx(math.sqrt(2) / 2 - 0.5, abs=1e-9)
    assert hausdorff_distance(Box((1, 1, 1)), Ball(0.5, 3)) == pytest.approx(math.sqrt(3) / 2 - 0.5, abs=1e-9)


def _box_oracle(a, b):
    # independent: vertices of the symmetric difference of two centered boxes
    import itertools

    import numpy as np

    a, b = np.asarray(a) / 2, np.asarray(b) / 2
    worst = 0.0
    for P, Q in ((a, b), (b, a)):
        for signs in itertools.product((-1, 1), repeat=len(P)):
            v = np.array(signs) * P
            nearest = np.clip(v, -Q, Q)
            worst = max(worst, float(np.linalg.norm(v - nearest)))
    return worst


@settings(max_examples=100, deadline=None)
@given(st.lists(pos, min_size=2, max_size=3), st.lists(pos, min_size=3, max_size=3))
def test_box_hausdorff_matches_vertex_oracle(a, b):
    b = b[: len(a)]
    assert hausdorff_distance(Box(tuple(a)), Box(tuple(b))) == pytest.approx(_box_oracle(a, b), abs=1e-12)


@st.composite
def bodies2d(draw):
    if draw(st.booleans()):
        return Box((draw(pos), draw(pos)))
    return Ball(draw(pos), 2)


@settings(max_examples=40, deadline=None)
@given(bodies2d(), bodies2d(), bodies2d(), st.floats(0.3, 3.0))
def test_hausdorff_metric_properties(A, B, C, t):
    ab = hausdorff_distance(A, B)
    assert ab == hausdorff_distance(B, A)
    assert ab >= 0
    assert hausdorff_distance(A, A) == 0.0
    assert hausdorff_distance(A, C) <= ab + hausdorff_distance(B, C) + 1e-8
    assert hausdorff_distance(scale(A, t), scale(B, t)) == pytest.approx(t * ab, abs=1e-8)


def test_hausdorff_rejects_mixed_dimensions():
    with pytest.raises(InvalidArgument):
        hausdorff_distance(Box((1, 1)), Ball(1, 3))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("interval:2", Interval(2.0)),
        ("box:1,1", Box((1.0, 1.0))),
        ("box:1,2,3", Box((1.0, 2.0, 3.0))),
        ("ball:0.5@3", Ball(0.5, 3)),
        ("product:(interval:0.5)x2", Product(Interval(0.5), 2.0)),
        ("product:(ball:1@2)x3", Product(Ball(1.0, 2), 3.0)),
        ("union:[box:1,1;ball:0.1@2]", DisjointUnion((Box((1.0, 1.0)), Ball(0.1, 2)))),
    ],
)
def test_parse_domain(text, expected):
    D = parse_domain(text)
    assert D == expected
    assert parse_domain(format_domain(D)) == D


@pytest.mark.parametrize("text", ["box:0,-1", "ball:1@4", "blob:1", "box:1,a", "product:(ball:1@3)x1", "union:[]"])
def test_parse_domain_errors_name_descriptor(text):
    with pytest.raises(InvalidArgument) as exc:
        parse_domain(text)
    assert text in str(exc.value)


@settings(max_examples=200, deadline=None)
@given(domains())
def test_format_parse_round_trip(D):
    assert parse_domain(format_domain(D)) == D
