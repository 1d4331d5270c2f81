import math
import random

import numpy as np
import pytest

from riesz_lab.errors import InvalidArgument, PreconditionViolation
from riesz_lab.families import parse_family, unit_ball
from riesz_lab.geometry import Ball, Box, DisjointUnion, hausdorff_distance, scale, unit_ball_volume, volume
from riesz_lab.optimizer import (
    build_trial_union,
    component_count_scan,
    convergence_scan,
    optimize_single,
    optimize_union,
    trial_identity,
)
from riesz_lab.semiclassics import normalized_ratio, weyl_main
from riesz_lab.spectrum import DIRICHLET, NEUMANN, riesz_mean, riesz_mean_union

SQUARE = Box((1.0, 1.0))
DISK = unit_ball(2)


def test_optimize_single_dirichlet_prefers_square():
    res = optimize_single(parse_family("box2d_aspect:1,6"), DIRICHLET, 1, 1e4, 1e-4)
    assert res.best_parameter[0] == pytest.approx(1.0, abs=0.05)
    assert res.value == riesz_mean(res.best_domain, DIRICHLET, 1, 1e4)
    assert all(res.value >= row["value"] for row in res.table)


def test_optimize_single_neumann_near_square_above_weyl():
    res = optimize_single(parse_family("box2d_aspect:1,6"), NEUMANN, 1, 1e4, 1e-4)
    assert res.best_parameter[0] == pytest.approx(1.0, abs=0.05)
    assert res.value >= weyl_main(SQUARE, 1, 1e4)
    assert all(res.value <= row["value"] for row in res.table)
    assert res.value == pytest.approx(riesz_mean(res.best_domain, NEUMANN, 1, 1e4), rel=1e-10)


def test_optimize_single_degenerate():
    res = optimize_single(parse_family("box2d_aspect:1,6"), DIRICHLET, 1, 1.0, 1e-4)
    assert res.value == 0.0 and res.degenerate and res.best_parameter == (1.0,)


def test_optimize_single_ties_take_first_grid_point():
    res = optimize_single(parse_family("ball@2"), DIRICHLET, 1, 500.0, 1e-3)
    assert res.member == "ball" and res.best_parameter == () and res.iterations == 0
    with pytest.raises(InvalidArgument):
        optimize_single(parse_family("ball@2"), DIRICHLET, 1, 500.0, 0.0)


@pytest.mark.parametrize("gamma", [0.5, 1.0])
@pytest.mark.parametrize("lam", [1e3, 1e4])
def test_optimizer_matches_dense_grid_oracle(gamma, lam):
    fam = parse_family("box2d_aspect:1,6")
    res = optimize_single(fam, DIRICHLET, gamma, lam, 1e-4, points=64)
    dense = max(riesz_mean(Box((s, 1 / s)), DIRICHLET, gamma, lam) for s in np.linspace(1, 6, 640))
    assert res.value >= dense - (abs(dense) * 1e-3 + 1e-6)


def test_argmax_invariant_under_joint_rescaling():
    fam = parse_family("box2d_aspect:1,4")
    lam, t, gamma = 2000.0, 1.7, 1.0
    res = optimize_single(fam, DIRICHLET, gamma, lam, 1e-4, points=32)
    scaled = [riesz_mean(scale(fam.domain(p), t), DIRICHLET, gamma, lam / t**2) for p in fam.param_grid(32)]
    grid_values = [row["value"] for row in res.table]
    assert int(np.argmax(scaled)) == int(np.argmax(grid_values))
    np.testing.assert_allclose(np.array(scaled) * t ** (2 * gamma), grid_values, rtol=1e-10)


# --- trial unions ---------------------------------------------------------------


def test_trial_union_examples():
    spec, U = build_trial_union(SQUARE, 100, 400)
    assert (spec.r, spec.M, spec.eta) == (0.5, 4, 0.0)
    assert U.components == (Box((0.5, 0.5)),) * 4
    spec, U = build_trial_union(SQUARE, 100, 450)
    assert spec.r == pytest.approx(1 / math.sqrt(4.5)) and spec.M == 4
    assert spec.eta == pytest.approx(math.sqrt((1 - 4 / 4.5) / math.pi), rel=1e-12)
    assert spec.eta == pytest.approx(0.18806, abs=1e-5)
    assert volume(U) == pytest.approx(1.0, abs=1e-12)
    spec, U = build_trial_union(DISK, 77.0, 77.0)
    assert (spec.r, spec.M, spec.eta) == (1.0, 1, 0.0) and U.components == (DISK,)


def test_trial_union_infeasible_names_threshold():
    with pytest.raises(PreconditionViolation) as exc:
        build_trial_union(SQUARE, 100, 50)
    assert "lambda >= 100" in str(exc.value)


def _random_case(rng):
    d = rng.choice([2, 3])
    if rng.random() < 0.5:
        sides = [rng.uniform(0.5, 2.0) for _ in range(d)]
        sides[-1] = 1.0 / math.prod(sides[:-1])
        base = Box(tuple(sides))
    else:
        base = unit_ball(d)
    lam_star = rng.uniform(5.0, 200.0)
    lam = lam_star * rng.uniform(1.0, 12.0)
    return base, lam_star, lam


def test_trial_union_invariants_and_identity():
    rng = random.Random(7)
    for _ in range(200):
        base, lam_star, lam = _random_case(rng)
        gamma = rng.choice([0.0, 0.5, 1.0, 2.0])
        bc = rng.choice([DIRICHLET, NEUMANN])
        spec, U = build_trial_union(base, lam_star, lam)
        d = base.dim
        q = (lam / lam_star) ** (d / 2) / volume(base)
        assert q - 1 < spec.M <= q
        assert 0 <= spec.eta <= spec.r * (volume(base) / unit_ball_volume(d)) ** (1 / d) * (1 + 1e-12)
        assert volume(U) == pytest.approx(1.0, abs=1e-12)
        assert spec.component_count == len(U.components)
        direct = riesz_mean_union(U, bc, gamma, lam)
        assert direct == pytest.approx(trial_identity(spec, bc, gamma), rel=1e-10, abs=1e-300)


def test_union_ratio_is_volume_weighted_average():
    spec, U = build_trial_union(SQUARE, 60.0, 1000.0)
    gamma = 1.0
    r_union = riesz_mean_union(U, DIRICHLET, gamma, 1000.0) / weyl_main(SQUARE, gamma, 1000.0)
    r_base = normalized_ratio(SQUARE, DIRICHLET, gamma, 60.0)
    r_ball = normalized_ratio(Ball(1.0, 2), DIRICHLET, gamma, 1000.0 * spec.eta**2)
    w = spec.M * spec.r**2
    assert r_union == pytest.approx(w * r_base + (1 - w) * r_ball, rel=1e-12)
    assert min(r_base, r_ball) <= r_union <= max(r_base, r_ball)


CANDIDATES = [(b, ls) for b in (SQUARE, DISK) for ls in (25.0, 100.0, 400.0)]


@pytest.mark.parametrize("bc", [DIRICHLET, NEUMANN])
def test_optimize_union_single_body_wins_at_gamma_one(bc):
    res = optimize_union(CANDIDATES, bc, 1, 1e4)
    assert res.member == "single" and res.component_count == 1
    assert res.best_domain == DISK
    assert res.value == riesz_mean(DISK, bc, 1, 1e4)
    assert len(res.table) == 2 + 6


def test_optimize_union_errors_and_identity_case():
    with pytest.raises(PreconditionViolation) as exc:
        optimize_union([(SQUARE, 1e4), (DISK, 2e4)], DIRICHLET, 1, 100.0)
    assert "no feasible trial union" in str(exc.value)
    with pytest.raises(InvalidArgument):
        optimize_union([], DIRICHLET, 1, 100.0)
    with pytest.raises(InvalidArgument):
        optimize_union([(Box((2.0, 2.0)), 10.0)], DIRICHLET, 1, 100.0)
    res = optimize_union([(SQUARE, 300.0)], NEUMANN, 1, 300.0)
    assert res.value == riesz_mean(SQUARE, NEUMANN, 1, 300.0) and res.component_count == 1


def test_optimize_union_returns_table_extremum():
    cands = [(SQUARE, 50.0), (SQUARE, 20.0), (DISK, 30.0)]
    for bc in (DIRICHLET, NEUMANN):
        res = optimize_union(cands, bc, 0, 60.0)
        values = [row["value"] for row in res.table]
        assert res.value == (max(values) if bc is DIRICHLET else min(values))
        first = values.index(res.value)
        assert res.table[first]["branch"] == ("single" if res.trial is None else "union")


def test_component_count_scan():
    rows = component_count_scan(NEUMANN, 1, [1e3, 1e4], CANDIDATES)
    assert [r[1] for r in rows] == [1, 1]
    for lam, count, norm, value, _ in rows:
        assert norm == count / lam and value >= count * lam
    rows = component_count_scan(DIRICHLET, 0, [400.0], [(SQUARE, 25.0)])
    assert rows[0][0] == 400.0 and rows[0][1] >= 1


def test_neumann_zero_modes_lower_bound_union_values():
    for K in (1, 3, 7):
        U = DisjointUnion((Box((0.3, 0.2)),) * K)
        assert riesz_mean_union(U, NEUMANN, 1, 5.0) >= K * 5.0


def test_convergence_scan_box_family():
    recs = convergence_scan(parse_family("box2d_aspect:1,6"), DIRICHLET, 1, [1e2, 1e3, 1e4])
    floor = hausdorff_distance(SQUARE, Ball(math.pi ** -0.5, 2))
    assert [r.lam for r in recs] == [1e2, 1e3, 1e4]
    assert all(r.hausdorff_to_ball >= floor - 1e-9 for r in recs)
    assert recs[-1].hausdorff_to_ball == pytest.approx(floor, abs=1e-3)
    ref = [r.hausdorff_to_reference for r in recs]
    assert ref[-1] < ref[0]
    assert all(r.component_count == 1 for r in recs)


def test_convergence_scan_with_ball_member():
    recs = convergence_scan(parse_family("box2d_aspect:1,6+ball"), DIRICHLET, 1, [1e3, 1e4])
    for r in recs:
        assert r.hausdorff_to_ball == 0.0 and r.value_gap_vs_ball == 0.0
    assert len(convergence_scan(parse_family("ball@2"), NEUMANN, 1, [50.0])) == 1
    with pytest.raises(InvalidArgument):
        convergence_scan(parse_family("ball@2"), NEUMANN, 1, [50.0, 10.0])
