"""Restricted shape optimization of Riesz means and multi-component trial unions.

All optimal values here are restricted to the family or candidate set that
was searched; nothing is claimed about the optimum over all convex bodies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ._parallel import ordered_map
from .errors import InvalidArgument, NumericalFailure, PreconditionViolation
from .families import FamilySpec, unit_ball
from .geometry import (
    Ball,
    DisjointUnion,
    format_domain,
    hausdorff_distance,
    inradius,
    scale,
    unit_ball_volume,
    volume,
)
from .spectrum import DIRICHLET, NEUMANN, BoundaryCondition, riesz_mean, riesz_mean_union

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
MAX_SWEEPS = 3
Q_SNAP = 1e-12  # relative distance below which the copy quotient counts as an integer


@dataclass
class OptimizationResult:
    bc: BoundaryCondition
    gamma: float
    lam: float
    best_parameter: tuple
    best_domain: object
    value: float
    iterations: int
    tolerance_achieved: float
    member: str = ""  # family kind or "ball"; "single" or "union" from optimize_union
    degenerate: bool = False  # objective identically zero on the probed grid
    component_count: int = 1
    trial: Optional["TrialUnionSpec"] = None
    table: List[dict] = field(default_factory=list, repr=False)


def _better(bc, new, old):
    return new > old if bc is DIRICHLET else new < old


def _objective(D, bc, gamma, lam):
    v = riesz_mean(D, bc, gamma, lam)
    if not math.isfinite(v):
        raise NumericalFailure(f"non-finite Riesz mean on {format_domain(D)} at lambda={lam!r}")
    return v


def _golden(f, lo, hi, x0, f0, tol, maximize):
    """Golden-section search on [lo, hi]; returns the best (x, f) seen, never worse than (x0, f0)."""
    sign = 1.0 if maximize else -1.0
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best = (x0, f0)
    steps = 0
    for x, v in ((c, fc), (d, fd)):
        if sign * v > sign * best[1]:
            best = (x, v)
    while b - a > tol:
        steps += 1
        if sign * fc >= sign * fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
            x, v = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
            x, v = d, fd
        if sign * v > sign * best[1]:
            best = (x, v)
    return best[0], best[1], steps, b - a


def optimize_single(family: FamilySpec, bc, gamma, lam, tol=1e-4, points=64, threads=None) -> OptimizationResult:
    """Best family member for Tr(-Delta - lam)_-^gamma.

    A deterministic coarse grid is followed by golden-section coordinate
    descent (at most three sweeps) inside the grid cell around the best
    point.  Dirichlet maximizes, Neumann minimizes; ties go to the earliest
    grid point.
    """
    bc = BoundaryCondition.parse(bc)
    gamma, lam = float(gamma), float(lam)
    if not tol > 0:
        raise InvalidArgument(f"tol must be > 0, got {tol!r}")
    if not lam > 0:
        raise InvalidArgument(f"lambda must be > 0, got {lam!r}")
    grid = family.param_grid(points)
    members = family.members(grid)
    values = ordered_map(lambda m: _objective(m[2], bc, gamma, lam), members, threads)
    table = [
        {"member": m[0], "params": m[1], "domain": format_domain(m[2]), "value": v}
        for m, v in zip(members, values)
    ]
    arr = np.array(values)
    i = int(np.argmax(arr) if bc is DIRICHLET else np.argmin(arr))
    kind, params, dom = members[i]
    value = float(arr[i])
    degenerate = bool(np.all(arr == 0.0))
    if degenerate:
        kind, params, dom = members[0]
        value = 0.0
        i = 0

    iterations, achieved = 0, 0.0
    if not degenerate and kind == family.kind and family.n_params:
        # per-coordinate brackets: the neighbouring grid cells
        axes = [sorted(set(p[k] for p in grid)) for k in range(family.n_params)]
        x = list(params)
        widths = []
        for k, ax in enumerate(axes):
            j = ax.index(x[k])
            widths.append((ax[max(j - 1, 0)], ax[min(j + 1, len(ax) - 1)]))
        for _ in range(MAX_SWEEPS):
            improved = False
            achieved = 0.0
            for k in range(family.n_params):
                lo, hi = widths[k]
                if hi - lo <= tol:
                    continue

                def f(t, k=k):
                    y = list(x)
                    y[k] = t
                    return _objective(family.domain(tuple(y)), bc, gamma, lam)

                xk, vk, steps, width = _golden(f, lo, hi, x[k], value, tol, bc is DIRICHLET)
                iterations += steps
                achieved = max(achieved, width)
                if _better(bc, vk, value):
                    x[k], value, improved = xk, vk, True
            if not improved:
                break
        params = tuple(x)
        dom = family.domain(params)

    return OptimizationResult(
        bc, gamma, lam, tuple(params), dom, value, iterations, achieved,
        member=kind, degenerate=degenerate, table=table,
    )


# ---------------------------------------------------------------------------
# trial unions: M rescaled copies of a base body plus one remainder ball


@dataclass(frozen=True)
class TrialUnionSpec:
    base_domain: object
    base_lambda: float
    target_lambda: float
    r: float
    M: int
    eta: float
    dim: int

    @property
    def quotient(self) -> float:
        """(lam / lam*)^(d/2) / |base|, the real number M is the floor of (before integer snapping)."""
        return (self.target_lambda / self.base_lambda) ** (self.dim / 2.0) / volume(self.base_domain)

    @property
    def component_count(self) -> int:
        return self.M + (1 if self.eta > 0 else 0)


def build_trial_union(base, base_lambda, target_lambda) -> Tuple[TrialUnionSpec, DisjointUnion]:
    """M copies of scale(base, r), r = sqrt(lam*/lam), plus the ball that restores unit volume.

    The remainder ball has radius eta with M r^d |base| + eta^d |B_1| = 1.
    """
    base_lambda, target_lambda = float(base_lambda), float(target_lambda)
    if not (base_lambda > 0 and target_lambda > 0):
        raise InvalidArgument("base and target lambda must be > 0")
    if isinstance(base, DisjointUnion):
        raise InvalidArgument("trial base must be a single body")
    d = base.dim
    vol = volume(base)
    q = (target_lambda / base_lambda) ** (d / 2.0) / vol
    # a unit-volume ball has |B| = 1 only up to rounding; snap such q to the integer
    if abs(q - round(q)) <= Q_SNAP * q:
        q = float(round(q))
    M = int(math.floor(q))
    if M < 1:
        need = base_lambda * vol ** (2.0 / d)
        raise PreconditionViolation(
            f"trial union of {format_domain(base)} with lambda*={base_lambda!r} has no copies at "
            f"lambda={target_lambda!r}; need lambda >= {need!r}"
        )
    r = math.sqrt(base_lambda / target_lambda)
    # 1 - M r^d |base| = r^d |base| (q - M); exact zero when q is an integer
    leftover = r**d * vol * (q - M)
    eta = (leftover / unit_ball_volume(d)) ** (1.0 / d) if leftover > 0 else 0.0
    piece = scale(base, r)
    comps = [piece] * M
    if eta > 0:
        comps.append(Ball(eta, d))
    spec = TrialUnionSpec(base, base_lambda, target_lambda, r, M, eta, d)
    return spec, DisjointUnion(tuple(comps))


def trial_identity(spec: TrialUnionSpec, bc, gamma) -> float:
    """M (lam/lam*)^gamma Tr(base, lam*) + eta^(-2 gamma) Tr(B_1, lam eta^2)."""
    gamma = float(gamma)
    lam, lam_star = spec.target_lambda, spec.base_lambda
    value = spec.M * (lam / lam_star) ** gamma * riesz_mean(spec.base_domain, bc, gamma, lam_star)
    if spec.eta > 0:
        value += spec.eta ** (-2.0 * gamma) * riesz_mean(Ball(1.0, spec.dim), bc, gamma, lam * spec.eta**2)
    return value


def optimize_union(candidates: Sequence[tuple], bc, gamma, target_lambda, threads=None) -> OptimizationResult:
    """Best of the trial unions built from (base, lam*) candidates and the single bodies.

    The single-body branch evaluates every distinct candidate base directly
    at the target lambda (M = 1, no remainder ball).  Single bodies are
    ranked first, so they win ties.
    """
    bc = BoundaryCondition.parse(bc)
    gamma, lam = float(gamma), float(target_lambda)
    cands = [(b, float(ls)) for b, ls in candidates]
    if not cands:
        raise InvalidArgument("optimize_union needs at least one candidate")
    for b, _ in cands:
        if abs(volume(b) - 1.0) > 1e-9:
            raise InvalidArgument(f"candidate base {format_domain(b)} is not unit volume")

    built, failures = [], []
    for b, ls in cands:
        try:
            built.append(build_trial_union(b, ls, lam))
        except PreconditionViolation as exc:
            failures.append(str(exc))
    if not built:
        raise PreconditionViolation("no feasible trial union: " + "; ".join(failures))

    bases = []
    for b, _ in cands:
        if b not in bases:
            bases.append(b)
    jobs = [("single", None, b) for b in bases] + [("union", spec, U) for spec, U in built]

    def evaluate(job):
        kind, spec, D = job
        if kind == "single":
            return _objective(D, bc, gamma, lam)
        v = riesz_mean_union(D, bc, gamma, lam)
        if not math.isfinite(v):
            raise NumericalFailure(f"non-finite Riesz mean on trial union at lambda={lam!r}")
        return v

    values = ordered_map(evaluate, jobs, threads)
    table = []
    best = 0
    for i, ((kind, spec, D), v) in enumerate(zip(jobs, values)):
        row = {
            "branch": kind,
            "base": format_domain(D if spec is None else spec.base_domain),
            "base_lambda": lam if spec is None else spec.base_lambda,
            "M": 1 if spec is None else spec.M,
            "eta": 0.0 if spec is None else spec.eta,
            "components": 1 if spec is None else spec.component_count,
            "value": v,
        }
        table.append(row)
        if _better(bc, v, values[best]):
            best = i
    kind, spec, D = jobs[best]
    return OptimizationResult(
        bc, gamma, lam, () if spec is None else (spec.base_lambda,), D, values[best], 0, 0.0,
        member="single" if spec is None else "union",
        degenerate=all(v == 0.0 for v in values),
        component_count=1 if spec is None else spec.component_count,
        trial=spec, table=table,
    )


# ---------------------------------------------------------------------------
# scans


@dataclass
class ConvergenceRecord:
    lam: float
    best_parameter: tuple
    best_domain: str
    value: float
    hausdorff_to_ball: float
    hausdorff_to_reference: Optional[float]  # to the square/cube member, box families only
    value_gap_vs_ball: float
    inradius_sqrt_lambda: float
    component_count: int = 1


def _reference_member(family):
    if family.kind in ("box2d_aspect", "box3d_aspect") and all(lo <= 1.0 <= hi for lo, hi in family.ranges):
        return family.domain((1.0,) * family.n_params)
    return None


def convergence_scan(family, bc, gamma, lambda_list, tol=1e-4, points=64, candidates=None, threads=None):
    """Distance of the restricted optimizer to the unit-volume ball along increasing lambda."""
    bc = BoundaryCondition.parse(bc)
    lams = [float(x) for x in lambda_list]
    if not lams or any(b <= a for a, b in zip(lams, lams[1:])):
        raise InvalidArgument("lambda list must be non-empty and strictly increasing")
    ball = unit_ball(family.dim)
    ref = _reference_member(family)
    out = []
    for lam in lams:
        res = optimize_single(family, bc, gamma, lam, tol, points, threads)
        count = 1
        if candidates:
            count = optimize_union(candidates, bc, gamma, lam, threads).component_count
        tr_ball = riesz_mean(ball, bc, gamma, lam)
        gap = (res.value - tr_ball) / lam ** (float(gamma) + (family.dim - 1) / 2.0)
        out.append(
            ConvergenceRecord(
                lam,
                res.best_parameter,
                format_domain(res.best_domain),
                res.value,
                hausdorff_distance(res.best_domain, ball),
                None if ref is None else hausdorff_distance(res.best_domain, ref),
                gap,
                inradius(res.best_domain) * math.sqrt(lam),
                count,
            )
        )
    return out


def component_count_scan(bc, gamma, lambda_list, candidates, threads=None):
    """Rows (lambda, components, components / lambda^(d/2), value) of the best trial configuration.

    For Neumann every component carries a zero eigenvalue, so the best value
    is at least count * lambda^gamma; a violation raises NumericalFailure.
    """
    bc = BoundaryCondition.parse(bc)
    gamma = float(gamma)
    rows = []
    for lam in (float(x) for x in lambda_list):
        res = optimize_union(candidates, bc, gamma, lam, threads)
        d = res.best_domain.dim
        count = res.component_count
        if bc is NEUMANN and count * lam**gamma > res.value * (1.0 + 1e-12):
            raise NumericalFailure(
                f"Neumann zero-mode bound violated at lambda={lam!r}: {count} components, value {res.value!r}"
            )
        rows.append((lam, count, count / lam ** (d / 2.0), res.value, res.member))
    return rows
