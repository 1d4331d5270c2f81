"""Semiclassical inequality checks and grid estimates of excess factors.

Every estimate here is a grid extremum, so it is a one-sided inner bound on
the corresponding sup/inf over all convex sets and all lambda.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ._parallel import ordered_map
from .errors import InvalidArgument
from .families import FamilySpec, off_spectrum
from .geometry import format_domain, parse_domain, surface, volume
from .semiclassics import lsc, normalized_ratio
from .spectrum import DIRICHLET, BoundaryCondition, eigenvalues_below, riesz_from_eigenvalues


@dataclass
class MarginReport:
    """One row per lambda: (lambda, value, weyl, margin); pass iff min margin >= 0."""

    rows: List[tuple]
    min_margin: float
    passed: bool


def _one_term_margins(D, bc, gamma, grid):
    bc = BoundaryCondition.parse(bc)
    grid = np.asarray(grid, dtype=float)
    if len(grid) == 0 or np.any(grid <= 0):
        raise InvalidArgument("lambda grid must be non-empty and positive")
    top = float(grid.max()) * (1.0 + 1e-9)
    eigs = eigenvalues_below(D, bc, top).eigenvalues
    grid = off_spectrum(eigs, grid)
    L = lsc(gamma, D.dim)
    vol = volume(D)
    rows = []
    for lam in grid:
        value = riesz_from_eigenvalues(eigs, gamma, lam) if gamma else float(np.searchsorted(eigs, lam))
        weyl = L * vol * lam ** (gamma + D.dim / 2.0)
        margin = weyl - value if bc is DIRICHLET else value - weyl
        rows.append((float(lam), value, weyl, margin))
    m = min(r[3] for r in rows)
    return MarginReport(rows, m, m >= 0)


def polya_check(D, bc, lambda_grid) -> MarginReport:
    """Counting function against its Weyl term (below for D, above for N)."""
    return _one_term_margins(D, bc, 0.0, lambda_grid)


def bly_kroger_check(D, bc, gamma, lambda_grid) -> MarginReport:
    if gamma < 1:
        raise InvalidArgument(f"Berezin-Li-Yau / Kroger checks need gamma >= 1, got {gamma!r}")
    return _one_term_margins(D, bc, float(gamma), lambda_grid)


# ---------------------------------------------------------------------------
# grid scans over a family


@dataclass
class GridPoint:
    member: str  # family kind or "ball"
    params: tuple
    domain: str
    lam: float
    value: float
    main: float
    ratio: float


def _member_rows(args):
    (kind, params, D), bc, gamma, grid = args
    top = float(np.max(grid)) * (1.0 + 1e-9)
    eigs = eigenvalues_below(D, bc, top).eigenvalues
    lams = off_spectrum(eigs, grid)
    L = lsc(gamma, D.dim)
    vol = volume(D)
    desc = format_domain(D)
    rows = []
    for lam in lams:
        value = riesz_from_eigenvalues(eigs, gamma, lam) if gamma else float(np.searchsorted(eigs, lam))
        main = L * vol * lam ** (gamma + D.dim / 2.0)
        rows.append(GridPoint(kind, params, desc, float(lam), value, main, value / main))
    return rows


def scan_family(family: FamilySpec, bc, gamma, lambda_grid, param_grid, threads=None):
    """Ratios on the (member, lambda) grid, ordered member-major."""
    bc = BoundaryCondition.parse(bc)
    gamma = float(gamma)
    grid = np.asarray(lambda_grid, dtype=float)
    if len(grid) == 0 or np.any(grid <= 0):
        raise InvalidArgument("lambda grid must be non-empty and positive")
    if isinstance(param_grid, int):
        param_grid = family.param_grid(param_grid)
    if len(param_grid) == 0:
        raise InvalidArgument("parameter grid must be non-empty")
    members = family.members(param_grid)
    blocks = ordered_map(_member_rows, [(m, bc, gamma, grid) for m in members], threads)
    return [row for block in blocks for row in block]


def _extremum(rows, bc):
    """Index of the first row attaining the max (Dirichlet) or min (Neumann) ratio."""
    ratios = np.array([r.ratio for r in rows])
    return int(np.argmax(ratios) if bc is DIRICHLET else np.argmin(ratios))


@dataclass
class ExcessEstimate:
    gamma: float
    dim: int
    bc: BoundaryCondition
    value: float
    arg_params: tuple
    arg_lambda: float
    arg_domain: str
    grids: dict
    rows: List[GridPoint] = field(repr=False, default_factory=list)

    @property
    def argument(self):
        """(family parameter, lambda) at the extremum."""
        return self.arg_params, self.arg_lambda


def excess_factor_estimate(family, bc, gamma, lambda_grid, param_grid, threads=None) -> ExcessEstimate:
    """Grid max (Dirichlet) / min (Neumann) of the normalized Riesz mean."""
    bc = BoundaryCondition.parse(bc)
    rows = scan_family(family, bc, gamma, lambda_grid, param_grid, threads)
    i = _extremum(rows, bc)
    best = rows[i]
    grids = {
        "family": family.describe(),
        "lambda": [float(x) for x in np.asarray(lambda_grid, dtype=float)],
        "params": len(rows) // len(np.atleast_1d(lambda_grid)),
    }
    return ExcessEstimate(float(gamma), family.dim, bc, best.ratio, best.params, best.lam, best.domain, grids, rows)


@dataclass
class Witness:
    domain: str
    lam: float
    gamma: float
    ratio: float


@dataclass
class CriticalExponentEstimate:
    bc: BoundaryCondition
    dim: int
    lower: Optional[float]  # largest grid gamma with a violating witness
    upper: Optional[float]  # smallest grid gamma from which no violation occurs
    extremal_ratios: List[tuple]  # (gamma, extremal ratio)
    certificate: List[float]  # grid gammas on the correct side of 1
    witnesses: List[Witness]


def critical_exponent_scan(family, bc, gamma_grid, lambda_grid, param_grid, threads=None):
    """Monotone scan in gamma for violations of the one-term inequality."""
    bc = BoundaryCondition.parse(bc)
    gammas = sorted(float(g) for g in gamma_grid)
    if not gammas or gammas[0] < 0 or gammas[-1] > 1.5:
        raise InvalidArgument("gamma grid must be non-empty and lie in [0, 1.5]")
    extremal, ok, witnesses = [], [], []
    for g in gammas:
        est = excess_factor_estimate(family, bc, g, lambda_grid, param_grid, threads)
        extremal.append((g, est.value))
        violated = est.value > 1.0 if bc is DIRICHLET else est.value < 1.0
        if violated:
            witnesses.append(Witness(est.arg_domain, est.arg_lambda, g, est.value))
        else:
            ok.append(g)
    lower = max((w.gamma for w in witnesses), default=None)
    upper = None
    for g in reversed(gammas):
        if g in ok and (lower is None or g > lower):
            upper = g
        else:
            break
    return CriticalExponentEstimate(bc, family.dim, lower, upper, extremal, ok, witnesses)


def verify_witness(w: Witness, bc) -> bool:
    """Re-evaluate a stored witness; True when it still violates the inequality."""
    bc = BoundaryCondition.parse(bc)
    ratio = normalized_ratio(parse_domain(w.domain), bc, w.gamma, w.lam)
    return ratio > 1.0 if bc is DIRICHLET else ratio < 1.0


@dataclass
class MarginEstimate:
    gamma: float
    dim: int
    bc: BoundaryCondition
    c_hat: float
    arg_params: tuple
    arg_lambda: float
    consistent: bool  # value <= (main - c_hat * scale)_+ (D) / value >= main + c_hat * scale (N) everywhere
    grids: dict
    rows: List[tuple] = field(repr=False, default_factory=list)  # (params, lambda, value, main, surplus)


def two_term_margin(family, bc, gamma, lambda_grid, param_grid, threads=None) -> MarginEstimate:
    """Grid infimum of the one-term surplus measured in boundary units.

    surplus = +-(main - value) / (H(dD) lam^(gamma + (d-1)/2)), + for Dirichlet.
    """
    bc = BoundaryCondition.parse(bc)
    gamma = float(gamma)
    if not gamma > 0:
        raise InvalidArgument(f"two-term margin needs gamma > 0, got {gamma!r}")
    pts = scan_family(family, bc, gamma, lambda_grid, param_grid, threads)
    rows = []
    surf = {}
    for p in pts:
        if p.domain not in surf:
            surf[p.domain] = (surface(parse_domain(p.domain)), family.dim)
        H, d = surf[p.domain]
        scale = H * p.lam ** (gamma + (d - 1) / 2.0)
        diff = p.main - p.value if bc is DIRICHLET else p.value - p.main
        rows.append((p.params, p.lam, p.value, p.main, diff / scale, scale))
    surpluses = np.array([r[4] for r in rows])
    i = int(np.argmin(surpluses))
    c_hat = float(surpluses[i])
    if bc is DIRICHLET:
        consistent = all(r[2] <= max(r[3] - c_hat * r[5], 0.0) * (1 + 1e-12) + 1e-300 for r in rows)
    else:
        consistent = all(r[2] >= (r[3] + c_hat * r[5]) * (1 - 1e-12) for r in rows)
    grids = {"family": family.describe(), "lambda": [float(x) for x in np.asarray(lambda_grid, dtype=float)]}
    return MarginEstimate(gamma, family.dim, bc, c_hat, rows[i][0], rows[i][1], consistent, grids,
                          [r[:5] for r in rows])
