"""Semiclassical constants, Weyl predictions and remainder diagnostics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import InvalidArgument
from .geometry import inradius, surface, volume
from .spectrum import BoundaryCondition, eigenvalues_below, riesz_mean, riesz_means


def lsc(gamma, dim) -> float:
    """Gamma(1+g) / ((4 pi)^(d/2) Gamma(1+g+d/2)), evaluated in log space."""
    gamma = float(gamma)
    if gamma < 0:
        raise InvalidArgument(f"gamma must be >= 0, got {gamma!r}")
    if dim < 0 or int(dim) != dim:
        raise InvalidArgument(f"dim must be a non-negative integer, got {dim!r}")
    return math.exp(
        math.lgamma(1.0 + gamma) - 0.5 * dim * math.log(4.0 * math.pi) - math.lgamma(1.0 + gamma + dim / 2.0)
    )


def weyl_main(D, gamma, lam) -> float:
    lam = float(lam)
    if lam < 0:
        raise InvalidArgument(f"lambda must be >= 0, got {lam!r}")
    d = D.dim
    return lsc(gamma, d) * volume(D) * lam ** (gamma + d / 2.0)


@dataclass(frozen=True)
class SemiclassicalTerms:
    gamma: float
    dim: int
    lsc: float
    main_term: float
    boundary_term: float
    bc_sign: int

    @property
    def prediction(self) -> float:
        return self.main_term + self.bc_sign * self.boundary_term


def boundary_term(D, gamma, lam) -> float:
    d = D.dim
    return 0.25 * lsc(gamma, d - 1) * surface(D) * float(lam) ** (gamma + (d - 1) / 2.0)


def weyl_two_term(D, bc, gamma, lam) -> SemiclassicalTerms:
    bc = BoundaryCondition.parse(bc)
    d = D.dim
    return SemiclassicalTerms(
        gamma=float(gamma),
        dim=d,
        lsc=lsc(gamma, d),
        main_term=weyl_main(D, gamma, lam),
        boundary_term=boundary_term(D, gamma, lam),
        bc_sign=bc.sign,
    )


def normalized_ratio(D, bc, gamma, lam) -> float:
    """Riesz mean divided by its leading Weyl term."""
    lam = float(lam)
    if not lam > 0:
        raise InvalidArgument(f"normalized ratio needs lambda > 0, got {lam!r}")
    return riesz_mean(D, bc, gamma, lam) / weyl_main(D, gamma, lam)


def normalized_ratios(D, bc, gamma, lams) -> np.ndarray:
    lams = np.asarray(lams, dtype=float)
    if np.any(lams <= 0):
        raise InvalidArgument("normalized ratio needs lambda > 0")
    main = np.array([weyl_main(D, gamma, lam) for lam in lams])
    return riesz_means(D, bc, gamma, lams) / main


# ---------------------------------------------------------------------------
# remainder diagnostics


def default_alpha(gamma) -> float:
    return 1.0 if gamma >= 1 else gamma / 2.0


@dataclass(frozen=True)
class RemainderRecord:
    lam: float
    value: float
    main: float
    boundary: float
    remainder: float
    normalized: float
    rate_factor: float
    alpha: float


@dataclass
class RemainderProfile:
    records: List[RemainderRecord]
    empirical_constant: float  # max rate factor over the grid
    bounded: Optional[bool]  # None for a single-point grid
    columns: tuple = field(
        default=("lambda", "value", "main", "boundary", "remainder", "normalized", "rate_factor"),
        repr=False,
    )

    def to_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.records:
            w.writerow(
                [format(float(v), ".17g") for v in
                 (r.lam, r.value, r.main, r.boundary, r.remainder, r.normalized, r.rate_factor)]
            )


def rate_denominator(bc, gamma, alpha, rin_sqrt_lam, dim) -> float:
    """Decay profile from the uniform two-term remainder bound for convex sets."""
    if BoundaryCondition.parse(bc) is BoundaryCondition.DIRICHLET:
        return rin_sqrt_lam ** (-alpha / 11.0)
    log_part = (1.0 + max(math.log(rin_sqrt_lam), 0.0)) ** (-alpha * max(1.0, gamma))
    return log_part + rin_sqrt_lam ** (1.0 - dim)


def remainder_profile(D, bc, gamma, lambda_grid, alpha=None) -> RemainderProfile:
    """Two-term remainders on a grid, rescaled by the predicted decay rate.

    ``bounded`` compares the grid maximum of the rate factor with twice its
    maximum on the lower half of the grid (split at the geometric midpoint).
    """
    bc = BoundaryCondition.parse(bc)
    gamma = float(gamma)
    grid = np.asarray(lambda_grid, dtype=float)
    if len(grid) == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise InvalidArgument("lambda grid must be non-empty, positive and strictly increasing")
    if alpha is None:
        alpha = default_alpha(gamma)
    if gamma >= 1 and alpha != 1.0:
        raise InvalidArgument(f"alpha must be 1 for gamma >= 1, got {alpha!r}")
    if gamma < 1 and not 0 < alpha < gamma:
        raise InvalidArgument(f"alpha must lie in (0, gamma) for gamma < 1, got {alpha!r}")
    d = D.dim
    H = surface(D)
    rin = inradius(D)
    values = riesz_means(D, bc, gamma, grid)
    records = []
    for lam, value in zip(grid, values):
        terms = weyl_two_term(D, bc, gamma, lam)
        rem = value - terms.prediction
        normalized = abs(rem) / (H * lam ** (gamma + (d - 1) / 2.0))
        rate = normalized / rate_denominator(bc, gamma, alpha, rin * math.sqrt(lam), d)
        records.append(
            RemainderRecord(float(lam), float(value), terms.main_term, terms.boundary_term,
                            rem, normalized, rate, alpha)
        )
    rates = np.array([r.rate_factor for r in records])
    bounded = None
    if len(records) > 1:
        mid = math.sqrt(grid[0] * grid[-1])
        lower = rates[grid <= mid * (1 + 1e-12)]
        bounded = bool(rates.max() <= 2.0 * lower.max())
    return RemainderProfile(records, float(rates.max()), bounded)


# ---------------------------------------------------------------------------
# Aizenman-Lieb lifting


def _beta(a, b):
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def aizenman_lieb_lift(D, bc, gamma_src, gamma_dst, lam) -> float:
    """Riesz mean of order ``gamma_dst`` from the order ``gamma_src`` Riesz mean.

    Evaluates
        B(a, gamma_src + 1)^-1 * int_0^lam t^(a-1) R_src(lam - t) dt,  a = gamma_dst - gamma_src,
    exactly.  The integrand is smooth between the breakpoints t = lam - mu.
    For integer ``gamma_src`` each piece is a polynomial in t times t^(a-1)
    (binomial expansion with suffix power sums of the gaps); otherwise every
    eigenvalue contributes its complete Beta integral.
    """
    gamma_src, gamma_dst, lam = float(gamma_src), float(gamma_dst), float(lam)
    if gamma_src < 0:
        raise InvalidArgument(f"gamma_src must be >= 0, got {gamma_src!r}")
    if not gamma_dst > gamma_src:
        raise InvalidArgument(f"gamma_dst must exceed gamma_src, got {gamma_dst!r} <= {gamma_src!r}")
    if not lam > 0:
        raise InvalidArgument(f"lambda must be > 0, got {lam!r}")
    a = gamma_dst - gamma_src
    eigs = eigenvalues_below(D, BoundaryCondition.parse(bc), lam).eigenvalues
    if len(eigs) == 0:
        return 0.0
    c = np.sort(lam - eigs)  # breakpoints, ascending
    B = _beta(a, gamma_src + 1.0)

    if gamma_src != int(gamma_src):
        # int_0^c t^(a-1) (c - t)^g dt = B(a, g + 1) c^(a+g)
        return math.fsum(B * c**gamma_dst) / B

    p = int(gamma_src)
    knots = np.concatenate([[0.0], c])  # piece k is (knots[k], knots[k+1]), active c[k:]
    total = []
    for i in range(p + 1):
        # suffix sums S_k = sum_{j >= k} c_j^(p-i), k = 0..n-1
        powers = c ** (p - i)
        suffix = np.cumsum(powers[::-1])[::-1]
        e = a + i
        incr = (knots[1:] ** e - knots[:-1] ** e) / e
        coef = math.comb(p, i) * (-1.0) ** i
        total.append(coef * suffix * incr)
    return math.fsum(np.concatenate(total)) / B
