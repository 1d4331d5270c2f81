"""Exact Dirichlet and Neumann spectra of catalogue domains, and Riesz means.

Spectra are enumerated below a cutoff with the strict convention
``mu < cutoff``.  Multiplicities come from index data (lattice points,
angular orders); no floating point deduplication happens anywhere.
"""

from __future__ import annotations

import csv
import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from . import bessel
from .errors import BudgetExceeded, InvalidArgument
from .geometry import Ball, Box, Interval, Product, components, volume

DEFAULT_BUDGET = 50_000_000
_budget = DEFAULT_BUDGET


class BoundaryCondition(str, enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"

    @classmethod
    def parse(cls, value) -> "BoundaryCondition":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        if key in ("d", "dirichlet"):
            return cls.DIRICHLET
        if key in ("n", "neumann"):
            return cls.NEUMANN
        raise InvalidArgument(f"unknown boundary condition {value!r}")

    @property
    def sign(self) -> int:
        """Sign of the boundary term in the two-term Weyl law."""
        return -1 if self is BoundaryCondition.DIRICHLET else 1


DIRICHLET = BoundaryCondition.DIRICHLET
NEUMANN = BoundaryCondition.NEUMANN


def set_budget(cap):
    """Set the process-wide cap on enumerated eigenvalues; returns the old cap."""
    global _budget
    old, _budget = _budget, int(cap)
    eigenvalues_below.cache_clear()
    return old


def get_budget():
    return _budget


def weyl_count_estimate(D, cutoff) -> float:
    d = D.dim
    l0 = math.exp(-0.5 * d * math.log(4.0 * math.pi) - math.lgamma(1.0 + d / 2.0))
    return l0 * volume(D) * cutoff ** (d / 2.0) * 1.5 + 1e3


@dataclass(frozen=True, eq=False)
class SpectrumSlice:
    cutoff: float
    eigenvalues: np.ndarray  # non-decreasing, repeated with multiplicity
    multiplicity: np.ndarray  # structural multiplicity of the group each entry came from
    domain: object
    bc: BoundaryCondition

    def __len__(self):
        return len(self.eigenvalues)

    def below(self, lam) -> np.ndarray:
        return self.eigenvalues[: np.searchsorted(self.eigenvalues, lam, side="left")]

    def to_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "eigenvalue", "multiplicity_tag"])
        for i, (mu, m) in enumerate(zip(self.eigenvalues, self.multiplicity)):
            w.writerow([i, format(float(mu), ".17g"), int(m)])


@dataclass(frozen=True)
class RieszValue:
    gamma: float
    lam: float
    value: float
    main_term: float  # L_{gamma,d} |D| lam^(gamma + d/2)

    @property
    def ratio(self) -> float:
        return self.value / self.main_term if self.main_term > 0 else 0.0


# ---------------------------------------------------------------------------
# enumerators: each returns (values, multiplicity) with values < cutoff, unsorted


def _term(n, a):
    return (n * np.pi / a) ** 2


def _interval(length, bc, cutoff):
    start = 1 if bc is DIRICHLET else 0
    nmax = int(length * math.sqrt(cutoff) / math.pi) + 1
    vals = _term(np.arange(start, nmax + 1, dtype=float), length)
    vals = vals[vals < cutoff]
    return vals, np.ones(len(vals), dtype=np.int64)


def _box(sides, bc, cutoff):
    start = 1 if bc is DIRICHLET else 0
    mins = [_term(float(start), a) for a in sides]
    partial = np.zeros(1)
    for i, a in enumerate(sides):
        rest = sum(mins[i + 1:])
        # per-coordinate pruning: n_i <= a_i sqrt(remaining)/pi
        nmax = int(a * math.sqrt(cutoff) / math.pi) + 1
        terms = _term(np.arange(start, nmax + 1, dtype=float), a)
        cand = (partial[:, None] + terms[None, :]).ravel()
        if i < len(sides) - 1:
            partial = cand[cand + rest * (1.0 - 1e-9) < cutoff]
        else:
            partial = cand[cand < cutoff]
    return partial, np.ones(len(partial), dtype=np.int64)


def _disk(radius, bc, cutoff):
    xmax = radius * math.sqrt(cutoff)
    kind = "J" if bc is DIRICHLET else "Jprime"
    vals, mult = [], []
    if bc is NEUMANN:
        vals.append(np.zeros(1))
        mult.append(np.ones(1, dtype=np.int64))
    k = 0
    while bessel.first_zero_lower_bound(kind, k) < xmax:
        z = bessel.zeros_below(kind, k, xmax)
        if len(z) == 0 and k > 0:
            break
        ev = (z / radius) ** 2
        ev = ev[ev < cutoff]
        copies = 1 if k == 0 else 2
        vals.append(np.repeat(ev, copies))
        mult.append(np.full(copies * len(ev), copies, dtype=np.int64))
        k += 1
    return np.concatenate(vals) if vals else np.empty(0), (
        np.concatenate(mult) if mult else np.empty(0, dtype=np.int64)
    )


def _ball3(radius, bc, cutoff):
    xmax = radius * math.sqrt(cutoff)
    kind = "spherical_j" if bc is DIRICHLET else "spherical_jprime"
    vals, mult = [], []
    if bc is NEUMANN:
        vals.append(np.zeros(1))
        mult.append(np.ones(1, dtype=np.int64))
    l = 0
    while bessel.first_zero_lower_bound(kind, l) < xmax:
        z = bessel.zeros_below(kind, l, xmax)
        if len(z) == 0 and l > 0:
            break
        ev = (z / radius) ** 2
        ev = ev[ev < cutoff]
        copies = 2 * l + 1
        vals.append(np.repeat(ev, copies))
        mult.append(np.full(copies * len(ev), copies, dtype=np.int64))
        l += 1
    return np.concatenate(vals) if vals else np.empty(0), (
        np.concatenate(mult) if mult else np.empty(0, dtype=np.int64)
    )


def _enumerate(D, bc, cutoff):
    if isinstance(D, Interval):
        return _interval(D.length, bc, cutoff)
    if isinstance(D, Box):
        if D.dim == 1:
            return _interval(D.sides[0], bc, cutoff)
        return _box(D.sides, bc, cutoff)
    if isinstance(D, Ball):
        if D.dim == 1:
            return _interval(2.0 * D.radius, bc, cutoff)
        if D.dim == 2:
            return _disk(D.radius, bc, cutoff)
        return _ball3(D.radius, bc, cutoff)
    if isinstance(D, Product):
        cv, cm = _enumerate(D.cross_section, bc, cutoff)
        iv, _ = _interval(D.length, bc, cutoff)
        sums = (cv[:, None] + iv[None, :]).ravel()
        mult = np.repeat(cm, len(iv))
        keep = sums < cutoff
        return sums[keep], mult[keep]
    raise InvalidArgument(f"not a catalogue domain: {D!r}")


@functools.lru_cache(maxsize=64)
def eigenvalues_below(D, bc, cutoff) -> SpectrumSlice:
    """Every eigenvalue strictly below ``cutoff``, with multiplicity, ascending."""
    bc = BoundaryCondition.parse(bc)
    cutoff = float(cutoff)
    if not cutoff > 0.0 or not math.isfinite(cutoff):
        raise InvalidArgument(f"cutoff must be positive and finite, got {cutoff!r}")
    est = weyl_count_estimate(D, cutoff)
    if est > _budget:
        raise BudgetExceeded(est, _budget)
    parts = [_enumerate(c, bc, cutoff) for c in components(D)]
    vals = np.concatenate([p[0] for p in parts])
    mult = np.concatenate([p[1] for p in parts])
    order = np.argsort(vals, kind="stable")
    vals, mult = vals[order], mult[order]
    vals.flags.writeable = False
    mult.flags.writeable = False
    return SpectrumSlice(cutoff, vals, mult, D, bc)


def counting(D, bc, lam) -> int:
    """N(lam): number of eigenvalues strictly below ``lam``."""
    lam = float(lam)
    if lam < 0:
        raise InvalidArgument(f"lambda must be >= 0, got {lam!r}")
    if lam == 0.0:
        return 0
    return len(eigenvalues_below(D, BoundaryCondition.parse(bc), lam))


def riesz_terms(eigs, gamma, lam) -> np.ndarray:
    """(lam - mu)^gamma for mu < lam, largest gap first."""
    mu = eigs[eigs < lam]
    gaps = lam - mu
    if gamma == 0:
        return np.ones(len(gaps))
    return np.sort(gaps)[::-1] ** gamma


def riesz_from_eigenvalues(eigs, gamma, lam) -> float:
    return math.fsum(riesz_terms(np.asarray(eigs), gamma, lam))


def _check(gamma, lam):
    gamma, lam = float(gamma), float(lam)
    if gamma < 0 or not math.isfinite(gamma):
        raise InvalidArgument(f"gamma must be >= 0, got {gamma!r}")
    if lam < 0 or not math.isfinite(lam):
        raise InvalidArgument(f"lambda must be >= 0, got {lam!r}")
    return gamma, lam


def riesz_mean(D, bc, gamma, lam) -> float:
    """Tr(-Delta_D - lam)_-^gamma; for gamma = 0 the strict counting function."""
    gamma, lam = _check(gamma, lam)
    if lam == 0.0:
        return 0.0
    eigs = eigenvalues_below(D, BoundaryCondition.parse(bc), lam).eigenvalues
    if gamma == 0:
        return float(len(eigs))
    return riesz_from_eigenvalues(eigs, gamma, lam)


def riesz_mean_union(U, bc, gamma, lam) -> float:
    """Riesz mean of a disjoint union, summed over component spectra.

    The component terms are summed with one exactly rounded ``fsum`` so the
    result is bit-identical to :func:`riesz_mean` on the merged spectrum.
    """
    gamma, lam = _check(gamma, lam)
    if lam == 0.0:
        return 0.0
    bc = BoundaryCondition.parse(bc)
    terms = [
        riesz_terms(eigenvalues_below(c, bc, lam).eigenvalues, gamma, lam) for c in components(U)
    ]
    return math.fsum(np.concatenate(terms))


def riesz_means(D, bc, gamma, lams) -> np.ndarray:
    """Riesz means on a grid of lambdas from one enumeration at the largest."""
    lams = np.asarray(lams, dtype=float)
    out = np.zeros(len(lams))
    top = float(lams.max()) if len(lams) else 0.0
    if top <= 0:
        return out
    eigs = eigenvalues_below(D, BoundaryCondition.parse(bc), top).eigenvalues
    for i, lam in enumerate(lams):
        _check(gamma, lam)
        if lam == 0.0:
            continue
        if gamma == 0:
            out[i] = float(np.searchsorted(eigs, lam, side="left"))
        else:
            out[i] = riesz_from_eigenvalues(eigs, gamma, lam)
    return out


def riesz_value(D, bc, gamma, lam) -> RieszValue:
    from .semiclassics import weyl_main

    value = riesz_mean(D, bc, gamma, lam)
    return RieszValue(float(gamma), float(lam), value, weyl_main(D, gamma, lam))


def first_eigenvalue(D, bc) -> float:
    """Lowest eigenvalue, found by growing the cutoff until something appears."""
    bc = BoundaryCondition.parse(bc)
    if bc is NEUMANN:
        return 0.0
    cutoff = 1.0
    while True:
        sl = eigenvalues_below(D, bc, cutoff)
        if len(sl):
            return float(sl.eigenvalues[0])
        cutoff *= 4.0

