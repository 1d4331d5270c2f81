"""Positive zeros of Bessel functions and their derivatives.

Zeros are located by scanning for sign changes from a rigorous lower bound
on the first zero, then refined down to adjacent floating point numbers by
a vectorised Illinois (modified false position) iteration that keeps every
root bracketed.  Results are cached per
``(kind, order)``.
"""

from __future__ import annotations

import math
import threading

import numpy as np
from scipy import special

from .errors import InvalidArgument, NumericalFailure

KINDS = ("J", "Jprime", "spherical_j", "spherical_jprime")

# consecutive positive zeros of every supported function are more than 1.8 apart
_STEP = 1.0
_ILLINOIS_ITERS = 30
_MAX_ITERS = 120


def _evaluator(kind, order):
    if kind == "J":
        return lambda x: special.jv(order, x)
    if kind == "Jprime":
        return lambda x: special.jvp(order, x)
    if kind == "spherical_j":
        return lambda x: special.spherical_jn(order, x)
    if kind == "spherical_jprime":
        return lambda x: special.spherical_jn(order, x, derivative=True)
    raise InvalidArgument(f"unknown Bessel kind {kind!r}; expected one of {KINDS}")


def first_zero_lower_bound(kind, order):
    """A point strictly below the first positive zero where the function is not small.

    J_nu and J_nu' have no zeros in (0, nu]; j_l has none below l + 1/2 and
    j_l' none below sqrt(l(l+1)) (from the differential equations).
    The order-0 derivatives vanish at the origin, so start away from it.
    """
    if kind == "J":
        return max(float(order), 0.5)
    if kind == "Jprime":
        return float(order) if order >= 1 else 1.0
    if kind == "spherical_j":
        return order + 0.5
    if kind == "spherical_jprime":
        return math.sqrt(order * (order + 1.0)) if order >= 1 else 1.0
    raise InvalidArgument(f"unknown Bessel kind {kind!r}")


def mcmahon_estimate(kind, order, index):
    """Leading McMahon asymptotic for the index-th zero (used to size scans)."""
    nu = order + 0.5 if kind.startswith("spherical") else float(order)
    shift = 0.25 if kind in ("J", "spherical_j") else 0.75
    if kind == "Jprime" and order == 0:
        # zeros of J0' are the zeros of J1
        nu, shift = 1.0, 0.25
    return (index + nu / 2.0 - shift) * math.pi


def _refine(f, a, b, fa, fb):
    """Shrink brackets [a, b] with fa * fb < 0 to a few ulps, all at once.

    Illinois steps first; elements still open after ``_ILLINOIS_ITERS`` rounds
    fall back to bisection, which always terminates.
    """
    a, b, fa, fb = (np.array(v, dtype=float) for v in (a, b, fa, fb))
    side = np.zeros(len(a), dtype=np.int8)
    active = np.ones(len(a), dtype=bool)
    for it in range(_MAX_ITERS):
        idx = np.nonzero(active)[0]
        if len(idx) == 0:
            return 0.5 * (a + b)
        A, B, FA, FB = a[idx], b[idx], fa[idx], fb[idx]
        if it < _ILLINOIS_ITERS:
            x = (A * FB - B * FA) / (FB - FA)
            x = np.where((x > A) & (x < B), x, 0.5 * (A + B))
        else:
            x = 0.5 * (A + B)
        fx = f(x)
        if not np.all(np.isfinite(fx)):
            raise NumericalFailure("non-finite Bessel value while refining a zero")
        left = np.sign(fx) == np.sign(FA)
        # Illinois: halve the value at the endpoint that stayed fixed twice
        s_old = side[idx]
        new_fa = np.where(left, fx, np.where(s_old == -1, 0.5 * FA, FA))
        new_fb = np.where(left, np.where(s_old == 1, 0.5 * FB, FB), fx)
        a[idx] = np.where(left, x, A)
        b[idx] = np.where(left, B, x)
        fa[idx], fb[idx] = new_fa, new_fb
        side[idx] = np.where(left, 1, -1)
        done = (fx == 0.0) | (b[idx] - a[idx] <= 4.0 * np.spacing(b[idx]))
        a[idx] = np.where(fx == 0.0, x, a[idx])
        b[idx] = np.where(fx == 0.0, x, b[idx])
        active[idx[done]] = False
    raise NumericalFailure(f"zero refinement did not converge in {_MAX_ITERS} iterations")


class _ZeroTable:
    __slots__ = ("kind", "order", "f", "zeros", "scanned_to", "last_value")

    def __init__(self, kind, order):
        self.kind = kind
        self.order = order
        self.f = _evaluator(kind, order)
        self.zeros = np.empty(0)
        self.scanned_to = first_zero_lower_bound(kind, order)
        self.last_value = float(self.f(self.scanned_to))

    def extend(self, xmax):
        """Find all zeros in (scanned_to, xmax]; returns the new table."""
        if xmax <= self.scanned_to:
            return self.zeros
        n = int(math.ceil((xmax - self.scanned_to) / _STEP))
        x = self.scanned_to + _STEP * np.arange(n + 1)
        fx = self.f(x)
        fx[0] = self.last_value
        if not np.all(np.isfinite(fx)):
            raise NumericalFailure(
                f"non-finite values of {self.kind} order {self.order} on [{x[0]:.6g}, {x[-1]:.6g}]"
            )
        s = np.sign(fx)
        exact = x[1:][s[1:] == 0.0]
        cross = np.nonzero(s[:-1] * s[1:] < 0)[0]
        roots = _refine(self.f, x[cross], x[cross + 1], fx[cross], fx[cross + 1])
        found = np.sort(np.concatenate([roots, exact]))
        zeros = np.concatenate([self.zeros, found])
        zeros.flags.writeable = False
        self.zeros = zeros
        self.scanned_to = float(x[-1])
        self.last_value = float(fx[-1])
        return zeros


_tables = {}
_lock = threading.Lock()


def _table(kind, order):
    key = (kind, int(order))
    tab = _tables.get(key)
    if tab is None:
        with _lock:
            tab = _tables.get(key)
            if tab is None:
                tab = _ZeroTable(kind, int(order))
                _tables[key] = tab
    return tab


def _validate(kind, order):
    if kind not in KINDS:
        raise InvalidArgument(f"unknown Bessel kind {kind!r}; expected one of {KINDS}")
    if int(order) != order or order < 0:
        raise InvalidArgument(f"order must be a non-negative integer, got {order!r}")


def zeros_below(kind, order, xmax):
    """All positive zeros strictly below ``xmax``, ascending."""
    _validate(kind, order)
    tab = _table(kind, order)
    # extend() publishes zeros before scanned_to, so read in the opposite order
    covered = tab.scanned_to >= xmax
    zeros = tab.zeros
    if not covered:
        with _lock:
            zeros = tab.extend(xmax)
    return zeros[: np.searchsorted(zeros, xmax, side="left")]


def bessel_zero(kind, order, index, max_rounds=60):
    """The ``index``-th positive zero (1-based) of the named function."""
    _validate(kind, order)
    if int(index) != index or index < 1:
        raise InvalidArgument(f"index must be >= 1, got {index!r}")
    tab = _table(kind, order)
    target = mcmahon_estimate(kind, order, index) + math.pi
    for _ in range(max_rounds):
        zeros = tab.zeros
        if len(zeros) >= index:
            return float(zeros[index - 1])
        with _lock:
            tab.extend(max(target, tab.scanned_to + math.pi))
        target *= 1.5
    raise NumericalFailure(
        f"could not isolate zero #{index} of {kind} order {order}; "
        f"scanned to x={tab.scanned_to:.6g}, found {len(tab.zeros)}"
    )


def clear_cache():
    with _lock:
        _tables.clear()
