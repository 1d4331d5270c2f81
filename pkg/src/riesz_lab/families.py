"""Unit-volume parametric families of convex bodies, and lambda grids.

Family text syntax: ``kind[@dim][:lo,hi[;lo,hi]][+ball]``, for example
``box2d_aspect:1,6``, ``box3d_aspect:1,3;1,3``, ``ball@3``,
``product_slab@3:0.5,2`` or ``box2d_aspect:1,6+ball``.  The ``+ball``
suffix adds the unit-volume ball of the same dimension as an extra member.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import InvalidArgument
from .geometry import Ball, Box, Interval, Product, normalize_unit_volume

KINDS = ("box2d_aspect", "box3d_aspect", "ball", "product_slab")

_DEFAULT_RANGES = {
    "box2d_aspect": ((1.0, 4.0),),
    "box3d_aspect": ((1.0, 3.0), (1.0, 3.0)),
    "ball": (),
    "product_slab": ((0.25, 4.0),),
}


def unit_ball(dim) -> Ball:
    return normalize_unit_volume(Ball(1.0, dim))[0]


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    ranges: Optional[Tuple[Tuple[float, float], ...]] = None
    dim: Optional[int] = None
    include_ball: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown family kind {self.kind!r}; expected one of {KINDS}")
        ranges = self.ranges if self.ranges is not None else _DEFAULT_RANGES[self.kind]
        ranges = tuple((float(lo), float(hi)) for lo, hi in ranges)
        if len(ranges) != len(_DEFAULT_RANGES[self.kind]):
            raise InvalidArgument(
                f"{self.kind} takes {len(_DEFAULT_RANGES[self.kind])} parameter range(s), got {len(ranges)}"
            )
        for lo, hi in ranges:
            if not (0 < lo <= hi and math.isfinite(hi)):
                raise InvalidArgument(f"bad parameter range ({lo}, {hi}) for {self.kind}")
        object.__setattr__(self, "ranges", ranges)
        dim = self.dim
        if dim is None:
            dim = {"box2d_aspect": 2, "box3d_aspect": 3, "ball": 2, "product_slab": 3}[self.kind]
        if self.kind == "box2d_aspect" and dim != 2 or self.kind == "box3d_aspect" and dim != 3:
            raise InvalidArgument(f"{self.kind} is fixed to its own dimension")
        if self.kind == "ball" and dim not in (1, 2, 3):
            raise InvalidArgument(f"ball family dimension must be 1, 2 or 3, got {dim}")
        if self.kind == "product_slab" and dim not in (2, 3):
            raise InvalidArgument(f"product_slab dimension must be 2 or 3, got {dim}")
        object.__setattr__(self, "dim", int(dim))

    @property
    def n_params(self) -> int:
        return len(self.ranges)

    def domain(self, params=()):
        """The unit-volume member with the given parameter tuple."""
        params = tuple(float(p) for p in np.atleast_1d(params)) if self.n_params else ()
        if len(params) != self.n_params:
            raise InvalidArgument(f"{self.kind} needs {self.n_params} parameter(s), got {params}")
        if self.kind == "box2d_aspect":
            (s,) = params
            return Box((s, 1.0 / s))
        if self.kind == "box3d_aspect":
            s, t = params
            return Box((s, t, 1.0 / (s * t)))
        if self.kind == "ball":
            return unit_ball(self.dim)
        (length,) = params
        if self.dim == 2:
            return Product(Interval(1.0 / length), length)
        # disk cross-section of area 1/length
        return Product(Ball(math.sqrt(1.0 / (length * math.pi)), 2), length)

    def param_grid(self, points=64):
        """Deterministic grid: ``points`` linear samples per coordinate, lexicographic."""
        if self.n_params == 0:
            return [()]
        axes = [np.linspace(lo, hi, int(points)) if hi > lo else np.array([lo]) for lo, hi in self.ranges]
        return [tuple(float(v) for v in p) for p in itertools.product(*axes)]

    def members(self, param_grid):
        """(label, params, domain) for each grid point, then the ball if requested."""
        out = [(self.kind, tuple(p), self.domain(p)) for p in param_grid]
        if self.include_ball and self.kind != "ball":
            out.append(("ball", (), unit_ball(self.dim)))
        return out

    def describe(self) -> str:
        s = self.kind
        if self.kind in ("ball", "product_slab"):
            s += f"@{self.dim}"
        if self.ranges:
            s += ":" + ";".join(f"{_fmt(lo)},{_fmt(hi)}" for lo, hi in self.ranges)
        if self.include_ball:
            s += "+ball"
        return s


def _fmt(x):
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def parse_family(text: str) -> FamilySpec:
    whole = text
    s = text.strip()
    include_ball = False
    if s.endswith("+ball"):
        include_ball = True
        s = s[: -len("+ball")]
    head, _, rest = s.partition(":")
    kind, _, dim = head.partition("@")
    try:
        dim_val = int(dim) if dim else None
        ranges = None
        if rest:
            ranges = []
            for part in rest.split(";"):
                lo, hi = part.split(",")
                ranges.append((float(lo), float(hi)))
    except ValueError:
        raise InvalidArgument(f"malformed family descriptor {whole!r}") from None
    try:
        return FamilySpec(kind.strip(), None if ranges is None else tuple(ranges), dim_val, include_ball)
    except InvalidArgument as exc:
        raise InvalidArgument(f"{exc} (in family {whole!r})") from None


def lambda_grid(lo, hi, points, spacing="log"):
    lo, hi, points = float(lo), float(hi), int(points)
    if points < 1 or not (0 < lo <= hi):
        raise InvalidArgument(f"bad lambda grid ({lo}, {hi}, {points})")
    if points == 1:
        return np.array([lo])
    if spacing == "log":
        return np.logspace(math.log10(lo), math.log10(hi), points)
    if spacing == "linear":
        return np.linspace(lo, hi, points)
    raise InvalidArgument(f"unknown grid spacing {spacing!r}")


def off_spectrum(eigs, lams):
    """Nudge grid points that sit exactly on an eigenvalue up by a relative 1e-12."""
    lams = np.array(lams, dtype=float)
    eigs = np.asarray(eigs)
    if len(eigs):
        i = np.searchsorted(eigs, lams)
        hit = (i < len(eigs)) & (eigs[np.minimum(i, len(eigs) - 1)] == lams)
        lams[hit] *= 1.0 + 1e-12
    return lams
