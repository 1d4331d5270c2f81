"""Catalogue of convex bodies with exactly known spectra.

All bodies are centred at the origin and symmetric under every coordinate
reflection, so support functions only need to be evaluated on the closed
positive orthant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import InvalidArgument

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _check_positive(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidArgument(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class Interval:
    length: float

    def __post_init__(self):
        object.__setattr__(self, "length", _check_positive("length", self.length))

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class Box:
    sides: Tuple[float, ...]

    def __post_init__(self):
        sides = tuple(_check_positive("side", s) for s in self.sides)
        if not sides:
            raise InvalidArgument("a box needs at least one side")
        if len(sides) > 3:
            raise InvalidArgument(f"box dimension must be at most 3, got {len(sides)}")
        object.__setattr__(self, "sides", sides)

    @property
    def dim(self) -> int:
        return len(self.sides)


@dataclass(frozen=True)
class Ball:
    radius: float
    dim: int = 2

    def __post_init__(self):
        object.__setattr__(self, "radius", _check_positive("radius", self.radius))
        if self.dim not in (1, 2, 3):
            raise InvalidArgument(f"ball dimension must be 1, 2 or 3, got {self.dim!r}")


@dataclass(frozen=True)
class Product:
    """Cylinder ``cross_section x (-length/2, length/2)``."""

    cross_section: "Domain"
    length: float

    def __post_init__(self):
        object.__setattr__(self, "length", _check_positive("length", self.length))
        if isinstance(self.cross_section, DisjointUnion) or not isinstance(
            self.cross_section, (Interval, Box, Ball, Product)
        ):
            raise InvalidArgument("product cross-section must be a single catalogue domain")
        if self.cross_section.dim > 2:
            raise InvalidArgument(f"product dimension must be at most 3, got {self.cross_section.dim + 1}")

    @property
    def dim(self) -> int:
        return self.cross_section.dim + 1


@dataclass(frozen=True)
class DisjointUnion:
    components: Tuple["Domain", ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise InvalidArgument("a disjoint union needs at least one component")
        flat = []
        for c in comps:
            if isinstance(c, DisjointUnion):
                flat.extend(c.components)
            elif isinstance(c, (Interval, Box, Ball, Product)):
                flat.append(c)
            else:
                raise InvalidArgument(f"not a catalogue domain: {c!r}")
        dims = {c.dim for c in flat}
        if len(dims) != 1:
            raise InvalidArgument(f"union components have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "components", tuple(flat))

    @property
    def dim(self) -> int:
        return self.components[0].dim


Domain = Union[Interval, Box, Ball, Product]
AnyDomain = Union[Interval, Box, Ball, Product, DisjointUnion]


def box(*sides) -> Domain:
    """Build a box, returning the canonical :class:`Interval` for one side."""
    if len(sides) == 1:
        return Interval(sides[0])
    return Box(tuple(sides))


def canonical(D: AnyDomain) -> AnyDomain:
    if isinstance(D, Box) and D.dim == 1:
        return Interval(D.sides[0])
    if isinstance(D, Product):
        return Product(canonical(D.cross_section), D.length)
    if isinstance(D, DisjointUnion):
        return DisjointUnion(tuple(canonical(c) for c in D.components))
    return D


def components(D: AnyDomain) -> Tuple[Domain, ...]:
    if isinstance(D, DisjointUnion):
        return D.components
    return (D,)


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


# ---------------------------------------------------------------------------
# geometric functionals


def volume(D: AnyDomain) -> float:
    if isinstance(D, Interval):
        return D.length
    if isinstance(D, Box):
        return math.prod(D.sides)
    if isinstance(D, Ball):
        return unit_ball_volume(D.dim) * D.radius**D.dim
    if isinstance(D, Product):
        return volume(D.cross_section) * D.length
    if isinstance(D, DisjointUnion):
        return math.fsum(volume(c) for c in D.components)
    raise InvalidArgument(f"not a domain: {D!r}")


def surface(D: AnyDomain) -> float:
    """(d-1)-dimensional boundary measure; an interval has two boundary points."""
    if isinstance(D, Interval):
        return 2.0
    if isinstance(D, Box):
        s = D.sides
        return 2.0 * math.fsum(math.prod(s[:i] + s[i + 1:]) for i in range(len(s)))
    if isinstance(D, Ball):
        d = D.dim
        return d * unit_ball_volume(d) * D.radius ** (d - 1)
    if isinstance(D, Product):
        return 2.0 * volume(D.cross_section) + D.length * surface(D.cross_section)
    if isinstance(D, DisjointUnion):
        return math.fsum(surface(c) for c in D.components)
    raise InvalidArgument(f"not a domain: {D!r}")


def inradius(D: AnyDomain) -> float:
    if isinstance(D, Interval):
        return D.length / 2.0
    if isinstance(D, Box):
        return min(D.sides) / 2.0
    if isinstance(D, Ball):
        return D.radius
    if isinstance(D, Product):
        return min(inradius(D.cross_section), D.length / 2.0)
    if isinstance(D, DisjointUnion):
        return max(inradius(c) for c in D.components)
    raise InvalidArgument(f"not a domain: {D!r}")


def diameter(D: AnyDomain) -> float:
    if isinstance(D, Interval):
        return D.length
    if isinstance(D, Box):
        return math.hypot(*D.sides)
    if isinstance(D, Ball):
        return 2.0 * D.radius
    if isinstance(D, Product):
        return math.hypot(diameter(D.cross_section), D.length)
    if isinstance(D, DisjointUnion):
        raise InvalidArgument("the diameter of a disjoint union depends on placement")
    raise InvalidArgument(f"not a domain: {D!r}")


def scale(D: AnyDomain, t: float) -> AnyDomain:
    t = float(t)
    if not math.isfinite(t) or t <= 0.0:
        raise InvalidArgument(f"scale factor must be positive, got {t!r}")
    if isinstance(D, Interval):
        return Interval(D.length * t)
    if isinstance(D, Box):
        return Box(tuple(s * t for s in D.sides))
    if isinstance(D, Ball):
        return Ball(D.radius * t, D.dim)
    if isinstance(D, Product):
        return Product(scale(D.cross_section, t), D.length * t)
    if isinstance(D, DisjointUnion):
        return DisjointUnion(tuple(scale(c, t) for c in D.components))
    raise InvalidArgument(f"not a domain: {D!r}")


def normalize_unit_volume(D: AnyDomain):
    """Return ``(scale(D, t), t)`` with ``t = |D|**(-1/d)``."""
    t = volume(D) ** (-1.0 / D.dim)
    if t == 1.0:
        return D, 1.0
    return scale(D, t), t


@dataclass(frozen=True)
class GeometrySummary:
    volume: float
    surface: float
    inradius: float
    diameter: float
    lower_bound: float  # |D| / H(dD)
    upper_bound: float  # d |D| / H(dD)
    lower_ok: bool
    upper_ok: bool
    diameter_ratio: float  # diam * r_in**(d-1) / |D|; tracked, not asserted


def geometry_report(D: Domain) -> GeometrySummary:
    vol, surf, rin, diam = volume(D), surface(D), inradius(D), diameter(D)
    d = D.dim
    lo = vol / surf
    hi = d * vol / surf
    # relative slack of a few ulps: the upper bound is attained by boxes and balls
    slack = 1e-12 * rin
    return GeometrySummary(
        volume=vol,
        surface=surf,
        inradius=rin,
        diameter=diam,
        lower_bound=lo,
        upper_bound=hi,
        lower_ok=lo <= rin + slack,
        upper_ok=rin <= hi + slack,
        diameter_ratio=diam * rin ** (d - 1) / vol,
    )


# ---------------------------------------------------------------------------
# support functions and Hausdorff distance


def support(D: Domain, U) -> np.ndarray:
    """Support function h_D(u) for each row of ``U`` (shape ``(n, d)``)."""
    U = np.abs(np.atleast_2d(np.asarray(U, dtype=float)))
    if isinstance(D, Interval):
        return U[:, 0] * (D.length / 2.0)
    if isinstance(D, Box):
        return U @ (np.asarray(D.sides) / 2.0)
    if isinstance(D, Ball):
        return D.radius * np.sqrt(np.sum(U * U, axis=1))
    if isinstance(D, Product):
        return support(D.cross_section, U[:, :-1]) + U[:, -1] * (D.length / 2.0)
    raise InvalidArgument(f"support function undefined for {D!r}")


def _as_box_sides(D):
    if isinstance(D, Interval):
        return np.array([D.length])
    if isinstance(D, Box):
        return np.asarray(D.sides)
    if isinstance(D, Ball) and D.dim == 1:
        return np.array([2.0 * D.radius])
    if isinstance(D, Product):
        inner = _as_box_sides(D.cross_section)
        if inner is not None:
            return np.append(inner, D.length)
    return None


def _as_ball_radius(D):
    if isinstance(D, Ball):
        return D.radius
    return None


def _golden_max(f, a, b, tol):
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _dir2(theta):
    return np.array([[math.cos(theta), math.sin(theta)]])


def _dir3(theta, phi):
    st = math.sin(theta)
    return np.array([[st * math.cos(phi), st * math.sin(phi), math.cos(theta)]])


def hausdorff_distance(A: Domain, B: Domain, n_dirs=None, tol=1e-9) -> float:
    """Hausdorff distance between two origin-centred catalogue bodies.

    Like shapes use closed forms; mixed shapes maximise ``|h_A - h_B|`` over
    sampled unit directions in the positive orthant, then refine the best
    sample by golden-section search.
    """
    if isinstance(A, DisjointUnion) or isinstance(B, DisjointUnion):
        raise InvalidArgument("Hausdorff distance is defined for single bodies only")
    if A.dim != B.dim:
        raise InvalidArgument(f"dimension mismatch: {A.dim} vs {B.dim}")
    d = A.dim

    sa, sb = _as_box_sides(A), _as_box_sides(B)
    if sa is not None and sb is not None:
        c = (sa - sb) / 2.0
        return float(max(np.linalg.norm(np.clip(c, 0, None)), np.linalg.norm(np.clip(-c, 0, None))))
    ra, rb = _as_ball_radius(A), _as_ball_radius(B)
    if ra is not None and rb is not None:
        return abs(ra - rb)
    if d == 1:
        return abs(float(support(A, [[1.0]])[0] - support(B, [[1.0]])[0]))

    def gap(U):
        return np.abs(support(A, U) - support(B, U))

    half = math.pi / 2.0
    if d == 2:
        n = n_dirs or 4096
        th = np.linspace(0.0, half, n)
        vals = gap(np.column_stack([np.cos(th), np.sin(th)]))
        i = int(np.argmax(vals))
        best = float(vals[i])
        lo, hi = th[max(i - 1, 0)], th[min(i + 1, n - 1)]
        _, v = _golden_max(lambda t: float(gap(_dir2(t))[0]), lo, hi, tol * 1e-3)
        return max(best, v)

    if d == 3:
        n = n_dirs or 8192
        n_th = int(round(math.sqrt(n / 2.0)))
        n_ph = n // n_th
        th = np.linspace(0.0, half, n_th)
        ph = np.linspace(0.0, half, n_ph)
        T, P = np.meshgrid(th, ph, indexing="ij")
        st = np.sin(T)
        U = np.column_stack([(st * np.cos(P)).ravel(), (st * np.sin(P)).ravel(), np.cos(T).ravel()])
        vals = gap(U).reshape(T.shape)
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        best = float(vals[i, j])
        t0, p0 = th[i], ph[j]
        dth, dph = th[1] - th[0], ph[1] - ph[0]
        for _ in range(4):
            t0, v1 = _golden_max(
                lambda t: float(gap(_dir3(t, p0))[0]),
                max(t0 - dth, 0.0), min(t0 + dth, half), tol * 1e-3,
            )
            p0, v2 = _golden_max(
                lambda p: float(gap(_dir3(t0, p))[0]),
                max(p0 - dph, 0.0), min(p0 + dph, half), tol * 1e-3,
            )
            best = max(best, v1, v2)
            dth, dph = dth / 4.0, dph / 4.0
        return best

    raise InvalidArgument(f"mixed-shape Hausdorff distance not supported in dimension {d}")


# ---------------------------------------------------------------------------
# text syntax: interval:L  box:a,b[,c]  ball:R@d  product:(CROSS)xL  union:[D1;D2]


def _fmt(x: float) -> str:
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def format_domain(D: AnyDomain) -> str:
    if isinstance(D, Interval):
        return f"interval:{_fmt(D.length)}"
    if isinstance(D, Box):
        if D.dim == 1:
            return f"interval:{_fmt(D.sides[0])}"
        return "box:" + ",".join(_fmt(s) for s in D.sides)
    if isinstance(D, Ball):
        return f"ball:{_fmt(D.radius)}@{D.dim}"
    if isinstance(D, Product):
        return f"product:({format_domain(D.cross_section)})x{_fmt(D.length)}"
    if isinstance(D, DisjointUnion):
        return "union:[" + ";".join(format_domain(c) for c in D.components) + "]"
    raise InvalidArgument(f"not a domain: {D!r}")


def _number(tok, whole):
    try:
        x = float(tok)
    except ValueError:
        raise InvalidArgument(f"malformed number {tok!r} in domain {whole!r}") from None
    return x


def _split_top(s, sep):
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(s):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append(s[start:i])
            start = i + 1
    parts.append(s[start:])
    return parts


def parse_domain(text: str) -> AnyDomain:
    """Parse the catalogue text syntax; errors name the offending token."""
    whole = text
    s = text.strip()
    try:
        kind, _, rest = s.partition(":")
        if not _:
            raise InvalidArgument(f"malformed domain {whole!r}")
        kind = kind.strip().lower()
        rest = rest.strip()
        if kind == "interval":
            return Interval(_number(rest, whole))
        if kind == "box":
            return box(*[_number(t, whole) for t in rest.split(",")])
        if kind == "ball":
            r, at, dim = rest.partition("@")
            if not at:
                raise InvalidArgument(f"ball needs '@dim' in {whole!r}")
            try:
                d = int(dim)
            except ValueError:
                raise InvalidArgument(f"malformed ball dimension in {whole!r}") from None
            return Ball(_number(r, whole), d)
        if kind == "product":
            if not rest.startswith("("):
                raise InvalidArgument(f"product needs '(CROSS)xL' in {whole!r}")
            depth = 0
            for i, ch in enumerate(rest):
                depth += ch == "("
                depth -= ch == ")"
                if depth == 0:
                    break
            inner, tail = rest[1:i], rest[i + 1:]
            if depth != 0 or not tail.lower().startswith("x"):
                raise InvalidArgument(f"product needs '(CROSS)xL' in {whole!r}")
            return Product(parse_domain(inner), _number(tail[1:], whole))
        if kind == "union":
            if not (rest.startswith("[") and rest.endswith("]")):
                raise InvalidArgument(f"union needs '[D1;D2;...]' in {whole!r}")
            return DisjointUnion(tuple(parse_domain(p) for p in _split_top(rest[1:-1], ";")))
        raise InvalidArgument(f"unknown domain kind {kind!r} in {whole!r}")
    except InvalidArgument as exc:
        msg = str(exc)
        if repr(whole) not in msg:
            msg = f"{msg} (in domain {whole!r})"
        raise InvalidArgument(msg) from None
