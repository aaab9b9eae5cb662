"""PG(2,q): canonical points and lines, incidence, flags, affine charts.

Vertices are stored canonically: the first nonzero coordinate (scanning
index 0, 1, 2) is scaled to 1, so equality of objects is equality of
projective classes.  Enumeration sorts by the flattened residue tuple
(a0, a1 per coordinate), which keeps vertex ids stable across runs.

The affine chart maps a flag (line x, point y) with x0 != 0 and y2 != 0 to
six subfield residues (f, r, g, t, h, s) via

    x1/x0 = f + r*xi,   y0/y2 = g + t*xi,   y1/y2 = h + s*xi,

and incidence pins the remaining ratio: -x2/x0 = (g + f*h) +
(t + f*s + h*r)*xi + r*s*xi^2.  Flags with x0 = 0 or y2 = 0 raise
ChartInvalid; they are excluded rather than re-coordinatized.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .errors import ChartInvalid, SpecMismatch, UnsupportedField, ZeroVector
from .finite_field import Elt, FieldSpec, field_for_size, format_elt, parse_elt

Triple = tuple[Elt, Elt, Elt]


def canonicalize(raw: Triple) -> Triple:
    """Scale a nonzero triple so its first nonzero coordinate is 1."""
    for c in raw:
        if not c.is_zero():
            if c == c.spec.one():
                return raw
            scale = c.inv()
            return (raw[0] * scale, raw[1] * scale, raw[2] * scale)
    raise ZeroVector("(0:0:0) is not a projective class")


class _ProjTriple:
    __slots__ = ("coords",)

    def __init__(self, coords: Triple):
        self.coords = canonicalize(coords)

    @property
    def spec(self) -> FieldSpec:
        return self.coords[0].spec

    def residue_key(self) -> tuple[int, ...]:
        c0, c1, c2 = self.coords
        return (c0.a0, c0.a1, c1.a0, c1.a1, c2.a0, c2.a1)

    def __eq__(self, other):
        return type(self) is type(other) and self.coords == other.coords

    def __hash__(self):
        return hash((type(self).__name__, self.coords))

    def __repr__(self):
        body = ":".join(format_elt(c) for c in self.coords)
        return f"{type(self).__name__}({body})"


class ProjPoint(_ProjTriple):
    """Canonical projective point (y0 : y1 : y2)."""


class ProjLine(_ProjTriple):
    """Canonical projective line (x0 : x1 : x2)."""


class Flag:
    """An incident (line, point) pair."""

    __slots__ = ("line", "point")

    def __init__(self, line: ProjLine, point: ProjPoint):
        if not incident(line, point):
            raise ValueError(f"{line!r} and {point!r} are not incident")
        self.line = line
        self.point = point

    def __eq__(self, other):
        return (
            isinstance(other, Flag)
            and self.line == other.line
            and self.point == other.point
        )

    def __hash__(self):
        return hash((self.line, self.point))

    def __repr__(self):
        return f"Flag({self.line!r}, {self.point!r})"


@dataclass(frozen=True)
class ChartCoords:
    """Subfield parameters (f, r, g, t, h, s) of a chart-valid flag."""

    spec: FieldSpec
    f: int
    r: int
    g: int
    t: int
    h: int
    s: int

    def as_tuple(self) -> tuple[int, int, int, int, int, int]:
        return (self.f, self.r, self.g, self.t, self.h, self.s)


def incident(line: ProjLine, point: ProjPoint) -> bool:
    """True iff x0*y0 + x1*y1 + x2*y2 = 0."""
    if line.spec != point.spec:
        raise SpecMismatch("line and point live in different fields")
    x, y = line.coords, point.coords
    acc = x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
    return acc.is_zero()


class Plane:
    """Immutable enumeration of PG(2,q): points, lines, flags, id lookups."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.q = spec.size
        self.points: list[ProjPoint] = _canonical_triples(spec, ProjPoint)
        self.lines: list[ProjLine] = _canonical_triples(spec, ProjLine)
        self.point_id = {pt: i for i, pt in enumerate(self.points)}
        self.line_id = {ln: i for i, ln in enumerate(self.lines)}
        self.flag_ids: list[tuple[int, int]] = self._enumerate_flags()
        self.flag_index = {pair: i for i, pair in enumerate(self.flag_ids)}
        self._flags: list[Flag] | None = None

    def _enumerate_flags(self) -> list[tuple[int, int]]:
        pairs = []
        for lid, line in enumerate(self.lines):
            for pt in _points_on_line(line):
                pairs.append((lid, self.point_id[pt]))
        pairs.sort()
        return pairs

    @property
    def flags(self) -> list[Flag]:
        if self._flags is None:
            self._flags = [
                Flag(self.lines[lid], self.points[pid]) for lid, pid in self.flag_ids
            ]
        return self._flags

    def flag(self, index: int) -> Flag:
        lid, pid = self.flag_ids[index]
        return Flag(self.lines[lid], self.points[pid])

    def counts(self) -> tuple[int, int, int]:
        return (len(self.points), len(self.lines), len(self.flag_ids))


def _canonical_triples(spec: FieldSpec, cls):
    """All canonical triples: (0:0:1), (0:1:c), (1:b:c), sorted by residues."""
    zero, one = spec.zero(), spec.one()
    items = [cls((zero, zero, one))]
    for c in spec.elements():
        items.append(cls((zero, one, c)))
    for b in spec.elements():
        for c in spec.elements():
            items.append(cls((one, b, c)))
    items.sort(key=lambda t: t.residue_key())
    return items


def _points_on_line(line: ProjLine) -> list[ProjPoint]:
    """The q+1 points of a line, via a basis of the incidence-form kernel."""
    spec = line.spec
    zero, one = spec.zero(), spec.one()
    x0, x1, x2 = line.coords
    if not x0.is_zero():
        inv0 = x0.inv()
        u = (-(x1 * inv0), one, zero)
        w = (-(x2 * inv0), zero, one)
    elif not x1.is_zero():
        inv1 = x1.inv()
        u = (one, zero, zero)
        w = (zero, -(x2 * inv1), one)
    else:
        u = (one, zero, zero)
        w = (zero, one, zero)
    pts = [ProjPoint(w)]
    for t in spec.elements():
        pts.append(ProjPoint((u[0] + t * w[0], u[1] + t * w[1], u[2] + t * w[2])))
    return pts


@lru_cache(maxsize=16)
def enumerate_plane(q: int) -> Plane:
    """Enumerate PG(2,q) for q = p or q = p^2 with p prime."""
    return Plane(field_for_size(q))


def to_chart(flag: Flag) -> ChartCoords:
    """Chart parameters of a flag; requires degree 2, x0 != 0, y2 != 0."""
    spec = flag.line.spec
    if spec.degree != 2:
        raise UnsupportedField("the chart needs a quadratic extension field")
    x0, x1, _ = flag.line.coords
    y0, y1, y2 = flag.point.coords
    if x0.is_zero() or y2.is_zero():
        raise ChartInvalid("flag has x0 = 0 or y2 = 0")
    f, r = (x1 * x0.inv()).decompose()
    y2inv = y2.inv()
    g, t = (y0 * y2inv).decompose()
    h, s = (y1 * y2inv).decompose()
    return ChartCoords(spec, f, r, g, t, h, s)


def chart_x2(coords: ChartCoords) -> Elt:
    """-x2/x0 of the reconstructed flag: (g+fh) + (t+fs+hr)*xi + rs*xi^2."""
    spec = coords.spec
    f, r, g, t, h, s = coords.as_tuple()
    base = spec.elt((g + f * h) % spec.p, (t + f * s + h * r) % spec.p)
    xi = spec.xi()
    return base + spec.elt(r * s % spec.p) * (xi * xi)


def from_chart(coords: ChartCoords) -> Flag:
    """Rebuild the canonical flag determined by six subfield parameters."""
    spec = coords.spec
    f, r, g, t, h, s = coords.as_tuple()
    one = spec.one()
    x1p = spec.elt(f, r)
    x2p = chart_x2(coords)
    line = ProjLine((one, x1p, -x2p))
    point = ProjPoint((spec.elt(g, t), spec.elt(h, s), one))
    return Flag(line, point)


def sample_flag(q: int, seed: int) -> Flag:
    """Uniformly random flag of PG(2,q), reproducible from the seed."""
    plane = enumerate_plane(q)
    rng = random.Random(seed)
    return plane.flag(rng.randrange(len(plane.flag_ids)))


def flag_to_json(flag: Flag) -> dict:
    """{"line": [c0, c1, c2], "point": [...]} in the textual element syntax."""
    return {
        "line": [format_elt(c) for c in flag.line.coords],
        "point": [format_elt(c) for c in flag.point.coords],
    }


def flag_from_json(spec: FieldSpec, data: dict) -> Flag:
    line = ProjLine(tuple(parse_elt(spec, s) for s in data["line"]))
    point = ProjPoint(tuple(parse_elt(spec, s) for s in data["point"]))
    return Flag(line, point)


def flags_csv_rows(plane: Plane) -> list[tuple[int, int]]:
    """One (line_id, point_id) row per flag, in canonical order."""
    return list(plane.flag_ids)
