"""Baer subplane, plane automorphisms, and randomized covering families.

For q = p^2 the vertices whose canonical coordinates all lie in the prime
subfield form a copy of PG(2,p) (the Baer subplane H0).  Invertible 3x3
matrices act on points by multiplication and on lines by the inverse
transpose, which preserves the incidence form; sampling such maps uniformly
and taking images of H0 yields, with high probability, a family whose flags
cover the whole plane.  Matrix (projective linear) maps already act
transitively on flags, so field-automorphism twists are not needed and are
not implemented.
"""

from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .errors import SpecMismatch, TooLarge, UnsupportedField
from .finite_field import Elt, FieldSpec, field_for_size, format_elt
from .incidence_graph import SubgraphQuery
from .projective_plane import Flag, Plane, ProjLine, ProjPoint, enumerate_plane

Matrix = tuple[tuple[Elt, Elt, Elt], ...]


def det3(m: Matrix) -> Elt:
    a, b, c = m[0]
    d, e, f = m[1]
    g, h, i = m[2]
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _cofactor(m: Matrix) -> Matrix:
    a, b, c = m[0]
    d, e, f = m[1]
    g, h, i = m[2]
    return (
        (e * i - f * h, -(d * i - f * g), d * h - e * g),
        (-(b * i - c * h), a * i - c * g, -(a * h - b * g)),
        (b * f - c * e, -(a * f - c * d), a * e - b * d),
    )


def _transpose(m: Matrix) -> Matrix:
    return tuple(tuple(m[r][c] for r in range(3)) for c in range(3))


def _scale(m: Matrix, s: Elt) -> Matrix:
    return tuple(tuple(s * x for x in row) for row in m)


def _mat_vec(m: Matrix, v) -> tuple[Elt, Elt, Elt]:
    return tuple(m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] for r in range(3))


class Automorphism:
    """Invertible projective-linear map with its cached inverse transpose."""

    __slots__ = ("spec", "matrix", "inverse_transpose")

    def __init__(self, matrix: Matrix):
        self.spec = matrix[0][0].spec
        self.matrix = matrix
        det = det3(matrix)
        if det.is_zero():
            raise ValueError("singular matrix is not a plane automorphism")
        det_inv = det.inv()
        # inverse = adj/det with adj = transpose(cofactor); so inv^T = cofactor/det
        self.inverse_transpose = _scale(_cofactor(matrix), det_inv)

    @classmethod
    def identity(cls, spec: FieldSpec) -> "Automorphism":
        one, zero = spec.one(), spec.zero()
        return cls(((one, zero, zero), (zero, one, zero), (zero, zero, one)))

    def inverse(self) -> "Automorphism":
        return Automorphism(_transpose(self.inverse_transpose))

    def to_json_dict(self) -> dict:
        return {"matrix": [[format_elt(x) for x in row] for row in self.matrix]}

    def __repr__(self):
        rows = "; ".join(
            " ".join(format_elt(x) for x in row) for row in self.matrix
        )
        return f"Automorphism([{rows}] over GF({self.spec.size}))"


def apply(m: Automorphism, flag: Flag) -> Flag:
    """Transform a flag: point by the matrix, line by the inverse transpose."""
    if m.spec != flag.line.spec:
        raise SpecMismatch("automorphism and flag fields differ")
    point = ProjPoint(_mat_vec(m.matrix, flag.point.coords))
    line = ProjLine(_mat_vec(m.inverse_transpose, flag.line.coords))
    return Flag(line, point)


def random_matrix(spec: FieldSpec, rng: random.Random) -> Matrix:
    """Uniform 3x3 matrix over the field (possibly singular); row-major draws."""
    p = spec.p
    entries = []
    for _ in range(9):
        a0 = rng.randrange(p)
        a1 = rng.randrange(p) if spec.degree == 2 else 0
        entries.append(Elt(spec, a0, a1))
    return (tuple(entries[0:3]), tuple(entries[3:6]), tuple(entries[6:9]))


def _random_automorphism(spec: FieldSpec, rng: random.Random) -> Automorphism:
    while True:
        m = random_matrix(spec, rng)
        if not det3(m).is_zero():
            return Automorphism(m)


def random_automorphism(q: int, seed: int) -> Automorphism:
    """Uniform invertible matrix by rejection sampling, deterministic per seed."""
    spec = field_for_size(q)
    return _random_automorphism(spec, random.Random(seed))


def sample_automorphisms(q: int, count: int, seed: int) -> list[Automorphism]:
    """`count` automorphisms drawn from a single seeded rejection stream."""
    spec = field_for_size(q)
    rng = random.Random(seed)
    return [_random_automorphism(spec, rng) for _ in range(count)]


def baer_subplane(q: int) -> SubgraphQuery:
    """Ids of the lines/points of PG(2,q) with all coordinates in the subfield."""
    plane = enumerate_plane(q)
    if plane.spec.degree != 2:
        raise UnsupportedField("a Baer subplane needs q = p^2")
    left = {
        lid
        for lid, line in enumerate(plane.lines)
        if all(c.a1 == 0 for c in line.coords)
    }
    right = {
        pid
        for pid, pt in enumerate(plane.points)
        if all(c.a1 == 0 for c in pt.coords)
    }
    return SubgraphQuery.of(left, right)


def baer_flag_ids(plane: Plane) -> set[int]:
    """Flag indices of the Baer subplane inside the host plane."""
    query = baer_subplane(plane.q)
    return {
        idx
        for idx, (lid, pid) in enumerate(plane.flag_ids)
        if lid in query.left and pid in query.right
    }


def flag_transitivity_check(q: int) -> bool:
    """Orbit of the first flag under all invertible matrices = all flags?"""
    if q > 3:
        raise TooLarge("full GL(3,q) enumeration is capped at q <= 3")
    plane = enumerate_plane(q)
    spec = plane.spec
    base = plane.flag(0)
    elements = list(spec.elements())
    orbit = set()
    for m in _all_matrices(elements):
        if det3(m).is_zero():
            continue
        image = apply(Automorphism(m), base)
        orbit.add(plane.flag_index[(plane.line_id[image.line], plane.point_id[image.point])])
    return len(orbit) == len(plane.flag_ids)


def _all_matrices(elements):
    for values in itertools.product(elements, repeat=9):
        yield (tuple(values[0:3]), tuple(values[3:6]), tuple(values[6:9]))


@dataclass
class CoverFamily:
    """A base subplane, sampled maps, and the flags their images cover."""

    q: int
    base: SubgraphQuery
    maps: list[Automorphism]
    covered: list[bool]
    per_map_counts: list[int]
    seed: int | None
    c: float | None

    @property
    def sample_count(self) -> int:
        return len(self.maps)

    @property
    def coverage_fraction(self) -> float:
        return sum(self.covered) / len(self.covered)

    @property
    def uncovered_flag_ids(self) -> list[int]:
        return [i for i, hit in enumerate(self.covered) if not hit]

    def to_json_dict(self) -> dict:
        p = field_for_size(self.q).p
        return {
            "q": self.q,
            "p": p,
            "N": self.sample_count,
            "c": self.c,
            "seed": self.seed,
            "coverage_fraction": self.coverage_fraction,
            "uncovered_flag_ids": self.uncovered_flag_ids,
        }


def cover_with_maps(
    q: int, maps: list[Automorphism], seed: int | None = None,
    c: float | None = None, threads: int = 1,
) -> CoverFamily:
    """Mark which flags fall in some image of the Baer subplane.

    A flag is covered by m iff apply(m^-1, flag) lands in H0; equivalently it
    is in the forward image of the H0 flags, which is what gets enumerated
    (apply(m, .) is a bijection on flags, so each map covers exactly |H0|
    flags).
    """
    plane = enumerate_plane(q)
    base_flags = sorted(baer_flag_ids(plane))
    base_objs = [plane.flag(i) for i in base_flags]

    def mark(chunk: list[Automorphism]):
        covered = bytearray(len(plane.flag_ids))
        counts = []
        for m in chunk:
            hits = set()
            for flg in base_objs:
                image = apply(m, flg)
                idx = plane.flag_index[
                    (plane.line_id[image.line], plane.point_id[image.point])
                ]
                covered[idx] = 1
                hits.add(idx)
            counts.append(len(hits))
        return covered, counts

    if threads <= 1 or len(maps) < 2:
        covered, per_map = mark(maps)
    else:
        step = max(1, (len(maps) + threads - 1) // threads)
        chunks = [maps[i : i + step] for i in range(0, len(maps), step)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(mark, chunks))
        covered = bytearray(len(plane.flag_ids))
        per_map = []
        for part, counts in results:
            for i, hit in enumerate(part):
                if hit:
                    covered[i] = 1
            per_map.extend(counts)
    return CoverFamily(
        q=q,
        base=baer_subplane(q),
        maps=list(maps),
        covered=[bool(x) for x in covered],
        per_map_counts=per_map,
        seed=seed,
        c=c,
    )


def cover_sample_count(q: int, c: float) -> int:
    """ceil(c * p^3 * ln(total flags)) draws for the covering family."""
    spec = field_for_size(q)
    if spec.degree != 2:
        raise UnsupportedField("covering families need q = p^2")
    plane = enumerate_plane(q)
    return math.ceil(c * spec.p**3 * math.log(len(plane.flag_ids)))


def build_cover(q: int, c: float = 3.0, seed: int = 0, threads: int = 1) -> CoverFamily:
    """Sample the randomized covering family and report its coverage."""
    if c <= 0:
        raise ValueError("oversampling constant c must be positive")
    n = cover_sample_count(q, c)
    maps = sample_automorphisms(q, n, seed)
    return cover_with_maps(q, maps, seed=seed, c=c, threads=threads)
