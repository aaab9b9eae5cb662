"""Exact arithmetic in GF(p) and GF(p^2).

A quadratic extension is represented on the basis {1, xi} where xi satisfies
xi^2 = u + v*xi for the first (u, v) in scan order (v outer, u inner, both
ascending) that makes X^2 - v*X - u irreducible over GF(p).  The scan order is
part of the public contract so that independent implementations agree on the
same extension.

Elements are kept canonically reduced: residues a0, a1 in [0, p), and a1 = 0
for prime fields.  All operations are pure; values are safe to share across
threads.
"""

from __future__ import annotations

import math
import re
from functools import lru_cache

from .errors import DivisionByZero, NotPrime, SpecMismatch, UnsupportedField


def is_prime(n: int) -> bool:
    """Trial-division primality check (fields here are small by design)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class FieldSpec:
    """Immutable description of GF(p) (degree 1) or GF(p^2) (degree 2)."""

    __slots__ = ("p", "degree", "u", "v")

    def __init__(self, p: int, degree: int, u: int = 0, v: int = 0):
        self.p = p
        self.degree = degree
        self.u = u
        self.v = v

    @property
    def size(self) -> int:
        return self.p**self.degree

    def elt(self, a0: int, a1: int = 0) -> "Elt":
        if self.degree == 1 and a1 % self.p != 0:
            raise SpecMismatch("prime field element cannot have an xi component")
        return Elt(self, a0 % self.p, a1 % self.p)

    def zero(self) -> "Elt":
        return Elt(self, 0, 0)

    def one(self) -> "Elt":
        return Elt(self, 1, 0)

    def xi(self) -> "Elt":
        if self.degree != 2:
            raise SpecMismatch("xi exists only in quadratic extensions")
        return Elt(self, 0, 1)

    def elements(self):
        """All field elements, ascending in the (a0, a1) residue order."""
        if self.degree == 1:
            for a0 in range(self.p):
                yield Elt(self, a0, 0)
        else:
            for a0 in range(self.p):
                for a1 in range(self.p):
                    yield Elt(self, a0, a1)

    def to_json_dict(self) -> dict:
        return {"p": self.p, "degree": self.degree, "u": self.u, "v": self.v}

    def __eq__(self, other):
        return (
            isinstance(other, FieldSpec)
            and self.p == other.p
            and self.degree == other.degree
            and self.u == other.u
            and self.v == other.v
        )

    def __hash__(self):
        return hash((self.p, self.degree, self.u, self.v))

    def __repr__(self):
        if self.degree == 1:
            return f"FieldSpec(p={self.p}, degree=1)"
        return f"FieldSpec(p={self.p}, degree=2, u={self.u}, v={self.v})"


@lru_cache(maxsize=None)
def build_field_spec(p: int, degree: int) -> FieldSpec:
    """Construct GF(p) or GF(p^2) with the deterministic (u, v) selection."""
    if degree not in (1, 2):
        raise UnsupportedField(f"degree must be 1 or 2, got {degree}")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if degree == 1:
        return FieldSpec(p, 1)
    for v in range(p):
        for u in range(p):
            if _is_irreducible(p, u, v):
                return FieldSpec(p, 2, u, v)
    # A monic irreducible quadratic exists over every prime field.
    raise AssertionError(f"no irreducible X^2 - {v}X - u found over GF({p})")


def _is_irreducible(p: int, u: int, v: int) -> bool:
    """True iff X^2 - v*X - u has no root in GF(p)."""
    return all((x * x - v * x - u) % p != 0 for x in range(p))


@lru_cache(maxsize=None)
def field_for_size(q: int) -> FieldSpec:
    """Resolve a field size q to GF(p) (q prime) or GF(p^2) (q = p^2, p prime)."""
    if q >= 2 and is_prime(q):
        return build_field_spec(q, 1)
    root = math.isqrt(q) if q >= 0 else 0
    if q >= 4 and root * root == q and is_prime(root):
        return build_field_spec(root, 2)
    raise UnsupportedField(f"q={q} is neither a prime nor the square of a prime")


class Elt:
    """Field element a0 + a1*xi, canonically reduced mod p."""

    __slots__ = ("spec", "a0", "a1")

    def __init__(self, spec: FieldSpec, a0: int, a1: int):
        self.spec = spec
        self.a0 = a0
        self.a1 = a1

    def decompose(self) -> tuple[int, int]:
        """Residues (a0, a1) on the {1, xi} basis; a1 = 0 in prime fields."""
        return (self.a0, self.a1)

    def is_zero(self) -> bool:
        return self.a0 == 0 and self.a1 == 0

    def _check(self, other: "Elt") -> None:
        if self.spec != other.spec:
            raise SpecMismatch(f"{self.spec!r} vs {other.spec!r}")

    def __add__(self, other: "Elt") -> "Elt":
        self._check(other)
        p = self.spec.p
        return Elt(self.spec, (self.a0 + other.a0) % p, (self.a1 + other.a1) % p)

    def __sub__(self, other: "Elt") -> "Elt":
        self._check(other)
        p = self.spec.p
        return Elt(self.spec, (self.a0 - other.a0) % p, (self.a1 - other.a1) % p)

    def __neg__(self) -> "Elt":
        p = self.spec.p
        return Elt(self.spec, -self.a0 % p, -self.a1 % p)

    def __mul__(self, other: "Elt") -> "Elt":
        self._check(other)
        spec = self.spec
        p = spec.p
        a0, a1, b0, b1 = self.a0, self.a1, other.a0, other.a1
        if a1 == 0 and b1 == 0:
            return Elt(spec, a0 * b0 % p, 0)
        # (a0 + a1 xi)(b0 + b1 xi) with xi^2 = u + v xi
        cross = a1 * b1
        return Elt(
            spec,
            (a0 * b0 + cross * spec.u) % p,
            (a0 * b1 + a1 * b0 + cross * spec.v) % p,
        )

    def inv(self) -> "Elt":
        """Multiplicative inverse via the conjugate/norm identity."""
        spec = self.spec
        p = spec.p
        if self.a0 == 0 and self.a1 == 0:
            raise DivisionByZero("0 has no multiplicative inverse")
        if self.a1 == 0:
            return Elt(spec, pow(self.a0, p - 2, p), 0)
        # conj(a) = (a0 + a1 v) - a1 xi;  N(a) = a * conj(a) = a0^2 + v a0 a1 - u a1^2
        a0, a1 = self.a0, self.a1
        norm = (a0 * a0 + spec.v * a0 * a1 - spec.u * a1 * a1) % p
        ninv = pow(norm, p - 2, p)
        return Elt(spec, (a0 + a1 * spec.v) * ninv % p, -a1 * ninv % p)

    def __truediv__(self, other: "Elt") -> "Elt":
        return self * other.inv()

    def __pow__(self, n: int) -> "Elt":
        if n < 0:
            return self.inv() ** (-n)
        result = self.spec.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        return (
            isinstance(other, Elt)
            and self.a0 == other.a0
            and self.a1 == other.a1
            and self.spec == other.spec
        )

    def __hash__(self):
        return hash((self.a0, self.a1))

    def __str__(self):
        return format_elt(self)

    def __repr__(self):
        return f"Elt({format_elt(self)!r} in GF({self.spec.size}))"


def arith(kind: str, a: Elt, b: Elt | None = None) -> Elt:
    """Dispatch add/sub/mul/neg by name (b is ignored for neg)."""
    if kind == "neg":
        return -a
    if b is None:
        raise ValueError(f"{kind} needs two operands")
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown operation {kind!r}")


def format_elt(a: Elt) -> str:
    """Render on the textual syntax: '2', 'x', '2x', '1+2x', ..."""
    if a.a1 == 0:
        return str(a.a0)
    xi_part = "x" if a.a1 == 1 else f"{a.a1}x"
    if a.a0 == 0:
        return xi_part
    return f"{a.a0}+{xi_part}"


_ELT_RE = re.compile(r"^(?:(\d+)|(?:(\d+)\+)?(\d*)x)$")


def parse_elt(spec: FieldSpec, text: str) -> Elt:
    """Parse the textual element syntax: '2', 'x', '2x', '1+2x', ..."""
    s = text.strip().replace(" ", "")
    m = _ELT_RE.match(s)
    if not m:
        raise ValueError(f"malformed element literal {text!r}")
    plain, a0_str, a1_str = m.groups()
    if plain is not None:
        return spec.elt(int(plain))
    a0 = int(a0_str) if a0_str else 0
    a1 = int(a1_str) if a1_str else 1
    return spec.elt(a0, a1)
