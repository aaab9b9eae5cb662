"""Balanced two-round key agreement over a quadratic-extension plane.

Alice holds a line, Bob holds an incident point; both reduce to the affine
chart (f, r, g, t, h, s) over the prime subfield.  Bob opens with m1 = s,
Alice answers m2 = g + f*h (recovered from her own parameters as u' - u''
where x2' = u' + v'*xi and r*m1*xi^2 = u'' + v''*xi), and the shared key is
f: Alice reads it off her input, Bob computes (m2 - g) * h^-1.

The transcript (m1, m2) is exactly uniformizing: for every transcript each
key value is consistent with the same number of chart tuples, which
`secrecy_audit` verifies by exhaustive enumeration.  Flags with h = 0 cannot
finish (h is not invertible) and are reported as degenerate rather than
re-randomized; flags outside the chart (x0 = 0 or y2 = 0) are reported as
chart_invalid.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    ChartInvalid,
    DegenerateH,
    NotCompleted,
    PhaseError,
    RoundMismatch,
    TooLarge,
    UnsupportedField,
)
from .finite_field import FieldSpec, field_for_size
from .projective_plane import ChartCoords, Flag, flag_to_json, to_chart

AUDIT_MAX_P = 13


@dataclass(frozen=True)
class Message:
    """One protocol message: round tag and a subfield residue payload."""

    round: int
    payload: int


def key_bits(p: int) -> int:
    """ceil(log2 p): bits of one subfield symbol."""
    return (p - 1).bit_length()


def payload_width(p: int) -> int:
    """Payload bytes on the wire: ceil(ceil(log2 p) / 8)."""
    return (key_bits(p) + 7) // 8


def encode_message(msg: Message, p: int) -> bytes:
    """[1 round byte 0x01/0x02][big-endian fixed-width payload]."""
    if msg.round not in (1, 2):
        raise RoundMismatch(f"round tag must be 1 or 2, got {msg.round}")
    return bytes([msg.round]) + msg.payload.to_bytes(payload_width(p), "big")


def decode_message(data: bytes, p: int) -> Message:
    width = payload_width(p)
    if len(data) != 1 + width:
        raise ValueError(f"frame must be {1 + width} bytes, got {len(data)}")
    if data[0] not in (1, 2):
        raise RoundMismatch(f"bad round byte 0x{data[0]:02x}")
    payload = int.from_bytes(data[1:], "big")
    if payload >= p:
        raise ValueError(f"payload {payload} out of range for p={p}")
    return Message(data[0], payload)


class AliceState:
    """Line side: knows f, r (from x1/x0) and u', v' (from -x2/x0)."""

    __slots__ = ("spec", "f", "r", "u_p", "v_p", "phase")

    def __init__(self, spec: FieldSpec, f: int, r: int, u_p: int, v_p: int):
        self.spec = spec
        self.f = f
        self.r = r
        self.u_p = u_p
        self.v_p = v_p
        self.phase = "awaiting_m1"

    @classmethod
    def from_chart(cls, chart: ChartCoords) -> "AliceState":
        spec = chart.spec
        p = spec.p
        f, r, g, t, h, s = chart.as_tuple()
        rs = r * s % p
        u_p = (g + f * h + rs * spec.u) % p
        v_p = (t + f * s + h * r + rs * spec.v) % p
        return cls(spec, f, r, u_p, v_p)

    @classmethod
    def from_line(cls, line) -> "AliceState":
        x0, x1, x2 = line.coords
        if x0.is_zero():
            raise ChartInvalid("line has x0 = 0")
        inv0 = x0.inv()
        f, r = (x1 * inv0).decompose()
        u_p, v_p = (-(x2 * inv0)).decompose()
        return cls(line.spec, f, r, u_p, v_p)


class BobState:
    """Point side: knows g, t (from y0/y2) and h, s (from y1/y2)."""

    __slots__ = ("spec", "g", "t", "h", "s", "phase")

    def __init__(self, spec: FieldSpec, g: int, t: int, h: int, s: int):
        self.spec = spec
        self.g = g
        self.t = t
        self.h = h
        self.s = s
        self.phase = "start"

    @classmethod
    def from_chart(cls, chart: ChartCoords) -> "BobState":
        return cls(chart.spec, chart.g, chart.t, chart.h, chart.s)

    @classmethod
    def from_point(cls, point) -> "BobState":
        y0, y1, y2 = point.coords
        if y2.is_zero():
            raise ChartInvalid("point has y2 = 0")
        inv2 = y2.inv()
        g, t = (y0 * inv2).decompose()
        h, s = (y1 * inv2).decompose()
        return cls(point.spec, g, t, h, s)


def bob_round1(bob: BobState) -> Message:
    """Bob opens with m1 = s."""
    if bob.phase != "start":
        raise PhaseError(f"bob_round1 in phase {bob.phase!r}")
    bob.phase = "sent_m1"
    return Message(1, bob.s)


def alice_round2(alice: AliceState, m1: Message) -> Message:
    """Alice answers m2 = u' - u'' where r*m1*xi^2 = u'' + v''*xi."""
    if alice.phase != "awaiting_m1":
        raise PhaseError(f"alice_round2 in phase {alice.phase!r}")
    if m1.round != 1:
        raise RoundMismatch(f"expected round 1, got {m1.round}")
    spec = alice.spec
    xi = spec.xi()
    scaled = spec.elt(alice.r * m1.payload % spec.p) * (xi * xi)
    u_pp, _ = scaled.decompose()
    alice.phase = "sent_m2"
    return Message(2, (alice.u_p - u_pp) % spec.p)


def bob_key(bob: BobState, m2: Message) -> int:
    """Bob recovers the key: (m2 - g) * h^-1 in the subfield."""
    if bob.phase != "sent_m1":
        raise PhaseError(f"bob_key in phase {bob.phase!r}")
    if m2.round != 2:
        raise RoundMismatch(f"expected round 2, got {m2.round}")
    if bob.h == 0:
        raise DegenerateH("h = 0: the key equation is not invertible")
    p = bob.spec.p
    key = (m2.payload - bob.g) * pow(bob.h, p - 2, p) % p
    bob.phase = "done"
    return key


@dataclass
class SessionResult:
    """Outcome of one orchestrated session."""

    q: int
    flag: Flag
    status: str  # ok | chart_invalid | degenerate_h
    transcript: tuple[int, int] | None = None
    alice_key: int | None = None
    bob_key: int | None = None

    def to_json_dict(self) -> dict:
        p = field_for_size(self.q).p
        bits = None
        if self.status == "ok":
            b_alice, b_bob, b_key = transcript_accounting(self)
            bits = {"alice": b_alice, "bob": b_bob, "key": b_key}
        return {
            "q": self.q,
            "flag": flag_to_json(self.flag),
            "transcript": list(self.transcript) if self.transcript else None,
            "alice_key": self.alice_key,
            "bob_key": self.bob_key,
            "status": self.status,
            "bits": bits,
            "p": p,
        }


def run_session(flag: Flag) -> SessionResult:
    """Drive chart extraction, both rounds, and key derivation for one flag."""
    spec = flag.line.spec
    if spec.degree != 2:
        raise UnsupportedField("the protocol needs q = p^2")
    q = spec.size
    try:
        alice = AliceState.from_line(flag.line)
        bob = BobState.from_point(flag.point)
    except ChartInvalid:
        return SessionResult(q=q, flag=flag, status="chart_invalid")
    m1 = bob_round1(bob)
    m2 = alice_round2(alice, m1)
    transcript = (m1.payload, m2.payload)
    try:
        k_bob = bob_key(bob, m2)
    except DegenerateH:
        return SessionResult(q=q, flag=flag, status="degenerate_h", transcript=transcript)
    alice.phase = "done"
    return SessionResult(
        q=q,
        flag=flag,
        status="ok",
        transcript=transcript,
        alice_key=alice.f,
        bob_key=k_bob,
    )


def transcript_accounting(result: SessionResult) -> tuple[int, int, int]:
    """Bits on the wire per party and key bits: one subfield symbol each."""
    if result.status != "ok":
        raise NotCompleted(f"session status is {result.status!r}")
    bits = key_bits(field_for_size(result.q).p)
    return (bits, bits, bits)


@dataclass
class SecrecyAudit:
    """Exhaustive transcript/key histogram over all chart tuples with h != 0."""

    q: int
    p: int
    transcripts: int
    expected_per_key: int
    uniform: bool
    min_count: int
    max_count: int
    histogram: dict[tuple[int, int], dict[int, int]]

    def to_json_dict(self) -> dict:
        return {
            "q": self.q,
            "p": self.p,
            "transcripts": self.transcripts,
            "per_key_count": self.expected_per_key,
            "uniform": self.uniform,
            "min_count": self.min_count,
            "max_count": self.max_count,
        }


def secrecy_audit(q: int) -> SecrecyAudit:
    """Run the protocol over every chart tuple in G^6 with h != 0.

    For each transcript (m1, m2) the key histogram must be exactly flat:
    every key value f occurs (p-1)*p^2 times (g is pinned by (f, h, m2), h
    ranges over the p-1 nonzero values, r and t are free).
    """
    spec = field_for_size(q)
    if spec.degree != 2:
        raise UnsupportedField("the audit needs q = p^2")
    p = spec.p
    if p > AUDIT_MAX_P:
        raise TooLarge(f"exhaustive audit is capped at p <= {AUDIT_MAX_P}")
    histogram: dict[tuple[int, int], dict[int, int]] = {}
    for f in range(p):
        for r in range(p):
            for g in range(p):
                for t in range(p):
                    for h in range(1, p):
                        for s in range(p):
                            chart = ChartCoords(spec, f, r, g, t, h, s)
                            alice = AliceState.from_chart(chart)
                            bob = BobState.from_chart(chart)
                            m1 = bob_round1(bob)
                            m2 = alice_round2(alice, m1)
                            key = bob_key(bob, m2)
                            per_key = histogram.setdefault(
                                (m1.payload, m2.payload), {}
                            )
                            per_key[key] = per_key.get(key, 0) + 1
                            if key != f:
                                raise AssertionError(
                                    f"key mismatch at {chart}: {key} != {f}"
                                )
    expected = (p - 1) * p * p
    counts = [
        per_key.get(k, 0)
        for per_key in histogram.values()
        for k in range(p)
    ]
    uniform = (
        len(histogram) == p * p
        and all(c == expected for c in counts)
    )
    return SecrecyAudit(
        q=q,
        p=p,
        transcripts=len(histogram),
        expected_per_key=expected,
        uniform=uniform,
        min_count=min(counts),
        max_count=max(counts),
        histogram=histogram,
    )
