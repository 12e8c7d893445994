"""The four-announcement colouring protocol.

Each step function receives only what its announcer may know: Alice's steps
see her hand, Bob's steps see his hand, and both see the earlier
announcements and the public parameters.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import __version__
from .colouring import Colouring, full_lines, knit_colouring, meeting_counts
from .errors import (
    AmbiguousLine,
    MalformedTranscript,
    NoMatchingLine,
    NotALine,
    SizeMismatch,
    TooManyHeavyLines,
)
from .field import Field, field_of_order, prime_power
from .geometry import AffineSpace, affine_space

TRANSCRIPT_FORMAT = "russian-cards-transcript/1"
ENCODING_NOTE = (
    "cards are 1..a+b+c; f[i] is the point index of card i+1; "
    "point index = sum(coord[j] * q**j); a field element's code has its polynomial "
    "coefficients as little-endian base-p digits; lines are indexed by "
    "(normalised direction rank, rank of smallest-index point); colours are 1..k"
)


@dataclass(frozen=True)
class Deal:
    A: frozenset[int]
    B: frozenset[int]
    C: frozenset[int]

    def __post_init__(self):
        for name in "ABC":
            object.__setattr__(self, name, frozenset(int(x) for x in getattr(self, name)))
        n = len(self.A) + len(self.B) + len(self.C)
        if (self.A | self.B | self.C) != set(range(1, n + 1)):
            raise ValueError("hands must partition {1..a+b+c}")

    @property
    def sizes(self) -> tuple[int, int, int]:
        return len(self.A), len(self.B), len(self.C)

    @property
    def deck(self) -> range:
        return range(1, sum(self.sizes) + 1)

    def to_json(self) -> dict:
        return {"A": sorted(self.A), "B": sorted(self.B), "C": sorted(self.C)}

    @classmethod
    def from_json(cls, data: dict) -> Deal:
        try:
            return cls(frozenset(data["A"]), frozenset(data["B"]), frozenset(data["C"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedTranscript(f"bad deal: {exc}") from exc


@dataclass(frozen=True)
class ProtocolParams:
    a: int
    b: int
    c: int
    d: int
    k: int
    field: Field = field(repr=False)

    def __post_init__(self):
        if self.field.q != self.a:
            raise ValueError(f"field order {self.field.q} differs from a = {self.a}")
        if self.a + self.b + self.c != self.a**self.d:
            raise ValueError(f"a+b+c = {self.a + self.b + self.c} is not a^d = {self.a ** self.d}")
        if min(self.b, self.c) < 0 or not 1 <= self.k < self.a:
            raise ValueError(f"need b, c >= 0 and 1 <= k < a; got {self}")

    @classmethod
    def make(cls, a: int, c: int, d: int, k: int, modulus=None) -> ProtocolParams:
        if prime_power(a) is None:
            raise ValueError(f"a = {a} is not a prime power")
        return cls(a=a, b=a**d - a - c, c=c, d=d, k=k, field=field_of_order(a, modulus))

    @property
    def n(self) -> int:
        return self.a + self.b + self.c

    @property
    def space(self) -> AffineSpace:
        return affine_space(self.field, self.d)

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d, "k": self.k, "modulus": list(self.field.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> ProtocolParams:
        try:
            a, b, c, d, k = (int(data[key]) for key in "abcdk")
            modulus = data.get("modulus") or None
            return cls(a=a, b=b, c=c, d=d, k=k, field=field_of_order(a, modulus))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedTranscript(f"bad params: {exc}") from exc


@dataclass(frozen=True)
class Transcript:
    """The run (f, xi, colour, C) plus what is needed to reproduce it."""

    params: ProtocolParams
    seed: int
    f: tuple[int, ...]
    xi: Colouring = field(compare=False)
    colour: int
    claimed_C: tuple[int, ...]

    @cached_property
    def f_inverse(self) -> dict[int, int]:
        return {p: card for card, p in enumerate(self.f, start=1)}

    def to_json(self) -> dict:
        return {
            "format": TRANSCRIPT_FORMAT,
            "tool": f"russian_cards {__version__}",
            "encoding": ENCODING_NOTE,
            "params": self.params.to_json(),
            "seed": self.seed,
            "f": list(self.f),
            "xi": self.xi.to_json(),
            "colour": self.colour,
            "claimed_C": list(self.claimed_C),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> Transcript:
        if not isinstance(data, dict):
            raise MalformedTranscript("transcript must be a JSON object")
        params = ProtocolParams.from_json(data.get("params", {}))
        try:
            seed = int(data["seed"])
            f = tuple(int(x) for x in data["f"])
            colour = int(data["colour"])
            claimed = tuple(sorted(int(x) for x in data["claimed_C"]))
            xi = Colouring.from_json(params.space, params.k, data["xi"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedTranscript(f"bad transcript: {exc}") from exc
        if len(f) != params.n:
            raise MalformedTranscript(f"f has {len(f)} entries, deck has {params.n} cards")
        return cls(params=params, seed=seed, f=f, xi=xi, colour=colour, claimed_C=claimed)


def deal_random(a: int, b: int, c: int, rng: random.Random) -> Deal:
    """Uniformly random deal of sizes (a, b, c) over {1..a+b+c}."""
    if min(a, b, c) < 0:
        raise ValueError("hand sizes must be non-negative")
    deck = list(range(1, a + b + c + 1))
    rng.shuffle(deck)
    return Deal(frozenset(deck[:a]), frozenset(deck[a : a + b]), frozenset(deck[a + b :]))


def alice_map(A, params: ProtocolParams, rng: random.Random) -> tuple[int, ...]:
    """Step 1: a random bijection cards -> points sending Alice's hand onto a line."""
    A = sorted(A)
    if len(A) != params.a:
        raise SizeMismatch(f"Alice holds {len(A)} cards, the field has {params.a} elements")
    space = params.space
    line = space.line_points(rng.randrange(space.num_lines)).tolist()
    rng.shuffle(line)
    free = np.ones(space.num_points, dtype=bool)
    free[line] = False
    rest_points = np.flatnonzero(free).tolist()
    rng.shuffle(rest_points)
    hand = set(A)
    rest_cards = [x for x in range(1, params.n + 1) if x not in hand]
    f = [0] * params.n
    for card, p in zip(A, line):
        f[card - 1] = p
    for card, p in zip(rest_cards, rest_points):
        f[card - 1] = p
    return tuple(f)


def _image_outside(f, B, n: int) -> frozenset[int]:
    B = set(B)
    return frozenset(f[x - 1] for x in range(1, n + 1) if x not in B)


def heavy_lines(f, B, params: ProtocolParams) -> list[int]:
    """The lines meeting f(D \\ B) in at least a - k points, in index order."""
    E = _image_outside(f, B, params.n)
    return sorted(meeting_counts(params.space, E, params.a - params.k))


def bob_colouring(f, B, params: ProtocolParams, rng: random.Random, randomize_leftover: bool = False) -> Colouring:
    """Step 2: a knit colouring of density c + 2 that is perfect for f(D \\ B)."""
    special = heavy_lines(f, B, params)
    if len(special) > params.k:
        raise TooManyHeavyLines(f"{len(special)} lines meet Alice's and Cath's cards in >= {params.a - params.k} points; k = {params.k}")
    # the enumeration of heavy lines decides their colours; draw it at random
    rng.shuffle(special)
    return knit_colouring(params.space, special, params.k, params.c + 2, rng, randomize_leftover)


def alice_colour(f, xi: Colouring, A) -> int:
    """Step 3: the colour of Alice's line."""
    pts = [f[x - 1] for x in sorted(A)]
    space = xi.space
    if len(pts) != space.q or len(set(pts)) != space.q:
        raise NotALine("Alice's hand does not map onto q distinct points")
    line = space.line_of_pair(pts[0], pts[1])
    if set(space.line_points(line).tolist()) != set(pts):
        raise NotALine("Alice's cards are not collinear")
    return xi.colour(line)


def bob_deduce(f, xi: Colouring, colour: int, B, params: ProtocolParams) -> frozenset[int]:
    """Step 4: the unique full line of the announced colour gives Alice's hand; the rest is Cath's."""
    n = params.n
    E = _image_outside(f, B, n)
    matches = [i for i in full_lines(params.space, E) if xi.colour(i) == colour]
    if not matches:
        raise NoMatchingLine(f"no full line of colour {colour} inside Alice's and Cath's cards")
    if len(matches) > 1:
        raise AmbiguousLine(f"lines {matches} all have colour {colour}")
    inv = {p: card for card, p in enumerate(f, start=1)}
    alice = {inv[p] for p in params.space.line_points(matches[0]).tolist()}
    B = set(B)
    return frozenset(x for x in range(1, n + 1) if x not in B and x not in alice)


def run_protocol(deal: Deal, params: ProtocolParams, seed: int, randomize_leftover: bool = False) -> Transcript:
    """Execute all four steps with randomness drawn from ``random.Random(seed)``."""
    if deal.sizes != (params.a, params.b, params.c):
        raise SizeMismatch(f"deal sizes {deal.sizes} do not match {(params.a, params.b, params.c)}")
    rng = random.Random(seed)
    f = alice_map(deal.A, params, rng)
    xi = bob_colouring(f, deal.B, params, rng, randomize_leftover)
    colour = alice_colour(f, xi, deal.A)
    claimed = bob_deduce(f, xi, colour, deal.B, params)
    return Transcript(params=params, seed=seed, f=f, xi=xi, colour=colour, claimed_C=tuple(sorted(claimed)))
