"""Check executions for legality, informativity and weak 1-security.

The safety check builds, for every card x outside Cath's hand, two explicit
alternative deals that keep Cath's hand and the whole run fixed: one where
Alice holds x and one where Bob does.  Each alternative is accepted only after
it is checked to be one swap away from the real Alice-plus-Cath set and to
admit critical lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .colouring import find_critical, full_lines, is_perfect, is_rich
from .errors import MalformedTranscript
from .protocol import Deal, Transcript


def _check_shapes(t: Transcript, deal: Deal) -> None:
    p = t.params
    if deal.sizes != (p.a, p.b, p.c):
        raise MalformedTranscript(f"deal sizes {deal.sizes} differ from transcript params {(p.a, p.b, p.c)}")
    if len(t.f) != p.n:
        raise MalformedTranscript("f does not cover the deck")


def _line_of_hand(t: Transcript, hand) -> int | None:
    space = t.xi.space
    pts = [t.f[x - 1] for x in sorted(hand)]
    if len(pts) != space.q or len(set(pts)) != space.q:
        return None
    if any(not 0 <= p < space.num_points for p in pts):
        return None
    line = space.line_of_pair(pts[0], pts[1])
    return line if set(space.line_points(line).tolist()) == set(pts) else None


def execution_problems(t: Transcript, deal: Deal, strict: bool = True, hint=(), rich_mode: str = "density") -> list[str]:
    """Reasons the run is not a legal execution for ``deal``; empty when it is.

    Bob's colouring must be rich (through density >= c + 2, or literally with
    ``rich_mode="exhaustive"``) and very distinguished for f(A u C).  The
    latter is certified by perfection when ``strict``, and by any set of
    critical lines otherwise.
    """
    _check_shapes(t, deal)
    p, xi = t.params, t.xi
    space = xi.space
    problems = []
    if sorted(t.f) != list(range(space.num_points)):
        problems.append("f is not a bijection onto the points")
        return problems
    alice_line = _line_of_hand(t, deal.A)
    if alice_line is None:
        problems.append("f does not map Alice's hand onto a line")
    if xi.k != p.k:
        problems.append("colouring uses the wrong number of colours")
    if rich_mode == "exhaustive":
        if not is_rich(xi, p.c, mode="exhaustive"):
            problems.append(f"colouring is not rich for {p.c}-sets")
    elif xi.density < p.c + 2:
        problems.append(f"colouring density {xi.density} < c + 2 = {p.c + 2}")
    E = frozenset(t.f[x - 1] for x in deal.A | deal.C)
    if strict:
        if not is_perfect(xi, E):
            problems.append("colouring is not perfect for Alice's and Cath's cards")
    elif find_critical(xi, E, hint) is None:
        problems.append("colouring has no critical lines for Alice's and Cath's cards")
    if not 1 <= t.colour <= p.k:
        problems.append(f"colour {t.colour} outside 1..{p.k}")
    elif alice_line is not None and xi.colour(alice_line) != t.colour:
        problems.append("announced colour is not the colour of Alice's line")
    if tuple(sorted(deal.C)) != tuple(sorted(t.claimed_C)):
        problems.append("Bob's last announcement is not Cath's hand")
    return problems


def verify_execution(t: Transcript, deal: Deal, strict: bool = True, hint=()) -> bool:
    return not execution_problems(t, deal, strict, hint)


def check_informative(t: Transcript, deal: Deal) -> bool:
    """Bob's side: exactly one full line of the announced colour inside f(A u C),
    and it is Alice's.  Alice's side: Bob's announcement is a c-set disjoint
    from A, which pins B = D \\ A \\ C."""
    _check_shapes(t, deal)
    space = t.xi.space
    E = frozenset(t.f[x - 1] for x in deal.A | deal.C)
    matches = [i for i in full_lines(space, E) if t.xi.colour(i) == t.colour]
    if len(matches) != 1 or matches[0] != _line_of_hand(t, deal.A):
        return False
    claimed = set(t.claimed_C)
    return len(claimed) == t.params.c and not claimed & deal.A and claimed == set(deal.C)


@dataclass(frozen=True)
class SafetyWitness:
    """An alternative deal (A', B', C) under which the same run is an execution."""

    line: int
    deal: Deal
    critical: tuple[int, ...]

    def to_json(self) -> dict:
        return {"line": self.line, "A": sorted(self.deal.A), "critical_lines": list(self.critical)}


@dataclass(frozen=True)
class CardSafety:
    card: int
    point: str
    in_A: SafetyWitness | None
    in_B: SafetyWitness | None

    @property
    def passed(self) -> bool:
        return self.in_A is not None and self.in_B is not None

    def leak(self) -> str | None:
        if self.in_A is None and self.in_B is None:
            return "no consistent owner"
        if self.in_B is None:
            return "Alice"
        if self.in_A is None:
            return "Bob"
        return None


@dataclass
class SafetyReport:
    cards: list[CardSafety] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cards)

    def leaks(self) -> list[CardSafety]:
        return [c for c in self.cards if not c.passed]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checked": len(self.cards),
            "leaks": [{"card": c.card, "point": c.point, "cath_learns_owner": c.leak()} for c in self.leaks()],
            "cards": [
                {
                    "card": c.card,
                    "point": c.point,
                    "passed": c.passed,
                    "in_A": c.in_A.to_json() if c.in_A else None,
                    "in_B": c.in_B.to_json() if c.in_B else None,
                }
                for c in self.cards
            ],
        }


class _SafetyContext:
    def __init__(self, t: Transcript, deal: Deal, validate: bool):
        self.t = t
        self.xi = t.xi
        self.space = t.xi.space
        self.validate = validate
        self.C = frozenset(deal.C)
        self.fC = frozenset(t.f[x - 1] for x in deal.C)
        self.E = frozenset(t.f[x - 1] for x in deal.A | deal.C)
        self.inv = t.f_inverse
        self.deck = frozenset(range(1, t.params.n + 1))
        self.swap_sources = [i for i in full_lines(self.space, self.E) if self.xi.colour(i) == t.colour]
        # critical lines of the real execution, transported along each swap as a first guess
        w = find_critical(self.xi, self.E)
        self.base_witness = list(w.indices) if w else []

    def points(self, line: int) -> frozenset[int]:
        return frozenset(self.space.line_points(line).tolist())

    def candidate(self, line: int) -> SafetyWitness | None:
        pts = self.points(line)
        F = pts | self.fC
        source = None
        for lam in self.swap_sources:
            rest = self.E - self.points(lam)
            if not pts & rest and rest | pts == F:
                source = lam
                break
        if source is None:
            return None
        hint = [line] + [i for i in self.base_witness if i != source]
        wit = find_critical(self.xi, F, hint)
        if wit is None:
            return None
        A2 = frozenset(self.inv[p] for p in pts)
        alt = Deal(A2, self.deck - A2 - self.C, self.C)
        if self.validate and not verify_execution(self.t, alt, strict=False, hint=wit.indices):
            return None
        return SafetyWitness(line=line, deal=alt, critical=wit.indices)

    def lines_avoiding(self, through: int, avoid: frozenset[int]):
        lines = self.space.line_indices_through(through)
        cols = self.xi.colours(lines)
        for i in lines[cols == self.t.colour].tolist():
            if not self.points(i) & avoid:
                yield i

    def in_alice(self, px: int) -> SafetyWitness | None:
        for line in sorted(self.lines_avoiding(px, self.fC)):
            w = self.candidate(line)
            if w is not None:
                return w
        return None

    def in_bob(self, px: int) -> SafetyWitness | None:
        avoid = self.fC | {px}
        tried = set()
        for y in range(self.space.num_points):
            if y in avoid:
                continue
            for line in self.lines_avoiding(y, avoid):
                if line in tried:
                    continue
                tried.add(line)
                w = self.candidate(line)
                if w is not None:
                    return w
        return None


def check_weak_safety(t: Transcript, deal: Deal, cards=None, validate: bool = False) -> SafetyReport:
    """Search both alternative deals for every card outside Cath's hand.

    ``cards`` restricts the check to a subset (spot checks on large decks).
    With ``validate`` each alternative deal is also run back through
    :func:`verify_execution` with the original transcript.
    """
    _check_shapes(t, deal)
    ctx = _SafetyContext(t, deal, validate)
    todo = sorted(set(cards) if cards is not None else ctx.deck - ctx.C)
    report = SafetyReport()
    for x in todo:
        if x in ctx.C:
            continue
        px = t.f[x - 1]
        report.cards.append(
            CardSafety(card=x, point=ctx.space.label(px), in_A=ctx.in_alice(px), in_B=ctx.in_bob(px))
        )
    return report
