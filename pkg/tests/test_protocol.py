import json
import random
from pathlib import Path

import pytest

from russian_cards import Deal, ProtocolParams, Transcript, deal_random, run_protocol
from russian_cards.colouring import Colouring, density, full_lines, is_perfect
from russian_cards.errors import AmbiguousLine, MalformedTranscript, NoMatchingLine, NotALine, SizeMismatch, TooManyHeavyLines
from russian_cards.protocol import alice_colour, alice_map, bob_colouring, bob_deduce, heavy_lines

GOLDEN = Path(__file__).parent / "data" / "golden_7_41_1_2_2"


def line_of(space, pts):
    pts = sorted(pts)
    line = space.line_of_pair(pts[0], pts[1])
    return line if set(space.line_points(line).tolist()) == set(pts) else None


def test_deal_random():
    d = deal_random(3, 3, 1, random.Random(0))
    assert d.sizes == (3, 3, 1)
    assert deal_random(1, 0, 0, random.Random(5)) == Deal({1}, set(), set())
    assert deal_random(7, 41, 1, random.Random(9)) == deal_random(7, 41, 1, random.Random(9))


def test_deal_must_partition():
    with pytest.raises(ValueError):
        Deal({1, 2}, {2, 3}, set())
    with pytest.raises(ValueError):
        Deal({1}, {3}, set())


@pytest.mark.parametrize("a,c,d,k", [(3, 1, 2, 1), (7, 1, 2, 2), (2, 0, 2, 1), (4, 3, 3, 1)])
def test_alice_map_puts_hand_on_a_line(a, c, d, k):
    p = ProtocolParams(a=a, b=a**d - a - c, c=c, d=d, k=k, field=ProtocolParams.make(a, c, d, k).field)
    for seed in range(20):
        deal = deal_random(p.a, p.b, p.c, random.Random(seed))
        f = alice_map(deal.A, p, random.Random(seed))
        assert sorted(f) == list(range(p.n))
        assert line_of(p.space, [f[x - 1] for x in deal.A]) is not None


def test_alice_map_size_mismatch():
    p = ProtocolParams.make(7, 1, 2, 2)
    with pytest.raises(SizeMismatch):
        alice_map({1, 2, 3}, p, random.Random(0))


def test_steps_see_only_their_own_hand():
    import inspect

    assert "B" in inspect.signature(bob_colouring).parameters
    for fn in (bob_colouring, bob_deduce):
        assert not {"A", "C", "deal"} & set(inspect.signature(fn).parameters)
    for fn in (alice_map, alice_colour):
        assert not {"B", "C", "deal"} & set(inspect.signature(fn).parameters)


def test_bob_colouring_ignores_how_the_rest_splits():
    p = ProtocolParams.make(7, 1, 2, 2)
    rng = random.Random(3)
    deal = deal_random(p.a, p.b, p.c, rng)
    f = alice_map(deal.A, p, rng)
    outputs = set()
    rest = sorted(deal.A | deal.C)
    for split in range(5):
        shuffled = rest[:]
        random.Random(split).shuffle(shuffled)
        other = Deal(set(shuffled[: p.a]), deal.B, set(shuffled[p.a :]))
        xi = bob_colouring(f, other.B, p, random.Random(77))
        outputs.add(json.dumps(xi.to_json(), sort_keys=True))
    assert len(outputs) == 1


def test_single_heavy_line_at_7_41_1():
    p = ProtocolParams.make(7, 1, 2, 2)
    for seed in range(30):
        rng = random.Random(seed)
        deal = deal_random(p.a, p.b, p.c, rng)
        f = alice_map(deal.A, p, rng)
        assert heavy_lines(f, deal.B, p) == [line_of(p.space, [f[x - 1] for x in deal.A])]


def test_too_many_heavy_lines_on_infeasible_toy():
    p = ProtocolParams.make(3, 1, 2, 1)
    deal = deal_random(p.a, p.b, p.c, random.Random(0))
    f = alice_map(deal.A, p, random.Random(0))
    with pytest.raises(TooManyHeavyLines):
        bob_colouring(f, deal.B, p, random.Random(0))


def test_alice_colour_and_errors():
    p = ProtocolParams.make(7, 1, 2, 2)
    rng = random.Random(8)
    deal = deal_random(p.a, p.b, p.c, rng)
    f = alice_map(deal.A, p, rng)
    xi = bob_colouring(f, deal.B, p, rng)
    line = line_of(p.space, [f[x - 1] for x in deal.A])
    assert alice_colour(f, xi, deal.A) == xi.colour(line)
    bad = list(f)
    a0 = min(deal.A)
    b0 = next(x for x in deal.B if line_of(p.space, [f[y - 1] for y in deal.A - {a0}] + [f[x - 1]]) is None)
    bad[a0 - 1], bad[b0 - 1] = bad[b0 - 1], bad[a0 - 1]
    with pytest.raises(NotALine):
        alice_colour(bad, xi, deal.A)


def test_k1_colour_is_always_one():
    p = ProtocolParams.make(7, 1, 2, 1)
    for seed in range(10):
        deal = deal_random(p.a, p.b, p.c, random.Random(seed))
        assert run_protocol(deal, p, seed).colour == 1


def test_bob_deduce_errors():
    p = ProtocolParams.make(7, 1, 2, 2)
    space = p.space
    deal = deal_random(p.a, p.b, p.c, random.Random(1))
    f = alice_map(deal.A, p, random.Random(1))
    # swap a B card onto a second full line of E, coloured like Alice's
    line = line_of(space, [f[x - 1] for x in deal.A])
    xi = Colouring(space, 2, by_line=[1] * space.num_lines)
    E = {f[x - 1] for x in deal.A | deal.C}
    assert len(full_lines(space, E)) == 1
    with pytest.raises(NoMatchingLine):
        bob_deduce(f, xi, 2, deal.B, p)
    assert bob_deduce(f, xi, 1, deal.B, p) == deal.C
    # a deal whose A and C fill two lines in a bigger deck
    p2 = ProtocolParams.make(7, 7, 2, 2)
    f2 = tuple(range(49))
    A = {x + 1 for x in space.line_points(0).tolist()}
    C = {x + 1 for x in space.line_points(1).tolist()}
    B = set(range(1, 50)) - A - C
    with pytest.raises(AmbiguousLine):
        bob_deduce(f2, xi, 1, B, p2)
    assert line is not None


def test_end_to_end_small():
    p = ProtocolParams.make(7, 1, 2, 2)
    for seed in range(50):
        deal = deal_random(p.a, p.b, p.c, random.Random(f"deal-{seed}"))
        t = run_protocol(deal, p, seed)
        assert set(t.claimed_C) == set(deal.C)
        E = {t.f[x - 1] for x in deal.A | deal.C}
        assert is_perfect(t.xi, E) and density(t.xi) >= p.c + 2
        claimed_A = set(range(1, p.n + 1)) - deal.B - set(t.claimed_C)
        colour_lines = [i for i in full_lines(p.space, E) if t.xi.colour(i) == t.colour]
        assert colour_lines == [line_of(p.space, [t.f[x - 1] for x in claimed_A])]


def test_end_to_end_d3():
    p = ProtocolParams.make(7, 4, 3, 2)
    assert p.b == 332
    for seed in range(5):
        deal = deal_random(p.a, p.b, p.c, random.Random(seed))
        t = run_protocol(deal, p, seed, randomize_leftover=seed % 2 == 1)
        assert set(t.claimed_C) == set(deal.C)


def test_c_zero():
    p = ProtocolParams.make(4, 0, 2, 1)
    deal = deal_random(p.a, p.b, 0, random.Random(2))
    assert run_protocol(deal, p, 2).claimed_C == ()


def test_determinism_and_json_round_trip():
    p = ProtocolParams.make(7, 1, 2, 2)
    deal = deal_random(p.a, p.b, p.c, random.Random(4))
    t1, t2 = run_protocol(deal, p, 11), run_protocol(deal, p, 11)
    assert t1.dumps() == t2.dumps()
    back = Transcript.from_json(json.loads(t1.dumps()))
    assert back.dumps() == t1.dumps()
    assert run_protocol(deal, p, 12).dumps() != t1.dumps()


def test_golden_transcript():
    want = json.loads((GOLDEN / "transcript.json").read_text())
    deal = Deal.from_json(json.loads((GOLDEN / "deal.json").read_text()))
    assert deal == deal_random(7, 41, 1, random.Random("deal-42"))
    p = ProtocolParams.make(7, 1, 2, 2)
    t = run_protocol(deal, p, 42)
    assert t.to_json() == want
    assert want["colour"] == 1 and want["claimed_C"] == sorted(deal.C)


def test_malformed_transcripts():
    with pytest.raises(MalformedTranscript):
        Transcript.from_json([])
    with pytest.raises(MalformedTranscript):
        Transcript.from_json({"params": {"a": 7}})
    good = json.loads((GOLDEN / "transcript.json").read_text())
    with pytest.raises(MalformedTranscript):
        Transcript.from_json({**good, "f": good["f"][:-1]})
    with pytest.raises(MalformedTranscript):
        Deal.from_json({"A": [1]})


def test_params_validation():
    with pytest.raises(ValueError):
        ProtocolParams.make(6, 1, 2, 2)
    with pytest.raises(ValueError):
        ProtocolParams.make(7, 1, 2, 7)
    with pytest.raises(ValueError):
        ProtocolParams.make(7, 60, 2, 2)
