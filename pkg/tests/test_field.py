import pytest

from oracles import code_to_poly, poly_mulmod, poly_to_code
from russian_cards.errors import NoDefaultModulus, NotPrime, ReducibleModulus
from russian_cards.field import DEFAULT_MODULI, field_make, field_of_order, is_irreducible, prime_power

SMALL_ORDERS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32]


def test_prime_field_gf3():
    f = field_make(3)
    assert (f.q, f.p, f.n, f.modulus) == (3, 3, 1, ())
    for a in range(3):
        for b in range(3):
            assert f.add(a, b) == (a + b) % 3
            assert f.mul(a, b) == (a * b) % 3


def test_gf4_x_squared():
    f = field_make(2, 2, [1, 1, 1])
    x = 2  # digits (0, 1)
    assert f.mul(x, x) == 3  # x + 1


def test_gf9_modulus_has_no_root():
    squares = {(t * t) % 3 for t in range(3)}
    assert squares == {0, 1}
    f = field_make(3, 2, [1, 0, 1])
    x = 3
    assert f.mul(x, x) == 2  # x^2 = -1 = 2


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_field_axioms_exhaustive(q):
    f = field_of_order(q)
    els = list(f.elements())
    for a in els:
        assert f.add(a, 0) == a and f.mul(a, 1) == a and f.mul(a, 0) == 0
        assert f.add(a, f.neg(a)) == 0
        if a:
            assert f.mul(a, f.inv(a)) == 1
        for b in els:
            assert f.add(a, b) == f.add(b, a)
            assert f.mul(a, b) == f.mul(b, a)
            assert f.sub(f.add(a, b), b) == a
    step = 1 if q <= 16 else 3
    for a in els[::step]:
        for b in els[::step]:
            for c in els:
                assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
                assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
                assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25, 27, 32])
def test_multiplication_matches_schoolbook(q):
    f = field_of_order(q)
    m = list(f.modulus)
    for a in f.elements():
        for b in f.elements():
            want = poly_to_code(poly_mulmod(code_to_poly(a, f.p, f.n), code_to_poly(b, f.p, f.n), m, f.p), f.p)
            assert f.mul(a, b) == want


@pytest.mark.parametrize("q", sorted(DEFAULT_MODULI))
def test_default_moduli_irreducible_by_root_and_factor_search(q):
    p, n = prime_power(q)
    m = list(DEFAULT_MODULI[q])
    assert len(m) == n + 1 and m[-1] == 1
    assert is_irreducible(m, p)
    if n <= 3:
        # no roots means no linear factor, which suffices in degree <= 3
        for t in range(p):
            assert sum(c * t**i for i, c in enumerate(m)) % p != 0


def test_spec_default_table():
    assert DEFAULT_MODULI[4] == (1, 1, 1)
    assert DEFAULT_MODULI[8] == (1, 1, 0, 1)
    assert DEFAULT_MODULI[9] == (1, 0, 1)
    assert DEFAULT_MODULI[16] == (1, 1, 0, 0, 1)
    assert DEFAULT_MODULI[25] == (3, 0, 1)
    assert DEFAULT_MODULI[27] == (1, 2, 0, 1)


def test_errors():
    with pytest.raises(NotPrime):
        field_make(4)
    with pytest.raises(ReducibleModulus):
        field_make(2, 2, [1, 0, 1])  # (x+1)^2
    with pytest.raises(NoDefaultModulus):
        field_make(2, 20)


def test_is_irreducible_small_cases():
    assert is_irreducible([1, 1, 1], 2)
    assert not is_irreducible([0, 1, 1], 2)
    assert is_irreducible([2, 0, 1], 5)  # 2 is not a square mod 5
    assert not is_irreducible([1, 0, 1], 5)  # -1 = 4 = 2^2


def test_prime_power():
    assert prime_power(49) == (7, 2)
    assert prime_power(1) is None
    assert prime_power(12) is None
