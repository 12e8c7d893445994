"""Arithmetic in GF(q), q = p^n.

Elements are encoded as integers 0..q-1.  For n > 1 the base-p digits of the
code are the polynomial coefficients, lowest degree first, so ``x`` is the
code ``p`` and ``x + 1`` is ``p + 1``.  Moduli are little-endian coefficient
lists of length n + 1 (``x^2 + x + 1`` over F_2 is ``[1, 1, 1]``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import NoDefaultModulus, NotPrime, ReducibleModulus

# Default moduli, little-endian.  Each entry is re-checked for irreducibility
# the first time it is used.
DEFAULT_MODULI: dict[int, tuple[int, ...]] = {
    4: (1, 1, 1),  # x^2 + x + 1
    8: (1, 1, 0, 1),  # x^3 + x + 1
    9: (1, 0, 1),  # x^2 + 1
    16: (1, 1, 0, 0, 1),  # x^4 + x + 1
    25: (3, 0, 1),  # x^2 + 3
    27: (1, 2, 0, 1),  # x^3 + 2x + 1
    32: (1, 0, 1, 0, 0, 1),  # x^5 + x^2 + 1
    49: (1, 0, 1),  # x^2 + 1
    64: (1, 1, 0, 0, 0, 0, 1),  # x^6 + x + 1
    81: (2, 1, 0, 0, 1),  # x^4 + x + 2
    121: (1, 0, 1),  # x^2 + 1
    125: (1, 1, 0, 1),  # x^3 + x + 1
    128: (1, 1, 0, 0, 0, 0, 0, 1),  # x^7 + x + 1
    169: (2, 0, 1),  # x^2 + 2
    256: (1, 1, 0, 1, 1, 0, 0, 0, 1),  # x^8 + x^4 + x^3 + x + 1
    289: (3, 0, 1),  # x^2 + 3
    343: (1, 1, 0, 1),  # x^3 + x + 1
    361: (1, 0, 1),  # x^2 + 1
}

# Above this order the numpy operation tables are not built.
MAX_TABLE_ORDER = 256


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, n)`` with ``q == p**n`` and p prime, or None."""
    if q < 2:
        return None
    p = 2
    while p * p <= q and q % p:
        p += 1
    if q % p:
        p = q
    n = 0
    m = q
    while m % p == 0:
        m //= p
        n += 1
    return (p, n) if m == 1 else None


# -- polynomials over F_p, little-endian coefficient lists ---------------------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo m over F_p (m must have a nonzero leading coefficient)."""
    a = _trim([c % p for c in a])
    m = _trim([c % p for c in m])
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        factor = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * c) % p
        _trim(a)
    return a


def is_irreducible(poly: list[int] | tuple[int, ...], p: int) -> bool:
    """Exhaustive trial division by every monic polynomial of degree <= n/2."""
    f = _trim([c % p for c in poly])
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    for deg in range(1, n // 2 + 1):
        for low in product(range(p), repeat=deg):
            if not poly_mod(f, list(low) + [1], p):
                return False
    return True


@dataclass(frozen=True)
class Field:
    """GF(q) with integer-coded elements; see the module docstring for the encoding."""

    q: int
    p: int
    n: int
    modulus: tuple[int, ...] = ()
    _add: list = field(default=None, repr=False, compare=False, hash=False)
    _mul: list = field(default=None, repr=False, compare=False, hash=False)
    _inv: list = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.q <= MAX_TABLE_ORDER:
            add = [[self._add_slow(a, b) for b in range(self.q)] for a in range(self.q)]
            mul = [[self._mul_slow(a, b) for b in range(self.q)] for a in range(self.q)]
            inv = [0] * self.q
            for a in range(1, self.q):
                inv[a] = mul[a].index(1)
            object.__setattr__(self, "_add", add)
            object.__setattr__(self, "_mul", mul)
            object.__setattr__(self, "_inv", inv)

    # digit helpers
    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.n):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def from_digits(self, ds: list[int]) -> int:
        code = 0
        for c in reversed(ds):
            code = code * self.p + c % self.p
        return code

    def _add_slow(self, a: int, b: int) -> int:
        if self.n == 1:
            return (a + b) % self.p
        return self.from_digits([x + y for x, y in zip(self.digits(a), self.digits(b))])

    def _mul_slow(self, a: int, b: int) -> int:
        if self.n == 1:
            return a * b % self.p
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.n - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        return self.from_digits(poly_mod(prod, list(self.modulus), self.p))

    # public arithmetic
    def add(self, a: int, b: int) -> int:
        return self._add[a][b] if self._add is not None else self._add_slow(a, b)

    def neg(self, a: int) -> int:
        if self.n == 1:
            return -a % self.p
        return self.from_digits([-c for c in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b] if self._mul is not None else self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        if self._inv is not None:
            return self._inv[a]
        # a^(q-2) by square and multiply
        result, base, e = 1, a, self.q - 2
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def elements(self) -> range:
        return range(self.q)

    def tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """numpy ``(add, sub, mul, inv)`` tables; inv[0] is 0."""
        return _tables(self)

    def __str__(self) -> str:
        return f"GF({self.q})"


@lru_cache(maxsize=None)
def _tables(f: Field):
    if f._add is None:
        raise ValueError(f"GF({f.q}) is too large for table-driven geometry")
    add = np.array(f._add, dtype=np.int64)
    mul = np.array(f._mul, dtype=np.int64)
    neg = np.array([f.neg(a) for a in range(f.q)], dtype=np.int64)
    sub = add[:, neg]
    inv = np.array(f._inv, dtype=np.int64)
    for t in (add, sub, mul, inv):
        t.setflags(write=False)
    return add, sub, mul, inv


@lru_cache(maxsize=None)
def _checked_default(q: int, p: int) -> tuple[int, ...]:
    mod = DEFAULT_MODULI[q]
    if not is_irreducible(mod, p):
        raise ReducibleModulus(f"built-in modulus for GF({q}) is reducible: {mod}")
    return mod


def field_make(p: int, n: int = 1, modulus=None) -> Field:
    """Build GF(p^n).

    ``modulus`` is a little-endian coefficient sequence of degree n; it is
    made monic and checked for irreducibility.  When omitted for n > 1 the
    built-in table is consulted.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if n < 1:
        raise ValueError("extension degree must be >= 1")
    q = p**n
    if n == 1:
        return _make_cached(q, p, 1, ())
    if modulus is None:
        if q not in DEFAULT_MODULI:
            raise NoDefaultModulus(f"no built-in modulus for GF({q}); pass one explicitly")
        mod = _checked_default(q, p)
    else:
        mod = _trim([int(c) % p for c in modulus])
        if len(mod) - 1 != n:
            raise ReducibleModulus(f"modulus {list(modulus)} does not have degree {n}")
        lead_inv = pow(mod[-1], p - 2, p)
        mod = tuple(c * lead_inv % p for c in mod)
        if not is_irreducible(mod, p):
            raise ReducibleModulus(f"{list(modulus)} is reducible over F_{p}")
    return _make_cached(q, p, n, tuple(mod))


def field_of_order(q: int, modulus=None) -> Field:
    pp = prime_power(q)
    if pp is None:
        raise NotPrime(f"{q} is not a prime power")
    return field_make(pp[0], pp[1], modulus)


@lru_cache(maxsize=None)
def _make_cached(q: int, p: int, n: int, modulus: tuple[int, ...]) -> Field:
    return Field(q=q, p=p, n=n, modulus=modulus)
