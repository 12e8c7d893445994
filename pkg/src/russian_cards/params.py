"""Which (a, b, c, d, k) make the colouring protocol executable.

All arithmetic is on integers; boundary cases such as sigma_2(7) = 8 = 2 * 4
are compared exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import combinations
from math import comb, isqrt

from .errors import RegimeInfeasibleAtThisA, TooLargeForExhaustive
from .field import prime_power
from .geometry import sigma

EXHAUSTIVE_SETS_LIMIT = 2_000_000


def heavy_line_bound(q: int, k: int) -> int:
    """(k+1)(q-k) - k(k+1)/2: sets smaller than this have at most k lines with q-k of their points."""
    return (k + 1) * (q - k) - k * (k + 1) // 2


def bound_heavy_lines(q: int, k: int, size_e: int) -> bool:
    return size_e < heavy_line_bound(q, k)


@dataclass(frozen=True)
class FeasibilityReport:
    a: int
    b: int
    c: int
    d: int
    k: int
    cond1: bool  # a is a prime power
    cond2: bool  # b = a^d - a - c >= 0
    cond3: bool  # k < a
    cond4: bool  # at most k heavy lines for every (a+c)-set
    cond5: bool  # sigma_d(a) >= k(c+3)
    via: str
    feasible: bool
    # the cruder "c < ak - 3k(k+1)/2", reported for information only
    simplified_cond4: bool

    def to_json(self) -> dict:
        return asdict(self)


def feasible(a: int, c: int, d: int, k: int, exhaustive: bool = False) -> FeasibilityReport:
    """Evaluate the five executability conditions.

    Condition 4 is established through the counting bound, which is
    sufficient but not necessary.  ``exhaustive=True`` instead checks it over
    every point set of size a + c, for tiny spaces only.
    """
    b = a**d - a - c
    cond1 = prime_power(a) is not None
    cond2 = b >= 0 and c >= 0
    cond3 = 1 <= k < a
    if exhaustive and cond1 and cond3:
        cond4 = exhaustive_heavy_check(a, c, d, k)
        via = "exhaustive"
    else:
        cond4 = cond3 and bound_heavy_lines(a, k, a + c)
        via = "counting-bound"
    cond5 = a >= 2 and d >= 1 and sigma(d, a) >= k * (c + 3)
    # 2c < 2ak - 3k(k+1)
    simplified = 2 * c < 2 * a * k - 3 * k * (k + 1)
    return FeasibilityReport(
        a=a, b=b, c=c, d=d, k=k,
        cond1=cond1, cond2=cond2, cond3=cond3, cond4=cond4, cond5=cond5,
        via=via,
        feasible=cond1 and cond2 and cond3 and cond4 and cond5,
        simplified_cond4=simplified,
    )


def exhaustive_heavy_check(a: int, c: int, d: int, k: int) -> bool:
    """Literal condition 4: every S with |S| <= a+c has at most k lines meeting it in a-k points.

    The count only grows with S, so sets of size exactly min(a+c, a^d) suffice.
    """
    from .field import field_of_order
    from .geometry import affine_space

    space = affine_space(field_of_order(a), d)
    n = space.num_points
    size = min(a + c, n)
    if n > 81 or comb(n, size) > EXHAUSTIVE_SETS_LIMIT:
        raise TooLargeForExhaustive(f"C({n}, {size}) point sets")
    need = a - k
    masks = space.line_masks
    for s in combinations(range(n), size):
        smask = sum(1 << x for x in s)
        heavy = sum(1 for m in masks if (m & smask).bit_count() >= need)
        if heavy > k:
            return False
    return True


def search_k(a: int, c: int, d: int) -> int | None:
    """Smallest k >= 1 for which the report comes back feasible."""
    for k in range(1, max(a, 1)):
        if feasible(a, c, d, k).feasible:
            return k
    return None


def max_c(a: int, d: int, k: int) -> int | None:
    """Largest c with feasible(a, c, d, k), or None if even c = 0 fails."""
    if prime_power(a) is None or not 1 <= k < a:
        return None
    cap4 = heavy_line_bound(a, k) - a - 1
    cap5 = sigma(d, a) // k - 3
    cap2 = a**d - a
    best = min(cap2, cap4, cap5)
    return best if best >= 0 else None


def prime_powers(limit: int) -> list[int]:
    return [q for q in range(2, limit + 1) if prime_power(q) is not None]


def sweep(max_a: int, dims=(2, 3, 4)) -> list[dict]:
    """Feasibility atlas rows ``{a, d, k, c_max, b}`` for every prime power a <= max_a."""
    rows = []
    for a in prime_powers(max_a):
        for d in dims:
            for k in range(1, a):
                cm = max_c(a, d, k)
                if cm is None:
                    continue
                rows.append({"a": a, "d": d, "k": k, "c_max": cm, "b": a**d - a - cm})
    return rows


def _round_sqrt(a: int) -> int:
    r = isqrt(a)
    return r + 1 if 4 * a >= (2 * r + 1) ** 2 else r


def suggest_params(a: int, regime: str) -> tuple[int, int, int, FeasibilityReport]:
    """Parameters from the asymptotic regimes: ``d3`` (k ~ sqrt a, c ~ a^1.5/2) or ``d4`` (k ~ a/2, c ~ a^2/9)."""
    if regime == "d3":
        d, k, c = 3, _round_sqrt(a), isqrt(a**3) // 2
    elif regime == "d4":
        d, k, c = 4, a // 2, a * a // 9
    else:
        raise ValueError(f"unknown regime {regime!r}")
    report = feasible(a, c, d, k)
    if not report.feasible:
        raise RegimeInfeasibleAtThisA(f"regime {regime} is not feasible at a={a}: {report}")
    return k, c, report.b, report


def smallest_a_exceeding(ratio: int, max_a: int, regime: str = "d3") -> int | None:
    """Smallest prime power a <= max_a whose regime parameters are feasible with c/a > ratio."""
    for a in prime_powers(max_a):
        try:
            _, c, _, _ = suggest_params(a, regime)
        except RegimeInfeasibleAtThisA:
            continue
        if c > ratio * a:
            return a
    return None
