"""Line colourings and their combinatorial properties.

Point sets are plain ``frozenset``\\ s of point indices.  Checks that only need
lines meeting a set in two or more points go through
:meth:`AffineSpace.secant_counts` and scale to large spaces; the hue
machinery and exhaustive richness enumerate every line and are desk-scale
only.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from math import comb

import numpy as np

from .errors import (
    DuplicateColourInWitness,
    DuplicateSpecialLines,
    NotEnoughDirections,
    TooLargeForExhaustive,
)
from .geometry import AffineSpace, Line

DEFAULT_HUE_CAP = 100_000
RICH_EXHAUSTIVE_LIMIT = 20_000_000


def _line_index(line) -> int:
    return line.index if isinstance(line, Line) else int(line)


class Colouring:
    """A total map from the lines of a space to colours 1..k.

    Either dense (``by_line``: one colour per line index) or compact
    (``by_direction``: one entry per direction rank, 0 meaning ``default``,
    overridden line by line through ``exceptions``).
    """

    def __init__(self, space: AffineSpace, k: int, *, by_line=None, by_direction=None, exceptions=None, default: int = 1):
        if k < 1:
            raise ValueError("need at least one colour")
        self.space = space
        self.k = k
        if (by_line is None) == (by_direction is None):
            raise ValueError("give exactly one of by_line / by_direction")
        if by_line is not None:
            arr = np.asarray(by_line, dtype=np.int64)
            if arr.shape != (space.num_lines,):
                raise ValueError(f"by_line needs {space.num_lines} entries, got {arr.shape}")
            if arr.size and (arr.min() < 1 or arr.max() > k):
                raise ValueError("line colours must lie in 1..k")
            self._by_line = arr
            self._by_direction = None
            self.exceptions: dict[int, int] = {}
            self.default = default
        else:
            arr = np.asarray(by_direction, dtype=np.int64)
            if arr.shape != (space.num_directions,):
                raise ValueError(f"by_direction needs {space.num_directions} entries, got {arr.shape}")
            if arr.size and (arr.min() < 0 or arr.max() > k):
                raise ValueError("direction colours must lie in 0..k")
            if not 1 <= default <= k:
                raise ValueError("default colour must lie in 1..k")
            exc = {int(i): int(c) for i, c in dict(exceptions or {}).items()}
            for i, c in exc.items():
                if not 0 <= i < space.num_lines or not 1 <= c <= k:
                    raise ValueError(f"bad exception ({i}, {c})")
            self._by_line = None
            self._by_direction = arr
            self.exceptions = exc
            self.default = default
            self._dir_eff = np.where(arr == 0, default, arr)
            keys = sorted(exc)
            self._exc_keys = np.array(keys, dtype=np.int64)
            self._exc_vals = np.array([exc[i] for i in keys], dtype=np.int64)
        for a in (self._by_line, self._by_direction):
            if a is not None:
                a.setflags(write=False)

    @property
    def is_compact(self) -> bool:
        return self._by_direction is not None

    def colour(self, line) -> int:
        i = _line_index(line)
        if self._by_line is not None:
            return int(self._by_line[i])
        if i in self.exceptions:
            return self.exceptions[i]
        return int(self._dir_eff[i // self.space.lines_per_direction])

    def colours(self, indices) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        if self._by_line is not None:
            return self._by_line[idx]
        out = self._dir_eff[idx // self.space.lines_per_direction]
        if len(self._exc_keys):
            pos = np.clip(np.searchsorted(self._exc_keys, idx), 0, len(self._exc_keys) - 1)
            hit = self._exc_keys[pos] == idx
            out = np.where(hit, self._exc_vals[pos], out)
        return out

    def dense(self) -> np.ndarray:
        """Colour of every line, by line index."""
        if self._by_line is not None:
            return self._by_line
        self.space._check_desk()
        return self.colours(np.arange(self.space.num_lines))

    def to_dense(self) -> Colouring:
        return Colouring(self.space, self.k, by_line=self.dense())

    @cached_property
    def density(self) -> int:
        return density(self)

    @cached_property
    def _masks_by_colour(self) -> dict[int, list[int]]:
        masks = self.space.line_masks
        out: dict[int, list[int]] = {i: [] for i in range(1, self.k + 1)}
        for m, c in zip(masks, self.dense().tolist()):
            out[c].append(m)
        return out

    # -- serialisation ----------------------------------------------------------

    def to_json(self) -> dict:
        if self._by_line is not None:
            return {"by_line": self._by_line.tolist()}
        return {
            "by_direction": self._by_direction.tolist(),
            "exceptions": [[i, self.exceptions[i]] for i in sorted(self.exceptions)],
            "default": self.default,
        }

    @classmethod
    def from_json(cls, space: AffineSpace, k: int, data: dict) -> Colouring:
        if "by_line" in data:
            return cls(space, k, by_line=data["by_line"])
        if "by_direction" in data:
            exc = {}
            for pair in data.get("exceptions", []):
                i, c = pair
                if int(i) in exc:
                    raise ValueError(f"line {i} listed twice in exceptions")
                exc[int(i)] = int(c)
            return cls(space, k, by_direction=data["by_direction"], exceptions=exc, default=int(data.get("default", 1)))
        raise ValueError("colouring needs 'by_line' or 'by_direction'")

    def __repr__(self) -> str:
        kind = "compact" if self.is_compact else "dense"
        return f"Colouring({self.space!r}, k={self.k}, {kind})"


def trivial_colouring(space: AffineSpace) -> Colouring:
    return Colouring(space, 1, by_direction=np.zeros(space.num_directions, dtype=np.int64), default=1)


# -- incidence -------------------------------------------------------------------


def meeting_counts(space: AffineSpace, E, m: int) -> dict[int, int]:
    """``{line index: |line & E|}`` over the lines meeting E in at least m points."""
    E = frozenset(E)
    if m > space.q:
        return {}
    if m >= 2:
        return {i: c for i, c in space.secant_counts(E).items() if c >= m}
    counts = dict(space.secant_counts(E))
    for x in E:
        for i in space.line_indices_through(x).tolist():
            counts.setdefault(i, 1)
    if m <= 0:
        space._check_desk()
        for i in range(space.num_lines):
            counts.setdefault(i, 0)
    return counts


def lines_meeting(space: AffineSpace, E, m: int) -> list[Line]:
    """Every line l with |l & E| >= m, in index order."""
    return [space.line(i) for i in sorted(meeting_counts(space, E, m))]


def full_lines(space: AffineSpace, E) -> list[int]:
    return sorted(meeting_counts(space, E, space.q))


# -- density and richness ----------------------------------------------------------


def density(xi: Colouring) -> int:
    """Largest m such that every point sees at least m lines of every colour."""
    space, k = xi.space, xi.k
    if not xi.is_compact:
        per_point = xi.dense()[space.point_lines]
        return int(min((per_point == i).sum(axis=1).min() for i in range(1, k + 1)))
    # Every point has exactly one line per direction, so away from exception
    # lines the count of colour i is the number of directions coloured i.
    base = np.bincount(xi._dir_eff, minlength=k + 1)[1:].astype(np.int64)
    adjust: dict[int, np.ndarray] = {}
    lpd = space.lines_per_direction
    for li, c in xi.exceptions.items():
        c0 = int(xi._dir_eff[li // lpd])
        if c0 == c:
            continue
        for x in space.line_points(li).tolist():
            row = adjust.get(x)
            if row is None:
                row = adjust[x] = base.copy()
            row[c0 - 1] -= 1
            row[c - 1] += 1
    best = min(int(r.min()) for r in adjust.values()) if adjust else None
    if len(adjust) < space.num_points:
        untouched = int(base.min())
        best = untouched if best is None else min(best, untouched)
    return max(best, 0)


def is_rich(xi: Colouring, c: int, mode: str = "density") -> bool:
    """Richness for c-sets.

    ``mode="density"`` answers True only when density >= c + 2 (sufficient,
    not necessary).  ``mode="exhaustive"`` checks every c-set, colour and point.
    """
    if mode == "density":
        return xi.density >= c + 2
    if mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")
    space = xi.space
    n = space.num_points
    work = comb(n, c) * xi.k * n
    if work > RICH_EXHAUSTIVE_LIMIT or space.num_lines > 20_000:
        raise TooLargeForExhaustive(f"{work} cases for c={c} in {space!r}")
    everything = (1 << n) - 1
    by_colour = xi._masks_by_colour
    for cset in combinations(range(n), c):
        cmask = sum(1 << x for x in cset)
        outside = everything & ~cmask
        if not outside:
            continue
        for i in range(1, xi.k + 1):
            avoiding = [m for m in by_colour[i] if not m & cmask]
            if not avoiding:
                return False
            union, inter = 0, everything
            for m in avoiding:
                union |= m
                inter &= m
            # an i-line through every outside point, and one missing it
            if outside & ~union or outside & inter:
                return False
    return True


# -- distinguished, hue ---------------------------------------------------------------


def is_distinguished(xi: Colouring, E) -> bool:
    cols = xi.colours(full_lines(xi.space, E)).tolist()
    return len(cols) == len(set(cols))


def _to_mask(E) -> int:
    m = 0
    for x in E:
        m |= 1 << int(x)
    return m


def _from_mask(m: int) -> frozenset[int]:
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return frozenset(out)


def _full_masks(xi: Colouring, emask: int) -> list[tuple[int, int]]:
    return [(m, c) for c, ms in xi._masks_by_colour.items() for m in ms if m & emask == m]


def _neighbour_masks(xi: Colouring, emask: int) -> set[int]:
    out = set()
    for lmask, colour in _full_masks(xi, emask):
        rest = emask & ~lmask
        for h in xi._masks_by_colour[colour]:
            if not h & rest:
                out.add(rest | h)
    return out


def _distinguished_mask(xi: Colouring, emask: int) -> bool:
    cols = [c for _, c in _full_masks(xi, emask)]
    return len(cols) == len(set(cols))


def hue_neighbors(xi: Colouring, E) -> set[frozenset[int]]:
    """Every F one swap from E.  The identity swap h = l is allowed, so E itself
    is a neighbour whenever E contains a full line."""
    return {_from_mask(m) for m in _neighbour_masks(xi, _to_mask(E))}


def _hue_bfs(xi: Colouring, E, cap: int, stop_on_bad: bool):
    start = _to_mask(E)
    seen = {start}
    queue = deque([start])
    if stop_on_bad and not _distinguished_mask(xi, start):
        return seen, False, start
    while queue:
        cur = queue.popleft()
        for nxt in _neighbour_masks(xi, cur):
            if nxt in seen:
                continue
            if len(seen) >= cap:
                return seen, True, None
            seen.add(nxt)
            if stop_on_bad and not _distinguished_mask(xi, nxt):
                return seen, False, nxt
            queue.append(nxt)
    return seen, False, None


def hue_explore(xi: Colouring, E, cap: int = DEFAULT_HUE_CAP) -> tuple[set[frozenset[int]], bool]:
    """Breadth-first hue class of E; the flag is True when more than ``cap`` sets exist."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    seen, truncated, _ = _hue_bfs(xi, E, cap, stop_on_bad=False)
    return {_from_mask(m) for m in seen}, truncated


def hue_counterexample(xi: Colouring, E, cap: int = DEFAULT_HUE_CAP) -> tuple[frozenset[int] | None, bool]:
    """A member of E's hue for which xi is not distinguished, and a truncation flag."""
    _, truncated, bad = _hue_bfs(xi, E, cap, stop_on_bad=True)
    return (None if bad is None else _from_mask(bad)), truncated


def is_very_distinguished(xi: Colouring, E, cap: int = DEFAULT_HUE_CAP) -> bool | None:
    """True/False by exhaustive hue search, or None when the cap was hit first.

    On None, fall back on :func:`find_critical`: a critical colouring is very
    distinguished.
    """
    bad, truncated = hue_counterexample(xi, E, cap)
    if bad is not None:
        return False
    return None if truncated else True


# -- critical and perfect colourings -------------------------------------------------


@dataclass(frozen=True)
class CriticalWitness:
    lines: tuple[Line, ...]

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(l.index for l in self.lines)

    def __len__(self) -> int:
        return len(self.lines)


def _uncovered_violation(space, E, heavy, covered, thr):
    """Points of E that some line leaves uncovered in excess, or None if the cover works.

    Any witness extending ``covered`` has to cover at least one returned point.
    """
    if thr == 1:
        for x in sorted(E):
            if x not in covered:
                return {x}
        return None
    for h in heavy:
        left = heavy[h] - covered
        if len(left) >= thr:
            return left
    return None


def _heavy_sets(space, E, thr) -> dict[int, frozenset[int]]:
    if thr < 2:
        return {}
    return {h: frozenset(space.line_points(h).tolist()) & E for h in meeting_counts(space, E, thr)}


def check_critical(xi: Colouring, E, witness) -> bool:
    """Whether every line h has fewer than q - k points of E outside the witness lines."""
    space = xi.space
    E = frozenset(E)
    lines = witness.lines if isinstance(witness, CriticalWitness) else witness
    idx = [_line_index(l) for l in lines]
    cols = xi.colours(idx).tolist() if idx else []
    if len(set(cols)) != len(cols):
        raise DuplicateColourInWitness(f"witness colours {cols} repeat")
    thr = space.q - xi.k
    if thr <= 0:
        return False
    covered: set[int] = set()
    for i in idx:
        covered.update(space.line_points(i).tolist())
    return _uncovered_violation(space, E, _heavy_sets(space, E, thr), covered, thr) is None


def _witness(space, idx) -> CriticalWitness:
    return CriticalWitness(tuple(space.line(i) for i in idx))


def find_critical(xi: Colouring, E, hint=()) -> CriticalWitness | None:
    """A set of critical lines for E, or None when none exists.

    Every full line of E is forced into the witness.  Lines in ``hint`` are
    tried next, then heavy lines greedily by decreasing |h & E|; if neither
    works a complete backtracking search runs.  Each branch adds a line of an
    unused colour through a point that a violated line leaves uncovered, so a
    witness is found whenever one exists.
    """
    space = xi.space
    E = frozenset(E)
    q, k = space.q, xi.k
    thr = q - k
    if thr <= 0:
        return None
    counts = space.secant_counts(E)
    forced = sorted(i for i, c in counts.items() if c == q)
    forced_cols = xi.colours(forced).tolist() if forced else []
    if len(set(forced_cols)) != len(forced_cols):
        return None
    heavy = _heavy_sets(space, E, thr)
    points_of: dict[int, frozenset[int]] = {}

    def pts(i: int) -> frozenset[int]:
        s = points_of.get(i)
        if s is None:
            s = points_of[i] = frozenset(space.line_points(i).tolist())
        return s

    def extend(chosen: list[int], used: set[int], cands) -> tuple[list[int], set[int]]:
        chosen, used = list(chosen), set(used)
        for i in cands:
            c = xi.colour(i)
            if c not in used and i not in chosen:
                chosen.append(i)
                used.add(c)
        return chosen, used

    def works(chosen: list[int]) -> bool:
        cov = set().union(*(pts(i) for i in chosen)) if chosen else set()
        return _uncovered_violation(space, E, heavy, cov, thr) is None

    base_used = set(forced_cols)
    if hint:
        chosen, _ = extend(forced, base_used, [_line_index(h) for h in hint])
        if works(chosen):
            return _witness(space, chosen)
    greedy_order = sorted(heavy, key=lambda h: (-len(heavy[h]), h))
    chosen, _ = extend(forced, base_used, greedy_order)
    if works(chosen):
        return _witness(space, chosen)

    seen: set[frozenset[int]] = set()

    def dfs(chosen: list[int], used: set[int], cov: frozenset[int]) -> list[int] | None:
        bad = _uncovered_violation(space, E, heavy, cov, thr)
        if bad is None:
            return chosen
        if len(used) >= k:
            return None
        cands: dict[int, int] = {}
        for u in sorted(bad):
            lines = space.line_indices_through(u)
            for i, c in zip(lines.tolist(), xi.colours(lines).tolist()):
                if c not in used and i not in cands:
                    cands[i] = c
        order = sorted(cands, key=lambda i: (-len(pts(i) & bad), -len(pts(i) & E), i))
        for i in order:
            key = frozenset(chosen + [i])
            if key in seen:
                continue
            seen.add(key)
            found = dfs(chosen + [i], used | {cands[i]}, cov | pts(i))
            if found is not None:
                return found
        return None

    cov0 = frozenset().union(*(pts(i) for i in forced)) if forced else frozenset()
    found = dfs(list(forced), base_used, cov0)
    return None if found is None else _witness(space, found)


def is_perfect(xi: Colouring, E) -> bool:
    """Whether the lines meeting E in at least q - k points carry distinct colours."""
    idx = sorted(meeting_counts(xi.space, E, xi.space.q - xi.k))
    cols = xi.colours(idx).tolist() if idx else []
    return len(cols) == len(set(cols))


# -- construction ------------------------------------------------------------------


def knit_colouring(
    space: AffineSpace,
    special,
    k: int,
    m: int,
    rng: random.Random,
    randomize_leftover: bool = False,
) -> Colouring:
    """A compact k-colouring of density >= m with special[i] coloured i + 1.

    ``m * k`` directions avoiding those of the special lines are drawn at
    random and dealt into k classes of m; a line gets colour i when its
    direction is in class i.  Lines in the remaining directions take colour 1,
    or with ``randomize_leftover`` a random colour per direction.
    """
    idx = [_line_index(l) for l in special]
    if len(set(idx)) != len(idx):
        raise DuplicateSpecialLines(f"special lines repeat: {idx}")
    if len(idx) > k:
        raise ValueError(f"{len(idx)} special lines but only {k} colours")
    if m < 0:
        raise ValueError("density must be >= 0")
    lpd = space.lines_per_direction
    taken = {i // lpd for i in idx}
    free = [r for r in range(space.num_directions) if r not in taken]
    if len(free) < m * k:
        raise NotEnoughDirections(f"need {m * k} free directions, have {len(free)}")
    chosen = rng.sample(free, m * k)
    by_direction = np.zeros(space.num_directions, dtype=np.int64)
    for colour in range(1, k + 1):
        by_direction[chosen[(colour - 1) * m : colour * m]] = colour
    if randomize_leftover:
        for r in np.flatnonzero(by_direction == 0).tolist():
            by_direction[r] = rng.randint(1, k)
    exceptions = {i: pos + 1 for pos, i in enumerate(idx)}
    return Colouring(space, k, by_direction=by_direction, exceptions=exceptions, default=1)
