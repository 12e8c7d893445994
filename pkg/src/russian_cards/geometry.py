"""Points and lines of the affine space GF(q)^d.

Point indices are little-endian in base q: ``index = sum(coords[i] * q**i)``.
A direction is normalised so that its first nonzero coordinate is 1, and
directions are ranked by their point index.  Every line has a canonical base,
its smallest-index point, which is the unique point whose coordinate at the
direction's last nonzero position is 0.  Lines are indexed by
``direction_rank * q**(d-1) + rank_of_base`` which is the lexicographic order
on (direction index, base index).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .errors import CoincidentPoints
from .field import Field

# Spaces with more lines than this are never enumerated wholesale.
DESK_LINE_LIMIT = 250_000
# Largest space for which the point-pair -> line table is built.
PAIR_TABLE_POINTS = 1024


def sigma(d: int, n: int) -> int:
    """n^(d-1) + ... + n + 1."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return sum(n**i for i in range(d))


@dataclass(frozen=True)
class Point:
    coords: tuple[int, ...]
    index: int


@dataclass(frozen=True)
class Line:
    """A canonical affine line.  Equality and hashing go by index only."""

    index: int
    base: Point = field(compare=False)
    direction: Point = field(compare=False)
    points: frozenset[int] = field(compare=False, repr=False)

    def __contains__(self, x) -> bool:
        return (x.index if isinstance(x, Point) else x) in self.points

    def __len__(self) -> int:
        return len(self.points)


class AffineSpace:
    """GF(q)^d with precomputed coordinate and direction tables."""

    def __init__(self, field: Field, d: int):
        if d < 2:
            raise ValueError("dimension must be at least 2")
        self.field = field
        self.q = q = field.q
        self.d = d
        self.num_points = q**d
        self.lines_per_direction = q ** (d - 1)
        self.num_directions = sigma(d, q)
        self.num_lines = self.num_directions * self.lines_per_direction
        self._add, self._sub, self._mul, self._inv = field.tables()
        self._pow = q ** np.arange(d, dtype=np.int64)

        idx = np.arange(self.num_points, dtype=np.int64)
        self.coords = (idx[:, None] // self._pow[None, :]) % q
        self.coords.setflags(write=False)

        nz = self.coords != 0
        first = np.argmax(nz, axis=1)
        normalised = nz.any(axis=1) & (self.coords[idx, first] == 1)
        self.directions = idx[normalised]
        self.dir_rank = np.full(self.num_points, -1, dtype=np.int64)
        self.dir_rank[self.directions] = np.arange(len(self.directions))
        assert len(self.directions) == self.num_directions
        dcoords = self.coords[self.directions]
        self._dir_coords = dcoords
        self._dir_last = d - 1 - np.argmax(dcoords[:, ::-1] != 0, axis=1)
        self._dir_last_inv = self._inv[dcoords[np.arange(len(dcoords)), self._dir_last]]

    def __repr__(self) -> str:
        return f"AffineSpace(GF({self.q}), d={self.d})"

    # -- points ---------------------------------------------------------------

    def point(self, index: int) -> Point:
        return Point(tuple(int(c) for c in self.coords[index]), int(index))

    def index_of(self, coords) -> int:
        if len(coords) != self.d or any(not 0 <= c < self.q for c in coords):
            raise ValueError(f"bad coordinates {coords!r} for {self!r}")
        return int(sum(int(c) * self.q**i for i, c in enumerate(coords)))

    def point_at(self, coords) -> Point:
        return self.point(self.index_of(coords))

    def label(self, index: int) -> str:
        """Coordinates as a string, e.g. ``"02"`` for (0, 2); comma separated when q > 10."""
        cs = [str(int(c)) for c in self.coords[index]]
        return "".join(cs) if self.q <= 10 else ",".join(cs)

    def parse_label(self, text: str) -> int:
        text = text.strip()
        parts = text.split(",") if "," in text else list(text)
        return self.index_of([int(c) for c in parts])

    def _as_index(self, x) -> int:
        return x.index if isinstance(x, Point) else int(x)

    # -- lines ----------------------------------------------------------------

    def _direction_of(self, vec: np.ndarray) -> int:
        nz = np.flatnonzero(vec)
        if len(nz) == 0:
            raise CoincidentPoints("zero direction")
        scaled = self._mul[self._inv[vec[nz[0]]], vec]
        return int(self.dir_rank[int(scaled @ self._pow)])

    def _base_rank(self, base: np.ndarray, last: np.ndarray) -> np.ndarray:
        full = base @ self._pow
        cut = self.q**last
        low = full % cut
        return low + (full - low) // self.q

    def line_indices(self, xs, ranks) -> np.ndarray:
        """Indices of the lines through points ``xs`` with direction ranks ``ranks`` (broadcast)."""
        xs, ranks = np.broadcast_arrays(np.asarray(xs, dtype=np.int64), np.asarray(ranks, dtype=np.int64))
        xc = self.coords[xs]
        dc = self._dir_coords[ranks]
        last = self._dir_last[ranks]
        lam = self._mul[np.take_along_axis(xc, last[..., None], axis=-1)[..., 0], self._dir_last_inv[ranks]]
        base = self._sub[xc, self._mul[lam[..., None], dc]]
        return ranks * self.lines_per_direction + self._base_rank(base, last)

    def line_index_through(self, x, rank: int) -> int:
        return int(self.line_indices(self._as_index(x), rank))

    def line_points(self, index: int) -> np.ndarray:
        """Point indices of a line, ordered by the parameter lambda = 0..q-1 from the base."""
        rank, br = divmod(int(index), self.lines_per_direction)
        if not 0 <= rank < self.num_directions:
            raise IndexError(f"line index {index} out of range")
        cut = self.q ** int(self._dir_last[rank])
        low, high = br % cut, br // cut
        base = self.coords[low + high * cut * self.q]
        lam = np.arange(self.q)
        pts = self._add[base[None, :], self._mul[lam[:, None], self._dir_coords[rank][None, :]]]
        return pts @ self._pow

    def line(self, index: int) -> Line:
        pts = self.line_points(index)
        rank = int(index) // self.lines_per_direction
        return Line(
            index=int(index),
            base=self.point(int(pts[0])),
            direction=self.point(int(self.directions[rank])),
            points=frozenset(int(p) for p in pts),
        )

    def line_of_pair(self, x1, x2) -> int:
        a, b = self._as_index(x1), self._as_index(x2)
        if a == b:
            raise CoincidentPoints(f"points {a} and {b} coincide")
        rank = self._direction_of(self._sub[self.coords[b], self.coords[a]])
        return self.line_index_through(a, rank)

    def line_from_points(self, x1, x2) -> Line:
        return self.line(self.line_of_pair(x1, x2))

    def lines_through(self, x) -> list[Line]:
        return [self.line(int(i)) for i in self.line_indices_through(x)]

    def line_indices_through(self, x) -> np.ndarray:
        return self.line_indices(self._as_index(x), np.arange(self.num_directions))

    def all_lines(self) -> list[Line]:
        self._check_desk()
        return [self.line(i) for i in range(self.num_lines)]

    def _check_desk(self) -> None:
        if self.num_lines > DESK_LINE_LIMIT:
            raise ValueError(f"{self!r} has {self.num_lines} lines; refusing to enumerate them all")

    @cached_property
    def line_table(self) -> np.ndarray:
        """(num_lines, q) array of point indices; desk-scale spaces only."""
        self._check_desk()
        table = np.empty((self.num_lines, self.q), dtype=np.int64)
        for i in range(self.num_lines):
            table[i] = self.line_points(i)
        table.setflags(write=False)
        return table

    @cached_property
    def line_masks(self) -> list[int]:
        """Each line as a Python-int bitmask over point indices; desk-scale spaces only."""
        return [sum(1 << int(p) for p in row) for row in self.line_table]

    @cached_property
    def point_lines(self) -> np.ndarray:
        """(num_points, sigma) array: the line indices through each point, by direction rank."""
        self._check_desk()
        return self.line_indices(np.arange(self.num_points)[:, None], np.arange(self.num_directions)[None, :])

    # -- incidence with point sets ---------------------------------------------

    @cached_property
    def pair_table(self) -> np.ndarray | None:
        """(num_points, num_points) line index through each pair (-1 on the diagonal), or None if too big."""
        n = self.num_points
        if n > PAIR_TABLE_POINTS:
            return None
        diff = self._sub[self.coords[None, :, :], self.coords[:, None, :]]
        nonzero = diff != 0
        first = np.argmax(nonzero, axis=2)
        pivot = np.take_along_axis(diff, first[..., None], axis=2)[..., 0]
        normed = self._mul[self._inv[pivot][..., None], diff]
        ranks = self.dir_rank[normed @ self._pow]
        eye = np.eye(n, dtype=bool)
        ranks[eye] = 0
        table = self.line_indices(np.arange(n)[:, None], ranks)
        table[eye] = -1
        table.setflags(write=False)
        return table

    def secant_counts(self, points) -> dict[int, int]:
        """``{line index: |line & E|}`` for every line meeting E in at least two points."""
        key = frozenset(self._as_index(p) for p in points)
        hit = self._secant_cache.get(key)
        if hit is None:
            hit = self._secant_counts(key)
            if len(self._secant_cache) > 512:
                self._secant_cache.clear()
            self._secant_cache[key] = hit
        return dict(hit)

    @cached_property
    def _secant_cache(self) -> dict:
        return {}

    def _secant_counts(self, key: frozenset[int]) -> dict[int, int]:
        pts = np.array(sorted(key), dtype=np.int64)
        counts: dict[int, int] = {}
        if len(pts) < 2:
            return counts
        table = self.pair_table
        if table is not None:
            sub = table[pts[:, None], pts[None, :]]
            lines, pairs = np.unique(sub[np.triu_indices(len(pts), 1)], return_counts=True)
            # a line with m points of E accounts for m(m-1)/2 pairs
            ms = (1 + np.rint(np.sqrt(1 + 8 * pairs)).astype(np.int64)) // 2
            return dict(zip(lines.tolist(), ms.tolist()))
        pc = self.coords[pts]
        for i in range(len(pts) - 1):
            diff = self._sub[pc[i + 1 :], pc[i][None, :]]
            first = np.argmax(diff != 0, axis=1)
            pivot = diff[np.arange(len(diff)), first]
            normed = self._mul[self._inv[pivot][:, None], diff]
            ranks, mult = np.unique(self.dir_rank[normed @ self._pow], return_counts=True)
            lines = self.line_indices(int(pts[i]), ranks)
            for li, m in zip(lines.tolist(), mult.tolist()):
                # the first point of a line in sorted order sees all of its other points
                if li not in counts:
                    counts[li] = m + 1
        return counts


@lru_cache(maxsize=32)
def affine_space(field: Field, d: int) -> AffineSpace:
    return AffineSpace(field, d)
