"""Canonical breadth-first indexing of the rooted d-regular tree.

Vertices of the rooted d-regular tree, truncated at a finite depth, are
identified with the integers 0, 1, 2, ... in breadth-first order: index 0 is
the root, lower depths come first, and at equal depth the children of an
earlier vertex precede the children of a later vertex.  All navigation
(parent, children, neighborhoods) is O(1) index arithmetic; the tree is
never materialized.

A vertex can equivalently be described by its *path*: the tuple of child
labels leading from the root to it.  The root's children carry labels
0..d-1; every deeper vertex has d-1 children with labels 0..d-2.  Paths are
the representation of choice for walks that travel deeper than any sensible
truncation, since the breadth-first index grows exponentially with depth.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field


class BoundaryError(ValueError):
    """An operation would produce a vertex beyond the truncation depth."""


def sphere_size(d: int, n: int) -> int:
    """Number of vertices at distance exactly n from the root."""
    if n < 0:
        return 0
    if n == 0:
        return 1
    return d * (d - 1) ** (n - 1)


def ball_size(d: int, n: int) -> int:
    """Number of vertices at distance at most n from the root (0 for n = -1)."""
    if n < -1:
        raise ValueError(f"ball radius must be >= -1, got {n}")
    if n == -1:
        return 0
    if d == 2:
        return 2 * n + 1
    return 1 + d * ((d - 1) ** n - 1) // (d - 2)


def half_ball_size(d: int, n: int) -> int:
    """Number of vertices v with |v| <= n and |v| congruent to n mod 2."""
    if n < -1:
        raise ValueError(f"half-ball radius must be >= -1, got {n}")
    return sum(sphere_size(d, k) for k in range(max(n, 0) % 2 if n >= 0 else 0, n + 1, 2))


def index_to_path(d: int, v: int) -> tuple[int, ...]:
    """Child-label path from the root to the vertex with breadth-first index v."""
    if v < 0:
        raise ValueError(f"vertex index must be >= 0, got {v}")
    labels = []
    n = _depth_of_index(d, v)
    while v > 0:
        if v <= d:  # child of the root
            labels.append(v - 1)
            v = 0
        else:
            j = v - ball_size(d, n - 1)
            labels.append(j % (d - 1))
            v = ball_size(d, n - 2) + j // (d - 1)
            n -= 1
    return tuple(reversed(labels))


def path_to_index(d: int, path: tuple[int, ...]) -> int:
    """Breadth-first index of the vertex with the given child-label path."""
    v = 0
    for depth, label in enumerate(path, start=1):
        arity = d if depth == 1 else d - 1
        if not 0 <= label < arity:
            raise ValueError(f"child label {label} out of range at depth {depth}")
        if depth == 1:
            v = 1 + label
        else:
            j = v - ball_size(d, depth - 2)
            v = ball_size(d, depth - 1) + (d - 1) * j + label
    return v


def path_distance(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    """Graph distance between two vertices given by their root paths."""
    common = 0
    for x, y in zip(a, b):
        if x != y:
            break
        common += 1
    return (len(a) - common) + (len(b) - common)


def _depth_of_index(d: int, v: int) -> int:
    n = 0
    while ball_size(d, n) <= v:
        n += 1
    return n


@dataclass(frozen=True)
class RegularTree:
    """The rooted d-regular tree truncated at a fixed depth.

    All operations that would step past the truncation depth raise
    :class:`BoundaryError` rather than wrapping or clamping.
    """

    d: int
    depth: int
    _offsets: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"degree must be >= 2, got {self.d}")
        if self.depth < 0:
            raise ValueError(f"truncation depth must be >= 0, got {self.depth}")
        offsets = [0]
        for n in range(self.depth + 1):
            offsets.append(offsets[-1] + sphere_size(self.d, n))
        object.__setattr__(self, "_offsets", tuple(offsets))

    @property
    def vertex_count(self) -> int:
        return self._offsets[-1]

    def check_vertex(self, v: int) -> int:
        if not 0 <= v < self.vertex_count:
            raise BoundaryError(
                f"vertex index {v} outside the depth-{self.depth} truncation "
                f"({self.vertex_count} vertices)"
            )
        return v

    def depth_of(self, v: int) -> int:
        """Distance of vertex v from the root."""
        self.check_vertex(v)
        return bisect_right(self._offsets, v) - 1

    def sphere_size(self, n: int) -> int:
        return sphere_size(self.d, n)

    def ball_size(self, n: int) -> int:
        return ball_size(self.d, n)

    def half_ball_size(self, n: int) -> int:
        return half_ball_size(self.d, n)

    def parent(self, v: int) -> int | None:
        """Parent of v, or None for the root."""
        n = self.depth_of(v)
        if n == 0:
            return None
        if n == 1:
            return 0
        j = v - self._offsets[n]
        return self._offsets[n - 1] + j // (self.d - 1)

    def children(self, v: int) -> range:
        """Children of v in canonical order."""
        n = self.depth_of(v)
        if n >= self.depth:
            raise BoundaryError(
                f"children of vertex {v} (depth {n}) exceed truncation depth {self.depth}"
            )
        if n == 0:
            return range(1, self.d + 1)
        j = v - self._offsets[n]
        base = self._offsets[n + 1] + (self.d - 1) * j
        return range(base, base + self.d - 1)

    def neighbors_closed(self, v: int) -> tuple[int, ...]:
        """The d+1 vertices at distance at most one from v, v included."""
        p = self.parent(v)
        kids = self.children(v)
        return (v,) + ((p,) if p is not None else ()) + tuple(kids)

    def neighbors_open(self, v: int) -> tuple[int, ...]:
        """The d vertices adjacent to v, v excluded."""
        p = self.parent(v)
        kids = self.children(v)
        return ((p,) if p is not None else ()) + tuple(kids)

    def parity_of(self, v: int) -> int:
        return self.depth_of(v) % 2

    def parity_class_size(self, parity: int) -> int:
        if parity not in (0, 1):
            raise ValueError(f"parity must be 0 or 1, got {parity}")
        return sum(self.sphere_size(n) for n in range(parity, self.depth + 1, 2))

    def quasi_ball(self, size: int) -> range:
        """The first `size` vertices of the canonical order."""
        if size < 0:
            raise ValueError(f"quasi-ball size must be >= 0, got {size}")
        if size > self.vertex_count:
            raise BoundaryError(
                f"quasi-ball of size {size} exceeds the truncation ({self.vertex_count} vertices)"
            )
        return range(size)

    def half_quasi_ball(self, size: int, parity: int) -> tuple[int, ...]:
        """The first `size` vertices of the given parity, in canonical order."""
        if size < 0:
            raise ValueError(f"half-quasi-ball size must be >= 0, got {size}")
        if size > self.parity_class_size(parity):
            raise BoundaryError(
                f"half-quasi-ball of size {size} exceeds the parity-{parity} "
                f"class ({self.parity_class_size(parity)} vertices)"
            )
        members = []
        for n in range(parity, self.depth + 1, 2):
            lo = self._offsets[n]
            take = min(size - len(members), self.sphere_size(n))
            members.extend(range(lo, lo + take))
            if len(members) == size:
                break
        return tuple(members)

    def parity_class(self, parity: int):
        """Yield the vertices of one parity class in canonical order."""
        if parity not in (0, 1):
            raise ValueError(f"parity must be 0 or 1, got {parity}")
        for n in range(parity, self.depth + 1, 2):
            yield from range(self._offsets[n], self._offsets[n + 1])

    def quasi_ball_decomposition(self, size: int) -> tuple[int, int, int]:
        """Write size = |B_n| + a(d-1) + c with B_n inside the quasi-ball.

        Returns (n, a, c) where n is the largest radius with |B_n| <= size
        and size < |B_{n+1}|, and 0 <= c < d-1.
        """
        if size < 1:
            raise ValueError(f"decomposition needs size >= 1, got {size}")
        n = 0
        while ball_size(self.d, n + 1) <= size:
            n += 1
        rest = size - ball_size(self.d, n)
        return n, rest // (self.d - 1), rest % (self.d - 1)

    def half_quasi_ball_decomposition(self, size: int, parity: int) -> tuple[int, int, int]:
        """Write size = |B'_n| + a(d-1) + c for the parity class, 0 <= c <= d-2."""
        if size < 1:
            raise ValueError(f"decomposition needs size >= 1, got {size}")
        n = parity
        while half_ball_size(self.d, n + 2) <= size:
            n += 2
        rest = size - half_ball_size(self.d, n)
        return n, rest // (self.d - 1), rest % (self.d - 1)

    def index_to_path(self, v: int) -> tuple[int, ...]:
        self.check_vertex(v)
        return index_to_path(self.d, v)

    def path_to_index(self, path: tuple[int, ...]) -> int:
        if len(path) > self.depth:
            raise BoundaryError(
                f"path of depth {len(path)} exceeds truncation depth {self.depth}"
            )
        return path_to_index(self.d, path)

    def distance(self, u: int, v: int) -> int:
        return path_distance(self.index_to_path(u), self.index_to_path(v))
