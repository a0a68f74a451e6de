"""Finite-set combinatorics on the tree.

Neighborhood multiplicity profiles, connectivity counts of induced
subgraphs, sharp vertex-boundary formulas and bounds, and the dominance
order on integer partitions.  Everything here is exact integer arithmetic;
profiles are always computed from first principles by multiplicity
counting, with the closed forms for quasi-balls kept as a cross-check
utility (they are known to overcount near the root, see
``quasi_ball_profile_divergence``).
"""

from __future__ import annotations

import warnings
from collections import Counter
from typing import Iterable, Sequence

from .tree import RegularTree


class _UnionFind:
    """Union-find with path compression, over an arbitrary key set."""

    def __init__(self, keys: Iterable[int]):
        self.parent = {k: k for k in keys}
        self.count = len(self.parent)

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx
            self.count -= 1


def neighborhood(tree: RegularTree, members: Iterable[int], closed: bool = True) -> set[int]:
    """N(J) (closed) or N'(J) (open): union of vertex neighborhoods."""
    out: set[int] = set()
    for v in members:
        out.update(tree.neighbors_closed(v) if closed else tree.neighbors_open(v))
    return out


def k_profile(tree: RegularTree, members: Iterable[int], kind: str = "lazy") -> tuple[int, ...]:
    """Sizes (k_1, ..., k_m) where k_i counts vertices with >= i neighbors in J.

    ``kind="lazy"`` uses closed neighborhoods (m = d+1 entries), ``"simple"``
    uses open neighborhoods (m = d entries).  The result is a nonincreasing
    partition whose total is (d+1)|J| resp. d|J|.
    """
    closed = _is_lazy(kind)
    counts: Counter[int] = Counter()
    size = 0
    for v in members:
        size += 1
        counts.update(tree.neighbors_closed(v) if closed else tree.neighbors_open(v))
    length = tree.d + 1 if closed else tree.d
    profile = [0] * length
    for mult in counts.values():
        for i in range(min(mult, length)):
            profile[i] += 1
    expected = (tree.d + 1) * size if closed else tree.d * size
    assert sum(profile) == expected, "multiplicity mass identity violated"
    return tuple(profile)


def kappa1(tree: RegularTree, members: Iterable[int]) -> int:
    """Number of connected components induced by J in the tree."""
    members = set(members)
    uf = _UnionFind(members)
    for v in members:
        p = tree.parent(v)
        if p is not None and p in members:
            uf.union(v, p)
    return uf.count


def kappa2(tree: RegularTree, members: Iterable[int]) -> int:
    """Components of J once edges are added between all distance-2 pairs.

    Any two vertices at tree distance exactly 2 share a unique middle
    vertex, which is the parent of at least one of them; it therefore
    suffices to group the members adjacent to each such candidate middle.
    """
    members = set(members)
    uf = _UnionFind(members)
    for v in members:
        p = tree.parent(v)
        if p is not None and p in members:
            uf.union(v, p)
    centers = {tree.parent(v) for v in members} - {None}
    for x in centers:
        near = [u for u in tree.neighbors_open(x) if u in members]
        for u in near[1:]:
            uf.union(near[0], u)
    return uf.count


def iso_con(tree: RegularTree, members: Iterable[int]) -> tuple[set[int], set[int]]:
    """Split J into its isolated points and the rest."""
    members = set(members)
    iso = {
        v
        for v in members
        if not any(u in members for u in tree.neighbors_open(v))
    }
    return iso, members - iso


def iso_exact(tree: RegularTree, members: Iterable[int]) -> int:
    """Exact size of N(J): (d-1)|J| + kappa1(J) + kappa2(J)."""
    members = set(members)
    return (tree.d - 1) * len(members) + kappa1(tree, members) + kappa2(tree, members)


def check_iso_exact(tree: RegularTree, members: Iterable[int]) -> bool:
    """Does the exact formula agree with a direct union count?"""
    members = set(members)
    return iso_exact(tree, members) == len(neighborhood(tree, members, closed=True))


def iso_lower_bound(tree: RegularTree, members: Iterable[int], kind: str = "lazy") -> int:
    """Sharp lower bound on |N(J)| (lazy) or |N'(J)| (simple).

    The lazy bound distinguishes sets with and without non-isolated points;
    the simple bound applies per parity class and is summed over the
    nonempty classes.
    """
    members = set(members)
    if not members:
        warnings.warn("isoperimetric lower bound on the empty set is degenerate", stacklevel=2)
        return 0
    d = tree.d
    if _is_lazy(kind):
        iso, con = iso_con(tree, members)
        if not con:
            return 1 + d * len(members)
        return 2 + d * len(iso) + (d - 1) * len(con)
    total = 0
    for parity in (0, 1):
        part = [v for v in members if tree.parity_of(v) == parity]
        if part:
            total += 1 + (d - 1) * len(part)
    return total


def quasi_ball_profile_closed_form(
    tree: RegularTree, size: int, kind: str = "lazy"
) -> tuple[int, ...]:
    """Closed-form K-profile of the quasi-ball (or half-quasi-ball) of a size.

    Advisory only: near the root (small radius) the closed form is known to
    overcount one entry by 1 because the innermost vertex lacks a parent.
    Ground truth is ``k_profile`` on the actual set.
    """
    if size <= 1:
        raise ValueError(f"closed form needs size > 1, got {size}")
    d = tree.d
    if _is_lazy(kind):
        n, a, c = tree.quasi_ball_decomposition(size)
        inner = tree.ball_size(n - 1)
        profile = [(d - 1) * size + 2, size]
        profile += [inner + a + 1] * c
        profile += [inner + a] * (d + 1 - 2 - c)
        return tuple(profile)
    # Simple kind: parity is irrelevant for the closed form shape, but the
    # decomposition is taken in the half-ball sizes of the set's own parity.
    n, a, c = tree.half_quasi_ball_decomposition(size, parity=0)
    inner = tree.half_ball_size(n - 2)
    profile = [(d - 1) * size + 1]
    profile += [inner + a + 1] * c
    profile += [inner + a] * (d - 1 - c)
    return tuple(profile)


def half_quasi_ball_profile_closed_form(
    tree: RegularTree, size: int, parity: int
) -> tuple[int, ...]:
    """Parity-aware closed form for the open-neighborhood profile."""
    if size <= 1:
        raise ValueError(f"closed form needs size > 1, got {size}")
    d = tree.d
    n, a, c = tree.half_quasi_ball_decomposition(size, parity)
    inner = tree.half_ball_size(n - 2)
    profile = [(d - 1) * size + 1]
    profile += [inner + a + 1] * c
    profile += [inner + a] * (d - 1 - c)
    return tuple(profile)


def quasi_ball_profile_divergence(
    tree: RegularTree, size: int, kind: str = "lazy"
) -> tuple[tuple[int, ...], tuple[int, ...], bool]:
    """Compare closed form and brute-force profile of a quasi-ball.

    Returns (closed_form, brute_force, diverges).  The brute-force value is
    the one to trust.
    """
    closed_form = quasi_ball_profile_closed_form(tree, size, kind)
    if _is_lazy(kind):
        brute = k_profile(tree, tree.quasi_ball(size), kind)
    else:
        brute = k_profile(tree, tree.half_quasi_ball(size, 0), kind)
    return closed_form, brute, closed_form != brute


def is_partition(parts: Sequence[int]) -> bool:
    return all(parts[i] >= parts[i + 1] for i in range(len(parts) - 1)) and (
        not parts or parts[-1] >= 0
    )


def dominates(mu: Sequence[int], lam: Sequence[int]) -> bool:
    """Dominance order: equal totals and every mu prefix sum >= lam's."""
    if len(mu) != len(lam):
        raise ValueError(f"partition lengths differ: {len(mu)} vs {len(lam)}")
    if sum(mu) != sum(lam):
        return False
    acc_mu = acc_lam = 0
    for x, y in zip(mu, lam):
        acc_mu += x
        acc_lam += y
        if acc_mu < acc_lam:
            return False
    return True


def karamata_check(
    f_points: Sequence[tuple[float, float]],
    mu: Sequence[int],
    lam: Sequence[int],
) -> bool:
    """Check sum f(mu_i) <= sum f(lam_i) for a concave piecewise-linear f.

    ``f_points`` lists (x, f(x)) breakpoints with strictly increasing x
    covering all parts of both partitions; concavity (nonincreasing slopes)
    and the dominance precondition are verified before evaluating.
    """
    xs = [p[0] for p in f_points]
    ys = [p[1] for p in f_points]
    if any(x1 >= x2 for x1, x2 in zip(xs, xs[1:])):
        raise ValueError("breakpoints must have strictly increasing x")
    slopes = [(y2 - y1) / (x2 - x1) for (x1, y1), (x2, y2) in zip(f_points, f_points[1:])]
    if any(s1 < s2 - 1e-12 for s1, s2 in zip(slopes, slopes[1:])):
        raise ValueError("function is not concave: slopes increase")
    if not dominates(mu, lam):
        raise ValueError("dominance precondition mu > lam fails")

    def evaluate(x: float) -> float:
        if not xs[0] <= x <= xs[-1]:
            raise ValueError(f"point {x} outside the interpolation interval")
        for (x1, y1), (x2, y2) in zip(f_points, f_points[1:]):
            if x <= x2:
                return y1 + (y2 - y1) * (x - x1) / (x2 - x1)
        return ys[-1]

    return sum(evaluate(x) for x in mu) <= sum(evaluate(x) for x in lam) + 1e-12


def _is_lazy(kind: str) -> bool:
    if kind not in ("lazy", "simple"):
        raise ValueError(f"kind must be 'lazy' or 'simple', got {kind!r}")
    return kind == "lazy"
