"""Probability distributions on the truncated tree.

Distributions are sparse maps from canonical vertex indices to weights, in
one of two arithmetic modes: exact (integer numerators over one common
denominator, so every comparison is an integer comparison) or float64.
Step operators refuse to act when the support could reach the truncation
depth, since silently clamping would break mass conservation.

The decreasing rearrangement p*(s) is the total mass of the s heaviest
atoms; ``majorizes`` compares rearrangements pointwise.  A distribution is
greedily arranged when its weights are nonincreasing along the canonical
vertex order, and half-greedily arranged when it lives on a single parity
class and is nonincreasing along that class's order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .tree import BoundaryError, RegularTree

_FLOAT_TOL = 1e-12


class Distribution:
    """A sparse probability distribution on canonical vertex indices."""

    __slots__ = ("tree", "num", "den")

    def __init__(self, tree: RegularTree, num: Mapping[int, int], den: int | None,
                 check: bool = True):
        self.tree = tree
        self.num = {v: w for v, w in num.items() if w != 0}
        self.den = den
        if check:
            self._validate()

    def _validate(self):
        for v in self.num:
            self.tree.check_vertex(v)
        if self.den is None:
            if any(w < 0 for w in self.num.values()):
                raise ValueError("negative weight")
            if abs(sum(self.num.values()) - 1.0) > _FLOAT_TOL:
                raise ValueError(f"total mass {sum(self.num.values())!r} is not 1")
        else:
            if self.den <= 0:
                raise ValueError("denominator must be positive")
            if any(w < 0 for w in self.num.values()):
                raise ValueError("negative weight")
            if sum(self.num.values()) != self.den:
                raise ValueError("total mass is not exactly 1")

    # -- construction ----------------------------------------------------

    @classmethod
    def delta(cls, tree: RegularTree, v: int = 0) -> "Distribution":
        """Point mass at a vertex (the root by default)."""
        return cls(tree, {v: 1}, 1)

    @classmethod
    def uniform(cls, tree: RegularTree, members: Iterable[int]) -> "Distribution":
        members = list(members)
        return cls(tree, {v: 1 for v in members}, len(members))

    @classmethod
    def from_weights(cls, tree: RegularTree, weights: Mapping[int, Fraction | float],
                     mode: str = "exact") -> "Distribution":
        if mode == "exact":
            fracs = {v: Fraction(w) for v, w in weights.items()}
            den = math.lcm(*(f.denominator for f in fracs.values())) if fracs else 1
            return cls(tree, {v: int(f * den) for v, f in fracs.items()}, den)
        if mode == "float":
            return cls(tree, {v: float(w) for v, w in weights.items()}, None)
        raise ValueError(f"mode must be 'exact' or 'float', got {mode!r}")

    # -- basic accessors -------------------------------------------------

    @property
    def mode(self) -> str:
        return "float" if self.den is None else "exact"

    def weight(self, v: int) -> Fraction | float:
        w = self.num.get(v, 0)
        return w if self.den is None else Fraction(w, self.den)

    def weights(self) -> dict[int, Fraction | float]:
        if self.den is None:
            return dict(self.num)
        return {v: Fraction(w, self.den) for v, w in self.num.items()}

    def support(self) -> list[int]:
        return sorted(self.num)

    def max_depth(self) -> int:
        return max((self.tree.depth_of(v) for v in self.num), default=0)

    def mass(self, members: Iterable[int]) -> Fraction | float:
        total = sum(self.num.get(v, 0) for v in members)
        return total if self.den is None else Fraction(total, self.den)

    def to_float(self) -> "Distribution":
        if self.den is None:
            return self
        return Distribution(self.tree, {v: w / self.den for v, w in self.num.items()}, None)

    def reduce(self) -> "Distribution":
        """Divide out the gcd of all numerators and the denominator."""
        if self.den is None or not self.num:
            return self
        g = math.gcd(self.den, *self.num.values())
        if g == 1:
            return self
        return Distribution(self.tree, {v: w // g for v, w in self.num.items()},
                            self.den // g, check=False)

    # -- rearrangement and majorization ----------------------------------

    def _sorted_desc(self) -> list:
        return sorted(self.num.values(), reverse=True)

    def p_star(self, s: int) -> Fraction | float:
        """Total mass of the s heaviest atoms (1 beyond the support size)."""
        if s < 0:
            raise ValueError(f"p* argument must be >= 0, got {s}")
        top = sum(self._sorted_desc()[:s])
        return top if self.den is None else Fraction(top, self.den)

    def rearrangement_prefix(self) -> list:
        """Prefix sums of the decreasing rearrangement, up to the support size."""
        return list(accumulate(self._sorted_desc()))

    def majorizes(self, other: "Distribution", tol: float = _FLOAT_TOL) -> bool:
        """True when this distribution's p*(j) >= other's for every j.

        Exact integer comparison when both operands are exact; otherwise a
        float comparison treating differences within ``tol`` as ties.
        """
        mine = self.rearrangement_prefix()
        theirs = other.rearrangement_prefix()
        m = max(len(mine), len(theirs))
        if self.den is not None and other.den is not None:
            if self.den == other.den and self.den <= 2**62:
                a = np.fromiter(mine, dtype=np.int64, count=len(mine))
                b = np.fromiter(theirs, dtype=np.int64, count=len(theirs))
                a = np.pad(a, (0, m - len(a)), constant_values=self.den)
                b = np.pad(b, (0, m - len(b)), constant_values=other.den)
                return bool(np.all(a >= b))
            for j in range(m):
                a = mine[j] if j < len(mine) else self.den
                b = theirs[j] if j < len(theirs) else other.den
                if a * other.den < b * self.den:
                    return False
            return True
        mine_f = [x / self.den for x in mine] if self.den else mine
        theirs_f = [x / other.den for x in theirs] if other.den else theirs
        for j in range(m):
            a = mine_f[j] if j < len(mine_f) else 1.0
            b = theirs_f[j] if j < len(theirs_f) else 1.0
            if a < b - tol:
                return False
        return True

    def is_greedily_arranged(self, tol: float = _FLOAT_TOL) -> bool:
        """Weights nonincreasing along the canonical order (absent = 0)."""
        if not self.num:
            return True
        top = max(self.num)
        prev = self.num.get(0, 0)
        for v in range(1, top + 1):
            cur = self.num.get(v, 0)
            if self.den is None:
                if cur > prev + tol:
                    return False
            elif cur > prev:
                return False
            prev = cur
        return True

    def is_half_greedily_arranged(self, tol: float = _FLOAT_TOL) -> bool:
        """Parity-pure support, nonincreasing along the parity class order."""
        if not self.num:
            return True
        parities = {self.tree.parity_of(v) for v in self.num}
        if len(parities) > 1:
            return False
        parity = parities.pop()
        top = max(self.num)
        prev = None
        for v in self.tree.parity_class(parity):
            if v > top:
                break
            cur = self.num.get(v, 0)
            if prev is not None:
                if self.den is None:
                    if cur > prev + tol:
                        return False
                elif cur > prev:
                    return False
            prev = cur
        return True

    # -- step operators ---------------------------------------------------

    def _check_step_room(self):
        if self.max_depth() >= self.tree.depth:
            raise BoundaryError(
                "support touches the truncation depth; one more step would "
                "leak mass (increase the tree depth)"
            )

    def lazy_step(self, gamma) -> "Distribution":
        """One step of the lazy walk: stay with probability gamma, else move
        to a uniformly random neighbor."""
        d = self.tree.d
        self._check_step_room()
        if self.den is None:
            g = float(gamma)
            if not 1.0 / (d + 1) - _FLOAT_TOL <= g < 1.0:
                raise ValueError(f"laziness {g} outside [1/(d+1), 1)")
            out: dict[int, float] = {}
            move = (1.0 - g) / d
            for v, w in self.num.items():
                out[v] = out.get(v, 0.0) + g * w
                for u in self.tree.neighbors_open(v):
                    out[u] = out.get(u, 0.0) + move * w
            return Distribution(self.tree, out, None, check=False)
        g = Fraction(gamma)
        if not Fraction(1, d + 1) <= g < 1:
            raise ValueError(f"laziness {g} outside [1/(d+1), 1)")
        a, b = g.numerator, g.denominator
        out_i: dict[int, int] = {}
        stay = a * d
        move = b - a
        for v, w in self.num.items():
            out_i[v] = out_i.get(v, 0) + stay * w
            mw = move * w
            for u in self.tree.neighbors_open(v):
                out_i[u] = out_i.get(u, 0) + mw
        return Distribution(self.tree, out_i, self.den * b * d, check=False)

    def simple_step(self) -> "Distribution":
        """One step of the simple walk: move to a uniformly random neighbor."""
        self._check_step_room()
        out: dict[int, int | float] = {}
        for v, w in self.num.items():
            for u in self.tree.neighbors_open(v):
                out[u] = out.get(u, 0) + w
        if self.den is None:
            d = self.tree.d
            return Distribution(self.tree, {v: w / d for v, w in out.items()}, None, check=False)
        return Distribution(self.tree, out, self.den * self.tree.d, check=False)

    def permute(self, spec) -> "Distribution":
        """Push the distribution forward through a permutation."""
        out: dict[int, int | float] = {}
        for v, w in self.num.items():
            image = spec.apply(self.tree, v)
            if image in out:
                raise ValueError(f"permutation is not injective on the support (at {image})")
            out[image] = w
        return Distribution(self.tree, out, self.den, check=False)

    # -- depth statistics and entropy -------------------------------------

    def depth_tail(self, n: int):
        """Pr[depth >= n]; exact Fraction in exact mode."""
        total = sum(w for v, w in self.num.items() if self.tree.depth_of(v) >= n)
        return total if self.den is None else Fraction(total, self.den)

    def depth_pmf(self) -> dict[int, Fraction | float]:
        out: dict[int, int | float] = {}
        for v, w in self.num.items():
            k = self.tree.depth_of(v)
            out[k] = out.get(k, 0) + w
        if self.den is None:
            return out
        return {k: Fraction(w, self.den) for k, w in out.items()}

    def shannon_entropy(self) -> float:
        """Entropy in bits, with 0 log 0 = 0."""
        if self.den is None:
            return -sum(w * math.log2(w) for w in self.num.values() if w > 0)
        return -sum(
            (w / self.den) * math.log2(w / self.den) for w in self.num.values()
        )

    # -- serialization -----------------------------------------------------

    def to_json_obj(self) -> dict:
        if self.den is None:
            atoms = [[v, self.num[v]] for v in sorted(self.num)]
        else:
            atoms = []
            for v in sorted(self.num):
                f = Fraction(self.num[v], self.den)
                atoms.append([v, f.numerator, f.denominator])
        return {"mode": self.mode, "atoms": atoms}

    @classmethod
    def from_json_obj(cls, tree: RegularTree, obj: dict) -> "Distribution":
        atoms = obj["atoms"]
        if obj.get("mode", "exact") == "float":
            return cls(tree, {int(v): float(w) for v, w in atoms}, None)
        fracs = {int(v): Fraction(int(n), int(d)) for v, n, d in atoms}
        return cls.from_weights(tree, fracs, mode="exact")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.weights() == other.weights()

    def __repr__(self) -> str:
        return (f"Distribution(mode={self.mode}, atoms={len(self.num)}, "
                f"max_depth={self.max_depth()})")


def depth_cdf_dominates(base: Distribution, permuted: Distribution, shift: int = 0) -> bool:
    """Does depth(permuted) + shift stochastically dominate depth(base)?

    True when Pr[depth_q + shift >= n] >= Pr[depth_p >= n] for every n,
    with q the permuted distribution and p the base one.
    """
    top = max(base.max_depth(), permuted.max_depth()) + abs(shift) + 1
    for n in range(top + 1):
        lhs = permuted.depth_tail(max(n - shift, 0))
        rhs = base.depth_tail(n)
        if permuted.den is None or base.den is None:
            if float(lhs) < float(rhs) - _FLOAT_TOL:
                return False
        elif lhs < rhs:
            return False
    return True


def rearrangement_breakpoints(dist: Distribution) -> list[tuple[float, float]]:
    """Breakpoints (s, p*(s)) of the piecewise-linear extension of p*."""
    prefix = dist.rearrangement_prefix()
    if dist.den is not None:
        prefix = [p / dist.den for p in prefix]
    return [(0.0, 0.0)] + [(float(j + 1), float(p)) for j, p in enumerate(prefix)]


@dataclass
class ChainCheckRow:
    """Per-step outcome of the majorization verification."""

    t: int
    majorized: bool
    base_arranged: bool
    depth_cdf_ok: bool
    depth_cdf_shifted_ok: bool
    entropy_ordered: bool
    entropy_base: float
    entropy_permuted: float


@dataclass
class ChainReport:
    """Outcome of verify_majorization_chain."""

    kind: str
    gamma: Fraction | float | None
    horizon: int
    rows: list[ChainCheckRow] = field(default_factory=list)
    first_violation: tuple[int, str] | None = None

    @property
    def passed(self) -> bool:
        return self.first_violation is None


def verify_majorization_chain(
    tree: RegularTree,
    schedule: Sequence,
    horizon: int,
    gamma=None,
    kind: str = "lazy",
    depth_shift: int | None = None,
) -> ChainReport:
    """Evolve the plain and the permuted walk side by side and check order.

    At every step t <= horizon this records whether the plain distribution
    majorizes the permuted one, whether the plain one is (half-)greedily
    arranged, whether the depth CDF domination holds (unshifted, and with
    the given shift, default 2, for the simple walk), and whether the
    entropies are ordered the way majorization forces (the majorizing
    distribution has the smaller entropy).  The first violated check, if
    any, is reported; the expectation is that none is.
    """
    if kind not in ("lazy", "simple"):
        raise ValueError(f"kind must be 'lazy' or 'simple', got {kind!r}")
    lazy = kind == "lazy"
    if lazy and gamma is None:
        gamma = Fraction(1, tree.d + 1)
    if depth_shift is None:
        depth_shift = 0 if lazy else 2
    report = ChainReport(kind=kind, gamma=gamma, horizon=horizon)
    base = Distribution.delta(tree, 0)
    permuted = Distribution.delta(tree, 0)

    def record(t: int, base: Distribution, permuted: Distribution):
        h_base = base.shannon_entropy()
        h_perm = permuted.shannon_entropy()
        row = ChainCheckRow(
            t=t,
            majorized=base.majorizes(permuted),
            base_arranged=(base.is_greedily_arranged() if lazy
                           else base.is_half_greedily_arranged()),
            depth_cdf_ok=depth_cdf_dominates(base, permuted, 0),
            depth_cdf_shifted_ok=depth_cdf_dominates(base, permuted, depth_shift),
            entropy_ordered=h_base <= h_perm + 1e-9,
            entropy_base=h_base,
            entropy_permuted=h_perm,
        )
        report.rows.append(row)
        if report.first_violation is None:
            for name in ("majorized", "base_arranged", "depth_cdf_shifted_ok",
                         "entropy_ordered"):
                if not getattr(row, name):
                    report.first_violation = (t, name)
                    break

    record(0, base, permuted)
    for t in range(1, horizon + 1):
        if lazy:
            base = base.lazy_step(gamma)
            permuted = permuted.lazy_step(gamma)
        else:
            base = base.simple_step()
            permuted = permuted.simple_step()
        if t <= len(schedule):
            permuted = permuted.permute(schedule[t - 1])
        record(t, base, permuted)
    return report


def enumerate_joint(
    tree: RegularTree,
    schedule: Sequence,
    horizon: int,
    statistic: Callable[[tuple[int, ...]], object],
    permuted: bool = True,
    kind: str = "lazy",
    budget: int = 4**10,
) -> dict:
    """Exact law of a functional of the depth trajectory, by enumeration.

    Sums over all (d+1)^horizon (lazy) or d^horizon (simple) equally likely
    step sequences of the walk, applying the schedule's permutations when
    ``permuted``.  Returns {statistic value: exact probability}.
    """
    d = tree.d
    lazy = kind == "lazy"
    fan = d + 1 if lazy else d
    if fan**horizon > budget:
        raise ValueError(
            f"enumeration of {fan}**{horizon} step sequences exceeds the budget {budget}"
        )
    counts: dict = {}

    def recurse(pos: int, t: int, depths: tuple[int, ...]):
        if t == horizon:
            value = statistic(depths)
            counts[value] = counts.get(value, 0) + 1
            return
        moves = tree.neighbors_closed(pos) if lazy else tree.neighbors_open(pos)
        for nxt in moves:
            cur = nxt
            if permuted and t < len(schedule):
                cur = schedule[t].apply(tree, cur)
            recurse(cur, t + 1, depths + (tree.depth_of(cur),))

    recurse(0, 0, ())
    total = fan**horizon
    return {value: Fraction(c, total) for value, c in sorted(counts.items(), key=lambda kv: str(kv[0]))}
