"""Permutation schedules: specs, validation, and generation.

A schedule is a sequence of permutation specs applied to the walk after
each step.  Five kinds are supported: the identity, an explicit bijection
of a ball (extended by the identity beyond it), a transposition of two
vertices, an edge-shift automorphism (the reflection of the whole tree
across a root edge, extended canonically by sorted child order), and, on
the two-regular tree only, a translation of the line.

Beyond the specs themselves this module builds the translation schedule
whose permuted walk exhibits exceptional slow-down times: translations are
placed on a doubling grid of epochs so that, within each epoch, the offsets
sweep densely across the iterated-logarithm envelope of the walk.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tree import BoundaryError, RegularTree, index_to_path, path_to_index


@dataclass(frozen=True)
class Identity:
    kind = "identity"

    def apply(self, tree: RegularTree, v: int) -> int:
        return tree.check_vertex(v)

    def apply_path(self, d: int, path: tuple[int, ...]) -> tuple[int, ...]:
        return path

    def to_json_dict(self) -> dict:
        return {"type": "identity"}


@dataclass(frozen=True)
class Explicit:
    """A bijection of the first len(mapping) vertices, identity beyond."""

    mapping: tuple[int, ...]

    kind = "explicit"

    def __post_init__(self):
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError("explicit mapping is not a bijection of an initial segment")

    def apply(self, tree: RegularTree, v: int) -> int:
        tree.check_vertex(v)
        return self.mapping[v] if v < len(self.mapping) else v

    def apply_path(self, d: int, path: tuple[int, ...]) -> tuple[int, ...]:
        if len(path) > _ball_depth_bound(d, len(self.mapping)):
            return path  # beyond the mapped ball, identity
        v = path_to_index(d, path)
        if v >= len(self.mapping):
            return path
        return index_to_path(d, self.mapping[v])

    def to_json_dict(self) -> dict:
        return {"type": "explicit", "map": list(self.mapping)}


@dataclass(frozen=True)
class Transposition:
    u: int
    w: int

    kind = "transposition"

    def __post_init__(self):
        if self.u == self.w:
            raise ValueError("transposition endpoints must differ")

    def apply(self, tree: RegularTree, v: int) -> int:
        tree.check_vertex(v)
        tree.check_vertex(self.u)
        tree.check_vertex(self.w)
        if v == self.u:
            return self.w
        if v == self.w:
            return self.u
        return v

    def apply_path(self, d: int, path: tuple[int, ...]) -> tuple[int, ...]:
        bound = max(self.u, self.w)
        if len(path) > _ball_depth_bound(d, bound + 1):
            return path
        v = path_to_index(d, path)
        if v == self.u:
            return index_to_path(d, self.w)
        if v == self.w:
            return index_to_path(d, self.u)
        return path

    def to_json_dict(self) -> dict:
        return {"type": "transposition", "u": self.u, "w": self.w}


@dataclass(frozen=True)
class EdgeShift:
    """Reflection of the tree across the edge between the root and child
    ``target`` (vertex index in 1..d), extended by sorted child order.

    Swaps the root with the target and exchanges the two half-trees on
    either side of that edge; an involution, and a graph automorphism.
    """

    target: int

    kind = "edge_shift"

    def apply(self, tree: RegularTree, v: int) -> int:
        if not 1 <= self.target <= tree.d:
            raise ValueError(f"edge-shift target must be a root child (1..{tree.d})")
        path = tree.index_to_path(v)
        image = self.apply_path(tree.d, path)
        if len(image) > tree.depth:
            raise BoundaryError(
                f"edge-shift image of vertex {v} exceeds truncation depth {tree.depth}"
            )
        return tree.path_to_index(image)

    def apply_path(self, d: int, path: tuple[int, ...]) -> tuple[int, ...]:
        c = self.target - 1  # root-child label
        if not path:
            return (c,)
        if path[0] == c:
            if len(path) == 1:
                return ()
            a2 = path[1]
            return (a2 + 1 if a2 >= c else a2,) + path[2:]
        c1 = path[0]
        return (c, c1 - 1 if c1 > c else c1) + path[1:]

    def root_child_label(self) -> int:
        return self.target - 1

    def to_json_dict(self) -> dict:
        return {"type": "edge_shift", "target": self.target}


@dataclass(frozen=True)
class Translation:
    """Translation of the line (d = 2 only), in signed coordinates.

    The canonical order maps index 0 to coordinate 0 and the child-0 ray to
    the positive integers.
    """

    offset: int

    kind = "translation"

    def apply(self, tree: RegularTree, v: int) -> int:
        if tree.d != 2:
            raise ValueError("translations exist only on the 2-regular tree")
        x = signed_of_index(v) + self.offset
        image = index_of_signed(x)
        tree.check_vertex(image)
        return image

    def apply_path(self, d: int, path: tuple[int, ...]) -> tuple[int, ...]:
        if d != 2:
            raise ValueError("translations exist only on the 2-regular tree")
        x = signed_of_path(path) + self.offset
        return path_of_signed(x)

    def to_json_dict(self) -> dict:
        return {"type": "translation", "offset": self.offset}


PermutationSpec = Identity | Explicit | Transposition | EdgeShift | Translation

AUTOMORPHISM_KINDS = ("identity", "edge_shift", "translation")


def signed_of_index(v: int) -> int:
    """Signed line coordinate of a canonical index on the 2-regular tree."""
    if v == 0:
        return 0
    depth = (v + 1) // 2
    return depth if v % 2 == 1 else -depth


def index_of_signed(x: int) -> int:
    if x == 0:
        return 0
    return 2 * x - 1 if x > 0 else -2 * x


def signed_of_path(path: tuple[int, ...]) -> int:
    if not path:
        return 0
    return len(path) if path[0] == 0 else -len(path)


def path_of_signed(x: int) -> tuple[int, ...]:
    if x == 0:
        return ()
    return (0,) + (0,) * (x - 1) if x > 0 else (1,) + (0,) * (-x - 1)


def from_json_dict(obj: dict) -> PermutationSpec:
    kind = obj["type"]
    if kind == "identity":
        return Identity()
    if kind == "explicit":
        return Explicit(tuple(int(x) for x in obj["map"]))
    if kind == "transposition":
        return Transposition(int(obj["u"]), int(obj["w"]))
    if kind == "edge_shift":
        return EdgeShift(int(obj["target"]))
    if kind == "translation":
        return Translation(int(obj["offset"]))
    raise ValueError(f"unknown permutation type {kind!r}")


def schedule_to_json(d: int, depth: int, schedule: Sequence[PermutationSpec]) -> str:
    obj = {
        "d": d,
        "depth": depth,
        "permutations": [spec.to_json_dict() for spec in schedule],
    }
    return json.dumps(obj, separators=(", ", ": "), sort_keys=True)


def schedule_from_json(text: str) -> tuple[int, int, list[PermutationSpec]]:
    obj = json.loads(text)
    specs = [from_json_dict(p) for p in obj["permutations"]]
    return int(obj["d"]), int(obj["depth"]), specs


@dataclass
class ValidationReport:
    valid: bool
    problems: list[str]


def validate(spec: PermutationSpec, tree: RegularTree, depth_check: int = 3) -> ValidationReport:
    """Check bijectivity (explicit kinds) or edge preservation (automorphisms).

    Automorphism kinds are verified edge-preserving on every edge of the
    ball of radius ``depth_check``.
    """
    problems: list[str] = []
    if spec.kind == "explicit":
        seen: dict[int, int] = {}
        for v, image in enumerate(spec.mapping):
            if image in seen:
                problems.append(f"images collide: {seen[image]} and {v} both map to {image}")
            seen[image] = v
        missing = set(range(len(spec.mapping))) - set(seen)
        if missing:
            problems.append(f"images missing: {sorted(missing)[:5]}")
    elif spec.kind == "transposition":
        for v in (spec.u, spec.w):
            try:
                tree.check_vertex(v)
            except BoundaryError as exc:
                problems.append(str(exc))
    elif spec.kind in ("edge_shift", "translation"):
        if spec.kind == "translation" and tree.d != 2:
            problems.append("translation requires d = 2")
        else:
            limit = min(depth_check, tree.depth - 1)
            ball = tree.quasi_ball(tree.ball_size(limit))
            for v in ball:
                if v == 0:
                    continue
                pv, pu = spec.apply(tree, v), spec.apply(tree, tree.parent(v))
                if tree.distance(pv, pu) != 1:
                    problems.append(f"edge ({tree.parent(v)}, {v}) not preserved")
    return ValidationReport(valid=not problems, problems=problems)


def lil_envelope(t: int) -> int:
    """Integer part of the iterated-logarithm envelope sqrt(4/3 t loglog t).

    The double logarithm is clamped to 1 below t = 16 so the function is
    total and positive.
    """
    if t < 1:
        raise ValueError(f"time must be >= 1, got {t}")
    loglog = math.log(math.log(t)) if t >= 16 else 1.0
    return int(math.sqrt((4.0 / 3.0) * t * loglog))


def default_epoch_length(t: int) -> int:
    """Slowly growing epoch length: ceil(log2(t + 2))."""
    return max(1, math.ceil(math.log2(t + 2)))


@dataclass
class ExceptionalSchedule:
    """Translation schedule realizing exceptional slow-down times on the line.

    Epochs start at b_0 = 1 and advance by f(b_j); within the epoch at b_j
    the composed translation offsets sweep the grid
    floor(envelope(b_j) * (4i/f(b_j) - 2)) for i = 0..f(b_j)-1, densely
    covering [-2 envelope, +2 envelope].  The permutation applied at time t
    is the translation by offsets[t-1] - offsets[t], so the composition up
    to time t shifts by -offsets[t].
    """

    horizon: int
    epoch_starts: list[int]
    offsets: np.ndarray  # offsets[t] for t = 0..horizon; offsets[0] = 0

    @classmethod
    def build(cls, horizon: int, epoch_length=default_epoch_length) -> "ExceptionalSchedule":
        if horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {horizon}")
        starts = [1]
        while starts[-1] <= horizon:
            starts.append(starts[-1] + epoch_length(starts[-1]))
        offsets = np.zeros(horizon + 1, dtype=np.int64)
        for j, b in enumerate(starts[:-1]):
            f = starts[j + 1] - b
            env = lil_envelope(b)
            for i in range(f):
                t = b + i
                if t > horizon:
                    break
                offsets[t] = math.floor(env * (4.0 * i / f - 2.0))
        return cls(horizon=horizon, epoch_starts=starts[:-1], offsets=offsets)

    def translations(self) -> list[Translation]:
        """The per-step permutations pi_t, t = 1..horizon."""
        return [
            Translation(int(self.offsets[t - 1] - self.offsets[t]))
            for t in range(1, self.horizon + 1)
        ]

    def offset_bound_ok(self) -> bool:
        """Every offset lies within +-2 envelope of its epoch start."""
        for j, b in enumerate(self.epoch_starts):
            end = self.epoch_starts[j + 1] if j + 1 < len(self.epoch_starts) else self.horizon + 1
            env = lil_envelope(b)
            for t in range(b, min(end, self.horizon + 1)):
                if not -2 * env <= self.offsets[t] <= 2 * env:
                    return False
        return True


def compose_apply(schedule: Sequence[PermutationSpec], tree: RegularTree, v: int,
                  upto: int | None = None) -> int:
    """Apply pi_1, then pi_2, ... up to pi_upto, to a vertex."""
    upto = len(schedule) if upto is None else upto
    for spec in schedule[:upto]:
        v = spec.apply(tree, v)
    return v


def random_ball_bijections(
    gen: np.random.Generator, tree: RegularTree, ball_depth: int, count: int
) -> list[Explicit]:
    """Fresh uniformly random bijections of the ball of a given radius."""
    size = tree.ball_size(ball_depth)
    return [Explicit(tuple(int(x) for x in gen.permutation(size))) for _ in range(count)]


def _ball_depth_bound(d: int, size: int) -> int:
    """Depth of the smallest ball containing the first ``size`` vertices."""
    from .tree import ball_size

    n = 0
    while ball_size(d, n) < size:
        n += 1
    return n
