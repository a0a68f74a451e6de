"""Trajectory simulation and the explicit couplings.

Randomness is counter-based: every run derives its generator from a
(master seed, replicate) pair, so batches are reproducible and independent
of worker scheduling.  Walks deeper than any reasonable truncation are
tracked structurally (depths, or root paths), never through breadth-first
indices, whose size grows exponentially with depth.

Three couplings are provided: the shared-randomness coupling of a walk
with its permuted image under an automorphism schedule, the binomial
endpoint coupling with its within-epoch bridge, and their composition,
which exhibits a growing depth gap between two copies of the same walk.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .schedules import (
    AUTOMORPHISM_KINDS,
    ExceptionalSchedule,
    PermutationSpec,
    default_epoch_length,
)

_U64 = np.uint64


def replicate_generator(seed: int, replicate: int = 0) -> np.random.Generator:
    """Counter-based stream for (master seed, replicate), Philox-keyed."""
    if seed < 0 or replicate < 0:
        raise ValueError("seed and replicate must be nonnegative")
    key = np.array([seed, replicate], dtype=_U64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass
class WalkTrace:
    """A sampled trajectory: depths always, root paths optionally."""

    kind: str
    d: int
    gamma: float | Fraction | None
    seed: int
    depths: np.ndarray
    positions: list[tuple[int, ...]] | None = None
    schedule_id: str | None = None

    def __post_init__(self):
        if self.positions is not None:
            assert self.positions[0] == (), "trace must start at the root"
            assert len(self.positions) == len(self.depths)

    @property
    def steps(self) -> int:
        return len(self.depths) - 1

    def empirical_speed(self) -> float:
        return float(self.depths[-1]) / self.steps if self.steps else 0.0


@dataclass
class CouplingReport:
    """Per-time gap statistics for a coupled pair of walks."""

    label: str
    horizon: int
    gap: np.ndarray
    threshold: np.ndarray | None = None
    extras: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)  # full arrays, not serialized

    @property
    def violations(self) -> int:
        if self.threshold is None:
            return 0
        return int(np.sum(self.gap[2:] < self.threshold[2:]))

    def first_clear_time(self) -> int | None:
        """Smallest t0 >= 2 with gap >= threshold from t0 to the horizon."""
        if self.threshold is None:
            return None
        bad = np.flatnonzero(self.gap[2:] < self.threshold[2:])
        if len(bad) == 0:
            return 2
        t0 = int(bad[-1]) + 3
        return t0 if t0 <= self.horizon else None

    def quantiles(self, qs=(0.1, 0.5, 0.9)) -> dict[float, float]:
        return {q: float(np.quantile(self.gap, q)) for q in qs}

    def to_json_dict(self) -> dict:
        out = {
            "label": self.label,
            "horizon": self.horizon,
            "violations": self.violations,
            "first_clear_time": self.first_clear_time(),
            "gap_quantiles": {str(q): v for q, v in self.quantiles().items()},
            "final_gap": int(self.gap[-1]),
        }
        out.update(self.extras)
        return out


def _default_gamma(d: int, gamma) -> float:
    if gamma is None:
        return 1.0 / (d + 1)
    return float(gamma)


def _canonical_move(u: float, gamma: float, d: int, depth: int) -> tuple[int, int]:
    """Decode one uniform draw into (depth change, child label or -1).

    Mirrors the kernel semantics exactly: stay when u < gamma, otherwise
    move to the parent with conditional probability 1/d (never at the
    root), else to the child whose label is derived from the same draw.
    """
    if u < gamma:
        return 0, -1
    v = (u - gamma) / (1.0 - gamma)
    if depth == 0:
        k = min(int(v * d), d - 1)
        return 1, k
    if v * d < 1.0:
        return -1, -1
    k = min(int(v * d - 1.0), d - 2)
    return 1, k


def simulate(
    kind: str,
    d: int,
    steps: int,
    seed: int,
    gamma=None,
    schedule: Sequence[PermutationSpec] | None = None,
    replicate: int = 0,
    record_positions: bool = False,
) -> WalkTrace:
    """Sample a walk (permuted when a schedule is given), depth-tracked.

    The permutation at step t is applied after the move; only depths are
    stored unless ``record_positions`` asks for the root paths as well.
    Identical (seed, replicate, config) inputs give identical traces.
    """
    if kind not in ("lazy", "simple"):
        raise ValueError(f"kind must be 'lazy' or 'simple', got {kind!r}")
    g = _default_gamma(d, gamma) if kind == "lazy" else 0.0
    if kind == "simple" and gamma is not None:
        raise ValueError("gamma applies to the lazy walk only")
    gen = replicate_generator(seed, replicate)
    schedule_id = None if schedule is None else f"schedule[{len(schedule)}]"

    if schedule is None and not record_positions:
        depths = _kernels.depth_walk(gen, d, g, steps)
        return WalkTrace(kind, d, gamma if kind == "lazy" else None, seed, depths,
                         schedule_id=schedule_id)

    us = gen.random(steps)
    path: list[int] = []
    depths = np.empty(steps + 1, dtype=np.int64)
    depths[0] = 0
    positions = [()] if record_positions else None
    for t in range(steps):
        change, label = _canonical_move(us[t], g, d, len(path))
        if change == 1:
            path.append(label)
        elif change == -1:
            path.pop()
        if schedule is not None and t < len(schedule):
            new = schedule[t].apply_path(d, tuple(path))
            path = list(new)
        depths[t + 1] = len(path)
        if record_positions:
            positions.append(tuple(path))
    return WalkTrace(kind, d, gamma if kind == "lazy" else None, seed, depths,
                     positions=positions, schedule_id=schedule_id)


def empirical_speeds(
    kind: str, d: int, steps: int, seed: int, replicates: int, gamma=None
) -> np.ndarray:
    """Final-depth speeds |W_T|/T over counter-derived replicate streams."""
    g = _default_gamma(d, gamma) if kind == "lazy" else 0.0
    out = np.empty(replicates)
    for r in range(replicates):
        gen = replicate_generator(seed, r)
        depths = _kernels.depth_walk(gen, d, g, steps)
        out[r] = depths[-1] / steps
    return out


# -- automorphism coupling -------------------------------------------------


def automorphism_coupling(
    schedule: Sequence[PermutationSpec],
    d: int,
    steps: int,
    seed: int,
    gamma=None,
    replicate: int = 0,
) -> tuple[WalkTrace, WalkTrace, CouplingReport]:
    """Couple a lazy walk with its image under an automorphism schedule.

    Both walks are driven by the same randomness; the image position at
    time t is the composed automorphism applied to the walk's position, so
    the pair is a genuine coupling of the plain and the permuted walk.  The
    report tracks the depth gap against 2 ln t.
    """
    bad = [s.kind for s in schedule if s.kind not in AUTOMORPHISM_KINDS]
    if bad:
        raise ValueError(f"schedule contains non-automorphism kinds: {sorted(set(bad))}")
    g = _default_gamma(d, gamma)
    gen = replicate_generator(seed, replicate)

    kinds = {s.kind for s in schedule}
    if "translation" in kinds:
        if d != 2:
            raise ValueError("translations exist only on the 2-regular tree")
        if kinds - {"translation", "identity"}:
            raise ValueError("translations cannot be mixed with other kinds")
        x = lazy_signed_walk(gen, g, steps)
        shift = np.zeros(steps + 1, dtype=np.int64)
        for t, spec in enumerate(schedule[:steps], start=1):
            shift[t] = spec.offset if spec.kind == "translation" else 0
        total = np.cumsum(shift)
        depths_x = np.abs(x)
        depths_y = np.abs(x + total)
    else:
        codes = np.full(steps, -1, dtype=np.int64)
        for t, spec in enumerate(schedule[:steps]):
            if spec.kind == "edge_shift":
                codes[t] = spec.root_child_label()
        depths_x, depths_y = _kernels.coupled_shift_walk(gen, d, g, codes)

    gap = depths_x - depths_y
    with np.errstate(divide="ignore"):
        threshold = 2.0 * np.log(np.arange(steps + 1, dtype=np.float64))
    threshold[0] = np.inf
    windows = []
    k = 1
    while 2**k <= steps:
        lo, hi = 2 ** (k - 1), min(2**k, steps)
        frac = float(np.mean(gap[lo:hi + 1] > threshold[lo:hi + 1]))
        windows.append({"window": [lo, hi], "excess_fraction": frac})
        k += 1
    report = CouplingReport(
        label="automorphism",
        horizon=steps,
        gap=gap,
        threshold=None,
        extras={"excess_windows": windows,
                "excess_fraction_total": float(np.mean(gap[1:] > threshold[1:]))},
    )
    tx = WalkTrace("lazy", d, gamma, seed, depths_x, schedule_id="base")
    ty = WalkTrace("lazy", d, gamma, seed, depths_y, schedule_id="permuted")
    return tx, ty, report


def lazy_signed_walk(gen: np.random.Generator, gamma: float, steps: int) -> np.ndarray:
    """Lazy symmetric walk on the signed line (the 2-regular tree)."""
    us = gen.random(steps)
    move = us >= gamma
    v = (us - gamma) / (1.0 - gamma)
    inc = np.where(move, np.where(v < 0.5, 1, -1), 0).astype(np.int64)
    out = np.empty(steps + 1, dtype=np.int64)
    out[0] = 0
    np.cumsum(inc, out=out[1:])
    return out


# -- binomial coupling -----------------------------------------------------


@dataclass
class BinomialCoupling:
    """Coupling of two Binomial(n, p) variables with a guaranteed up-shift.

    Off the window I the coupling is the identity; on the lower part J of
    the window the second variable is shifted up by m; the leftover mass on
    I x I is completed by monotone (northwest-corner) transport of the
    residual marginals.  In exact mode the joint pmf is stored as integer
    numerators over ``den``.
    """

    n: int
    p: Fraction | float
    m: int
    window: tuple[int, int]  # I = [lo, hi]
    shift_upper: int  # J = [lo, shift_upper]
    joint: dict[tuple[int, int], int] | None
    den: int | None
    _rows: dict[int, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict, repr=False)

    @property
    def exact(self) -> bool:
        return self.joint is not None

    def marginal_first(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (i, _), w in self.joint.items():
            out[i] = out.get(i, Fraction(0)) + Fraction(w, self.den)
        return out

    def marginal_second(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (_, j), w in self.joint.items():
            out[j] = out.get(j, Fraction(0)) + Fraction(w, self.den)
        return out

    def prob_second_below_first(self) -> Fraction:
        total = sum(w for (i, j), w in self.joint.items() if j < i)
        return Fraction(total, self.den)

    def prob_shift_at_least_m(self) -> Fraction:
        total = sum(w for (i, j), w in self.joint.items() if j - i >= self.m)
        return Fraction(total, self.den)

    def prob_in_shift_zone(self) -> Fraction:
        lo, _ = self.window
        total = sum(w for (i, j), w in self.joint.items() if lo <= i <= self.shift_upper)
        return Fraction(total, self.den)

    def sample_pair(self, gen: np.random.Generator) -> tuple[int, int]:
        """One (B, B') draw; usable in exact and float mode alike."""
        lo, hi = self.window
        b = int(gen.binomial(self.n, float(self.p)))
        if b < lo or b > hi:
            return b, b
        if b <= self.shift_upper:
            return b, b + self.m
        cols, cdf = self._rows[b]
        j = int(cols[np.searchsorted(cdf, gen.random(), side="right")])
        return b, j


def binomial_pmf(n: int, p: Fraction) -> tuple[list[int], int]:
    """Exact pmf of Binomial(n, p) as integer numerators over b**n."""
    a, b = p.numerator, p.denominator
    nums = [math.comb(n, i) * a**i * (b - a) ** (n - i) for i in range(n + 1)]
    return nums, b**n


def binomial_coupling(n: int, p, m: int | None = None, exact: bool | None = None) -> BinomialCoupling:
    """Build the shifted binomial coupling (see BinomialCoupling).

    The default shift is max(1, floor(sqrt(n)/ln(n)^2)).  Exact mode (the
    default up to n = 512) materializes the full joint pmf with integer
    arithmetic; float mode only prepares the residual row samplers.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    p = Fraction(p) if not isinstance(p, float) else p
    pf = float(p)
    if not 0.0 < pf < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    if m is None:
        m = max(1, int(math.isqrt(n) / math.log(n) ** 2)) if n >= 2 else 1
    if m < 1:
        raise ValueError(f"shift m must be >= 1, got {m}")
    if exact is None:
        exact = n <= 512 and isinstance(p, Fraction)

    # Window I = [lo, hi]: integers with pn - sqrt(n) <= i <= pn.
    if isinstance(p, Fraction):
        hi = (p.numerator * n) // p.denominator
        lo = max(0, _ceil_minus_sqrt(p * n, n))
    else:
        hi = math.floor(pf * n)
        lo = max(0, math.ceil(pf * n - math.sqrt(n)))
    shift_upper = hi - m  # J = [lo, shift_upper], possibly empty

    rows: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    joint: dict[tuple[int, int], int] | None = None
    den: int | None = None

    # Residual demand g(j) on I and supply f(i) on I \ J; NW-corner transport.
    if exact:
        nums, den = binomial_pmf(n, Fraction(p))
        joint = {}
        for i in range(n + 1):
            if nums[i] == 0:
                continue
            if i < lo or i > hi:
                joint[(i, i)] = nums[i]
            elif lo <= i <= shift_upper:
                joint[(i, i + m)] = nums[i]
        supply = [(i, nums[i]) for i in range(max(lo, shift_upper + 1), hi + 1) if nums[i] > 0]
        demand = []
        for j in range(lo, hi + 1):
            got = nums[j - m] if lo <= j - m <= shift_upper else 0
            rest = nums[j] - got
            if rest < 0:
                raise ValueError(
                    "infeasible completion: pmf is not nondecreasing across the "
                    f"shift at column {j}"
                )
            if rest > 0:
                demand.append((j, rest))
        si = di = 0
        supply = [list(x) for x in supply]
        demand = [list(x) for x in demand]
        while si < len(supply) and di < len(demand):
            i, have = supply[si]
            j, need = demand[di]
            take = min(have, need)
            joint[(i, j)] = joint.get((i, j), 0) + take
            supply[si][1] -= take
            demand[di][1] -= take
            if supply[si][1] == 0:
                si += 1
            if demand[di][1] == 0:
                di += 1
        assert si == len(supply) and di == len(demand), "transport did not balance"
        for i in range(max(lo, shift_upper + 1), hi + 1):
            cols = sorted(j for (r, j) in joint if r == i)
            weights = np.array([joint[(i, j)] for j in cols], dtype=np.float64)
            if weights.sum() > 0:
                rows[i] = (np.array(cols), np.cumsum(weights / weights.sum()))
    else:
        window = np.arange(lo, hi + 1)
        f = _binomial_pmf_float(n, pf, window)
        demand = f.copy()
        offs = window - m
        inside = (offs >= lo) & (offs <= shift_upper)
        demand[inside] -= f[np.searchsorted(window, offs[inside])]
        demand = np.clip(demand, 0.0, None)
        sup_lo = max(lo, shift_upper + 1)
        si = np.searchsorted(window, sup_lo)
        supply = f[si:].copy()
        sup_idx = window[si:]
        plan_cols: dict[int, list[tuple[int, float]]] = {int(i): [] for i in sup_idx}
        a = b = 0
        while a < len(supply) and b < len(demand):
            take = min(supply[a], demand[b])
            if take > 0:
                plan_cols[int(sup_idx[a])].append((int(window[b]), take))
            supply[a] -= take
            demand[b] -= take
            if supply[a] <= 1e-18:
                a += 1
            if demand[b] <= 1e-18:
                b += 1
        for i, pairs in plan_cols.items():
            if not pairs:
                continue
            cols = np.array([c for c, _ in pairs])
            ws = np.array([w for _, w in pairs])
            rows[i] = (cols, np.cumsum(ws / ws.sum()))

    return BinomialCoupling(n=n, p=p, m=m, window=(lo, hi), shift_upper=shift_upper,
                            joint=joint, den=den, _rows=rows)


def _ceil_minus_sqrt(pn: Fraction, n: int) -> int:
    """Smallest integer i >= 0 with pn - i <= sqrt(n), exactly."""

    def fits(i: int) -> bool:
        diff = pn - i
        return diff <= 0 or diff * diff <= n

    i = max(0, math.ceil(float(pn) - math.sqrt(n)))  # float guess, exact repair
    while not fits(i):
        i += 1
    while i > 0 and fits(i - 1):
        i -= 1
    return i


def _binomial_pmf_float(n: int, p: float, ks: np.ndarray) -> np.ndarray:
    logs = (
        _lgamma_vec(n + 1)
        - _lgamma_vec(ks + 1)
        - _lgamma_vec(n - ks + 1)
        + ks * math.log(p)
        + (n - ks) * math.log1p(-p)
    )
    return np.exp(logs)


def _lgamma_vec(x) -> np.ndarray:
    return np.vectorize(math.lgamma)(np.asarray(x, dtype=np.float64))


# -- bridge and epoch couplings ---------------------------------------------


def _arrangement(gen: np.random.Generator, length: int, ups: int) -> np.ndarray:
    """Uniform arrangement of `ups` +1 steps among `length` increments."""
    inc = np.full(length, -1, dtype=np.int64)
    inc[gen.permutation(length)[:ups]] = 1
    return inc


def _flip_up(gen: np.random.Generator, inc: np.ndarray, flips: int) -> np.ndarray:
    minus = np.flatnonzero(inc < 0)
    if flips > len(minus):
        raise ValueError(f"cannot flip {flips} of {len(minus)} down-steps")
    out = inc.copy()
    out[minus[gen.permutation(len(minus))[:flips]]] = 1
    return out


def bridge_coupling(a: int, b: int, length: int, gen: np.random.Generator
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Couple two +-1 walks with endpoints a <= b so the second stays above.

    Samples a uniform arrangement with endpoint a, then flips (b - a)/2
    uniformly chosen down-steps to +1; partial sums of the second sequence
    dominate those of the first pointwise.
    """
    if (length + a) % 2 or not -length <= a <= length:
        raise ValueError(f"endpoint {a} unreachable in {length} steps")
    if (b - a) % 2 or b < a:
        raise ValueError(f"endpoints need b >= a with even gap, got {a}, {b}")
    if b > length:
        raise ValueError(f"endpoint {b} unreachable in {length} steps")
    inc = _arrangement(gen, length, (length + a) // 2)
    inc2 = _flip_up(gen, inc, (b - a) // 2)
    return inc, inc2


def coupled_increment_pair(gen: np.random.Generator, p: float, steps: int
                           ) -> tuple[np.ndarray, np.ndarray]:
    """Increments of two +-1(p) walks coupled epoch by epoch.

    The first two steps are coupled independently; on each later dyadic
    epoch the endpoint pair comes from the binomial coupling and the paths
    from the bridge when the second endpoint is ahead, independently
    otherwise.
    """
    inc = np.empty(steps, dtype=np.int64)
    inc2 = np.empty(steps, dtype=np.int64)
    head = min(2, steps)
    inc[:head] = np.where(gen.random(head) < p, 1, -1)
    inc2[:head] = np.where(gen.random(head) < p, 1, -1)
    t, n = head, 1
    while t < steps:
        length = 2**n
        take = min(length, steps - t)
        coup = binomial_coupling(length, p, exact=False)
        b1, b2 = coup.sample_pair(gen)
        s1 = _arrangement(gen, length, b1)
        if b2 >= b1:
            s2 = _flip_up(gen, s1, b2 - b1)
        else:
            s2 = _arrangement(gen, length, b2)
        inc[t:t + take] = s1[:take]
        inc2[t:t + take] = s2[:take]
        t += take
        n += 1
    return inc, inc2


def epoch_coupling(p: float, steps: int, seed: int, exponent: float = 4.0,
                   replicate: int = 0) -> tuple[np.ndarray, np.ndarray, CouplingReport]:
    """Couple two +-1(p) walks so the second eventually leads by sqrt(t).

    Returns both trajectories and a report of the gap against the
    threshold sqrt(t)/ln(t)^exponent.
    """
    if steps < 2:
        raise ValueError(f"need at least 2 steps, got {steps}")
    gen = replicate_generator(seed, replicate)
    inc, inc2 = coupled_increment_pair(gen, p, steps)
    x = np.concatenate(([0], np.cumsum(inc)))
    x2 = np.concatenate(([0], np.cumsum(inc2)))
    report = CouplingReport(
        label="epochs",
        horizon=steps,
        gap=x2 - x,
        threshold=_sqrt_log_threshold(steps, exponent),
        extras={"p": float(p), "exponent": exponent},
    )
    return x, x2, report


def _sqrt_log_threshold(steps: int, exponent: float) -> np.ndarray:
    t = np.arange(steps + 1, dtype=np.float64)
    out = np.zeros(steps + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out[2:] = np.sqrt(t[2:]) / np.log(t[2:]) ** exponent
    return out


def _reflected_depths(stays: np.ndarray, inc: np.ndarray) -> np.ndarray:
    """Interleave stay flags with move increments, reflecting at the root."""
    steps = len(stays)
    depths = np.empty(steps + 1, dtype=np.int64)
    depths[0] = 0
    depth = 0
    k = 0
    for t in range(steps):
        if not stays[t]:
            depth = abs(depth + int(inc[k]))
            k += 1
        depths[t + 1] = depth
    return depths


def slowdown_composition(
    schedule: Sequence[PermutationSpec],
    d: int,
    steps: int,
    seed: int,
    gamma=None,
    exponent: float = 4.0,
    replicate: int = 0,
) -> CouplingReport:
    """Couple a lazy walk and the permuted image of an independent-looking
    copy so the image runs ahead by roughly sqrt(t).

    The two walks share their staying times; their move increments are the
    epoch-coupled pair with up-probability (d-1)/d, reflected at the root
    to produce genuine depth processes.  The permuted image is obtained
    from the second walk through the automorphism coupling, so the
    reported gap is depth(image) - depth(first walk), compared against
    sqrt(t)/ln(t)^(2*exponent).
    """
    if d <= 2:
        raise ValueError("the slow-down composition needs d > 2")
    bad = [s.kind for s in schedule if s.kind not in AUTOMORPHISM_KINDS or s.kind == "translation"]
    if bad:
        raise ValueError(f"schedule contains unsupported kinds: {sorted(set(bad))}")
    g = _default_gamma(d, gamma)
    gen = replicate_generator(seed, replicate)
    stays = gen.random(steps) < g
    moves = int(np.sum(~stays))
    p_up = (d - 1) / d
    if moves >= 2:
        inc, inc2 = coupled_increment_pair(gen, p_up, moves)
    else:
        inc = inc2 = np.zeros(moves, dtype=np.int64)
    depths_x = _reflected_depths(stays, inc)
    depths_x2 = _reflected_depths(stays, inc2)

    identity_only = all(s.kind == "identity" for s in schedule)
    if identity_only:
        depths_y = depths_x2
    else:
        depths_y = _shifted_image_depths(gen, d, stays, inc2, schedule)

    gap = depths_y - depths_x
    report = CouplingReport(
        label="slowdown",
        horizon=steps,
        gap=gap,
        threshold=_sqrt_log_threshold(steps, 2 * exponent),
        extras={
            "speed_base": float(depths_x[-1]) / steps,
            "speed_image": float(depths_y[-1]) / steps,
            "exponent": 2 * exponent,
        },
    )
    return report


def _shifted_image_depths(gen, d, stays, inc, schedule) -> np.ndarray:
    """Depths of the composed-automorphism image of a reflected walk.

    Rebuilds positions from the depth increments (fresh uniform child
    choices) and pushes each position through the whole permutation chain.
    Quadratic in the horizon; meant for moderate horizons.
    """
    steps = len(stays)
    path: list[int] = []
    depths = np.empty(steps + 1, dtype=np.int64)
    shifts: list = []
    depths[0] = 0
    k = 0
    for t in range(steps):
        if not stays[t]:
            if not path:
                path.append(int(gen.integers(0, d)))
            elif inc[k] > 0:
                path.append(int(gen.integers(0, d - 1)))
            else:
                path.pop()
            k += 1
        if t < len(schedule):
            shifts.append(schedule[t])
        cur = tuple(path)
        for spec in shifts:
            if spec.kind == "edge_shift":
                cur = spec.apply_path(d, cur)
        depths[t + 1] = len(cur)
    return depths


# -- exceptional times on the line ------------------------------------------


def exceptional_time_experiment(
    steps: int,
    seed: int,
    epoch_length=default_epoch_length,
    replicate: int = 0,
) -> CouplingReport:
    """Run the translation schedule on the line and track the closeness gap.

    The permuted walk is coupled to the plain one by shared increments, so
    its position is exactly the plain walk's minus the composed offset.
    The report records the running maximum of (|X_t| - |Y_t|) over the
    iterated-logarithm envelope, under both the integer envelope and the
    raw sqrt(t loglog t) normalization.
    """
    sched = ExceptionalSchedule.build(steps, epoch_length)
    gen = replicate_generator(seed, replicate)
    x = lazy_signed_walk(gen, 1.0 / 3.0, steps)
    y = x - sched.offsets
    depths_x = np.abs(x)
    depths_y = np.abs(y)
    gap = depths_x - depths_y

    t = np.arange(steps + 1, dtype=np.float64)
    loglog = np.ones(steps + 1)
    big = t >= 16
    loglog[big] = np.log(np.log(t[big]))
    envelope = np.floor(np.sqrt((4.0 / 3.0) * t * loglog))
    envelope[0] = 1.0
    raw = np.sqrt(np.maximum(t, 1.0) * loglog)

    ratio_env = gap[1:] / envelope[1:]
    ratio_raw = gap[1:] / raw[1:]
    running = np.maximum.accumulate(ratio_env)
    exact_identity = bool(np.all(np.abs(y + sched.offsets) == depths_x))
    report = CouplingReport(
        label="exceptional-times",
        horizon=steps,
        gap=gap,
        threshold=None,
        extras={
            "max_envelope_ratio": float(running[-1]),
            "argmax_time": int(np.argmax(ratio_env) + 1),
            "max_raw_ratio": float(np.max(ratio_raw)),
            "coupling_identity_exact": exact_identity,
            "envelope_at_argmax": float(envelope[np.argmax(ratio_env) + 1]),
        },
        series={"depths_x": depths_x, "depths_y": depths_y, "envelope": envelope},
    )
    return report


def write_trace_csv(path: str, depths_x: np.ndarray, depths_y: np.ndarray | None = None,
                    envelope: np.ndarray | None = None) -> None:
    """Trace export: columns t, depth_X[, depth_Y, gap][, phi_t]."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        header = ["t", "depth_X"]
        if depths_y is not None:
            header += ["depth_Y", "gap"]
        if envelope is not None:
            header += ["phi_t"]
        writer.writerow(header)
        for t in range(len(depths_x)):
            row = [t, int(depths_x[t])]
            if depths_y is not None:
                row += [int(depths_y[t]), int(depths_x[t]) - int(depths_y[t])]
            if envelope is not None:
                row += [int(envelope[t])]
            writer.writerow(row)
