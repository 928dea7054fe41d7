"""Interval exchange transformations with exact rational lengths.

A map is stored by its interval lengths and a permutation in the convention
of the translation formula: ``permutation[j-1]`` is the position that
interval ``j`` occupies after the exchange, so for ``x`` in ``I_j``::

    T(x) = x - sum(l_k for k < j) + sum(l_k for pi(k) < pi(j))

Every breakpoint is a multiple of ``1/denominator``; orbit code works on the
integer numerators (see :class:`Grid`) so that applying ``T`` is one integer
addition and points never change denominator.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import List, NamedTuple, Optional, Sequence, Tuple

from . import kernels
from .numerics import int_str, rat_str

DEFAULT_STEP_BUDGET = 50_000_000
DEFAULT_MAX_PIECES = 16


class IetError(ValueError):
    """Invalid IET data or an out-of-domain point."""


class InductionBudgetError(RuntimeError):
    """The first-return computation ran out of steps.

    ``steps`` is the number of steps spent, ``completed`` the pieces already
    known to return as ``(left, length, return_time)`` triples.
    """

    def __init__(self, message, steps, completed):
        super().__init__(message)
        self.steps = steps
        self.completed = completed


class TooManyPiecesError(RuntimeError):
    pass


class Grid(NamedTuple):
    """Integer picture of a map: every coordinate multiplied by ``den``."""

    den: int
    lo: int
    hi: int
    left: Tuple[int, ...]
    lengths: Tuple[int, ...]
    shift: Tuple[int, ...]

    def to_grid(self, x: Fraction) -> int:
        v = Fraction(x) * self.den
        if v.denominator != 1:
            raise IetError(f"{x} is not on the grid 1/{self.den}")
        return v.numerator

    def from_grid(self, v: int) -> Fraction:
        return Fraction(v, self.den)


def _check_permutation(perm: Sequence[int], n: int) -> Tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if len(perm) != n or sorted(perm) != list(range(1, n + 1)):
        raise IetError(f"{perm} is not a permutation of 1..{n}")
    return perm


@dataclass(frozen=True)
class IetMap:
    lengths: Tuple[Fraction, ...]
    permutation: Tuple[int, ...]
    lo: Fraction = Fraction(0)

    def __post_init__(self):
        lengths = tuple(Fraction(x) for x in self.lengths)
        if not lengths:
            raise IetError("an IET needs at least one interval")
        if any(x <= 0 for x in lengths):
            raise IetError(f"all lengths must be positive, got {[rat_str(x) for x in lengths]}")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "permutation", _check_permutation(self.permutation, len(lengths)))
        object.__setattr__(self, "lo", Fraction(self.lo))

    @property
    def n(self) -> int:
        return len(self.lengths)

    @cached_property
    def hi(self) -> Fraction:
        return self.lo + sum(self.lengths)

    @cached_property
    def left(self) -> Tuple[Fraction, ...]:
        """Left endpoints of I_1 .. I_n."""
        out, c = [], self.lo
        for x in self.lengths:
            out.append(c)
            c += x
        return tuple(out)

    @cached_property
    def image_left(self) -> Tuple[Fraction, ...]:
        """Left endpoint of T(I_j) for each j."""
        order = sorted(range(self.n), key=lambda j: self.permutation[j])
        out = [Fraction(0)] * self.n
        c = self.lo
        for j in order:
            out[j] = c
            c += self.lengths[j]
        return tuple(out)

    @cached_property
    def shifts(self) -> Tuple[Fraction, ...]:
        return tuple(i - l for i, l in zip(self.image_left, self.left))

    @cached_property
    def denominator(self) -> int:
        """Common denominator of all breakpoints."""
        return math.lcm(*(x.denominator for x in self.lengths + (self.lo,)))

    @cached_property
    def _grid(self) -> Grid:
        return self._make_grid(self.denominator)

    def grid(self, scale: int = 1) -> Grid:
        if scale == 1:
            return self._grid
        return self._make_grid(self.denominator * scale)

    def grid_for(self, *points: Fraction) -> Grid:
        """Smallest grid holding the breakpoints and ``points``."""
        den = math.lcm(self.denominator, *(Fraction(p).denominator for p in points))
        return self.grid(den // self.denominator)

    def _make_grid(self, den: int) -> Grid:
        def g(x):
            return (x * den).numerator

        return Grid(
            den,
            g(self.lo),
            g(self.hi),
            tuple(g(x) for x in self.left),
            tuple(g(x) for x in self.lengths),
            tuple(g(x) for x in self.shifts),
        )

    # -- evaluation -------------------------------------------------------

    def _check_point(self, x: Fraction) -> Fraction:
        x = Fraction(x)
        if not self.lo <= x < self.hi:
            raise IetError(f"point {x} outside [{self.lo}, {self.hi})")
        return x

    def index(self, x: Fraction) -> int:
        """The 1-based j with x in I_j."""
        x = self._check_point(x)
        return bisect_right(self.left, x)

    def apply(self, x: Fraction) -> Fraction:
        x = self._check_point(x)
        return x + self.shifts[bisect_right(self.left, x) - 1]

    def apply_inverse(self, y: Fraction) -> Fraction:
        y = self._check_point(y)
        for j in range(self.n):
            if self.image_left[j] <= y < self.image_left[j] + self.lengths[j]:
                return y - self.shifts[j]
        raise AssertionError("image intervals do not cover the domain")

    def itinerary(self, x: Fraction, n: int) -> List[Tuple[int, Fraction]]:
        """``[(j_0, x_0), ..., (j_{n-1}, x_{n-1})]`` with x_0 = x."""
        if n < 0:
            raise IetError("itinerary length must be non-negative")
        out = []
        for _ in range(n):
            j = self.index(x)
            out.append((j, x))
            x = x + self.shifts[j - 1]
        return out

    def visit_counts(self, x: Fraction, n: int) -> Tuple[int, ...]:
        counts = [0] * self.n
        for j, _ in self.itinerary(x, n):
            counts[j - 1] += 1
        return tuple(counts)

    def breakpoints(self) -> Tuple[Fraction, ...]:
        """Interior discontinuities (left endpoints of I_2 .. I_n)."""
        return self.left[1:]

    def induce(self, a: Fraction, b: Fraction, step_budget: int = DEFAULT_STEP_BUDGET,
               max_pieces: int = DEFAULT_MAX_PIECES) -> "InducedMap":
        return induce(self, a, b, step_budget, max_pieces)

    def to_json(self) -> dict:
        return {
            "lo": rat_str(self.lo),
            "lengths": [rat_str(x) for x in self.lengths],
            "permutation": list(self.permutation),
        }


def build_iet(lengths: Sequence[Fraction], perm: Sequence[int]) -> IetMap:
    """A 4-interval exchange of [0, 1); lengths must be positive and sum to 1."""
    if len(lengths) != 4:
        raise IetError(f"expected 4 lengths, got {len(lengths)}")
    lengths = tuple(Fraction(x) for x in lengths)
    if sum(lengths) != 1:
        raise IetError(f"lengths sum to {rat_str(sum(lengths))}, not 1")
    return IetMap(lengths, perm)


# -- first return ------------------------------------------------------------


@dataclass(frozen=True)
class InducedMap:
    """First-return map of an IET to ``[a, b)``, pieces in spatial order.

    ``visit_matrix[i][j]`` counts the visits of piece ``j`` to ambient
    interval ``I_{i+1}`` at times 0 .. r_j - 1, so column sums are the
    return times.
    """

    base: Tuple[Fraction, Fraction]
    endpoints: Tuple[Fraction, ...]
    lengths: Tuple[Fraction, ...]
    return_times: Tuple[int, ...]
    visit_matrix: Tuple[Tuple[int, ...], ...]
    shifts: Tuple[Fraction, ...]
    permutation: Tuple[int, ...]
    steps: int

    def as_iet(self) -> IetMap:
        return IetMap(self.lengths, self.permutation, lo=self.base[0])

    def to_json(self) -> dict:
        return {
            "base": [rat_str(x) for x in self.base],
            "endpoints": [rat_str(x) for x in self.endpoints],
            "lengths": [rat_str(x) for x in self.lengths],
            "return_times": list(self.return_times),
            "visit_matrix": [list(row) for row in self.visit_matrix],
            "permutation": list(self.permutation),
            "steps": int_str(self.steps),
        }


def induce(t: IetMap, a: Fraction, b: Fraction, step_budget: int = DEFAULT_STEP_BUDGET,
           max_pieces: int = DEFAULT_MAX_PIECES) -> InducedMap:
    """Exact first-return map of ``t`` on ``[a, b)`` by segment propagation.

    The whole interval is pushed forward, splitting at discontinuities and at
    ``a`` and ``b``, until every piece has come back.
    """
    a, b = Fraction(a), Fraction(b)
    if not t.lo <= a < b <= t.hi:
        raise IetError(f"need {t.lo} <= a < b <= {t.hi}, got a={a}, b={b}")
    g = t.grid_for(a, b)
    A, B = g.to_grid(a), g.to_grid(b)
    n = t.n

    # (current position, length, origin, counts, time)
    pending = [(A, B - A, A, (0,) * n, 0)]
    done = []
    spent = 0
    while pending:
        c, length, origin, counts, time = pending.pop()
        c, steps, status, delta = kernels.advance(
            g.left, g.shift, g.hi, c, length, A, B, step_budget - spent)
        spent += steps
        time += steps
        counts = tuple(x + int(y) for x, y in zip(counts, delta))
        if status == kernels.RETURNED:
            done.append((origin, length, time, counts, c))
        elif status == kernels.STRADDLE:
            for lo_, hi_ in _cut(c, c + length, (A, B)):
                start = origin + lo_ - c
                if A <= lo_ and hi_ <= B:
                    done.append((start, hi_ - lo_, time, counts, lo_))
                else:
                    pending.append((lo_, hi_ - lo_, start, counts, time))
        elif status == kernels.SPLIT_DOMAIN:
            for lo_, hi_ in _cut(c, c + length, g.left[1:]):
                pending.append((lo_, hi_ - lo_, origin + lo_ - c, counts, time))
        else:
            partial = [(g.from_grid(o), Fraction(ln, g.den), r) for o, ln, r, _, _ in sorted(done)]
            raise InductionBudgetError(
                f"step budget {step_budget} exhausted after {spent} steps "
                f"with {len(done)} pieces returned", spent, partial)

    pieces = _merge(sorted(done))
    if len(pieces) > max_pieces:
        raise TooManyPiecesError(
            f"first return map has {len(pieces)} pieces (limit {max_pieces})")
    total = sum(p[1] for p in pieces)
    assert total == B - A, "induced pieces do not tile the base"

    images = [p[4] for p in pieces]
    order = sorted(range(len(pieces)), key=lambda j: images[j])
    perm = [0] * len(pieces)
    for pos, j in enumerate(order):
        perm[j] = pos + 1
    return InducedMap(
        base=(a, b),
        endpoints=tuple(g.from_grid(p[0]) for p in pieces),
        lengths=tuple(Fraction(p[1], g.den) for p in pieces),
        return_times=tuple(p[2] for p in pieces),
        visit_matrix=tuple(tuple(p[3][i] for p in pieces) for i in range(n)),
        shifts=tuple(Fraction(p[4] - p[0], g.den) for p in pieces),
        permutation=tuple(perm),
        steps=spent,
    )


def _cut(lo: int, hi: int, cuts) -> List[Tuple[int, int]]:
    points = sorted({c for c in cuts if lo < c < hi})
    edges = [lo, *points, hi]
    return list(zip(edges, edges[1:]))


def _merge(pieces):
    """Join neighbours that share return time, itinerary counts and translation."""
    out = []
    for origin, length, time, counts, image in pieces:
        if out:
            o, ln, r, cn, im = out[-1]
            if o + ln == origin and r == time and cn == counts and im + ln == image:
                out[-1] = (o, ln + length, r, cn, im)
                continue
        out.append((origin, length, time, counts, image))
    return out
