"""Finite-level checks of the structural claims about Keane's maps.

Every check runs on a depth-``K`` truncation and is exact.  Claim ids:

    L1    lambda3(I_2^(k)) / lambda3(I^(k)) <= 2 m_k / ((n_{k+1}+1)(n_k+1))
    L2    lambda2(I_2^(k)) / lambda2(I^(k)) >= 1/3
    L5    lambda2(I_2^(k)) / lambda2(I^(k)) >  k^2 / (k^2 + 4)   (needs m_j >= j^2 n_j)
    L7    lambda3(I_1^(k)) >= lambda3(I_3^(k+1))
    L7B   lambda3(I^(k)) >= 1 / b_{k,2}
    DOM   b_{k,2} >= b_{k,i} for i = 1, 3, 4
    MASS  b_{k,2} * lambda2(I_2^(k)) >= 1/3
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .iet import DEFAULT_STEP_BUDGET, IetMap, InducedMap
from .keane import (KEANE_PERMUTATION, ParamSeq, SequenceError, column_mass,
                    keane_matrix, length_vector, level_masses, level_weights,
                    product_matrix)
from .numerics import Mat4, column, decimal_str, int_str, rat_str

CLAIMS = ("L1", "L2", "L5", "L7", "L7B", "DOM", "MASS")


class PreconditionError(ValueError):
    pass


class SegmentSplitError(RuntimeError):
    """An image of I_2^(k) straddled a discontinuity inside its return cycle."""


def _need_levels(seq: ParamSeq, k: int, K: int, lowest: int = 1):
    if K > seq.depth:
        raise PreconditionError(f"truncation depth K={K} exceeds sequence depth {seq.depth}")
    if k < lowest or k + 2 > K:
        raise PreconditionError(f"level k={k} needs {lowest} <= k <= K-2 (K={K})")


# -- the tower of induced maps ----------------------------------------------------


@dataclass
class TowerLevel:
    k: int
    iet: IetMap          # level-k map in original coordinates, spatial order
    reversed: bool       # names run right-to-left
    visit_matrix: Optional[Mat4] = None  # rows: level k-1 names, cols: level k names

    def spatial(self, name: int) -> int:
        """0-based spatial index of the subinterval called I_name^(k)."""
        return 4 - name if self.reversed else name - 1

    def subinterval(self, name: int) -> Tuple[Fraction, Fraction]:
        j = self.spatial(name)
        return self.iet.left[j], self.iet.lengths[j]

    def named_lengths(self) -> Tuple[Fraction, ...]:
        return tuple(self.subinterval(i)[1] for i in range(1, 5))


class KeaneTower:
    """The depth-K Keane map and its successive first returns to I_4^(k).

    Each induced map is renamed in reverse spatial order relative to the
    frame of the map it came from, which amounts to a reflection; in the
    original coordinates the naming direction therefore alternates.
    """

    def __init__(self, seq: ParamSeq, K: int, step_budget: int = DEFAULT_STEP_BUDGET):
        if not 2 <= K <= seq.depth:
            raise PreconditionError(f"need 2 <= K <= {seq.depth}, got K={K}")
        self.seq = seq
        self.K = K
        self.step_budget = step_budget
        self.steps = 0
        base = IetMap(length_vector(seq, K), KEANE_PERMUTATION)
        self.levels: List[TowerLevel] = [TowerLevel(0, base, False)]

    @property
    def base(self) -> IetMap:
        return self.levels[0].iet

    def level(self, k: int) -> TowerLevel:
        if not 0 <= k <= self.K - 2:
            raise PreconditionError(f"tower levels run over 0..{self.K - 2}, got {k}")
        while len(self.levels) <= k:
            self._grow()
        return self.levels[k]

    def _grow(self):
        prev = self.levels[-1]
        a, length = prev.subinterval(4)
        induced: InducedMap = prev.iet.induce(
            a, a + length, step_budget=self.step_budget - self.steps)
        self.steps += induced.steps
        if len(induced.lengths) != 4:
            raise SegmentSplitError(
                f"level {prev.k + 1} first return has {len(induced.lengths)} pieces, expected 4")
        nxt = TowerLevel(prev.k + 1, induced.as_iet(), not prev.reversed)
        raw = induced.visit_matrix
        nxt.visit_matrix = tuple(
            tuple(raw[prev.spatial(i)][nxt.spatial(j)] for j in range(1, 5))
            for i in range(1, 5))
        expected = level_masses(self.seq, nxt.k, self.K, 3)
        if nxt.named_lengths() != expected:
            raise SegmentSplitError(
                f"level {nxt.k} lengths disagree with the tail-product formula")
        self.levels.append(nxt)


# -- landing pattern ----------------------------------------------------------------


@dataclass(frozen=True)
class LandingReport:
    k: int
    K: int
    observed: Mat4
    expected: Mat4
    mismatches: Tuple[Tuple[int, int, int, int], ...]  # (row, col, observed, expected)

    @property
    def holds(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "k": self.k, "K": self.K, "holds": self.holds,
            "observed": [[int_str(x) for x in row] for row in self.observed],
            "expected": [[int_str(x) for x in row] for row in self.expected],
            "mismatches": [list(m) for m in self.mismatches],
        }


def verify_landing_pattern(seq: ParamSeq, K: int, k: int,
                           step_budget: int = DEFAULT_STEP_BUDGET,
                           tower: Optional[KeaneTower] = None) -> LandingReport:
    _need_levels(seq, k, K)
    tower = tower or KeaneTower(seq, K, step_budget)
    observed = tower.level(k).visit_matrix
    expected = keane_matrix(seq.m(k), seq.n(k))
    bad = tuple((i + 1, j + 1, observed[i][j], expected[i][j])
                for i in range(4) for j in range(4) if observed[i][j] != expected[i][j])
    return LandingReport(k, K, observed, expected, bad)


# -- inequality claims -----------------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    """One exact inequality check.

    ``margin`` is the signed slack: ``rhs - lhs`` for ``<=`` / ``<`` and
    ``lhs - rhs`` for ``>=`` / ``>``, so a claim holds iff the margin is
    non-negative (positive for strict relations).
    """

    claim: str
    kind: str
    k: int
    K: Optional[int]
    lhs: Fraction
    relation: str
    rhs: Fraction
    applicable: bool = True
    note: str = ""

    @property
    def margin(self) -> Fraction:
        if self.relation in ("<=", "<"):
            return Fraction(self.rhs - self.lhs)
        return Fraction(self.lhs - self.rhs)

    @property
    def holds(self) -> bool:
        if not self.applicable:
            return True
        if self.relation in (">", "<"):
            return self.margin > 0
        return self.margin >= 0

    def to_json(self) -> dict:
        return {
            "claim": self.claim, "sequence": self.kind, "k": self.k, "K": self.K,
            "lhs": rat_str(self.lhs), "relation": self.relation, "rhs": rat_str(self.rhs),
            "lhs_decimal": decimal_str(self.lhs), "rhs_decimal": decimal_str(self.rhs),
            "margin": rat_str(self.margin), "holds": self.holds,
            "applicable": self.applicable, "note": self.note,
        }

    def csv_row(self) -> list:
        return [self.claim, self.kind, self.k, "" if self.K is None else self.K,
                self.holds, decimal_str(self.lhs), decimal_str(self.rhs),
                rat_str(self.lhs), rat_str(self.rhs)]


CSV_HEADER = ["claim", "sequence", "k", "K", "holds", "lhs_decimal", "rhs_decimal",
              "lhs", "rhs"]


def verify_claim(claim: str, seq: ParamSeq, k: int, K: int) -> VerificationReport:
    if claim not in CLAIMS:
        raise PreconditionError(f"unknown claim {claim!r}")
    if claim == "DOM":
        if not 0 <= k <= seq.depth:
            raise PreconditionError(f"level {k} outside 0..{seq.depth}")
        b = [column_mass(seq, k, i) for i in range(1, 5)]
        others = max(b[0], b[2], b[3])
        return VerificationReport("DOM", seq.kind, k, K, Fraction(b[1]), ">=", Fraction(others),
                                  note=f"b = {[int_str(x) for x in b]}")

    _need_levels(seq, k, K, lowest=0 if claim in ("MASS", "L7", "L7B") else 1)
    if claim == "L1":
        if k + 1 > seq.depth:
            raise PreconditionError("L1 needs n_{k+1}")
        lhs = level_weights(seq, k, K, 3)[1]
        rhs = Fraction(2 * seq.m(k), (seq.n(k + 1) + 1) * (seq.n(k) + 1))
        return VerificationReport("L1", seq.kind, k, K, lhs, "<=", rhs)
    if claim == "L2":
        return VerificationReport("L2", seq.kind, k, K, level_weights(seq, k, K, 2)[1],
                                  ">=", Fraction(1, 3))
    if claim == "L5":
        lhs = level_weights(seq, k, K, 2)[1]
        rhs = Fraction(k * k, k * k + 4)
        failing = [j for j in range(1, K + 1) if seq.m(j) < j * j * seq.n(j)]
        if failing:
            return VerificationReport("L5", seq.kind, k, K, lhs, ">", rhs, applicable=False,
                                      note=f"m_j >= j^2 n_j fails at j = {failing}")
        return VerificationReport("L5", seq.kind, k, K, lhs, ">", rhs)
    if claim == "L7":
        lhs = level_masses(seq, k, K, 3)[0]
        rhs = level_masses(seq, k + 1, K, 3)[2]
        return VerificationReport("L7", seq.kind, k, K, lhs, ">=", rhs)
    if claim == "L7B":
        lhs = sum(level_masses(seq, k, K, 3))
        rhs = Fraction(1, column_mass(seq, k, 2))
        return VerificationReport("L7B", seq.kind, k, K, lhs, ">=", rhs)
    # MASS
    lhs = column_mass(seq, k, 2) * level_masses(seq, k, K, 2)[1]
    return VerificationReport("MASS", seq.kind, k, K, lhs, ">=", Fraction(1, 3))


def verify_suite(seq: ParamSeq, K: int, claims: Sequence[str],
                 levels: Optional[Sequence[int]] = None) -> List[VerificationReport]:
    """All (claim, k) pairs in deterministic (claim order, k) order."""
    levels = list(levels) if levels is not None else list(range(1, K - 1))
    return [verify_claim(c, seq, k, K) for c in claims for k in levels]


# -- orbit geometry ----------------------------------------------------------------


@dataclass
class OrbitGeometry:
    """Images T^s(I_2^(k)), 0 <= s < b_{k,2}, on the grid 1/den."""

    k: int
    K: int
    den: int
    image_length: int
    positions: object              # sorted grid ints (list or int64 array)
    min_gap: Optional[int]
    min_other: Fraction            # min over i != 2 of lambda3(I_i^(k))
    visits: Tuple[int, ...]
    expected_visits: Tuple[int, ...]
    backend: str = "python"

    @property
    def count(self) -> int:
        return len(self.positions)

    @property
    def disjoint(self) -> bool:
        return self.min_gap is None or self.min_gap >= 0

    @property
    def separated(self) -> bool:
        """Every gap holds at least one full other subinterval's length."""
        return self.min_gap is None or Fraction(self.min_gap, self.den) >= self.min_other

    @property
    def holds(self) -> bool:
        return self.disjoint and self.separated and self.visits == self.expected_visits

    def gaps(self) -> list:
        p = self.positions
        return [int(p[i + 1]) - int(p[i]) - self.image_length for i in range(len(p) - 1)]

    def to_json(self, max_positions: int = 20_000) -> dict:
        out = {
            "k": self.k, "K": self.K, "count": int_str(self.count),
            "image_length": rat_str(Fraction(self.image_length, self.den)),
            "min_gap": None if self.min_gap is None else rat_str(Fraction(self.min_gap, self.den)),
            "min_other_length": rat_str(self.min_other),
            "min_gap_decimal": None if self.min_gap is None else decimal_str(Fraction(self.min_gap, self.den)),
            "min_other_decimal": decimal_str(self.min_other),
            "disjoint": self.disjoint, "separated": self.separated,
            "visits": [int_str(x) for x in self.visits],
            "expected_visits": [int_str(x) for x in self.expected_visits],
            "holds": self.holds,
        }
        if self.count <= max_positions:
            out["positions"] = [rat_str(Fraction(int(x), self.den)) for x in self.positions]
        return out


def orbit_geometry(seq: ParamSeq, K: int, k: int, step_budget: int = DEFAULT_STEP_BUDGET,
                   tower: Optional[KeaneTower] = None) -> OrbitGeometry:
    _need_levels(seq, k, K, lowest=0)
    b = column_mass(seq, k, 2)
    if b > step_budget:
        raise PreconditionError(f"b_(k,2) = {b} exceeds the step budget {step_budget}")
    tower = tower or KeaneTower(seq, K, step_budget)
    left, length = tower.level(k).subinterval(2)
    g = tower.base.grid()
    c, ln = g.to_grid(left), g.to_grid(length)
    positions, visits, split_at = kernels.segment_orbit(g.left, g.shift, g.hi, c, ln, b)
    if split_at >= 0:
        raise SegmentSplitError(f"image of I_2^({k}) split at time {split_at}")
    if isinstance(positions, np.ndarray):
        positions = np.sort(positions)
        min_gap = int((np.diff(positions) - ln).min()) if len(positions) > 1 else None
    else:
        positions = sorted(positions)
        gaps = [q - p - ln for p, q in zip(positions, positions[1:])]
        min_gap = min(gaps) if gaps else None
    masses = level_masses(seq, k, K, 3)
    return OrbitGeometry(
        k, K, g.den, ln, positions, min_gap,
        min(masses[0], masses[2], masses[3]),
        tuple(int(v) for v in visits),
        column(product_matrix(seq, k), 2),
        kernels.active_backend(g.hi, g.lo),
    )


# -- ergodicity gap ------------------------------------------------------------------------


@dataclass(frozen=True)
class ErgodicityGap:
    K: int
    freq2: Fraction   # share of time the I_2^(K) tower spends in I_2
    freq3: Fraction   # same for the I_3^(K) tower

    def to_json(self) -> dict:
        return {"K": self.K, "freq2": rat_str(self.freq2), "freq3": rat_str(self.freq3),
                "freq2_decimal": decimal_str(self.freq2),
                "freq3_decimal": decimal_str(self.freq3),
                "gap": rat_str(self.freq2 - self.freq3)}


def ergodicity_gap(seq: ParamSeq, K: int) -> ErgodicityGap:
    if not 1 <= K <= seq.depth:
        raise PreconditionError(f"K={K} outside 1..{seq.depth}")
    bk = product_matrix(seq, K)
    c2, c3 = column(bk, 2), column(bk, 3)
    return ErgodicityGap(K, Fraction(c2[1], sum(c2)), Fraction(c3[1], sum(c3)))
