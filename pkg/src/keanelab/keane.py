"""Keane's family: the matrices A_{m,n}, their products and parameter sequences.

Levels ``k`` and basis indices are 1-based like the matrices they index.
A depth-``K`` truncation replaces the infinite product by its first ``K``
factors; lengths of the level-``k`` subintervals are then proportional to
``A_{k+1} ... A_K e_3`` and the singular weights to ``A_{k+1} ... A_K e_2``
(both follow from ``lambda(I_i) = sum_j (B_k)_{ij} lambda(I_j^(k))``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from .numerics import (Mat4, Vec4, basis, column, identity, int_str, l1_norm,
                       mat_mul, mat_vec, normalize, parse_int, parse_rat, rat_str)

# Formula-convention permutation of the Keane map: pi(1)=3, pi(2)=2, pi(3)=4,
# pi(4)=1, so the image reads I_4 I_2 I_1 I_3 left to right.
KEANE_PERMUTATION = (3, 2, 4, 1)

DEFAULT_BIT_BUDGET = 1_000_000
KINDS = ("minimal", "theorem4", "theorem3", "corollary1", "explicit")


class SequenceError(ValueError):
    pass


class BitBudgetError(SequenceError):
    def __init__(self, message, k):
        super().__init__(message)
        self.k = k


def keane_matrix(m: int, n: int) -> Mat4:
    if m < 1 or n < 1:
        raise SequenceError(f"A_(m,n) needs m, n >= 1, got m={m}, n={n}")
    return (
        (0, 0, 1, 1),
        (m - 1, m, 0, 0),
        (n, n, n - 1, n),
        (1, 1, 1, 1),
    )


@dataclass(frozen=True)
class ParamSeq:
    """Finite sequence of pairs (m_k, n_k), k = 1 .. depth."""

    pairs: Tuple[Tuple[int, int], ...]
    kind: str = "explicit"
    r: Optional[Fraction] = field(default=None, compare=False)

    def __post_init__(self):
        pairs = tuple((int(m), int(n)) for m, n in self.pairs)
        if not pairs:
            raise SequenceError("a parameter sequence needs at least one pair")
        bad = [k for k, (m, n) in enumerate(pairs, 1) if m < 1 or n < 1]
        if bad:
            raise SequenceError(f"m_k, n_k must be positive (offending k: {bad})")
        if self.kind not in KINDS:
            raise SequenceError(f"unknown sequence kind {self.kind!r}")
        object.__setattr__(self, "pairs", pairs)

    @property
    def depth(self) -> int:
        return len(self.pairs)

    def m(self, k: int) -> int:
        return self.pairs[self._idx(k)][0]

    def n(self, k: int) -> int:
        return self.pairs[self._idx(k)][1]

    def _idx(self, k):
        if not 1 <= k <= self.depth:
            raise SequenceError(f"level {k} outside 1..{self.depth}")
        return k - 1

    def to_json(self) -> dict:
        out = {
            "pairs": [[int_str(m), int_str(n)] for m, n in self.pairs],
            "kind": self.kind,
            "depth": int_str(self.depth),
        }
        if self.r is not None:
            out["r"] = rat_str(self.r)
        return out

    @classmethod
    def from_json(cls, doc: dict) -> "ParamSeq":
        pairs = tuple((parse_int(m), parse_int(n)) for m, n in doc["pairs"])
        seq = cls(pairs, doc.get("kind", "explicit"),
                  parse_rat(doc["r"]) if doc.get("r") is not None else None)
        if "depth" in doc and parse_int(doc["depth"]) != seq.depth:
            raise SequenceError("depth does not match the number of pairs")
        return seq


# -- products --------------------------------------------------------------


@lru_cache(maxsize=4096)
def _product(pairs: Tuple[Tuple[int, int], ...], start: int, stop: int) -> Mat4:
    """A_{start+1} ... A_{stop} over 0-based slice ``pairs[start:stop]``."""
    if start == stop:
        return identity()
    if stop - start == 1:
        return keane_matrix(*pairs[start])
    mid = (start + stop) // 2
    return mat_mul(_product(pairs, start, mid), _product(pairs, mid, stop))


def _check_level(seq: ParamSeq, k: int, lo: int = 0):
    if not lo <= k <= seq.depth:
        raise SequenceError(f"level {k} outside {lo}..{seq.depth}")


def product_matrix(seq: ParamSeq, k: int) -> Mat4:
    """B_k = A_{m_1,n_1} ... A_{m_k,n_k}; B_0 is the identity."""
    _check_level(seq, k)
    return _product(seq.pairs, 0, k)


def tail_product(seq: ParamSeq, k: int, K: int) -> Mat4:
    """A_{m_{k+1},n_{k+1}} ... A_{m_K,n_K}."""
    if not 0 <= k <= K <= seq.depth:
        raise SequenceError(f"need 0 <= k <= K <= {seq.depth}, got k={k}, K={K}")
    return _product(seq.pairs, k, K)


def column_mass(seq: ParamSeq, k: int, i: int) -> int:
    """b_{k,i}: l1 norm of column i of B_k (return time of I_i^(k))."""
    return l1_norm(column(product_matrix(seq, k), i))


def mass_bounds(seq: ParamSeq, k: int) -> Tuple[int, int]:
    """(prod m_i, prod (m_i + n_i + 1)) over i <= k; these sandwich b_{k,2}."""
    _check_level(seq, k, lo=1)
    lower, upper = 1, 1
    for m, n in seq.pairs[:k]:
        lower *= m
        upper *= m + n + 1
    return lower, upper


def length_vector(seq: ParamSeq, K: int) -> Vec4:
    """normalize(B_K e_3): interval lengths of the depth-K truncated map."""
    if K < 2:
        raise SequenceError("K must be at least 2: B_1 e_3 has a zero second entry")
    _check_level(seq, K)
    return normalize(mat_vec(product_matrix(seq, K), basis(3)))


def level_weights(seq: ParamSeq, k: int, K: int, which: int) -> Vec4:
    """Depth-K proportions of I_1^(k) .. I_4^(k) inside I^(k).

    ``which`` is 3 for Lebesgue measure and 2 for the singular measure.
    """
    if which not in (2, 3):
        raise SequenceError("basis must be 2 or 3")
    if not 0 <= k < K <= seq.depth:
        raise SequenceError(f"need 0 <= k < K <= {seq.depth}, got k={k}, K={K}")
    return normalize(mat_vec(tail_product(seq, k, K), basis(which)))


def level_masses(seq: ParamSeq, k: int, K: int, which: int) -> Vec4:
    """Measures of I_1^(k) .. I_4^(k) in [0, 1) at depth K (not renormalized)."""
    tail = mat_vec(tail_product(seq, k, K), basis(which))
    total = l1_norm(mat_vec(product_matrix(seq, K), basis(which)))
    return tuple(Fraction(x, total) for x in tail)


@dataclass(frozen=True)
class LevelData:
    k: int
    K: int
    masses: Tuple[int, int, int, int]
    lebesgue_weights: Vec4
    singular_weights: Vec4

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "K": self.K,
            "b": [int_str(x) for x in self.masses],
            "lambda3_weights": [rat_str(x) for x in self.lebesgue_weights],
            "lambda2_weights": [rat_str(x) for x in self.singular_weights],
        }


def level_data(seq: ParamSeq, k: int, K: int) -> LevelData:
    return LevelData(
        k, K,
        tuple(column_mass(seq, k, i) for i in range(1, 5)),
        level_weights(seq, k, K, 3),
        level_weights(seq, k, K, 2),
    )


# -- validation ----------------------------------------------------------------


@dataclass(frozen=True)
class LevelCheck:
    k: int
    lower_ok: bool            # 3(n_k + 1) <= m_k
    upper_ok: Optional[bool]  # m_k <= (n_{k+1} + 1)/2; None at the last level
    lower_slack: int
    upper_slack: Optional[Fraction]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "lower": {"holds": self.lower_ok, "slack": int_str(self.lower_slack)},
            "upper": None if self.upper_ok is None else {
                "holds": self.upper_ok, "slack": rat_str(self.upper_slack)},
        }


@dataclass(frozen=True)
class SequenceValidation:
    n1: int
    n1_ok: bool
    levels: Tuple[LevelCheck, ...]

    @property
    def ratios_ok(self) -> bool:
        return all(c.lower_ok and c.upper_ok is not False for c in self.levels)

    @property
    def ok(self) -> bool:
        return self.n1_ok and self.ratios_ok

    def to_json(self) -> dict:
        return {
            "n1": int_str(self.n1),
            "n1_at_least_10": self.n1_ok,
            "levels": [c.to_json() for c in self.levels],
            "ratios_hold": self.ratios_ok,
            "holds": self.ok,
        }


def validate_sequence(seq: ParamSeq) -> SequenceValidation:
    """Keane's conditions 3(n_k+1) <= m_k <= (n_{k+1}+1)/2 and n_1 >= 10."""
    levels = []
    for k in range(1, seq.depth + 1):
        m, n = seq.m(k), seq.n(k)
        lower_slack = m - 3 * (n + 1)
        if k < seq.depth:
            upper_slack = Fraction(seq.n(k + 1) + 1, 2) - m
            upper_ok = upper_slack >= 0
        else:
            upper_slack, upper_ok = None, None
        levels.append(LevelCheck(k, lower_slack >= 0, upper_ok, lower_slack, upper_slack))
    return SequenceValidation(seq.n(1), seq.n(1) >= 10, tuple(levels))


# -- generators ------------------------------------------------------------------


def _budget(value: int, k: int, bit_budget: int) -> int:
    if value.bit_length() > bit_budget:
        raise BitBudgetError(
            f"parameter at level {k} needs {value.bit_length()} bits "
            f"(budget {bit_budget})", k)
    return value


def generate(kind: str, depth: int, r: Optional[Fraction] = None,
             bit_budget: int = DEFAULT_BIT_BUDGET) -> ParamSeq:
    """Named parameter sequences.

    ``minimal``: tightest choice n_1 = 10, m_k = 3(n_k+1), n_{k+1} = 2m_k - 1.
    ``theorem4``: n_k = 9^(4^(k-1)), m_k = 9^(4^(k-1)+k).
    ``theorem3``: as minimal but m_k = max(3(n_k+1), k^2 n_k); ``r`` is kept
    for the growth check b_{k+1,2} <= b_{k,2}^r.
    ``corollary1``: m_k = 3(n_k+1), n_{k+1} = max(2m_k - 1, (b_{k,2} 2^k)^k m_k).
    """
    if depth < 1:
        raise SequenceError("depth must be at least 1")
    pairs: List[Tuple[int, int]] = []
    if kind == "theorem4":
        if 4 ** (depth - 1) * 3.17 > bit_budget:
            raise BitBudgetError(f"theorem4 level {depth} exceeds the bit budget", depth)
        for k in range(1, depth + 1):
            e = 4 ** (k - 1)
            pairs.append((_budget(9 ** (e + k), k, bit_budget), _budget(9 ** e, k, bit_budget)))
        return ParamSeq(tuple(pairs), kind)
    if kind not in ("minimal", "theorem3", "corollary1"):
        raise SequenceError(f"unknown generator {kind!r}")
    n = 10
    b = identity()
    for k in range(1, depth + 1):
        m = 3 * (n + 1)
        if kind == "theorem3":
            m = max(m, k * k * n)
        _budget(m, k, bit_budget)
        pairs.append((m, n))
        if k == depth:
            break
        if kind == "corollary1":
            b = mat_mul(b, keane_matrix(m, n))
            b2 = l1_norm(column(b, 2))
            bound = (b2 * 2 ** k) ** k * m
            _budget(bound, k + 1, bit_budget)
            n = max(2 * m - 1, bound)
        else:
            n = 2 * m - 1
    return ParamSeq(tuple(pairs), kind, Fraction(r) if r is not None else None)
