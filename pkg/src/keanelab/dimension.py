"""Cover sums, growth conditions and recurrence statistics.

Rational exponents ``s = p/q`` are never evaluated with logarithms in a
comparison: both sides are raised to the power ``q`` and compared as exact
rationals.  Decimal renderings are for humans only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Context, Decimal
from fractions import Fraction
from typing import List, Optional, Tuple

from . import kernels
from .analysis import KeaneTower, PreconditionError, VerificationReport
from .iet import DEFAULT_STEP_BUDGET, IetMap
from .keane import ParamSeq, column_mass, level_masses, mass_bounds
from .numerics import decimal_str, int_str, rat_str

_CTX = Context(prec=40)


def _root_decimal(value: Fraction, q: int) -> str:
    """12-digit rendering of value**(1/q)."""
    if value == 0:
        return "0"
    v = _CTX.divide(Decimal(value.numerator), Decimal(value.denominator))
    if q != 1:
        v = _CTX.exp(_CTX.divide(_CTX.ln(v), Decimal(q)))
    return decimal_str(Fraction(v))


@dataclass(frozen=True)
class CoverTerm:
    k: int
    b: int                 # b_{k,2}
    length: Fraction       # lambda3(I_2^(k)) at the truncation depth
    power: Fraction        # t_k(s) ** q = b**q * length**p
    below_dyadic: bool     # t_k(s) <= 2**-k
    decimal: str

    def csv_row(self):
        return [self.k, int_str(self.b), rat_str(self.length), rat_str(self.power), self.decimal]


@dataclass(frozen=True)
class CoverSumSeries:
    """Terms t_k(s) = b_{k,2} * lambda3(I_2^(k))**s, k = L .. K-2.

    ``term_exact`` in the CSV is t_k(s)**q for s = p/q (exact even when the
    term itself is irrational).
    """

    s: Fraction
    L: int
    K: int
    terms: Tuple[CoverTerm, ...]

    @property
    def q(self) -> int:
        return self.s.denominator

    @property
    def decays(self) -> bool:
        """t_{k+1} <= t_k / 2 for every consecutive pair."""
        scale = Fraction(1, 2 ** self.q)
        return all(b.power <= a.power * scale for a, b in zip(self.terms, self.terms[1:]))

    @property
    def partial_sums(self) -> List[str]:
        out, acc = [], Decimal(0)
        for t in self.terms:
            acc += Decimal(t.decimal) if t.decimal != "0" else Decimal(0)
            out.append(format(Context(prec=12).plus(acc), ".11e"))
        return out

    csv_header = ["k", "b_k2", "lambda3_I2k", "term_exact", "term_decimal"]

    def csv_rows(self):
        return [t.csv_row() for t in self.terms]

    def to_json(self) -> dict:
        return {
            "s": rat_str(self.s), "L": self.L, "K": self.K, "term_power": self.q,
            "terms": [dict(zip(self.csv_header, t.csv_row()), below_dyadic=t.below_dyadic)
                      for t in self.terms],
            "partial_sums_decimal": self.partial_sums,
            "decays": self.decays,
        }


def cover_terms(seq: ParamSeq, K: int, s: Fraction, L: int = 1) -> CoverSumSeries:
    s = Fraction(s)
    if not 0 < s <= 1:
        raise PreconditionError(f"exponent must lie in (0, 1], got {s}")
    if K > seq.depth or not 1 <= L <= K - 2:
        raise PreconditionError(f"need 1 <= L <= K-2 and K <= depth, got L={L}, K={K}")
    p, q = s.numerator, s.denominator
    terms = []
    for k in range(L, K - 1):
        b = column_mass(seq, k, 2)
        length = level_masses(seq, k, K, 3)[1]
        power = Fraction(b) ** q * length ** p
        terms.append(CoverTerm(k, b, length, power, power <= Fraction(1, 2 ** (k * q)),
                               _root_decimal(power, q)))
    return CoverSumSeries(s, L, K, tuple(terms))


@dataclass(frozen=True)
class ExponentBracket:
    lo: Fraction
    hi: Fraction
    flag: str          # "bracket", "no_decay" or "all_decay"
    tests: Tuple[Tuple[Fraction, bool], ...]

    def to_json(self) -> dict:
        return {"s_lo": rat_str(self.lo), "s_hi": rat_str(self.hi),
                "s_lo_decimal": decimal_str(self.lo), "s_hi_decimal": decimal_str(self.hi),
                "flag": self.flag,
                "tests": [[rat_str(s), ok] for s, ok in self.tests]}


def critical_exponent(seq: ParamSeq, K: int, tolerance: Fraction = Fraction(1, 256)) -> ExponentBracket:
    """Bisect for the smallest s whose cover terms halve level to level.

    Decay at s is checked on k = 2 .. K-2 against the previous level and is
    monotone in s, so the result ``[lo, hi]`` has every tested s >= hi
    decaying and every tested s <= lo not.  If even s = 1 fails the result is
    ``[1, 1]`` (``no_decay``); if every tested s decays it is ``[0, 0]``
    (``all_decay``).
    """
    tolerance = Fraction(tolerance)
    if K < 4 or K > seq.depth:
        raise PreconditionError(f"need 4 <= K <= depth, got K={K}")
    if tolerance <= 0:
        raise PreconditionError("tolerance must be positive")
    data = [(column_mass(seq, k, 2), level_masses(seq, k, K, 3)[1]) for k in range(1, K - 1)]

    def decaying(s: Fraction) -> bool:
        p, q = s.numerator, s.denominator
        for (b0, l0), (b1, l1) in zip(data, data[1:]):
            # b1 * l1**s <= b0 * l0**s / 2  <=>  (2 b1 / b0)**q <= (l0 / l1)**p
            if Fraction(2 * b1, b0) ** q > (l0 / l1) ** p:
                return False
        return True

    tests = [(Fraction(1), decaying(Fraction(1)))]
    if not tests[0][1]:
        return ExponentBracket(Fraction(1), Fraction(1), "no_decay", tuple(tests))
    lo, hi = Fraction(0), Fraction(1)
    lo_tested = False
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        ok = decaying(mid)
        tests.append((mid, ok))
        if ok:
            hi = mid
        else:
            lo, lo_tested = mid, True
    if not lo_tested:
        return ExponentBracket(Fraction(0), Fraction(0), "all_decay", tuple(tests))
    return ExponentBracket(lo, hi, "bracket", tuple(tests))


# -- growth hypotheses ---------------------------------------------------------------------


def _range(seq: ParamSeq, k: int):
    if not 1 <= k < seq.depth:
        raise PreconditionError(f"level {k} needs 1 <= k < {seq.depth}")


def check_theorem2_condition(seq: ParamSeq, r: Fraction, k: int) -> VerificationReport:
    """n_{k+1} >= b_{k,2}**r 2**(r k) m_k, compared after raising to the power q."""
    _range(seq, k)
    r = Fraction(r)
    if r <= 0:
        raise PreconditionError("r must be positive")
    p, q = r.numerator, r.denominator
    b = column_mass(seq, k, 2)
    lhs = Fraction(seq.n(k + 1)) ** q
    rhs = Fraction(b ** p * 2 ** (p * k) * seq.m(k) ** q)
    note = "" if q == 1 else f"both sides raised to the power {q}"
    return VerificationReport("T2", seq.kind, k, None, lhs, ">=", rhs, note=note)


def check_theorem3_condition(seq: ParamSeq, r: Fraction, k: int) -> Tuple[VerificationReport, VerificationReport]:
    """(b_{k+1,2} <= b_{k,2}**r, m_k >= k**2 n_k)."""
    _range(seq, k)
    r = Fraction(r)
    if r <= 0:
        raise PreconditionError("r must be positive")
    p, q = r.numerator, r.denominator
    growth = VerificationReport(
        "T3_GROWTH", seq.kind, k, None,
        Fraction(column_mass(seq, k + 1, 2)) ** q, "<=", Fraction(column_mass(seq, k, 2)) ** p,
        note="" if q == 1 else f"both sides raised to the power {q}")
    ratio = VerificationReport("T3_RATIO", seq.kind, k, None,
                               Fraction(seq.m(k)), ">=", Fraction(k * k * seq.n(k)))
    return growth, ratio


def theorem4_proof_inequality(k: int) -> VerificationReport:
    """(2^k 9^E)^2 2^(2k) 9^(4^(k-1)+k) < 9^(4^k), E = (4^k-1)/3 + k(k+1)/2."""
    if k < 1:
        raise PreconditionError("k must be at least 1")
    e = (4 ** k - 1) // 3 + k * (k + 1) // 2
    lhs = (2 ** k * 9 ** e) ** 2 * 2 ** (2 * k) * 9 ** (4 ** (k - 1) + k)
    return VerificationReport("T4_PROOF", "theorem4", k, None, Fraction(lhs), "<",
                              Fraction(9 ** (4 ** k)))


def theorem4_threshold(k_max: int = 8) -> Tuple[Optional[int], List[VerificationReport]]:
    """Smallest k from which the proof inequality holds through ``k_max``."""
    reports = [theorem4_proof_inequality(k) for k in range(1, k_max + 1)]
    threshold = None
    for rep in reversed(reports):
        if not rep.holds:
            break
        threshold = rep.k
    return threshold, reports


def sandwich_growth_bound(seq: ParamSeq, r: Fraction, k: int) -> bool:
    """Sufficient test for b_{k+1,2} <= b_{k,2}**r from the product bounds alone."""
    r = Fraction(r)
    upper_next = mass_bounds(seq, k + 1)[1]
    lower_here = mass_bounds(seq, k)[0]
    return upper_next ** r.denominator <= lower_here ** r.numerator


# -- recurrence -------------------------------------------------------------------------------


@dataclass(frozen=True)
class RecurrenceSeries:
    """Running minima of |T^n x - x| and the statistic min n**beta |T^n x - x|.

    Every minimizer of n**beta d_n is a strict record of d_n, so the records
    carry the whole statistic.  ``statistic_power`` is the statistic raised
    to the power q for beta = p/q.
    """

    x: Fraction
    horizon: int
    beta: Fraction
    samples: Tuple[Tuple[int, Fraction], ...]
    argmin: Optional[int]
    statistic_power: Optional[Fraction]
    breakpoint_hits: int

    @property
    def statistic(self) -> Optional[Fraction]:
        """Exact statistic when beta is an integer, else None."""
        if self.statistic_power is None or self.beta.denominator != 1:
            return None
        return self.statistic_power

    @property
    def statistic_decimal(self) -> Optional[str]:
        if self.statistic_power is None:
            return None
        return _root_decimal(self.statistic_power, self.beta.denominator)

    csv_header = ["n", "distance", "distance_decimal", "weighted_decimal"]

    def csv_rows(self):
        q = self.beta.denominator
        return [[n, rat_str(d), decimal_str(d),
                 _root_decimal(Fraction(n) ** self.beta.numerator * d ** q, q)]
                for n, d in self.samples]

    def to_json(self) -> dict:
        return {
            "x": rat_str(self.x), "horizon": int_str(self.horizon), "beta": rat_str(self.beta),
            "samples": [[int_str(n), rat_str(d)] for n, d in self.samples],
            "argmin": self.argmin,
            "statistic_power": None if self.statistic_power is None else rat_str(self.statistic_power),
            "statistic_decimal": self.statistic_decimal,
            "breakpoint_hits": self.breakpoint_hits,
        }


def recurrence_statistic(t: IetMap, x: Fraction, horizon: int,
                         beta: Fraction = Fraction(0)) -> RecurrenceSeries:
    x, beta = Fraction(x), Fraction(beta)
    if horizon < 0:
        raise PreconditionError("horizon must be non-negative")
    if beta < 0:
        raise PreconditionError("beta must be non-negative")
    t.index(x)  # domain check
    g = t.grid_for(x)
    records, hits = kernels.distance_records(g.left, g.shift, g.hi, g.to_grid(x), horizon)
    samples = tuple((int(n), Fraction(int(d), g.den)) for n, d in records)
    p, q = beta.numerator, beta.denominator
    best, argmin = None, None
    for n, d in samples:
        v = Fraction(n) ** p * d ** q
        if best is None or v < best:
            best, argmin = v, n
    return RecurrenceSeries(x, horizon, beta, samples, argmin, best, hits)


def separation_check(seq: ParamSeq, K: int, k: int, step_budget: int = DEFAULT_STEP_BUDGET,
                     tower: Optional[KeaneTower] = None) -> Tuple[VerificationReport, RecurrenceSeries]:
    """|T^s x - x| >= min_{i != 2} lambda3(I_i^(k)) for 1 <= s < b_{k,2}, x mid I_2^(k)."""
    if K > seq.depth or k < 0 or k + 2 > K:
        raise PreconditionError(f"level k={k} needs 0 <= k <= K-2 (K={K})")
    b = column_mass(seq, k, 2)
    if b > step_budget:
        raise PreconditionError(f"b_(k,2) = {b} exceeds the step budget {step_budget}")
    tower = tower or KeaneTower(seq, K, step_budget)
    left, length = tower.level(k).subinterval(2)
    x = left + length / 2
    masses = level_masses(seq, k, K, 3)
    bound = min(masses[0], masses[2], masses[3])
    series = recurrence_statistic(tower.base, x, b - 1, Fraction(0))
    if series.statistic_power is None:
        rep = VerificationReport("SEP", seq.kind, k, K, bound, ">=", bound,
                                 note="vacuous: b_(k,2) = 1")
    else:
        note = f"orbit hit breakpoints {series.breakpoint_hits} times" if series.breakpoint_hits else ""
        rep = VerificationReport("SEP", seq.kind, k, K, series.statistic_power, ">=", bound,
                                 note=note)
    return rep, series
