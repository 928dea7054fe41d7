from fractions import Fraction as F

import pytest

from keanelab.analysis import KeaneTower, PreconditionError, orbit_geometry
from keanelab.dimension import (check_theorem2_condition, check_theorem3_condition, cover_terms,
                                critical_exponent, recurrence_statistic, sandwich_growth_bound,
                                separation_check, theorem4_proof_inequality, theorem4_threshold)
from keanelab.iet import build_iet
from keanelab.keane import column_mass, generate, level_masses


def test_cover_terms_s_one_is_tower_measure(minimal):
    series = cover_terms(minimal, 6, F(1))
    for t in series.terms:
        assert t.power == t.b * t.length <= 1
    assert [t.k for t in series.terms] == [1, 2, 3, 4]


def test_cover_rejects_bad_exponent(minimal):
    with pytest.raises(PreconditionError):
        cover_terms(minimal, 6, F(0))
    with pytest.raises(PreconditionError):
        cover_terms(minimal, 6, F(1), L=5)


def test_cover_half_on_corollary1(corollary1):
    series = cover_terms(corollary1, 5, F(1, 2), L=2)
    assert all(t.below_dyadic for t in series.terms)
    for t in series.terms:
        # independent check: t_k(1/2) <= 2^-k  <=>  b^2 * lambda <= 4^-k
        assert column_mass(corollary1, t.k, 2) ** 2 * level_masses(corollary1, t.k, 5, 3)[1] <= F(1, 4 ** t.k)


def test_cover_csv_schema(minimal):
    series = cover_terms(minimal, 5, F(1, 3))
    assert series.csv_header == ["k", "b_k2", "lambda3_I2k", "term_exact", "term_decimal"]
    assert len(series.csv_rows()) == 3


def test_critical_exponent_minimal_is_no_decay(minimal):
    br = critical_exponent(minimal, 6)
    assert (br.lo, br.hi, br.flag) == (1, 1, "no_decay")


def test_critical_exponent_theorem4(theorem4):
    br = critical_exponent(theorem4, 5, F(1, 64))
    assert br.flag == "bracket" and br.hi - br.lo <= F(1, 64) and br.hi < F(1, 2)
    for s, ok in br.tests:
        assert ok == (s >= br.hi)


def test_critical_exponent_coarse_tolerance(theorem4):
    br = critical_exponent(theorem4, 5, F(1, 2))
    assert len(br.tests) <= 2


def test_theorem2_examples(theorem4, corollary1):
    rep = check_theorem2_condition(theorem4, 2, 1)
    assert not rep.holds and rep.lhs == 6561 and rep.rhs == 91 ** 2 * 4 * 81 == 2683044
    for k in range(2, corollary1.depth):
        assert check_theorem2_condition(corollary1, 2, k).holds


def test_theorem2_rational_r(corollary1):
    rep = check_theorem2_condition(corollary1, F(3, 2), 2)
    assert rep.holds and "power 2" in rep.note


def test_theorem4_proof_inequality_threshold():
    # exponent bookkeeping: holds iff 4^k/12 > k^2 + 2k - 2/3 + 4k log_9 2
    threshold, reps = theorem4_threshold(8)
    assert threshold == 5
    assert [r.holds for r in reps] == [False] * 4 + [True] * 4


def test_theorem3_examples(theorem4, minimal):
    for k in range(1, 4):
        assert check_theorem3_condition(theorem4, 2, k)[1].holds
    growth, _ = check_theorem3_condition(minimal, 2, 2)
    assert growth.holds and growth.rhs == 9439 ** 2
    assert growth.lhs <= 11616 * 1584
    assert sandwich_growth_bound(minimal, 2, 2)


def test_theorem3_growth_theorem4_nine_halves(theorem4):
    for k in range(1, 4):
        growth, _ = check_theorem3_condition(theorem4, F(9, 2), k)
        b0, b1 = column_mass(theorem4, k, 2), column_mass(theorem4, k + 1, 2)
        assert growth.holds == (b1 ** 2 <= b0 ** 9)
        if sandwich_growth_bound(theorem4, F(9, 2), k):
            assert growth.holds


def test_recurrence_trivial_cases():
    t = build_iet((F(1, 10), F(1, 5), F(3, 10), F(2, 5)), (4, 2, 1, 3))
    s = recurrence_statistic(t, F(1, 20), 1)
    assert s.statistic == abs(t.apply(F(1, 20)) - F(1, 20)) and s.argmin == 1
    ident = build_iet((F(1, 4),) * 4, (1, 2, 3, 4))
    s = recurrence_statistic(ident, F(1, 3), 5)
    assert s.statistic == 0 and s.argmin == 1


def test_recurrence_beta_zero_nonincreasing(minimal):
    tower = KeaneTower(minimal, 4)
    x = tower.level(1).subinterval(2)[0] + F(1, 10 ** 12)
    values = [recurrence_statistic(tower.base, x, n).statistic for n in (1, 10, 100, 1000)]
    assert values == sorted(values, reverse=True)


def test_recurrence_rational_beta(minimal):
    tower = KeaneTower(minimal, 4)
    x = sum(tower.level(2).subinterval(2)) / 1
    s = recurrence_statistic(tower.base, x - F(1, 10 ** 15), 500, F(1, 2))
    assert s.statistic is None and s.statistic_power is not None
    best = min(F(n) * d ** 2 for n, d in s.samples)
    assert s.statistic_power == best


def test_separation_examples(minimal):
    tower = KeaneTower(minimal, 4)
    rep0, _ = separation_check(minimal, 4, 0, tower=tower)
    assert rep0.holds and "vacuous" in rep0.note
    rep1, s1 = separation_check(minimal, 4, 1, tower=tower)
    assert rep1.holds and s1.horizon == 43
    rep2, s2 = separation_check(minimal, 4, 2, tower=tower)
    assert rep2.holds and s2.horizon == 9438


def test_separation_implies_recurrence_bound(minimal):
    tower = KeaneTower(minimal, 4)
    for k in (1, 2):
        rep, _ = separation_check(minimal, 4, k, tower=tower)
        left, ln = tower.level(k).subinterval(2)
        s = recurrence_statistic(tower.base, left + ln / 2, column_mass(minimal, k, 2) - 1)
        assert s.statistic >= rep.rhs
        g = orbit_geometry(minimal, 4, k, tower=tower)
        assert rep.rhs == g.min_other
