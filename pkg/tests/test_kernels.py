"""The compiled and pure-Python kernels must agree bit for bit."""
import pytest
from hypothesis import given, settings, strategies as st

from keanelab import kernels
from keanelab.iet import IetMap
from keanelab.kernels import python_backend as pure

compiled = kernels.compiled_backend
needs_compiled = pytest.mark.skipif(compiled is None, reason="extension not built")


@st.composite
def grids(draw):
    n = draw(st.integers(2, 6))
    lengths = draw(st.lists(st.integers(1, 40), min_size=n, max_size=n))
    perm = draw(st.permutations(range(1, n + 1)))
    t = IetMap(lengths, perm)
    return t.grid()


@needs_compiled
@settings(max_examples=200, deadline=None)
@given(grids(), st.data())
def test_advance_agrees(g, data):
    c = data.draw(st.integers(g.lo, g.hi - 1))
    length = data.draw(st.integers(1, g.hi - c))
    a = data.draw(st.integers(g.lo, g.hi - 1))
    b = data.draw(st.integers(a + 1, g.hi))
    budget = data.draw(st.integers(0, 200))
    args = (g.left, g.shift, g.hi, c, length, a, b, budget)
    assert tuple(compiled.advance(*args)) == tuple(pure.advance(*args))


@needs_compiled
@settings(max_examples=200, deadline=None)
@given(grids(), st.data())
def test_segment_orbit_agrees(g, data):
    c = data.draw(st.integers(g.lo, g.hi - 1))
    length = data.draw(st.integers(1, g.hi - c))
    steps = data.draw(st.integers(0, 100))
    p1, c1, s1 = compiled.segment_orbit(g.left, g.shift, g.hi, c, length, steps)
    p2, c2, s2 = pure.segment_orbit(g.left, g.shift, g.hi, c, length, steps)
    assert [int(x) for x in p1] == p2 and c1 == c2 and s1 == s2


@needs_compiled
@settings(max_examples=200, deadline=None)
@given(grids(), st.data())
def test_distance_records_agree(g, data):
    x = data.draw(st.integers(g.lo, g.hi - 1))
    horizon = data.draw(st.integers(0, 300))
    assert compiled.distance_records(g.left, g.shift, x, horizon) == \
        pure.distance_records(g.left, g.shift, x, horizon)


def test_dispatch_falls_back_for_big_coordinates():
    huge = 1 << 70
    assert kernels.active_backend(huge) == "python"
    if compiled is not None:
        assert kernels.active_backend(1000) == "compiled"
        with kernels.backend("python"):
            assert kernels.active_backend(1000) == "python"


def test_big_coordinates_run_in_python():
    big = (1 << 80) + 7
    t = IetMap([big, big + 3, 5], [3, 1, 2])
    g = t.grid()
    records, hits = kernels.distance_records(g.left, g.shift, g.hi, 1, 10)
    assert records == pure.distance_records(g.left, g.shift, 1, 10)[0]


def test_budget_status():
    g = IetMap([1, 1], [2, 1]).grid()
    # a 2-cycle never enters [0, 0) style empty window; budget stops it
    c, steps, status, counts = kernels.advance(g.left, g.shift, g.hi, 0, 1, 0, 0, 5)
    assert status == kernels.BUDGET and steps == 5 and sum(counts) == 5


def test_compiled_rejects_oversized_when_forced():
    if compiled is None:
        pytest.skip("extension not built")
    with kernels.backend("compiled"):
        with pytest.raises(OverflowError):
            kernels.advance((0, 1 << 70), (1 << 70, -(1 << 70)), 1 << 71, 0, 1, 0, 1, 1)
