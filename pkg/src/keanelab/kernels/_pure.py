"""Pure-Python orbit kernels.

All coordinates are integer numerators over the map's common denominator.
``left`` holds the left endpoints of the intervals (increasing), ``hi`` the
right end of the last one, ``shift`` the translation applied on each interval.
"""
from bisect import bisect_right

# advance() status codes
RETURNED = 0
SPLIT_DOMAIN = 1
STRADDLE = 2
BUDGET = 3


def advance(left, shift, hi, c, length, a, b, budget):
    """Push the segment [c, c+length) forward until something happens.

    Stops when the segment is about to cross an interval boundary
    (SPLIT_DOMAIN, nothing applied), when an image lands wholly inside
    [a, b) (RETURNED) or straddles a or b (STRADDLE), or after ``budget``
    steps (BUDGET).  Returns ``(c, steps, status, counts)`` where counts[j]
    is the number of steps taken from interval j.
    """
    n = len(left)
    counts = [0] * n
    steps = 0
    end = c + length
    while True:
        if steps >= budget:
            return c, steps, BUDGET, counts
        j = bisect_right(left, c) - 1
        right = left[j + 1] if j + 1 < n else hi
        if end > right:
            return c, steps, SPLIT_DOMAIN, counts
        counts[j] += 1
        steps += 1
        c += shift[j]
        end = c + length
        if c >= a and end <= b:
            return c, steps, RETURNED, counts
        if c < a < end or c < b < end:
            return c, steps, STRADDLE, counts


def segment_orbit(left, shift, hi, c, length, steps):
    """Images T^s [c, c+length) for 0 <= s < steps.

    Returns ``(positions, counts, split_at)``; ``split_at`` is the first time
    at which the segment straddles a breakpoint, or -1.  Positions are only
    filled up to the split.
    """
    n = len(left)
    counts = [0] * n
    positions = []
    for s in range(steps):
        j = bisect_right(left, c) - 1
        right = left[j + 1] if j + 1 < n else hi
        if c + length > right:
            return positions, counts, s
        positions.append(c)
        counts[j] += 1
        c += shift[j]
    return positions, counts, -1


def distance_records(left, shift, x, horizon):
    """Strict running minima of |T^s x - x| for 1 <= s <= horizon.

    Returns ``(records, breakpoint_hits)`` with records a list of
    ``(s, distance)``; a hit is any time 0 <= s <= horizon at which the orbit
    sits exactly on an interior breakpoint.
    """
    interior = set(left[1:])
    records = []
    best = None
    hits = 1 if x in interior else 0
    y = x
    for s in range(1, horizon + 1):
        y += shift[bisect_right(left, y) - 1]
        if y in interior:
            hits += 1
        d = y - x if y >= x else x - y
        if best is None or d < best:
            best = d
            records.append((s, d))
    return records, hits
