# cython: boundscheck=False, wraparound=False, cdivision=True
"""int64 twins of the routines in ``_pure``.

Callers guarantee every coordinate lies in [0, 2**62).
"""
import numpy as np

cdef int MAXN = 64

cdef enum:
    RETURNED = 0
    SPLIT_DOMAIN = 1
    STRADDLE = 2
    BUDGET = 3


cdef inline int locate(long long* left, int n, long long x) nogil:
    cdef int j = n - 1
    while j > 0 and left[j] > x:
        j -= 1
    return j


cdef int load(object left, object shift, long long* cl, long long* cs) except -1:
    cdef int n = len(left)
    if n > MAXN:
        raise ValueError("too many intervals for the compiled kernel")
    for j in range(n):
        cl[j] = left[j]
        cs[j] = shift[j]
    return n


def advance(left, shift, long long hi, long long c, long long length,
            long long a, long long b, long long budget):
    cdef long long cl[64]
    cdef long long cs[64]
    cdef long long counts[64]
    cdef int n = load(left, shift, cl, cs)
    cdef int j, status
    cdef long long steps = 0, end = c + length, right
    for j in range(n):
        counts[j] = 0
    with nogil:
        while True:
            if steps >= budget:
                status = BUDGET
                break
            j = locate(cl, n, c)
            right = cl[j + 1] if j + 1 < n else hi
            if end > right:
                status = SPLIT_DOMAIN
                break
            counts[j] += 1
            steps += 1
            c += cs[j]
            end = c + length
            if c >= a and end <= b:
                status = RETURNED
                break
            if (c < a and a < end) or (c < b and b < end):
                status = STRADDLE
                break
    return c, steps, status, [counts[j] for j in range(n)]


def segment_orbit(left, shift, long long hi, long long c, long long length,
                  long long steps):
    cdef long long cl[64]
    cdef long long cs[64]
    cdef long long counts[64]
    cdef int n = load(left, shift, cl, cs)
    cdef int j
    cdef long long s, right, split_at = -1
    positions = np.empty(steps, dtype=np.int64)
    cdef long long[::1] pos = positions
    for j in range(n):
        counts[j] = 0
    with nogil:
        s = 0
        while s < steps:
            j = locate(cl, n, c)
            right = cl[j + 1] if j + 1 < n else hi
            if c + length > right:
                split_at = s
                break
            pos[s] = c
            counts[j] += 1
            c += cs[j]
            s += 1
    if split_at >= 0:
        positions = positions[:split_at]
    return positions, [counts[j] for j in range(n)], split_at


def distance_records(left, shift, long long x, long long horizon):
    cdef long long cl[64]
    cdef long long cs[64]
    cdef int n = load(left, shift, cl, cs)
    cdef long long y = x, d, best = -1, s, hits = 0
    cdef int j
    rec_s = []
    rec_d = []
    for j in range(1, n):
        if cl[j] == x:
            hits += 1
    s = 1
    while s <= horizon:
        y += cs[locate(cl, n, y)]
        for j in range(1, n):
            if cl[j] == y:
                hits += 1
        d = y - x if y >= x else x - y
        if best < 0 or d < best:
            best = d
            rec_s.append(s)
            rec_d.append(d)
        s += 1
    return list(zip(rec_s, rec_d)), hits
