# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the kernels in ``_pykernels``.

Loop counters and odometer state live in C; the arithmetic itself stays on
Python ints because every quantity here outgrows 64 bits quickly.
"""
from libc.stdlib cimport malloc, free
from math import gcd


cpdef object rising(long long n, long long f):
    cdef object q = 1
    cdef unsigned long long acc = 1
    cdef long long i
    # batch factors in a C word while they fit, then fold into the bigint
    for i in range(n + 1, n + f + 1):
        if acc > <unsigned long long>(0xFFFFFFFFFFFFFFFF) // <unsigned long long>i:
            q *= acc
            acc = 1
        acc *= <unsigned long long>i
    return q * acc


def unit_fraction_sum(denominators):
    cdef object num = 0, den = 1, q, g
    for q in denominators:
        g = gcd(den, q)
        num = num * (q // g) + den // g
        den = den // g * q
    g = gcd(num, den)
    return num // g, den // g


def greedy_unit_scan(long long start, long long step, long long factors,
                     object p_num, object p_den, object b_num, object b_den,
                     long long max_terms):
    cdef object rn = p_num, rd = p_den, q, g
    cdef list chosen = []
    cdef long long scanned = 0
    cdef long long n = start
    if rn * b_den < b_num * rd:
        return chosen, rn, rd, scanned
    while scanned < max_terms:
        q = rising(n, factors)
        scanned += 1
        if rd <= rn * q:
            g = gcd(rd, q)
            rn = rn * (q // g) - rd // g
            rd = rd // g * q
            chosen.append(n)
            if rn * b_den < b_num * rd:
                break
        n += step
    g = gcd(rn, rd)
    return chosen, rn // g, rd // g, scanned


def count_assignments(lows, highs, bint monotone):
    cdef object total
    if not monotone:
        total = 1
        for lo, hi in zip(lows, highs):
            total *= max(0, hi - lo + 1)
        return total
    ways = {v: 1 for v in range(lows[0], highs[0] + 1)} if len(lows) else {None: 1}
    for lo, hi in zip(lows[1:], highs[1:]):
        ways = {v: sum(w for u, w in ways.items() if u <= v) for v in range(lo, hi + 1)}
    return sum(ways.values())


def enumerate_sums(lows, highs, table, bint monotone):
    cdef Py_ssize_t length = len(lows)
    cdef list sums = [], assignments = []
    cdef long *cur
    cdef long *lo
    cdef long *hi
    cdef Py_ssize_t i, k
    cdef long v
    cdef list partial
    if length == 0:
        return [0], [()]
    cur = <long *> malloc(length * sizeof(long))
    lo = <long *> malloc(length * sizeof(long))
    hi = <long *> malloc(length * sizeof(long))
    if cur == NULL or lo == NULL or hi == NULL:
        free(cur); free(lo); free(hi)
        raise MemoryError()
    try:
        rows = [list(r) for r in table]
        for k in range(length):
            lo[k] = lows[k]
            hi[k] = highs[k]
        partial = [0] * (length + 1)
        i = 0
        cur[0] = lo[0] - 1
        while i >= 0:
            cur[i] += 1
            if cur[i] > hi[i]:
                i -= 1
                continue
            partial[i + 1] = partial[i] + (<list>rows[i])[cur[i] - lo[i]]
            if i == length - 1:
                sums.append(partial[length])
                assignments.append(tuple([cur[k] for k in range(length)]))
            else:
                i += 1
                v = lo[i]
                if monotone and cur[i - 1] > v:
                    v = cur[i - 1]
                cur[i] = v - 1
    finally:
        free(cur); free(lo); free(hi)
    return sums, assignments
