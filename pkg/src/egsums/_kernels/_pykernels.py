"""Pure-Python reference kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and bit-identical results.  Integers are Python ints throughout; fractions are
passed as ``(numerator, denominator)`` pairs so both backends avoid the
per-operation gcd that :class:`fractions.Fraction` performs.
"""
from math import gcd


def rising(n, f):
    """(n+1)(n+2)...(n+f) as an exact integer."""
    q = 1
    for i in range(n + 1, n + f + 1):
        q *= i
    return q


def unit_fraction_sum(denominators):
    """Exact sum of 1/q over ``denominators`` as a reduced (num, den) pair.

    Accumulates on the lcm of the denominators seen so far, then reduces once.
    """
    num, den = 0, 1
    for q in denominators:
        g = gcd(den, q)
        num = num * (q // g) + den // g
        den = den // g * q
    g = gcd(num, den)
    return num // g, den // g


def greedy_unit_scan(start, step, factors, p_num, p_den, b_num, b_den, max_terms):
    """Greedy subsum of 1/rising(n, factors) over n = start, start+step, ...

    A term is taken when it does not overshoot the remaining target.  The scan
    stops as soon as the remainder drops below the budget ``b_num/b_den``.

    Returns ``(chosen, r_num, r_den, scanned)`` where ``r_num/r_den`` is the
    exact remainder (target minus achieved) and ``scanned`` counts visited
    indices.  ``scanned == max_terms`` with the remainder still at or above
    the budget signals that the cap was hit.
    """
    rn, rd = p_num, p_den
    chosen = []
    scanned = 0
    n = start
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


def count_assignments(lows, highs, monotone):
    """Number of assignments f with lows[i] <= f[i] <= highs[i] (nondecreasing if monotone)."""
    if not monotone:
        total = 1
        for lo, hi in zip(lows, highs):
            total *= max(0, hi - lo + 1)
        return total
    # ways[v]: number of valid prefixes ending in value v
    ways = {v: 1 for v in range(lows[0], highs[0] + 1)} if lows else {None: 1}
    for lo, hi in zip(lows[1:], highs[1:]):
        ways = {v: sum(w for u, w in ways.items() if u <= v) for v in range(lo, hi + 1)}
    return sum(ways.values())


def enumerate_sums(lows, highs, table, monotone):
    """All assignments in lexicographic order with their integer sums.

    ``table[i][v - lows[i]]`` is the integer contribution of value ``v`` at
    position ``i``.  With ``monotone`` only nondecreasing assignments are
    produced.  Returns ``(sums, assignments)``.
    """
    length = len(lows)
    sums = []
    assignments = []
    if length == 0:
        return [0], [()]
    cur = [0] * length
    partial = [0] * (length + 1)

    def first_value(i):
        v = lows[i]
        if monotone and i and cur[i - 1] > v:
            v = cur[i - 1]
        return v

    i = 0
    cur[0] = lows[0] - 1
    while i >= 0:
        cur[i] += 1
        if cur[i] > highs[i]:
            i -= 1
            continue
        partial[i + 1] = partial[i] + table[i][cur[i] - lows[i]]
        if i == length - 1:
            sums.append(partial[length])
            assignments.append(tuple(cur))
        else:
            i += 1
            cur[i] = first_value(i) - 1
    return sums, assignments
