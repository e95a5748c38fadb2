"""Pure-Python fraction-free Gauss-Jordan elimination over the integers.

This is the reference kernel; ``_elim_fast`` implements the same algorithm
on machine integers and must agree with it entry for entry.
"""
from math import gcd


def rref_int(rows, ncols):
    """Reduce an integer matrix to a primitive row echelon form.

    Returns ``(rows, pivots)``. Every pivot row is divided by the gcd of its
    entries and has a positive pivot; every other entry of a pivot column is
    zero. Dividing each pivot row by its pivot gives the rational RREF. The
    output is unique, so the pivot search order (smallest magnitude first, to
    slow coefficient growth) does not affect it.
    """
    return resume([list(r) for r in rows], ncols, 0, [])


def resume(a, ncols, start, pivots):
    """Continue elimination of the row list ``a`` (mutated) at column ``start``.

    ``pivots`` holds the pivot columns already placed in rows ``0..len-1``.
    Restarting a partially processed column is harmless: rows already
    cleared are skipped and the pivot row is already primitive.
    """
    m = len(a)
    r = len(pivots)
    for c in range(start, ncols):
        if r == m:
            break
        p = -1
        best = 0
        for i in range(r, m):
            v = a[i][c]
            if v and (p < 0 or abs(v) < best):
                p, best = i, abs(v)
                if best == 1:
                    break
        if p < 0:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
        prow = a[r]
        g = gcd(*prow)
        if prow[c] < 0:
            g = -g
        if g != 1:
            prow = [v // g for v in prow]
            a[r] = prow
        pv = prow[c]
        for i in range(m):
            if i == r:
                continue
            row = a[i]
            f = row[c]
            if not f:
                continue
            g = gcd(f, pv)
            s = pv // g
            t = f // g
            new = [s * x - t * y for x, y in zip(row, prow)]
            h = gcd(*new)
            if h > 1:
                new = [v // h for v in new]
            a[i] = new
        pivots.append(c)
        r += 1
    return a, pivots
