"""Pure-Python reference implementations of the hot loops.

Every function here has a twin of the same name and signature in
``_ckernels.pyx``; the two must agree exactly on all inputs.
"""
from itertools import product


def conv_trunc(a, b, n):
    """First ``n`` coefficients of the product of integer sequences ``a`` and ``b``."""
    out = [0] * n
    lb = len(b)
    for i, x in enumerate(a[:n]):
        if not x:
            continue
        lim = min(lb, n - i)
        for j in range(lim):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


def _nondegenerate(terms):
    # terms: list of c_i * base**t_i; reject if a nonempty proper subsum vanishes
    k = len(terms)
    full = (1 << k) - 1
    for mask in range(1, full):
        s = 0
        m = mask
        i = 0
        while m:
            if m & 1:
                s += terms[i]
            m >>= 1
            i += 1
        if s == 0:
            return False
    return True


def mann_box_search(coeffs, base, rhs, bound, min_zero):
    """Nondegenerate solutions of sum c_i base**t_i == rhs with 0 <= t_i <= bound.

    With ``min_zero`` only tuples whose smallest entry is 0 are returned
    (homogeneous case, solutions normalised by their common shift).
    """
    k = len(coeffs)
    powers = [base ** e for e in range(bound + 1)]
    found = []
    for t in product(range(bound + 1), repeat=k):
        if min_zero and min(t) != 0:
            continue
        terms = [c * powers[e] for c, e in zip(coeffs, t)]
        if sum(terms) != rhs:
            continue
        if _nondegenerate(terms):
            found.append(t)
    return found


def box_points(rows, rhs, lo, hi, limit):
    """Integer points w with lo <= w <= hi and rows . w <= rhs, lex order, at most ``limit``."""
    found = []
    for w in product(*[range(l, h + 1) for l, h in zip(lo, hi)]):
        ok = True
        for row, r in zip(rows, rhs):
            s = 0
            for c, x in zip(row, w):
                s += c * x
            if s > r:
                ok = False
                break
        if ok:
            found.append(w)
            if len(found) >= limit:
                break
    return found
