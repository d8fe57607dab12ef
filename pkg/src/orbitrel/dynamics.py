"""Attracting self-maps of the disc fixing 0 and their conjugacies.

For ``f = sum_{i>=M} f_i x^i`` with ``lam = f_M`` we provide orbit
iteration, the closed-form orbit valuations, basepoint normalisation and
the formal conjugacies

* Koenigs (M = 1):   ``h(f(x)) = lam * h(x)``
* Boettcher (M > 1): ``h(f(x)) = lam * h(x)**M``

both normalised by ``h(x) = x + O(x^2)``.  The coefficient recursions sum
``h_j * [x^N] f**j`` over a table of powers of ``f``, which equals the sum
over compositions of N without enumerating them.
"""
from dataclasses import dataclass

from orbitrel.errors import DomainViolation, NotAttracting, PrecisionExhausted, ZeroMap
from orbitrel.series import TruncatedSeries, compose, eval_series, gauss_norm_valuation, series_mul
from orbitrel.valued_field import INF, ValuedElement, fsum, inv

__all__ = ["DynamicalSystem", "OrbitPoint", "validate", "orbit", "orbit_values",
           "iterate_valuation", "normalize_basepoint", "koenigs", "koenigs_inverse",
           "boettcher", "functional_residual", "iterate_series", "series_inverse",
           "compositions", "KOENIGS_SAFETY_MARGIN"]

KOENIGS_SAFETY_MARGIN = 8


@dataclass(frozen=True)
class DynamicalSystem:
    f: TruncatedSeries
    M: int
    lam: ValuedElement

    @property
    def field(self):
        return self.f.field

    @property
    def vlam(self):
        return self.lam.val

    @property
    def superattracting(self):
        return self.M >= 2


@dataclass(frozen=True)
class OrbitPoint:
    index: int
    value: ValuedElement
    valuation: int


def validate(f):
    """Check that ``f`` is an attracting self-map of the unit disc fixing 0."""
    if f.is_zero():
        raise ZeroMap("f vanishes identically")
    if f.coeffs[0].val is not INF:
        raise DomainViolation("f(0) != 0")
    M = None
    for i in range(1, f.trunc + 1):
        c = f.coeffs[i]
        if c.val is not INF:
            M = i
            break
        if not c.is_exact:
            raise PrecisionExhausted(f"cannot decide whether coefficient {i} of f vanishes")
    if M is None:
        raise PrecisionExhausted("no nonzero coefficient of f within the truncation")
    if gauss_norm_valuation(f) < 0:
        raise DomainViolation("f does not map the unit disc into itself")
    lam = f.coeffs[M]
    if M == 1 and lam.val <= 0:
        raise NotAttracting(f"|f'(0)| = |lambda| is not < 1 (v(lambda) = {lam.val})")
    return DynamicalSystem(f, M, lam)


def iterate_valuation(sys, v_a, t):
    """v(f^t(a)) from v(a) alone, valid when v(a) > v(lambda)."""
    if not v_a > sys.vlam:
        raise DomainViolation(f"need v(a) > v(lambda), got {v_a} <= {sys.vlam}")
    if sys.M == 1:
        return v_a + t * sys.vlam
    Mt = sys.M ** t
    return Mt * v_a + (Mt - 1) // (sys.M - 1) * sys.vlam


def orbit_values(sys, a, t_max):
    """``[a, f(a), ..., f^t_max(a)]`` by repeated evaluation, no checks."""
    out = [a]
    x = a
    for _ in range(t_max):
        x = eval_series(sys.f, x)
        out.append(x)
    return out


def orbit(sys, a, t_max):
    if a.field != sys.field:
        raise ValueError("basepoint and map over different fields")
    if a.val is INF or not a.val > sys.vlam:
        raise DomainViolation(f"need v(a) > v(lambda) = {sys.vlam}, got v(a) = {a.val}")
    points = []
    x = a
    for t in range(t_max + 1):
        if t:
            x = eval_series(sys.f, x)
        if x.val is INF:
            raise PrecisionExhausted(f"orbit point {t} vanishes to precision")
        expected = iterate_valuation(sys, a.val, t)
        if x.val != expected:
            raise RuntimeError(f"orbit point {t} has valuation {x.val}, closed form gives {expected}")
        points.append(OrbitPoint(t, x, x.val))
    return points


def normalize_basepoint(sys, a, max_steps=10_000):
    """Least N with v(f^N(a)) > v(lambda), and f^N(a)."""
    if a.val is INF:
        raise DomainViolation("basepoint is the fixed point 0")
    if a.val < 1:
        raise DomainViolation(f"basepoint must lie in the open unit disc, v(a) = {a.val}")
    x = a
    for N in range(max_steps + 1):
        if x.val > sys.vlam:
            return N, x
        x = eval_series(sys.f, x)
        if x.val is INF:
            if x.is_exact:
                raise DomainViolation(f"orbit reaches the fixed point 0 at step {N + 1}")
            raise PrecisionExhausted(f"orbit point {N + 1} vanishes to precision")
    raise PrecisionExhausted(f"no normalisation within {max_steps} steps")


def _power_table(f, jmax, trunc):
    # P[j] = f**j truncated at trunc, for 1 <= j <= jmax
    P = [None, f.truncate(trunc)]
    for _ in range(2, jmax + 1):
        P.append(series_mul(P[-1], f, trunc=trunc))
    return P


def _all_exact(s):
    return all(c.is_exact for c in s.coeffs)


def koenigs(sys, trunc):
    """Koenigs linearisation h with h(f(x)) = lam*h(x) mod x^(trunc+1)."""
    if sys.M != 1:
        raise DomainViolation("Koenigs linearisation needs M = 1; use boettcher")
    f = sys.f
    field = sys.field
    if not f.polynomial and f.trunc < trunc:
        raise PrecisionExhausted(f"map known to order {f.trunc} < {trunc}")
    vlam = sys.vlam
    if field.is_padic and not _all_exact(f):
        need = trunc * vlam + KOENIGS_SAFETY_MARGIN
        if field.precision_cap <= need:
            raise PrecisionExhausted(
                f"precision_cap {field.precision_cap} must exceed T*v(lambda) + "
                f"{KOENIGS_SAFETY_MARGIN} = {need}")
    lam = sys.lam
    P = _power_table(f, max(trunc - 1, 1), trunc)
    h = [field.zero(), field.one()]
    lam_pow = lam
    for N in range(2, trunc + 1):
        lam_pow = lam_pow * lam
        S = fsum([h[j] * P[j].coefficient(N) for j in range(1, N)], field)
        h.append(S * inv(lam - lam_pow))
    out = TruncatedSeries(field, h[:trunc + 1], trunc)
    # |h_N| <= |lam|^(1-N) bounds the unknown tail
    out.tail = (vlam, -vlam)
    return out


def series_inverse(q, trunc):
    """1/q as a series, q(0) invertible."""
    field = q.field
    q0inv = inv(q.coefficient(0))
    b = [q0inv]
    for k in range(1, trunc + 1):
        s = fsum([q.coefficient(i) * b[k - i] for i in range(1, k + 1)
                  if i <= q.trunc or q.polynomial], field)
        b.append(-(s * q0inv))
    return TruncatedSeries(field, b, trunc)


def koenigs_inverse(h, trunc):
    """Compositional inverse g of h (h_1 = 1): h(g(x)) = x mod x^(trunc+1).

    Lagrange inversion: g_N = [x^(N-1)] (x/h(x))**N / N.
    """
    field = h.field
    h1 = h.coefficient(1)
    if not (h1 - 1).is_zero or not h.coefficient(0).is_zero:
        raise ValueError("koenigs_inverse needs h = x + O(x^2)")
    T = trunc if h.polynomial else min(trunc, h.trunc)
    # q = h/x, known to order T - 1
    q = TruncatedSeries(field, [h.coefficient(i) for i in range(1, T + 1)], T - 1)
    phi = series_inverse(q, T - 1)
    g = [field.zero()]
    power = TruncatedSeries.constant(field, 1)
    for N in range(1, T + 1):
        power = series_mul(power, phi, trunc=T - 1)
        g.append(power.coefficient(N - 1) * inv(field(N)))
    return TruncatedSeries(field, g, T)


def boettcher(sys, trunc):
    """Boettcher coordinate h with h(f(x)) = lam*h(x)**M mod x^(trunc+1).

    Needs characteristic zero, which both backends have.  When f is only
    known to order ``trunc`` the coefficients of h are determined up to
    ``trunc - M + 1``, which is all the functional equation sees.  The
    conjugacy converges on the disc of radius ``|M*lam|``; that radius is
    not checked here, only the equation to truncation order.
    """
    if sys.M < 2:
        raise DomainViolation("Boettcher coordinate needs M >= 2; use koenigs")
    f, M, lam, field = sys.f, sys.M, sys.lam, sys.field
    if f.polynomial:
        Tn = trunc
    else:
        if f.trunc < trunc:
            raise PrecisionExhausted(f"map known to order {f.trunc} < {trunc}")
        Tn = trunc - M + 1
    Tn = max(Tn, 1)
    D = Tn + M - 1
    P = _power_table(f, max(D // M, 1), D)
    Mlam_inv = inv(lam * M)
    h = [field.zero(), field.one()]
    for n in range(2, Tn + 1):
        N = n + M - 1
        A = fsum([h[j] * P[j].coefficient(N) for j in range(1, N // M + 1)], field)
        partial = TruncatedSeries(field, h, n - 1, polynomial=True)
        B = partial
        for _ in range(M - 1):
            B = series_mul(B, partial, trunc=N)
        h.append((A - lam * B.coefficient(N)) * Mlam_inv)
    out = TruncatedSeries(field, h, Tn)
    out.tail = None
    return out


def functional_residual(sys, h, trunc):
    """h(f) - lam*h (M = 1) or h(f) - lam*h**M (M > 1), truncated at trunc."""
    hf = compose(h, sys.f, trunc=trunc)
    if sys.M == 1:
        rhs = h * sys.lam
    else:
        rhs = h
        for _ in range(sys.M - 1):
            rhs = series_mul(rhs, h, trunc=trunc)
        rhs = rhs * sys.lam
    T = min(trunc, hf.trunc, rhs.trunc)
    return (hf.truncate(T) - rhs.truncate(T)).truncate(T)


def iterate_series(f, ell, trunc):
    """f composed with itself ``ell`` times (identity for ell = 0)."""
    out = TruncatedSeries.x(f.field, trunc)
    for _ in range(ell):
        out = compose(f, out, trunc=trunc)
    return out


def compositions(N, parts):
    """Compositions of N into ``parts`` positive integers, lexicographic order."""
    if parts == 0:
        if N == 0:
            yield ()
        return
    if parts == 1:
        if N >= 1:
            yield (N,)
        return
    for first in range(1, N - parts + 2):
        for rest in compositions(N - first, parts - 1):
            yield (first,) + rest
