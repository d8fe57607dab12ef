"""Truncated power series in one variable and exact polynomials in several.

A :class:`TruncatedSeries` stores coefficients ``0..trunc``.  Beyond
``trunc`` the coefficients are unknown unless ``polynomial`` is set, in
which case they are zero.  For unknown tails, ``tail = (c, d)`` records the
lower bound ``v(coeff_N) >= c + d*N`` used to bound evaluation error; the
default ``(0, 0)`` says the series lies in the unit-ball Tate algebra R<x>.

Truncation bookkeeping follows x-adic orders: when ``s`` starts at ``x**ms``
and ``t`` at ``x**mt``, the product is known up to ``min(Ts + mt, Tt + ms)``.
"""
from orbitrel.errors import (ConstantTermNonzero, EmptyInput, OutsideConvergenceControl,
                             PrecisionExhausted, SchemaError)
from orbitrel.valued_field import (INF, ValuedElement, element_from_json, element_to_json,
                                   fsum, mul)

__all__ = ["TruncatedSeries", "MultiPoly", "gauss_norm_valuation", "compose", "eval_poly",
           "eval_series", "DEFAULT_TRUNC"]

DEFAULT_TRUNC = 32


def _floor(c):
    # smallest valuation this coefficient can have
    if c.val is not INF:
        return c.val
    return c.absprec


class TruncatedSeries:
    __slots__ = ("field", "coeffs", "trunc", "polynomial", "tail")

    def __init__(self, field, coeffs, trunc=None, polynomial=False, tail=(0, 0)):
        coeffs = [field(c) for c in coeffs]
        if trunc is None:
            trunc = max(len(coeffs) - 1, 0)
        if trunc < 0:
            raise ValueError("trunc must be nonnegative")
        if len(coeffs) > trunc + 1:
            dropped = coeffs[trunc + 1:]
            coeffs = coeffs[:trunc + 1]
            if polynomial and any(not (c.val is INF and c.is_exact) for c in dropped):
                polynomial = False
        zero = field.zero()
        coeffs.extend([zero] * (trunc + 1 - len(coeffs)))
        self.field = field
        self.coeffs = tuple(coeffs)
        self.trunc = trunc
        self.polynomial = bool(polynomial)
        self.tail = None if polynomial else tail

    @classmethod
    def from_terms(cls, field, terms, trunc, polynomial=False):
        """Series from ``{degree: coefficient}``."""
        coeffs = [field.zero()] * (trunc + 1)
        for i, c in terms.items():
            if i <= trunc:
                coeffs[i] = field(c)
            elif polynomial:
                raise ValueError("polynomial term beyond trunc")
        return cls(field, coeffs, trunc, polynomial)

    @classmethod
    def x(cls, field, trunc=DEFAULT_TRUNC):
        return cls.from_terms(field, {1: 1}, max(trunc, 1), polynomial=True)

    @classmethod
    def constant(cls, field, c):
        return cls(field, [field(c)], 0, polynomial=True)

    # structure

    @property
    def eff_trunc(self):
        return INF if self.polynomial else self.trunc

    def coefficient(self, i):
        if i <= self.trunc:
            return self.coeffs[i]
        if self.polynomial:
            return self.field.zero()
        raise PrecisionExhausted(f"coefficient {i} lies beyond truncation order {self.trunc}")

    def exact_order(self):
        """Number of leading coefficients that are exactly zero."""
        for i, c in enumerate(self.coeffs):
            if not (c.val is INF and c.is_exact):
                return i
        return INF if self.polynomial else self.trunc + 1

    def degree(self):
        if not self.polynomial:
            raise PrecisionExhausted("degree of a series with unknown tail")
        for i in range(self.trunc, -1, -1):
            c = self.coeffs[i]
            if not (c.val is INF and c.is_exact):
                return i
        return -1

    def is_zero(self):
        """True if every known coefficient vanishes (to precision)."""
        return all(c.val is INF for c in self.coeffs)

    def residual_valuation(self):
        """Smallest coefficient valuation, ``INF`` when all known coefficients vanish."""
        return min((c.val for c in self.coeffs), default=INF)

    def _bound(self):
        # (c, d) with v(coeff_i) >= c + d*i for every i, or None if unknown
        floors = [_floor(c) for c in self.coeffs if not (c.val is INF and c.is_exact)]
        g = min(floors) if floors else INF
        if self.polynomial:
            return (g if g is not INF else 0), 0
        if self.tail is None:
            return None
        c, d = self.tail
        return min(g, c) if g is not INF else c, min(d, 0)

    def truncate(self, trunc):
        if trunc >= self.trunc and not self.polynomial:
            return self
        poly = self.polynomial and self.degree() <= trunc
        out = TruncatedSeries(self.field, self.coeffs[:trunc + 1], trunc, poly)
        if not poly:
            out.tail = self._bound()
        return out

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        T = min(self.eff_trunc, other.eff_trunc)
        poly = T is INF
        if poly:
            T = max(self.trunc, other.trunc)
        coeffs = [self.coefficient(i) + other.coefficient(i) for i in range(T + 1)]
        out = TruncatedSeries(self.field, coeffs, T, poly)
        if not poly:
            out.tail = _combine_sum(self._bound(), other._bound())
        return out

    __radd__ = __add__

    def __neg__(self):
        out = TruncatedSeries(self.field, [-c for c in self.coeffs], self.trunc, self.polynomial)
        out.tail = self.tail
        return out

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        c = self.field(other)
        out = TruncatedSeries(self.field, [c * a for a in self.coeffs], self.trunc, self.polynomial)
        if out.tail is not None and self.tail is not None and not out.polynomial:
            cb, db = self.tail
            out.tail = (cb + _floor(c) if _floor(c) is not INF else cb, db)
        return out

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = TruncatedSeries.constant(self.field, 1)
        for _ in range(k):
            result = series_mul(result, self)
        return result

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            if other.field != self.field:
                raise ValueError("series over different fields")
            return other
        return TruncatedSeries.constant(self.field, self.field(other))

    def derivative(self):
        coeffs = [self.coeffs[i] * i for i in range(1, self.trunc + 1)]
        if not coeffs:
            coeffs = [self.field.zero()]
        out = TruncatedSeries(self.field, coeffs, max(self.trunc - 1, 0), self.polynomial)
        if not out.polynomial and self.tail is not None:
            out.tail = self.tail
        return out

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.field, self.coeffs, self.trunc, self.polynomial, self.tail) == \
            (other.field, other.coeffs, other.trunc, other.polynomial, other.tail)

    def __hash__(self):
        return hash((self.field, self.coeffs, self.trunc, self.polynomial))

    def __repr__(self):
        terms = [f"({c!r})*x^{i}" for i, c in enumerate(self.coeffs) if c.val is not INF]
        tail = "" if self.polynomial else f" + O(x^{self.trunc + 1})"
        return "TruncatedSeries(" + (" + ".join(terms) or "0") + tail + ")"

    # serialization

    def to_json(self):
        out = {"trunc": str(self.trunc), "polynomial": self.polynomial,
               "terms": [{"exp": str(i), "coeff": element_to_json(c)}
                         for i, c in enumerate(self.coeffs)
                         if not (c.val is INF and c.is_exact)]}
        if not self.polynomial and self.tail != (0, 0):
            out["tail"] = None if self.tail is None else [_int_str(v) for v in self.tail]
        return out

    @classmethod
    def from_json(cls, field, obj):
        try:
            trunc = int(obj["trunc"])
            terms = {}
            for t in obj["terms"]:
                e = int(t["exp"])
                if e < 0 or e > trunc or e in terms:
                    raise SchemaError(f"bad series exponent {e}")
                terms[e] = element_from_json(field, t["coeff"])
            out = cls.from_terms(field, terms, trunc, bool(obj.get("polynomial", False)))
            if not out.polynomial and "tail" in obj:
                out.tail = None if obj["tail"] is None else tuple(_int_read(v) for v in obj["tail"])
            return out
        except SchemaError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad series: {exc}") from exc


def _int_str(v):
    return "inf" if v is INF else str(v)


def _int_read(v):
    return INF if v == "inf" else int(v)


def _combine_sum(a, b):
    if a is None or b is None:
        return None
    return min(a[0], b[0]), min(a[1], b[1])


def _combine_prod(a, b):
    if a is None or b is None:
        return None
    return a[0] + b[0], min(a[1], b[1])


def series_mul(s, t, trunc=None):
    if s.field != t.field:
        raise ValueError("series over different fields")
    ms, mt = s.exact_order(), t.exact_order()
    field = s.field
    if ms is INF or mt is INF:
        return TruncatedSeries(field, [], 0, polynomial=True)
    T = min(s.eff_trunc + mt, t.eff_trunc + ms)
    poly = T is INF
    if poly:
        T = s.degree() + t.degree()
    if trunc is not None and trunc < T:
        T = trunc
        poly = poly and s.degree() + t.degree() <= T
    sc = [s.coefficient(i) if i <= s.trunc or s.polynomial else None for i in range(T + 1)]
    tc = [t.coefficient(j) if j <= t.trunc or t.polynomial else None for j in range(T + 1)]
    coeffs = []
    for N in range(T + 1):
        prods = []
        for i in range(ms, N - mt + 1):
            a = sc[i]
            b = tc[N - i]
            if a.val is INF and a.is_exact or b.val is INF and b.is_exact:
                continue
            prods.append(mul(a, b))
        coeffs.append(fsum(prods, field))
    out = TruncatedSeries(field, coeffs, T, poly)
    if not poly:
        out.tail = _combine_prod(s._bound(), t._bound())
    return out


def gauss_norm_valuation(s):
    """Additive Gauss norm: the minimum coefficient valuation."""
    if isinstance(s, MultiPoly):
        vals = [c.val for c in s.terms.values() if c.val is not INF]
    else:
        vals = [c.val for c in s.coeffs if c.val is not INF]
    if not vals:
        raise EmptyInput("Gauss norm of the zero series")
    return min(vals)


def compose(outer, inner, trunc=None):
    """``outer(inner(x))``; the inner series must have zero constant term."""
    if outer.field != inner.field:
        raise ValueError("series over different fields")
    if inner.coeffs[0].val is not INF:
        raise ConstantTermNonzero("inner series has a nonzero constant term")
    field = outer.field
    if inner.coeffs[0].is_exact:
        m = inner.exact_order()
    else:
        rest = TruncatedSeries(field, [field.zero()] + list(inner.coeffs[1:]), inner.trunc,
                               inner.polynomial)
        rest.tail = inner.tail
        inner = rest
        m = inner.exact_order()
    if m is INF:
        return TruncatedSeries(field, [outer.coefficient(0)], 0, polynomial=True)
    T = min(inner.eff_trunc, m * (outer.eff_trunc + 1) - 1)
    poly = T is INF
    D = outer.degree() if outer.polynomial else outer.trunc
    if poly:
        T = max(D, 0) * inner.degree()
    if trunc is not None and trunc < T:
        T = trunc
        poly = False
    if D < 0:
        return TruncatedSeries(field, [], 0, polynomial=True)
    D = min(D, T // m)
    result = TruncatedSeries.constant(field, outer.coefficient(D))
    for i in range(D - 1, -1, -1):
        result = series_mul(result, inner, trunc=T) + TruncatedSeries.constant(field, outer.coefficient(i))
    result = result.truncate(T) if result.trunc > T else result
    coeffs = list(result.coeffs) + [field.zero()] * (T + 1 - len(result.coeffs))
    out = TruncatedSeries(field, coeffs, T, poly and result.polynomial)
    if not out.polynomial:
        ib = inner._bound()
        ob = outer._bound()
        out.tail = ob if (ib is not None and ib[0] >= 0 and ib[1] == 0) else None
    return out


def eval_series(s, x):
    """``s(x)`` for ``v(x) >= 1``; an unknown tail caps the absolute precision."""
    if x.field != s.field:
        raise ValueError("point and series over different fields")
    if x.val is INF:
        return s.coefficient(0)
    if x.val <= 0:
        raise OutsideConvergenceControl(f"v(x) = {x.val} <= 0")
    acc = s.coeffs[s.trunc]
    for i in range(s.trunc - 1, -1, -1):
        acc = acc * x + s.coeffs[i]
    if s.polynomial:
        return acc
    if s.tail is None:
        raise OutsideConvergenceControl("series tail is unbounded")
    c, d = s.tail
    if d + x.val <= 0:
        raise OutsideConvergenceControl(f"tail bound does not decay at v(x) = {x.val}")
    bound = c + (d + x.val) * (s.trunc + 1)
    return fsum([acc, ValuedElement._inexact_zero(s.field, bound)], s.field)


def _glex(I):
    return (sum(I), I)


class MultiPoly:
    """Exact polynomial ``sum g_I x^I`` in ``nvars`` variables."""

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field, nvars, terms=None):
        self.field = field
        self.nvars = nvars
        clean = {}
        for I, c in (terms or {}).items():
            I = tuple(int(i) for i in I)
            if len(I) != nvars or min(I, default=0) < 0:
                raise ValueError(f"bad exponent {I} for {nvars} variables")
            c = field(c)
            if c.val is INF and c.is_exact:
                continue
            clean[I] = c
        self.terms = {I: clean[I] for I in sorted(clean, key=_glex)}

    @classmethod
    def variable(cls, field, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls(field, nvars, {tuple(e): 1})

    @classmethod
    def constant(cls, field, nvars, c):
        return cls(field, nvars, {(0,) * nvars: c})

    def in_unit_ball(self):
        return all(_floor(c) >= 0 for c in self.terms.values())

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(sum(I) == 0 for I in self.terms)

    def monomial_content(self):
        """Componentwise minimum exponent (the largest monomial factor)."""
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(I[k] for I in self.terms) for k in range(self.nvars))

    def divide_monomial(self, K):
        return MultiPoly(self.field, self.nvars,
                         {tuple(i - k for i, k in zip(I, K)): c for I, c in self.terms.items()})

    def total_degree(self):
        return max((sum(I) for I in self.terms), default=-1)

    def __add__(self, other):
        other = self._coerce(other)
        d = dict(self.terms)
        for I, c in other.terms.items():
            d[I] = d[I] + c if I in d else c
        return MultiPoly(self.field, self.nvars, d)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.field, self.nvars, {I: -c for I, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        acc = {}
        for I, a in self.terms.items():
            for J, b in other.terms.items():
                K = tuple(i + j for i, j in zip(I, J))
                acc.setdefault(K, []).append(a * b)
        return MultiPoly(self.field, self.nvars, {K: fsum(v, self.field) for K, v in acc.items()})

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = MultiPoly.constant(self.field, self.nvars, 1)
        for _ in range(k):
            result = result * self
        return result

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.field != self.field or other.nvars != self.nvars:
                raise ValueError("incompatible polynomials")
            return other
        return MultiPoly.constant(self.field, self.nvars, other)

    def substitute(self, i, value):
        """Fix ``x_i = value``; returns a polynomial in the remaining variables."""
        value = self.field(value)
        acc = {}
        for I, c in self.terms.items():
            J = I[:i] + I[i + 1:]
            acc.setdefault(J, []).append(c * value ** I[i])
        return MultiPoly(self.field, self.nvars - 1, {J: fsum(v, self.field) for J, v in acc.items()})

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (self.field, self.nvars, self.terms) == (other.field, other.nvars, other.terms)

    def __hash__(self):
        return hash((self.field, self.nvars, tuple(self.terms.items())))

    def __repr__(self):
        parts = []
        for I, c in self.terms.items():
            mono = "*".join(f"x{k + 1}^{e}" if e > 1 else f"x{k + 1}" for k, e in enumerate(I) if e)
            parts.append(f"({c!r})" + ("*" + mono if mono else ""))
        return "MultiPoly(" + (" + ".join(parts) or "0") + ")"

    def to_json(self):
        return {"nvars": str(self.nvars),
                "terms": [{"exp": [str(e) for e in I], "coeff": element_to_json(c)}
                          for I, c in self.terms.items()]}

    @classmethod
    def from_json(cls, field, obj):
        try:
            n = int(obj["nvars"])
            terms = {}
            for t in obj["terms"]:
                I = tuple(int(e) for e in t["exp"])
                if len(I) != n or min(I, default=0) < 0 or I in terms:
                    raise SchemaError(f"bad exponent {list(I)}")
                terms[I] = element_from_json(field, t["coeff"])
            return cls(field, n, terms)
        except SchemaError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad polynomial: {exc}") from exc


def eval_poly(poly, point):
    """``G(b)`` for a point whose coordinates all have positive valuation."""
    if len(point) != poly.nvars:
        raise ValueError("point has the wrong dimension")
    for b in point:
        if b.val is not INF and b.val <= 0:
            raise OutsideConvergenceControl(f"coordinate with v = {b.val} <= 0")
    powers = [{0: poly.field.one()} for _ in point]

    def pw(k, e):
        cache = powers[k]
        if e not in cache:
            cache[e] = point[k] ** e
        return cache[e]

    vals = []
    for I, c in poly.terms.items():
        t = c
        for k, e in enumerate(I):
            if e:
                t = t * pw(k, e)
        vals.append(t)
    return fsum(vals, poly.field)
