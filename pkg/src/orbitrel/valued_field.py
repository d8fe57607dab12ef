"""Arithmetic in complete discretely valued fields.

Two backends are provided:

``padic``
    The p-adic numbers Q_p with capped relative precision.  A nonzero
    element is ``p**val * unit`` where ``unit`` is an integer coprime to p
    known modulo ``p**prec``.

``laurent``
    Formal Laurent series Q((T)) with exact rational coefficients.  A
    nonzero element is ``T**val * (n_0 + n_1 T + ...) / den`` with the
    coefficient window known up to ``T**(val + prec)``.

Independently of the window, an element may carry an *exact shadow*: its
exact value as a rational number (padic) or as a finite Laurent polynomial
(laurent).  Arithmetic between exact elements stays exact, so zero tests on
them are decisions rather than guesses.  Elements without a shadow are only
known to their window, and zero tests on them report "zero to precision".

Absolute values never appear; ``|x| < |y|`` is ``v(x) > v(y)``.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
import math

import flint as _flint
import gmpy2

from orbitrel.errors import DivisionByZero, PrecisionExhausted, SchemaError
from orbitrel.kernels import conv_trunc

__all__ = [
    "INF", "FieldSpec", "ValuedElement",
    "add", "mul", "neg", "inv", "valuation", "is_zero_to_precision",
    "eq_to_precision", "exactly_equal", "decide_zero", "fsum",
    "element_to_json", "element_from_json",
]

# exact shadows larger than this are dropped and the element becomes windowed
SHADOW_BITS = 1 << 24
SHADOW_TERMS = 1 << 15

_mpq = gmpy2.mpq
_fmpq_poly = _flint.fmpq_poly
_MPQ = type(_mpq(0))


def _q(x):
    # exact rational as an mpq, which is much faster than Fraction
    if isinstance(x, _MPQ):
        return x
    x = Fraction(x)
    return _mpq(x.numerator, x.denominator)


@total_ordering
class _Infinity:
    """The valuation of zero.  Compares above every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ArithmeticError("INF - INF")
        return self

    def __mul__(self, other):
        if other is self or (isinstance(other, int) and other > 0):
            return self
        raise ArithmeticError(f"INF * {other!r}")

    __rmul__ = __mul__

    def __hash__(self):
        return hash("orbitrel.INF")

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def _is_prime(n):
    if n < 2:
        return False
    return bool(gmpy2.is_prime(n, 50))


@lru_cache(maxsize=4096)
def _ppow(p, n):
    return p ** n


def _remove(n, p):
    """(v_p(n), n / p**v_p(n)) for a nonzero integer n."""
    n = gmpy2.mpz(n)
    if n % p:
        return 0, n
    # square up to the largest p**(2**k) dividing n, then strip greedily;
    # gmpy2.remove divides one factor at a time, which is slow for big v
    pows = [gmpy2.mpz(p)]
    while True:
        q, r = gmpy2.f_divmod(n, pows[-1])
        if r:
            break
        n = q
        pows.append(pows[-1] * pows[-1])
    v = (1 << (len(pows) - 1)) - 1
    for k in range(len(pows) - 2, -1, -1):
        q, r = gmpy2.f_divmod(n, pows[k])
        if not r:
            n = q
            v += 1 << k
    return v, n


@dataclass(frozen=True)
class FieldSpec:
    """Which field we compute in, and how many digits each element keeps."""

    backend: str
    prime: int = None
    precision_cap: int = 40

    def __post_init__(self):
        if self.backend not in ("padic", "laurent"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "padic":
            if self.prime is None or not _is_prime(self.prime):
                raise ValueError(f"padic backend needs a prime, got {self.prime!r}")
        elif self.prime is not None:
            raise ValueError("laurent backend takes no prime")
        if not isinstance(self.precision_cap, int) or self.precision_cap < 1:
            raise ValueError("precision_cap must be a positive integer")

    @classmethod
    def padic(cls, p, precision_cap=40):
        return cls("padic", p, precision_cap)

    @classmethod
    def laurent(cls, precision_cap=40):
        return cls("laurent", None, precision_cap)

    @property
    def is_padic(self):
        return self.backend == "padic"

    @property
    def _ops(self):
        return _PADIC if self.is_padic else _LAURENT

    def __str__(self):
        if self.is_padic:
            return f"Q_{self.prime} (cap {self.precision_cap})"
        return f"Q((T)) (cap {self.precision_cap})"

    # constructors

    def __call__(self, value):
        if isinstance(value, ValuedElement):
            if value.field != self:
                raise ValueError("element belongs to a different field")
            return value
        return self.from_rational(value)

    def zero(self):
        return ValuedElement._exact_zero(self)

    def one(self):
        return self.from_rational(1)

    def uniformizer(self):
        """p for Q_p, T for Q((T)); always exact."""
        if self.is_padic:
            return self.from_rational(self.prime)
        return self.from_laurent({1: 1})

    def from_rational(self, q):
        q = _q(q)
        if self.is_padic:
            return ValuedElement._from_shadow(self, _PAdicOps.shadow_from_rational(self.prime, q))
        return ValuedElement._from_shadow(self, _LaurentOps.shadow_from_terms({0: q}))

    def from_laurent(self, terms):
        """Exact finite Laurent polynomial from ``{exponent: coefficient}``."""
        if self.is_padic:
            p = self.prime
            return self.from_rational(sum(_q(c) * _mpq(p) ** e for e, c in terms.items()))
        return ValuedElement._from_shadow(self, _LaurentOps.shadow_from_terms(terms))

    def from_digits(self, val, digits, prec=None, exact=False):
        """Element ``u**val * sum(d_i u**i)`` from its digits (u the uniformizer).

        ``prec`` is the number of known relative digits; it defaults to the
        precision cap.  With ``exact=True`` the digits are the complete
        expansion and the element carries an exact shadow.
        """
        digits = list(digits)
        if exact:
            if self.is_padic:
                p = self.prime
                q = _mpq(sum(int(d) * p ** i for i, d in enumerate(digits)))
                q *= _mpq(p) ** val
                return self.from_rational(q)
            return self.from_laurent({val + i: d for i, d in enumerate(digits)})
        if prec is None:
            prec = self.precision_cap
        if prec < 1:
            raise ValueError("prec must be positive for a windowed element")
        digits = digits[:prec]
        if self.is_padic:
            p = self.prime
            S = 0
            for d in reversed(digits):
                S = S * p + int(d)
            return _PADIC.normalize(self, val, S, prec)
        fr = [Fraction(d) for d in digits]
        den = math.lcm(*[f.denominator for f in fr]) if fr else 1
        nums = [f.numerator * (den // f.denominator) for f in fr]
        return _LAURENT.normalize(self, val, nums, den, prec)

    def random_element(self, rng, val_range=(0, 5), prec=None, exact=False, coeff_bound=9):
        """Random nonzero element with valuation drawn from ``val_range``."""
        val = rng.randint(*val_range)
        n = prec or self.precision_cap
        if self.is_padic:
            p = self.prime
            digits = [rng.randrange(1, p)] + [rng.randrange(p) for _ in range(n - 1)]
        else:
            digits = [Fraction(rng.choice([i for i in range(-coeff_bound, coeff_bound + 1) if i]),
                               rng.randint(1, 3))]
            digits += [Fraction(rng.randint(-coeff_bound, coeff_bound), rng.randint(1, 3))
                       for _ in range(n - 1)]
        if exact:
            if not self.is_padic:
                digits = digits[:rng.randint(1, 4)]
            else:
                digits = digits[:rng.randint(1, 6)]
            return self.from_digits(val, digits, exact=True)
        return self.from_digits(val, digits, prec=n)

    def to_json(self):
        if self.is_padic:
            return {"backend": "padic", "prime": str(self.prime), "precision_cap": str(self.precision_cap)}
        return {"backend": "laurent", "precision_cap": str(self.precision_cap)}

    @classmethod
    def from_json(cls, obj):
        try:
            backend = obj["backend"]
            cap = int(obj.get("precision_cap", 40))
            if backend == "padic":
                return cls.padic(int(obj["prime"]), cap)
            if backend == "laurent":
                return cls.laurent(cap)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad field spec: {exc}") from exc
        raise SchemaError(f"unknown backend {backend!r}")


class ValuedElement:
    """An immutable element of a :class:`FieldSpec` field.

    ``val`` is the valuation (``INF`` for zero), ``prec`` the number of known
    relative digits, ``absprec`` the absolute precision (``INF`` when the
    exact value is known) and ``shadow`` the exact value if any.  A zero
    with finite ``absprec`` is a zero to precision: every known digit
    vanished but the value is only known modulo ``u**absprec``.
    """

    __slots__ = ("field", "val", "unit", "prec", "absprec", "shadow", "_hash")

    def __init__(self, field, val, unit, prec, absprec, shadow):
        self.field = field
        self.val = val
        self.unit = unit
        self.prec = prec
        self.absprec = absprec
        self.shadow = shadow
        self._hash = None

    def __setattr__(self, name, value):
        if name != "_hash" and hasattr(self, "_hash"):
            raise AttributeError("ValuedElement is immutable")
        object.__setattr__(self, name, value)

    # internal constructors

    @classmethod
    def _exact_zero(cls, field):
        return cls(field, INF, None, 0, INF, (0, _mpq(0)) if field.is_padic else (0, _fmpq_poly()))

    @classmethod
    def _inexact_zero(cls, field, absprec):
        return cls(field, INF, None, 0, absprec, None)

    @classmethod
    def _from_shadow(cls, field, shadow):
        ops = field._ops
        if ops.shadow_is_zero(shadow):
            return cls._exact_zero(field)
        if ops.shadow_too_big(shadow):
            return ops.window_from_shadow(field, shadow)
        val, unit = ops.shadow_window(field, shadow, field.precision_cap)
        return cls(field, val, unit, field.precision_cap, INF, shadow)

    # queries

    @property
    def is_exact(self):
        return self.absprec is INF

    @property
    def is_zero(self):
        """True if every known digit vanishes (exact zero or zero to precision)."""
        return self.val is INF

    @property
    def known_precision(self):
        return self.prec

    def digits(self):
        """Known unit digits, lowest first, trailing zeros trimmed."""
        if self.val is INF:
            return ()
        d = self.field._ops.digits(self.field, self.unit, self.prec)
        while d and not d[-1]:
            d = d[:-1]
        return tuple(d)

    def windowed(self, n=None):
        """The same value known to ``n`` relative digits, exact shadow dropped.

        ``n`` defaults to the stored precision; an exact element can supply
        more digits than the cap, which makes cheap zero screens sharper.
        """
        if self.shadow is None or self.val is INF:
            return self
        n = self.prec if n is None else n
        return ValuedElement(self.field, self.val, self.window(n), n, self.val + n, None)

    def window(self, n):
        """The unit known to ``n`` relative digits (``n <= prec`` unless exact)."""
        if self.shadow is not None:
            if n <= self.prec:
                return self.field._ops.truncate_unit(self.field, self.unit, n)
            return self.field._ops.shadow_window(self.field, self.shadow, n)[1]
        if n > self.prec:
            raise PrecisionExhausted(f"asked for {n} digits, only {self.prec} known")
        return self.field._ops.truncate_unit(self.field, self.unit, n)

    def to_rational(self):
        """Exact rational value (padic, or laurent constants only)."""
        if self.shadow is None:
            raise PrecisionExhausted("element is not known exactly")
        if self.field.is_padic:
            v, u = self.shadow
            return _fraction(u) * Fraction(self.field.prime) ** v
        terms = _LaurentOps.shadow_terms(self.shadow)
        if not terms:
            return Fraction(0)
        if len(terms) == 1 and terms[0][0] == 0:
            return terms[0][1]
        raise ValueError("laurent element is not a constant")

    # protocol

    def _key(self):
        # the window determines the hash; the shadow only refines equality
        return (self.field, self.val, self.unit, self.prec, self.absprec)

    def __eq__(self, other):
        if not isinstance(other, ValuedElement):
            return NotImplemented
        return self._key() == other._key() and self.shadow == other.shadow

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self._key()))
        return self._hash

    def __repr__(self):
        f = self.field
        base = str(f.prime) if f.is_padic else "T"
        if self.val is INF:
            if self.is_exact:
                return "0"
            return f"O({base}^{self.absprec})"
        tag = "exact" if self.is_exact else f"prec {self.prec}"
        d = ", ".join(str(x) for x in self.digits())
        return f"{base}^{self.val}*[{d}] ({tag})"

    def _coerce(self, other):
        if isinstance(other, ValuedElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction, _MPQ)):
            return self.field.from_rational(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else add(self, neg(other))

    def __rsub__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else add(other, neg(self))

    def __mul__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else mul(self, inv(other))

    def __rtruediv__(self, other):
        other = self._coerce(other)
        return NotImplemented if other is None else mul(other, inv(self))

    def __neg__(self):
        return neg(self)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return inv(self) ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = mul(result, base)
            k >>= 1
            if k:
                base = mul(base, base)
        return result


# backend operations


class _PAdicOps:
    @staticmethod
    def normalize(field, v0, S, n):
        """Element ``p**v0 * S`` known modulo ``p**(v0 + n)``."""
        p = field.prime
        S %= _ppow(p, n)
        if S == 0:
            return ValuedElement._inexact_zero(field, v0 + n)
        k, u = _remove(S, p)
        prec = min(n - k, field.precision_cap)
        return ValuedElement(field, v0 + k, u % _ppow(p, prec), prec, v0 + k + prec, None)

    @staticmethod
    def truncate_unit(field, unit, n):
        return unit % _ppow(field.prime, n)

    @staticmethod
    def digits(field, unit, prec):
        p = field.prime
        out = []
        for _ in range(prec):
            unit, d = divmod(unit, p)
            out.append(d)
        return out

    # an exact shadow is (v, u) meaning p**v * u, u a rational prime to p
    # (u = 0 for zero), so products never need the valuation recomputed

    @staticmethod
    def shadow_from_rational(p, q):
        q = _q(q)
        if not q:
            return (0, _mpq(0))
        vn, n = _remove(q.numerator, p)
        vd, d = _remove(q.denominator, p)
        return (vn - vd, _mpq(n, d))

    @staticmethod
    def shadow_is_zero(sh):
        return sh[1] == 0

    @staticmethod
    def shadow_too_big(sh):
        u = sh[1]
        return u.numerator.bit_length() + u.denominator.bit_length() > SHADOW_BITS

    @staticmethod
    def shadow_window(field, sh, n):
        v, u = sh
        mod = gmpy2.mpz(_ppow(field.prime, n))
        num = u.numerator % mod
        den = u.denominator % mod
        return v, int(num * gmpy2.invert(den, mod) % mod)

    @classmethod
    def window_from_shadow(cls, field, sh):
        val, unit = cls.shadow_window(field, sh, field.precision_cap)
        return ValuedElement(field, val, unit, field.precision_cap, val + field.precision_cap, None)

    @staticmethod
    def shadow_add(field, a, b):
        if a[1] == 0:
            return b
        if b[1] == 0:
            return a
        p = field.prime
        if a[0] > b[0]:
            a, b = b, a
        if a[0] < b[0]:
            return (a[0], a[1] + b[1] * _ppow(p, b[0] - a[0]))
        t = a[1] + b[1]
        if t == 0:
            return (0, t)
        k, n = _remove(t.numerator, p)
        return (a[0] + k, _mpq(n, t.denominator)) if k else (a[0], t)

    @staticmethod
    def shadow_mul(a, b):
        if a[1] == 0 or b[1] == 0:
            return (0, _mpq(0))
        return (a[0] + b[0], a[1] * b[1])

    @staticmethod
    def shadow_neg(a):
        return (a[0], -a[1])

    @staticmethod
    def shadow_inv(a):
        return (-a[0], 1 / a[1])

    @staticmethod
    def combine(field, v0, n, parts):
        """Sum of ``u**(v - v0) * w`` over ``parts = [(v, w)]`` modulo ``p**n``."""
        p = field.prime
        S = 0
        for v, w in parts:
            S += w * _ppow(p, v - v0)
        return _PAdicOps.normalize(field, v0, S, n)

    @staticmethod
    def mul_units(field, val, a, b, n):
        return ValuedElement(field, val, (a * b) % _ppow(field.prime, n), n, val + n, None)

    @staticmethod
    def inv_unit(field, val, u, n):
        mod = _ppow(field.prime, n)
        return ValuedElement(field, -val, pow(u, -1, mod), n, -val + n, None)

    @staticmethod
    def neg_unit(field, val, u, n):
        return ValuedElement(field, val, (-u) % _ppow(field.prime, n), n, val + n, None)


class _LaurentOps:
    # a unit is (nums, den): coefficients nums[i] / den, nums[0] != 0, reduced

    @staticmethod
    def _reduce(nums, den):
        g = math.gcd(den, *nums)
        if den < 0:
            g = -g
        if g != 1:
            nums = [x // g for x in nums]
            den //= g
        return tuple(nums), den

    @classmethod
    def normalize(cls, field, v0, nums, den, n):
        """Element ``T**v0 * sum(nums[i] T**i) / den`` known up to ``T**(v0 + n)``."""
        k = 0
        lim = min(len(nums), n)
        while k < lim and nums[k] == 0:
            k += 1
        if k == lim:
            return ValuedElement._inexact_zero(field, v0 + n)
        prec = min(n - k, field.precision_cap)
        window = list(nums[k:k + prec])
        window.extend([0] * (prec - len(window)))
        unit = cls._reduce(window, den)
        return ValuedElement(field, v0 + k, unit, prec, v0 + k + prec, None)

    @staticmethod
    def truncate_unit(field, unit, n):
        nums, den = unit
        if n >= len(nums):
            return (tuple(nums) + (0,) * (n - len(nums)), den)
        return _LaurentOps._reduce(nums[:n], den)

    @staticmethod
    def digits(field, unit, prec):
        nums, den = unit
        return [Fraction(x, den) for x in nums[:prec]]

    # an exact shadow is (v, P) meaning T**v * P(T), with P(0) != 0 unless P = 0

    @staticmethod
    def shadow_is_zero(sh):
        return sh[1].is_zero()

    @staticmethod
    def shadow_too_big(sh):
        P = sh[1]
        if P.degree() >= SHADOW_TERMS:
            return True
        return P.numer().height_bits() * (P.degree() + 1) + int(P.denom()).bit_length() > SHADOW_BITS

    @classmethod
    def shadow_window(cls, field, sh, n):
        val, P = sh
        den = int(P.denom())
        num = P.numer()
        top = min(n, P.degree() + 1)
        nums = [int(num[i]) for i in range(top)] + [0] * (n - top)
        return val, cls._reduce(nums, den)

    @classmethod
    def window_from_shadow(cls, field, sh):
        val, unit = cls.shadow_window(field, sh, field.precision_cap)
        return ValuedElement(field, val, unit, field.precision_cap, val + field.precision_cap, None)

    @staticmethod
    def _strip(v, P):
        if P.is_zero():
            return (0, P)
        k = 0
        while P[k] == 0:
            k += 1
        if k:
            P = P.right_shift(k)
        return (v + k, P)

    @classmethod
    def shadow_add(cls, field, a, b):
        if a[1].is_zero():
            return b
        if b[1].is_zero():
            return a
        v = min(a[0], b[0])
        return cls._strip(v, a[1].left_shift(a[0] - v) + b[1].left_shift(b[0] - v))

    @staticmethod
    def shadow_mul(a, b):
        if a[1].is_zero() or b[1].is_zero():
            return (0, _fmpq_poly())
        return (a[0] + b[0], a[1] * b[1])

    @staticmethod
    def shadow_neg(a):
        return (a[0], -a[1])

    @staticmethod
    def shadow_inv(a):
        if a[1].degree() == 0:
            return (-a[0], _fmpq_poly([1 / a[1][0]]))
        return None

    @classmethod
    def shadow_from_terms(cls, terms):
        """Shadow of ``sum c T**e`` for ``{e: c}`` with rational c."""
        terms = {int(e): _q(c) for e, c in terms.items() if _q(c)}
        if not terms:
            return (0, _fmpq_poly())
        v = min(terms)
        coeffs = [0] * (max(terms) - v + 1)
        for e, c in terms.items():
            coeffs[e - v] = _flint.fmpq(int(c.numerator), int(c.denominator))
        return (v, _fmpq_poly(coeffs))

    @staticmethod
    def shadow_terms(sh):
        """``[(e, Fraction)]`` for the nonzero terms of a shadow."""
        v, P = sh
        out = []
        for i in range(P.degree() + 1):
            c = P[i]
            if c != 0:
                out.append((v + i, Fraction(int(c.p), int(c.q))))
        return out

    @classmethod
    def combine(cls, field, v0, n, parts):
        den = math.lcm(*[w[1] for _, w in parts])
        acc = [0] * n
        for v, (nums, d) in parts:
            s = v - v0
            scale = den // d
            for i, x in enumerate(nums[:n - s]):
                if x:
                    acc[s + i] += x * scale
        return cls.normalize(field, v0, acc, den, n)

    @classmethod
    def mul_units(cls, field, val, a, b, n):
        nums = conv_trunc(a[0], b[0], n)
        unit = cls._reduce(nums, a[1] * b[1])
        return ValuedElement(field, val, unit, n, val + n, None)

    @classmethod
    def inv_unit(cls, field, val, u, n):
        a, den = u
        a0 = a[0]
        # 1/A = sum C_k T^k / a0^(k+1), C_k = -sum_{i=1..k} a_i C_{k-i} a0^(i-1)
        C = [1]
        a0pow = [1]
        for i in range(1, n):
            a0pow.append(a0pow[-1] * a0)
        for k in range(1, n):
            s = 0
            for i in range(1, min(k, len(a) - 1) + 1):
                if a[i]:
                    s += a[i] * C[k - i] * a0pow[i - 1]
            C.append(-s)
        top = a0pow[n - 1] * a0
        nums = [C[k] * a0pow[n - 1 - k] * den for k in range(n)]
        unit = cls._reduce(nums, top)
        return ValuedElement(field, -val, unit, n, -val + n, None)

    @staticmethod
    def neg_unit(field, val, u, n):
        return ValuedElement(field, val, (tuple(-x for x in u[0]), u[1]), n, val + n, None)


_PADIC = _PAdicOps()
_LAURENT = _LaurentOps()


def _check(x, y):
    if x.field != y.field:
        raise ValueError("elements of different fields")


def _zero_absprec(x, other_val):
    # absolute precision of (inexact zero x) * (element of valuation other_val)
    return x.absprec + other_val


def fsum(xs, field=None):
    """Sum of elements with a single normalisation at the end."""
    xs = [x for x in xs if not (x.val is INF and x.absprec is INF)]
    if not xs:
        if field is None:
            raise ValueError("fsum of nothing needs a field")
        return field.zero()
    field = xs[0].field
    if len(xs) == 1:
        return xs[0]
    ops = field._ops
    if all(x.shadow is not None for x in xs):
        s = xs[0].shadow
        for x in xs[1:]:
            s = ops.shadow_add(field, s, x.shadow)
        return ValuedElement._from_shadow(field, s)
    absprec = min(x.absprec for x in xs)
    v0 = min(x.val for x in xs)
    if v0 is INF or v0 >= absprec:
        return ValuedElement._inexact_zero(field, absprec)
    n = absprec - v0
    # Only precision_cap relative digits survive normalisation, so work with
    # a narrower window and widen it only when cancellation eats into them.
    m = min(n, 2 * field.precision_cap)
    while True:
        parts = []
        for x in xs:
            if x.val is INF:
                continue
            s = x.val - v0
            if s < m:
                parts.append((x.val, x.window(m - s)))
        out = ops.combine(field, v0, m, parts)
        if m == n or (out.val is not INF and out.prec >= field.precision_cap):
            return out
        m = min(n, 2 * m)


def add(x, y):
    _check(x, y)
    return fsum([x, y], x.field)


def neg(x):
    if x.val is INF:
        return x
    if x.shadow is not None:
        return ValuedElement._from_shadow(x.field, x.field._ops.shadow_neg(x.shadow))
    return x.field._ops.neg_unit(x.field, x.val, x.unit, x.prec)


def mul(x, y):
    _check(x, y)
    field = x.field
    if (x.val is INF and x.is_exact) or (y.val is INF and y.is_exact):
        return field.zero()
    if x.val is INF or y.val is INF:
        if x.val is INF and y.val is INF:
            return ValuedElement._inexact_zero(field, x.absprec + y.absprec)
        z, o = (x, y) if x.val is INF else (y, x)
        return ValuedElement._inexact_zero(field, _zero_absprec(z, o.val))
    if x.shadow is not None and y.shadow is not None:
        return ValuedElement._from_shadow(field, field._ops.shadow_mul(x.shadow, y.shadow))
    n = min(x.prec if x.shadow is None else INF, y.prec if y.shadow is None else INF)
    return field._ops.mul_units(field, x.val + y.val, x.window(n), y.window(n), n)


def inv(x):
    field = x.field
    if x.val is INF:
        if x.is_exact:
            raise DivisionByZero("inverse of zero")
        raise PrecisionExhausted(f"inverse of a zero to precision {x!r}")
    if x.shadow is not None:
        s = field._ops.shadow_inv(x.shadow)
        if s is not None:
            return ValuedElement._from_shadow(field, s)
        n = field.precision_cap
    else:
        n = x.prec
    return field._ops.inv_unit(field, x.val, x.window(n), n)


def valuation(x):
    """v(x); ``INF`` for zero (exactly or to precision)."""
    return x.val


def is_zero_to_precision(x):
    return x.val is INF


def eq_to_precision(x, y):
    """True when x - y vanishes in every known digit.  Exactness is on ``(x - y).is_exact``."""
    return is_zero_to_precision(add(x, neg(y)))


def exactly_equal(x, y):
    """Exact equality; both operands must be known exactly."""
    _check(x, y)
    if x.shadow is None or y.shadow is None:
        raise PrecisionExhausted("exact equality needs exactly known operands")
    return x.shadow == y.shadow


def decide_zero(x):
    """True/False when zero-ness is certain, PrecisionExhausted when it is not."""
    if x.val is not INF:
        return False
    if x.is_exact:
        return True
    raise PrecisionExhausted(f"value vanishes to absolute precision {x.absprec} but is not known exactly")


# JSON


def _fraction(q):
    return Fraction(int(q.numerator), int(q.denominator))


def _num_str(q):
    q = _fraction(q) if isinstance(q, _MPQ) else Fraction(q)
    return {"num": str(q.numerator), "den": str(q.denominator)}


def _parse_rational(obj):
    if isinstance(obj, dict):
        return Fraction(int(obj["num"]), int(obj.get("den", 1)))
    if isinstance(obj, bool):
        raise SchemaError("boolean is not a number")
    if isinstance(obj, (int, str)):
        return Fraction(obj)
    raise SchemaError(f"cannot read rational from {obj!r}")


def element_to_json(x):
    """``{"val", "digits", "prec", "exact"}``; exact padic values add ``"value"``."""
    f = x.field
    if x.val is INF:
        return {"val": "inf", "digits": [], "prec": "0" if x.is_exact else str(x.absprec),
                "exact": x.is_exact}
    if f.is_padic:
        out = {"val": str(x.val), "digits": [str(d) for d in x.digits()], "prec": str(x.prec),
               "exact": x.is_exact}
        if x.is_exact:
            out["value"] = _num_str(x.to_rational())
        return out
    if x.is_exact:
        terms = _LaurentOps.shadow_terms(x.shadow)
        top = terms[-1][0]
        d = dict(terms)
        digits = [_num_str(d.get(e, 0)) for e in range(x.val, top + 1)]
        return {"val": str(x.val), "digits": digits, "prec": str(x.prec), "exact": True}
    return {"val": str(x.val), "digits": [_num_str(q) for q in x.digits()], "prec": str(x.prec),
            "exact": False}


def element_from_json(field, obj):
    """Inverse of :func:`element_to_json`; plain ints and ``"p/q"`` strings are exact rationals."""
    try:
        if not isinstance(obj, dict) or "num" in obj:
            return field.from_rational(_parse_rational(obj))
        exact = bool(obj.get("exact", False))
        val = obj["val"]
        if val == "inf":
            if exact:
                return field.zero()
            return ValuedElement._inexact_zero(field, int(obj["prec"]))
        val = int(val)
        if field.is_padic:
            if exact and "value" in obj:
                return field.from_rational(_parse_rational(obj["value"]))
            digits = [int(d) for d in obj["digits"]]
        else:
            digits = [_parse_rational(d) for d in obj["digits"]]
        if exact:
            return field.from_digits(val, digits, exact=True)
        return field.from_digits(val, digits, prec=int(obj["prec"]))
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad element {obj!r}: {exc}") from exc
