"""Polynomial relations among orbit points.

Given an attracting system ``f``, a basepoint ``a`` and a polynomial ``G``
in n variables, :func:`classify` describes

    Z = {t in N^n : G(f^t1(a), ..., f^tn(a)) = 0}

as a finite union of families: iterational varieties (equations
``x_i = f^m(a)`` and ``x_j = f^l(x_k)``) when f is superattracting, and
lattice cosets (deformed tori in exponent space) when it is attracting
with M = 1.

The pipeline:

1. factor out the largest monomial (orbit points are never 0);
2. find the dominant monomials F of G;
3. a zero forces two terms of equal minimal valuation, i.e. a valuation
   equation for some pair I != J in F, linear in t (M = 1) or
   exponential in M^t (M >= 2);
4. solve those equations, giving candidate families;
5. verify each candidate.  Superattracting candidates are substituted
   into G; if the result vanishes the family is proved, otherwise (for
   polynomial maps) the substituted polynomial in fewer variables is
   classified recursively.  Lattice candidates are checked on a box and
   refuted ones contribute their zeros in the box as residual points;
   verified candidates that are single points are reported the same way.

Basepoints with ``v(a) <= v(lambda)`` are handled by classifying
``a' = f^N(a)`` and treating the finitely many indices below N by
substitution.
"""
from dataclasses import dataclass, field as dc_field
from itertools import combinations, product

from orbitrel.dynamics import iterate_series, normalize_basepoint
from orbitrel.errors import PrecisionExhausted, SchemaError
from orbitrel.series import (DEFAULT_TRUNC, MultiPoly, TruncatedSeries, compose, eval_poly,
                             eval_series)
from orbitrel.solvers import (DEFAULT_BOX, SolutionFamily, dominant_monomials, integer_kernel,
                              integer_solve, is_saturated, linear_solve, mann_solve, saturate)
from orbitrel.valued_field import INF, element_to_json, fsum

__all__ = [
    "IterationalVariety", "DeformedTorusFamily", "Verification", "ClassificationReport",
    "ValuationEquation", "classify", "classify_ideal", "verify_family", "brute_force_oracle",
    "pair_equation", "valuation_equations", "necessity_pairs",
]

PROVED = "proved-to-truncation"
BOX_VERIFIED = "box-verified"
REFUTED = "refuted"

# zero screens evaluate exact inputs to this many times the precision cap
SCREEN_FACTOR = 8
# largest Y-degree for which a relation is expanded as a polynomial identity
IDENTITY_DEGREE = 256


def _glex(I):
    return (sum(I), I)


def _ints(xs):
    return [str(x) for x in xs]


# ---------------------------------------------------------------- report types

@dataclass(frozen=True)
class Verification:
    status: str
    box: int
    points_checked: int
    trunc: int = None
    exact: bool = True

    def to_json(self):
        return {"status": self.status, "box": str(self.box),
                "points_checked": str(self.points_checked),
                "trunc": None if self.trunc is None else str(self.trunc), "exact": self.exact}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["status"], int(obj["box"]), int(obj["points_checked"]),
                   None if obj.get("trunc") is None else int(obj["trunc"]), bool(obj["exact"]))


@dataclass(frozen=True)
class IterationalVariety:
    """``x_i = f^m(a)`` for ``(i, m)`` in fixed, ``x_j = f^l(x_k)`` for ``(j, k, l)`` in links.

    Indices are 0-based.  ``lower`` holds per-coordinate lower bounds on
    the orbit index (all zero unless the basepoint needed normalising).
    """
    nvars: int
    fixed: tuple = ()
    links: tuple = ()
    consistent: bool = True
    lower: tuple = None

    def __post_init__(self):
        if self.lower is None:
            object.__setattr__(self, "lower", (0,) * self.nvars)

    @classmethod
    def from_family(cls, fam):
        if fam.lattice is not None:
            raise ValueError("lattice families are not iterational")
        return cls(fam.nvars, fam.fixed, fam.offsets, True, fam.lower)

    def family(self):
        return SolutionFamily.make(self.nvars, dict(self.fixed), self.links, None, self.lower)

    def equations(self):
        lines = [f"x{i + 1} = f^{m}(a)" for i, m in self.fixed]
        lines += [f"x{j + 1} = f^{l}(x{k + 1})" for j, k, l in self.links]
        lines += [f"t{i + 1} >= {b}" for i, b in enumerate(self.lower) if b]
        return lines or ["(all orbit tuples)"]

    def to_json(self):
        return {"kind": "iterational", "nvars": str(self.nvars),
                "fixed": [{"var": str(i + 1), "iterate": str(m)} for i, m in self.fixed],
                "links": [{"var": str(j + 1), "base": str(k + 1), "iterate": str(l)}
                          for j, k, l in self.links],
                "lower": _ints(self.lower), "consistent": self.consistent}

    @classmethod
    def from_json(cls, obj):
        n = int(obj["nvars"])
        return cls(n,
                   tuple((int(d["var"]) - 1, int(d["iterate"])) for d in obj["fixed"]),
                   tuple((int(d["var"]) - 1, int(d["base"]) - 1, int(d["iterate"]))
                         for d in obj["links"]),
                   bool(obj.get("consistent", True)),
                   tuple(int(b) for b in obj.get("lower", ["0"] * n)))


@dataclass(frozen=True)
class DeformedTorusFamily:
    """``{s in N^n : A (s - t) = 0, s >= lower}`` with A = lattice_matrix, t = base_exponents."""
    nvars: int
    lattice_matrix: tuple
    base_exponents: tuple
    saturated: bool = True
    lower: tuple = None

    def __post_init__(self):
        if self.lower is None:
            object.__setattr__(self, "lower", (0,) * self.nvars)

    def family(self):
        A = [list(r) for r in self.lattice_matrix]
        r = [sum(a * x for a, x in zip(row, self.base_exponents)) for row in A]
        return SolutionFamily.make(self.nvars, lattice=(A, r) if A else None, lower=self.lower)

    def equations(self):
        base = "(" + ",".join(str(x) for x in self.base_exponents) + ")"
        lines = ["lattice: [" + " ".join(str(x) for x in row) + "] · (s - " + base + ") = 0"
                 for row in self.lattice_matrix]
        lines += [f"s{i + 1} >= {b}" for i, b in enumerate(self.lower) if b]
        return lines or ["(all orbit tuples)"]

    def to_json(self):
        return {"kind": "deformed-torus", "nvars": str(self.nvars),
                "lattice_matrix": [_ints(r) for r in self.lattice_matrix],
                "base_exponents": _ints(self.base_exponents),
                "saturated": self.saturated, "lower": _ints(self.lower)}

    @classmethod
    def from_json(cls, obj):
        n = int(obj["nvars"])
        return cls(n, tuple(tuple(int(x) for x in r) for r in obj["lattice_matrix"]),
                   tuple(int(x) for x in obj["base_exponents"]), bool(obj["saturated"]),
                   tuple(int(b) for b in obj.get("lower", ["0"] * n)))


def _family_from_json(obj):
    kind = obj.get("kind")
    if kind == "iterational":
        return IterationalVariety.from_json(obj)
    if kind == "deformed-torus":
        return DeformedTorusFamily.from_json(obj)
    raise SchemaError(f"unknown family kind {kind!r}")


@dataclass(frozen=True)
class ClassificationReport:
    problem: dict
    M: int
    vlambda: int
    normalization: int
    families: tuple = ()
    verification: tuple = ()
    residual_points: tuple = ()
    box: int = DEFAULT_BOX
    trunc: int = DEFAULT_TRUNC
    diagnostics: tuple = dc_field(default=())

    def __hash__(self):
        return hash((self.M, self.families, self.residual_points))

    def points_in_box(self, B):
        """Union of families and residual points inside ``[0, B]^n``."""
        pts = set()
        for fam in self.families:
            pts.update(fam.family().points_in_box(B))
        pts.update(p for p in self.residual_points if all(x <= B for x in p))
        return pts

    def to_json(self):
        return {
            "problem": self.problem,
            "system": {"M": str(self.M), "vlambda": str(self.vlambda),
                       "normalization": str(self.normalization)},
            "box": str(self.box),
            "trunc": str(self.trunc),
            "families": [dict(fam.to_json(), verification=ver.to_json())
                         for fam, ver in zip(self.families, self.verification)],
            "residual_points": [_ints(p) for p in self.residual_points],
            "diagnostics": list(self.diagnostics),
        }

    @classmethod
    def from_json(cls, obj):
        try:
            fams, vers = [], []
            for d in obj["families"]:
                d = dict(d)
                vers.append(Verification.from_json(d.pop("verification")))
                fams.append(_family_from_json(d))
            sysd = obj["system"]
            return cls(obj["problem"], int(sysd["M"]), int(sysd["vlambda"]),
                       int(sysd["normalization"]), tuple(fams), tuple(vers),
                       tuple(tuple(int(x) for x in p) for p in obj["residual_points"]),
                       int(obj["box"]), int(obj["trunc"]), tuple(obj.get("diagnostics", ())))
        except SchemaError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad report: {exc}") from exc


# ---------------------------------------------------------------- valuation equations

@dataclass(frozen=True)
class ValuationEquation:
    """``sum c_i t_i = rhs`` (base None) or ``sum c_i base**t_i = rhs``."""
    coeffs: tuple
    rhs: int
    base: int = None

    def holds(self, t):
        if self.base is None:
            return sum(c * x for c, x in zip(self.coeffs, t)) == self.rhs
        return sum(c * self.base ** x for c, x in zip(self.coeffs, t) if c) == self.rhs


def pair_equation(sys, v_a, I, J, v_gI, v_gJ):
    """Equality of the valuations of the I and J terms along the orbit of a, ``v(a) > v(lambda)``."""
    vl = sys.vlam
    dI, dJ = sum(I), sum(J)
    if sys.M == 1:
        return ValuationEquation(tuple(vl * (i - j) for i, j in zip(I, J)),
                                 v_gJ - v_gI + (dJ - dI) * v_a)
    M = sys.M
    K = (M - 1) * v_a + vl
    return ValuationEquation(tuple((i - j) * K for i, j in zip(I, J)),
                             (M - 1) * (v_gJ - v_gI) - (dJ - dI) * vl, M)


def _cofactor(G):
    K = G.monomial_content()
    return G.divide_monomial(K) if any(K) else G


def valuation_equations(sys, a, G):
    """``[(I, J, equation)]`` for the dominant pairs of G's monomial cofactor."""
    G = _cofactor(G)
    if G.is_zero() or G.is_constant():
        return []
    F = sorted(dominant_monomials(G), key=_glex)
    return [(I, J, pair_equation(sys, a.val, I, J, G.terms[I].val, G.terms[J].val))
            for I, J in combinations(F, 2)]


def necessity_pairs(sys, a, G, t):
    """Dominant pairs whose valuation equation holds at the exponent tuple t."""
    return [(I, J) for I, J, eq in valuation_equations(sys, a, G) if eq.holds(t)]


# ---------------------------------------------------------------- evaluation context

class _Context:
    def __init__(self, sys, a, box, trunc, normalize=True, strict=True):
        self.sys = sys
        self.field = sys.field
        self.box = box
        self.trunc = trunc
        self.strict = strict
        self.exact_map = sys.f.polynomial and all(c.is_exact for c in sys.f.coeffs)
        if normalize:
            self.N, self.a1 = normalize_basepoint(sys, a)
        else:
            self.N, self.a1 = 0, a
        self._orbit = [a]
        self._powers = {}
        self._worbit = [a.windowed(SCREEN_FACTOR * sys.field.precision_cap)]
        self._wpowers = {}
        self._support = {}
        self._zeros = {}
        self.screen = SCREEN_FACTOR * self.field.precision_cap
        self._iterates = {}
        self.diagnostics = []

    def point(self, t):
        while len(self._orbit) <= t:
            self._orbit.append(eval_series(self.sys.f, self._orbit[-1]))
        return self._orbit[t]

    def power(self, t, e):
        key = (t, e)
        if key not in self._powers:
            self._powers[key] = self.point(t) ** e
        return self._powers[key]

    def evaluate(self, G, t, shift=0):
        vals = []
        for I, c in G.terms.items():
            v = c
            for k, e in enumerate(I):
                if e:
                    v = v * self.power(t[k] + shift, e)
            vals.append(v)
        return fsum(vals, self.field)

    def _wpoint(self, t):
        # the orbit iterated in capped arithmetic at the screen precision
        while len(self._worbit) <= t:
            self._worbit.append(eval_series(self.sys.f, self._worbit[-1]))
        return self._worbit[t]

    def _wpower(self, t, e):
        key = (t, e)
        if key not in self._wpowers:
            self._wpowers[key] = self._wpoint(t) ** e
        return self._wpowers[key]

    def _used(self, G):
        used = self._support.get(G)
        if used is None:
            used = tuple(k for k in range(G.nvars) if any(I[k] for I in G.terms))
            self._support[G] = used
        return used

    def _identity(self, G, ts, used):
        """Decide G(t) = 0 without expanding every orbit point exactly.

        For a threshold m among the indices, coordinates with t_i < m are
        replaced by their exact orbit points and the others by
        f^(t_i - m)(Y), giving an exact polynomial P(Y).  P = 0 proves
        G(t) = 0; a nonzero screen value of P(f^m(a)) proves G(t) != 0,
        since the cancellations inside P happened exactly.  None if no
        split decides.
        """
        if not self.exact_map or not used:
            return None
        d = self.sys.f.degree()
        F = self.field
        for m in sorted({ts[k] for k in used}):
            const = [k for k in used if ts[k] < m]
            if any(self.point(ts[k]).shadow is None for k in const):
                break
            if any(sum(I[k] * d ** (ts[k] - m) for k in used if ts[k] >= m) > IDENTITY_DEGREE
                   for I in G.terms):
                continue
            polys = {}
            out = MultiPoly(F, 1, {})
            for I, c in G.terms.items():
                term = MultiPoly.constant(F, 1, c)
                for k in used:
                    if not I[k]:
                        continue
                    if ts[k] < m:
                        term = term * self.power(ts[k], I[k])
                        continue
                    ell = ts[k] - m
                    if ell not in polys:
                        polys[ell] = _series_to_poly(self.iterate(ell), 1, 0, None)
                    term = term * polys[ell] ** I[k]
                out = out + term
            if all(c.val is INF and c.is_exact for c in out.terms.values()):
                return True
            if eval_poly(out, [self._wpoint(m)]).val is not INF:
                return False
        return None

    def zero_at(self, G, t, shift=0):
        """Does G vanish at the orbit point t (shifted)?

        A nonzero evaluation at the screen precision already proves
        G(t) != 0.  Otherwise the relation is tried as a polynomial identity
        in the smallest orbit point, and only then evaluated exactly.
        """
        vals = []
        for I, c in G.terms.items():
            v = c.windowed(self.screen)
            for k, e in enumerate(I):
                if e:
                    v = v * self._wpower(t[k] + shift, e)
            vals.append(v)
        if fsum(vals, self.field).val is not INF:
            return False
        # the exact verdict only depends on the coordinates G involves
        used = self._used(G)
        ts = tuple(x + shift for x in t)
        key = (G, tuple(ts[k] for k in used))
        if key not in self._zeros:
            verdict = self._identity(G, ts, used)
            if verdict is None:
                verdict = self.vanishes(self.evaluate(G, t, shift))
            self._zeros[key] = verdict
        return self._zeros[key]

    def vanishes(self, x):
        if x.val is not INF:
            return False
        if x.is_exact or not self.strict:
            return True
        raise PrecisionExhausted(
            "value vanishes only to precision; raise precision_cap or the truncation order")

    def iterate(self, ell):
        if ell not in self._iterates:
            f = self.sys.f
            if self.exact_map:
                out = TruncatedSeries.x(self.field, 1)
                for _ in range(ell):
                    out = compose(f, out)
            else:
                out = iterate_series(f, ell, self.trunc)
            self._iterates[ell] = out
        return self._iterates[ell]


def _poly_trunc(P, T):
    if T is None:
        return P
    return MultiPoly(P.field, P.nvars, {I: c for I, c in P.terms.items() if max(I, default=0) <= T})


def _series_to_poly(s, k, pos, T):
    terms = {}
    top = s.trunc if T is None else min(s.trunc, T)
    for i in range(top + 1):
        c = s.coeffs[i]
        if c.val is INF and c.is_exact:
            continue
        e = [0] * k
        e[pos] = i
        terms[tuple(e)] = c
    return MultiPoly(s.field, k, terms)


def _substitute(ctx, G, fam):
    """G restricted to an iterational family, as a polynomial in the family's roots."""
    roots = fam.roots()
    pos = {r: p for p, r in enumerate(roots)}
    k = len(roots)
    T = None if ctx.exact_map else ctx.trunc
    F = ctx.field
    vals = {}
    for i, m in fam.fixed:
        vals[i] = MultiPoly.constant(F, k, ctx.point(m + ctx.N))
    for r in roots:
        vals[r] = MultiPoly.variable(F, k, pos[r])
    for j, r, ell in fam.offsets:
        vals[j] = _series_to_poly(ctx.iterate(ell), k, pos[r], T)
    powers = {}

    def pw(i, e):
        if (i, e) not in powers:
            powers[(i, e)] = vals[i] if e == 1 else _poly_trunc(pw(i, e - 1) * vals[i], T)
        return powers[(i, e)]

    out = MultiPoly(F, k, {})
    for I, c in G.terms.items():
        term = MultiPoly.constant(F, k, c)
        for i, e in enumerate(I):
            if e:
                term = _poly_trunc(term * pw(i, e), T)
        out = out + term
    return out, T is None


def _lift_roots(fam, sub):
    """Family on the roots of ``fam`` pulled back to all coordinates."""
    roots = fam.roots()
    fixed = dict(fam.fixed)
    for p, m in sub.fixed:
        fixed[roots[p]] = m
    offsets = list(fam.offsets) + [(roots[p], roots[q], B) for p, q, B in sub.offsets]
    return SolutionFamily.make(fam.nvars, fixed, offsets)


def _lift_root_point(fam, s):
    t = [0] * fam.nvars
    roots = fam.roots()
    for p, r in enumerate(roots):
        t[r] = s[p]
    for i, m in fam.fixed:
        t[i] = m
    for j, r, B in fam.offsets:
        t[j] = t[r] + B
    return tuple(t)


def _insert_coordinate(fam, i, s):
    """Family in n-1 coordinates extended by ``t_i = s``."""
    def up(q):
        return q if q < i else q + 1
    fixed = {up(q): A for q, A in fam.fixed}
    fixed[i] = s
    offsets = [(up(j), up(k), B) for j, k, B in fam.offsets]
    lat = None
    if fam.lattice is not None:
        rows = [list(r[:i]) + [0] + list(r[i:]) for r in fam.lattice[0]]
        lat = (rows, list(fam.lattice[1]))
    lower = list(fam.lower[:i]) + [0] + list(fam.lower[i:])
    return SolutionFamily.make(fam.nvars + 1, fixed, offsets, lat, lower)


# ---------------------------------------------------------------- candidates and verification

def _candidates(ctx, G):
    sys = ctx.sys
    n = G.nvars
    F = sorted(dominant_monomials(G), key=_glex)
    out = []
    for I, J in combinations(F, 2):
        eq = pair_equation(sys, ctx.a1.val, I, J, G.terms[I].val, G.terms[J].val)
        if eq.base is None:
            res = linear_solve(eq.coeffs, eq.rhs, ctx.box)
            if res is not None:
                out.extend(saturate(res[0]))
            continue
        S = [i for i, c in enumerate(eq.coeffs) if c]
        for fam in mann_solve([eq.coeffs[i] for i in S], eq.base, eq.rhs):
            fixed = {S[i]: A for i, A in fam.fixed}
            offsets = [(S[j], S[k], B) for j, k, B in fam.offsets]
            cand = SolutionFamily.make(n, fixed, offsets)
            if cand is not None:
                out.append(cand)
    seen = set()
    uniq = []
    for fam in out:
        if fam not in seen:
            seen.add(fam)
            uniq.append(fam)
    return uniq


def _box_scan(ctx, G, fam):
    pts = fam.points_in_box(ctx.box)
    zeros = [p for p in pts if ctx.zero_at(G, p, ctx.N)]
    return pts, zeros


def _classify_normalized(ctx, G):
    """Families (with verification) and residual points for the basepoint f^N(a)."""
    n = G.nvars
    M = ctx.sys.M
    if G.is_zero() or (n == 0 and ctx.vanishes(G.terms[()])):
        fam = SolutionFamily.everything(n)
        status = PROVED if M >= 2 else BOX_VERIFIED
        return [(fam, Verification(status, ctx.box, len(fam.points_in_box(ctx.box)),
                                   ctx.trunc, True))], set()
    G = _cofactor(G)
    if G.is_constant():
        return [], set()
    fams, residual = [], set()
    for cand in _candidates(ctx, G):
        pts, zeros = _box_scan(ctx, G, cand)
        if M == 1:
            if not pts:
                ctx.diagnostics.append(
                    f"candidate lattice {list(map(list, cand.lattice[0]))} has no points in the box")
                continue
            if len(zeros) == len(pts):
                fams.append((cand, Verification(BOX_VERIFIED, ctx.box, len(pts), None, True)))
            else:
                residual.update(zeros)
            continue
        red, exact = _substitute(ctx, G, cand)
        if all(c.val is INF for c in red.terms.values()):
            if len(zeros) != len(pts):
                ctx.diagnostics.append("substitution vanished but the box check failed")
                residual.update(zeros)
                continue
            fams.append((cand, Verification(PROVED, ctx.box, len(pts), ctx.trunc,
                                            exact and all(c.is_exact for c in red.terms.values()))))
        elif exact:
            sub_f, sub_r = _classify_normalized(ctx, red)
            for sf, ver in sub_f:
                lifted = _lift_roots(cand, sf)
                if lifted is not None:
                    fams.append((lifted, ver))
            residual.update(_lift_root_point(cand, s) for s in sub_r)
        else:
            residual.update(zeros)
    return fams, residual


def _classify_original(ctx, G):
    """Families and residual points for the original basepoint, indices from 0."""
    n = G.nvars
    fams, residual = [], set()
    nf, nr = _classify_normalized(ctx, G)
    N = ctx.N
    fams.extend((fam.shifted(N), ver) for fam, ver in nf)
    residual.update(tuple(x + N for x in p) for p in nr)
    for i in range(n):
        for s in range(N):
            Gs = G.substitute(i, ctx.point(s))
            sf, sr = _classify_original(ctx, Gs)
            for fam, ver in sf:
                lifted = _insert_coordinate(fam, i, s)
                if lifted is not None:
                    fams.append((lifted, ver))
            residual.update(p[:i] + (s,) + p[i:] for p in sr)
    return fams, residual


def _to_public(fam, M, box):
    if M >= 2:
        return IterationalVariety.from_family(fam)
    rows, rhs = fam.constraint_rows()
    n = fam.nvars
    if not rows:
        return DeformedTorusFamily(n, (), (0,) * n, True, fam.lower)
    sat = saturate(fam)[0]
    A = [list(r) for r in sat.lattice[0]]
    # base point: lex-first member, searching outward from the verification box
    B = box
    while True:
        pts = sat.points_in_box(B)
        if pts:
            break
        B = 2 * B + 1
    return DeformedTorusFamily(n, tuple(tuple(r) for r in A), pts[0], is_saturated(A, n), fam.lower)


def _problem_echo(sys, a, G, box, trunc):
    return {"field": sys.field.to_json(), "map": sys.f.to_json(), "a": element_to_json(a),
            "poly": G.to_json(), "box": str(box), "trunc": str(trunc)}


def _relax(ctx, fams, Gs):
    # Drop lower bounds left over from basepoint normalisation where valid:
    # a substitution proof holds for every root value, a box check is redone.
    out = []
    for fam, ver in fams:
        if any(fam.lower):
            free = fam.without_lower()
            if ver.status == PROVED:
                fam = free
            elif Gs:
                pts = free.points_in_box(ctx.box)
                if all(ctx.zero_at(G, p) for G in Gs for p in pts):
                    fam, ver = free, Verification(BOX_VERIFIED, ctx.box, len(pts), None, ver.exact)
        out.append((fam, ver))
    # remove families contained in another one
    keep = []
    for i, (fam, ver) in enumerate(out):
        dominated = False
        for j, (other, _) in enumerate(out):
            if i == j or not fam.issubset(other):
                continue
            if not other.issubset(fam) or j < i:
                dominated = True
                break
        if not dominated:
            keep.append((fam, ver))
    return keep


def _single_point(fam):
    # the only member of a family with no free directions, else None
    n = fam.nvars
    if not n:
        return None
    if fam.is_point:
        return tuple(A for _, A in sorted(fam.fixed))
    rows, rhs = fam.constraint_rows()
    if not rows or integer_kernel(rows, n):
        return None
    t = integer_solve(rows, rhs, n)
    return tuple(t) if t is not None and tuple(t) in fam else None


def _assemble(ctx, fams, residual, problem, Gs):
    M = ctx.sys.M
    fams = _relax(ctx, fams, Gs)
    # isolated solutions are residual points, not zero-dimensional families
    residual = set(residual)
    kept = []
    for fam, ver in fams:
        p = _single_point(fam)
        if p is None:
            kept.append((fam, ver))
        else:
            residual.add(p)
    fams = kept
    best = {}
    for fam, ver in fams:
        pub = _to_public(fam, M, ctx.box)
        key = pub
        if key not in best:
            best[key] = ver
    order = sorted(best, key=lambda f: f.family().sort_key())
    members = [f.family() for f in order]
    residual = sorted(p for p in residual if not any(p in m for m in members))
    return ClassificationReport(problem, M, ctx.sys.vlam, ctx.N, tuple(order),
                                tuple(best[f] for f in order), tuple(residual),
                                ctx.box, ctx.trunc, tuple(dict.fromkeys(ctx.diagnostics)))


def classify(sys, a, G, box=DEFAULT_BOX, trunc=DEFAULT_TRUNC, problem=None, strict=True):
    """Structured description of the exponent tuples where G vanishes on the orbit of a.

    Families are always verified (proved for superattracting systems,
    checked on ``[0, box]^n`` otherwise).  Residual points are isolated
    solutions and zeros found while scanning refuted candidates in the box.
    """
    if G.field != sys.field:
        raise ValueError("polynomial and map over different fields")
    if not G.in_unit_ball():
        raise ValueError("G must have coefficients in the valuation ring")
    ctx = _Context(sys, a, box, trunc, strict=strict)
    fams, residual = _classify_original(ctx, G)
    if problem is None:
        problem = _problem_echo(sys, a, G, box, trunc)
    return _assemble(ctx, fams, residual, problem, [G])


def classify_ideal(sys, a, Gs, box=DEFAULT_BOX, trunc=DEFAULT_TRUNC, strict=True):
    """Common zeros of several polynomials, by intersecting per-generator families."""
    if not Gs:
        raise ValueError("need at least one generator")
    reports = [classify(sys, a, G, box, trunc, strict=strict) for G in Gs]
    ctx = _Context(sys, a, box, trunc, strict=strict)
    fams = []
    for combo in product(*[list(zip(r.families, r.verification)) for r in reports]):
        fam = combo[0][0].family()
        for other, _ in combo[1:]:
            if fam is None:
                break
            fam = fam.intersect(other.family())
        if fam is None:
            continue
        if sys.M == 1:
            sat = saturate(fam)
            if not sat:
                continue
            fam = sat[0]
        statuses = {v.status for _, v in combo}
        status = BOX_VERIFIED if BOX_VERIFIED in statuses else PROVED
        fams.append((fam, Verification(status, box, len(fam.points_in_box(box)), trunc,
                                       all(v.exact for _, v in combo))))
    residual = set()
    for r in reports:
        for p in r.residual_points:
            if all(ctx.zero_at(G, p) for G in Gs):
                residual.add(p)
    problem = {"field": sys.field.to_json(), "map": sys.f.to_json(), "a": element_to_json(a),
               "polys": [G.to_json() for G in Gs], "box": str(box), "trunc": str(trunc)}
    return _assemble(ctx, fams, residual, problem, list(Gs))


def verify_family(sys, a, G, family, box=DEFAULT_BOX, trunc=DEFAULT_TRUNC, strict=True):
    """``proved-to-truncation``, ``box-verified`` or ``refuted`` for a candidate family.

    The family is in orbit indices of ``a`` itself (no normalisation).
    Superattracting systems and families without lattice constraints
    are checked by substitution; lattice families on the box.
    """
    fam = family.family() if not isinstance(family, SolutionFamily) else family
    if fam is None:
        return REFUTED
    ctx = _Context(sys, a, box, trunc, normalize=False, strict=strict)
    pts, zeros = _box_scan(ctx, G, fam)
    if len(zeros) != len(pts):
        return REFUTED
    if fam.lattice is None and not any(fam.lower):
        red, _ = _substitute(ctx, G, fam)
        if all(c.val is INF for c in red.terms.values()):
            return PROVED
        return REFUTED
    return BOX_VERIFIED


def brute_force_oracle(sys, a, G, box=DEFAULT_BOX, strict=True):
    """All ``t in [0, box]^n`` with ``G(f^t(a)) = 0``, by direct evaluation."""
    ctx = _Context(sys, a, box, DEFAULT_TRUNC, normalize=False, strict=strict)
    if G.nvars == 0:
        return {()} if (G.is_zero() or ctx.vanishes(G.terms[()])) else set()
    return {t for t in product(range(box + 1), repeat=G.nvars)
            if ctx.zero_at(G, t)}
