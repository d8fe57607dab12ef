"""Diophantine layer: dominant monomials, integer lattices, exponential equations.

Exponent constraints are kept additively.  A solution set in ``N^n`` is a
:class:`SolutionFamily`: fixed coordinates ``t_i = A``, offsets
``t_j = t_k + B`` and optionally a linear system ``A t = r``, together with
coordinatewise lower bounds.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
import math

from flint import fmpz_mat

from orbitrel.errors import EmptyInput, PrecisionExhausted
from orbitrel.kernels import box_points, mann_box_search
from orbitrel.valued_field import INF

__all__ = [
    "NewtonPoint", "DominanceCertificate", "newton_points", "dominant_monomials",
    "dominance_certificates", "SolutionFamily", "linear_solve", "mann_solve",
    "mann_family_valid", "saturate", "integer_kernel", "integer_solve", "row_hnf",
    "DEFAULT_BOX",
]

DEFAULT_BOX = 12


# ---------------------------------------------------------------- dominance

@dataclass(frozen=True)
class NewtonPoint:
    exponent: tuple
    coeff_valuation: int


@dataclass(frozen=True)
class DominanceCertificate:
    """A weight ``w`` in ``N^n`` at which the exponent attains the minimum.

    ``unique`` says the exponent is the only minimiser at ``w``.
    """
    exponent: tuple
    weight: tuple
    unique: bool


def newton_points(G):
    pts = []
    for I, c in G.terms.items():
        if c.val is INF:
            if c.is_exact:
                continue
            raise PrecisionExhausted(f"coefficient of {I} vanishes to precision; valuation unknown")
        pts.append(NewtonPoint(tuple(I), c.val))
    return pts


def _solve_square(rows, rhs):
    # unique rational solution of a square system, or None if singular
    n = len(rows)
    A = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        for r in range(n):
            if r != col and A[r][col] != 0:
                q = A[r][col] / p
                A[r] = [x - q * y for x, y in zip(A[r], A[col])]
    return [A[i][n] / A[i][i] for i in range(n)]


def _det(rows):
    n = len(rows)
    A = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            det = -det
        det *= A[col][col]
        for r in range(col + 1, n):
            q = A[r][col] / A[col][col]
            if q:
                A[r] = [x - q * y for x, y in zip(A[r], A[col])]
    return int(det)


def _null_vector(rows, n):
    # generator of the kernel of an (n-1) x n integer matrix of rank n-1
    if n == 1:
        return [1]
    v = []
    for k in range(n):
        minor = [[x for j, x in enumerate(row) if j != k] for row in rows]
        v.append((-1) ** k * _det(minor))
    if not any(v):
        return None
    g = math.gcd(*v)
    return [x // g for x in v]


def _integer_point(rows, rhs, n):
    """Lex-first integer point of ``{w >= 0 : rows . w <= rhs}`` or None.

    Every integer point of a pointed polyhedron can be translated by
    integer multiples of its extreme rays into ``conv(vertices) +
    sum [0, 1] * rays``, so searching the bounding box of that set is
    complete.
    """
    cons = [(list(r), b) for r, b in zip(rows, rhs)]
    for i in range(n):
        e = [0] * n
        e[i] = -1
        cons.append((e, 0))
    vertices = set()
    for sub in combinations(range(len(cons)), n):
        sol = _solve_square([cons[i][0] for i in sub], [cons[i][1] for i in sub])
        if sol is None:
            continue
        if all(sum(a * x for a, x in zip(r, sol)) <= b for r, b in cons):
            vertices.add(tuple(sol))
    if not vertices:
        return None
    rays = set()
    for sub in combinations(range(len(cons)), n - 1):
        v = _null_vector([cons[i][0] for i in sub], n)
        if v is None:
            continue
        for cand in (v, [-x for x in v]):
            if all(sum(a * x for a, x in zip(r, cand)) <= 0 for r, _ in cons):
                rays.add(tuple(cand))
    lo = [math.floor(min(V[i] for V in vertices)) for i in range(n)]
    hi = [math.ceil(max(V[i] for V in vertices)) + sum(max(R[i], 0) for R in rays)
          for i in range(n)]
    lo = [max(x, 0) for x in lo]
    found = box_points([list(r) for r in rows], list(rhs), lo, hi, 1)
    return tuple(found[0]) if found else None


def _dominance(G):
    pts = newton_points(G)
    if not pts:
        raise EmptyInput("dominant monomials of the zero polynomial")
    n = G.nvars
    certs = {}
    for P in pts:
        others = [Q for Q in pts if Q is not P]
        rows = [[a - b for a, b in zip(P.exponent, Q.exponent)] for Q in others]
        rhs = [Q.coeff_valuation - P.coeff_valuation for Q in others]
        if n == 0:
            certs[P.exponent] = DominanceCertificate(P.exponent, (), True)
            continue
        w = _integer_point(rows, [b - 1 for b in rhs], n)
        if w is not None:
            certs[P.exponent] = DominanceCertificate(P.exponent, w, True)
            continue
        w = _integer_point(rows, rhs, n)
        if w is not None:
            certs[P.exponent] = DominanceCertificate(P.exponent, w, False)
    return certs


def dominant_monomials(G):
    """Exponents I minimising ``v(g_I) + I . w`` for some ``w`` in ``N^n``.

    For every point b with ``v(b_i) >= 0`` all minimal terms of
    ``G(b)`` have exponents in this set.
    """
    return frozenset(_dominance(G))


def dominance_certificates(G):
    """Map exponent -> :class:`DominanceCertificate` for the dominant set."""
    return _dominance(G)


# ---------------------------------------------------------------- lattices

def _col_echelon(A, n):
    """Column echelon form ``H = A U`` with ``U`` unimodular.

    Returns ``(H, U, pivots)`` where pivots lists ``(row, col)`` with
    positive pivot entries and zeros to the right of each pivot.
    """
    H = [list(r) for r in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(dst, src, q):
        # column dst -= q * column src
        for M in (H, U):
            for row in M:
                row[dst] -= q * row[src]

    def swap(i, j):
        for M in (H, U):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def negate(i):
        for M in (H, U):
            for row in M:
                row[i] = -row[i]

    pivots = []
    c = 0
    for i in range(len(H)):
        if c >= n:
            break
        while True:
            nz = [j for j in range(c, n) if H[i][j]]
            if not nz:
                break
            j0 = min(nz, key=lambda j: (abs(H[i][j]), j))
            if j0 != c:
                swap(c, j0)
            clean = True
            for j in range(c + 1, n):
                if H[i][j]:
                    colop(j, c, H[i][j] // H[i][c])
                    if H[i][j]:
                        clean = False
            if clean:
                break
        if c < n and H[i][c]:
            if H[i][c] < 0:
                negate(c)
            pivots.append((i, c))
            c += 1
    return H, U, pivots


def integer_kernel(A, n):
    """Basis (list of vectors) of ``{x in Z^n : A x = 0}``, row-HNF normalised."""
    if not A:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    _, U, pivots = _col_echelon(A, n)
    r = len(pivots)
    basis = [[U[i][j] for i in range(n)] for j in range(r, n)]
    return row_hnf(basis)


def integer_solve(A, rhs, n):
    """One integer solution of ``A t = rhs`` or None."""
    if not A:
        return [0] * n
    H, U, pivots = _col_echelon(A, n)
    y = [0] * n
    pivot_of = dict(pivots)
    for i, row in enumerate(H):
        # entries right of the current pivot are zero, earlier y are known
        if i in pivot_of:
            c = pivot_of[i]
            s = sum(row[j] * y[j] for j in range(c))
            q, rem = divmod(rhs[i] - s, row[c])
            if rem:
                return None
            y[c] = q
        elif sum(row[j] * y[j] for j in range(n)) != rhs[i]:
            return None
    return [sum(U[i][j] * y[j] for j in range(n)) for i in range(n)]


def row_hnf(B):
    """Reduced row Hermite normal form of an integer matrix, zero rows dropped."""
    if not B or not B[0]:
        return []
    H = fmpz_mat([[int(x) for x in row] for row in B]).hnf()
    rows = [[int(H[i, j]) for j in range(H.ncols())] for i in range(H.nrows())]
    return [r for r in rows if any(r)]


def _saturated_rows(A, n):
    # rows spanning (row space of A tensor Q) meet Z^n, in row-HNF
    K = integer_kernel(A, n)
    if not K:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    return integer_kernel(K, n)


# ---------------------------------------------------------------- families

@dataclass(frozen=True)
class SolutionFamily:
    """``{t in N^n : t >= lower, fixed, offsets, A t = r}``.

    ``fixed`` is a sorted tuple of ``(i, A)``; ``offsets`` a sorted tuple
    of ``(j, k, B)`` meaning ``t_j = t_k + B``; ``lattice`` is ``None`` or
    ``(rows, rhs)``; ``lower`` holds coordinatewise lower bounds.  Indices
    are 0-based; :meth:`make` canonicalises.
    """
    nvars: int
    fixed: tuple = ()
    offsets: tuple = ()
    lattice: tuple = None
    lower: tuple = None

    def __post_init__(self):
        if self.lower is None:
            object.__setattr__(self, "lower", (0,) * self.nvars)

    @classmethod
    def make(cls, nvars, fixed=None, offsets=(), lattice=None, lower=None):
        """Canonical family, or None if the constraints are contradictory.

        Offset components are rooted at their smallest member, so every
        stored offset is nonnegative; a component containing a fixed
        coordinate becomes entirely fixed.  Lower bounds are moved onto
        component roots.
        """
        fixed = dict(fixed or {})
        lower = list(lower) if lower is not None else [0] * nvars
        new_lower = list(lower)
        adj = {i: [] for i in range(nvars)}
        for j, k, B in offsets:
            adj[j].append((k, -B))
            adj[k].append((j, B))
        pot = {}
        new_fixed = {}
        new_offsets = []
        for s in range(nvars):
            if s in pot:
                continue
            pot[s] = 0
            comp = [s]
            stack = [s]
            while stack:
                u = stack.pop()
                for v, d in adj[u]:
                    if v in pot:
                        if pot[v] != pot[u] + d:
                            return None
                    else:
                        pot[v] = pot[u] + d
                        comp.append(v)
                        stack.append(v)
            anchored = [i for i in comp if i in fixed]
            if anchored:
                base = fixed[anchored[0]] - pot[anchored[0]]
                for i in comp:
                    val = base + pot[i]
                    if i in fixed and fixed[i] != val:
                        return None
                    if val < lower[i] or val < 0:
                        return None
                    new_fixed[i] = val
                    new_lower[i] = 0
            else:
                root = min(comp, key=lambda i: (pot[i], i))
                bound = 0
                for i in comp:
                    bound = max(bound, lower[i] - (pot[i] - pot[root]))
                    if i != root:
                        new_offsets.append((i, root, pot[i] - pot[root]))
                        new_lower[i] = 0
                new_lower[root] = bound
        lat = None
        if lattice is not None:
            rows, rhs = lattice
            rows = [list(r) for r in rows]
            aug = row_hnf([r + [b] for r, b in zip(rows, rhs)])
            if any(not any(r[:-1]) and r[-1] for r in aug):
                return None
            aug = [r for r in aug if any(r[:-1])]
            if aug:
                lat = (tuple(tuple(r[:-1]) for r in aug), tuple(r[-1] for r in aug))
        return cls(nvars, tuple(sorted(new_fixed.items())), tuple(sorted(new_offsets)), lat,
                   tuple(new_lower))

    @classmethod
    def everything(cls, nvars, lower=None):
        return cls(nvars, (), (), None, tuple(lower) if lower is not None else None)

    # queries

    @property
    def fixed_map(self):
        return dict(self.fixed)

    def roots(self):
        """Free coordinates that parametrise the family (ignoring the lattice)."""
        bound = {i for i, _ in self.fixed} | {j for j, _, _ in self.offsets}
        return [i for i in range(self.nvars) if i not in bound]

    @property
    def is_point(self):
        return len(self.fixed) == self.nvars

    def constraint_rows(self):
        """All constraints as ``(rows, rhs)`` of an integer linear system."""
        rows, rhs = [], []
        for i, A in self.fixed:
            e = [0] * self.nvars
            e[i] = 1
            rows.append(e)
            rhs.append(A)
        for j, k, B in self.offsets:
            e = [0] * self.nvars
            e[j] += 1
            e[k] -= 1
            rows.append(e)
            rhs.append(B)
        if self.lattice is not None:
            rows.extend(list(r) for r in self.lattice[0])
            rhs.extend(self.lattice[1])
        return rows, rhs

    def __contains__(self, t):
        t = tuple(t)
        if len(t) != self.nvars or any(x < b for x, b in zip(t, self.lower)):
            return False
        if any(t[i] != A for i, A in self.fixed):
            return False
        if any(t[j] != t[k] + B for j, k, B in self.offsets):
            return False
        if self.lattice is not None:
            for row, b in zip(*self.lattice):
                if sum(a * x for a, x in zip(row, t)) != b:
                    return False
        return True

    def points_in_box(self, B):
        """Members with every coordinate in ``[0, B]``, lexicographic order."""
        n = self.nvars
        lo = list(self.lower)
        hi = [B] * n
        if any(l > h for l, h in zip(lo, hi)):
            return []
        if self.lattice is None:
            from itertools import product
            roots = self.roots()
            members = {r: [] for r in roots}
            for j, k, off in self.offsets:
                members[k].append((j, off))
            ranges = []
            for r in roots:
                top = B - max((off for _, off in members[r]), default=0)
                ranges.append(range(self.lower[r], top + 1))
            out = []
            fixed = dict(self.fixed)
            if any(not (self.lower[i] <= A <= B) for i, A in fixed.items()):
                return []
            for vals in product(*ranges):
                t = [0] * n
                for i, A in fixed.items():
                    t[i] = A
                for r, v in zip(roots, vals):
                    t[r] = v
                    for j, off in members[r]:
                        t[j] = v + off
                out.append(tuple(t))
            out.sort()
            return out
        rows, rhs = self.constraint_rows()
        both = rows + [[-x for x in r] for r in rows]
        brhs = list(rhs) + [-b for b in rhs]
        return [tuple(p) for p in box_points(both, brhs, lo, hi, (B + 1) ** n + 1)]

    def intersect(self, other):
        if self.nvars != other.nvars:
            raise ValueError("families in different dimensions")
        lower = [max(x, y) for x, y in zip(self.lower, other.lower)]
        fixed = dict(self.fixed)
        for i, A in other.fixed:
            if fixed.get(i, A) != A:
                return None
            fixed[i] = A
        lat = None
        if self.lattice is not None or other.lattice is not None:
            rows, rhs = [], []
            for fam in (self, other):
                if fam.lattice is not None:
                    rows.extend(list(r) for r in fam.lattice[0])
                    rhs.extend(fam.lattice[1])
            lat = (rows, rhs)
        return SolutionFamily.make(self.nvars, fixed, self.offsets + other.offsets, lat, lower)

    def shifted(self, N):
        """Image under ``t -> t + (N, ..., N)``."""
        lat = None
        if self.lattice is not None:
            rows, rhs = self.lattice
            lat = (rows, tuple(b + N * sum(r) for r, b in zip(rows, rhs)))
        return SolutionFamily.make(self.nvars, {i: A + N for i, A in self.fixed}, self.offsets,
                                   lat, [b + N for b in self.lower])

    def without_lower(self):
        return SolutionFamily.make(self.nvars, dict(self.fixed), self.offsets, self.lattice)

    def issubset(self, other):
        """Sufficient test for containment (exact on cosets, conservative on bounds)."""
        par = lattice_parametrization(self)
        if par is None:
            return True
        t0, gens = par
        rows, rhs = other.constraint_rows()
        for row, b in zip(rows, rhs):
            if sum(a * x for a, x in zip(row, t0)) != b:
                return False
            if any(sum(a * x for a, x in zip(row, g)) for g in gens):
                return False
        for i in range(self.nvars):
            if other.lower[i] > self.lower[i]:
                if any(g[i] for g in gens) or t0[i] < other.lower[i]:
                    return False
        return True

    def sort_key(self):
        lat = () if self.lattice is None else self.lattice
        return (self.fixed, self.offsets, lat, self.lower)

    # json; indices are 1-based and integers decimal strings

    def to_json(self):
        out = {
            "nvars": str(self.nvars),
            "lower": [str(b) for b in self.lower],
            "fixed": [{"var": str(i + 1), "value": str(A)} for i, A in self.fixed],
            "offsets": [{"var": str(j + 1), "base": str(k + 1), "shift": str(B)}
                        for j, k, B in self.offsets],
            "lattice": None,
        }
        if self.lattice is not None:
            out["lattice"] = {"matrix": [[str(x) for x in r] for r in self.lattice[0]],
                              "rhs": [str(b) for b in self.lattice[1]]}
        return out

    @classmethod
    def from_json(cls, obj):
        n = int(obj["nvars"])
        fixed = tuple(sorted((int(d["var"]) - 1, int(d["value"])) for d in obj["fixed"]))
        offsets = tuple(sorted((int(d["var"]) - 1, int(d["base"]) - 1, int(d["shift"]))
                               for d in obj["offsets"]))
        lat = None
        if obj.get("lattice") is not None:
            lat = (tuple(tuple(int(x) for x in r) for r in obj["lattice"]["matrix"]),
                   tuple(int(b) for b in obj["lattice"]["rhs"]))
        lower = tuple(int(b) for b in obj.get("lower", [0] * n))
        return cls(n, fixed, offsets, lat, lower)


# ---------------------------------------------------------------- linear

def linear_solve(coeffs, rhs, box=DEFAULT_BOX):
    """``{t in N^n : coeffs . t = rhs}`` as a family, or None when it has no integer points.

    Returns ``(family, witness)`` where ``witness`` is the lex-first member
    in ``[0, box]^n`` or None if the box holds no member.
    """
    d = [int(c) for c in coeffs]
    n = len(d)
    if not any(d):
        if rhs != 0:
            return None
        fam = SolutionFamily.everything(n)
        return fam, tuple([0] * n)
    if rhs % math.gcd(*d):
        return None
    fam = SolutionFamily.make(n, lattice=([d], [rhs]))
    found = box_points([d, [-x for x in d]], [rhs, -rhs], [0] * n, [box] * n, 1)
    return fam, (tuple(found[0]) if found else None)


def lattice_parametrization(family):
    """``(particular, generators)``: integer solutions are particular + Z-span."""
    rows, rhs = family.constraint_rows()
    n = family.nvars
    t0 = integer_solve(rows, rhs, n)
    if t0 is None:
        return None
    return t0, integer_kernel(rows, n)


def saturate(family):
    """Families with saturated defining lattice whose union is ``family``.

    Integer solutions of ``A t = r`` form one coset of the (always
    saturated) kernel of A, so the answer has at most one family.
    """
    rows, rhs = family.constraint_rows()
    n = family.nvars
    if not rows:
        return [family]
    t0 = integer_solve(rows, rhs, n)
    if t0 is None:
        return []
    sat = _saturated_rows(rows, n)
    r = [sum(a * x for a, x in zip(row, t0)) for row in sat]
    out = SolutionFamily.make(n, lattice=(sat, r), lower=family.lower)
    return [] if out is None else [out]


def is_saturated(rows, n):
    if not rows:
        return True
    return row_hnf(rows) == _saturated_rows(rows, n)


# ---------------------------------------------------------------- mann

def _ilog(base, x):
    # floor(log_base x) for x >= 1
    k = 0
    while base ** (k + 1) <= x:
        k += 1
    return k


def _homog_nd(coeffs, base, idx):
    # nondegenerate solutions of sum_{i in idx} c_i base**t_i = 0, up to common shift
    if len(idx) < 2:
        return []
    cs = [coeffs[i] for i in idx]
    G0 = _ilog(base, sum(abs(c) for c in cs))
    bound = (len(idx) - 1) * G0
    out = []
    for e in mann_box_search(cs, base, 0, bound, True):
        k = idx[e.index(0)]
        offs = [(i, k, ei) for i, ei in zip(idx, e) if i != k]
        out.append(({}, offs))
    return out


def _inhom_nd(coeffs, base, idx, rhs):
    cs = [coeffs[i] for i in idx]
    E = _ilog(base, abs(rhs))
    G = _ilog(base, abs(rhs) + sum(abs(c) for c in cs))
    bound = E + (len(idx) - 1) * G
    return [(dict(zip(idx, t)), []) for t in mann_box_search(cs, base, rhs, bound, False)]


def _mann_rec(coeffs, base, idx, rhs, memo):
    key = (idx, rhs)
    if key in memo:
        return memo[key]
    out = list(_homog_nd(coeffs, base, idx) if rhs == 0 else _inhom_nd(coeffs, base, idx, rhs))
    k = len(idx)
    for size in range(2, k):
        for sub in combinations(idx, size):
            rest = tuple(i for i in idx if i not in sub)
            left = _homog_nd(coeffs, base, sub)
            if not left:
                continue
            right = _mann_rec(coeffs, base, rest, rhs, memo)
            for fa, oa in left:
                for fb, ob in right:
                    fx = dict(fa)
                    fx.update(fb)
                    out.append((fx, oa + ob))
    memo[key] = out
    return out


def mann_solve(coeffs, base, rhs):
    """Families covering ``{t in N^n : sum c_i base**t_i = rhs}`` exactly.

    Each solution either has no vanishing proper subsum (finitely many,
    found in a box bounded by the gap principle) or splits off a minimal
    vanishing subsum, which is a nondegenerate homogeneous solution on
    its own and leaves the same equation on the remaining indices.
    """
    coeffs = [int(c) for c in coeffs]
    if base < 2:
        raise ValueError("base must be at least 2")
    if any(c == 0 for c in coeffs):
        raise ValueError("all coefficients must be nonzero")
    n = len(coeffs)
    if n == 0:
        return [SolutionFamily.everything(0)] if rhs == 0 else []
    raw = _mann_rec(coeffs, base, tuple(range(n)), int(rhs), {})
    fams = set()
    for fx, offs in raw:
        fam = SolutionFamily.make(n, fx, offs)
        if fam is not None:
            fams.add(fam)
    return sorted(fams, key=SolutionFamily.sort_key)


def mann_family_valid(coeffs, base, rhs, family):
    """Substituting the parametrisation gives ``rhs`` identically in the free roots."""
    const = 0
    groups = {}
    for i, A in family.fixed:
        const += coeffs[i] * base ** A
    for r in family.roots():
        groups[r] = coeffs[r]
    for j, k, B in family.offsets:
        groups[k] += coeffs[j] * base ** B
    return const == rhs and all(v == 0 for v in groups.values())
