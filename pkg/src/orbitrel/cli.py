"""Command-line front end.

    orbitrel linearize problem.json [--trunc T] [--json]
    orbitrel orbit problem.json [--tmax K] [--json]
    orbitrel dominant problem.json [--json]
    orbitrel mann-solve [eq.json] [--coeffs 1,-1 --base 2 --rhs 4] [--box B] [--json]
    orbitrel classify problem.json [--box B] [--trunc T] [--json] [--verbose]
    orbitrel oracle problem.json [--box B] [--json]

Exit codes: 0 success, 1 parse or schema error, 2 precision exhausted,
3 domain violation.  Reports go to stdout, diagnostics to stderr.
"""
import argparse
import json
import os
import sys
from functools import lru_cache
from importlib import resources

import jsonschema

from orbitrel.classifier import brute_force_oracle, classify, IterationalVariety
from orbitrel.dynamics import (boettcher, functional_residual, koenigs, normalize_basepoint,
                               orbit, orbit_values, validate)
from orbitrel.errors import (ConstantTermNonzero, DomainViolation, OutsideConvergenceControl,
                             PrecisionExhausted, SchemaError)
from orbitrel.series import MultiPoly, TruncatedSeries, eval_series
from orbitrel.solvers import DEFAULT_BOX, dominance_certificates, mann_solve
from orbitrel.valued_field import INF, FieldSpec, element_from_json, element_to_json

DEFAULT_TRUNC = 32
DEFAULT_TMAX = 10

EXIT_OK, EXIT_SCHEMA, EXIT_PRECISION, EXIT_DOMAIN = 0, 1, 2, 3


@lru_cache(maxsize=None)
def load_schema(name):
    text = resources.files("orbitrel").joinpath("schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def check_schema(obj, name):
    try:
        jsonschema.validate(obj, load_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{name} schema: {exc.message} at {where}") from None


def dumps(obj):
    """Canonical JSON text: the byte-stable form the committed reports use."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None


class Problem:
    """A parsed problem file."""

    def __init__(self, obj):
        check_schema(obj, "problem")
        self.raw = obj
        self.field = FieldSpec.from_json(obj["field"])
        self.f = TruncatedSeries.from_json(self.field, obj["map"])
        self.a = element_from_json(self.field, obj["a"])
        self.poly = MultiPoly.from_json(self.field, obj["poly"]) if "poly" in obj else None
        opts = obj.get("options", {})
        self.box = _opt_int(obj, opts, "box")
        self.trunc = _opt_int(obj, opts, "trunc")
        self.verbose = bool(opts.get("verbose", False))


def _opt_int(obj, opts, key):
    v = obj.get(key, opts.get(key))
    return None if v is None else int(v)


def _resolve_trunc(args, prob):
    if getattr(args, "trunc", None) is not None:
        return args.trunc
    if prob is not None and prob.trunc is not None:
        return prob.trunc
    env = os.environ.get("ORBITREL_TRUNC")
    if env:
        try:
            return int(env)
        except ValueError:
            raise SchemaError(f"ORBITREL_TRUNC must be an integer, got {env!r}") from None
    return DEFAULT_TRUNC


def _resolve_box(args, prob):
    if getattr(args, "box", None) is not None:
        return args.box
    if prob is not None and prob.box is not None:
        return prob.box
    return DEFAULT_BOX


def _need_poly(prob):
    if prob.poly is None:
        raise SchemaError("this subcommand needs a \"poly\" entry in the problem file")
    return prob.poly


def _vstr(v):
    return "inf" if v is INF else str(v)


# ---------------------------------------------------------------- report text

def emit_report(report, fmt="text"):
    """The report as canonical JSON text or as human-readable lines."""
    if fmt == "json":
        return dumps(report.to_json())
    n = report.problem.get("poly", {}).get("nvars")
    lines = [f"system: M = {report.M}, v(lambda) = {report.vlambda}, "
             f"normalization N = {report.normalization}"]
    box = f"[0,{report.box}]" + (f"^{n}" if n else "")
    lines.append(f"box {box}, truncation {report.trunc}")
    if not report.families and not report.residual_points:
        lines.append("no relations on orbit (within verified box)")
        return "\n".join(lines) + "\n"
    for k, (fam, ver) in enumerate(zip(report.families, report.verification), 1):
        kind = "iterational" if isinstance(fam, IterationalVariety) else "deformed torus"
        lines.append(f"family {k} ({kind}, {ver.status}, {ver.points_checked} points in box):")
        lines.extend("  " + eq for eq in fam.equations())
    if report.residual_points:
        pts = ", ".join("(" + ",".join(str(x) for x in p) + ")" for p in report.residual_points)
        lines.append(f"residual points: {pts}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- subcommands

def cmd_linearize(args, out, err):
    prob = Problem(read_json(args.problem))
    trunc = _resolve_trunc(args, prob)
    sys_ = validate(prob.f)
    if sys_.M == 1:
        kind, h = "koenigs", koenigs(sys_, trunc)
    else:
        kind, h = "boettcher", boettcher(sys_, trunc)
    res = functional_residual(sys_, h, min(trunc, h.trunc))
    rv = res.residual_valuation()
    if args.json:
        out.write(dumps({"kind": kind, "M": str(sys_.M), "vlambda": str(sys_.vlam),
                         "h": h.to_json(), "residual_valuation": _vstr(rv)}))
        return EXIT_OK
    out.write(f"{kind} coordinate, M = {sys_.M}, v(lambda) = {sys_.vlam}\n")
    for i, c in enumerate(h.coeffs):
        if not (c.val is INF and c.is_exact):
            out.write(f"h_{i} = {c}\n")
    out.write(f"residual valuation: {_vstr(rv)}\n")
    return EXIT_OK


def cmd_orbit(args, out, err):
    prob = Problem(read_json(args.problem))
    sys_ = validate(prob.f)
    N, _ = normalize_basepoint(sys_, prob.a)
    if N:
        raise DomainViolation(f"need v(a) > v(lambda) = {sys_.vlam}; "
                              f"f^{N}(a) is the first point that qualifies")
    pts = orbit(sys_, prob.a, args.tmax)
    if args.json:
        out.write(dumps({"M": str(sys_.M), "vlambda": str(sys_.vlam),
                         "points": [{"t": str(p.index), "valuation": str(p.valuation),
                                     "value": element_to_json(p.value)} for p in pts]}))
        return EXIT_OK
    out.write("t\tv(f^t(a))\n")
    for p in pts:
        out.write(f"{p.index}\t{p.valuation}\n")
    return EXIT_OK


def cmd_dominant(args, out, err):
    prob = Problem(read_json(args.problem))
    G = _need_poly(prob)
    certs = [c for _, c in sorted(dominance_certificates(G).items(),
                                  key=lambda kv: (sum(kv[0]), kv[0]))]
    if args.json:
        out.write(dumps({"dominant": [{"exp": [str(e) for e in c.exponent],
                                       "weight": [str(w) for w in c.weight],
                                       "unique": c.unique} for c in certs]}))
        return EXIT_OK
    for c in certs:
        how = "uniquely" if c.unique else "jointly"
        out.write(f"x^{list(c.exponent)} dominates {how} at weight {list(c.weight)}\n")
    return EXIT_OK


def _parse_coeffs(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise SchemaError(f"--coeffs must be comma-separated integers, got {text!r}") from None


def cmd_mann(args, out, err):
    if args.problem is not None:
        obj = read_json(args.problem)
        check_schema(obj, "mann")
        coeffs = [int(c) for c in obj["coeffs"]]
        base, rhs = int(obj["base"]), int(obj["rhs"])
        box = args.box if args.box is not None else int(obj.get("box", DEFAULT_BOX))
    else:
        if args.coeffs is None or args.base is None or args.rhs is None:
            raise SchemaError("mann-solve needs a JSON file or --coeffs, --base and --rhs")
        coeffs, base, rhs = _parse_coeffs(args.coeffs), args.base, args.rhs
        box = args.box if args.box is not None else DEFAULT_BOX
    if not coeffs:
        raise SchemaError("at least one coefficient is needed")
    if base < 2:
        raise DomainViolation(f"base must be at least 2, got {base}")
    fams = mann_solve(coeffs, base, rhs)
    for fam in fams:
        for t in fam.points_in_box(box):
            if sum(c * base ** x for c, x in zip(coeffs, t)) != rhs:
                raise RuntimeError(f"solver returned a non-solution {t}")
    if args.json:
        out.write(dumps({"families": [f.to_json() for f in fams],
                         "box_checked": ["0", str(box)]}))
        return EXIT_OK
    if not fams:
        out.write("no solutions\n")
    for fam in fams:
        if fam.is_point:
            t = fam.points_in_box(max(box, max(dict(fam.fixed).values(), default=0)))[0]
            out.write("point (" + ",".join(str(x) for x in t) + ")\n")
            continue
        eqs = [f"t{i + 1} = {A}" for i, A in fam.fixed]
        eqs += [f"t{j + 1} = t{k + 1} + {B}" for j, k, B in fam.offsets]
        out.write("family: " + ", ".join(eqs) + f" ({len(fam.points_in_box(box))} points in box)\n")
    return EXIT_OK


def _torus_xi(prob, report, trunc, err):
    # conjugated coordinates of the base exponents, shown in verbose mode
    sys_ = validate(prob.f)
    if sys_.M != 1 or not report.families:
        return
    h = koenigs(sys_, trunc)
    for k, fam in enumerate(report.families, 1):
        if isinstance(fam, IterationalVariety):
            continue
        pts = orbit_values(sys_, prob.a, max(fam.base_exponents))
        xi = ", ".join(f"v = {_vstr(eval_series(h, pts[t]).val)}" for t in fam.base_exponents)
        err.write(f"family {k}: xi = h(f^t(a)) at the base exponents: {xi}\n")


def cmd_classify(args, out, err):
    prob = Problem(read_json(args.problem))
    G = _need_poly(prob)
    trunc = _resolve_trunc(args, prob)
    box = _resolve_box(args, prob)
    sys_ = validate(prob.f)
    report = classify(sys_, prob.a, G, box=box, trunc=trunc)
    out.write(emit_report(report, "json" if args.json else "text"))
    if args.verbose or prob.verbose:
        for d in report.diagnostics:
            err.write(f"note: {d}\n")
        try:
            _torus_xi(prob, report, trunc, err)
        except PrecisionExhausted as exc:
            err.write(f"note: xi not shown ({exc})\n")
    return EXIT_OK


def cmd_oracle(args, out, err):
    prob = Problem(read_json(args.problem))
    G = _need_poly(prob)
    box = _resolve_box(args, prob)
    sys_ = validate(prob.f)
    zeros = sorted(brute_force_oracle(sys_, prob.a, G, box))
    if args.json:
        out.write(dumps({"box": str(box), "zeros": [[str(x) for x in t] for t in zeros]}))
        return EXIT_OK
    if not zeros:
        out.write(f"no zeros in [0,{box}]^{G.nvars}\n")
    for t in zeros:
        out.write("(" + ",".join(str(x) for x in t) + ")\n")
    return EXIT_OK


# ---------------------------------------------------------------- driver

def build_parser():
    parser = argparse.ArgumentParser(
        prog="orbitrel",
        description="Polynomial relations on orbits of attracting non-archimedean maps.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trunc=False, box=False):
        p.add_argument("--json", action="store_true", help="emit one JSON object")
        p.add_argument("--verbose", "-v", action="store_true", help="diagnostics on stderr")
        if trunc:
            p.add_argument("--trunc", type=int, help="series truncation order "
                           "(default: problem file, $ORBITREL_TRUNC, 32)")
        if box:
            p.add_argument("--box", type=int, help=f"verification box [0,B] (default {DEFAULT_BOX})")

    p = sub.add_parser("linearize", help="Koenigs or Boettcher coordinate of the map")
    p.add_argument("problem")
    common(p, trunc=True)
    p.set_defaults(func=cmd_linearize)

    p = sub.add_parser("orbit", help="orbit points and their valuations")
    p.add_argument("problem")
    p.add_argument("--tmax", type=int, default=DEFAULT_TMAX)
    common(p)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("dominant", help="dominant monomials of the polynomial")
    p.add_argument("problem")
    common(p)
    p.set_defaults(func=cmd_dominant)

    p = sub.add_parser("mann-solve", help="solve sum c_i M^t_i = c_0 in natural numbers")
    p.add_argument("problem", nargs="?")
    p.add_argument("--coeffs")
    p.add_argument("--base", type=int)
    p.add_argument("--rhs", type=int)
    common(p, box=True)
    p.set_defaults(func=cmd_mann)

    p = sub.add_parser("classify", help="classify the relations of the polynomial on the orbit")
    p.add_argument("problem")
    common(p, trunc=True, box=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("oracle", help="brute-force zeros in the box")
    p.add_argument("problem")
    common(p, box=True)
    p.set_defaults(func=cmd_oracle)
    return parser


def run(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_SCHEMA
    try:
        return args.func(args, out, err)
    except SchemaError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_SCHEMA
    except PrecisionExhausted as exc:
        err.write(f"precision exhausted: {exc}\n")
        return EXIT_PRECISION
    except (DomainViolation, ConstantTermNonzero, OutsideConvergenceControl) as exc:
        err.write(f"domain violation: {exc}\n")
        return EXIT_DOMAIN
    except ValueError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_SCHEMA


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
