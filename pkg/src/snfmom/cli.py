"""Batch verification command line: ``snfmom verify|probe|list|oracle``.

Exit codes: 0 when every selected check passes, 1 on usage errors, 2 on a
mismatch (or a refuted conjecture), 3 when a budget is exhausted.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

from . import families, lattice_gram, moments, toeplitz, young
from .errors import BudgetExceeded, Mismatch, NoClosedForm, SnfmomError
from .polymat import (DEFAULT_MINOR_BUDGET, PolyMatrix, ldu_extract, minor_gcd_oracle,
                      normalize_sign, snf_from_divisors)
from .polyring import Poly, var

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_BUDGET = 0, 1, 2, 3
DEFAULT_SEED = 20240101
AUTO_MINOR_SIZE = 4


@dataclass
class VerificationReport:
    case_id: str
    rows: int
    cols: int
    claimed: list[str]
    extracted: list[str]
    match: bool
    methods: dict = field(default_factory=dict)
    runtime_ms: float = 0.0
    witness: object = None
    status: str = "pass"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        return cls(**data)

    @property
    def exit_code(self) -> int:
        return {"pass": EXIT_OK, "mismatch": EXIT_MISMATCH, "budget": EXIT_BUDGET}.get(
            self.status, EXIT_USAGE)

    def to_text(self) -> str:
        flags = ", ".join(f"{k}={'ok' if v else ('skipped' if v is None else 'FAIL')}"
                          for k, v in self.methods.items())
        lines = [f"[{'PASS' if self.match else self.status.upper()}] {self.case_id} "
                 f"({self.rows}x{self.cols}, {self.runtime_ms:.1f} ms)",
                 f"  claimed:   {', '.join(self.claimed)}",
                 f"  extracted: {', '.join(self.extracted)}"]
        if flags:
            lines.append(f"  methods:   {flags}")
        if self.witness is not None:
            lines.append(f"  witness:   {json.dumps(self.witness, default=str)}")
        return "\n".join(lines)


def _strs(xs: Sequence[Poly]) -> list[str]:
    return [x.to_string() for x in xs]


def _univariate(A: PolyMatrix) -> bool:
    names = set()
    for row in A.tolist():
        for x in row:
            names.update(x.variables())
    return len(names) <= 1


def _minor_gcd_method(A: PolyMatrix, claimed: Sequence[Poly], opts: dict):
    """None when skipped, otherwise whether determinantal divisors agree with ``claimed``."""
    forced = opts.get("minor_gcd", False)
    if not _univariate(A) or not (forced or A.rows <= AUTO_MINOR_SIZE):
        return None
    try:
        return moments.divisors_agree(A, claimed, opts.get("max_minors", DEFAULT_MINOR_BUDGET))
    except BudgetExceeded:
        if forced:
            raise
        return None


# -- individual cases (top level so a process pool can pickle them) ----------

def _case_hankel(opts: dict) -> VerificationReport:
    n, shift = opts["n"], str(opts.get("shift", "0"))
    if opts.get("symbolic"):
        spec = moments.symbolic_b0_spec() if shift in ("even", "odd") else moments.symbolic_spec()
        name = spec.name
    else:
        name = opts["family"]
        spec = families.family_spec(name)
    fn = moments.MomentFunctional(spec)
    H = moments.hankel(fn, n, shift)
    methods: dict = {}
    if shift == "0":
        cert = moments.verify_hankel_snf(spec, n)
        claimed = cert.diagonal
        methods.update(cert.methods)
        if not opts.get("symbolic") and name != "octabasic":
            methods["corollary"] = families.corollary_diagonal(name, n) == claimed
    elif shift in ("even", "odd"):
        rep = moments.verify_eo_theorem(spec, n)
        claimed = rep.even_diagonal if shift == "even" else rep.odd_diagonal
        methods.update(rep.methods)
        methods["interleave"] = rep.interleave_ok
        methods["det_identity"] = rep.det_identity_ok
    else:
        # no closed-form claim for (mu_{i+j+1}): report the Smith form from minors
        if not _univariate(H):
            raise SnfmomError("shift 1 is only supported for univariate families")
        deltas = minor_gcd_oracle(H, budget=opts.get("max_minors", DEFAULT_MINOR_BUDGET))
        claimed = [normalize_sign(d) for d in snf_from_divisors(deltas)]
        methods["minor_gcd"] = True
        return VerificationReport(f"hankel:{name}:shift={shift}:n={n}", H.rows, H.cols,
                                  _strs(claimed), _strs(claimed), True, methods)
    extracted = ldu_extract(H).D
    methods["minor_gcd"] = _minor_gcd_method(H, claimed, opts)
    ok = extracted == claimed and all(v is not False for v in methods.values())
    return VerificationReport(f"hankel:{name}:shift={shift}:n={n}", H.rows, H.cols,
                              _strs(claimed), _strs(extracted), ok, methods,
                              status="pass" if ok else "mismatch")


def _case_toeplitz(opts: dict) -> VerificationReport:
    n = opts["n"]
    spec = toeplitz.symbolic_laurent_spec() if opts.get("symbolic") else toeplitz.schroeder_spec()
    fn = toeplitz.ToeplitzFunctional(spec)
    T = toeplitz.toeplitz_matrix(fn, n)
    cert = toeplitz.verify_toeplitz_snf(spec, n)
    methods = dict(cert.methods)
    methods["biorthogonality"] = bool(toeplitz.verify_biorthogonality(spec, n))
    if spec.name == "schroeder":
        methods["displayed_matrix"] = toeplitz.schroder_hankel_like(n) == T
        methods["minor_gcd"] = _minor_gcd_method(T, cert.diagonal, opts)
    extracted = ldu_extract(T).D
    ok = extracted == cert.diagonal and all(v is not False for v in methods.values())
    return VerificationReport(f"toeplitz:{spec.name}:n={n}", T.rows, T.cols,
                              _strs(cert.diagonal), _strs(extracted), ok, methods,
                              status="pass" if ok else "mismatch")


def _case_lattice(opts: dict) -> VerificationReport:
    ident = opts["lattice"]
    kind, _, num = ident.partition(":")
    n = int(num)
    if kind == "partitions":
        cert = lattice_gram.verify_char_poly_snf(n)
        L = lattice_gram.partition_lattice(n)
        rep = lattice_gram.verify_lattice_factorization(L, determinant=n <= 5)
        methods = dict(cert.methods)
        methods["factorization"] = rep.identity_ok
        methods["lindstrom"] = rep.determinant_ok if n <= 5 else None
        methods["stirling"] = lattice_gram.stirling_identity(n)
        methods["sign_fix"] = cert.sign_fix
        q = var("q")
        G = lattice_gram.gram_from_join(L.reordered(lambda x: (len(x), x)), lambda x: q ** len(x))
        extracted = ldu_extract(G).D
        return VerificationReport(f"lattice:{ident}", G.rows, G.cols, _strs(cert.diagonal),
                                  _strs(extracted), extracted == cert.diagonal, methods)
    if kind == "noncrossing":
        rep = lattice_gram.verify_dahab_determinants(n)
        claimed = [lattice_gram.dahab_product(n)]
        size = len(lattice_gram.noncrossing_lattice(n))
        methods = {"det_product": rep.product_ok, "det_delta": rep.delta_ok}
        return VerificationReport(f"lattice:{ident}", size, size, _strs(claimed),
                                  [rep.det_q.to_string()], True, methods)
    if kind == "lickorish":
        ok = lattice_gram.lickorish_identity(n)
        M = lattice_gram.lickorish_matrix(n)
        claimed = lattice_gram.conjectured_diagonal(n, "lickorish")
        return VerificationReport(f"lattice:{ident}", M.rows, M.cols, _strs(claimed),
                                  [], ok, {"j_identity": ok},
                                  status="pass" if ok else "mismatch")
    raise ValueError(f"unknown lattice id {ident!r}")


def _case_young(opts: dict) -> VerificationReport:
    shape = opts["shape"] if isinstance(opts["shape"], young.YoungShape) \
        else young.YoungShape.parse(opts["shape"])
    var_of, bound, tag = young.cell_var, young.DEFAULT_CELL_BOUND, ""
    if opts.get("specialize"):
        value = var(opts["specialize"])
        var_of, bound, tag = (lambda c: value), None, f":{opts['specialize']}"
    if opts.get("anchor"):
        a, b = (int(t) for t in opts["anchor"].split(","))
        rep = young.verify_rect_udl(shape, young.RectAnchor(a, b), var_of)
        return VerificationReport(f"young:{shape}:anchor={a},{b}{tag}", a, b, _strs(rep.diagonal),
                                  _strs(rep.diagonal), True, rep.methods)
    cert = young.verify_udl(shape, var_of, bound)
    n = shape.diagonal + 1
    A = young.a_matrix(shape, var_of, bound)
    extracted = ldu_extract(A.flipped()).D
    methods = dict(cert.methods)
    methods["sign_fix"] = cert.sign_fix
    methods["minor_gcd"] = _minor_gcd_method(A, cert.diagonal, opts)
    ok = all(v is not False for k, v in methods.items() if k != "sign_fix")
    return VerificationReport(f"young:{shape}{tag}", n, n, _strs(cert.diagonal),
                              _strs(extracted), ok, methods,
                              status="pass" if ok else "mismatch")


def _case_vandermonde(opts: dict) -> VerificationReport:
    n, variant = opts["n"], "case_" + opts["variant"]
    cert = moments.verify_vandermonde_snf(None, n, variant)
    V = moments.vandermonde_matrix(None, n, variant)
    methods = dict(cert.methods)
    if variant == "case_a":
        methods["gram_identity"] = moments.verify_vandermonde_gram_identity(None, n)
    methods["minor_gcd"] = _minor_gcd_method(V, cert.diagonal, opts)
    extracted = ldu_extract(V).D
    ok = extracted == cert.diagonal and all(v is not False for v in methods.values())
    return VerificationReport(f"vandermonde:{variant}:n={n}", V.rows, V.cols, _strs(cert.diagonal),
                              _strs(extracted), ok, methods, status="pass" if ok else "mismatch")


_CASES = {"hankel": _case_hankel, "toeplitz": _case_toeplitz, "lattice": _case_lattice,
          "young": _case_young, "vandermonde": _case_vandermonde}


def run_case(kind: str, opts: dict) -> VerificationReport:
    """Run one verification, folding failures into the report instead of raising."""
    t0 = time.perf_counter()
    try:
        rep = _CASES[kind](opts)
    except Mismatch as exc:
        rep = VerificationReport(opts.get("case_id", kind), 0, 0, [], [], False,
                                 witness={"message": str(exc), "detail": exc.witness},
                                 status="mismatch")
    except BudgetExceeded as exc:
        rep = VerificationReport(opts.get("case_id", kind), 0, 0, [], [], False,
                                 witness={"message": str(exc)}, status="budget")
    rep.runtime_ms = (time.perf_counter() - t0) * 1000
    return rep


def _thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("SNFMOM_THREADS", "1")))
    except ValueError:
        return 1


def run_cases(cases: list[tuple[str, dict]]) -> list[VerificationReport]:
    """Run independent cases, in parallel when SNFMOM_THREADS > 1; order follows case ids."""
    workers = min(_thread_cap(), len(cases))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run_case, *zip(*cases)))
    else:
        reports = [run_case(k, o) for k, o in cases]
    return sorted(reports, key=lambda r: r.case_id)


# -- argument parsing --------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"seed for randomized campaigns (default {DEFAULT_SEED})")
    common.add_argument("--max-minors", type=int, default=DEFAULT_MINOR_BUDGET,
                        help="budget for the minor-gcd oracle")
    common.add_argument("--max-enum", type=int, default=None,
                        help="bound for path and statistic enumeration in oracle moment")
    common.add_argument("--minor-gcd", action="store_true",
                        help="always run the minor-gcd oracle on univariate matrices")

    p = _Parser(prog="snfmom", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    verify = sub.add_parser("verify", help="verify a Smith form claim")
    vsub = verify.add_subparsers(dest="what", required=True, parser_class=_Parser)
    h = vsub.add_parser("hankel", parents=[common])
    h.add_argument("--family", default="catalan_star",
                   choices=families.FAMILY_NAMES + ("all",))
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--symbolic", action="store_true")
    h.add_argument("--shift", default="0", choices=("0", "1", "even", "odd"))
    t = vsub.add_parser("toeplitz", parents=[common])
    t.add_argument("--family", default="schroeder", choices=("schroeder",))
    t.add_argument("--symbolic", action="store_true")
    t.add_argument("--n", type=int, required=True)
    la = vsub.add_parser("lattice", parents=[common])
    la.add_argument("--lattice", required=True, help="partitions:N, noncrossing:N or lickorish:N")
    y = vsub.add_parser("young", parents=[common])
    y.add_argument("--shape", help="comma-separated row lengths, e.g. 3,2,1")
    y.add_argument("--anchor", help="rectangle corner a,b for the rectangular variant")
    y.add_argument("--specialize", help="set every cell variable to this variable")
    y.add_argument("--random", type=int, default=0, help="verify this many random shapes")
    y.add_argument("--max-size", type=int, default=12, help="largest random shape size")
    v = vsub.add_parser("vandermonde", parents=[common])
    v.add_argument("--variant", choices=("a", "b"), required=True)
    v.add_argument("--n", type=int, required=True)

    probe = sub.add_parser("probe", help="collect evidence for a conjecture")
    psub = probe.add_subparsers(dest="what", required=True, parser_class=_Parser)
    c = psub.add_parser("conjecture", parents=[common])
    c.add_argument("--which", choices=tuple(_PROBE_MODES), required=True)
    c.add_argument("--n", type=int, required=True)

    lst = sub.add_parser("list", help="list identifiers")
    lsub = lst.add_subparsers(dest="what", required=True, parser_class=_Parser)
    lsub.add_parser("families", parents=[common])

    orc = sub.add_parser("oracle", help="compute a single value")
    osub = orc.add_subparsers(dest="what", required=True, parser_class=_Parser)
    m = osub.add_parser("moment", parents=[common])
    m.add_argument("--family", required=True, choices=families.FAMILY_NAMES + ("schroeder",))
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--method", choices=("recurrence", "paths", "closed"), default="recurrence")
    return p


_PROBE_MODES = {"J": "J_general", "Jq": "J_q", "Jqq": "J_qq", "lickorish": "lickorish"}


def _emit(payload, text: str, fmt: str, out) -> None:
    if fmt == "json":
        json.dump(payload, out, indent=2, default=str)
        out.write("\n")
    else:
        out.write(text + "\n")


def _opts(args) -> dict:
    return {"minor_gcd": args.minor_gcd, "max_minors": args.max_minors}


def _verify_cases(args) -> list[tuple[str, dict]]:
    base = _opts(args)
    if args.what == "hankel":
        if args.family != "all":
            names = [args.family]
        elif args.shift in ("even", "odd"):
            # the odd-even split needs b_0 = 0
            names = [f for f in families.FAMILY_NAMES if not families.family_spec(f).b_at(0)]
        else:
            names = list(families.FAMILY_NAMES)
        return [("hankel", {**base, "family": f, "n": args.n, "shift": args.shift,
                            "symbolic": args.symbolic, "case_id": f"hankel:{f}"}) for f in names]
    if args.what == "toeplitz":
        return [("toeplitz", {**base, "n": args.n, "symbolic": args.symbolic,
                              "case_id": "toeplitz"})]
    if args.what == "lattice":
        return [("lattice", {**base, "lattice": args.lattice, "case_id": f"lattice:{args.lattice}"})]
    if args.what == "young":
        if args.random:
            rng = random.Random(args.seed)
            shapes = [young.random_shape(rng, args.max_size) for _ in range(args.random)]
        elif args.shape is not None:
            shapes = [young.YoungShape.parse(args.shape)]
        else:
            raise SnfmomError("verify young needs --shape or --random")
        return [("young", {**base, "shape": str(s), "anchor": args.anchor,
                           "specialize": args.specialize, "case_id": f"young:{s}"})
                for s in shapes]
    return [("vandermonde", {**base, "n": args.n, "variant": args.variant,
                             "case_id": f"vandermonde:{args.variant}"})]


def _oracle(args) -> str:
    if args.family == "schroeder":
        spec = toeplitz.schroeder_spec()
        if args.method == "recurrence":
            return toeplitz.ToeplitzFunctional(spec).moment(args.n).to_string()
        if args.method == "paths":
            bound = args.max_enum or toeplitz.DEFAULT_PATH_BOUND
            return toeplitz.schroder_moment_oracle(spec, args.n, bound).to_string()
        if args.n >= 0:
            return families.q_schroeder(args.n).to_string()
        return families.q_schroeder(-args.n - 1).to_string()
    if args.n < 0:
        raise SnfmomError("moments of a three-term recurrence need n >= 0")
    spec = families.family_spec(args.family)
    if args.method == "recurrence":
        return moments.MomentFunctional(spec).moment(args.n).to_string()
    if args.method == "paths":
        bound = args.max_enum or moments.DEFAULT_PATH_BOUND
        return moments.motzkin_moment_oracle(spec, args.n, bound).to_string()
    return families.closed_form_moment(args.family, args.n, args.max_enum).to_string()


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "list":
            names = list(families.FAMILY_NAMES) + ["schroeder"]
            _emit(names, "\n".join(names), args.format, out)
            return EXIT_OK
        if args.command == "oracle":
            value = _oracle(args)
            _emit({"family": args.family, "n": args.n, "method": args.method, "moment": value},
                  value, args.format, out)
            return EXIT_OK
        if args.command == "probe":
            return _probe(args, out)
        reports = run_cases(_verify_cases(args))
    except BudgetExceeded as exc:
        print(f"snfmom: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NoClosedForm as exc:
        print(f"snfmom: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SnfmomError, ValueError) as exc:
        print(f"snfmom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit([r.to_dict() for r in reports], "\n".join(r.to_text() for r in reports),
          args.format, out)
    return max(r.exit_code for r in reports)


def _probe(args, out) -> int:
    mode = _PROBE_MODES[args.which]
    t0 = time.perf_counter()
    rep = lattice_gram.probe_conjecture(args.n, mode, args.max_minors)
    ms = (time.perf_counter() - t0) * 1000
    payload = {"mode": mode, "n": args.n, "verdict": rep.verdict, "claimed": _strs(rep.claimed),
               "checks": rep.checks, "witness": rep.witness, "runtime_ms": ms}
    text = (f"[{rep.verdict.upper()}] conjecture {mode} n={args.n} ({ms:.1f} ms)\n"
            f"  claimed: {', '.join(payload['claimed'])}\n"
            f"  checks:  {json.dumps(rep.checks)}")
    if rep.witness:
        text += f"\n  witness: {json.dumps(rep.witness)}"
    _emit(payload, text, args.format, out)
    return {"consistent": EXIT_OK, "refuted": EXIT_MISMATCH, "inconclusive": EXIT_BUDGET}[rep.verdict]


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
