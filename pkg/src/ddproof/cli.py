"""Command line front end.

One subcommand per invocation: parse, check, prove, eliminate-cut,
countermodel, translate, fixtures. Exit codes: 0 for success (a proof
found, a check passed, no countermodel within the requested bound), 1
for a definite negative (rejected input, refuted goal, countermodel
found), 2 for unknown (budget or enumeration cap), 3 for usage errors.

Formula files (.rlf) hold one formula or sequent per line; proof files
(.rlp) hold a single s-expression. Every proof printed by any subcommand
is re-checked by the kernel first.
"""

import argparse
import os
import sys

from .builders import (
    ax,
    build_leibniz,
    build_rlambda_left,
    build_rlambda_right,
    build_sym_trans,
    derived_iota1l,
    derived_iota2l,
    derived_iotar,
    weaken_to,
)
from .cutelim import eliminate_cuts, eliminate_cuts_traced
from .kernel import CheckError, ProofNode, check_proof
from .search import DEFAULT_BUDGET, Proved, Refuted, SearchBudget, Unknown, prove
from .semantics import DEFAULT_MAX_SIZE, EnumerationCapError, find_countermodel
from .surface import (
    ParseError,
    format_formula,
    format_proof,
    format_sequent,
    parse_formula,
    parse_proof,
    parse_sequent,
)
from .syntax import Identity, Not, Param, PredAtom, Sequent
from .translate import is_pure_fol, translate, translate_sequent


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; the contract here is 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def _env_int(name: str, fallback: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None


def _budget(args) -> SearchBudget:
    depth = args.depth
    if depth is None:
        depth = _env_int("RL_MAX_DEPTH", DEFAULT_BUDGET.max_depth)
    models = args.models
    if models is None:
        models = _env_int("RL_MAX_MODEL", DEFAULT_BUDGET.model_cap)
    return SearchBudget(
        max_depth=depth,
        term_pool_cap=args.term_pool,
        contraction_cap=args.contractions,
        model_cap=models,
    )


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(str(e)) from None


def _content_lines(text: str):
    """Nonblank, non-comment lines with their 1-based line numbers. A line
    whose first token is `#` followed by anything but a letter is a comment
    (parameters are written #name, so `#a = #b` is content)."""
    import re

    for i, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#") and not re.match(r"#[A-Za-z]", stripped):
            continue
        yield i, stripped


def _checked(root: ProofNode) -> ProofNode:
    """The one gate proofs pass through on their way to stdout."""
    check_proof(root)
    return root


# ---------------------------------------------------------------------------
# subcommands


def _cmd_parse(args) -> int:
    text = _read(args.file)
    if args.file.endswith(".rlp"):
        root = parse_proof(text)
        print(format_proof(root, unicode=args.unicode))
        return 0
    for _, line in _content_lines(text):
        if "=>" in line:
            print(format_sequent(parse_sequent(line), unicode=args.unicode))
        else:
            print(format_formula(parse_formula(line), unicode=args.unicode))
    return 0


def _cmd_check(args) -> int:
    root = parse_proof(_read(args.file))
    proof = check_proof(root, lax_iota_eigen=args.lax_iota_eigen)
    print(f"OK height={proof.height}")
    return 0


def _cmd_prove(args) -> int:
    goal = parse_sequent(args.sequent)
    jobs = 1 if args.deterministic else args.jobs
    verdict = prove(goal, _budget(args), jobs=jobs)
    if isinstance(verdict, Proved):
        print("proved")
        print(format_proof(_checked(verdict.proof.root), unicode=args.unicode))
        return 0
    if isinstance(verdict, Refuted):
        print("refuted")
        print(verdict.model.describe(verdict.assignment))
        return 1
    print(f"unknown: {verdict.reason}")
    return 2


def _cmd_eliminate_cut(args) -> int:
    root = parse_proof(_read(args.file))
    out, trace = eliminate_cuts_traced(root)
    if args.emit_trace:
        for e in trace:
            print(
                f"trace: cut@{e.path} degree={e.degree}"
                f" formula={format_formula(e.formula, unicode=args.unicode)}"
                f" measure=({e.degree_before},{e.maximal_before})"
                f"->({e.degree_after},{e.maximal_after})"
                f" cases={','.join(e.cases)}"
            )
    print(format_proof(_checked(out), unicode=args.unicode))
    return 0


def _cmd_countermodel(args) -> int:
    goal = parse_sequent(args.sequent)
    max_size = args.max_size
    if max_size is None:
        max_size = _env_int("RL_MAX_MODEL", DEFAULT_MAX_SIZE)
    cm = find_countermodel(goal, max_size=max_size)
    if cm is None:
        print(f"no countermodel up to size {max_size}")
        return 0
    print(cm.describe())
    return 1


def _cmd_translate(args) -> int:
    text = _read(args.file)
    for _, line in _content_lines(text):
        if "=>" in line:
            out = translate_sequent(parse_sequent(line))
            assert all(is_pure_fol(f) for f in out.ant + out.suc)
            print(format_sequent(out, unicode=args.unicode))
        else:
            out = translate(parse_formula(line))
            assert is_pure_fol(out)
            print(format_formula(out, unicode=args.unicode))
    return 0


# ---------------------------------------------------------------------------
# golden fixtures


def fixture_proofs() -> list[tuple[str, ProofNode]]:
    """Every golden proof the fixtures subcommand emits: the paraphrase
    bridges in both directions, the symmetry-transitivity derivation,
    replacement-of-equals samples, the three derived description rules
    (each containing cuts), and their cut-eliminated forms."""
    a, b, b1, b2 = Param("a"), Param("b"), Param("b1"), Param("b2")

    def q(t):
        return PredAtom("Q", (t,))

    def p(t):
        return PredAtom("P", (t,))

    dd = parse_formula("(lam x. P(x)) (iota y. Q(y))")
    entries: list[tuple[str, ProofNode]] = [
        ("rlambda_left", build_rlambda_left(dd)),
        ("rlambda_right", build_rlambda_right(dd)),
        ("sym_trans", build_sym_trans(b1, b2, b)),
        ("leibniz_bool", build_leibniz(parse_formula("P(x) & ~Q(x)"), "x", b1, b2)),
        ("leibniz_quant", build_leibniz(parse_formula("exists y. y = x"), "x", b1, b2)),
        (
            "leibniz_dd",
            build_leibniz(
                parse_formula("(lam z. Q(z) | P(x)) (iota w. R(w, x))"), "x", b1, b2
            ),
        ),
    ]

    # derived no-witness rule, on an abstract that contradicts its own body
    dd_neg = parse_formula("(lam x. ~Q(x)) (iota y. Q(y))")
    prem = ProofNode("negl", Sequent((q(a), Not(q(a))), ()), (ax(q(a)),))
    entries.append(("derived_iota1l", derived_iota1l(prem, dd_neg, a)))

    # derived uniqueness rule
    gamma2 = (q(b1), q(b2))
    p1 = weaken_to(ax(q(b1)), Sequent(gamma2, (Identity(b1, b2), q(b1))))
    p2 = weaken_to(ax(q(b2)), Sequent(gamma2, (Identity(b1, b2), q(b2))))
    p3 = weaken_to(
        ax(Identity(b1, b2)),
        Sequent((Identity(b1, b2),) + gamma2, (Identity(b1, b2),)),
    )
    entries.append(("derived_iota2l", derived_iota2l(p1, p2, p3, dd, b1, b2)))

    # derived right rule, from an explicit uniqueness assumption
    uniq = parse_formula("forall z. Q(z) -> z = #b")
    gamma3 = (q(b), p(b), uniq)
    r1 = weaken_to(ax(q(b)), Sequent(gamma3, (q(b),)))
    r2 = weaken_to(ax(p(b)), Sequent(gamma3, (p(b),)))
    imp = parse_formula("Q(#a) -> #a = #b")
    imp_l = weaken_to(ax(q(a)), Sequent((q(a), q(b), p(b)), (Identity(a, b), q(a))))
    imp_r = weaken_to(
        ax(Identity(a, b)),
        Sequent((Identity(a, b), q(a), q(b), p(b)), (Identity(a, b),)),
    )
    n_imp = ProofNode(
        "impl", Sequent((imp, q(a), q(b), p(b)), (Identity(a, b),)), (imp_l, imp_r)
    )
    r3 = ProofNode(
        "foralll", Sequent((q(a),) + gamma3, (Identity(a, b),)), (n_imp,), terms=(a,)
    )
    entries.append(("derived_iotar", derived_iotar(r1, r2, r3, dd, b, a)))

    for name in ("derived_iota1l", "derived_iota2l", "derived_iotar"):
        with_cuts = dict(entries)[name]
        entries.append((name + "_cutfree", eliminate_cuts(with_cuts)))
    return entries


def _check_fixture_file(path: str) -> int:
    return check_proof(parse_proof(_read(path))).height


def _cmd_fixtures(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    named_paths = []
    for name, proof in fixture_proofs():
        path = os.path.join(args.out, name + ".rlp")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(format_proof(proof, unicode=args.unicode) + "\n")
        named_paths.append((name, path))

    if args.jobs > 1:
        import concurrent.futures as cf

        with cf.ProcessPoolExecutor(max_workers=args.jobs) as ex:
            heights = list(ex.map(_check_fixture_file, [p for _, p in named_paths]))
    else:
        heights = [_check_fixture_file(p) for _, p in named_paths]

    for (name, _), height in zip(named_paths, heights):
        print(f"OK {name} height={height}")
    return 0


# ---------------------------------------------------------------------------
# wiring


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ddproof", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--unicode", action="store_true", help="print with logic glyphs")

    p = sub.add_parser("parse", help="validate and pretty-print a formula or proof file")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("check", help="run the kernel over a proof file")
    p.add_argument("file")
    p.add_argument(
        "--lax-iota-eigen",
        action="store_true",
        help="allow the description-right eigenparameter to occur in the abstract body",
    )
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("prove", help="search for a proof or countermodel of a sequent")
    p.add_argument("sequent")
    p.add_argument("--depth", type=int, default=None, help="search depth (RL_MAX_DEPTH)")
    p.add_argument("--models", type=int, default=None, help="countermodel domain bound (RL_MAX_MODEL)")
    p.add_argument("--term-pool", type=int, default=DEFAULT_BUDGET.term_pool_cap)
    p.add_argument("--contractions", type=int, default=DEFAULT_BUDGET.contraction_cap)
    p.add_argument("--jobs", type=int, default=1, help="parallel searchers")
    p.add_argument("--deterministic", action="store_true", help="single worker, byte-stable output")
    common(p)
    p.set_defaults(func=_cmd_prove)

    p = sub.add_parser("eliminate-cut", help="rewrite a proof into cut-free form")
    p.add_argument("file")
    p.add_argument("--emit-trace", action="store_true", help="log each reduction step")
    common(p)
    p.set_defaults(func=_cmd_eliminate_cut)

    p = sub.add_parser("countermodel", help="search small models that falsify a sequent")
    p.add_argument("sequent")
    p.add_argument("--max-size", type=int, default=None, help="largest domain to try (RL_MAX_MODEL)")
    p.set_defaults(func=_cmd_countermodel)

    p = sub.add_parser("translate", help="eliminate abstracts and descriptions from a formula file")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=_cmd_translate)

    p = sub.add_parser("fixtures", help="regenerate and re-check the golden proof files")
    p.add_argument("--out", default="fixtures", help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="parallel checkers")
    common(p)
    p.set_defaults(func=_cmd_fixtures)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"ddproof: error: {e}", file=sys.stderr)
        return 3
    except ParseError as e:
        print(f"ddproof: parse error: {e}", file=sys.stderr)
        return 1
    except CheckError as e:
        print(f"ddproof: rejected: {e}", file=sys.stderr)
        return 1
    except EnumerationCapError as e:
        print(f"ddproof: unknown: signature-cap ({e})", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # the reader went away (e.g. piped into head); not our problem
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
