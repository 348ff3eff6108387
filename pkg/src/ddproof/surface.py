"""Concrete syntax: tokenizer, parsers and printers.

Formulas are written in a plain ASCII notation,

    forall x. ~P(x) & #a = $c -> (lam y. Q(y)) (iota z. R(z, x))

with `#name` for parameters, `$name` for constants, bare names for bound
variables and 0-ary predicates, and connective precedence

    ~  >  &  >  |  >  ->  >  <->

where the arrows associate to the right, `&`/`|` to the left, `=` binds
tighter than `~`, and binders (`forall x.`, `exists x.`, `lam x.`,
`iota x.`) take the longest scope to the right. A description `iota x. ...`
is only legal as the argument of a parenthesized abstract `(lam x. ...)`.

Sequents separate comma-separated sides with `=>`. Proofs are
s-expressions, one node per line when pretty-printed:

    (foralll (seq (forall x. P(x)) (P($c))) :term $c
      (ax (seq (P($c)) (P($c)))))

with optional `:term`, `:eigen` and `:at` annotations (`:term` may repeat).
`#` starts a comment unless immediately followed by a letter. The unicode
glyphs for the connectives are accepted on input and produced by the
printers when asked, so pretty output re-parses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .kernel import ProofNode
from .syntax import (
    And,
    Const,
    Exists,
    Forall,
    Formula,
    Identity,
    Iff,
    Imp,
    IotaTerm,
    LambdaAtom,
    Not,
    Or,
    Param,
    PredAtom,
    Sequent,
    Term,
    Var,
)


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        self.msg = msg
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {msg}")


@dataclass(frozen=True)
class Token:
    kind: str  # ident, param, const, number, kw, word, punct, eof
    value: str
    line: int
    col: int


_RESERVED = {"forall", "exists", "lam", "iota"}

_GLYPHS = {
    "¬": "~",
    "∧": "&",
    "∨": "|",
    "→": "->",
    "↔": "<->",
    "⇒": "=>",
    "∀": "forall",
    "∃": "exists",
    "λ": "lam",
    "ι": "iota",
}

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"[0-9]+")


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def push(kind: str, value: str):
        toks.append(Token(kind, value, line, col))

    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            m = _IDENT_RE.match(text, i + 1)
            if m:
                push("param", m.group())
                adv = 1 + len(m.group())
                i, col = i + adv, col + adv
                continue
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "$":
            m = _IDENT_RE.match(text, i + 1)
            if not m:
                raise ParseError("'$' must be followed by a constant name", line, col)
            push("const", m.group())
            adv = 1 + len(m.group())
            i, col = i + adv, col + adv
            continue
        if ch == ":":
            m = _IDENT_RE.match(text, i + 1)
            if not m:
                raise ParseError("':' must be followed by an annotation name", line, col)
            push("kw", m.group())
            adv = 1 + len(m.group())
            i, col = i + adv, col + adv
            continue
        if ch in _GLYPHS:
            val = _GLYPHS[ch]
            if val in _RESERVED:
                push("word", val)
            else:
                push("punct", val)
            i, col = i + 1, col + 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group()
            push("word" if word in _RESERVED else "ident", word)
            i, col = i + len(word), col + len(word)
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            push("number", m.group())
            i, col = i + len(m.group()), col + len(m.group())
            continue
        for op in ("<->", "->", "=>", "=", "~", "&", "|", "(", ")", ",", "."):
            if text.startswith(op, i):
                push("punct", op)
                i, col = i + len(op), col + len(op)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def eat(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        if not self.at(kind, value):
            want = value if value is not None else kind
            raise ParseError(
                f"expected {want!r}, got {self.tok.value or self.tok.kind!r}",
                self.tok.line,
                self.tok.col,
            )
        return self.eat()

    def fail(self, msg: str):
        raise ParseError(msg, self.tok.line, self.tok.col)

    def done(self):
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.tok.value!r} after a complete input")

    # --- terms ---

    def term(self) -> Term:
        t = self.tok
        if t.kind == "ident":
            self.eat()
            return Var(t.value)
        if t.kind == "param":
            self.eat()
            return Param(t.value)
        if t.kind == "const":
            self.eat()
            return Const(t.value)
        self.fail("expected a term")

    # --- formulas ---

    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        left = self.imp()
        if self.at("punct", "<->"):
            self.eat()
            return Iff(left, self.iff())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.at("punct", "->"):
            self.eat()
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.at("punct", "|"):
            self.eat()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.neg()
        while self.at("punct", "&"):
            self.eat()
            f = And(f, self.neg())
        return f

    def neg(self) -> Formula:
        if self.at("punct", "~"):
            self.eat()
            return Not(self.neg())
        return self.atom()

    def atom(self) -> Formula:
        t = self.tok
        if t.kind == "word" and t.value in ("forall", "exists"):
            self.eat()
            v = self.expect("ident").value
            self.expect("punct", ".")
            body = self.formula()
            return (Forall if t.value == "forall" else Exists)(v, body)
        if t.kind == "word" and t.value == "iota":
            self.fail("a description is only legal as the argument of an abstract")
        if t.kind == "word" and t.value == "lam":
            self.fail("an abstract must be parenthesized: (lam x. ...) arg")
        if t.kind == "punct" and t.value == "(":
            if self.peek(1).kind == "word" and self.peek(1).value == "lam":
                return self.lambda_atom()
            self.eat()
            f = self.formula()
            self.expect("punct", ")")
            return f
        if t.kind == "ident":
            if self.peek(1).kind == "punct" and self.peek(1).value == "(":
                return self.predicate()
            if self.peek(1).kind == "punct" and self.peek(1).value == "=":
                return self.identity()
            self.eat()
            return PredAtom(t.value, ())
        if t.kind in ("param", "const"):
            return self.identity()
        self.fail("expected a formula")

    def predicate(self) -> PredAtom:
        name = self.expect("ident").value
        self.expect("punct", "(")
        args = [self.term()]
        while self.at("punct", ","):
            self.eat()
            args.append(self.term())
        self.expect("punct", ")")
        return PredAtom(name, tuple(args))

    def identity(self) -> Identity:
        lhs = self.term()
        self.expect("punct", "=")
        return Identity(lhs, self.term())

    def lambda_atom(self) -> LambdaAtom:
        self.expect("punct", "(")
        self.expect("word", "lam")
        v = self.expect("ident").value
        self.expect("punct", ".")
        body = self.formula()
        self.expect("punct", ")")
        return LambdaAtom(v, body, self.lambda_arg())

    def lambda_arg(self) -> Union[Term, IotaTerm]:
        if self.at("word", "iota"):
            return self.iota()
        if self.at("punct", "(") and self.peek(1).kind == "word" and self.peek(1).value == "iota":
            self.eat()
            it = self.iota()
            self.expect("punct", ")")
            return it
        if self.tok.kind in ("ident", "param", "const"):
            return self.term()
        self.fail("an abstract needs a term or description argument")

    def iota(self) -> IotaTerm:
        self.expect("word", "iota")
        v = self.expect("ident").value
        self.expect("punct", ".")
        return IotaTerm(v, self.formula())

    # --- sequents ---

    def formula_list(self) -> tuple[Formula, ...]:
        stops = (("punct", "=>"), ("punct", ")"), ("eof", None))
        if any(self.at(k, v) if v else self.tok.kind == k for k, v in stops):
            return ()
        forms = [self.formula()]
        while self.at("punct", ","):
            self.eat()
            forms.append(self.formula())
        return tuple(forms)

    def sequent(self) -> Sequent:
        ant = self.formula_list()
        self.expect("punct", "=>")
        return Sequent(ant, self.formula_list())

    # --- proofs ---

    def proof(self) -> ProofNode:
        self.expect("punct", "(")
        rule = self.expect("ident").value
        self.expect("punct", "(")
        self.expect("ident", "seq")
        self.expect("punct", "(")
        ant = self.formula_list()
        self.expect("punct", ")")
        self.expect("punct", "(")
        suc = self.formula_list()
        self.expect("punct", ")")
        self.expect("punct", ")")
        terms: list[Term] = []
        eigen: Optional[Param] = None
        at: Optional[int] = None
        while self.tok.kind == "kw":
            kw = self.eat()
            if kw.value == "term":
                terms.append(self.term())
            elif kw.value == "eigen":
                if eigen is not None:
                    raise ParseError("duplicate :eigen", kw.line, kw.col)
                tok = self.expect("param")
                eigen = Param(tok.value)
            elif kw.value == "at":
                if at is not None:
                    raise ParseError("duplicate :at", kw.line, kw.col)
                at = int(self.expect("number").value)
            else:
                raise ParseError(f"unknown annotation :{kw.value}", kw.line, kw.col)
        prems: list[ProofNode] = []
        while self.at("punct", "("):
            prems.append(self.proof())
        self.expect("punct", ")")
        return ProofNode(
            rule, Sequent(ant, suc), tuple(prems), tuple(terms), eigen, at
        )


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.done()
    return t


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.done()
    return f


def parse_sequent(text: str) -> Sequent:
    p = _Parser(text)
    s = p.sequent()
    p.done()
    return s


def parse_proof(text: str) -> ProofNode:
    p = _Parser(text)
    n = p.proof()
    p.done()
    return n


# ---------------------------------------------------------------------------
# printers

_ASCII_STYLE = {
    "~": "~",
    "&": " & ",
    "|": " | ",
    "->": " -> ",
    "<->": " <-> ",
    "=>": "=>",
    "forall": "forall ",
    "exists": "exists ",
    "lam": "lam ",
    "iota": "iota ",
}

_UNICODE_STYLE = {
    "~": "¬",
    "&": " ∧ ",
    "|": " ∨ ",
    "->": " → ",
    "<->": " ↔ ",
    "=>": "⇒",
    "forall": "∀",
    "exists": "∃",
    "lam": "λ",
    "iota": "ι",
}

_LEVEL = {Iff: 1, Imp: 2, Or: 3, And: 4}


def format_term(t: Union[Term, IotaTerm], unicode: bool = False) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Param):
        return "#" + t.name
    if isinstance(t, Const):
        return "$" + t.name
    if isinstance(t, IotaTerm):
        sty = _UNICODE_STYLE if unicode else _ASCII_STYLE
        return f"{sty['iota']}{t.bound}. {_render(t.body, 1, True, sty)}"
    raise TypeError(f"not a term: {t!r}")


def _render(f: Formula, min_prec: int, tail: bool, sty: dict) -> str:
    if isinstance(f, PredAtom):
        if not f.args:
            return f.pred
        return f"{f.pred}({', '.join(format_term(a) for a in f.args)})"
    if isinstance(f, Identity):
        return f"{format_term(f.lhs)} = {format_term(f.rhs)}"
    if isinstance(f, Not):
        return sty["~"] + _render(f.sub, 5, tail, sty)
    if isinstance(f, (And, Or, Imp, Iff)):
        lvl = _LEVEL[type(f)]
        wrap = lvl < min_prec
        inner_tail = True if wrap else tail
        if isinstance(f, (And, Or)):
            lmin, rmin = lvl, lvl + 1
        else:
            lmin, rmin = lvl + 1, lvl
        op = {And: "&", Or: "|", Imp: "->", Iff: "<->"}[type(f)]
        s = (
            _render(f.left, lmin, False, sty)
            + sty[op]
            + _render(f.right, rmin, inner_tail, sty)
        )
        return f"({s})" if wrap else s
    if isinstance(f, (Forall, Exists)):
        kw = "forall" if isinstance(f, Forall) else "exists"
        s = f"{sty[kw]}{f.bound}. {_render(f.body, 1, True, sty)}"
        return s if tail else f"({s})"
    if isinstance(f, LambdaAtom):
        body = _render(f.body, 1, True, sty)
        if isinstance(f.arg, IotaTerm):
            arg = f"({sty['iota']}{f.arg.bound}. {_render(f.arg.body, 1, True, sty)})"
        else:
            arg = format_term(f.arg)
        return f"({sty['lam']}{f.bound}. {body}) {arg}"
    raise TypeError(f"not a formula: {f!r}")


def format_formula(f: Formula, unicode: bool = False) -> str:
    return _render(f, 1, True, _UNICODE_STYLE if unicode else _ASCII_STYLE)


def format_sequent(s: Sequent, unicode: bool = False) -> str:
    sty = _UNICODE_STYLE if unicode else _ASCII_STYLE
    ant = ", ".join(_render(f, 1, True, sty) for f in s.ant)
    suc = ", ".join(_render(f, 1, True, sty) for f in s.suc)
    arrow = sty["=>"]
    if ant and suc:
        return f"{ant} {arrow} {suc}"
    if ant:
        return f"{ant} {arrow}"
    if suc:
        return f"{arrow} {suc}"
    return arrow


def format_proof(root: ProofNode, unicode: bool = False) -> str:
    lines: list[str] = []

    def seq_sexpr(s: Sequent) -> str:
        ant = ", ".join(format_formula(f, unicode) for f in s.ant)
        suc = ", ".join(format_formula(f, unicode) for f in s.suc)
        return f"(seq ({ant}) ({suc}))"

    def go(n: ProofNode, depth: int):
        head = f"{'  ' * depth}({n.rule} {seq_sexpr(n.conclusion)}"
        for t in n.terms:
            head += f" :term {format_term(t)}"
        if n.eigen is not None:
            head += f" :eigen {format_term(n.eigen)}"
        if n.at is not None:
            head += f" :at {n.at}"
        if not n.premises:
            lines.append(head + ")")
            return
        lines.append(head)
        for p in n.premises:
            go(p, depth + 1)
        lines[-1] += ")"

    go(root, 0)
    return "\n".join(lines) + "\n"
