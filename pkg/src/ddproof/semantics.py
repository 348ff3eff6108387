"""Finite first-order models and evaluation.

A model has domain {0, ..., n-1}, a relation per predicate symbol and a
denotation per constant. Parameters are interpreted by a separate assignment
dict (keyed by the Param/Var AST nodes), since countermodel search varies
them independently of the model.

An abstract applied to a description, (lam x. psi)(iota y. phi), holds iff
some domain element o satisfies phi (as y), is the only element doing so,
and satisfies psi (as x). The description body is evaluated by extending the
environment at its bound variable, never by substituting terms into it, so
evaluation and the first-order translation agree on every formula.

`find_countermodel` enumerates interpretations smallest-first and
deterministically: domain sizes ascending; predicate relations in
binary-counter order over the lexicographically sorted tuple space (all
relations empty first); constant, then parameter denotations as numerals
with the rightmost position cycling fastest. The first interpretation
falsifying the sequent is returned, so reported countermodels are stable
across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Optional, Union

from .syntax import (
    And,
    Const,
    Exists,
    Forall,
    Formula,
    Identity,
    Iff,
    IllFormed,
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
    consts_in,
    params_in,
    preds_in,
)


class EnumerationCapError(Exception):
    """Raised when countermodel search exceeds its interpretation budget."""

    def __init__(self, count: int):
        self.count = count
        super().__init__(f"gave up after enumerating {count} interpretations")


@dataclass(frozen=True)
class Signature:
    preds: tuple[tuple[str, int], ...]  # (name, arity), sorted by name
    consts: tuple[str, ...]
    params: tuple[str, ...]


def signature_of(*items) -> Signature:
    preds: dict[str, int] = {}
    consts: set[str] = set()
    params: set[str] = set()
    for item in items:
        for name, arity in preds_in(item):
            if preds.setdefault(name, arity) != arity:
                raise IllFormed("signature", f"predicate {name} used with two arities")
        consts |= consts_in(item)
        params |= params_in(item)
    return Signature(
        preds=tuple(sorted(preds.items())),
        consts=tuple(sorted(consts)),
        params=tuple(sorted(params)),
    )


@dataclass
class Model:
    domain: tuple[int, ...]
    preds: dict[tuple[str, int], frozenset]
    consts: dict[str, int] = field(default_factory=dict)

    def rel(self, name: str, arity: int) -> frozenset:
        return self.preds.get((name, arity), frozenset())

    def describe(self, assignment: Optional[dict] = None) -> str:
        lines = ["domain: {" + ", ".join(str(d) for d in self.domain) + "}"]
        for (name, arity), rel in sorted(self.preds.items()):
            shown = sorted(rel)
            if arity == 1:
                inner = ", ".join(str(t[0]) for t in shown)
            else:
                inner = ", ".join("(" + ", ".join(map(str, t)) + ")" for t in shown)
            lines.append(f"{name}/{arity}: {{{inner}}}")
        for name in sorted(self.consts):
            lines.append(f"${name} = {self.consts[name]}")
        if assignment:
            for t in sorted(assignment, key=lambda t: (isinstance(t, Var), t.name)):
                prefix = "#" if isinstance(t, Param) else ""
                lines.append(f"{prefix}{t.name} = {assignment[t]}")
        return "\n".join(lines)


Assignment = dict  # Var/Param AST node -> domain element


def eval_term(t: Term, model: Model, asg: Assignment) -> int:
    if isinstance(t, Const):
        return model.consts[t.name]
    return asg[t]


def eval_formula(f: Formula, model: Model, asg: Assignment) -> bool:
    if isinstance(f, PredAtom):
        tup = tuple(eval_term(a, model, asg) for a in f.args)
        return tup in model.rel(f.pred, len(f.args))
    if isinstance(f, Identity):
        return eval_term(f.lhs, model, asg) == eval_term(f.rhs, model, asg)
    if isinstance(f, Not):
        return not eval_formula(f.sub, model, asg)
    if isinstance(f, And):
        return eval_formula(f.left, model, asg) and eval_formula(f.right, model, asg)
    if isinstance(f, Or):
        return eval_formula(f.left, model, asg) or eval_formula(f.right, model, asg)
    if isinstance(f, Imp):
        return (not eval_formula(f.left, model, asg)) or eval_formula(
            f.right, model, asg
        )
    if isinstance(f, Iff):
        return eval_formula(f.left, model, asg) == eval_formula(f.right, model, asg)
    if isinstance(f, Forall):
        v = Var(f.bound)
        return all(
            eval_formula(f.body, model, {**asg, v: o}) for o in model.domain
        )
    if isinstance(f, Exists):
        v = Var(f.bound)
        return any(
            eval_formula(f.body, model, {**asg, v: o}) for o in model.domain
        )
    if isinstance(f, LambdaAtom):
        v = Var(f.bound)
        if not isinstance(f.arg, IotaTerm):
            o = eval_term(f.arg, model, asg)
            return eval_formula(f.body, model, {**asg, v: o})
        w = Var(f.arg.bound)
        witness: Optional[int] = None
        for o in model.domain:
            if eval_formula(f.arg.body, model, {**asg, w: o}):
                if witness is not None:
                    return False  # not unique
                witness = o
        if witness is None:
            return False  # no witness
        return eval_formula(f.body, model, {**asg, v: witness})
    raise TypeError(f"not a formula: {f!r}")


def eval_sequent(s: Sequent, model: Model, asg: Assignment) -> bool:
    """True when the sequent holds: some succedent formula is true whenever
    every antecedent formula is."""
    if all(eval_formula(f, model, asg) for f in s.ant):
        return any(eval_formula(f, model, asg) for f in s.suc)
    return True


# ---------------------------------------------------------------------------
# interpretation enumeration


def _iter_relations(spaces: list) -> Iterator[tuple[frozenset, ...]]:
    """Lazy product over relation choices, one subset mask per predicate,
    masks ascending. Materializing the subsets first would explode for
    higher arities (a ternary predicate over three elements already has
    2^27 relations), so build each one only when reached."""
    if not spaces:
        yield ()
        return
    space, rest = spaces[0], spaces[1:]
    for mask in range(1 << len(space)):
        head = frozenset(t for i, t in enumerate(space) if mask >> i & 1)
        for tail in _iter_relations(rest):
            yield (head,) + tail


def iter_interpretations(
    sig: Signature, size: int
) -> Iterator[tuple[Model, Assignment]]:
    """All interpretations of `sig` with domain {0..size-1}, in the
    deterministic order documented at the top of the module."""
    domain = tuple(range(size))
    tuple_spaces = [
        sorted(product(domain, repeat=arity)) for _, arity in sig.preds
    ]
    for rels in _iter_relations(tuple_spaces):
        preds = {key: rel for key, rel in zip(sig.preds, rels)}
        for const_vals in product(domain, repeat=len(sig.consts)):
            consts = dict(zip(sig.consts, const_vals))
            model = Model(domain, preds, consts)
            for param_vals in product(domain, repeat=len(sig.params)):
                asg = {
                    Param(name): val
                    for name, val in zip(sig.params, param_vals)
                }
                yield model, asg


@dataclass
class Countermodel:
    model: Model
    assignment: Assignment
    size: int

    def describe(self) -> str:
        return self.model.describe(self.assignment)


DEFAULT_MAX_SIZE = 3
DEFAULT_ENUM_CAP = 2_000_000


def find_countermodel(
    s: Union[Sequent, Formula],
    max_size: int = DEFAULT_MAX_SIZE,
    cap: int = DEFAULT_ENUM_CAP,
) -> Optional[Countermodel]:
    """Search domain sizes 1..max_size for an interpretation falsifying the
    sequent (a bare formula is read as its own succedent). Returns the first
    countermodel in enumeration order, None when every interpretation within
    the size bound satisfies the sequent. Raises EnumerationCapError when
    more than `cap` interpretations would have to be checked."""
    if not isinstance(s, Sequent):
        s = Sequent((), (s,))
    sig = signature_of(s)
    count = 0
    for size in range(1, max_size + 1):
        for model, asg in iter_interpretations(sig, size):
            count += 1
            if count > cap:
                raise EnumerationCapError(count)
            if not eval_sequent(s, model, asg):
                return Countermodel(model, asg, size)
    return None
