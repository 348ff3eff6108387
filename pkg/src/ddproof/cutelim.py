"""Constructive cut elimination.

The procedure follows the classic two-lemma strategy: a right reduction
that recurses on the right premise of a cut whose formula is principal
on the left, a left reduction that recurses on the left premise and
dispatches to the right reduction once the tracked formula becomes
principal, and an outer loop that repeatedly reduces the topmost cut of
maximal degree. Both reductions track k >= 1 occurrences of the cut
formula at once, which is what makes contraction unproblematic.

Everything here builds plain ProofNode trees; validity is established by
running the kernel checker over the results (the test suite does this
for every construction).
"""

from dataclasses import dataclass
from typing import Iterable, Optional

from .syntax import (
    Formula,
    Identity,
    IotaTerm,
    ParamSupply,
    Sequent,
    alpha_equal,
    alpha_key,
    logical_constants,
    params_in,
    substitute,
)
from .kernel import (
    EIGEN_RULES,
    ProofNode,
    analyze_step,
    check_proof,
    cut_nodes,
    proof_params,
    subst_param_proof,
)
from .builders import build_sym_trans, fit_to, mk_cut, weaken_to


class ReductionError(ValueError):
    """A reduction was invoked outside its precondition."""


def formula_degree(f: Formula) -> int:
    """Number of logical constants in a formula (connectives, quantifiers,
    the abstraction and description operators)."""
    return logical_constants(f)


@dataclass(frozen=True)
class CutMetrics:
    cut_degrees: tuple[tuple[str, int], ...]  # (path, degree) in pre-order
    proof_degree: int


@dataclass(frozen=True)
class TraceEntry:
    """One iteration of the elimination loop."""

    path: str
    formula: Formula
    degree: int
    cases: tuple[str, ...]
    degree_before: int
    maximal_before: int
    degree_after: int
    maximal_after: int


def metrics(proof: ProofNode) -> CutMetrics:
    rows = tuple((path, deg) for path, _, deg in cut_nodes(proof))
    return CutMetrics(rows, max((d for _, d in rows), default=0))


# ---------------------------------------------------------------------------
# regularization


def _subtree_outside_walk(root: ProofNode, avoid: set, on_clash):
    """Shared pre-order walk for is_regular/regularize. Calls on_clash(node,
    eigen) at each eigen inference whose parameter is claimed elsewhere or
    occurs outside its own premise subtrees; on_clash returns the
    replacement (premises, eigen). Nodes that leave the eigenparameter
    implicit get it spelled out, so later renames can see it."""
    claimed: set = set()

    def walk(node: ProofNode, outside: set) -> ProofNode:
        premises = node.premises
        eigen = node.eigen
        changed = False
        if eigen is None and node.rule in EIGEN_RULES:
            eigen = analyze_step(node).eigen
            changed = True
        if eigen is not None:
            if eigen.name in claimed or eigen.name in outside:
                premises, eigen = on_clash(node, eigen)
                changed = True
            claimed.add(eigen.name)
        if premises:
            local = set(params_in(node.conclusion)) | set(params_in(node.terms))
            if eigen is not None:
                local.add(eigen.name)
            sub = [proof_params(q) for q in premises]
            new_premises = []
            for i, q in enumerate(premises):
                out_i = outside | local
                for j, names in enumerate(sub):
                    if j != i:
                        out_i |= names
                q2 = walk(q, out_i)
                changed |= q2 is not q
                new_premises.append(q2)
            premises = tuple(new_premises)
        if not changed:
            return node
        return ProofNode(
            node.rule, node.conclusion, premises, terms=node.terms, eigen=eigen
        )

    return walk(root, set(avoid))


def is_regular(proof: ProofNode, avoid: Iterable[str] = ()) -> bool:
    """True when every eigenparameter is used by exactly one inference and
    occurs nowhere outside the premise subtrees of that inference."""
    ok = True

    def clash(node, eigen):
        nonlocal ok
        ok = False
        return node.premises, eigen

    _subtree_outside_walk(proof, set(avoid), clash)
    return ok


def regularize(proof: ProofNode, avoid: Iterable[str] = ()) -> ProofNode:
    """Rename eigenparameters until each one is globally unique and confined
    to the premises of the inference that introduces it. Identity on
    already-regular proofs, hence idempotent."""
    supply = ParamSupply(proof_params(proof) | set(avoid))

    def clash(node, eigen):
        fresh = supply.fresh()
        premises = tuple(subst_param_proof(q, eigen, fresh) for q in node.premises)
        return premises, fresh

    return _subtree_outside_walk(proof, set(avoid), clash)


# ---------------------------------------------------------------------------
# shared reduction helpers

_RIGHT_PRINCIPAL = {
    "negr",
    "andr",
    "orr",
    "impr",
    "iffr",
    "forallr",
    "existsr",
    "lamr",
    "iotar",
}


def _count_alpha(forms, key: str) -> int:
    return sum(1 for f in forms if alpha_key(f) == key)


def _remove_n(forms: tuple, key: str, n: int) -> tuple:
    out = []
    left = n
    for f in forms:
        if left and alpha_key(f) == key:
            left -= 1
        else:
            out.append(f)
    if left:
        raise ReductionError(f"expected {n} tracked occurrences, found {n - left}")
    return tuple(out)


def _principal_formula(node: ProofNode, info) -> Optional[Formula]:
    if info.principal is None:
        return None
    side, idx = info.principal
    forms = node.conclusion.ant if side == "ant" else node.conclusion.suc
    return forms[idx]


def _max_cut_degree(*proofs: ProofNode) -> int:
    degs = [deg for p in proofs for _, _, deg in cut_nodes(p)]
    return max(degs, default=-1)


def _corregularize(d1, d2, avoid):
    d2r = regularize(d2, set(avoid) | proof_params(d1))
    d1r = regularize(d1, set(avoid) | proof_params(d2r))
    return d1r, d2r


class _Recorder:
    def __init__(self, sink):
        self.sink = sink if sink is not None else []

    def note(self, case: str):
        self.sink.append(case)


# ---------------------------------------------------------------------------
# right reduction


def right_reduce(
    d1: ProofNode,
    d2: ProofNode,
    phi: Formula,
    k: int,
    avoid: Iterable[str] = (),
    trace: Optional[list] = None,
) -> ProofNode:
    """Reduce a cut on phi with left premise d1 |- G => D, phi (phi principal
    in the last inference of d1) against d2 |- phi^k, P => S, producing a
    proof of G^k, P => D^k, S whose cuts all have degree below phi's."""
    if k < 1:
        raise ReductionError("k must be positive")
    dphi = formula_degree(phi)
    if not _max_cut_degree(d1, d2) < dphi:
        raise ReductionError(
            "premise proofs contain cuts at or above the degree of the cut formula"
        )
    info1 = analyze_step(d1)
    if d1.rule != "ax":
        pf = _principal_formula(d1, info1)
        if (
            d1.rule not in _RIGHT_PRINCIPAL
            or info1.principal is None
            or info1.principal[0] != "suc"
            or not alpha_equal(pf, phi)
        ):
            raise ReductionError("cut formula is not principal in the left premise")
    elif not alpha_equal(d1.conclusion.suc[0], phi):
        raise ReductionError("axiom left premise does not conclude the cut formula")
    if _count_alpha(d2.conclusion.ant, alpha_key(phi)) < k:
        raise ReductionError("right premise lacks the tracked occurrences")
    d1, d2 = _corregularize(d1, d2, avoid)
    rec = _Recorder(trace)
    gamma = d1.conclusion.ant
    delta = _remove_n(d1.conclusion.suc, alpha_key(phi), 1)
    out = _rr(d1, gamma, delta, d2, phi, k, rec)
    return regularize(out, avoid)


def _mixed(gamma, delta, seqt: Sequent, phi_key: str, m: int) -> Sequent:
    """Target sequent with m tracked antecedent occurrences replaced by m
    copies of the (gamma => delta) context, antecedent copies first."""
    return Sequent(gamma * m + _remove_n(seqt.ant, phi_key, m), delta * m + seqt.suc)


def _rr(d1, gamma, delta, d2, phi, k, rec) -> ProofNode:
    if k == 0:
        return d2
    phi_key = alpha_key(phi)
    if d1.rule == "ax":
        rec.note("rr:ax-left")
        return d2
    if d2.rule == "ax":
        rec.note("rr:ax-right")
        return d1

    info = analyze_step(d2)
    rule = d2.rule
    principal = _principal_formula(d2, info)
    on_ant = info.principal is not None and info.principal[0] == "ant"
    hit = on_ant and alpha_key(principal) == phi_key

    goal = _mixed(gamma, delta, d2.conclusion, phi_key, k)

    def ih(premise: ProofNode, m: int) -> ProofNode:
        return _rr(d1, gamma, delta, premise, phi, m, rec) if m else premise

    if rule == "wl" and hit:
        rec.note("rr:weaken-absorb")
        return weaken_to(ih(d2.premises[0], k - 1), goal)

    if rule == "cl" and hit:
        rec.note("rr:contract-absorb")
        return fit_to(ih(d2.premises[0], k + 1), goal)

    if hit and rule == "negl":
        rec.note("rr:neg")
        q = ih(d2.premises[0], k - 1)
        return mk_cut(q, d1.premises[0], phi.body)

    if hit and rule == "andl":
        rec.note("rr:and")
        q = ih(d2.premises[0], k - 1)
        c1 = mk_cut(d1.premises[0], q, phi.left)
        c2 = mk_cut(d1.premises[1], c1, phi.right)
        return fit_to(c2, goal)

    if hit and rule == "orl":
        rec.note("rr:or")
        q1 = ih(d2.premises[0], k - 1)
        q2 = ih(d2.premises[1], k - 1)
        c1 = mk_cut(d1.premises[0], q1, phi.left)
        c2 = mk_cut(c1, q2, phi.right)
        return fit_to(c2, goal)

    if hit and rule == "impl":
        rec.note("rr:imp")
        q1 = ih(d2.premises[0], k - 1)
        q2 = ih(d2.premises[1], k - 1)
        c1 = mk_cut(q1, d1.premises[0], phi.left)
        c2 = mk_cut(c1, q2, phi.right)
        return fit_to(c2, goal)

    if hit and rule == "iffl":
        rec.note("rr:iff")
        alpha, beta = phi.left, phi.right
        q1 = ih(d2.premises[0], k - 1)
        q2 = ih(d2.premises[1], k - 1)
        p1, p2 = d1.premises
        c1 = mk_cut(q1, p1, alpha)
        # c1 carries two copies of beta (one from each premise); merge them
        # so it can serve as the left premise of the last cut below
        c1 = fit_to(
            c1,
            Sequent(c1.conclusion.ant, _remove_n(c1.conclusion.suc, alpha_key(beta), 1)),
        )
        c2 = mk_cut(c1, p2, beta)
        c3 = mk_cut(c2, q2, alpha)
        c4 = mk_cut(c1, c3, beta)
        return fit_to(c4, goal)

    if hit and rule == "foralll":
        rec.note("rr:forall")
        t = info.terms[0]
        inst = substitute(phi.body, phi.bound, t)
        p_t = subst_param_proof(d1.premises[0], analyze_step(d1).eigen, t)
        q = ih(d2.premises[0], k - 1)
        return mk_cut(p_t, q, inst)

    if hit and rule == "existsl":
        rec.note("rr:exists")
        t = analyze_step(d1).terms[0]
        inst = substitute(phi.body, phi.bound, t)
        q = ih(d2.premises[0], k - 1)
        q = subst_param_proof(q, info.eigen, t)
        return mk_cut(d1.premises[0], q, inst)

    if hit and rule == "laml":
        rec.note("rr:lam")
        inst = substitute(phi.body, phi.bound, phi.arg)
        q = ih(d2.premises[0], k - 1)
        return mk_cut(d1.premises[0], q, inst)

    if hit and rule == "iota1l":
        rec.note("rr:iota1")
        it: IotaTerm = phi.arg
        b = analyze_step(d1).terms[0]
        phi_b = substitute(it.body, it.bound, b)
        psi_b = substitute(phi.body, phi.bound, b)
        q = ih(d2.premises[0], k - 1)
        q = subst_param_proof(q, info.eigen, b)
        c1 = mk_cut(d1.premises[0], q, phi_b)
        c2 = mk_cut(d1.premises[1], c1, psi_b)
        return fit_to(c2, goal)

    if hit and rule == "iota2l":
        rec.note("rr:iota2")
        it: IotaTerm = phi.arg
        info1 = analyze_step(d1)
        b = info1.terms[0]
        b1, b2 = info.terms
        inst1 = substitute(it.body, it.bound, b1)
        inst2 = substitute(it.body, it.bound, b2)
        p3 = d1.premises[2]
        a_r = info1.eigen
        sub1 = subst_param_proof(p3, a_r, b1)
        sub2 = subst_param_proof(p3, a_r, b2)
        q1 = ih(d2.premises[0], k - 1)
        q2 = ih(d2.premises[1], k - 1)
        q3 = ih(d2.premises[2], k - 1)
        st = build_sym_trans(b1, b2, b)
        c_eq = mk_cut(st, q3, Identity(b1, b2))
        c_b1 = mk_cut(q1, sub1, inst1)
        c_b2 = mk_cut(q2, sub2, inst2)
        c_mid = mk_cut(c_b1, c_eq, Identity(b1, b))
        c_fin = mk_cut(c_b2, c_mid, Identity(b2, b))
        return fit_to(c_fin, goal)

    # every tracked occurrence is parametric in the last inference of d2
    rec.note(f"rr:parametric:{rule}")
    if rule == "cut":
        q1, q2 = d2.premises
        chi = info.cut_formula
        avail2 = _count_alpha(q2.conclusion.ant, phi_key)
        if alpha_key(chi) == phi_key:
            avail2 -= 1
        m2 = min(k, avail2)
        m1 = k - m2
        counts = [m1, m2]
    else:
        counts = [k] * len(d2.premises)
    new_premises = tuple(ih(q, m) for q, m in zip(d2.premises, counts))
    return ProofNode(rule, goal, new_premises, terms=d2.terms, eigen=d2.eigen)


# ---------------------------------------------------------------------------
# left reduction


def left_reduce(
    d1: ProofNode,
    d2: ProofNode,
    phi: Formula,
    k: int,
    avoid: Iterable[str] = (),
    trace: Optional[list] = None,
) -> ProofNode:
    """Reduce a cut on phi with left premise d1 |- G => D, phi^k and right
    premise d2 |- phi, P => S (phi need not be principal anywhere),
    producing a proof of G, P^k => D, S^k with all cuts below phi's degree."""
    if k < 1:
        raise ReductionError("k must be positive")
    dphi = formula_degree(phi)
    if not _max_cut_degree(d1, d2) < dphi:
        raise ReductionError(
            "premise proofs contain cuts at or above the degree of the cut formula"
        )
    if _count_alpha(d1.conclusion.suc, alpha_key(phi)) < k:
        raise ReductionError("left premise lacks the tracked occurrences")
    if _count_alpha(d2.conclusion.ant, alpha_key(phi)) < 1:
        raise ReductionError("right premise does not contain the cut formula")
    d1, d2 = _corregularize(d1, d2, avoid)
    rec = _Recorder(trace)
    pi = _remove_n(d2.conclusion.ant, alpha_key(phi), 1)
    sigma = d2.conclusion.suc
    out = _lr(d1, d2, pi, sigma, phi, k, rec)
    return regularize(out, avoid)


def _lr_mixed(pi, sigma, seqt: Sequent, phi_key: str, m: int) -> Sequent:
    return Sequent(seqt.ant + pi * m, _remove_n(seqt.suc, phi_key, m) + sigma * m)


def _lr(d1, d2, pi, sigma, phi, k, rec) -> ProofNode:
    if k == 0:
        return d1
    phi_key = alpha_key(phi)
    if d1.rule == "ax":
        rec.note("lr:ax")
        return d2

    info = analyze_step(d1)
    rule = d1.rule
    principal = _principal_formula(d1, info)
    hit = (
        info.principal is not None
        and info.principal[0] == "suc"
        and alpha_key(principal) == phi_key
    )

    goal = _lr_mixed(pi, sigma, d1.conclusion, phi_key, k)

    def ih(premise: ProofNode, m: int) -> ProofNode:
        return _lr(premise, d2, pi, sigma, phi, m, rec) if m else premise

    if rule == "wr" and hit:
        rec.note("lr:weaken-absorb")
        return weaken_to(ih(d1.premises[0], k - 1), goal)

    if rule == "cr" and hit:
        rec.note("lr:contract-absorb")
        return fit_to(ih(d1.premises[0], k + 1), goal)

    if hit and rule in _RIGHT_PRINCIPAL:
        rec.note(f"lr:dispatch:{rule}")
        if k == 1:
            lifted = d1
        else:
            new_premises = tuple(ih(q, k - 1) for q in d1.premises)
            lifted_concl = Sequent(
                d1.conclusion.ant + pi * (k - 1),
                _remove_n(d1.conclusion.suc, phi_key, k) + sigma * (k - 1) + (phi,),
            )
            lifted = ProofNode(
                rule, lifted_concl, new_premises, terms=d1.terms, eigen=d1.eigen
            )
        g2 = lifted.conclusion.ant
        d2_ = _remove_n(lifted.conclusion.suc, phi_key, 1)
        return _rr(lifted, g2, d2_, d2, phi, 1, rec)

    # parametric: recurse through d1's last inference
    rec.note(f"lr:parametric:{rule}")
    if rule == "cut":
        q1, q2 = d1.premises
        chi = info.cut_formula
        avail1 = _count_alpha(q1.conclusion.suc, phi_key)
        if alpha_key(chi) == phi_key:
            avail1 -= 1
        m1 = min(k, avail1)
        m2 = k - m1
        counts = [m1, m2]
    else:
        counts = [k] * len(d1.premises)
    new_premises = tuple(ih(q, m) for q, m in zip(d1.premises, counts))
    return ProofNode(rule, goal, new_premises, terms=d1.terms, eigen=d1.eigen)


# ---------------------------------------------------------------------------
# the elimination loop


def _parts(path: str) -> tuple:
    return () if path == "root" else tuple(int(x) for x in path.split("."))


def _splice(node: ProofNode, parts: tuple, replacement: ProofNode) -> ProofNode:
    if not parts:
        return replacement
    i, rest = parts[0], parts[1:]
    premises = list(node.premises)
    premises[i] = _splice(premises[i], rest, replacement)
    return ProofNode(
        node.rule, node.conclusion, tuple(premises), terms=node.terms, eigen=node.eigen
    )


def _measure(proof: ProofNode) -> tuple[int, int]:
    """(maximal cut degree, number of cuts at that degree); (-1, 0) if cut-free."""
    degs = [deg for _, _, deg in cut_nodes(proof)]
    if not degs:
        return (-1, 0)
    top = max(degs)
    return (top, degs.count(top))


def eliminate_cuts_traced(proof: ProofNode) -> tuple[ProofNode, list[TraceEntry]]:
    """Repeatedly reduce the topmost maximal cut until none remain. Returns
    the cut-free proof and one trace entry per reduction."""
    check_proof(proof)
    trace: list[TraceEntry] = []
    p = regularize(proof)
    while True:
        cuts = cut_nodes(p)
        if not cuts:
            return p, trace
        before = _measure(p)
        maxdeg = before[0]
        maximal = [(path, node) for path, node, deg in cuts if deg == maxdeg]
        max_paths = {path for path, _ in maximal}
        candidates = []
        for path, node in maximal:
            prefix = "" if path == "root" else path + "."
            if not any(q != path and q.startswith(prefix) and q != "root" for q in max_paths):
                candidates.append((path, node))
        path, node = min(candidates, key=lambda pn: _parts(pn[0]))
        chi = analyze_step(node).cut_formula
        cases: list[str] = []
        ambient = proof_params(p)
        reduced = left_reduce(
            node.premises[0], node.premises[1], chi, 1, avoid=ambient, trace=cases
        )
        if maxdeg == 0:
            assert not cut_nodes(reduced), "reducing an atomic cut must not add cuts"
        else:
            assert _max_cut_degree(reduced) < maxdeg, "reduction must lower the degree"
        reduced = fit_to(reduced, node.conclusion)
        p = regularize(_splice(p, _parts(path), reduced))
        assert is_regular(p)
        after = _measure(p)
        assert after < before, "the (degree, maximal-cut-count) measure must drop"
        trace.append(
            TraceEntry(
                path=path,
                formula=chi,
                degree=maxdeg,
                cases=tuple(cases),
                degree_before=max(before[0], 0),
                maximal_before=before[1],
                degree_after=max(after[0], 0),
                maximal_after=after[1],
            )
        )


def eliminate_cuts(proof: ProofNode) -> ProofNode:
    return eliminate_cuts_traced(proof)[0]
