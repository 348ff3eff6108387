"""Tests for the cut elimination module.

The reduction recipes are validated the way everything else is: run the
kernel checker over the output and compare end sequents as multisets.
Trace case names are pinned so a silent change of strategy shows up.
"""

import pytest

from ddproof.syntax import (
    And,
    Forall,
    Identity,
    Not,
    Param,
    PredAtom,
    Sequent,
    Var,
    logical_constants,
    seq,
    sequent_key,
    sequents_alpha_equal,
)
from ddproof.kernel import (
    ProofNode,
    check_proof,
    iter_nodes,
    proof_height,
    subst_param_proof,
)
from ddproof.builders import (
    ax,
    build_rlambda_left,
    build_rlambda_right,
    build_sym_trans,
    derived_iota1l,
    derived_iota2l,
    derived_iotar,
    mk_cut,
    paraphrase,
    weaken_to,
)
from ddproof.cutelim import (
    CutMetrics,
    ReductionError,
    TraceEntry,
    eliminate_cuts,
    eliminate_cuts_traced,
    formula_degree,
    is_regular,
    left_reduce,
    metrics,
    regularize,
    right_reduce,
)
from ddproof.surface import parse_formula


def P(t):
    return PredAtom("P", (t,))


def Q(t):
    return PredAtom("Q", (t,))


def R(t):
    return PredAtom("R", (t,))


a = Param("a")
b = Param("b")
b1 = Param("b1")
b2 = Param("b2")
c = Param("c")
x = Var("x")


def count_cuts(proof):
    return sum(1 for _, node in iter_nodes(proof) if node.rule == "cut")


def same_multiset(s1: Sequent, s2: Sequent) -> bool:
    return sequent_key(s1) == sequent_key(s2)


# ---------------------------------------------------------------------------
# shared fixtures


PHI_AND = And(Q(b), P(b))


def andr_proof():
    """Q(b), P(b) => Q(b) & P(b), with the conjunction principal."""
    p1 = weaken_to(ax(Q(b)), seq([Q(b), P(b)], [Q(b)]))
    p2 = weaken_to(ax(P(b)), seq([Q(b), P(b)], [P(b)]))
    return ProofNode("andr", seq([Q(b), P(b)], [PHI_AND]), (p1, p2))


def andl_proof():
    """Q(b) & P(b), R(c) => Q(b), with the conjunction principal."""
    q = weaken_to(ax(Q(b)), seq([Q(b), P(b), R(c)], [Q(b)]))
    return ProofNode("andl", seq([PHI_AND, R(c)], [Q(b)]), (q,))


def forall_intro(e: Param):
    """Q(b) => Q(b), forall x P(x) via a weakened instance at e."""
    fa = Forall("x", P(x))
    prem = weaken_to(ax(Q(b)), seq([Q(b)], [Q(b), P(e)]))
    return ProofNode("forallr", seq([Q(b)], [Q(b), fa]), (prem,), eigen=e)


def iotar_proof(dd, body_pred, psi_formula):
    """gamma => dd for gamma = body(b), psi(b), forall z (body(z) -> z = b),
    mirroring how a description is introduced on the right from an
    existence-and-uniqueness antecedent."""
    uniq = parse_formula(f"forall z. {body_pred}(z) -> z = #b")
    gamma = (body_pred_at(body_pred, b), psi_formula, uniq)
    p1 = weaken_to(ax(gamma[0]), Sequent(gamma, (gamma[0],)))
    p2 = weaken_to(ax(gamma[1]), Sequent(gamma, (gamma[1],)))
    imp = parse_formula(f"{body_pred}(#a) -> #a = #b")
    carried = (body_pred_at(body_pred, a), gamma[0], gamma[1])
    imp_l = weaken_to(
        ax(carried[0]), Sequent(carried, (Identity(a, b), carried[0]))
    )
    imp_r = weaken_to(
        ax(Identity(a, b)),
        Sequent((Identity(a, b),) + carried, (Identity(a, b),)),
    )
    n_imp = ProofNode(
        "impl", Sequent((imp,) + carried, (Identity(a, b),)), (imp_l, imp_r)
    )
    p3 = ProofNode(
        "foralll",
        Sequent((carried[0],) + gamma, (Identity(a, b),)),
        (n_imp,),
        terms=(a,),
    )
    node = ProofNode(
        "iotar", Sequent(gamma, (dd,)), (p1, p2, p3), terms=(b,), eigen=a
    )
    check_proof(node)
    return node, gamma


def body_pred_at(name, term):
    return PredAtom(name, (term,))


# ---------------------------------------------------------------------------
# metrics


class TestMetrics:
    def test_cut_free_proof(self):
        m = metrics(build_sym_trans(b1, b2, b))
        assert m == CutMetrics((), 0)

    def test_atomic_cut(self):
        p = mk_cut(ax(P(a)), ax(P(a)), P(a))
        assert metrics(p) == CutMetrics((("root", 0),), 0)

    def test_description_cut_degree(self):
        dd = parse_formula("(lam x. P(x)) (iota y. Q(y))")
        left = build_rlambda_left(dd)
        right = build_rlambda_right(dd)
        p = mk_cut(left, right, paraphrase(dd))
        m = metrics(p)
        assert m.proof_degree == formula_degree(paraphrase(dd)) == 4
        assert m.cut_degrees == (("root", 4),)

    def test_degree_counts_each_operator_once(self):
        dd = parse_formula("(lam x. P(x)) (iota y. Q(y))")
        assert formula_degree(dd) == 2
        assert formula_degree(parse_formula("Q(#b)")) == 0
        assert formula_degree(parse_formula("Q(#b) <-> P(#b)")) == 1


# ---------------------------------------------------------------------------
# regularization


class TestRegularize:
    def test_identity_on_regular_proof(self):
        p = forall_intro(a)
        check_proof(p)
        assert is_regular(p)
        assert regularize(p) is p

    def test_clash_across_branches_renamed(self):
        fa = Forall("x", P(x))
        both = ProofNode(
            "andr",
            seq([Q(b)], [Q(b), And(fa, fa)]),
            (forall_intro(a), forall_intro(a)),
        )
        check_proof(both)
        assert not is_regular(both)
        r = regularize(both)
        check_proof(r)
        assert is_regular(r)
        assert r.conclusion == both.conclusion
        assert proof_height(r) == proof_height(both)
        eigens = {n.eigen.name for _, n in iter_nodes(r) if n.eigen is not None}
        assert len(eigens) == 2

    def test_eigen_leaking_into_sibling_renamed(self):
        fa = Forall("x", P(x))
        other = weaken_to(ax(Q(b)), seq([Q(b)], [Q(b), P(a)]))
        both = ProofNode(
            "andr",
            seq([Q(b)], [Q(b), And(fa, P(a))]),
            (forall_intro(a), other),
        )
        check_proof(both)
        assert not is_regular(both)
        r = regularize(both)
        check_proof(r)
        assert is_regular(r)
        assert r.conclusion == both.conclusion
        renamed = r.premises[0].eigen
        assert renamed is not None and renamed.name != "a"

    def test_avoid_set_forces_rename(self):
        p = forall_intro(a)
        r = regularize(p, avoid=("a",))
        check_proof(r)
        assert r.premises != p.premises
        assert r.eigen.name != "a"
        assert r.conclusion == p.conclusion

    def test_idempotent(self):
        both = ProofNode(
            "andr",
            seq([Q(b)], [Q(b), And(Forall("x", P(x)), Forall("x", P(x)))]),
            (forall_intro(a), forall_intro(a)),
        )
        r = regularize(both)
        assert regularize(r) is r

    def test_annotates_implicit_eigen(self):
        bare = ProofNode(
            "forallr",
            seq([Q(b)], [Q(b), Forall("x", P(x))]),
            (weaken_to(ax(Q(b)), seq([Q(b)], [Q(b), P(a)])),),
        )
        check_proof(bare)
        both = ProofNode(
            "andr",
            seq([Q(b)], [Q(b), And(Forall("x", P(x)), Forall("x", P(x)))]),
            (bare, bare),
        )
        r = regularize(both)
        assert is_regular(r)
        assert all(
            n.eigen is not None
            for _, n in iter_nodes(r)
            if n.rule == "forallr"
        )


# ---------------------------------------------------------------------------
# right reduction


class TestRightReduce:
    def test_axiom_on_the_right(self):
        prem = ax(Q(b))
        d1 = ProofNode("negr", seq([], [Q(b), Not(Q(b))]), (prem,))
        check_proof(d1)
        d2 = ax(Not(Q(b)))
        cases = []
        out = right_reduce(d1, d2, Not(Q(b)), 1, trace=cases)
        check_proof(out)
        assert same_multiset(out.conclusion, d1.conclusion)
        assert cases == ["rr:ax-right"]

    def test_axiom_on_the_left(self):
        d2 = andl_proof()
        cases = []
        out = right_reduce(ax(PHI_AND), d2, PHI_AND, 1, trace=cases)
        check_proof(out)
        assert same_multiset(out.conclusion, d2.conclusion)
        assert cases == ["rr:ax-left"]

    def test_conjunction(self):
        d1 = andr_proof()
        d2 = andl_proof()
        check_proof(d2)
        cases = []
        out = right_reduce(d1, d2, PHI_AND, 1, trace=cases)
        check_proof(out)
        assert same_multiset(out.conclusion, seq([Q(b), P(b), R(c)], [Q(b)]))
        assert "rr:and" in cases
        assert metrics(out).proof_degree == 0
        assert count_cuts(out) == 2

    def test_weakening_absorbed(self):
        d1 = andr_proof()
        base = weaken_to(ax(Q(b)), seq([Q(b), P(b)], [Q(b)]))
        d2 = ProofNode("wl", seq([PHI_AND, Q(b), P(b)], [Q(b)]), (base,))
        check_proof(d2)
        cases = []
        out = right_reduce(d1, d2, PHI_AND, 1, trace=cases)
        check_proof(out)
        assert count_cuts(out) == 0
        assert same_multiset(out.conclusion, seq([Q(b), P(b), Q(b), P(b)], [Q(b)]))
        assert cases == ["rr:weaken-absorb"]

    def test_contraction_absorbed(self):
        d1 = andr_proof()
        inner = weaken_to(ax(P(b)), seq([PHI_AND, PHI_AND, R(c), P(b)], [P(b)]))
        d2 = ProofNode("cl", seq([PHI_AND, R(c), P(b)], [P(b)]), (inner,))
        check_proof(d2)
        cases = []
        out = right_reduce(d1, d2, PHI_AND, 1, trace=cases)
        check_proof(out)
        assert count_cuts(out) == 0
        assert same_multiset(
            out.conclusion, seq([Q(b), P(b), R(c), P(b)], [P(b)])
        )
        assert cases[0] == "rr:contract-absorb"

    def test_description_unpacked_against_its_negation(self):
        # right premise destructs the description with the empty-case rule
        dd = parse_formula("(lam x. ~Q(x)) (iota y. Q(y))")
        d1, gamma = iotar_proof(dd, "Q", Not(Q(b)))
        prem = ProofNode("negl", Sequent((Q(a), Not(Q(a))), ()), (ax(Q(a)),))
        d2 = ProofNode("iota1l", Sequent((dd,), ()), (prem,), eigen=a)
        check_proof(d2)
        cases = []
        out = right_reduce(d1, d2, dd, 1, trace=cases)
        check_proof(out)
        assert same_multiset(out.conclusion, Sequent(gamma, ()))
        assert "rr:iota1" in cases
        assert metrics(out).proof_degree < formula_degree(dd)

    def test_description_unpacked_against_uniqueness(self):
        dd = parse_formula("(lam x. P(x)) (iota y. Q(y))")
        d1, gamma = iotar_proof(dd, "Q", P(b))
        q1 = weaken_to(ax(Q(b1)), Sequent((Q(b1), Q(b2)), (Identity(b1, b2), Q(b1))))
        q2 = weaken_to(ax(Q(b2)), Sequent((Q(b1), Q(b2)), (Identity(b1, b2), Q(b2))))
        q3 = weaken_to(
            ax(Identity(b1, b2)),
            Sequent((Identity(b1, b2), Q(b1), Q(b2)), (Identity(b1, b2),)),
        )
        d2 = ProofNode(
            "iota2l",
            Sequent((dd, Q(b1), Q(b2)), (Identity(b1, b2),)),
            (q1, q2, q3),
            terms=(b1, b2),
        )
        check_proof(d2)
        cases = []
        out = right_reduce(d1, d2, dd, 1, trace=cases)
        check_proof(out)
        assert same_multiset(
            out.conclusion, Sequent(gamma + (Q(b1), Q(b2)), (Identity(b1, b2),))
        )
        assert "rr:iota2" in cases
        assert metrics(out).proof_degree == 0

    def test_rejects_non_principal_left_premise(self):
        d1 = ProofNode("wr", seq([Q(b)], [Q(b), PHI_AND]), (ax(Q(b)),))
        check_proof(d1)
        with pytest.raises(ReductionError):
            right_reduce(d1, andl_proof(), PHI_AND, 1)

    def test_rejects_high_degree_cuts_in_premises(self):
        d1 = andr_proof()
        inner = mk_cut(
            d1, weaken_to(ax(Q(b)), seq([PHI_AND, Q(b)], [Q(b)])), PHI_AND
        )
        bad = ProofNode(
            "wr",
            Sequent(inner.conclusion.ant, inner.conclusion.suc + (PHI_AND,)),
            (inner,),
        )
        check_proof(bad)
        with pytest.raises(ReductionError):
            right_reduce(bad, andl_proof(), PHI_AND, 1)

    def test_rejects_missing_tracked_occurrences(self):
        with pytest.raises(ReductionError):
            right_reduce(andr_proof(), andl_proof(), PHI_AND, 2)


# ---------------------------------------------------------------------------
# left reduction


class TestLeftReduce:
    def test_axiom_on_the_left(self):
        d2 = andl_proof()
        cases = []
        out = left_reduce(ax(PHI_AND), d2, PHI_AND, 1, trace=cases)
        check_proof(out)
        assert same_multiset(out.conclusion, d2.conclusion)
        assert cases == ["lr:ax"]

    def test_atomic_formula_through_equality_left(self):
        # the cut formula is never principal on the right: eqminus rewrites
        # P(b1) without ever making it principal, so the recursion stays
        # parametric all the way to the axiom
        d1 = ProofNode("wl", seq([Q(c), P(b1)], [P(b1)]), (ax(P(b1)),))
        check_proof(d1)
        d2 = ProofNode(
            "eqminus",
            seq([Identity(b1, b2), P(b1)], [P(b2)]),
            (ax(P(b2)),),
        )
        check_proof(d2)
        cases = []
        out = left_reduce(d1, d2, P(b1), 1, trace=cases)
        check_proof(out)
        assert count_cuts(out) == 0
        assert same_multiset(
            out.conclusion, seq([Q(c), P(b1), Identity(b1, b2)], [P(b2)])
        )
        assert cases == ["lr:parametric:wl", "lr:ax"]

    def test_two_occurrences_through_weakening(self):
        d1 = ProofNode("wr", seq([P(a)], [P(a), P(a)]), (ax(P(a)),))
        check_proof(d1)
        d2 = weaken_to(ax(P(a)), seq([P(a), Q(b)], [P(a)]))
        cases = []
        out = left_reduce(d1, d2, P(a), 2, trace=cases)
        check_proof(out)
        assert count_cuts(out) == 0
        assert same_multiset(
            out.conclusion, seq([P(a), Q(b), Q(b)], [P(a), P(a)])
        )
        assert cases[0] == "lr:weaken-absorb"

    def test_dispatches_to_right_reduction(self):
        cases = []
        out = left_reduce(andr_proof(), andl_proof(), PHI_AND, 1, trace=cases)
        check_proof(out)
        assert same_multiset(out.conclusion, seq([Q(b), P(b), R(c)], [Q(b)]))
        assert "lr:dispatch:andr" in cases
        assert "rr:and" in cases
        assert metrics(out).proof_degree == 0

    def test_dispatch_with_two_tracked_copies(self):
        p1 = weaken_to(ax(Q(b)), seq([Q(b), P(b)], [PHI_AND, Q(b)]))
        p2 = weaken_to(ax(P(b)), seq([Q(b), P(b)], [PHI_AND, P(b)]))
        d1 = ProofNode("andr", seq([Q(b), P(b)], [PHI_AND, PHI_AND]), (p1, p2))
        check_proof(d1)
        cases = []
        out = left_reduce(d1, andl_proof(), PHI_AND, 2, trace=cases)
        check_proof(out)
        assert same_multiset(
            out.conclusion, seq([Q(b), P(b), R(c), R(c)], [Q(b), Q(b)])
        )
        assert "lr:dispatch:andr" in cases
        assert metrics(out).proof_degree == 0

    def test_rejects_high_degree_cuts_in_premises(self):
        inner = mk_cut(
            andr_proof(), weaken_to(ax(Q(b)), seq([PHI_AND, Q(b)], [Q(b)])), PHI_AND
        )
        bad = ProofNode(
            "wr",
            Sequent(inner.conclusion.ant, inner.conclusion.suc + (PHI_AND,)),
            (inner,),
        )
        check_proof(bad)
        with pytest.raises(ReductionError):
            left_reduce(bad, andl_proof(), PHI_AND, 1)


# ---------------------------------------------------------------------------
# the elimination loop


def assert_eliminated(proof):
    """Run the loop and pin the contract: cut-free output, same end
    sequent, valid proof, strictly decreasing measure."""
    before = proof.conclusion
    out, trace = eliminate_cuts_traced(proof)
    check_proof(out)
    assert count_cuts(out) == 0
    assert same_multiset(out.conclusion, before)
    seen = [(e.degree_before, e.maximal_before) for e in trace]
    seen_after = [(e.degree_after, e.maximal_after) for e in trace]
    for pre, post in zip(seen, seen_after):
        assert pre > post or post == (0, 0)
    return out, trace


class TestEliminateCuts:
    def test_cut_free_input_is_identity(self):
        p = build_sym_trans(b1, b2, b)
        out, trace = eliminate_cuts_traced(p)
        assert out is p
        assert trace == []

    def test_axiom_cut(self):
        p = mk_cut(ax(P(a)), ax(P(a)), P(a))
        out, trace = assert_eliminated(p)
        assert out.rule == "ax"
        assert len(trace) == 1
        assert trace[0].cases == ("lr:ax",)

    def test_conjunction_cut(self):
        p = mk_cut(andr_proof(), andl_proof(), PHI_AND)
        out, trace = assert_eliminated(p)
        assert [e.formula for e in trace][0] == PHI_AND
        assert trace[0].degree == 1

    def test_derived_iota1_construction(self):
        dd = parse_formula("(lam x. ~Q(x)) (iota y. Q(y))")
        prem = ProofNode("negl", Sequent((Q(a), Not(Q(a))), ()), (ax(Q(a)),))
        p = derived_iota1l(prem, dd, a)
        check_proof(p)
        assert count_cuts(p) == 1
        assert_eliminated(p)

    def test_derived_iota2_construction(self):
        dd = parse_formula("(lam x. P(x)) (iota y. Q(y))")
        gamma = (Q(b1), Q(b2))
        p1 = weaken_to(ax(Q(b1)), Sequent(gamma, (Identity(b1, b2), Q(b1))))
        p2 = weaken_to(ax(Q(b2)), Sequent(gamma, (Identity(b1, b2), Q(b2))))
        p3 = weaken_to(
            ax(Identity(b1, b2)),
            Sequent((Identity(b1, b2),) + gamma, (Identity(b1, b2),)),
        )
        p = derived_iota2l(p1, p2, p3, dd, b1, b2)
        check_proof(p)
        assert_eliminated(p)

    def test_derived_iotar_construction(self):
        dd = parse_formula("(lam x. P(x)) (iota y. Q(y))")
        d1, gamma = iotar_proof(dd, "Q", P(b))
        p1 = weaken_to(ax(Q(b)), Sequent(gamma, (Q(b),)))
        p2 = weaken_to(ax(P(b)), Sequent(gamma, (P(b),)))
        p3 = d1.premises[2]
        p = derived_iotar(p1, p2, p3, dd, b, a)
        check_proof(p)
        assert count_cuts(p) == 2
        assert_eliminated(p)

    def test_paraphrase_roundtrip_cut(self):
        dd = parse_formula("(lam x. P(x)) (iota y. Q(y))")
        p = mk_cut(build_rlambda_left(dd), build_rlambda_right(dd), paraphrase(dd))
        check_proof(p)
        out, trace = assert_eliminated(p)
        assert trace[0].degree == 4
        assert len(trace) >= 2

    def test_nested_cuts_reduce_topmost_first(self):
        inner = mk_cut(andr_proof(), andl_proof(), PHI_AND)
        # wrap the inner cut under another cut of the same degree
        outer_right = weaken_to(
            ax(Q(b)), seq([PHI_AND, Q(b), P(b), R(c)], [Q(b)])
        )
        left = ProofNode(
            "wr",
            Sequent(inner.conclusion.ant, inner.conclusion.suc + (PHI_AND,)),
            (inner,),
        )
        p = mk_cut(left, outer_right, PHI_AND)
        check_proof(p)
        out, trace = assert_eliminated(p)
        # the inner (topmost) cut goes first; its path is below the root
        assert trace[0].path != "root"

    def test_substituted_proof_still_eliminates(self):
        dd = parse_formula("(lam x. ~Q(x)) (iota y. Q(y))")
        prem = ProofNode("negl", Sequent((Q(a), Not(Q(a))), ()), (ax(Q(a)),))
        p = derived_iota1l(prem, dd, a)
        p2 = subst_param_proof(p, "b", Param("d"))
        check_proof(p2)
        assert_eliminated(p2)
