"""ddproof: a sequent-calculus toolkit for definite descriptions.

Proof checking for a calculus whose descriptions live only inside predicate
abstracts, mechanized constructions of its key admissible laws, constructive
cut elimination, finite-model semantics with countermodel search, bounded
proof search, and a description-eliminating translation to plain first-order
logic.
"""

__version__ = "0.1.0"
