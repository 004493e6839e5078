"""Entailment between compatible relations, with machine-checkable certificates.

Four derivation rules are supported: intersecting a family of same-arity
relations, taking the preimage of a relation under a tuple of terms, removing
a duplicated last coordinate, and reading an operation off its graph.  A
certificate stores premises and intermediate relations by value, so replaying
one needs no algebra, only the embedded term tables.  The refuter searches
for finitary maps that preserve a premise set but break a target; a found map
refutes an entailment, while exhaustion proves nothing and says so.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from .core import (
    BudgetExceededError,
    DEFAULT_BUDGET,
    FiniteAlgebra,
    Homomorphism,
    Operation,
    Relation,
    encode_tuple,
    full_relation,
    graph_relation,
    is_compatible_relation,
    power_algebra,
    subuniverse_carriers,
)
from .affine import (
    AffineTerm,
    TernaryTermOperation,
    eval_affine_combination,
    lift_term_to_power,
)
from .homgroups import build_hk_group, generating_family
from .subcong import kernel_quotient, meet_irreducibles
from .factorize import factor_morphism
from . import affine as _affine


@dataclass(frozen=True)
class TermTree:
    """A term as a composition tree over named basic operations and projections.

    expr is ("proj", i) or (op_name, (child_exprs, ...)).
    """

    arity: int
    expr: tuple

    def evaluate(self, ops, args):
        def walk(e):
            if e[0] == "proj":
                return args[e[1]]
            name, children = e
            return ops[name](*(walk(c) for c in children))

        return walk(self.expr)


Term = Union[AffineTerm, TermTree]


@dataclass(frozen=True)
class Premise:
    value: object  # Relation or Operation


@dataclass(frozen=True)
class Intersection:
    base_size: int
    arity: int
    children: tuple


@dataclass(frozen=True)
class TermPreimage:
    terms: tuple
    child: object


@dataclass(frozen=True)
class StripPadding:
    child: object


@dataclass(frozen=True)
class GraphToOperation:
    child: object
    name: str = "t"


@dataclass(frozen=True)
class EntailmentCertificate:
    """A derivation of `conclusion` from `premises`, replayable by value.

    `term_op` and `neutral` fix how affine coefficient vectors inside
    preimage nodes are evaluated; `extra_ops` carries tables for any
    composition-tree terms.
    """

    conclusion: object
    premises: tuple
    derivation: object
    term_op: Optional[TernaryTermOperation] = None
    neutral: int = 0
    extra_ops: tuple = ()

    def ops_by_name(self):
        return {o.name: o for o in self.extra_ops}


def _eval_node(node, cert: EntailmentCertificate, budget=DEFAULT_BUDGET):
    if isinstance(node, Premise):
        return node.value
    if isinstance(node, Intersection):
        values = [_eval_node(c, cert, budget) for c in node.children]
        for v in values:
            if not isinstance(v, Relation) or v.arity != node.arity or v.base_size != node.base_size:
                raise ValueError("intersection inputs must be relations of equal arity")
        if not values:
            return full_relation(node.base_size, node.arity)
        common = set(values[0].tuples)
        for v in values[1:]:
            common &= v._set
        return Relation(node.arity, node.base_size, common)
    if isinstance(node, TermPreimage):
        R = _eval_node(node.child, cert, budget)
        if not isinstance(R, Relation):
            raise ValueError("term preimage needs a relation input")
        if len(node.terms) != R.arity:
            raise ValueError(
                f"need {R.arity} terms for a {R.arity}-ary relation, got {len(node.terms)}"
            )
        arities = {t.arity for t in node.terms}
        if len(arities) != 1:
            raise ValueError("all preimage terms must have the same arity")
        n = arities.pop()
        base = R.base_size
        if base**n > budget:
            raise BudgetExceededError(base**n, budget, hint="preimage evaluation")
        ops = cert.ops_by_name()
        kept = []
        for args in itertools.product(range(base), repeat=n):
            image = tuple(_eval_term(t, cert, ops, args) for t in node.terms)
            if image in R:
                kept.append(args)
        return Relation(n, base, kept)
    if isinstance(node, StripPadding):
        S = _eval_node(node.child, cert, budget)
        if not isinstance(S, Relation) or S.arity < 2:
            raise ValueError("strip needs a relation of arity >= 2")
        for t in S.tuples:
            if t[-1] != t[-2]:
                raise ValueError(f"tuple {t} does not duplicate its last coordinate")
        return Relation(S.arity - 1, S.base_size, [t[:-1] for t in S.tuples])
    if isinstance(node, GraphToOperation):
        G = _eval_node(node.child, cert, budget)
        if not isinstance(G, Relation) or G.arity < 2:
            raise ValueError("graph rule needs a relation of arity >= 2")
        arity = G.arity - 1
        if len(G) != G.base_size**arity:
            raise ValueError("relation is not the graph of a total operation")
        table = {}
        for t in G.tuples:
            if t[:-1] in table:
                raise ValueError(f"relation is not functional at {t[:-1]}")
            table[t[:-1]] = t[-1]
        flat = [
            table[args]
            for args in itertools.product(range(G.base_size), repeat=arity)
        ]
        return Operation(node.name, arity, G.base_size, flat)
    raise TypeError(f"unknown derivation node {node!r}")


def _eval_term(term, cert, ops, args):
    if isinstance(term, AffineTerm):
        if cert.term_op is None:
            raise ValueError("certificate carries no affine operation table")
        return eval_affine_combination(term, cert.term_op, cert.neutral, args)
    if isinstance(term, TermTree):
        return term.evaluate(ops, args)
    raise TypeError(f"unknown term {term!r}")


def certificate_premises(derivation, term_op=None):
    """Premise leaves of a derivation, plus the affine operation when it is used.

    A preimage node with integer-coefficient terms consumes the affine
    operation as an extra premise; composition-tree terms do not.
    """

    def leaves(node):
        if isinstance(node, Premise):
            yield node.value
        elif isinstance(node, Intersection):
            for c in node.children:
                yield from leaves(c)
        elif isinstance(node, (TermPreimage, StripPadding, GraphToOperation)):
            yield from leaves(node.child)

    def uses_affine(node):
        if isinstance(node, TermPreimage):
            if any(isinstance(t, AffineTerm) for t in node.terms):
                return True
            return uses_affine(node.child)
        if isinstance(node, Intersection):
            return any(uses_affine(c) for c in node.children)
        if isinstance(node, (StripPadding, GraphToOperation)):
            return uses_affine(node.child)
        return False

    premises = tuple(leaves(derivation))
    if term_op is not None and uses_affine(derivation):
        premises = premises + (term_op.as_operation("t"),)
    return premises


def replay_certificate(cert: EntailmentCertificate, budget=DEFAULT_BUDGET):
    """Recompute the conclusion from the premises; equality is the soundness check."""
    return _eval_node(cert.derivation, cert, budget)


def verify_certificate(cert: EntailmentCertificate, budget=DEFAULT_BUDGET) -> bool:
    return replay_certificate(cert, budget) == cert.conclusion


RULES = ("intersection", "term-preimage", "strip-padding", "graph-to-operation")


def derive(
    A: FiniteAlgebra,
    rule: str,
    inputs,
    terms=None,
    t: Optional[TernaryTermOperation] = None,
    neutral: int = 0,
    extra_ops=(),
    budget=DEFAULT_BUDGET,
):
    """Apply one derivation rule and return (result, certificate).

    Rules producing relations from compatible premises must produce
    compatible output; that is re-checked here on every application.
    """
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}; expected one of {RULES}")
    if isinstance(inputs, (Relation, Operation)):
        inputs = [inputs]
    inputs = list(inputs)
    if rule == "intersection":
        if not inputs:
            raise ValueError("intersection of an explicit empty family needs arity context")
        node = Intersection(
            inputs[0].base_size, inputs[0].arity, tuple(Premise(v) for v in inputs)
        )
    elif rule == "term-preimage":
        if len(inputs) != 1 or terms is None:
            raise ValueError("term preimage takes one relation and a tuple of terms")
        node = TermPreimage(tuple(terms), Premise(inputs[0]))
    elif rule == "strip-padding":
        if len(inputs) != 1:
            raise ValueError("strip takes one relation")
        node = StripPadding(Premise(inputs[0]))
    else:
        if len(inputs) != 1:
            raise ValueError("graph rule takes one relation")
        node = GraphToOperation(Premise(inputs[0]))
    cert = EntailmentCertificate(
        conclusion=None,
        premises=(),
        derivation=node,
        term_op=t,
        neutral=neutral,
        extra_ops=tuple(extra_ops),
    )
    value = _eval_node(node, cert, budget)
    cert = EntailmentCertificate(
        conclusion=value,
        premises=certificate_premises(node, t),
        derivation=node,
        term_op=t,
        neutral=neutral,
        extra_ops=tuple(extra_ops),
    )
    if rule != "graph-to-operation" and all(
        isinstance(v, Relation) and is_compatible_relation(A, v) for v in inputs
    ):
        if not is_compatible_relation(A, value):
            raise AssertionError(f"rule {rule} broke compatibility; this is a bug")
    return value, cert


# ---------------------------------------------------------------------------
# Refutation by exhaustive polymorphism search
# ---------------------------------------------------------------------------


@dataclass
class RefutationOutcome:
    """Either a concrete violating map, or a documented exhaustion bound.

    Exhaustion proves nothing: only certificates claim entailment.
    """

    witness: Optional[Operation]
    searched_arity: int
    maps_checked: int

    @property
    def refuted(self):
        return self.witness is not None

    def message(self):
        if self.refuted:
            return (
                f"entailment refuted by a {self.witness.arity}-ary map "
                f"(checked {self.maps_checked} maps)"
            )
        return (
            f"no witness up to arity {self.searched_arity} "
            f"({self.maps_checked} maps checked); nothing is proved"
        )


def _as_relation(value):
    return graph_relation(value) if isinstance(value, Operation) else value


def _preserves(op_table, arity, size, R: Relation):
    rows = R.tuples
    for combo in itertools.product(rows, repeat=arity):
        image = []
        for c in range(R.arity):
            idx = 0
            for row in combo:
                idx = idx * size + row[c]
            image.append(op_table[idx])
        if tuple(image) not in R:
            return False
    return True


def refute_entailment(A, premises, target, max_arity, budget=DEFAULT_BUDGET):
    """Search all maps A^m -> A, m <= max_arity, preserving every premise.

    Returns the first map in canonical order (arity, then table) violating
    the target, or the exhaustion outcome.
    """
    premise_rels = [_as_relation(p) for p in premises]
    target_rel = _as_relation(target)
    checked = 0
    for m in range(1, max_arity + 1):
        count = A.size ** (A.size**m)
        if count > budget:
            raise BudgetExceededError(count, budget, hint=f"maps of arity {m}")
        for table in itertools.product(range(A.size), repeat=A.size**m):
            checked += 1
            if not all(_preserves(table, m, A.size, R) for R in premise_rels):
                continue
            if not _preserves(table, m, A.size, target_rel):
                return RefutationOutcome(
                    witness=Operation("witness", m, A.size, table),
                    searched_arity=m,
                    maps_checked=checked,
                )
    return RefutationOutcome(witness=None, searched_arity=max_arity, maps_checked=checked)


# ---------------------------------------------------------------------------
# The reduction pipeline: certificates from bounded-arity premises
# ---------------------------------------------------------------------------


@dataclass
class ReductionResult:
    """A compatible relation rewritten over premises of arity at most N+1."""

    input: Relation
    bounded_premises: tuple
    certificate: EntailmentCertificate

    def __post_init__(self):
        bound = max((r.arity for r in self.bounded_premises), default=0)
        assert all(isinstance(r, Relation) for r in self.bounded_premises)
        self.max_premise_arity = bound


def reduce_to_bounded_arity(
    A,
    t: TernaryTermOperation,
    R: Relation,
    N: int,
    budget=DEFAULT_BUDGET,
    trivial_when_bounded=False,
) -> ReductionResult:
    """Certify R from (N+1)-ary compatible relations plus the affine operation.

    R is written as the intersection of the completely meet-irreducible
    subuniverses of A^n above it; each of those is the kernel class of a
    morphism onto a subdirectly irreducible quotient, which factors through
    A^(N+1), turning the component into a term preimage of an (N+1)-ary
    compatible relation.  N must be at least the generating-family size of
    every hom group met along the way; families are padded up to exactly N.

    With trivial_when_bounded=True a relation that already has arity at most
    N+1 is returned as its own one-node certificate instead.
    """
    if R.base_size != A.size:
        raise ValueError("relation base does not match the algebra")
    if not is_compatible_relation(A, R, budget):
        raise ValueError("input relation is not compatible")
    n = R.arity
    if trivial_when_bounded and n <= N + 1:
        cert = EntailmentCertificate(
            conclusion=R, premises=(R,), derivation=Premise(R), term_op=t
        )
        return ReductionResult(input=R, bounded_premises=(R,), certificate=cert)

    P = power_algebra(A, n, budget)
    t_P = lift_term_to_power(t, n, budget)
    carriers = subuniverse_carriers(P, budget)
    r_codes = set(R.codes())
    above = [
        w
        for w in meet_irreducibles(P, budget, carriers=carriers)
        if r_codes <= set(w.carrier)
    ]
    # an inclusion-minimal subfamily has the same intersection
    components = [
        w
        for w in above
        if not any(set(v.carrier) < set(w.carrier) for v in above)
    ]
    if components:
        meet = set(components[0].carrier)
        for w in components[1:]:
            meet &= set(w.carrier)
        assert meet == r_codes, "meet-irreducible decomposition failed"
    else:
        assert len(r_codes) == P.size, "only the full relation has no components"

    nodes = []
    premises = []
    for w in components:
        kt = kernel_quotient(P, t_P, w, budget, carriers=carriers)
        S, f, c = kt.quotient, kt.projection, kt.point
        t_S = _affine.induced_term(t_P, f.kernel_congruence())
        k = Homomorphism(A, S, [f(encode_tuple((x,) * n, A.size)) for x in range(A.size)])
        hk = build_hk_group(A, S, t, t_S, k, budget)
        family = generating_family(hk)
        if family.size > N:
            raise ValueError(
                f"N={N} is below the generating-family size {family.size} "
                f"needed for a quotient of {P.name}"
            )
        fac = factor_morphism(A, S, t, t_S, f, family.padded(N), budget)
        b_codes = [code for code in range(len(fac.g.mapping)) if fac.g(code) == c]
        B = Relation.from_codes(b_codes, A.size, N + 1)
        try:
            compatible = is_compatible_relation(A, B, budget)
        except BudgetExceededError:
            from .core import sampled_compatibility

            compatible = sampled_compatibility(A, B)
        assert compatible, "preimage of the point is not compatible"
        node = TermPreimage(fac.terms, Premise(B))
        premises.append(B)
        nodes.append(node)

    root = Intersection(A.size, n, tuple(nodes))
    cert = EntailmentCertificate(
        conclusion=R,
        premises=certificate_premises(root, t),
        derivation=root,
        term_op=t,
        neutral=0,
    )
    value = replay_certificate(cert, budget)
    assert value == R, "reduction pipeline did not reproduce the input relation"
    return ReductionResult(input=R, bounded_premises=tuple(premises), certificate=cert)


def pad_relation(R: Relation, arity: int) -> Relation:
    """R with its last coordinate duplicated up to the requested arity."""
    if arity < R.arity:
        raise ValueError("cannot pad downward")
    return Relation(
        arity,
        R.base_size,
        [t + (t[-1],) * (arity - R.arity) for t in R.tuples],
    )


def eliminate_t(A, t: TernaryTermOperation, N: int, budget=DEFAULT_BUDGET) -> EntailmentCertificate:
    """Certify the affine operation itself from one N-ary compatible relation.

    The premise is the graph of t padded with duplicated last coordinates up
    to arity N; stripping recovers the graph and the graph rule recovers the
    operation.
    """
    if N < 4:
        raise ValueError(f"need N >= 4 to reach the 4-ary graph, got {N}")
    t_op = t.as_operation("t")
    graph = graph_relation(t_op)
    padded = pad_relation(graph, N)
    assert is_compatible_relation(A, padded, budget), "padded graph is not compatible"
    node = Premise(padded)
    for _ in range(N - 4):
        node = StripPadding(node)
    node = GraphToOperation(node, name="t")
    cert = EntailmentCertificate(
        conclusion=t_op,
        premises=(padded,),
        derivation=node,
        term_op=t,
    )
    assert replay_certificate(cert, budget) == t_op
    return cert
