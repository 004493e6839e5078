import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adual import affine, core, zoo


def modular_term_table(n):
    return tuple(
        (x - y + z) % n
        for x in range(n)
        for y in range(n)
        for z in range(n)
    )


def klein_term_table():
    # codes 2a + b, addition is componentwise xor
    return tuple(
        x ^ y ^ z for x in range(4) for y in range(4) for z in range(4)
    )


def test_cyclic_groups_get_x_minus_y_plus_z(z2, z3, z4, z6):
    for A in (z2, z3, z4, z6):
        t = affine.find_affine_term(A)
        assert t is not None
        assert t.table == modular_term_table(A.size)


def test_klein_group_term(v4):
    t = affine.find_affine_term(v4)
    assert t is not None
    assert t.table == klein_term_table()


def test_non_affine_algebras(semilattice, s3):
    assert affine.find_affine_term(semilattice) is None
    assert affine.find_affine_term(s3) is None


def test_set_with_no_operations_has_no_affine_term():
    bare = core.FiniteAlgebra("bare", 2, [])
    assert affine.find_affine_term(bare) is None


def test_malcev_identities_hold(terms):
    for name, t in terms.items():
        n = t.base_size
        for x in range(n):
            for y in range(n):
                assert t(x, y, y) == x
                assert t(y, y, x) == x


def test_compatibility_with_every_basic_operation(z6, terms):
    t = terms["z6"]
    for o in z6.ops:
        if o.arity != 2:
            continue
        for xs in itertools.product(range(6), repeat=2):
            for ys in itertools.product(range(6), repeat=2):
                for zs in itertools.product(range(6), repeat=2):
                    lhs = t(o(*xs), o(*ys), o(*zs))
                    rhs = o(*(t(xs[i], ys[i], zs[i]) for i in range(2)))
                    assert lhs == rhs


def test_provenance_reproduces_table(z4, z6, terms):
    for A in (z4, z6):
        t = terms[A.name]
        assert t.provenance is not None
        assert affine.evaluate_provenance(t.provenance, A) == t.table


def test_unique_affine_element_by_exhaustive_clone_scan(z2, z3, v4):
    # the full ternary clone is the oracle here: exactly one element passes
    # both the Mal'cev identities and compatibility, and it is the one found
    for A in (z2, z3, v4):
        clone = affine.ternary_term_clone(A)
        hits = [
            tab
            for tab in clone
            if affine.is_malcev(affine.TernaryTermOperation(A.size, tab))
            and affine.commutes_with_algebra(affine.TernaryTermOperation(A.size, tab), A)
        ]
        assert hits == [affine.find_affine_term(A).table]


def test_clone_budget_failure(s3):
    with pytest.raises(core.BudgetExceededError):
        affine.find_affine_term(s3, budget=100)


def test_group_from_affine(z4, terms):
    t = terms["z4"]
    G0 = affine.group_from_affine(t, 0)
    assert G0.neutral == 0
    assert G0.add == z4.op("add").table
    assert G0.neg == z4.op("neg").table
    assert G0.exponent == 4
    # any other neutral gives an isomorphic group with that neutral
    for c in range(4):
        G = affine.group_from_affine(t, c)
        assert G.neutral == c
        assert sorted(G.element_order(x) for x in range(4)) == [1, 2, 4, 4]


def test_group_from_affine_rejects_non_affine_tables():
    # a projection is Mal'cev in one identity only; axioms must fail
    n = 2
    table = tuple(x for x in range(n) for _ in range(n) for _ in range(n))
    bad = affine.TernaryTermOperation(n, table)
    with pytest.raises(affine.AffineStructureError):
        affine.group_from_affine(bad, 0)


def test_affine_term_coefficients_validated():
    with pytest.raises(ValueError):
        affine.AffineTerm((1, 1))
    assert affine.AffineTerm((3, -1, -1)).arity == 3


def test_eval_affine_combination_examples(z4, terms):
    t = terms["z4"]
    proj = affine.AffineTerm((1, 0, 0))
    assert affine.eval_affine_combination(proj, t, 0, (3, 1, 2)) == 3
    malcev = affine.AffineTerm((1, -1, 1))
    for args in itertools.product(range(4), repeat=3):
        assert affine.eval_affine_combination(malcev, t, 0, args) == t(*args)
    combo = affine.AffineTerm((3, -1, -1))
    assert affine.eval_affine_combination(combo, t, 0, (1, 2, 3)) == 2


@settings(max_examples=50, deadline=None)
@given(
    data=st.tuples(
        st.lists(st.integers(-6, 6), min_size=1, max_size=4),
        st.lists(st.integers(0, 5), min_size=4, max_size=4),
    )
)
def test_eval_independent_of_neutral(data, terms):
    coeffs, args = data
    coeffs = coeffs + [1 - sum(coeffs)]
    term = affine.AffineTerm(tuple(coeffs))
    t = terms["z6"]
    args = tuple(args[: term.arity]) + (0,) * max(0, term.arity - len(args))
    values = {
        affine.eval_affine_combination(term, t, c, args[: term.arity]) for c in range(6)
    }
    assert len(values) == 1


def test_induced_term_on_quotient(z4, terms):
    mod2 = core.Congruence.from_classes(4, [[0, 2], [1, 3]])
    ti = affine.induced_term(terms["z4"], mod2)
    assert ti.table == modular_term_table(2)


def test_lift_term_to_power(z2, terms):
    tp = affine.lift_term_to_power(terms["z2"], 2)
    # (0,1) - (1,1) + (1,0) = (0,0)
    assert tp(1, 3, 2) == 0
    assert affine.is_malcev(tp)
