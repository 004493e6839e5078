import itertools

import pytest

from adual import affine, core, subcong, zoo


def least_congruence_collapsing(A, carrier):
    """Oracle: scan the whole congruence lattice for the least one collapsing B."""
    best = None
    for cong in core.con_lattice(A):
        if all(cong.related(a, b) for a in carrier for b in carrier):
            if best is None or cong.refines(best):
                best = cong
    return best


def test_witness_validation(z4):
    with pytest.raises(ValueError):
        subcong.SubalgebraWitness(z4, (1, 3))  # not closed (misses 0)
    with pytest.raises(ValueError):
        subcong.SubalgebraWitness(z4, ())
    w = subcong.SubalgebraWitness(z4, (2, 0))
    assert w.carrier == (0, 2)


def test_theta_examples(z4, v4, terms):
    t4 = terms["z4"]
    th = subcong.theta_of_subalgebra(z4, t4, subcong.SubalgebraWitness(z4, (0, 2)))
    assert th == core.Congruence.from_classes(4, [[0, 2], [1, 3]])
    full = subcong.theta_of_subalgebra(z4, t4, subcong.SubalgebraWitness(z4, (0, 1, 2, 3)))
    assert full.is_full()
    # {(0,0),(1,0)} in the Klein group: collapse by second coordinate
    tv = terms["v4"]
    thv = subcong.theta_of_subalgebra(v4, tv, subcong.SubalgebraWitness(v4, (0, 2)))
    assert thv == core.Congruence.from_classes(4, [[0, 2], [1, 3]])


def test_theta_equals_least_collapsing_congruence(z4, z6, v4, terms):
    # the formula-based congruence agrees with a full lattice scan
    for A in (z4, z6, v4):
        t = terms[A.name]
        for carrier in core.subuniverse_carriers(A):
            th = subcong.theta_of_subalgebra(A, t, subcong.SubalgebraWitness(A, carrier))
            assert th == least_congruence_collapsing(A, carrier)


def test_theta_independent_of_term_choice(z2, z3, v4):
    # there is a single affine element in these clones, so identity is forced;
    # the scan means no other clone element could yield a different theta
    for A in (z2, z3, v4):
        clone = affine.ternary_term_clone(A)
        good = [
            affine.TernaryTermOperation(A.size, tab)
            for tab in clone
            if affine.is_malcev(affine.TernaryTermOperation(A.size, tab))
            and affine.commutes_with_algebra(affine.TernaryTermOperation(A.size, tab), A)
        ]
        assert len(good) == 1
        for carrier in core.subuniverse_carriers(A):
            thetas = {
                subcong.theta_of_subalgebra(A, t, subcong.SubalgebraWitness(A, carrier))
                for t in good
            }
            assert len(thetas) == 1


def test_c_of_congruence_examples(z4):
    B = subcong.SubalgebraWitness(z4, (0, 2))
    mod2 = core.Congruence.from_classes(4, [[0, 2], [1, 3]])
    assert subcong.c_of_congruence(z4, B, mod2).carrier == (0, 2)
    assert subcong.c_of_congruence(z4, B, core.Congruence.full(4)).carrier == (0, 1, 2, 3)


def test_c_of_congruence_at_theta_recovers_carrier(z4, z6, terms):
    for A in (z4, z6):
        t = terms[A.name]
        for carrier in core.subuniverse_carriers(A):
            B = subcong.SubalgebraWitness(A, carrier)
            th = subcong.theta_of_subalgebra(A, t, B)
            assert subcong.c_of_congruence(A, B, th).carrier == carrier


def test_c_of_congruence_precondition(z4):
    B = subcong.SubalgebraWitness(z4, (0, 2))
    with pytest.raises(ValueError) as e:
        subcong.c_of_congruence(z4, B, core.Congruence.identity(4))
    assert "pair" in str(e.value)


def test_galois_z4_origin(z4, terms):
    report = subcong.verify_galois(z4, terms["z4"], subcong.SubalgebraWitness(z4, (0,)))
    assert report.passed
    assert report.subalgebras_above == 3
    assert report.congruences_above == 3


def test_galois_trivial_top(z2, terms):
    report = subcong.verify_galois(z2, terms["z2"], subcong.SubalgebraWitness(z2, (0, 1)))
    assert report.passed
    assert report.subalgebras_above == 1 and report.congruences_above == 1


def test_galois_klein(v4, terms):
    report = subcong.verify_galois(v4, terms["v4"], subcong.SubalgebraWitness(v4, (0,)))
    assert report.passed
    assert report.subalgebras_above == 5 and report.congruences_above == 5


def test_galois_monotonicity(z6, terms):
    t = terms["z6"]
    carriers = core.subuniverse_carriers(z6)
    for c1 in carriers:
        for c2 in carriers:
            if set(c1) <= set(c2):
                th1 = subcong.theta_of_subalgebra(z6, t, subcong.SubalgebraWitness(z6, c1))
                th2 = subcong.theta_of_subalgebra(z6, t, subcong.SubalgebraWitness(z6, c2))
                assert th1.refines(th2)


def test_meet_irreducibles_examples(z2, z4):
    assert [w.carrier for w in subcong.meet_irreducibles(z4)] == [(0,), (0, 2)]
    assert [w.carrier for w in subcong.meet_irreducibles(z2)] == [(0,)]
    P = core.power_algebra(z2, 2)
    # the coatoms of the 5-element subgroup lattice
    assert [w.carrier for w in subcong.meet_irreducibles(P)] == [
        (0, 1),
        (0, 2),
        (0, 3),
    ]


def test_kernel_quotient_examples(z4, v4, terms):
    kt = subcong.kernel_quotient(z4, terms["z4"], subcong.SubalgebraWitness(z4, (0, 2)))
    assert kt.quotient.size == 2
    assert kt.projection.mapping == (0, 1, 0, 1)
    assert kt.point == 0
    # B = {0}: quotient is Z4 itself, which is subdirectly irreducible
    kt2 = subcong.kernel_quotient(z4, terms["z4"], subcong.SubalgebraWitness(z4, (0,)))
    assert kt2.quotient.size == 4 and kt2.point == 0
    # Klein group component
    ktv = subcong.kernel_quotient(v4, terms["v4"], subcong.SubalgebraWitness(v4, (0, 2)))
    assert ktv.quotient.size == 2


def test_kernel_quotient_rejects_non_meet_irreducible(z4, v4, terms):
    with pytest.raises(ValueError):
        subcong.kernel_quotient(z4, terms["z4"], subcong.SubalgebraWitness(z4, (0, 1, 2, 3)))
    with pytest.raises(ValueError):
        # {0} in the Klein group is the meet of the three lines
        subcong.kernel_quotient(v4, terms["v4"], subcong.SubalgebraWitness(v4, (0,)))


def test_quotient_by_meet_irreducible_is_subdirectly_irreducible(z6, terms):
    t = terms["z6"]
    for w in subcong.meet_irreducibles(z6):
        kt = subcong.kernel_quotient(z6, t, w)
        nontrivial = [c for c in core.con_lattice(kt.quotient) if not c.is_identity()]
        monolith = nontrivial[0]
        for c in nontrivial[1:]:
            monolith = monolith.meet(c)
        assert not monolith.is_identity()
