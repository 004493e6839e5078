"""The subalgebra/congruence correspondence on an affine algebra.

A subalgebra B induces the congruence theta_B collapsing it; a congruence
above theta_B recovers a subalgebra C(alpha, B).  Between the subalgebras
containing B and the congruences containing theta_B these two maps are
mutually inverse lattice isomorphisms, meet-irreducible subalgebras give
subdirectly irreducible quotients, and every meet-irreducible B is the
preimage of a one-element subalgebra under the canonical projection.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .core import (
    Congruence,
    DEFAULT_BUDGET,
    FiniteAlgebra,
    Homomorphism,
    _UnionFind,
    con_lattice,
    congruence_generated_by,
    quotient_algebra,
    subalgebra_on,
    subuniverse_carriers,
    verify_congruence,
)
from .affine import TernaryTermOperation


@dataclass(frozen=True)
class SubalgebraWitness:
    """A verified nonempty carrier closed under all ambient operations."""

    ambient: FiniteAlgebra
    carrier: tuple

    def __post_init__(self):
        carrier = tuple(sorted(set(int(x) for x in self.carrier)))
        object.__setattr__(self, "carrier", carrier)
        if not carrier:
            raise ValueError("subalgebra carrier must be nonempty")
        cset = set(carrier)
        if any(not 0 <= x < self.ambient.size for x in carrier):
            raise ValueError("carrier element outside the ambient universe")
        for o in self.ambient.ops:
            for args in itertools.product(carrier, repeat=o.arity):
                if o(*args) not in cset:
                    raise ValueError(
                        f"carrier not closed under {o.name} at {args} in {self.ambient.name}"
                    )

    def __len__(self):
        return len(self.carrier)

    def as_algebra(self, name=None):
        return subalgebra_on(self.ambient, self.carrier, name=name)


@dataclass(frozen=True)
class KernelTriple:
    """A subdirectly irreducible quotient S, the projection f, and the point c.

    The singleton {c} is a subalgebra of S and the preimage of c under f is
    exactly the carrier the triple was built from.
    """

    quotient: FiniteAlgebra
    projection: Homomorphism
    point: int
    source_carrier: tuple


def theta_of_subalgebra(A, t: TernaryTermOperation, B: SubalgebraWitness) -> Congruence:
    """The congruence collapsing B: pairs (x,y) with t(x,y,b) in B for all b in B.

    The universally and existentially quantified forms agree and the result
    is re-verified to be a congruence; both checks fail only when t is not
    affine for A or B is not closed.
    """
    if B.ambient is not A and B.ambient.name != A.name:
        raise ValueError("witness does not live in the given algebra")
    if t.base_size != A.size:
        raise ValueError("term base does not match algebra")
    n = A.size
    bset = set(B.carrier)
    uf = _UnionFind(n)
    forall_pairs = set()
    exists_pairs = set()
    for x in range(n):
        for y in range(n):
            values = [t(x, y, b) in bset for b in B.carrier]
            if all(values):
                forall_pairs.add((x, y))
                uf.union(x, y)
            if any(values):
                exists_pairs.add((x, y))
    if forall_pairs != exists_pairs:
        raise ValueError(
            "universal and existential forms disagree: t is not affine for this algebra"
        )
    theta = Congruence(n, tuple(uf.find(x) for x in range(n)))
    if theta.pairs() != frozenset(forall_pairs):
        raise ValueError("collapsing relation is not transitive: t is not affine")
    verify_congruence(A, theta)
    return theta


def c_of_congruence(A, B: SubalgebraWitness, alpha: Congruence) -> SubalgebraWitness:
    """C(alpha, B) = {x : (x,b) in alpha for all b in B}, for alpha above theta_B."""
    if alpha.base_size != A.size:
        raise ValueError("congruence base does not match algebra")
    theta_b = congruence_generated_by(A, itertools.combinations(B.carrier, 2))
    if not theta_b.refines(alpha):
        witness = next(
            (x, y)
            for x in range(A.size)
            for y in range(A.size)
            if theta_b.related(x, y) and not alpha.related(x, y)
        )
        raise ValueError(
            f"congruence does not contain the one generated by the carrier: "
            f"pair {witness} is collapsed by theta_B but not by alpha"
        )
    forall = [x for x in range(A.size) if all(alpha.related(x, b) for b in B.carrier)]
    exists = [x for x in range(A.size) if any(alpha.related(x, b) for b in B.carrier)]
    assert forall == exists, "universal and existential forms of C(alpha,B) disagree"
    assert set(B.carrier) <= set(forall)
    return SubalgebraWitness(A, tuple(forall))


@dataclass
class GaloisReport:
    """Outcome of checking the two mutually inverse lattice isomorphisms."""

    carrier: tuple
    subalgebras_above: int
    congruences_above: int
    passed: bool
    counterexample: Optional[str] = None
    shared_theta: tuple = ()

    def lines(self):
        out = [
            f"B = {list(self.carrier)}",
            f"subalgebras above B:  {self.subalgebras_above}",
            f"congruences above theta_B: {self.congruences_above}",
        ]
        if self.shared_theta:
            for group in self.shared_theta:
                out.append(f"subalgebras sharing one congruence: {[list(c) for c in group]}")
        if self.counterexample:
            out.append(f"counterexample: {self.counterexample}")
        out.append("galois: " + ("PASS" if self.passed else "FAIL"))
        return out


def verify_galois(A, t: TernaryTermOperation, B: SubalgebraWitness, budget=DEFAULT_BUDGET):
    """Check both composites and isotonicity on everything above B and theta_B."""
    carriers = subuniverse_carriers(A, budget)
    bset = set(B.carrier)
    S_lat = [c for c in carriers if bset <= set(c)]
    theta_b = theta_of_subalgebra(A, t, B)
    C_lat = [alpha for alpha in con_lattice(A) if theta_b.refines(alpha)]
    counterexample = None

    def theta_of(carrier):
        return theta_of_subalgebra(A, t, SubalgebraWitness(A, carrier))

    for alpha in C_lat:
        X = c_of_congruence(A, B, alpha)
        if theta_of(X.carrier) != alpha:
            counterexample = f"theta(C(alpha,B)) != alpha for alpha={alpha.classes()}"
            break
    if counterexample is None:
        for carrier in S_lat:
            back = c_of_congruence(A, B, theta_of(carrier))
            if back.carrier != carrier:
                counterexample = f"C(theta_X,B) != X for X={list(carrier)}"
                break
    if counterexample is None:
        for c1 in S_lat:
            for c2 in S_lat:
                if set(c1) <= set(c2):
                    if not theta_of(c1).refines(theta_of(c2)):
                        counterexample = f"theta not isotone at {list(c1)} <= {list(c2)}"
                        break
            if counterexample:
                break
    if counterexample is None:
        for a1 in C_lat:
            for a2 in C_lat:
                if a1.refines(a2):
                    X1 = c_of_congruence(A, B, a1)
                    X2 = c_of_congruence(A, B, a2)
                    if not set(X1.carrier) <= set(X2.carrier):
                        counterexample = "C(.,B) not isotone"
                        break
            if counterexample:
                break
    # expose carriers with a common induced congruence (can occur across
    # different B, never inside the lattice above one B)
    fibers = {}
    for carrier in carriers:
        fibers.setdefault(theta_of(carrier), []).append(carrier)
    shared = tuple(tuple(v) for v in fibers.values() if len(v) > 1)
    return GaloisReport(
        carrier=B.carrier,
        subalgebras_above=len(S_lat),
        congruences_above=len(C_lat),
        passed=counterexample is None,
        counterexample=counterexample,
        shared_theta=shared,
    )


def meet_irreducibles(A, budget=DEFAULT_BUDGET, carriers=None):
    """Subuniverses B whose strictly larger subuniverses intersect above B.

    In a finite lattice this is the same as completely meet-irreducible.  The
    top subuniverse is never meet-irreducible.
    """
    if carriers is None:
        carriers = subuniverse_carriers(A, budget)
    out = []
    for c in carriers:
        cset = set(c)
        above = [set(d) for d in carriers if cset < set(d)]
        if not above:
            continue
        inter = set.intersection(*above)
        if inter > cset:
            out.append(SubalgebraWitness(A, c))
    out.sort(key=lambda w: (len(w.carrier), w.carrier))
    return out


def kernel_quotient(
    A,
    t: TernaryTermOperation,
    B: SubalgebraWitness,
    budget=DEFAULT_BUDGET,
    carriers=None,
) -> KernelTriple:
    """Quotient A by theta_B for a completely meet-irreducible B.

    Returns the subdirectly irreducible quotient S, the projection f, and
    the point c = f(B) whose singleton is a subalgebra and whose preimage
    is B.  Raises on a B that is not meet-irreducible.
    """
    mi = {w.carrier for w in meet_irreducibles(A, budget, carriers=carriers)}
    if B.carrier not in mi:
        raise ValueError(f"carrier {list(B.carrier)} is not completely meet-irreducible")
    theta = theta_of_subalgebra(A, t, B)
    S, f = quotient_algebra(A, theta)
    c = f(B.carrier[0])
    assert all(f(b) == c for b in B.carrier)
    assert tuple(x for x in range(A.size) if f(x) == c) == B.carrier
    for o in S.ops:
        assert o(*([c] * o.arity)) == c, f"{{c}} not closed under {o.name}"
    nontrivial = [th for th in con_lattice(S) if not th.is_identity()]
    assert nontrivial, "quotient is trivial"
    monolith = nontrivial[0]
    for th in nontrivial[1:]:
        monolith = monolith.meet(th)
    if monolith.is_identity():
        raise ValueError("quotient has no least nonidentity congruence: not SI")
    return KernelTriple(S, f, c, B.carrier)
