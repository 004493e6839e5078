"""Alter-egos built from bounded-arity compatible relations, and the double dual.

The candidate dualizing structure on A collects every N-ary compatible
relation for N = max(4, 1 + a^3) with a the largest prime exponent of |A|.
For a subalgebra B of a small power, the dual carries Hom(B, A) with the
alter-ego relations lifted pointwise; the double dual consists of the maps
Hom(B, A) -> A preserving every lifted relation.  Evaluation at elements of
B always lands there injectively; the desk-scale duality check is that
nothing else does, i.e. the double dual has exactly |B| members.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    BudgetExceededError,
    DEFAULT_BUDGET,
    FiniteAlgebra,
    enumerate_homs,
    enumerate_subuniverses,
    is_compatible_relation,
    power_algebra,
    subuniverse_carriers,
)
from .homgroups import prime_signature
from .subcong import SubalgebraWitness


def arity_bound(A) -> int:
    """max(4, 1 + max prime exponent cubed) from the size of A.

    A one-element algebra has no prime exponents; it gets 4 by convention.
    """
    exponents = [a for _, a in prime_signature(A.size).factorization]
    if not exponents:
        return 4
    return max(4, 1 + max(a**3 for a in exponents))


@dataclass
class AlterEgo:
    """The base algebra plus a family of compatible relations.

    The topology on a finite set is discrete and carried implicitly.
    `complete` records whether the relations are all compatible relations of
    the stated arity or a caller-supplied subset ("partial" mode).
    """

    base: FiniteAlgebra
    relations: tuple
    arity: int
    complete: bool = True

    def __post_init__(self):
        for r in self.relations:
            if not is_compatible_relation(self.base, r):
                raise ValueError("alter-ego relation is not compatible with the base algebra")


def build_alter_ego(A, N, budget=DEFAULT_BUDGET, relations=None) -> AlterEgo:
    """All N-ary compatible relations of A, or a supplied subset (partial mode)."""
    if relations is not None:
        rels = tuple(relations)
        for r in rels:
            if r.arity != N:
                raise ValueError(f"supplied relation has arity {r.arity}, expected {N}")
        return AlterEgo(A, rels, N, complete=False)
    try:
        P = power_algebra(A, N, budget)
    except BudgetExceededError as e:
        raise BudgetExceededError(
            e.count, budget, hint="supply a relation subset via relations= (partial mode)"
        ) from None
    return AlterEgo(A, tuple(enumerate_subuniverses(P, budget)), N, complete=True)


@dataclass
class DualStructure:
    """Hom(B, A) with each alter-ego relation lifted pointwise.

    lifted[i] is an integer array of shape (count, arity) holding index
    tuples into `homs` that satisfy relation i at every point of B.
    """

    witness: SubalgebraWitness
    algebra: FiniteAlgebra
    homs: tuple
    ego: AlterEgo
    lifted: tuple


def dual_of(B: SubalgebraWitness, ego: AlterEgo, budget=DEFAULT_BUDGET) -> DualStructure:
    """The dual of B: homs into the base plus the pointwise-lifted relations."""
    B_alg, _, carrier = B.as_algebra()
    homs = tuple(enumerate_homs(B_alg, ego.base, budget))
    h = len(homs)
    size = ego.base.size
    values = np.array([hom.mapping for hom in homs], dtype=np.int64)  # (h, |B|)
    lifted = []
    for rel in ego.relations:
        r = rel.arity
        if h**r > budget:
            raise BudgetExceededError(h**r, budget, hint="lifted relation tuples")
        rel_codes = np.sort(
            np.array(
                [sum(v * size ** (r - 1 - i) for i, v in enumerate(t)) for t in rel.tuples],
                dtype=np.int64,
            )
        )
        grids = np.meshgrid(*([np.arange(h)] * r), indexing="ij")
        tuples_idx = np.stack([g.ravel() for g in grids], axis=1)  # (h**r, r)
        ok = np.ones(len(tuples_idx), dtype=bool)
        for b in range(values.shape[1]):
            codes = np.zeros(len(tuples_idx), dtype=np.int64)
            for i in range(r):
                codes = codes * size + values[tuples_idx[:, i], b]
            pos = np.searchsorted(rel_codes, codes)
            pos[pos >= rel_codes.size] = rel_codes.size - 1
            ok &= rel_codes[pos] == codes
            if not ok.any():
                break
        lifted.append(tuples_idx[ok])
    return DualStructure(B, B_alg, homs, ego, tuple(lifted))


def double_dual(D: DualStructure, budget=DEFAULT_BUDGET):
    """All maps Hom(B,A) -> A preserving every lifted relation, sorted.

    Continuity is vacuous on a finite discrete space.  Candidates are pruned
    relation by relation, most restrictive first.
    """
    h = len(D.homs)
    size = D.ego.base.size
    count = size**h
    if count > budget:
        raise BudgetExceededError(count, budget, hint="double dual candidate maps")
    grids = np.meshgrid(*([np.arange(size)] * h), indexing="ij")
    candidates = np.stack([g.ravel() for g in grids], axis=1)  # (count, h) lexicographic
    alive = np.ones(count, dtype=bool)
    order = sorted(range(len(D.lifted)), key=lambda i: len(D.lifted[i]))
    for i in order:
        tuples_idx = D.lifted[i]
        if len(tuples_idx) == 0 or not alive.any():
            continue
        rel = D.ego.relations[i]
        r = rel.arity
        rel_codes = np.sort(
            np.array(
                [sum(v * size ** (r - 1 - j) for j, v in enumerate(t)) for t in rel.tuples],
                dtype=np.int64,
            )
        )
        live = np.flatnonzero(alive)
        phi = candidates[live]
        keep = np.ones(live.size, dtype=bool)
        chunk = max(1, 2_000_000 // max(1, live.size))
        for start in range(0, len(tuples_idx), chunk):
            block = tuples_idx[start : start + chunk]
            codes = np.zeros((live.size, len(block)), dtype=np.int64)
            for j in range(r):
                codes = codes * size + phi[:, block[:, j]]
            pos = np.searchsorted(rel_codes, codes)
            pos[pos >= rel_codes.size] = rel_codes.size - 1
            keep &= (rel_codes[pos] == codes).all(axis=1)
            if not keep.any():
                break
        alive[live[~keep]] = False
    return [tuple(int(v) for v in candidates[i]) for i in np.flatnonzero(alive)]


@dataclass
class EvaluationReport:
    """Sizes and verdict for one subalgebra B of a power."""

    power: int
    carrier: tuple
    b_size: int
    hom_count: int
    double_dual_size: int
    bijective: bool
    missing: tuple = ()

    def lines(self):
        out = [
            f"B <= A^{self.power}, |B| = {self.b_size}, carrier {list(self.carrier)}",
            f"|Hom(B,A)| = {self.hom_count}",
            f"|B*+| = {self.double_dual_size}",
            "evaluation map: " + ("bijective" if self.bijective else "NOT surjective"),
        ]
        for phi in self.missing:
            out.append(f"  extra double-dual map not hit: {phi}")
        return out


def evaluate_subalgebra(B: SubalgebraWitness, ego: AlterEgo, power, budget=DEFAULT_BUDGET):
    """Check the evaluation map on one B: embed, then compare cardinalities."""
    D = dual_of(B, ego, budget)
    images = []
    for x in range(D.algebra.size):
        images.append(tuple(hom(x) for hom in D.homs))
    if len(set(images)) != len(images):
        raise AssertionError("evaluation map is not injective; this is a bug")
    dd = double_dual(D, budget)
    dd_set = set(dd)
    for img in images:
        assert img in dd_set, "evaluation image escaped the double dual"
    missing = tuple(phi for phi in dd if phi not in set(images))
    return EvaluationReport(
        power=power,
        carrier=B.carrier,
        b_size=len(B.carrier),
        hom_count=len(D.homs),
        double_dual_size=len(dd),
        bijective=len(dd) == D.algebra.size,
        missing=missing[:4],
    )


def verify_duality(A, k_max=2, budget=DEFAULT_BUDGET, ego: Optional[AlterEgo] = None):
    """Evaluation-map reports for every subalgebra of A^k, k <= k_max.

    The overall verdict is the conjunction of the per-B verdicts; the
    evaluation map is injective always, so bijectivity is a cardinality
    comparison.
    """
    if ego is None:
        ego = build_alter_ego(A, arity_bound(A), budget)
    reports = []
    for k in range(1, k_max + 1):
        P = power_algebra(A, k, budget)
        for carrier in subuniverse_carriers(P, budget):
            B = SubalgebraWitness(P, carrier)
            reports.append(evaluate_subalgebra(B, ego, k, budget))
    return reports
