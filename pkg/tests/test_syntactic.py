import random

import pytest

from stonealg.algebra import (
    FiniteAlgebra,
    Homomorphism,
    all_congruences,
    identity_hom,
    quotient,
    random_algebra,
)
from stonealg.errors import NotOnto
from stonealg.syntactic import (
    DISTINGUISHED,
    coarsest_stable_refinement,
    is_j_trivial,
    is_profinite_finite_scale,
    j_classes,
    lift_check,
    syntactic_congruence,
    syntactic_congruence_intersection,
    translation_maps,
    translation_monoid,
)
from stonealg.terms import Signature, Term, eval_term, random_term

from .oracles import coarsest_saturating

BIN = Signature([("m", 2)])
MIXED = Signature([("f", 2), ("g", 1)])
SEMI = FiniteAlgebra(BIN, 2, {"m": (0, 0, 0, 1)})
Z2 = FiniteAlgebra(BIN, 2, {"m": (0, 1, 1, 0)})


def null_algebra(size=3, point=0):
    return FiniteAlgebra.from_function(MIXED, size, lambda name, args: point)


def subsets(n):
    for mask in range(1 << n):
        yield [a for a in range(n) if mask >> a & 1]


def test_semilattice_translations():
    assert sorted(translation_maps(SEMI)) == [(0, 0), (0, 1)]


def test_null_algebra_translations():
    assert sorted(translation_maps(null_algebra())) == [(0, 0, 0), (0, 1, 2)]


def test_monoid_contains_identity_and_is_closed():
    rng = random.Random(1)
    for _ in range(40):
        A = random_algebra(MIXED, rng.randint(1, 4), rng)
        maps = set(translation_maps(A))
        assert tuple(range(A.size)) in maps
        for f in maps:
            for g in maps:
                assert tuple(f[g[a]] for a in range(A.size)) in maps


def test_witness_terms_realize_maps():
    rng = random.Random(2)
    for _ in range(30):
        A = random_algebra(MIXED, rng.randint(1, 4), rng)
        for tr in translation_monoid(A):
            term = tr.witness[0]
            leaves = [n for n in _leaves(term)]
            assert leaves.count(DISTINGUISHED) == 1
            assert tr.witness_agrees()


def _leaves(t):
    stack = [t]
    while stack:
        n = stack.pop()
        if not n.children:
            yield n.label
        stack.extend(n.children)


def _random_linear_term(rng, depth):
    params = [f"q{i}" for i in range(4)]
    t = random_term(MIXED, params, depth, rng)
    # replace one leaf by the distinguished variable
    target = rng.randrange(sum(1 for _ in _leaves(t)))
    counter = [0]

    def walk(node):
        if not node.children:
            i = counter[0]
            counter[0] += 1
            return Term(DISTINGUISHED) if i == target else node
        return Term(node.label, [walk(c) for c in node.children])

    return walk(t), params


def test_linear_terms_give_monoid_elements():
    rng = random.Random(3)
    for _ in range(200):
        A = random_algebra(MIXED, rng.randint(1, 4), rng)
        t, params = _random_linear_term(rng, 4)
        asg = {p: rng.randrange(A.size) for p in params}
        m = []
        for a in range(A.size):
            asg[DISTINGUISHED] = a
            m.append(eval_term(t, A, asg))
        assert tuple(m) in set(translation_maps(A))


def test_monoid_size_invariant_under_isomorphism():
    rng = random.Random(4)
    for _ in range(30):
        A = random_algebra(MIXED, rng.randint(1, 4), rng)
        perm = list(range(A.size))
        rng.shuffle(perm)
        inv = {p: i for i, p in enumerate(perm)}
        B = FiniteAlgebra.from_function(MIXED, A.size, lambda n, args: perm[A.apply(n, [inv[a] for a in args])])
        assert len(translation_maps(A)) == len(translation_maps(B))


def test_trivial_subsets_give_full_congruence():
    A = random_algebra(MIXED, 4, random.Random(5))
    assert syntactic_congruence(A, []).index == 1
    assert syntactic_congruence(A, range(4)).index == 1


def test_semilattice_top():
    sigma = syntactic_congruence(SEMI, [1])
    assert sigma.class_of == (0, 1)
    assert sigma.index == 2


def test_three_routes_agree_and_match_oracle():
    rng = random.Random(6)
    for _ in range(150):
        A = random_algebra(MIXED, rng.randint(1, 4), rng)
        for L in subsets(A.size):
            a = syntactic_congruence(A, L)
            assert a.class_of == syntactic_congruence_intersection(A, L).class_of
            assert a.class_of == coarsest_stable_refinement(A, L).class_of
            assert a.class_of == coarsest_saturating(A, L)


def test_syntactic_dominates_all_saturating():
    rng = random.Random(7)
    for _ in range(50):
        A = random_algebra(MIXED, rng.randint(1, 5), rng)
        L = [a for a in range(A.size) if rng.random() < 0.5]
        sigma = syntactic_congruence(A, L)
        assert sigma.saturates(L)
        for c in all_congruences(A):
            if c.saturates(L):
                assert c <= sigma


def test_lift_check():
    rng = random.Random(8)
    A = random_algebra(MIXED, 3, rng)
    for L in subsets(3):
        assert lift_check(identity_hom(A), L)
    for _ in range(100):
        A = random_algebra(MIXED, rng.randint(1, 5), rng)
        theta = rng.choice(all_congruences(A))
        B, phi = quotient(A, theta)
        L = [b for b in range(B.size) if rng.random() < 0.5]
        assert lift_check(phi, L)
    point, phi = quotient(A, all_congruences(A)[0])
    assert point.size == 1
    assert lift_check(phi, []) and lift_check(phi, [0])


def test_lift_check_requires_onto():
    h = Homomorphism(SEMI, SEMI, [0, 0])
    with pytest.raises(NotOnto):
        lift_check(h, [0])


def test_profinite_report():
    rep = is_profinite_finite_scale(SEMI)
    assert rep.passed and rep.indices[(1,)] == 2
    rep = is_profinite_finite_scale(null_algebra())
    assert rep.passed and rep.subsets_checked == 8
    # translations are id and the constant 0: a singleton splits off alone
    for L in ([0], [1], [2]):
        assert rep.indices[tuple(L)] == 2
    big = random_algebra(Signature([("g", 1)]), 14, random.Random(9))
    rep = is_profinite_finite_scale(big, sample=50)
    assert rep.sampled and rep.subsets_checked == 50 and rep.passed


def test_j_classes():
    assert not is_j_trivial(Z2)
    assert is_j_trivial(SEMI)
    const_only = FiniteAlgebra(Signature([("c", 0)]), 3, {"c": 1})
    assert translation_maps(const_only) == [(0, 1, 2)]
    assert is_j_trivial(const_only)
    assert j_classes(Z2) == (0, 0)
