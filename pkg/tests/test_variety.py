import itertools
import random

import pytest

from stonealg.algebra import (
    FiniteAlgebra,
    Homomorphism,
    all_congruences,
    identity_hom,
    is_isomorphic,
    quotient,
    random_algebra,
)
from stonealg.errors import (
    BoundExceeded,
    NotOnto,
    ProductTooLarge,
    SignatureError,
    SignatureMismatch,
    UnassignedVariable,
)
from stonealg.terms import Signature, Term, eval_term, op, parse_polish, random_term, subterms, var
from stonealg.variety import (
    BOTTOM,
    Identity,
    Recognizer,
    SigmaConfig,
    boolean_ops_on_languages,
    finite_quotient_membership,
    free_algebra,
    is_recognized_exactly,
    language_complement,
    language_intersection,
    language_union,
    parse_identity,
    pushout_quotient,
    read_identities,
    recognizes,
    satisfies,
    separating_config,
    sigma_algebra,
    two_omega,
)

from .oracles import brute_free_size, smallest_congruence_containing

BIN = Signature([("m", 2)])
SEMI = FiniteAlgebra(BIN, 2, {"m": (0, 0, 0, 1)})
Z2 = FiniteAlgebra(BIN, 2, {"m": (0, 1, 1, 0)})
CHAIN3 = FiniteAlgebra.from_function(BIN, 3, lambda name, a: min(a))
MIXED = Signature([("f", 2), ("g", 1)])


def test_satisfies_examples():
    comm = parse_identity("m x y = m y x", BIN)
    assert satisfies(SEMI, comm)
    assert satisfies(FiniteAlgebra(BIN, 1, {"m": (0,)}), parse_identity("m x y = x", BIN))
    assert not satisfies(SEMI, parse_identity("m x y = x", BIN))
    with pytest.raises(SignatureMismatch):
        satisfies(SEMI, Identity(op("f", var("x"), var("y")), var("x")))


def test_read_identities(tmp_path):
    p = tmp_path / "ids.txt"
    p.write_text("m x y = m y x\nm x x = x\n", encoding="utf-8")
    ids = read_identities(p, BIN)
    assert len(ids) == 2 and all(satisfies(SEMI, e) for e in ids)
    assert not satisfies(Z2, ids[1])


@pytest.mark.parametrize(
    "gen, xs, size",
    [(SEMI, "xy", 3), (SEMI, "xyz", 7), (Z2, "xy", 4)],
)
def test_free_algebra_sizes(gen, xs, size):
    res = free_algebra([gen], list(xs))
    assert res.algebra.size == size
    assert brute_free_size([gen], list(xs)) == size


def test_free_algebra_projections():
    res = free_algebra([SEMI, CHAIN3], ["x", "y"])
    gens = [SEMI, CHAIN3]
    for i, A in enumerate(gens):
        for values in itertools.product(range(A.size), repeat=2):
            asg = dict(zip("xy", values))
            h = res.projection(i, gens, asg)
            assert all(h(res.generators[x]) == asg[x] for x in "xy")
    assert res.algebra.size == brute_free_size(gens, ["x", "y"])


def test_free_algebra_identities_match_generator():
    rng = random.Random(1)
    for gen in (SEMI, Z2, random_algebra(BIN, 2, rng)):
        F = free_algebra([gen], ["x", "y"]).algebra
        for _ in range(150):
            e = Identity(random_term(BIN, ["x", "y"], 4, rng), random_term(BIN, ["x", "y"], 4, rng))
            assert satisfies(F, e) == satisfies(gen, e)


def test_free_algebra_bound():
    with pytest.raises(ProductTooLarge):
        free_algebra([CHAIN3], ["x", "y", "z"], max_ambient=100)


def test_recognizer_basics():
    rng = random.Random(2)
    r_none = Recognizer(SEMI, {"x": 1, "y": 1}, [])
    r_all = Recognizer(SEMI, {"x": 1, "y": 1}, [0, 1])
    r_top = Recognizer(SEMI, {"x": 1, "y": 0}, [1])
    for _ in range(100):
        t = random_term(BIN, ["x", "y"], 5, rng)
        assert not recognizes(r_none, t)
        assert recognizes(r_all, t)
        # accepted iff y does not occur
        assert recognizes(r_top, t) == ("y" not in _leaf_labels(t))
    with pytest.raises(UnassignedVariable):
        recognizes(r_top, var("z"))
    assert Recognizer.from_json(r_top.to_json()) == r_top


def _leaf_labels(t):
    return {n.label for n in subterms(t) if not n.children}


def test_boolean_operations():
    rng = random.Random(3)
    for _ in range(20):
        A, B = random_algebra(MIXED, 3, rng), random_algebra(MIXED, 2, rng)
        r1 = Recognizer(A, {"x": rng.randrange(3), "y": rng.randrange(3)}, [0, 2])
        r2 = Recognizer(B, {"x": rng.randrange(2), "y": rng.randrange(2)}, [1])
        ops = boolean_ops_on_languages(r1, r2)
        for _ in range(5):
            t = random_term(MIXED, ["x", "y"], 5, rng)
            a, b = recognizes(r1, t), recognizes(r2, t)
            assert recognizes(ops["union"], t) == (a or b)
            assert recognizes(ops["intersection"], t) == (a and b)
            assert recognizes(ops["complement"], t) == (not a)
            assert recognizes(language_complement(language_complement(r1)), t) == a
            assert recognizes(language_intersection(r1, r1), t) == a
            lhs = language_complement(language_union(r1, r2))
            rhs = language_intersection(language_complement(r1), language_complement(r2))
            assert recognizes(lhs, t) == recognizes(rhs, t)


def test_pair_recognizer_rejects_mismatch():
    r1 = Recognizer(SEMI, {"x": 0}, [0])
    r2 = Recognizer(SEMI, {"y": 0}, [0])
    with pytest.raises(SignatureMismatch):
        language_union(r1, r2)


def test_recognized_exactly():
    A = CHAIN3
    phi = Homomorphism(A, SEMI, [0, 0, 1])
    assert is_recognized_exactly(phi, [0, 1])
    assert not is_recognized_exactly(phi, [0])


def test_sigma_of_a_variable():
    sig = Signature([("u", 2)])
    cfg = separating_config(var("x"), var("x"), sig)
    S = sigma_algebra(cfg)
    assert [str(S.label(a)) for a in range(S.algebra.size)] == ["x", BOTTOM]
    assert set(S.algebra.tables["u"]) == {S.bottom}


def test_sigma_of_u_x_y():
    sig = Signature([("u", 2)])
    base = op("u", var("x"), var("y"))
    S = sigma_algebra(separating_config(base, base, sig))
    assert S.label(S.evaluate(base)) == base
    assert S.evaluate(op("u", var("y"), var("x"))) == S.bottom


def test_sigma_separates_and_fixes_subterms():
    sig = Signature([("u", 2), ("g", 1), ("v", 3), ("c", 0)])
    rng = random.Random(4)
    checked = 0
    while checked < 200:
        s = random_term(sig, ["x", "y", "z"], 5, rng)
        t = random_term(sig, ["x", "y", "z"], 5, rng)
        if s == t:
            continue
        S = sigma_algebra(separating_config(t, s, sig, rng))
        assert S.evaluate(s) != S.evaluate(t)
        for st in subterms(t):
            assert S.label(S.evaluate(st)) == st
        checked += 1


def test_sigma_config_validation():
    sig = Signature([("u", 2), ("w", 2)])
    base = op("u", var("x"), var("y"))
    bad = SigmaConfig(base, sig, frozenset({"x"}), {"x": "x"}, frozenset({"u"}), {"u": "u", "w": "u"})
    with pytest.raises(SignatureError):
        sigma_algebra(bad)


def test_two_omega():
    sig = Signature([("f", 2), ("g", 1), ("c", 0)])
    T = two_omega(sig)
    assert T.apply("f", (1, 1)) == 0 and T.apply("g", (1,)) == 0
    e = Identity(op("f", var("x"), var("y")), op("g", var("z")))
    assert satisfies(T, e)
    # characteristic maps separate distinct generator values
    assert eval_term(var("x"), T, {"x": 1}) != eval_term(var("y"), T, {"y": 0})


def test_pushout_trivial_cases():
    rng = random.Random(5)
    S = random_algebra(MIXED, 4, rng)
    theta = rng.choice(all_congruences(S))
    T, phi = quotient(S, theta)
    Q, delta, eps, _ = pushout_quotient(phi, identity_hom(S))
    assert is_isomorphic(Q, T) and len(set(delta.map)) == T.size
    Q, delta, eps, _ = pushout_quotient(phi, phi)
    assert is_isomorphic(Q, T)
    with pytest.raises(NotOnto):
        pushout_quotient(identity_hom(SEMI), Homomorphism(SEMI, SEMI, [0, 0]))


def test_pushout_commutes_and_matches_lattice_join():
    rng = random.Random(6)
    for _ in range(100):
        S = random_algebra(MIXED, rng.randint(1, 5), rng)
        cons = all_congruences(S)
        T, phi = quotient(S, rng.choice(cons))
        U, psi = quotient(S, rng.choice(cons))
        Q, delta, eps, join = pushout_quotient(phi, psi)
        assert [delta(phi(s)) for s in range(S.size)] == [eps(psi(s)) for s in range(S.size)]
        ker = phi.then(delta).kernel()
        assert ker.class_of == join.class_of
        assert join.class_of == smallest_congruence_containing(
            S, [phi.kernel().class_of, psi.kernel().class_of]
        )


def test_membership():
    assert finite_quotient_membership(FiniteAlgebra(BIN, 1, {"m": (0,)}), [Z2], 1)
    assert finite_quotient_membership(SEMI, [SEMI], 1)
    assert finite_quotient_membership(CHAIN3, [SEMI], 2)
    assert not finite_quotient_membership(CHAIN3, [SEMI], 1)
    assert not finite_quotient_membership(Z2, [SEMI], 2)
    with pytest.raises(BoundExceeded):
        finite_quotient_membership(CHAIN3, [SEMI], 3, max_candidates=10)


def test_identity_polish_parse():
    e = parse_identity("m x m y z = m m x y z", BIN)
    assert e.lhs == parse_polish("m x m y z", BIN)
    assert satisfies(SEMI, e) and satisfies(Z2, e)
    assert Term("m", [var("x"), var("x")]) == parse_polish("m x x", BIN)
