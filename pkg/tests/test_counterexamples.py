import random

import pytest

from stonealg.counterexamples import (
    INF,
    Concat,
    Letter,
    Nat,
    Omega,
    OmegaPlusOne,
    Power,
    build_sk,
    build_tk,
    build_wk,
    check_omega_law,
    eval_omega_word,
    flatten,
    jonsson_tarski_demo,
    nonprofinite_check,
    parse_omega_word,
    pointwise_limit_report,
    replace_omega,
    run_not_faithful,
    separating_algebra,
    sk_template,
    tk_template,
    u_power,
)
from stonealg.errors import ArityTooSmall, BoundExceeded, OmegaInWord, ParseError, UnassignedLetter
from stonealg.monoid import Monoid, omega_power, sample_transformation_monoids, small_monoids
from stonealg.terms import Signature, Term, eval_term, polish_string, to_polish, var

from .oracles import flatten_tk_word


def cyclic(n):
    return Monoid([[(a + b) % n for b in range(n)] for a in range(n)])


def test_parse_omega_word():
    w = parse_omega_word("u^w(u^w x^{w+1})^{w+1}")
    assert w == Concat(
        (Omega(Letter("u")), OmegaPlusOne(Concat((Omega(Letter("u")), OmegaPlusOne(Letter("x"))))))
    )
    assert parse_omega_word("x^3") == Power(Letter("x"), 3)
    assert parse_omega_word("x^ω") == Omega(Letter("x"))
    for bad in ("(x", "x)", "^2", "x^0", "x$"):
        with pytest.raises(ParseError):
            parse_omega_word(bad)


def test_eval_omega_word():
    Z3 = cyclic(3)
    assert eval_omega_word(Letter("x"), {"x": 2}, Z3) == 2
    assert eval_omega_word(parse_omega_word("x^w"), {"x": 1}, Z3) == 0
    assert eval_omega_word(parse_omega_word("x^{w+1}"), {"x": 1}, Z3) == 1
    with pytest.raises(UnassignedLetter):
        eval_omega_word(parse_omega_word("x y"), {"x": 1}, Z3)


def test_omega_powers_idempotent_up_to_four():
    monoids = small_monoids(3) + sample_transformation_monoids(100, sizes=(4,), rng=random.Random(1))
    w = parse_omega_word("x^w")
    for M in monoids:
        for s in range(M.size):
            e = eval_omega_word(w, {"x": s}, M)
            assert M.mul(e, e) == e


def test_flatten_and_replace():
    assert flatten(parse_omega_word("u^2(u x^2)^2")) == list("uuuxxuxx")
    with pytest.raises(OmegaInWord):
        flatten(parse_omega_word("x^w"))
    w = replace_omega(parse_omega_word("x^w y^{w+1}"), 3)
    assert flatten(w) == list("xxxyyyy")


def test_omega_law_small_monoids():
    checked, violations = check_omega_law(small_monoids(3))
    assert checked > 0 and violations == []


def test_omega_law_is_not_vacuous():
    # a wrong variant fails somewhere
    checked, violations = check_omega_law(small_monoids(3), sides=("u^w x", "x u^w"))
    assert violations


def test_wk_examples():
    w1 = build_wk(2, 1, var("x"), var("y"), var("z"))
    assert w1 == Term("u", [var("x"), var("y")])
    w2 = build_wk(3, 2, var("x"), var("y"), var("z"))
    assert polish_string(w2) == "u u x y y z z"
    for n in (2, 3, 4):
        for k in range(1, 6):
            assert build_wk(n, k, var("x"), var("y"), var("z")).size == k * n + 1
    with pytest.raises(ArityTooSmall):
        build_wk(1, 1, var("x"), var("y"), var("z"))


def test_tk_polish_matches_hand_expansion():
    assert polish_string(build_tk(2, 1)) == "u u x x u x x"
    for n in (2, 3):
        for k in range(1, 6):
            assert to_polish(build_tk(n, k)) == flatten_tk_word(n, k)
            assert to_polish(build_tk(n, k)) == flatten(parse_omega_word(tk_template(n, k)))
            assert to_polish(build_sk(n, k)) == flatten(parse_omega_word(sk_template(n, k)))


def test_separating_algebra():
    for n in (2, 3):
        A = separating_algebra(n)
        for k in range(1, 6):
            x = var("x")
            assert eval_term(build_wk(n, k, x, x, x), A, {"x": 0}) == 1
            assert eval_term(build_tk(n, k), A, {"x": 0}) == 0
            assert eval_term(build_sk(n, k), A, {"x": 0}) == 1
    sig = Signature([("u", 2), ("g", 1), ("c", 0)])
    A = separating_algebra(2, sig)
    assert A.apply("g", (1,)) == 0 and A.apply("c", ()) == 0 and A.apply("u", (0, 0)) == 1
    with pytest.raises(ArityTooSmall):
        separating_algebra(1)


def test_run_not_faithful():
    for n in (2, 3):
        rep = run_not_faithful(n, range(1, 6))
        assert rep["violations"] == []
        assert rep["case"] == "not-faithful" and rep["instances_checked"] > 0


def test_small_k_does_not_saturate():
    # with k = 1 the words of t_1 and s_1 differ in Z_2 (x -> generator)
    Z2 = cyclic(2)
    t, s = to_polish(build_tk(2, 1)), to_polish(build_sk(2, 1))
    asg = {"u": 0, "x": 1}
    assert Z2.product(asg[c] for c in t) != Z2.product(asg[c] for c in s)


def test_exponent_saturates():
    for M in small_monoids(3):
        k = M.exponent()
        for s in range(M.size):
            assert M.power(s, k) == omega_power(M, s)


def test_nonprofinite():
    rep = nonprofinite_check(1)
    assert rep["violations"] == [] and rep["homomorphisms_found"] == 1
    rep = nonprofinite_check(3)
    assert rep["violations"] == [] and rep["homomorphisms_found"] > 0
    with pytest.raises(BoundExceeded):
        nonprofinite_check(5)


def test_pointwise_limit():
    assert u_power(Nat(5), 3) == Nat(2)
    assert u_power(Nat(2), 9) == Nat(0)
    assert u_power(INF, 100) == INF
    assert pointwise_limit_report(30)["violations"] == []


def test_jonsson_tarski_two_element():
    rep = jonsson_tarski_demo(2)
    assert rep["instances_checked"] == 256 and rep["violations"] == []
    with pytest.raises(BoundExceeded):
        jonsson_tarski_demo(4)
