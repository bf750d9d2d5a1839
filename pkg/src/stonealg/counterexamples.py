"""Executable counterexamples: a Polish representation that forgets too
much, a residually finite unary algebra that is not profinite, and a
variety with no nontrivial finite members.

Every check returns a report dict ``{case, parameters, instances_checked,
violations}``; an empty ``violations`` list means the claim held on every
instance examined.
"""
import itertools
import random
import re
from dataclasses import dataclass

from .algebra import FiniteAlgebra, all_algebras, random_algebra
from .errors import ArityTooSmall, BoundExceeded, OmegaInWord, ParseError, UnassignedLetter
from .monoid import omega_power, sample_transformation_monoids, small_monoids
from .terms import Signature, Term, eval_term, polish_string, to_polish
from .variety import parse_identity, satisfies_all


def report(case, parameters, instances_checked, violations):
    return {
        "case": case,
        "parameters": parameters,
        "instances_checked": instances_checked,
        "violations": violations,
    }


# omega-words

@dataclass(frozen=True)
class Letter:
    name: str


@dataclass(frozen=True)
class Concat:
    parts: tuple


@dataclass(frozen=True)
class Power:
    base: object
    exponent: int


@dataclass(frozen=True)
class Omega:
    base: object


@dataclass(frozen=True)
class OmegaPlusOne:
    base: object


_TOKEN = re.compile(r"\s*(?:(\^\{\s*(?:w|ω)\s*\+\s*1\s*\})|(\^(?:w|ω)\+1)|(\^(?:w|ω))|(\^\{?\d+\}?)|([A-Za-z]\d*)|([()]))")


def _tokenize(text):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        pos = m.end()
        brace_wp1, wp1, w, num, letter, paren = m.groups()
        if brace_wp1 or wp1:
            out.append(("exp", "w+1"))
        elif w:
            out.append(("exp", "w"))
        elif num:
            n = int(num.strip("^{}"))
            if n < 1:
                raise ParseError("integer exponents must be at least 1")
            out.append(("exp", n))
        elif letter:
            out.append(("letter", letter))
        else:
            out.append(("paren", paren))
    return out


def parse_omega_word(text):
    """Parse words like ``u^w(u^w x^{w+1})^{w+1}``.

    Letters are one ASCII letter optionally followed by digits; ``ω`` may
    be written ``w`` after a caret.
    """
    tokens = _tokenize(text)
    pos = 0

    def word():
        nonlocal pos
        parts = []
        while pos < len(tokens) and tokens[pos] != ("paren", ")"):
            kind, val = tokens[pos]
            if kind == "letter":
                pos += 1
                item = Letter(val)
            elif val == "(":
                pos += 1
                item = word()
                if pos >= len(tokens) or tokens[pos] != ("paren", ")"):
                    raise ParseError("unbalanced parenthesis")
                pos += 1
            else:
                raise ParseError(f"exponent without base at token {pos}")
            while pos < len(tokens) and tokens[pos][0] == "exp":
                e = tokens[pos][1]
                pos += 1
                item = Omega(item) if e == "w" else OmegaPlusOne(item) if e == "w+1" else Power(item, e)
            parts.append(item)
        if not parts:
            raise ParseError("empty word")
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    result = word()
    if pos != len(tokens):
        raise ParseError("unbalanced parenthesis")
    return result


def eval_omega_word(w, asg, M):
    if isinstance(w, Letter):
        if w.name not in asg:
            raise UnassignedLetter(f"no value for letter {w.name!r}")
        return asg[w.name]
    if isinstance(w, Concat):
        return M.product(eval_omega_word(p, asg, M) for p in w.parts)
    if isinstance(w, Power):
        return M.power(eval_omega_word(w.base, asg, M), w.exponent)
    s = eval_omega_word(w.base, asg, M)
    e = omega_power(M, s)
    return e if isinstance(w, Omega) else M.mul(s, e)


def letters(w):
    if isinstance(w, Letter):
        return {w.name}
    if isinstance(w, Concat):
        return set().union(*(letters(p) for p in w.parts))
    return letters(w.base)


def flatten(w):
    """The finite word denoted by an omega-free expression, as a token list."""
    if isinstance(w, Letter):
        return [w.name]
    if isinstance(w, Concat):
        return [t for p in w.parts for t in flatten(p)]
    if isinstance(w, Power):
        return flatten(w.base) * w.exponent
    raise OmegaInWord("word contains an omega exponent")


def replace_omega(w, k):
    """Replace ``^w`` by ``^k`` and ``^{w+1}`` by ``^(k+1)``."""
    if isinstance(w, Letter):
        return w
    if isinstance(w, Concat):
        return Concat(tuple(replace_omega(p, k) for p in w.parts))
    if isinstance(w, Power):
        return Power(replace_omega(w.base, k), w.exponent)
    return Power(replace_omega(w.base, k), k if isinstance(w, Omega) else k + 1)


OMEGA_LAW = (
    "u^w(u^w x^{w+1})^{w+1}",
    "(u^w x^{w+1})^{w+1}",
    "u^w u^w(u^w x^{w+1})^{w+1} x^w",
)


def check_omega_law(monoids, sides=OMEGA_LAW):
    """All sides agree under every assignment of their letters."""
    words = [parse_omega_word(s) for s in sides]
    names = sorted(set().union(*(letters(w) for w in words)))
    checked = 0
    violations = []
    for mi, M in enumerate(monoids):
        for values in itertools.product(range(M.size), repeat=len(names)):
            asg = dict(zip(names, values))
            got = [eval_omega_word(w, asg, M) for w in words]
            checked += 1
            if len(set(got)) != 1:
                violations.append({"monoid": mi, "table": M.table, "assignment": asg, "values": got})
    return checked, violations


def run_omega_law(max_exhaustive=3, samples=1000, sizes=(4, 5), seed=0):
    small = small_monoids(max_exhaustive)
    sampled = sample_transformation_monoids(samples, sizes=sizes, rng=random.Random(seed)) if samples else []
    c1, v1 = check_omega_law(small)
    c2, v2 = check_omega_law(sampled)
    return report(
        "omega-law",
        {"max_exhaustive": max_exhaustive, "samples": samples, "sizes": list(sizes), "seed": seed},
        c1 + c2,
        v1 + v2,
    )


# terms whose Polish words collapse

def _check_arity(n):
    if n < 2:
        raise ArityTooSmall(f"need an operation of arity at least 2, got {n}")


def build_wk(n, k, x, y, z, u="u"):
    """``u(u(...u(x, y..y), z..z)..., z..z)`` with k nested ``u``."""
    _check_arity(n)
    if k < 1:
        raise ValueError("k must be at least 1")
    t = Term(u, [x] + [y] * (n - 1))
    for _ in range(k - 1):
        t = Term(u, [t] + [z] * (n - 1))
    return t


def build_tk(n, k, u="u", x="x"):
    inner = build_wk(n, k, Term(x), Term(x), Term(x), u)
    return build_wk(n, k, inner, inner, inner, u)


def build_sk(n, k, u="u", x="x"):
    return build_wk(n, k, build_tk(n, k, u, x), Term(x), Term(x), u)


def tk_template(n, k):
    """``u^k(u^k x^{k(n-1)+1})^{k(n-1)+1}`` as an omega-free word."""
    e = k * (n - 1) + 1
    return f"u^{k}(u^{k} x^{{{e}}})^{{{e}}}"


def sk_template(n, k):
    return f"u^{k}({tk_template(n, k)}) x^{{{k * (n - 1)}}}"


def separating_algebra(n, signature=None):
    """Two elements a=0, b=1: arity-n operations return the flip of their
    last argument, all other operations are the constant a."""
    _check_arity(n)
    sig = signature or Signature([("u", n)])
    return FiniteAlgebra.from_function(sig, 2, lambda name, args: 1 - args[-1] if len(args) == n else 0)


def _word_value(tokens, asg, M):
    return M.product(asg[t] for t in tokens)


def run_not_faithful(n, ks, max_monoid=3):
    """For each k: the Polish word of ``t_k`` matches its template, the
    two-element algebra separates ``t_k`` from ``s_k``, and in every small
    monoid the Polish words of ``t_K`` and ``s_K`` agree once K is the
    monoid's exponent."""
    _check_arity(n)
    A = separating_algebra(n)
    asg = {"x": 0}
    checked = 0
    violations = []
    for k in ks:
        t, s = build_tk(n, k), build_sk(n, k)
        expected = " ".join(flatten(parse_omega_word(tk_template(n, k))))
        checked += 1
        if polish_string(t) != expected:
            violations.append({"k": k, "kind": "polish", "got": polish_string(t), "expected": expected})
        w = eval_term(build_wk(n, k, Term("x"), Term("x"), Term("x")), A, asg)
        xt, xs = eval_term(t, A, asg), eval_term(s, A, asg)
        checked += 1
        if (w, xt, xs) != (1, 0, 1):
            violations.append({"k": k, "kind": "separation", "w": w, "t": xt, "s": xs})
    monoids = small_monoids(max_monoid)
    for mi, M in enumerate(monoids):
        K = M.exponent()
        t_word = to_polish(build_tk(n, K))
        s_word = to_polish(build_sk(n, K))
        for uval, xval in itertools.product(range(M.size), repeat=2):
            a = {"u": uval, "x": xval}
            checked += 1
            if _word_value(t_word, a, M) != _word_value(s_word, a, M):
                violations.append({"kind": "monoid", "monoid": mi, "table": M.table, "assignment": a})
    return report(
        "not-faithful", {"n": n, "ks": list(ks), "max_monoid": max_monoid}, checked, violations
    )


# the unary algebra N + {inf}

@dataclass(frozen=True)
class Nat:
    n: int


@dataclass(frozen=True)
class Inf:
    pass


INF = Inf()


def u_sym(e):
    return e if isinstance(e, Inf) else Nat(max(e.n - 1, 0))


def v_sym(e):
    return e if isinstance(e, Inf) else Nat(e.n + 1)


def u_power(e, n):
    """``u^n(e)`` in closed form."""
    return e if isinstance(e, Inf) else Nat(max(e.n - n, 0))


def pointwise_limit_report(horizon=50):
    """``u^n(m) = max(m-n, 0)`` and ``u^n(inf) = inf``: the pointwise limit
    is 0 on every natural but ``inf`` at ``inf``, so it is not continuous."""
    violations = []
    checked = 0
    for n in range(horizon + 1):
        for m in range(horizon + 1):
            e = Nat(m)
            for _ in range(n):
                e = u_sym(e)
            checked += 1
            if e != u_power(Nat(m), n) or e != Nat(max(m - n, 0)):
                violations.append({"n": n, "m": m})
        checked += 1
        if u_power(INF, n) != INF:
            violations.append({"n": n, "m": "inf"})
    # stabilized values along the naturals differ from the value at infinity
    limit_at_naturals = {u_power(Nat(m), horizon + m) for m in range(horizon + 1)}
    if limit_at_naturals != {Nat(0)} or u_power(INF, horizon) == Nat(0):
        violations.append({"kind": "limit"})
    return report("pointwise-limit", {"horizon": horizon}, checked, violations)


MAX_UNARY_BOUND = 4


def _candidate_hom(u_tab, v_tab, c):
    """Extend ``0 -> c`` along ``v``; return ``(phi_0, phi_inf)`` when the
    extension is eventually constant and a homomorphism, else None."""
    seq = [c]
    seen = {c: 0}
    while True:
        nxt = v_tab[seq[-1]]
        if nxt in seen:
            break
        seen[nxt] = len(seq)
        seq.append(nxt)
    d = seq[-1]
    if v_tab[d] != d:  # the orbit cycles: not convergent
        return None
    if u_tab[c] != c or u_tab[d] != d:
        return None
    for m in range(1, len(seq)):
        if u_tab[seq[m]] != seq[m - 1]:
            return None
    return c, d


def nonprofinite_check(bound, samples=None, seed=0):
    """Search unary algebras with two operations of size up to ``bound`` for
    a convergent homomorphism separating 0 from infinity.

    Sizes below ``bound`` are exhaustive; size ``bound`` itself is sampled
    when ``samples`` is given.
    """
    if bound > MAX_UNARY_BOUND:
        raise BoundExceeded(f"bound {bound} exceeds {MAX_UNARY_BOUND}")
    rng = random.Random(seed)
    checked = 0
    survivors = 0
    violations = []
    for m in range(1, bound + 1):
        if samples is not None and m == bound:
            pairs = (
                (tuple(rng.randrange(m) for _ in range(m)), tuple(rng.randrange(m) for _ in range(m)))
                for _ in range(samples)
            )
        else:
            tabs = list(itertools.product(range(m), repeat=m))
            pairs = itertools.product(tabs, tabs)
        for u_tab, v_tab in pairs:
            for c in range(m):
                checked += 1
                hom = _candidate_hom(u_tab, v_tab, c)
                if hom is None:
                    continue
                survivors += 1
                if hom[0] != hom[1]:
                    violations.append({"u": u_tab, "v": v_tab, "phi0": hom[0], "phi_inf": hom[1]})
    out = report("non-profinite", {"bound": bound, "samples": samples, "seed": seed}, checked, violations)
    out["homomorphisms_found"] = survivors
    return out


# Jonsson-Tarski

JT_SIGNATURE = Signature([("alpha", 1), ("beta", 1), ("gamma", 2)])
JT_IDENTITIES = (
    "alpha gamma x y = x",
    "beta gamma x y = y",
    "gamma alpha x beta x = x",
)


def jonsson_tarski_identities():
    return [parse_identity(line, JT_SIGNATURE) for line in JT_IDENTITIES]


def jonsson_tarski_demo(max_size=2, samples=10_000, seed=0):
    """Count nontrivial algebras satisfying the three identities: exhaustive
    at size 2, sampled at size 3 when ``max_size`` is 3."""
    if max_size > 3:
        raise BoundExceeded("Jonsson-Tarski search is limited to size 3")
    ids = jonsson_tarski_identities()
    rng = random.Random(seed)
    checked = 0
    violations = []
    for size in range(2, max_size + 1):
        if size == 2:
            algebras = all_algebras(JT_SIGNATURE, 2)
        else:
            algebras = (random_algebra(JT_SIGNATURE, size, rng) for _ in range(samples))
        for A in algebras:
            checked += 1
            if satisfies_all(A, ids):
                violations.append(A.to_json())
    return report(
        "jonsson-tarski", {"max_size": max_size, "samples": samples, "seed": seed}, checked, violations
    )
