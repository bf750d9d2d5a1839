"""Identities, relatively free algebras, recognizers, the subterm algebras
that separate terms, and pushouts of onto homomorphisms."""
import itertools
import random
from dataclasses import dataclass

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    _same_signature,
    congruence_join,
    generating_set,
    quotient,
    saturate,
)
from .errors import (
    BoundExceeded,
    InvalidAlgebra,
    NotOnto,
    ParseError,
    ProductTooLarge,
    SignatureError,
    SignatureMismatch,
)
from .terms import (
    Term,
    check_term,
    eval_term,
    parse_polish,
    subterms,
    symbols_of,
    variables_of,
)

MAX_AMBIENT = 2**24


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term

    def variables(self, signature):
        seen = dict.fromkeys(variables_of(self.lhs, signature))
        seen.update(dict.fromkeys(variables_of(self.rhs, signature)))
        return list(seen)

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


def parse_identity(line, signature, variables=None):
    """``lhs = rhs`` with both sides in Polish notation."""
    parts = line.split("=")
    if len(parts) != 2:
        raise ParseError(f"expected exactly one '=' in {line!r}")
    return Identity(
        parse_polish(parts[0], signature, variables), parse_polish(parts[1], signature, variables)
    )


def read_identities(path, signature, variables=None):
    with open(path, encoding="utf-8") as fh:
        return [parse_identity(line, signature, variables) for line in fh if line.strip()]


def satisfies(A, identity, signature=None):
    if signature is not None and signature != A.signature:
        raise SignatureMismatch("identity and algebra use different signatures")
    for side in (identity.lhs, identity.rhs):
        try:
            check_term(side, A.signature)
        except SignatureError as exc:
            raise SignatureMismatch(str(exc)) from None
    xs = identity.variables(A.signature)
    for values in itertools.product(range(A.size), repeat=len(xs)):
        asg = dict(zip(xs, values))
        if eval_term(identity.lhs, A, asg) != eval_term(identity.rhs, A, asg):
            return False
    return True


def satisfies_all(A, identities):
    return all(satisfies(A, e) for e in identities)


# Relatively free algebras

@dataclass
class FreeAlgebraResult:
    """The ``X``-generated subalgebra of the product over all assignments.

    ``components[j] = (i, assignment)`` describes coordinate ``j``;
    ``elements[a]`` is the coordinate tuple of carrier element ``a``.
    """

    algebra: FiniteAlgebra
    generators: dict
    components: list
    elements: list

    def projection(self, gen_index, gens, assignment):
        """Homomorphism onto ``gens[gen_index]`` sending each generator ``x``
        to ``assignment[x]``."""
        target = gens[gen_index]
        key = tuple(assignment[x] for x in self.generators)
        for j, (i, asg) in enumerate(self.components):
            if gens[i] == target and tuple(asg[x] for x in self.generators) == key:
                return Homomorphism(self.algebra, target, [e[j] for e in self.elements])
        raise KeyError("assignment not represented")


def free_algebra(gens, variables, max_ambient=MAX_AMBIENT):
    """Free algebra over ``variables`` in the variety generated by ``gens``."""
    if not gens:
        raise InvalidAlgebra("need at least one generating algebra")
    sig = _same_signature(*gens)
    xs = list(variables)
    components = []
    seen = set()
    ambient = 1
    for i, A in enumerate(gens):
        for values in itertools.product(range(A.size), repeat=len(xs)):
            # identical algebras give identical coordinates; keep one
            key = (A, values)
            if key in seen:
                continue
            seen.add(key)
            components.append((i, dict(zip(xs, values))))
            ambient *= A.size
            if ambient > max_ambient:
                raise ProductTooLarge(f"ambient product exceeds {max_ambient} elements")
    algs = [gens[i] for i, _ in components]
    gen_tuples = [tuple(asg[x] for _, asg in components) for x in xs]

    def apply(name, args):
        return tuple(
            A.apply(name, [arg[j] for arg in args]) for j, A in enumerate(algs)
        )

    elems = saturate(gen_tuples, sig, apply)
    if not elems:
        raise InvalidAlgebra("no variables and no constants: the free algebra is empty")
    elems.sort()
    index = {e: k for k, e in enumerate(elems)}
    F = FiniteAlgebra.from_function(sig, len(elems), lambda name, args: index[apply(name, [elems[a] for a in args])])
    return FreeAlgebraResult(F, {x: index[g] for x, g in zip(xs, gen_tuples)}, components, elems)


# Recognizers

@dataclass(frozen=True)
class Recognizer:
    algebra: FiniteAlgebra
    assignment: tuple
    accepting: frozenset

    def __init__(self, algebra, assignment, accepting):
        asg = dict(assignment)
        if any(not 0 <= v < algebra.size for v in asg.values()):
            raise InvalidAlgebra("assignment leaves the carrier")
        acc = frozenset(accepting)
        if any(not 0 <= v < algebra.size for v in acc):
            raise InvalidAlgebra("accepting set leaves the carrier")
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "assignment", tuple(sorted(asg.items())))
        object.__setattr__(self, "accepting", acc)

    @property
    def variables(self):
        return [x for x, _ in self.assignment]

    def evaluate(self, t):
        return eval_term(t, self.algebra, dict(self.assignment))

    def to_json(self):
        return {
            "algebra": self.algebra.to_json(),
            "assignment": dict(self.assignment),
            "accepting": sorted(self.accepting),
        }

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(FiniteAlgebra.from_json(obj["algebra"]), obj["assignment"], obj["accepting"])
        except (KeyError, TypeError) as exc:
            raise InvalidAlgebra(f"malformed recognizer JSON: {exc}") from None


def recognizes(r, t):
    return r.evaluate(t) in r.accepting


def is_recognized_exactly(phi, subset):
    """Whether ``phi^-1(phi(K)) = K``."""
    subset = set(subset)
    image = {phi.map[a] for a in subset}
    return {a for a in range(phi.source.size) if phi.map[a] in image} == subset


def _pair_recognizer(r1, r2, keep):
    A, B = r1.algebra, r2.algebra
    _same_signature(A, B)
    if r1.variables != r2.variables:
        raise SignatureMismatch("recognizers use different variable sets")
    n = B.size
    P = FiniteAlgebra.from_function(
        A.signature,
        A.size * n,
        lambda name, args: A.apply(name, [a // n for a in args]) * n + B.apply(name, [a % n for a in args]),
    )
    asg = {x: a * n + b for (x, a), (_, b) in zip(r1.assignment, r2.assignment)}
    acc = [p for p in range(P.size) if keep(p // n in r1.accepting, p % n in r2.accepting)]
    return Recognizer(P, asg, acc)


def language_union(r1, r2):
    return _pair_recognizer(r1, r2, lambda a, b: a or b)


def language_intersection(r1, r2):
    return _pair_recognizer(r1, r2, lambda a, b: a and b)


def language_complement(r):
    return Recognizer(r.algebra, dict(r.assignment), set(range(r.algebra.size)) - r.accepting)


def boolean_ops_on_languages(r1, r2):
    return {
        "union": language_union(r1, r2),
        "intersection": language_intersection(r1, r2),
        "complement": language_complement(r1),
    }


# Subterm algebras

BOTTOM = "⊥"


@dataclass
class SigmaConfig:
    """Finite data for the subterm algebra of ``base``.

    ``alpha`` maps every variable onto ``x_t`` and fixes ``x_t``; ``beta``
    maps every symbol to a symbol of the same arity among ``symbols_t`` (or
    to ``None`` when no symbol of that arity is kept), fixing ``symbols_t``.
    """

    base: Term
    signature: object
    x_t: frozenset
    alpha: dict
    symbols_t: frozenset
    beta: dict

    def validate(self):
        vs = set(variables_of(self.base, self.signature))
        if not vs <= self.x_t:
            raise SignatureError("x_t must contain the variables of the base term")
        if not symbols_of(self.base, self.signature) <= self.symbols_t:
            raise SignatureError("symbols_t must contain the symbols of the base term")
        if any(self.alpha.get(x) != x for x in self.x_t):
            raise SignatureError("alpha must fix x_t pointwise")
        if any(v not in self.x_t for v in self.alpha.values()):
            raise SignatureError("alpha must take values in x_t")
        for f, n in self.signature.symbols:
            g = self.beta.get(f)
            if f in self.symbols_t and g != f:
                raise SignatureError("beta must fix symbols_t pointwise")
            if g is not None and (g not in self.symbols_t or self.signature.arity(g) != n):
                raise SignatureError(f"beta({f}) must be a kept symbol of arity {n}")


def separating_config(base, other, signature, rng=None):
    """A configuration built from the variables and symbols of two terms;
    symbols and variables outside them are sent to random kept ones."""
    rng = rng or random.Random(0)
    x_t = set(variables_of(base, signature)) | set(variables_of(other, signature))
    kept = symbols_of(base, signature) | symbols_of(other, signature)
    beta = {}
    for f, n in signature.symbols:
        if f in kept:
            beta[f] = f
        else:
            same = sorted(g for g in kept if signature.arity(g) == n)
            beta[f] = rng.choice(same) if same else None
    alpha = {x: x for x in x_t}
    return SigmaConfig(base, signature, frozenset(x_t), alpha, frozenset(kept), beta)


@dataclass
class SigmaAlgebra:
    algebra: FiniteAlgebra
    elements: list  # subterms of the base term, then BOTTOM
    config: SigmaConfig

    @property
    def bottom(self):
        return len(self.elements) - 1

    def assignment_for(self, variables):
        index = {s: i for i, s in enumerate(self.elements[:-1])}
        asg = {}
        for x in variables:
            y = self.config.alpha.get(x)
            asg[x] = index.get(Term(y), self.bottom) if y is not None else self.bottom
        return asg

    def evaluate(self, t):
        """Image of ``t`` under the homomorphism extending the variable map."""
        asg = self.assignment_for(variables_of(t, self.config.signature))
        return eval_term(t, self.algebra, asg)

    def label(self, a):
        return BOTTOM if a == self.bottom else self.elements[a]


def sigma_algebra(cfg):
    cfg.validate()
    sig = cfg.signature
    subs = subterms(cfg.base)
    index = {s: i for i, s in enumerate(subs)}
    bottom = len(subs)

    def fn(name, args):
        g = cfg.beta.get(name)
        if g is None or bottom in args:
            return bottom
        cand = Term(g, [subs[a] for a in args])
        return index.get(cand, bottom)

    A = FiniteAlgebra.from_function(sig, bottom + 1, fn)
    return SigmaAlgebra(A, subs + [BOTTOM], cfg)


def two_omega(signature):
    return FiniteAlgebra.from_function(signature, 2, lambda name, args: 0)


# Pushouts and pseudovariety membership

def pushout_quotient(phi, psi):
    """Quotient of the common source by the join of the two kernels, with
    the induced maps from both targets."""
    if phi.source != psi.source:
        raise SignatureMismatch("homomorphisms must share their source")
    if not (phi.is_onto() and psi.is_onto()):
        raise NotOnto("both homomorphisms must be onto")
    theta = congruence_join(phi.kernel(), psi.kernel())
    Q, proj = quotient(phi.source, theta)

    def induced(h):
        m = [None] * h.target.size
        for s, t in enumerate(h.map):
            m[t] = proj.map[s]
        return Homomorphism(h.target, Q, m)

    return Q, induced(phi), induced(psi), theta


def finite_quotient_membership(S, gens, bound, max_candidates=10**6):
    """Whether ``S`` is a homomorphic image of a subalgebra of a product of at
    most ``bound`` algebras drawn from ``gens`` (repetition allowed)."""
    _same_signature(S, *gens)
    if S.size == 1:
        return True
    g = generating_set(S)
    for k in range(1, bound + 1):
        for factors in itertools.combinations_with_replacement(range(len(gens)), k):
            algs = [gens[i] for i in factors]
            size = 1
            for A in algs:
                size *= A.size
            if size ** len(g) > max_candidates:
                raise BoundExceeded(f"{size ** len(g)} candidate generator images")
            points = list(itertools.product(*[range(A.size) for A in algs]))
            for images in itertools.product(points, repeat=len(g)):
                if _images_define_onto_hom(S, algs, g, images):
                    return True
    return False


def _images_define_onto_hom(S, algs, gens, images):
    """Does the subalgebra of the product generated by ``images`` map onto S
    via ``images[j] -> gens[j]``?  True iff the generated subalgebra of
    product x S is the graph of a function on its first coordinate."""

    def apply(name, args):
        prod = tuple(A.apply(name, [a[0][j] for a in args]) for j, A in enumerate(algs))
        return prod, S.apply(name, [a[1] for a in args])

    graph = {}
    for b, s in saturate(list(zip(images, gens)), S.signature, apply):
        if graph.setdefault(b, s) != s:
            return False
    return len(set(graph.values())) == S.size
