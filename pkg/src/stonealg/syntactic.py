"""Translation monoids and syntactic congruences of finite algebras."""
import random
from dataclasses import dataclass, field
from functools import lru_cache

from .algebra import (
    Congruence,
    elementary_translations,
    normalize,
    partition_meet,
)
from .errors import NotOnto
from .terms import Term, eval_term, substitute_many

DISTINGUISHED = "_x"


def _param(i):
    return f"_p{i}"


@dataclass(frozen=True)
class Translation:
    """A self-map of the carrier, optionally with a linear term realizing it.

    ``witness`` is ``(term, params)``: ``term`` is linear in ``_x`` and
    ``params`` assigns an element to each other variable.
    """

    algebra: object
    map: tuple
    witness: tuple = field(default=None, compare=False)

    def __call__(self, a):
        return self.map[a]

    def witness_agrees(self):
        if self.witness is None:
            return True
        term, params = self.witness
        asg = dict(params)
        for a in range(self.algebra.size):
            asg[DISTINGUISHED] = a
            if eval_term(term, self.algebra, asg) != self.map[a]:
                return False
        return True


@lru_cache(maxsize=512)
def _monoid_closure(A):
    """Breadth-first closure of the identity under left composition with
    elementary translations.  Returns ``{map: (term, params)}`` in discovery order."""
    elementary = elementary_translations(A)
    steps = []
    for f, (name, i, params) in elementary.items():
        args = [Term(_param(j)) for j in range(len(params))]
        args.insert(i, Term(DISTINGUISHED))
        steps.append((f, Term(name, args), params))
    ident = tuple(range(A.size))
    found = {ident: (Term(DISTINGUISHED), ())}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            g_term, g_params = found[g]
            k = len(g_params)
            for f, f_term, f_params in steps:
                h = tuple(f[b] for b in g)
                if h in found:
                    continue
                renamed = {_param(j): Term(_param(j + k)) for j in range(len(f_params))}
                renamed[DISTINGUISHED] = g_term
                found[h] = (substitute_many(f_term, renamed), g_params + tuple(f_params))
                nxt.append(h)
        frontier = nxt
    return found


def translation_maps(A):
    """The translation monoid as a list of maps (identity first)."""
    return list(_monoid_closure(A))


def translation_monoid(A):
    out = []
    for m, (term, params) in _monoid_closure(A).items():
        asg = tuple((_param(j), v) for j, v in enumerate(params))
        out.append(Translation(A, m, (term, asg)))
    return out


def _alpha(A, subset):
    subset = set(subset)
    return tuple(a in subset for a in range(A.size))


def syntactic_congruence(A, subset):
    """Pairs indistinguishable by every translation relative to ``subset``."""
    inside = _alpha(A, subset)
    maps = translation_maps(A)
    return Congruence(A, normalize(tuple(inside[f[a]] for f in maps) for a in range(A.size)), check=False)


def syntactic_congruence_intersection(A, subset):
    """Intersection over translations ``f`` of the preimages of {L, complement}."""
    inside = _alpha(A, subset)
    result = tuple([0] * A.size)
    for f in translation_maps(A):
        result = partition_meet(result, normalize(inside[f[a]] for a in range(A.size)))
    return Congruence(A, result, check=False)


def coarsest_stable_refinement(A, subset):
    """Refine {L, complement} under elementary translations until stable.

    Independent of the translation monoid; yields the same congruence.
    """
    maps = list(elementary_translations(A))
    labels = normalize(_alpha(A, subset))
    while True:
        new = normalize((labels[a],) + tuple(labels[f[a]] for f in maps) for a in range(A.size))
        if new == labels:
            return Congruence(A, labels, check=False)
        labels = new


def preimage(phi, subset):
    subset = set(subset)
    return [a for a, b in enumerate(phi.map) if b in subset]


def lift_check(phi, subset):
    """Whether pulling back the syntactic congruence of ``subset`` along the
    onto homomorphism ``phi`` gives the syntactic congruence of its preimage.
    Always true; used as a test oracle."""
    if not phi.is_onto():
        raise NotOnto("homomorphism is not onto")
    sigma_B = syntactic_congruence(phi.target, subset)
    pulled = normalize(sigma_B.class_of[b] for b in phi.map)
    sigma_A = syntactic_congruence(phi.source, preimage(phi, subset))
    return pulled == sigma_A.class_of


@dataclass
class ProfinitenessReport:
    size: int
    subsets_checked: int
    sampled: bool
    indices: dict
    failures: list

    @property
    def passed(self):
        return not self.failures


def _subsets(n, sample, rng):
    if n <= 12:
        for mask in range(1 << n):
            yield [a for a in range(n) if mask >> a & 1]
    else:
        for _ in range(sample):
            yield [a for a in range(n) if rng.random() < 0.5]


def is_profinite_finite_scale(A, sample=4096, seed=0):
    """For each subset L (sampled above 12 elements) compute the syntactic
    congruence, record its index and confirm it saturates L."""
    rng = random.Random(seed)
    indices = {}
    failures = []
    count = 0
    for L in _subsets(A.size, sample, rng):
        count += 1
        sigma = syntactic_congruence(A, L)
        indices[tuple(L)] = sigma.index
        if not sigma.saturates(L):
            failures.append(tuple(L))
    return ProfinitenessReport(A.size, count, A.size > 12, indices, failures)


def j_classes(A):
    reach = [set() for _ in range(A.size)]
    for f in translation_maps(A):
        for a in range(A.size):
            reach[a].add(f[a])
    return normalize(
        min(b for b in range(A.size) if b in reach[a] and a in reach[b]) for a in range(A.size)
    )


def is_j_trivial(A):
    return len(set(j_classes(A))) == A.size
