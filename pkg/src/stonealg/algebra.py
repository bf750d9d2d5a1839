"""Finite algebras, homomorphisms and congruences.

A finite algebra has carrier ``0..size-1`` and one operation table per
symbol.  Tables are stored flat in row-major order: the value of
``w(a1, ..., an)`` sits at index ``((a1*size + a2)*size + ...)``.
"""
import itertools
import json
import random

from .errors import (
    EmptyCarrier,
    EmptyList,
    InvalidAlgebra,
    NotACongruence,
    NotAHomomorphism,
    SignatureMismatch,
)
from .terms import Signature

MAX_ISO_SIZE = 8
MAX_ENUM_SIZE = 6


class FiniteAlgebra:
    __slots__ = ("signature", "size", "tables", "_hash")

    def __init__(self, signature, size, tables):
        if not isinstance(size, int) or size < 1:
            raise InvalidAlgebra(f"size must be a positive integer, got {size!r}")
        flat = {}
        for name, n in signature.symbols:
            if name not in tables:
                raise InvalidAlgebra(f"missing table for {name!r}")
            tab = tables[name]
            if n and not isinstance(tab, tuple):
                tab = _flatten(tab, n)
            elif n == 0 and not isinstance(tab, tuple):
                tab = (tab,)
            tab = tuple(tab)
            if len(tab) != size**n:
                raise InvalidAlgebra(f"table for {name!r} has {len(tab)} entries, expected {size**n}")
            if any(not isinstance(v, int) or not 0 <= v < size for v in tab):
                raise InvalidAlgebra(f"table for {name!r} leaves the carrier")
            flat[name] = tab
        extra = set(tables) - set(flat)
        if extra:
            raise InvalidAlgebra(f"tables for undeclared symbols {sorted(extra)}")
        object.__setattr__(self, "signature", signature)
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "tables", flat)
        object.__setattr__(self, "_hash", hash((signature, size, tuple(sorted(flat.items())))))

    def __setattr__(self, name, value):
        raise AttributeError("FiniteAlgebra is immutable")

    @classmethod
    def from_function(cls, signature, size, fn):
        """Build tables from ``fn(symbol, args_tuple) -> element``."""
        tables = {}
        for name, n in signature.symbols:
            tables[name] = tuple(fn(name, args) for args in itertools.product(range(size), repeat=n))
        return cls(signature, size, tables)

    def apply(self, name, args):
        idx = 0
        n = self.size
        for a in args:
            idx = idx * n + a
        return self.tables[name][idx]

    @property
    def carrier(self):
        return range(self.size)

    def __eq__(self, other):
        return (
            isinstance(other, FiniteAlgebra)
            and self.size == other.size
            and self.signature == other.signature
            and self.tables == other.tables
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FiniteAlgebra(size={self.size}, {self.signature!r})"

    def to_json(self):
        return {
            "signature": self.signature.to_json(),
            "size": self.size,
            "tables": {
                name: _nest(self.tables[name], self.size, n) for name, n in self.signature.symbols
            },
        }

    @classmethod
    def from_json(cls, obj):
        try:
            sig = Signature.from_json(obj["signature"])
            return cls(sig, obj["size"], obj["tables"])
        except (KeyError, TypeError) as exc:
            raise InvalidAlgebra(f"malformed algebra JSON: {exc}") from None


def _flatten(nested, depth):
    out = list(nested)
    for _ in range(depth - 1):
        out = [v for row in out for v in row]
    return tuple(out)


def _nest(flat, size, arity):
    if arity == 0:
        return flat[0]
    out = list(flat)
    for _ in range(arity - 1):
        out = [out[i : i + size] for i in range(0, len(out), size)]
    return out


def read_algebra(path):
    with open(path, encoding="utf-8") as fh:
        return FiniteAlgebra.from_json(json.load(fh))


def random_algebra(signature, size, rng=None):
    rng = rng or random.Random()
    return FiniteAlgebra(
        signature,
        size,
        {name: tuple(rng.randrange(size) for _ in range(size**n)) for name, n in signature.symbols},
    )


def all_algebras(signature, size):
    """Every algebra of the given size over the signature (exhaustive)."""
    names = [(s, n) for s, n in signature.symbols]
    ranges = [itertools.product(range(size), repeat=size**n) for _, n in names]
    for combo in itertools.product(*[list(r) for r in ranges]):
        yield FiniteAlgebra(signature, size, {s: tab for (s, _), tab in zip(names, combo)})


def _same_signature(*algebras):
    sig = algebras[0].signature
    for A in algebras[1:]:
        if A.signature != sig:
            raise SignatureMismatch(f"{A.signature!r} differs from {sig!r}")
    return sig


# Homomorphisms

class Homomorphism:
    __slots__ = ("source", "target", "map")

    def __init__(self, source, target, mapping, check=True):
        _same_signature(source, target)
        mapping = tuple(mapping)
        if len(mapping) != source.size or any(not 0 <= b < target.size for b in mapping):
            raise NotAHomomorphism("map is not a function between the carriers")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "map", mapping)
        if check:
            bad = self.first_violation()
            if bad is not None:
                raise NotAHomomorphism(f"operation {bad[0]!r} not preserved at {bad[1]}")

    def __setattr__(self, name, value):
        raise AttributeError("Homomorphism is immutable")

    def first_violation(self):
        A, B, h = self.source, self.target, self.map
        for name, n in A.signature.symbols:
            for args in itertools.product(range(A.size), repeat=n):
                if h[A.apply(name, args)] != B.apply(name, [h[a] for a in args]):
                    return name, args
        return None

    def __call__(self, a):
        return self.map[a]

    def __eq__(self, other):
        return (
            isinstance(other, Homomorphism)
            and self.map == other.map
            and self.source == other.source
            and self.target == other.target
        )

    def __hash__(self):
        return hash(self.map)

    def __repr__(self):
        return f"Homomorphism({list(self.map)})"

    def is_onto(self):
        return len(set(self.map)) == self.target.size

    def image(self):
        return sorted(set(self.map))

    def kernel(self):
        return Congruence(self.source, self.map)

    def then(self, other):
        """``other`` after ``self``."""
        return Homomorphism(self.source, other.target, [other.map[b] for b in self.map], check=False)


def identity_hom(A):
    return Homomorphism(A, A, range(A.size), check=False)


# Partitions (tuples of class labels, normalized to first-occurrence order)

def normalize(labels):
    seen = {}
    return tuple(seen.setdefault(c, len(seen)) for c in labels)


def blocks_of(class_of):
    out = {}
    for a, c in enumerate(class_of):
        out.setdefault(c, []).append(a)
    return [out[c] for c in sorted(out)]


def partition_from_blocks(blocks, size):
    labels = [None] * size
    for i, blk in enumerate(blocks):
        for a in blk:
            labels[a] = i
    if any(c is None for c in labels):
        raise ValueError("blocks do not cover the set")
    return normalize(labels)


def partition_meet(p, q):
    return normalize(zip(p, q))


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x == y:
            return False
        if y < x:
            x, y = y, x
        self.parent[y] = x
        return True

    def labels(self):
        return normalize(self.find(x) for x in range(len(self.parent)))


def partition_join(p, q):
    uf = UnionFind(len(p))
    for part in (p, q):
        first = {}
        for a, c in enumerate(part):
            if c in first:
                uf.union(first[c], a)
            else:
                first[c] = a
    return uf.labels()


def refines(p, q):
    """True if every block of ``p`` lies inside a block of ``q``."""
    img = {}
    for a, c in enumerate(p):
        if img.setdefault(c, q[a]) != q[a]:
            return False
    return True


def restricted_growth_strings(n):
    """All set partitions of ``range(n)`` as normalized label tuples."""
    if n == 0:
        yield ()
        return
    labels = [0] * n

    def rec(i, mx):
        if i == n:
            yield tuple(labels)
            return
        for c in range(mx + 2):
            labels[i] = c
            yield from rec(i + 1, max(mx, c))

    yield from rec(1, 0)


# Congruences

def _elementary_slices(A):
    """Yield (symbol, position, params) describing each one-variable slice."""
    for name, n in A.signature.symbols:
        for i in range(n):
            for params in itertools.product(range(A.size), repeat=n - 1):
                yield name, i, params


def _slice_map(A, name, i, params):
    return tuple(A.apply(name, params[:i] + (a,) + params[i:]) for a in range(A.size))


def elementary_translations(A):
    """Distinct maps ``a -> w(p1, .., a, .., pn)`` over all symbols, positions, parameters."""
    seen = {}
    for name, i, params in _elementary_slices(A):
        seen.setdefault(_slice_map(A, name, i, params), (name, i, params))
    return seen


def is_compatible(A, class_of):
    return all(_maps_classes(f, class_of) for f in elementary_translations(A))


def _maps_classes(f, class_of):
    img = {}
    for a, c in enumerate(class_of):
        if img.setdefault(c, class_of[f[a]]) != class_of[f[a]]:
            return False
    return True


class Congruence:
    """A partition of the carrier compatible with every operation."""

    __slots__ = ("algebra", "class_of")

    def __init__(self, algebra, class_of, check=True):
        class_of = normalize(class_of)
        if len(class_of) != algebra.size:
            raise NotACongruence("partition size differs from the carrier size")
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "class_of", class_of)
        if check:
            if not is_compatible(algebra, class_of):
                raise NotACongruence("partition is not compatible with the operations")

    def __setattr__(self, name, value):
        raise AttributeError("Congruence is immutable")

    def __eq__(self, other):
        return isinstance(other, Congruence) and self.class_of == other.class_of and self.algebra == other.algebra

    def __hash__(self):
        return hash(self.class_of)

    def __repr__(self):
        return f"Congruence({self.blocks()})"

    def __le__(self, other):
        return refines(self.class_of, other.class_of)

    def related(self, a, b):
        return self.class_of[a] == self.class_of[b]

    def blocks(self):
        return blocks_of(self.class_of)

    @property
    def index(self):
        return max(self.class_of) + 1

    def saturates(self, subset):
        subset = set(subset)
        return all(len({a in subset for a in blk}) == 1 for blk in self.blocks())

    def meet(self, other):
        return Congruence(self.algebra, partition_meet(self.class_of, other.class_of), check=False)

    def join(self, other):
        return congruence_join(self, other)

    def to_json(self):
        return {"classOf": list(self.class_of)}

    @classmethod
    def from_json(cls, algebra, obj):
        try:
            return cls(algebra, obj["classOf"])
        except (KeyError, TypeError) as exc:
            raise NotACongruence(f"malformed congruence JSON: {exc}") from None


def equality_congruence(A):
    return Congruence(A, range(A.size), check=False)


def full_congruence(A):
    return Congruence(A, [0] * A.size, check=False)


def congruence_generated_by(A, pairs):
    """Least congruence containing the given pairs.

    Union-find over the pairs, then repeatedly merge images of related
    elements under every elementary translation until nothing changes.
    """
    uf = UnionFind(A.size)
    for a, b in pairs:
        uf.union(a, b)
    maps = list(elementary_translations(A))
    changed = True
    while changed:
        changed = False
        for f in maps:
            for a in range(A.size):
                r = uf.find(a)
                if r != a and uf.union(f[a], f[r]):
                    changed = True
    return Congruence(A, uf.labels(), check=False)


def congruence_join(theta, rho):
    A = theta.algebra
    pairs = [(a, b) for c in (theta, rho) for blk in c.blocks() for a, b in zip(blk, blk[1:])]
    return congruence_generated_by(A, pairs)


def all_congruences(A, max_size=MAX_ENUM_SIZE):
    """Every congruence of ``A``, by filtering all set partitions."""
    if A.size > max_size:
        raise ValueError(f"congruence enumeration limited to size {max_size}")
    maps = list(elementary_translations(A))
    out = []
    for labels in restricted_growth_strings(A.size):
        if all(_maps_classes(f, labels) for f in maps):
            out.append(Congruence(A, labels, check=False))
    return out


# Constructions

def _radix_encode(sizes, tup):
    idx = 0
    for n, a in zip(sizes, tup):
        idx = idx * n + a
    return idx


def _radix_decode(sizes, idx):
    out = []
    for n in reversed(sizes):
        idx, a = divmod(idx, n)
        out.append(a)
    return tuple(reversed(out))


def product(algebras):
    """Direct product; element ``(a1, .., ak)`` is encoded in mixed radix."""
    if not algebras:
        raise EmptyList("product of an empty list")
    sig = _same_signature(*algebras)
    sizes = [A.size for A in algebras]
    total = 1
    for n in sizes:
        total *= n
    elems = [_radix_decode(sizes, i) for i in range(total)]

    def fn(name, args):
        comps = [[elems[a][j] for a in args] for j in range(len(algebras))]
        return _radix_encode(sizes, [A.apply(name, c) for A, c in zip(algebras, comps)])

    return FiniteAlgebra.from_function(sig, total, fn)


def product_projections(algebras, P=None):
    P = P if P is not None else product(algebras)
    sizes = [A.size for A in algebras]
    elems = [_radix_decode(sizes, i) for i in range(P.size)]
    return [Homomorphism(P, A, [e[j] for e in elems], check=False) for j, A in enumerate(algebras)]


def product_element(algebras, components):
    return _radix_encode([A.size for A in algebras], components)


def saturate(seeds, signature, apply_fn):
    """Close ``seeds`` under all operations; ``apply_fn(symbol, args)`` computes them.

    Semi-naive: each round only evaluates argument tuples that use at least
    one element discovered in the previous round.
    """
    elems = []
    seen = set()

    def add(x, into):
        if x not in seen:
            seen.add(x)
            elems.append(x)
            into.append(x)

    delta = []
    for name in signature.of_arity(0):
        add(apply_fn(name, ()), delta)
    for x in seeds:
        add(x, delta)
    ops = [(name, n) for name, n in signature.symbols if n > 0]
    while delta:
        old = elems[: len(elems) - len(delta)]
        new = []
        for name, n in ops:
            for i in range(n):
                pools = [old] * i + [delta] + [elems] * (n - i - 1)
                for args in itertools.product(*pools):
                    add(apply_fn(name, args), new)
        # elements found this round extend `elems` but not the pools used above
        delta = new
    return elems


def subalgebra(A, elements):
    """Restriction of ``A`` to a closed subset, with its embedding."""
    elements = sorted(set(elements))
    index = {a: i for i, a in enumerate(elements)}
    try:
        sub = FiniteAlgebra.from_function(
            A.signature, len(elements), lambda name, args: index[A.apply(name, [elements[i] for i in args])]
        )
    except KeyError:
        raise InvalidAlgebra("subset is not closed under the operations") from None
    return sub, Homomorphism(sub, A, elements, check=False)


def generated_subalgebra(A, gens):
    gens = list(gens)
    if any(not 0 <= g < A.size for g in gens):
        raise InvalidAlgebra("generator outside the carrier")
    elems = saturate(gens, A.signature, A.apply)
    if not elems:
        raise EmptyCarrier("no generators and no constants")
    return subalgebra(A, elems)


def quotient(A, theta):
    reps = [blk[0] for blk in theta.blocks()]
    cls = theta.class_of
    Q = FiniteAlgebra.from_function(
        A.signature, len(reps), lambda name, args: cls[A.apply(name, [reps[c] for c in args])]
    )
    return Q, Homomorphism(A, Q, cls, check=False)


def generating_set(A):
    """A small generating set, chosen greedily."""
    gens = []
    covered = set(saturate([], A.signature, A.apply))
    for a in range(A.size):
        if a not in covered:
            gens.append(a)
            covered = set(saturate(gens, A.signature, A.apply))
            if len(covered) == A.size:
                break
    return gens


def extend_to_hom(A, B, assignment):
    """The homomorphism from the subalgebra generated by ``assignment``'s keys.

    Returns a dict ``a -> b`` or ``None`` if the assignment does not extend.
    """
    pairs = saturate(
        list(assignment.items()),
        A.signature,
        lambda name, args: (A.apply(name, [p[0] for p in args]), B.apply(name, [p[1] for p in args])),
    )
    out = {}
    for a, b in pairs:
        if out.setdefault(a, b) != b:
            return None
    return out


def find_isomorphism(A, B, max_size=MAX_ISO_SIZE):
    """Backtracking search over generator images; returns a map or ``None``."""
    if A.signature != B.signature or A.size != B.size:
        return None
    if A.size > max_size:
        raise ValueError(f"isomorphism search limited to size {max_size}")
    gens = generating_set(A)

    def rec(i, assignment, used):
        if i == len(gens):
            ext = extend_to_hom(A, B, assignment)
            if ext is None or len(ext) != A.size or len(set(ext.values())) != B.size:
                return None
            return tuple(ext[a] for a in range(A.size))
        for b in range(B.size):
            if b in used:
                continue
            assignment[gens[i]] = b
            found = rec(i + 1, assignment, used | {b})
            if found is not None:
                return found
            del assignment[gens[i]]
        return None

    return rec(0, {}, frozenset())


def is_isomorphic(A, B, max_size=MAX_ISO_SIZE):
    return find_isomorphism(A, B, max_size) is not None
