"""Finite monoids given by multiplication tables, and omega-powers."""
import itertools
import random
from math import lcm

from .algebra import FiniteAlgebra
from .errors import InvalidAlgebra, NotAssociative, NoIdentity
from .terms import Signature


class Monoid:
    """A multiplication table checked for associativity and a two-sided unit."""

    def __init__(self, table, labels=None):
        table = tuple(tuple(row) for row in table)
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise InvalidAlgebra("monoid table must be square and nonempty")
        if any(not 0 <= v < n for row in table for v in row):
            raise InvalidAlgebra("monoid table leaves the carrier")
        for a, b, c in itertools.product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise NotAssociative(f"({a}{b}){c} != {a}({b}{c})")
        unit = next(
            (e for e in range(n) if all(table[e][x] == x == table[x][e] for x in range(n))), None
        )
        if unit is None:
            raise NoIdentity("table has no two-sided identity")
        self.table = table
        self.size = n
        self.identity = unit
        self.labels = labels

    @classmethod
    def from_algebra(cls, A, symbol=None):
        """Wrap a finite algebra whose signature has a single binary symbol."""
        if symbol is None:
            binary = A.signature.of_arity(2)
            if len(binary) != 1:
                raise InvalidAlgebra("expected exactly one binary symbol")
            symbol = binary[0]
        n = A.size
        return cls([[A.apply(symbol, (a, b)) for b in range(n)] for a in range(n)])

    def to_algebra(self, symbol="*"):
        sig = Signature([(symbol, 2)])
        return FiniteAlgebra(sig, self.size, {symbol: tuple(v for row in self.table for v in row)})

    def mul(self, a, b):
        return self.table[a][b]

    def product(self, elements):
        acc = self.identity
        for x in elements:
            acc = self.table[acc][x]
        return acc

    def power(self, s, k):
        acc = self.identity
        base = s
        while k:
            if k & 1:
                acc = self.table[acc][base]
            base = self.table[base][base]
            k >>= 1
        return acc

    def is_idempotent(self, e):
        return self.table[e][e] == e

    def powers(self, s):
        """The distinct powers ``s, s^2, ...`` up to the first repetition."""
        seen = []
        x = s
        while x not in seen:
            seen.append(x)
            x = self.table[x][s]
        return seen, seen.index(x)

    def index_period(self, s):
        seq, start = self.powers(s)
        return start + 1, len(seq) - start

    def exponent(self):
        """Least ``k >= 1`` such that ``s^k`` is idempotent for every ``s``."""
        idx = max(self.index_period(s)[0] for s in range(self.size))
        per = lcm(*(self.index_period(s)[1] for s in range(self.size)))
        k = per
        while k < idx:
            k += per
        return k

    def __repr__(self):
        return f"Monoid(size={self.size})"


def omega_power(M, s):
    """The unique idempotent among the powers of ``s``.

    The powers ``s, s^2, ...`` enter a cycle of length ``p`` from index ``i``;
    the cycle is a cyclic group and its identity is ``s^m`` for the unique
    ``m`` in ``[i, i+p)`` divisible by ``p``.
    """
    seq, start = M.powers(s)
    p = len(seq) - start
    m = start + 1
    m += (-m) % p
    return seq[m - 1]


def omega_plus_one(M, s):
    return M.mul(s, omega_power(M, s))


def all_monoids(n):
    """Every monoid table on ``range(n)`` (labelled, not up to isomorphism)."""
    out = []
    for e in range(n):
        others = [x for x in range(n) if x != e]
        cells = [(a, b) for a in others for b in others]
        for values in itertools.product(range(n), repeat=len(cells)):
            table = [[None] * n for _ in range(n)]
            for x in range(n):
                table[e][x] = x
                table[x][e] = x
            for (a, b), v in zip(cells, values):
                table[a][b] = v
            try:
                out.append(Monoid(table))
            except NotAssociative:
                continue
    return out


def small_monoids(max_size=3):
    return [M for n in range(1, max_size + 1) for M in all_monoids(n)]


def transformation_monoid(generators, degree):
    """Submonoid of the full transformation monoid generated by the given maps.

    Maps act on the right: ``(f*g)(i) = g(f(i))``.
    """
    ident = tuple(range(degree))
    elems = [ident]
    seen = {ident}
    frontier = [ident]
    gens = [tuple(g) for g in generators]
    while frontier:
        nxt = []
        for f in frontier:
            for g in gens:
                h = tuple(g[f[i]] for i in range(degree))
                if h not in seen:
                    seen.add(h)
                    elems.append(h)
                    nxt.append(h)
        frontier = nxt
    index = {f: i for i, f in enumerate(elems)}
    table = [[index[tuple(g[f[i]] for i in range(degree))] for g in elems] for f in elems]
    return Monoid(table, labels=elems)


def sample_transformation_monoids(count, sizes=(4, 5), degrees=(3, 4), rng=None, max_tries=10**6):
    """Random submonoids of T_3/T_4 whose order lies in ``sizes``."""
    rng = rng or random.Random()
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not sample enough transformation monoids")
        d = rng.choice(degrees)
        k = rng.choice((1, 2))
        gens = [tuple(rng.randrange(d) for _ in range(d)) for _ in range(k)]
        M = transformation_monoid(gens, d)
        if M.size in sizes:
            out.append(M)
    return out
