"""Finite Boolean algebras of sets, tensor products, meshes, and finite
Stone duality.

A Boolean subalgebra of the powerset of ``range(m)`` is stored as its atom
partition.  Elements are bitsets over atom indices, so Boolean operations
are plain integer bit operations.  In the finite case ultrafilters are
exactly the principal filters of atoms.
"""
import itertools
import json
from dataclasses import dataclass

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    _radix_decode,
    _radix_encode,
    find_isomorphism,
    normalize,
    partition_join,
    partition_meet,
    refines,
    saturate,
)
from .errors import (
    InvalidAlgebra,
    NotGenerating,
    NotInAlgebra,
    NotInTensor,
    NotSubalgebra,
    StarViolated,
    UniverseTooLarge,
)
from .terms import Term, eval_term

MAX_UNIVERSE = 100_000


class SetBooleanAlgebra:
    __slots__ = ("universe", "atoms", "atom_of")

    def __init__(self, universe, atoms):
        atoms = [tuple(sorted(set(a))) for a in atoms]
        if any(not a for a in atoms):
            raise InvalidAlgebra("atoms must be nonempty")
        atom_of = [None] * universe
        for i, a in enumerate(atoms):
            for p in a:
                if not 0 <= p < universe or atom_of[p] is not None:
                    raise InvalidAlgebra("atoms must partition the universe")
                atom_of[p] = i
        if any(c is None for c in atom_of):
            raise InvalidAlgebra("atoms must cover the universe")
        # canonical atom order: by least point
        order = sorted(range(len(atoms)), key=lambda i: atoms[i][0])
        self.universe = universe
        self.atoms = tuple(atoms[i] for i in order)
        self.atom_of = normalize(atom_of)

    @classmethod
    def from_labels(cls, labels):
        labels = normalize(labels)
        blocks = {}
        for p, c in enumerate(labels):
            blocks.setdefault(c, []).append(p)
        return cls(len(labels), [blocks[c] for c in sorted(blocks)])

    @property
    def n_atoms(self):
        return len(self.atoms)

    @property
    def top(self):
        return (1 << self.n_atoms) - 1

    bottom = 0

    def __eq__(self, other):
        return isinstance(other, SetBooleanAlgebra) and self.atom_of == other.atom_of

    def __hash__(self):
        return hash(self.atom_of)

    def __repr__(self):
        return f"SetBooleanAlgebra({self.universe}, {[list(a) for a in self.atoms]})"

    def element_of(self, subset):
        """Bitset of ``subset``; raises NotInAlgebra unless it is a union of atoms."""
        subset = set(subset)
        bits = 0
        for p in subset:
            bits |= 1 << self.atom_of[p]
        if sum(len(self.atoms[i]) for i in range(self.n_atoms) if bits >> i & 1) != len(subset):
            raise NotInAlgebra(f"{sorted(subset)} is not a union of atoms")
        return bits

    def contains(self, subset):
        try:
            self.element_of(subset)
            return True
        except NotInAlgebra:
            return False

    def points(self, bits):
        return frozenset(p for i, a in enumerate(self.atoms) if bits >> i & 1 for p in a)

    def elements(self):
        return range(1 << self.n_atoms)

    def complement(self, bits):
        return self.top & ~bits

    def is_subalgebra_of(self, other):
        return self.universe == other.universe and refines(other.atom_of, self.atom_of)

    def to_json(self):
        return {"universe": self.universe, "atoms": [list(a) for a in self.atoms]}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(obj["universe"], obj["atoms"])
        except (KeyError, TypeError) as exc:
            raise InvalidAlgebra(f"malformed Boolean algebra JSON: {exc}") from None


def read_boolean_algebra(path):
    with open(path, encoding="utf-8") as fh:
        return SetBooleanAlgebra.from_json(json.load(fh))


def powerset_algebra(m):
    return SetBooleanAlgebra(m, [[p] for p in range(m)])


def trivial_algebra(m):
    return SetBooleanAlgebra(m, [range(m)])


def generate_boolean_algebra(universe, generators):
    """Least Boolean algebra containing the generators: atoms are the
    nonempty sign-pattern intersections."""
    gens = [set(g) for g in generators]
    for g in gens:
        if any(not 0 <= p < universe for p in g):
            raise InvalidAlgebra("generator leaves the universe")
    return SetBooleanAlgebra.from_labels([tuple(p in g for g in gens) for p in range(universe)])


def algebra_join(B, C):
    """Least algebra containing both (finer atom partition)."""
    return SetBooleanAlgebra.from_labels(partition_meet(B.atom_of, C.atom_of))


def algebra_meet(B, C):
    """Intersection of the two algebras (common coarsening of the atoms)."""
    return SetBooleanAlgebra.from_labels(partition_join(B.atom_of, C.atom_of))


# Tensor products and meshes

def _sizes(Bs):
    return [B.universe for B in Bs]


def encode_point(Bs, point):
    return _radix_encode(_sizes(Bs), point)


def decode_point(Bs, index):
    return _radix_decode(_sizes(Bs), index)


def tensor(Bs, max_universe=MAX_UNIVERSE):
    if not Bs:
        raise InvalidAlgebra("tensor of an empty list")
    total = 1
    for B in Bs:
        total *= B.universe
    if total > max_universe:
        raise UniverseTooLarge(f"product universe has {total} points (limit {max_universe})")
    sizes = _sizes(Bs)
    labels = [
        tuple(B.atom_of[p] for B, p in zip(Bs, _radix_decode(sizes, i))) for i in range(total)
    ]
    return SetBooleanAlgebra.from_labels(labels)


def tensor_contains(Bs, P):
    """Whether the set of tuples ``P`` is a union of products of atoms."""
    P = {tuple(p) for p in P}
    member = {}
    for point in itertools.product(*[range(B.universe) for B in Bs]):
        key = tuple(B.atom_of[p] for B, p in zip(Bs, point))
        if member.setdefault(key, point in P) != (point in P):
            return False
    return True


@dataclass(frozen=True)
class Parallelepiped:
    factors: tuple  # one frozenset per coordinate

    def points(self):
        return set(itertools.product(*[sorted(f) for f in self.factors]))


@dataclass(frozen=True)
class Mesh:
    partitions: tuple  # per coordinate: tuple of frozensets


def slice_classes(P, Bs, i):
    """Classes of the relation identifying two values of coordinate ``i``
    that have the same completions inside ``P``."""
    contexts = {s: set() for s in range(Bs[i].universe)}
    for p in P:
        contexts[p[i]].add(p[:i] + p[i + 1 :])
    return normalize(frozenset(contexts[s]) for s in range(Bs[i].universe))


def canonical_mesh(P, Bs):
    P = {tuple(p) for p in P}
    if not tensor_contains(Bs, P):
        raise NotInTensor("set is not an element of the tensor product")
    rhos = [slice_classes(P, Bs, i) for i in range(len(Bs))]
    partitions = []
    for i, rho in enumerate(rhos):
        blocks = {}
        for s, c in enumerate(rho):
            blocks.setdefault(c, set()).add(s)
        partitions.append(tuple(frozenset(blocks[c]) for c in sorted(blocks)))
    pieces = {tuple(rhos[i][p[i]] for i in range(len(Bs))) for p in P}
    decomposition = [
        Parallelepiped(tuple(partitions[i][c] for i, c in enumerate(key))) for key in sorted(pieces)
    ]
    return Mesh(tuple(partitions)), decomposition


def is_mesh_for(P, partitions):
    """Whether ``P`` is a union of parallelepipeds built from the partitions."""
    P = {tuple(p) for p in P}
    for cells in itertools.product(*partitions):
        pts = set(itertools.product(*[sorted(c) for c in cells]))
        inside = pts & P
        if inside and inside != pts:
            return False
    return True


def mesh_report(P, Bs):
    """Check disjointness and exactness of the canonical decomposition and
    that its classes lie in the coordinate algebras and are coarser than
    their atom partitions."""
    P = {tuple(p) for p in P}
    mesh, pieces = canonical_mesh(P, Bs)
    covered = [pt for piece in pieces for pt in piece.points()]
    rhos = [slice_classes(P, Bs, i) for i in range(len(Bs))]
    return {
        "disjoint": len(covered) == len(set(covered)),
        "exact": set(covered) == P,
        "classes_in_algebras": all(
            Bs[i].contains(block) for i in range(len(Bs)) for block in mesh.partitions[i]
        ),
        "atoms_refine_classes": all(refines(B.atom_of, rho) for B, rho in zip(Bs, rhos)),
    }


def mesh_factor_bitsets(mesh, Bs, pieces):
    """Each parallelepiped as a list of factor bitsets over the coordinate atoms."""
    return [[Bs[i].element_of(f) for i, f in enumerate(piece.factors)] for piece in pieces]


def family_meet(Bs):
    out = Bs[0]
    for B in Bs[1:]:
        out = algebra_meet(out, B)
    return out


def oplus_vs_cap_sides(families, P):
    """Membership of ``P`` in the intersection over j of the tensors, and in
    the tensor of the per-coordinate intersections.  ``families[i][j]``."""
    n_j = len(families[0])
    if any(len(f) != n_j or not f for f in families):
        raise InvalidAlgebra("every coordinate needs the same nonempty index set")
    left = all(tensor_contains([families[i][j] for i in range(len(families))], P) for j in range(n_j))
    right = tensor_contains([family_meet(f) for f in families], P)
    return left, right


def check_oplus_vs_cap(families, P):
    left, right = oplus_vs_cap_sides(families, P)
    return left == right


# Stone duality

@dataclass(frozen=True)
class Ultrafilter:
    atom: int

    def contains(self, bits):
        return bool(bits >> self.atom & 1)


def dual_space(B):
    return [Ultrafilter(i) for i in range(B.n_atoms)]


def basic_open(B, bits):
    return frozenset(Ultrafilter(i) for i in range(B.n_atoms) if bits >> i & 1)


def _check_over(A, B):
    if B.universe != A.size:
        raise InvalidAlgebra("Boolean algebra must live on the algebra's carrier")


def operation_preimage(A, name, subset):
    subset = set(subset)
    n = A.signature.arity(name)
    return {args for args in itertools.product(range(A.size), repeat=n) if A.apply(name, args) in subset}


def star_violations(A, B):
    """Pairs (symbol, atom) whose preimage is not in the tensor power of B."""
    _check_over(A, B)
    out = []
    for name, n in A.signature.symbols:
        if n == 0:
            continue
        for i, atom in enumerate(B.atoms):
            if not tensor_contains([B] * n, operation_preimage(A, name, atom)):
                out.append((name, i))
    return out


def star_check(A, B):
    """Preimage of every element of B under every operation lies in the
    tensor power of B.  Checking atoms suffices: preimages commute with
    unions and the tensor power is closed under unions."""
    return not star_violations(A, B)


def _image(A, name, factor_sets):
    return {A.apply(name, args) for args in itertools.product(*factor_sets)}


def ultrafilter_op(A, B, name, Us):
    """The ultrafilter generated by images of members of the ``Us``.

    Its least member is the image of the product of the atoms; it must lie
    inside one atom.
    """
    _check_over(A, B)
    img = _image(A, name, [B.atoms[U.atom] for U in Us])
    atoms = {B.atom_of[v] for v in img}
    if len(atoms) != 1:
        raise StarViolated(f"image of atoms under {name!r} meets {len(atoms)} atoms")
    return Ultrafilter(atoms.pop())


def operation_filter(A, B, name, Us):
    """``{L in B : exists L_i in U_i with name(L_1..L_n) contained in L}``,
    computed literally by scanning all witnesses."""
    members = [[e for e in B.elements() if U.contains(e)] for U in Us]
    out = set()
    for choice in itertools.product(*members):
        img = _image(A, name, [B.points(e) for e in choice])
        for L in B.elements():
            if img <= B.points(L):
                out.add(L)
    return frozenset(out)


def algebra_from_dual(A, B):
    if not star_check(A, B):
        raise StarViolated("Boolean algebra does not satisfy the continuity condition")
    us = dual_space(B)
    return FiniteAlgebra.from_function(
        A.signature, B.n_atoms, lambda name, args: ultrafilter_op(A, B, name, [us[a] for a in args]).atom
    )


def atom_projection(A, B):
    """``a -> atom containing a``; a homomorphism onto the dual algebra."""
    return Homomorphism(A, algebra_from_dual(A, B), B.atom_of)


def pulled_back_algebra(phi):
    """Preimages of all subsets of the target, as a Boolean algebra on the source."""
    return SetBooleanAlgebra.from_labels(phi.map)


def boole_stone_boole_check(A, C):
    """Dualize ``C``, then pull the powerset of the dual back along the
    canonical map; the result must be ``C`` again."""
    return pulled_back_algebra(atom_projection(A, C)) == C


def dual_of_inclusion(A, B, C):
    """For ``B`` contained in ``C``: send each C-atom to the B-atom containing it."""
    if not B.is_subalgebra_of(C):
        raise NotSubalgebra("B is not contained in C")
    DC = algebra_from_dual(A, C)
    DB = algebra_from_dual(A, B)
    return Homomorphism(DC, DB, [B.atom_of[C.atoms[j][0]] for j in range(C.n_atoms)])


def witness_terms(S, generators):
    """A shortest term for every element, built from the generating map."""
    sig = S.signature
    found = {}
    for x, s in generators.items():
        found.setdefault(s, Term(x))

    def apply(name, args):
        return S.apply(name, args)

    # breadth first over the closure, remembering one term per element
    frontier = dict(found)
    for name in sig.of_arity(0):
        v = S.apply(name, ())
        if v not in found:
            found[v] = Term(name)
            frontier[v] = found[v]
    ops = [(name, n) for name, n in sig.symbols if n > 0]
    while frontier:
        new = {}
        elems = list(found)
        for name, n in ops:
            for args in itertools.product(elems, repeat=n):
                if not any(a in frontier for a in args):
                    continue
                v = apply(name, args)
                if v not in found and v not in new:
                    new[v] = Term(name, [found[a] for a in args])
        found.update(new)
        frontier = new
    if len(found) != S.size:
        raise NotGenerating("the generating map does not generate the algebra")
    return found


def reconstruct_check(S, generators, sample_terms=()):
    """Rebuild ``S`` from the Boolean algebra of languages it recognizes.

    The languages are the preimages of subsets of ``S`` under term
    evaluation, so their atoms are indexed by elements of ``S``.  The dual
    algebra is built from atom images, the generating map sends ``x`` to the
    atom of its value, every witness term and sample term must evaluate to
    the ultrafilter of the languages containing it, and the dual must be
    isomorphic to ``S`` by an isomorphism fixing the generators.
    """
    terms = witness_terms(S, generators)
    B = SetBooleanAlgebra.from_labels([s for s in range(S.size)])
    D = algebra_from_dual(S, B)
    asg_S = dict(generators)
    asg_D = {x: B.atom_of[s] for x, s in generators.items()}
    for v in list(terms.values()) + list(sample_terms):
        if eval_term(v, D, asg_D) != B.atom_of[eval_term(v, S, asg_S)]:
            return False
    iso = find_isomorphism(D, S)
    if iso is None:
        return False
    canonical = {B.atom_of[s]: s for s in range(S.size)}
    try:
        Homomorphism(D, S, [canonical[u] for u in range(D.size)])
    except Exception:
        return False
    return True
