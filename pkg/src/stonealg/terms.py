"""Signatures, terms, shapes and the Polish-notation codec.

Terms are immutable trees.  All traversals are iterative so that very deep
terms (up to ``MAX_NODES`` nodes) never hit the interpreter recursion limit.
"""
import json
import random
import re
from dataclasses import dataclass

from .errors import (
    SignatureError,
    TermTooLarge,
    TrailingTokens,
    UnassignedVariable,
    Underflow,
    UnknownToken,
    ParseError,
)

MAX_NODES = 10**6

_TOKEN_RE = re.compile(r"^[^\s(),=]+$")


def _check_token(name):
    if not isinstance(name, str) or not _TOKEN_RE.match(name):
        raise SignatureError(f"invalid token {name!r}")


class Signature:
    """A finite set of operation symbols, each with an arity."""

    def __init__(self, symbols):
        if isinstance(symbols, dict):
            symbols = symbols.items()
        pairs = []
        arity = {}
        for name, n in symbols:
            _check_token(name)
            if not isinstance(n, int) or n < 0:
                raise SignatureError(f"bad arity {n!r} for symbol {name!r}")
            if name in arity:
                raise SignatureError(f"duplicate symbol {name!r}")
            arity[name] = n
            pairs.append((name, n))
        self.symbols = tuple(pairs)
        self._arity = arity

    def arity(self, name):
        try:
            return self._arity[name]
        except KeyError:
            raise SignatureError(f"unknown symbol {name!r}") from None

    def __contains__(self, name):
        return name in self._arity

    def __iter__(self):
        return iter(self._arity)

    def __len__(self):
        return len(self.symbols)

    def __eq__(self, other):
        return isinstance(other, Signature) and self._arity == other._arity

    def __hash__(self):
        return hash(frozenset(self._arity.items()))

    def __repr__(self):
        return "Signature(" + ", ".join(f"{s}/{n}" for s, n in self.symbols) + ")"

    def names(self):
        return [s for s, _ in self.symbols]

    def of_arity(self, n):
        return [s for s, m in self.symbols if m == n]

    @property
    def max_arity(self):
        return max((n for _, n in self.symbols), default=0)

    def to_json(self):
        return {"symbols": [{"name": s, "arity": n} for s, n in self.symbols]}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls([(d["name"], d["arity"]) for d in obj["symbols"]])
        except (KeyError, TypeError) as exc:
            raise SignatureError(f"malformed signature JSON: {exc}") from None


def read_signature(path):
    with open(path, encoding="utf-8") as fh:
        return Signature.from_json(json.load(fh))


class VariableSet:
    def __init__(self, names, signature=None):
        names = tuple(names)
        for x in names:
            _check_token(x)
        if len(set(names)) != len(names):
            raise SignatureError("duplicate variable name")
        if signature is not None:
            clash = [x for x in names if x in signature]
            if clash:
                raise SignatureError(f"variables clash with symbols: {clash}")
        self.names = names
        self._set = frozenset(names)

    def __contains__(self, x):
        return x in self._set

    def __iter__(self):
        return iter(self.names)

    def __len__(self):
        return len(self.names)

    def __repr__(self):
        return f"VariableSet({list(self.names)})"


class Term:
    """A finite ordered labelled tree.

    ``label`` is a variable or symbol name.  Whether a leaf is a variable or a
    nullary symbol is decided by the signature it is read against.
    """

    __slots__ = ("label", "children", "size", "_hash")

    def __init__(self, label, children=()):
        children = tuple(children)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "size", 1 + sum(c.size for c in children))
        object.__setattr__(self, "_hash", hash((label, tuple(c._hash for c in children))))

    def __setattr__(self, name, value):
        raise AttributeError("Term is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        if self._hash != other._hash or self.size != other.size:
            return False
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if a.label != b.label or len(a.children) != len(b.children):
                return False
            stack.extend(zip(a.children, b.children))
        return True

    def __repr__(self):
        return f"Term({format_term(self)!r})"

    def __str__(self):
        return format_term(self)

    @property
    def is_leaf(self):
        return not self.children


def var(name):
    return Term(name)


def op(name, *children):
    return Term(name, children)


def _preorder(t):
    stack = [t]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def _postorder(t):
    stack = [(t, False)]
    while stack:
        node, done = stack.pop()
        if done or not node.children:
            yield node
        else:
            stack.append((node, True))
            stack.extend((c, False) for c in reversed(node.children))


def format_term(t):
    """Functional notation, e.g. ``u(v(x1,u(x2,x1),x3),u(x3,x2))``."""
    out = []
    stack = [t]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        out.append(item.label)
        if item.children:
            out.append("(")
            stack.append(")")
            for i, c in enumerate(reversed(item.children)):
                stack.append(c)
                if i < len(item.children) - 1:
                    stack.append(",")
    return "".join(out)


def check_term(t, signature, variables=None):
    """Raise SignatureError unless ``t`` is well formed over the signature."""
    for node in _preorder(t):
        if node.label in signature:
            if signature.arity(node.label) != len(node.children):
                raise SignatureError(
                    f"symbol {node.label!r} has arity {signature.arity(node.label)},"
                    f" got {len(node.children)} children"
                )
        elif node.children:
            raise SignatureError(f"unknown symbol {node.label!r}")
        elif variables is not None and node.label not in variables:
            raise SignatureError(f"unknown variable {node.label!r}")


# Polish notation

def to_polish(t):
    return [node.label for node in _preorder(t)]


def polish_string(t):
    return " ".join(to_polish(t))


def parse_polish(word, signature, variables=None, max_nodes=MAX_NODES):
    """Rebuild the unique term whose preorder labelling is ``word``.

    ``word`` is a whitespace separated string or a token sequence.  With
    ``variables=None`` every token that is not a symbol is read as a variable.
    """
    tokens = word.split() if isinstance(word, str) else list(word)
    if not tokens:
        raise Underflow("empty word")
    if len(tokens) > max_nodes:
        raise TermTooLarge(f"{len(tokens)} tokens exceed the limit of {max_nodes}")
    # each frame: [label, arity, collected children]
    stack = []
    for pos, tok in enumerate(tokens):
        if tok in signature:
            n = signature.arity(tok)
        elif variables is None or tok in variables:
            _check_token(tok)
            n = 0
        else:
            raise UnknownToken(f"unknown token {tok!r} at position {pos}")
        if n:
            stack.append((tok, n, []))
            continue
        node = Term(tok)
        while True:
            if not stack:
                if pos != len(tokens) - 1:
                    raise TrailingTokens(
                        f"complete term ends at position {pos}; "
                        f"{len(tokens) - pos - 1} tokens remain"
                    )
                return node
            label, n, kids = stack[-1]
            kids.append(node)
            if len(kids) < n:
                break
            stack.pop()
            node = Term(label, kids)
    missing = sum(n - len(kids) for _, n, kids in stack)
    raise Underflow(f"word ends with {missing} argument(s) still missing")


def parse_term(text, signature, variables=None):
    """Parse functional notation such as ``u(x,v(y,y,c))``."""
    toks = re.findall(r"[(),]|[^\s(),]+", text)
    if not toks:
        raise ParseError("empty term")
    pos = 0
    # frames: [label, children]
    stack = []
    result = None

    def leaf_ok(name):
        if name in signature:
            if signature.arity(name) != 0:
                raise ParseError(f"symbol {name!r} needs arguments")
        elif variables is not None and name not in variables:
            raise UnknownToken(f"unknown token {name!r}")

    while pos < len(toks):
        tok = toks[pos]
        if tok in "(),":
            raise ParseError(f"unexpected {tok!r} at token {pos}")
        if pos + 1 < len(toks) and toks[pos + 1] == "(":
            if tok not in signature:
                raise UnknownToken(f"unknown symbol {tok!r}")
            stack.append((tok, []))
            pos += 2
            continue
        leaf_ok(tok)
        node = Term(tok)
        pos += 1
        while True:
            if not stack:
                result = node
                break
            label, kids = stack[-1]
            kids.append(node)
            if pos < len(toks) and toks[pos] == ",":
                pos += 1
                break
            if pos < len(toks) and toks[pos] == ")":
                pos += 1
                stack.pop()
                if len(kids) != signature.arity(label):
                    raise ParseError(f"{label!r} expects {signature.arity(label)} arguments")
                node = Term(label, kids)
                continue
            raise ParseError(f"expected ',' or ')' at token {pos}")
        if result is not None:
            break
    if result is None:
        raise Underflow("unterminated term")
    if pos != len(toks):
        raise TrailingTokens(f"unexpected trailing input at token {pos}")
    return result


def read_terms_file(path, signature, variables=None):
    """One Polish word per non-blank line."""
    with open(path, encoding="utf-8") as fh:
        return [parse_polish(line, signature, variables) for line in fh if line.strip()]


# Shapes

@dataclass(frozen=True)
class Shape:
    """Unlabelled skeleton, stored as the preorder sequence of child counts."""

    counts: tuple

    def __len__(self):
        return len(self.counts)


def shape_of(t):
    return Shape(tuple(len(node.children) for node in _preorder(t)))


def same_shape(s, t):
    return shape_of(s) == shape_of(t)


def occurrences(t, x):
    return sum(1 for node in _preorder(t) if not node.children and node.label == x)


def is_linear_in(t, x):
    return occurrences(t, x) == 1


def labels(t):
    return [node.label for node in _preorder(t)]


def variables_of(t, signature):
    """Variables of ``t`` in order of first occurrence."""
    seen = {}
    for node in _preorder(t):
        if not node.children and node.label not in signature:
            seen.setdefault(node.label, None)
    return list(seen)


def symbols_of(t, signature):
    return {node.label for node in _preorder(t) if node.label in signature}


def depth(t):
    d = {}
    for node in _postorder(t):
        d[id(node)] = 1 + max((d[id(c)] for c in node.children), default=0)
    return d[id(t)]


def subterms(t):
    """Distinct subterms, children before parents."""
    seen = {}
    for node in _postorder(t):
        seen.setdefault(node, None)
    return list(seen)


def eval_term(t, algebra, assignment):
    """Evaluate ``t`` in a finite algebra under a variable assignment."""
    sig = algebra.signature
    vals = []
    for node in _postorder(t):
        label = node.label
        if label in sig:
            k = len(node.children)
            if k:
                args = vals[-k:]
                del vals[-k:]
            else:
                args = ()
            vals.append(algebra.apply(label, args))
        else:
            try:
                vals.append(assignment[label])
            except KeyError:
                raise UnassignedVariable(f"no value for variable {label!r}") from None
    return vals[0]


def substitute(t, x, s, max_nodes=MAX_NODES):
    """Replace every leaf labelled ``x`` by ``s``."""
    return substitute_many(t, {x: s}, max_nodes)


def substitute_many(t, mapping, max_nodes=MAX_NODES):
    new_size = sum(
        mapping[node.label].size if (not node.children and node.label in mapping) else 1
        for node in _preorder(t)
    )
    if new_size > max_nodes:
        raise TermTooLarge(f"substitution would produce {new_size} nodes")
    vals = []
    for node in _postorder(t):
        k = len(node.children)
        if k:
            args = vals[-k:]
            del vals[-k:]
            vals.append(Term(node.label, args))
        else:
            vals.append(mapping.get(node.label, node))
    return vals[0]


def random_term(signature, variables, max_depth, rng=None, leaf_prob=0.3):
    """Random term of depth at most ``max_depth`` (used by tests and demos)."""
    rng = rng or random.Random()
    leaves = list(variables) + signature.of_arity(0)
    inner = [s for s, n in signature.symbols if n > 0]
    if not leaves:
        raise SignatureError("no variables or constants to build leaves from")

    def build(d):
        if d <= 1 or not inner or rng.random() < leaf_prob:
            return Term(rng.choice(leaves))
        f = rng.choice(inner)
        return Term(f, [build(d - 1) for _ in range(signature.arity(f))])

    return build(max_depth)
