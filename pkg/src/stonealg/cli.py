"""Command-line front end.

Exit codes: 0 success, 1 domain error (the error class name is printed),
2 usage error.
"""
import argparse
import json
import random
import sys

from . import boolean, counterexamples, variety
from .algebra import Congruence, quotient, read_algebra
from .errors import DomainError, InvalidAlgebra, ParseError
from .syntactic import syntactic_congruence, translation_monoid
from .terms import (
    _check_token,
    _postorder,
    eval_term,
    format_term,
    parse_polish,
    parse_term,
    polish_string,
    read_signature,
)

SCHEMAS = """\
file formats:
  signature   {"symbols": [{"name": str, "arity": int}, ...]}
  algebra     {"signature": <signature>, "size": int,
               "tables": {symbol: nested row-major array}}
  congruence  {"classOf": [int, ...]}
  boolean     {"universe": int, "atoms": [[int, ...], ...]}
  recognizer  {"algebra": <algebra>, "assignment": {var: int},
               "accepting": [int, ...]}
  terms       one Polish word per line, whitespace separated tokens
  identities  one identity per line: two Polish words separated by "="
  reports     {"case", "parameters", "instances_checked", "violations"}

exit codes: 0 success, 1 domain error, 2 usage error
"""


class UsageError(Exception):
    pass


def _int_list(text):
    text = text.strip()
    if not text:
        return []
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _assignment(pairs):
    asg = {}
    for item in pairs or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--assign expects NAME=VALUE, got {item!r}")
        try:
            asg[name] = int(value)
        except ValueError:
            raise UsageError(f"--assign value must be an integer, got {item!r}") from None
    return asg


def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None


def _load_congruence(A, path=None, classes=None):
    if classes is not None:
        return Congruence(A, classes)
    if path is None:
        raise UsageError("a congruence is required (file or --classes)")
    return Congruence.from_json(A, _load_json(path))


def _tree_lines(t):
    lines = []
    stack = [(t, "", "")]
    while stack:
        node, prefix, child_prefix = stack.pop()
        lines.append(prefix + node.label)
        kids = node.children
        for i in range(len(kids) - 1, -1, -1):
            last = i == len(kids) - 1
            stack.append(
                (
                    kids[i],
                    child_prefix + ("└── " if last else "├── "),
                    child_prefix + ("    " if last else "│   "),
                )
            )
    return lines


def _tree_json(t):
    # children are built before parents so deep terms do not recurse
    built = {}
    for node in _postorder(t):
        built[id(node)] = {"label": node.label, "children": [built[id(c)] for c in node.children]}
    return built[id(t)]


# subcommands return (json_payload, text)

def cmd_parse(args):
    sig = read_signature(args.signature)
    t = parse_polish(" ".join(args.word), sig)
    return (
        {"term": format_term(t), "polish": polish_string(t), "tree": _tree_json(t)},
        "\n".join(_tree_lines(t)),
    )


def cmd_print(args):
    sig = read_signature(args.signature)
    t = parse_term(" ".join(args.term), sig)
    return {"polish": polish_string(t), "term": format_term(t)}, polish_string(t)


def cmd_eval(args):
    A = read_algebra(args.algebra)
    t = parse_polish(" ".join(args.word), A.signature)
    v = eval_term(t, A, _assignment(args.assign))
    return {"value": v}, str(v)


def cmd_synt_congr(args):
    A = read_algebra(args.algebra)
    if any(not 0 <= a < A.size for a in args.subset):
        raise InvalidAlgebra("subset leaves the carrier")
    sigma = syntactic_congruence(A, args.subset)
    blocks = sigma.blocks()
    return sigma.to_json(), " | ".join(" ".join(map(str, b)) for b in blocks)


def cmd_translations(args):
    A = read_algebra(args.algebra)
    out = []
    for f in translation_monoid(A):
        term, params = f.witness
        out.append({"map": list(f.map), "witness": polish_string(term), "parameters": dict(params)})
    text = "\n".join(
        f"{m['map']}  {m['witness']}  {m['parameters']}" for m in out
    ) + f"\n{len(out)} translations"
    return {"translations": out}, text


def cmd_quotient(args):
    A = read_algebra(args.algebra)
    theta = _load_congruence(A, args.congruence, args.classes)
    Q, proj = quotient(A, theta)
    payload = {"algebra": Q.to_json(), "projection": list(proj.map)}
    return payload, f"quotient of size {Q.size}; projection {list(proj.map)}"


def cmd_free_algebra(args):
    gens = [read_algebra(p) for p in args.algebra]
    xs = [x for x in args.vars.split(",") if x]
    for x in xs:
        _check_token(x)
    res = variety.free_algebra(gens, xs, max_ambient=args.max_ambient)
    payload = {
        "algebra": res.algebra.to_json(),
        "generators": res.generators,
        "components": [{"algebra": i, "assignment": a} for i, a in res.components],
    }
    return payload, f"free algebra of size {res.algebra.size}; generators {res.generators}"


def cmd_check_identity(args):
    A = read_algebra(args.algebra)
    ids = []
    if args.identities:
        ids.extend(variety.read_identities(args.identities, A.signature))
    for line in args.identity or []:
        ids.append(variety.parse_identity(line, A.signature))
    if not ids:
        raise UsageError("give --identity or --identities")
    results = [
        {"identity": f"{polish_string(e.lhs)} = {polish_string(e.rhs)}", "satisfied": variety.satisfies(A, e)}
        for e in ids
    ]
    text = "\n".join(f"{'yes' if r['satisfied'] else 'no '}  {r['identity']}" for r in results)
    return {"results": results, "all": all(r["satisfied"] for r in results)}, text


def cmd_sigma(args):
    sig = read_signature(args.signature)
    base = parse_polish(args.base, sig)
    other = parse_polish(args.other, sig) if args.other else base
    cfg = variety.separating_config(base, other, sig, random.Random(args.seed))
    S = variety.sigma_algebra(cfg)
    images = {}
    for w in [args.base] + ([args.other] if args.other else []) + (args.term or []):
        t = parse_polish(w, sig)
        images[polish_string(t)] = str(S.label(S.evaluate(t)))
    payload = {
        "elements": [str(S.label(a)) for a in range(S.algebra.size)],
        "algebra": S.algebra.to_json(),
        "images": images,
    }
    text = "\n".join(f"{k}  ->  {v}" for k, v in images.items())
    return payload, f"{S.algebra.size} elements\n{text}"


def _parse_points(text):
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if chunk:
            try:
                points.append(tuple(_int_list(chunk)))
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"--points: {exc}") from None
    return points


def cmd_mesh(args):
    Bs = [boolean.read_boolean_algebra(p) for p in args.boolean]
    if args.points_file:
        P = [tuple(p) for p in _load_json(args.points_file)]
    else:
        P = _parse_points(args.points or "")
    if any(len(p) != len(Bs) for p in P):
        raise InvalidAlgebra("every point needs one coordinate per algebra")
    mesh, pieces = boolean.canonical_mesh(P, Bs)
    bits = boolean.mesh_factor_bitsets(mesh, Bs, pieces)
    payload = {
        "partitions": [[sorted(b) for b in part] for part in mesh.partitions],
        "pieces": bits,
    }
    text = "\n".join(
        " x ".join("{" + ",".join(map(str, sorted(f))) + "}" for f in piece.factors) for piece in pieces
    ) or "(empty)"
    return payload, text


def cmd_dual(args):
    B = boolean.read_boolean_algebra(args.boolean)
    payload = {"ultrafilters": [{"atom": u.atom, "points": list(B.atoms[u.atom])} for u in boolean.dual_space(B)]}
    text = f"{B.n_atoms} ultrafilters"
    if args.algebra:
        A = read_algebra(args.algebra)
        D = boolean.algebra_from_dual(A, B)
        payload["algebra"] = D.to_json()
        text += f"; dual algebra of size {D.size}"
    return payload, text


def cmd_star_check(args):
    A = read_algebra(args.algebra)
    B = boolean.read_boolean_algebra(args.boolean)
    bad = boolean.star_violations(A, B)
    payload = {"star": not bad, "violations": [{"symbol": s, "atom": i} for s, i in bad]}
    return payload, "holds" if not bad else f"fails for {len(bad)} (symbol, atom) pairs"


def cmd_pushout(args):
    S = read_algebra(args.algebra)
    theta = _load_congruence(S, args.theta, args.theta_classes)
    rho = _load_congruence(S, args.rho, args.rho_classes)
    T, phi = quotient(S, theta)
    U, psi = quotient(S, rho)
    Q, delta, eps, join = variety.pushout_quotient(phi, psi)
    payload = {
        "algebra": Q.to_json(),
        "join": join.to_json(),
        "delta": list(delta.map),
        "epsilon": list(eps.map),
    }
    return payload, f"pushout of size {Q.size}; delta {list(delta.map)}; epsilon {list(eps.map)}"


def _report_text(rep):
    n = len(rep["violations"])
    return f"{rep['case']}: {rep['instances_checked']} instances checked, {n} violations"


def cmd_demo(args):
    if args.case == "not-faithful":
        ns = args.n or [2, 3]
        reps = [counterexamples.run_not_faithful(n, range(1, args.max_k + 1), args.max_monoid) for n in ns]
        rep = counterexamples.report(
            "not-faithful",
            {"n": ns, "max_k": args.max_k, "max_monoid": args.max_monoid},
            sum(r["instances_checked"] for r in reps),
            [v for r in reps for v in r["violations"]],
        )
        return rep, _report_text(rep)
    if args.case == "non-profinite":
        rep = counterexamples.nonprofinite_check(args.max_size or 3, samples=args.samples, seed=args.seed)
        text = _report_text(rep) + f"; {rep['homomorphisms_found']} convergent homomorphisms, none separating"
        if rep["violations"]:
            text = _report_text(rep)
        return rep, text
    if args.case == "jonsson-tarski":
        size = args.max_size or 2
        samples = args.samples if args.samples is not None else 10_000
        rep = counterexamples.jonsson_tarski_demo(size, samples=samples, seed=args.seed)
        return rep, f"{len(rep['violations'])} nontrivial satisfiers / {rep['instances_checked']} algebras"
    rep = counterexamples.run_omega_law(
        args.max_monoid, samples=args.samples if args.samples is not None else 1000, seed=args.seed
    )
    return rep, _report_text(rep)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")

    p = argparse.ArgumentParser(
        prog="stonealg",
        description="Finite universal algebra and tree-language workbench.",
        epilog=SCHEMAS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_text):
        sp = sub.add_parser(
            name, parents=[common], help=help_text, description=help_text,
            epilog=SCHEMAS, formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        sp.set_defaults(fn=fn)
        return sp

    sp = add("parse", cmd_parse, "parse a Polish word and show its tree")
    sp.add_argument("--signature", required=True)
    sp.add_argument("word", nargs="+")

    sp = add("print", cmd_print, "print a functional-notation term in Polish notation")
    sp.add_argument("--signature", required=True)
    sp.add_argument("term", nargs="+")

    sp = add("eval", cmd_eval, "evaluate a Polish word in a finite algebra")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--assign", nargs="*", metavar="VAR=VALUE")
    sp.add_argument("word", nargs="+")

    sp = add("synt-congr", cmd_synt_congr, "syntactic congruence of a subset")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--subset", type=_int_list, default=[], help="comma separated elements")

    sp = add("translations", cmd_translations, "translation monoid with witness terms")
    sp.add_argument("--algebra", required=True)

    sp = add("quotient", cmd_quotient, "quotient by a congruence")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--congruence")
    sp.add_argument("--classes", type=_int_list)

    sp = add("free-algebra", cmd_free_algebra, "free algebra in the variety generated by algebras")
    sp.add_argument("--algebra", required=True, action="append")
    sp.add_argument("--vars", required=True, help="comma separated variable names")
    sp.add_argument("--max-ambient", type=int, default=variety.MAX_AMBIENT)

    sp = add("check-identity", cmd_check_identity, "check identities in an algebra")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--identity", action="append", help='"lhs = rhs" in Polish notation')
    sp.add_argument("--identities", help="file with one identity per line")

    sp = add("sigma", cmd_sigma, "subterm algebra of a base term")
    sp.add_argument("--signature", required=True)
    sp.add_argument("--base", required=True, help="Polish word")
    sp.add_argument("--other", help="Polish word to separate from the base")
    sp.add_argument("--term", action="append", help="extra Polish words to evaluate")

    sp = add("mesh", cmd_mesh, "canonical parallelepiped decomposition")
    sp.add_argument("--boolean", required=True, action="append", help="one per coordinate")
    sp.add_argument("--points", help='points as "0,1;1,0"')
    sp.add_argument("--points-file", help="JSON list of points")

    sp = add("dual", cmd_dual, "dual space, and dual algebra when an algebra is given")
    sp.add_argument("--boolean", required=True)
    sp.add_argument("--algebra")

    sp = add("star-check", cmd_star_check, "continuity condition for a Boolean algebra")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--boolean", required=True)

    sp = add("pushout", cmd_pushout, "pushout of two quotient maps")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--theta")
    sp.add_argument("--theta-classes", type=_int_list)
    sp.add_argument("--rho")
    sp.add_argument("--rho-classes", type=_int_list)

    sp = add("demo", cmd_demo, "counterexample demonstrations")
    sp.add_argument("case", choices=("not-faithful", "non-profinite", "jonsson-tarski", "omega-law"))
    sp.add_argument("--max-size", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--max-k", type=int, default=5)
    sp.add_argument("--max-monoid", type=int, default=3)
    sp.add_argument("--n", type=int, action="append")
    return p


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        payload, text = args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except OSError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except DomainError as exc:
        print(f"{type(exc).__name__}: {exc}", file=stderr)
        return 1
    if args.format == "json":
        print(json.dumps(payload, ensure_ascii=False), file=stdout)
    else:
        print(text, file=stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
