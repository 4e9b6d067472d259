"""Command line front end.

Exit codes: 0 success, 1 an admissible certificate failed (a bug if it ever
happens), 2 bad input or usage, 3 an annihilation witness was found.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys

import numpy as np

from . import __version__
from . import io
from .bases import (
    canonical_basis,
    dft_basis,
    random_basis,
    validate,
)
from .grams import SubsetPair, admissibility, cross_gram, mu_global
from .operators import composite_matrix, opnorm_p
from .search import SearchConfig, all_subset_pairs, enumerate_admissible, extremal_ratio_search
from .spaces import DomainError, PreconditionError, StructuralError, random_unit_vectors
from .uncertainty import VARIANTS, TheoremViolation, annihilation_test, verify

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_WITNESS = 0, 1, 2, 3

VARIANT_NAMES = {
    "fgj": "fgj",
    "swapped": "fgj_swapped",
    "local": "fgj_local",
    "swapped-local": "fgj_swapped_local",
}

CSV_FIELDS = ["variant", "n", "p", "size_M", "size_N", "mu", "constant", "min_slack"]


class InputError(Exception):
    pass


def parse_subsets(tokens, n) -> SubsetPair:
    """Parse ``M=1,3 N=2`` (1-based; ``M=`` means empty)."""
    found = {}
    for tok in tokens:
        name, sep, body = tok.partition("=")
        name = name.strip().upper()
        if not sep or name not in ("M", "N") or name in found:
            raise InputError(f"bad subset token {tok!r}; expected M=i,j,... and N=k,...")
        try:
            found[name] = [int(t) for t in body.split(",") if t.strip()]
        except ValueError:
            raise InputError(f"bad index list in {tok!r}") from None
    if set(found) != {"M", "N"}:
        raise InputError("both M=... and N=... are required")
    return SubsetPair.from_one_based(found["M"], found["N"], n)


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_pairs(args):
    pair_f = io.read_pair(args.basis_f)
    pair_g = io.read_pair(args.basis_g)
    for path, pair in ((args.basis_f, pair_f), (args.basis_g, pair_g)):
        report = validate(pair)
        if not report.valid:
            raise InputError(f"{path} is not a p-orthonormal basis ({report.violated_clause})")
    if pair_f.n != pair_g.n or pair_f.p != pair_g.p:
        raise InputError("the two bases must share n and p")
    return pair_f, pair_g


def cmd_gen(args):
    n, p = args.n, args.p
    if args.kind == "canonical":
        pair = canonical_basis(n, p)
    elif args.kind == "dft":
        pair = dft_basis(n, p)
    elif args.kind == "random-unitary":
        pair = random_basis(n, p, args.seed, args.field, structure="unitary")
    else:
        pair = random_basis(n, p, args.seed, args.field, structure="genperm")
    doc = io.pair_to_dict(pair)
    doc["manifest"] = io.manifest(
        "gen", {"kind": args.kind, "n": n, "p": p, "field": args.field}, [args.seed]
    )
    _emit(io.dumps(doc) + "\n", args.out)
    return EXIT_OK


def cmd_validate(args):
    pair = io.read_pair(args.basis)
    report = validate(pair, args.trials, args.seed)
    doc = io.validation_to_dict(report)
    doc["manifest"] = io.manifest("validate", {"trials": args.trials}, [args.seed], [pair.digest])
    _emit(io.dumps(doc) + "\n", args.out)
    return EXIT_OK if report.valid else EXIT_INPUT


def cmd_gram(args):
    pair_f, pair_g = _load_pairs(args)
    gram = cross_gram(pair_f, pair_g)
    doc = io.gram_to_dict(gram)
    doc["mu"] = mu_global(gram)
    doc["manifest"] = io.manifest("gram", {}, (), [pair_f.digest, pair_g.digest])
    _emit(io.dumps(doc) + "\n", args.out)
    return EXIT_OK


def _vectors(args, n, p, field):
    if args.file:
        doc = io.read_json(args.file)
        rows = doc.get("vectors") if isinstance(doc, dict) else doc
        if not isinstance(rows, list) or not rows:
            raise InputError("vector file must hold a nonempty list under 'vectors'")
        vecs = [io.decode_vector(v) for v in rows]
        if any(v.shape != (n,) for v in vecs):
            raise InputError(f"every vector must have {n} entries")
        return vecs
    rng = np.random.default_rng(args.seed)
    X = random_unit_vectors(n, args.random, p, rng, field)
    return [X[:, i] for i in range(X.shape[1])]


def _subset_pairs(args, pair_f, pair_g, variant):
    n = pair_f.n
    if not args.enumerate:
        if not args.subsets:
            raise InputError("give --subsets M=.. N=.. or --enumerate")
        return [parse_subsets(args.subsets, n)]
    k = min(args.max_size, n)
    swapped, local = VARIANTS[variant]
    first, second = (pair_g, pair_f) if swapped else (pair_f, pair_g)
    gram = cross_gram(first, second)
    if local:
        return [e.subsets for e in enumerate_admissible(gram, pair_f.p, k, localized=True)]
    sizes = {e.subsets.sizes for e in enumerate_admissible(gram, pair_f.p, k)}
    return [s for s in all_subset_pairs(n, k) if s.sizes in sizes]


def cmd_verify(args):
    pair_f, pair_g = _load_pairs(args)
    variant = VARIANT_NAMES[args.variant]
    field = "complex" if "complex" in (pair_f.field, pair_g.field) else "real"
    subsets_list = _subset_pairs(args, pair_f, pair_g, variant)
    vectors = _vectors(args, pair_f.n, pair_f.p, field)

    man = io.manifest(
        "verify",
        {
            "variant": variant,
            "subsets": args.subsets,
            "enumerate": args.enumerate,
            "max_size": args.max_size,
            "random": None if args.file else args.random,
            "file": args.file,
        },
        [args.seed],
        [pair_f.digest, pair_g.digest],
    )
    lines = [io.dumps({"manifest": man})]
    summary = {}
    violations = []
    for s in subsets_list:
        for x in vectors:
            c = verify(pair_f, pair_g, s, x, variant)
            lines.append(io.dumps(io.certificate_to_dict(c)))
            key = (variant, c.n, c.p, *s.sizes, c.admissibility.mu, c.constant)
            if c.admissible:
                summary[key] = min(summary.get(key, np.inf), c.slack)
            else:
                summary.setdefault(key, None)
            if c.violated:
                violations.append({"certificate": io.certificate_to_dict(c), "x": io.encode_array(x)})

    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for key in sorted(summary, key=lambda k: (k[3], k[4], k[5] is None, k[5] or 0.0)):
        writer.writerow([*key, summary[key]])
    if args.format == "csv":
        _emit(buf.getvalue(), args.out)
    else:
        _emit("\n".join(lines) + "\n", args.out)
    if args.summary:
        with open(args.summary, "w") as fh:
            fh.write(buf.getvalue())
    if violations:
        sys.stderr.write(io.dumps({"violations": violations}) + "\n")
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_annihilate(args):
    pair_f, pair_g = _load_pairs(args)
    s = parse_subsets(args.subsets, pair_f.n)
    report = annihilation_test(pair_f, pair_g, s)
    doc = io.annihilation_to_dict(report)
    doc["subsets"] = io.subsets_to_dict(s)
    doc["admissibility"] = io.admissibility_to_dict(
        admissibility(s, pair_f.p, mu_global(cross_gram(pair_f, pair_g)))
    )
    doc["manifest"] = io.manifest("annihilate", {"subsets": args.subsets}, (), [pair_f.digest, pair_g.digest])
    _emit(io.dumps(doc) + "\n", args.out)
    return EXIT_OK if report.intersection_dim == 0 else EXIT_WITNESS


def cmd_search(args):
    pair_f, pair_g = _load_pairs(args)
    s = parse_subsets(args.subsets, pair_f.n)
    config = SearchConfig(
        max_subset_size=max(1, max(s.sizes)),
        restarts=args.restarts,
        steps=args.steps,
        seed=args.seed,
        variant=VARIANT_NAMES[args.variant],
    )
    result = extremal_ratio_search(pair_f, pair_g, s, config)
    doc = io.extremal_to_dict(result)
    doc["manifest"] = io.manifest("search", doc["config"], [args.seed], [pair_f.digest, pair_g.digest])
    _emit(io.dumps(doc) + "\n", args.out)
    return EXIT_OK


def cmd_opnorm(args):
    digests = []
    if args.matrix:
        A = io.matrix_from_dict(io.read_json(args.matrix))
    elif args.pair:
        args.basis_f, args.basis_g = args.pair
        pair_f, pair_g = _load_pairs(args)
        gram = cross_gram(pair_f, pair_g)
        s = parse_subsets(args.subsets or [], pair_f.n)
        A = composite_matrix(gram, s)
        digests = [pair_f.digest, pair_g.digest]
    else:
        raise InputError("give --matrix PATH or --pair F G --subsets M=.. N=..")
    est = opnorm_p(A, args.p, restarts=args.restarts, seed=args.seed)
    doc = io.norm_estimate_to_dict(est)
    doc["p"] = float(args.p)
    doc["manifest"] = io.manifest("opnorm", {"p": args.p, "restarts": args.restarts}, [args.seed], digests)
    _emit(io.dumps(doc) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpuncertainty",
        description="p-orthonormal bases and certified uncertainty inequalities on l^p.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def two_bases(sp):
        sp.add_argument("basis_f", help="first basis pair (f, tau) JSON")
        sp.add_argument("basis_g", help="second basis pair (g, omega) JSON")

    def common(sp):
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--format", choices=["json", "csv"], default="json")

    g = sub.add_parser("gen", help="generate a basis pair")
    g.add_argument("kind", choices=["canonical", "dft", "random-unitary", "random-genperm"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, default=2.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--field", choices=["real", "complex"], default="real")
    common(g)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", help="check that a file holds a p-orthonormal basis")
    v.add_argument("basis")
    v.add_argument("--trials", type=int, default=64)
    v.add_argument("--seed", type=int, default=0)
    common(v)
    v.set_defaults(func=cmd_validate)

    gr = sub.add_parser("gram", help="cross-Gram matrix [g_k(tau_j)]")
    two_bases(gr)
    common(gr)
    gr.set_defaults(func=cmd_gram)

    ver = sub.add_parser("verify", help="emit uncertainty certificates")
    two_bases(ver)
    ver.add_argument("--subsets", nargs="+", metavar="M=..|N=..")
    ver.add_argument("--enumerate", action="store_true", help="all admissible (M, N)")
    ver.add_argument("--max-size", type=int, default=2)
    src = ver.add_mutually_exclusive_group()
    src.add_argument("--random", type=int, default=100, metavar="K")
    src.add_argument("--file", help="JSON file with a 'vectors' list")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--variant", choices=list(VARIANT_NAMES), default="fgj")
    ver.add_argument("--summary", help="also write the CSV summary here")
    common(ver)
    ver.set_defaults(func=cmd_verify)

    an = sub.add_parser("annihilate", help="intersection of the two supports")
    two_bases(an)
    an.add_argument("--subsets", nargs="+", required=True, metavar="M=..|N=..")
    common(an)
    an.set_defaults(func=cmd_annihilate)

    se = sub.add_parser("search", help="extremal ratio search")
    two_bases(se)
    se.add_argument("--subsets", nargs="+", required=True, metavar="M=..|N=..")
    se.add_argument("--variant", choices=list(VARIANT_NAMES), default="fgj")
    se.add_argument("--restarts", type=int, default=32)
    se.add_argument("--steps", type=int, default=2000)
    se.add_argument("--seed", type=int, default=0)
    common(se)
    se.set_defaults(func=cmd_search)

    op = sub.add_parser("opnorm", help="certified p->p operator norm interval")
    op.add_argument("--matrix", help="matrix JSON (as written by 'gram')")
    op.add_argument("--pair", nargs=2, metavar=("F", "G"), help="use P_N V P_M of two bases")
    op.add_argument("--subsets", nargs="+", metavar="M=..|N=..")
    op.add_argument("--p", type=float, default=2.0)
    op.add_argument("--restarts", type=int, default=8)
    op.add_argument("--seed", type=int, default=0)
    common(op)
    op.set_defaults(func=cmd_opnorm)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TheoremViolation as e:
        sys.stderr.write(f"error: {e}\n{io.dumps({'reproduction': str(e.data)})}\n")
        return EXIT_VIOLATION
    except (InputError, io.SchemaError, DomainError, StructuralError, PreconditionError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
