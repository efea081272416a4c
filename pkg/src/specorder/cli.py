"""Command-line interface: ``specorder {gen,order,eval,bench,spectra}``.

Exit status is 0 on success, 2 on usage errors (bad flags or parameter
values) and 3 on data errors (unreadable files, disconnected inputs, ...).
"""
import argparse
import sys

import numpy as np

from . import bench, io, theory
from .errors import (
    DimensionMismatch,
    InvalidDimension,
    InvalidParameter,
    MergeIncomplete,
    NotConnected,
    SeriationError,
)
from .linalg import LaplacianMode, Scaling, eigh
from .matgen import (
    GENERATORS,
    NoiseSpec,
    add_noise,
    generate,
    inverse_permutation,
    permute_matrix,
    random_permutation,
)
from .mdso import MdsoParams, mdso_order, merge_components
from .metrics import circular_kendall_tau, kendall_tau, linear_score
from .seriation import circular_order, spectral_order

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 2, 3


class UsageError(Exception):
    pass


def _fail(code, message):
    print("specorder: error: %s" % message, file=sys.stderr)
    return code


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers, got %r" % text) from None


def _scaling(text):
    try:
        return Scaling.parse(text)
    except InvalidParameter as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# --------------------------------------------------------------------------
# commands


def cmd_gen(args):
    perm_ss, noise_ss = bench.trial_seeds(args.seed)
    A = generate(args.kind, args.n, args.param)
    A = add_noise(A, NoiseSpec(args.noise, noise_ss))
    p = random_permutation(args.n, perm_ss) if not args.no_permute else np.arange(args.n)
    io.save_matrix(permute_matrix(A, p), args.out, args.format)
    if args.perm_out:
        io.save_permutation(inverse_permutation(p), args.perm_out)
    return EXIT_OK


def _order_components(A, comps, args):
    pieces = []
    for comp in comps:
        if comp.size <= 2:
            pieces.append(comp)
            continue
        sub = A[np.ix_(comp, comp)]
        pieces.append(comp[_order_connected(sub, args)])
    merged = merge_components(pieces, A, args.merge_h)
    if len(merged) > 1:
        print("specorder: warning: %d components share no similarity; "
              "writing their orderings one after another" % len(merged), file=sys.stderr)
    return np.concatenate(merged)


def _order_connected(A, args):
    laplacian = LaplacianMode(args.laplacian) if args.laplacian else None
    if args.method == "baseline":
        if args.kind == "circular":
            return circular_order(A, laplacian=laplacian or LaplacianMode.RANDOM_WALK)
        return spectral_order(A, laplacian=laplacian or LaplacianMode.UNNORMALIZED)
    params = MdsoParams(
        k=args.k, d=min(args.d, A.shape[0] - 1), scaling=args.scaling, kind=args.kind,
        update=args.update, laplacian=laplacian or LaplacianMode.RANDOM_WALK,
        coifman=args.coifman, merge_h=args.merge_h,
    )
    try:
        return mdso_order(A, params)
    except MergeIncomplete as exc:
        print("specorder: warning: rebuilt similarity left %d unmerged pieces; "
              "writing them one after another" % len(exc.partition), file=sys.stderr)
        return np.concatenate([np.asarray(c, dtype=np.int64) for c in exc.partition])


def cmd_order(args):
    A = io.load_matrix(args.input, args.format)
    try:
        order = _order_connected(A, args)
    except NotConnected as exc:
        if not args.merge:
            lines = ["input similarity graph has %d connected components "
                     "(use --merge to order them separately):" % exc.n_components]
            for i, comp in enumerate(exc.components):
                lines.append("  component %d (%d items): %s" % (i, len(comp), _brief(comp)))
            return _fail(EXIT_DATA, "\n".join(lines))
        comps = [np.asarray(c, dtype=np.int64) for c in exc.components]
        order = _order_components(A, comps, args)
    if args.out:
        io.save_permutation(order, args.out)
    else:
        sys.stdout.write("".join("%d\n" % i for i in order))
    return EXIT_OK


def _brief(items, limit=20):
    text = " ".join(str(i) for i in items[:limit])
    return text + (" ..." if len(items) > limit else "")


def cmd_eval(args):
    p = io.load_permutation(args.ordering)
    q = io.load_permutation(args.truth)
    if p.size != q.size:
        return _fail(EXIT_USAGE, "orderings have lengths %d and %d" % (p.size, q.size))
    if args.circular:
        score = circular_kendall_tau(p, q, reversal=not args.strict)
    elif args.signed:
        score = kendall_tau(p, q)
    else:
        score = linear_score(p, q)
    print(repr(float(score)))
    return EXIT_OK


def cmd_bench(args):
    with open(args.config, "r", encoding="utf-8") as fh:
        config = bench.parse_config(fh.read())
    workers = args.workers if args.workers is not None else bench.worker_count()
    rows = bench.run_sweep(config, workers=workers)
    io.write_results(rows, args.out)
    spread = "sem" if args.sem else "std"
    print("%-8s %4s %3s %-12s %6s %10s %10s %6s" % (
        "method", "k", "d", "scaling", "noise", "mean", spread, "failed"))
    for s in bench.summarize(rows, sem=args.sem):
        print("%-8s %4d %3d %-12s %6g %10.6f %10.6f %6d" % (
            s.method, s.k, s.d, s.scaling, s.noise, s.mean, s.spread, s.failures))
    return EXIT_OK


def cmd_spectra(args):
    if args.kind == "circulant":
        if args.b is None or args.n is None:
            raise UsageError("circulant needs --b and --n")
        spec = theory.circulant_spectrum(args.b, args.n)
        print("m,eigenvalue,multiplicity")
        for m, (nu, mult) in enumerate(zip(spec.eigenvalues, spec.multiplicities)):
            print("%d,%.17g,%d" % (m, nu, mult))
        if args.check:
            idx = np.arange(args.n)
            gap = np.abs(idx[:, None] - idx[None, :])
            C = np.asarray(args.b, dtype=np.float64)[np.minimum(gap, args.n - gap)]
            err = np.abs(np.sort(eigh(C)[0]) - spec.all_eigenvalues()).max()
            print("# max |closed form - dense solver| = %.3g" % err)
        return EXIT_OK
    if args.kind == "tridiag":
        if args.b0 is None or args.b1 is None or args.n is None:
            raise UsageError("tridiag needs --b0, --b1 and --n")
        spec = theory.tridiag_toeplitz_spectrum(args.b0, args.b1, args.n)
        print("m,eigenvalue")
        for m, nu in enumerate(spec.eigenvalues, 1):
            print("%d,%.17g" % (m, nu))
        if args.check:
            T = (np.diag(np.full(args.n, args.b0)) + np.diag(np.full(args.n - 1, args.b1), 1)
                 + np.diag(np.full(args.n - 1, args.b1), -1))
            err = np.abs(eigh(T)[0] - np.sort(spec.eigenvalues)).max()
            print("# max |closed form - dense solver| = %.3g" % err)
        return EXIT_OK
    if args.rho is None or args.n is None:
        raise UsageError("kms needs --rho and --n")
    table = theory.kms_theta_recover(args.rho, args.n)
    header = "m,eigenvalue,lower,theta,upper"
    print(header + (",vector_angle" if args.check else ""))
    for m, nu, lo, th, hi, ang in table.rows():
        line = "%d,%.17g,%.17g,%.17g,%.17g" % (m, nu, lo, th, hi)
        print(line + (",%.3g" % ang if args.check else ""))
    if args.check:
        worst = float(table.vector_angles.max())
        print("# all theta inside their intervals; max eigenvector angle = %.3g" % worst)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="specorder",
        description="Spectral seriation: recover linear or circular orderings from similarities.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    fmt_help = "matrix file format (default: from extension, .coo/.txt -> coo, else dense)"

    p = sub.add_parser("gen", help="generate a permuted noisy test matrix")
    p.add_argument("--kind", required=True, choices=sorted(GENERATORS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--param", type=float, required=True, help="band width c or decay alpha")
    p.add_argument("--noise", type=float, default=0.0, help="noise amplitude a (default 0)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--perm-out", help="where to write the ground-truth ordering")
    p.add_argument("--no-permute", action="store_true", help="keep the generated order")
    p.add_argument("--format", choices=io.FORMATS, help=fmt_help)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("order", help="order the items of a similarity matrix")
    p.add_argument("input")
    p.add_argument("--out", help="output permutation file (default: standard output)")
    p.add_argument("--format", choices=io.FORMATS, help=fmt_help)
    p.add_argument("--method", choices=("baseline", "mdso"), default="mdso")
    p.add_argument("--kind", choices=("linear", "circular"), default="linear")
    p.add_argument("--k", type=int, default=10, help="neighbourhood size (default 10)")
    p.add_argument("--d", type=int, default=10, help="embedding dimension (default 10)")
    p.add_argument("--scaling", type=_scaling, default=Scaling("heuristic"),
                   help="none, ctd, heuristic or diffusion:t (default heuristic)")
    p.add_argument("--laplacian", choices=[m.value for m in LaplacianMode],
                   help="Laplacian normalization (default depends on the method)")
    p.add_argument("--update", default="neg_distance_offset",
                   choices=("inverse_distance", "exp_neg_distance", "neg_distance_shifted",
                            "neg_distance_offset"))
    p.add_argument("--coifman", action="store_true", help="apply D^-1 A D^-1 before embedding")
    p.add_argument("--merge", action="store_true",
                   help="order a disconnected input per component and merge the pieces")
    p.add_argument("--merge-h", type=int, help="items per sequence end used when merging")
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("eval", help="score an ordering against a reference")
    p.add_argument("ordering")
    p.add_argument("truth")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--circular", action="store_true", help="shift-invariant score")
    g.add_argument("--signed", action="store_true", help="plain Kendall-Tau, direction matters")
    p.add_argument("--strict", action="store_true",
                   help="with --circular, scan shifts only (no reversal)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="run a noise sweep from a key=value config file")
    p.add_argument("config")
    p.add_argument("--out", required=True, help="results CSV")
    p.add_argument("--sem", action="store_true", help="report std/sqrt(trials) instead of std")
    p.add_argument("--workers", type=int, help="worker processes (default: MDSO_THREADS or CPU count)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("spectra", help="print closed-form spectra")
    p.add_argument("--kind", required=True, choices=("circulant", "tridiag", "kms"))
    p.add_argument("--n", type=int)
    p.add_argument("--b", type=_float_list, help="circulant coefficients b_0..b_{n//2}")
    p.add_argument("--b0", type=float)
    p.add_argument("--b1", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--check", action="store_true", help="cross-check against the dense solver")
    p.set_defaults(func=cmd_spectra)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        return _fail(EXIT_USAGE, str(exc))
    except (InvalidParameter, InvalidDimension, DimensionMismatch) as exc:
        return _fail(EXIT_USAGE, str(exc))
    except (SeriationError, OSError) as exc:
        return _fail(EXIT_DATA, str(exc))


if __name__ == "__main__":
    sys.exit(main())
