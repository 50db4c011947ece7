"""Command line entry point: ``blockcirc <subcommand> ...``.

Every subcommand writes a CSV (or JSON) table.  With ``--out DIR`` (or the
BLOCKCIRC_OUT environment variable) the table and a JSON manifest go to DIR;
otherwise the table goes to stdout.  ``replay`` re-runs a manifest.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical
invariant violation, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .closedform import density, wigner_density
from .core import CIRCULANT, PATTERN, TOEPLITZ, EnsembleSpec, InvariantViolation, Pattern
from .ensembles import build_matrix
from .genpattern import (
    MAX_COUNT_K,
    MAX_COUNT_N,
    fourth_moment_analytic,
    pattern_moment_pairing_count,
    simulate_pattern_moments,
)
from .moments import MAX_ENUM_K, epsilon_table, genus_histogram, limiting_moment
from .report import emit
from .spectra import central_spacings, histogram, ks_distance, pool_spacings, spectrum

_NOT_CONFIG = ("func", "out", "format")


class UsageError(ValueError):
    pass


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _spec(args) -> EnsembleSpec:
    if getattr(args, "pattern", None):
        p = Pattern.parse(args.pattern)
        return EnsembleSpec(PATTERN, args.N, p.m, pattern=p, dist=args.dist, seed=args.seed)
    return EnsembleSpec(args.kind, args.N, args.m, dist=args.dist, seed=args.seed)


def _manifest(args, **results) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
    return {"tool": "blockcirc", "version": __version__, "config": config, "results": results}


def _spectra(spec: EnsembleSpec, trials: int, threads: int, method: str = "auto"):
    """Spectra of trials 0..trials-1, always returned in trial order."""
    if trials < 1:
        raise UsageError("trials must be >= 1")

    def one(t):
        return spectrum(spec, build_matrix(spec, t), method)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(one, range(trials)))
    return [one(t) for t in range(trials)]


def _overlay_m(spec: EnsembleSpec) -> int | None:
    if spec.kind == CIRCULANT or (spec.kind == PATTERN and spec.pattern.is_all_distinct()):
        return spec.m
    return None


def cmd_simulate(args, out):
    spec = _spec(args)
    measures = _spectra(spec, args.trials, args.threads)
    centers, dens = histogram(measures, bins=args.bins, range=(args.lo, args.hi))
    fm = _overlay_m(spec)
    overlay = density(fm, centers) if fm is not None else [None] * len(centers)
    rows = zip(centers, dens, overlay, wigner_density(centers))
    moments = {n: float(np.mean([S.moment(n) for S in measures])) for n in range(1, args.k_max + 1)}
    man = _manifest(args, spec=spec.to_dict(), trials=args.trials, moments=moments)
    return emit("simulate", ["x", "density", "f_m", "f_wig"], rows, man, args.out, args.format, out)


def cmd_density(args, out):
    if any(m < 1 for m in args.m):
        raise UsageError("m must be >= 1")
    x = np.linspace(args.lo, args.hi, args.points)
    cols = [density(m, x) for m in args.m]
    rows = zip(x, *cols, wigner_density(x))
    header = ["x"] + [f"f_{m}" for m in args.m] + ["f_wig"]
    return emit("density", header, rows, _manifest(args), args.out, args.format, out)


def cmd_moments(args, out):
    rows = []
    for m in args.m:
        for k in range(1, args.k_max + 1):
            v = limiting_moment(k, m)
            rows.append((k, m, float(v), v))
    return emit("moments", ["k", "m", "moment", "exact"], rows, _manifest(args), args.out, args.format, out)


def cmd_pairings(args, out):
    if not 1 <= args.k <= MAX_ENUM_K:
        raise UsageError(f"k must be in 1..{MAX_ENUM_K}")
    hist = genus_histogram(args.k)
    eps = epsilon_table(args.k)
    if tuple(hist) != eps:
        raise InvariantViolation(f"enumeration {hist} disagrees with {eps}")
    rows = [(args.k, g, c, e) for g, (c, e) in enumerate(zip(hist, eps))]
    return emit("pairings", ["k", "g", "count", "epsilon"], rows, _manifest(args), args.out, args.format, out)


def cmd_pattern_moments(args, out):
    p = Pattern.parse(args.pattern)
    if args.N % p.m:
        raise UsageError(f"pattern length {p.m} does not divide N={args.N}")
    if args.trials < 0:
        raise UsageError("trials must be >= 0")
    sim = {}
    if args.trials:
        sim = simulate_pattern_moments(p, args.N, args.trials, args.k_max, seed=args.seed,
                                       dist=args.dist, threads=args.threads)
    rows = []
    for n in range(2, args.k_max + 1, 2):
        k = n // 2
        analytic = 1 if n == 2 else fourth_moment_analytic(p) if n == 4 else None
        count = pattern_moment_pairing_count(p, args.N, k) if k <= MAX_COUNT_K and args.N <= MAX_COUNT_N else None
        simulated = sim[n][0] if n in sim else None
        rows.append((n, analytic, count, simulated, args.N, args.trials))
    header = ["k", "analytic", "pairing_count", "simulated", "N", "trials"]
    return emit("pattern_moments", header, rows, _manifest(args), args.out, args.format, out)


def cmd_spacings(args, out):
    spec = _spec(args)
    samples = [central_spacings(S, args.central, args.tol)
               for S in _spectra(spec, args.trials, args.threads)]
    pooled = pool_spacings(samples)
    stats = {
        "zero_count": pooled.zero_count,
        "total": pooled.total,
        "zero_fraction": pooled.zero_fraction,
    }
    if pooled.spacings.size:
        stats["ks_exponential"] = ks_distance(pooled.spacings, "exponential")
        stats["ks_goe"] = ks_distance(pooled.spacings, "goe")
    man = _manifest(args, spec=spec.to_dict(), **stats)
    rows = ((s,) for s in pooled.spacings)
    return emit("spacings", ["s"], rows, man, args.out, args.format, out)


def cmd_generate(args, out):
    spec = _spec(args)
    M = build_matrix(spec, args.trial)
    rows = (list(r) for r in M.entries)
    header = [f"c{j + 1}" for j in range(M.n)]
    man = _manifest(args, spec=spec.to_dict())
    return emit("matrix", header, rows, man, args.out, args.format, out)


def cmd_eigs(args, out):
    spec = _spec(args)
    S = spectrum(spec, build_matrix(spec, args.trial), args.method)
    man = _manifest(args, spec=spec.to_dict())
    return emit("eigenvalues", ["eigenvalue"], ((v,) for v in S.values), man, args.out, args.format, out)


def cmd_replay(args, out):
    with open(args.manifest, encoding="utf-8") as fh:
        config = json.load(fh)["config"]
    ns = argparse.Namespace(**config, out=args.out, format=args.format)
    if ns.command == "replay":
        raise UsageError("cannot replay a replay manifest")
    return COMMANDS[ns.command](ns, out)


COMMANDS = {
    "simulate": cmd_simulate,
    "density": cmd_density,
    "moments": cmd_moments,
    "pairings": cmd_pairings,
    "pattern-moments": cmd_pattern_moments,
    "spacings": cmd_spacings,
    "generate": cmd_generate,
    "eigs": cmd_eigs,
    "replay": cmd_replay,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output directory (default: $BLOCKCIRC_OUT, else stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    ens = argparse.ArgumentParser(add_help=False)
    ens.add_argument("--kind", choices=(CIRCULANT, TOEPLITZ), default=CIRCULANT)
    ens.add_argument("-N", type=int, default=400)
    ens.add_argument("-m", type=int, default=1)
    ens.add_argument("--pattern", default=None, help='period pattern such as "aabb" (overrides --kind/-m)')
    ens.add_argument("--dist", choices=("gaussian", "rademacher", "uniform"), default="gaussian")
    ens.add_argument("--seed", type=int, default=0)

    runs = argparse.ArgumentParser(add_help=False)
    runs.add_argument("--trials", type=int, default=200)
    runs.add_argument("--threads", type=int, default=1)

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--lo", type=float, default=-3.0)
    grid.add_argument("--hi", type=float, default=3.0)

    p = argparse.ArgumentParser(prog="blockcirc", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common, ens, runs, grid], help="pooled eigenvalue histogram")
    s.add_argument("--bins", type=int, default=61)
    s.add_argument("--k-max", type=int, default=8)

    s = sub.add_parser("density", parents=[common, grid], help="limiting densities f_m and the semicircle")
    s.add_argument("-m", type=_int_list, default=[1, 2, 4, 8, 16])
    s.add_argument("--points", type=int, default=601)

    s = sub.add_parser("moments", parents=[common], help="exact limiting moments")
    s.add_argument("-m", type=_int_list, default=[1])
    s.add_argument("--k-max", type=int, default=5)

    s = sub.add_parser("pairings", parents=[common], help="genus histogram of 2k-gon pairings")
    s.add_argument("-k", type=int, default=4)

    s = sub.add_parser("pattern-moments", parents=[common], help="moments of a generalized pattern")
    s.add_argument("--pattern", required=True)
    s.add_argument("-N", type=int, default=240)
    s.add_argument("--k-max", type=int, default=6)
    s.add_argument("--trials", type=int, default=0)
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--dist", choices=("gaussian", "rademacher", "uniform"), default="gaussian")
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("spacings", parents=[common, ens, runs], help="central eigenvalue spacings")
    s.add_argument("--central", type=int, default=10)
    s.add_argument("--tol", type=float, default=1e-8)

    s = sub.add_parser("generate", parents=[common, ens], help="write one sampled matrix")
    s.add_argument("--trial", type=int, default=0)

    s = sub.add_parser("eigs", parents=[common, ens], help="normalised eigenvalues of one sample")
    s.add_argument("--trial", type=int, default=0)
    s.add_argument("--method", choices=("auto", "block", "dense"), default="auto")

    s = sub.add_parser("replay", parents=[common], help="re-run from a manifest")
    s.add_argument("manifest")

    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    args.func = COMMANDS[args.command]
    try:
        written = args.func(args, out)
    except InvariantViolation as e:
        print(f"blockcirc: invariant violated: {e}", file=sys.stderr)
        return 3
    except (ValueError, IndexError, KeyError, OSError) as e:
        print(f"blockcirc: error: {e}", file=sys.stderr)
        return 2
    for path in written:
        print(path, file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
