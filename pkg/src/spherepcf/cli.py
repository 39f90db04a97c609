"""Command-line front end.

Exit codes: 0 success, 1 a comparison failed, 2 usage or domain error.
"""

import argparse
import math
import sys
import warnings
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import oracles as orc
from .ensembles import (IID, Harmonic, Jittered, Spherical, read_points_csv,
                        write_points_csv)
from .eq import EqPartition, build_eq_partition, region_diameter, total_perimeter
from .errors import DomainError, QuadratureError, SamplingError
from .pcf import (DISTANCES, SGrid, compare_to_oracle, pcf_curve, pcf_from_point_sets,
                  read_estimates_csv, replicate_rng, write_comparison_csv,
                  write_estimates_csv)

ENSEMBLES = ("iid", "spherical", "harmonic", "jittered")
ORACLE_ENSEMBLES = ENSEMBLES + ("projective",)
ORACLE_KINDS = ("finite_N", "limit", "asymptote_small_s", "asymptote_large_s")


def _count(text):
    """Positive integer or 'inf'."""
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'inf', got {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def _grid(text):
    try:
        return SGrid.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _load_partition(path):
    return EqPartition.from_json(Path(path).read_text())


def _ensemble(args):
    kind = args.ensemble
    if kind == "iid":
        if args.n is None:
            raise DomainError("--n is required for the iid ensemble")
        return IID(args.d, args.n)
    if args.d != 2:
        raise DomainError(f"the {kind} ensemble is only sampled on S^2")
    if kind == "spherical":
        if args.n is None:
            raise DomainError("--n is required for the spherical ensemble")
        return Spherical(args.n)
    if kind == "harmonic":
        if args.L is None:
            raise DomainError("--L is required for the harmonic ensemble")
        return Harmonic(args.L)
    if args.partition:
        return Jittered(_load_partition(args.partition))
    if args.n is None:
        raise DomainError("--partition or --n is required for the jittered ensemble")
    return Jittered(build_eq_partition(args.n))


# ---------------------------------------------------------------- commands

def cmd_partition(args):
    p = build_eq_partition(args.n)
    diam = [region_diameter(p, r) for r in p.regions()]
    summary = (f"EQ(2,{p.n_regions}): collars={p.n_collars} "
               f"min_diameter={min(diam):.6g} max_diameter={max(diam):.6g} "
               f"total_perimeter={total_perimeter(p):.6g}")
    if args.out:
        Path(args.out).write_text(p.to_json(indent=2) + "\n")
        print(summary)
    else:
        print(p.to_json(indent=2))
        print(summary, file=sys.stderr)
    return 0


def cmd_sample(args):
    spec = _ensemble(args)
    sets = [spec.sample(replicate_rng(args.seed, r)) for r in range(args.reps)]
    with _output(args.out) as fh:
        write_points_csv(fh, sets)
    return 0


def cmd_pcf(args):
    if args.points:
        with open(args.points, newline="") as fh:
            sets = read_points_csv(fh)
        est = pcf_from_point_sets(sets, args.grid, args.distance, label=Path(args.points).name)
    else:
        if args.ensemble is None:
            raise DomainError("give --points or --ensemble")
        spec = _ensemble(args)
        est = pcf_curve(spec, args.grid, args.reps, args.distance, args.seed, args.jobs)
    with _output(args.out) as fh:
        write_estimates_csv(fh, est)
    return 0


def _oracle_function(args):
    """Map oracle flags to (callable of s, kind, params)."""
    e, kind = args.ensemble, args.kind
    if e == "iid":
        if args.N == math.inf or kind == "limit":
            return (lambda s: orc.iid_pcf_limit(args.d, s)), "limit", {"d": args.d}
        return ((lambda s: orc.iid_pcf_finite(args.d, args.N, s, args.distance)),
                "finite_N", {"d": args.d, "N": args.N, "distance": args.distance})
    if e == "spherical":
        N = args.N if args.N is not None else math.inf
        return ((lambda s: orc.spherical_pcf(N, s)),
                "limit" if N == math.inf else "finite_N", {"N": N})
    if e == "harmonic":
        if kind == "asymptote_small_s":
            return (lambda s: orc.harmonic_pcf_small_s(args.d, s)), kind, {"d": args.d}
        if args.L is None or args.L == math.inf:
            return (lambda s: orc.harmonic_pcf_limit(args.d, s)), "limit", {"d": args.d}
        return ((lambda s: orc.harmonic_pcf_finite(args.d, args.L, s)),
                "finite_N", {"d": args.d, "L": args.L})
    if e == "projective":
        if args.D is None or args.beta is None:
            raise DomainError("--D and --beta are required for projective oracles")
        alpha = args.D / 2 - 1 if args.alpha is None else args.alpha
        params = {"alpha": alpha, "beta": args.beta, "D": args.D}
        if kind == "asymptote_large_s":
            return (lambda s: orc.projective_pcf_large_s(alpha, args.beta, args.D, s)), kind, params
        L = math.inf if args.L is None else args.L
        params["L"] = L
        return ((lambda s: orc.projective_pcf(alpha, args.beta, args.D, L, s)),
                "asymptote_small_s" if L == math.inf else "finite_N", params)
    # jittered
    if kind == "asymptote_small_s":
        return (lambda s: orc.jittered_pcf_small_s(s, args.c2)[0]), kind, {"C2": args.c2}
    if kind == "asymptote_large_s" or args.N is None or args.N == math.inf:
        return (lambda s: orc.jittered_pcf_large_s(args.d, s)), "asymptote_large_s", {"d": args.d}
    return ((lambda s: orc.jittered_pcf_covering(args.N, s, args.distance)),
            "finite_N", {"N": args.N, "distance": args.distance})


def cmd_oracle(args):
    f, kind, params = _oracle_function(args)
    values = []
    for s in args.grid:
        try:
            values.append(float(f(s)))
        except (DomainError, QuadratureError) as exc:
            warnings.warn(f"{exc}; writing NaN", stacklevel=1)
            values.append(math.nan)
    curve = orc.OracleCurve(args.grid.values, tuple(values), kind, params)
    with _output(args.out) as fh:
        orc.write_oracle_csv(fh, curve)
    return 0


def cmd_compare(args):
    with open(args.estimates, newline="") as fh:
        est = read_estimates_csv(fh)
    with open(args.oracle, newline="") as fh:
        curve = orc.read_oracle_csv(fh)
    rows = compare_to_oracle(est, curve, args.z_max)
    with _output(args.out) as fh:
        write_comparison_csv(fh, rows)
    failed = [r for r in rows if not r.passed]
    for r in failed:
        print(f"s={r.s:g}: z={r.z:.3g} exceeds {args.z_max:g}", file=sys.stderr)
    return 1 if failed else 0


# ------------------------------------------------------------------ parser

def _add_ensemble_flags(p, required=True):
    p.add_argument("--ensemble", choices=ENSEMBLES, required=required)
    p.add_argument("--d", type=int, default=2, help="sphere dimension (iid only)")
    p.add_argument("--n", "--N", dest="n", type=int, help="number of points")
    p.add_argument("--L", type=int, help="harmonic degree")
    p.add_argument("--partition", help="EQ partition JSON (jittered)")


def build_parser():
    ap = argparse.ArgumentParser(prog="spherepcf",
                                 description="Pair correlation of point processes on the sphere.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", help="build an EQ(2, N) partition")
    p.add_argument("--n", "--N", dest="n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("sample", help="draw point configurations")
    _add_ensemble_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("pcf", help="Monte Carlo estimate of E[G_{s,N}]")
    _add_ensemble_flags(p, required=False)
    p.add_argument("--points", help="CSV of point sets instead of an ensemble")
    p.add_argument("--grid", "--s", dest="grid", type=_grid, required=True,
                   help="'start:stop:step' or comma list")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--distance", choices=DISTANCES, default="geodesic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pcf)

    p = sub.add_parser("oracle", help="reference curve for E[G_{s,N}]")
    p.add_argument("--ensemble", choices=ORACLE_ENSEMBLES, required=True)
    p.add_argument("--kind", choices=ORACLE_KINDS)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--N", "--n", dest="N", type=_count)
    p.add_argument("--L", type=_count)
    p.add_argument("--D", type=int, help="real dimension of a projective space")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--c2", type=float, default=orc.C2_DEFAULT)
    p.add_argument("--distance", choices=DISTANCES, default="geodesic")
    p.add_argument("--grid", "--s", dest="grid", type=_grid, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="z-scores of estimates against an oracle")
    p.add_argument("estimates")
    p.add_argument("oracle")
    p.add_argument("--z-max", type=float, default=4.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        with np.errstate(all="ignore"):
            return args.func(args)
    except (DomainError, QuadratureError, OSError, KeyError, ValueError) as exc:
        print(f"spherepcf: error: {exc}", file=sys.stderr)
        return 2
    except SamplingError as exc:
        print(f"spherepcf: sampling failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
