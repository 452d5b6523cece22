"""Command-line surface.

Subcommands: writhe, fuller, fix-writhe, family-correct, homotopy-sample,
corpus.  All numeric output is printed with 12 significant digits; report
files for a given config and seed are byte-identical between runs (progress
and timing chatter goes to stderr).  Any module error is emitted as a
one-line machine-readable JSON record on stdout with a nonzero exit.
"""

import argparse
import json
import os
import sys

from .curves import CurveError, curve_from_dict, resample, save_curve
from .writhe import WritheError, cross_validate, writhe_quadrature, CSV_HEADER as WRITHE_CSV
from .indicatrix import IndicatrixError, fuller_check
from .deform import DeformError, correct_writhe
from .family import (
    FamilyError, correct_family, family_csv, load_family, omega_homotopy,
    phi_homotopy, save_family,
)
from . import corpus as corpus_mod

_ERRORS = (CurveError, WritheError, IndicatrixError, DeformError, FamilyError,
           OSError, KeyError, ValueError)


def _fmt(x):
    return "%.12g" % x


def _load_input_curve(path, n_samples=None):
    with open(path) as f:
        data = json.load(f)
    if n_samples is not None and data.get("kind") == "analytic":
        data["N"] = int(n_samples)
        return curve_from_dict(data)
    curve = curve_from_dict(data)
    if n_samples is not None and curve.n != n_samples:
        if curve.const_interval is not None:
            raise CurveError(
                "cannot resample a curve with a declared constant run")
        curve = resample(curve, int(n_samples))
    return curve


def _config_dict(args):
    keys = ("command", "input", "n_samples", "band", "target", "t", "out", "seed")
    return {k: getattr(args, k, None) for k in keys}


def _cmd_writhe(args):
    curve = _load_input_curve(args.input, args.n_samples)
    quad, poly = cross_validate(curve, args.band)
    print(WRITHE_CSV)
    print(quad.csv_row())
    print(poly.csv_row())
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "writhe.csv"), "w") as f:
            f.write(WRITHE_CSV + "\n" + quad.csv_row() + "\n" + poly.csv_row() + "\n")
    return 0


def _cmd_fuller(args):
    curve = _load_input_curve(args.input, args.n_samples)
    rep = fuller_check(curve, band=args.band)
    print("N = %d" % rep.n_samples)
    print("writhe        = %s" % _fmt(rep.writhe))
    print("enclosed area = %s" % _fmt(rep.area))
    print("1 + Wr        = %s" % _fmt(rep.fuller_lhs))
    print("area / 2 pi   = %s (mod 2)" % _fmt(rep.fuller_rhs))
    print("residual mod 2 = %s" % _fmt(rep.residual_mod2))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        from .indicatrix import CSV_HEADER
        with open(os.path.join(args.out, "fuller.csv"), "w") as f:
            f.write(CSV_HEADER + "\n" + rep.csv_row() + "\n")
    return 0


def _cmd_fix_writhe(args):
    curve = _load_input_curve(args.input, args.n_samples)
    bar, trace = correct_writhe(curve, args.target, band=args.band)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    curve_path = os.path.join(out, "corrected.json")
    save_curve(bar, curve_path, analytic=False)
    record = {"config": _config_dict(args), "trace": trace.to_json_dict()}
    with open(os.path.join(out, "trace.json"), "w") as f:
        json.dump(record, f, indent=1, sort_keys=True)
        f.write("\n")
    print("input writhe   = %s" % _fmt(trace.wr_input))
    print("segment writhe = %s" % _fmt(trace.wr_tilde))
    print("helix: n = %d, w = %s" % (trace.helix.n, _fmt(trace.w_applied)))
    print("output writhe  = %s (target %s)" % (_fmt(trace.wr_output), _fmt(args.target)))
    print("|error|        = %s" % _fmt(abs(trace.wr_output - args.target)))
    print("min self distance = %s" % _fmt(trace.min_dist_output))
    print("corrected curve  -> %s" % curve_path)
    return 0


def _cmd_family_correct(args):
    family = load_family(args.input)
    corrected = correct_family(family, band=args.band)
    out = args.out or "."
    manifest = save_family(corrected, out)
    csv_text = family_csv(corrected)
    with open(os.path.join(out, "nodes.csv"), "w") as f:
        f.write(csv_text)
    print("nodes    = %d" % corrected.space.n_nodes)
    print("omega    = %s" % _fmt(corrected.omega))
    print("n turns  = %d" % corrected.meta["n"])
    print("epsilon  = %s" % _fmt(corrected.meta["epsilon"]))
    dev = max(abs(tr.wr_output - corrected.omega) for tr in corrected.traces)
    print("max |Wr - omega| = %s" % _fmt(dev))
    print("manifest -> %s" % manifest)
    return 0


def _cmd_homotopy_sample(args):
    if not (0.0 <= args.t <= 1.0):
        raise FamilyError("--t must lie in [0, 1]")
    family = load_family(args.input)
    corrected = correct_family(family, band=args.band)
    hom = phi_homotopy if family.space.kind == "sphere_cross_interval" \
        else omega_homotopy
    snapshot = hom(family, corrected, args.t)
    out = args.out or "."
    manifest = save_family(snapshot, out)
    wr0 = writhe_quadrature(snapshot.curves[snapshot.space.basepoint], args.band).value
    print("t        = %s" % _fmt(args.t))
    print("nodes    = %d" % snapshot.space.n_nodes)
    print("omega    = %s" % _fmt(corrected.omega))
    print("basepoint writhe at t = %s" % _fmt(wr0))
    print("manifest -> %s" % manifest)
    return 0


def _cmd_corpus(args):
    n = args.n_samples or corpus_mod.N_REF
    seed = args.seed if args.seed is not None else corpus_mod.DEFAULT_SEED

    def progress(msg):
        print(msg, file=sys.stderr)
        sys.stderr.flush()

    results = corpus_mod.run_all(n_samples=n, seed=seed, progress=progress)
    report = corpus_mod.format_report(results, n, seed)
    print(report, end="")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.txt"), "w") as f:
            f.write(report)
        for r in results:
            for fname, text in r["csv"].items():
                with open(os.path.join(args.out, fname), "w") as f:
                    f.write(text)
    return 0 if all(r["ok"] for r in results) else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="writhekit",
        description="Writhe computation, Fuller-relation checks, and "
                    "exact-writhe correction of closed space curves.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, helptext, *, needs_input=True, target=False, t=False):
        p = sub.add_parser(name, help=helptext)
        if needs_input:
            p.add_argument("--input", required=True, help="curve or manifest file")
        p.add_argument("--n-samples", type=int, default=None,
                       help="sample-count override")
        p.add_argument("--band", type=int, default=2,
                       help="excluded near-diagonal band for quadrature")
        if target:
            p.add_argument("--target", type=float, required=True,
                           help="prescribed writhe")
        if t:
            p.add_argument("--t", type=float, required=True,
                           help="homotopy parameter in [0, 1]")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for randomized checks (recorded in outputs)")
        p.set_defaults(fn=fn)
        return p

    add("writhe", _cmd_writhe, "writhe by quadrature, cross-checked against the polygonal oracle")
    add("fuller", _cmd_fuller, "verify 1 + Wr = A / 2 pi (mod 2)")
    add("fix-writhe", _cmd_fix_writhe, "deform a curve to a prescribed writhe", target=True)
    add("family-correct", _cmd_family_correct, "correct a curve family to constant writhe")
    add("homotopy-sample", _cmd_homotopy_sample, "emit a family homotopy snapshot", t=True)
    add("corpus", _cmd_corpus, "run the full property-check suite", needs_input=False)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _ERRORS as exc:
        record = {"command": args.command, "error": type(exc).__name__,
                  "message": str(exc)}
        print(json.dumps(record, sort_keys=True))
        return 1


if __name__ == "__main__":
    sys.exit(main())
