"""Command-line entry point: ``grassfree <subcommand> ...``.

Exit codes: 0 success, 2 invariant failure, 1 usage or resource error.
"""

import argparse
import csv
import json
import sys
from fractions import Fraction

from . import config
from .config import BudgetExceeded
from .experiments import (
    constant_cmn,
    count_by_max_slope,
    count_free,
    count_points,
    equi_table,
    verify_suite,
)
from .grassmann import (
    enumerate_points,
    freeness,
    normalized_tangent_stats,
    point_from_basis,
    unfree_family,
)
from .lattice import Lattice, LatticeError
from .slopes import successive_minima, slope_table


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _rat(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _frac_str(x):
    return str(Fraction(x))


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(repr(x))


def _dump(obj, out):
    out.write(json.dumps(obj, default=_json_default) + "\n")


def _mat(M):
    return [[str(x) for x in row] for row in M]


def cmd_constants(a, out):
    out.write(f"{constant_cmn(a.m, a.n, a.precision):.12g}\n")
    return 0


def cmd_enumerate(a, out):
    pts = enumerate_points(a.m, a.n, a.max_height, workers=a.workers)
    if a.format == "jsonl":
        for P in pts:
            out.write(P.to_json() + "\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["m", "n", "H2", "basis"])
        for P in pts:
            w.writerow([P.m, P.n, _frac_str(P.H_sq), json.dumps([list(r) for r in P.basis])])
    return 0


def cmd_point(a, out):
    try:
        with open(a.basis) as f:
            L = Lattice.from_text(f.read())
    except OSError as exc:
        raise UsageError(f"cannot read basis file: {exc}") from None
    P = point_from_basis(L.basis, L.rank, L.dim)
    prof = successive_minima(P.lattice)
    tab = slope_table(P.lattice)
    fr = freeness(P)
    mmu, _ = normalized_tangent_stats(P)
    _dump({
        "m": P.m, "n": P.n, "basis": _mat(P.basis), "H2": P.H_sq,
        "minima_sq": list(prof.s_sq), "minima_witnesses": [list(w) for w in prof.witnesses],
        "mu": tab.mu, "mu_max": tab.mu_max, "mu_min": tab.mu_min,
        "min_covol_sq": list(tab.min_covol_sq),
        "witnesses": [_mat(W.columns) for W in tab.witnesses],
        "ell": fr.ell, "mu_min_T": fr.mu_min_T, "mu_T": fr.mu_T, "mu_max_u": mmu,
        "tangent_dual_min_covol_sq": list(fr.min_covol_sq_dual),
        "destabilizing_witness": _mat(fr.witness.columns),
    }, out)
    return 0


def cmd_count(a, out):
    if a.epsilon is None:
        rep = count_points(a.m, a.n, a.max_height)
    else:
        rep = count_free(a.m, a.n, a.max_height, a.epsilon)
    _dump(rep.to_dict(), out)
    return 0


def cmd_count_by_slope(a, out):
    _dump(count_by_max_slope(a.m, a.n, a.max_exp_slope).to_dict(), out)
    return 0


def cmd_equi(a, out):
    rows = equi_table(a.m, a.n, a.max_height, a.levels, a.statistic)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["level", "B", "sample_size", "mean", "statistic"])
    for r in rows:
        w.writerow([r.level, _frac_str(r.B), r.sample_size, repr(r.mean), r.statistic])
    return 0


def cmd_verify(a, out):
    rep = verify_suite(a.m, a.n, a.max_height)
    _dump(rep.to_dict(), out)
    return 0 if rep.ok else 2


def cmd_unfree(a, out):
    P = unfree_family(a.m, a.n, a.q)
    fr = freeness(P)
    _dump({"m": P.m, "n": P.n, "basis": _mat(P.basis), "H2": P.H_sq, "ell": fr.ell,
           "mu_min_T": fr.mu_min_T, "mu_T": fr.mu_T,
           "witness_covol_sq": fr.witness_covol_sq,
           "destabilizing_witness": _mat(fr.witness.columns)}, out)
    return 0


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--budget-vectors", type=int, default=argparse.SUPPRESS,
                        help="maximum vectors per enumeration call")
    common.add_argument("--workers", type=int, default=argparse.SUPPRESS,
                        help="worker processes")
    common.add_argument("--small-s1-constant", type=_rat, default=argparse.SUPPRESS,
                        help="constant C of the small-minimum diagnostic")

    p = _Parser(prog="grassfree", description="Slopes and freeness of rational points "
                "on Grassmannians.", parents=[common])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def mn(sp):
        sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--n", type=int, required=True)

    s = sub.add_parser("constants", parents=[common], help="print c_{m,n}")
    mn(s)
    s.add_argument("--precision", type=float, default=1e-9)
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("enumerate", parents=[common], help="points of bounded height")
    mn(s)
    s.add_argument("--max-height", type=_rat, required=True)
    s.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("point", parents=[common], help="report on one point")
    s.add_argument("--basis", required=True, help="lattice text file")
    s.set_defaults(func=cmd_point)

    s = sub.add_parser("count", parents=[common], help="count points (and unfree ones)")
    mn(s)
    s.add_argument("--max-height", type=_rat, required=True)
    s.add_argument("--epsilon", type=_rat, default=None)
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("count-by-slope", parents=[common], help="count by maximal slope")
    mn(s)
    s.add_argument("--max-exp-slope", type=_rat, required=True)
    s.set_defaults(func=cmd_count_by_slope)

    s = sub.add_parser("equi", parents=[common], help="equidistribution table (CSV)")
    mn(s)
    s.add_argument("--max-height", type=_rat, required=True)
    s.add_argument("--levels", type=int, required=True)
    s.add_argument("--statistic", required=True,
                   help="exp-slope | mu-max-u | minima | indicator:T | one")
    s.set_defaults(func=cmd_equi)

    s = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    mn(s)
    s.add_argument("--max-height", type=_rat, required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("unfree", parents=[common], help="a point with freeness 0")
    mn(s)
    s.add_argument("--q", type=int, required=True)
    s.set_defaults(func=cmd_unfree)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    s = config.settings
    saved = dict(vars(s))
    for name in ("budget_vectors", "workers", "small_s1_constant"):
        if hasattr(args, name):
            setattr(s, name, getattr(args, name))
    args.workers = s.workers
    try:
        return args.func(args, out)
    except (UsageError, LatticeError, ValueError, BudgetExceeded) as exc:
        sys.stderr.write(f"grassfree: error: {exc}\n")
        return 1
    finally:
        vars(s).update(saved)


if __name__ == "__main__":
    sys.exit(main())
