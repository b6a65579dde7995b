"""Command line front end: ``regp filter|simulate|estimate|analyze``.

Stochastic commands take ``--seed``; without one a seed is drawn from OS
entropy and recorded in the JSON sidecar written next to every output file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .ecf import DEFAULT_W_GAMMA_C, ECFConfig, sample_displacements, truncation_error, truncation_error_asymptote
from .errors import RegpError
from .filters import FilterSpec, filter_table, ft_filter, parse_q
from .process import ProcessConfig, apply_process_uhd, critical_width, output_min_variance, simulate_bhd
from .sampling import THREADS_ENV, axis_grid, estimate_Pw_balanced, estimate_Pw_unbalanced
from .states import Coherent, SqueezedVacuum, Thermal, Vacuum
from .syserr import bound_sweep

PRESETS = {
    "fig4": {"state": "squeezed", "xi": 0.5, "q": "inf", "w": 1.3, "wgc": 100.0, "n": 3_000_000},
}


def _positive_int(s: str) -> int:
    n = int(s)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def _state_from_args(args):
    if args.state == "vacuum":
        return Vacuum()
    if args.state == "coherent":
        return Coherent(complex(args.alpha_re, args.alpha_im))
    if args.state == "thermal":
        return Thermal(args.nbar)
    return SqueezedVacuum(args.xi)


def _seed(args) -> int:
    return args.seed if args.seed is not None else int(np.random.SeedSequence().entropy)


def _grid(args) -> np.ndarray:
    if args.axis == "both":
        return np.concatenate([axis_grid("squeezed", args.half_width, args.step),
                               axis_grid("antisqueezed", args.half_width, args.step)])
    if args.axis == "plane":
        t = axis_grid("squeezed", args.half_width, args.step).real
        return (t[:, None] + 1j * t[None, :]).ravel()
    return axis_grid(args.axis, args.half_width, args.step)


def _print_significance(est, out=None):
    alpha, value, sig = est.most_negative()
    print(f"max negativity significance: {sig:.3f} sigma at alpha = {alpha.real:.4g}{alpha.imag:+.4g}j "
          f"(P_w = {value:.6g})", file=out or sys.stdout)


def cmd_filter(args) -> int:
    spec = FilterSpec(parse_q(args.q), args.w)
    if not args.rmax > 0 or args.points < 2:
        raise ValueError("need --rmax > 0 and --points >= 2")
    r = np.linspace(0.0, args.rmax, args.points)
    values = filter_table(r, spec) if args.what == "eval" else ft_filter(r, spec)
    col = "omega" if args.what == "eval" else "ft"
    if args.out:
        io.write_table(args.out, ("r", col), [r, values], [io.fmt_float, io.fmt_float])
        io.write_sidecar(args.out, {"command": f"filter {args.what}", "filter": spec.to_dict(),
                                    "rmax": args.rmax, "points": args.points})
    else:
        print(f"r,{col}")
        for a, b in zip(r, values):
            print(f"{io.fmt_float(a)},{io.fmt_float(b)}")
    return 0


def cmd_simulate(args) -> int:
    if args.preset:
        for k, v in PRESETS[args.preset].items():
            setattr(args, k, v)
    if args.n <= 0:
        raise ValueError("refusing to simulate an empty data set (N = 0)")
    state = _state_from_args(args)
    spec = FilterSpec(parse_q(args.q), args.w)
    ecf = ECFConfig.from_product(spec, args.wgc)
    seed = _seed(args)
    config = {"command": f"simulate {args.mode}", "state": state.to_dict(), "ecf": ecf.to_dict(),
              "eta": args.eta, "n": args.n, "method": args.method, "preset": args.preset}
    t0 = time.perf_counter()
    if args.mode == "bhd":
        data = simulate_bhd(state, ProcessConfig(ecf, args.eta), args.n, seed, args.method)
        io.write_quadratures(args.out, data)
    else:
        if args.eta != 1.0:
            raise ValueError("loss is not modelled for unbalanced detection")
        grid = _grid(args)
        config["grid"] = {"axis": args.axis, "half_width": args.half_width, "step": args.step}
        counts = []
        for alpha, child in zip(grid, np.random.SeedSequence(seed).spawn(grid.size)):
            s_ecf, s_det = child.spawn(2)
            gamma = sample_displacements(ecf, args.n, s_ecf, args.method)
            counts.append(apply_process_uhd(state, gamma, complex(alpha), s_det))
        io.write_counts(args.out, grid, counts)
    io.write_sidecar(args.out, config, seed, time.perf_counter() - t0)
    print(f"wrote {args.out} (seed {seed})")
    return 0


def cmd_estimate(args) -> int:
    t0 = time.perf_counter()
    try:
        source = io.read_sidecar(args.data)
    except FileNotFoundError:
        source = {}
    w = args.w
    if w is None:
        try:
            w = float(source["config"]["ecf"]["filter"]["w"])
        except (KeyError, TypeError):
            raise ValueError("filter width unknown: pass --w or keep the data sidecar") from None
    b_c = args.b_c if args.b_c is not None else 2 * w
    meta = {"data": str(args.data), "data_seed": source.get("seed"), "w": w, "b_c": b_c}
    if args.mode == "balanced":
        data = io.read_quadratures(args.data)
        grid = _grid(args)
        est = estimate_Pw_balanced(data, grid, b_c, meta=meta, threads=args.threads)
        grid_info = {"axis": args.axis, "half_width": args.half_width, "step": args.step}
    else:
        alphas, counts = io.read_counts(args.data)
        est = estimate_Pw_unbalanced(counts, alphas, b_c, meta=meta)
        grid_info = {"points": int(alphas.size)}
    io.write_estimate(args.out, est)
    config = {"command": f"estimate {args.mode}", "grid": grid_info, **meta}
    io.write_sidecar(args.out, config, source.get("seed"), time.perf_counter() - t0,
                     extra={"max_significance": float(np.nanmax(est.significance))
                            if np.any(np.isfinite(est.significance)) else None})
    _print_significance(est)
    return 0


def cmd_analyze(args) -> int:
    if args.what == "variance":
        v_in = math.exp(-2 * args.xi)
        v_out = output_min_variance(v_in, FilterSpec(parse_q(args.q), args.w))
        print(f"output minimal quadrature variance: {v_out:.6g} (input {v_in:.6g})")
        result = {"v_in": v_in, "v_out": v_out}
    elif args.what == "wcrit":
        v_in = math.exp(-2 * args.xi)
        wc = critical_width(parse_q(args.q), v_in)
        print(f"critical filter width: {wc:.6g}")
        result = {"v_in": v_in, "w_crit": wc}
    elif args.what == "ecf-error":
        rows = [(x, truncation_error(x), truncation_error_asymptote(x)) for x in args.wgc]
        for x, e, a in rows:
            print(f"w*gamma_c = {x:g}: E = {e:.4g} (asymptote {a:.4g})")
        result = {"w_gamma_c": [r[0] for r in rows], "E": [r[1] for r in rows], "asymptote": [r[2] for r in rows]}
    else:
        reports = bound_sweep(args.w, args.wgc)
        bounds = [r.bound for r in reports]
        for r in reports:
            print(f"w*gamma_c = {r.w * r.gamma_c:g}: bound = {r.bound:.4g} "
                  f"(transform minimum {r.min_value:.4g} at |gamma| = {r.minimizer_gamma_abs:.4g})")
        monotone = all(a >= b for a, b in zip(bounds, bounds[1:]))
        print(f"sweep nonincreasing: {monotone}")
        result = {"reports": [r.to_dict() for r in reports], "nonincreasing": monotone}
        if args.out:
            io.write_sweep(args.out, [r.gamma_c for r in reports], bounds)
            io.write_sidecar(args.out, {"command": "analyze syserr", "w": args.w, "w_gamma_c": list(args.wgc)},
                             extra={"result": result})
            return 0
    if args.out:
        Path(args.out).write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    return 0


def _add_state_args(p):
    p.add_argument("--state", choices=["vacuum", "coherent", "thermal", "squeezed"], default="squeezed")
    p.add_argument("--xi", type=float, default=0.5, help="squeezing parameter")
    p.add_argument("--alpha-re", type=float, default=0.0, help="coherent amplitude, real part")
    p.add_argument("--alpha-im", type=float, default=0.0, help="coherent amplitude, imaginary part")
    p.add_argument("--nbar", type=float, default=1.0, help="thermal occupation")


def _add_grid_args(p, default_axis="both"):
    p.add_argument("--axis", choices=["squeezed", "antisqueezed", "both", "plane"], default=default_axis)
    p.add_argument("--half-width", type=float, default=3.0)
    p.add_argument("--step", type=float, default=0.05)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regp", description="Regularized P function simulation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="tabulate a filter or its Fourier transform")
    p.add_argument("what", choices=["eval", "ft"])
    p.add_argument("--q", default="inf", help="filter exponent (>= 2 or 'inf')")
    p.add_argument("--w", type=float, default=1.0, help="filter width")
    p.add_argument("--rmax", type=float, default=4.0)
    p.add_argument("--points", type=int, default=401)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("simulate", help="simulate detector data for a state seen through an ECF")
    p.add_argument("mode", choices=["bhd", "uhd"])
    p.add_argument("--preset", choices=sorted(PRESETS))
    _add_state_args(p)
    p.add_argument("--q", default="inf")
    p.add_argument("--w", type=float, default=1.3)
    p.add_argument("--wgc", type=float, default=DEFAULT_W_GAMMA_C, help="ECF cutoff as w * gamma_c")
    p.add_argument("--eta", type=float, default=1.0, help="detection efficiency")
    p.add_argument("--n", type=_positive_int, default=100_000, help="events (per grid point for uhd)")
    p.add_argument("--seed", type=int)
    p.add_argument("--method", choices=["bisect", "table"], default="bisect")
    _add_grid_args(p, "squeezed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="sample the regularized P function from a data file")
    p.add_argument("mode", choices=["balanced", "unbalanced"])
    p.add_argument("--data", required=True)
    p.add_argument("--w", type=float, help="filter width (default: from the data sidecar)")
    p.add_argument("--b-c", type=float, help="post-detection cutoff (default 2w)")
    _add_grid_args(p)
    p.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("analyze", help="deterministic analyses")
    p.add_argument("what", choices=["variance", "wcrit", "ecf-error", "syserr"])
    p.add_argument("--q", default="2.5")
    p.add_argument("--w", type=float, default=1.3)
    p.add_argument("--xi", type=float, default=0.5)
    p.add_argument("--wgc", type=float, nargs="+", default=[15.0, 25.0, 50.0, 100.0, 200.0])
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RegpError, ValueError, OSError) as exc:
        print(f"regp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
