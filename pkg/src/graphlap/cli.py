"""Command-line interface.

Every command emits a single JSON document (stdout, or --out FILE) that
embeds a run manifest: the resolved configuration, a sha256 of the input
file, the tool version, seed and timing.  Identical manifests produce
byte-identical output for deterministic commands.

Exit codes: 0 success; 1 verification failure; 2 invalid input; 3 solver
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .families import ExplicitFamily, family_from_file
from .graph import GraphError, GraphValidationError, WeightedGraph, graph_data_from_json
from .heat import heat_content, stochastic_verdict, w_quadrature_crosscheck
from .isoperimetry import alpha_exact, alpha_upper, beta_gamma, coarea_first, coarea_second
from .kernels import SUBSET_SCAN_MAX
from .sections import Exhaustion, SolverError
from .simulate import estimate_heat_quantities, simulate
from .spectral import (
    boundedness_report,
    emptiness_diagnostic,
    essential_spectrum_estimate,
    spectrum_report,
)
from .verify import CHECKS, run_verify

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_INVALID_INPUT = 2
EXIT_SOLVER = 3


class InputError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and (obj != obj or obj in (float("inf"), float("-inf"))):
        return str(obj)
    return obj


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _load_family(args):
    path = getattr(args, "family", None) or getattr(args, "graph", None)
    if path is None:
        raise InputError("one of --family/--graph is required")
    if not os.path.exists(path):
        raise InputError(f"input file not found: {path}")
    try:
        if getattr(args, "graph", None):
            fam = ExplicitFamily(WeightedGraph.from_file(path))
        else:
            fam = family_from_file(path)
    except (json.JSONDecodeError, KeyError, ValueError, GraphValidationError) as exc:
        raise InputError(f"invalid input file {path}: {exc}") from exc
    return fam, path


def _resolve_vertices(fam, spec):
    """Parse a comma-separated vertex list; labels for explicit graphs,
    integers for families."""
    items = [s.strip() for s in str(spec).split(",") if s.strip()]
    if not items:
        raise InputError("empty vertex list")
    if isinstance(fam, ExplicitFamily):
        labels = {lab: i for i, lab in enumerate(fam.graph.labels)}
        out = []
        for it in items:
            if it in labels:
                out.append(labels[it])
            else:
                raise InputError(f"unknown vertex id {it!r}")
        return out
    try:
        return [int(it) for it in items]
    except ValueError as exc:
        raise InputError(f"family vertices must be integers: {exc}") from exc


def _labels(fam, xs):
    """Render internal vertex ids with the user-facing labels."""
    if isinstance(fam, ExplicitFamily):
        return [fam.graph.labels[x] for x in xs]
    return [str(int(x)) for x in xs]


def _resolve_root(fam, args):
    root = getattr(args, "root", None)
    if root is None:
        return fam.root
    return _resolve_vertices(fam, root)[0]


def _int_list(spec):
    try:
        return [int(s) for s in str(spec).split(",") if s.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers: {exc}") from exc


def _float_list(spec):
    try:
        return [float(s) for s in str(spec).split(",") if s.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated numbers: {exc}") from exc


def _emit(args, command, config, payload, t0, input_path=None, exit_code=EXIT_OK):
    doc = {
        "manifest": {
            "command": command,
            "config": _jsonable(config),
            "input_sha256": _sha256(input_path) if input_path else None,
            "version": __version__,
            "seed": config.get("seed"),
            "timing_seconds": round(time.time() - t0, 6),
        },
        "report": _jsonable(payload),
    }
    text = json.dumps(doc, indent=2)
    if getattr(args, "out", None):
        with open(args.out, "w") as f:
            f.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return exit_code


# ----------------------------------------------------------------------
# subcommands


def cmd_spectrum(args, t0):
    fam, path = _load_family(args)
    if args.section:
        U = _resolve_vertices(fam, args.section)
    elif args.radius is not None:
        U = fam.ball(_resolve_root(fam, args), args.radius)
    elif isinstance(fam, ExplicitFamily):
        U = fam.vertices()
    else:
        raise InputError("families need --section or --radius")
    report = spectrum_report(fam, U)
    report["boundedness"] = boundedness_report(fam, U)
    cfg = {"input": path, "section": _labels(fam, U), "seed": None}
    return _emit(args, "spectrum", cfg, report, t0, path)


def cmd_cheeger(args, t0):
    fam, path = _load_family(args)
    if args.U:
        U = _resolve_vertices(fam, args.U)
    elif isinstance(fam, ExplicitFamily):
        U = fam.vertices()
    else:
        raise InputError("families need --U")
    if len(U) <= SUBSET_SCAN_MAX:
        a, W = alpha_exact(fam, U, args.measure)
        report = {
            "alpha": a,
            "argmin": _labels(fam, W),
            "label": "EXACT",
            "measure": args.measure,
        }
    else:
        report = alpha_upper(fam, U, args.measure, budget=args.budget)
    if len(U) <= SUBSET_SCAN_MAX:
        report["split_constants"] = beta_gamma(fam, U)
    cfg = {"input": path, "U": _labels(fam, U), "measure": args.measure, "seed": None}
    return _emit(args, "cheeger", cfg, report, t0, path)


def cmd_coarea(args, t0):
    fam, path = _load_family(args)
    try:
        fspec = json.loads(args.f)
    except json.JSONDecodeError as exc:
        raise InputError(f"--f must be a JSON object: {exc}") from exc
    if not isinstance(fspec, dict):
        raise InputError("--f must be a JSON object mapping vertex id to value")
    f = {}
    for k, v in fspec.items():
        x = _resolve_vertices(fam, k)[0]
        f[x] = float(v)
    l1, r1 = coarea_first(fam, f)
    l2, r2 = coarea_second(fam, f)
    report = {
        "gradient_sum": l1,
        "boundary_integral": r1,
        "first_identity_discrepancy": abs(l1 - r1),
        "mass_sum": l2,
        "layer_cake_integral": r2,
        "second_identity_discrepancy": abs(l2 - r2),
    }
    cfg = {"input": path, "f": fspec, "seed": None}
    return _emit(args, "coarea", cfg, report, t0, path)


def cmd_essential(args, t0):
    fam, path = _load_family(args)
    outer = _int_list(args.outer)
    report = essential_spectrum_estimate(fam, args.delete_radius, outer, root=_resolve_root(fam, args))
    if not fam.is_finite:
        report["emptiness_diagnostic"] = emptiness_diagnostic(fam, outer)
    cfg = {"input": path, "delete_radius": args.delete_radius, "outer": outer, "seed": None}
    return _emit(args, "essential", cfg, report, t0, path)


def cmd_heat(args, t0):
    fam, path = _load_family(args)
    radii = _int_list(args.radii)
    times = _float_list(args.times)
    root = _resolve_root(fam, args)
    probes = _resolve_vertices(fam, args.probes) if args.probes else [root]
    ex = Exhaustion(fam, root, radii)
    curves = heat_content(fam, ex, times, probes)
    report = {
        "radii": radii,
        "times": times,
        "probes": _labels(fam, probes),
        "curves": [
            {
                "radius": c["radius"],
                "size": c["size"],
                "M": c["M"],
                "semigroup_term": c["semigroup_term"],
                "killed_term": c["killed_term"],
            }
            for c in curves
        ],
    }
    cfg = {"input": path, "radii": radii, "times": times, "seed": None}
    return _emit(args, "heat", cfg, report, t0, path)


def cmd_stochastic(args, t0):
    fam, path = _load_family(args)
    radii = _int_list(args.radii)
    root = _resolve_root(fam, args)
    ex = Exhaustion(fam, root, radii)
    report = stochastic_verdict(
        fam,
        args.alpha,
        ex,
        tol=args.tol,
        stabilization_window=args.window,
        stabilization_rtol=args.stab_rtol,
        second_alpha=args.second_alpha,
    )
    if args.quad_check:
        report["w_quadrature_crosscheck"] = w_quadrature_crosscheck(fam, args.alpha, ex)
    if args.montecarlo:
        batch = simulate(
            fam,
            x0=root,
            t_horizon=args.mc_horizon,
            n_samples=args.montecarlo,
            seed=args.seed,
            explosion_threshold=args.explosion_threshold,
        )
        report["montecarlo"] = {
            **batch.summary(),
            **estimate_heat_quantities(batch),
        }
    cfg = {
        "input": path,
        "alpha": args.alpha,
        "radii": radii,
        "tol": args.tol,
        "window": args.window,
        "stab_rtol": args.stab_rtol,
        "seed": args.seed,
    }
    return _emit(args, "stochastic", cfg, report, t0, path)


def cmd_simulate(args, t0):
    fam, path = _load_family(args)
    x0 = _resolve_vertices(fam, args.x0)[0]
    batch = simulate(
        fam,
        x0=x0,
        t_horizon=args.t,
        n_samples=args.samples,
        seed=args.seed,
        explosion_threshold=args.explosion_threshold,
        method=args.method,
    )
    report = {**batch.summary(), "estimates": estimate_heat_quantities(batch)}
    cfg = {
        "input": path,
        "x0": str(args.x0),
        "t": args.t,
        "samples": args.samples,
        "seed": args.seed,
        "explosion_threshold": args.explosion_threshold,
        "method": args.method,
    }
    return _emit(args, "simulate", cfg, report, t0, path)


def cmd_verify(args, t0):
    graph_data = None
    path = None
    if args.graph:
        path = args.graph
        if not os.path.exists(path):
            raise InputError(f"input file not found: {path}")
        try:
            with open(path) as fh:
                graph_data = graph_data_from_json(json.load(fh))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise InputError(f"invalid graph file: {exc}") from exc
        if not args.allow_invalid:
            try:
                WeightedGraph.build(graph_data)
            except GraphValidationError as exc:
                raise InputError(f"graph violates axioms: {exc}") from exc
    only = [s.strip() for s in args.only.split(",")] if args.only else None
    results = run_verify(seed=args.seed, instances=args.instances, only=only, graph_data=graph_data)
    all_pass = all(r["passed"] for r in results)
    report = {"results": results, "all_passed": all_pass}
    cfg = {"input": path, "instances": args.instances, "only": only, "seed": args.seed}
    return _emit(
        args, "verify", cfg, report, t0, path, exit_code=EXIT_OK if all_pass else EXIT_VERIFY_FAIL
    )


# ----------------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(
        prog="graphlap",
        description="Weighted graph Laplacians: spectra, isoperimetric bounds, "
        "heat content, stochastic completeness and jump-process simulation.",
    )
    ap.add_argument("--version", action="version", version=f"graphlap {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p, seed=False):
        p.add_argument("--graph", help="explicit finite graph JSON file")
        p.add_argument("--family", help="graph family JSON file")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--root", help="root vertex (default: family root / first vertex)")
        p.add_argument("--threads", type=int, default=None, help="worker cap (env GRAPHLAP_THREADS)")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("spectrum", help="section spectrum with isoperimetric sandwich bounds")
    add_common(p)
    p.add_argument("--section", help="comma-separated vertex list U")
    p.add_argument("--radius", type=int, help="use the ball of this radius as U")
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("cheeger", help="isoperimetric constants (exact or upper bound)")
    add_common(p)
    p.add_argument("--U", help="comma-separated vertex list")
    p.add_argument("--measure", choices=["m", "n"], default="m")
    p.add_argument("--budget", type=int, default=100)
    p.set_defaults(fn=cmd_cheeger)

    p = sub.add_parser("coarea", help="both co-area identities for a given function")
    add_common(p)
    p.add_argument("--f", required=True, help='JSON object {"vertex": value, ...}')
    p.set_defaults(fn=cmd_coarea)

    p = sub.add_parser("essential", help="essential-spectrum estimates by exhaustion")
    add_common(p)
    p.add_argument("--delete-radius", type=int, default=-1, dest="delete_radius")
    p.add_argument("--outer", required=True, help="comma-separated outer radii")
    p.set_defaults(fn=cmd_essential)

    p = sub.add_parser("heat", help="heat content curves along an exhaustion")
    add_common(p)
    p.add_argument("--radii", required=True)
    p.add_argument("--times", required=True)
    p.add_argument("--probes", help="comma-separated probe vertices")
    p.set_defaults(fn=cmd_heat)

    p = sub.add_parser("stochastic", help="mass-conservation verdict (SC/SI/UNDECIDED)")
    add_common(p, seed=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--radii", default="16,32,64,128,256")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--stab-rtol", type=float, default=1e-2, dest="stab_rtol")
    p.add_argument("--second-alpha", type=float, default=None, dest="second_alpha")
    p.add_argument("--quad-check", action="store_true", dest="quad_check")
    p.add_argument("--montecarlo", type=int, default=0, help="cross-check sample count")
    p.add_argument("--mc-horizon", type=float, default=1.0, dest="mc_horizon")
    p.add_argument("--explosion-threshold", type=int, default=10**6, dest="explosion_threshold")
    p.set_defaults(fn=cmd_stochastic)

    p = sub.add_parser("simulate", help="jump-process Monte Carlo batch")
    add_common(p, seed=True)
    p.add_argument("--x0", default="0")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--explosion-threshold", type=int, default=10**6, dest="explosion_threshold")
    p.add_argument("--method", choices=["auto", "exact", "fast"], default="auto")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("verify", help="run the property-verification suite")
    add_common(p, seed=True)
    p.add_argument("--instances", type=int, default=200)
    p.add_argument("--only", help=f"comma-separated subset of: {', '.join(CHECKS)}")
    p.add_argument("--allow-invalid", action="store_true", dest="allow_invalid")
    p.set_defaults(fn=cmd_verify)

    return ap


def _apply_threads(args):
    n = args.threads if getattr(args, "threads", None) else os.environ.get("GRAPHLAP_THREADS")
    if n:
        try:
            import numba

            numba.set_num_threads(max(1, int(n)))
        except (ImportError, ValueError):
            pass


def main(argv=None):
    t0 = time.time()
    ap = build_parser()
    args = ap.parse_args(argv)
    _apply_threads(args)
    try:
        return args.fn(args, t0)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except GraphValidationError as exc:
        print(f"invalid graph: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
