"""Command line front end: gen | analyze | witness | sweep | verify.

Exit status: 0 success, 1 contract violation, 2 validation or parse error,
3 degenerate instance (perfect mixer, nothing to witness).
"""
import argparse
import csv
import io as _io
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io
from .channel import (Channel, as_map, diagonal_reduced_spectral_radius, induced_norm,
                      reduced_spectral_radius, unit_eigen_multiplicity)
from .errors import ContractViolation, DegenerateChannel, QExpanderError
from .generators import (RegularGraph, complete_graph, cycle_graph, cyclic_cayley_channel,
                         graph_rho, random_channel, random_regular_graph, weyl_channel)
from .verify import (check_eml, inequality_suite, random_projection_pairs, suite_passed,
                     suite_to_json)
from .witness import classical_subset_witnesses, mixing_witnesses

log = logging.getLogger("qexpander")

EXIT_OK, EXIT_CONTRACT, EXIT_VALIDATION, EXIT_DEGENERATE = 0, 1, 2, 3

SWEEP_COLUMNS = ["N", "d", "seed", "rho", "ratio", "guaranteed", "C_eff", "pass",
                 "status", "runtime_ms"]


class UsageError(QExpanderError):
    pass


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("--dim", type=_int_list, help="N (comma list for sweep)")
    common.add_argument("--degree", type=_int_list, help="d (comma list for sweep)")
    common.add_argument("--ensemble", choices=["haar", "weyl", "cayley", "file"], default=None)
    common.add_argument("--graph", choices=["complete", "cycle", "random"], default=None,
                        help="build a d-regular graph on --dim vertices instead of a channel")
    common.add_argument("--gens", type=_int_list, help="Cayley generators mod N, e.g. 1,4")
    common.add_argument("--in", dest="inp", help="channel or graph JSON file")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=["json", "csv"], default=None)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--tol", type=float, default=1e-9, help="tolerance for exact identities")
    common.add_argument("--est-tol", type=float, default=1e-6,
                        help="tolerance where lower-bound norm estimators take part")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--emit-projections", action="store_true")
    common.add_argument("--timing", action="store_true",
                        help="fill the sweep runtime_ms column (breaks byte determinism)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="qexpander", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in [("gen", "write a channel or graph file"),
                           ("analyze", "spectral summary of an instance"),
                           ("witness", "extract witness projections or vertex sets"),
                           ("sweep", "ensemble table over dimensions, degrees and seeds"),
                           ("verify", "run the randomized inequality suite")]:
        sub.add_parser(name, parents=[common], help=helptext)
    return p


def _single(values, flag, default=None):
    if values is None:
        if default is None:
            raise UsageError(f"{flag} is required")
        return default
    if len(values) != 1:
        raise UsageError(f"{flag} takes a single value here")
    return values[0]


def make_instance(args):
    """Channel or RegularGraph described by the flags."""
    if args.inp or args.ensemble == "file":
        if not args.inp:
            raise UsageError("--ensemble file needs --in")
        return io.load_instance(args.inp)
    if args.graph:
        n = _single(args.dim, "--dim")
        if args.graph == "complete":
            return complete_graph(n)
        if args.graph == "cycle":
            return cycle_graph(n)
        return random_regular_graph(n, _single(args.degree, "--degree"), args.seed)
    ens = args.ensemble or "haar"
    n = _single(args.dim, "--dim")
    if ens == "haar":
        return random_channel(n, _single(args.degree, "--degree"), args.seed)
    if ens == "weyl":
        return weyl_channel(n)
    if not args.gens:
        raise UsageError("--ensemble cayley needs --gens")
    return cyclic_cayley_channel(n, args.gens)


def _emit(args, payload, fmt="json"):
    if fmt == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        rows = payload if isinstance(payload, list) else [payload]
        buf = _io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args):
    inst = make_instance(args)
    doc = io.graph_to_dict(inst) if isinstance(inst, RegularGraph) else io.channel_to_dict(inst)
    _emit(args, doc)
    return EXIT_OK


def analyze_channel(T: Channel, tol=1e-9, budget=8, seed=0):
    rho = reduced_spectral_radius(T)
    mult = unit_eigen_multiplicity(T)
    tmap = as_map(T)
    return {
        "dim": T.dim, "degree": T.degree, "rho": rho, "unit_multiplicity": mult,
        "is_expander_candidate": bool(rho < 1 - tol and mult == 1),
        "diagonal_rho": diagonal_reduced_spectral_radius(T),
        "norm_estimates": {"p1": induced_norm(tmap, 1, budget, seed),
                           "p2": induced_norm(tmap, 2),
                           "pinf": induced_norm(tmap, np.inf, budget, seed)},
    }


def analyze_graph(g: RegularGraph):
    conn = g.is_connected()
    return {"n": g.n, "d": g.d, "connected": conn, "bipartite": g.is_bipartite(),
            "rho": graph_rho(g) if conn else None}


def cmd_analyze(args):
    inst = make_instance(args)
    rec = analyze_graph(inst) if isinstance(inst, RegularGraph) else \
        analyze_channel(inst, args.tol, seed=args.seed)
    if args.format == "csv":
        rec = {k: (json.dumps(v) if isinstance(v, dict) else v) for k, v in rec.items()}
    _emit(args, rec, args.format or "json")
    return EXIT_OK


def cmd_witness(args):
    inst = make_instance(args)
    if isinstance(inst, RegularGraph):
        rep = classical_subset_witnesses(inst).to_dict()
    else:
        rep = mixing_witnesses(inst).to_dict(emit_projections=args.emit_projections)
    _emit(args, rep)
    return EXIT_OK


def sweep_cell(cell):
    n, d, seed, timing = cell
    t0 = time.perf_counter()
    row = {"N": n, "d": d, "seed": seed}
    try:
        rep = mixing_witnesses(random_channel(n, d, seed))
        row.update(rho=rep.rho, ratio=rep.ratio, guaranteed=rep.guaranteed,
                   C_eff=rep.c_eff, **{"pass": rep.passed}, status="ok")
    except DegenerateChannel as exc:
        row.update(rho=exc.rho, ratio="", guaranteed="", C_eff="", **{"pass": ""},
                   status="degenerate")
    except ContractViolation as exc:
        row.update(rho=exc.diagnostics.get("rho", ""), ratio="", guaranteed="", C_eff="",
                   **{"pass": False}, status="contract_violation")
    row["runtime_ms"] = round(1000 * (time.perf_counter() - t0), 3) if timing else ""
    return {k: row[k] for k in SWEEP_COLUMNS}


def cmd_sweep(args):
    if not args.dim:
        raise UsageError("sweep needs a non-empty --dim list")
    degrees = args.degree or [3]
    trials = args.trials if args.trials is not None else 5
    if trials < 1:
        raise UsageError("--trials must be >= 1")
    cells = [(n, d, args.seed + k, args.timing) for n in args.dim for d in degrees
             for k in range(trials)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(sweep_cell, cells))
    else:
        rows = [sweep_cell(c) for c in cells]
    _emit(args, rows, args.format or "csv")
    bad = [r for r in rows if r["status"] == "contract_violation"]
    return EXIT_CONTRACT if bad else EXIT_OK


def cmd_verify(args):
    trials = args.trials if args.trials is not None else 100
    if trials < 1:
        raise UsageError("--trials must be >= 1")
    results = inequality_suite(args.seed, trials, tol=args.tol, est_tol=args.est_tol)
    if args.inp:
        T = io.load_instance(args.inp)
        if isinstance(T, Channel):
            pairs = random_projection_pairs(T.dim, trials, args.seed)
            res = check_eml(T, pairs, tol=args.tol, seed=args.seed)
            res.check = "eml_input"
            results.append(res)
    _emit(args, suite_to_json(results))
    if not suite_passed(results):
        failing = ", ".join(r.check for r in results if not r.passed)
        print(f"failing checks: {failing}", file=sys.stderr)
        return EXIT_CONTRACT
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "analyze": cmd_analyze, "witness": cmd_witness,
            "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except DegenerateChannel as exc:
        print(f"perfect mixer: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ContractViolation as exc:
        print(f"contract violation: {exc} {json.dumps(exc.diagnostics, default=str)}",
              file=sys.stderr)
        return EXIT_CONTRACT
    except (QExpanderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
