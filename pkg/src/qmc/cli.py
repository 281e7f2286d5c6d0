"""Command-line interface.

Verbs: cmi, delta, classical, ep, family, scan, verify.  Exit codes: 0 on
success, 2 on input or validation errors, 3 when the optimizer converged on
no restart.  All numeric output is printed with 12 decimal places; CSV cells
use shortest round-trip formatting.  Every command is deterministic given its
inputs, flags, and seed.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import io
from .entropy import conditional_mutual_information
from .classical import classical_cmi, classical_relative_entropy, closest_markov
from .families import psi_x, zeta_d, cq_ensemble
from .linalg import PureState, TripartiteState
from .optimize import OptConfig, minimize_delta, minimize_ep
from .verify import run_suite

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_CONVERGENCE = 3


def _fmt(x: float) -> str:
    return f"{x:.12f}"


def _opt_config(args) -> OptConfig:
    return OptConfig(
        restarts=args.restarts,
        max_iters=args.max_iters,
        tol=args.tol,
        seed=args.seed,
        shape_mode=args.shape,
        simplex_scale=args.simplex_scale,
    )


def _add_opt_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--shape", choices=("trivial", "enumerate", "full"), default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--simplex-scale", type=float, default=0.25)
    p.add_argument("--out", default=None, help="write the full result as JSON")


def _require_tripartite(state) -> TripartiteState:
    if isinstance(state, TripartiteState):
        return state
    if isinstance(state, PureState):
        if len(state.dims) != 3:
            raise io.FileFormatError(f"field 'dims': need 3 subsystems, found {len(state.dims)}")
        return state.to_tripartite()
    _, dims = state
    raise io.FileFormatError(f"field 'dims': need 3 subsystems, found {len(dims)}")


def cmd_cmi(args) -> int:
    state = _require_tripartite(io.load_state(args.state))
    print(_fmt(conditional_mutual_information(state)))
    return EXIT_OK


def cmd_delta(args) -> int:
    state = _require_tripartite(io.load_state(args.state))
    res = minimize_delta(state, _opt_config(args))
    if args.out:
        io.save_optresult(args.out, res)
    print(f"{_fmt(res.lower_bound)} {_fmt(res.value)}")
    return EXIT_OK if res.converged else EXIT_NO_CONVERGENCE


def cmd_ep(args) -> int:
    state = io.load_state(args.state)
    if isinstance(state, PureState):
        if len(state.dims) != 2:
            raise io.FileFormatError("field 'dims': need 2 subsystems for ep")
        mat, dims = state.density(), state.dims
    elif isinstance(state, TripartiteState):
        raise io.FileFormatError("field 'dims': need 2 subsystems for ep, found 3")
    else:
        mat, dims = state
        if len(dims) != 2:
            raise io.FileFormatError(f"field 'dims': need 2 subsystems for ep, found {len(dims)}")
    res = minimize_ep(mat, dims, _opt_config(args))
    if args.out:
        io.save_optresult(args.out, res)
    print(f"{_fmt(res.lower_bound)} {_fmt(res.value)}")
    return EXIT_OK if res.converged else EXIT_NO_CONVERGENCE


def cmd_classical(args) -> int:
    joint = io.load_joint(args.dist)
    q = closest_markov(joint)
    cmi = classical_cmi(joint)
    d = classical_relative_entropy(joint, q)
    if args.project:
        io.save_joint(args.project, q)
    print(_fmt(cmi))
    print(_fmt(d.value))
    return EXIT_OK


def _build_family(args):
    if args.family == "psi-x":
        if args.x is None:
            raise io.FileFormatError("family psi-x needs --x")
        return psi_x(args.x)
    if args.family == "zeta-d":
        if args.d is None:
            raise io.FileFormatError("family zeta-d needs --d")
        return zeta_d(args.d)
    if args.family == "cq":
        if not args.spec:
            raise io.FileFormatError("family cq needs --spec pointing to its JSON description")
        import json

        with open(args.spec) as fh:
            spec = json.load(fh)
        if "probs" not in spec or "states" not in spec:
            raise io.FileFormatError("fields 'probs' and 'states' are required for family cq")
        states = [io._pairs_to_complex(v, f"states[{i}]", len(v)) for i, v in enumerate(spec["states"])]
        return cq_ensemble(spec["probs"], states)
    raise io.FileFormatError(f"unknown family {args.family!r}")


def cmd_family(args) -> int:
    fp = _build_family(args)
    payload = io.state_to_dict(fp.state)
    if args.out:
        import json

        with open(args.out, "w") as fh:
            json.dump(payload, fh, sort_keys=True)
            fh.write("\n")
    else:
        import json

        print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


SCAN_HEADER = ["param", "S_A", "S_B", "cmi", "delta_lower", "delta_upper", "delta_hat", "ratio(delta_hat/cmi)"]


def cmd_scan(args) -> int:
    try:
        if args.family == "psi-x":
            grid = [float(v) for v in args.grid.split(",") if v]
            points = [(v, psi_x(v)) for v in grid]
        elif args.family == "zeta-d":
            grid = [int(v) for v in args.grid.split(",") if v]
            points = [(v, zeta_d(v)) for v in grid]
        else:
            raise io.FileFormatError(f"family {args.family!r} cannot be scanned")
    except ValueError as exc:
        raise io.FileFormatError(f"flag --grid: {exc}") from exc
    cfg = _opt_config(args)
    rows = []
    for param, fp in points:
        state = fp.tripartite()
        res = minimize_delta(state, cfg)
        forms = fp.closed_forms
        rows.append(
            [
                param,
                forms["S_A"],
                forms["S_B"],
                forms["cmi"],
                forms["delta_lower"],
                forms["delta_upper"],
                res.value,
                res.value / forms["cmi"],
            ]
        )
    with open(args.csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCAN_HEADER)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else str(v) for v in row])
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suite(args.suite, args.seed)
    ok = True
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        print(f"[{status}] {r.name} ({r.passed}/{r.total})")
        ok = ok and r.ok
    return EXIT_OK if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmc",
        description="Distance from tripartite quantum states to quantum Markov chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cmi", help="conditional mutual information I(A:C|B) of a state file")
    p.add_argument("state")
    p.set_defaults(fn=cmd_cmi)

    p = sub.add_parser("delta", help="minimize the relative-entropy distance to Markov states")
    p.add_argument("state")
    _add_opt_flags(p)
    p.set_defaults(fn=cmd_delta)

    p = sub.add_parser("ep", help="entanglement of purification of a bipartite state file")
    p.add_argument("state")
    _add_opt_flags(p)
    p.set_defaults(fn=cmd_ep)

    p = sub.add_parser("classical", help="closest classical Markov chain and its distance")
    p.add_argument("dist")
    p.add_argument("--project", metavar="OUT", default=None, help="write the projection Q as JSON")
    p.set_defaults(fn=cmd_classical)

    p = sub.add_parser("family", help="generate a named family state as a state file")
    p.add_argument("family", choices=("psi-x", "zeta-d", "cq"))
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--spec", default=None, help="JSON description for family cq")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_family)

    p = sub.add_parser("scan", help="sweep a family over a grid, emitting plot-ready CSV")
    p.add_argument("family", choices=("psi-x", "zeta-d"))
    p.add_argument("--grid", required=True, help="comma-separated parameter values")
    p.add_argument("--csv", required=True)
    _add_opt_flags(p)
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("verify", help="run seeded invariant sweeps")
    p.add_argument("--suite", choices=("entropy", "classical", "markov", "optimizer", "all"), default="all")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (io.FileFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
