"""Command-line interface: analyze named states, scan thresholds, export
polytope geometry, simulate measurements and reproduce the reference table.

Exit codes: 0 success, 2 usage error, 3 capacity (dimension guard) error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .criteria import (
    evaluate_coordinate_free,
    evaluate_optimal_set,
    mapped_criteria,
    squeezing_parameters,
)
from .measurement import estimate_moment_set, simulate_population_measurement
from .moments import moment_matrices, moment_set
from .pipeline import named_hamiltonian, noise_threshold, reference_table, temperature_thresholds
from .polytope import facet_mesh, membership, vertices
from .spin_core import HalfInt
from .states import CapacityError, EnsembleShape, load_state


def _common_flags(sub: argparse.ArgumentParser):
    sub.add_argument("--json", metavar="PATH", help="write the JSON report to PATH instead of stdout")
    sub.add_argument("--seed", type=int, default=0, help="random seed where sampling is involved")
    sub.add_argument("--guard-dim", type=int, default=None, help="override the total-dimension guard")


def _shape_args(sub: argparse.ArgumentParser):
    sub.add_argument("--j", required=True, help="spin per particle, e.g. 1/2, 1, 3/2")
    sub.add_argument("--N", required=True, type=int, help="particle count")


def _shape_from(args) -> EnsembleShape:
    return EnsembleShape.make(args.N, HalfInt.of(args.j), args.guard_dim)


def _cmd_analyze(args) -> dict:
    state = load_state(args.state, args.guard_dim)
    perm = tuple(args.perm)
    if sorted(perm) != ["x", "y", "z"]:
        raise ValueError(f"--perm must be a permutation of xyz, got {args.perm!r}")
    m = moment_set(state)
    report = evaluate_optimal_set(m)
    ci = evaluate_coordinate_free(moment_matrices(state))
    return {
        "schema": 1,
        "state": args.state,
        "shape": {"N": state.shape.N, "two_j": state.shape.j.twice},
        "moments": m.to_json(),
        "criteria": report.to_json(),
        "coordinate_free": ci.to_json(),
        "squeezing": squeezing_parameters(m, perm).to_json(),
        "mapped": mapped_criteria(m).to_json(),
        "entangled": report.entangled or ci.entangled,
    }


def _cmd_scan_noise(args) -> dict:
    state = load_state(args.state, args.guard_dim)
    result = noise_threshold(state, args.criterion, args.tol)
    return {"schema": 1, "state": args.state, "scan": result.to_json()}


def _cmd_scan_temperature(args) -> dict:
    shape = _shape_from(args)
    H = named_hamiltonian(args.H, shape)
    out = temperature_thresholds(H, shape, (args.t_min, args.t_max), args.tol)
    return {
        "schema": 1,
        "H": args.H,
        "shape": {"N": shape.N, "two_j": shape.j.twice},
        "T_s": out["T_s"].to_json(),
        "T_ppt": out["T_ppt"].to_json(),
    }


def _cmd_polytope(args) -> dict:
    shape = _shape_from(args)
    jvec = [float(x) for x in args.jvec.split(",")]
    verts = vertices(shape, jvec)
    if args.vertices_csv:
        with open(args.vertices_csv, "w", encoding="utf-8") as fh:
            fh.write("vertex,Jt2_x,Jt2_y,Jt2_z\n")
            for name, coords in verts.to_json()["vertices"].items():
                fh.write(f"{name},{coords[0]},{coords[1]},{coords[2]}\n")
    if args.mesh_csv:
        with open(args.mesh_csv, "w", encoding="utf-8") as fh:
            fh.write("facet,Jt2_x,Jt2_y,Jt2_z\n")
            for facet, x, y, z in facet_mesh(verts, args.mesh_points):
                fh.write(f"{facet},{x},{y},{z}\n")
    payload = verts.to_json()
    if args.state:
        m = moment_set(load_state(args.state, args.guard_dim))
        payload["membership"] = membership(m).to_json()
    return payload


def _cmd_measure(args) -> dict:
    state = load_state(args.state, args.guard_dim)
    record = simulate_population_measurement(state, args.axis, args.shots, args.seed)
    if args.csv:
        record.to_csv(args.csv)
    payload = record.to_json()
    if args.estimates:
        payload["estimates"] = estimate_moment_set(state, args.shots, args.seed).to_json()
    return payload


def _cmd_table1(args) -> dict:
    return reference_table(_shape_from(args))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsq",
        description="Collective-moment entanglement criteria for spin ensembles.",
        epilog=(
            "States are named specs like \"dicke:N=3,j=1,mz=0\", "
            "\"singlet:j=1,N=2\", \"coherent:j=1,N=4,dir=0,0,1\", "
            "\"mixed:j=1,N=2\", \"alpha:N=3,alpha=0.75\", "
            "\"ground:H=h5,j=1/2,N=5\", \"thermal:H=bes,j=1,N=3,T=3.0\"; "
            "append noise=p for white-noise mixing, or use @file.json."
        ),
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analyze", help="criteria and squeezing report for a state")
    p.add_argument("--state", required=True)
    p.add_argument("--perm", default="xyz", help="squeezing axis permutation (k,l,m)")
    _common_flags(p)
    p.set_defaults(func=_cmd_analyze)

    p = subs.add_parser("scan-noise", help="bisect the white-noise detection threshold")
    p.add_argument("--state", required=True)
    p.add_argument("--criterion", default="any")
    p.add_argument("--tol", type=float, default=1e-6)
    _common_flags(p)
    p.set_defaults(func=_cmd_scan_noise)

    p = subs.add_parser("scan-temperature", help="bisect thermal detection thresholds")
    p.add_argument("--H", default="bes", help="named Hamiltonian: bes or h5")
    _shape_args(p)
    p.add_argument("--t-min", type=float, default=1.0)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--tol", type=float, default=1e-3)
    _common_flags(p)
    p.set_defaults(func=_cmd_scan_temperature)

    p = subs.add_parser("polytope", help="vertices and facet mesh of the moment polytope")
    _shape_args(p)
    p.add_argument("--jvec", default="0,0,0", help="mean spin vector, e.g. 0,0,8")
    p.add_argument("--vertices-csv", metavar="PATH")
    p.add_argument("--mesh-csv", metavar="PATH")
    p.add_argument("--mesh-points", type=int, default=8)
    p.add_argument("--state", help="optionally report membership of this state")
    _common_flags(p)
    p.set_defaults(func=_cmd_polytope)

    p = subs.add_parser("measure", help="simulate the population measurement")
    p.add_argument("--state", required=True)
    p.add_argument("--axis", default="z")
    p.add_argument("--shots", type=int, default=100)
    p.add_argument("--csv", metavar="PATH", help="write per-shot populations to PATH")
    p.add_argument("--estimates", action="store_true", help="also estimate the moment set")
    _common_flags(p)
    p.set_defaults(func=_cmd_measure)

    p = subs.add_parser("table1", help="closed-form reference moments vs extraction")
    _shape_args(p)
    _common_flags(p)
    p.set_defaults(func=_cmd_table1)

    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        payload = args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(payload, indent=2)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
