"""Command-line driver.

Subcommands:
  simulate    integrate the flow, writing snapshots, energy.csv and run.json
  invariants  print the functional report for a curve as one JSON object
  spectrum    print the circle-linearization spectrum report
  generate    emit a curve file from a generator spec
  report      render figures from a finished simulate directory

Module errors exit nonzero with a machine-readable error name on stderr.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import complexity, curvefile, energy, flow, generators, kernels, spectrum
from .errors import KnotflowError
from .fields import distortion, reconstruct_curve


def _add_common(parser):
    parser.add_argument("--n", type=int, default=256, help="grid size (power of two)")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized inputs")
    parser.add_argument("--threads", type=int, default=1,
                        help="cap for inner-loop parallelism (results are identical)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="knotflow")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the constrained flow")
    _add_common(sim)
    sim.add_argument("--kernel", default="distortion:q=1", help="kernel spec string")
    sim.add_argument("--ic", default="circle", help="generator spec string")
    sim.add_argument("--t-final", type=float, default=1.0)
    sim.add_argument("--dt-init", type=float, default=1e-3)
    sim.add_argument("--dt-min", type=float, default=1e-12)
    sim.add_argument("--dt-max", type=float, default=0.05)
    sim.add_argument("--no-projection", action="store_true")
    sim.add_argument("--snapshots", type=int, default=5)
    sim.add_argument("--out", default="run_out", help="output directory")

    inv = sub.add_parser("invariants", help="functional report for a curve")
    _add_common(inv)
    inv.add_argument("--ic", default="circle", help="generator spec string (file:<path> for files)")
    inv.add_argument("--kernel", action="append", default=None,
                     help="kernel spec, repeatable (default: mobius and distortion:q=1)")
    inv.add_argument("--p", action="append", type=float, default=None,
                     help="crossing weight exponent, repeatable (default: 0 and 0.5)")

    spec = sub.add_parser("spectrum", help="circle linearization spectrum")
    _add_common(spec)
    spec.add_argument("--kernel", default="distortion:q=1")
    spec.add_argument("--k-max", type=int, default=64)

    gen = sub.add_parser("generate", help="emit a curve file from a generator")
    _add_common(gen)
    gen.add_argument("--ic", required=True)
    gen.add_argument("--out", required=True, help="output curve file path")

    rep = sub.add_parser("report", help="render figures for a finished run")
    rep.add_argument("--out", required=True, help="run directory holding energy.csv")
    return parser


def cmd_simulate(args) -> int:
    kernel = kernels.parse_kernel(args.kernel)
    tau0 = generators.parse_generator(args.ic, args.n)
    controls = flow.StepControls(
        dt_init=args.dt_init,
        dt_min=args.dt_min,
        dt_max=args.dt_max,
        projection_enabled=not args.no_projection,
    )
    schedule = list(np.linspace(0.0, args.t_final, max(args.snapshots, 2)))
    result = flow.run(tau0, kernel, controls, args.t_final, schedule)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for idx, (_, tau) in enumerate(result.snapshots):
        curvefile.write_curve_file(out / f"snap_{idx}.curve", tau)
    curvefile.write_energy_log(out / "energy.csv", result.log)
    final = result.final.diagnostics
    config = {
        "command": "simulate",
        "kernel": args.kernel,
        "ic": args.ic,
        "n": args.n,
        "t_final": args.t_final,
        "dt_init": args.dt_init,
        "dt_min": args.dt_min,
        "dt_max": args.dt_max,
        "projection": not args.no_projection,
        "snapshots": max(args.snapshots, 2),
        "out": str(out),
        "threads": args.threads,
        "seed": args.seed,
    }
    diagnostics = {
        "t": result.final.t,
        "steps_accepted": result.accepted,
        "steps_rejected": result.rejected,
        "e_bend": final.energy.e_bend,
        "e_interaction": final.energy.e_interaction,
        "e_total": final.energy.e_total,
        "speed_err": final.speed_err,
        "mean_err": final.mean_err,
        "distortion": final.distortion,
        "snapshot_times": [t for t, _ in result.snapshots],
    }
    curvefile.write_run_json(out / "run.json", config, diagnostics)
    print(json.dumps({"out": str(out), "t": result.final.t,
                      "e_total": final.energy.e_total}))
    return 0


def _guarded(fn):
    try:
        return fn()
    except KnotflowError as exc:
        return {"error": exc.name}


def cmd_invariants(args) -> int:
    tau = generators.parse_generator(args.ic, args.n)
    kernel_specs = args.kernel if args.kernel else ["mobius", "distortion:q=1"]
    p_list = args.p if args.p is not None else [0.0, 0.5]
    curve = reconstruct_curve(tau)

    report = {
        "ic": args.ic,
        "n": args.n,
        "distortion": _guarded(lambda: distortion(curve)),
        "E_b": _guarded(lambda: energy.bending_energy(tau)),
        "E_K": {
            spec: _guarded(lambda s=spec: energy.interaction_energy(curve, kernels.parse_kernel(s)))
            for spec in kernel_specs
        },
        "acn": _guarded(lambda: complexity.average_crossing_number(curve)),
        "c_p": {
            repr(p): _guarded(lambda p=p: complexity.crossing_integral(curve, p)) for p in p_list
        },
        "kappa_bar": {
            "1": _guarded(lambda: complexity.total_q_curvature(tau, 1.0)),
            "2": _guarded(lambda: complexity.total_q_curvature(tau, 2.0)),
        },
        "acn_bound": _guarded(lambda: _crossing_report_dict(complexity.acn_bound_check(curve))),
        "weighted_bounds": {
            repr(p): _guarded(
                lambda p=p: _crossing_report_dict(complexity.weighted_bound_check(curve, p))
            )
            for p in p_list
            if 0.0 <= p < 1.0
        },
    }
    print(json.dumps(report, indent=2))
    return 0


def _crossing_report_dict(rep) -> dict:
    return {
        "p": rep.p,
        "value": rep.value,
        "acn": rep.acn,
        "bound_rhs": rep.bound_rhs,
        "satisfied": rep.satisfied,
    }


def cmd_spectrum(args) -> int:
    kernel = kernels.parse_kernel(args.kernel)
    mats = spectrum.circle_linearization(kernel, args.k_max)
    rep = spectrum.spectrum_report(mats, kernel_label=args.kernel)
    payload = {
        "kernel": args.kernel,
        "k_max": args.k_max,
        "zero_modes": rep.zero_count,
        "spectral_gap": rep.spectral_gap,
        "stable": rep.stable,
        "modes": [
            {"k": m.k, "eigenvalues": [float(e) for e in m.eigenvalues]} for m in rep.modes
        ],
    }
    print(json.dumps(payload, indent=2))
    return 0


def cmd_generate(args) -> int:
    tau = generators.parse_generator(args.ic, args.n)
    curvefile.write_curve_file(args.out, tau)
    print(json.dumps({"out": args.out, "n": tau.n}))
    return 0


def cmd_report(args) -> int:
    from . import reporting

    written = reporting.render_run_report(args.out)
    print(json.dumps({"figures": [str(p) for p in written]}))
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "invariants": cmd_invariants,
    "spectrum": cmd_spectrum,
    "generate": cmd_generate,
    "report": cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except KnotflowError as exc:
        print(json.dumps({"error": exc.name, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
