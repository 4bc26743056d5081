#!/usr/bin/env python3
"""
Two-qubit quantum complexity toolkit:
  magic             total / non-local magic, anti-flatness and entanglement of one state
  sweep nn|moller   figure datasets for nucleon-nucleon and Møller scattering
  clifford-average  Clifford-averaged anti-flatness of one state
  tomo              anti-flatness estimated from simulated single-spin measurements
  verify            numerical identity and taxonomy suites
  stabilizers list  the 60-state atlas
  groups nn|moller  group taxonomies (--audit for the unassigned-state report)

Sweep datasets carry a trailing not_converged column: the number of states in the row whose
non-local magic search did not stabilize (always 0 with --nl-method antiflatness).

Examples:
  python main.py magic --named T-tensor-T
  python main.py sweep nn --delta-range 0 1.5708 --steps 101 --output data/nn_powers.csv
  python main.py --threads 4 sweep moller --group G3 --theta-steps 181
  python main.py --processes verify four-af --n 1000 --seed 7
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

import config
from clifford.group import c_factor, clifford_averaged_antiflatness
from datasets.writer import FORMATS, render, write_dataset
from measures.magic import magic_report, m_lin, pauli_spectrum
from nlopt.optimizer import OptimizerConfig, nl_via_antiflatness, nonlocal_magic
from parsing.phase_shifts import NonMonotonic, ParseError, UnitError
from parsing.state_spec import NAMED_STATES, StateSpec, StateSpecError, spec_from_args
from pipeline.processor import CLIFFORD_MODES, INITIAL_SETS, SweepPipeline, SweepSpec, SweepSpecError
from pipeline import verify
from stabilizers.atlas import atlas, group_of, taxonomy
from tomo.estimator import estimate_antiflatness

logger = logging.getLogger("qmagic")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NON_MONOTONIC = 4


# ========================================
# Argument parsing
# ========================================


def _add_state_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--state", help="stabilizer index, state name or 8 comma-separated reals")
    group.add_argument("--stabilizer", metavar="INDEX", help="stabilizer atlas index 1-60")
    group.add_argument("--amps", nargs=8, metavar="X", help="re/im pairs of the 4 amplitudes")
    group.add_argument("--named", choices=NAMED_STATES)


def _add_optimizer_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--starts", type=int, default=config.NL_STARTS)
    p.add_argument("--f-tol", type=float, default=config.NL_F_TOL)
    p.add_argument("--max-evals", type=int, default=config.NL_MAX_EVALS)
    p.add_argument("--seed", type=int, default=config.SEED)
    p.add_argument("--agree", type=int, default=config.NL_AGREE,
                   help="stop after this many starts reach the best value (0 runs every start)")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", type=Path, help="dataset path (stdout when omitted)")
    p.add_argument("--format", dest="fmt", choices=FORMATS, default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmagic", description="Two-qubit magic and entanglement toolkit")
    parser.add_argument("--threads", type=int, default=None, help="worker count (default QMAGIC_THREADS)")
    parser.add_argument("--quiet", action="store_true", help="no progress bars or status lines")
    parser.add_argument("--processes", action="store_true", default=config.PROCESSES,
                        help="run workers as processes (CPU-bound sweeps and suites)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("magic", help="measures of one state")
    _add_state_args(p)
    _add_optimizer_args(p)

    p = sub.add_parser("sweep", help="figure datasets")
    procs = p.add_subparsers(dest="process", required=True)
    nn = procs.add_parser("nn")
    nn.add_argument("--delta-range", nargs=2, type=float, metavar=("LO", "HI"))
    nn.add_argument("--steps", type=int)
    nn.add_argument("--phase-file", type=Path, help="CSV p_lab_MeV,delta0_<unit>,delta1_<unit>")
    moller = procs.add_parser("moller")
    moller.add_argument("--theta-range", nargs=2, type=float, metavar=("LO", "HI"))
    moller.add_argument("--theta-steps", type=int, dest="steps")
    moller.add_argument("--clifford", choices=CLIFFORD_MODES, help="emit the Clifford-average variant")
    moller.add_argument("--samples", type=int, default=config.CLIFFORD_SAMPLES)
    for sp in (nn, moller):
        sp.add_argument("--initial", choices=INITIAL_SETS, default="tensor")
        sp.add_argument("--group")
        sp.add_argument("--nl-method", choices=("optimize", "antiflatness"), default="optimize")
        _add_optimizer_args(sp)
        _add_output_args(sp)

    p = sub.add_parser("clifford-average", help="Clifford-averaged anti-flatness")
    _add_state_args(p)
    p.add_argument("--mode", choices=CLIFFORD_MODES, default="sampled")
    p.add_argument("--samples", type=int, default=config.CLIFFORD_SAMPLES)
    p.add_argument("--seed", type=int, default=config.SEED)

    p = sub.add_parser("tomo", help="anti-flatness from simulated spin measurements")
    _add_state_args(p)
    p.add_argument("--shots", type=int, help="shots per axis (exact expectation values when omitted)")
    p.add_argument("--seed", type=int, default=config.SEED)
    p.add_argument("--resamples", type=int, default=config.BOOTSTRAP_RESAMPLES)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=verify.SUITES)
    p.add_argument("--n", type=int, default=1000, help="random states (four-af, clifford-id)")
    p.add_argument("--points", type=int, default=25, help="grid points (groups-*)")
    p.add_argument("--mode", choices=CLIFFORD_MODES, default="exhaustive")
    p.add_argument("--samples", type=int, default=config.CLIFFORD_SAMPLES)
    p.add_argument("--sigmas", type=float, default=3.0)
    p.add_argument("--nl-method", choices=("optimize", "antiflatness"), default="antiflatness",
                   help="non-local magic path for groups-moller")
    _add_optimizer_args(p)

    p = sub.add_parser("stabilizers", help="stabilizer atlas")
    p.add_argument("action", choices=("list",))

    p = sub.add_parser("groups", help="group taxonomies")
    p.add_argument("process", choices=("nn", "moller"))
    p.add_argument("--audit", action="store_true")
    p.add_argument("--points", type=int, default=25)
    return parser


def _optimizer(args: argparse.Namespace) -> OptimizerConfig:
    return OptimizerConfig(
        starts=args.starts, f_tol=args.f_tol, max_evals=args.max_evals, seed=args.seed, agree=args.agree
    )


def _state(args: argparse.Namespace) -> StateSpec:
    return spec_from_args(state=args.state, stabilizer_index=args.stabilizer, amps=args.amps, named=args.named)


def _emit(payload: Any) -> None:
    print(json.dumps(payload, indent=2, ensure_ascii=False))


# ========================================
# Commands
# ========================================


def cmd_magic(args: argparse.Namespace) -> int:
    spec = _state(args)
    psi = spec.resolve()
    report = magic_report(psi)
    cfg = _optimizer(args)
    nl = nonlocal_magic(psi, cfg)
    _emit(
        {
            "state": spec.describe(),
            "m_lin": report.m_lin,
            "m2": report.m2,
            "xi_purity": report.xi_purity,
            "f_a": report.f_a,
            "e_lin": report.e_lin,
            "m_nl": nl.m_nl,
            "nl_via_antiflatness": nl_via_antiflatness(psi),
            "optimizer": {
                "starts": cfg.starts,
                "starts_used": nl.starts_used,
                "f_tol": cfg.f_tol,
                "x_tol": cfg.x_tol,
                "max_evals": cfg.max_evals,
                "seed": cfg.seed,
                "agree": cfg.agree,
                "converged": nl.converged,
                "frame": list(nl.frame.angles),
            },
        }
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, pipeline: SweepPipeline) -> int:
    if args.process == "nn":
        rng = args.delta_range
        if args.phase_file is not None and (rng is not None or args.steps is not None):
            raise SweepSpecError("--phase-file replaces --delta-range/--steps")
        extra = {"phase_file": args.phase_file}
    else:
        rng = args.theta_range
        extra = {"clifford": args.clifford, "clifford_samples": args.samples}
    spec = SweepSpec(
        process=args.process,
        start=rng[0] if rng else None,
        stop=rng[1] if rng else None,
        steps=args.steps,
        initial=args.initial,
        group=args.group,
        optimizer=_optimizer(args),
        nl_method=args.nl_method,
        output=args.output,
        fmt=args.fmt,
        **extra,
    )
    result = pipeline.run(spec)
    if spec.output is None:
        sys.stdout.write(render(result.columns, result.rows, spec.fmt))
        target = "stdout"
    else:
        write_dataset(spec.output, result.columns, result.rows, spec.fmt)
        target = str(spec.output)
    if not args.quiet:
        print(f"✓ {len(result.rows)} rows → {target}", file=sys.stderr, flush=True)
    return EXIT_OK


def cmd_clifford_average(args: argparse.Namespace) -> int:
    psi = _state(args).resolve()
    avg = clifford_averaged_antiflatness(psi, mode=args.mode, samples=args.samples, seed=args.seed)
    _emit(
        {
            "mean_f": avg.mean_f,
            "std_err": avg.std_err,
            "std_dev": avg.std_dev,
            "samples": avg.samples,
            "mode": avg.mode,
            "c_times_mlin": c_factor(4, 2) * m_lin(pauli_spectrum(psi)),
        }
    )
    return EXIT_OK


def cmd_tomo(args: argparse.Namespace) -> int:
    psi = _state(args).resolve()
    est = estimate_antiflatness(psi, shots=args.shots, seed=args.seed, resamples=args.resamples)
    _emit(
        {
            "estimate": est.estimate,
            "std_err": est.std_err,
            "bloch": list(est.bloch),
            "shots": est.shots,
            "projected": est.projected,
        }
    )
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, pipeline: SweepPipeline) -> int:
    if args.suite == "four-af":
        report = verify.four_af(args.n, args.seed, _optimizer(args), pipeline)
    elif args.suite == "clifford-id":
        report = verify.clifford_id(
            args.n, args.seed, args.mode, pipeline, samples=args.samples, sigmas=args.sigmas
        )
    elif args.suite == "groups-nn":
        report = verify.groups_nn(args.points, pipeline)
    else:
        report = verify.groups_moller(args.points, pipeline, cfg=_optimizer(args), nl_method=args.nl_method)

    if not args.quiet:
        report.print_status()
    _emit(report.as_dict())
    report.raise_for_failure()
    return EXIT_OK


def cmd_stabilizers(args: argparse.Namespace) -> int:
    columns = ["index"]
    for basis in ("00", "01", "10", "11"):
        columns += [f"re_{basis}", f"im_{basis}"]
    columns += ["entangled", "nn_group", "moller_group"]
    rows: List[Dict[str, Any]] = []
    for st in atlas():
        row: Dict[str, Any] = {"index": st.index}
        for basis, amp in zip(("00", "01", "10", "11"), st.state.amps):
            row[f"re_{basis}"] = float(amp.real)
            row[f"im_{basis}"] = float(amp.imag)
        row.update(entangled=st.entangled, nn_group=group_of("nn", st.index), moller_group=group_of("moller", st.index))
        rows.append(row)
    sys.stdout.write(render(columns, rows, "csv"))
    return EXIT_OK


def cmd_groups(args: argparse.Namespace) -> int:
    if args.audit:
        _emit(verify.taxonomy_audit(args.process, args.points))
        return EXIT_OK
    tax = taxonomy(args.process)
    rows = [{"index": idx, "group": label} for idx, label in sorted(tax.assignment.items())]
    sys.stdout.write(render(("index", "group"), rows, "csv"))
    return EXIT_OK


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else config.LOG_LEVEL,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    threads = config.THREADS if args.threads is None else args.threads
    try:
        if threads < 1:
            raise SweepSpecError(f"--threads must be >= 1, got {threads}")
        pipeline = SweepPipeline(threads=threads, progress=not args.quiet, processes=args.processes)
        logger.debug("%s on %d %s", args.command, threads, "process(es)" if args.processes else "thread(s)")
        if args.command == "magic":
            return cmd_magic(args)
        if args.command == "sweep":
            return cmd_sweep(args, pipeline)
        if args.command == "clifford-average":
            return cmd_clifford_average(args)
        if args.command == "tomo":
            return cmd_tomo(args)
        if args.command == "verify":
            return cmd_verify(args, pipeline)
        if args.command == "stabilizers":
            return cmd_stabilizers(args)
        return cmd_groups(args)
    except verify.VerificationFailure as exc:
        print(f"✗ {exc}", file=sys.stderr, flush=True)
        return EXIT_VERIFY_FAILED
    except NonMonotonic as exc:
        print(f"✗ {exc}", file=sys.stderr, flush=True)
        return EXIT_NON_MONOTONIC
    except OSError as exc:
        print(f"✗ I/O error: {exc}", file=sys.stderr, flush=True)
        return EXIT_IO
    except (StateSpecError, SweepSpecError, ParseError, UnitError, ValueError) as exc:
        print(f"✗ {exc}", file=sys.stderr, flush=True)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
