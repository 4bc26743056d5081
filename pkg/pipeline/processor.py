"""Sweep pipeline: grid → final states → per-point dataset rows, mapped over a worker pool"""

from __future__ import annotations

import math
import sys
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from tqdm import tqdm

import config
from clifford.group import c_factor, clifford_averaged_antiflatness
from measures.ensemble import NL_METHODS, ensemble_report
from measures.magic import m_lin, pauli_spectrum
from moller.amplitude import InvalidAngle, ScatteringAngle, final_state, final_states, theta_grid
from nlopt.optimizer import OptimizerConfig
from nn.smatrix import PhaseShiftRecord, powers
from parsing.phase_shifts import load_phase_shifts
from stabilizers.atlas import (
    PROCESSES,
    entangled_indices,
    representatives,
    state_matrix,
    taxonomy,
    tensor_indices,
)

T = TypeVar("T")
R = TypeVar("R")

INITIAL_SETS = ("tensor", "entangled", "all")
CLIFFORD_MODES = ("sampled", "exhaustive")
ALL_LABEL = "ALL"

NN_COLUMNS = (
    "p_lab_MeV", "delta_diff_rad", "m_lin_bar", "m_lin_bbar",
    "m_nl_bbar", "f_a_bbar", "e_bbar", "not_converged",
)
MOLLER_COLUMNS = ("theta_rad", "group", "m_lin", "m_nl", "f_a_times4", "e_lin", "not_converged")
CLIFFORD_COLUMNS = ("theta_rad", "group", "mean_f", "std_err", "c_times_mlin")

DEFAULT_STEPS = {"nn": 101, "moller": 181}


class SweepSpecError(ValueError):
    """Raised for an inconsistent sweep request (grid, initial set, group, mode)."""


@dataclass(frozen=True)
class SweepSpec:
    process: str
    start: Optional[float] = None
    stop: Optional[float] = None
    steps: Optional[int] = None
    phase_file: Optional[Path] = None
    initial: str = "tensor"
    group: Optional[str] = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    nl_method: str = "optimize"
    clifford: Optional[str] = None
    clifford_samples: int = field(default_factory=lambda: config.CLIFFORD_SAMPLES)
    output: Optional[Path] = None
    fmt: str = "csv"

    def __post_init__(self) -> None:
        if self.process not in PROCESSES:
            raise SweepSpecError(f"unknown process {self.process!r}")
        if self.steps is not None and self.steps < 2:
            raise SweepSpecError(f"steps must be >= 2, got {self.steps}")
        if self.phase_file is not None and self.process != "nn":
            raise SweepSpecError("a phase-shift file only drives nucleon-nucleon sweeps")
        if self.initial not in INITIAL_SETS:
            raise SweepSpecError(f"unknown initial set {self.initial!r}; expected one of {INITIAL_SETS}")
        if self.group is not None and self.group not in taxonomy(self.process).labels:
            raise SweepSpecError(f"unknown {self.process} group {self.group!r}")
        if self.nl_method not in NL_METHODS:
            raise SweepSpecError(f"unknown non-local magic method {self.nl_method!r}")
        if self.clifford is not None:
            if self.process != "moller":
                raise SweepSpecError("Clifford-average sweeps are defined for Møller scattering only")
            if self.clifford not in CLIFFORD_MODES:
                raise SweepSpecError(f"unknown Clifford mode {self.clifford!r}")
        if self.fmt not in ("csv", "json"):
            raise SweepSpecError(f"unknown output format {self.fmt!r}")
        if self.process == "moller":
            for bound in (self.start, self.stop):
                if bound is not None:
                    try:
                        ScatteringAngle(bound)
                    except InvalidAngle as exc:
                        raise SweepSpecError(str(exc)) from exc

    @property
    def columns(self) -> Tuple[str, ...]:
        if self.clifford is not None:
            return CLIFFORD_COLUMNS
        return NN_COLUMNS if self.process == "nn" else MOLLER_COLUMNS

    def initial_indices(self) -> Tuple[int, ...]:
        base = {
            "tensor": tensor_indices(),
            "entangled": entangled_indices(),
            "all": tensor_indices() + entangled_indices(),
        }[self.initial]
        if self.group is None:
            return base
        members = set(taxonomy(self.process).members(self.group))
        chosen = tuple(idx for idx in base if idx in members)
        if not chosen:
            raise SweepSpecError(f"group {self.group} has no {self.initial} members")
        return chosen

    def grid(self) -> np.ndarray:
        steps = self.steps or DEFAULT_STEPS[self.process]
        if self.process == "moller":
            if self.start is None and self.stop is None:
                return theta_grid(steps)
            lo = self.start if self.start is not None else config.THETA_GUARD
            hi = self.stop if self.stop is not None else math.pi - config.THETA_GUARD
            return np.linspace(lo, hi, steps)
        lo = 0.0 if self.start is None else self.start
        hi = math.pi / 2 if self.stop is None else self.stop
        return np.linspace(lo, hi, steps)


@dataclass(frozen=True)
class SweepResult:
    columns: Tuple[str, ...]
    rows: List[Dict[str, Any]]


@dataclass
class SweepPipeline:
    threads: int = field(default_factory=lambda: config.THREADS)
    progress: bool = True
    processes: bool = field(default_factory=lambda: config.PROCESSES)

    def map(self, fn: Callable[[T], R], items: Sequence[T], desc: str = "") -> List[R]:
        """Order-preserving map; results do not depend on the worker count or kind.

        Process workers pickle `fn`, so it must be a module-level function or a
        functools.partial of one.
        """
        bar = dict(total=len(items), desc=desc, file=sys.stderr, disable=not self.progress, leave=False)
        if self.threads == 1:
            return [fn(item) for item in tqdm(items, **bar)]
        executor = ProcessPoolExecutor if self.processes else ThreadPoolExecutor
        chunk = max(1, len(items) // (4 * self.threads))
        with executor(max_workers=self.threads) as pool:
            return list(tqdm(pool.map(fn, items, chunksize=chunk), **bar))

    def run(self, spec: SweepSpec) -> SweepResult:
        if spec.clifford is not None:
            rows = _flatten(self.map(partial(clifford_rows, spec), spec.grid(), "clifford"))
        elif spec.process == "nn":
            rows = self.map(partial(nn_row, spec), _nn_points(spec), "nn")
        else:
            rows = _flatten(self.map(partial(moller_rows, spec), spec.grid(), "moller"))
        return SweepResult(columns=spec.columns, rows=rows)


def _flatten(chunks: List[List[Dict[str, Any]]]) -> List[Dict[str, Any]]:
    return [row for chunk in chunks for row in chunk]


# ========================================
# Nucleon-nucleon
# ========================================


def _nn_points(spec: SweepSpec) -> List[PhaseShiftRecord]:
    if spec.phase_file is not None:
        return load_phase_shifts(spec.phase_file)
    return [PhaseShiftRecord(p_lab=None, delta0=0.0, delta1=float(dd)) for dd in spec.grid()]


def nn_row(spec: SweepSpec, rec: PhaseShiftRecord) -> Dict[str, Any]:
    report = powers(
        rec.delta0,
        rec.delta1,
        opt_cfg=spec.optimizer,
        nl_method=spec.nl_method,
        initial=spec.initial_indices(),
    )
    return {
        "p_lab_MeV": rec.p_lab,
        "delta_diff_rad": rec.delta_diff,
        "m_lin_bar": report.m_lin_bar,
        "m_lin_bbar": report.m_lin_bbar,
        "m_nl_bbar": report.m_nl_bbar,
        "f_a_bbar": report.f_a_bbar,
        "e_bbar": report.e_bbar,
        "not_converged": report.not_converged,
    }


# ========================================
# Møller
# ========================================


def moller_rows(spec: SweepSpec, theta: float) -> List[Dict[str, Any]]:
    indices = spec.initial_indices()
    report = ensemble_report(
        final_states(theta, state_matrix(indices)), spec.nl_method, spec.optimizer
    )
    tax = taxonomy("moller")
    labels = np.array([tax.assignment[idx] for idx in indices])
    groups = [(lab, labels == lab) for lab in tax.labels if np.any(labels == lab)]
    if spec.group is None:
        groups.append((ALL_LABEL, np.ones(len(indices), dtype=bool)))

    rows = []
    for label, mask in groups:
        part = report.subset(mask)
        rows.append(
            {
                "theta_rad": float(theta),
                "group": label,
                "m_lin": part.mean("m_lin"),
                "m_nl": part.mean("m_nl"),
                "f_a_times4": 4.0 * part.mean("f_a"),
                "e_lin": part.mean("e_lin"),
                "not_converged": part.not_converged,
            }
        )
    return rows


def clifford_rows(spec: SweepSpec, theta: float) -> List[Dict[str, Any]]:
    reps = representatives("moller")
    if spec.group is not None:
        reps = [(label, psi) for label, psi in reps if label == spec.group]
        if not reps:
            raise SweepSpecError(f"group {spec.group} has no tensor-product representative")
    c = c_factor(4, 2)
    rows = []
    for label, psi in reps:
        chi = final_state(theta, psi)
        avg = clifford_averaged_antiflatness(
            chi, mode=spec.clifford, samples=spec.clifford_samples, seed=spec.optimizer.seed
        )
        rows.append(
            {
                "theta_rad": float(theta),
                "group": label,
                "mean_f": avg.mean_f,
                "std_err": avg.std_err,
                "c_times_mlin": c * m_lin(pauli_spectrum(chi)),
            }
        )
    return rows
