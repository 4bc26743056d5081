"""Verification suites: numerical identities and group taxonomies checked end to end"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from clifford.group import c_factor, clifford_averaged_antiflatness
from measures.ensemble import EnsembleReport, ensemble_report
from measures.magic import m_lin, pauli_spectrum
from moller.amplitude import (
    ANTI_FLATNESS_LABELS,
    final_state,
    final_states,
    group_anti_flatness,
    group_m_lin,
    theta_grid,
)
from nlopt.optimizer import OptimizerConfig, nl_via_antiflatness, nonlocal_magic
from nn.smatrix import group_closed_forms
from nn.smatrix import final_states as nn_final_states
from pipeline.processor import SweepPipeline
from qlin.ops import TwoQubitState, haar_state
from stabilizers.atlas import N_STATES, UNASSIGNED, representatives, state_matrix, taxonomy

SUITES = ("four-af", "clifford-id", "groups-nn", "groups-moller")
FOUR_AF_TOL = 1e-6
EXACT_TOL = 1e-10
ALL_INDICES = tuple(range(1, N_STATES + 1))


class VerificationFailure(RuntimeError):
    """Raised when a verification suite has a failing check; the message names the first one."""


@dataclass(frozen=True)
class Check:
    name: str
    max_dev: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_dev <= self.tol


@dataclass
class VerifyReport:
    suite: str
    checks: List[Check] = field(default_factory=list)
    info: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, deviations, tol: float) -> None:
        values = np.asarray(deviations, dtype=float).reshape(-1)
        self.checks.append(Check(name, float(np.max(values)) if values.size else 0.0, tol))

    def first_failure(self) -> Optional[Check]:
        return next((c for c in self.checks if not c.passed), None)

    def raise_for_failure(self) -> None:
        failed = self.first_failure()
        if failed is not None:
            raise VerificationFailure(
                f"{self.suite}: {failed.name} max deviation {failed.max_dev:.3e} > {failed.tol:.1e}"
            )

    def as_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "max_dev": c.max_dev, "tol": c.tol, "passed": c.passed}
                for c in self.checks
            ],
            "info": self.info,
        }

    def print_status(self) -> None:
        total = len(self.checks)
        for idx, c in enumerate(self.checks, start=1):
            mark = "✓" if c.passed else "✗"
            print(f"[{idx}/{total}] {mark} {c.name} (max dev {c.max_dev:.2e}, tol {c.tol:.0e})", file=sys.stderr, flush=True)


# ========================================
# Per-item workers (module level so process pools can pickle them)
# ========================================


def _four_af_point(psi: TwoQubitState, cfg: OptimizerConfig) -> Tuple[float, float, float, bool]:
    result = nonlocal_magic(psi, cfg)
    return result.m_nl, nl_via_antiflatness(psi), m_lin(pauli_spectrum(psi)), result.converged


def _exact_gap(psi: TwoQubitState) -> float:
    avg = clifford_averaged_antiflatness(psi, mode="exhaustive")
    return abs(avg.mean_f - c_factor(4, 2) * m_lin(pauli_spectrum(psi)))


def _sampled_z(case: Tuple[str, float], samples: Optional[int], seed: int) -> float:
    """Gap between the sampled average and c M_lin in standard errors.

    Near the guard band the final state is a stabilizer state to round-off and the
    standard error collapses with the gap, so it is floored at EXACT_TOL.
    """
    label, theta = case
    chi = final_state(theta, dict(representatives("moller"))[label])
    avg = clifford_averaged_antiflatness(chi, mode="sampled", samples=samples, seed=seed)
    gap = abs(avg.mean_f - c_factor(4, 2) * m_lin(pauli_spectrum(chi)))
    return gap / max(avg.std_err, EXACT_TOL)


def _ensemble_at(
    x: float, process: str, nl_method: str = "antiflatness", cfg: Optional[OptimizerConfig] = None
) -> EnsembleReport:
    return ensemble_report(_process_states(process)(float(x)), nl_method, cfg)


def four_af(n: int, seed: int, cfg: OptimizerConfig, pipeline: SweepPipeline) -> VerifyReport:
    """Non-local magic from the optimizer against 4 F_A on seeded Haar-random states."""
    if n < 1:
        raise ValueError(f"need at least one state, got n={n}")
    rng = np.random.default_rng(seed)
    states = [haar_state(rng) for _ in range(n)]

    results = pipeline.map(partial(_four_af_point, cfg=cfg), states, "four-af")
    m_nl, four_f, total, converged = map(np.array, zip(*results))
    report = VerifyReport("four-af")
    report.add("|m_nl - 4 f_a|", np.abs(m_nl - four_f), FOUR_AF_TOL)
    report.add("m_nl - m_lin", np.maximum(m_nl - total, 0.0), 1e-9)
    report.info = {"states": n, "seed": seed, "not_converged": int(np.count_nonzero(~converged))}
    return report


def clifford_id(
    n: int,
    seed: int,
    mode: str,
    pipeline: SweepPipeline,
    samples: Optional[int] = None,
    sigmas: float = 3.0,
    theta_points: int = 19,
) -> VerifyReport:
    """Clifford-averaged anti-flatness against c(4,2) M_lin.

    Exhaustive mode is exact on n seeded Haar-random states. Sampled mode works on the
    Møller group-5a and 5b final states over a theta grid and reports deviations in units
    of the standard error.
    """
    report = VerifyReport("clifford-id", info={"mode": mode, "seed": seed})
    if mode == "exhaustive":
        rng = np.random.default_rng(seed)
        states = [haar_state(rng) for _ in range(n)]
        report.add("|<F_A> - m_lin/10|", pipeline.map(_exact_gap, states, "clifford-id"), EXACT_TOL)
        report.info["states"] = n
        return report

    cases = [(label, float(th)) for label in ("G5a", "G5b") for th in theta_grid(theta_points)]
    z_scores = pipeline.map(partial(_sampled_z, samples=samples, seed=seed), cases, "clifford-id")
    report.add("|<F_A> - m_lin/10| / std_err", z_scores, sigmas)
    report.info["cases"] = len(cases)
    return report


def _process_states(process: str) -> Callable[[float], np.ndarray]:
    everything = state_matrix(ALL_INDICES)
    if process == "nn":
        return lambda dd: nn_final_states(0.0, dd, ALL_INDICES)
    return lambda th: final_states(th, everything)


def _grid(process: str, points: int) -> np.ndarray:
    if process == "nn":
        return np.linspace(0.0, math.pi / 2, points)
    return theta_grid(points)


def taxonomy_audit(process: str, points: int = 25) -> Dict[str, Any]:
    """Spread of final-state m_lin inside each group and the groups each unassigned state matches."""
    tax = taxonomy(process)
    evolve = _process_states(process)
    series = np.stack([ensemble_report(evolve(x), "antiflatness").m_lin for x in _grid(process, points)])
    column = {idx: series[:, idx - 1] for idx in ALL_INDICES}

    spread = {}
    for label in tax.order:
        block = np.stack([column[idx] for idx in tax.members(label)])
        spread[label] = float(np.max(np.ptp(block, axis=0)))

    unassigned = {}
    for idx in tax.unassigned():
        deviations = {
            label: float(np.max(np.abs(column[idx] - column[tax.members(label)[0]])))
            for label in tax.order
        }
        unassigned[str(idx)] = {
            "matches": [label for label, dev in deviations.items() if dev <= EXACT_TOL],
            "deviations": deviations,
        }
    return {"process": process, "points": points, "spread": spread, "unassigned": unassigned}


def _group_masks(process: str) -> Dict[str, np.ndarray]:
    tax = taxonomy(process)
    labels = np.array([tax.assignment[idx] for idx in ALL_INDICES])
    return {label: labels == label for label in tax.labels}


def groups_nn(points: int, pipeline: SweepPipeline) -> VerifyReport:
    grid = _grid("nn", points)
    reports: List[EnsembleReport] = pipeline.map(partial(_ensemble_at, process="nn"), grid, "groups-nn")
    masks = _group_masks("nn")
    tensor = np.arange(1, N_STATES + 1) <= 36

    report = VerifyReport("groups-nn", info=taxonomy_audit("nn", points))
    for label, mask in masks.items():
        spread = [np.ptp(rep.m_lin[mask]) for rep in reports]
        report.add(f"{label} m_lin spread", spread, EXACT_TOL)
        lin_dev, af_dev = [], []
        for dd, rep in zip(grid, reports):
            f_a, _, lin = group_closed_forms(float(dd), label)
            lin_dev.append(np.abs(rep.m_lin[mask] - lin))
            af_dev.append(np.abs(rep.f_a[mask & tensor] - f_a))
        report.add(f"{label} m_lin closed form", np.concatenate(lin_dev), EXACT_TOL)
        report.add(f"{label} tensor f_a closed form", np.concatenate(af_dev), EXACT_TOL)
    return report


def groups_moller(points: int, pipeline: SweepPipeline, cfg: Optional[OptimizerConfig] = None, nl_method: str = "antiflatness") -> VerifyReport:
    grid = _grid("moller", points)
    reports: List[EnsembleReport] = pipeline.map(
        partial(_ensemble_at, process="moller", nl_method=nl_method, cfg=cfg), grid, "groups-moller"
    )
    masks = _group_masks("moller")
    tensor = np.arange(1, N_STATES + 1) <= 36
    entangled_assigned = ~tensor & ~masks.get(UNASSIGNED, np.zeros(N_STATES, dtype=bool))

    report = VerifyReport("groups-moller", info=taxonomy_audit("moller", points))
    for label, mask in masks.items():
        if label == UNASSIGNED:
            continue
        report.add(f"{label} m_lin spread", [np.ptp(rep.m_lin[mask]) for rep in reports], EXACT_TOL)
        if label not in ANTI_FLATNESS_LABELS:
            continue
        lin_dev, af_dev = [], []
        for th, rep in zip(grid, reports):
            lin_dev.append(np.abs(rep.m_lin[mask & tensor] - group_m_lin(float(th), label)))
            af_dev.append(np.abs(rep.f_a[mask & tensor] - group_anti_flatness(float(th), label)))
        report.add(f"{label} tensor m_lin closed form", np.concatenate(lin_dev), EXACT_TOL)
        report.add(f"{label} tensor f_a closed form", np.concatenate(af_dev), EXACT_TOL)

    report.add("entangled e_lin = 1/2", [np.abs(rep.e_lin[entangled_assigned] - 0.5) for rep in reports], EXACT_TOL)
    report.add("entangled m_nl", [rep.m_nl[entangled_assigned] for rep in reports], FOUR_AF_TOL)
    return report
