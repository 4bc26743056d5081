"""Low-energy S-wave nucleon-nucleon S-matrix and the complexity powers it generates.

Only the phase difference dd = delta1 - delta0 enters any measure; the overall phase
e^{2i delta0} drops out of every final state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from measures.ensemble import EnsembleReport, NlMethod, ensemble_report
from nlopt.optimizer import OptimizerConfig
from qlin.ops import Operator4
from stabilizers.atlas import N_STATES, state_matrix, tensor_indices

ALL_INDICES = tuple(range(1, N_STATES + 1))


@dataclass(frozen=True)
class PhaseShiftRecord:
    p_lab: Optional[float]  # MeV; None for a bare phase difference
    delta0: float  # rad, spin singlet
    delta1: float  # rad, spin triplet

    @property
    def delta_diff(self) -> float:
        return self.delta1 - self.delta0


@dataclass(frozen=True)
class PowerReport:
    m_lin_bar: float
    m_lin_bbar: float
    m_nl_bbar: float
    f_a_bbar: float
    e_bbar: float
    not_converged: int = 0


def s_matrix(delta0: float, delta1: float) -> Operator4:
    e0 = np.exp(2j * delta0)
    e1 = np.exp(2j * delta1)
    plus, minus = (e1 + e0) / 2, (e1 - e0) / 2
    return np.array(
        [
            [e1, 0, 0, 0],
            [0, plus, minus, 0],
            [0, minus, plus, 0],
            [0, 0, 0, e1],
        ],
        dtype=np.complex128,
    )


def final_states(delta0: float, delta1: float, indices: Tuple[int, ...]) -> NDArray[np.complex128]:
    """(N, 4) stack of S|psi_i> for the given stabilizer indices; S is unitary so rows stay normalized."""
    return state_matrix(indices) @ s_matrix(delta0, delta1).T


def final_state_report(
    delta0: float,
    delta1: float,
    indices: Tuple[int, ...],
    nl_method: NlMethod = "optimize",
    cfg: Optional[OptimizerConfig] = None,
) -> EnsembleReport:
    return ensemble_report(final_states(delta0, delta1, indices), nl_method, cfg)


def powers(
    delta0: float,
    delta1: float,
    opt_cfg: Optional[OptimizerConfig] = None,
    nl_method: NlMethod = "optimize",
    initial: Tuple[int, ...] = tensor_indices(),
) -> PowerReport:
    """Single-bar average over all 60 states; double-bar averages over `initial` (the 36 tensor products)."""
    everything = final_state_report(delta0, delta1, ALL_INDICES, nl_method="antiflatness")
    chosen = final_state_report(delta0, delta1, initial, nl_method, opt_cfg)
    return PowerReport(
        m_lin_bar=everything.mean("m_lin"),
        m_lin_bbar=chosen.mean("m_lin"),
        m_nl_bbar=chosen.mean("m_nl"),
        f_a_bbar=chosen.mean("f_a"),
        e_bbar=chosen.mean("e_lin"),
        not_converged=chosen.not_converged,
    )


def closed_forms(delta_diff: float) -> Tuple[float, float, float]:
    """(non-local magic power, total magic power, entanglement power)."""
    s2 = math.sin(2 * delta_diff) ** 2
    c4 = math.cos(4 * delta_diff)
    return (
        (11 + 5 * c4) * s2 / 48,
        3 * (3 + c4) * s2 / 20,
        s2 / 6,
    )


def tensor_magic_power(delta_diff: float) -> float:
    """36-state average total magic, (6 G2 + 24 G3) / 36."""
    return (25 + 7 * math.cos(4 * delta_diff)) * math.sin(2 * delta_diff) ** 2 / 48


def group_closed_forms(delta_diff: float, label: str) -> Tuple[float, float, float]:
    """(f_a, m_nl, m_lin) for the tensor-product members of an NN group."""
    if label == "G1":
        return 0.0, 0.0, 0.0
    if label == "G2":
        m = math.sin(4 * delta_diff) ** 2 / 4
        return m / 4, m, m
    if label == "G3":
        m_nl = (7 + math.cos(4 * delta_diff)) * math.sin(2 * delta_diff) ** 2 / 32
        return m_nl / 4, m_nl, 3 * m_nl
    raise ValueError(f"unknown NN group {label!r}")
