"""Per-state complexity measures over a stack of final states, with set averages."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from numpy.typing import NDArray

from measures.magic import anti_flatness_batch, linear_entropy_batch, m_lin_batch
from nlopt.optimizer import OptimizerConfig, nonlocal_magic
from qlin.ops import partial_trace_B_batch

NlMethod = Literal["optimize", "antiflatness"]
NL_METHODS = ("optimize", "antiflatness")


@dataclass(frozen=True)
class EnsembleReport:
    m_lin: NDArray[np.float64]
    m_nl: NDArray[np.float64]
    f_a: NDArray[np.float64]
    e_lin: NDArray[np.float64]
    converged: NDArray[np.bool_]

    @property
    def not_converged(self) -> int:
        return int(np.count_nonzero(~self.converged))

    def __len__(self) -> int:
        return len(self.m_lin)

    def subset(self, mask: NDArray[np.bool_]) -> "EnsembleReport":
        return EnsembleReport(
            m_lin=self.m_lin[mask],
            m_nl=self.m_nl[mask],
            f_a=self.f_a[mask],
            e_lin=self.e_lin[mask],
            converged=self.converged[mask],
        )

    def mean(self, field: str) -> float:
        values = getattr(self, field)
        return float(np.mean(values)) if len(values) else 0.0


def ensemble_report(
    states: NDArray[np.complex128],
    nl_method: NlMethod = "optimize",
    cfg: Optional[OptimizerConfig] = None,
) -> EnsembleReport:
    """Measures for each row of an (N, 4) array of normalized states."""
    if nl_method not in NL_METHODS:
        raise ValueError(f"unknown non-local magic method {nl_method!r}")
    states = np.asarray(states, dtype=np.complex128).reshape(-1, 4)
    rhos = partial_trace_B_batch(states)
    f_a = anti_flatness_batch(rhos)

    converged = np.ones(len(states), dtype=bool)
    if nl_method == "antiflatness":
        m_nl = 4.0 * f_a
    else:
        cfg = cfg or OptimizerConfig()
        m_nl = np.empty(len(states))
        for k, psi in enumerate(states):
            result = nonlocal_magic(psi, cfg)
            m_nl[k] = result.m_nl
            converged[k] = result.converged

    return EnsembleReport(
        m_lin=m_lin_batch(states),
        m_nl=m_nl,
        f_a=f_a,
        e_lin=linear_entropy_batch(rhos),
        converged=converged,
    )
