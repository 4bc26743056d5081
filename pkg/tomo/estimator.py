"""Single-particle reconstruction of rho_A from spin expectation values, with a finite-shot estimator."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray

import config
from measures.magic import anti_flatness, anti_flatness_batch
from qlin.ops import I2, X, Y, Z, DensityMatrix2, StateLike, partial_trace_B

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-12
_SIGMAS = np.stack([X, Y, Z])


class UnphysicalBloch(ValueError):
    """Raised in exact mode for a Bloch vector longer than 1."""


@dataclass(frozen=True)
class BlochMeasurement:
    sx: float
    sy: float
    sz: float
    shots_per_axis: Optional[int] = None  # None means exact expectation values

    @property
    def vector(self) -> NDArray[np.float64]:
        return np.array([self.sx, self.sy, self.sz])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


@dataclass(frozen=True)
class TomoEstimate:
    estimate: float
    std_err: float
    bloch: Tuple[float, float, float]
    shots: Optional[int]
    projected: bool


def bloch_vector(rho: DensityMatrix2) -> NDArray[np.float64]:
    """(<X>, <Y>, <Z>) of a single-qubit density matrix."""
    return np.einsum("kab,ba->k", _SIGMAS, np.asarray(rho, dtype=np.complex128)).real


def _project(vectors: NDArray[np.float64]) -> NDArray[np.float64]:
    norms = np.linalg.norm(vectors, axis=-1, keepdims=True)
    return np.where(norms > 1.0, vectors / np.maximum(norms, 1.0), vectors)


def _rhos(vectors: NDArray[np.float64]) -> NDArray[np.complex128]:
    return 0.5 * (I2 + np.einsum("...k,kab->...ab", vectors, _SIGMAS))


def rho_from_bloch(m: BlochMeasurement) -> DensityMatrix2:
    """rho = (I + sx X + sy Y + sz Z) / 2; shot-mode vectors outside the ball are projected radially."""
    vec = m.vector
    if m.norm > 1.0 + EXACT_TOL:
        if m.shots_per_axis is None:
            raise UnphysicalBloch(f"Bloch vector norm {m.norm:.15g} exceeds 1")
        logger.debug("projecting Bloch vector of norm %.6f onto the unit sphere", m.norm)
        vec = _project(vec)
    return _rhos(vec)


def estimate_antiflatness(
    psi: StateLike,
    shots: Optional[int],
    seed: Optional[int] = None,
    resamples: Optional[int] = None,
) -> TomoEstimate:
    """Plug-in F_A from simulated per-axis spin measurements on qubit A.

    Each axis is an independent batch of `shots` projective measurements, drawn as a
    binomial with the exact marginal probability (1 + <sigma>)/2. The standard error is
    a parametric bootstrap over the same binomial model at the observed frequencies.
    With shots=None the exact expectation values are used and std_err is 0.
    """
    exact = bloch_vector(partial_trace_B(psi))
    if shots is None:
        m = BlochMeasurement(*exact)
        return TomoEstimate(
            estimate=anti_flatness(rho_from_bloch(m)),
            std_err=0.0,
            bloch=tuple(float(v) for v in exact),
            shots=None,
            projected=False,
        )
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    resamples = config.BOOTSTRAP_RESAMPLES if resamples is None else resamples
    if resamples < 2:
        raise ValueError(f"need at least 2 bootstrap resamples, got {resamples}")

    streams = np.random.SeedSequence(config.SEED if seed is None else seed).spawn(4)
    p_true = np.clip((1.0 + exact) / 2.0, 0.0, 1.0)
    counts = np.array(
        [np.random.default_rng(ss).binomial(shots, p) for ss, p in zip(streams[:3], p_true)]
    )
    observed = 2.0 * counts / shots - 1.0
    m = BlochMeasurement(*observed, shots_per_axis=shots)
    estimate = anti_flatness(rho_from_bloch(m))

    boot_rng = np.random.default_rng(streams[3])
    boot_counts = boot_rng.binomial(shots, counts / shots, size=(resamples, 3))
    boot_vectors = _project(2.0 * boot_counts / shots - 1.0)
    boot_values = anti_flatness_batch(_rhos(boot_vectors))

    return TomoEstimate(
        estimate=estimate,
        std_err=float(np.std(boot_values, ddof=1)),
        bloch=tuple(float(v) for v in observed),
        shots=shots,
        projected=m.norm > 1.0 + EXACT_TOL,
    )
