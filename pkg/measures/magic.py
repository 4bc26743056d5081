"""Stabilizer Rényi entropies, linear magic, anti-flatness and linear entanglement entropy."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Dict, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from qlin.ops import (
    I2,
    X,
    Y,
    Z,
    DensityMatrix2,
    StateLike,
    as_vector,
    kron,
    partial_trace_B,
)

PAULI_LABELS: Tuple[str, ...] = ("X", "Y", "Z", "I")
SINGLE_PAULIS = np.stack([X, Y, Z, I2])
# PAULI_STRINGS[i, j] = sigma_i ⊗ sigma_j in PAULI_LABELS order
PAULI_STRINGS = np.stack(
    [np.stack([kron(a, b) for b in SINGLE_PAULIS]) for a in SINGLE_PAULIS]
)
PAULI_STRINGS.setflags(write=False)

HERMITIAN_TOL = 1e-10
ROUNDOFF_FLOOR = 1e-12
D = 4


class NonHermitianExpectation(ArithmeticError):
    """Raised when a Pauli expectation has an imaginary part (unnormalized or corrupt state)."""


class AlphaOne(ValueError):
    """Raised for alpha = 1, where the Rényi form of the SRE is undefined."""


@dataclass(frozen=True, eq=False)
class PauliSpectrum:
    """Xi_P = <psi|P|psi>^2 / d over the 16 Pauli strings, indexed [i, j] in PAULI_LABELS order."""

    xi: NDArray[np.float64]
    d: int = D

    def __getitem__(self, label: str) -> float:
        i, j = (PAULI_LABELS.index(ch) for ch in label)
        return float(self.xi[i, j])

    def as_dict(self) -> Dict[str, float]:
        return {a + b: float(self.xi[i, j]) for (i, a), (j, b) in product(enumerate(PAULI_LABELS), repeat=2)}


@dataclass(frozen=True)
class MagicReport:
    m_lin: float
    m2: float
    xi_purity: float
    f_a: float
    e_lin: float


def pauli_expectations(psi: StateLike, tol: float = HERMITIAN_TOL) -> NDArray[np.float64]:
    """Real expectation values c_P = <psi|P|psi> as a 4x4 array in PAULI_LABELS order."""
    vec = as_vector(psi)
    c = np.einsum("a,ijab,b->ij", vec.conj(), PAULI_STRINGS, vec)
    worst = float(np.max(np.abs(c.imag)))
    if worst >= tol:
        raise NonHermitianExpectation(f"Pauli expectation has imaginary part {worst:.3e}")
    return c.real


def pauli_expectations_batch(states: NDArray[np.complex128]) -> NDArray[np.float64]:
    """Stacked `pauli_expectations` for an (N, 4) array; imaginary parts are dropped unchecked."""
    vecs = np.asarray(states, dtype=np.complex128).reshape(-1, 4)
    return np.einsum("na,ijab,nb->nij", vecs.conj(), PAULI_STRINGS, vecs).real


def pauli_spectrum(psi: StateLike) -> PauliSpectrum:
    c = pauli_expectations(psi)
    xi = c**2 / D
    xi.setflags(write=False)
    return PauliSpectrum(xi=xi, d=D)


def m_alpha(spec: PauliSpectrum, alpha: float) -> float:
    """Stabilizer Rényi entropy M_alpha; zero for stabilizer states."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if abs(alpha - 1.0) < 1e-9:
        raise AlphaOne("the alpha = 1 SRE is not supported; take the limit numerically")
    support = spec.xi[spec.xi > 1e-15]
    total = float(np.sum(support**alpha))
    return float(np.log2(total) / (1.0 - alpha) - np.log2(spec.d))


def stabilizer_purity(spec: PauliSpectrum) -> float:
    """xi = d * sum(Xi_P^2); equals 1 exactly on stabilizer states."""
    return float(spec.d * np.sum(spec.xi**2))


def m_lin(spec: PauliSpectrum) -> float:
    return _clamp(1.0 - stabilizer_purity(spec))


def m_lin_batch(states: NDArray[np.complex128]) -> NDArray[np.float64]:
    c = pauli_expectations_batch(states)
    values = 1.0 - np.sum(c**4, axis=(-2, -1)) / D
    return np.where((values < 0.0) & (values >= -ROUNDOFF_FLOOR), 0.0, values)


def m2_from_lin(value: float) -> float:
    return float(-np.log2(1.0 - value))


def qubit_stabilizer_purity(phi: ArrayLike) -> float:
    """Single-qubit xi (d = 2) of a normalized 2-amplitude state."""
    vec = np.asarray(phi, dtype=np.complex128).reshape(2)
    c = np.einsum("a,kab,b->k", vec.conj(), SINGLE_PAULIS, vec).real
    return float(np.sum(c**4) / 2)


def _clamp(value: float) -> float:
    if -ROUNDOFF_FLOOR <= value < 0.0:
        return 0.0
    return value


def anti_flatness(rho: DensityMatrix2) -> float:
    """Variance of the entanglement spectrum: Tr(rho^3) - (Tr rho^2)^2."""
    rho = np.asarray(rho, dtype=np.complex128)
    rho2 = rho @ rho
    tr2 = float(np.trace(rho2).real)
    tr3 = float(np.trace(rho2 @ rho).real)
    return _clamp(tr3 - tr2**2)


def linear_entropy(rho: DensityMatrix2) -> float:
    rho = np.asarray(rho, dtype=np.complex128)
    return _clamp(1.0 - float(np.trace(rho @ rho).real))


def anti_flatness_batch(rhos: NDArray[np.complex128]) -> NDArray[np.float64]:
    rho2 = rhos @ rhos
    tr2 = np.trace(rho2, axis1=-2, axis2=-1).real
    tr3 = np.trace(rho2 @ rhos, axis1=-2, axis2=-1).real
    values = tr3 - tr2**2
    return np.where((values < 0.0) & (values >= -ROUNDOFF_FLOOR), 0.0, values)


def linear_entropy_batch(rhos: NDArray[np.complex128]) -> NDArray[np.float64]:
    values = 1.0 - np.trace(rhos @ rhos, axis1=-2, axis2=-1).real
    return np.where((values < 0.0) & (values >= -ROUNDOFF_FLOOR), 0.0, values)


def magic_report(psi: StateLike) -> MagicReport:
    spec = pauli_spectrum(psi)
    lin = m_lin(spec)
    rho = partial_trace_B(psi)
    return MagicReport(
        m_lin=lin,
        m2=m2_from_lin(lin),
        xi_purity=1.0 - lin,
        f_a=anti_flatness(rho),
        e_lin=linear_entropy(rho),
    )
