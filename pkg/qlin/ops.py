"""Exact-size complex linear algebra for one- and two-qubit Hilbert spaces.

Basis ordering is fixed to {|00>, |01>, |10>, |11>} with |0> = |up>, |1> = |down>;
qubit A is the left tensor factor. Every matrix in the toolkit (S-matrix, Møller
amplitude, Clifford elements) is written in this ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import unitary_group

Operator2 = NDArray[np.complex128]
Operator4 = NDArray[np.complex128]
DensityMatrix2 = NDArray[np.complex128]

DEFAULT_TOL = 1e-12
ZERO_NORM = 1e-14
_NORM_SLACK = 4 * np.finfo(float).eps


class ZeroVector(ValueError):
    """Raised when a vector is annihilated (norm below threshold) and cannot be normalized."""


def _frozen(values: ArrayLike) -> NDArray[np.complex128]:
    arr = np.array(values, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


I2 = _frozen([[1, 0], [0, 1]])
X = _frozen([[0, 1], [1, 0]])
Y = _frozen([[0, -1j], [1j, 0]])
Z = _frozen([[1, 0], [0, -1]])
IDENTITY4 = _frozen(np.eye(4))


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Immutable 4-amplitude two-qubit state. Build it through `normalize`."""

    amps: NDArray[np.complex128]

    def __post_init__(self) -> None:
        arr = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if arr.shape != (4,):
            raise ValueError(f"two-qubit state needs 4 amplitudes, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("state amplitudes must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "amps", arr)

    def __repr__(self) -> str:
        body = ", ".join(f"{a.real:+.6f}{a.imag:+.6f}j" for a in self.amps)
        return f"TwoQubitState([{body}])"


StateLike = Union[TwoQubitState, ArrayLike]


def as_vector(psi: StateLike) -> NDArray[np.complex128]:
    if isinstance(psi, TwoQubitState):
        return psi.amps
    return np.asarray(psi, dtype=np.complex128).reshape(-1)


def kron(a: Operator2, b: Operator2) -> Operator4:
    """Tensor product a ⊗ b, a acting on qubit A (the left index)."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def apply(op: Operator4, psi: StateLike) -> NDArray[np.complex128]:
    """Matrix-vector product; the result is NOT normalized."""
    return np.asarray(op, dtype=np.complex128) @ as_vector(psi)


def normalize(v: StateLike, tol: float = ZERO_NORM) -> TwoQubitState:
    """Scale to unit norm and fix the global phase.

    The first amplitude with modulus above DEFAULT_TOL is made real and non-negative,
    so equal rays compare equal. Idempotent bit-for-bit.
    """
    vec = np.array(as_vector(v), dtype=np.complex128)
    if vec.shape != (4,):
        raise ValueError(f"expected a 4-vector, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValueError("cannot normalize a vector with non-finite entries")

    norm = float(np.linalg.norm(vec))
    if math.isinf(norm):
        # finite entries whose norm overflows; bring the largest component to 1 first
        vec = vec / max(np.max(np.abs(vec.real)), np.max(np.abs(vec.imag)))
        norm = float(np.linalg.norm(vec))
    if norm <= tol:
        raise ZeroVector(f"vector norm {norm:.3e} <= {tol:.1e}")
    if abs(norm - 1.0) > _NORM_SLACK:
        vec = vec / norm

    lead_idx = int(np.flatnonzero(np.abs(vec) > DEFAULT_TOL)[0])
    lead = vec[lead_idx]
    if lead.imag != 0.0 or lead.real < 0.0:
        vec = vec * (abs(lead) / lead)
        vec[lead_idx] = abs(lead)
    return TwoQubitState(vec)


def dagger(op: NDArray[np.complex128]) -> NDArray[np.complex128]:
    return np.conj(np.swapaxes(op, -1, -2))


def is_unitary(op: NDArray[np.complex128], tol: float = DEFAULT_TOL) -> bool:
    op = np.asarray(op, dtype=np.complex128)
    return bool(np.allclose(dagger(op) @ op, np.eye(op.shape[-1]), atol=tol, rtol=0.0))


def partial_trace_B(psi: StateLike) -> DensityMatrix2:
    """Reduced density matrix of qubit A: rho_A = Tr_B |psi><psi|."""
    m = as_vector(psi).reshape(2, 2)
    return m @ m.conj().T


def partial_trace_B_batch(states: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """Stacked version of `partial_trace_B` for an (N, 4) array of normalized states."""
    m = np.asarray(states, dtype=np.complex128).reshape(-1, 2, 2)
    return m @ dagger(m)


def product_state(a: ArrayLike, b: ArrayLike) -> TwoQubitState:
    """Normalized |a> ⊗ |b> from two single-qubit amplitude pairs."""
    return normalize(np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128)))


def haar_state(rng: np.random.Generator) -> TwoQubitState:
    """Haar-random pure two-qubit state (normalized complex Gaussian)."""
    raw = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    return normalize(raw)


def haar_unitary2(rng: np.random.Generator) -> Operator2:
    return np.asarray(unitary_group.rvs(2, random_state=rng), dtype=np.complex128)
