"""Two-qubit Clifford group: tableau-deduplicated enumeration, seeded sampling, averaged anti-flatness."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Literal, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

import config
from measures.magic import PAULI_STRINGS, anti_flatness_batch
from qlin.ops import I2, IDENTITY4, Operator4, StateLike, X, Z, as_vector, dagger, kron, partial_trace_B_batch

logger = logging.getLogger(__name__)

Mode = Literal["exhaustive", "sampled"]
GROUP_ORDER = 11520

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=np.complex128)

GENERATORS: Dict[str, Operator4] = {
    "H1": kron(_H, I2),
    "H2": kron(I2, _H),
    "S1": kron(_S, I2),
    "S2": kron(I2, _S),
    "CNOT12": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
    ),
}

# XI, ZI, IX, IZ generate the Pauli group up to phase
_TABLEAU_INPUTS = np.stack([kron(X, I2), kron(Z, I2), kron(I2, X), kron(I2, Z)])
_PAULI_FLAT = PAULI_STRINGS.reshape(16, 4, 4)


class InvalidDims(ValueError):
    """Raised when (d, d_A) is not a valid bipartition of the Hilbert space dimension."""


@dataclass(frozen=True, eq=False)
class CliffordElement:
    op: Operator4
    word: Tuple[str, ...]


@dataclass(frozen=True)
class CliffordAverage:
    mean_f: float
    std_err: float
    std_dev: float
    samples: int
    mode: str


def _tableau_keys(ops: NDArray[np.complex128]) -> NDArray[np.int64]:
    """Integer key of the conjugation action on XI, ZI, IX, IZ (image index and sign)."""
    images = ops[:, None] @ _TABLEAU_INPUTS[None] @ dagger(ops)[:, None]
    overlaps = np.einsum("kab,ngba->ngk", _PAULI_FLAT, images).real / 4.0
    which = np.argmax(np.abs(overlaps), axis=-1)
    sign = np.take_along_axis(overlaps, which[..., None], axis=-1)[..., 0] < 0
    codes = which * 2 + sign
    weights = 32 ** np.arange(4)
    return codes @ weights


def tableau_key(op: Operator4) -> int:
    return int(_tableau_keys(np.asarray(op, dtype=np.complex128)[None])[0])


@lru_cache(maxsize=1)
def enumerate_cliffords() -> Tuple[CliffordElement, ...]:
    """Breadth-first closure of the generators; elements are unique modulo global phase."""
    elements = [CliffordElement(op=np.array(IDENTITY4), word=())]
    seen = {tableau_key(IDENTITY4)}
    frontier = elements
    names = list(GENERATORS)
    while frontier:
        base = np.stack([el.op for el in frontier])
        fresh = []
        for name in names:
            candidates = GENERATORS[name] @ base
            for el, op, key in zip(frontier, candidates, _tableau_keys(candidates)):
                if key in seen:
                    continue
                seen.add(int(key))
                fresh.append(CliffordElement(op=op, word=el.word + (name,)))
        elements.extend(fresh)
        frontier = fresh
    logger.info("enumerated %d two-qubit Clifford elements", len(elements))
    return tuple(elements)


@lru_cache(maxsize=1)
def clifford_stack() -> NDArray[np.complex128]:
    ops = np.stack([el.op for el in enumerate_cliffords()])
    ops.setflags(write=False)
    return ops


def sample_clifford(rng: np.random.Generator) -> CliffordElement:
    group = enumerate_cliffords()
    return group[int(rng.integers(len(group)))]


def c_factor(d: int, d_A: int) -> float:
    """Proportionality constant between the Clifford-averaged anti-flatness and linear magic."""
    if d < 2 or d_A < 2 or d % d_A:
        raise InvalidDims(f"need d, d_A >= 2 with d_A dividing d, got d={d}, d_A={d_A}")
    return (d**2 - d_A**2) * (d_A**2 - 1) / ((d**2 - 1) * (d + 2) * d_A**2)


def _antiflatness_over(ops: NDArray[np.complex128], psi: StateLike) -> NDArray[np.float64]:
    states = ops @ as_vector(psi)
    states = states / np.linalg.norm(states, axis=1, keepdims=True)
    return anti_flatness_batch(partial_trace_B_batch(states))


def clifford_averaged_antiflatness(
    psi: StateLike,
    mode: Mode = "sampled",
    samples: Optional[int] = None,
    seed: Optional[int] = None,
) -> CliffordAverage:
    ops = clifford_stack()
    if mode == "exhaustive":
        values = _antiflatness_over(ops, psi)
        return CliffordAverage(
            mean_f=float(np.mean(values)),
            std_err=0.0,
            std_dev=float(np.std(values)),
            samples=len(values),
            mode=mode,
        )
    if mode != "sampled":
        raise ValueError(f"unknown averaging mode {mode!r}")

    n = config.CLIFFORD_SAMPLES if samples is None else samples
    if n < 1:
        raise ValueError(f"samples must be >= 1, got {n}")
    rng = np.random.default_rng(config.SEED if seed is None else seed)
    values = _antiflatness_over(ops[rng.integers(len(ops), size=n)], psi)
    std_dev = float(np.std(values, ddof=1)) if n > 1 else 0.0
    return CliffordAverage(
        mean_f=float(np.mean(values)),
        std_err=std_dev / math.sqrt(n),
        std_dev=std_dev,
        samples=n,
        mode=mode,
    )
