"""The 60 two-qubit stabilizer states and their nucleon-nucleon and Møller group taxonomies."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np
from numpy.typing import NDArray

from qlin.ops import TwoQubitState, normalize

N_STATES = 60
N_TENSOR = 36
UNASSIGNED = "Unassigned"
PROCESSES = ("nn", "moller")

i = 1j
# Unnormalized amplitudes on |00>, |01>, |10>, |11>
_AMPLITUDES: Tuple[Tuple[complex, complex, complex, complex], ...] = (
    (1, 1, 1, 1), (1, -1, 1, -1), (1, 1, -1, -1), (1, -1, -1, 1),
    (1, 1, i, i), (1, -1, i, -i), (1, 1, -i, -i), (1, -1, -i, i),
    (1, 1, 0, 0), (1, -1, 0, 0), (0, 0, 1, 1), (0, 0, 1, -1),
    (1, i, 1, i), (1, -i, 1, -i), (1, i, -1, -i), (1, -i, -1, i),
    (1, i, i, -1), (1, -i, i, 1), (1, i, -i, 1), (1, -i, -i, -1),
    (1, i, 0, 0), (1, -i, 0, 0), (0, 0, 1, i), (0, 0, 1, -i),
    (1, 0, 1, 0), (0, 1, 0, 1), (1, 0, -1, 0), (0, 1, 0, -1),
    (1, 0, i, 0), (0, 1, 0, i), (1, 0, -i, 0), (0, 1, 0, -i),
    (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
    (0, 1, 1, 0), (1, 0, 0, -1), (1, 0, 0, 1), (0, 1, -1, 0),
    (1, 0, 0, i), (0, 1, i, 0), (0, 1, -i, 0), (1, 0, 0, -i),
    (1, 1, 1, -1), (1, 1, -1, 1), (1, -1, 1, 1), (1, -1, -1, -1),
    (1, i, 1, -i), (1, i, -1, i), (1, -i, 1, i), (1, -i, -1, -i),
    (1, 1, i, -i), (1, 1, -i, i), (1, -1, i, i), (1, -1, -i, -i),
    (1, i, i, 1), (1, i, -i, -1), (1, -i, i, -1), (1, -i, -i, 1),
)
del i


def _span(first: int, last: int) -> Tuple[int, ...]:
    return tuple(range(first, last + 1))


NN_GROUPS: Dict[str, Tuple[int, ...]] = {
    "G1": (1, 4, 17, 20, 33, 36) + _span(37, 41) + (44, 45, 48, 57, 60),
    "G2": (2, 3, 18, 19, 34, 35, 42, 43, 46, 47, 58, 59),
    "G3": _span(5, 16) + _span(21, 32) + _span(49, 56),
}

MOLLER_GROUPS: Dict[str, Tuple[int, ...]] = {
    "G1": (33, 36) + _span(37, 41) + (44,),
    "G2": (1, 4, 17, 20, 45, 48, 57, 60),
    "G3": (2, 3, 18, 19, 46, 47, 58, 59),
    "G4": (34, 35, 42),
    "G5a": _span(5, 8) + _span(13, 16),
    "G5b": _span(9, 12) + _span(21, 32),
    "G5ent": _span(49, 56),
}

# label -> atlas index of the representative initial state
NN_REPRESENTATIVES: Dict[str, int] = {"G1": 33, "G2": 34, "G3": 25}
MOLLER_REPRESENTATIVES: Dict[str, int] = {"G1": 33, "G2": 1, "G3": 2, "G4": 34, "G5a": 5, "G5b": 9}


class IndexOutOfRange(IndexError):
    """Raised for a stabilizer index outside 1..60."""


@dataclass(frozen=True)
class StabilizerState:
    index: int
    raw: Tuple[complex, complex, complex, complex]
    state: TwoQubitState
    entangled: bool


@dataclass(frozen=True)
class GroupTaxonomy:
    process: str
    assignment: Dict[int, str]
    order: Tuple[str, ...]

    @property
    def labels(self) -> Tuple[str, ...]:
        """Group labels in listing order, with Unassigned last when present."""
        extra = (UNASSIGNED,) if UNASSIGNED in self.assignment.values() else ()
        return self.order + extra

    def members(self, label: str) -> Tuple[int, ...]:
        return tuple(idx for idx, lab in sorted(self.assignment.items()) if lab == label)

    def unassigned(self) -> Tuple[int, ...]:
        return self.members(UNASSIGNED)


def _check_index(index: int) -> int:
    if not isinstance(index, (int, np.integer)) or not 1 <= index <= N_STATES:
        raise IndexOutOfRange(f"stabilizer index must be in 1..{N_STATES}, got {index!r}")
    return int(index)


def _check_process(process: str) -> str:
    key = process.lower()
    if key not in PROCESSES:
        raise ValueError(f"unknown process {process!r}; expected one of {PROCESSES}")
    return key


@lru_cache(maxsize=1)
def atlas() -> Tuple[StabilizerState, ...]:
    """All 60 states in table order, normalized once."""
    return tuple(
        StabilizerState(
            index=idx,
            raw=raw,
            state=normalize(np.array(raw, dtype=np.complex128)),
            entangled=idx > N_TENSOR,
        )
        for idx, raw in enumerate(_AMPLITUDES, start=1)
    )


def stabilizer(index: int) -> StabilizerState:
    return atlas()[_check_index(index) - 1]


def state_matrix(indices: Tuple[int, ...]) -> NDArray[np.complex128]:
    """(N, 4) stack of normalized amplitudes for the given atlas indices."""
    return np.stack([stabilizer(idx).state.amps for idx in indices])


def tensor_indices() -> Tuple[int, ...]:
    return _span(1, N_TENSOR)


def entangled_indices() -> Tuple[int, ...]:
    return _span(N_TENSOR + 1, N_STATES)


@lru_cache(maxsize=None)
def taxonomy(process: str) -> GroupTaxonomy:
    key = _check_process(process)
    groups = NN_GROUPS if key == "nn" else MOLLER_GROUPS
    assignment = {idx: UNASSIGNED for idx in range(1, N_STATES + 1)}
    for label, members in groups.items():
        for idx in members:
            assignment[idx] = label
    return GroupTaxonomy(process=key, assignment=assignment, order=tuple(groups))


def group_of(process: str, index: int) -> str:
    return taxonomy(process).assignment[_check_index(index)]


def representatives(process: str) -> List[Tuple[str, TwoQubitState]]:
    """Representative initial tensor-product state of each group, in label order."""
    key = _check_process(process)
    table = NN_REPRESENTATIVES if key == "nn" else MOLLER_REPRESENTATIVES
    return [(label, stabilizer(idx).state) for label, idx in table.items()]
