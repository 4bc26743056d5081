"""High-energy Møller scattering in the helicity basis.

Helicity states RR, RL, LR, LL map onto |00>, |01>, |10>, |11>. Overall couplings and
signs are dropped because every final state is renormalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.typing import NDArray

import config
from qlin.ops import Operator4, StateLike, TwoQubitState, apply, normalize

ANTI_FLATNESS_LABELS = ("G1", "G2", "G3", "G4", "G5a", "G5b")
# the 5a/5b/entangled split shares the group-5 total magic
_G5_FAMILY = ("G5", "G5a", "G5b", "G5ent")


class InvalidAngle(ValueError):
    """Raised for a scattering angle outside the guarded open interval (0, pi)."""


@dataclass(frozen=True)
class ScatteringAngle:
    theta: float
    guard: float = field(default_factory=lambda: config.THETA_GUARD)

    def __post_init__(self) -> None:
        theta = float(self.theta)
        if not math.isfinite(theta) or not self.guard <= theta <= math.pi - self.guard:
            raise InvalidAngle(
                f"theta = {self.theta!r} rad lies outside [{self.guard:g}, pi - {self.guard:g}]"
            )
        object.__setattr__(self, "theta", theta)


AngleLike = Union[ScatteringAngle, float]


def angle_value(angle: AngleLike) -> float:
    if isinstance(angle, ScatteringAngle):
        return angle.theta
    return ScatteringAngle(angle).theta


def theta_grid(steps: int, guard: float | None = None) -> NDArray[np.float64]:
    """Evenly spaced interior angles from guard to pi - guard inclusive."""
    if steps < 2:
        raise ValueError(f"need at least 2 angles, got {steps}")
    guard = config.THETA_GUARD if guard is None else guard
    return np.linspace(guard, math.pi - guard, steps)


def helicity_matrix(rr_rr: float, rl_rl: float, rl_lr: float) -> Operator4:
    """Symmetric amplitude matrix from the three non-vanishing helicity amplitudes."""
    return np.array(
        [
            [rr_rr, 0, 0, 0],
            [0, rl_rl, rl_lr, 0],
            [0, rl_lr, rl_rl, 0],
            [0, 0, 0, rr_rr],
        ],
        dtype=np.complex128,
    )


def amplitude_matrix(theta: AngleLike) -> Operator4:
    th = angle_value(theta)
    return helicity_matrix(
        -8.0 / math.sin(th) ** 2,
        -2.0 / math.tan(th / 2) ** 2,
        2.0 * math.tan(th / 2) ** 2,
    )


def final_state(theta: AngleLike, psi: StateLike) -> TwoQubitState:
    return normalize(apply(amplitude_matrix(theta), psi))


def final_states(theta: AngleLike, states: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """Row-wise `final_state` for an (N, 4) stack."""
    out = np.asarray(states, dtype=np.complex128) @ amplitude_matrix(theta).T
    return np.stack([normalize(row).amps for row in out])


def group_m_lin(theta: AngleLike, label: str) -> float:
    """Closed-form total linear magic of the tensor-product members of a Møller group."""
    th = angle_value(theta)
    s, c2, c4 = math.sin(th), math.cos(2 * th), math.cos(4 * th)
    if label == "G1":
        return 0.0
    if label == "G2":
        return 64 * s**4 * math.cos(th) ** 2 / (c2 + 3) ** 4
    if label == "G3":
        return 1024 * s**4 * (20 * c2 + c4 + 43) ** 2 / (12 * c2 + c4 + 51) ** 4
    if label == "G4":
        x8 = (1.0 / math.tan(th / 2)) ** 8
        return 4 * x8 * (x8 - 1) ** 2 / (x8 + 1) ** 4
    if label in _G5_FAMILY:
        c6 = math.cos(6 * th)
        return 32 * s**4 * (799 * c2 - 10 * c4 + c6 + 1258) / (c2 + 7) ** 6
    raise ValueError(f"unknown Møller group {label!r}")


def group_nonlocal_magic(theta: AngleLike, label: str) -> float:
    """Closed-form non-local magic (= 4 F_A) of the tensor-product members of a Møller group."""
    th = angle_value(theta)
    if label in ("G1", "G2", "G3", "G4"):
        return group_m_lin(th, label)
    s, c2, c4, c6 = math.sin(th), math.cos(2 * th), math.cos(4 * th), math.cos(6 * th)
    if label == "G5a":
        return 256 * s**4 * (c2 + 15) ** 2 * (28 * c2 + c4 + 35) / (c2 + 7) ** 8
    if label == "G5b":
        return 128 * s**8 * (175 * c2 + 18 * c4 + c6 + 318) / (c2 + 7) ** 8
    raise ValueError(f"no anti-flatness closed form for Møller group {label!r}")


def group_anti_flatness(theta: AngleLike, label: str) -> float:
    return group_nonlocal_magic(theta, label) / 4.0
