"""Centre-of-momentum kinematics and the Mandelstam form of the Møller helicity amplitudes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray
from scipy import constants

from moller.amplitude import AngleLike, angle_value, helicity_matrix
from qlin.ops import Operator4

ELECTRON_MASS_MEV = constants.value("electron mass energy equivalent in MeV")
SINGULAR_FRACTION = 1e-12
_METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


class ForwardBackwardSingularity(ArithmeticError):
    """Raised when t or u vanishes (forward or backward scattering) and the amplitudes diverge."""


class HelicityAmplitudes(NamedTuple):
    rr_rr: float
    rl_rl: float
    rl_lr: float


def minkowski_square(p: NDArray[np.float64]) -> float:
    return float(p @ _METRIC @ p)


@dataclass(frozen=True)
class Kinematics:
    """Elastic 2 -> 2 scattering of equal masses; E is the total CM energy, sqrt(s)."""

    E: float
    m_e: float
    theta: float
    p1: NDArray[np.float64]
    p2: NDArray[np.float64]
    p3: NDArray[np.float64]
    p4: NDArray[np.float64]

    @classmethod
    def from_cm(cls, E: float, theta: AngleLike, m_e: float = 0.0) -> "Kinematics":
        th = angle_value(theta)
        if m_e < 0 or E < 2 * m_e or E <= 0:
            raise ValueError(f"need E > 0 and E >= 2 m_e >= 0, got E={E}, m_e={m_e}")
        half = E / 2
        p = math.sqrt(half**2 - m_e**2)
        s, c = math.sin(th), math.cos(th)
        return cls(
            E=E,
            m_e=m_e,
            theta=th,
            p1=np.array([half, 0.0, 0.0, p]),
            p2=np.array([half, 0.0, 0.0, -p]),
            p3=np.array([half, p * s, 0.0, p * c]),
            p4=np.array([half, -p * s, 0.0, -p * c]),
        )

    @classmethod
    def electrons(cls, E: float, theta: AngleLike) -> "Kinematics":
        """CM kinematics at the physical electron mass; E in MeV."""
        return cls.from_cm(E, theta, m_e=ELECTRON_MASS_MEV)

    @property
    def momentum(self) -> float:
        return float(np.linalg.norm(self.p1[1:]))

    @property
    def s(self) -> float:
        return minkowski_square(self.p1 + self.p2)

    @property
    def t(self) -> float:
        return minkowski_square(self.p1 - self.p3)

    @property
    def u(self) -> float:
        return minkowski_square(self.p1 - self.p4)


def helicity_amplitudes(s: float, t: float, u: float) -> HelicityAmplitudes:
    if abs(t) < SINGULAR_FRACTION * abs(s) or abs(u) < SINGULAR_FRACTION * abs(s):
        raise ForwardBackwardSingularity(f"t = {t:.3e}, u = {u:.3e} vanish relative to s = {s:.3e}")
    return HelicityAmplitudes(
        rr_rr=-2 * (t + u) ** 2 / (t * u),
        rl_rl=-2 * u / t,
        rl_lr=2 * t / u,
    )


def amplitude_matrix_from_mandelstam(s: float, t: float, u: float) -> Operator4:
    return helicity_matrix(*helicity_amplitudes(s, t, u))
