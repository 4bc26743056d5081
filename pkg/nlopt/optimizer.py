"""Non-local magic: minimum linear magic over local unitary frames U_A ⊗ U_B.

The objective is evaluated on the Pauli correlation tensor T_ij = <sigma_i ⊗ sigma_j>.
A local frame acts on it as T -> E(O_A) T E(O_B)^T, where O is the SO(3) image of the
ZYZ rotation and E embeds O next to the untouched identity index. This is the same
number as m_lin(normalize(apply(frame, psi))) without touching the state.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize
from scipy.stats import qmc

import config
from measures.magic import anti_flatness, m_lin, pauli_expectations, pauli_spectrum
from qlin.ops import Operator2, Operator4, StateLike, kron, partial_trace_B

logger = logging.getLogger(__name__)

STABILIZER_FLOOR = 1e-12
# two polished starts within this of each other found the same minimum
AGREE_FLOOR = 1e-9
# phi, theta, lambda for qubit A then qubit B
_ANGLE_SPAN = np.array([2 * math.pi, math.pi, 2 * math.pi, 2 * math.pi, math.pi, 2 * math.pi])


def local_unitary(phi: float, theta: float, lam: float) -> Operator2:
    """ZYZ Euler rotation Rz(phi) Ry(theta) Rz(lam) with Rz(a) = diag(e^{-ia/2}, e^{ia/2})."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    ry = np.array([[c, -s], [s, c]], dtype=np.complex128)
    rz_phi = np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])
    rz_lam = np.diag([np.exp(-0.5j * lam), np.exp(0.5j * lam)])
    return rz_phi @ ry @ rz_lam


def _wrap(angles: NDArray[np.float64]) -> Tuple[float, ...]:
    out = []
    for phi, theta, lam in np.asarray(angles, dtype=float).reshape(2, 3):
        theta = theta % (2 * math.pi)
        if theta > math.pi:
            # Ry(2pi - t) equals Rz(pi) Ry(t) Rz(pi) up to a global phase
            theta = 2 * math.pi - theta
            phi += math.pi
            lam += math.pi
        out.extend([phi % (2 * math.pi), theta, lam % (2 * math.pi)])
    return tuple(out)


@dataclass(frozen=True)
class LocalFrame:
    """Six ZYZ angles (phi_A, theta_A, lambda_A, phi_B, theta_B, lambda_B), radians."""

    angles: Tuple[float, ...] = (0.0,) * 6

    def __post_init__(self) -> None:
        if len(self.angles) != 6:
            raise ValueError(f"a local frame needs 6 angles, got {len(self.angles)}")
        object.__setattr__(self, "angles", _wrap(np.asarray(self.angles)))

    def operator(self) -> Operator4:
        a = self.angles
        return kron(local_unitary(*a[:3]), local_unitary(*a[3:]))

    @classmethod
    def identity(cls) -> "LocalFrame":
        return cls()


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = field(default_factory=lambda: config.NL_STARTS)
    f_tol: float = field(default_factory=lambda: config.NL_F_TOL)
    x_tol: float = field(default_factory=lambda: config.NL_X_TOL)
    max_evals: int = field(default_factory=lambda: config.NL_MAX_EVALS)
    seed: int = field(default_factory=lambda: config.SEED)
    agree: int = field(default_factory=lambda: config.NL_AGREE)

    def __post_init__(self) -> None:
        if self.starts < 1:
            raise ValueError(f"starts must be >= 1, got {self.starts}")
        if self.agree < 0:
            raise ValueError(f"agree must be >= 0, got {self.agree}")
        if self.max_evals < 1:
            raise ValueError(f"max_evals must be >= 1, got {self.max_evals}")


@dataclass(frozen=True)
class NlResult:
    m_nl: float
    frame: LocalFrame
    starts_used: int
    converged: bool


def _so3_zyz(phi: float, theta: float, lam: float) -> NDArray[np.float64]:
    cp, sp = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    cl, sl = math.cos(lam), math.sin(lam)
    return np.array(
        [
            [cp * ct * cl - sp * sl, -cp * ct * sl - sp * cl, cp * st, 0.0],
            [sp * ct * cl + cp * sl, -sp * ct * sl + cp * cl, sp * st, 0.0],
            [-st * cl, st * sl, ct, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def frame_objective(angles: NDArray[np.float64], corr: NDArray[np.float64]) -> float:
    """Linear magic of the state whose correlation tensor is `corr`, after the local frame."""
    rotated = _so3_zyz(*angles[:3]) @ corr @ _so3_zyz(*angles[3:]).T
    return 1.0 - float(np.sum(rotated**4)) / 4.0


def start_points(cfg: OptimizerConfig) -> NDArray[np.float64]:
    """Half low-discrepancy (Halton, origin skipped), half seeded-uniform starting frames."""
    n_qmc = cfg.starts // 2
    n_rand = cfg.starts - n_qmc
    blocks = []
    if n_qmc:
        engine = qmc.Halton(d=6, scramble=False)
        engine.fast_forward(1)
        blocks.append(engine.random(n_qmc) * _ANGLE_SPAN)
    rng = np.random.default_rng(cfg.seed)
    blocks.append(rng.random((n_rand, 6)) * _ANGLE_SPAN)
    return np.vstack(blocks)


def _polish(x0: NDArray[np.float64], corr: NDArray[np.float64], cfg: OptimizerConfig):
    return minimize(
        frame_objective,
        x0,
        args=(corr,),
        method="Nelder-Mead",
        options={"xatol": cfg.x_tol, "fatol": cfg.f_tol, "maxfev": cfg.max_evals},
    )


def nonlocal_magic(psi: StateLike, cfg: Optional[OptimizerConfig] = None) -> NlResult:
    """Minimize M_lin over local frames with a deterministic multi-start simplex search.

    Starts run in order until `cfg.agree` of them have landed on the running best value
    (all `cfg.starts` when agree is 0); the winner is polished once more.
    """
    cfg = cfg or OptimizerConfig()
    total = m_lin(pauli_spectrum(psi))
    if total < STABILIZER_FLOOR:
        return NlResult(m_nl=0.0, frame=LocalFrame.identity(), starts_used=0, converged=True)

    corr = pauli_expectations(psi)
    # The identity frame is a valid candidate, so the result never exceeds the total magic
    best_val, best_x = total, np.zeros(6)
    slack = max(10 * cfg.f_tol, AGREE_FLOOR)
    used = agreeing = 0
    for x0 in start_points(cfg):
        res = _polish(x0, corr, cfg)
        used += 1
        if res.fun < best_val - slack:
            agreeing = 1
        elif res.fun <= best_val + slack:
            agreeing += 1
        if res.fun < best_val:
            best_val, best_x = float(res.fun), np.asarray(res.x)
        if cfg.agree and agreeing >= cfg.agree:
            break

    final = _polish(best_x, corr, cfg)
    converged = (best_val - float(final.fun)) <= cfg.f_tol
    if final.fun < best_val:
        best_val, best_x = float(final.fun), np.asarray(final.x)
    if not converged:
        logger.warning("non-local magic search did not stabilize (best %.3e)", best_val)

    return NlResult(
        m_nl=max(best_val, 0.0),
        frame=LocalFrame(tuple(float(a) for a in best_x)),
        starts_used=used,
        converged=converged,
    )


def nl_via_antiflatness(psi: StateLike) -> float:
    """Fast path 4 * F_A(rho_A); agreement with `nonlocal_magic` is checked empirically, not assumed."""
    return 4.0 * anti_flatness(partial_trace_B(psi))
