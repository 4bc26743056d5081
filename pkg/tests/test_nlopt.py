import math

import numpy as np
import pytest

from measures.magic import m_lin, pauli_expectations, pauli_spectrum
from nlopt.optimizer import (
    LocalFrame,
    OptimizerConfig,
    frame_objective,
    local_unitary,
    nl_via_antiflatness,
    nonlocal_magic,
    start_points,
)
from qlin.ops import apply, haar_state, haar_unitary2, is_unitary, kron, normalize
from stabilizers.atlas import atlas

FAST = OptimizerConfig(starts=12)


class TestLocalUnitary:
    def test_identity(self):
        np.testing.assert_allclose(local_unitary(0, 0, 0), np.eye(2), atol=1e-15)

    def test_half_turn(self):
        u = local_unitary(0, math.pi, 0)
        assert is_unitary(u)
        np.testing.assert_allclose(u @ [1, 0], [0, 1], atol=1e-15)

    def test_quarter_turn_on_zero(self):
        s = 1 / math.sqrt(2)
        np.testing.assert_allclose(local_unitary(0, math.pi / 2, 0) @ [1, 0], [s, s], atol=1e-15)

    def test_frame_operator_is_unitary(self, rng):
        frame = LocalFrame(tuple(rng.uniform(-10, 10, 6)))
        assert is_unitary(frame.operator())
        assert 0.0 <= frame.angles[1] <= math.pi
        assert 0.0 <= frame.angles[4] <= math.pi

    def test_frame_needs_six_angles(self):
        with pytest.raises(ValueError):
            LocalFrame((0.0, 1.0))


class TestFrameObjective:
    def test_matches_rotated_state(self, rng):
        for _ in range(10):
            psi = haar_state(rng)
            angles = rng.uniform(0, 2 * math.pi, 6)
            rotated = normalize(apply(LocalFrame(tuple(angles)).operator(), psi))
            expected = m_lin(pauli_spectrum(rotated))
            assert frame_objective(angles, pauli_expectations(psi)) == pytest.approx(expected, abs=1e-12)

    def test_start_points_are_deterministic(self):
        a = start_points(OptimizerConfig(starts=9, seed=3))
        b = start_points(OptimizerConfig(starts=9, seed=3))
        assert a.shape == (9, 6)
        np.testing.assert_array_equal(a, b)
        assert not np.allclose(a, start_points(OptimizerConfig(starts=9, seed=4)))


class TestNonlocalMagic:
    def test_stabilizers_short_circuit(self):
        for st in atlas():
            result = nonlocal_magic(st.state, FAST)
            assert result.m_nl == 0.0
            assert result.converged
            assert result.starts_used == 0

    def test_product_state_has_no_nonlocal_magic(self, t_tensor_t):
        assert nonlocal_magic(t_tensor_t).m_nl <= 1e-8

    def test_skewed_bell(self, skewed_bell):
        assert nonlocal_magic(skewed_bell).m_nl == pytest.approx(3 / 16, abs=1e-7)
        assert nl_via_antiflatness(skewed_bell) == pytest.approx(3 / 16, abs=1e-14)

    def test_fast_path_zero_cases(self, t_tensor_t):
        assert nl_via_antiflatness(t_tensor_t) == pytest.approx(0.0, abs=1e-14)
        assert nl_via_antiflatness(normalize([1, 0, 0, 1])) == pytest.approx(0.0, abs=1e-14)

    def test_four_times_antiflatness(self, rng):
        for _ in range(10):
            psi = haar_state(rng)
            result = nonlocal_magic(psi)
            assert result.m_nl == pytest.approx(nl_via_antiflatness(psi), abs=1e-6)
            assert result.m_nl <= m_lin(pauli_spectrum(psi)) + 1e-9

    def test_frame_reproduces_minimum(self, rng):
        psi = haar_state(rng)
        result = nonlocal_magic(psi, FAST)
        rotated = normalize(apply(result.frame.operator(), psi))
        assert m_lin(pauli_spectrum(rotated)) == pytest.approx(result.m_nl, abs=1e-10)

    def test_local_unitary_invariance(self, rng):
        for _ in range(3):
            psi = haar_state(rng)
            moved = normalize(apply(kron(haar_unitary2(rng), haar_unitary2(rng)), psi))
            assert nonlocal_magic(moved).m_nl == pytest.approx(nonlocal_magic(psi).m_nl, abs=1e-7)

    def test_deterministic_for_seed(self, rng):
        psi = haar_state(rng)
        first = nonlocal_magic(psi, FAST)
        second = nonlocal_magic(psi, FAST)
        assert first.m_nl == second.m_nl
        assert first.frame == second.frame

    def test_never_exceeds_identity_frame(self, rng):
        psi = haar_state(rng)
        result = nonlocal_magic(psi, OptimizerConfig(starts=1, max_evals=5))
        assert result.m_nl <= m_lin(pauli_spectrum(psi)) + 1e-12

    def test_config_validation(self):
        with pytest.raises(ValueError):
            OptimizerConfig(starts=0)
        with pytest.raises(ValueError):
            OptimizerConfig(agree=-1)
        with pytest.raises(ValueError):
            OptimizerConfig(max_evals=0)

    def test_agree_zero_runs_every_start(self, rng):
        psi = haar_state(rng)
        assert nonlocal_magic(psi, OptimizerConfig(starts=12, agree=0)).starts_used == 12

    def test_agreeing_starts_stop_early(self, rng):
        for _ in range(5):
            psi = haar_state(rng)
            full = nonlocal_magic(psi, OptimizerConfig(starts=12, agree=0))
            early = nonlocal_magic(psi, OptimizerConfig(starts=12, agree=2))
            assert 2 <= early.starts_used <= 12
            assert early.m_nl == pytest.approx(full.m_nl, abs=1e-6)
            assert early.m_nl == pytest.approx(nl_via_antiflatness(psi), abs=1e-6)
