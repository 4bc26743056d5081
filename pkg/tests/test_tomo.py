import numpy as np
import pytest

from measures.magic import anti_flatness
from qlin.ops import haar_state, partial_trace_B, product_state
from tomo.estimator import (
    BlochMeasurement,
    UnphysicalBloch,
    bloch_vector,
    estimate_antiflatness,
    rho_from_bloch,
)


class TestReconstruction:
    @pytest.mark.parametrize(
        "vector, rho",
        [
            ((0, 0, 1), np.diag([1, 0])),
            ((0, 0, 0), np.eye(2) / 2),
            ((0, 0, 0.5), np.diag([0.75, 0.25])),
        ],
    )
    def test_examples(self, vector, rho):
        np.testing.assert_allclose(rho_from_bloch(BlochMeasurement(*vector)), rho, atol=1e-15)

    def test_round_trip(self, rng):
        for _ in range(20):
            rho = partial_trace_B(haar_state(rng))
            np.testing.assert_allclose(rho_from_bloch(BlochMeasurement(*bloch_vector(rho))), rho, atol=1e-12)

    def test_unphysical_exact_vector(self):
        with pytest.raises(UnphysicalBloch):
            rho_from_bloch(BlochMeasurement(0.8, 0.8, 0.0))

    def test_shot_vector_is_projected(self):
        rho = rho_from_bloch(BlochMeasurement(0.8, 0.8, 0.0, shots_per_axis=100))
        assert np.min(np.linalg.eigvalsh(rho)) >= -1e-12
        assert np.trace(rho).real == pytest.approx(1.0)


class TestEstimator:
    def test_exact_mode(self, rng):
        for _ in range(10):
            psi = haar_state(rng)
            est = estimate_antiflatness(psi, shots=None)
            assert est.estimate == pytest.approx(anti_flatness(partial_trace_B(psi)), abs=1e-12)
            assert est.std_err == 0.0
            assert est.shots is None

    def test_product_state(self):
        est = estimate_antiflatness(product_state((1, 0), (1, 1)), shots=10**6, seed=3)
        assert abs(est.estimate) <= 5 * est.std_err + 1e-12

    def test_skewed_bell(self, skewed_bell):
        est = estimate_antiflatness(skewed_bell, shots=10**6, seed=5)
        assert est.std_err > 0
        assert abs(est.estimate - 3 / 64) <= 5 * est.std_err

    def test_seeded_random_states(self, rng):
        for seed in range(20):
            psi = haar_state(rng)
            est = estimate_antiflatness(psi, shots=10**6, seed=seed)
            assert abs(est.estimate - anti_flatness(partial_trace_B(psi))) <= 5 * est.std_err + 2e-6

    def test_deterministic(self, skewed_bell):
        a = estimate_antiflatness(skewed_bell, shots=1000, seed=9)
        b = estimate_antiflatness(skewed_bell, shots=1000, seed=9)
        assert a == b

    def test_error_shrinks_with_shots(self, skewed_bell):
        truth = 3 / 64
        few = [estimate_antiflatness(skewed_bell, shots=10**4, seed=s, resamples=2).estimate for s in range(100)]
        many = [estimate_antiflatness(skewed_bell, shots=10**6, seed=s, resamples=2).estimate for s in range(100)]
        rms_few = np.sqrt(np.mean((np.array(few) - truth) ** 2))
        rms_many = np.sqrt(np.mean((np.array(many) - truth) ** 2))
        assert rms_few >= 5 * rms_many

    def test_bad_shots(self, skewed_bell):
        with pytest.raises(ValueError):
            estimate_antiflatness(skewed_bell, shots=0)
