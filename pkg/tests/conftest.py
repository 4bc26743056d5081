import math

import numpy as np
import pytest

from qlin.ops import normalize, product_state

T_QUBIT = (1.0, np.exp(1j * math.pi / 4))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def t_tensor_t():
    return product_state(T_QUBIT, T_QUBIT)


@pytest.fixture
def t_tensor_zero():
    return product_state(T_QUBIT, (1.0, 0.0))


@pytest.fixture
def skewed_bell():
    """cos(t)|00> + sin(t)|11> with cos^2 t = 3/4."""
    return normalize([math.sqrt(3) / 2, 0, 0, 0.5])


@pytest.fixture
def phase_file(tmp_path):
    def write(text: str):
        path = tmp_path / "phases.csv"
        path.write_text(text, encoding="utf-8")
        return path

    return write
