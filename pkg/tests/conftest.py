import numpy as np
import pytest
from hypothesis import strategies as st

from qsmooth.algebra import QubitState


def random_state(rng: np.random.Generator, pure: bool = False) -> QubitState:
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    if not pure:
        v *= rng.random() ** (1 / 3)
    return QubitState.from_bloch(*v)


def random_effect(rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    return a @ a.conj().T


@st.composite
def bloch_vectors(draw):
    x, y, z = (draw(st.floats(-1, 1)) for _ in range(3))
    n = np.sqrt(x * x + y * y + z * z)
    if n > 1:
        x, y, z = x / n, y / n, z / n
    return x, y, z


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
