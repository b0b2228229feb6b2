import numpy as np
import pytest

from nspkit.generators import make_rng


# the three-dimensional worked example used throughout the suite
EXAMPLE_Q = np.array([[3.0, 1.0, -2.0], [1.0, 1.0, -1.0], [-2.0, -1.0, 1.0]])
EXAMPLE_U = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
EXAMPLE_V = np.array([[1.0, 0.0, -1.0]])
# annihilators as printed, not orthonormal
EXAMPLE_U_PERP = np.array([[1.0], [-1.0], [1.0]])
EXAMPLE_V_PERP = np.array([[1.0, 0.0], [-1.0, 1.0], [1.0, 0.0]])


@pytest.fixture
def example():
    return EXAMPLE_Q.copy(), EXAMPLE_U.copy(), EXAMPLE_V.copy()


@pytest.fixture
def rng():
    return make_rng(20240611)


def write_text_matrix(path, A):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    path.write_text("".join(" ".join(repr(float(x)) for x in row) + "\n" for row in A))
    return str(path)


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
