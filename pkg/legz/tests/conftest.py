import pytest

from legz.examples import create_even_c_example, create_holzer_counterexample
from legz.normform import LegendreEquation, Solution


@pytest.fixture
def holzer_equation() -> LegendreEquation:
    """i*x² + 7*y² + z² = 0 in normal form."""
    eq, _ = create_holzer_counterexample()
    return eq


@pytest.fixture
def holzer_solution() -> Solution:
    """Smallest solution (2+2i, 1, 1) of the `holzer_equation`."""
    _, sol = create_holzer_counterexample()
    return sol


@pytest.fixture
def even_c_example() -> tuple[LegendreEquation, Solution]:
    """
    x² + y² + (1+i)*z² = 0 with a primitive solution outside the bound on |z|,
    so that a descent step with 1+i dividing c applies.
    """
    return create_even_c_example()


@pytest.fixture
def factor_ceiling(monkeypatch: pytest.MonkeyPatch) -> int:
    """Sets a small LEGZ_FACTOR_CEILING for the duration of a test."""
    ceiling = 100
    monkeypatch.setenv("LEGZ_FACTOR_CEILING", str(ceiling))
    return ceiling
