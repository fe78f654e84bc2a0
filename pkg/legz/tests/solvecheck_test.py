from __future__ import annotations

import itertools

import pandas as pd
import pytest

from legz.examples import normal_triples, samet_corpus_coefficients
from legz.exceptions import NotNormalFormError
from legz.gaussint import I, ONE, ZERO, GaussianInt, iter_norm_ball
from legz.normform import LegendreEquation, Solution, primitivize
from legz.solvecheck import (
    brute_force_search,
    check_solution,
    samet_solvable,
    search_levels,
    solution_order_key,
)


@pytest.fixture
def unsolvable_equation() -> LegendreEquation:
    """x² + i*y² + (2+i)*z² = 0: i is not a square modulo 2+i."""
    return LegendreEquation(ONE, I, GaussianInt(2, 1), normal=True)


def test_samet_holzer_equation(holzer_equation: LegendreEquation) -> None:
    report = samet_solvable(holzer_equation)
    assert report.solvable
    assert [witness.label for witness in report.witnesses] == [
        "bc mod a",
        "ca mod b",
        "ab mod c",
    ]
    assert all(witness.check() for witness in report.witnesses)
    assert report.to_text().splitlines()[0] == "QR bc mod a: 7 mod i: root=0"
    assert report.to_text().endswith("solvable: true\n")


def test_samet_units() -> None:
    report = samet_solvable(LegendreEquation(ONE, ONE, ONE, normal=True))
    assert report.solvable
    assert all(witness.root == ZERO for witness in report.witnesses)


def test_samet_unsolvable(unsolvable_equation: LegendreEquation) -> None:
    report = samet_solvable(unsolvable_equation)
    assert not report.solvable
    witness = report.witnesses[2]
    assert not witness.holds
    assert not witness.check()
    assert witness.to_text() == "QR ab mod c: i mod 2+i: exhausted"
    assert report.to_text().endswith("solvable: false\n")
    assert report.to_dict()["witnesses"][2] == {  # type: ignore [index]
        "condition": "ab mod c",
        "target": "i",
        "modulus": "2+i",
        "root": None,
    }
    assert brute_force_search(unsolvable_equation, bound=50) is None


def test_samet_requires_normal_form() -> None:
    with pytest.raises(NotNormalFormError):
        samet_solvable(LegendreEquation(GaussianInt(2), ONE, ONE))


def test_check_solution(holzer_equation: LegendreEquation, holzer_solution: Solution) -> None:
    result = check_solution(holzer_equation, holzer_solution)
    assert result
    assert result.residual == ZERO
    result = check_solution(holzer_equation, Solution(ONE, ONE, ONE))
    assert not result
    assert result.residual == GaussianInt(8, 1)


def test_check_solution_units() -> None:
    assert check_solution(LegendreEquation(ONE, ONE, ONE), Solution(ONE, I, ZERO))


def test_search_holzer_equation(
    holzer_equation: LegendreEquation, holzer_solution: Solution
) -> None:
    assert brute_force_search(holzer_equation, bound=8) == holzer_solution


def test_search_units() -> None:
    eq = LegendreEquation(ONE, ONE, ONE, normal=True)
    assert brute_force_search(eq, bound=1) == Solution(ONE, I, ZERO)


def test_search_parallel_matches_serial(
    holzer_equation: LegendreEquation, unsolvable_equation: LegendreEquation
) -> None:
    for eq, bound in (holzer_equation, 8), (holzer_equation, 40), (unsolvable_equation, 30):
        assert brute_force_search(eq, bound, jobs=2) == brute_force_search(eq, bound)


def test_search_bound_must_be_positive(holzer_equation: LegendreEquation) -> None:
    with pytest.raises(ValueError, match="at least 1"):
        brute_force_search(holzer_equation, bound=0)


def test_search_levels() -> None:
    levels = search_levels(2)
    assert levels[0] == (((0, 0), (0, 0)),)
    keys = [
        (z[0] ** 2 + z[1] ** 2, y[0] ** 2 + y[1] ** 2) for level in levels for y, z in level
    ]
    assert keys == sorted(keys)
    # half-plane representatives of norm <= 2: 0, 1, i, 1+i, 1-i
    assert sum(len(level) for level in levels) == 25


def test_solution_order_key() -> None:
    solutions = [
        Solution(ONE, GaussianInt(0, -1), ZERO),
        Solution(ONE, I, ZERO),
        Solution(GaussianInt(2, 2), ONE, ONE),
    ]
    assert min(solutions, key=solution_order_key) == Solution(ONE, I, ZERO)


def test_samet_agrees_with_search() -> None:
    """
    Over every normal equation built from the units, 1±i, 2±i, 3, 1±2i, 3±2i, 7 and their i-multiples,
    the criterion holds exactly when a solution with norms at most 200 exists.
    """
    rows = []
    for eq in normal_triples(samet_corpus_coefficients()):
        found = brute_force_search(eq, bound=200)
        if found is not None:
            assert check_solution(eq, found)
        rows.append(
            {
                "equation": str(eq),
                "solvable": samet_solvable(eq).solvable,
                "found": found is not None,
            }
        )
    df = pd.DataFrame(rows)
    assert len(df) > 50
    assert df["solvable"].any()
    assert not df["solvable"].all()
    discrepancies = df[df["solvable"] != df["found"]]
    assert discrepancies.empty, discrepancies.to_string()


def _triple_enumeration_minimum(eq: LegendreEquation, bound: int) -> Solution | None:
    """Minimal solution over every (x, y, z) triple in the norm ball."""
    ball = list(iter_norm_ball(bound))
    candidates = [
        primitivize(Solution(x, y, z)).normalize_units()
        for x, y, z in itertools.product(ball, repeat=3)
        if (x or y or z) and not eq.residual(x, y, z)
    ]
    return min(candidates, key=solution_order_key, default=None)


@pytest.mark.parametrize(
    "coefficients, bound",
    [
        ((I, GaussianInt(7), ONE), 8),
        ((ONE, ONE, ONE), 2),
        ((ONE, ONE, GaussianInt(1, 1)), 4),
        ((ONE, I, GaussianInt(2, 1)), 4),
    ],
)
def test_pair_search_matches_triple_enumeration(
    coefficients: tuple[GaussianInt, GaussianInt, GaussianInt], bound: int
) -> None:
    eq = LegendreEquation(*coefficients, normal=True)
    assert brute_force_search(eq, bound=bound) == _triple_enumeration_minimum(eq, bound)
