from __future__ import annotations

import dataclasses
import pathlib
import random

import pytest

from legz.descent import (
    CaseTag,
    DescentTrace,
    bound_test,
    descent_step,
    divisibility_certificate,
    holzer_bound_x_holds,
    holzer_reduce,
    identity_certificate,
    nonzero_z_guard,
    parametric_family,
    rounding_certificate,
)
from legz.examples import (
    create_holzer_counterexample,
    desk_coefficient_classes,
    inflate_seed,
    normal_triples,
)
from legz.exceptions import NotNormalFormError, PreconditionError, TrivialSolutionError
from legz.factor import factorize
from legz.gaussint import (
    I,
    ONE,
    ONE_PLUS_I,
    ZERO,
    GaussianInt,
    bezout,
    exact_div,
    is_even,
    is_square,
    iter_norm_ball,
)
from legz.normform import LegendreEquation, Solution, primitivize
from legz.solvecheck import brute_force_search, check_solution, samet_solvable


@pytest.mark.parametrize(
    "z, a, b, expected",
    [
        (ONE, I, GaussianInt(7), True),
        (GaussianInt(2), ONE, ONE, False),
        (ONE_PLUS_I, ONE, ONE, True),
        (ZERO, ONE, ONE, True),
        # norm(z)² = 25 <= (3 + 2√2) * 5
        (GaussianInt(2, 1), GaussianInt(2, 1), ONE, True),
        (GaussianInt(6), GaussianInt(2, 1), ONE_PLUS_I, False),
    ],
)
def test_bound_test(z: GaussianInt, a: GaussianInt, b: GaussianInt, expected: bool) -> None:
    assert bound_test(z, a, b) is expected


def test_holzer_bound_fails_over_gaussian_integers(
    holzer_equation: LegendreEquation, holzer_solution: Solution
) -> None:
    assert holzer_solution.x.norm() == 8
    assert (holzer_equation.b * holzer_equation.c).norm() == 49
    assert holzer_solution.x.norm() ** 2 == 64
    assert not holzer_bound_x_holds(holzer_equation, holzer_solution)
    assert not holzer_bound_x_holds(*create_holzer_counterexample())
    assert bound_test(holzer_solution.z, holzer_equation.a, holzer_equation.b)


@pytest.mark.parametrize(
    "x, bc, expected",
    [
        # |x|² = |bc| sits exactly on the bound
        (GaussianInt(2), GaussianInt(4), True),
        (GaussianInt(1, 1), GaussianInt(2), True),
        (GaussianInt(1, 1), GaussianInt(1), False),
        (GaussianInt(3), GaussianInt(8), False),
    ],
)
def test_holzer_bound_x_holds_compares_absolute_values(
    x: GaussianInt, bc: GaussianInt, expected: bool
) -> None:
    eq = LegendreEquation(ONE, bc, ONE)
    assert holzer_bound_x_holds(eq, Solution(x, ONE, ONE)) is expected


@pytest.mark.parametrize(
    "direction, expected",
    [
        ((ONE, ZERO, ZERO), (GaussianInt(2, -2), I, I)),
        ((ZERO, ZERO, ONE), (GaussianInt(2, 2), ONE, GaussianInt(-1))),
        ((GaussianInt(2, 2), ONE, ONE), (ZERO, ZERO, ZERO)),
    ],
)
def test_parametric_family(
    holzer_equation: LegendreEquation,
    holzer_solution: Solution,
    direction: tuple[GaussianInt, GaussianInt, GaussianInt],
    expected: tuple[GaussianInt, GaussianInt, GaussianInt],
) -> None:
    triple = parametric_family(holzer_equation, holzer_solution, *direction)
    assert triple == expected
    assert holzer_equation.residual(*triple) == ZERO


def test_divisibility_certificate_unit_delta(
    holzer_equation: LegendreEquation, holzer_solution: Solution
) -> None:
    assert divisibility_certificate(holzer_equation, holzer_solution, ONE, ZERO, ONE)


def test_divisibility_certificate_preconditions(
    holzer_equation: LegendreEquation, holzer_solution: Solution
) -> None:
    with pytest.raises(PreconditionError, match="does not divide c"):
        divisibility_certificate(holzer_equation, holzer_solution, ONE, ZERO, ONE_PLUS_I)
    with pytest.raises(PreconditionError, match="does not solve"):
        divisibility_certificate(holzer_equation, Solution(ONE, ONE, ONE), ONE, ZERO, ONE)


def test_even_c_step(even_c_example: tuple[LegendreEquation, Solution]) -> None:
    eq, sol = even_c_example
    assert not bound_test(sol.z, eq.a, eq.b)
    step = descent_step(eq, sol)
    assert step.case is CaseTag.EVEN_C
    assert step.delta == ONE
    assert (step.X, step.Y, step.Z) == (ZERO, GaussianInt(0, -1), GaussianInt(-1))
    assert sol.y * step.X - sol.x * step.Y == step.bezout_target == ONE
    # ab = 1 is a square, so z may vanish
    assert step.output == Solution(ONE, GaussianInt(0, -1), ZERO)
    assert not nonzero_z_guard(eq, sol, step.X, step.Y, step.Z)
    assert rounding_certificate(step, eq)
    assert identity_certificate(step, eq)
    assert step.to_text() == (
        "STEP EvenC X=0 Y=-i Z=-1 delta=1 z_in=2 z_out=0 N(z_in)=4 N(z_out)=0"
    )


def test_even_c_reduce(even_c_example: tuple[LegendreEquation, Solution]) -> None:
    eq, sol = even_c_example
    trace = holzer_reduce(eq, sol)
    assert len(trace.steps) == 1
    assert trace.final == Solution(ONE, GaussianInt(0, -1), ZERO)
    assert trace.bound_holds
    assert trace.to_text().splitlines()[-1] == "FINAL x=1 y=-i z=0"


def test_nonzero_z_guard_out_of_contract() -> None:
    # x² + y² - 2z² = 0 is not in normal form and ab = 1 is a square
    eq = LegendreEquation(ONE, ONE, GaussianInt(-2))
    sol = Solution(ONE, ONE, ONE)
    X, Y, Z = ONE, GaussianInt(-1), GaussianInt(0, -1)
    assert parametric_family(eq, sol, X, Y, Z) == (GaussianInt(4, -4), GaussianInt(4, 4), ZERO)
    assert not nonzero_z_guard(eq, sol, X, Y, Z)


def test_nonzero_z_guard(holzer_equation: LegendreEquation, holzer_solution: Solution) -> None:
    assert nonzero_z_guard(holzer_equation, holzer_solution, ZERO, ZERO, ONE)


def test_holzer_reduce_already_within_bound(
    holzer_equation: LegendreEquation, holzer_solution: Solution
) -> None:
    trace = holzer_reduce(holzer_equation, holzer_solution)
    assert trace.steps == ()
    assert trace.final == holzer_solution
    assert trace.to_text() == "FINAL x=2+2i y=1 z=1\n"


def test_holzer_reduce_zero_z() -> None:
    eq = LegendreEquation(ONE, ONE, ONE, normal=True)
    trace = holzer_reduce(eq, Solution(ONE, I, ZERO))
    assert trace.steps == ()
    assert trace.bound_holds


def test_holzer_reduce_primitivizes(holzer_equation: LegendreEquation) -> None:
    sol = Solution(GaussianInt(0, 4), ONE_PLUS_I, ONE_PLUS_I)
    trace = holzer_reduce(holzer_equation, sol)
    assert trace.final == Solution(GaussianInt(2, 2), ONE, ONE)


def test_descent_step_preconditions(
    holzer_equation: LegendreEquation,
    holzer_solution: Solution,
    even_c_example: tuple[LegendreEquation, Solution],
) -> None:
    with pytest.raises(PreconditionError, match="already satisfies"):
        descent_step(holzer_equation, holzer_solution)
    eq, sol = even_c_example
    with pytest.raises(PreconditionError, match="not primitive"):
        descent_step(eq, sol.scale(ONE_PLUS_I))
    with pytest.raises(NotNormalFormError):
        descent_step(LegendreEquation(*eq.coefficients), sol)
    with pytest.raises(PreconditionError, match="does not solve"):
        holzer_reduce(holzer_equation, Solution(ONE, ONE, ONE))


def test_inflated_holzer_seed(
    holzer_equation: LegendreEquation, holzer_solution: Solution
) -> None:
    seed = inflate_seed(
        holzer_equation, holzer_solution, GaussianInt(3, 1), GaussianInt(-2, 2), GaussianInt(1, -3)
    )
    assert check_solution(holzer_equation, seed)
    assert not bound_test(seed.z, holzer_equation.a, holzer_equation.b)
    step = descent_step(holzer_equation, seed)
    assert step.case is CaseTag.ODD_C
    assert step.delta == ONE_PLUS_I
    assert step.output.z.norm() < seed.z.norm()
    trace = holzer_reduce(holzer_equation, seed)
    assert trace.steps[0] == step
    assert trace.bound_holds


def test_trace_json_round_trip(
    tmp_path: pathlib.Path,
    holzer_equation: LegendreEquation,
    holzer_solution: Solution,
) -> None:
    seed = inflate_seed(
        holzer_equation, holzer_solution, GaussianInt(3, 1), GaussianInt(-2, 2), GaussianInt(1, -3)
    )
    trace = holzer_reduce(holzer_equation, seed)
    path = tmp_path.joinpath("trace.json.gz")
    trace.write_json(path)
    assert DescentTrace.read_json(path) == trace
    data = trace.to_dict()
    assert data["bound_holds"] is True
    assert data["steps"][0]["case"] == "OddC"


@dataclasses.dataclass
class Reduction:
    equation: LegendreEquation
    seed: Solution
    trace: DescentTrace


def _largest_last(eq: LegendreEquation) -> LegendreEquation:
    coefficients = sorted(eq.coefficients, key=lambda g: (g.norm(), g.re, g.im))
    return LegendreEquation(*coefficients, normal=True)


@pytest.fixture(scope="module")
def seeded_equations() -> list[tuple[LegendreEquation, Solution]]:
    """
    Solvable normal equations with coefficient norms at most 10,
    distinct up to permutation and the sign of each coefficient,
    each with its smallest solution.
    """
    seeded = []
    for eq in normal_triples(desk_coefficient_classes(10), up_to_global_unit=False):
        eq = _largest_last(eq)
        if not samet_solvable(eq).solvable:
            continue
        seed = brute_force_search(eq, bound=200)
        assert seed is not None
        seeded.append((eq, seed))
    return seeded


@pytest.fixture(scope="module")
def reductions(seeded_equations: list[tuple[LegendreEquation, Solution]]) -> list[Reduction]:
    """Reductions from seeds inflated along random small directions."""
    rng = random.Random(3)
    box = list(iter_norm_ball(10))
    results = []
    for eq, seed in seeded_equations:
        for _ in range(4):
            X, Y, Z = rng.choices(box, k=3)
            try:
                inflated = inflate_seed(eq, seed, X, Y, Z)
            except TrivialSolutionError:
                continue
            results.append(Reduction(eq, inflated, holzer_reduce(eq, inflated)))
    return results


def test_corpus_size(
    seeded_equations: list[tuple[LegendreEquation, Solution]], reductions: list[Reduction]
) -> None:
    assert len(seeded_equations) >= 50
    assert sum(len(reduction.trace.steps) for reduction in reductions) > 0
    cases = {step.case for reduction in reductions for step in reduction.trace.steps}
    assert cases == {CaseTag.EVEN_C, CaseTag.ODD_C}


def test_reductions_reach_bound(reductions: list[Reduction]) -> None:
    for reduction in reductions:
        eq, trace = reduction.equation, reduction.trace
        assert trace.bound_holds
        assert bound_test(trace.final.z, eq.a, eq.b)
        assert check_solution(eq, trace.final)
        current = reduction.seed
        for step in trace.steps:
            assert step.input == current
            assert check_solution(eq, step.output)
            assert step.output.z.norm() < step.input.z.norm()
            current = primitivize(step.output, equation=eq)
        assert current == trace.final


def test_reduction_steps_certificates(reductions: list[Reduction]) -> None:
    for reduction in reductions:
        eq = reduction.equation
        ab_is_square = is_square(eq.a * eq.b)
        for step in reduction.trace.steps:
            x0, y0, _ = step.input.components
            assert step.case is (CaseTag.EVEN_C if is_even(eq.c) else CaseTag.ODD_C)
            assert y0 * step.X - x0 * step.Y == step.bezout_target
            assert rounding_certificate(step, eq)
            assert identity_certificate(step, eq)
            assert divisibility_certificate(
                eq, step.input, step.X, step.Y, step.bezout_target, step.Z
            )
            if not ab_is_square:
                assert step.output.z
                assert nonzero_z_guard(eq, step.input, step.X, step.Y, step.Z)


def test_divisibility_lemma_random(
    seeded_equations: list[tuple[LegendreEquation, Solution]]
) -> None:
    """
    For delta dividing c and y0*X - x0*Y, delta divides all three family expressions,
    checked on at least 500 random instances with and without 1+i dividing c.
    """
    rng = random.Random(4)
    box = [g for g in iter_norm_ball(8) if g]
    candidates = [(eq, seed) for eq, seed in seeded_equations if not eq.c.is_unit()]
    n_checked = 0
    n_even = 0
    while n_checked < 500:
        eq, sol = rng.choice(candidates)
        divisors = [eq.c, *factorize(eq.c).primes]
        if is_even(eq.c):
            divisors.append(exact_div(eq.c, ONE_PLUS_I))
        delta = rng.choice(divisors)
        t, m, Z = rng.choices(box, k=3)
        X, Y = bezout(sol.x, sol.y, delta * t)
        X, Y = X + m * sol.x, Y + m * sol.y
        assert divisibility_certificate(eq, sol, X, Y, delta, Z)
        triple = parametric_family(eq, sol, X, Y, Z)
        assert all(not value % delta for value in triple)
        n_checked += 1
        n_even += is_even(eq.c)
    assert 0 < n_even < n_checked
