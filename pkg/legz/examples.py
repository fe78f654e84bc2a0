from __future__ import annotations

import itertools
from typing import Iterable

from legz.descent import parametric_family
from legz.factor import is_squarefree
from legz.gaussint import I, ONE, GaussianInt, gcd, iter_norm_ball
from legz.normform import LegendreEquation, Solution, primitivize


def create_holzer_counterexample() -> tuple[LegendreEquation, Solution]:
    """
    i*x² + 7*y² + z² = 0 with its smallest solution (2+2i, 1, 1).
    norm(x)² = 64 exceeds norm(bc) = 49, so the integer bound |x| <= sqrt(|bc|)
    does not carry over to Z[i].
    """
    eq = LegendreEquation(I, GaussianInt(7), ONE, normal=True)
    return eq, Solution(GaussianInt(2, 2), ONE, ONE)


def create_even_c_example() -> tuple[LegendreEquation, Solution]:
    """
    x² + y² + (1+i)*z² = 0 with the primitive solution (-i, -1+2i, 2).
    norm(z) = 4 is outside the bound sqrt(1 + √2), so a descent step applies,
    and 1+i divides c.
    """
    eq = LegendreEquation(ONE, ONE, GaussianInt(1, 1), normal=True)
    return eq, Solution(GaussianInt(0, -1), GaussianInt(-1, 2), GaussianInt(2))


def _sign_class(g: GaussianInt) -> tuple[int, int]:
    # representative of {g, -g}
    if g.re > 0 or (g.re == 0 and g.im > 0):
        return g.re, g.im
    return -g.re, -g.im


def equation_class_key(
    coefficients: Iterable[GaussianInt], up_to_global_unit: bool = True
) -> tuple[tuple[int, int], ...]:
    """
    Key identifying equations that differ only by a permutation of the coefficients
    or the sign of a coefficient (x -> i*x), and optionally by multiplying
    every coefficient by i.
    """
    coefficients = tuple(coefficients)
    scalings = (ONE, I) if up_to_global_unit else (ONE,)
    return min(
        tuple(sorted(_sign_class(unit * g) for g in coefficients)) for unit in scalings
    )


def desk_coefficient_classes(max_norm: int = 10) -> list[GaussianInt]:
    """
    Square-free Gaussian integers with norm at most `max_norm`, one per class modulo ±1.
    Each class of associates contributes g and i*g.
    """
    return [
        g
        for g in iter_norm_ball(max_norm)
        if g and _sign_class(g) == (g.re, g.im) and is_squarefree(g)
    ]


def samet_corpus_coefficients() -> list[GaussianInt]:
    """
    The units, 1±i, 2±i, 3, 1±2i, 3±2i, 7 and i times each, one per class modulo ±1.
    """
    texts = ["1", "-1", "i", "-i", "1+i", "1-i", "2+i", "2-i", "3", "1+2i", "1-2i"]
    texts += ["3+2i", "3-2i", "7"]
    values = [GaussianInt.parse(text) for text in texts]
    values += [I * g for g in values]
    classes = {_sign_class(g) for g in values}
    return sorted(
        (GaussianInt(*pair) for pair in classes), key=lambda g: (g.norm(), g.re, g.im)
    )


def normal_triples(
    coefficients: Iterable[GaussianInt], up_to_global_unit: bool = True
) -> list[LegendreEquation]:
    """
    Normal-form equations with coefficients drawn from `coefficients`,
    one per class of `equation_class_key`.
    """
    candidates = sorted(set(coefficients), key=lambda g: (g.norm(), g.re, g.im))
    squarefree = [g for g in candidates if is_squarefree(g)]
    equations: dict[tuple[tuple[int, int], ...], LegendreEquation] = {}
    for triple in itertools.combinations_with_replacement(squarefree, 3):
        if not all(gcd(g, h).is_unit() for g, h in itertools.combinations(triple, 2)):
            continue
        key = equation_class_key(triple, up_to_global_unit=up_to_global_unit)
        if key not in equations:
            equations[key] = LegendreEquation(*triple, normal=True)
    return list(equations.values())


def inflate_seed(
    eq: LegendreEquation,
    sol: Solution,
    X: GaussianInt,
    Y: GaussianInt,
    Z: GaussianInt,
) -> Solution:
    """
    Larger solution of `eq` from the line through `sol` in direction (X, Y, Z), primitivized.
    Raises TrivialSolutionError when the line is tangent and the family vanishes.
    """
    return primitivize(Solution(*parametric_family(eq, sol, X, Y, Z)), equation=eq)
