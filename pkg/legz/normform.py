from __future__ import annotations

import dataclasses
import logging
from typing import Iterator, Literal, Sequence, Union, cast

from .exceptions import (
    InvariantFault,
    NotNormalFormError,
    PreconditionError,
    TrivialSolutionError,
)
from .factor import factorize
from .gaussint import (
    ONE,
    GaussianInt,
    GaussianLike,
    exact_div,
    gcd,
    gcd_many,
    unit_normalizer,
)

logger = logging.getLogger(__name__)

Position = Literal["a", "b", "c"]
POSITIONS: tuple[Position, ...] = ("a", "b", "c")


@dataclasses.dataclass(frozen=True)
class LegendreEquation:
    """
    Legendre equation a*x² + b*y² + c*z² = 0 over Z[i].
    `normal=True` asserts (and is checked on construction) that the coefficients
    are square-free and pairwise coprime.
    """

    a: GaussianInt
    b: GaussianInt
    c: GaussianInt
    normal: bool = False

    def __post_init__(self) -> None:
        for position in POSITIONS:
            value = GaussianInt.coerce(getattr(self, position))
            if not value:
                raise ValueError(f"coefficient {position} must be nonzero")
            object.__setattr__(self, position, value)
        if self.normal and not self.is_normal():
            raise NotNormalFormError(f"{self} is not in normal form")

    @classmethod
    def parse(cls, a: str, b: str, c: str) -> LegendreEquation:
        """Equation from coefficients in the text syntax, e.g. `parse("i", "7", "1")`."""
        return cls(GaussianInt.parse(a), GaussianInt.parse(b), GaussianInt.parse(c))

    def __str__(self) -> str:
        return f"({self.a})*x^2 + ({self.b})*y^2 + ({self.c})*z^2 = 0"

    @property
    def coefficients(self) -> tuple[GaussianInt, GaussianInt, GaussianInt]:
        return self.a, self.b, self.c

    def coefficient(self, position: Position) -> GaussianInt:
        return cast(GaussianInt, getattr(self, position))

    def norm_product(self) -> int:
        """norm(a*b*c), the quantity the coprime reduction decreases."""
        return (self.a * self.b * self.c).norm()

    def residual(self, x: GaussianLike, y: GaussianLike, z: GaussianLike) -> GaussianInt:
        """Exact value of a*x² + b*y² + c*z²."""
        x, y, z = (GaussianInt.coerce(v) for v in (x, y, z))
        return self.a * x * x + self.b * y * y + self.c * z * z

    def is_solved_by(self, sol: Solution) -> bool:
        return not self.residual(sol.x, sol.y, sol.z)

    def is_normal(self, ceiling: int | None = None) -> bool:
        """Whether the coefficients are square-free and pairwise coprime."""
        if not all(
            factorize(coef, ceiling=ceiling).is_squarefree for coef in self.coefficients
        ):
            return False
        a, b, c = self.coefficients
        return all(gcd(g, h).is_unit() for g, h in ((a, b), (a, c), (b, c)))

    def as_normal(self) -> LegendreEquation:
        """This equation flagged as normal, raising NotNormalFormError if it is not."""
        return dataclasses.replace(self, normal=True)


@dataclasses.dataclass(frozen=True)
class Solution:
    """
    Nontrivial triple (x, y, z) of Gaussian integers.
    The trivial solution is never represented by a Solution.
    """

    x: GaussianInt
    y: GaussianInt
    z: GaussianInt

    def __post_init__(self) -> None:
        for name in "xyz":
            object.__setattr__(self, name, GaussianInt.coerce(getattr(self, name)))
        if not (self.x or self.y or self.z):
            raise TrivialSolutionError("(0, 0, 0) is the trivial solution")

    @classmethod
    def from_components(cls, components: Sequence[GaussianLike]) -> Solution:
        x, y, z = components
        return cls(GaussianInt.coerce(x), GaussianInt.coerce(y), GaussianInt.coerce(z))

    def __str__(self) -> str:
        return f"x={self.x} y={self.y} z={self.z}"

    @property
    def components(self) -> tuple[GaussianInt, GaussianInt, GaussianInt]:
        return self.x, self.y, self.z

    @property
    def max_norm(self) -> int:
        return max(g.norm() for g in self.components)

    def scale(self, k: GaussianLike) -> Solution:
        return Solution(k * self.x, k * self.y, k * self.z)

    def is_primitive(self) -> bool:
        return gcd_many(*self.components).is_unit()

    def normalize_units(self) -> Solution:
        """Unit multiple of this solution whose first nonzero component is a canonical associate."""
        first = next(g for g in self.components if g)
        return self.scale(unit_normalizer(first))


def primitivize(sol: Solution, equation: LegendreEquation | None = None) -> Solution:
    """
    Divide out gcd(x, y, z).
    When a normal-form `equation` solved by `sol` is given, the result must have
    pairwise coprime components: a common prime p of x and y would force p² | c.
    A violation is an InvariantFault.
    """
    common = gcd_many(*sol.components)
    result = Solution(*(exact_div(g, common) for g in sol.components))
    if equation is not None and equation.normal:
        x, y, z = result.components
        for g, h in ((x, y), (x, z), (y, z)):
            if (g or h) and not gcd(g, h).is_unit():
                raise InvariantFault(
                    f"primitive solution {result} of normal equation {equation} "
                    f"has non-coprime components {g} and {h}"
                )
    return result


@dataclasses.dataclass(frozen=True)
class SquarePart:
    """
    Square-part extraction: the equation before has coefficients
    (alpha²*a, beta²*b, gamma²*c) and the equation after has (a, b, c).
    """

    alpha: GaussianInt
    beta: GaussianInt
    gamma: GaussianInt

    @property
    def is_trivial(self) -> bool:
        return self.alpha == self.beta == self.gamma == ONE

    def to_text(self) -> str:
        return f"SQ {self.alpha} {self.beta} {self.gamma}"

    def apply(self, eq: LegendreEquation) -> LegendreEquation:
        return LegendreEquation(
            exact_div(eq.a, self.alpha**2),
            exact_div(eq.b, self.beta**2),
            exact_div(eq.c, self.gamma**2),
        )

    def invert(self, eq: LegendreEquation) -> LegendreEquation:
        return LegendreEquation(
            self.alpha**2 * eq.a, self.beta**2 * eq.b, self.gamma**2 * eq.c
        )

    def forward(self, sol: Solution) -> Solution:
        return Solution(self.alpha * sol.x, self.beta * sol.y, self.gamma * sol.z)

    def backward(self, sol: Solution) -> Solution:
        alpha, beta, gamma = self.alpha, self.beta, self.gamma
        return Solution(beta * gamma * sol.x, gamma * alpha * sol.y, alpha * beta * sol.z)


@dataclasses.dataclass(frozen=True)
class PrimeShift:
    """
    Coprime reduction by a prime p dividing the two coefficients other than `position`:
    the coefficient at `position` is multiplied by p and the other two are divided by p.
    """

    p: GaussianInt
    position: Position

    def to_text(self) -> str:
        return f"PS {self.p} {self.position}"

    @property
    def _others(self) -> list[Position]:
        return [pos for pos in POSITIONS if pos != self.position]

    def apply(self, eq: LegendreEquation) -> LegendreEquation:
        values = {
            pos: self.p * eq.coefficient(pos)
            if pos == self.position
            else exact_div(eq.coefficient(pos), self.p)
            for pos in POSITIONS
        }
        return LegendreEquation(values["a"], values["b"], values["c"])

    def invert(self, eq: LegendreEquation) -> LegendreEquation:
        values = {
            pos: exact_div(eq.coefficient(pos), self.p)
            if pos == self.position
            else self.p * eq.coefficient(pos)
            for pos in POSITIONS
        }
        return LegendreEquation(values["a"], values["b"], values["c"])

    def forward(self, sol: Solution) -> Solution:
        """(x, y, z) -> (x, p*y, p*z) for position a, and likewise for b and c."""
        components = dict(zip(POSITIONS, sol.components))
        for pos in self._others:
            components[pos] = self.p * components[pos]
        return Solution(components["a"], components["b"], components["c"])

    def backward(self, sol: Solution) -> Solution:
        """
        (x1, y1, z1) -> (x1, y1/p, z1/p) when p divides y1 and z1 (for position a),
        otherwise the projectively equal and always integral (p*x1, y1, z1).
        """
        components = dict(zip(POSITIONS, sol.components))
        others = self._others
        if all(not (components[pos] % self.p) for pos in others):
            for pos in others:
                components[pos] = exact_div(components[pos], self.p)
        else:
            components[self.position] = self.p * components[self.position]
        return Solution(components["a"], components["b"], components["c"])


Reduction = Union[SquarePart, PrimeShift]


@dataclasses.dataclass(frozen=True)
class NormalizationTrace:
    """Reductions applied to an equation, in order, to reach its normal form."""

    records: tuple[Reduction, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[Reduction]:
        return iter(self.records)

    def replay(self, eq_normal: LegendreEquation) -> LegendreEquation:
        """Reconstruct the original equation from its normal form."""
        eq = LegendreEquation(*eq_normal.coefficients)
        for record in reversed(self.records):
            eq = record.invert(eq)
        return eq

    def to_text(self) -> str:
        """One record per line: `SQ alpha beta gamma` or `PS p position`."""
        return "".join(f"{record.to_text()}\n" for record in self.records)

    @classmethod
    def from_text(cls, text: str) -> NormalizationTrace:
        records: list[Reduction] = []
        for line in text.splitlines():
            fields = line.split()
            if not fields:
                continue
            if fields[0] == "SQ" and len(fields) == 4:
                alpha, beta, gamma = (GaussianInt.parse(f) for f in fields[1:])
                records.append(SquarePart(alpha, beta, gamma))
            elif fields[0] == "PS" and len(fields) == 3 and fields[2] in POSITIONS:
                position = cast(Position, fields[2])
                records.append(PrimeShift(GaussianInt.parse(fields[1]), position))
            else:
                raise ValueError(f"malformed normalization record: {line!r}")
        return cls(tuple(records))


def squarefree_reduce(
    eq: LegendreEquation, ceiling: int | None = None
) -> tuple[LegendreEquation, SquarePart]:
    """
    Extract the square part of each coefficient.
    The roots alpha, beta, gamma are canonical associates;
    any leftover unit stays in the reduced coefficient.
    """
    roots = [factorize(coef, ceiling=ceiling).square_part() for coef in eq.coefficients]
    record = SquarePart(*roots)
    reduced = record.apply(eq)
    if not record.is_trivial:
        logger.info(f"Square-part extraction {record.to_text()}: {eq} -> {reduced}")
    return reduced, record


def _find_prime_shift(
    eq: LegendreEquation, ceiling: int | None = None
) -> PrimeShift | None:
    for position in POSITIONS:
        g, h = (eq.coefficient(pos) for pos in POSITIONS if pos != position)
        common = gcd(g, h)
        if not common.is_unit():
            # smallest prime in (norm, re, im) order
            p = factorize(common, ceiling=ceiling).primes[0]
            return PrimeShift(p, position)
    return None


def coprime_reduce(
    eq: LegendreEquation, ceiling: int | None = None
) -> tuple[LegendreEquation, list[PrimeShift]]:
    """
    Move shared primes until the coefficients are pairwise coprime.
    Each shift divides norm(a*b*c) by norm(p), so the loop terminates.
    """
    shifts: list[PrimeShift] = []
    while (shift := _find_prime_shift(eq, ceiling)) is not None:
        shifted = shift.apply(eq)
        if not shifted.norm_product() < eq.norm_product():
            raise InvariantFault(f"{shift.to_text()} did not decrease norm(abc) of {eq}")
        logger.info(f"Prime shift {shift.to_text()}: {eq} -> {shifted}")
        shifts.append(shift)
        eq = shifted
    return eq, shifts


def normalize(
    eq: LegendreEquation, ceiling: int | None = None
) -> tuple[LegendreEquation, NormalizationTrace]:
    """
    Reduce an equation to normal form.
    A prime shift can put a square back into the receiving coefficient,
    so square-part extraction and coprime reduction alternate until neither applies.
    """
    records: list[Reduction] = []
    while True:
        eq, square = squarefree_reduce(eq, ceiling=ceiling)
        if not square.is_trivial:
            records.append(square)
        eq, shifts = coprime_reduce(eq, ceiling=ceiling)
        records.extend(shifts)
        if not shifts:
            break
    return eq.as_normal(), NormalizationTrace(tuple(records))


def pull_back(
    sol: Solution,
    trace: NormalizationTrace,
    equation: LegendreEquation | None = None,
) -> Solution:
    """
    Map a solution of the normal equation to a solution of the original equation.
    When the normal `equation` is given, both ends are verified by substitution.
    """
    if equation is not None and not equation.is_solved_by(sol):
        raise PreconditionError(f"{sol} does not solve {equation}")
    for record in reversed(trace.records):
        sol = record.backward(sol)
    if equation is not None:
        original = trace.replay(equation)
        if not original.is_solved_by(sol):
            raise InvariantFault(f"pulled back {sol} does not solve {original}")
    return sol


def push_forward(
    sol: Solution,
    trace: NormalizationTrace,
    equation: LegendreEquation | None = None,
) -> Solution:
    """
    Map a solution of the original equation to a solution of the normal equation.
    When the normal `equation` is given, both ends are verified by substitution.
    """
    if equation is not None:
        original = trace.replay(equation)
        if not original.is_solved_by(sol):
            raise PreconditionError(f"{sol} does not solve {original}")
    for record in trace.records:
        sol = record.forward(sol)
    if equation is not None and not equation.is_solved_by(sol):
        raise InvariantFault(f"pushed forward {sol} does not solve {equation}")
    return sol
