"""
Descent on the z-component of solutions of normal-form Legendre equations over Z[i].

From a primitive solution (x0, y0, z0) and Gaussian integers X, Y, Z,
the line (x0 + tX, y0 + tY, z0 + tZ) meets the conic again at

    x = x0*(aX² + bY² + cZ²) - 2X*(a*x0*X + b*y0*Y + c*z0*Z)
    y = y0*(aX² + bY² + cZ²) - 2Y*(a*x0*X + b*y0*Y + c*z0*Z)
    z = z0*(aX² + bY² + cZ²) - 2Z*(a*x0*X + b*y0*Y + c*z0*Z)

Any delta dividing c and y0*X - x0*Y divides all three, and
z*delta = -c*z0*[(Z + s)² + ab*(y0*X - x0*Y)²/(c*z0)²] with s = (a*x0*X + b*y0*Y)/(c*z0).
Choosing X, Y by Bézout and Z by rounding -s makes |z| strictly smaller
as long as norm(z0)² > (3 + 2√2)*norm(a)*norm(b).
"""
from __future__ import annotations

import dataclasses
import enum
import json
import logging
from os import PathLike, fspath
from typing import Any

import fsspec
from sympy import QQ
from sympy.external.gmpy import MPQ

from .exceptions import (
    InexactDivisionError,
    InvariantFault,
    NotNormalFormError,
    PreconditionError,
)
from .gaussint import (
    ONE_PLUS_I,
    GaussianInt,
    GaussianRational,
    bezout,
    distance_squared,
    divides,
    exact_div,
    gcd,
    is_even,
    is_square,
    nearest_in_class,
    nearest_lattice,
    parity,
)
from .normform import LegendreEquation, Solution, primitivize
from .solvecheck import check_solution
from .utils import get_datetime_now, get_legz_version

logger = logging.getLogger(__name__)

MAX_STEPS = 10_000
"""Ceiling on descent steps; exceeding it is an InvariantFault."""

Triple = tuple[GaussianInt, GaussianInt, GaussianInt]


class CaseTag(str, enum.Enum):
    """Whether 1+i divides c (EvenC) or not (OddC)."""

    EVEN_C = "EvenC"
    ODD_C = "OddC"


def bound_test(z: GaussianInt, a: GaussianInt, b: GaussianInt) -> bool:
    """
    Whether |z| <= sqrt((1 + √2)|ab|), evaluated exactly:
    with L = norm(z)² and R = norm(a)*norm(b), L <= (3 + 2√2)R
    holds iff L <= 3R or (L - 3R)² <= 8R².
    """
    L = z.norm() ** 2
    R = a.norm() * b.norm()
    return L <= 3 * R or (L - 3 * R) ** 2 <= 8 * R * R


def holzer_bound_x_holds(eq: LegendreEquation, sol: Solution) -> bool:
    """
    The bound |x| <= sqrt(|bc|) of the integer case, squared twice into
    norm(x)² <= norm(bc) so the comparison stays in Z.
    Over Z[i] it can fail: ix² + 7y² + z² = 0 has smallest solution (2+2i, 1, 1).
    """
    return sol.x.norm() ** 2 <= (eq.b * eq.c).norm()


def _linear_term(eq: LegendreEquation, sol0: Solution, X: GaussianInt, Y: GaussianInt) -> GaussianInt:
    # a*x0*X + b*y0*Y
    return eq.a * sol0.x * X + eq.b * sol0.y * Y


def parametric_family(
    eq: LegendreEquation,
    sol0: Solution,
    X: GaussianInt,
    Y: GaussianInt,
    Z: GaussianInt,
) -> Triple:
    """
    The unreduced second intersection of the line through `sol0` in direction (X, Y, Z).
    The triple solves `eq` whenever `sol0` does, and may be (0, 0, 0).
    """
    x0, y0, z0 = sol0.components
    quadratic = eq.a * X * X + eq.b * Y * Y + eq.c * Z * Z
    linear = eq.a * x0 * X + eq.b * y0 * Y + eq.c * z0 * Z
    return (
        x0 * quadratic - 2 * X * linear,
        y0 * quadratic - 2 * Y * linear,
        z0 * quadratic - 2 * Z * linear,
    )


def _family_coefficients(
    eq: LegendreEquation, sol0: Solution, X: GaussianInt, Y: GaussianInt
) -> list[GaussianInt]:
    """Coefficients of the three family expressions as polynomials in Z."""
    x0, y0, z0 = sol0.components
    c = eq.c
    q = eq.a * X * X + eq.b * Y * Y
    s = _linear_term(eq, sol0, X, Y)
    return [
        # x: (x0*q - 2*X*s) + (-2*c*z0*X)*Z + (c*x0)*Z²
        x0 * q - 2 * X * s,
        -2 * c * z0 * X,
        c * x0,
        # y: (y0*q - 2*Y*s) + (-2*c*z0*Y)*Z + (c*y0)*Z²
        y0 * q - 2 * Y * s,
        -2 * c * z0 * Y,
        c * y0,
        # z: z0*q + (-2*s)*Z + (-c*z0)*Z²
        z0 * q,
        -2 * s,
        -c * z0,
    ]


def divisibility_certificate(
    eq: LegendreEquation,
    sol0: Solution,
    X: GaussianInt,
    Y: GaussianInt,
    delta: GaussianInt,
    Z: GaussianInt | None = None,
) -> bool:
    """
    Verify that delta divides the three family expressions for every Z,
    by checking each of their coefficients as polynomials in Z,
    and for the given Z when there is one.
    Also checks that gcd(delta, a*b*x0*y0) is a unit, which the lemma relies on.
    """
    x0, y0, _ = sol0.components
    if not delta:
        raise PreconditionError("delta must be nonzero")
    if not divides(delta, eq.c):
        raise PreconditionError(f"delta = {delta} does not divide c = {eq.c}")
    if not divides(delta, X * y0 - Y * x0):
        raise PreconditionError(f"delta = {delta} does not divide X*y0 - Y*x0")
    if not (x0 or y0) or not gcd(x0, y0).is_unit():
        raise PreconditionError(f"x0 = {x0} and y0 = {y0} must be coprime")
    if not check_solution(eq, sol0):
        raise PreconditionError(f"{sol0} does not solve {eq}")
    side = eq.a * eq.b * x0 * y0
    if side and not gcd(delta, side).is_unit():
        raise InvariantFault(f"gcd(delta, a*b*x0*y0) is not a unit for delta = {delta}")
    if delta.is_unit():
        return True
    values = _family_coefficients(eq, sol0, X, Y)
    if Z is not None:
        values.extend(parametric_family(eq, sol0, X, Y, Z))
    return all(divides(delta, value) for value in values)


def nonzero_z_guard(
    eq: LegendreEquation,
    sol0: Solution,
    X: GaussianInt,
    Y: GaussianInt,
    Z: GaussianInt,
) -> bool:
    """
    Whether the z-component of the family is nonzero.
    A zero z requires sqrt(ab)*(y0*X - x0*Y) to lie in Q(i), which cannot happen
    when ab is not a square: then a zero is an InvariantFault.
    When ab is a square (e.g. a = b = 1) z may vanish; the guard returns False.
    """
    _, _, z = parametric_family(eq, sol0, X, Y, Z)
    if z:
        return True
    if is_square(eq.a * eq.b):
        return False
    raise InvariantFault(
        f"z vanished for {eq} from {sol0} with X={X} Y={Y} Z={Z}, "
        "although ab is not a square"
    )


@dataclasses.dataclass(frozen=True)
class DescentStep:
    """
    One descent step.
    `delta` is the divisor actually applied to the family:
    c/(1+i) for EvenC and (1+i)*c for OddC.
    `output` is the reduced triple before re-primitivization.
    """

    case: CaseTag
    X: GaussianInt
    Y: GaussianInt
    Z: GaussianInt
    delta: GaussianInt
    t_target: GaussianRational
    input: Solution
    output: Solution

    @property
    def bezout_target(self) -> GaussianInt:
        """The right-hand side of y0*X - x0*Y: the divisor for EvenC, c for OddC."""
        if self.case is CaseTag.EVEN_C:
            return self.delta
        return exact_div(self.delta, ONE_PLUS_I)

    @property
    def rounding_distance(self) -> MPQ:
        """|t_target - Z|² as an exact `QQ` element."""
        return distance_squared(self.t_target, self.Z)

    def to_text(self) -> str:
        z_in, z_out = self.input.z, self.output.z
        return (
            f"STEP {self.case.value} X={self.X} Y={self.Y} Z={self.Z} delta={self.delta} "
            f"z_in={z_in} z_out={z_out} N(z_in)={z_in.norm()} N(z_out)={z_out.norm()}"
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "case": self.case.value,
            "X": str(self.X),
            "Y": str(self.Y),
            "Z": str(self.Z),
            "delta": str(self.delta),
            "t_target": str(self.t_target),
            "input": _solution_to_dict(self.input),
            "output": _solution_to_dict(self.output),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> DescentStep:
        return cls(
            case=CaseTag(data["case"]),
            X=GaussianInt.parse(data["X"]),
            Y=GaussianInt.parse(data["Y"]),
            Z=GaussianInt.parse(data["Z"]),
            delta=GaussianInt.parse(data["delta"]),
            t_target=GaussianRational.parse(data["t_target"]),
            input=_solution_from_dict(data["input"]),
            output=_solution_from_dict(data["output"]),
        )


def _solution_to_dict(sol: Solution) -> dict[str, str]:
    return {"x": str(sol.x), "y": str(sol.y), "z": str(sol.z)}


def _solution_from_dict(data: dict[str, str]) -> Solution:
    return Solution(*(GaussianInt.parse(data[key]) for key in "xyz"))


def rounding_certificate(step: DescentStep, eq: LegendreEquation) -> bool:
    """
    EvenC: |t - Z|² <= 1/2.
    OddC: |t - Z|² <= 1 and Z ≡ aX + bY (mod 1+i), which makes aX + bY + cZ even.
    """
    if step.case is CaseTag.EVEN_C:
        return step.rounding_distance <= QQ(1, 2)
    in_class = is_even(eq.a * step.X + eq.b * step.Y + eq.c * step.Z)
    return in_class and step.rounding_distance <= 1


def identity_certificate(step: DescentStep, eq: LegendreEquation) -> bool:
    """
    Re-derive z_out from z_out*delta = -c*z0*[(Z - t)² + ab*(y0*X - x0*Y)²/(c*z0)²]
    in exact Gaussian-rational arithmetic, where t is the rounding target.
    """
    x0, y0, z0 = step.input.components
    X, Y, Z = step.X, step.Y, step.Z
    cz0 = GaussianRational(eq.c * z0)
    bracket = (Z - step.t_target) ** 2 + eq.a * eq.b * (y0 * X - x0 * Y) ** 2 / cz0**2
    rhs = -cz0 * bracket
    return rhs == GaussianRational(step.output.z * step.delta)


def _check_step_preconditions(eq: LegendreEquation, sol0: Solution) -> None:
    if not eq.normal:
        raise NotNormalFormError(f"descent requires an equation in normal form: {eq}")
    if not check_solution(eq, sol0):
        raise PreconditionError(f"{sol0} does not solve {eq}")
    if not sol0.is_primitive():
        raise PreconditionError(f"{sol0} is not primitive")
    if not sol0.z:
        raise PreconditionError("descent requires z0 != 0")
    if bound_test(sol0.z, eq.a, eq.b):
        raise PreconditionError(f"{sol0} already satisfies the bound on |z|")
    if not sol0.x or not sol0.y:
        # for normal equations this forces norm(z0) == 1, which satisfies the bound
        raise PreconditionError(f"descent requires x0 and y0 nonzero: {sol0}")


def descent_step(eq: LegendreEquation, sol0: Solution) -> DescentStep:
    """
    Construct a solution with strictly smaller norm(z) from a primitive solution
    with norm(z0)² > (3 + 2√2)*norm(ab).

    EvenC, (1+i) | c: y0*X - x0*Y = c/(1+i), Z nearest to t, divisor c/(1+i).
    OddC: y0*X - x0*Y = c, Z nearest to t within the class of aX + bY modulo 1+i,
    divisor (1+i)*c.
    Here t = -(a*x0*X + b*y0*Y)/(c*z0).
    """
    _check_step_preconditions(eq, sol0)
    x0, y0, z0 = sol0.components
    a, b, c = eq.coefficients
    if is_even(c):
        case = CaseTag.EVEN_C
        target = exact_div(c, ONE_PLUS_I)
        X, Y = bezout(x0, y0, target)
        t_target = -_linear_term(eq, sol0, X, Y) / (c * z0)
        Z = nearest_lattice(t_target)
        delta = target
    else:
        case = CaseTag.ODD_C
        X, Y = bezout(x0, y0, c)
        t_target = -_linear_term(eq, sol0, X, Y) / (c * z0)
        # c is odd, so aX + bY + cZ is even exactly when Z ≡ aX + bY (mod 1+i)
        Z = nearest_in_class(t_target, parity(a * X + b * Y))
        delta = ONE_PLUS_I * c
    family = parametric_family(eq, sol0, X, Y, Z)
    try:
        reduced = tuple(exact_div(value, delta) for value in family)
    except InexactDivisionError as e:
        raise InvariantFault(
            f"{case.value} divisor {delta} does not divide the family for {sol0} "
            f"with X={X} Y={Y} Z={Z}: {e}"
        ) from e
    if not nonzero_z_guard(eq, sol0, X, Y, Z):
        logger.info(f"z vanished for {eq} since ab is a square")
    try:
        output = Solution(*reduced)
    except ValueError as e:
        raise InvariantFault(f"descent produced the trivial solution from {sol0}") from e
    if not check_solution(eq, output):
        raise InvariantFault(f"descent output {output} does not solve {eq}")
    if not output.z.norm() < z0.norm():
        raise InvariantFault(
            f"norm(z) did not decrease: {z0.norm()} -> {output.z.norm()} for {sol0}"
        )
    step = DescentStep(
        case=case,
        X=X,
        Y=Y,
        Z=Z,
        delta=delta,
        t_target=t_target,
        input=sol0,
        output=output,
    )
    logger.debug(step.to_text())
    return step


@dataclasses.dataclass(frozen=True)
class DescentTrace:
    """Audit log of a reduction: the equation, its steps in order, and the final solution."""

    equation: LegendreEquation
    steps: tuple[DescentStep, ...]
    final: Solution

    @property
    def bound_holds(self) -> bool:
        return bound_test(self.final.z, self.equation.a, self.equation.b)

    def to_text(self) -> str:
        lines = [step.to_text() for step in self.steps]
        lines.append(f"FINAL {self.final}")
        return "".join(f"{line}\n" for line in lines)

    def to_dict(self) -> dict[str, Any]:
        eq = self.equation
        return {
            "legz_version": get_legz_version(),
            "created": get_datetime_now(),
            "equation": {"a": str(eq.a), "b": str(eq.b), "c": str(eq.c)},
            "steps": [step.to_dict() for step in self.steps],
            "final": _solution_to_dict(self.final),
            "bound_holds": self.bound_holds,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> DescentTrace:
        coefficients = data["equation"]
        equation = LegendreEquation.parse(
            coefficients["a"], coefficients["b"], coefficients["c"]
        ).as_normal()
        return cls(
            equation=equation,
            steps=tuple(DescentStep.from_dict(step) for step in data["steps"]),
            final=_solution_from_dict(data["final"]),
        )

    def write_json(self, path: str | PathLike[str]) -> None:
        """Serialize to JSON, compressing according to the path's extension."""
        path = fspath(path)
        with fsspec.open(path, "wt", compression="infer") as write_file:
            json.dump(obj=self.to_dict(), fp=write_file, indent=2, ensure_ascii=False)
            write_file.write("\n")  # json.dump does not include a trailing newline

    @classmethod
    def read_json(cls, path: str | PathLike[str]) -> DescentTrace:
        """Return a trace as written by `write_json`."""
        path = fspath(path)
        with fsspec.open(path, "rt", compression="infer") as read_file:
            data = json.load(read_file)
        return cls.from_dict(data)


def holzer_reduce(
    eq: LegendreEquation, sol: Solution, max_steps: int = MAX_STEPS
) -> DescentTrace:
    """
    Descend from `sol` until |z| <= sqrt((1 + √2)|ab|).
    The solution is primitivized first and after every step,
    since a step needs gcd(x0, y0) to be a unit.
    Terminates because norm(z) strictly decreases.
    """
    if not eq.normal:
        raise NotNormalFormError(f"descent requires an equation in normal form: {eq}")
    if not check_solution(eq, sol):
        raise PreconditionError(f"{sol} does not solve {eq}")
    current = primitivize(sol, equation=eq)
    steps: list[DescentStep] = []
    while not bound_test(current.z, eq.a, eq.b):
        if len(steps) >= max_steps:
            raise InvariantFault(f"descent exceeded {max_steps:,} steps for {eq}")
        step = descent_step(eq, current)
        steps.append(step)
        current = primitivize(step.output, equation=eq)
    trace = DescentTrace(equation=eq, steps=tuple(steps), final=current)
    if not trace.bound_holds:
        raise InvariantFault(f"final solution {current} violates the bound for {eq}")
    logger.info(
        f"Descent on {eq} took {len(steps)} step(s) to reach {current} "
        f"with norm(z) = {current.z.norm()}"
    )
    return trace
