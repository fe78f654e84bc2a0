"""
Command-line interface: `legz <subcommand> -a A -b B -c C [options]`.

Coefficients and solution components use the Gaussian integer text syntax,
such as 7, i, 2+2i or 3-2i. Negative values may follow their flag as a
separate word (`-b -i`), or be attached to it (`-b=-i`, `-b-i`).
"""
from __future__ import annotations

import argparse
import dataclasses
import enum
import json
import logging
import sys
from typing import Any, Callable, Literal, Sequence

import fsspec

from .descent import DescentTrace, bound_test, holzer_reduce
from .exceptions import (
    CoefficientSyntaxError,
    CoefficientTooLargeError,
    InvariantFault,
    LEGZ_Exception,
    NotCoprimeError,
    PreconditionError,
    TrivialSolutionError,
)
from .gaussint import GaussianInt
from .normform import (
    LegendreEquation,
    NormalizationTrace,
    Solution,
    normalize,
    primitivize,
    pull_back,
    push_forward,
)
from .solvecheck import SolvabilityReport, brute_force_search, check_solution, samet_solvable
from .utils import get_legz_version

logger = logging.getLogger(__name__)

Subcommand = Literal["solve", "check", "normalize", "samet", "search", "trace"]
SUBCOMMANDS: tuple[Subcommand, ...] = ("solve", "check", "normalize", "samet", "search", "trace")
DEFAULT_SEARCH_BOUND = 200


class ExitCode(enum.IntEnum):
    SUCCESS = 0
    NEGATIVE = 1
    USAGE = 2
    FAULT = 3


# most specific first
_FAILURES: list[tuple[type[Exception], ExitCode, str]] = [
    (InvariantFault, ExitCode.FAULT, "invariant-fault"),
    (TrivialSolutionError, ExitCode.NEGATIVE, "trivial-solution"),
    (CoefficientSyntaxError, ExitCode.USAGE, "syntax-error"),
    (CoefficientTooLargeError, ExitCode.USAGE, "coefficient-too-large"),
    (NotCoprimeError, ExitCode.USAGE, "not-coprime"),
    (LEGZ_Exception, ExitCode.USAGE, "usage-error"),
    (ValueError, ExitCode.USAGE, "usage-error"),
]


def parse_coefficient(text: str) -> GaussianInt:
    """Parse a Gaussian integer such as "2+2i", "-i" or "7"."""
    return GaussianInt.parse(text)


@dataclasses.dataclass(frozen=True)
class Invocation:
    subcommand: Subcommand
    a: GaussianInt
    b: GaussianInt
    c: GaussianInt
    x: GaussianInt | None = None
    y: GaussianInt | None = None
    z: GaussianInt | None = None
    search_bound: int = DEFAULT_SEARCH_BOUND
    output_mode: Literal["text", "json"] = "text"
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise PreconditionError(f"unknown subcommand {self.subcommand!r}")
        for name in "abc":
            if not getattr(self, name):
                raise PreconditionError(f"coefficient {name} must be nonzero")
        given = [value is not None for value in (self.x, self.y, self.z)]
        if self.subcommand == "check" and not all(given):
            raise PreconditionError("check requires -x, -y and -z")
        if self.subcommand == "trace" and any(given) and not all(given):
            raise PreconditionError("a trace seed requires all of -x, -y and -z")
        if self.subcommand not in {"check", "trace"} and any(given):
            raise PreconditionError(f"{self.subcommand} does not accept -x, -y or -z")
        if self.search_bound < 1:
            raise PreconditionError(f"--search-bound must be positive, not {self.search_bound}")
        if self.jobs < 1:
            raise PreconditionError(f"--jobs must be positive, not {self.jobs}")

    @classmethod
    def from_namespace(cls, args: argparse.Namespace) -> Invocation:
        def optional(text: str | None) -> GaussianInt | None:
            return None if text is None else parse_coefficient(text)

        return cls(
            subcommand=args.subcommand,
            a=parse_coefficient(args.a),
            b=parse_coefficient(args.b),
            c=parse_coefficient(args.c),
            x=optional(args.x),
            y=optional(args.y),
            z=optional(args.z),
            search_bound=args.search_bound,
            output_mode="json" if args.json else "text",
            jobs=args.jobs,
        )

    @property
    def equation(self) -> LegendreEquation:
        return LegendreEquation(self.a, self.b, self.c)

    @property
    def solution(self) -> Solution | None:
        if self.x is None or self.y is None or self.z is None:
            return None
        return Solution(self.x, self.y, self.z)


@dataclasses.dataclass
class Outcome:
    """
    Result of running an invocation.
    `error` is the one-line `<reason>: <detail>` explanation of a nonzero exit.
    """

    exit_code: ExitCode
    report: str
    error: str | None = None


@dataclasses.dataclass
class _Report:
    """Fields shared by the text and JSON renderings of every subcommand."""

    equation: LegendreEquation
    normal_form: LegendreEquation | None = None
    normalization: NormalizationTrace | None = None
    solvability: SolvabilityReport | None = None
    solution: Solution | None = None
    descent: DescentTrace | None = None
    bound_holds: bool | None = None
    lines: list[str] = dataclasses.field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        def coefficients(eq: LegendreEquation | None) -> dict[str, str] | None:
            if eq is None:
                return None
            return {"a": str(eq.a), "b": str(eq.b), "c": str(eq.c)}

        trace = None
        if self.normalization is not None or self.descent is not None:
            trace = {
                "normalization": []
                if self.normalization is None
                else self.normalization.to_text().splitlines(),
                "steps": []
                if self.descent is None
                else [step.to_dict() for step in self.descent.steps],
            }
        return {
            "equation": coefficients(self.equation),
            "normal_form": coefficients(self.normal_form),
            "solvable": None if self.solvability is None else self.solvability.solvable,
            "solution": None
            if self.solution is None
            else {"x": str(self.solution.x), "y": str(self.solution.y), "z": str(self.solution.z)},
            "trace": trace,
            "bound_holds": self.bound_holds,
        }

    def render(self, output_mode: str) -> str:
        if output_mode == "json":
            return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"
        return "".join(f"{line}\n" for line in self.lines)


def _normal_bound_holds(
    sol: Solution, trace: NormalizationTrace, normal_form: LegendreEquation
) -> bool:
    """Whether `sol` of the original equation lands within the bound on the normal form."""
    pushed = primitivize(push_forward(sol, trace, equation=normal_form), equation=normal_form)
    return bound_test(pushed.z, normal_form.a, normal_form.b)


def _run_check(inv: Invocation, report: _Report) -> tuple[ExitCode, str | None]:
    sol = inv.solution
    assert sol is not None
    result = check_solution(report.equation, sol)
    report.solution = sol
    report.lines += [f"equation: {report.equation}", f"solution: {sol}", f"residual: {result.residual}"]
    if not result:
        return ExitCode.NEGATIVE, f"not-a-solution: residual {result.residual}"
    return ExitCode.SUCCESS, None


def _run_normalize(inv: Invocation, report: _Report) -> tuple[ExitCode, str | None]:
    report.normal_form, report.normalization = normalize(report.equation)
    report.lines += [f"equation: {report.equation}", f"normal form: {report.normal_form}"]
    report.lines += report.normalization.to_text().splitlines()
    return ExitCode.SUCCESS, None


def _run_samet(inv: Invocation, report: _Report) -> tuple[ExitCode, str | None]:
    _run_normalize(inv, report)
    assert report.normal_form is not None
    report.solvability = samet_solvable(report.normal_form)
    report.lines += report.solvability.to_text().splitlines()
    if not report.solvability.solvable:
        return ExitCode.NEGATIVE, f"not-solvable: {report.normal_form}"
    return ExitCode.SUCCESS, None


def _run_search(inv: Invocation, report: _Report) -> tuple[ExitCode, str | None]:
    found = brute_force_search(report.equation, inv.search_bound, jobs=inv.jobs)
    report.solution = found
    report.lines.append(f"equation: {report.equation}")
    if found is None:
        report.lines.append(f"no solution with norms at most {inv.search_bound}")
        return ExitCode.NEGATIVE, f"no-solution-in-bound: search bound {inv.search_bound}"
    report.lines.append(f"solution: {found}")
    return ExitCode.SUCCESS, None


def _descend(
    inv: Invocation, report: _Report, seed: Solution | None
) -> tuple[ExitCode, str | None]:
    """Normalize, decide solvability, seed and reduce, then map the result back."""
    code, error = _run_samet(inv, report)
    if code:
        return code, error
    normal_form, normalization = report.normal_form, report.normalization
    assert normal_form is not None and normalization is not None
    if seed is None:
        seed = brute_force_search(normal_form, inv.search_bound, jobs=inv.jobs)
        if seed is None:
            return ExitCode.NEGATIVE, (
                f"no-solution-in-bound: no seed for {normal_form} "
                f"with search bound {inv.search_bound}"
            )
    else:
        if not check_solution(report.equation, seed):
            return ExitCode.NEGATIVE, f"not-a-solution: {seed} does not solve {report.equation}"
        seed = push_forward(seed, normalization, equation=normal_form)
    report.lines.append(f"seed: {seed}")
    report.descent = holzer_reduce(normal_form, seed)
    solution = pull_back(report.descent.final, normalization, equation=normal_form)
    report.solution = primitivize(solution).normalize_units()
    report.bound_holds = _normal_bound_holds(report.solution, normalization, normal_form)
    if not report.bound_holds:
        raise InvariantFault(f"{report.solution} does not satisfy the bound on {normal_form}")
    return ExitCode.SUCCESS, None


def _run_solve(inv: Invocation, report: _Report) -> tuple[ExitCode, str | None]:
    code, error = _descend(inv, report, seed=None)
    if code:
        return code, error
    assert report.descent is not None
    report.lines += [
        f"descent: {len(report.descent.steps)} step(s)",
        f"solution: {report.solution}",
        f"bound holds: {str(report.bound_holds).lower()}",
    ]
    return code, error


def _run_trace(inv: Invocation, report: _Report) -> tuple[ExitCode, str | None]:
    code, error = _descend(inv, report, seed=inv.solution)
    if code:
        return code, error
    assert report.descent is not None
    report.lines += report.descent.to_text().splitlines()
    report.lines.append(f"solution: {report.solution}")
    return code, error


_RUNNERS: dict[str, Callable[[Invocation, _Report], tuple[ExitCode, str | None]]] = {
    "solve": _run_solve,
    "check": _run_check,
    "normalize": _run_normalize,
    "samet": _run_samet,
    "search": _run_search,
    "trace": _run_trace,
}


def _failure(error: Exception) -> tuple[ExitCode, str]:
    for exception_type, code, reason in _FAILURES:
        if isinstance(error, exception_type):
            return code, f"{reason}: {error}"
    raise error


def run(inv: Invocation) -> Outcome:
    """Execute an invocation and render its report."""
    try:
        report = _Report(equation=inv.equation)
        code, error = _RUNNERS[inv.subcommand](inv, report)
    except (LEGZ_Exception, ValueError) as e:
        code, error = _failure(e)
        logger.debug(f"{inv.subcommand} failed", exc_info=True)
        return Outcome(exit_code=code, report="", error=error)
    return Outcome(exit_code=code, report=report.render(inv.output_mode), error=error)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    for flag in "abc":
        common.add_argument(f"-{flag}", required=True, help=f"coefficient {flag}")
    for flag in "xyz":
        common.add_argument(f"-{flag}", help=f"solution component {flag}")
    common.add_argument(
        "--search-bound",
        type=int,
        default=DEFAULT_SEARCH_BOUND,
        help="largest norm of any component visited by the seed search",
    )
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for the search")
    common.add_argument("--output", help="write the report to this path or URL instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    parser = argparse.ArgumentParser(
        prog="legz",
        description="Legendre equations a*x^2 + b*y^2 + c*z^2 = 0 over the Gaussian integers.",
        epilog=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {get_legz_version()}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    helps = {
        "solve": "find a solution whose normal-form z component satisfies the bound",
        "check": "substitute a solution into the equation",
        "normalize": "reduce to square-free, pairwise coprime coefficients",
        "samet": "decide solvability by quadratic residues",
        "search": "smallest solution within the search bound",
        "trace": "print every descent step",
    }
    for name in SUBCOMMANDS:
        subparsers.add_parser(name, parents=[common], help=helps[name])
    return parser


def _write(text: str, output: str | None) -> None:
    if output is None:
        print(text, end="")
        return
    with fsspec.open(output, "wt", compression="infer") as write_file:
        write_file.write(text)


_VALUE_FLAGS = frozenset(f"-{flag}" for flag in "abcxyz")


def attach_negative_values(argv: Sequence[str]) -> list[str]:
    """
    Join `-b -i` into `-b=-i`. argparse reads a separate word such as `-i` or `-1+2i`
    as an option, so values in the coefficient syntax are attached to their flag.
    """
    joined: list[str] = []
    tokens = iter(argv)
    for token in tokens:
        if token in _VALUE_FLAGS:
            value = next(tokens, None)
            if value is None:
                joined.append(token)
            elif value.startswith("-") and _is_coefficient(value):
                joined.append(f"{token}={value}")
            else:
                joined.extend((token, value))
            continue
        joined.append(token)
    return joined


def _is_coefficient(text: str) -> bool:
    try:
        GaussianInt.parse(text)
    except CoefficientSyntaxError:
        return False
    return True


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = attach_negative_values(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        inv = Invocation.from_namespace(args)
    except (LEGZ_Exception, ValueError) as e:
        code, error = _failure(e)
        print(f"legz: {error}", file=sys.stderr)
        return int(code)
    outcome = run(inv)
    if outcome.report:
        _write(outcome.report, args.output)
    if outcome.error is not None:
        print(f"legz: {outcome.error}", file=sys.stderr)
    return int(outcome.exit_code)


if __name__ == "__main__":
    raise SystemExit(main())
