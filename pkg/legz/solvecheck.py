from __future__ import annotations

import concurrent.futures
import dataclasses
import functools
import itertools
import logging
import math
from typing import Iterable, Sequence, cast

from .exceptions import InvariantFault, NotNormalFormError
from .factor import quadratic_residue_witness
from .gaussint import GaussianInt, iter_norm_ball
from .normform import LegendreEquation, Solution, primitivize

logger = logging.getLogger(__name__)

Pair = tuple[int, int]
"""Gaussian integer as a bare (re, im) pair, used in the search core."""


@dataclasses.dataclass(frozen=True)
class ResidueWitness:
    """
    One condition of the solvability criterion:
    is `target` a square modulo `modulus`?
    `root` is a square root when the condition holds,
    and None once the whole residue system was exhausted without finding one.
    """

    label: str
    target: GaussianInt
    modulus: GaussianInt
    root: GaussianInt | None

    @property
    def holds(self) -> bool:
        return self.root is not None

    def check(self) -> bool:
        """Verify root² ≡ target (mod modulus) exactly."""
        if self.root is None:
            return False
        return not (self.root * self.root - self.target) % self.modulus

    def to_text(self) -> str:
        found = f"root={self.root}" if self.root is not None else "exhausted"
        return f"QR {self.label}: {self.target} mod {self.modulus}: {found}"


@dataclasses.dataclass(frozen=True)
class SolvabilityReport:
    """Outcome of the solvability criterion with one witness per condition."""

    solvable: bool
    witnesses: tuple[ResidueWitness, ResidueWitness, ResidueWitness]

    def to_text(self) -> str:
        lines = [witness.to_text() for witness in self.witnesses]
        lines.append(f"solvable: {str(self.solvable).lower()}")
        return "".join(f"{line}\n" for line in lines)

    def to_dict(self) -> dict[str, object]:
        return {
            "solvable": self.solvable,
            "witnesses": [
                {
                    "condition": witness.label,
                    "target": str(witness.target),
                    "modulus": str(witness.modulus),
                    "root": None if witness.root is None else str(witness.root),
                }
                for witness in self.witnesses
            ],
        }


def samet_solvable(eq: LegendreEquation) -> SolvabilityReport:
    """
    Solvability of a normal-form equation over Z[i]:
    solvable exactly when bc, ca and ab are quadratic residues
    modulo a, b and c respectively.
    (The negative signs of the integer criterion drop out since i² = -1.)
    """
    if not eq.normal:
        raise NotNormalFormError(f"solvability criterion requires normal form: {eq}")
    a, b, c = eq.coefficients
    conditions = [("bc mod a", b * c, a), ("ca mod b", c * a, b), ("ab mod c", a * b, c)]
    witnesses = tuple(
        ResidueWitness(label, target, modulus, quadratic_residue_witness(target, modulus))
        for label, target, modulus in conditions
    )
    report = SolvabilityReport(
        solvable=all(witness.holds for witness in witnesses),
        witnesses=witnesses,  # type: ignore [arg-type]
    )
    logger.info(f"Solvability of {eq}: {report.solvable}")
    return report


@dataclasses.dataclass(frozen=True)
class CheckResult:
    """Exact substitution check; `residual` is a*x² + b*y² + c*z²."""

    ok: bool
    residual: GaussianInt

    def __bool__(self) -> bool:
        return self.ok


def check_solution(eq: LegendreEquation, sol: Solution) -> CheckResult:
    """
    Substitute a solution into the equation.
    A trivial triple cannot reach this point, since Solution rejects (0, 0, 0).
    """
    residual = eq.residual(sol.x, sol.y, sol.z)
    return CheckResult(ok=not residual, residual=residual)


def solution_order_key(sol: Solution) -> tuple[int, ...]:
    """
    Minimality ordering of search results: norms of z, y, x first,
    then larger coordinates of z, y, x win ties.
    """
    x, y, z = sol.components
    return (
        z.norm(),
        y.norm(),
        x.norm(),
        -z.re,
        -z.im,
        -y.re,
        -y.im,
        -x.re,
        -x.im,
    )


def _mul(g: Pair, h: Pair) -> Pair:
    return g[0] * h[0] - g[1] * h[1], g[0] * h[1] + g[1] * h[0]


def _sqrt(g: Pair) -> Pair | None:
    # integer-pair version of gaussint.square_root, kept inline for speed
    re_, im_ = g
    n = re_ * re_ + im_ * im_
    r = math.isqrt(n)
    if r * r != n or (r + re_) % 2:
        return None
    u2, v2 = (r + re_) // 2, (r - re_) // 2
    u, v = math.isqrt(u2), math.isqrt(v2)
    if u * u != u2 or v * v != v2 or 2 * u * v != abs(im_):
        return None
    return u, (v if im_ >= 0 else -v)


def _in_half_plane(g: Pair) -> bool:
    # one representative of each pair {g, -g}
    return g[0] > 0 or (g[0] == 0 and g[1] >= 0)


def _level(pair: tuple[Pair, Pair]) -> tuple[int, int]:
    y, z = pair
    return z[0] * z[0] + z[1] * z[1], y[0] * y[0] + y[1] * y[1]


Level = tuple[tuple[Pair, Pair], ...]


@functools.lru_cache(maxsize=8)
def search_levels(bound: int) -> tuple[Level, ...]:
    """
    (y, z) pairs with norms at most `bound`, one sign representative of y and of z,
    grouped into levels of equal (norm(z), norm(y)) in increasing order.
    """
    ball = [
        (g.re, g.im) for g in iter_norm_ball(bound) if _in_half_plane((g.re, g.im))
    ]
    pairs = sorted(((y, z) for z in ball for y in ball), key=_level)
    return tuple(tuple(group) for _, group in itertools.groupby(pairs, key=_level))


def _search_pairs(
    coefficients: tuple[Pair, Pair, Pair],
    pairs: Sequence[tuple[Pair, Pair]],
    bound: int,
) -> list[tuple[Pair, Pair, Pair]]:
    """
    For each (y, z) in `pairs`, solve a*x² = -(b*y² + c*z²) for x with norm(x) <= bound.
    Returns every nontrivial (x, y, z) found, with both signs of x.
    """
    a, b, c = coefficients
    a_conj = (a[0], -a[1])
    a_norm = a[0] * a[0] + a[1] * a[1]
    found = []
    for y, z in pairs:
        by2 = _mul(b, _mul(y, y))
        cz2 = _mul(c, _mul(z, z))
        rhs = (-(by2[0] + cz2[0]), -(by2[1] + cz2[1]))
        # rhs / a == rhs * conj(a) / norm(a)
        w = _mul(rhs, a_conj)
        if w[0] % a_norm or w[1] % a_norm:
            continue
        root = _sqrt((w[0] // a_norm, w[1] // a_norm))
        if root is None or root[0] * root[0] + root[1] * root[1] > bound:
            continue
        for x in {root, (-root[0], -root[1])}:
            if x == (0, 0) and y == (0, 0) and z == (0, 0):
                continue
            found.append((x, y, z))
    return found


def _best(
    eq: LegendreEquation, found: Iterable[tuple[Pair, Pair, Pair]]
) -> Solution | None:
    """Minimal unit-normalized solution among `found` and their sign changes of y and z."""
    candidates = []
    for x, y, z in found:
        for sign_y, sign_z in itertools.product((1, -1), repeat=2):
            sol = Solution(
                GaussianInt(*x),
                GaussianInt(sign_y * y[0], sign_y * y[1]),
                GaussianInt(sign_z * z[0], sign_z * z[1]),
            )
            candidates.append(primitivize(sol).normalize_units())
    if not candidates:
        return None
    best = min(candidates, key=solution_order_key)
    if not check_solution(eq, best):
        raise InvariantFault(f"search produced {best}, which does not solve {eq}")
    return best


def _chunk_levels(levels: Sequence[Level], n_chunks: int) -> list[list[tuple[Pair, Pair]]]:
    """Concatenate consecutive whole levels into about `n_chunks` chunks of similar size."""
    total = sum(len(level) for level in levels)
    target = max(1, math.ceil(total / max(1, n_chunks)))
    chunks: list[list[tuple[Pair, Pair]]] = []
    current: list[tuple[Pair, Pair]] = []
    for level in levels:
        current.extend(level)
        if len(current) >= target:
            chunks.append(current)
            current = []
    if current:
        chunks.append(current)
    return chunks


def brute_force_search(
    eq: LegendreEquation, bound: int, jobs: int = 1
) -> Solution | None:
    """
    Minimal primitive solution with max(norm(x), norm(y), norm(z)) <= bound
    under `solution_order_key`, after unit normalization, or None if there is none.

    (y, z) pairs are visited level by level in increasing (norm(z), norm(y)),
    solving c*z² + b*y² = -a*x² for x.
    A non-primitive solution is preceded by its primitive part, which sits on a lower level,
    so the first level holding any solution holds the minimum and the search stops there.
    With jobs > 1, chunks of whole levels are searched in worker processes
    and the first chunk in level order with a solution decides, as in a serial run.
    """
    if bound < 1:
        raise ValueError(f"search bound must be at least 1, not {bound}")
    levels = search_levels(bound)
    coefficients = cast(
        "tuple[Pair, Pair, Pair]", tuple((g.re, g.im) for g in eq.coefficients)
    )
    logger.debug(
        f"Searching {sum(len(level) for level in levels):,} (y, z) pairs "
        f"in {len(levels):,} levels with bound {bound} and {jobs} job(s)"
    )
    result: Solution | None = None
    if jobs <= 1:
        for level in levels:
            found = _search_pairs(coefficients, level, bound)
            if found:
                result = _best(eq, found)
                break
    else:
        chunks = _chunk_levels(levels, n_chunks=4 * jobs)
        executor = concurrent.futures.ProcessPoolExecutor(max_workers=jobs)
        try:
            futures = [
                executor.submit(_search_pairs, coefficients, chunk, bound)
                for chunk in chunks
            ]
            for future in futures:
                found = future.result()
                if found:
                    first = min(_level((y, z)) for _, y, z in found)
                    result = _best(eq, [t for t in found if _level((t[1], t[2])) == first])
                    break
        finally:
            executor.shutdown(wait=True, cancel_futures=True)
    logger.info(f"Search of {eq} with bound {bound}: {result}")
    return result
