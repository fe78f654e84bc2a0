"""
Desk-scale factorization in Z[i], square-freeness and quadratic residuosity.

Norms are factored over Z by trial division (through sympy) up to a ceiling.
Each rational prime p then lifts to Gaussian primes:
2 ramifies as -i(1+i)², p ≡ 3 (mod 4) stays inert,
and p ≡ 1 (mod 4) splits into two conjugate non-associate primes.
"""
from __future__ import annotations

import dataclasses
import functools
import logging
import math

from sympy import factorint, isprime
from sympy.ntheory import sqrt_mod

from .exceptions import CoefficientTooLargeError, NotCoprimeError
from .gaussint import (
    ONE,
    ONE_PLUS_I,
    ZERO,
    GaussianInt,
    canonical_associate,
    euclid_divmod,
    gcd,
    iter_box,
)
from .utils import get_factor_ceiling

logger = logging.getLogger(__name__)


def prime_sort_key(prime: GaussianInt) -> tuple[int, int, int]:
    return prime.norm(), prime.re, prime.im


@dataclasses.dataclass(frozen=True)
class Factorization:
    """
    Factorization `unit * prod(prime**exponent)` of a nonzero Gaussian integer.
    Primes are canonical associates, pairwise non-associate,
    and sorted by (norm, re, im).
    """

    unit: GaussianInt
    factors: tuple[tuple[GaussianInt, int], ...]

    def expand(self) -> GaussianInt:
        """Multiply the factorization back out."""
        product = self.unit
        for prime, exponent in self.factors:
            product *= prime**exponent
        return product

    @property
    def primes(self) -> list[GaussianInt]:
        return [prime for prime, _ in self.factors]

    @property
    def is_squarefree(self) -> bool:
        return all(exponent == 1 for _, exponent in self.factors)

    def square_part(self) -> GaussianInt:
        """Root of the largest square divisor, prod(prime**(exponent // 2)), as a canonical associate."""
        root = ONE
        for prime, exponent in self.factors:
            root *= prime ** (exponent // 2)
        return canonical_associate(root)


@functools.lru_cache(maxsize=4096)
def factor_rational(n: int, ceiling: int) -> tuple[tuple[int, int], ...]:
    """
    Factor a positive rational integer by trial division up to `ceiling`.
    A cofactor left over by the ceiling must be certified prime,
    otherwise CoefficientTooLargeError is raised.
    """
    if n < 1:
        raise ValueError(f"can only factor positive integers, not {n}")
    factors = factorint(n, limit=ceiling, use_rho=False, use_pm1=False)
    for p in factors:
        if not isprime(p):
            raise CoefficientTooLargeError(
                f"cannot factor {n} with trial division up to {ceiling:,}: "
                f"composite cofactor {p} remains. Raise LEGZ_FACTOR_CEILING to continue."
            )
    logger.debug(f"Factored norm {n} as {factors}")
    return tuple(sorted((int(p), int(e)) for p, e in factors.items()))


@functools.lru_cache(maxsize=4096)
def gaussian_primes_over(p: int) -> tuple[GaussianInt, ...]:
    """Canonical Gaussian primes dividing the rational prime p."""
    if p == 2:
        return (ONE_PLUS_I,)
    if p % 4 == 3:
        return (GaussianInt(p),)
    # a root of -1 modulo p gives the split p = gcd(p, r + i) * conjugate
    r = int(sqrt_mod(-1, p))
    prime = gcd(GaussianInt(p), GaussianInt(r, 1))
    assert prime.norm() == p
    return tuple(
        sorted(
            {prime, canonical_associate(prime.conjugate())},
            key=prime_sort_key,
        )
    )


def factorize(g: GaussianInt, ceiling: int | None = None) -> Factorization:
    """
    Factor g into a unit times powers of canonical Gaussian primes.
    `ceiling` bounds trial division on norm(g) and defaults to LEGZ_FACTOR_CEILING.
    """
    if not g:
        raise ValueError("cannot factorize zero")
    if ceiling is None:
        ceiling = get_factor_ceiling()
    remaining = g
    exponents: dict[GaussianInt, int] = {}
    for p, _ in factor_rational(g.norm(), ceiling):
        for prime in gaussian_primes_over(p):
            exponent = 0
            while True:
                quotient, remainder = euclid_divmod(remaining, prime)
                if remainder:
                    break
                remaining = quotient
                exponent += 1
            if exponent:
                exponents[prime] = exponent
    if not remaining.is_unit():
        raise AssertionError(f"factorization of {g} left non-unit cofactor {remaining}")
    factors = tuple(sorted(exponents.items(), key=lambda item: prime_sort_key(item[0])))
    return Factorization(unit=remaining, factors=factors)


def is_squarefree(g: GaussianInt, ceiling: int | None = None) -> bool:
    """Whether no prime square divides g. Units are square-free."""
    return factorize(g, ceiling=ceiling).is_squarefree


def residue_system(m: GaussianInt) -> list[GaussianInt]:
    """
    Complete residue system modulo m, made of the Euclidean remainders.
    Every remainder r satisfies 2*norm(r) <= norm(m),
    so the box of radius sqrt(norm(m)/2) holds all of them,
    and a point is a remainder exactly when it reduces to itself.
    """
    if not m:
        raise ValueError("residue system modulo zero is infinite")
    radius = math.isqrt(m.norm() // 2) + 1
    residues = [g for g in iter_box(radius) if euclid_divmod(g, m)[1] == g]
    assert len(residues) == m.norm()
    return residues


def quadratic_residue_witness(n: GaussianInt, m: GaussianInt) -> GaussianInt | None:
    """
    A root w with w² ≡ n (mod m), or None when n is not a quadratic residue modulo m.
    Searches the complete residue system exhaustively.
    Requires gcd(n, m) to be a unit: the criterion is left undefined otherwise.
    """
    if not m:
        raise ValueError("quadratic residues modulo zero are undefined")
    if m.is_unit():
        return ZERO
    if not n or not gcd(n, m).is_unit():
        raise NotCoprimeError(
            f"quadratic residuosity of {n} modulo {m} requires coprime arguments"
        )
    for w in residue_system(m):
        if not euclid_divmod(w * w - n, m)[1]:
            return w
    return None


def is_quadratic_residue(n: GaussianInt, m: GaussianInt) -> bool:
    """Whether w² ≡ n (mod m) has a solution w in Z[i]."""
    return quadratic_residue_witness(n, m) is not None
