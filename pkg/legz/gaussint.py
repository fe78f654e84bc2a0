"""
Exact arithmetic in the Gaussian integers Z[i] and the Gaussian rationals Q(i).

The ring and field arithmetic is sympy's `ZZ_I` and `QQ_I` domains.
This module adds the coefficient text syntax, a reduced num/den view of
Gaussian rationals and the rounding rules the descent depends on.
All values are immutable and every function is pure.
Magnitudes are only ever compared through exact norms (squared moduli);
there is no floating point in this module.
"""
from __future__ import annotations

import dataclasses
import math
import re
from typing import Iterator, Union

from sympy import QQ_I, ZZ_I
from sympy.external.gmpy import MPQ
from sympy.polys.domains.gaussiandomains import GaussianInteger as ZZ_I_Element
from sympy.polys.domains.gaussiandomains import GaussianRational as QQ_I_Element
from sympy.polys.polyerrors import ExactQuotientFailed

from .exceptions import CoefficientSyntaxError, InexactDivisionError, NotCoprimeError

_INTEGER_PATTERN = re.compile(r"[+-]?\d+")
# the real part is only present when followed by the sign of the imaginary part,
# so that "22i" parses as 22i rather than 22 + i.
_GAUSSIAN_PATTERN = re.compile(r"(?:(?P<re>[+-]?\d+)(?=[+-]))?(?P<im>[+-]?\d*)i")


@dataclasses.dataclass(frozen=True)
class GaussianInt:
    """
    Gaussian integer `re + im*i` with arbitrary-precision components.
    Backed by a sympy `ZZ_I` element (`zz_i`) that carries the ring operations.
    Supports them through Python operators,
    Euclidean division through `divmod`, `//` and `%`,
    and exact division into the Gaussian rationals through `/`.
    """

    re: int
    im: int = 0
    zz_i: ZZ_I_Element = dataclasses.field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for value in self.re, self.im:
            if not isinstance(value, int) or isinstance(value, bool):
                raise TypeError(
                    f"GaussianInt components must be int, not {type(value).__name__}"
                )
        object.__setattr__(self, "zz_i", ZZ_I(self.re, self.im))

    @classmethod
    def from_zz_i(cls, element: ZZ_I_Element) -> GaussianInt:
        # ZZ components may be gmpy2 mpz
        return cls(int(element.x), int(element.y))

    @classmethod
    def coerce(cls, value: GaussianLike) -> GaussianInt:
        """Convert an int or GaussianInt to a GaussianInt."""
        if isinstance(value, GaussianInt):
            return value
        if isinstance(value, int) and not isinstance(value, bool):
            return cls(value, 0)
        raise TypeError(f"cannot convert {value!r} to GaussianInt")

    @classmethod
    def parse(cls, text: str) -> GaussianInt:
        """
        Parse the coefficient text syntax: an optional sign and decimal digits,
        with an optional imaginary part, e.g. "7", "i", "-i", "2+2i", "3-2i".
        """
        text = text.strip()
        if _INTEGER_PATTERN.fullmatch(text):
            return cls(int(text))
        match = _GAUSSIAN_PATTERN.fullmatch(text)
        if match is None:
            raise CoefficientSyntaxError(f"not a Gaussian integer: {text!r}")
        real = int(match["re"]) if match["re"] else 0
        imag = match["im"]
        if imag in ("", "+"):
            return cls(real, 1)
        if imag == "-":
            return cls(real, -1)
        return cls(real, int(imag))

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        imag = {1: "i", -1: "-i"}.get(self.im, f"{self.im}i")
        if not self.re:
            return imag
        sign = "" if self.im < 0 else "+"
        return f"{self.re}{sign}{imag}"

    def __reduce__(self) -> tuple[type[GaussianInt], tuple[int, int]]:
        # the sympy element is rebuilt from the components
        return GaussianInt, (self.re, self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __neg__(self) -> GaussianInt:
        return GaussianInt.from_zz_i(-self.zz_i)

    def __pos__(self) -> GaussianInt:
        return self

    def __add__(self, other: GaussianLike) -> GaussianInt:
        if not isinstance(other, (GaussianInt, int)):
            return NotImplemented
        return GaussianInt.from_zz_i(self.zz_i + GaussianInt.coerce(other).zz_i)

    __radd__ = __add__

    def __sub__(self, other: GaussianLike) -> GaussianInt:
        if not isinstance(other, (GaussianInt, int)):
            return NotImplemented
        return GaussianInt.from_zz_i(self.zz_i - GaussianInt.coerce(other).zz_i)

    def __rsub__(self, other: GaussianLike) -> GaussianInt:
        if not isinstance(other, (GaussianInt, int)):
            return NotImplemented
        return GaussianInt.coerce(other) - self

    def __mul__(self, other: GaussianLike) -> GaussianInt:
        if not isinstance(other, (GaussianInt, int)):
            return NotImplemented
        return GaussianInt.from_zz_i(self.zz_i * GaussianInt.coerce(other).zz_i)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> GaussianInt:
        if exponent < 0:
            raise ValueError("negative powers leave Z[i], use GaussianRational")
        return GaussianInt.from_zz_i(self.zz_i**exponent)

    def __divmod__(self, other: GaussianLike) -> tuple[GaussianInt, GaussianInt]:
        if not isinstance(other, (GaussianInt, int)):
            return NotImplemented
        return euclid_divmod(self, GaussianInt.coerce(other))

    def __floordiv__(self, other: GaussianLike) -> GaussianInt:
        return divmod(self, other)[0]

    def __mod__(self, other: GaussianLike) -> GaussianInt:
        return divmod(self, other)[1]

    def __truediv__(self, other: GaussianLike) -> GaussianRational:
        if not isinstance(other, (GaussianInt, int)):
            return NotImplemented
        return GaussianRational(self, GaussianInt.coerce(other))

    def conjugate(self) -> GaussianInt:
        return GaussianInt(self.re, -self.im)

    def norm(self) -> int:
        """Norm re² + im², the squared modulus."""
        return self.re * self.re + self.im * self.im

    def is_unit(self) -> bool:
        return self.norm() == 1


GaussianLike = Union[GaussianInt, int]

ZERO = GaussianInt(0, 0)
ONE = GaussianInt(1, 0)
I = GaussianInt(0, 1)  # noqa: E741
ONE_PLUS_I = GaussianInt(1, 1)
UNITS: tuple[GaussianInt, ...] = (ONE, I, -ONE, -I)
"""The four units of Z[i], in the order 1, i, -1, -i."""


def norm(g: GaussianInt) -> int:
    return g.norm()


def euclid_divmod(n: GaussianInt, d: GaussianInt) -> tuple[GaussianInt, GaussianInt]:
    """
    Euclidean division n = q*d + r in `ZZ_I`, where q is the nearest-lattice rounding of n/d
    (ties toward +infinity in each coordinate), so that 2*norm(r) <= norm(d).
    Since rounding commutes with integer shifts,
    congruent dividends receive the same remainder.
    """
    if not d:
        raise ZeroDivisionError(f"divmod({n}, 0)")
    q, r = divmod(n.zz_i, d.zz_i)
    return GaussianInt.from_zz_i(q), GaussianInt.from_zz_i(r)


def exact_div(n: GaussianInt, d: GaussianInt) -> GaussianInt:
    """Quotient n/d, raising InexactDivisionError if d does not divide n."""
    if not d:
        raise ZeroDivisionError(f"{n} / 0")
    try:
        return GaussianInt.from_zz_i(ZZ_I.exquo(n.zz_i, d.zz_i))
    except ExactQuotientFailed:
        raise InexactDivisionError(f"{d} does not divide {n}") from None


def divides(d: GaussianInt, n: GaussianInt) -> bool:
    """Whether d | n. Zero divides only zero."""
    if not d:
        return not n
    return not euclid_divmod(n, d)[1]


def unit_normalizer(g: GaussianInt) -> GaussianInt:
    """The unit u such that u*g is the canonical associate of g."""
    if not g:
        raise ValueError("zero has no canonical associate")
    return GaussianInt.from_zz_i(ZZ_I.canonical_unit(g.zz_i))


def canonical_associate(g: GaussianInt) -> GaussianInt:
    """The associate of g (among g, ig, -g, -ig) with re > 0 and im >= 0."""
    if not g:
        raise ValueError("zero has no canonical associate")
    return GaussianInt.from_zz_i(ZZ_I.normalize(g.zz_i))


def gcd(g: GaussianInt, h: GaussianInt) -> GaussianInt:
    """Greatest common divisor, as a canonical associate."""
    if not g and not h:
        raise ValueError("gcd(0, 0) is undefined")
    return GaussianInt.from_zz_i(ZZ_I.gcd(g.zz_i, h.zz_i))


def gcd_many(*values: GaussianInt) -> GaussianInt:
    """Greatest common divisor of several values, not all zero."""
    result = ZERO
    for value in values:
        if value:
            result = gcd(result, value)
    if not result:
        raise ValueError("gcd of zeros is undefined")
    return result


def xgcd(g: GaussianInt, h: GaussianInt) -> tuple[GaussianInt, GaussianInt, GaussianInt]:
    """
    Extended Euclidean algorithm.
    Returns (d, s, t) with s*g + t*h == d, where d is the canonical gcd of g and h.
    """
    if not g and not h:
        raise ValueError("xgcd(0, 0) is undefined")
    s, t, d = ZZ_I.gcdex(g.zz_i, h.zz_i)
    return GaussianInt.from_zz_i(d), GaussianInt.from_zz_i(s), GaussianInt.from_zz_i(t)


def bezout(
    x0: GaussianInt, y0: GaussianInt, d: GaussianInt
) -> tuple[GaussianInt, GaussianInt]:
    """
    Solve y0*X - x0*Y == d for Gaussian integers X, Y, given coprime x0, y0.

    Solutions form the family (X + k*x0, Y + k*y0).
    The returned member is size-reduced: Y is reduced modulo y0
    by nearest-lattice rounding when y0 is nonzero, otherwise X is reduced modulo x0.
    """
    g, s, t = xgcd(y0, x0)
    if g != ONE:
        raise NotCoprimeError(f"bezout requires coprime x0, y0; gcd({x0}, {y0}) = {g}")
    X, Y = s * d, -t * d
    if y0:
        k = nearest_lattice(GaussianRational(Y, y0))
    else:
        k = nearest_lattice(GaussianRational(X, x0))
    X, Y = X - k * x0, Y - k * y0
    assert y0 * X - x0 * Y == d
    return X, Y


def parity(g: GaussianInt) -> int:
    """Residue class of g modulo 1+i: 0 when (1+i) | g, else 1."""
    return (g.re + g.im) % 2


def is_even(g: GaussianInt) -> bool:
    """Whether 1+i divides g, i.e. re + im is even."""
    return parity(g) == 0


def square_root(g: GaussianInt) -> GaussianInt | None:
    """
    Exact square root of g in Z[i], or None when g is not a square.
    The root returned has a nonnegative real part.
    """
    if not g:
        return ZERO
    n = g.norm()
    r = math.isqrt(n)
    if r * r != n:
        return None
    # (u + v*i)^2 == g gives u^2 - v^2 == re and u^2 + v^2 == |g| == r
    if (r + g.re) % 2:
        return None
    u2, v2 = (r + g.re) // 2, (r - g.re) // 2
    u, v = math.isqrt(u2), math.isqrt(v2)
    if u * u != u2 or v * v != v2 or 2 * u * v != abs(g.im):
        return None
    root = GaussianInt(u, v if g.im >= 0 else -v)
    assert root * root == g
    return root


def is_square(g: GaussianInt) -> bool:
    return square_root(g) is not None


def iter_box(radius: int) -> Iterator[GaussianInt]:
    """Gaussian integers with |re| <= radius and |im| <= radius."""
    for re_ in range(-radius, radius + 1):
        for im_ in range(-radius, radius + 1):
            yield GaussianInt(re_, im_)


def iter_norm_ball(bound: int) -> Iterator[GaussianInt]:
    """Gaussian integers of norm at most `bound`, in (norm, re, im) order."""
    radius = math.isqrt(bound)
    points = [g for g in iter_box(radius) if g.norm() <= bound]
    yield from sorted(points, key=lambda g: (g.norm(), g.re, g.im))


def _qq_i_norm(value: QQ_I_Element) -> MPQ:
    return value.x**2 + value.y**2


@dataclasses.dataclass(frozen=True)
class GaussianRational:
    """
    Quotient num/den of Gaussian integers, backed by a sympy `QQ_I` element (`value`).
    num and den are the reduced canonical view:
    gcd(num, den) is a unit and den is a canonical associate.
    Zero is stored as 0/1.
    """

    num: GaussianInt
    den: GaussianInt = ONE
    value: QQ_I_Element = dataclasses.field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        num = GaussianInt.coerce(self.num)
        den = GaussianInt.coerce(self.den)
        if not den:
            raise ZeroDivisionError(f"GaussianRational({num}, 0)")
        value = num.zz_i / den.zz_i
        # QQ_I.denom is a rational integer and can share Gaussian factors with the numerator
        numer, denom = QQ_I.numer(value), QQ_I.denom(value)
        common = ZZ_I.gcd(numer, denom)
        denom, numer = ZZ_I.normalize(ZZ_I.exquo(denom, common), ZZ_I.exquo(numer, common))
        object.__setattr__(self, "num", GaussianInt.from_zz_i(numer))
        object.__setattr__(self, "den", GaussianInt.from_zz_i(denom))
        object.__setattr__(self, "value", value)

    @classmethod
    def from_qq_i(cls, value: QQ_I_Element) -> GaussianRational:
        num, den = QQ_I.numer(value), QQ_I.denom(value)
        return cls(GaussianInt.from_zz_i(num), GaussianInt.from_zz_i(den))

    @classmethod
    def coerce(cls, value: GaussianRational | GaussianLike) -> GaussianRational:
        if isinstance(value, GaussianRational):
            return value
        return cls(GaussianInt.coerce(value))

    @classmethod
    def parse(cls, text: str) -> GaussianRational:
        """Parse the emission format of `str`: "(num)/(den)" or a Gaussian integer."""
        text = text.strip()
        if "/" not in text:
            return cls(GaussianInt.parse(text))
        num, _, den = text.partition("/")
        return cls(GaussianInt.parse(num.strip("()")), GaussianInt.parse(den.strip("()")))

    def __str__(self) -> str:
        if self.den == ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __reduce__(self) -> tuple[type[GaussianRational], tuple[GaussianInt, GaussianInt]]:
        return GaussianRational, (self.num, self.den)

    def __bool__(self) -> bool:
        return bool(self.num)

    def __neg__(self) -> GaussianRational:
        return GaussianRational.from_qq_i(-self.value)

    def __add__(self, other: GaussianRational | GaussianLike) -> GaussianRational:
        if not isinstance(other, (GaussianRational, GaussianInt, int)):
            return NotImplemented
        return GaussianRational.from_qq_i(self.value + GaussianRational.coerce(other).value)

    __radd__ = __add__

    def __sub__(self, other: GaussianRational | GaussianLike) -> GaussianRational:
        if not isinstance(other, (GaussianRational, GaussianInt, int)):
            return NotImplemented
        return GaussianRational.from_qq_i(self.value - GaussianRational.coerce(other).value)

    def __rsub__(self, other: GaussianRational | GaussianLike) -> GaussianRational:
        if not isinstance(other, (GaussianRational, GaussianInt, int)):
            return NotImplemented
        return GaussianRational.coerce(other) - self

    def __mul__(self, other: GaussianRational | GaussianLike) -> GaussianRational:
        if not isinstance(other, (GaussianRational, GaussianInt, int)):
            return NotImplemented
        return GaussianRational.from_qq_i(self.value * GaussianRational.coerce(other).value)

    __rmul__ = __mul__

    def __truediv__(self, other: GaussianRational | GaussianLike) -> GaussianRational:
        if not isinstance(other, (GaussianRational, GaussianInt, int)):
            return NotImplemented
        other = GaussianRational.coerce(other)
        if not other:
            raise ZeroDivisionError(f"({self}) / 0")
        return GaussianRational.from_qq_i(self.value / other.value)

    def __rtruediv__(self, other: GaussianRational | GaussianLike) -> GaussianRational:
        if not isinstance(other, (GaussianRational, GaussianInt, int)):
            return NotImplemented
        return GaussianRational.coerce(other) / self

    def __pow__(self, exponent: int) -> GaussianRational:
        if exponent < 0 and not self:
            raise ZeroDivisionError(f"({self}) ** {exponent}")
        return GaussianRational.from_qq_i(self.value**exponent)

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.num.conjugate(), self.den.conjugate())

    def norm(self) -> MPQ:
        """Squared modulus as an exact `QQ` element."""
        return _qq_i_norm(self.value)

    @property
    def is_integral(self) -> bool:
        return self.den == ONE


def distance_squared(q: GaussianRational, z: GaussianInt) -> MPQ:
    """|q - z|² as an exact `QQ` element."""
    return _qq_i_norm(q.value - QQ_I.convert(z.zz_i))


def nearest_lattice(q: GaussianRational) -> GaussianInt:
    """
    Nearest Gaussian integer to q, rounding each coordinate half toward +infinity.
    This is the quotient of the Euclidean division num // den.
    The result Z satisfies |q - Z|² <= 1/2 and no lattice point is strictly closer.
    """
    return GaussianInt.from_zz_i(q.num.zz_i // q.den.zz_i)


def nearest_in_class(q: GaussianRational, r: GaussianLike) -> GaussianInt:
    """
    Nearest Gaussian integer to q that is congruent to r modulo 1+i.
    The points of one class form a square lattice of edge √2,
    so the result satisfies |q - Z|² <= 1.
    Among equidistant candidates the larger real part, then the larger imaginary part, wins.
    """
    target = parity(GaussianInt.coerce(r))
    center = nearest_lattice(q)
    # every point within distance 1 of q is within one step of its nearest lattice point
    candidates = [
        center + GaussianInt(dx, dy)
        for dx in (-1, 0, 1)
        for dy in (-1, 0, 1)
        if parity(center + GaussianInt(dx, dy)) == target
    ]
    return min(candidates, key=lambda z: (distance_squared(q, z), -z.re, -z.im))
