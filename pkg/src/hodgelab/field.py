"""Exact scalars: rationals and quadratic field elements a + b*sqrt(d).

A scalar is a pair of rationals (a, b) read against a :class:`FieldSpec`
holding a squarefree integer d.  d = 0 is the marker for the rational
field itself (then b must vanish); otherwise the element lives in
Q(sqrt(d)) and conjugation sends sqrt(d) to -sqrt(d).  Everything is
``fractions.Fraction`` underneath, every comparison is exact, and no
operation ever produces a float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class FieldError(ValueError):
    """Invalid field data, or arithmetic across incompatible fields."""


_ZERO = Fraction(0)
_ONE = Fraction(1)


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel of n, i.e. n / (largest square divisor)."""
    if n == 0:
        raise FieldError("0 has no squarefree part")
    sign = -1 if n < 0 else 1
    n = abs(n)
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e % 2:
                result *= p
        p += 1 if p == 2 else 2
    return sign * result * n


@dataclass(frozen=True)
class FieldSpec:
    """The base field: Q when d = 0, otherwise Q(sqrt(d)) for squarefree d != 1."""

    d: int = 0

    def __post_init__(self) -> None:
        if self.d == 1:
            raise FieldError("d = 1 does not define a quadratic field")
        if self.d != 0 and squarefree_part(self.d) != self.d:
            raise FieldError(f"d = {self.d} is not squarefree")

    @property
    def is_rational(self) -> bool:
        return self.d == 0

    @property
    def is_imaginary(self) -> bool:
        return self.d < 0

    def zero(self) -> QuadFieldElement:
        return QuadFieldElement(_ZERO, _ZERO, self.d)

    def one(self) -> QuadFieldElement:
        return QuadFieldElement(_ONE, _ZERO, self.d)

    def sqrt_gen(self) -> QuadFieldElement:
        """The generator sqrt(d); undefined over Q."""
        if self.d == 0:
            raise FieldError("Q has no quadratic generator")
        return QuadFieldElement(_ZERO, _ONE, self.d)

    def element(self, a, b=0) -> QuadFieldElement:
        if b and self.d == 0:
            raise FieldError("rational field has no sqrt coordinate")
        return QuadFieldElement(Fraction(a), Fraction(b), self.d)


RATIONALS = FieldSpec(0)


def _coerce_pair(x: QuadFieldElement, y) -> tuple:
    """Return (a2, b2, d) for the other operand, or None if not coercible."""
    if isinstance(y, QuadFieldElement):
        if y.d == x.d:
            return y.a, y.b, x.d
        if not y.b:
            return y.a, _ZERO, x.d
        if not x.b:
            return y.a, y.b, y.d
        raise FieldError(f"mixed quadratic fields d={x.d} and d={y.d}")
    if isinstance(y, (int, Fraction)):
        return Fraction(y), _ZERO, x.d
    return None


class QuadFieldElement:
    """a + b*sqrt(d) with exact rational a, b.

    Rational-valued elements (b = 0) compare equal and combine across
    field specs; genuinely irrational operands must share d.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d: int = 0):
        object.__setattr__(self, "a", a if isinstance(a, Fraction) else Fraction(a))
        object.__setattr__(self, "b", b if isinstance(b, Fraction) else Fraction(b))
        object.__setattr__(self, "d", d)
        if self.b and d == 0:
            raise FieldError("nonzero sqrt coordinate over Q")

    def __setattr__(self, name, value):
        raise AttributeError("QuadFieldElement is immutable")

    @property
    def spec(self) -> FieldSpec:
        return FieldSpec(self.d if self.b or self.d else 0)

    @property
    def is_rational(self) -> bool:
        return not self.b

    def rational_value(self) -> Fraction:
        if self.b:
            raise FieldError(f"{self} is not rational")
        return self.a

    def conj(self) -> QuadFieldElement:
        return QuadFieldElement(self.a, -self.b, self.d)

    def trace(self) -> Fraction:
        return 2 * self.a

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadFieldElement):
            if self.b or other.b:
                return self.d == other.d and self.a == other.a and self.b == other.b
            return self.a == other.a
        if isinstance(other, (int, Fraction)):
            return not self.b and self.a == other
        return NotImplemented

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __neg__(self) -> QuadFieldElement:
        return QuadFieldElement(-self.a, -self.b, self.d)

    def __add__(self, other):
        co = _coerce_pair(self, other)
        if co is None:
            return NotImplemented
        a2, b2, d = co
        return QuadFieldElement(self.a + a2, self.b + b2, d)

    __radd__ = __add__

    def __sub__(self, other):
        co = _coerce_pair(self, other)
        if co is None:
            return NotImplemented
        a2, b2, d = co
        return QuadFieldElement(self.a - a2, self.b - b2, d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        co = _coerce_pair(self, other)
        if co is None:
            return NotImplemented
        a2, b2, d = co
        if self.b or b2:
            return QuadFieldElement(
                self.a * a2 + d * self.b * b2, self.a * b2 + self.b * a2, d
            )
        return QuadFieldElement(self.a * a2, _ZERO, d)

    __rmul__ = __mul__

    def inverse(self) -> QuadFieldElement:
        n = self.norm()
        if not n:
            raise ZeroDivisionError("zero or degenerate element")
        return QuadFieldElement(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        co = _coerce_pair(self, other)
        if co is None:
            return NotImplemented
        a2, b2, d = co
        return self * QuadFieldElement(a2, b2, d).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int) -> QuadFieldElement:
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadFieldElement(_ONE, _ZERO, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __repr__(self) -> str:
        if not self.b:
            return f"QuadFieldElement({self.a})"
        return f"QuadFieldElement({self.a}, {self.b}, d={self.d})"

    def __str__(self) -> str:
        if not self.b:
            return str(self.a)
        return f"{self.a}+{self.b}*sqrt({self.d})"


def as_element(value, spec: FieldSpec) -> QuadFieldElement:
    """Coerce int / Fraction / 'p/q' string / element into spec."""
    if isinstance(value, QuadFieldElement):
        if value.b and value.d != spec.d:
            raise FieldError(f"element of d={value.d} not in d={spec.d}")
        return QuadFieldElement(value.a, value.b, spec.d)
    if isinstance(value, str):
        return QuadFieldElement(Fraction(value), _ZERO, spec.d)
    if isinstance(value, (int, Fraction)):
        return QuadFieldElement(Fraction(value), _ZERO, spec.d)
    raise FieldError(f"cannot coerce {value!r} into a field element")


def field_mul(x: QuadFieldElement, y: QuadFieldElement, spec: FieldSpec) -> QuadFieldElement:
    """Product in spec; operands must be rational or share spec's d."""
    for v in (x, y):
        if v.b and v.d != spec.d:
            raise FieldError(f"operand of d={v.d} does not live in d={spec.d}")
    return as_element(x, spec) * as_element(y, spec)


def field_trace_norm(x: QuadFieldElement, spec: FieldSpec) -> tuple:
    """(trace, norm) over Q.  For spec = Q both degenerate to the value itself."""
    if x.b and x.d != spec.d:
        raise FieldError(f"operand of d={x.d} does not live in d={spec.d}")
    if spec.d == 0:
        v = x.rational_value()
        return v, v
    y = as_element(x, spec)
    return y.trace(), y.norm()


def coeff_to_json(x: QuadFieldElement):
    """'p/q' for rational values, ['p/q','r/s'] for quadratic ones."""
    if not x.b:
        return str(x.a)
    return [str(x.a), str(x.b)]


def coeff_from_json(value, spec: FieldSpec) -> QuadFieldElement:
    if isinstance(value, str):
        return spec.element(Fraction(value))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return spec.element(Fraction(value[0]), Fraction(value[1]))
    raise FieldError(f"bad coefficient payload {value!r}")
