"""Finite fields GF(p^e) with precomputed lookup tables.

Elements are integers in ``[0, q)``.  The base-p digits of an element are the
coefficients of a polynomial over GF(p), least significant digit first, so in
GF(4) with modulus x^2 + x + 1 the element ``2`` is ``x`` and ``3`` is ``x + 1``.

Linear algebra elsewhere in the package works on raw integers and the tables
exposed by :class:`GF`; :class:`FieldElement` is the checked, operator-friendly
wrapper for user code.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from dataclasses import field as dc_field
from functools import lru_cache

MODULUS_TABLE_VERSION = 1

# Coefficients low degree first; the leading coefficient is always 1.
IRREDUCIBLE_MODULI: dict[int, tuple[int, ...]] = {
    4: (1, 1, 1),  # x^2 + x + 1
    8: (1, 1, 0, 1),  # x^3 + x + 1
    9: (1, 0, 1),  # x^2 + 1
    16: (1, 1, 0, 0, 1),  # x^4 + x + 1
    25: (2, 1, 1),  # x^2 + x + 2
    27: (1, 2, 0, 1),  # x^3 + 2x + 1
}

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)


class FieldError(ValueError):
    """Raised for unsupported orders, mixed fields, and division by zero."""


def supported_orders() -> list[int]:
    return sorted(set(_PRIMES) | set(IRREDUCIBLE_MODULI))


def _prime_power(q: int) -> tuple[int, int]:
    for p in _PRIMES:
        e, r = 0, q
        while r % p == 0:
            r //= p
            e += 1
        if r == 1 and e > 0:
            return p, e
    raise FieldError(f"q={q} is not a supported prime power")


def _poly_mod(num: list[int], den: tuple[int, ...], p: int) -> list[int]:
    """Remainder of num / den over GF(p); den must be monic."""
    num = list(num)
    d = len(den) - 1
    for shift in range(len(num) - 1 - d, -1, -1):
        c = num[shift + d] % p
        if c:
            for i, dc in enumerate(den):
                num[shift + i] = (num[shift + i] - c * dc) % p
    return [c % p for c in num[:d]] + [0] * max(0, d - len(num))


def is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Exhaustive trial division by every monic polynomial of degree 1..e//2."""
    e = len(modulus) - 1
    if e < 1 or modulus[-1] % p != 1:
        return False
    for d in range(1, e // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = tuple(low) + (1,)
            if not any(_poly_mod(list(modulus), divisor, p)):
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    p: int
    e: int
    modulus: tuple[int, ...] = ()

    @property
    def q(self) -> int:
        return self.p**self.e

    def to_json(self) -> dict:
        return {"p": self.p, "e": self.e, "modulus": list(self.modulus)}


class GF:
    """The field of ``q`` elements with add/mul/inverse tables.

    Instances are cached per order, so ``GF(4) is GF(4)``.
    """

    def __new__(cls, q: int) -> GF:
        return _make_field(q)

    @classmethod
    def _build(cls, q: int) -> GF:
        p, e = _prime_power(q)
        modulus = IRREDUCIBLE_MODULI.get(q, ()) if e > 1 else ()
        if e > 1 and not modulus:
            raise FieldError(f"no modulus registered for q={q}")
        if e > 1 and not is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is reducible over GF({p})")
        self = object.__new__(cls)
        self.spec = FieldSpec(p, e, modulus)
        self.p, self.e, self.q = p, e, q
        self._digits = [self._to_poly(a) for a in range(q)]
        self.add_table = [[self._from_poly([(x + y) % p for x, y in zip(self._digits[a], self._digits[b])])
                           for b in range(q)] for a in range(q)]
        self.mul_table = [[self.poly_mul(a, b) for b in range(q)] for a in range(q)]
        self.neg_table = [self._from_poly([(-x) % p for x in self._digits[a]]) for a in range(q)]
        self.sub_table = [[self.add_table[a][self.neg_table[b]] for b in range(q)] for a in range(q)]
        self.inv_table = [0] * q
        for a in range(1, q):
            row = self.mul_table[a]
            self.inv_table[a] = row.index(1)
        return self

    def _to_poly(self, a: int) -> list[int]:
        out = []
        for _ in range(self.e):
            out.append(a % self.p)
            a //= self.p
        return out

    def _from_poly(self, coeffs: list[int]) -> int:
        value = 0
        for c in reversed(coeffs):
            value = value * self.p + c
        return value

    def poly_mul(self, a: int, b: int) -> int:
        """Multiply by schoolbook polynomial product and reduction (table-free)."""
        x, y = self._to_poly(a), self._to_poly(b)
        prod = [0] * (2 * self.e - 1)
        for i, xi in enumerate(x):
            for j, yj in enumerate(y):
                prod[i + j] = (prod[i + j] + xi * yj) % self.p
        if self.e > 1:
            prod = _poly_mod(prod, self.spec.modulus, self.p)
        return self._from_poly(prod[: self.e])

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.sub_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldError("zero has no multiplicative inverse")
        return self.inv_table[a]

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self, a) for a in range(self.q)]

    def __call__(self, value: int) -> FieldElement:
        if not 0 <= value < self.q:
            raise FieldError(f"encoding {value} out of range for GF({self.q})")
        return FieldElement(self, value)

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __reduce__(self):
        return (GF, (self.q,))


@lru_cache(maxsize=None)
def _make_field(q: int) -> GF:
    return GF._build(q)


def elements(spec: FieldSpec | GF | int) -> list[FieldElement]:
    """All elements in ascending encoding order."""
    if isinstance(spec, FieldSpec):
        spec = spec.q
    return (spec if isinstance(spec, GF) else GF(spec)).elements()


@dataclass(frozen=True, eq=False)
class FieldElement:
    field: GF = dc_field(repr=False)
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise FieldError(f"encoding {self.value} out of range for {self.field}")

    def _check(self, other: FieldElement) -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.field is not self.field:
            raise FieldError(f"mixed-field operands: {self.field} and {other.field}")

    def __add__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.field, self.field.sub(self.value, other.value))

    def __neg__(self) -> FieldElement:
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.field, self.field.mul(self.value, other.value))

    def inverse(self) -> FieldElement:
        return FieldElement(self.field, self.field.inv(self.value))

    def __truediv__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return self * other.inverse()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field is other.field and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.field.q, self.value))

    def __int__(self) -> int:
        return self.value


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()
