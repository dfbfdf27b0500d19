"""
Exact arithmetic in the cyclotomic field Q(w), w = exp(2 pi i / d), extended by
powers of 1/sqrt(d).

A value is stored as (sum_k nums[k] w^k) / den / d^(root_d_pow / 2) with integer
numerators and one positive common denominator. Reduction uses the single relation
1 + w + ... + w^(d-1) = 0, which pins nums[d-1] = 0. Every factor 1/d is folded into
the denominator, so root_d_pow is always 0 or 1.
"""
import cmath
import math
from fractions import Fraction
from functools import lru_cache

from utils.errorutils import InvalidDimension, DimensionMismatch, NotRepresentable


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % k for k in range(3, math.isqrt(n) + 1, 2))


def validate_order(d, allow_two=False) -> int:
    """Checks that `d` is an odd prime (or 2 when `allow_two`)."""
    if not isinstance(d, int) or isinstance(d, bool) or not is_prime(d):
        raise InvalidDimension(d, "a prime" if allow_two else "an odd prime")
    if d == 2 and not allow_two:
        raise InvalidDimension(d, "an odd prime")
    return d


@lru_cache(maxsize=None)
def gauss_sum_coeffs(d: int) -> tuple[int, ...]:
    """Legendre symbols (k/d), k = 0..d-1: the coefficients of the quadratic Gauss sum.

    For d = 1 (mod 4) the sum equals +sqrt(d).
    """
    half = (d - 1) // 2
    coeffs = []
    for k in range(d):
        if k == 0:
            coeffs.append(0)
        else:
            coeffs.append(1 if pow(k, half, d) == 1 else -1)
    return tuple(coeffs)


@lru_cache(maxsize=None)
def _roots_of_unity(d: int) -> tuple[complex, ...]:
    return tuple(cmath.exp(2j * math.pi * k / d) for k in range(d))


def _convolve_into(acc, xs, ys, d, conjugate=False):
    """acc += xs * ys in Z[w]; with `conjugate`, xs is conjugated first (w^i -> w^-i)."""
    nz = [(j, y) for j, y in enumerate(ys) if y]
    if not nz:
        return acc
    for i, x in enumerate(xs):
        if not x:
            continue
        shift = -i if conjugate else i
        for j, y in nz:
            acc[(j + shift) % d] += x * y
    return acc


class CycloScalar:
    """Immutable exact scalar; see the module docstring for the representation."""

    __slots__ = ("d", "nums", "den", "root_d_pow")

    def __init__(self, d: int, nums, den: int = 1, root_d_pow: int = 0):
        nums = [int(n) for n in nums]
        if len(nums) != d:
            raise DimensionMismatch(f"expected {d} coefficients, got {len(nums)}")
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if root_d_pow < 0:
            raise ValueError("root_d_pow must be non-negative")
        self._set(*_canonical(d, nums, int(den), int(root_d_pow)))

    def _set(self, d, nums, den, root_d_pow):
        self.d = d
        self.nums = nums
        self.den = den
        self.root_d_pow = root_d_pow

    @classmethod
    def _raw(cls, d, nums, den, root_d_pow):
        obj = cls.__new__(cls)
        obj._set(*_canonical(d, nums, den, root_d_pow))
        return obj

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(n, self.den) for n in self.nums)

    def is_zero(self) -> bool:
        return not any(self.nums)

    def __bool__(self):
        return not self.is_zero()

    def _folded(self):
        """Even-parity representation of the same value, or None when none exists."""
        if self.root_d_pow == 0:
            return self
        if self.d % 4 != 1:
            return None
        # x / sqrt(d) = x * g / d with g the Gauss sum
        acc = _convolve_into([0] * self.d, self.nums, gauss_sum_coeffs(self.d), self.d)
        return CycloScalar._raw(self.d, acc, self.den * self.d, 0)

    def is_rational(self) -> bool:
        folded = self._folded()
        if folded is None:
            return False
        return not any(folded.nums[1:])

    def as_rational(self) -> Fraction:
        folded = self._folded()
        if folded is None or any(folded.nums[1:]):
            raise NotRepresentable(f"{self} is not rational")
        return Fraction(folded.nums[0], folded.den)

    def to_complex(self) -> complex:
        roots = _roots_of_unity(self.d)
        total = sum((n * roots[k] for k, n in enumerate(self.nums) if n), 0j)
        return total / self.den / math.sqrt(self.d) ** self.root_d_pow

    def _coerce(self, other):
        if isinstance(other, CycloScalar):
            if other.d != self.d:
                raise DimensionMismatch(f"scalars of order {self.d} and {other.d}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return rational(self.d, other, allow_two=True)
        return None

    def _aligned(self, other):
        a, b = self, other
        if a.root_d_pow != b.root_d_pow:
            a, b = a._folded(), b._folded()
            if a is None or b is None:
                raise NotRepresentable(
                    f"sum of even and odd powers of 1/sqrt({self.d}) leaves the field")
        return a, b

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        a, b = self._aligned(other)
        if a.den == b.den:
            nums = [x + y for x, y in zip(a.nums, b.nums)]
            return CycloScalar._raw(a.d, nums, a.den, a.root_d_pow)
        nums = [x * b.den + y * a.den for x, y in zip(a.nums, b.nums)]
        return CycloScalar._raw(a.d, nums, a.den * b.den, a.root_d_pow)

    __radd__ = __add__

    def __neg__(self):
        return CycloScalar._raw(self.d, [-n for n in self.nums], self.den, self.root_d_pow)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            q = Fraction(other)
            nums = [n * q.numerator for n in self.nums]
            return CycloScalar._raw(self.d, nums, self.den * q.denominator, self.root_d_pow)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        acc = _convolve_into([0] * self.d, self.nums, other.nums, self.d)
        return CycloScalar._raw(self.d, acc, self.den * other.den,
                                self.root_d_pow + other.root_d_pow)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self * (1 / Fraction(other))
        return NotImplemented

    def conj(self):
        nums = [self.nums[(-k) % self.d] for k in range(self.d)]
        return CycloScalar._raw(self.d, nums, self.den, self.root_d_pow)

    def abs_squared(self):
        return self * self.conj()

    def scale_root_d(self, k: int = 1):
        """Divides by d^(k/2)."""
        return CycloScalar._raw(self.d, list(self.nums), self.den, self.root_d_pow + k)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = rational(self.d, other, allow_two=True)
        if not isinstance(other, CycloScalar):
            return NotImplemented
        if self.d != other.d:
            return False
        if self.root_d_pow != other.root_d_pow:
            a, b = self._folded(), other._folded()
            if a is None or b is None:
                return False
            return a.nums == b.nums and a.den == b.den
        return self.nums == other.nums and self.den == other.den

    def __hash__(self):
        folded = self._folded()
        if folded is None:
            folded = self
        return hash((folded.d, tuple(folded.nums), folded.den, folded.root_d_pow))

    def __repr__(self):
        return f"CycloScalar(d={self.d}, coeffs={[str(c) for c in self.coeffs]}, root_d_pow={self.root_d_pow})"

    def __str__(self):
        terms = []
        for k, n in enumerate(self.nums):
            if not n:
                continue
            base = "1" if k == 0 else ("w" if k == 1 else f"w^{k}")
            if k == 0:
                terms.append(str(n))
            elif n == 1:
                terms.append(base)
            elif n == -1:
                terms.append(f"-{base}")
            else:
                terms.append(f"{n}{base}")
        body = " + ".join(terms).replace("+ -", "- ") if terms else "0"
        if len(terms) > 1:
            body = f"({body})"
        denom = []
        if self.den != 1:
            denom.append(str(self.den))
        if self.root_d_pow:
            denom.append(f"sqrt({self.d})")
        return body if not denom or not terms else f"{body}/{'*'.join(denom)}"

    def to_dict(self):
        return {
            "d": self.d,
            "coeffs": [[c.numerator, c.denominator] for c in self.coeffs],
            "root_d_pow": self.root_d_pow,
        }

    @staticmethod
    def from_dict(data: dict):
        d = data["d"]
        validate_order(d, allow_two=True)
        coeffs = [Fraction(num, den) for num, den in data["coeffs"]]
        return from_coeffs(d, coeffs, data.get("root_d_pow", 0), allow_two=True)


def _canonical(d, nums, den, root_d_pow):
    if den < 0:
        nums = [-n for n in nums]
        den = -den
    if root_d_pow > 1:
        den *= d ** (root_d_pow // 2)
        root_d_pow %= 2
    last = nums[-1]
    if last:
        nums = [n - last for n in nums]
    if not any(nums):
        return d, (0,) * d, 1, 0
    g = math.gcd(den, *nums)
    if g > 1:
        nums = [n // g for n in nums]
        den //= g
    return d, tuple(nums), den, root_d_pow


def from_coeffs(d, coeffs, root_d_pow=0, allow_two=False) -> CycloScalar:
    """Builds sum_k coeffs[k] w^k / d^(root_d_pow/2) from exact rationals."""
    validate_order(d, allow_two)
    fracs = [Fraction(c) for c in coeffs]
    if len(fracs) != d:
        raise DimensionMismatch(f"expected {d} coefficients, got {len(fracs)}")
    den = math.lcm(*(f.denominator for f in fracs))
    return CycloScalar(d, [f.numerator * (den // f.denominator) for f in fracs], den, root_d_pow)


def zero(d) -> CycloScalar:
    return CycloScalar._raw(d, [0] * d, 1, 0)


def one(d) -> CycloScalar:
    return rational(d, 1, allow_two=True)


def rational(d, q, allow_two=False) -> CycloScalar:
    validate_order(d, allow_two)
    q = Fraction(q)
    nums = [0] * d
    nums[0] = q.numerator
    return CycloScalar._raw(d, nums, q.denominator, 0)


def inv_sqrt_d(d, allow_two=False) -> CycloScalar:
    """1/sqrt(d)."""
    validate_order(d, allow_two)
    nums = [0] * d
    nums[0] = 1
    return CycloScalar._raw(d, nums, 1, 1)


@lru_cache(maxsize=4096)
def omega_pow(d: int, e: int, allow_two=False) -> CycloScalar:
    """w^(e mod d), canonical."""
    validate_order(d, allow_two)
    nums = [0] * d
    nums[e % d] = 1
    return CycloScalar._raw(d, nums, 1, 0)


def _same_order(a, b):
    if a.d != b.d:
        raise DimensionMismatch(f"scalars of order {a.d} and {b.d}")


def add(a: CycloScalar, b: CycloScalar) -> CycloScalar:
    _same_order(a, b)
    return a + b


def mul(a: CycloScalar, b: CycloScalar) -> CycloScalar:
    _same_order(a, b)
    return a * b


def neg(a: CycloScalar) -> CycloScalar:
    return -a


def conj(a: CycloScalar) -> CycloScalar:
    return a.conj()


def abs_squared(a: CycloScalar) -> CycloScalar:
    return a.abs_squared()


def to_complex(a: CycloScalar) -> complex:
    return a.to_complex()


def dot(xs, ys, conjugate=False) -> CycloScalar:
    """sum_i xs[i] * ys[i] (xs conjugated when `conjugate`), canonicalised once.

    Terms are grouped by their (denominator, sqrt(d) power) so that the usual case of a
    uniform vector costs a single reduction.
    """
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        raise DimensionMismatch(f"vectors of length {len(xs)} and {len(ys)}")
    if not xs:
        raise DimensionMismatch("empty vectors")
    d = xs[0].d
    groups = {}
    for x, y in zip(xs, ys):
        if x.d != d or y.d != d:
            raise DimensionMismatch(f"scalars of order {x.d} and {y.d}")
        if not any(x.nums) or not any(y.nums):
            continue
        key = (x.den * y.den, x.root_d_pow + y.root_d_pow)
        acc = groups.get(key)
        if acc is None:
            acc = groups[key] = [0] * d
        _convolve_into(acc, x.nums, y.nums, d, conjugate)
    total = zero(d)
    for (den, root), acc in groups.items():
        total = total + CycloScalar._raw(d, acc, den, root)
    return total
