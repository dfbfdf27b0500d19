"""
Kets of H_d, the d+1 mutually unbiased bases for odd prime d, and the cyclic
convolution monoid (bullet) with its ket-level conjugate transpose.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from utils.cycloutils import (
    CycloScalar, validate_order, omega_pow, inv_sqrt_d, zero, one, rational, dot,
)
from utils.errorutils import DimensionMismatch, check_index

logger = logging.getLogger(__name__)


class BasisLabel(Enum):
    COMPUTATIONAL = "computational"
    STANDARD = "standard"

    def __repr__(self) -> str:
        return self.value

    def __str__(self) -> str:
        return self.value


class Unitarity(Enum):
    UNITARY = "unitary"

    def __str__(self) -> str:
        return self.value


UNITARY = Unitarity.UNITARY


def label_to_json(label):
    return str(label) if isinstance(label, BasisLabel) else label


def label_from_json(value):
    return BasisLabel(value) if isinstance(value, str) else int(value)


def label_sort_key(label):
    return (0, 0) if isinstance(label, BasisLabel) else (1, label)


@dataclass(frozen=True)
class Ket:
    d: int
    amps: tuple[CycloScalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "amps", tuple(self.amps))
        if len(self.amps) != self.d:
            raise DimensionMismatch(f"ket of dimension {self.d} needs {self.d} amplitudes, got {len(self.amps)}")
        if any(a.d != self.d for a in self.amps):
            raise DimensionMismatch("amplitudes of mixed order")

    def __add__(self, other: Ket) -> Ket:
        _same_dimension(self, other)
        return Ket(self.d, tuple(x + y for x, y in zip(self.amps, other.amps)))

    def __sub__(self, other: Ket) -> Ket:
        _same_dimension(self, other)
        return Ket(self.d, tuple(x - y for x, y in zip(self.amps, other.amps)))

    def scale(self, c) -> Ket:
        return Ket(self.d, tuple(a * c for a in self.amps))

    def norm_squared(self) -> CycloScalar:
        return dot(self.amps, self.amps, conjugate=True)

    def is_normalized(self) -> bool:
        return self.norm_squared() == 1

    def __getitem__(self, i):
        return self.amps[i]

    def __str__(self):
        terms = [f"{a}|{i}>" for i, a in enumerate(self.amps) if a]
        return " + ".join(terms) if terms else "0"

    def to_dict(self):
        return {"d": self.d, "amps": [a.to_dict() for a in self.amps]}

    @staticmethod
    def from_dict(data: dict):
        return Ket(data["d"], tuple(CycloScalar.from_dict(a) for a in data["amps"]))


@dataclass(frozen=True)
class MubBasis:
    d: int
    label: BasisLabel | int
    states: tuple[Ket, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if len(self.states) != self.d:
            raise DimensionMismatch(f"basis needs {self.d} states, got {len(self.states)}")

    def __iter__(self):
        return iter(self.states)

    def __len__(self):
        return len(self.states)

    def to_dict(self):
        return {
            "d": self.d,
            "label": label_to_json(self.label),
            "states": [k.to_dict() for k in self.states],
        }

    @staticmethod
    def from_dict(data: dict):
        return MubBasis(data["d"], label_from_json(data["label"]),
                        tuple(Ket.from_dict(k) for k in data["states"]))


def _same_dimension(a, b):
    if a.d != b.d:
        raise DimensionMismatch(f"kets of dimension {a.d} and {b.d}")


def basis_ket(d, i) -> Ket:
    """|i> in the computational basis; `i` is read mod d."""
    return Ket(d, tuple(one(d) if k == i % d else zero(d) for k in range(d)))


def ket_from_ints(d, coeffs) -> Ket:
    return Ket(d, tuple(rational(d, c) for c in coeffs))


@lru_cache(maxsize=None)
def alpha(d: int, a: int) -> int:
    """a + (a+1) + ... + (d-1)."""
    return sum(range(a, d))


def mub_exponent(d, r, s, a) -> int:
    """Exponent e with w^e = (w^s)^(d-a) (w^-r)^alpha(a)."""
    return (s * (d - a) - r * alpha(d, a)) % d


def computational_basis(d) -> MubBasis:
    validate_order(d)
    return MubBasis(d, BasisLabel.COMPUTATIONAL, tuple(basis_ket(d, i) for i in range(d)))


def mub_state(d, r, s) -> Ket:
    """(1/sqrt d) sum_a w^{s(d-a)} w^{-r alpha(a)} |a>."""
    validate_order(d)
    check_index("r", r, 0, d - 1)
    check_index("s", s, 0, d - 1)
    norm = inv_sqrt_d(d)
    return Ket(d, tuple(omega_pow(d, mub_exponent(d, r, s, a)) * norm for a in range(d)))


def mub_basis(d, r, state_fn=mub_state) -> MubBasis:
    validate_order(d)
    check_index("r", r, 0, d - 1)
    return MubBasis(d, r, tuple(state_fn(d, r, s) for s in range(d)))


def all_mubs(d, state_fn=mub_state) -> list[MubBasis]:
    """Computational basis followed by the bases r = 0..d-1."""
    return [computational_basis(d)] + [mub_basis(d, r, state_fn) for r in range(d)]


def inner(a: Ket, b: Ket) -> CycloScalar:
    """<a|b>."""
    _same_dimension(a, b)
    return dot(a.amps, b.amps, conjugate=True)


def bullet(a: Ket, b: Ket) -> Ket:
    """Cyclic convolution: the |m> amplitude is the sum of a_i b_j over i + j = m (mod d)."""
    _same_dimension(a, b)
    d = a.d
    nz_b = [(j, y) for j, y in enumerate(b.amps) if y]
    terms = [[] for _ in range(d)]
    for i, x in enumerate(a.amps):
        if not x:
            continue
        for j, y in nz_b:
            terms[(i + j) % d].append((x, y))
    amps = []
    for bucket in terms:
        if bucket:
            amps.append(dot([x for x, _ in bucket], [y for _, y in bucket]))
        else:
            amps.append(zero(d))
    return Ket(d, tuple(amps))


def dagger(a: Ket) -> Ket:
    """sum_i a_i |i>  ->  sum_i conj(a_i) |(d - i) mod d>."""
    d = a.d
    return Ket(d, tuple(a.amps[(-m) % d].conj() for m in range(d)))


def monoid_unitarity_witness(a: Ket):
    """Returns UNITARY when a . dagger(a) = |0>, otherwise that product as witness."""
    product = bullet(a, dagger(a))
    if product == basis_ket(a.d, 0):
        return UNITARY
    logger.debug("monoid witness for %s: %s", a, product)
    return product


def unitarity_coefficient(d, r, s, m) -> CycloScalar:
    """Closed form of the |m> coefficient of bullet(psi, dagger(psi)) for psi = mub_state(d, r, s):

        w^(-r(m^2+m)/2 - ms) / d * sum_a w^(a r m)
    """
    validate_order(d)
    phase = omega_pow(d, -(r * (m * m + m) // 2) - m * s)
    total = zero(d)
    for a in range(d):
        total = total + omega_pow(d, a * r * m)
    return phase * total * Fraction(1, d)


def scaling_permutation(d, p) -> list[int]:
    return [(a * p) % d for a in range(d)]


def is_bijective_scaling(d, p) -> bool:
    """a -> a*p mod d is a bijection of {0..d-1}; true for prime d whenever p is not 0 mod d."""
    return sorted(scaling_permutation(d, p)) == list(range(d))


def is_orthonormal(basis: MubBasis) -> bool:
    states = basis.states
    for i, u in enumerate(states):
        for j in range(i, len(states)):
            expected = 1 if i == j else 0
            if inner(u, states[j]) != expected:
                return False
    return True


def overlap_table(a: MubBasis, b: MubBasis) -> list[list[CycloScalar]]:
    """|<a_i|b_j>|^2 for every pair of members."""
    _same_dimension(a, b)
    return [[inner(u, v).abs_squared() for v in b.states] for u in a.states]


def verify_mub(a: MubBasis, b: MubBasis) -> bool:
    """Every cross overlap squared equals 1/d exactly."""
    target = Fraction(1, a.d)
    ok = all(cell == target for row in overlap_table(a, b) for cell in row)
    logger.debug("MUB check %s vs %s: %s", a.label, b.label, ok)
    return ok
