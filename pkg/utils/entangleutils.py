"""
Generalised Pauli operators, the Choi map from unitaries to maximally entangled
states (MES), generalised Bell states, MES families built from a single Pauli
word, and exact partial traces.

Bipartite amplitudes are indexed m * d + n for |m>|n>. Unlike the rest of the
package, d = 2 is admitted here wherever the construction does not index MUBs.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from utils.cycloutils import CycloScalar, validate_order, omega_pow, inv_sqrt_d, zero, dot
from utils.errorutils import (
    DimensionMismatch, DegenerateFamily, IndexOutOfRange, NotUnitary, check_index,
)
from utils.hilbertutils import Ket, mub_exponent
from utils.matspaceutils import DenseOp, identity, is_unitary_dense

logger = logging.getLogger(__name__)

INDEX_CONVENTION = "m*d+n"


@dataclass(frozen=True)
class BipartiteKet:
    d: int
    amps: tuple[CycloScalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "amps", tuple(self.amps))
        if len(self.amps) != self.d * self.d:
            raise DimensionMismatch(f"bipartite ket for d={self.d} needs {self.d ** 2} amplitudes")
        if any(x.d != self.d for x in self.amps):
            raise DimensionMismatch("amplitudes of mixed order")

    def __getitem__(self, index):
        if isinstance(index, tuple):
            m, n = index
            return self.amps[m * self.d + n]
        return self.amps[index]

    def __add__(self, other: BipartiteKet) -> BipartiteKet:
        if other.d != self.d:
            raise DimensionMismatch(f"bipartite kets of order {self.d} and {other.d}")
        return BipartiteKet(self.d, tuple(x + y for x, y in zip(self.amps, other.amps)))

    def scale(self, c) -> BipartiteKet:
        return BipartiteKet(self.d, tuple(x * c for x in self.amps))

    def inner(self, other: BipartiteKet) -> CycloScalar:
        """<self|other>."""
        if other.d != self.d:
            raise DimensionMismatch(f"bipartite kets of order {self.d} and {other.d}")
        return dot(self.amps, other.amps, conjugate=True)

    def norm_squared(self) -> CycloScalar:
        return self.inner(self)

    def __str__(self):
        d = self.d
        terms = [f"{x}|{i // d}{i % d}>" for i, x in enumerate(self.amps) if x]
        return " + ".join(terms) if terms else "0"

    def to_dict(self):
        return {"d": self.d, "index": INDEX_CONVENTION, "amps": [x.to_dict() for x in self.amps]}

    @staticmethod
    def from_dict(data: dict):
        return BipartiteKet(data["d"], tuple(CycloScalar.from_dict(x) for x in data["amps"]))


@dataclass(frozen=True, eq=False)
class DensityMatrix(DenseOp):
    """Exact density matrix; `d` is the scalar order, `d_total` the matrix size."""

    @property
    def d_total(self) -> int:
        return self.size

    def is_hermitian(self) -> bool:
        return self == self.dagger()

    def to_dict(self, float_mode=False):
        data = super().to_dict(float_mode)
        data["d_total"] = self.d_total
        return data


@dataclass(frozen=True)
class PauliWord:
    """(X^b Z^a)^n multiplied out, next to its closed form phase * X^(bn) Z^(an)."""
    d: int
    b: int
    a: int
    n: int
    op: DenseOp
    phase: CycloScalar
    word: DenseOp

    @property
    def x_power(self) -> int:
        return (self.b * self.n) % self.d

    @property
    def z_power(self) -> int:
        return (self.a * self.n) % self.d

    def holds(self) -> bool:
        return self.op == self.word.scale(self.phase)

    def to_dict(self, float_mode=False):
        return {
            "d": self.d, "b": self.b, "a": self.a, "n": self.n,
            "phase": self.phase.to_dict(),
            "word": {"x_power": self.x_power, "z_power": self.z_power},
            "op": self.op.to_dict(float_mode),
            "holds": self.holds(),
        }


class MesBasis:
    def __init__(self, d, r, a, b, states):
        self.d = d
        self.r = r
        self.a = a
        self.b = b
        self.states = tuple(states)

    def __iter__(self):
        return iter(self.states)

    def __len__(self):
        return len(self.states)

    def to_dict(self):
        return {"d": self.d, "r": self.r, "a": self.a, "b": self.b,
                "states": [k.to_dict() for k in self.states]}


def _shift_clock(d, x, z) -> DenseOp:
    """X^x Z^z: entry (row, col) is w^(z col) when row = col + x (mod d)."""
    rows = []
    for row in range(d):
        rows.append(tuple(
            omega_pow(d, z * col, allow_two=True) if row == (col + x) % d else zero(d)
            for col in range(d)))
    return DenseOp(d, tuple(rows))


def pauli_x(d) -> DenseOp:
    """X|k> = |k+1 mod d>."""
    validate_order(d, allow_two=True)
    return _shift_clock(d, 1, 0)


def pauli_z(d) -> DenseOp:
    """Z|k> = w^k |k>."""
    validate_order(d, allow_two=True)
    return _shift_clock(d, 0, 1)


def pauli_word(d, b, a, n) -> PauliWord:
    validate_order(d, allow_two=True)
    check_index("b", b, 0, d - 1)
    check_index("a", a, 0, d - 1)
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise IndexOutOfRange("n", n, 0, "inf")
    base = pauli_x(d).power(b) @ pauli_z(d).power(a)
    op = base.power(n)
    # n^2 - n is even, so the exponent is an integer
    phase = omega_pow(d, a * b * (n * n - n) // 2, allow_two=True)
    return PauliWord(d, b, a, n, op, phase, _shift_clock(d, b * n, a * n))


def _choi_amps(u: DenseOp) -> BipartiteKet:
    d = u.d
    norm = inv_sqrt_d(d, allow_two=True)
    return BipartiteKet(d, tuple(u[n, m] * norm for m in range(d) for n in range(d)))


def choi(u: DenseOp) -> BipartiteKet:
    """(1/sqrt d) sum_{m,n} <n|U|m> |m>|n> for a unitary d x d matrix U."""
    if u.size != u.d:
        raise DimensionMismatch(f"choi expects a {u.d}x{u.d} operator, got {u.size}x{u.size}")
    if not is_unitary_dense(u):
        raise NotUnitary("choi is defined here for unitary operators only")
    return _choi_amps(u)


def bell_state(d, a, b) -> BipartiteKet:
    """(1/sqrt d) sum_n w^(an) |n>|n+b>; equal to choi(X^b Z^a) entry by entry."""
    validate_order(d, allow_two=True)
    check_index("a", a, 0, d - 1)
    check_index("b", b, 0, d - 1)
    norm = inv_sqrt_d(d, allow_two=True)
    amps = [zero(d)] * (d * d)
    for n in range(d):
        amps[n * d + (n + b) % d] = omega_pow(d, a * n, allow_two=True) * norm
    return BipartiteKet(d, tuple(amps))


def bell_basis(d) -> list[BipartiteKet]:
    """All d^2 Bell states, ordered by (a, b)."""
    validate_order(d, allow_two=True)
    return [bell_state(d, a, b) for a in range(d) for b in range(d)]


def word_family(d, a, b) -> list[DenseOp]:
    """The d powers W^0 .. W^(d-1) of W = X^b Z^a."""
    validate_order(d, allow_two=True)
    check_index("a", a, 0, d - 1)
    check_index("b", b, 0, d - 1)
    if a == 0 and b == 0:
        raise DegenerateFamily("(a, b) = (0, 0) only generates the identity")
    w = _shift_clock(d, b, a)
    powers = [identity(d)]
    for _ in range(1, d):
        powers.append(powers[-1] @ w)
    return powers


def mes_mub_state(d, r, s, a, b) -> BipartiteKet:
    """sum_i (w^(s(d-i) - r alpha(i)) / sqrt d) choi(W^i), W = X^b Z^a."""
    validate_order(d)
    check_index("r", r, 1, d - 1)
    check_index("s", s, 0, d - 1)
    family = word_family(d, a, b)
    norm = inv_sqrt_d(d)
    state = None
    for i, w in enumerate(family):
        term = _choi_amps(w).scale(omega_pow(d, mub_exponent(d, r, s, i)) * norm)
        state = term if state is None else state + term
    return state


def mes_mub_basis(d, r, a, b, state_fn=mes_mub_state) -> MesBasis:
    return MesBasis(d, r, a, b, tuple(state_fn(d, r, s, a, b) for s in range(d)))


def subspace_coordinates(psi: BipartiteKet, a, b) -> Ket:
    """Coordinates <choi(W^i)|psi> of `psi` in the orthonormal Choi basis of the word family."""
    d = psi.d
    return Ket(d, tuple(_choi_amps(w).inner(psi) for w in word_family(d, a, b)))


def projector(ket) -> DensityMatrix:
    """|k><k| for a Ket or a BipartiteKet."""
    amps = ket.amps
    conj = [x.conj() for x in amps]
    return DensityMatrix(ket.d, tuple(tuple(x * y for y in conj) for x in amps))


def _check_side(side):
    check_index("side", side, 1, 2)


def partial_trace(rho: DenseOp, side) -> DensityMatrix:
    """Traces out the first (side=1) or second (side=2) factor of a d^2 x d^2 matrix."""
    _check_side(side)
    d = rho.d
    if rho.size != d * d:
        raise DimensionMismatch(f"expected a {d * d}x{d * d} matrix, got {rho.size}x{rho.size}")
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            if side == 1:
                cells = [rho[k * d + i, k * d + j] for k in range(d)]
            else:
                cells = [rho[i * d + k, j * d + k] for k in range(d)]
            total = zero(d)
            for x in cells:
                total = total + x
            row.append(total)
        rows.append(tuple(row))
    return DensityMatrix(d, tuple(rows))


def reduced_state(psi: BipartiteKet, side) -> DensityMatrix:
    """partial_trace(projector(psi), side) computed from the amplitudes directly."""
    _check_side(side)
    d = psi.d
    if side == 1:
        vectors = [[psi[m, n] for m in range(d)] for n in range(d)]
    else:
        vectors = [[psi[m, n] for n in range(d)] for m in range(d)]
    return DensityMatrix(d, tuple(
        tuple(dot(vectors[j], vectors[i], conjugate=True) for j in range(d)) for i in range(d)))


def is_mes(psi: BipartiteKet) -> bool:
    maximally_mixed = identity(psi.d).scale(Fraction(1, psi.d))
    return all(reduced_state(psi, side) == maximally_mixed for side in (1, 2))


def traceless_orthogonality(rho_a: DenseOp, rho_b: DenseOp) -> CycloScalar:
    """Tr[(rho_a - I/n)(rho_b - I/n)] for n x n density matrices."""
    if rho_a.d != rho_b.d or rho_a.size != rho_b.size:
        raise DimensionMismatch("density matrices of different shape or order")
    n = rho_a.size
    shift = identity(rho_a.d, n).scale(Fraction(1, n))
    value = ((rho_a - shift) @ (rho_b - shift)).trace()
    logger.debug("traceless overlap: %s", value)
    return value
