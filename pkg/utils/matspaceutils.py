"""
The operator subspace M_s spanned by powers of the cyclic shift X, the linear
bijection G between H_d and M_s, and exact dense matrices.

X acts as X|k> = |k+1 mod d>, so <m|X^i|n> = 1 iff m = n + i (mod d). This
realisation is part of the serialized output and must not change.
"""
from __future__ import annotations

from dataclasses import dataclass

from utils.cycloutils import CycloScalar, zero, one, dot, validate_order
from utils.errorutils import DimensionMismatch
from utils.hilbertutils import Ket


@dataclass(frozen=True)
class MsElement:
    """sum_i xcoeffs[i] X^i."""
    d: int
    xcoeffs: tuple[CycloScalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "xcoeffs", tuple(self.xcoeffs))
        if len(self.xcoeffs) != self.d:
            raise DimensionMismatch(f"element of M_s for d={self.d} needs {self.d} coefficients")
        if any(c.d != self.d for c in self.xcoeffs):
            raise DimensionMismatch("coefficients of mixed order")

    def __str__(self):
        terms = []
        for i, c in enumerate(self.xcoeffs):
            if not c:
                continue
            op = "I" if i == 0 else ("X" if i == 1 else f"X^{i}")
            terms.append(f"{c}*{op}")
        return " + ".join(terms) if terms else "0"

    def to_dict(self):
        return {"d": self.d, "xcoeffs": [c.to_dict() for c in self.xcoeffs]}

    @staticmethod
    def from_dict(data: dict):
        return MsElement(data["d"], tuple(CycloScalar.from_dict(c) for c in data["xcoeffs"]))


@dataclass(frozen=True)
class DenseOp:
    """Square matrix of exact scalars of order `d`; `size` is d or d^2."""
    d: int
    entries: tuple[tuple[CycloScalar, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise DimensionMismatch("dense operators must be square and non-empty")
        if any(x.d != self.d for row in rows for x in row):
            raise DimensionMismatch("entries of mixed order")

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def d_rows(self) -> int:
        return self.size

    @property
    def d_cols(self) -> int:
        return self.size

    def __eq__(self, other):
        if not isinstance(other, DenseOp):
            return NotImplemented
        return self.d == other.d and self.entries == other.entries

    def __getitem__(self, index):
        m, n = index
        return self.entries[m][n]

    def column(self, n):
        return [row[n] for row in self.entries]

    def _check(self, other):
        if not isinstance(other, DenseOp) or other.d != self.d or other.size != self.size:
            raise DimensionMismatch("operators of different shape or order")

    def __matmul__(self, other: DenseOp) -> DenseOp:
        self._check(other)
        cols = [other.column(n) for n in range(other.size)]
        return DenseOp(self.d, tuple(tuple(dot(row, col) for col in cols) for row in self.entries))

    def __add__(self, other: DenseOp) -> DenseOp:
        self._check(other)
        return DenseOp(self.d, tuple(
            tuple(x + y for x, y in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)))

    def __sub__(self, other: DenseOp) -> DenseOp:
        self._check(other)
        return DenseOp(self.d, tuple(
            tuple(x - y for x, y in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)))

    def scale(self, c) -> DenseOp:
        return DenseOp(self.d, tuple(tuple(x * c for x in row) for row in self.entries))

    def dagger(self) -> DenseOp:
        n = self.size
        return DenseOp(self.d, tuple(tuple(self.entries[j][i].conj() for j in range(n)) for i in range(n)))

    def trace(self) -> CycloScalar:
        total = zero(self.d)
        for i in range(self.size):
            total = total + self.entries[i][i]
        return total

    def power(self, k: int) -> DenseOp:
        result = identity(self.d, self.size)
        base = self
        while k > 0:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def is_identity(self) -> bool:
        for i, row in enumerate(self.entries):
            for j, x in enumerate(row):
                if x != (1 if i == j else 0):
                    return False
        return True

    def to_dict(self, float_mode=False):
        if float_mode:
            rows = [[[x.to_complex().real, x.to_complex().imag] for x in row] for row in self.entries]
        else:
            rows = [[x.to_dict() for x in row] for row in self.entries]
        return {"d": self.d, "size": self.size, "entries": rows}

    @staticmethod
    def from_dict(data: dict):
        return DenseOp(data["d"], tuple(tuple(CycloScalar.from_dict(x) for x in row)
                                        for row in data["entries"]))


def identity(d, size=None) -> DenseOp:
    n = d if size is None else size
    return DenseOp(d, tuple(tuple(one(d) if i == j else zero(d) for j in range(n)) for i in range(n)))


def g_map(a: Ket) -> MsElement:
    """G(sum_i a_i |i>) = sum_i a_i X^i."""
    return MsElement(a.d, a.amps)


def g_inv(m: MsElement) -> Ket:
    return Ket(m.d, m.xcoeffs)


def standard_element(d, i) -> MsElement:
    """X^i."""
    validate_order(d)
    return MsElement(d, tuple(one(d) if k == i % d else zero(d) for k in range(d)))


def hs_inner(a: MsElement, b: MsElement) -> CycloScalar:
    """Tr(A^dagger B) = d * sum_i conj(a_i) b_i, using Tr(X^i X^j dagger) = d delta_ij."""
    if a.d != b.d:
        raise DimensionMismatch(f"elements of order {a.d} and {b.d}")
    return dot(a.xcoeffs, b.xcoeffs, conjugate=True) * a.d


def hs_inner_dense(a: DenseOp, b: DenseOp) -> CycloScalar:
    """Tr(A^dagger B) computed entrywise; the cross-check path for hs_inner."""
    a._check(b)
    flat_a = [x for row in a.entries for x in row]
    flat_b = [x for row in b.entries for x in row]
    return dot(flat_a, flat_b, conjugate=True)


def to_dense(m: MsElement) -> DenseOp:
    """Circulant realisation: entry (row, col) is the coefficient of X^((row - col) mod d)."""
    d = m.d
    return DenseOp(d, tuple(tuple(m.xcoeffs[(row - col) % d] for col in range(d)) for row in range(d)))


def from_dense(u: DenseOp) -> MsElement:
    """Inverse of to_dense; rejects matrices outside M_s (non-circulant)."""
    d = u.d
    if u.size != d:
        raise DimensionMismatch(f"expected a {d}x{d} matrix, got {u.size}x{u.size}")
    coeffs = tuple(u.entries[i][0] for i in range(d))
    for row in range(d):
        for col in range(d):
            if u.entries[row][col] != coeffs[(row - col) % d]:
                raise DimensionMismatch("matrix is not a polynomial in the cyclic shift")
    return MsElement(d, coeffs)


def is_unitary_dense(u: DenseOp) -> bool:
    """Exact test of U^dagger U = I."""
    n = u.size
    cols = [u.column(j) for j in range(n)]
    for i in range(n):
        for j in range(n):
            if dot(cols[i], cols[j], conjugate=True) != (1 if i == j else 0):
                return False
    return True
