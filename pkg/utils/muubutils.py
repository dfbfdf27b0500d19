"""
The family of d mutually unbiased unitary bases (MUUBs) of M_s, its exact
pairwise verification, and the r = 0 counterexample that caps the family at d.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations

from utils.cycloutils import CycloScalar, validate_order, omega_pow, inv_sqrt_d
from utils.errorutils import DimensionMismatch, NotUnitaryFamily, SameBasis, check_index
from utils.graphutils import unbiasedness_graph, largest_unbiased_family, is_complete_family
from utils.hilbertutils import (
    BasisLabel, Ket, UNITARY, basis_ket, mub_state, mub_exponent, monoid_unitarity_witness,
    label_to_json, label_from_json, label_sort_key,
)
from utils.matspaceutils import (
    MsElement, g_map, hs_inner, to_dense, is_unitary_dense, standard_element,
)

logger = logging.getLogger(__name__)


class Verdict(Enum):
    MUUB = "MUUB"
    NOT_MUUB = "NOT_MUUB"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MuubBasis:
    d: int
    label: BasisLabel | int
    ops: tuple[MsElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        if len(self.ops) != self.d:
            raise DimensionMismatch(f"basis needs {self.d} operators, got {len(self.ops)}")

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)

    def to_dict(self):
        return {"d": self.d, "label": label_to_json(self.label), "ops": [m.to_dict() for m in self.ops]}

    @staticmethod
    def from_dict(data: dict):
        return MuubBasis(data["d"], label_from_json(data["label"]),
                         tuple(MsElement.from_dict(m) for m in data["ops"]))


def _rational_json(x: CycloScalar):
    if x.is_rational():
        q = x.as_rational()
        return [q.numerator, q.denominator]
    return x.to_dict()


@dataclass(frozen=True)
class VerificationReport:
    """Exact |Tr(A_i^dagger B_j)|^2 for every member pair of two bases.

    `expected` is the constant the verdict is judged against (d for G-images);
    `constant` reports the common value actually observed, if there is one.
    """
    d: int
    label_a: BasisLabel | int
    label_b: BasisLabel | int
    values: tuple[tuple[CycloScalar, ...], ...]
    expected: Fraction
    verdict: Verdict
    counterexamples: tuple[tuple[int, int], ...] = ()

    @property
    def constant(self) -> Fraction | None:
        first = self.values[0][0]
        if not first.is_rational():
            return None
        if all(v == first for row in self.values for v in row):
            return first.as_rational()
        return None

    @property
    def unbiased(self) -> bool:
        """Unbiased for some constant C != 0, whether or not C equals `expected`."""
        c = self.constant
        return c is not None and c != 0

    def to_dict(self):
        c = self.constant
        return {
            "a": label_to_json(self.label_a),
            "b": label_to_json(self.label_b),
            "values": [_rational_json(v) for row in self.values for v in row],
            "expected": [self.expected.numerator, self.expected.denominator],
            "constant": None if c is None else [c.numerator, c.denominator],
            "verdict": str(self.verdict),
            "counterexamples": [list(ij) for ij in self.counterexamples],
        }


class Counterexample:
    def __init__(self, element: MsElement, witness: Ket, dense_check: bool):
        self.element = element
        self.witness = witness
        self.dense_check = dense_check

    def to_dict(self):
        return {
            "element": self.element.to_dict(),
            "witness": self.witness.to_dict(),
            "dense_check": self.dense_check,
        }

    @staticmethod
    def from_dict(data: dict):
        return Counterexample(
            MsElement.from_dict(data["element"]),
            Ket.from_dict(data["witness"]),
            data["dense_check"],
        )


class FamilyExtension:
    """Outcome of trying to add the r = 0 image basis to the unitary family."""

    def __init__(self, candidate: MuubBasis, member_unitary, unbiased_with_family: bool):
        self.candidate = candidate
        self.member_unitary = tuple(member_unitary)
        self.unbiased_with_family = unbiased_with_family

    @property
    def admitted(self) -> bool:
        return all(self.member_unitary) and self.unbiased_with_family


@dataclass
class FamilyReport:
    d: int
    labels: list
    member_unitary: dict
    reports: list[VerificationReport]
    counterexample: Counterexample
    largest_family: list = field(default_factory=list)

    @property
    def counterexample_confirmed(self) -> bool:
        return not self.counterexample.dense_check and self.counterexample.witness != basis_ket(self.d, 0)

    @property
    def passed(self) -> bool:
        return (
            len(self.labels) == self.d
            and all(all(flags) for flags in self.member_unitary.values())
            and all(r.verdict is Verdict.MUUB for r in self.reports)
            and len(self.largest_family) == self.d
            and self.counterexample_confirmed is True
        )

    def to_dict(self):
        return {
            "d": self.d,
            "bases": [label_to_json(x) for x in self.labels],
            "member_unitary": {str(label_to_json(k)): list(v) for k, v in self.member_unitary.items()},
            "pairs": [r.to_dict() for r in self.reports],
            "largest_family": [label_to_json(x) for x in self.largest_family],
            "counterexample": self.counterexample.to_dict(),
            "verdict": "pass" if self.passed else "fail",
        }


def muub_element(d, r, s) -> MsElement:
    """X_s^(r) = (1/sqrt d) sum_i w^{s(d-i)} w^{-r alpha(i)} X^i for r = 1..d-1."""
    validate_order(d)
    check_index("r", r, 0, d - 1)
    check_index("s", s, 0, d - 1)
    if r == 0:
        raise NotUnitaryFamily(
            "r = 0 does not map to unitary operators; see theorem_counterexample")
    norm = inv_sqrt_d(d)
    return MsElement(d, tuple(omega_pow(d, mub_exponent(d, r, s, i)) * norm for i in range(d)))


def standard_basis(d) -> MuubBasis:
    validate_order(d)
    return MuubBasis(d, BasisLabel.STANDARD, tuple(standard_element(d, i) for i in range(d)))


def muub_basis(d, r) -> MuubBasis:
    return MuubBasis(d, r, tuple(muub_element(d, r, s) for s in range(d)))


def muub_family(d) -> list[MuubBasis]:
    """[STANDARD, r=1, ..., r=d-1]."""
    validate_order(d)
    return [standard_basis(d)] + [muub_basis(d, r) for r in range(1, d)]


def verify_muub_pair(a: MuubBasis, b: MuubBasis, expected=None) -> VerificationReport:
    if a.d != b.d:
        raise DimensionMismatch(f"bases of order {a.d} and {b.d}")
    if a.label == b.label:
        raise SameBasis(f"basis {a.label} compared with itself")
    target = Fraction(a.d) if expected is None else Fraction(expected)
    values = tuple(tuple(hs_inner(x, y).abs_squared() for y in b.ops) for x in a.ops)
    bad = tuple((i, j) for i, row in enumerate(values) for j, v in enumerate(row) if v != target)
    verdict = Verdict.MUUB if not bad else Verdict.NOT_MUUB
    logger.debug("pair (%s, %s): %s", a.label, b.label, verdict)
    return VerificationReport(a.d, a.label, b.label, values, target, verdict, bad)


def theorem_counterexample(d) -> Counterexample:
    """G(|w_0^(0)>), its monoid witness sum_m |m>, and the failing dense unitarity check."""
    validate_order(d)
    state = mub_state(d, 0, 0)
    element = g_map(state)
    witness = monoid_unitarity_witness(state)
    if witness is UNITARY:
        raise NotUnitaryFamily(f"equal-amplitude state of order {d} unexpectedly unitary")
    return Counterexample(element, witness, is_unitary_dense(to_dense(element)))


def member_unitarity(basis: MuubBasis) -> tuple[bool, ...]:
    return tuple(is_unitary_dense(to_dense(m)) for m in basis.ops)


def verify_family(family: list[MuubBasis], workers=1) -> list[VerificationReport]:
    """Verifies every pair of distinct bases; reports come back ordered by label."""
    pairs = list(combinations(family, 2))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda ab: verify_muub_pair(*ab), pairs))
    else:
        reports = [verify_muub_pair(a, b) for a, b in pairs]
    reports.sort(key=lambda r: (label_sort_key(r.label_a), label_sort_key(r.label_b)))
    return reports


def family_graph(labels, reports: list[VerificationReport]):
    return unbiasedness_graph(labels, ((r.label_a, r.label_b, r.verdict is Verdict.MUUB) for r in reports))


def extend_with_counterexample(d) -> FamilyExtension:
    """Tries to add the G-image of the r = 0 MUB to muub_family(d).

    The image stays unbiased with every basis (C = d) but its members are not
    unitary, so the unitary family cannot grow past d.
    """
    family = muub_family(d)
    candidate = MuubBasis(d, 0, tuple(g_map(mub_state(d, 0, s)) for s in range(d)))
    unitary = member_unitarity(candidate)
    unbiased = all(verify_muub_pair(candidate, basis).verdict is Verdict.MUUB for basis in family)
    logger.debug("r=0 extension for d=%d: unitary=%s unbiased=%s", d, unitary, unbiased)
    return FamilyExtension(candidate, unitary, unbiased)


def family_report(d, workers=1) -> FamilyReport:
    """Builds muub_family(d) and audits every member and every pair of bases."""
    family = muub_family(d)
    reports = verify_family(family, workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            unitary = list(pool.map(member_unitarity, family))
    else:
        unitary = [member_unitarity(basis) for basis in family]

    labels = [basis.label for basis in family]
    graph = family_graph(labels, reports)
    logger.info("d=%d: %d bases, %d pairs, complete=%s", d, len(family), len(reports), is_complete_family(graph))

    return FamilyReport(
        d=d,
        labels=labels,
        member_unitary={basis.label: flags for basis, flags in zip(family, unitary)},
        reports=reports,
        counterexample=theorem_counterexample(d),
        largest_family=largest_unbiased_family(graph),
    )
