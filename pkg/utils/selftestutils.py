"""
The invariant suites behind `main.py selftest`.

Every suite runs for the primes up to `max_d` that it supports and records each
exact check it performs. Randomised suites draw from a numpy Generator seeded
per suite, so the outcome does not depend on the order the suites run in.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from utils.configutils import COMPLEX_PRODUCT_TOLERANCE, DEFAULT_SEED, DEFAULT_SAMPLES, DEFAULT_MAX_D
from utils.cycloutils import CycloScalar, is_prime, omega_pow
from utils.entangleutils import (
    bell_basis, bell_state, choi, is_mes, mes_mub_basis, pauli_word, projector,
    subspace_coordinates, traceless_orthogonality,
)
from utils.hilbertutils import (
    Ket, UNITARY, all_mubs, bullet, dagger, basis_ket, inner, is_bijective_scaling,
    is_orthonormal, monoid_unitarity_witness, mub_state, overlap_table, unitarity_coefficient,
    verify_mub,
)
from utils.matspaceutils import g_map, hs_inner, is_unitary_dense, to_dense
from utils.muubutils import extend_with_counterexample, family_report, muub_element
from utils.oracleutils import FloatOracle

logger = logging.getLogger(__name__)

MAX_COEFF = 8
MAX_FAILURES_KEPT = 5


def faulty_mub_state(d, r, s) -> Ket:
    """mub_state with the w exponent of |1> raised by one for (r, s) = (1, 0) only."""
    ket = mub_state(d, r, s)
    if (r, s) != (1, 0):
        return ket
    amps = list(ket.amps)
    amps[1] = amps[1] * omega_pow(d, 1)
    return Ket(d, tuple(amps))


def random_scalar(rng: np.random.Generator, d, root_d_pow=0) -> CycloScalar:
    nums = rng.integers(-MAX_COEFF, MAX_COEFF + 1, size=d)
    den = int(rng.integers(1, MAX_COEFF + 1))
    return CycloScalar(d, [int(n) for n in nums], den, root_d_pow)


def product_deviation(x: CycloScalar, y: CycloScalar) -> float:
    """Float error of to_complex on a product, relative to max(1, |x||y|)."""
    fx, fy = x.to_complex(), y.to_complex()
    return abs((x * y).to_complex() - fx * fy) / max(1.0, abs(fx) * abs(fy))


def random_ket(rng: np.random.Generator, d, root_d_pow=0) -> Ket:
    return Ket(d, tuple(random_scalar(rng, d, root_d_pow) for _ in range(d)))


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)
    failure_count: int = 0
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def check(self, ok, label):
        self.checks += 1
        if not ok:
            self.failure_count += 1
            if len(self.failures) < MAX_FAILURES_KEPT:
                self.failures.append(label)

    def to_dict(self):
        # timings stay out of the serialized report so reruns are byte-identical
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "failures": self.failure_count,
            "first_failures": list(self.failures),
        }


@dataclass
class SelftestContext:
    max_d: int = DEFAULT_MAX_D
    seed: int = DEFAULT_SEED
    samples: int = DEFAULT_SAMPLES
    workers: int = 1
    state_fn: object = mub_state
    oracle: FloatOracle = field(default_factory=FloatOracle)

    @property
    def primes(self) -> list[int]:
        """Odd primes up to max_d."""
        return [d for d in range(3, self.max_d + 1) if is_prime(d)]

    def primes_within(self, *allowed) -> list[int]:
        return [d for d in self.primes if d in allowed]

    def rng(self, salt) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


class SelftestReport:
    def __init__(self, max_d, primes, suites):
        self.max_d = max_d
        self.primes = list(primes)
        self.suites = list(suites)

    @property
    def passed(self) -> bool:
        return bool(self.suites) and all(s.passed for s in self.suites)

    @property
    def failed_suites(self) -> list[str]:
        return [s.name for s in self.suites if not s.passed]

    def to_dict(self):
        return {
            "max_d": self.max_d,
            "primes": list(self.primes),
            "suites": [s.to_dict() for s in self.suites],
            "failed_suites": self.failed_suites,
            "verdict": "pass" if self.passed else "fail",
        }


def suite_cyclo_field(ctx: SelftestContext, res: SuiteResult):
    for d in ctx.primes:
        rng = ctx.rng(1000 + d)
        for k in range(ctx.samples):
            parity = k % 2
            x, y, z = (random_scalar(rng, d, parity) for _ in range(3))
            res.check((x + y) + z == x + (y + z), f"d={d} sample {k}: addition not associative")
            res.check(x * (y + z) == x * y + x * z, f"d={d} sample {k}: distributivity")
            res.check(x * y == y * x, f"d={d} sample {k}: multiplication not commutative")
            res.check((x * y).conj() == x.conj() * y.conj(), f"d={d} sample {k}: conj not multiplicative")
            sq = x.abs_squared()
            res.check(sq == sq.conj(), f"d={d} sample {k}: |x|^2 not real")
            res.check(product_deviation(x, y) < COMPLEX_PRODUCT_TOLERANCE,
                      f"d={d} sample {k}: to_complex not multiplicative")


def suite_mub(ctx: SelftestContext, res: SuiteResult):
    for d in ctx.primes:
        bases = all_mubs(d, ctx.state_fn)
        res.check(len(bases) == d + 1, f"d={d}: {len(bases)} bases")
        for basis in bases:
            res.check(is_orthonormal(basis), f"d={d}: basis {basis.label} not orthonormal")
        for a, b in combinations(bases, 2):
            res.check(verify_mub(a, b), f"d={d}: bases {a.label}, {b.label} biased")


def suite_monoid_laws(ctx: SelftestContext, res: SuiteResult):
    for d in ctx.primes_within(3, 5, 7):
        rng = ctx.rng(2000 + d)
        unit = basis_ket(d, 0)
        for k in range(ctx.samples):
            a, b, c = (random_ket(rng, d) for _ in range(3))
            res.check(bullet(bullet(a, b), c) == bullet(a, bullet(b, c)), f"d={d} sample {k}: associativity")
            res.check(bullet(a, unit) == a and bullet(unit, a) == a, f"d={d} sample {k}: identity")
            res.check(bullet(a, b) == bullet(b, a), f"d={d} sample {k}: commutativity")
            res.check(bullet(a, b + c) == bullet(a, b) + bullet(a, c), f"d={d} sample {k}: distributivity")
            res.check(dagger(bullet(a, b)) == bullet(dagger(a), dagger(b)), f"d={d} sample {k}: dagger")


def suite_isomorphism(ctx: SelftestContext, res: SuiteResult):
    for d in ctx.primes_within(3, 5, 7):
        rng = ctx.rng(3000 + d)
        for k in range(ctx.samples):
            a, b = random_ket(rng, d), random_ket(rng, d)
            ga, gb = g_map(a), g_map(b)
            res.check(hs_inner(ga, gb).abs_squared() == inner(a, b).abs_squared() * (d * d),
                      f"d={d} sample {k}: |Tr(G(a)^+ G(b))| != d |<a|b>|")
            res.check(to_dense(g_map(bullet(a, b))) == to_dense(ga) @ to_dense(gb),
                      f"d={d} sample {k}: G not multiplicative")
            res.check(to_dense(g_map(dagger(a))) == to_dense(ga).dagger(),
                      f"d={d} sample {k}: G does not carry dagger to adjoint")
        candidates = [ctx.state_fn(d, r, s) for r in range(d) for s in range(d)]
        candidates += [random_ket(rng, d) for _ in range(min(ctx.samples, 20))]
        for k, ket in enumerate(candidates):
            monoid = monoid_unitarity_witness(ket) is UNITARY
            dense = is_unitary_dense(to_dense(g_map(ket)))
            res.check(monoid == dense, f"d={d} candidate {k}: monoid and dense unitarity disagree")


def suite_coefficient_formula(ctx: SelftestContext, res: SuiteResult):
    for d in ctx.primes:
        for r in range(d):
            for s in range(d):
                psi = ctx.state_fn(d, r, s)
                product = bullet(psi, dagger(psi))
                for m in range(d):
                    res.check(product[m] == unitarity_coefficient(d, r, s, m),
                              f"d={d} r={r} s={s} m={m}: closed form mismatch")


def suite_scaling(ctx: SelftestContext, res: SuiteResult):
    for d in ctx.primes:
        res.check(not is_bijective_scaling(d, 0), f"d={d}: p=0 reported bijective")
        for p in range(1, d):
            res.check(is_bijective_scaling(d, p), f"d={d} p={p}: scaling not bijective")


def suite_muub_family(ctx: SelftestContext, res: SuiteResult):
    for d in ctx.primes:
        report = family_report(d, ctx.workers)
        res.check(report.passed, f"d={d}: family report failed")
        res.check(report.counterexample.witness == Ket(d, tuple(omega_pow(d, 0) for _ in range(d))),
                  f"d={d}: counterexample witness is not sum_m |m>")
        res.check(not extend_with_counterexample(d).admitted, f"d={d}: r=0 image admitted")
        for r in range(1, d):
            for s in range(d):
                res.check(muub_element(d, r, s) == g_map(ctx.state_fn(d, r, s)),
                          f"d={d} r={r} s={s}: recipe differs from G-image")


def suite_pauli(ctx: SelftestContext, res: SuiteResult):
    for d in [2] + ctx.primes_within(3, 5, 7):
        for a in range(d):
            for b in range(d):
                for n in range(d + 1):
                    word = pauli_word(d, b, a, n)
                    res.check(word.holds(), f"d={d} a={a} b={b} n={n}: power != phase * word")
                if d > 2:
                    res.check(pauli_word(d, b, a, d).op.is_identity(), f"d={d} a={a} b={b}: W^d != I")


def suite_entanglement(ctx: SelftestContext, res: SuiteResult):
    for d in [2] + ctx.primes_within(3, 5):
        states = bell_basis(d)
        for i, u in enumerate(states):
            res.check(is_mes(u), f"d={d} Bell state {i}: not maximally entangled")
            for j in range(i, len(states)):
                res.check(u.inner(states[j]) == (1 if i == j else 0), f"d={d} Bell states {i},{j}: Gram")
        for a in range(d):
            for b in range(d):
                w = pauli_word(d, b, a, 1).op
                res.check(bell_state(d, a, b) == choi(w), f"d={d} a={a} b={b}: Bell state != choi")

    for d in ctx.primes_within(3, 5, 7):
        for a, b in ((0, 1), (1, 0), (1, 1)):
            bases = {r: mes_mub_basis(d, r, a, b) for r in range(1, d)}
            for r, basis in bases.items():
                for s, psi in enumerate(basis):
                    res.check(psi.norm_squared() == 1, f"d={d} ({a},{b}) r={r} s={s}: norm")
                    res.check(is_mes(psi), f"d={d} ({a},{b}) r={r} s={s}: not MES")
                    res.check(subspace_coordinates(psi, a, b) == ctx.state_fn(d, r, s),
                              f"d={d} ({a},{b}) r={r} s={s}: coordinates differ from the MUB state")
            for r1, r2 in combinations(bases, 2):
                for u in bases[r1]:
                    for v in bases[r2]:
                        res.check(u.inner(v).abs_squared() == Fraction(1, d),
                                  f"d={d} ({a},{b}) r={r1},{r2}: overlap not 1/d")


def suite_subspace_orthogonality(ctx: SelftestContext, res: SuiteResult):
    for d in ctx.primes_within(3, 5, 7):
        bases = all_mubs(d, ctx.state_fn)
        projectors = [[projector(k) for k in basis] for basis in bases]
        for pa, pb in combinations(range(len(bases)), 2):
            for j in range(d):
                value = traceless_orthogonality(projectors[pa][0], projectors[pb][j])
                res.check(value == 0, f"d={d} bases {bases[pa].label},{bases[pb].label} member {j}: {value}")
        for b, rows in enumerate(projectors):
            res.check(traceless_orthogonality(rows[0], rows[1]) == Fraction(-1, d),
                      f"d={d} basis {bases[b].label}: orthogonal members not -1/d")
            res.check(traceless_orthogonality(rows[0], rows[0]) == Fraction(d - 1, d),
                      f"d={d} basis {bases[b].label}: purity term not 1 - 1/d")


def suite_oracle(ctx: SelftestContext, res: SuiteResult):
    oracle = ctx.oracle
    for d in ctx.primes:
        exact_bases = all_mubs(d, ctx.state_fn)
        float_bases = oracle.all_mubs(d)
        for (ea, fa), (eb, fb) in combinations(zip(exact_bases, float_bases), 2):
            cells = [x for row in overlap_table(ea, eb) for x in row]
            dev = oracle.deviation(cells, oracle.mub_overlaps(fa, fb))
            res.check(oracle.agrees(dev), f"d={d} bases {ea.label},{eb.label}: deviation {dev:.3g}")

        report = family_report(d, ctx.workers)
        float_family = oracle.muub_family(d)
        index = {label: i for i, label in enumerate(report.labels)}
        for pair in report.reports:
            fa, fb = float_family[index[pair.label_a]], float_family[index[pair.label_b]]
            approx = [oracle.hs_overlap_squared(x, y) for x in fa for y in fb]
            dev = oracle.deviation([x for row in pair.values for x in row], approx)
            res.check(oracle.agrees(dev), f"d={d} pair {pair.label_a},{pair.label_b}: deviation {dev:.3g}")

    for d in [2] + ctx.primes_within(3, 5):
        for a in range(d):
            for b in range(d):
                dev = oracle.deviation(bell_state(d, a, b).amps, oracle.bell_state(d, b=b, a=a))
                res.check(oracle.agrees(dev), f"d={d} Bell ({a},{b}): deviation {dev:.3g}")
    for d in ctx.primes_within(3, 5):
        for a, b in ((0, 1), (1, 0), (1, 1)):
            for r in range(1, d):
                for s, psi in enumerate(mes_mub_basis(d, r, a, b)):
                    approx = oracle.mes_mub_state(d, r, s, a, b)
                    dev = oracle.deviation(psi.amps, approx)
                    res.check(oracle.agrees(dev) and oracle.is_mes(approx, d),
                              f"d={d} ({a},{b}) r={r} s={s}: deviation {dev:.3g}")


SUITES = (
    ("cyclo_field", suite_cyclo_field),
    ("mub", suite_mub),
    ("monoid_laws", suite_monoid_laws),
    ("isomorphism", suite_isomorphism),
    ("coefficient_formula", suite_coefficient_formula),
    ("scaling_bijection", suite_scaling),
    ("muub_family", suite_muub_family),
    ("pauli_identity", suite_pauli),
    ("entanglement", suite_entanglement),
    ("subspace_orthogonality", suite_subspace_orthogonality),
    ("oracle_agreement", suite_oracle),
)


def run_selftest(max_d=DEFAULT_MAX_D, seed=DEFAULT_SEED, samples=DEFAULT_SAMPLES, workers=1,
                 inject_fault=False, only=None) -> SelftestReport:
    """Runs every suite (or those named in `only`) and collects the results."""
    ctx = SelftestContext(max_d=max_d, seed=seed, samples=samples, workers=workers,
                          state_fn=faulty_mub_state if inject_fault else mub_state)
    if inject_fault:
        logger.warning("fault injected into the MUB state generator")
    results = []
    for name, suite in SUITES:
        if only is not None and name not in only:
            continue
        res = SuiteResult(name)
        start = time.perf_counter()
        suite(ctx, res)
        res.seconds = time.perf_counter() - start
        logger.info("suite %s: %d checks, %d failures in %.2fs", name, res.checks, res.failure_count, res.seconds)
        results.append(res)
    return SelftestReport(max_d, ctx.primes, results)
