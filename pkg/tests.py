import json
import logging
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from utils.configutils import COMPLEX_PRODUCT_TOLERANCE, Mode, OutputFormat, RunConfig, load_settings
from utils.cycloutils import (
    CycloScalar, dot, from_coeffs, gauss_sum_coeffs, inv_sqrt_d, is_prime, omega_pow, one,
    rational, validate_order, zero,
)
from utils.entangleutils import (
    BipartiteKet, bell_basis, bell_state, choi, is_mes, mes_mub_basis, mes_mub_state,
    partial_trace, pauli_word, pauli_x, pauli_z, projector, reduced_state,
    subspace_coordinates, traceless_orthogonality, word_family,
)
from utils.errorutils import (
    DegenerateFamily, DimensionMismatch, IndexOutOfRange, InvalidDimension, NotRepresentable,
    NotUnitary, NotUnitaryFamily, OutputError, SameBasis, repeat_until_finish,
)
from utils.graphutils import is_complete_family, largest_unbiased_family, unbiasedness_graph
from utils.hilbertutils import (
    BasisLabel, UNITARY, all_mubs, alpha, basis_ket, bullet, dagger, inner, is_bijective_scaling,
    is_orthonormal, ket_from_ints, monoid_unitarity_witness, mub_state, scaling_permutation,
    unitarity_coefficient, verify_mub,
)
from utils.logutils import configure_logging
from utils.matspaceutils import (
    MsElement, from_dense, g_inv, g_map, hs_inner, hs_inner_dense, identity, is_unitary_dense,
    standard_element, to_dense,
)
from utils.muubutils import (
    Counterexample, Verdict, extend_with_counterexample, family_graph, family_report, muub_element,
    muub_family, standard_basis, theorem_counterexample, verify_family, verify_muub_pair,
    muub_basis,
)
from utils.oracleutils import FloatOracle
from utils.selftestutils import faulty_mub_state, product_deviation, random_scalar, run_selftest
from utils import cliutils


def ket_strategy(d, bound=5):
    return st.lists(st.integers(-bound, bound), min_size=d, max_size=d).map(lambda xs: ket_from_ints(d, xs))


def scalar_strategy(d, root_d_pow=0):
    return st.builds(lambda nums, den: CycloScalar(d, nums, den, root_d_pow),
                     st.lists(st.integers(-8, 8), min_size=d, max_size=d),
                     st.integers(1, 8))


def w(d, e):
    return omega_pow(d, e)


def test_omega_pow_reduces_exponent_and_basis():
    assert omega_pow(3, 5).coeffs == (-1, -1, 0)
    assert omega_pow(5, 5) == 1
    assert omega_pow(7, -1) == omega_pow(7, 6)


def test_roots_of_unity_sum_to_zero():
    total = zero(7)
    for k in range(7):
        total = total + omega_pow(7, k)
    assert total == 0
    assert total.is_zero()


def test_abs_squared_of_normalised_sum():
    x = (one(3) + w(3, 1)) * inv_sqrt_d(3)
    assert x.abs_squared() == Fraction(1, 3)
    assert x.abs_squared().as_rational() == Fraction(1, 3)


def test_to_complex_of_omega():
    z = w(3, 1).to_complex()
    assert z.real == pytest.approx(-0.5)
    assert z.imag == pytest.approx(0.8660254037844386)


def test_inverse_root_squares_to_rational():
    assert inv_sqrt_d(5) * inv_sqrt_d(5) == Fraction(1, 5)
    assert (inv_sqrt_d(7) * inv_sqrt_d(7)).root_d_pow == 0


def test_gauss_sum_folds_root_for_one_mod_four():
    g_over_d = from_coeffs(5, [Fraction(c, 5) for c in gauss_sum_coeffs(5)])
    assert inv_sqrt_d(5) == g_over_d
    assert hash(inv_sqrt_d(5)) == hash(g_over_d)
    assert (one(5) + inv_sqrt_d(5)) - inv_sqrt_d(5) == 1


def test_mixed_parity_sum_outside_field():
    with pytest.raises(NotRepresentable):
        one(3) + inv_sqrt_d(3)
    with pytest.raises(NotRepresentable):
        inv_sqrt_d(7).as_rational()
    assert inv_sqrt_d(3) != Fraction(1, 3)


def test_validate_order():
    assert is_prime(13) and not is_prime(9)
    assert validate_order(2, allow_two=True) == 2
    with pytest.raises(InvalidDimension):
        validate_order(2)
    with pytest.raises(InvalidDimension):
        omega_pow(9, 1)
    with pytest.raises(InvalidDimension):
        validate_order(True)


def test_scalars_of_different_order_do_not_mix():
    with pytest.raises(DimensionMismatch):
        w(3, 1) + w(5, 1)
    assert w(3, 1) != w(5, 1)


def test_scalar_str_and_serialization():
    assert str(w(3, 1)) == "w"
    assert str(inv_sqrt_d(3)) == "1/sqrt(3)"
    x = (rational(5, Fraction(2, 3)) + w(5, 2)) * inv_sqrt_d(5)
    assert CycloScalar.from_dict(json.loads(json.dumps(x.to_dict()))) == x


def test_dot_matches_termwise_sum():
    xs = [w(5, k) * inv_sqrt_d(5) for k in range(5)]
    ys = [w(5, 2 * k) * inv_sqrt_d(5) for k in range(5)]
    total = zero(5)
    for x, y in zip(xs, ys):
        total = total + x.conj() * y
    assert dot(xs, ys, conjugate=True) == total


@settings(max_examples=60, deadline=None)
@given(scalar_strategy(5), scalar_strategy(5), scalar_strategy(5))
def test_field_laws_d5(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x - x == 0


@settings(max_examples=60, deadline=None)
@given(scalar_strategy(7, 1), scalar_strategy(7, 1))
def test_conjugation_is_multiplicative_with_root(x, y):
    assert (x * y).conj() == x.conj() * y.conj()
    assert x.conj().conj() == x
    sq = x.abs_squared()
    assert sq == sq.conj()
    assert product_deviation(x, y) < COMPLEX_PRODUCT_TOLERANCE


@pytest.mark.parametrize("d", [3, 5, 7, 11, 13])
def test_to_complex_is_multiplicative(d):
    rng = np.random.default_rng(d)
    for k in range(200):
        x, y = random_scalar(rng, d, k % 2), random_scalar(rng, d, (k // 2) % 2)
        assert product_deviation(x, y) < COMPLEX_PRODUCT_TOLERANCE


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.data())
def test_equal_scalars_stay_equal_under_arithmetic(d, data):
    nums = data.draw(st.lists(st.integers(-8, 8), min_size=d, max_size=d))
    shift = data.draw(st.integers(-5, 5))
    factor = data.draw(st.integers(1, 4))
    x1 = CycloScalar(d, nums, 2)
    # adding a multiple of 1 + w + ... + w^(d-1) leaves the value unchanged
    x2 = CycloScalar(d, [factor * (n + shift) for n in nums], 2 * factor)
    y = data.draw(scalar_strategy(d))
    z = data.draw(scalar_strategy(d, 1))
    assert x1 == x2
    assert hash(x1) == hash(x2)
    assert x1 + y == x2 + y
    assert x1 * y == x2 * y
    assert x1 * z == x2 * z
    assert x1.conj() == x2.conj()
    assert x1.abs_squared() == x2.abs_squared()


def test_folded_root_stays_equal_under_arithmetic():
    root_form = CycloScalar(5, [1, 0, 0, 0, 0], 1, 1)
    field_form = from_coeffs(5, [Fraction(c, 5) for c in gauss_sum_coeffs(5)])
    y = CycloScalar(5, [2, -1, 0, 3, 1], 7)
    z = CycloScalar(5, [1, 4, 0, 0, -2], 3, 1)
    assert root_form == field_form
    assert root_form + y == field_form + y
    assert root_form + z == field_form + z
    assert root_form * z == field_form * z
    assert hash(root_form * z) == hash(field_form * z)
    assert root_form.conj() == field_form.conj()
    assert (root_form * y).abs_squared() == (field_form * y).abs_squared()


def test_alpha_partial_sums():
    assert [alpha(5, i) for i in range(5)] == [10, 10, 9, 7, 4]


def test_mub_state_example():
    norm = inv_sqrt_d(3)
    assert mub_state(3, 1, 0).amps == (norm, norm, w(3, 1) * norm)


@pytest.mark.parametrize("d", [3, 5, 7, 11, 13])
def test_all_mubs_are_orthonormal_and_unbiased(d):
    bases = all_mubs(d)
    assert len(bases) == d + 1
    assert bases[0].label is BasisLabel.COMPUTATIONAL
    assert all(is_orthonormal(b) for b in bases)
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            assert verify_mub(bases[i], bases[j])


def test_mub_state_rejects_bad_input():
    with pytest.raises(InvalidDimension):
        mub_state(4, 0, 0)
    with pytest.raises(IndexOutOfRange):
        mub_state(3, 3, 0)
    with pytest.raises(IndexOutOfRange):
        mub_state(3, 0, -1)


def test_bullet_example():
    product = bullet(ket_from_ints(3, [1, 1, 0]), ket_from_ints(3, [1, 0, 1]))
    assert product == ket_from_ints(3, [2, 1, 1])


def test_dagger_reverses_indices():
    assert dagger(ket_from_ints(3, [1, 2, 3])) == ket_from_ints(3, [1, 3, 2])
    k = mub_state(5, 2, 1)
    assert dagger(dagger(k)) == k


def test_monoid_unitarity_witness():
    assert monoid_unitarity_witness(mub_state(3, 1, 0)) is UNITARY
    assert monoid_unitarity_witness(basis_ket(5, 2)) is UNITARY
    assert monoid_unitarity_witness(mub_state(3, 0, 0)) == ket_from_ints(3, [1, 1, 1])


@pytest.mark.parametrize("d", [3, 5])
def test_unitarity_coefficient_matches_bullet(d):
    for r in range(d):
        for s in range(d):
            psi = mub_state(d, r, s)
            product = bullet(psi, dagger(psi))
            for m in range(d):
                assert product[m] == unitarity_coefficient(d, r, s, m)


def test_scaling_bijection():
    assert scaling_permutation(5, 2) == [0, 2, 4, 1, 3]
    for d in (3, 5, 7, 11, 13):
        assert all(is_bijective_scaling(d, p) for p in range(1, d))
        assert not is_bijective_scaling(d, 0)


@settings(max_examples=40, deadline=None)
@given(ket_strategy(5), ket_strategy(5), ket_strategy(5))
def test_monoid_laws(a, b, c):
    unit = basis_ket(5, 0)
    assert bullet(bullet(a, b), c) == bullet(a, bullet(b, c))
    assert bullet(a, unit) == a
    assert bullet(a, b) == bullet(b, a)
    assert bullet(a, b + c) == bullet(a, b) + bullet(a, c)
    assert dagger(bullet(a, b)) == bullet(dagger(a), dagger(b))


def test_kets_of_different_dimension():
    with pytest.raises(DimensionMismatch):
        inner(basis_ket(3, 0), basis_ket(5, 0))


def test_hs_inner_of_standard_elements():
    assert hs_inner(standard_element(3, 1), standard_element(3, 1)) == 3
    assert hs_inner(standard_element(3, 1), standard_element(3, 2)) == 0


def test_to_dense_is_the_cyclic_shift():
    assert to_dense(standard_element(3, 1)) == pauli_x(3)
    assert to_dense(standard_element(5, 0)).is_identity()


def test_from_dense_round_trip_and_rejection():
    m = muub_element(5, 2, 3)
    assert from_dense(to_dense(m)) == m
    assert g_inv(g_map(mub_state(5, 1, 4))) == mub_state(5, 1, 4)
    with pytest.raises(DimensionMismatch):
        from_dense(pauli_z(3))


def test_dense_unitarity():
    assert is_unitary_dense(to_dense(muub_element(5, 2, 3)))
    assert not is_unitary_dense(to_dense(g_map(mub_state(5, 0, 0))))
    assert pauli_x(5).power(5).is_identity()
    assert identity(3).is_identity()


@settings(max_examples=30, deadline=None)
@given(ket_strategy(3), ket_strategy(3))
def test_g_map_is_a_homomorphism(a, b):
    ga, gb = g_map(a), g_map(b)
    assert to_dense(g_map(bullet(a, b))) == to_dense(ga) @ to_dense(gb)
    assert to_dense(g_map(dagger(a))) == to_dense(ga).dagger()
    assert hs_inner(ga, gb) == hs_inner_dense(to_dense(ga), to_dense(gb))
    assert hs_inner(ga, gb).abs_squared() == inner(a, b).abs_squared() * 9


def test_ms_element_requires_d_coefficients():
    with pytest.raises(DimensionMismatch):
        MsElement(3, (one(3),))


@pytest.mark.parametrize("m", [0, 1, 2])
def test_d3_family_matches_closed_form(m):
    norm = inv_sqrt_d(3)
    assert muub_element(3, 1, m).xcoeffs == (norm, w(3, 2 * m) * norm, w(3, m + 1) * norm)
    assert muub_element(3, 2, m).xcoeffs == (norm, w(3, 2 * m) * norm, w(3, m + 2) * norm)


def test_d5_element_example():
    norm = inv_sqrt_d(5)
    expected = tuple(w(5, e) * norm for e in (0, 0, 1, 3, 1))
    assert muub_element(5, 1, 0).xcoeffs == expected


def test_muub_element_is_g_image():
    for r in range(1, 5):
        for s in range(5):
            assert muub_element(5, r, s) == g_map(mub_state(5, r, s))


def test_muub_element_rejects_r_zero():
    with pytest.raises(NotUnitaryFamily):
        muub_element(3, 0, 0)
    with pytest.raises(IndexOutOfRange):
        muub_element(3, 1, 3)


@pytest.mark.parametrize("d", [3, 5])
def test_muub_family_shape(d):
    family = muub_family(d)
    assert len(family) == d
    assert [b.label for b in family] == [BasisLabel.STANDARD] + list(range(1, d))
    for basis in family:
        for i, x in enumerate(basis.ops):
            for j, y in enumerate(basis.ops):
                assert hs_inner(x, y) == (d if i == j else 0)


def test_verify_pair_d3():
    report = verify_muub_pair(standard_basis(3), muub_basis(3, 1))
    assert report.verdict is Verdict.MUUB
    assert report.constant == 3
    assert all(v == 3 for row in report.values for v in row)
    data = report.to_dict()
    assert data["values"] == [[3, 1]] * 9
    assert data["verdict"] == "MUUB"

    report = verify_muub_pair(muub_basis(3, 1), muub_basis(3, 2))
    assert report.verdict is Verdict.MUUB and report.counterexamples == ()


def test_verify_pair_rejects_same_basis():
    with pytest.raises(SameBasis):
        verify_muub_pair(muub_basis(3, 1), muub_basis(3, 1))
    with pytest.raises(DimensionMismatch):
        verify_muub_pair(muub_basis(3, 1), muub_basis(5, 1))


def test_verify_pair_reports_a_different_constant():
    report = verify_muub_pair(standard_basis(3), muub_basis(3, 1), expected=1)
    assert report.verdict is Verdict.NOT_MUUB
    assert report.constant == 3
    assert report.unbiased
    assert len(report.counterexamples) == 9


@pytest.mark.parametrize("d", [3, 5])
def test_unitary_images_have_unit_norm_preimages(d):
    for r in range(1, d):
        for s in range(d):
            element = muub_element(d, r, s)
            assert is_unitary_dense(to_dense(element))
            assert g_inv(element).is_normalized()


@pytest.mark.parametrize("d", [3, 5])
def test_theorem_counterexample(d):
    cx = theorem_counterexample(d)
    assert cx.witness == ket_from_ints(d, [1] * d)
    assert cx.dense_check is False
    assert cx.element == g_map(mub_state(d, 0, 0))
    restored = Counterexample.from_dict(json.loads(json.dumps(cx.to_dict())))
    assert restored.witness == cx.witness and restored.element == cx.element


def test_r0_image_cannot_join_the_family():
    ext = extend_with_counterexample(3)
    assert ext.unbiased_with_family
    assert not any(ext.member_unitary)
    assert not ext.admitted


@pytest.mark.parametrize("d", [3, 5, 7, 11, 13])
def test_family_report_passes(d):
    report = family_report(d)
    assert report.passed
    assert len(report.reports) == d * (d - 1) // 2
    assert report.largest_family == [BasisLabel.STANDARD] + list(range(1, d))
    assert report.to_dict()["verdict"] == "pass"


def test_family_report_independent_of_workers():
    assert family_report(5, workers=1).to_dict() == family_report(5, workers=3).to_dict()


def test_family_graph_is_complete():
    family = muub_family(3)
    reports = verify_family(family)
    graph = family_graph([b.label for b in family], reports)
    assert is_complete_family(graph)


def test_largest_unbiased_family_on_a_broken_graph():
    graph = unbiasedness_graph(
        [BasisLabel.STANDARD, 1, 2, 3],
        [(BasisLabel.STANDARD, 1, True), (BasisLabel.STANDARD, 2, True), (1, 2, True),
         (BasisLabel.STANDARD, 3, False), (1, 3, True), (2, 3, False)])
    assert not is_complete_family(graph)
    assert largest_unbiased_family(graph) == [BasisLabel.STANDARD, 1, 2]


def test_pauli_matrices():
    assert pauli_x(2).entries == ((0, 1), (1, 0))
    z = pauli_z(3)
    assert [z[k, k] for k in range(3)] == [1, w(3, 1), w(3, 2)]
    assert pauli_x(5).power(5).is_identity()
    assert pauli_z(5).power(5).is_identity()
    with pytest.raises(InvalidDimension):
        pauli_x(4)


def test_pauli_word_example():
    word = pauli_word(3, 1, 1, 2)
    assert word.phase == w(3, 1)
    assert (word.x_power, word.z_power) == (2, 2)
    assert word.holds()


def test_pauli_word_first_power_and_order():
    word = pauli_word(5, 2, 3, 1)
    assert word.phase == 1
    assert word.op == pauli_x(5).power(2) @ pauli_z(5).power(3)
    assert pauli_word(5, 2, 3, 5).op.is_identity()


def test_pauli_word_d2_sign():
    assert pauli_word(2, 1, 1, 2).op == identity(2).scale(-1)
    assert pauli_word(2, 1, 1, 2).holds()


@pytest.mark.parametrize("d", [2, 3, 5])
def test_pauli_identity_sweep(d):
    for a in range(d):
        for b in range(d):
            for n in range(d + 1):
                assert pauli_word(d, b, a, n).holds()


def test_pauli_word_rejects_negative_power():
    with pytest.raises(IndexOutOfRange):
        pauli_word(3, 1, 1, -1)


def test_choi_examples():
    norm = inv_sqrt_d(3)
    psi = choi(identity(3))
    assert [psi[m, n] == (norm if m == n else 0) for m in range(3) for n in range(3)] == [True] * 9
    psi = choi(pauli_x(3))
    nonzero = [(m, n) for m in range(3) for n in range(3) if psi[m, n]]
    assert nonzero == [(0, 1), (1, 2), (2, 0)]
    assert psi.norm_squared() == 1


def test_choi_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        choi(to_dense(g_map(mub_state(3, 0, 0))))


@pytest.mark.parametrize("d", [3, 5, 7])
def test_choi_is_inner_product_covariant(d):
    ops = [to_dense(m) for basis in muub_family(d) for m in basis.ops]
    states = [choi(op) for op in ops]
    for a, u in zip(ops, states):
        for b, v in zip(ops, states):
            assert u.inner(v) * d == hs_inner_dense(a, b)


def test_bell_state_examples():
    norm = inv_sqrt_d(2, allow_two=True)
    assert bell_state(2, 0, 0).amps == (norm, 0, 0, norm)
    psi = bell_state(3, 1, 1)
    norm = inv_sqrt_d(3)
    assert psi[0, 1] == norm
    assert psi[1, 2] == w(3, 1) * norm
    assert psi[2, 0] == w(3, 2) * norm
    assert sum(1 for x in psi.amps if x) == 3


@pytest.mark.parametrize("d", [2, 3])
def test_bell_state_is_choi_of_pauli_word(d):
    for a in range(d):
        for b in range(d):
            assert bell_state(d, a, b) == choi(pauli_word(d, b, a, 1).op)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_bell_basis_orthonormal_and_maximally_entangled(d):
    states = bell_basis(d)
    assert len(states) == d * d
    for i, u in enumerate(states):
        assert is_mes(u)
        for j, v in enumerate(states):
            assert u.inner(v) == (1 if i == j else 0)


def test_product_state_is_not_mes():
    amps = [one(3)] + [zero(3)] * 8
    assert not is_mes(BipartiteKet(3, amps))


def test_word_family_rejects_identity_word():
    with pytest.raises(DegenerateFamily):
        word_family(3, 0, 0)
    with pytest.raises(DegenerateFamily):
        mes_mub_state(3, 1, 0, 0, 0)
    assert len(word_family(5, 1, 1)) == 5


def test_mes_state_for_shift_family_is_choi_of_muub():
    for r in (1, 2):
        for s in range(3):
            assert mes_mub_state(3, r, s, 0, 1) == choi(to_dense(muub_element(3, r, s)))


def test_mes_states_are_normalised_d5():
    for r in range(1, 5):
        for s in range(5):
            assert mes_mub_state(5, r, s, 1, 1).norm_squared() == 1


@pytest.mark.parametrize("d", [3, 5, 7])
@pytest.mark.parametrize("a,b", [(0, 1), (1, 0), (1, 1)])
def test_mes_bases_are_mutually_unbiased(d, a, b):
    bases = [mes_mub_basis(d, r, a, b) for r in range(1, d)]
    for basis in bases:
        assert all(is_mes(psi) for psi in basis)
    for i in range(len(bases)):
        for j in range(i + 1, len(bases)):
            for u in bases[i]:
                for v in bases[j]:
                    assert u.inner(v).abs_squared() == Fraction(1, d)


def test_mes_state_rejects_r_zero_and_d2():
    with pytest.raises(IndexOutOfRange):
        mes_mub_state(3, 0, 0, 1, 1)
    with pytest.raises(InvalidDimension):
        mes_mub_state(2, 1, 0, 1, 1)


def test_subspace_coordinates_recover_the_mub_state():
    psi = mes_mub_state(5, 2, 3, 1, 1)
    assert subspace_coordinates(psi, 1, 1) == mub_state(5, 2, 3)


def test_partial_trace_of_bell_projector():
    rho = projector(bell_state(3, 1, 1))
    mixed = identity(3).scale(Fraction(1, 3))
    assert rho.is_hermitian()
    assert rho.trace() == 1
    for side in (1, 2):
        reduced = partial_trace(rho, side)
        assert reduced == mixed
        assert reduced.trace() == 1


def test_partial_trace_of_product_state():
    amps = [one(3)] + [zero(3)] * 8
    reduced = partial_trace(projector(BipartiteKet(3, amps)), 1)
    assert reduced == projector(basis_ket(3, 0))
    with pytest.raises(IndexOutOfRange):
        partial_trace(projector(BipartiteKet(3, amps)), 3)
    with pytest.raises(DimensionMismatch):
        partial_trace(identity(3), 1)


def test_reduced_state_matches_partial_trace():
    psi = mes_mub_state(3, 2, 1, 1, 0)
    for side in (1, 2):
        assert reduced_state(psi, side) == partial_trace(projector(psi), side)


def test_traceless_orthogonality_values():
    a = projector(mub_state(3, 1, 0))
    b = projector(mub_state(3, 2, 1))
    c = projector(mub_state(3, 1, 1))
    assert traceless_orthogonality(a, b) == 0
    assert traceless_orthogonality(a, c) == Fraction(-1, 3)
    assert traceless_orthogonality(a, a) == Fraction(2, 3)


def test_traceless_orthogonality_in_subspace_coordinates():
    u = subspace_coordinates(mes_mub_state(5, 1, 0, 1, 1), 1, 1)
    v = subspace_coordinates(mes_mub_state(5, 3, 2, 1, 1), 1, 1)
    assert traceless_orthogonality(projector(u), projector(v)) == 0
    with pytest.raises(DimensionMismatch):
        traceless_orthogonality(projector(u), projector(mub_state(3, 1, 0)))


def test_oracle_alpha_matches_exact():
    for d in (3, 5, 7, 11):
        for a in range(d):
            assert FloatOracle.alpha(d, a) == alpha(d, a)


def test_oracle_agrees_with_exact_states():
    oracle = FloatOracle()
    for r in range(5):
        for s in range(5):
            dev = oracle.deviation(mub_state(5, r, s).amps, oracle.mub_state(5, r, s))
            assert oracle.agrees(dev)
    dev = oracle.deviation(mes_mub_state(3, 1, 2, 1, 1).amps, oracle.mes_mub_state(3, 1, 2, 1, 1))
    assert oracle.agrees(dev)
    assert oracle.is_mes(oracle.bell_state(3, 1, 2), 3)


def test_oracle_muub_overlaps():
    oracle = FloatOracle()
    family = oracle.muub_family(5)
    values = [oracle.hs_overlap_squared(x, y) for x in family[1] for y in family[3]]
    assert np.allclose(values, 5, atol=1e-10)


def test_selftest_passes_small():
    report = run_selftest(max_d=5, samples=4)
    assert report.primes == [3, 5]
    assert report.passed, report.failed_suites


def test_selftest_sweeps_every_prime_up_to_13():
    report = run_selftest(max_d=13, only=("cyclo_field", "mub", "coefficient_formula", "scaling_bijection"))
    assert report.primes == [3, 5, 7, 11, 13]
    assert report.passed, report.failed_suites
    assert report.suites[0].checks == 6 * 200 * 5


def test_selftest_filters_primes():
    report = run_selftest(max_d=4, samples=2, only=("mub", "scaling_bijection"))
    assert report.primes == [3]
    assert [s.name for s in report.suites] == ["mub", "scaling_bijection"]


def test_selftest_detects_injected_fault():
    assert faulty_mub_state(3, 1, 0) != mub_state(3, 1, 0)
    assert faulty_mub_state(3, 2, 0) == mub_state(3, 2, 0)
    report = run_selftest(max_d=3, samples=2, inject_fault=True,
                          only=("mub", "muub_family", "scaling_bijection"))
    assert not report.passed
    assert report.failed_suites == ["mub", "muub_family"]


def test_run_config_round_trip():
    config = RunConfig(command="verify", d=5, mode=Mode.FLOAT, output_format=OutputFormat.CSV)
    data = config.to_dict()
    assert data["mode"] == "float"
    assert "inject_fault" not in data and "extra" not in data
    assert RunConfig.from_dict(data) == config


def test_load_settings_reads_environment(monkeypatch):
    monkeypatch.setenv("MUUB_SEED", "7")
    monkeypatch.setenv("MUUB_WORKERS", "0")
    monkeypatch.setenv("MUUB_NO_COLOR", "1")
    monkeypatch.setenv("MUUB_SAMPLES", "not-a-number")
    s = load_settings()
    assert s.seed == 7
    assert s.workers == 1
    assert s.no_color
    assert s.samples == 200


def test_repeat_until_finish():
    calls = []

    def flaky():
        calls.append(1)
        if len(calls) < 3:
            raise OSError("busy")
        return "done"

    assert repeat_until_finish(flaky, delay=0) == "done"
    assert len(calls) == 3

    def broken():
        raise OSError("disk full")

    with pytest.raises(OutputError) as excinfo:
        repeat_until_finish(broken, max_retries=2, delay=0)
    assert excinfo.value.exit_code == 5


def test_configure_logging_writes_file(tmp_path):
    logger = configure_logging(str(tmp_path), "DEBUG")
    logging.getLogger("utils.tests").debug("hello log")
    for handler in logger.handlers:
        handler.flush()
    assert "hello log" in (tmp_path / "muubkit.log").read_text()


@pytest.fixture
def cli_env(monkeypatch, tmp_path):
    monkeypatch.setenv("MUUB_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setenv("MUUB_NO_COLOR", "1")
    return tmp_path


def run_json(capsys, argv):
    code = cliutils.main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def test_cli_mub_all(cli_env, capsys):
    code, doc = run_json(capsys, ["mub", "--d", "3", "--all"])
    assert code == 0
    assert doc["tool"] == "muub-kit"
    assert doc["config"]["d"] == 3
    bases = doc["result"]["bases"]
    assert len(bases) == 4
    assert sum(len(b["states"]) for b in bases) == 12


def test_cli_mub_single_state(cli_env, capsys):
    code, doc = run_json(capsys, ["mub", "--d", "3", "--r", "1", "--s", "0"])
    assert code == 0
    amps = [CycloScalar.from_dict(x) for x in doc["result"]["state"]["amps"]]
    assert tuple(amps) == mub_state(3, 1, 0).amps


def test_cli_exit_codes(cli_env, capsys):
    assert cliutils.main(["mub", "--d", "9"]) == 2
    assert cliutils.main(["muub", "--d", "3", "--r", "0"]) == 2
    assert cliutils.main(["mub"]) == 2
    assert cliutils.main(["mes", "--d", "3", "--a", "0", "--b", "0", "--r", "1", "--s", "0"]) == 3
    assert cliutils.main(["mub", "--d", "3", "--s", "1"]) == 2
    assert cliutils.main(["muub", "--d", "3", "--s", "1"]) == 2
    capsys.readouterr()


def test_cli_verify_d3(cli_env, capsys):
    code, doc = run_json(capsys, ["verify", "--d", "3"])
    assert code == 0
    result = doc["result"]
    assert result["verdict"] == "pass"
    assert len(result["bases"]) == 3
    assert all(cell == [3, 1] for pair in result["pairs"] for cell in pair["values"])
    assert result["counterexample"]["dense_check"] is False
    assert result["r0_extension"]["admitted"] is False


def test_cli_verify_float(cli_env, capsys):
    code, doc = run_json(capsys, ["verify", "--d", "5", "--mode", "float"])
    assert code == 0
    assert doc["result"]["max_deviation"] < 1e-10


def test_cli_output_is_deterministic(cli_env, capsys):
    cliutils.main(["verify", "--d", "3"])
    first = capsys.readouterr().out
    cliutils.main(["verify", "--d", "3"])
    assert capsys.readouterr().out == first
    assert first.endswith("}\n")


def test_cli_bell_and_mes(cli_env, capsys):
    code, doc = run_json(capsys, ["bell", "--d", "2", "--a", "0", "--b", "0"])
    assert code == 0
    assert doc["result"]["is_mes"] is True
    assert doc["result"]["equals_choi"] is True

    code, doc = run_json(capsys, ["mes", "--d", "3", "--a", "1", "--b", "1", "--r", "1", "--s", "0"])
    assert code == 0
    assert doc["result"]["is_mes"] is True
    assert doc["result"]["overlaps"] == [{"r": 2, "values": [[1, 3]] * 3}]


def test_cli_pauli(cli_env, capsys):
    code, doc = run_json(capsys, ["pauli", "--d", "3", "--b", "1", "--a", "1", "--n", "2"])
    assert code == 0
    assert doc["result"]["holds"] is True
    assert doc["result"]["word"] == {"x_power": 2, "z_power": 2}


def test_cli_csv_verify(cli_env, capsys):
    assert cliutils.main(["verify", "--d", "3", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "a,b,i,j,value"
    assert len(lines) == 1 + 3 * 9
    assert all(line.endswith(",3") for line in lines[1:])


def test_cli_pretty_without_color(cli_env, capsys):
    assert cliutils.main(["bell", "--d", "3", "--a", "1", "--b", "1", "--format", "pretty"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("muub-kit 0.1.0 :: bell")
    assert "\033[" not in out


def test_cli_writes_out_file(cli_env, capsys):
    target = cli_env / "mub.json"
    assert cliutils.main(["mub", "--d", "5", "--r", "2", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(target.read_text())
    assert len(doc["result"]["bases"][0]["states"]) == 5


def test_cli_selftest_with_fault(cli_env, capsys):
    assert cliutils.main(["selftest", "--max-d", "3", "--samples", "2"]) == 0
    captured = capsys.readouterr()
    assert "mub: ok" in captured.err
    assert cliutils.main(["selftest", "--max-d", "3", "--samples", "2", "--inject-fault"]) == 4
    captured = capsys.readouterr()
    assert "mub: FAILED" in captured.err
    assert "mub" in json.loads(captured.out)["result"]["failed_suites"]
