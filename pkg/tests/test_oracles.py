from fractions import Fraction

import mpmath
import pytest

from eisenstein_engine import EisensteinSpec, coefficient, coprime_g_sum
from exact_arith import ContractViolation, CycNumber, DirichletCharacter, characters_mod, kronecker_character
from lattice_core import Lattice, build_discriminant_form
from oracles import (BudgetExceededError, NumericValue, brute_G, brute_rep_count, divisor_sum_reference,
                     individual_weights, numeric_l_value, ramanujan_sum, series_coefficient_numeric,
                     symmetrised_weights)


def odd_character(q):
    return next(chi for chi in characters_mod(q) if chi.parity == 1)


class TestNumericValue:
    def test_error_propagation(self):
        a = NumericValue(2, 0.01)
        b = NumericValue(3, 0.01)
        assert (a + b).error == a.error + b.error
        assert (a * b).close_to(6, abs_tol=0.06)
        assert not NumericValue(1).close_to(1.1)
        assert NumericValue(1, 0.2).close_to(1.1)

    def test_division_by_interval_containing_zero(self):
        with pytest.raises(ZeroDivisionError):
            NumericValue(1) / NumericValue(0, 1)

    def test_from_cyclotomic(self):
        value = NumericValue.of(CycNumber.root_of_unity(4, 1))
        assert abs(value.value - mpmath.mpc(0, 1)) < 1e-12
        assert value.as_json()["provable"] is True


class TestCounts:
    def test_rep_count(self, rank_one):
        assert brute_rep_count(rank_one, [0], 1, 5) == 2
        assert brute_rep_count(rank_one, [0], 1, 3) == 0
        assert brute_rep_count(rank_one, [Fraction(1, 2)], Fraction(3, 4), 1) == 1

    def test_budget(self, hyperbolic_three):
        with pytest.raises(BudgetExceededError):
            brute_rep_count(hyperbolic_three, [0, 0], 1, 1000, budget=10 ** 4)

    def test_ramanujan_sum(self):
        assert ramanujan_sum(4, 2) == ramanujan_sum(4, 2, method="mobius") == -2
        for c in range(1, 13):
            for n in range(0, 13):
                assert ramanujan_sum(c, n) == ramanujan_sum(c, n, method="mobius")
        with pytest.raises(ValueError):
            ramanujan_sum(4, 2, method="fourier")

    def test_individual_weights(self):
        assert individual_weights(3, 5) == {1: Fraction(1, 2), 2: Fraction(-1, 2)}
        assert individual_weights(1, 4) == {0: Fraction(1)}
        assert individual_weights(2, 4) == {1: Fraction(1)}

    def test_divisor_sums(self):
        assert divisor_sum_reference(4, 1) == 480
        assert divisor_sum_reference(4, 2) == 4320
        assert divisor_sum_reference(6, 2) == -33264
        with pytest.raises(ContractViolation):
            divisor_sum_reference(5, 1)


class TestGSums:
    def test_c_equal_one(self, hyperbolic_three):
        form = build_discriminant_form(hyperbolic_three)
        gamma, beta = form.element((0, 1)), form.element((1, 0))
        chi = odd_character(3)
        zeta3 = CycNumber.root_of_unity(3, 1)
        value = brute_G(form, gamma, 1, 1, beta, chi=chi)
        assert value == zeta3 ** 2 - zeta3
        assert value == coprime_g_sum(form, gamma, 1, 1, beta, chi)

    @pytest.mark.parametrize("c", [2, 4, 5])
    def test_closed_form_coprime(self, hyperbolic_three, c):
        form = build_discriminant_form(hyperbolic_three)
        gamma, beta = form.element((0, 1)), form.element((1, 0))
        chi = odd_character(3)
        assert brute_G(form, gamma, 1, c, beta, chi=chi) == coprime_g_sum(form, gamma, 1, c, beta, chi)

    def test_numeric_variant_matches_exact(self, hyperbolic_three):
        form = build_discriminant_form(hyperbolic_three)
        gamma, beta = form.element((1, 1)), form.element((1, 0))
        n = (-form.q_value(gamma)) % 1 or Fraction(1)
        chi = odd_character(3)
        exact = brute_G(form, gamma, n, 6, beta, chi=chi)
        numeric = brute_G(form, gamma, n, 6, beta, chi=chi, exact=False)
        assert numeric.close_to(exact)

    def test_weights_replace_character(self, hyperbolic_three):
        form = build_discriminant_form(hyperbolic_three)
        gamma, beta = form.element((0, 1)), form.element((1, 0))
        chi = odd_character(3)
        by_character = brute_G(form, gamma, 1, 4, beta, chi=chi)
        by_weights = brute_G(form, gamma, 1, 4, beta, weights={1: 1, 2: -1})
        assert by_character == by_weights

    def test_precision_bits(self, hyperbolic_three):
        form = build_discriminant_form(hyperbolic_three)
        gamma, beta = form.element((0, 1)), form.element((1, 0))
        chi = odd_character(3)
        exact = brute_G(form, gamma, 1, 7, beta, chi=chi)
        coarse = brute_G(form, gamma, 1, 7, beta, chi=chi, exact=False, precision_bits=53)
        fine = brute_G(form, gamma, 1, 7, beta, chi=chi, exact=False, precision_bits=200)
        assert fine.error < mpmath.mpf(2) ** -150 < coarse.error
        with mpmath.workprec(200):
            assert fine.close_to(exact)

    def test_budget(self, hyperbolic_three):
        form = build_discriminant_form(hyperbolic_three)
        with pytest.raises(BudgetExceededError):
            brute_G(form, form.zero(), 1, 200, form.element((1, 0)), budget=1000)


class TestSeriesOracle:
    def test_classical_eisenstein(self, trivial_lattice):
        form = build_discriminant_form(trivial_lattice)
        value = series_coefficient_numeric(trivial_lattice, form, form.zero(), 4, form.zero(), 1, c_max=50)
        assert value.provable
        assert value.error < 1
        assert value.close_to(480)

    def test_rank_one(self, rank_one):
        form = build_discriminant_form(rank_one)
        value = series_coefficient_numeric(rank_one, form, form.zero(), Fraction(7, 2), form.zero(), 1,
                                           c_max=60)
        assert value.error < 10
        assert value.close_to(252)

    def test_parity_mismatch_is_zero(self, hyperbolic_three):
        form = build_discriminant_form(hyperbolic_three)
        beta = form.element((1, 0))
        value = series_coefficient_numeric(hyperbolic_three, form, beta, 5, form.zero(), 1, c_max=10,
                                           chi=DirichletCharacter.trivial(3))
        assert value.is_zero()

    def test_matching_parity_agrees_with_closed_form(self, hyperbolic_three):
        form = build_discriminant_form(hyperbolic_three)
        beta = form.element((1, 0))
        chi = odd_character(3)
        value = series_coefficient_numeric(hyperbolic_three, form, beta, 5, form.zero(), 1, c_max=40, chi=chi)
        exact = coefficient(EisensteinSpec(hyperbolic_three, beta, 5, chi, form), form.zero(), 1, "exact")
        assert value.provable
        assert value.close_to(exact, rel_tol=1e-6)

    @pytest.mark.parametrize("gram, coords, weight, modulus", [
        ([[2, 0], [0, -2]], (1, 1), 5, 2),
        ([[2]], (0,), Fraction(9, 2), 1),
    ])
    def test_even_character_at_odd_kappa(self, gram, coords, weight, modulus):
        lattice = Lattice(gram)
        form = build_discriminant_form(lattice)
        value = series_coefficient_numeric(lattice, form, form.element(coords), weight, form.zero(), 1, c_max=8,
                                           chi=DirichletCharacter.trivial(modulus))
        assert value.is_zero()

    def test_heuristic_tail_without_majorant(self, hyperbolic_three):
        form = build_discriminant_form(hyperbolic_three)
        beta = form.element((1, 0))
        value = series_coefficient_numeric(hyperbolic_three, form, beta, 3, form.zero(), 1, c_max=20,
                                           chi=odd_character(3))
        assert not value.provable
        assert 0 < value.error < mpmath.inf

    def test_weights_are_symmetrised(self):
        assert symmetrised_weights({1: 1}, 3, 5) == individual_weights(3, 5)
        assert symmetrised_weights(individual_weights(5, 4), 5, 4) == individual_weights(5, 4)
        assert symmetrised_weights({1: 1, 2: 1}, 3, 5) == {}
        assert symmetrised_weights({0: 1}, 1, 5) == {}

    def test_needs_positive_index(self, rank_one):
        form = build_discriminant_form(rank_one)
        with pytest.raises(ContractViolation):
            series_coefficient_numeric(rank_one, form, form.zero(), Fraction(7, 2), form.zero(), 0, c_max=5)


class TestNumericLValues:
    def test_catalan_style_values(self):
        assert numeric_l_value(kronecker_character(-4), 1).close_to(mpmath.pi / 4, abs_tol=1e-12)
        assert numeric_l_value(kronecker_character(-3), 3).close_to(
            4 * mpmath.pi ** 3 / (81 * mpmath.sqrt(3)), abs_tol=1e-12)

    def test_zeta(self):
        trivial = characters_mod(1)[0]
        assert numeric_l_value(trivial, 2).close_to(mpmath.pi ** 2 / 6, abs_tol=1e-12)
        with pytest.raises(ContractViolation):
            numeric_l_value(trivial, 1)
