from fractions import Fraction

import mpmath
import pytest

from exact_arith import (ContractViolation, CycNumber, DirichletCharacter, InvalidDiscriminantError,
                         ParityError, TranscendentalLedger, bernoulli_number, characters_mod,
                         factor_character, fundamental_discriminant, gamma_half_integer, gauss_sum,
                         jacobi_sum, kronecker_character, kronecker_symbol, l_value_nonpositive,
                         l_value_positive, residue_split_sum, sqrt_cyclotomic)


def zeta(M, j=1):
    return CycNumber.root_of_unity(M, j)


class TestCycNumber:
    def test_roots_of_unity_relations(self):
        assert zeta(3) + zeta(3, 2) == -1
        assert zeta(4) ** 2 == -1
        assert zeta(5) ** 5 == 1

    def test_mixed_conductors(self):
        # i·ζ_3 lives in Q(ζ_12)
        product = zeta(4) * zeta(3)
        assert product.conductor == 12
        assert product == zeta(12, 7)

    def test_inverse(self):
        x = zeta(5) + 1
        assert x * x.inverse() == 1
        assert (CycNumber.rational(3) / 4).rational_value() == Fraction(3, 4)
        with pytest.raises(ZeroDivisionError):
            CycNumber.zero().inverse()

    def test_galois_and_conjugation(self):
        assert zeta(4).conjugate() == -zeta(4)
        assert zeta(5).galois(2) == zeta(5, 2)
        with pytest.raises(ContractViolation):
            zeta(6).galois(3)

    def test_canonical_conductor(self):
        assert zeta(6, 2).canonical().conductor == 3
        assert zeta(2).canonical().conductor == 1
        assert (zeta(8) + zeta(8, 7)).canonical().conductor == 8

    def test_lies_in(self):
        root2 = sqrt_cyclotomic(2)
        assert root2.lies_in(8)
        assert not root2.lies_in(4)
        assert zeta(12, 4).lies_in(3)

    def test_sqrt(self):
        for r in (2, 3, 5, 6, 7, 15):
            assert sqrt_cyclotomic(r) ** 2 == r
        with pytest.raises(ValueError):
            sqrt_cyclotomic(12)

    def test_json(self):
        x = zeta(3) * Fraction(2, 7) - 1
        data = x.as_json()
        assert data["conductor"] == 3
        assert CycNumber.from_json(data) == x

    def test_numeric_value(self):
        assert abs(zeta(8).to_mpc() - mpmath.expjpi(mpmath.mpf(1) / 4)) < 1e-12


class TestCharacters:
    def test_counts_and_orders(self):
        assert len(characters_mod(5)) == 4
        assert sorted(chi.order for chi in characters_mod(5)) == [1, 2, 4, 4]
        assert len(characters_mod(8)) == 4
        assert len(characters_mod(1)) == 1

    def test_label_round_trip(self):
        chi = DirichletCharacter.from_label("5:[1]")
        assert chi.label == "5:[1]"
        assert chi.order == 4
        with pytest.raises(ValueError):
            DirichletCharacter.from_label("five")

    def test_kronecker_character(self):
        chi = kronecker_character(-4)
        assert chi.modulus == 4
        assert chi.parity == 1
        assert chi.evaluate(3) == -1
        assert chi.evaluate(2) == 0
        assert chi.is_primitive()

    def test_conductor_and_primitive_part(self):
        trivial = DirichletCharacter.trivial(4)
        assert trivial.conductor == 1
        assert not trivial.is_primitive()
        chi = kronecker_character(-3).extend(6)
        assert chi.conductor == 3
        assert chi.primitive_part() == kronecker_character(-3)

    def test_multiplication_across_moduli(self):
        product = kronecker_character(-4) * kronecker_character(-3)
        assert product.modulus == 12
        assert product.evaluate(5) == kronecker_symbol(12, 5)

    def test_factor_character(self):
        chi = kronecker_character(-4) * kronecker_character(5)
        first, second = factor_character(chi, 4, 5)
        assert first == kronecker_character(-4)
        assert second == kronecker_character(5)

    def test_galois_of_character(self):
        chi = DirichletCharacter.from_label("5:[1]")
        assert chi.galois(3) == chi.conjugate()
        assert chi.galois(3).evaluate(2) == chi.evaluate(2).galois(3)


class TestGaussSums:
    def test_quadratic_gauss_sum(self):
        assert gauss_sum(kronecker_character(-4)) == 2 * zeta(4)
        assert gauss_sum(kronecker_character(5)) ** 2 == 5

    def test_norm_relation(self):
        for q in (3, 4, 5, 7, 8):
            for chi in characters_mod(q):
                if chi.is_primitive():
                    assert chi.evaluate(-1) * gauss_sum(chi) * gauss_sum(chi.conjugate()) == q

    def test_jacobi_sum(self):
        odd = kronecker_character(-3)
        assert jacobi_sum(odd, odd) == 1

    def test_square_relation(self):
        chi = DirichletCharacter.from_label("5:[1]")
        # χ² is the quadratic character mod 5, still primitive
        assert gauss_sum(chi ** 2) * jacobi_sum(chi, chi) == gauss_sum(chi) ** 2

    def test_multiplicativity(self):
        chi1, chi2 = kronecker_character(-4), DirichletCharacter.from_label("5:[1]")
        lhs = gauss_sum(chi1 * chi2)
        rhs = chi1.evaluate(5) * chi2.evaluate(4) * gauss_sum(chi1) * gauss_sum(chi2)
        assert lhs == rhs

    def test_residue_split_sum(self):
        assert residue_split_sum(12, lambda n: CycNumber.rational(n * n)) == 196


class TestQuadratic:
    def test_kronecker_symbol(self):
        assert kronecker_symbol(2, 7) == 1
        assert kronecker_symbol(-1, 3) == -1
        assert kronecker_symbol(5, 8) == -1
        assert kronecker_symbol(4, 6) == 0

    def test_fundamental_discriminant(self):
        assert fundamental_discriminant(45) == 5
        assert fundamental_discriminant(-4) == -4
        assert fundamental_discriminant(12) == 12
        assert fundamental_discriminant(-16) == -4
        assert fundamental_discriminant(36) == 1
        with pytest.raises(InvalidDiscriminantError):
            fundamental_discriminant(3)


class TestLValues:
    def test_bernoulli(self):
        assert bernoulli_number(1) == Fraction(-1, 2)
        assert bernoulli_number(2) == Fraction(1, 6)
        assert bernoulli_number(4) == Fraction(-1, 30)
        assert bernoulli_number(12) == Fraction(-691, 2730)

    def test_gamma_half_integer(self):
        assert gamma_half_integer(Fraction(5, 2)) == (Fraction(3, 4), 1)
        assert gamma_half_integer(Fraction(1, 2)) == (Fraction(1), 1)
        assert gamma_half_integer(Fraction(-1, 2)) == (Fraction(-2), 1)
        assert gamma_half_integer(4) == (Fraction(6), 0)
        with pytest.raises(ValueError):
            gamma_half_integer(0)

    def test_nonpositive_values(self):
        assert l_value_nonpositive(kronecker_character(-4), 1) == Fraction(1, 2)
        assert l_value_nonpositive(DirichletCharacter.trivial(), 2) == Fraction(-1, 12)
        with pytest.raises(ParityError):
            l_value_nonpositive(kronecker_character(-4), 2)

    def test_zeta_four(self):
        ledger = l_value_positive(DirichletCharacter.trivial(), 4)
        assert ledger.value == Fraction(1, 90)
        assert ledger.pi_exp == 4

    def test_imprimitive_euler_factor(self):
        ledger = l_value_positive(DirichletCharacter.trivial(2), 2)
        assert ledger.value == Fraction(1, 8)
        assert ledger.pi_exp == 2

    def test_odd_character_at_one(self):
        ledger = l_value_positive(kronecker_character(-4), 1)
        assert ledger.value == Fraction(1, 4)
        assert ledger.pi_exp == 1
        assert ledger.radicand == 1

    def test_functional_equation_gamma_factor(self):
        ledger = l_value_positive(kronecker_character(-3), 3)
        expected = 4 * mpmath.pi ** 3 / (81 * mpmath.sqrt(3))
        assert abs(ledger.to_mpc() - expected) < 1e-12

    def test_complex_character(self):
        chi = DirichletCharacter.from_label("5:[1]")
        ledger = l_value_positive(chi, 1)
        values = [complex(chi.evaluate(a).to_mpc()) for a in range(5)]
        partial = sum(values[n % 5] / n for n in range(1, 50001))
        assert abs(complex(ledger.to_mpc()) - partial) < 1e-3
        with pytest.raises(ParityError):
            l_value_positive(chi, 2)


class TestLedger:
    def test_square_part_moves_into_value(self):
        ledger = TranscendentalLedger(1, radicand=12)
        assert ledger.radicand == 3
        assert ledger.value == 2

    def test_sqrt_of_fraction(self):
        ledger = TranscendentalLedger.sqrt_of(Fraction(1, 2))
        assert abs(ledger.to_mpc() - mpmath.sqrt(0.5)) < 1e-12

    def test_absorb(self):
        ledger = TranscendentalLedger(1, 0, 1, 2).absorb_algebraic()
        assert ledger.value == zeta(4) * sqrt_cyclotomic(2)
        assert ledger.absorbed_conductor() == 8

    def test_inverse(self):
        ledger = TranscendentalLedger(3, 2, 1, 5)
        product = ledger * ledger.inverse()
        assert product.value == 1
        assert product.pi_exp == 0 and product.i_exp == 0 and product.radicand == 1
