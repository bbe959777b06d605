from fractions import Fraction

import pytest

from eisenstein_engine import EisensteinSpec, FourierTable, fourier_table, table_indices
from exact_arith import ContractViolation, CycNumber, DirichletCharacter, characters_mod
from hecke import (DepthError, admissible_primes, descriptor, eigenvalue, hecke_act, legendre_of_rational,
                   middle_factor, verify_eigenform, verify_untwisted_relation)
from lattice_core import build_discriminant_form


class TestDescriptors:
    def test_admissible_primes(self, rank_one, hyperbolic_three):
        assert [h.p for h in admissible_primes(rank_one)] == [3, 5]
        assert admissible_primes(rank_one)[0].label == "T(3^2)"
        found = admissible_primes(hyperbolic_three)
        assert [h.p for h in found] == [7, 13]
        assert found[0].label == "T_1(7)"

    def test_two_in_even_rank(self, trivial_lattice):
        assert [h.p for h in admissible_primes(trivial_lattice)] == [2, 3]
        h = descriptor(trivial_lattice, 2)
        assert h.label == "T_1(2)" and h.r == 1

    def test_rejections(self, rank_one, hyperbolic_three):
        with pytest.raises(ContractViolation):
            descriptor(hyperbolic_three, 5)
        with pytest.raises(ContractViolation):
            descriptor(rank_one, 2)
        with pytest.raises(ContractViolation, match="not a square"):
            descriptor(hyperbolic_three, 2)
        with pytest.raises(ContractViolation):
            descriptor(hyperbolic_three, 7, 3)
        assert descriptor(hyperbolic_three, 7, 2).r == 2

    def test_legendre_of_rational(self):
        assert legendre_of_rational(Fraction(3, 4), 5) == -1
        assert legendre_of_rational(Fraction(-1), 3) == -1
        assert legendre_of_rational(Fraction(6), 3) == 0
        with pytest.raises(ContractViolation):
            legendre_of_rational(Fraction(1, 5), 5)


class TestEigenvalues:
    def test_values(self, rank_one, trivial_lattice):
        trivial = DirichletCharacter.trivial()
        assert eigenvalue(trivial, descriptor(rank_one, 3), Fraction(7, 2)) == 244
        assert eigenvalue(trivial, descriptor(trivial_lattice, 5), 4) == 126
        assert eigenvalue(trivial, descriptor(trivial_lattice, 2), 4) == 9

    def test_middle_factor(self, rank_one):
        form = build_discriminant_form(rank_one)
        assert middle_factor(form, 3, Fraction(7, 2), 1) == -9
        assert middle_factor(form, 3, Fraction(7, 2), 3).is_zero()


class TestHeckeAction:
    def test_classical_eigenform(self, trivial_lattice):
        table = fourier_table(EisensteinSpec(trivial_lattice, (), 4), 5)
        h = descriptor(trivial_lattice, 5)
        image = hecke_act(table, h)
        zero = table.form.zero()
        assert image.n_max == 1
        assert image.get(zero, 1) == 126 * 480
        assert verify_eigenform(table, h, 126) == (True, 0.0)

    def test_classical_eigenform_at_two(self, trivial_lattice):
        table = fourier_table(EisensteinSpec(trivial_lattice, (), 4), 2)
        h = descriptor(trivial_lattice, 2)
        image = hecke_act(table, h)
        zero = table.form.zero()
        assert image.get(zero, 0) == 18
        assert image.get(zero, 1) == 4320
        assert verify_eigenform(table, h, 9) == (True, 0.0)

    def test_rank_one_eigenform(self, rank_one):
        table = fourier_table(EisensteinSpec(rank_one, (0,), Fraction(7, 2)), 9)
        h = descriptor(rank_one, 3)
        image = hecke_act(table, h)
        assert image.get(table.form.zero(), 1) == 63756 - 9 * 252
        assert image.get(table.form.zero(), 0) == 488
        ok, deviation = verify_eigenform(table, h, 244)
        assert ok and deviation == 0.0
        assert not verify_eigenform(table, h, 243)[0]

    def test_depth_error(self, trivial_lattice):
        table = fourier_table(EisensteinSpec(trivial_lattice, (), 4), 3)
        with pytest.raises(DepthError):
            hecke_act(table, descriptor(trivial_lattice, 5), 1)

    def test_untwisted_relation(self, trivial_lattice):
        h = descriptor(trivial_lattice, 5)
        ok, _ = verify_untwisted_relation(trivial_lattice, (), 4, h, 1)
        assert ok


@pytest.mark.slow
class TestHyperbolicPlane:
    def odd(self):
        return next(chi for chi in characters_mod(3) if chi.parity == 1)

    def test_twisted_eigenforms(self, hyperbolic_three):
        chi = self.odd()
        table = fourier_table(EisensteinSpec(hyperbolic_three, (1, 0), 5, chi), 7)
        for r, lam in ((1, 2402), (2, -2402)):
            h = descriptor(hyperbolic_three, 7, r)
            assert eigenvalue(chi, h, 5) == lam
            assert verify_eigenform(table, h, lam)[0]

    def test_untwisted_relation_moves_beta(self, hyperbolic_three):
        beta = build_discriminant_form(hyperbolic_three).element((1, 0))
        ok, _ = verify_untwisted_relation(hyperbolic_three, beta, 5, descriptor(hyperbolic_three, 7, 2), 1)
        assert ok


class TestLinearity:
    def synthetic(self, form, weight, depth, seed):
        entries = {(g, Fraction(0)): CycNumber.rational(seed) for g in form.isotropic_elements()}
        for i, (gamma, n) in enumerate(table_indices(form, depth)):
            entries[(gamma, n)] = CycNumber.rational((seed * i * i + 1) % 17 - 8)
        return FourierTable(form, weight, depth, entries, label=f"t{seed}")

    @pytest.mark.parametrize("fixture, weight, p", [
        ("trivial_lattice", 4, 2),
        ("trivial_lattice", 4, 3),
        ("rank_one", Fraction(7, 2), 3),
    ])
    def test_action_is_linear(self, request, fixture, weight, p):
        lattice = request.getfixturevalue(fixture)
        form = build_discriminant_form(lattice)
        h = descriptor(lattice, p)
        depth = p * p if h.odd else p
        a = self.synthetic(form, weight, depth, 3)
        b = self.synthetic(form, weight, depth, 5)
        combined = hecke_act(a + b.scaled(3), h)
        assert combined.equals(hecke_act(a, h) + hecke_act(b, h).scaled(3))
        assert not hecke_act(a, h).is_zero()
