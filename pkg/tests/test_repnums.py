from fractions import Fraction
from math import gcd

import pytest

from exact_arith import ContractViolation, DirichletCharacter
from lattice_core import build_discriminant_form
from oracles import brute_rep_count
from repnums import (LocalPolynomial, counter_for, eval_local, local_exponent, local_polynomial, rep_count,
                     stability_bound, vector_order, w_exponent)

ZERO = [Fraction(0)]


def test_rank_one_counts(rank_one):
    # r² + 1 ≡ 0 (mod a)
    assert rep_count(rank_one, ZERO, 1, 1) == 1
    assert rep_count(rank_one, ZERO, 1, 2) == 1
    assert rep_count(rank_one, ZERO, 1, 5) == 2
    assert rep_count(rank_one, ZERO, 1, 10) == 2
    assert rep_count(rank_one, ZERO, 1, 3) == 0


def test_rank_zero(trivial_lattice):
    assert rep_count(trivial_lattice, [], 12, 4) == 1
    assert rep_count(trivial_lattice, [], 12, 8) == 0


def test_matches_enumeration(corpus):
    for lattice in corpus:
        form = build_discriminant_form(lattice)
        for gamma in form.elements():
            vec = form.lift(gamma)
            n = (-form.q_value(gamma)) % 1 or Fraction(1)
            for a in range(1, 33):
                assert rep_count(lattice, vec, n, a) == brute_rep_count(lattice, vec, n, a), (lattice, gamma, a)


def test_multiplicativity(hyperbolic_three):
    form = build_discriminant_form(hyperbolic_three)
    vec = form.lift(form.element((1, 1)))
    n = (-form.q_value(form.element((1, 1)))) % 1 or Fraction(1)
    for a1 in range(1, 9):
        for a2 in range(1, 9):
            if gcd(a1, a2) == 1:
                whole = brute_rep_count(hyperbolic_three, vec, n, a1 * a2)
                assert whole == (brute_rep_count(hyperbolic_three, vec, n, a1)
                                 * brute_rep_count(hyperbolic_three, vec, n, a2))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_stability_above_bound(split_two, p):
    form = build_discriminant_form(split_two)
    counter = counter_for(split_two)
    for gamma in form.elements():
        vec = form.lift(gamma)
        n = (-form.q_value(gamma)) % 1 or Fraction(1)
        bound = stability_bound(p, form.order_of(gamma), n)
        levels = counter.levels(vec, n, p, bound + 3)
        for alpha in (bound + 1, bound + 2):
            assert levels[alpha + 1] == p * levels[alpha]


def test_stability_shortcut_agrees_with_enumeration(rank_one):
    counter = counter_for(rank_one)
    deep = counter.levels(ZERO, 4, 2, 9)
    for alpha in range(10):
        assert counter.prime_power_count(ZERO, 4, 2, alpha) == deep[alpha]


def test_validation(rank_one):
    with pytest.raises(ContractViolation):
        rep_count(rank_one, ZERO, Fraction(1, 2), 3)
    with pytest.raises(ContractViolation):
        rep_count(rank_one, [Fraction(1, 3)], 1, 3)
    with pytest.raises(ContractViolation):
        rep_count(rank_one, ZERO, 1, 0)


def test_exponents():
    assert stability_bound(5, 1, 1) == 1
    assert stability_bound(2, 2, Fraction(3, 4)) == 1
    assert w_exponent(2, 1, 2, Fraction(3, 4)) == 1
    assert w_exponent(5, 1, 1, 25) == 5
    with pytest.raises(ContractViolation):
        w_exponent(3, 1, 1, 0)
    assert vector_order([Fraction(1, 2), Fraction(1, 3)]) == 6
    assert local_exponent(Fraction(7, 2), 1) == -3
    with pytest.raises(ContractViolation):
        local_exponent(4, 1)


def test_local_polynomial(rank_one):
    poly = local_polynomial(rank_one, ZERO, 1, 5, 1)
    assert poly == LocalPolynomial(5, 1, (Fraction(1), Fraction(1)))
    assert poly(Fraction(1, 125)) == Fraction(126, 125)
    value = eval_local(poly, DirichletCharacter.trivial(), 4, 0)
    assert value == Fraction(126, 125)


def test_local_polynomial_character_twist(rank_one):
    poly = local_polynomial(rank_one, ZERO, 1, 5, 1)
    chi = DirichletCharacter.from_label("5:[1]")
    # χ(5) = 0 kills every non-constant term
    assert eval_local(poly, chi, 4, 0) == 1
