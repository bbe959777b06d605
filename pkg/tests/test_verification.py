from fractions import Fraction

import pytest

from exact_arith import DirichletCharacter, characters_mod
from lattice_core import build_discriminant_form
from verification import (SUITES, PropertyResult, VerifyContext, run_suite, smallest_indices, suite_hecke,
                          suite_repnums, summarize)


def context(lattice, weight, beta_coords, **kwargs):
    form = build_discriminant_form(lattice)
    beta = form.element(beta_coords)
    kwargs.setdefault("characters", characters_mod(form.order_of(beta)))
    return VerifyContext(lattice=lattice, form=form, weight=Fraction(weight), beta=beta, **kwargs)


def failures(results):
    return [r.as_json() for r in results if not r.passed]


class TestHelpers:
    def test_smallest_indices(self, rank_one):
        form = build_discriminant_form(rank_one)
        found = [(g.coords, n) for g, n in smallest_indices(form, 2)]
        assert found == [((0,), Fraction(1)), ((0,), Fraction(2)),
                         ((1,), Fraction(3, 4)), ((1,), Fraction(7, 4))]
        assert len(smallest_indices(form, 2, n_max=Fraction(1))) == 2

    def test_summarize(self):
        results = [
            PropertyResult("a", True),
            PropertyResult("b", False, {"counterexample": {"n": "1/1"}}),
            PropertyResult("c", True, {"reason": "x"}, skipped=True),
            PropertyResult("d", False, budget_exceeded=True),
        ]
        assert summarize(results) == {"total": 4, "passed": 1, "skipped": 1, "failed": 1, "budget_exceeded": 1}
        assert results[3].as_json()["budget_exceeded"] is True
        assert "skipped" not in results[0].as_json()

    def test_unknown_suite(self, trivial_lattice):
        with pytest.raises(ValueError):
            run_suite("modular", context(trivial_lattice, 4, ()))

    def test_kappa(self, rank_one, hyperbolic_three):
        assert context(rank_one, Fraction(7, 2), (0,)).kappa == 4
        assert context(hyperbolic_three, 5, (1, 0)).kappa == 5


class TestClassicalLattice:
    def test_all_suites_pass(self, trivial_lattice):
        ctx = context(trivial_lattice, 4, ())
        results = run_suite("all", ctx)
        counts = summarize(results)
        assert counts["failed"] == 0, failures(results)
        assert counts["budget_exceeded"] == 0
        names = {r.name for r in results}
        assert "coefficients.classical_divisor_sums" in names
        assert {name.split(".")[0] for name in names} == set(SUITES)

    def test_hecke_reports_eigenvalue(self, trivial_lattice):
        results = suite_hecke(context(trivial_lattice, 4, ()))
        eigen = [r for r in results if r.name.startswith("hecke.eigenform")]
        assert [r.name for r in eigen] == ["hecke.eigenform[1:[], T_1(2)]", "hecke.eigenform[1:[], T_1(3)]"]
        assert [r.detail["eigenvalue"]["coeffs"] for r in eigen] == [["9/1"], ["28/1"]]
        assert "hecke.untwisted_relation[T_1(2)]" in [r.name for r in results]
        assert all(r.passed for r in results)


class TestRankOne:
    def test_coefficients_against_oracle(self, rank_one):
        ctx = context(rank_one, Fraction(7, 2), (0,), n_max=Fraction(2), c_max=60, exponents=1)
        results = run_suite("coefficients", ctx)
        assert results and not failures(results)

    def test_budget_is_reported(self, rank_one):
        ctx = context(rank_one, Fraction(7, 2), (0,), budget=1)
        results = {r.name: r for r in suite_repnums(ctx)}
        assert results["repnums.multiplicativity"].budget_exceeded
        assert results["repnums.lifted_counts_match_enumeration"].budget_exceeded
        assert results["repnums.stability"].passed


@pytest.mark.slow
class TestLargerForms:
    def test_hyperbolic_gsums(self, hyperbolic_three):
        ctx = context(hyperbolic_three, 5, (1, 0))
        results = run_suite("gsums", ctx)
        assert not failures(results)

    def test_hyperbolic_repnums(self, hyperbolic_three):
        results = run_suite("repnums", context(hyperbolic_three, 5, (1, 0)))
        assert not failures(results)

    def test_imprimitive_character(self, split_two):
        ctx = context(split_two, 4, (1, 1), characters=[DirichletCharacter.trivial(2)], n_max=Fraction(1),
                      exponents=1)
        results = run_suite("oldforms", ctx)
        assert [r.name for r in results] == ["oldforms.decomposition[2:[]]", "oldforms.lifting_identity"]
        assert not failures(results)


class TestParityMismatch:
    def test_even_character_at_odd_kappa(self, hyperbolic_three):
        ctx = context(hyperbolic_three, 5, (1, 0), characters=[DirichletCharacter.trivial(3)], n_max=Fraction(1),
                      c_max=10, exponents=1)
        results = run_suite("coefficients", ctx)
        names = [r.name for r in results]
        assert "coefficients.series_oracle[3:[0]]" in names
        assert not failures(results)


@pytest.mark.slow
class TestCorpus:
    @pytest.mark.parametrize("fixture, weight, beta", [
        ("rank_one", Fraction(7, 2), (0,)),
        ("split_two", 4, (1, 1)),
        ("hyperbolic_two", 4, (1, 0)),
    ])
    def test_gsums(self, request, fixture, weight, beta):
        ctx = context(request.getfixturevalue(fixture), weight, beta)
        results = run_suite("gsums", ctx)
        assert results and not failures(results)
        assert summarize(results)["budget_exceeded"] == 0

    def test_oldform_of_trivial_character(self, hyperbolic_three):
        ctx = context(hyperbolic_three, 4, (1, 0), characters=[DirichletCharacter.trivial(3)],
                      n_max=Fraction(1), c_max=30, exponents=1)
        results = run_suite("oldforms", ctx)
        assert [r.name for r in results] == ["oldforms.decomposition[3:[0]]", "oldforms.lifting_identity"]
        assert not failures(results)

    def test_galois_with_quartic_character(self, hyperbolic_five):
        ctx = context(hyperbolic_five, 5, (1, 0), n_max=Fraction(1))
        results = run_suite("galois", ctx)
        names = [r.name for r in results]
        assert "galois.untwisted_rational" in names
        assert any(name.startswith("galois.conjugation[5:") for name in names)
        assert not failures(results)
