"""
Verification Suites
Property checks that pit the closed forms against the brute-force oracles
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from sympy import factorint

from exact_arith import (CycNumber, DirichletCharacter, ExactModeUnavailable, characters_mod,
                         format_fraction, gauss_sum, jacobi_sum, kronecker_character, units_mod)
from eisenstein_engine import (EisensteinSpec, FourierTable, InvariantViolation, coprime_g_sum,
                               discriminant_data, fourier_table, prime_power_g_sum, split_data,
                               untwisted_series)
from hecke import admissible_primes, eigenvalue, verify_eigenform, verify_untwisted_relation
from lattice_core import DiscElement, DiscriminantForm, Lattice, lift_up, quotient_module
from oracles import (DEFAULT_BUDGET, BudgetExceededError, NumericValue, brute_G, brute_rep_count,
                     divisor_sum_reference, individual_weights, series_coefficient_numeric)
from repnums import counter_for, rep_count, stability_bound

SUITES = ("repnums", "gsums", "coefficients", "hecke", "oldforms", "galois")


@dataclass
class PropertyResult:
    """Outcome of one property check."""
    name: str
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)
    budget_exceeded: bool = False
    skipped: bool = False

    def as_json(self) -> Dict[str, Any]:
        out = {"name": self.name, "passed": self.passed, "detail": self.detail}
        if self.budget_exceeded:
            out["budget_exceeded"] = True
        if self.skipped:
            out["skipped"] = True
        return out


@dataclass
class VerifyContext:
    """
    Everything a suite needs to know about the job under test.

    Args:
        lattice: The even lattice
        form: Its discriminant form
        weight: Weight k
        beta: Isotropic element of A
        characters: Characters mod N_β to test
        n_max: Depth of the tables
        c_max: Truncation of the Kloosterman-series oracle
        mode: Evaluation mode for the closed forms
        jobs: Worker threads for table builds
        exponents: Exponents n compared per component against the numeric oracle
        rel_tol: Relative tolerance of numeric comparisons
        precision_bits: Working precision of the numeric paths and oracles
    """
    lattice: Lattice
    form: DiscriminantForm
    weight: Fraction
    beta: DiscElement
    characters: List[DirichletCharacter]
    n_max: Fraction = Fraction(3)
    c_max: int = 120
    mode: str = "auto"
    jobs: int = 1
    exponents: int = 3
    rel_tol: float = 1e-6
    precision_bits: int = 80
    budget: int = DEFAULT_BUDGET

    @property
    def kappa(self) -> int:
        lattice = self.lattice
        return int(self.weight - Fraction(lattice.b_minus, 2) + Fraction(lattice.b_plus, 2))

    def spec(self, chi: DirichletCharacter) -> EisensteinSpec:
        return EisensteinSpec(self.lattice, self.beta, self.weight, chi, self.form)


def smallest_indices(form: DiscriminantForm, count: int, n_max: Optional[Fraction] = None
                     ) -> List[Tuple[DiscElement, Fraction]]:
    """The `count` smallest n > 0 with n ≡ -Q(γ) mod 1, for every γ."""
    out = []
    for gamma in form.elements():
        n = (-form.q_value(gamma)) % 1 or Fraction(1)
        for _ in range(count):
            if n_max is not None and n > n_max:
                break
            out.append((gamma, n))
            n += 1
    return out


def _agree(a, b, rel_tol: float = 0.0) -> bool:
    if isinstance(a, CycNumber) and isinstance(b, CycNumber):
        return (a - b).is_zero()
    return NumericValue.of(a).close_to(NumericValue.of(b), rel_tol=rel_tol)


def _show(value) -> Any:
    if isinstance(value, (CycNumber, NumericValue)):
        return value.as_json()
    if isinstance(value, Fraction):
        return format_fraction(value)
    return value


def _guarded(name: str, check: Callable[[], PropertyResult]) -> PropertyResult:
    try:
        return check()
    except BudgetExceededError as exc:
        return PropertyResult(name, False, {"error": str(exc)}, budget_exceeded=True)
    except ExactModeUnavailable as exc:
        return PropertyResult(name, True, {"reason": exc.reason}, skipped=True)
    except InvariantViolation as exc:
        return PropertyResult(name, False, {"error": str(exc)})


class _Tally:
    """Counts cases and keeps the first counterexample."""

    def __init__(self, name: str):
        self.name = name
        self.cases = 0
        self.counterexample: Optional[Dict[str, Any]] = None

    def record(self, ok: bool, **data) -> None:
        self.cases += 1
        if not ok and self.counterexample is None:
            self.counterexample = {key: _show(value) for key, value in data.items()}

    def result(self, **extra) -> PropertyResult:
        detail = {"cases": self.cases, **extra}
        if self.counterexample is not None:
            detail["counterexample"] = self.counterexample
        return PropertyResult(self.name, self.counterexample is None, detail)


# ---------------------------------------------------------------------------
# repnums
# ---------------------------------------------------------------------------

def _check_multiplicativity(ctx: VerifyContext, limit: int = 64) -> PropertyResult:
    tally = _Tally("repnums.multiplicativity")
    lattice = ctx.lattice
    for gamma, n in smallest_indices(ctx.form, 2):
        vec = ctx.form.lift(gamma)
        for a1 in range(2, limit + 1):
            for a2 in range(a1 + 1, limit // a1 + 1):
                if gcd(a1, a2) != 1:
                    continue
                whole = brute_rep_count(lattice, vec, n, a1 * a2, ctx.budget)
                parts = (brute_rep_count(lattice, vec, n, a1, ctx.budget)
                         * brute_rep_count(lattice, vec, n, a2, ctx.budget))
                tally.record(whole == parts, gamma=list(gamma.coords), n=n, a1=a1, a2=a2,
                             whole=whole, product=parts)
    return tally.result()


def _check_counter_against_enumeration(ctx: VerifyContext, limit: int = 64) -> PropertyResult:
    tally = _Tally("repnums.lifted_counts_match_enumeration")
    for gamma, n in smallest_indices(ctx.form, 2):
        vec = ctx.form.lift(gamma)
        for a in range(1, limit + 1):
            fast = rep_count(ctx.lattice, vec, n, a)
            slow = brute_rep_count(ctx.lattice, vec, n, a, ctx.budget)
            tally.record(fast == slow, gamma=list(gamma.coords), n=n, a=a, lifted=fast, enumerated=slow)
    return tally.result()


def _check_stability(ctx: VerifyContext, primes: Sequence[int] = (2, 3, 5)) -> PropertyResult:
    tally = _Tally("repnums.stability")
    counter = counter_for(ctx.lattice)
    m = ctx.lattice.rank
    for gamma, n in smallest_indices(ctx.form, 2):
        vec = ctx.form.lift(gamma)
        order = ctx.form.order_of(gamma)
        for p in primes:
            bound = stability_bound(p, order, n)
            counts = counter.levels(vec, n, p, bound + 3)
            for alpha in (bound + 1, bound + 2):
                ok = counts[alpha + 1] == Fraction(p) ** (m - 1) * counts[alpha]
                tally.record(ok, gamma=list(gamma.coords), n=n, p=p, alpha=alpha,
                             lower=counts[alpha], upper=counts[alpha + 1])
    return tally.result()


def suite_repnums(ctx: VerifyContext) -> List[PropertyResult]:
    return [
        _guarded("repnums.multiplicativity", lambda: _check_multiplicativity(ctx)),
        _guarded("repnums.lifted_counts_match_enumeration", lambda: _check_counter_against_enumeration(ctx)),
        _guarded("repnums.stability", lambda: _check_stability(ctx)),
    ]


# ---------------------------------------------------------------------------
# gsums
# ---------------------------------------------------------------------------

def _primitive_pairs(form: DiscriminantForm) -> List[Tuple[DiscElement, DirichletCharacter]]:
    pairs = []
    for beta in form.isotropic_elements():
        for chi in characters_mod(form.order_of(beta)):
            if chi.is_primitive():
                pairs.append((beta, chi))
    return pairs


def _check_coprime_g_sums(ctx: VerifyContext, c_limit: int = 12) -> PropertyResult:
    tally = _Tally("gsums.coprime_part")
    form = ctx.form
    for beta, chi in _primitive_pairs(form):
        for gamma, n in smallest_indices(form, 2):
            g = split_data(form, beta, gamma, chi).g
            for c in range(1, c_limit + 1):
                if gcd(c, g) != 1:
                    continue
                brute = brute_G(form, gamma, n, c, beta, chi, budget=ctx.budget)
                closed = coprime_g_sum(form, gamma, n, c, beta, chi)
                tally.record(_agree(brute, closed), beta=list(beta.coords), chi=chi.label,
                             gamma=list(gamma.coords), n=n, c=c, brute=brute, closed=closed)
    return tally.result()


def _check_prime_power_g_sums(ctx: VerifyContext, limit: int = 27) -> PropertyResult:
    tally = _Tally("gsums.prime_power_part")
    form = ctx.form
    for beta, chi in _primitive_pairs(form):
        N = form.order_of(beta)
        if len(factorint(N)) > 1:
            continue
        for gamma, n in smallest_indices(form, 2):
            g = split_data(form, beta, gamma, chi).g
            for p in factorint(g):
                alpha = 1
                while p ** alpha <= limit:
                    brute = brute_G(form, gamma, n, p ** alpha, beta, chi, budget=ctx.budget)
                    closed = prime_power_g_sum(form, gamma, n, p, alpha, beta, chi)
                    tally.record(_agree(brute, closed), beta=list(beta.coords), chi=chi.label,
                                 gamma=list(gamma.coords), n=n, p=p, alpha=alpha,
                                 brute=brute, closed=closed)
                    alpha += 1
    return tally.result()


def _discriminants(ctx: VerifyContext) -> List[int]:
    found = set()
    for gamma, n in smallest_indices(ctx.form, 2):
        try:
            _, D0, _ = discriminant_data(ctx.lattice, ctx.form.order_of(gamma), n, ctx.kappa, ctx.weight)
        except InvariantViolation:
            continue
        found.add(D0)
    return sorted(found)


def _check_gauss_relations(ctx: VerifyContext) -> PropertyResult:
    tally = _Tally("gsums.gauss_sum_relations")
    characters = {chi for _, chi in _primitive_pairs(ctx.form)}
    for chi in sorted(characters, key=lambda c: (c.modulus, c.exponents)):
        q = chi.modulus
        norm = chi.evaluate(-1) * gauss_sum(chi) * gauss_sum(chi.conjugate())
        tally.record(_agree(norm, CycNumber.rational(q)), relation="χ(-1)G(χ)G(χ̄) = q", chi=chi.label, value=norm)
        for D0 in _discriminants(ctx):
            if gcd(q, abs(D0)) != 1:
                continue
            chi_D0 = kronecker_character(D0)
            lhs = gauss_sum(chi * chi_D0)
            rhs = chi.evaluate(abs(D0)) * chi_D0.evaluate(q) * gauss_sum(chi) * gauss_sum(chi_D0)
            tally.record(_agree(lhs, rhs), relation="G(χχ_D0)", chi=chi.label, D0=D0, lhs=lhs, rhs=rhs)
        square = chi ** 2
        if square.is_primitive():
            lhs = gauss_sum(square) * jacobi_sum(chi, chi)
            rhs = gauss_sum(chi) * gauss_sum(chi)
            tally.record(_agree(lhs, rhs), relation="G(χ²)J(χ,χ) = G(χ)²", chi=chi.label, lhs=lhs, rhs=rhs)
    return tally.result()


def suite_gsums(ctx: VerifyContext) -> List[PropertyResult]:
    return [
        _guarded("gsums.coprime_part", lambda: _check_coprime_g_sums(ctx)),
        _guarded("gsums.prime_power_part", lambda: _check_prime_power_g_sums(ctx)),
        _guarded("gsums.gauss_sum_relations", lambda: _check_gauss_relations(ctx)),
    ]


# ---------------------------------------------------------------------------
# coefficients
# ---------------------------------------------------------------------------

def _against_oracle(ctx: VerifyContext, table: FourierTable, chi: DirichletCharacter, name: str) -> PropertyResult:
    tally = _Tally(name)
    provable = True
    for gamma, n in smallest_indices(ctx.form, ctx.exponents, ctx.n_max):
        oracle = series_coefficient_numeric(ctx.lattice, ctx.form, ctx.beta, ctx.weight, gamma, n, ctx.c_max,
                                            chi=chi, budget=ctx.budget,
                                            precision_bits=ctx.precision_bits)
        provable = provable and oracle.provable
        value = table.get(gamma, n)
        tally.record(_agree(value, oracle, ctx.rel_tol), chi=chi.label, gamma=list(gamma.coords), n=n,
                     table=value, oracle=oracle)
    return tally.result(mode_used=table.meta.get("mode_used", table.mode), tail_bound_provable=provable)


def _check_constant_term(ctx: VerifyContext, table: FourierTable, chi: DirichletCharacter) -> PropertyResult:
    tally = _Tally(f"coefficients.constant_term[{chi.label}]")
    spec = ctx.spec(chi)
    expected: Dict[DiscElement, CycNumber] = {}
    if not spec.vanishes:
        for nu in units_mod(spec.order_beta):
            expected[ctx.form.scale(nu, ctx.beta)] = chi.evaluate(nu) * 2
    for gamma in ctx.form.elements():
        want = expected.get(gamma, CycNumber.zero())
        tally.record(_agree(table.get(gamma, 0), want), gamma=list(gamma.coords), table=table.get(gamma, 0),
                     expected=want)
    return tally.result()


def _check_classical(ctx: VerifyContext) -> PropertyResult:
    tally = _Tally("coefficients.classical_divisor_sums")
    table = fourier_table(ctx.spec(DirichletCharacter.trivial()), ctx.n_max, "exact", jobs=ctx.jobs)
    zero = ctx.form.zero()
    n = Fraction(1)
    while n <= ctx.n_max:
        expected = divisor_sum_reference(int(ctx.weight), int(n))
        value = table.get(zero, n)
        tally.record(_agree(value, CycNumber.rational(expected)), n=n, table=value, expected=expected)
        n += 1
    return tally.result()


def suite_coefficients(ctx: VerifyContext) -> List[PropertyResult]:
    results = []
    if ctx.lattice.rank == 0 and ctx.weight.denominator == 1 and ctx.weight % 2 == 0:
        results.append(_guarded("coefficients.classical_divisor_sums", lambda: _check_classical(ctx)))
    for chi in ctx.characters:
        name = f"coefficients.series_oracle[{chi.label}]"

        def check(chi=chi, name=name):
            table = fourier_table(ctx.spec(chi), ctx.n_max, ctx.mode, ctx.precision_bits, jobs=ctx.jobs)
            results.append(_check_constant_term(ctx, table, chi))
            return _against_oracle(ctx, table, chi, name)

        results.append(_guarded(name, check))
    return results


# ---------------------------------------------------------------------------
# hecke
# ---------------------------------------------------------------------------

def suite_hecke(ctx: VerifyContext, depth: Optional[Fraction] = None) -> List[PropertyResult]:
    depth = Fraction(depth if depth is not None else ctx.n_max)
    results = []
    operators = admissible_primes(ctx.lattice, 2)
    for chi in ctx.characters:
        spec = ctx.spec(chi)
        if spec.vanishes:
            continue
        for h in operators:
            name = f"hecke.eigenform[{chi.label}, {h.label}]"

            def check(h=h, chi=chi, spec=spec, name=name):
                stretch = h.p ** 2 if h.odd else h.p
                source = fourier_table(spec, depth * stretch, ctx.mode, ctx.precision_bits, jobs=ctx.jobs)
                lam = eigenvalue(chi, h, ctx.weight)
                ok, deviation = verify_eigenform(source, h, lam, depth, rel_tol=ctx.rel_tol)
                return PropertyResult(name, ok, {"eigenvalue": lam.as_json(), "max_deviation": deviation,
                                                 "mode_used": source.meta.get("mode_used")})

            results.append(_guarded(name, check))
    if operators:
        h = operators[0]
        name = f"hecke.untwisted_relation[{h.label}]"

        def relation():
            ok, deviation = verify_untwisted_relation(ctx.lattice, ctx.beta, ctx.weight, h, depth, ctx.mode,
                                                      ctx.form, ctx.jobs, ctx.rel_tol)
            return PropertyResult(name, ok, {"max_deviation": deviation})

        results.append(_guarded(name, relation))
    return results


# ---------------------------------------------------------------------------
# oldforms and lifting
# ---------------------------------------------------------------------------

def _check_lifting(ctx: VerifyContext) -> PropertyResult:
    name = "oldforms.lifting_identity"
    if ctx.beta == ctx.form.zero():
        return PropertyResult(name, True, {"reason": "β = 0 generates the trivial subgroup"}, skipped=True)
    H = ctx.form.subgroup([ctx.beta])
    quotient = quotient_module(ctx.form, H)
    lower = untwisted_series(quotient.lattice, quotient.form.zero(), ctx.weight, ctx.n_max, ctx.mode,
                             form=quotient.form, jobs=ctx.jobs)
    lifted = lift_up(lower, quotient)
    tally = _Tally(name)
    for gamma, n in smallest_indices(ctx.form, ctx.exponents, ctx.n_max):
        total = NumericValue(0)
        for h in H.elements:
            weights = individual_weights(ctx.form.order_of(h), ctx.kappa)
            total = total + series_coefficient_numeric(ctx.lattice, ctx.form, h, ctx.weight, gamma, n,
                                                       ctx.c_max, weights=weights, budget=ctx.budget,
                                                       precision_bits=ctx.precision_bits)
        value = lifted.get(gamma, n)
        tally.record(_agree(value, total, ctx.rel_tol), gamma=list(gamma.coords), n=n, lifted=value, oracle=total)
    return tally.result(subgroup=[list(h.coords) for h in H.elements], quotient_order=quotient.form.order)


def suite_oldforms(ctx: VerifyContext) -> List[PropertyResult]:
    results = []
    for chi in ctx.characters:
        if chi.is_primitive():
            continue
        name = f"oldforms.decomposition[{chi.label}]"

        def check(chi=chi, name=name):
            table = fourier_table(ctx.spec(chi), ctx.n_max, ctx.mode, ctx.precision_bits, jobs=ctx.jobs)
            return _against_oracle(ctx, table, chi, name)

        results.append(_guarded(name, check))
    if not results:
        results.append(PropertyResult("oldforms.decomposition", True,
                                      {"reason": "every character under test is primitive"}, skipped=True))
    results.append(_guarded("oldforms.lifting_identity", lambda: _check_lifting(ctx)))
    return results


# ---------------------------------------------------------------------------
# galois
# ---------------------------------------------------------------------------

def _check_rationality(ctx: VerifyContext) -> PropertyResult:
    table = untwisted_series(ctx.lattice, ctx.beta, ctx.weight, ctx.n_max, "exact", form=ctx.form, jobs=ctx.jobs)
    # untwisted_series raises InvariantViolation on an irrational entry
    return PropertyResult("galois.untwisted_rational", True, {"entries": len(table.entries)})


def _check_conjugation(ctx: VerifyContext, chi: DirichletCharacter) -> PropertyResult:
    tally = _Tally(f"galois.conjugation[{chi.label}]")
    base = fourier_table(ctx.spec(chi), ctx.n_max, "exact", jobs=ctx.jobs)
    for a in units_mod(chi.order):
        if a == 1:
            continue
        image = fourier_table(ctx.spec(chi.galois(a)), ctx.n_max, "exact", jobs=ctx.jobs)
        tally.record(base.galois(a).equals(image), a=a, image=chi.galois(a).label)
    return tally.result()


def suite_galois(ctx: VerifyContext) -> List[PropertyResult]:
    results = [_guarded("galois.untwisted_rational", lambda: _check_rationality(ctx))]
    for chi in characters_mod(ctx.form.order_of(ctx.beta)):
        if chi.order <= 2 or ctx.spec(chi).vanishes:
            continue
        results.append(_guarded(f"galois.conjugation[{chi.label}]", lambda chi=chi: _check_conjugation(ctx, chi)))
    return results


_RUNNERS: Dict[str, Callable[[VerifyContext], List[PropertyResult]]] = {
    "repnums": suite_repnums,
    "gsums": suite_gsums,
    "coefficients": suite_coefficients,
    "hecke": suite_hecke,
    "oldforms": suite_oldforms,
    "galois": suite_galois,
}


def run_suite(name: str, ctx: VerifyContext) -> List[PropertyResult]:
    """
    Run one suite, or every suite for name == "all".

    Raises:
        ValueError: For an unknown suite name
    """
    if name == "all":
        return [result for suite in SUITES for result in _RUNNERS[suite](ctx)]
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    return _RUNNERS[name](ctx)


def summarize(results: Sequence[PropertyResult]) -> Dict[str, int]:
    return {
        "total": len(results),
        "passed": sum(r.passed and not r.skipped for r in results),
        "skipped": sum(r.skipped for r in results),
        "failed": sum(not r.passed and not r.budget_exceeded for r in results),
        "budget_exceeded": sum(r.budget_exceeded for r in results),
    }
