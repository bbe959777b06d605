"""
Eisenstein Engine
Fourier coefficients of twisted vector-valued Eisenstein series E_{A,β,χ}
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod
from typing import Dict, List, Optional, Tuple, Union

import mpmath
from sympy import divisors, factorint

from exact_arith import (ContractViolation, CycNumber, DirichletCharacter, ExactModeUnavailable,
                         ParityError, TranscendentalLedger, characters_mod, euler_phi,
                         factor_character, fundamental_discriminant, gamma_half_integer,
                         gauss_sum, kronecker_character, l_value_positive, mobius, units_mod,
                         valuation)
from lattice_core import (DiscElement, DiscriminantForm, Lattice, QuotientModule,
                          build_discriminant_form, lift_up, quotient_module)
from oracles import NumericValue, numeric_l_value
from repnums import counter_for, eval_local, local_exponent, local_polynomial, w_exponent

DEFAULT_EXACT_BUDGET = 2000
MODES = ("exact", "numeric", "auto")

Value = Union[CycNumber, NumericValue]


class InvariantViolation(RuntimeError):
    """An internal consistency check failed; indicates a bug or bad lattice data."""


class EisensteinSpec:
    """
    Parameters of E_{A,β,χ}.

    Args:
        lattice: Even lattice L
        beta: Isotropic element β of A = L'/L (DiscElement or coordinates)
        weight: k ∈ (1/2)Z with k >= 5/2
        character: Dirichlet character modulo N_β (trivial if omitted)
        form: Discriminant form of L, built if omitted
    """

    def __init__(self, lattice: Lattice, beta, weight, character: Optional[DirichletCharacter] = None,
                 form: Optional[DiscriminantForm] = None):
        self.lattice = lattice
        self.form = form or build_discriminant_form(lattice)
        coords = beta.coords if isinstance(beta, DiscElement) else tuple(beta)
        self.beta = self.form.element(coords)
        self.weight = Fraction(weight)
        k, m = self.weight, lattice.rank
        if (2 * k).denominator != 1 or k < Fraction(5, 2):
            raise ContractViolation(f"weight must lie in (1/2)Z with k >= 5/2, got {k}")
        if (2 * k) % 2 != m % 2:
            raise ContractViolation(f"weight {k} does not match the parity of rank {m}")
        kappa = k - Fraction(lattice.b_minus, 2) + Fraction(lattice.b_plus, 2)
        if kappa.denominator != 1:
            raise ContractViolation(f"κ = {kappa} is not an integer")
        self.kappa = int(kappa)
        q_beta = self.form.q_value(self.beta)
        if q_beta != 0:
            raise ContractViolation(f"Q(β) = {q_beta} is not 0 mod 1")
        self.order_beta = self.form.order_of(self.beta)
        self.character = character or DirichletCharacter.trivial(self.order_beta)
        if self.character.modulus != self.order_beta:
            raise ContractViolation(
                f"character modulus {self.character.modulus} differs from N_β = {self.order_beta}")

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def vanishes(self) -> bool:
        """E_{A,β,χ} = 0 unless χ(-1) = (-1)^κ."""
        return self.character.parity != self.kappa % 2

    def vanishing_reason(self) -> Optional[str]:
        if not self.vanishes:
            return None
        if self.order_beta <= 2 and self.kappa % 2:
            return "2β = 0 and κ is odd: no character mod N_β is odd"
        return f"χ(-1) = {(-1) ** self.character.parity} but (-1)^κ = {(-1) ** self.kappa}"

    def with_character(self, chi: DirichletCharacter) -> "EisensteinSpec":
        return EisensteinSpec(self.lattice, self.beta, self.weight, chi, self.form)

    def describe(self) -> Dict:
        return {
            "lattice": [list(row) for row in self.lattice.gram],
            "discriminant_order": self.form.order,
            "elementary_divisors": list(self.form.elementary_divisors),
            "signature": [self.lattice.b_plus, self.lattice.b_minus],
            "level": self.lattice.level,
            "weight": f"{self.weight.numerator}/{self.weight.denominator}",
            "kappa": self.kappa,
            "beta": list(self.beta.coords),
            "character": self.character.label,
        }

    def __repr__(self):
        return f"EisensteinSpec(β={self.beta.coords}, k={self.weight}, χ={self.character.label})"


# ---------------------------------------------------------------------------
# Arithmetic data attached to (γ, n)
# ---------------------------------------------------------------------------

def discriminant_data(lattice: Lattice, order_gamma: int, n, kappa: int, weight
                      ) -> Tuple[int, int, DirichletCharacter]:
    """(D, D0, χ_{D0}) for the coefficient at (γ, n)."""
    m, det, k = lattice.rank, lattice.det, Fraction(weight)
    if m % 2 == 0:
        D = (-1) ** (m // 2) * det
        expected = (-1) ** int(kappa + k)
    else:
        n = Fraction(n)
        if n <= 0:
            raise ContractViolation("odd rank needs n > 0")
        value = 2 * (-1) ** ((m + 1) // 2) * order_gamma ** 2 * n * det
        if value.denominator != 1:
            raise InvariantViolation(f"2N_γ²n·det(L) = {value} is not an integer")
        D = int(value)
        expected = (-1) ** int(kappa + k - Fraction(1, 2))
    if D % 4 not in (0, 1):
        raise InvariantViolation(f"D = {D} is not a discriminant")
    if (1 if D > 0 else -1) != expected:
        raise InvariantViolation(f"sign of D = {D} contradicts κ = {kappa}, k = {k}")
    D0 = fundamental_discriminant(D)
    return D, D0, kronecker_character(D0)


@dataclass
class SplitData:
    """g = gcd(N_β, N_β(γ,β)) and the character splittings it induces."""
    g: int
    n_g: int
    n_g_prime: int
    nb: int
    chi_g: DirichletCharacter
    chi_g_prime: DirichletCharacter
    local: Dict[int, Tuple[DirichletCharacter, DirichletCharacter, DirichletCharacter]] = field(default_factory=dict)


def split_data(form: DiscriminantForm, beta: DiscElement, gamma: DiscElement,
               chi: DirichletCharacter) -> SplitData:
    """
    Splits χ = χ_{N_g}·χ_{N_g'} and, for p | g, χ_{N_g} = χ_p·χ_p'.

    local[p] also carries the part of χ away from p, used by the finite part.
    """
    N = form.order_of(beta)
    nb = int(N * form.pairing(gamma, beta)) % N
    g = gcd(N, nb)
    n_g = prod(p ** valuation(N, p) for p in factorint(g))
    chi_g, chi_g_prime = factor_character(chi, n_g, N // n_g)
    local = {}
    for p in sorted(factorint(g)):
        pv = p ** valuation(N, p)
        chi_p, chi_p_prime = factor_character(chi_g, pv, n_g // pv)
        chi_away = factor_character(chi, pv, N // pv)[1]
        local[p] = (chi_p, chi_p_prime, chi_away)
    return SplitData(g, n_g, N // n_g, nb, chi_g, chi_g_prime, local)


def epsilon_factor(split: SplitData, chi: DirichletCharacter) -> CycNumber:
    """ε_{β,χ}(γ) = (1/N_g)·χ̄_{N_g'}(N_β(γ,β))·G(χ)."""
    if not chi.is_primitive():
        raise ContractViolation(f"{chi.label} is not primitive; use oldform_decompose")
    return split.chi_g_prime.conjugate().evaluate(split.nb) * gauss_sum(chi) / split.n_g


def _local_g_sum(lattice: Lattice, gamma_vec, n: Fraction, p: int, alpha: int, beta_p_vec,
                 chi_p: DirichletCharacter, nb: int, v: int) -> CycNumber:
    # Σ_{u: u p^α ≡ nb (p^v)} χ̄_p(u) Σ_{ν mod p^v} [N'(p^α) - p^{m-1} N'(p^{α-1})]
    pv = p ** v
    counter = counter_for(lattice)
    top = Fraction(p) ** (lattice.rank - 1)
    conj = chi_p.conjugate()
    total = CycNumber.zero()
    for u in units_mod(pv):
        if (u * p ** alpha - nb) % pv:
            continue
        inner = Fraction(0)
        for nu in range(pv):
            shifted = tuple(g - nu * b for g, b in zip(gamma_vec, beta_p_vec))
            n_shift = n + Fraction(p ** alpha * nu * u, pv)
            inner += (counter.prime_power_count(shifted, n_shift, p, alpha)
                      - top * counter.prime_power_count(shifted, n_shift, p, alpha - 1))
        if inner:
            total = total + conj.evaluate(u) * inner
    return total


def coprime_g_sum(form: DiscriminantForm, gamma: DiscElement, n, c: int, beta: DiscElement,
                  chi: DirichletCharacter) -> CycNumber:
    """
    Closed form of G_{γ,n}(c; β, χ) for c coprime to g:
    χ(c)·χ̄(-N_β(γ,β))·G(χ)·c^m·Σ_{a|c} μ(c/a)·a^{1-m}·N_{γ,n}(a).
    """
    lattice = form.lattice
    split = split_data(form, beta, gamma, chi)
    if gcd(c, split.g) != 1:
        raise ContractViolation(f"c = {c} is not coprime to g = {split.g}")
    gamma_vec = form.lift(gamma)
    counter = counter_for(lattice)
    m = lattice.rank
    total = Fraction(0)
    for a in divisors(c):
        mu = mobius(c // a)
        if mu:
            count = 1
            for p, e in factorint(a).items():
                count *= counter.prime_power_count(gamma_vec, n, p, e)
            total += mu * Fraction(a) ** (1 - m) * count
    front = chi.evaluate(c) * chi.conjugate().evaluate(-split.nb) * gauss_sum(chi)
    return front * (Fraction(c) ** m * total)


def prime_power_g_sum(form: DiscriminantForm, gamma: DiscElement, n, p: int, alpha: int,
                      beta: DiscElement, chi: DirichletCharacter) -> CycNumber:
    """
    Closed form of G_{γ,n}(p^α; β, χ) when N_β = p^v and p | g; zero below ν_p(g).
    """
    N = form.order_of(beta)
    v = valuation(N, p)
    if p ** v != N:
        raise ContractViolation(f"N_β = {N} is not a power of {p}")
    split = split_data(form, beta, gamma, chi)
    if split.g % p:
        raise ContractViolation(f"{p} does not divide g = {split.g}")
    if alpha < valuation(split.g, p):
        return CycNumber.zero()
    local = _local_g_sum(form.lattice, form.lift(gamma), Fraction(n), p, alpha, form.lift(beta),
                         chi, split.nb, v)
    return chi.evaluate(-1) * gauss_sum(chi) * local * Fraction(p) ** (alpha - v)


def finite_part(spec: EisensteinSpec, gamma: DiscElement, n, split: SplitData) -> CycNumber:
    """Π_{p | g} Σ_{α=ν_p(g)}^{w_p} χ^{(p)}(p^α)·p^{α(1-m/2-k)}·(local G-sum at p^α)."""
    if split.g == 1:
        return CycNumber.one()
    form, N, n = spec.form, spec.order_beta, Fraction(n)
    gamma_vec = form.lift(gamma)
    order_gamma = form.order_of(gamma)
    exponent = local_exponent(spec.weight, spec.rank)
    total = CycNumber.one()
    for p, (chi_p, _, chi_away) in split.local.items():
        v = valuation(N, p)
        beta_p_vec = form.lift(form.scale(N // p ** v, spec.beta))
        w = w_exponent(p, N, order_gamma, n)
        factor = CycNumber.zero()
        for alpha in range(valuation(split.g, p), w + 1):
            local = _local_g_sum(spec.lattice, gamma_vec, n, p, alpha, beta_p_vec, chi_p, split.nb, v)
            if not local.is_zero():
                factor = factor + chi_away.evaluate(p ** alpha) * local * Fraction(p) ** (alpha * exponent)
        if factor.is_zero():
            return factor
        total = total * factor
    return total


def assembly_conditions(chi: DirichletCharacter, D0: int, rank: Optional[int] = None) -> Dict[str, bool]:
    """
    The coprimality and primitivity conditions of the rationality argument.

    χ² only enters the L-value quotient in odd rank, so for an even rank the
    χ² condition is left out.
    """
    conditions = {
        "coprime_conductors": gcd(chi.conductor, abs(D0)) == 1,
        "chi_primitive": chi.is_primitive(),
        "chi_squared_primitive": (chi ** 2).is_primitive(),
    }
    if rank is not None and rank % 2 == 0:
        del conditions["chi_squared_primitive"]
    return conditions


def _require_assembly(spec: EisensteinSpec, gamma: DiscElement, n: Fraction) -> None:
    _, D0, _ = discriminant_data(spec.lattice, spec.form.order_of(gamma), n, spec.kappa, spec.weight)
    failed = [name for name, ok in assembly_conditions(spec.character, D0, spec.rank).items() if not ok]
    if failed:
        raise ExactModeUnavailable(f"exact assembly needs {', '.join(failed)} (χ = {spec.character.label}, "
                                   f"D0 = {D0})")


def _main_primes(spec: EisensteinSpec, order_gamma: int, n: Fraction) -> List[int]:
    value = 2 * order_gamma ** 2 * n * abs(spec.lattice.det)
    if value.denominator != 1:
        raise InvariantViolation(f"2N_γ²n·det(L) = {value} is not an integer")
    return sorted(factorint(int(value)))


def _local_factors(spec: EisensteinSpec, gamma_vec, order_gamma: int, n: Fraction,
                   xi: DirichletCharacter) -> CycNumber:
    chi, k, m = spec.character, spec.weight, spec.rank
    product = CycNumber.one()
    for p in _main_primes(spec, order_gamma, n):
        if chi.evaluate(p).is_zero():
            continue
        poly = local_polynomial(spec.lattice, gamma_vec, n, p, spec.order_beta)
        local = eval_local(poly, chi, k, m)
        if m % 2 == 0:
            factor = local / (1 - xi.evaluate(p) * Fraction(p) ** int(-k))
        else:
            numerator = 1 - xi.evaluate(p) * Fraction(p) ** int(Fraction(1, 2) - k)
            denominator = 1 - (chi ** 2).evaluate(p) * Fraction(p) ** int(1 - 2 * k)
            factor = local * numerator / denominator
        product = product * factor
    return product


def main_part(spec: EisensteinSpec, gamma: DiscElement, n, exact: bool = True
              ) -> Union[TranscendentalLedger, NumericValue]:
    """
    c^main(γ, n): the Dirichlet L-value quotient times the local polynomials at
    the primes dividing 2N_γ²n·det(L).
    """
    n = Fraction(n)
    if n <= 0:
        raise ContractViolation("main part needs n > 0")
    form, chi, k = spec.form, spec.character, spec.weight
    order_gamma = form.order_of(gamma)
    _, D0, chi_D0 = discriminant_data(spec.lattice, order_gamma, n, spec.kappa, k)
    xi = chi * chi_D0
    local = _local_factors(spec, form.lift(gamma), order_gamma, n, xi)
    if spec.rank % 2 == 0:
        points = [(xi, int(k), -1)]
    else:
        points = [(xi, int(k - Fraction(1, 2)), 1), (chi ** 2, int(2 * k - 1), -1)]
    if exact:
        ledger = TranscendentalLedger(local)
        for character, s, power in points:
            try:
                value = l_value_positive(character, s)
            except ParityError as exc:
                raise ExactModeUnavailable(f"L({character.label}, {s}): {exc}") from exc
            ledger = ledger * (value if power > 0 else value.inverse())
        return ledger
    result = NumericValue.of(local)
    for character, s, power in points:
        value = numeric_l_value(character, s)
        result = result * value if power > 0 else result / value
    return result


def _prefactor_ledger(spec: EisensteinSpec, n: Fraction) -> TranscendentalLedger:
    # 2^{k+1} π^k n^{k-1} i^κ / (√|A| Γ(k))
    k = spec.weight
    r, h = gamma_half_integer(k)
    ledger = TranscendentalLedger(1 / r, int(k - Fraction(h, 2)), spec.kappa)
    ledger = ledger * TranscendentalLedger.sqrt_of(Fraction(1, spec.form.order))
    if k.denominator == 1:
        return ledger * (Fraction(2) ** int(k + 1) * n ** int(k - 1))
    ledger = ledger * (Fraction(2) ** int(k + Fraction(1, 2)) * n ** int(k - Fraction(3, 2)))
    return ledger * TranscendentalLedger.sqrt_of(2) * TranscendentalLedger.sqrt_of(n)


def _prefactor_numeric(spec: EisensteinSpec, n: Fraction):
    k = mpmath.mpf(spec.weight.numerator) / spec.weight.denominator
    n_mp = mpmath.mpf(n.numerator) / n.denominator
    return (2 ** (k + 1) * mpmath.pi ** k * n_mp ** (k - 1) * mpmath.mpc(0, 1) ** spec.kappa
            / (mpmath.sqrt(spec.form.order) * mpmath.gamma(k)))


def coefficient(spec: EisensteinSpec, gamma: DiscElement, n, mode: str = "exact",
                exact_budget: int = DEFAULT_EXACT_BUDGET) -> Value:
    """
    Coefficient of e_γ q^n, n > 0, for a primitive character.

    Exact mode returns a cyclotomic number in Q(χ); numeric mode returns a
    NumericValue at the current mpmath precision. In auto mode an
    ExactModeUnavailable falls back to numeric.
    """
    if mode == "auto":
        try:
            return coefficient(spec, gamma, n, "exact", exact_budget)
        except ExactModeUnavailable:
            return coefficient(spec, gamma, n, "numeric", exact_budget)
    if mode not in MODES:
        raise ContractViolation(f"unknown mode {mode!r}")
    n = Fraction(n)
    exact = mode == "exact"
    zero = CycNumber.zero() if exact else NumericValue(0)
    if n <= 0:
        raise ContractViolation("coefficient needs n > 0; use constant_term for n = 0")
    if (n + spec.form.q_value(gamma)) % 1 != 0:
        raise ContractViolation(f"n = {n} is not congruent to -Q(γ) mod 1")
    if spec.vanishes:
        return zero
    if exact:
        _require_assembly(spec, gamma, n)
    chi = spec.character
    split = split_data(spec.form, spec.beta, gamma, chi)
    front = epsilon_factor(split, chi)
    if front.is_zero():
        return zero
    front = front * finite_part(spec, gamma, n, split)
    if front.is_zero():
        return zero
    main = main_part(spec, gamma, n, exact)
    if not exact:
        return main * NumericValue.of(front) * _prefactor_numeric(spec, n)
    total = _prefactor_ledger(spec, n) * TranscendentalLedger(front) * main
    if total.is_zero():
        return CycNumber.zero()
    conductor = total.absorbed_conductor()
    if conductor > exact_budget:
        raise ExactModeUnavailable(f"cyclotomic conductor {conductor} exceeds the exact budget {exact_budget}")
    total = total.absorb_algebraic()
    if total.pi_exp != 0:
        raise InvariantViolation(f"π^{total.pi_exp} survived assembly at γ = {gamma.coords}, n = {n}")
    value = total.value.canonical()
    if not value.lies_in(chi.order):
        raise InvariantViolation(f"coefficient at γ = {gamma.coords}, n = {n} is not in Q({chi.label})")
    return value


def constant_term(spec: EisensteinSpec) -> Dict[DiscElement, CycNumber]:
    """2·Σ_{ν mod N_β}^* χ(ν) e_{νβ}."""
    if spec.vanishes:
        return {}
    return {spec.form.scale(nu, spec.beta): spec.character.evaluate(nu) * 2
            for nu in units_mod(spec.order_beta)}


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

def _to_mpc(value):
    if isinstance(value, (CycNumber, NumericValue)):
        return value.to_mpc()
    value = Fraction(value)
    return mpmath.mpc(mpmath.mpf(value.numerator) / value.denominator)


def table_indices(form: DiscriminantForm, n_max) -> List[Tuple[DiscElement, Fraction]]:
    """All (γ, n) with 0 < n <= n_max and n ≡ -Q(γ) mod 1, ordered by (n, γ)."""
    n_max = Fraction(n_max)
    indices = []
    for gamma in form.elements():
        n = (-form.q_value(gamma)) % 1 or Fraction(1)
        while n <= n_max:
            indices.append((gamma, n))
            n += 1
    return sorted(indices, key=lambda item: (item[1], item[0]))


class FourierTable:
    """
    Coefficients of one vector-valued series up to a depth n_max.

    Args:
        form: The discriminant form indexing the components
        weight: Weight k
        n_max: Largest exponent stored
        entries: Map (γ, n) -> value; missing entries are zero
        mode: "exact" (cyclotomic values) or "numeric" (NumericValue)
        label: Short description used in reports
        meta: Free-form metadata (mode used, fallback reasons, ...)
    """

    def __init__(self, form: DiscriminantForm, weight, n_max, entries: Dict[Tuple[DiscElement, Fraction], Value],
                 mode: str = "exact", label: str = "", meta: Optional[Dict] = None):
        self.form = form
        self.weight = Fraction(weight)
        self.n_max = Fraction(n_max)
        self.entries = {(gamma, Fraction(n)): value for (gamma, n), value in entries.items()}
        self.mode = mode
        self.label = label
        self.meta = dict(meta or {})

    def zero_value(self) -> Value:
        return CycNumber.zero() if self.mode == "exact" else NumericValue(0)

    def get(self, gamma: DiscElement, n) -> Value:
        return self.entries.get((gamma, Fraction(n)), self.zero_value())

    def keys(self) -> List[Tuple[DiscElement, Fraction]]:
        return sorted(self.entries, key=lambda item: (item[1], item[0]))

    def _compatible(self, other: "FourierTable") -> None:
        if self.form.lattice.gram != other.form.lattice.gram:
            raise ContractViolation("tables live on different discriminant forms")

    def _merged_mode(self, other: "FourierTable") -> str:
        return "exact" if self.mode == other.mode == "exact" else "numeric"

    def __add__(self, other: "FourierTable") -> "FourierTable":
        self._compatible(other)
        entries = dict(self.entries)
        for key, value in other.entries.items():
            entries[key] = entries[key] + value if key in entries else value
        return FourierTable(self.form, self.weight, min(self.n_max, other.n_max), entries,
                            self._merged_mode(other), self.label, self.meta)

    def __sub__(self, other: "FourierTable") -> "FourierTable":
        return self + other.scaled(-1)

    def scaled(self, factor) -> "FourierTable":
        entries = {key: value * factor for key, value in self.entries.items()}
        return FourierTable(self.form, self.weight, self.n_max, entries, self.mode, self.label, self.meta)

    def relabel(self, ambient: DiscriminantForm, fanout: Dict[DiscElement, List[DiscElement]]) -> "FourierTable":
        """Push entries along a one-to-many map of components."""
        entries = {}
        for (delta, n), value in self.entries.items():
            for gamma in fanout.get(delta, []):
                entries[(gamma, n)] = value
        return FourierTable(ambient, self.weight, self.n_max, entries, self.mode, self.label, self.meta)

    def truncated(self, n_max) -> "FourierTable":
        n_max = Fraction(n_max)
        entries = {key: value for key, value in self.entries.items() if key[1] <= n_max}
        return FourierTable(self.form, self.weight, n_max, entries, self.mode, self.label, self.meta)

    def galois(self, a: int) -> "FourierTable":
        """Apply σ_a to every (exact) coefficient."""
        if self.mode != "exact":
            raise ContractViolation("Galois action needs an exact table")
        entries = {key: value.galois(a % value.conductor if value.conductor > 1 else 1)
                   for key, value in self.entries.items()}
        return FourierTable(self.form, self.weight, self.n_max, entries, self.mode, self.label, self.meta)

    def conjugate(self) -> "FourierTable":
        entries = {key: value.conjugate() for key, value in self.entries.items()}
        return FourierTable(self.form, self.weight, self.n_max, entries, self.mode, self.label, self.meta)

    def is_zero(self) -> bool:
        return all(_to_mpc(v) == 0 if isinstance(v, NumericValue) else v.is_zero()
                   for v in self.entries.values())

    def equals(self, other: "FourierTable") -> bool:
        """Exact coefficientwise equality on the common depth."""
        self._compatible(other)
        depth = min(self.n_max, other.n_max)
        for key in set(self.entries) | set(other.entries):
            if key[1] <= depth and not (self.get(*key) - other.get(*key)).is_zero():
                return False
        return True

    def max_deviation(self, other: "FourierTable"):
        """max |a - b| over the common depth, as an mpf."""
        self._compatible(other)
        depth = min(self.n_max, other.n_max)
        worst = mpmath.mpf(0)
        for key in set(self.entries) | set(other.entries):
            if key[1] <= depth:
                worst = max(worst, abs(_to_mpc(self.get(*key)) - _to_mpc(other.get(*key))))
        return worst

    def records(self) -> List[Dict]:
        out = []
        for gamma, n in self.keys():
            value = self.entries[(gamma, n)]
            if isinstance(value, CycNumber) and value.is_zero():
                continue
            out.append({"gamma": list(gamma.coords), "n": f"{n.numerator}/{n.denominator}",
                        "value": value.as_json()})
        return out

    def __repr__(self):
        return f"FourierTable({self.label!r}, n_max={self.n_max}, {len(self.entries)} entries, {self.mode})"


def _primitive_table(spec: EisensteinSpec, n_max: Fraction, mode: str, jobs: int,
                     exact_budget: int) -> FourierTable:
    indices = table_indices(spec.form, n_max)

    def job(index):
        gamma, n = index
        return coefficient(spec, gamma, n, mode, exact_budget)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(job, indices))
    else:
        values = [job(index) for index in indices]
    entries = dict(zip(indices, values))
    for gamma, value in constant_term(spec).items():
        entries[(gamma, Fraction(0))] = value
    return FourierTable(spec.form, spec.weight, n_max, entries, mode, spec.character.label)


def fourier_table(spec: EisensteinSpec, n_max, mode: str = "exact", precision_bits: int = 80,
                  jobs: int = 1, exact_budget: int = DEFAULT_EXACT_BUDGET) -> FourierTable:
    """
    Table of E_{A,β,χ} up to n_max, including the constant term.

    Imprimitive characters are evaluated through the oldform decomposition.
    """
    if mode not in MODES:
        raise ContractViolation(f"unknown mode {mode!r}")
    n_max = Fraction(n_max)
    meta = {"mode_requested": mode}
    if spec.rank % 2 == 0:
        _, D0, _ = discriminant_data(spec.lattice, 1, 1, spec.kappa, spec.weight)
        meta["conditions"] = assembly_conditions(spec.character, D0, spec.rank)
    if spec.vanishes:
        meta.update(mode_used=mode if mode != "auto" else "exact", vanishing=spec.vanishing_reason())
        return FourierTable(spec.form, spec.weight, n_max, {}, "exact" if mode != "numeric" else "numeric",
                            spec.character.label, meta)
    if mode == "auto":
        try:
            table = fourier_table(spec, n_max, "exact", precision_bits, jobs, exact_budget)
        except ExactModeUnavailable as exc:
            table = fourier_table(spec, n_max, "numeric", precision_bits, jobs, exact_budget)
            table.meta["fallback_reason"] = exc.reason
        table.meta["mode_requested"] = "auto"
        return table
    with mpmath.workprec(precision_bits):
        if spec.character.is_primitive():
            table = _primitive_table(spec, n_max, mode, jobs, exact_budget)
        else:
            table = None
            for term in oldform_decompose(spec):
                piece = fourier_table(term.spec, n_max, mode, precision_bits, jobs, exact_budget)
                if term.quotient is not None:
                    piece = lift_up(piece, term.quotient)
                piece = piece.scaled(term.sign)
                table = piece if table is None else table + piece
            table.label = spec.character.label
    table.meta.update(meta)
    table.meta["mode_used"] = mode
    return table


# ---------------------------------------------------------------------------
# Oldforms and the untwisted series
# ---------------------------------------------------------------------------

@dataclass
class OldformTerm:
    """sign·E_{B_d, β_d, ψ}↑ with B_d = H_d^⊥/H_d."""
    sign: CycNumber
    d: int
    quotient: Optional[QuotientModule]
    spec: EisensteinSpec


def oldform_decompose(spec: EisensteinSpec) -> List[OldformTerm]:
    """
    E_{A,β,χ} = ψ(N0')·Σ_{d | N0'} μ(d)·E_{B_d, N0'β, ψ}↑ with H_d = ⟨d·N_ψ·β⟩.

    ψ is the primitive character inducing χ, N0 the part of N_β supported on
    the primes of N_ψ and N0' = N_β/N0.
    """
    chi = spec.character
    if chi.is_primitive():
        return [OldformTerm(CycNumber.one(), 1, None, spec)]
    psi = chi.primitive_part()
    N, N_psi = spec.order_beta, psi.modulus
    N0 = prod(p ** valuation(N, p) for p in factorint(N_psi))
    N0_prime = N // N0
    front = psi.evaluate(N0_prime)
    terms = []
    for d in divisors(N0_prime):
        mu = mobius(d)
        if not mu:
            continue
        generator = spec.form.scale(d * N_psi, spec.beta)
        quotient = quotient_module(spec.form, spec.form.subgroup([generator]))
        beta_d = quotient.project(spec.form.scale(N0_prime, spec.beta))
        sub_spec = EisensteinSpec(quotient.lattice, beta_d, spec.weight, psi, quotient.form)
        if sub_spec.order_beta != N_psi:
            raise InvariantViolation(f"image of N0'β has order {sub_spec.order_beta}, expected {N_psi}")
        terms.append(OldformTerm(front * mu, d, quotient, sub_spec))
    return terms


def twisted_tables(lattice: Lattice, beta, weight, n_max, mode: str = "exact", precision_bits: int = 80,
                   jobs: int = 1, form: Optional[DiscriminantForm] = None,
                   exact_budget: int = DEFAULT_EXACT_BUDGET) -> Dict[str, FourierTable]:
    """E_{A,β,χ} for every χ mod N_β, keyed by character label."""
    base = EisensteinSpec(lattice, beta, weight, form=form)
    return {chi.label: fourier_table(base.with_character(chi), n_max, mode, precision_bits, jobs, exact_budget)
            for chi in characters_mod(base.order_beta)}


def untwisted_series(lattice: Lattice, beta, weight, n_max, mode: str = "exact", precision_bits: int = 80,
                     jobs: int = 1, form: Optional[DiscriminantForm] = None,
                     tables: Optional[Dict[str, FourierTable]] = None,
                     exact_budget: int = DEFAULT_EXACT_BUDGET) -> FourierTable:
    """
    E_{A,β} = (1/φ(N_β))·Σ_χ E_{A,β,χ}, with constant term e_β + (-1)^κ e_{-β}.

    In exact mode every coefficient must come out rational.
    """
    base = EisensteinSpec(lattice, beta, weight, form=form)
    if tables is None:
        tables = twisted_tables(lattice, base.beta, weight, n_max, mode, precision_bits, jobs, base.form,
                                exact_budget)
    total = None
    for table in tables.values():
        total = table if total is None else total + table
    result = total.scaled(Fraction(1, euler_phi(base.order_beta)))
    if result.mode == "exact":
        for (gamma, n), value in result.entries.items():
            if not value.is_rational():
                raise InvariantViolation(f"E_A,β coefficient at γ = {gamma.coords}, n = {n} is not rational")
        result.entries = {key: CycNumber.rational(value.rational_value())
                          for key, value in result.entries.items()}
    result.label = f"E_A,beta={list(base.beta.coords)}"
    result.meta = {"mode_used": result.mode,
                   "characters": sorted(tables),
                   "fallbacks": {label: t.meta["fallback_reason"] for label, t in tables.items()
                                 if "fallback_reason" in t.meta}}
    return result
