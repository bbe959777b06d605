"""
Hecke Operators
Coefficientwise action of T_r(p) (even rank) and T(p²) (odd rank) on Fourier tables
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Optional, Tuple

from sympy import nextprime

from exact_arith import ContractViolation, CycNumber, DirichletCharacter, kronecker_symbol
from lattice_core import DiscriminantForm, Lattice
from eisenstein_engine import EisensteinSpec, FourierTable, table_indices, untwisted_series


class DepthError(ValueError):
    """Raised when a source table is too shallow for the requested output depth."""


@dataclass(frozen=True)
class HeckeDescriptor:
    """
    Hecke operator data.

    Attributes:
        p: Prime coprime to the level, odd when the rank is odd
        r: Square root of p modulo the level (even rank only)
        odd: True for T(p²) on odd-rank lattices
    """
    p: int
    r: int
    odd: bool

    def validate(self, lattice: Lattice) -> None:
        N = lattice.level
        if gcd(self.p, N) != 1:
            raise ContractViolation(f"p = {self.p} must be coprime to the level {N}")
        if self.p == 2 and lattice.rank % 2:
            raise ContractViolation("T(p²) on an odd-rank lattice needs an odd prime p")
        if self.odd != bool(lattice.rank % 2):
            raise ContractViolation(f"descriptor parity does not match rank {lattice.rank}")
        if not self.odd and (self.r * self.r - self.p) % N:
            raise ContractViolation(f"r = {self.r} does not satisfy r² ≡ {self.p} mod {N}")

    @property
    def label(self) -> str:
        return f"T({self.p}^2)" if self.odd else f"T_{self.r}({self.p})"


def descriptor(lattice: Lattice, p: int, r: Optional[int] = None) -> HeckeDescriptor:
    """Descriptor for p, choosing the smallest admissible r when none is given."""
    odd = bool(lattice.rank % 2)
    N = lattice.level
    if not odd and r is None:
        r = next((x for x in range(1, N + 1) if gcd(x, N) == 1 and (x * x - p) % N == 0), None)
        if r is None:
            raise ContractViolation(f"{p} is not a square modulo the level {N}")
    h = HeckeDescriptor(p, r if r is not None else 1, odd)
    h.validate(lattice)
    return h


def admissible_primes(lattice: Lattice, count: int = 2) -> List[HeckeDescriptor]:
    """The smallest primes coprime to the level (odd in odd rank, squares mod N in even rank)."""
    found = []
    p = 1
    while len(found) < count:
        p = nextprime(p)
        try:
            found.append(descriptor(lattice, p))
        except ContractViolation:
            continue
    return found


def _unit(p: int, exponent: int) -> CycNumber:
    # ε_p^exponent with ε_p = 1 or i
    if p % 4 == 1:
        return CycNumber.one()
    return CycNumber.root_of_unity(4, exponent % 4)


def legendre_of_rational(x: Fraction, p: int) -> int:
    """(x/p) for a rational x whose denominator is prime to p."""
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ContractViolation(f"denominator of {x} is divisible by {p}")
    residue = (x.numerator * pow(x.denominator, -1, p)) % p
    return kronecker_symbol(residue, p)


def middle_factor(form: DiscriminantForm, p: int, weight, n) -> CycNumber:
    """ε_p^{(-1/|A|) - sig(A)}·(p/|A|)·(p/2)^{sig(A)}·p^{k-3/2}·(-n/p)."""
    lattice = form.lattice
    order = form.order
    sig = lattice.b_plus - lattice.b_minus
    symbol = legendre_of_rational(-Fraction(n), p)
    if symbol == 0:
        return CycNumber.zero()
    exponent = kronecker_symbol(-1, order) - sig
    sign = kronecker_symbol(p, order) * kronecker_symbol(p, 2) ** (sig % 2) * symbol
    power = Fraction(weight) - Fraction(3, 2)
    return _unit(p, exponent) * (sign * Fraction(p) ** int(power))


def hecke_act(table: FourierTable, h: HeckeDescriptor, n_max=None) -> FourierTable:
    """
    Image of a table under the Hecke operator described by h.

    Even rank: b(γ, n) = c(rγ, pn) + p^{k-1}·c(γ/r, n/p).
    Odd rank:  b(γ, n) = c(pγ, p²n) + (middle)·c(γ, n) + p^{2k-2}·c(γ/p, n/p²).
    Terms whose index is not of the form (γ', n') with n' ≡ -Q(γ') are zero.
    """
    form = table.form
    lattice = form.lattice
    h.validate(lattice)
    stretch = h.p ** 2 if h.odd else h.p
    n_max = Fraction(n_max) if n_max is not None else Fraction(int(table.n_max / stretch))
    if n_max * stretch > table.n_max:
        raise DepthError(f"{h.label} to depth {n_max} needs source depth {n_max * stretch}, have {table.n_max}")
    k = table.weight
    p = h.p
    indices: List[Tuple] = [(g, Fraction(0)) for g in form.isotropic_elements()]
    indices += table_indices(form, n_max)
    entries = {}
    for gamma, n in indices:
        if h.odd:
            value = table.get(form.scale(p, gamma), p * p * n)
            if n:
                middle = middle_factor(form, p, k, n)
                if not middle.is_zero():
                    value = value + table.get(gamma, n) * middle
            lower = form.divide(gamma, p)
            if (n / (p * p) + form.q_value(lower)) % 1 == 0:
                value = value + table.get(lower, n / (p * p)) * (Fraction(p) ** int(2 * k - 2))
        else:
            value = table.get(form.scale(h.r, gamma), p * n)
            lower = form.divide(gamma, h.r)
            if (n / p + form.q_value(lower)) % 1 == 0:
                value = value + table.get(lower, n / p) * (Fraction(p) ** int(k - 1))
        entries[(gamma, n)] = value
    return FourierTable(form, k, n_max, entries, table.mode, f"{h.label} {table.label}", table.meta)


def eigenvalue(chi: DirichletCharacter, h: HeckeDescriptor, weight) -> CycNumber:
    """χ(r) + p^{k-1}χ̄(r) in even rank, χ(p) + p^{2k-2}χ̄(p) in odd rank."""
    k = Fraction(weight)
    if h.odd:
        return chi.evaluate(h.p) + chi.conjugate().evaluate(h.p) * Fraction(h.p) ** int(2 * k - 2)
    return chi.evaluate(h.r) + chi.conjugate().evaluate(h.r) * Fraction(h.p) ** int(k - 1)


def _compare(image: FourierTable, expected: FourierTable, rel_tol: float) -> Tuple[bool, float]:
    deviation = image.max_deviation(expected)
    if image.mode == expected.mode == "exact":
        return image.equals(expected), float(deviation)
    scale = max([abs(v.to_mpc()) for v in expected.entries.values()] + [1])
    return bool(deviation <= rel_tol * scale), float(deviation)


def verify_eigenform(table: FourierTable, h: HeckeDescriptor, lam, n_max=None,
                     rel_tol: float = 1e-8) -> Tuple[bool, float]:
    """hecke_act(table) == λ·table on the output depth; returns (ok, max deviation)."""
    image = hecke_act(table, h, n_max)
    expected = table.truncated(image.n_max).scaled(lam)
    return _compare(image, expected, rel_tol)


def verify_untwisted_relation(lattice: Lattice, beta, weight, h: HeckeDescriptor, n_max, mode: str = "exact",
                              form: Optional[DiscriminantForm] = None, jobs: int = 1,
                              rel_tol: float = 1e-8) -> Tuple[bool, float]:
    """
    Checks T E_{A,β} = E_{A,β/r} + p^{k-1}E_{A,rβ} (even rank) or
    E_{A,β/p} + p^{2k-2}E_{A,pβ} (odd rank).
    """
    spec = EisensteinSpec(lattice, beta, weight, form=form)
    form = spec.form
    k = spec.weight
    stretch = h.p ** 2 if h.odd else h.p
    n_max = Fraction(n_max)
    source = untwisted_series(lattice, spec.beta, k, n_max * stretch, mode, form=form, jobs=jobs)
    image = hecke_act(source, h, n_max)
    step = h.p if h.odd else h.r
    factor = Fraction(h.p) ** int(2 * k - 2 if h.odd else k - 1)
    down = untwisted_series(lattice, form.divide(spec.beta, step), k, n_max, mode, form=form, jobs=jobs)
    up = untwisted_series(lattice, form.scale(step, spec.beta), k, n_max, mode, form=form, jobs=jobs)
    return _compare(image, down + up.scaled(factor), rel_tol)
