"""
Oracles
Brute-force and numeric backends used to arbitrate the closed-form formulas
"""

from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Optional, Sequence, Union

import mpmath
import numpy as np
from sympy import divisor_sigma, divisors

from exact_arith import (ContractViolation, CycNumber, DirichletCharacter, Rational,
                         bernoulli_number, euler_phi, mobius, units_mod)
from lattice_core import DiscElement, DiscriminantForm, Lattice

DEFAULT_BUDGET = 10 ** 7
EXACT_CONDUCTOR_LIMIT = 10 ** 4


class BudgetExceededError(RuntimeError):
    """Raised when a brute-force enumeration would exceed its budget."""


class NumericValue:
    """
    Complex number with an absolute error bound.

    Args:
        value: Midpoint (anything mpmath.mpc accepts)
        error: Non-negative absolute error bound
        provable: False when the bound is only a heuristic estimate
    """

    __slots__ = ("value", "error", "provable")

    def __init__(self, value, error=0, provable: bool = True):
        self.value = mpmath.mpc(value)
        self.error = mpmath.mpf(error)
        self.provable = provable

    @classmethod
    def of(cls, x) -> "NumericValue":
        if isinstance(x, NumericValue):
            return x
        if isinstance(x, CycNumber):
            return cls(x.to_mpc(), mpmath.mpf(2) ** (8 - mpmath.mp.prec) * (1 + sum(abs(c) for c in x.coeffs)))
        if isinstance(x, Fraction):
            return cls(mpmath.mpf(x.numerator) / x.denominator)
        return cls(x)

    def __add__(self, other):
        other = NumericValue.of(other)
        return NumericValue(self.value + other.value, self.error + other.error,
                            self.provable and other.provable)

    __radd__ = __add__

    def __neg__(self):
        return NumericValue(-self.value, self.error, self.provable)

    def __sub__(self, other):
        return self + (-NumericValue.of(other))

    def __rsub__(self, other):
        return NumericValue.of(other) - self

    def __mul__(self, other):
        other = NumericValue.of(other)
        error = (abs(self.value) * other.error + abs(other.value) * self.error
                 + self.error * other.error)
        return NumericValue(self.value * other.value, error, self.provable and other.provable)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        other = NumericValue.of(other)
        if abs(other.value) <= other.error:
            raise ZeroDivisionError("divisor interval contains zero")
        quotient = self.value / other.value
        error = (self.error + abs(quotient) * other.error) / (abs(other.value) - other.error)
        return NumericValue(quotient, error, self.provable and other.provable)

    def conjugate(self) -> "NumericValue":
        return NumericValue(mpmath.conj(self.value), self.error, self.provable)

    def is_zero(self) -> bool:
        return self.value == 0 and self.error == 0

    def close_to(self, other, rel_tol: float = 0.0, abs_tol: float = 0.0) -> bool:
        """True if the two values agree within their bounds plus the tolerances."""
        other = NumericValue.of(other)
        scale = max(abs(self.value), abs(other.value))
        return abs(self.value - other.value) <= (self.error + other.error + rel_tol * scale + abs_tol)

    def to_mpc(self):
        return self.value

    def as_json(self) -> Dict:
        digits = max(15, int(mpmath.mp.prec * 0.30103))
        return {"re": mpmath.nstr(self.value.real, digits), "im": mpmath.nstr(self.value.imag, digits),
                "err": mpmath.nstr(self.error, 5), "provable": self.provable}

    def __repr__(self):
        return f"NumericValue({mpmath.nstr(self.value, 15)} ± {mpmath.nstr(self.error, 3)})"


def _integer_form(lattice: Lattice, gamma: Sequence, n: Rational):
    gamma = [Fraction(x) for x in gamma]
    n = Fraction(n)
    if (n + lattice.q(gamma)).denominator != 1:
        raise ContractViolation(f"n = {n} is not congruent to -Q(γ) mod 1")
    delta = lcm(*(x.denominator for x in gamma)) if gamma else 1
    shift = np.array([int(x * delta) for x in gamma], dtype=np.int64)
    return delta, shift, int(2 * delta * delta * n)


def brute_rep_count(lattice: Lattice, gamma: Sequence, n: Rational, a: int,
                    budget: int = DEFAULT_BUDGET) -> int:
    """N_{γ,n}(a) by literal enumeration of L/aL."""
    m = lattice.rank
    if a ** m > budget:
        raise BudgetExceededError(f"enumerating {a}^{m} residues exceeds the budget {budget}")
    delta, shift, constant = _integer_form(lattice, gamma, n)
    if m == 0:
        return int(constant % (2 * a) == 0)
    modulus = 2 * delta * delta * a
    if m == 1:
        tail = np.zeros((1, 0), dtype=np.int64)
    else:
        tail = np.indices((a,) * (m - 1)).reshape(m - 1, -1).T
    count = 0
    for first in range(a):
        R = np.hstack([np.full((len(tail), 1), first, dtype=np.int64), tail])
        X = delta * R - shift
        values = np.einsum("ki,ij,kj->k", X, lattice.gram_array, X) + constant
        count += int(np.count_nonzero(values % modulus == 0))
    return count


def ramanujan_sum(c: int, n: int, method: str = "direct") -> int:
    """Σ_{d mod c, (d,c)=1} e(nd/c)."""
    if c < 1:
        raise ContractViolation(f"c must be positive, got {c}")
    if method == "direct":
        counts = [0] * c
        for d in units_mod(c):
            counts[(n * d) % c] += 1
        return int(CycNumber.from_exponent_counts(c, counts).rational_value())
    if method == "mobius":
        return sum(mobius(c // a) * a for a in divisors(gcd(n, c)))
    raise ValueError(f"unknown method {method!r}")


def _nu_weights(order_beta: int, chi: Optional[DirichletCharacter],
                weights: Optional[Dict[int, Rational]]):
    # (ν, rational weight, root-of-unity exponent, base)
    if weights is not None:
        return [(nu % order_beta, Fraction(w), 0, 1) for nu, w in sorted(weights.items()) if w]
    chi = chi or DirichletCharacter.trivial(order_beta)
    if chi.modulus != order_beta:
        raise ContractViolation(f"character modulus {chi.modulus} differs from N_β = {order_beta}")
    return [(nu, Fraction(1), chi.log_value(nu), chi.order) for nu in units_mod(order_beta)]


def individual_weights(order_beta: int, kappa: int) -> Dict[int, Fraction]:
    """ν-weights (δ_{ν≡1} + (-1)^κ δ_{ν≡-1})/2 singling out E_{A,β}."""
    w: Dict[int, Fraction] = {}
    w[1 % order_beta] = w.get(1 % order_beta, Fraction(0)) + Fraction(1, 2)
    w[-1 % order_beta] = w.get(-1 % order_beta, Fraction(0)) + Fraction((-1) ** kappa, 2)
    return w


def brute_G(form: DiscriminantForm, gamma: DiscElement, n: Rational, c: int, beta: DiscElement,
            chi: Optional[DirichletCharacter] = None, weights: Optional[Dict[int, Rational]] = None,
            exact: bool = True, budget: int = DEFAULT_BUDGET,
            precision_bits: Optional[int] = None) -> Union[CycNumber, NumericValue]:
    """
    G_{γ,n}(c; β, χ) = Σ_ν χ(ν) Σ_{d mod c}^* Σ_{r ∈ L/cL} e((aQ(νβ+r) - (γ, νβ+r) + d(Q(γ)+n))/c)

    with a·d ≡ 1 mod c. Passing weights replaces χ(ν) by arbitrary rational
    weights. The exact variant returns a cyclotomic number; when its
    conductor exceeds EXACT_CONDUCTOR_LIMIT (or exact=False) the sum is
    evaluated with mpmath at precision_bits (the current precision if None)
    and returned with an error bound.
    """
    if precision_bits is not None:
        with mpmath.workprec(precision_bits):
            return brute_G(form, gamma, n, c, beta, chi, weights, exact, budget)
    lattice = form.lattice
    m = lattice.rank
    order_beta = form.order_of(beta)
    nus = _nu_weights(order_beta, chi, weights)
    if c ** m * max(len(nus), 1) > budget:
        raise BudgetExceededError(f"G-sum at c = {c} needs {c ** m} residues per ν (budget {budget})")
    g_vec, b_vec = form.lift(gamma), form.lift(beta)
    t = Fraction(n) + lattice.q(g_vec)
    if t.denominator != 1:
        raise ContractViolation(f"n = {n} is not congruent to -Q(γ) mod 1")
    t = int(t)
    cross = lattice.bilinear(g_vec, b_vec)
    P, den = cross.numerator, cross.denominator
    q_beta = lattice.q(b_vec)
    if q_beta.denominator != 1:
        raise ContractViolation("β is not isotropic")
    w_beta = np.array([int(x) for x in lattice.apply(b_vec)], dtype=np.int64)
    w_gamma = np.array([int(x) for x in lattice.apply(g_vec)], dtype=np.int64)
    if m:
        R = np.indices((c,) * m).reshape(m, -1).T
        q_r = np.einsum("ki,ij,kj->k", R, lattice.gram_array, R) // 2
        l_r = (R @ w_gamma) % c
        pair_r = R @ w_beta
    else:
        q_r = l_r = pair_r = np.zeros(1, dtype=np.int64)
    units = units_mod(c)
    inverses = [pow(d, -1, c) if c > 1 else 0 for d in units]
    M = c * den
    base = lcm(*(nu[3] for nu in nus)) if nus else 1
    L = lcm(M, base)
    use_exact = exact and L <= EXACT_CONDUCTOR_LIMIT
    total_counts = [Fraction(0)] * L if use_exact else None
    total_numeric = mpmath.mpc(0)
    terms = 0
    if not use_exact:
        zeta_c = [mpmath.expjpi(mpmath.mpf(2 * j) / c) for j in range(c)]
        # Σ_d e((a·q + d·t)/c) is a Kloosterman sum in q
        kloosterman = [mpmath.fsum(zeta_c[(a * q + d * t) % c] for d, a in zip(units, inverses))
                       for q in range(c)]
    for nu, weight, log, log_base in nus:
        q_nu = (int(q_beta) * nu * nu + nu * pair_r + q_r) % c
        hist = np.bincount(q_nu * c + l_r, minlength=c * c).reshape(c, c)
        shift = (-nu * P) % M
        if use_exact:
            counts = np.zeros(M, dtype=np.int64)
            qm, lm = np.meshgrid(np.arange(c), np.arange(c), indexing="ij")
            for d, a in zip(units, inverses):
                idx = (den * ((a * qm - lm + d * t) % c) + shift) % M
                np.add.at(counts, idx.ravel(), hist.ravel())
            twist = log * (L // log_base)
            for j in np.nonzero(counts)[0]:
                total_counts[(int(j) * (L // M) + twist) % L] += weight * int(counts[j])
        else:
            value = mpmath.mpc(0)
            for q in np.nonzero(hist.any(axis=1))[0]:
                row = hist[q]
                inner = mpmath.fsum(int(row[j]) * mpmath.conj(zeta_c[j]) for j in np.nonzero(row)[0])
                value += kloosterman[int(q)] * inner
            value *= mpmath.expjpi(mpmath.mpf(2 * shift) / M)
            root = mpmath.expjpi(mpmath.mpf(2 * log) / log_base)
            total_numeric += mpmath.mpf(weight.numerator) / weight.denominator * root * value
            terms += len(units) * c + c * c
    if use_exact:
        return CycNumber.from_exponent_counts(L, total_counts)
    scale = sum(abs(w) for _, w, _, _ in nus) * len(units) * max(c ** m, 1)
    error = mpmath.mpf(scale.numerator) / scale.denominator * (terms + 1) * mpmath.mpf(2) ** (4 - mpmath.mp.prec)
    return NumericValue(total_numeric, error)


def symmetrised_weights(weights: Dict[int, Rational], order_beta: int, kappa: int) -> Dict[int, Fraction]:
    """ν-weights (w(ν) + (-1)^κ w(-ν))/2: the part of w that survives folding c with -c."""
    reduced: Dict[int, Fraction] = {}
    for nu, w in weights.items():
        reduced[nu % order_beta] = reduced.get(nu % order_beta, Fraction(0)) + Fraction(w)
    out = {}
    for nu in sorted(set(reduced) | {-nu % order_beta for nu in reduced}):
        value = (reduced.get(nu, Fraction(0)) + (-1) ** kappa * reduced.get(-nu % order_beta, Fraction(0))) / 2
        if value:
            out[nu] = value
    return out


def series_coefficient_numeric(lattice: Lattice, form: DiscriminantForm, beta: DiscElement,
                               weight: Rational, gamma: DiscElement, n: Rational, c_max: int,
                               chi: Optional[DirichletCharacter] = None,
                               weights: Optional[Dict[int, Rational]] = None,
                               budget: int = DEFAULT_BUDGET,
                               precision_bits: Optional[int] = None) -> NumericValue:
    """
    Truncated Kloosterman-series value of a positive-index coefficient:

        (2π)^k n^{k-1}/Γ(k) · 2i^{-κ}/√|A| · Σ_{c ≤ c_max} c^{-k-m/2} G_{γ,n}(c; β, χ)

    Only c > 0 is summed; the c < 0 half equals it after ν -> -ν and a sign
    (-1)^κ. A character with χ(-1) != (-1)^κ therefore gives exactly 0, and
    rational weights are replaced by their symmetrised part.

    The tail bound Σ|w|·ζ(k - m/2 - 1, c_max + 1) is attached; it is only
    provable when k - m/2 - 1 > 1.
    """
    k = Fraction(weight)
    m = lattice.rank
    kappa = k - Fraction(lattice.b_minus, 2) + Fraction(lattice.b_plus, 2)
    if kappa.denominator != 1:
        raise ContractViolation(f"κ = {kappa} is not an integer")
    kappa = int(kappa)
    n = Fraction(n)
    if n <= 0:
        raise ContractViolation("the series oracle needs n > 0")
    order_beta = form.order_of(beta)
    if weights is not None:
        weights = symmetrised_weights(weights, order_beta, kappa)
        if not weights:
            return NumericValue(0)
        mass = sum(abs(w) for w in weights.values())
    else:
        chi = chi or DirichletCharacter.trivial(order_beta)
        if chi.modulus != order_beta:
            raise ContractViolation(f"character modulus {chi.modulus} differs from N_β = {order_beta}")
        if chi.parity != kappa % 2:
            return NumericValue(0)
        mass = Fraction(euler_phi(order_beta))
    with mpmath.workprec(precision_bits or mpmath.mp.prec):
        k_mp = mpmath.mpf(k.numerator) / k.denominator
        n_mp = mpmath.mpf(n.numerator) / n.denominator
        prefactor = ((2 * mpmath.pi) ** k_mp * n_mp ** (k_mp - 1) / mpmath.gamma(k_mp)
                     * 2 * mpmath.mpc(0, -1) ** kappa / mpmath.sqrt(form.order))
        block = max(1, c_max // 10)
        total = NumericValue(0)
        recent = []
        for c in range(1, c_max + 1):
            term = NumericValue.of(brute_G(form, gamma, n, c, beta, chi=chi, weights=weights,
                                           exact=False, budget=budget))
            term = term * mpmath.power(c, -k_mp - mpmath.mpf(m) / 2)
            total = total + term
            if c > c_max - block:
                recent.append(abs(term.value) + term.error)
        s = k_mp - mpmath.mpf(m) / 2 - 1
        mass_mp = mpmath.mpf(mass.numerator) / mass.denominator
        if s > 1:
            tail = NumericValue(0, mass_mp * mpmath.zeta(s, c_max + 1))
        else:
            # heuristic: the tail is taken to be no larger than the last block of terms
            tail = NumericValue(0, mpmath.fsum(recent), provable=False)
        return (total + tail) * prefactor


def divisor_sum_reference(k: int, n: int) -> Fraction:
    """2·(-2k/B_k)·σ_{k-1}(n), coefficients of 2·E_k."""
    if k < 4 or k % 2:
        raise ContractViolation(f"reference needs an even weight k >= 4, got {k}")
    return 2 * Fraction(-2 * k) / bernoulli_number(k) * int(divisor_sigma(n, k - 1))


def numeric_l_value(chi: DirichletCharacter, s: Rational) -> NumericValue:
    """
    L(χ, s) through Hurwitz zeta values, q^{-s}·Σ_a χ(a)ζ(s, a/q).

    At s = 1 the non-trivial case uses -(1/q)·Σ_a χ(a)ψ(a/q).
    """
    q = chi.modulus
    s = Fraction(s)
    s_mp = mpmath.mpf(s.numerator) / s.denominator
    total = mpmath.mpc(0)
    if s == 1:
        if chi.is_trivial():
            raise ContractViolation("L(χ0, s) has a pole at s = 1")
        for a in units_mod(q):
            total += chi.evaluate(a).to_mpc() * mpmath.psi(0, mpmath.mpf(a) / q)
        total = -total / q
    elif s > 1:
        for a in units_mod(q) if q > 1 else [1]:
            total += chi.evaluate(a).to_mpc() * mpmath.zeta(s_mp, mpmath.mpf(a) / q)
        total = total * mpmath.power(q, -s_mp)
    else:
        raise ContractViolation(f"numeric L-values need s >= 1, got {s}")
    return NumericValue(total, mpmath.mpf(2) ** (16 - mpmath.mp.prec) * (1 + abs(total)) * q)
