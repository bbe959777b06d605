"""
Representation Numbers
Counts N_{γ,n}(a) modulo prime powers, truncation exponents and local polynomials
"""

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, List, Sequence, Tuple

import numpy as np
from sympy import factorint

from exact_arith import ContractViolation, CycNumber, DirichletCharacter, Rational, valuation
from lattice_core import Lattice

Vector = Tuple[Fraction, ...]


def canonical_vector(gamma: Sequence) -> Vector:
    """Representative of γ + L with entries in [0, 1)."""
    return tuple(Fraction(x) % 1 for x in gamma)


def vector_order(gamma: Sequence) -> int:
    """Order N_γ of a dual-lattice vector modulo L."""
    return lcm(*(Fraction(x).denominator for x in gamma)) if len(gamma) else 1


def stability_bound(p: int, order_gamma: int, n: Rational) -> int:
    """Above this level the counts grow by p^{m-1} per step."""
    return 1 + 2 * valuation(2 * order_gamma * Fraction(n), p)


def w_exponent(p: int, order_beta: int, order_gamma: int, n: Rational) -> int:
    """w_p = 1 + 2ν_p(2·N_β·N_γ·n)."""
    x = 2 * order_beta * order_gamma * Fraction(n)
    if x == 0:
        raise ContractViolation("w_p needs n > 0")
    if x.denominator != 1:
        raise ContractViolation(f"2·N_β·N_γ·n = {x} is not an integer")
    return 1 + 2 * valuation(x, p)


class RepCounter:
    """
    Memoised representation numbers of one lattice.

    For fixed (γ, n, p) the solutions of Q(r - γ) + n ≡ 0 modulo p^j are kept
    and lifted digit by digit to level j + 1, so deeper levels only cost the
    new digit. With δ = N_γ and c = δγ the congruence is evaluated as

        (δr - c)ᵀG(δr - c) + 2δ²n ≡ 0  (mod 2δ²p^j)

    which only depends on r modulo p^j.

    Args:
        lattice: The even lattice L
    """

    def __init__(self, lattice: Lattice):
        self.lattice = lattice
        self._levels: Dict[tuple, List[int]] = {}
        self._solutions: Dict[tuple, np.ndarray] = {}
        self._locks: Dict[tuple, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, key: tuple) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(key, threading.Lock())

    def validate(self, gamma: Sequence, n: Rational) -> None:
        if len(gamma) != self.lattice.rank:
            raise ContractViolation(f"γ has {len(gamma)} entries, lattice rank is {self.lattice.rank}")
        if any(x.denominator != 1 for x in self.lattice.apply(gamma)):
            raise ContractViolation(f"{tuple(gamma)} is not in the dual lattice")
        if (Fraction(n) + self.lattice.q(gamma)).denominator != 1:
            raise ContractViolation(f"n = {n} is not congruent to -Q(γ) mod 1")

    def prime_power_count(self, gamma: Sequence, n: Rational, p: int, alpha: int) -> int:
        """N_{γ,n}(p^α)."""
        if alpha == 0:
            return 1
        gamma = canonical_vector(gamma)
        n = Fraction(n)
        self.validate(gamma, n)
        m = self.lattice.rank
        if m == 0:
            return int(n.numerator % p ** alpha == 0)
        cap = alpha
        if n != 0:
            cap = min(alpha, stability_bound(p, vector_order(gamma), n) + 1)
        counts = self._counts(gamma, n, p, cap)
        return p ** ((m - 1) * (alpha - cap)) * counts[cap]

    def levels(self, gamma: Sequence, n: Rational, p: int, depth: int) -> List[int]:
        """[N(p^0), ..., N(p^depth)] by enumeration only."""
        gamma = canonical_vector(gamma)
        n = Fraction(n)
        self.validate(gamma, n)
        if self.lattice.rank == 0:
            return [int(n.numerator % p ** j == 0) for j in range(depth + 1)]
        return self._counts(gamma, n, p, depth)

    def _counts(self, gamma: Vector, n: Fraction, p: int, depth: int) -> List[int]:
        key = (gamma, n, p)
        with self._lock_for(key):
            if key not in self._levels:
                self._levels[key] = [1]
                self._solutions[key] = np.zeros((1, self.lattice.rank), dtype=np.int64)
            levels = self._levels[key]
            while len(levels) <= depth:
                self._lift(key, gamma, n, p, len(levels))
            return list(levels[:depth + 1])

    def _lift(self, key: tuple, gamma: Vector, n: Fraction, p: int, j: int) -> None:
        m = self.lattice.rank
        delta = vector_order(gamma)
        shift = np.array([int(x * delta) for x in gamma], dtype=np.int64)
        digits = np.indices((p,) * m).reshape(m, -1).T
        solutions = self._solutions[key]
        candidates = (solutions[:, None, :] + p ** (j - 1) * digits[None, :, :]).reshape(-1, m)
        X = delta * candidates - shift
        values = np.einsum("ki,ij,kj->k", X, self.lattice.gram_array, X) + int(2 * delta * delta * n)
        keep = candidates[values % (2 * delta * delta * p ** j) == 0]
        self._solutions[key] = keep
        self._levels[key].append(int(len(keep)))


_counters: Dict[tuple, RepCounter] = {}
_counters_lock = threading.Lock()


def counter_for(lattice: Lattice) -> RepCounter:
    """Shared memo for a lattice, keyed by its Gram matrix."""
    with _counters_lock:
        counter = _counters.get(lattice.gram)
        if counter is None:
            counter = _counters[lattice.gram] = RepCounter(lattice)
        return counter


def rep_count(lattice: Lattice, gamma: Sequence, n: Rational, a: int) -> int:
    """
    N_{γ,n}(a) = #{r ∈ L/aL : Q(r - γ) + n ≡ 0 mod a}.

    Args:
        lattice: The even lattice
        gamma: Dual-lattice representative of γ
        n: Rational with n + Q(γ) ∈ Z
        a: Positive modulus

    Returns:
        The count, assembled over the prime factorisation of a
    """
    if a < 1:
        raise ContractViolation(f"modulus must be positive, got {a}")
    counter = counter_for(lattice)
    counter.validate([Fraction(x) for x in gamma], n)
    total = 1
    for p, e in factorint(a).items():
        total *= counter.prime_power_count(gamma, n, p, e)
    return total


@dataclass(frozen=True)
class LocalPolynomial:
    """L^{(p)}_{γ,n}(X) with coefficients listed from the constant term up."""
    p: int
    w: int
    coeffs: Tuple[Fraction, ...]

    def __call__(self, x):
        result = 0
        for c in reversed(self.coeffs):
            result = result * x + c
        return result


def local_polynomial(lattice: Lattice, gamma: Sequence, n: Rational, p: int,
                     order_beta: int) -> LocalPolynomial:
    """
    N(p^w)X^w + (1 - p^{m-1}X)·Σ_{ν<w} N(p^ν)X^ν with w = w_p.
    """
    counter = counter_for(lattice)
    w = w_exponent(p, order_beta, vector_order(canonical_vector(gamma)), n)
    counts = [counter.prime_power_count(gamma, n, p, nu) for nu in range(w + 1)]
    top = Fraction(p) ** (lattice.rank - 1)
    coeffs = [Fraction(0)] * (w + 1)
    for nu in range(w):
        coeffs[nu] += counts[nu]
        coeffs[nu + 1] -= top * counts[nu]
    coeffs[w] += counts[w]
    return LocalPolynomial(p, w, tuple(coeffs))


def local_exponent(k: Rational, m: int) -> int:
    exponent = 1 - Fraction(m, 2) - Fraction(k)
    if exponent.denominator != 1:
        raise ContractViolation(f"1 - m/2 - k = {exponent} is not an integer (k = {k}, m = {m})")
    return int(exponent)


def eval_local(poly: LocalPolynomial, chi: DirichletCharacter, k: Rational, m: int) -> CycNumber:
    """L^{(p)}(χ(p)·p^{1-m/2-k}) in Q(χ)."""
    x = chi.evaluate(poly.p) * Fraction(poly.p) ** local_exponent(k, m)
    result = CycNumber.zero()
    for c in reversed(poly.coeffs):
        result = result * x + c
    return result
