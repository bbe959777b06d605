"""
Exact Arithmetic
Cyclotomic numbers, Dirichlet characters, Gauss sums and exact Dirichlet L-values
"""

import itertools
import re
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, gcd, lcm
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import mpmath
from sympy import divisors, factorint, jacobi_symbol, n_order, totient

Rational = Union[int, Fraction]


class ContractViolation(ValueError):
    """Raised when a caller breaks the precondition of an operation."""


class InvalidDiscriminantError(ValueError):
    """Raised for integers that are not discriminants (D ≡ 2, 3 mod 4)."""


class ParityError(ValueError):
    """Raised when an L-value is requested at a point of the wrong parity."""


class ExactModeUnavailable(RuntimeError):
    """Typed signal that the exact backend cannot evaluate a quantity."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return int(totient(n))


def mobius(n: int) -> int:
    factors = factorint(n)
    if any(e > 1 for e in factors.values()):
        return 0
    return -1 if len(factors) % 2 else 1


def valuation(x: Rational, p: int) -> int:
    """p-adic valuation of a nonzero rational number."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero is undefined")
    num, den, v = x.numerator, x.denominator, 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def units_mod(n: int) -> List[int]:
    """Representatives 0 <= u < n of (Z/nZ)^*; for n = 1 this is [0]."""
    return [u for u in range(n) if gcd(u, n) == 1]


def format_fraction(x: Rational) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text) -> Fraction:
    return Fraction(str(text).strip())


# ---------------------------------------------------------------------------
# Cyclotomic fields
# ---------------------------------------------------------------------------

def _exact_division(numerator: List[int], denominator: Sequence[int]) -> List[int]:
    num = list(numerator)
    quotient = [0] * (len(num) - len(denominator) + 1)
    for i in range(len(quotient) - 1, -1, -1):
        coef = num[i + len(denominator) - 1]
        quotient[i] = coef
        if coef:
            for j, d in enumerate(denominator):
                num[i + j] -= coef * d
    if any(num):
        raise ArithmeticError("cyclotomic division left a remainder")
    return quotient


@lru_cache(maxsize=None)
def cyclotomic_polynomial(M: int) -> Tuple[int, ...]:
    """Coefficients (constant term first) of the M-th cyclotomic polynomial."""
    poly = [-1] + [0] * (M - 1) + [1]
    for d in divisors(M):
        if d < M:
            poly = _exact_division(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(M: int) -> Tuple[Tuple[int, ...], ...]:
    # row j holds zeta_M^j in the power basis
    phi_poly = cyclotomic_polynomial(M)
    degree = len(phi_poly) - 1
    current = [1] + [0] * (degree - 1)
    rows = []
    for _ in range(M):
        rows.append(tuple(current))
        top = current[-1]
        shifted = [0] + current[:-1]
        if top:
            shifted = [s - top * c for s, c in zip(shifted, phi_poly[:-1])]
        current = shifted
    return tuple(rows)


def _reduce(M: int, values: Sequence[Rational]) -> List[Fraction]:
    folded = [Fraction(0)] * M
    for i, v in enumerate(values):
        if v:
            folded[i % M] += v
    table = _power_table(M)
    out = [Fraction(0)] * len(table[0])
    for j, v in enumerate(folded):
        if v:
            for t, r in enumerate(table[j]):
                if r:
                    out[t] += v * r
    return out


def _solve_exact(columns: List[Sequence[Fraction]], target: Sequence[Fraction]) -> List[Fraction]:
    rows, cols = len(target), len(columns)
    aug = [[Fraction(columns[j][i]) for j in range(cols)] + [Fraction(target[i])]
           for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = Fraction(1) / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(aug[i][cols] != 0 for i in range(r, rows)):
        raise ValueError("element does not lie in the requested subfield")
    solution = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        solution[c] = aug[i][cols]
    return solution


class CycNumber:
    """
    Element of Q(ζ_M) stored in the power basis 1, ζ_M, ..., ζ_M^{φ(M)-1}.

    Arithmetic between numbers of different conductors embeds both operands
    into the field of the least common multiple.
    """

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: Sequence[Rational] = ()):
        if conductor < 1:
            raise ValueError(f"conductor must be positive, got {conductor}")
        degree = euler_phi(conductor)
        values = [Fraction(c) for c in coeffs]
        if len(values) > degree:
            values = _reduce(conductor, values)
        else:
            values += [Fraction(0)] * (degree - len(values))
        self.conductor = conductor
        self.coeffs = tuple(values)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls) -> "CycNumber":
        return cls(1, [0])

    @classmethod
    def one(cls) -> "CycNumber":
        return cls(1, [1])

    @classmethod
    def rational(cls, value: Rational) -> "CycNumber":
        return cls(1, [value])

    @classmethod
    def root_of_unity(cls, M: int, j: int) -> "CycNumber":
        values = [0] * M
        values[j % M] = 1
        return cls(M, _reduce(M, values))

    @classmethod
    def from_exponent_counts(cls, M: int, counts: Sequence) -> "CycNumber":
        """Σ_j counts[j]·ζ_M^j for a group-ring vector of length M."""
        values = [Fraction(int(c)) if not isinstance(c, Fraction) else c for c in counts]
        return cls(M, _reduce(M, values))

    # -- field plumbing ---------------------------------------------------
    def embed(self, M: int) -> "CycNumber":
        """Image in Q(ζ_M) for a multiple M of the conductor."""
        if M == self.conductor:
            return self
        if M % self.conductor:
            raise ValueError(f"cannot embed Q(ζ_{self.conductor}) into Q(ζ_{M})")
        step = M // self.conductor
        values = [Fraction(0)] * M
        for i, c in enumerate(self.coeffs):
            values[i * step] = c
        return CycNumber(M, _reduce(M, values))

    @staticmethod
    def _coerce(other) -> Optional["CycNumber"]:
        if isinstance(other, CycNumber):
            return other
        if isinstance(other, (int, Fraction)):
            return CycNumber.rational(other)
        return None

    def _aligned(self, other: "CycNumber") -> Tuple["CycNumber", "CycNumber"]:
        M = lcm(self.conductor, other.conductor)
        return self.embed(M), other.embed(M)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._aligned(other)
        return CycNumber(a.conductor, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycNumber(self.conductor, [-x for x in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.conductor == 1:
            s = other.coeffs[0]
            return CycNumber(self.conductor, [x * s for x in self.coeffs])
        if self.conductor == 1:
            s = self.coeffs[0]
            return CycNumber(other.conductor, [x * s for x in other.coeffs])
        a, b = self._aligned(other)
        M = a.conductor
        product = [Fraction(0)] * M
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        product[(i + j) % M] += x * y
        return CycNumber(M, _reduce(M, product))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        base = self if e >= 0 else self.inverse()
        result = CycNumber.one()
        for _ in range(abs(e)):
            result = result * base
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._aligned(other)
        return a.coeffs == b.coeffs

    __hash__ = None

    def galois(self, a: int) -> "CycNumber":
        """Apply σ_a: ζ_M ↦ ζ_M^a (a coprime to the conductor)."""
        M = self.conductor
        if gcd(a, M) != 1:
            raise ContractViolation(f"σ_{a} is not an automorphism of Q(ζ_{M})")
        values = [Fraction(0)] * M
        for i, c in enumerate(self.coeffs):
            if c:
                values[(i * a) % M] += c
        return CycNumber(M, _reduce(M, values))

    def conjugate(self) -> "CycNumber":
        return self.galois(-1)

    def inverse(self) -> "CycNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic number")
        if self.conductor == 1:
            return CycNumber.rational(Fraction(1) / self.coeffs[0])
        M = self.conductor
        partner = CycNumber.one()
        for a in range(2, M):
            if gcd(a, M) == 1:
                partner = partner * self.galois(a)
        norm = self * partner
        if not norm.is_rational():
            raise ArithmeticError("field norm is not rational")
        return partner * (Fraction(1) / norm.rational_value())

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def lies_in(self, d: int) -> bool:
        """True if the number lies in the subfield Q(ζ_d), d | conductor."""
        M = self.conductor
        if M % d:
            return self.lies_in(gcd(d, M))
        return all(self.galois(a) == self for a in range(1, M)
                   if gcd(a, M) == 1 and a % d == 1 % d)

    def restrict(self, d: int) -> "CycNumber":
        """Representation in Q(ζ_d) of a number known to lie there."""
        if d == self.conductor:
            return self
        columns = [CycNumber.root_of_unity(d, j).embed(self.conductor).coeffs
                   for j in range(euler_phi(d))]
        return CycNumber(d, _solve_exact(columns, self.coeffs))

    def canonical(self) -> "CycNumber":
        """Same number written over the smallest possible conductor."""
        if self.is_rational():
            return CycNumber.rational(self.coeffs[0])
        for d in divisors(self.conductor):
            if d == self.conductor:
                return self
            if self.lies_in(d):
                return self.restrict(d)
        return self

    # -- output -----------------------------------------------------------
    def to_mpc(self):
        total = mpmath.mpc(0)
        M = self.conductor
        for i, c in enumerate(self.coeffs):
            if c:
                total += mpmath.mpf(c.numerator) / c.denominator * mpmath.expjpi(mpmath.mpf(2 * i) / M)
        return total

    def as_json(self) -> Dict:
        c = self.canonical()
        return {"conductor": c.conductor, "coeffs": [format_fraction(x) for x in c.coeffs]}

    @classmethod
    def from_json(cls, data: Dict) -> "CycNumber":
        return cls(int(data["conductor"]), [parse_fraction(x) for x in data["coeffs"]])

    def __repr__(self):
        body = ", ".join(str(c) for c in self.coeffs)
        return f"CycNumber({self.conductor}, [{body}])"


def as_cyc(value) -> CycNumber:
    if isinstance(value, CycNumber):
        return value
    return CycNumber.rational(value)


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> CycNumber:
    if p == 2:
        return CycNumber.root_of_unity(8, 1) + CycNumber.root_of_unity(8, 7)
    counts = [0] * p
    for u in range(1, p):
        counts[u] = int(jacobi_symbol(u, p))
    quadratic_gauss = CycNumber.from_exponent_counts(p, counts)
    if p % 4 == 1:
        return quadratic_gauss
    return quadratic_gauss * CycNumber.root_of_unity(4, 3)


def sqrt_cyclotomic(r: int) -> CycNumber:
    """√r for a squarefree positive integer r, as a cyclotomic number."""
    result = CycNumber.one()
    for p, e in factorint(r).items():
        if e > 1:
            raise ValueError(f"{r} is not squarefree")
        result = result * _sqrt_prime(p)
    return result


def sqrt_conductor(r: int) -> int:
    return lcm(*(8 if p == 2 else (p if p % 4 == 1 else 4 * p) for p in factorint(r)))


def _split_square(r: int) -> Tuple[int, int]:
    square, free = 1, 1
    for p, e in factorint(r).items():
        square *= p ** (e // 2)
        free *= p ** (e % 2)
    return square, free


# ---------------------------------------------------------------------------
# Dirichlet characters
# ---------------------------------------------------------------------------

def _smallest_primitive_root(pe: int, phi: int) -> int:
    for g in range(2, pe):
        if gcd(g, pe) == 1 and n_order(g, pe) == phi:
            return g
    raise ArithmeticError(f"no primitive root modulo {pe}")


def crt_lift(residue: int, modulus: int, other: int) -> int:
    """The n mod modulus·other with n ≡ residue (modulus) and n ≡ 1 (other)."""
    if other == 1:
        return residue % modulus
    t = ((residue - 1) * pow(other, -1, modulus)) % modulus
    return (1 + other * t) % (modulus * other)


@lru_cache(maxsize=None)
def _unit_group(q: int) -> Tuple[Tuple[int, int, int, int], ...]:
    # (prime power, local generator, cyclic order, generator lifted mod q)
    components = []
    for p, e in sorted(factorint(q).items()):
        pe = p ** e
        rest = q // pe
        if p == 2:
            if e == 1:
                continue
            gens = [(pe - 1, 2)] if e == 2 else [(pe - 1, 2), (5, 2 ** (e - 2))]
        else:
            phi = pe - pe // p
            gens = [(_smallest_primitive_root(pe, phi), phi)]
        for g, order in gens:
            components.append((pe, g, order, crt_lift(g, pe, rest)))
    return tuple(components)


@lru_cache(maxsize=None)
def _log_table(pe: int, g: int, order: int) -> Dict[int, int]:
    table, x = {}, 1
    for i in range(order):
        table[x] = i
        x = x * g % pe
    return table


def _discrete_logs(q: int, n: int) -> Optional[List[int]]:
    if gcd(n, q) != 1:
        return None
    components = _unit_group(q)
    logs = []
    i = 0
    while i < len(components):
        pe, g, order, _ = components[i]
        x = n % pe
        if pe % 2 == 0:
            sign = 0 if x % 4 == 1 else 1
            logs.append(sign)
            if pe >= 8:
                y = x if sign == 0 else (-x) % pe
                _, g5, order5, _ = components[i + 1]
                logs.append(_log_table(pe, g5, order5)[y])
                i += 2
            else:
                i += 1
            continue
        logs.append(_log_table(pe, g, order)[x])
        i += 1
    return logs


_LABEL_PATTERN = re.compile(r"^\s*(\d+)\s*:\s*\[([-\d,\s]*)\]\s*$")


class DirichletCharacter:
    """
    Dirichlet character modulo q, labelled by its exponents on the fixed
    generators of (Z/p^e Z)^* (smallest primitive root; {-1, 5} for 2^e >= 8).

    Args:
        modulus: The modulus q >= 1
        exponents: Exponent vector; χ(g_i) = exp(2πi·e_i / ord(g_i))
    """

    def __init__(self, modulus: int, exponents: Sequence[int] = ()):
        if modulus < 1:
            raise ValueError(f"modulus must be positive, got {modulus}")
        components = _unit_group(modulus)
        exponents = list(exponents) or [0] * len(components)
        if len(exponents) != len(components):
            raise ValueError(
                f"modulus {modulus} needs {len(components)} exponents, got {len(exponents)}")
        self.modulus = modulus
        self._orders = tuple(c[2] for c in components)
        self.exponents = tuple(int(e) % o for e, o in zip(exponents, self._orders))
        self._group_exponent = lcm(*self._orders)
        self.order = lcm(*(o // gcd(o, e) for o, e in zip(self._orders, self.exponents)))

    # -- construction -----------------------------------------------------
    @classmethod
    def trivial(cls, modulus: int = 1) -> "DirichletCharacter":
        return cls(modulus)

    @classmethod
    def from_values(cls, modulus: int, log_fn: Callable[[int], int], base: int) -> "DirichletCharacter":
        """Character whose value on each generator is ζ_base^{log_fn(g)}."""
        exponents = []
        for _, _, order, lifted in _unit_group(modulus):
            t = log_fn(lifted) % base
            if (t * order) % base:
                raise ContractViolation("prescribed values do not define a character")
            exponents.append(t * order // base)
        return cls(modulus, exponents)

    @classmethod
    def from_label(cls, label: str) -> "DirichletCharacter":
        match = _LABEL_PATTERN.match(label)
        if not match:
            raise ValueError(f"malformed character label {label!r}; expected 'q:[e1,...]'")
        body = match.group(2).strip()
        exponents = [int(x) for x in body.split(",")] if body else []
        return cls(int(match.group(1)), exponents)

    @property
    def label(self) -> str:
        return f"{self.modulus}:[{','.join(str(e) for e in self.exponents)}]"

    # -- evaluation -------------------------------------------------------
    def log_value(self, n: int) -> Optional[int]:
        """t with χ(n) = ζ_order^t, or None when gcd(n, q) > 1."""
        logs = _discrete_logs(self.modulus, n)
        if logs is None:
            return None
        E = self._group_exponent
        t = sum(e * l * (E // o) for e, l, o in zip(self.exponents, logs, self._orders)) % E
        return (t * self.order // E) % self.order

    def evaluate(self, n: int) -> CycNumber:
        t = self.log_value(n)
        if t is None:
            return CycNumber.zero()
        return CycNumber.root_of_unity(self.order, t)

    __call__ = evaluate

    @property
    def parity(self) -> int:
        """0 if χ(-1) = 1, else 1."""
        return 0 if self.log_value(-1) == 0 else 1

    def is_trivial(self) -> bool:
        return self.order == 1

    # -- structure --------------------------------------------------------
    @property
    def conductor(self) -> int:
        q = self.modulus
        for d in divisors(q):
            if all(self.log_value(n) == 0 for n in range(1 + d, q, d) if gcd(n, q) == 1):
                return d
        return q

    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def primitive_part(self) -> "DirichletCharacter":
        f = self.conductor
        if f == self.modulus:
            return self
        q = self.modulus

        def lifted_log(g: int) -> int:
            n = g
            while gcd(n, q) != 1:
                n += f
            return self.log_value(n)

        return DirichletCharacter.from_values(f, lifted_log, self.order)

    def extend(self, modulus: int) -> "DirichletCharacter":
        """The character mod a multiple of q induced by this one."""
        if modulus % self.modulus:
            raise ContractViolation(f"{modulus} is not a multiple of {self.modulus}")
        if modulus == self.modulus:
            return self
        return DirichletCharacter.from_values(modulus, self.log_value, self.order)

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if other.modulus != self.modulus:
            q = lcm(self.modulus, other.modulus)
            return self.extend(q) * other.extend(q)
        return DirichletCharacter(self.modulus, [a + b for a, b in zip(self.exponents, other.exponents)])

    def __pow__(self, e: int) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, [a * e for a in self.exponents])

    def conjugate(self) -> "DirichletCharacter":
        return self ** -1

    def galois(self, a: int) -> "DirichletCharacter":
        """σ_a ∘ χ for σ_a: ζ_order ↦ ζ_order^a."""
        return self ** a

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return self.modulus == other.modulus and self.exponents == other.exponents

    def __hash__(self):
        return hash((self.modulus, self.exponents))

    def __repr__(self):
        return f"DirichletCharacter({self.label})"


def characters_mod(q: int) -> List[DirichletCharacter]:
    """All φ(q) characters mod q, ordered by exponent vector."""
    orders = [c[2] for c in _unit_group(q)]
    return [DirichletCharacter(q, e) for e in itertools.product(*(range(o) for o in orders))]


def evaluate(chi: DirichletCharacter, n: int) -> CycNumber:
    return chi.evaluate(n)


def conductor(chi: DirichletCharacter) -> int:
    return chi.conductor


def primitive_part(chi: DirichletCharacter) -> DirichletCharacter:
    return chi.primitive_part()


def factor_character(chi: DirichletCharacter, q1: int, q2: int) -> Tuple[DirichletCharacter, DirichletCharacter]:
    """Split χ mod q1·q2 (coprime) as χ1·χ2 with χi mod qi."""
    if q1 * q2 != chi.modulus or gcd(q1, q2) != 1:
        raise ContractViolation(f"{q1}·{q2} is not a coprime splitting of {chi.modulus}")
    first = DirichletCharacter.from_values(q1, lambda g: chi.log_value(crt_lift(g, q1, q2)), chi.order)
    second = DirichletCharacter.from_values(q2, lambda g: chi.log_value(crt_lift(g, q2, q1)), chi.order)
    return first, second


@lru_cache(maxsize=None)
def gauss_sum(chi: DirichletCharacter) -> CycNumber:
    """G(χ) = Σ_{u mod q} χ(u) e(u/q)."""
    q = chi.modulus
    M = lcm(chi.order, q)
    counts = [0] * M
    for u in range(q):
        t = chi.log_value(u)
        if t is not None:
            counts[(t * (M // chi.order) + u * (M // q)) % M] += 1
    return CycNumber.from_exponent_counts(M, counts)


def jacobi_sum(chi: DirichletCharacter, psi: DirichletCharacter) -> CycNumber:
    """J(χ, ψ) = Σ_{a mod q} χ(a) ψ(1 - a)."""
    if chi.modulus != psi.modulus:
        raise ContractViolation("Jacobi sums need characters of the same modulus")
    M = lcm(chi.order, psi.order)
    counts = [0] * M
    for a in range(chi.modulus):
        s, t = chi.log_value(a), psi.log_value(1 - a)
        if s is not None and t is not None:
            counts[(s * (M // chi.order) + t * (M // psi.order)) % M] += 1
    return CycNumber.from_exponent_counts(M, counts)


def residue_split_sum(N: int, f: Callable[[int], CycNumber]) -> CycNumber:
    """Σ_{d|N} μ(d) Σ_{m mod N/d} f(dm), which equals Σ_{n mod N, (n,N)=1} f(n)."""
    total = CycNumber.zero()
    for d in divisors(N):
        mu = mobius(d)
        if mu:
            for m in range(N // d):
                total = total + f(d * m) * mu
    return total


# ---------------------------------------------------------------------------
# Quadratic characters
# ---------------------------------------------------------------------------

def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    twos = 0
    while n % 2 == 0:
        n //= 2
        twos += 1
    if twos:
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5) and twos % 2:
            result = -result
    if n == 1:
        return result
    return result * int(jacobi_symbol(a % n, n))


def fundamental_discriminant(D: int) -> int:
    """Fundamental discriminant D0 with D/D0 a square."""
    if D == 0 or D % 4 not in (0, 1):
        raise InvalidDiscriminantError(f"{D} is not a discriminant (must be ≡ 0, 1 mod 4)")
    core = -1 if D < 0 else 1
    for p, e in factorint(abs(D)).items():
        if e % 2:
            core *= p
    return core if core % 4 == 1 else 4 * core


@lru_cache(maxsize=None)
def kronecker_character(D0: int) -> DirichletCharacter:
    """The primitive quadratic character n ↦ (D0/n) modulo |D0|."""
    q = abs(D0)
    if q == 1:
        return DirichletCharacter.trivial()
    return DirichletCharacter.from_values(q, lambda g: 0 if kronecker_symbol(D0, g) == 1 else 1, 2)


# ---------------------------------------------------------------------------
# Bernoulli polynomials, Γ at half-integers, L-values
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    # B_1 = -1/2 convention
    if n == 0:
        return Fraction(1)
    return -sum(comb(n + 1, j) * bernoulli_number(j) for j in range(n)) / (n + 1)


def bernoulli_polynomial(s: int, x: Rational) -> Fraction:
    x = Fraction(x)
    return sum(comb(s, j) * bernoulli_number(j) * x ** (s - j) for j in range(s + 1))


def gamma_half_integer(x: Rational) -> Tuple[Fraction, int]:
    """Γ(x) for x ∈ (1/2)Z as (r, h) with Γ(x) = r·√π^h."""
    x = Fraction(x)
    if x.denominator == 1:
        if x <= 0:
            raise ValueError(f"Γ has a pole at {x}")
        return Fraction(factorial(int(x) - 1)), 0
    if x.denominator != 2:
        raise ValueError(f"{x} is not a half-integer")
    if x > 0:
        n = int(x - Fraction(1, 2))
        return Fraction(factorial(2 * n), 4 ** n * factorial(n)), 1
    value, h = gamma_half_integer(x + 1)
    return value / x, h


class TranscendentalLedger:
    """
    Number of the form value · π^pi_exp · i^i_exp · √radicand.

    Args:
        value: Cyclotomic (or rational) part
        pi_exp: Integer power of π
        i_exp: Power of i, kept mod 4
        radicand: Positive integer; its square part is moved into value
    """

    __slots__ = ("value", "pi_exp", "i_exp", "radicand")

    def __init__(self, value, pi_exp: int = 0, i_exp: int = 0, radicand: int = 1):
        value = as_cyc(value)
        radicand = int(radicand)
        if radicand < 1:
            raise ValueError(f"radicand must be positive, got {radicand}")
        square, free = _split_square(radicand)
        if square != 1:
            value = value * square
        if value.is_zero():
            pi_exp, i_exp, free = 0, 0, 1
        self.value = value
        self.pi_exp = int(pi_exp)
        self.i_exp = int(i_exp) % 4
        self.radicand = free

    @classmethod
    def sqrt_of(cls, q: Rational) -> "TranscendentalLedger":
        q = Fraction(q)
        return cls(Fraction(1, q.denominator), radicand=q.numerator * q.denominator)

    def __mul__(self, other):
        if not isinstance(other, TranscendentalLedger):
            other = TranscendentalLedger(other)
        return TranscendentalLedger(self.value * other.value, self.pi_exp + other.pi_exp,
                                    self.i_exp + other.i_exp, self.radicand * other.radicand)

    __rmul__ = __mul__

    def inverse(self) -> "TranscendentalLedger":
        return TranscendentalLedger(self.value.inverse() / self.radicand, -self.pi_exp,
                                    -self.i_exp, self.radicand)

    def __truediv__(self, other):
        if not isinstance(other, TranscendentalLedger):
            other = TranscendentalLedger(other)
        return self * other.inverse()

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def is_rational_cyclotomic(self) -> bool:
        return self.pi_exp == 0 and self.radicand == 1

    def absorbed_conductor(self) -> int:
        extra = sqrt_conductor(self.radicand) if self.radicand > 1 else 1
        return lcm(self.value.conductor, 4 if self.i_exp else 1, extra)

    def absorb_algebraic(self) -> "TranscendentalLedger":
        """Fold i^i_exp and √radicand into the cyclotomic value."""
        value = self.value
        if self.i_exp:
            value = value * CycNumber.root_of_unity(4, self.i_exp)
        if self.radicand > 1:
            value = value * sqrt_cyclotomic(self.radicand)
        return TranscendentalLedger(value, self.pi_exp)

    def to_mpc(self):
        return (self.value.to_mpc() * mpmath.pi ** self.pi_exp * mpmath.mpc(0, 1) ** self.i_exp
                * mpmath.sqrt(self.radicand))

    def __repr__(self):
        return (f"TranscendentalLedger({self.value!r}, pi^{self.pi_exp}, "
                f"i^{self.i_exp}, sqrt({self.radicand}))")


def l_value_nonpositive(xi0: DirichletCharacter, s: int) -> CycNumber:
    """L(ξ̄0, 1 - s) for a primitive ξ0 with ξ0(-1) = (-1)^s."""
    if s < 1:
        raise ValueError(f"s must be a positive integer, got {s}")
    if not xi0.is_primitive():
        raise ContractViolation(f"{xi0.label} is not primitive")
    if xi0.parity != s % 2:
        raise ParityError(f"L({xi0.label}, {1 - s}) requested with parity mismatch")
    f0 = xi0.modulus
    conj = xi0.conjugate()
    total = CycNumber.zero()
    for a in range(1, f0 + 1):
        value = conj.evaluate(a)
        if not value.is_zero():
            total = total + value * bernoulli_polynomial(s, Fraction(a, f0))
    return total * (-Fraction(f0) ** (s - 1) / s)


@lru_cache(maxsize=None)
def l_value_positive(xi: DirichletCharacter, s: int) -> TranscendentalLedger:
    """
    L(ξ, s) through the functional equation of the primitive part ξ0.

    Imprimitive characters pick up the Euler factors Π_{p | q} (1 - ξ0(p) p^{-s}).
    """
    xi0 = xi.primitive_part()
    f0, delta = xi0.modulus, xi0.parity
    if s < 1 or (s - delta) % 2:
        raise ParityError(f"L({xi.label}, {s}) is not covered by the functional equation")
    lower = l_value_nonpositive(xi0, s)
    num, h_num = gamma_half_integer(Fraction(1 - s + delta, 2))
    den, h_den = gamma_half_integer(Fraction(s + delta, 2))
    pi_twice = 2 * s - 1 + h_num - h_den
    value = lower * (num / den / Fraction(f0) ** s)
    for p in factorint(xi.modulus):
        value = value * (1 - xi0.evaluate(p) * Fraction(1, p ** s))
    if xi0.order <= 2 and f0 > 1:
        # G(ξ0) = i^δ √f0
        return TranscendentalLedger(value, pi_twice // 2, 0, f0)
    return TranscendentalLedger(value * gauss_sum(xi0), pi_twice // 2, -delta)
