"""
Lattice Core
Even lattices, discriminant forms, isotropic subgroups and the lifting map
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm, prod
from typing import Dict, List, Sequence, Tuple

import numpy as np
from sympy import Matrix, factorint

from exact_arith import ContractViolation, CycNumber, sqrt_cyclotomic

Vector = Tuple[Fraction, ...]


class InvalidLatticeError(ValueError):
    """Raised for Gram matrices that do not define an even lattice."""


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> Tuple[List[List[int]], List[int], List[List[int]]]:
    """
    Smith normal form with transforms.

    Returns:
        (U, diagonal, V) with U·A·V diagonal, U and V unimodular and each
        diagonal entry dividing the next.
    """
    S = [[int(v) for v in row] for row in matrix]
    m = len(S)
    n = len(S[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(a, b):
        S[a], S[b] = S[b], S[a]
        U[a], U[b] = U[b], U[a]

    def swap_cols(a, b):
        for row in S:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]

    def add_row(target, source, factor):
        S[target] = [x + factor * y for x, y in zip(S[target], S[source])]
        U[target] = [x + factor * y for x, y in zip(U[target], U[source])]

    def add_col(target, source, factor):
        for row in S:
            row[target] += factor * row[source]
        for row in V:
            row[target] += factor * row[source]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    if S[i][j] and (pivot is None or abs(S[i][j]) < abs(S[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            clean = True
            for i in range(t + 1, m):
                q = S[i][t] // S[t][t]
                if q:
                    add_row(i, t, -q)
                if S[i][t]:
                    clean = False
            for j in range(t + 1, n):
                q = S[t][j] // S[t][t]
                if q:
                    add_col(j, t, -q)
                if S[t][j]:
                    clean = False
            if not clean:
                continue
            offender = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                             if S[i][j] % S[t][t]), None)
            if offender is None:
                break
            add_row(t, offender[0], 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    diagonal = [S[i][i] for i in range(min(m, n))]
    return U, diagonal, V


def positive_eigenvalue_count(matrix: Matrix) -> int:
    """
    Number of positive eigenvalues of a non-singular symmetric integer matrix.

    All roots of the characteristic polynomial are real, so the sign changes of
    its coefficients count the positive ones exactly.
    """
    signs = [1 if c > 0 else -1 for c in matrix.charpoly().all_coeffs() if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


class Lattice:
    """
    Even lattice Z^m with Gram matrix G and quadratic form Q(x) = xᵀGx/2.

    Args:
        gram: Symmetric integer matrix with even diagonal and nonzero determinant
    """

    def __init__(self, gram: Sequence[Sequence[int]]):
        rows = [[int(v) for v in row] for row in gram]
        m = len(rows)
        if any(len(row) != m for row in rows):
            raise InvalidLatticeError("Gram matrix must be square")
        for i in range(m):
            if rows[i][i] % 2:
                raise InvalidLatticeError(f"diagonal entry G[{i}][{i}] = {rows[i][i]} is odd")
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise InvalidLatticeError(f"Gram matrix is not symmetric at ({i}, {j})")
        self.gram = tuple(tuple(row) for row in rows)
        self.rank = m
        self.gram_array = np.array(rows, dtype=np.int64).reshape(m, m)
        if m:
            matrix = Matrix(rows)
            self.det = int(matrix.det())
            if self.det == 0:
                raise InvalidLatticeError("Gram matrix is singular")
            inverse = matrix.inv()
            self.gram_inverse = tuple(tuple(_to_fraction(inverse[i, j]) for j in range(m))
                                      for i in range(m))
            self.b_plus = positive_eigenvalue_count(matrix)
            self.b_minus = m - self.b_plus
        else:
            self.det = 1
            self.gram_inverse = ()
            self.b_plus = self.b_minus = 0
        self.level = self._compute_level()

    def _compute_level(self) -> int:
        N = 1
        for i in range(self.rank):
            for j in range(self.rank):
                entry = self.gram_inverse[i][j]
                if i == j:
                    entry = entry / 2
                N = lcm(N, entry.denominator)
        return N

    @property
    def signature(self) -> Tuple[int, int]:
        return self.b_plus, self.b_minus

    def apply(self, x: Sequence) -> Vector:
        return tuple(sum((Fraction(g) * xi for g, xi in zip(row, x)), Fraction(0)) for row in self.gram)

    def bilinear(self, x: Sequence, y: Sequence) -> Fraction:
        return sum((Fraction(a) * b for a, b in zip(x, self.apply(y))), Fraction(0))

    def q(self, x: Sequence) -> Fraction:
        return self.bilinear(x, x) / 2

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def __repr__(self):
        return f"Lattice({[list(r) for r in self.gram]})"


@dataclass(frozen=True, order=True)
class DiscElement:
    """Element of A in elementary-divisor coordinates, 0 <= coords[i] < d_i."""
    coords: Tuple[int, ...]

    def __repr__(self):
        return f"DiscElement{self.coords}"


class IsotropicSubgroup:
    """Subgroup of A generated by isotropic elements, enumerated explicitly."""

    def __init__(self, form: "DiscriminantForm", generators: Sequence[DiscElement]):
        self.form = form
        self.generators = tuple(form.element(g.coords) for g in generators)
        seen = {form.zero()}
        frontier = [form.zero()]
        while frontier:
            current = frontier.pop()
            for g in self.generators:
                nxt = form.add(current, g)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        self.elements = tuple(sorted(seen))
        bad = [h for h in self.elements if form.q_value(h) != 0]
        if bad:
            raise ContractViolation(f"subgroup is not isotropic: Q({bad[0].coords}) = {form.q_value(bad[0])}")

    def __contains__(self, item: DiscElement) -> bool:
        return item in self.elements

    def __len__(self) -> int:
        return len(self.elements)


class DiscriminantForm:
    """
    Finite quadratic module A = L'/L in Smith-normal-form coordinates.

    The change of basis is retained so that elements can be lifted to dual
    lattice vectors (lift) and dual vectors mapped back (to_coords).
    """

    def __init__(self, lattice: Lattice, snf_diagonal: Sequence[int],
                 transform: Sequence[Sequence[int]], inverse_transform: Sequence[Sequence[int]]):
        self.lattice = lattice
        self._snf_diagonal = tuple(snf_diagonal)
        self._inverse_transform = tuple(tuple(row) for row in inverse_transform)
        self._positions = tuple(i for i, d in enumerate(snf_diagonal) if d > 1)
        self.elementary_divisors = tuple(snf_diagonal[i] for i in self._positions)
        m = lattice.rank
        self.basis_map = tuple(tuple(Fraction(transform[k][i], snf_diagonal[i]) for k in range(m))
                               for i in self._positions)
        self.order = prod(self.elementary_divisors)
        if self.order != abs(lattice.det):
            raise ArithmeticError(f"|A| = {self.order} differs from |det| = {abs(lattice.det)}")
        self.exponent = self.elementary_divisors[-1] if self.elementary_divisors else 1
        self.sig_mod8 = (lattice.b_plus - lattice.b_minus) % 8
        self.q_table = tuple(lattice.q(b) % 1 for b in self.basis_map)
        self.pairing_table = tuple(tuple(lattice.bilinear(b, c) % 1 for c in self.basis_map)
                                   for b in self.basis_map)
        self._elements = None

    # -- elements ---------------------------------------------------------
    def element(self, coords: Sequence[int]) -> DiscElement:
        if len(coords) != len(self.elementary_divisors):
            raise ContractViolation(
                f"expected {len(self.elementary_divisors)} coordinates, got {len(coords)}")
        return DiscElement(tuple(int(c) % d for c, d in zip(coords, self.elementary_divisors)))

    def zero(self) -> DiscElement:
        return DiscElement((0,) * len(self.elementary_divisors))

    def elements(self) -> List[DiscElement]:
        if self._elements is None:
            self._elements = [DiscElement(c) for c in
                              itertools.product(*(range(d) for d in self.elementary_divisors))]
        return self._elements

    def add(self, x: DiscElement, y: DiscElement) -> DiscElement:
        return self.element([a + b for a, b in zip(x.coords, y.coords)])

    def neg(self, x: DiscElement) -> DiscElement:
        return self.element([-a for a in x.coords])

    def sub(self, x: DiscElement, y: DiscElement) -> DiscElement:
        return self.element([a - b for a, b in zip(x.coords, y.coords)])

    def scale(self, n: int, x: DiscElement) -> DiscElement:
        return self.element([n * a for a in x.coords])

    def divide(self, x: DiscElement, r: int) -> DiscElement:
        """x/r for r coprime to the exponent of A."""
        if gcd(r, self.exponent) != 1:
            raise ContractViolation(f"{r} is not invertible modulo the exponent {self.exponent}")
        return self.scale(pow(r, -1, self.exponent) if self.exponent > 1 else 0, x)

    # -- lattice maps -----------------------------------------------------
    def lift(self, x: DiscElement) -> Vector:
        """Dual-lattice representative Σ c_i b_i."""
        m = self.lattice.rank
        return tuple(sum((c * b[k] for c, b in zip(x.coords, self.basis_map)), Fraction(0))
                     for k in range(m))

    def to_coords(self, vector: Sequence) -> DiscElement:
        """Class of a dual-lattice vector modulo L."""
        coords = []
        for i, row in enumerate(self._inverse_transform):
            y = sum((Fraction(a) * Fraction(v) for a, v in zip(row, vector)), Fraction(0))
            scaled = y * self._snf_diagonal[i]
            if scaled.denominator != 1:
                raise ContractViolation(f"{tuple(vector)} is not in the dual lattice")
            coords.append(int(scaled))
        return self.element([coords[i] for i in self._positions])

    # -- quadratic structure ----------------------------------------------
    def q_value(self, x: DiscElement) -> Fraction:
        total = Fraction(0)
        c = x.coords
        for i in range(len(c)):
            if c[i]:
                total += c[i] * c[i] * self.q_table[i]
                for j in range(i + 1, len(c)):
                    if c[j]:
                        total += c[i] * c[j] * self.pairing_table[i][j]
        return total % 1

    def pairing(self, x: DiscElement, y: DiscElement) -> Fraction:
        total = Fraction(0)
        for i, a in enumerate(x.coords):
            if a:
                for j, b in enumerate(y.coords):
                    if b:
                        total += a * b * self.pairing_table[i][j]
        return total % 1

    def order_of(self, x: DiscElement) -> int:
        return lcm(*(d // gcd(d, c) for c, d in zip(x.coords, self.elementary_divisors)))

    def isotropic_elements(self) -> List[DiscElement]:
        return [x for x in self.elements() if self.q_value(x) == 0]

    def subgroup(self, generators: Sequence[DiscElement]) -> IsotropicSubgroup:
        return IsotropicSubgroup(self, generators)

    def orthogonal_complement(self, H: IsotropicSubgroup) -> List[DiscElement]:
        return [x for x in self.elements()
                if all(self.pairing(x, h) == 0 for h in H.generators)]

    def milgram_check(self) -> bool:
        """Σ_γ e(Q(γ)) = √|A|·e(sig/8), evaluated exactly."""
        M = lcm(self.lattice.level, 8)
        counts = [0] * M
        for x in self.elements():
            counts[int(self.q_value(x) * M)] += 1
        left = CycNumber.from_exponent_counts(M, counts)
        square = prod(p ** (e // 2) for p, e in factorint(self.order).items())
        free = self.order // (square * square)
        right = sqrt_cyclotomic(free) * square * CycNumber.root_of_unity(8, self.sig_mod8)
        return left == right

    def __repr__(self):
        return f"DiscriminantForm(divisors={self.elementary_divisors}, sig={self.sig_mod8})"


def build_discriminant_form(lattice: Lattice) -> DiscriminantForm:
    """Discriminant form of an even lattice via the Smith normal form of G."""
    if lattice.rank == 0:
        return DiscriminantForm(lattice, (), (), ())
    _, diagonal, V = smith_normal_form(lattice.gram)
    inverse = Matrix(V).inv()
    m = lattice.rank
    inverse_rows = [[int(inverse[i, j]) for j in range(m)] for i in range(m)]
    return DiscriminantForm(lattice, diagonal, V, inverse_rows)


def q_value(form: DiscriminantForm, x: DiscElement) -> Fraction:
    return form.q_value(x)


def pairing(form: DiscriminantForm, x: DiscElement, y: DiscElement) -> Fraction:
    return form.pairing(x, y)


def order_of(form: DiscriminantForm, x: DiscElement) -> int:
    return form.order_of(x)


class QuotientModule:
    """
    B = H^⊥/H, realised as the discriminant form of the overlattice L_H
    spanned by L and lifts of H.

    Attributes:
        ambient: The form A
        subgroup: The isotropic subgroup H
        lattice: The overlattice L_H (same rank and signature as L)
        form: Discriminant form of L_H, isomorphic to B
        complement: Elements of H^⊥ in A
    """

    def __init__(self, ambient: DiscriminantForm, subgroup: IsotropicSubgroup):
        self.ambient = ambient
        self.subgroup = subgroup
        base = ambient.lattice
        m = base.rank
        vectors = [tuple(Fraction(int(i == k)) for k in range(m)) for i in range(m)]
        vectors += [ambient.lift(h) for h in subgroup.generators]
        den = lcm(*(x.denominator for v in vectors for x in v)) if m else 1
        generator_matrix = [[int(v[k] * den) for v in vectors] for k in range(m)]
        if m:
            U, diagonal, _ = smith_normal_form(generator_matrix)
            U_inv = Matrix(U).inv()
            self._basis = tuple(tuple(Fraction(int(U_inv[k, i]) * diagonal[i], den) for i in range(m))
                                for k in range(m))
            basis_inverse = Matrix([[x.numerator * (den // x.denominator) for x in row]
                                    for row in self._basis]).inv() * den
            self._basis_inverse = tuple(tuple(_to_fraction(basis_inverse[i, j]) for j in range(m))
                                        for i in range(m))
        else:
            self._basis = ()
            self._basis_inverse = ()
        gram = []
        for i in range(m):
            column_i = [self._basis[k][i] for k in range(m)]
            row = []
            for j in range(m):
                column_j = [self._basis[k][j] for k in range(m)]
                entry = base.bilinear(column_i, column_j)
                if entry.denominator != 1:
                    raise ContractViolation("overlattice is not integral; H is not isotropic")
                row.append(int(entry))
            gram.append(row)
        self.lattice = Lattice(gram)
        self.form = build_discriminant_form(self.lattice)
        self.complement = ambient.orthogonal_complement(subgroup)
        self.fanout: Dict[DiscElement, List[DiscElement]] = {}
        for x in self.complement:
            self.fanout.setdefault(self.project(x), []).append(x)

    @staticmethod
    def _matvec(matrix, vector) -> Vector:
        return tuple(sum((a * Fraction(v) for a, v in zip(row, vector)), Fraction(0)) for row in matrix)

    def project(self, x: DiscElement) -> DiscElement:
        """Image of x ∈ H^⊥ in B."""
        if any(self.ambient.pairing(x, h) != 0 for h in self.subgroup.generators):
            raise ContractViolation(f"{x.coords} is not orthogonal to H")
        return self.form.to_coords(self._matvec(self._basis_inverse, self.ambient.lift(x)))

    def section(self, y: DiscElement) -> DiscElement:
        """A representative in H^⊥ of y ∈ B."""
        return self.ambient.to_coords(self._matvec(self._basis, self.form.lift(y)))

    def preimages(self, y: DiscElement) -> List[DiscElement]:
        return list(self.fanout.get(y, []))


def isotropic_subgroup(form: DiscriminantForm, generators: Sequence[DiscElement]) -> IsotropicSubgroup:
    return IsotropicSubgroup(form, generators)


def orthogonal_complement(form: DiscriminantForm, H: IsotropicSubgroup) -> List[DiscElement]:
    return form.orthogonal_complement(H)


def quotient_module(form: DiscriminantForm, H: IsotropicSubgroup) -> QuotientModule:
    return QuotientModule(form, H)


def lift_up(table, quotient: QuotientModule):
    """f↑ = Σ_{γ∈H^⊥} f^{γ+H} e_γ for a Fourier table over B."""
    return table.relabel(quotient.ambient, quotient.fanout)
