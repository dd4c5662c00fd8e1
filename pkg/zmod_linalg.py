"""
Exact linear algebra over the residue rings Z/mZ.

Submodules of (Z/mZ)^r are carried by their Howell basis. The Howell basis of a
span is unique, so two submodules are equal exactly when their rows are equal.
Quotients of submodules are classified through an integer Smith normal form
with explicit m*e_i relations.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from sympy import ZZ, Matrix, factorint
from sympy.matrices.normalforms import smith_normal_decomp

logger = logging.getLogger("h1loc.linalg")

Vector = tuple[int, ...]

_INT64_MAX = 2**63 - 1


class ModulusError(ValueError):
    """Raised for a modulus below 2."""


class ModulusMismatchError(ValueError):
    """Raised when two operands live over different residue rings."""


class DimensionError(ValueError):
    """Raised when vector or matrix shapes do not line up."""


class OverflowRiskError(ValueError):
    """Raised when int64 products could overflow for the given modulus."""


class NotContainedError(ValueError):
    """Raised when a submodule is not contained in the claimed ambient span."""


def check_modulus(modulus: int) -> int:
    """Validate a modulus and return it."""
    if not isinstance(modulus, int) or isinstance(modulus, bool) or modulus < 2:
        raise ModulusError(f"modulus must be an integer >= 2, got {modulus!r}")
    return modulus


def check_product_width(modulus: int, width: int) -> None:
    """Reject moduli whose dot products of length *width* overflow int64."""
    if max(width, 1) * (modulus - 1) ** 2 > _INT64_MAX:
        raise OverflowRiskError(f"modulus {modulus} too large for exact int64 products of width {width}")


# ---------------------------------------------------------------------------
# ResidueMatrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidueMatrix:
    """An r x c matrix of residues modulo ``modulus``, stored row-major."""

    modulus: int
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        check_modulus(self.modulus)
        if self.rows < 0 or self.cols < 0 or len(self.entries) != self.rows * self.cols:
            raise DimensionError(f"{len(self.entries)} entries do not fill a {self.rows}x{self.cols} matrix")
        if any(not 0 <= e < self.modulus for e in self.entries):
            raise ValueError(f"entries must be reduced modulo {self.modulus}")
        check_product_width(self.modulus, self.cols)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], modulus: int, cols: int | None = None) -> ResidueMatrix:
        """Build from nested rows, reducing every entry mod m."""
        check_modulus(modulus)
        width = len(rows[0]) if rows else (cols or 0)
        if cols is not None and rows and width != cols:
            raise DimensionError(f"expected {cols} columns, got {width}")
        flat: list[int] = []
        for idx, row in enumerate(rows):
            if len(row) != width:
                raise DimensionError(f"row {idx} has length {len(row)}, expected {width}")
            flat.extend(int(x) % modulus for x in row)
        return cls(modulus, len(rows), width, tuple(flat))

    @classmethod
    def from_array(cls, array: np.ndarray, modulus: int) -> ResidueMatrix:
        reduced = np.mod(np.asarray(array, dtype=np.int64), modulus)
        n_rows, n_cols = reduced.shape
        return cls(modulus, n_rows, n_cols, tuple(int(x) for x in reduced.ravel()))

    @classmethod
    def identity(cls, size: int, modulus: int) -> ResidueMatrix:
        return cls.from_rows([[1 if i == j else 0 for j in range(size)] for i in range(size)], modulus, cols=size)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int) -> ResidueMatrix:
        return cls(modulus, rows, cols, (0,) * (rows * cols))

    @cached_property
    def array(self) -> np.ndarray:
        view = np.array(self.entries, dtype=np.int64).reshape(self.rows, self.cols)
        view.setflags(write=False)
        return view

    @property
    def key(self) -> tuple[int, ...]:
        return self.entries

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def row_list(self) -> list[Vector]:
        return [self.row(i) for i in range(self.rows)]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def transpose(self) -> ResidueMatrix:
        return ResidueMatrix.from_rows([self.column(j) for j in range(self.cols)], self.modulus, cols=self.rows)

    def _require_same_ring(self, other: ResidueMatrix) -> None:
        if other.modulus != self.modulus:
            raise ModulusMismatchError(f"modulus {self.modulus} does not match {other.modulus}")

    def __matmul__(self, other: ResidueMatrix) -> ResidueMatrix:
        self._require_same_ring(other)
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        return ResidueMatrix.from_array((self.array @ other.array) % self.modulus, self.modulus)

    def __add__(self, other: ResidueMatrix) -> ResidueMatrix:
        self._require_same_ring(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("matrix shapes differ")
        return ResidueMatrix.from_array(self.array + other.array, self.modulus)

    def __sub__(self, other: ResidueMatrix) -> ResidueMatrix:
        self._require_same_ring(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("matrix shapes differ")
        return ResidueMatrix.from_array(self.array - other.array, self.modulus)

    def apply(self, v: Sequence[int]) -> Vector:
        """Matrix-vector product."""
        if len(v) != self.cols:
            raise DimensionError(f"vector of length {len(v)} does not match {self.cols} columns")
        product = (self.array @ np.array([int(x) % self.modulus for x in v], dtype=np.int64)) % self.modulus
        return tuple(int(x) for x in product)

    def reduce_modulus(self, modulus: int) -> ResidueMatrix:
        check_modulus(modulus)
        if self.modulus % modulus:
            raise ModulusError(f"{modulus} does not divide {self.modulus}")
        return ResidueMatrix(modulus, self.rows, self.cols, tuple(e % modulus for e in self.entries))

    def submatrix(self, row_start: int, col_start: int, rows: int, cols: int) -> ResidueMatrix:
        picked = [self.row(i)[col_start : col_start + cols] for i in range(row_start, row_start + rows)]
        return ResidueMatrix.from_rows(picked, self.modulus, cols=cols)

    def determinant(self) -> int:
        """det mod m."""
        if not self.is_square:
            raise DimensionError("determinant of a non-square matrix")
        if self.rows == 0:
            return 1 % self.modulus
        return int(Matrix(self.rows, self.cols, list(self.entries)).det()) % self.modulus

    def is_invertible(self) -> bool:
        return self.is_square and math.gcd(self.determinant(), self.modulus) == 1

    def inverse(self) -> ResidueMatrix:
        """Inverse mod m; raises when the determinant is not a unit."""
        if not self.is_invertible():
            raise ValueError(f"matrix is not invertible mod {self.modulus}")
        inv = Matrix(self.rows, self.cols, list(self.entries)).inv_mod(self.modulus)
        return ResidueMatrix.from_rows(inv.tolist(), self.modulus, cols=self.cols)

    def __str__(self) -> str:
        return str([list(self.row(i)) for i in range(self.rows)])


# ---------------------------------------------------------------------------
# Howell form
# ---------------------------------------------------------------------------


def _gcdex(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b) for a, b >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return a, s0, t0


def _unit_normalizer(a: int, modulus: int) -> tuple[int, int]:
    """Return (w, g) with w a unit mod m and w*a == g == gcd(a, m) (mod m)."""
    g = math.gcd(a, modulus)
    reduced_modulus = modulus // g
    w = pow(a // g, -1, reduced_modulus) if reduced_modulus > 1 else 1
    while math.gcd(w, modulus) != 1:
        w += reduced_modulus
    return w % modulus, g


def _leading(row: Sequence[int]) -> int:
    for col, x in enumerate(row):
        if x:
            return col
    return len(row)


def _howell_rows(work: list[list[int]], modulus: int, width: int) -> list[list[int]]:
    """Howell rows of the span of *work*; rows must be reduced and nonzero."""
    m = modulus
    result: list[list[int]] = []
    pivot_cols: list[int] = []
    for col in range(width):
        pivot: list[int] | None = None
        rest: list[list[int]] = []
        for row in work:
            if row[col] == 0:
                rest.append(row)
                continue
            if pivot is None:
                pivot = row
                continue
            a, b = pivot[col], row[col]
            g, s, t = _gcdex(a, b)
            u, v = b // g, a // g
            eliminated = [(v * y - u * x) % m for x, y in zip(pivot, row)]
            pivot = [(s * x + t * y) % m for x, y in zip(pivot, row)]
            if any(eliminated):
                rest.append(eliminated)
        if pivot is None:
            work = rest
            continue
        w, g = _unit_normalizer(pivot[col], m)
        pivot = [(w * x) % m for x in pivot]
        annihilator = [((m // g) * x) % m for x in pivot]
        if any(annihilator):
            rest.append(annihilator)
        result.append(pivot)
        pivot_cols.append(col)
        work = rest

    for j, col in enumerate(pivot_cols):
        g = result[j][col]
        for i in range(j):
            q = result[i][col] // g
            if q:
                result[i] = [(x - q * y) % m for x, y in zip(result[i], result[j])]
    return result


def _nonzero_rows(rows: Sequence[Sequence[int]], modulus: int, width: int) -> list[list[int]]:
    kept = []
    for idx, row in enumerate(rows):
        if len(row) != width:
            raise DimensionError(f"row {idx} has length {len(row)}, expected {width}")
        reduced = [int(x) % modulus for x in row]
        if any(reduced):
            kept.append(reduced)
    return kept


@dataclass(frozen=True)
class SubmoduleBasis:
    """Howell basis of a submodule of (Z/mZ)^ambient_rank."""

    modulus: int
    ambient_rank: int
    rows: tuple[Vector, ...]

    @classmethod
    def zero(cls, modulus: int, ambient_rank: int) -> SubmoduleBasis:
        return cls(check_modulus(modulus), ambient_rank, ())

    @classmethod
    def full(cls, modulus: int, ambient_rank: int) -> SubmoduleBasis:
        rows = [[1 if i == j else 0 for j in range(ambient_rank)] for i in range(ambient_rank)]
        return howell_form(rows, modulus, ambient_rank)

    @property
    def pivots(self) -> list[tuple[int, int]]:
        """(column, pivot value) for every row."""
        return [(col, row[col]) for row in self.rows for col in (_leading(row),)]

    @property
    def order(self) -> int:
        return span_order(self)

    @property
    def is_zero(self) -> bool:
        return not self.rows

    def __contains__(self, v: Sequence[int]) -> bool:
        return membership(self, v)[0]

    def same_ring(self, other: SubmoduleBasis) -> None:
        if other.modulus != self.modulus:
            raise ModulusMismatchError(f"modulus {self.modulus} does not match {other.modulus}")
        if other.ambient_rank != self.ambient_rank:
            raise DimensionError(f"rank {self.ambient_rank} does not match {other.ambient_rank}")


def howell_form(rows: Sequence[Sequence[int]], modulus: int, ambient_rank: int) -> SubmoduleBasis:
    """Return the unique Howell basis of the span of *rows*."""
    check_modulus(modulus)
    if ambient_rank < 0:
        raise DimensionError(f"ambient rank must be >= 0, got {ambient_rank}")
    work = _nonzero_rows(rows, modulus, ambient_rank)
    basis = _howell_rows(work, modulus, ambient_rank)
    if len(work) > 256:
        logger.debug("howell form: %d rows of width %d mod %d -> %d rows", len(work), ambient_rank, modulus, len(basis))
    return SubmoduleBasis(modulus, ambient_rank, tuple(tuple(r) for r in basis))


def extend_basis(basis: SubmoduleBasis, rows: Sequence[Sequence[int]], batch: int = 512) -> SubmoduleBasis:
    """Howell basis of span(basis) + span(rows), folding *rows* in batches."""
    current = basis
    pending = list(rows)
    for start in range(0, len(pending), batch):
        chunk = list(current.rows) + pending[start : start + batch]
        current = howell_form(chunk, basis.modulus, basis.ambient_rank)
    return current


def span_order(basis: SubmoduleBasis) -> int:
    """Number of elements in the span."""
    return math.prod(basis.modulus // g for _, g in basis.pivots)


def _check_vector(basis: SubmoduleBasis, v: Sequence[int]) -> list[int]:
    if len(v) != basis.ambient_rank:
        raise DimensionError(f"vector of length {len(v)} does not match rank {basis.ambient_rank}")
    return [int(x) % basis.modulus for x in v]


def membership(basis: SubmoduleBasis, v: Sequence[int]) -> tuple[bool, Vector | None]:
    """Decide v in span(basis); on success also return coefficients c with sum c_i * row_i == v."""
    m = basis.modulus
    residual = _check_vector(basis, v)
    coefficients = []
    for row in basis.rows:
        col = _leading(row)
        g = row[col]
        if residual[col] % g:
            return False, None
        q = residual[col] // g
        coefficients.append(q)
        if q:
            residual = [(x - q * y) % m for x, y in zip(residual, row)]
    if any(residual):
        return False, None
    return True, tuple(coefficients)


def reduce(basis: SubmoduleBasis, v: Sequence[int]) -> Vector:
    """Canonical representative of v modulo span(basis)."""
    m = basis.modulus
    residual = _check_vector(basis, v)
    for row in basis.rows:
        col = _leading(row)
        q = residual[col] // row[col]
        if q:
            residual = [(x - q * y) % m for x, y in zip(residual, row)]
    return tuple(residual)


def combine(basis: SubmoduleBasis, coefficients: Sequence[int]) -> Vector:
    """sum c_i * row_i (mod m)."""
    m = basis.modulus
    total = [0] * basis.ambient_rank
    for c, row in zip(coefficients, basis.rows):
        if c:
            total = [(x + c * y) % m for x, y in zip(total, row)]
    return tuple(total)


def enumerate_span(basis: SubmoduleBasis) -> Iterator[Vector]:
    """Every element of the span exactly once."""
    ranges = [range(basis.modulus // g) for _, g in basis.pivots]
    for coefficients in itertools.product(*ranges):
        yield combine(basis, coefficients)


def image(matrix: ResidueMatrix) -> SubmoduleBasis:
    """Column span of *matrix*."""
    return howell_form([matrix.column(j) for j in range(matrix.cols)], matrix.modulus, matrix.rows)


# ---------------------------------------------------------------------------
# Linear systems and submodule operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearSolution:
    solution: Vector | None
    kernel: SubmoduleBasis

    @property
    def solvable(self) -> bool:
        return self.solution is not None


def solve_linear(matrix: ResidueMatrix, b: Sequence[int]) -> LinearSolution:
    """Solve A x = b over Z/mZ, returning one solution (or None) and ker A."""
    if len(b) != matrix.rows:
        raise DimensionError(f"right-hand side has length {len(b)}, expected {matrix.rows}")
    m, n = matrix.modulus, matrix.cols
    augmented = [list(matrix.row(i)) + [int(b[i]) % m] for i in range(matrix.rows)]
    system = _howell_rows(_nonzero_rows(augmented, m, n + 1), m, n + 1)
    r = len(system)

    lifted = [[row[j] for row in system] + [1 if k == j else 0 for k in range(n)] for j in range(n)]
    stacked = _howell_rows(lifted, m, r + n)
    kernel = howell_form([row[r:] for row in stacked if not any(row[:r])], m, n)

    residual = [row[n] for row in system] + [0] * n
    for row in stacked:
        col = _leading(row)
        if col >= r:
            break
        g = row[col]
        if residual[col] % g:
            return LinearSolution(None, kernel)
        q = residual[col] // g
        if q:
            residual = [(x - q * y) % m for x, y in zip(residual, row)]
    if any(residual[:r]):
        return LinearSolution(None, kernel)
    return LinearSolution(tuple((-x) % m for x in residual[r:]), kernel)


def preimage(domain: SubmoduleBasis, matrix: ResidueMatrix, target: SubmoduleBasis) -> SubmoduleBasis:
    """{x in span(domain) : A x in span(target)}."""
    if matrix.modulus != domain.modulus or matrix.modulus != target.modulus:
        raise ModulusMismatchError("preimage operands use different moduli")
    if matrix.cols != domain.ambient_rank or matrix.rows != target.ambient_rank:
        raise DimensionError(
            f"{matrix.rows}x{matrix.cols} matrix does not map rank {domain.ambient_rank} into rank {target.ambient_rank}"
        )
    m, r, n = matrix.modulus, matrix.rows, matrix.cols
    rows = [list(matrix.apply(k)) + list(k) for k in domain.rows]
    rows += [list(t) + [0] * n for t in target.rows]
    stacked = _howell_rows(_nonzero_rows(rows, m, r + n), m, r + n)
    return howell_form([row[r:] for row in stacked if not any(row[:r])], m, n)


def kernel_within(domain: SubmoduleBasis, matrix: ResidueMatrix) -> SubmoduleBasis:
    """{x in span(domain) : A x = 0}."""
    return preimage(domain, matrix, SubmoduleBasis.zero(matrix.modulus, matrix.rows))


def intersect(a: SubmoduleBasis, b: SubmoduleBasis) -> SubmoduleBasis:
    """Zassenhaus intersection of two spans."""
    a.same_ring(b)
    m, n = a.modulus, a.ambient_rank
    rows = [list(x) + list(x) for x in a.rows] + [list(y) + [0] * n for y in b.rows]
    stacked = _howell_rows(_nonzero_rows(rows, m, 2 * n), m, 2 * n)
    return howell_form([row[n:] for row in stacked if not any(row[:n])], m, n)


def is_subspan(sub: SubmoduleBasis, ambient: SubmoduleBasis) -> bool:
    """Whether every row of *sub* lies in span(ambient)."""
    ambient.same_ring(sub)
    return all(membership(ambient, row)[0] for row in sub.rows)


# ---------------------------------------------------------------------------
# Smith normal form and quotient structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmithForm:
    """S A T = diag(diagonal) over Z; only T and its inverse are kept."""

    diagonal: tuple[int, ...]
    right: tuple[tuple[int, ...], ...]
    right_inverse: tuple[tuple[int, ...], ...]


def _integer_rows(matrix: Matrix) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(matrix[i, j]) for j in range(matrix.cols)) for i in range(matrix.rows))


def smith_form(matrix: Sequence[Sequence[int]], cols: int | None = None) -> SmithForm:
    """Integer Smith normal form with the right transform and its inverse."""
    rows = [[int(x) for x in row] for row in matrix]
    n_cols = cols if cols is not None else (len(rows[0]) if rows else 0)
    if not rows or not n_cols:
        identity = tuple(tuple(int(i == j) for j in range(n_cols)) for i in range(n_cols))
        return SmithForm((), identity, identity)
    diagonal_form, _, right = smith_normal_decomp(Matrix(rows), domain=ZZ)
    # T is unimodular, so its inverse stays integral
    right_inverse = right.inv()
    diagonal = tuple(abs(int(diagonal_form[t, t])) for t in range(min(len(rows), n_cols)))
    return SmithForm(diagonal, _integer_rows(right), _integer_rows(right_inverse))


@dataclass(frozen=True)
class AbelianStructure:
    """Finite abelian group Z/d_1 + ... + Z/d_k with d_1 | d_2 | ... | d_k."""

    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        factors = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", factors)
        if any(d < 2 for d in factors):
            raise ValueError(f"invariant factors must be >= 2, got {factors}")
        if any(b % a for a, b in zip(factors, factors[1:])):
            raise ValueError(f"invariant factors {factors} do not form a divisibility chain")

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def elementary_divisors(self) -> tuple[int, ...]:
        """Prime-power factors of the invariant factors, sorted."""
        divisors = []
        for d in self.invariant_factors:
            divisors.extend(p**e for p, e in factorint(d).items())
        return tuple(sorted(divisors))

    def element_order_census(self) -> dict[int, int]:
        """How many elements have each order."""
        census: dict[int, int] = {}
        for element in itertools.product(*(range(d) for d in self.invariant_factors)):
            order = math.lcm(*(d // math.gcd(x, d) for x, d in zip(element, self.invariant_factors)))
            census[order] = census.get(order, 0) + 1
        return census

    def __str__(self) -> str:
        if self.is_trivial:
            return "0"
        return " x ".join(f"Z/{d}" for d in self.invariant_factors)


def quotient_decomposition(ambient: SubmoduleBasis, sub: SubmoduleBasis) -> tuple[AbelianStructure, tuple[Vector, ...]]:
    """Invariant factors of span(ambient)/span(sub) and one generator per factor."""
    ambient.same_ring(sub)
    m = ambient.modulus
    sub_coefficients = []
    for idx, row in enumerate(sub.rows):
        contained, coefficients = membership(ambient, row)
        if not contained:
            raise NotContainedError(f"sub row {idx} is not in the ambient span")
        sub_coefficients.append(list(coefficients or ()))

    k = len(ambient.rows)
    if k == 0:
        return AbelianStructure(), ()

    relations: list[list[int]] = []
    for i, (row, (_, g)) in enumerate(zip(ambient.rows, ambient.pivots)):
        scaled = [0] * k
        scaled[i] = m
        relations.append(scaled)
        multiplier = m // g
        _, coefficients = membership(ambient, [(multiplier * x) % m for x in row])
        relation = [-c for c in coefficients or (0,) * k]
        relation[i] += multiplier
        relations.append(relation)
    relations.extend(sub_coefficients)

    snf = smith_form(relations, cols=k)
    factors: list[int] = []
    generators: list[Vector] = []
    for t, d in enumerate(snf.diagonal):
        if d == 1:
            continue
        if d == 0:
            raise RuntimeError("relation lattice lost full rank")
        factors.append(d)
        generators.append(combine(ambient, [c % m for c in snf.right_inverse[t]]))
    return AbelianStructure(tuple(factors)), tuple(generators)


def quotient_structure(ambient: SubmoduleBasis, sub: SubmoduleBasis) -> AbelianStructure:
    """Invariant factors of span(ambient)/span(sub)."""
    return quotient_decomposition(ambient, sub)[0]
