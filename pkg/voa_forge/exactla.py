"""Exact rational linear algebra: scalars, dense matrices and subspaces.

Every structure in voa_forge is a finite table of rationals, so this module
is the common ground. Scalars are :class:`fractions.Fraction` values and
never floats. Subspaces are kept in reduced row-echelon form so that two
equal subspaces compare equal as plain dataclasses.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence

import sympy

from voa_forge.errors import DimensionMismatchError, InputError, NotASubspaceError

logger = logging.getLogger(__name__)

Scalar = Fraction
Vector = tuple[Fraction, ...]

_RATIONAL_LITERAL = re.compile(r"[+-]?\d+(?:/\d+)?")


def parse_scalar(value: Any) -> Fraction:
    """Convert an integer or a "p/q" string into an exact scalar.

    Args:
        value: An int, a Fraction, or a string such as "3", "-1/2".

    Returns:
        The value as a Fraction in lowest terms.

    Raises:
        InputError: For floats, booleans, malformed strings or a zero
            denominator.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise InputError(
            f"Rational literal {value!r} is not allowed; use an integer or a 'p/q' string."
        )
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_LITERAL.fullmatch(text):
            raise InputError(f"Malformed rational literal: {value!r}")
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise InputError(f"Rational literal {value!r} has a zero denominator.")
    raise InputError(f"Expected an integer or 'p/q' string, got {type(value).__name__}.")


def format_scalar(value: Fraction) -> str:
    """Render a scalar as its canonical "p/q" (or "p") literal."""
    return str(value)


def vector(values: Iterable[Any]) -> Vector:
    """Build an exact vector from ints, Fractions or rational strings."""
    return tuple(parse_scalar(v) for v in values)


def zero_vector(n: int) -> Vector:
    return (Fraction(0),) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(Fraction(1) if k == i else Fraction(0) for k in range(n))


def add_vectors(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    if len(a) != len(b):
        raise DimensionMismatchError(f"Cannot add vectors of length {len(a)} and {len(b)}.")
    return tuple(x + y for x, y in zip(a, b))


def scale_vector(c: Fraction, a: Sequence[Fraction]) -> Vector:
    return tuple(c * x for x in a)


def linear_combination(coeffs: Sequence[Fraction], vectors: Sequence[Vector], n: int) -> Vector:
    """Return sum(c_i * v_i) as a length-n vector."""
    out = [Fraction(0)] * n
    for c, v in zip(coeffs, vectors):
        if c:
            for k, x in enumerate(v):
                if x:
                    out[k] += c * x
    return tuple(out)


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def is_zero_vector(a: Sequence[Fraction]) -> bool:
    return all(x == 0 for x in a)


@dataclass(frozen=True)
class Matrix:
    """A dense rows x cols matrix of Fractions, stored row-major."""

    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionMismatchError(
                f"Matrix entries do not match the declared shape {self.rows}x{self.cols}."
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]], cols: Optional[int] = None) -> "Matrix":
        """Build a matrix from nested sequences of ints, Fractions or strings.

        Args:
            rows: The matrix rows.
            cols: Column count; required when ``rows`` is empty.
        """
        entries = tuple(vector(r) for r in rows)
        if cols is None:
            if not entries:
                raise DimensionMismatchError("Column count is required for an empty matrix.")
            cols = len(entries[0])
        return cls(len(entries), cols, entries)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Fraction]], rows: int) -> "Matrix":
        return cls.from_rows(
            [[col[i] for col in columns] for i in range(rows)], cols=len(columns)
        )

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, tuple(zero_vector(cols) for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, tuple(unit_vector(n, i) for i in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[Any]) -> "Matrix":
        vals = vector(values)
        n = len(vals)
        return cls(n, n, tuple(scale_vector(vals[i], unit_vector(n, i)) for i in range(n)))

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "Matrix":
        return Matrix(
            self.cols, self.rows, tuple(self.column(j) for j in range(self.cols))
        )

    def apply(self, v: Sequence[Fraction]) -> Vector:
        """Return the matrix-vector product self @ v."""
        if len(v) != self.cols:
            raise DimensionMismatchError(
                f"Cannot apply a {self.rows}x{self.cols} matrix to a vector of length {len(v)}."
            )
        return tuple(dot(r, v) for r in self.entries)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}."
            )
        other_cols = [other.column(j) for j in range(other.cols)]
        return Matrix(
            self.rows,
            other.cols,
            tuple(tuple(dot(r, c) for c in other_cols) for r in self.entries),
        )

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("Cannot add matrices of different shapes.")
        return Matrix(
            self.rows,
            self.cols,
            tuple(add_vectors(a, b) for a, b in zip(self.entries, other.entries)),
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scaled(Fraction(-1))

    def scaled(self, c: Fraction) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(scale_vector(c, r) for r in self.entries))

    def trace(self) -> Fraction:
        if not self.is_square:
            raise DimensionMismatchError("Trace of a non-square matrix.")
        return sum((self.entries[i][i] for i in range(self.rows)), Fraction(0))

    def is_zero(self) -> bool:
        return all(is_zero_vector(r) for r in self.entries)

    def is_symmetric(self) -> bool:
        return self.is_square and self == self.transpose()

    def flatten(self) -> Vector:
        return tuple(x for r in self.entries for x in r)

    def to_json(self) -> list[list[str]]:
        """Serialize as an array of arrays of "p/q" strings."""
        return [[format_scalar(x) for x in r] for r in self.entries]

    @classmethod
    def from_json(cls, data: Any, cols: Optional[int] = None) -> "Matrix":
        if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
            raise InputError("A matrix must be a JSON array of arrays.")
        widths = {len(r) for r in data}
        if len(widths) > 1:
            raise InputError("Matrix rows have different lengths.")
        return cls.from_rows(data, cols=cols if not data else None)


def _reduce_rows(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Gauss-Jordan elimination in place; returns (rows, pivot columns)."""
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        pivot_row = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(m: Matrix) -> Matrix:
    """Return the reduced row-echelon form of ``m`` (same shape)."""
    rows, _ = _reduce_rows([list(r) for r in m.entries], m.cols)
    return Matrix(m.rows, m.cols, tuple(tuple(r) for r in rows))


def rank(m: Matrix) -> int:
    _, pivots = _reduce_rows([list(r) for r in m.entries], m.cols)
    return len(pivots)


def determinant(m: Matrix) -> Fraction:
    if not m.is_square:
        raise DimensionMismatchError("Determinant of a non-square matrix.")
    rows = [list(r) for r in m.entries]
    n = m.rows
    det = Fraction(1)
    for c in range(n):
        pivot_row = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != c:
            rows[c], rows[pivot_row] = rows[pivot_row], rows[c]
            det = -det
        det *= rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] / rows[c][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return det


def inverse(m: Matrix) -> Matrix:
    """Inverse of an invertible square matrix.

    Raises:
        DimensionMismatchError: If ``m`` is not square or is singular.
    """
    if not m.is_square:
        raise DimensionMismatchError("Inverse of a non-square matrix.")
    columns = []
    for j in range(m.rows):
        col = solve(m, unit_vector(m.rows, j))
        if col is None:
            raise DimensionMismatchError("Matrix is singular.")
        columns.append(col)
    return Matrix.from_columns(columns, m.rows)


def kernel(m: Matrix) -> "Subspace":
    """Return {v : m v = 0} as a canonical subspace of Q^cols."""
    rows, pivots = _reduce_rows([list(r) for r in m.entries], m.cols)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -rows[r][f]
        basis.append(tuple(v))
    return Subspace.span(basis, m.cols)


def solve(m: Matrix, b: Sequence[Fraction]) -> Optional[Vector]:
    """Solve m x = b.

    Returns:
        The echelon-canonical particular solution (free variables set to
        zero), or None when the system is inconsistent.
    """
    if len(b) != m.rows:
        raise DimensionMismatchError(
            f"Right-hand side has length {len(b)}, expected {m.rows}."
        )
    augmented = [list(r) + [Fraction(x)] for r, x in zip(m.entries, b)]
    rows, pivots = _reduce_rows(augmented, m.cols + 1)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [Fraction(0)] * m.cols
    for r, p in enumerate(pivots):
        x[p] = rows[r][m.cols]
    return tuple(x)


def image(m: Matrix) -> "Subspace":
    """Column space of ``m`` as a subspace of Q^rows."""
    return Subspace.span([m.column(j) for j in range(m.cols)], m.rows)


def preimage(m: Matrix, target: "Subspace") -> "Subspace":
    """Return {v : m v in target}."""
    if target.ambient_dim != m.rows:
        raise DimensionMismatchError("Target subspace does not live in the codomain.")
    functionals = annihilator(target)
    if functionals.dim == 0:
        return Subspace.full(m.cols)
    return kernel(functionals.basis @ m)


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^n held by its reduced row-echelon basis."""

    ambient_dim: int
    basis: Matrix

    @classmethod
    def span(cls, vectors: Iterable[Sequence[Fraction]], ambient_dim: int) -> "Subspace":
        rows = [[Fraction(x) for x in v] for v in vectors]
        for r in rows:
            if len(r) != ambient_dim:
                raise DimensionMismatchError(
                    f"Vector of length {len(r)} in a subspace of Q^{ambient_dim}."
                )
        reduced, pivots = _reduce_rows(rows, ambient_dim)
        kept = tuple(tuple(reduced[i]) for i in range(len(pivots)))
        return cls(ambient_dim, Matrix(len(kept), ambient_dim, kept))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, Matrix.zeros(0, n))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, Matrix.identity(n))

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def vectors(self) -> tuple[Vector, ...]:
        return self.basis.entries

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(c for c, x in enumerate(r) if x != 0) for r in self.vectors)

    def _residue(self, v: Sequence[Fraction]) -> list[Fraction]:
        if len(v) != self.ambient_dim:
            raise DimensionMismatchError(
                f"Vector of length {len(v)} tested against a subspace of Q^{self.ambient_dim}."
            )
        w = list(v)
        for r, p in zip(self.vectors, self.pivots):
            if w[p] != 0:
                f = w[p]
                w = [a - f * b for a, b in zip(w, r)]
        return w

    def contains(self, v: Sequence[Fraction]) -> bool:
        return is_zero_vector(self._residue(v))

    def coordinates(self, v: Sequence[Fraction]) -> Vector:
        """Coordinates of ``v`` against the echelon basis.

        Raises:
            NotASubspaceError: If ``v`` is not in the subspace.
        """
        if not self.contains(v):
            raise NotASubspaceError("Vector does not lie in the subspace.")
        return tuple(Fraction(v[p]) for p in self.pivots)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.vectors)

    def to_json(self) -> list[list[str]]:
        return self.basis.to_json()


def _check_same_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError(
            f"Subspaces live in Q^{a.ambient_dim} and Q^{b.ambient_dim}."
        )


def annihilator(s: Subspace) -> Subspace:
    """Functionals (as row vectors) vanishing on ``s`` under the dot product."""
    if s.dim == 0:
        return Subspace.full(s.ambient_dim)
    return kernel(s.basis)


def sum_spaces(a: Subspace, b: Subspace) -> Subspace:
    _check_same_ambient(a, b)
    return Subspace.span(a.vectors + b.vectors, a.ambient_dim)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_same_ambient(a, b)
    return annihilator(sum_spaces(annihilator(a), annihilator(b)))


def contains(a: Subspace, v: Sequence[Fraction]) -> bool:
    return a.contains(v)


def quotient_basis(big: Subspace, small: Subspace) -> tuple[Vector, ...]:
    """Canonical complement of ``small`` inside ``big``.

    The complement is built greedily from the echelon basis of ``big``,
    so it depends only on the two subspaces.

    Raises:
        DimensionMismatchError: If the ambient dimensions differ.
        NotASubspaceError: If ``small`` is not contained in ``big``.
    """
    _check_same_ambient(big, small)
    if not small.is_subspace_of(big):
        raise NotASubspaceError("Quotient requested by a subspace that is not contained.")
    current = small
    chosen: list[Vector] = []
    for v in big.vectors:
        if not current.contains(v):
            chosen.append(v)
            current = Subspace.span(current.vectors + (v,), big.ambient_dim)
    return tuple(chosen)


def orthogonal_complement(s: Subspace, form: Matrix) -> Subspace:
    """Return {v : form(x, v) = 0 for every x in s}."""
    if not form.is_square:
        raise DimensionMismatchError("Bilinear form matrix must be square.")
    if form.rows != s.ambient_dim:
        raise DimensionMismatchError(
            f"Form of size {form.rows} applied to a subspace of Q^{s.ambient_dim}."
        )
    if s.dim == 0:
        return Subspace.full(s.ambient_dim)
    return kernel(s.basis @ form)


class QuotientMap:
    """Projection from ``big`` onto ``big / small`` and lifting back.

    Coordinates on the quotient refer to the canonical complement returned
    by :func:`quotient_basis`.
    """

    def __init__(self, big: Subspace, small: Subspace) -> None:
        self.big = big
        self.small = small
        self.lifts: tuple[Vector, ...] = quotient_basis(big, small)
        self._frame = Matrix.from_columns(
            list(small.vectors) + list(self.lifts), big.ambient_dim
        )

    @property
    def dim(self) -> int:
        return len(self.lifts)

    def project(self, v: Sequence[Fraction]) -> Vector:
        if not self.big.contains(v):
            raise NotASubspaceError("Cannot project a vector outside the ambient subspace.")
        if self.dim == 0:
            return ()
        coords = solve(self._frame, v)
        assert coords is not None
        return coords[self.small.dim :]

    def lift(self, coords: Sequence[Fraction]) -> Vector:
        return linear_combination(coords, self.lifts, self.big.ambient_dim)

    def preimage_of(self, s: Subspace) -> Subspace:
        """Preimage in ``big`` of a subspace of the quotient."""
        return Subspace.span(
            list(self.small.vectors) + [self.lift(v) for v in s.vectors],
            self.big.ambient_dim,
        )


def minimal_polynomial(m: Matrix) -> tuple[Fraction, ...]:
    """Monic minimal polynomial of a square matrix, coefficients low to high."""
    if not m.is_square:
        raise DimensionMismatchError("Minimal polynomial of a non-square matrix.")
    n = m.rows
    powers = [Matrix.identity(n)]
    while True:
        candidate = powers[-1] @ m
        columns = [p.flatten() for p in powers]
        system = Matrix.from_columns(columns, n * n)
        coeffs = solve(system, candidate.flatten())
        if coeffs is not None:
            return tuple(-c for c in coeffs) + (Fraction(1),)
        powers.append(candidate)


def _to_fraction(value: Any) -> Fraction:
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def factor_polynomial(coeffs: Sequence[Fraction]) -> list[tuple[tuple[Fraction, ...], int]]:
    """Factor a polynomial over Q into monic irreducibles.

    Args:
        coeffs: Coefficients from the constant term upwards.

    Returns:
        (monic factor coefficients low to high, multiplicity) pairs, ordered
        by degree and then coefficients.
    """
    x = sympy.Symbol("x")
    poly = sympy.Poly(
        [sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)],
        x,
        domain=sympy.QQ,
    )
    _, factors = poly.factor_list()
    result = []
    for factor, multiplicity in factors:
        monic = factor.monic()
        result.append(
            (tuple(_to_fraction(c) for c in reversed(monic.all_coeffs())), int(multiplicity))
        )
    result.sort(key=lambda item: (len(item[0]), item[0]))
    logger.debug("factored degree %d polynomial into %d factors", len(coeffs) - 1, len(result))
    return result


def polynomial_from_coefficients(coeffs: Sequence[Fraction]) -> sympy.Poly:
    x = sympy.Symbol("x")
    return sympy.Poly(
        [sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)],
        x,
        domain=sympy.QQ,
    )


def coefficients_of(poly: sympy.Poly) -> tuple[Fraction, ...]:
    return tuple(_to_fraction(c) for c in reversed(poly.all_coeffs()))
