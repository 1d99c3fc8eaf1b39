"""Even positive-definite lattices, shifts and the V0 algebra of a shifted theory.

Vectors of L are integer coordinate tuples against the basis whose Gram
matrix defines the lattice; rational vectors (the shift h, sphere centres)
use the same basis.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Any, Sequence

from voa_forge.errors import GradingError, InadmissibleShiftError, LatticeError
from voa_forge.exactla import (
    Matrix,
    Vector,
    determinant,
    dot,
    format_scalar,
    unit_vector,
    vector,
)
from voa_forge.frobalg import FrobeniusAlgebra, GradingOperator

logger = logging.getLogger(__name__)

LatticePoint = tuple[int, ...]


class EvenLattice:
    """A lattice given by a symmetric, even, positive-definite integer Gram matrix."""

    def __init__(self, gram: Matrix) -> None:
        """Validate and store the Gram matrix.

        Raises:
            LatticeError: If the matrix is not square, symmetric, integral,
                even on the diagonal, or positive definite.
        """
        if not gram.is_square or gram.rows == 0:
            raise LatticeError("Gram matrix must be a nonempty square matrix.")
        if not gram.is_symmetric():
            raise LatticeError("Gram matrix must be symmetric.")
        if any(x.denominator != 1 for x in gram.flatten()):
            raise LatticeError("Gram matrix must have integer entries.")
        for i in range(gram.rows):
            if gram.entries[i][i] % 2 != 0:
                raise LatticeError(f"Diagonal entry {i} is odd; the lattice must be even.")
        for k in range(1, gram.rows + 1):
            minor = Matrix.from_rows([r[:k] for r in gram.entries[:k]], cols=k)
            if determinant(minor) <= 0:
                raise LatticeError(f"Leading principal minor of order {k} is not positive.")
        self.gram: Matrix = gram
        self._ldl = _ldl(gram)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]]) -> "EvenLattice":
        return cls(Matrix.from_rows(rows))

    @property
    def rank(self) -> int:
        return self.gram.rows

    def __repr__(self) -> str:
        return f"EvenLattice(gram={self.gram.to_json()})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EvenLattice):
            return NotImplemented
        return self.gram == other.gram

    def inner(self, a: Sequence[Any], b: Sequence[Any]) -> Fraction:
        return dot(a, self.gram.apply(tuple(Fraction(x) for x in b)))

    def norm(self, a: Sequence[Any]) -> Fraction:
        return self.inner(a, a)

    def dual_contains(self, v: Sequence[Fraction]) -> bool:
        """True iff (v, e_i) is an integer for every basis vector e_i."""
        return all(x.denominator == 1 for x in self.gram.apply(tuple(Fraction(c) for c in v)))

    def contains(self, v: Sequence[Fraction]) -> bool:
        return all(Fraction(c).denominator == 1 for c in v)

    def direct_sum(self, other: "EvenLattice") -> "EvenLattice":
        n, m = self.rank, other.rank
        rows = [list(r) + [0] * m for r in self.gram.entries]
        rows += [[0] * n + list(r) for r in other.gram.entries]
        return EvenLattice(Matrix.from_rows(rows))


def _ldl(gram: Matrix) -> list[list[Fraction]]:
    # Q(x) = sum_i q[i][i] * (x_i + sum_{j>i} q[i][j] x_j)^2
    n = gram.rows
    q = [list(r) for r in gram.entries]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for m in range(k, n):
                q[k][m] -= q[k][i] * q[i][m]
    return q


def _integer_window(centre: Fraction, bound: Fraction) -> range:
    """Integers x with (x - centre)^2 <= bound lie in this range."""
    reach = isqrt(bound.numerator // bound.denominator) + 1
    low = centre.numerator // centre.denominator - reach
    high = -((-centre.numerator) // centre.denominator) + reach
    return range(low, high + 1)


def short_vectors(
    lattice: EvenLattice, center: Sequence[Any], radius2: Any
) -> list[LatticePoint]:
    """All alpha in L with (alpha - center, alpha - center) <= radius2.

    Fincke-Pohst enumeration over the exact LDL decomposition: the last
    coordinate is bounded first, each fixed suffix shrinks the budget for
    the next coordinate. Integer windows are widened by one and filtered
    exactly, so no rounding enters.

    Returns:
        Lattice vectors sorted lexicographically.
    """
    c = vector(center)
    budget = Fraction(radius2)
    n = lattice.rank
    if len(c) != n:
        raise LatticeError(f"Centre has length {len(c)}, lattice rank is {n}.")
    if budget < 0:
        return []
    q = lattice._ldl
    found: list[LatticePoint] = []
    x = [0] * n

    def descend(i: int, remaining: Fraction) -> None:
        shift = sum((q[i][j] * (x[j] - c[j]) for j in range(i + 1, n)), Fraction(0))
        centre = c[i] - shift
        limit = remaining / q[i][i]
        for value in _integer_window(centre, limit):
            gap = (value - centre) ** 2
            if gap > limit:
                continue
            x[i] = value
            left = remaining - q[i][i] * gap
            if i == 0:
                found.append(tuple(x))
            else:
                descend(i - 1, left)
        x[i] = 0

    descend(n - 1, budget)
    found.sort()
    logger.debug("short_vectors: %d points within radius^2 %s", len(found), budget)
    return found


class ShiftDatum:
    """A lattice together with a shift vector h in the dual lattice with 2h in L."""

    def __init__(self, lattice: EvenLattice, h: Sequence[Any]) -> None:
        """Validate h.

        Raises:
            LatticeError: If h has the wrong length, is not in the dual
                lattice, or 2h is not a lattice vector.
        """
        hv = vector(h)
        if len(hv) != lattice.rank:
            raise LatticeError(f"Shift has length {len(hv)}, lattice rank is {lattice.rank}.")
        if not lattice.dual_contains(hv):
            raise LatticeError("Shift h does not pair integrally with L.")
        if not lattice.contains(tuple(2 * x for x in hv)):
            raise LatticeError("2h is not a lattice vector.")
        self.lattice: EvenLattice = lattice
        self.h: Vector = hv

    def __repr__(self) -> str:
        return f"ShiftDatum(gram={self.lattice.gram.to_json()}, h={[str(x) for x in self.h]})"

    @property
    def two_h(self) -> LatticePoint:
        return tuple(int(2 * x) for x in self.h)

    @property
    def h_norm(self) -> Fraction:
        return self.lattice.norm(self.h)

    def charge(self, alpha: Sequence[Any]) -> int:
        """(h, alpha), an integer for alpha in L."""
        value = self.lattice.inner(self.h, alpha)
        if value.denominator != 1:
            raise GradingError(f"(h, alpha) = {value} is not an integer.")
        return int(value)

    def to_json(self) -> dict[str, Any]:
        return {
            "gram": [[int(x) for x in r] for r in self.lattice.gram.entries],
            "h": [format_scalar(x) for x in self.h],
        }


def shift_admissible(shift: ShiftDatum) -> bool:
    """True iff -h is a shortest vector of the coset L - h."""
    lattice, h = shift.lattice, shift.h
    target = shift.h_norm
    for alpha in short_vectors(lattice, h, target):
        offset = tuple(a - x for a, x in zip(alpha, h))
        if lattice.norm(offset) < target:
            return False
    return True


def require_admissible(shift: ShiftDatum) -> None:
    if not shift_admissible(shift):
        raise InadmissibleShiftError(
            f"Shift {[str(x) for x in shift.h]} is not admissible: "
            "L - h has a vector shorter than -h."
        )


def enumerate_A(shift: ShiftDatum) -> list[LatticePoint]:
    """The set {alpha in L : (alpha, alpha) = (2h, alpha)}, sorted.

    Raises:
        InadmissibleShiftError: If the shift is not admissible.
    """
    require_admissible(shift)
    lattice, h = shift.lattice, shift.h
    points = [
        alpha
        for alpha in short_vectors(lattice, h, shift.h_norm)
        if lattice.norm(alpha) == 2 * lattice.inner(h, alpha)
    ]
    logger.debug("enumerate_A: %d points", len(points))
    return points


class Cocycle:
    """Bimultiplicative sign cocycle with eps(a, b) eps(b, a) = (-1)^(a, b)."""

    def __init__(self, signs: Sequence[Sequence[int]]) -> None:
        """Store the basis sign table.

        Args:
            signs: signs[i][j] = eps(e_i, e_j), each +1 or -1.
        """
        if any(s not in (1, -1) for row in signs for s in row):
            raise LatticeError("Cocycle signs must be +1 or -1.")
        self.signs: tuple[tuple[int, ...], ...] = tuple(tuple(r) for r in signs)
        self._odd = [[1 if s == -1 else 0 for s in r] for r in self.signs]

    def __call__(self, alpha: Sequence[int], beta: Sequence[int]) -> int:
        n = len(self.signs)
        parity = sum(
            alpha[i] * beta[j] * self._odd[i][j]
            for i in range(n)
            for j in range(n)
            if self._odd[i][j]
        )
        return -1 if parity % 2 else 1

    def verify_on(self, lattice: EvenLattice, points: Sequence[LatticePoint]) -> bool:
        """Check the commutator identity on all pairs from ``points``."""
        for a in points:
            for b in points:
                expected = -1 if int(lattice.inner(a, b)) % 2 else 1
                if self(a, b) * self(b, a) != expected:
                    return False
        return True


def build_cocycle(lattice: EvenLattice) -> Cocycle:
    """eps(e_i, e_j) = (-1)^(e_i, e_j) for i > j and 1 otherwise."""
    n = lattice.rank
    signs = [
        [(-1 if int(lattice.gram.entries[i][j]) % 2 else 1) if i > j else 1 for j in range(n)]
        for i in range(n)
    ]
    return Cocycle(signs)


@dataclass(frozen=True)
class ShiftedV0:
    """The weight-zero algebra of a shifted lattice theory on the basis e^alpha, alpha in A."""

    algebra: FrobeniusAlgebra
    grading: GradingOperator
    points: tuple[LatticePoint, ...]

    def index(self, alpha: Sequence[int]) -> int:
        return self.points.index(tuple(alpha))


def build_V0(shift: ShiftDatum, eps: Cocycle) -> ShiftedV0:
    """e^a e^b = eps(a, b) e^(a+b) when a + b is in A, else 0.

    The unit is e^0, the counit is 1 on e^(2h) and 0 elsewhere, and the
    grading multiplies e^a by (h, a).

    Raises:
        InadmissibleShiftError: If the shift is not admissible.
    """
    points = tuple(enumerate_A(shift))
    n = len(points)
    position = {alpha: k for k, alpha in enumerate(points)}
    zero = tuple(0 for _ in shift.h)
    mult = {}
    for i, a in enumerate(points):
        for j, b in enumerate(points):
            total = tuple(x + y for x, y in zip(a, b))
            if total in position:
                mult[(i, j)] = tuple(
                    Fraction(eps(a, b)) * c for c in unit_vector(n, position[total])
                )
    algebra = FrobeniusAlgebra(
        n, mult, unit_vector(n, position[zero]), unit_vector(n, position[shift.two_h])
    )
    grading = GradingOperator.from_degrees([shift.charge(a) for a in points])
    logger.info("built V0 of dimension %d for h=%s", n, [str(x) for x in shift.h])
    return ShiftedV0(algebra, grading, points)
