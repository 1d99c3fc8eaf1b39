"""Commutative Frobenius algebras: the weight-zero piece V0.

An algebra here is a commutative unital multiplication table together with
a counit lambda; the invariant form is (a, b) = lambda(a b). The module
computes the Jacobson radical, locality, the minimal ideal T and runs the
de Rham grading checks on a grading operator.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Mapping, Optional, Sequence

import sympy

from voa_forge.errors import (
    FrobeniusStructureError,
    GradingError,
    InputError,
    NonIntegralGradingError,
)
from voa_forge.exactla import (
    Matrix,
    QuotientMap,
    Subspace,
    Vector,
    add_vectors,
    coefficients_of,
    determinant,
    dot,
    factor_polynomial,
    format_scalar,
    kernel,
    minimal_polynomial,
    orthogonal_complement,
    polynomial_from_coefficients,
    scale_vector,
    unit_vector,
    vector,
    zero_vector,
)

logger = logging.getLogger(__name__)


class FrobeniusAlgebra:
    """Multiplication table m_ij^k, unit coordinates and counit functional."""

    def __init__(
        self,
        dim: int,
        mult: Mapping[tuple[int, int], Sequence[Any]],
        unit: Sequence[Any],
        counit: Sequence[Any],
    ) -> None:
        """Initialize the algebra.

        Args:
            dim: Dimension of the underlying space.
            mult: Map (i, j) -> coordinates of e_i e_j; missing pairs are zero.
            unit: Coordinates of the identity element.
            counit: The functional lambda as a row of scalars.

        Raises:
            InputError: If indices or vector lengths are inconsistent.
        """
        if dim < 1:
            raise InputError(f"Algebra dimension must be positive, got {dim}.")
        table = [[zero_vector(dim) for _ in range(dim)] for _ in range(dim)]
        for (i, j), coeffs in mult.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise InputError(f"Product index pair ({i}, {j}) out of range for dim {dim}.")
            entry = vector(coeffs)
            if len(entry) != dim:
                raise InputError(
                    f"Product e_{i} e_{j} has {len(entry)} coordinates, expected {dim}."
                )
            table[i][j] = entry
        self.dim: int = dim
        self._table: tuple[tuple[Vector, ...], ...] = tuple(tuple(r) for r in table)
        self.unit: Vector = vector(unit)
        self.counit: Vector = vector(counit)
        if len(self.unit) != dim or len(self.counit) != dim:
            raise InputError("Unit and counit must both have length dim.")

    def __repr__(self) -> str:
        return f"FrobeniusAlgebra(dim={self.dim})"

    def basis_product(self, i: int, j: int) -> Vector:
        return self._table[i][j]

    def mul(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
        out = [Fraction(0)] * self.dim
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if not y:
                    continue
                for k, c in enumerate(self._table[i][j]):
                    if c:
                        out[k] += x * y * c
        return tuple(out)

    def mult_matrix(self, a: Sequence[Fraction]) -> Matrix:
        """Matrix of b -> a b."""
        return Matrix.from_columns(
            [self.mul(a, unit_vector(self.dim, j)) for j in range(self.dim)], self.dim
        )

    def form(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
        return dot(self.counit, self.mul(a, b))

    def gram(self) -> Matrix:
        n = self.dim
        return Matrix.from_rows(
            [[dot(self.counit, self._table[i][j]) for j in range(n)] for i in range(n)], cols=n
        )

    def structure_violation(self) -> Optional[str]:
        """Describe the first failure of commutativity, associativity or unit law."""
        n = self.dim
        basis = [unit_vector(n, i) for i in range(n)]
        for i, j in product(range(n), repeat=2):
            if self._table[i][j] != self._table[j][i]:
                return f"not commutative on basis pair ({i}, {j})"
        for i in range(n):
            if self.mul(self.unit, basis[i]) != basis[i]:
                return f"unit does not act as identity on e_{i}"
        for i, j, k in product(range(n), repeat=3):
            if self.mul(self._table[i][j], basis[k]) != self.mul(basis[i], self._table[j][k]):
                return f"not associative on basis triple ({i}, {j}, {k})"
        return None

    def to_json(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "unit": [format_scalar(x) for x in self.unit],
            "counit": [format_scalar(x) for x in self.counit],
            "mult": [
                [i, j, [format_scalar(c) for c in self._table[i][j]]]
                for i in range(self.dim)
                for j in range(i, self.dim)
                if any(self._table[i][j])
            ],
        }

    @classmethod
    def from_json(cls, data: Any) -> "FrobeniusAlgebra":
        """Build an algebra from {"dim", "unit", "counit", "mult"}.

        A product listed only as (i, j) is also used for (j, i).

        Raises:
            InputError: If the document does not follow the schema.
        """
        if not isinstance(data, dict):
            raise InputError("A Frobenius algebra must be a JSON object.")
        for key in ("dim", "unit", "counit", "mult"):
            if key not in data:
                raise InputError(f"Frobenius algebra is missing the '{key}' field.")
        dim = data["dim"]
        if not isinstance(dim, int) or isinstance(dim, bool):
            raise InputError("Field 'dim' must be an integer.")
        if not isinstance(data["mult"], list):
            raise InputError("Field 'mult' must be a list of [i, j, coefficients].")
        mult: dict[tuple[int, int], Sequence[Any]] = {}
        for index, entry in enumerate(data["mult"]):
            if (
                not isinstance(entry, list)
                or len(entry) != 3
                or not isinstance(entry[0], int)
                or not isinstance(entry[1], int)
                or not isinstance(entry[2], list)
            ):
                raise InputError(f"Product entry at index {index} must be [i, j, [coefficients]].")
            mult[(entry[0], entry[1])] = entry[2]
        for (i, j), coeffs in list(mult.items()):
            mult.setdefault((j, i), coeffs)
        return cls(dim, mult, data["unit"], data["counit"])


def verify_frobenius(algebra: FrobeniusAlgebra) -> bool:
    """Commutative, associative, unital, with nondegenerate lambda(a b)."""
    return algebra.structure_violation() is None and determinant(algebra.gram()) != 0


def frobenius_violation(algebra: FrobeniusAlgebra) -> Optional[str]:
    """Like :func:`verify_frobenius` but naming what went wrong."""
    problem = algebra.structure_violation()
    if problem is not None:
        return problem
    if determinant(algebra.gram()) == 0:
        witness = kernel(algebra.gram()).vectors[0]
        return f"form lambda(ab) is degenerate; {list(map(str, witness))} pairs to zero"
    return None


def trace_form(algebra: FrobeniusAlgebra) -> Matrix:
    """Gram matrix of (x, y) -> tr(mult by x y)."""
    n = algebra.dim
    return Matrix.from_rows(
        [
            [algebra.mult_matrix(algebra.basis_product(i, j)).trace() for j in range(n)]
            for i in range(n)
        ],
        cols=n,
    )


def jacobson_radical(algebra: FrobeniusAlgebra) -> Subspace:
    """Kernel of the trace form (Dickson's criterion, characteristic 0)."""
    return kernel(trace_form(algebra))


@dataclass(frozen=True)
class SemisimpleQuotient:
    """A / J with multiplication done through lifts to A."""

    algebra: FrobeniusAlgebra
    qmap: QuotientMap

    @property
    def dim(self) -> int:
        return self.qmap.dim

    def mul(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
        return self.qmap.project(self.algebra.mul(self.qmap.lift(a), self.qmap.lift(b)))

    def mult_matrix(self, a: Sequence[Fraction]) -> Matrix:
        return Matrix.from_columns(
            [self.mul(a, unit_vector(self.dim, j)) for j in range(self.dim)], self.dim
        )

    @property
    def unit(self) -> Vector:
        return self.qmap.project(self.algebra.unit)

    def evaluate(self, coeffs: Sequence[Fraction], x: Sequence[Fraction]) -> Vector:
        """p(x) for p given by coefficients from the constant term up."""
        result = zero_vector(self.dim)
        power = self.unit
        for c in coeffs:
            result = add_vectors(result, scale_vector(c, power))
            power = self.mul(power, x)
        return result


def semisimple_quotient(algebra: FrobeniusAlgebra) -> SemisimpleQuotient:
    return SemisimpleQuotient(
        algebra, QuotientMap(Subspace.full(algebra.dim), jacobson_radical(algebra))
    )


def _primitive_element(quotient: SemisimpleQuotient) -> tuple[Vector, tuple[Fraction, ...]]:
    # A / J is a product of number fields; sum t^i q_i generates it for all
    # but finitely many t.
    m = quotient.dim
    for t in range(1, 4 * m * m + 8):
        x = tuple(Fraction(t) ** i for i in range(m))
        poly = minimal_polynomial(quotient.mult_matrix(x))
        if len(poly) - 1 == m:
            return x, poly
    raise FrobeniusStructureError("No primitive element found for A / J.")


def nontrivial_idempotent(algebra: FrobeniusAlgebra) -> Optional[Vector]:
    """An idempotent of A / J other than 0 and 1, in quotient coordinates.

    A / J is isomorphic to Q[X] / p(X) for the minimal polynomial p of a
    primitive element, with p squarefree. A factorization p = f g into
    coprime parts gives the idempotent u f(x) where u f + v g = 1.
    """
    quotient = semisimple_quotient(algebra)
    if quotient.dim <= 1:
        return None
    x, poly = _primitive_element(quotient)
    factors = factor_polynomial(poly)
    if len(factors) == 1:
        return None
    first = polynomial_from_coefficients(factors[0][0])
    rest = sympy.quo(polynomial_from_coefficients(poly), first)
    s, _, g = sympy.gcdex(first, rest)
    if g.as_expr() != 1:
        raise FrobeniusStructureError(
            "Minimal polynomial of a primitive element is not squarefree."
        )
    idem = quotient.evaluate(coefficients_of(s * first), x)
    if quotient.mul(idem, idem) != idem:
        raise FrobeniusStructureError("Constructed idempotent is not idempotent.")
    return idem


def is_local(algebra: FrobeniusAlgebra) -> bool:
    """True iff A / J has no idempotents besides 0 and 1.

    The quadratic system e e = e is never solved directly. A / J is a product
    of number fields, and it has a nontrivial idempotent exactly when the
    squarefree minimal polynomial of a primitive element has more than one
    irreducible factor, so the answer comes from one factorization over Q.
    """
    return nontrivial_idempotent(algebra) is None


def annihilator_ideal(algebra: FrobeniusAlgebra, sub: Subspace) -> Subspace:
    """{a : a s = 0 for every s in sub}."""
    if sub.dim == 0:
        return Subspace.full(algebra.dim)
    rows = []
    for s in sub.vectors:
        rows.extend(algebra.mult_matrix(s).entries)
    return kernel(Matrix.from_rows(rows, cols=algebra.dim))


def minimal_ideal(algebra: FrobeniusAlgebra) -> Subspace:
    """The socle T = Ann(J) = J-perp of a local Frobenius algebra.

    Raises:
        FrobeniusStructureError: If the algebra is not local Frobenius, or
            Ann(J) and J-perp differ, or they are not one-dimensional.
    """
    problem = frobenius_violation(algebra)
    if problem is not None:
        raise FrobeniusStructureError(f"Not a Frobenius algebra: {problem}.")
    if not is_local(algebra):
        raise FrobeniusStructureError("Algebra is not local.")
    radical = jacobson_radical(algebra)
    ann = annihilator_ideal(algebra, radical)
    perp = orthogonal_complement(radical, algebra.gram())
    if ann != perp:
        raise FrobeniusStructureError(
            "Ann(J) differs from the orthogonal of J.", counterexample=ann.to_json()
        )
    if ann.dim != 1:
        raise FrobeniusStructureError(f"Minimal ideal has dimension {ann.dim}, expected 1.")
    return ann


@dataclass(frozen=True)
class GradingOperator:
    """A linear operator on the algebra, expected to be an integral derivation."""

    matrix: Matrix

    @classmethod
    def from_degrees(cls, degrees: Sequence[Any]) -> "GradingOperator":
        return cls(Matrix.diagonal(degrees))

    def derivation_violation(self, algebra: FrobeniusAlgebra) -> Optional[tuple[int, int]]:
        """First basis pair where d(ab) != d(a) b + a d(b), if any."""
        n = algebra.dim
        d = self.matrix
        for i, j in product(range(n), repeat=2):
            lhs = d.apply(algebra.basis_product(i, j))
            rhs = add_vectors(
                algebra.mul(d.column(i), unit_vector(n, j)),
                algebra.mul(unit_vector(n, i), d.column(j)),
            )
            if lhs != rhs:
                return (i, j)
        return None

    def spectrum(self) -> list[int]:
        """Distinct eigenvalues, ascending.

        Raises:
            GradingError: If the operator is not diagonalizable over Q.
            NonIntegralGradingError: If an eigenvalue is not an integer.
        """
        factors = factor_polynomial(minimal_polynomial(self.matrix))
        roots: list[int] = []
        for coeffs, multiplicity in factors:
            if len(coeffs) != 2 or multiplicity != 1:
                raise GradingError("Grading operator is not diagonalizable over Q.")
            root = -coeffs[0]
            if root.denominator != 1:
                raise NonIntegralGradingError(
                    f"Grading operator has non-integer eigenvalue {root}.",
                    counterexample=str(root),
                )
            roots.append(int(root))
        return sorted(roots)

    def eigenspace(self, value: int) -> Subspace:
        return kernel(self.matrix - Matrix.identity(self.matrix.rows).scaled(Fraction(value)))


@dataclass(frozen=True)
class DeRhamReport:
    """One verdict per clause of the de Rham structure theorem."""

    eigenvalues: tuple[tuple[int, int], ...]
    nu: int
    top_space: Subspace
    nonnegative: bool
    degree_zero_is_unit: bool
    top_is_minimal_ideal: bool
    multiplicative: bool
    orthogonality_ok: bool
    pairing_ok_per_level: tuple[bool, ...]
    eigenspaces: dict[int, Subspace] = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return (
            self.nonnegative
            and self.degree_zero_is_unit
            and self.top_is_minimal_ideal
            and self.multiplicative
            and self.orthogonality_ok
            and all(self.pairing_ok_per_level)
        )

    def poincare_series(self) -> tuple[int, ...]:
        """dim A^lambda for lambda = 0..nu."""
        dims = dict(self.eigenvalues)
        return tuple(dims.get(k, 0) for k in range(self.nu + 1))

    def is_palindromic(self) -> bool:
        series = self.poincare_series()
        return series == tuple(reversed(series))

    def to_json(self) -> dict[str, Any]:
        return {
            "spectrum": [[value, mult] for value, mult in self.eigenvalues],
            "nu": self.nu,
            "top_space": self.top_space.to_json(),
            "clauses": {
                "i_nonnegative_integers": self.nonnegative,
                "ii_degree_zero_is_unit": self.degree_zero_is_unit,
                "iii_top_is_minimal_ideal": self.top_is_minimal_ideal,
                "iv_multiplicative": self.multiplicative,
                "v_orthogonality": self.orthogonality_ok,
                "vi_perfect_pairing": all(self.pairing_ok_per_level),
            },
            "pairing_ok_per_level": list(self.pairing_ok_per_level),
            "passed": self.passed,
        }


def de_rham_check(algebra: FrobeniusAlgebra, grading: GradingOperator) -> DeRhamReport:
    """Check the de Rham structure of a grading on a local Frobenius algebra.

    Args:
        algebra: A local commutative Frobenius algebra.
        grading: The candidate grading operator.

    Returns:
        A report with one flag per clause of the structure theorem.

    Raises:
        FrobeniusStructureError: If the algebra is not local Frobenius.
        GradingError: If the grading is not a derivation or not diagonalizable
            over Q with integer spectrum.
    """
    problem = frobenius_violation(algebra)
    if problem is not None:
        raise FrobeniusStructureError(f"Not a Frobenius algebra: {problem}.")
    if not is_local(algebra):
        raise FrobeniusStructureError("Algebra is not local.")
    if grading.matrix.rows != algebra.dim or not grading.matrix.is_square:
        raise GradingError("Grading operator has the wrong size.")
    bad_pair = grading.derivation_violation(algebra)
    if bad_pair is not None:
        raise GradingError(
            f"Grading operator is not a derivation on basis pair {bad_pair}.",
            counterexample=bad_pair,
        )

    spectrum = grading.spectrum()
    spaces = {value: grading.eigenspace(value) for value in spectrum}
    nu = spectrum[-1]
    n = algebra.dim

    def space(value: int) -> Subspace:
        return spaces.get(value, Subspace.zero(n))

    nonnegative = spectrum[0] >= 0
    degree_zero_is_unit = space(0) == Subspace.span([algebra.unit], n)
    top = space(nu)
    top_is_minimal_ideal = top.dim == 1 and top == minimal_ideal(algebra)

    multiplicative = all(
        space(lam + mu).contains(algebra.mul(a, b))
        for lam, mu in product(spectrum, repeat=2)
        for a in spaces[lam].vectors
        for b in spaces[mu].vectors
    )
    orthogonality_ok = all(
        algebra.form(a, b) == 0
        for lam, mu in product(spectrum, repeat=2)
        if lam + mu != nu
        for a in spaces[lam].vectors
        for b in spaces[mu].vectors
    )
    pairing = []
    for lam in spectrum:
        left, right = spaces[lam], space(nu - lam)
        if left.dim != right.dim:
            pairing.append(False)
            continue
        block = Matrix.from_rows(
            [[algebra.form(a, b) for b in right.vectors] for a in left.vectors], cols=right.dim
        )
        pairing.append(determinant(block) != 0)

    report = DeRhamReport(
        eigenvalues=tuple((value, spaces[value].dim) for value in spectrum),
        nu=nu,
        top_space=top,
        nonnegative=nonnegative,
        degree_zero_is_unit=degree_zero_is_unit,
        top_is_minimal_ideal=top_is_minimal_ideal,
        multiplicative=multiplicative,
        orthogonality_ok=orthogonality_ok,
        pairing_ok_per_level=tuple(pairing),
        eigenspaces=spaces,
    )
    logger.debug("de Rham spectrum %s, nu=%d, passed=%s", report.eigenvalues, nu, report.passed)
    return report


def truncated_polynomial_algebra(k: int) -> tuple[FrobeniusAlgebra, GradingOperator]:
    """Q[x] / x^(k+1) with lambda(x^k) = 1 and the degree grading."""
    if k < 0:
        raise InputError(f"Truncation degree must be nonnegative, got {k}.")
    n = k + 1
    mult = {
        (i, j): unit_vector(n, i + j) for i in range(n) for j in range(n) if i + j <= k
    }
    algebra = FrobeniusAlgebra(n, mult, unit_vector(n, 0), unit_vector(n, k))
    return algebra, GradingOperator.from_degrees(range(n))


def tensor_product(
    first: FrobeniusAlgebra, second: FrobeniusAlgebra
) -> FrobeniusAlgebra:
    """A (x) B with basis e_i (x) f_j ordered lexicographically."""
    n1, n2 = first.dim, second.dim
    n = n1 * n2

    def flat(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
        return tuple(u[i] * v[j] for i in range(n1) for j in range(n2))

    mult = {}
    for (i1, j1), (i2, j2) in product(product(range(n1), range(n2)), repeat=2):
        value = flat(first.basis_product(i1, i2), second.basis_product(j1, j2))
        if any(value):
            mult[(i1 * n2 + j1, i2 * n2 + j2)] = value
    return FrobeniusAlgebra(
        n, mult, flat(first.unit, second.unit), flat(first.counit, second.counit)
    )

