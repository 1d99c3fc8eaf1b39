"""Tests for the commutative Frobenius algebra module.

Tests cover the Frobenius conditions, locality, the minimal ideal and the
de Rham structure check on truncated polynomial algebras.
"""

import random
from fractions import Fraction
from itertools import product
from typing import Sequence

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voa_forge.errors import (
    FrobeniusStructureError,
    GradingError,
    InputError,
    NonIntegralGradingError,
)
from voa_forge.exactla import Matrix, Subspace, dot, solve, unit_vector, vector
from voa_forge.frobalg import (
    FrobeniusAlgebra,
    GradingOperator,
    de_rham_check,
    frobenius_violation,
    is_local,
    jacobson_radical,
    minimal_ideal,
    nontrivial_idempotent,
    tensor_product,
    truncated_polynomial_algebra,
    verify_frobenius,
)


def dual_numbers() -> FrobeniusAlgebra:
    """Q[x] / x^2 with lambda(x) = 1."""
    return FrobeniusAlgebra(2, {(0, 0): (1, 0), (0, 1): (0, 1), (1, 0): (0, 1)}, (1, 0), (0, 1))


def quadratic(c: int) -> FrobeniusAlgebra:
    """Q[x] / (x^2 - c) with lambda(1) = 1 and lambda(x) = 0."""
    return FrobeniusAlgebra(
        2, {(0, 0): (1, 0), (0, 1): (0, 1), (1, 0): (0, 1), (1, 1): (c, 0)}, (1, 0), (1, 0)
    )


class TestFrobeniusAlgebra:
    """Tests for the Frobenius conditions."""

    def test_dual_numbers(self) -> None:
        """Test that the dual numbers are Frobenius."""
        assert verify_frobenius(dual_numbers())

    def test_degenerate_form(self) -> None:
        """Test that lambda(1) = 1, lambda(x) = 0 is degenerate on the dual numbers."""
        table = {(0, 0): (1, 0), (0, 1): (0, 1), (1, 0): (0, 1)}
        algebra = FrobeniusAlgebra(2, table, (1, 0), (1, 0))
        problem = frobenius_violation(algebra)
        assert problem is not None
        assert "degenerate" in problem

    def test_non_commutative(self) -> None:
        """Test that an asymmetric table is reported."""
        algebra = FrobeniusAlgebra(2, {(0, 0): (1, 0), (0, 1): (0, 1)}, (1, 0), (0, 1))
        assert "commutative" in str(frobenius_violation(algebra))

    def test_bad_unit_length(self) -> None:
        """Test that a unit of the wrong length is an input error."""
        with pytest.raises(InputError):
            FrobeniusAlgebra(2, {}, (1,), (0, 1))

    def test_from_json_symmetrizes(self) -> None:
        """Test that products listed once are used both ways."""
        data = {
            "dim": 2,
            "unit": [1, 0],
            "counit": [0, 1],
            "mult": [[0, 0, [1, 0]], [0, 1, [0, 1]]],
        }
        assert verify_frobenius(FrobeniusAlgebra.from_json(data))

    def test_from_json_missing_field(self) -> None:
        """Test that a missing counit is an input error."""
        with pytest.raises(InputError, match="counit"):
            FrobeniusAlgebra.from_json({"dim": 1, "unit": [1], "mult": []})


class TestLocality:
    """Tests for the Jacobson radical, idempotents and locality."""

    def test_dual_numbers_local(self) -> None:
        """Test that J = span{x} and the algebra is local."""
        algebra = dual_numbers()
        assert jacobson_radical(algebra) == Subspace.span([vector([0, 1])], 2)
        assert is_local(algebra)

    def test_split_not_local(self) -> None:
        """Test that Q[x] / (x^2 - 1) has an idempotent besides 0 and 1."""
        algebra = quadratic(1)
        idem = nontrivial_idempotent(algebra)
        assert idem is not None
        assert algebra.mul(idem, idem) == idem
        assert not is_local(algebra)

    def test_field_is_local(self) -> None:
        """Test that Q(sqrt 2) is local with zero radical."""
        algebra = quadratic(2)
        assert jacobson_radical(algebra).dim == 0
        assert is_local(algebra)

    def test_field_minimal_ideal_too_big(self) -> None:
        """Test that a quadratic field has no one-dimensional minimal ideal."""
        with pytest.raises(FrobeniusStructureError, match="dimension 2"):
            minimal_ideal(quadratic(2))

    def test_minimal_ideal_of_dual_numbers(self) -> None:
        """Test that the socle of the dual numbers is span{x}."""
        assert minimal_ideal(dual_numbers()) == Subspace.span([vector([0, 1])], 2)

    def test_minimal_ideal_needs_locality(self) -> None:
        """Test that a split algebra is refused."""
        with pytest.raises(FrobeniusStructureError, match="not local"):
            minimal_ideal(quadratic(1))


class TestDeRham:
    """Tests for the de Rham structure check."""

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_truncated_polynomials(self, k: int) -> None:
        """Test Q[x] / x^(k+1) with the degree grading."""
        algebra, grading = truncated_polynomial_algebra(k)
        report = de_rham_check(algebra, grading)
        assert report.passed
        assert report.nu == k
        assert report.poincare_series() == (1,) * (k + 1)

    def test_pairing_is_anti_diagonal(self) -> None:
        """Test that lambda(x^p x^q) = 1 exactly when p + q = k."""
        algebra, _ = truncated_polynomial_algebra(2)
        assert algebra.gram() == Matrix.from_rows([[0, 0, 1], [0, 1, 0], [1, 0, 0]])

    def test_tensor_square(self) -> None:
        """Test the dual numbers squared with the total degree grading."""
        algebra = tensor_product(dual_numbers(), dual_numbers())
        report = de_rham_check(algebra, GradingOperator.from_degrees([0, 1, 1, 2]))
        assert report.passed
        assert report.nu == 2
        assert report.poincare_series() == (1, 2, 1)
        assert report.is_palindromic()

    def test_not_a_derivation(self) -> None:
        """Test that giving the unit degree one is refused."""
        with pytest.raises(GradingError, match="derivation"):
            de_rham_check(dual_numbers(), GradingOperator.from_degrees([1, 1]))

    def test_non_integral_spectrum(self) -> None:
        """Test that a half-integer degree is refused."""
        with pytest.raises(NonIntegralGradingError):
            de_rham_check(dual_numbers(), GradingOperator.from_degrees(["0", "1/2"]))

    def test_non_diagonalizable(self) -> None:
        """Test that a non-diagonalizable operator is refused."""
        grading = GradingOperator(Matrix.from_rows([[0, 0], [1, 0]]))
        with pytest.raises(GradingError):
            de_rham_check(dual_numbers(), grading)

    def test_report_json(self) -> None:
        """Test the clause flags in the JSON report."""
        algebra, grading = truncated_polynomial_algebra(1)
        data = de_rham_check(algebra, grading).to_json()
        assert data["nu"] == 1
        assert data["passed"] is True
        assert all(data["clauses"].values())


def rebased(algebra: FrobeniusAlgebra, basis: Matrix) -> FrobeniusAlgebra:
    """The same algebra written against the columns of ``basis``."""
    n = algebra.dim
    columns = [basis.column(j) for j in range(n)]
    mult = {
        (i, j): solve(basis, algebra.mul(columns[i], columns[j]))
        for i in range(n)
        for j in range(n)
    }
    counit = [dot(algebra.counit, c) for c in columns]
    return FrobeniusAlgebra(n, mult, solve(basis, algebra.unit), counit)


def is_nilpotent_element(algebra: FrobeniusAlgebra, x: Sequence[Fraction]) -> bool:
    m = algebra.mult_matrix(x)
    power = Matrix.identity(algebra.dim)
    for _ in range(algebra.dim):
        power = power @ m
    return power.is_zero()


def staircase_algebra(heights: Sequence[int]) -> FrobeniusAlgebra:
    """Q[x, y] modulo every monomial outside {x^a y^b : b < heights[a]}.

    ``heights`` is non-increasing, so the kept monomials form an order ideal
    and the product is the truncated monomial product.
    """
    monomials = [(a, b) for a, h in enumerate(heights) for b in range(h)]
    index = {m: i for i, m in enumerate(monomials)}
    n = len(monomials)
    mult = {}
    for (i, (a, b)), (j, (c, d)) in product(enumerate(monomials), repeat=2):
        k = index.get((a + c, b + d))
        if k is not None:
            mult[(i, j)] = unit_vector(n, k)
    return FrobeniusAlgebra(n, mult, unit_vector(n, 0), unit_vector(n, n - 1))


def direct_product(first: FrobeniusAlgebra, second: FrobeniusAlgebra) -> FrobeniusAlgebra:
    n1, n2 = first.dim, second.dim
    mult = {}
    for i, j in product(range(n1), repeat=2):
        mult[(i, j)] = first.basis_product(i, j) + (Fraction(0),) * n2
    for i, j in product(range(n2), repeat=2):
        mult[(n1 + i, n1 + j)] = (Fraction(0),) * n1 + second.basis_product(i, j)
    return FrobeniusAlgebra(
        n1 + n2, mult, first.unit + second.unit, first.counit + second.counit
    )


STAIRCASES = [[1], [2], [3], [4], [1, 1], [2, 1], [1, 1, 1], [2, 2], [3, 1], [2, 1, 1], [3, 2, 1]]


def random_commutative(rng: random.Random) -> tuple[FrobeniusAlgebra, int, bool]:
    """A product of local factors of total dim <= 6, its radical dim and locality."""
    room = 6
    factors: list[tuple[FrobeniusAlgebra, int]] = []
    for _ in range(rng.randint(1, 3)):
        choices = [(staircase_algebra(s), sum(s) - 1) for s in STAIRCASES if sum(s) <= room]
        if room >= 2:
            choices.extend((quadratic(c), 0) for c in (2, 3, -1))
        if not choices:
            break
        factor = rng.choice(choices)
        factors.append(factor)
        room -= factor[0].dim
    algebra, radical_dim = factors[0]
    for other, other_dim in factors[1:]:
        algebra = direct_product(algebra, other)
        radical_dim += other_dim
    return algebra, radical_dim, len(factors) == 1


def random_basis(n: int, rng: random.Random) -> Matrix:
    """A random unit upper triangular matrix times a unit lower triangular one."""
    upper = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    lower = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            upper[i][j] = Fraction(rng.randint(-2, 2))
            lower[j][i] = Fraction(rng.randint(-2, 2))
    return Matrix.from_rows(upper) @ Matrix.from_rows(lower)


class TestRadicalOracle:
    """The Jacobson radical of random commutative tables against nilpotency."""

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=0, max_value=2**16))
    def test_radical_is_nilradical(self, seed: int) -> None:
        """Test that an element lies in J exactly when it is nilpotent."""
        rng = random.Random(seed)
        base, radical_dim, local = random_commutative(rng)
        n = base.dim
        algebra = rebased(base, random_basis(n, rng))
        assert algebra.structure_violation() is None
        radical = jacobson_radical(algebra)
        assert radical.dim == radical_dim
        samples = [unit_vector(n, i) for i in range(n)]
        samples.extend(vector([rng.randint(-2, 2) for _ in range(n)]) for _ in range(3))
        samples.extend(radical.vectors)
        for z in samples:
            assert radical.contains(z) == is_nilpotent_element(algebra, z)
        assert is_local(algebra) == local

    def test_staircase_shape(self) -> None:
        """Test Q[x, y] / (x^2, x y, y^2) as the staircase [2, 1]."""
        algebra = staircase_algebra([2, 1])
        assert algebra.dim == 3
        assert algebra.structure_violation() is None
        assert jacobson_radical(algebra) == Subspace.span(
            [vector([0, 1, 0]), vector([0, 0, 1])], 3
        )
