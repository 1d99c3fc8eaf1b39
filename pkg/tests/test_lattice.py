"""Tests for the lattice module.

Tests cover Gram matrix validation, short vector enumeration, shift
admissibility, the set A and the V0 algebra built from it.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voa_forge.errors import InadmissibleShiftError, LatticeError
from voa_forge.frobalg import de_rham_check, is_local, verify_frobenius
from voa_forge.lattice import (
    Cocycle,
    EvenLattice,
    ShiftDatum,
    build_cocycle,
    build_V0,
    enumerate_A,
    require_admissible,
    shift_admissible,
    short_vectors,
)

A1 = [[2]]
A2 = [[2, -1], [-1, 2]]
A1A1 = [[2, 0], [0, 2]]


def shift_of(gram: list[list[int]], h: list[str]) -> ShiftDatum:
    return ShiftDatum(EvenLattice.from_rows(gram), h)


class TestEvenLattice:
    """Tests for Gram matrix validation."""

    def test_odd_diagonal(self) -> None:
        """Test that an odd lattice is rejected."""
        with pytest.raises(LatticeError, match="odd"):
            EvenLattice.from_rows([[1]])

    def test_not_positive_definite(self) -> None:
        """Test that an indefinite Gram matrix is rejected."""
        with pytest.raises(LatticeError, match="order 2"):
            EvenLattice.from_rows([[2, 3], [3, 2]])

    def test_not_symmetric(self) -> None:
        """Test that an asymmetric Gram matrix is rejected."""
        with pytest.raises(LatticeError, match="symmetric"):
            EvenLattice.from_rows([[2, 1], [0, 2]])

    def test_inner_product(self) -> None:
        """Test (a1 + a2, a1 + a2) = 2 in A2."""
        assert EvenLattice.from_rows(A2).norm((1, 1)) == 2

    def test_direct_sum(self) -> None:
        """Test that A1 + A1 has the block diagonal Gram matrix."""
        a1 = EvenLattice.from_rows(A1)
        assert a1.direct_sum(a1) == EvenLattice.from_rows(A1A1)


class TestShortVectors:
    """Tests for Fincke-Pohst enumeration."""

    def test_a1_roots(self) -> None:
        """Test the norm-2 ball of A1."""
        assert short_vectors(EvenLattice.from_rows(A1), [0], 2) == [(-1,), (0,), (1,)]

    def test_a2_roots(self) -> None:
        """Test that A2 has six roots plus the origin within norm 2."""
        points = short_vectors(EvenLattice.from_rows(A2), [0, 0], 2)
        assert len(points) == 7
        assert (1, 1) in points and (1, -1) not in points

    def test_shifted_centre(self) -> None:
        """Test a ball centred at h = a/2 in A1."""
        points = short_vectors(EvenLattice.from_rows(A1), ["1/2"], "1/2")
        assert points == [(0,), (1,)]

    def test_negative_radius(self) -> None:
        """Test that a negative radius gives no points."""
        assert short_vectors(EvenLattice.from_rows(A1), [0], -1) == []

    @settings(max_examples=30, deadline=None)
    @given(
        st.integers(min_value=-3, max_value=3),
        st.integers(min_value=-3, max_value=3),
        st.integers(min_value=0, max_value=8),
    )
    def test_matches_brute_force(self, c1: int, c2: int, radius2: int) -> None:
        """Test enumeration in A2 against a brute-force box search."""
        lattice = EvenLattice.from_rows(A2)
        centre = (Fraction(c1, 2), Fraction(c2, 3))
        expected = sorted(
            (x, y)
            for x in range(-8, 9)
            for y in range(-8, 9)
            if lattice.norm((x - centre[0], y - centre[1])) <= radius2
        )
        assert short_vectors(lattice, centre, radius2) == expected


class TestShiftDatum:
    """Tests for shifts and admissibility."""

    def test_non_integral_pairing(self) -> None:
        """Test that h = a/4 does not pair integrally with A1."""
        with pytest.raises(LatticeError, match="integrally"):
            shift_of(A1, ["1/4"])

    def test_wrong_length(self) -> None:
        """Test that h must have one entry per basis vector."""
        with pytest.raises(LatticeError, match="length"):
            shift_of(A1, ["0", "0"])

    def test_charge(self) -> None:
        """Test (h, a) = 1 for h = a/2."""
        assert shift_of(A1, ["1/2"]).charge((1,)) == 1

    @pytest.mark.parametrize(
        "gram,h,admissible",
        [
            (A1, ["0"], True),
            (A1, ["1/2"], True),
            (A1, ["1"], False),
            (A1, ["3/2"], False),
            (A1A1, ["1/2", "1/2"], True),
            ([[4]], ["1/2"], True),
        ],
    )
    def test_admissibility(self, gram: list[list[int]], h: list[str], admissible: bool) -> None:
        """Test admissibility on small examples."""
        assert shift_admissible(shift_of(gram, h)) is admissible

    def test_require_admissible(self) -> None:
        """Test that an inadmissible shift raises."""
        with pytest.raises(InadmissibleShiftError):
            require_admissible(shift_of(A1, ["3/2"]))

    def test_to_json(self) -> None:
        """Test the JSON form of a shift."""
        assert shift_of(A1, ["1/2"]).to_json() == {"gram": [[2]], "h": ["1/2"]}


class TestV0:
    """Tests for the set A and the V0 algebra."""

    def test_a1_points(self) -> None:
        """Test A = {0, a} for h = a/2."""
        assert enumerate_A(shift_of(A1, ["1/2"])) == [(0,), (1,)]

    def test_unshifted_points(self) -> None:
        """Test A = {0} when h = 0."""
        assert enumerate_A(shift_of(A1, ["0"])) == [(0,)]

    def test_inadmissible_points(self) -> None:
        """Test that A is refused for an inadmissible shift."""
        with pytest.raises(InadmissibleShiftError):
            enumerate_A(shift_of(A1, ["3/2"]))

    def test_a1a1_v0(self) -> None:
        """Test that V0 for A1 + A1 is a four-dimensional de Rham algebra with nu = 2."""
        shift = shift_of(A1A1, ["1/2", "1/2"])
        v0 = build_V0(shift, build_cocycle(shift.lattice))
        assert v0.points == ((0, 0), (0, 1), (1, 0), (1, 1))
        assert verify_frobenius(v0.algebra)
        assert is_local(v0.algebra)
        report = de_rham_check(v0.algebra, v0.grading)
        assert report.passed
        assert report.nu == 2
        assert report.poincare_series() == (1, 2, 1)

    def test_rank_one_level_k(self) -> None:
        """Test that (b, b) = 2k with h = b/2 gives the dual numbers with nu = k."""
        shift = shift_of([[6]], ["1/2"])
        v0 = build_V0(shift, build_cocycle(shift.lattice))
        assert v0.points == ((0,), (1,))
        assert de_rham_check(v0.algebra, v0.grading).nu == 3


class TestCocycle:
    """Tests for the sign cocycle."""

    def test_commutator_on_a2(self) -> None:
        """Test eps(a, b) eps(b, a) = (-1)^(a, b) on the A2 ball."""
        lattice = EvenLattice.from_rows(A2)
        points = short_vectors(lattice, [0, 0], 6)
        assert build_cocycle(lattice).verify_on(lattice, points)

    def test_bad_sign(self) -> None:
        """Test that signs other than +1 and -1 are refused."""
        with pytest.raises(LatticeError):
            Cocycle([[2]])
