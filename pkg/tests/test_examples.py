"""Tests for the built-in example families.

Tests cover the shifted sl2 model, the lattice bundles computed through the
mode engine, and the property and randomized suites.
"""

from fractions import Fraction

import pytest

from voa_forge.errors import InadmissibleShiftError, InputError
from voa_forge.exactla import Matrix, Subspace, vector
from voa_forge.examples import (
    DEFAULT_SHIFTS,
    SCHEMA,
    affine_closure_suite,
    basis_change_suite,
    build_lattice_shift,
    build_sl2,
    check_sl2_selfdual,
    default_shift,
    fock_property_suite,
    full_report,
    gl2_algebra,
    lh0_weight,
    sl2_report,
)
from voa_forge.lattice import EvenLattice, ShiftDatum
from voa_forge.leibniz import solvable_radical
from voa_forge.onetrunc import FAIL, PASS, SKIP, form


def check_status(report: dict, name: str) -> str:
    return next(c["status"] for c in report["checks"] if c["name"] == name)


@pytest.fixture(scope="module")
def a1_bundle():
    return build_lattice_shift(default_shift("a1"))


class TestSl2Model:
    """Tests for the shifted affine sl2 model."""

    @pytest.mark.parametrize("level", [1, 2, 3, 4])
    def test_report_passes(self, level: int) -> None:
        """Test that de Rham, self-duality and the weights all check out."""
        report = sl2_report(build_sl2(level))
        assert report["passed"]
        assert report["self_dual"] is True
        assert report["de_rham"]["passed"] is True
        assert report["dims"] == {"V0": level + 1, "V1": 2 * level}

    def test_lh1_matrix(self) -> None:
        """Test L_H(1) u_i = 2(i - k) x^i and L_H(1) w_i = 0 at level 2."""
        model = build_sl2(2)
        assert model.lh1 == Matrix.from_rows([[-4, 0, 0, 0], [0, -2, 0, 0], [0, 0, 0, 0]])
        assert check_sl2_selfdual(model)

    def test_label_weights(self) -> None:
        """Test L_H(0) on e(-1)^p 1 and on h(-1) e(-1)^i 1."""
        assert lh0_weight((1, 1, 1), (), ()) == 0
        assert lh0_weight((1,), (), (1,)) == 1
        assert lh0_weight((2, 1), (), ()) == 1

    @pytest.mark.parametrize("level", [0, -1, True])
    def test_bad_level(self, level: int) -> None:
        """Test that a level must be a positive integer."""
        with pytest.raises(InputError):
            build_sl2(level)


class TestDefaultShifts:
    """Tests for the named shifts."""

    def test_unknown_name(self) -> None:
        """Test that an unknown shift name is an input error."""
        with pytest.raises(InputError, match="Unknown shift"):
            default_shift("e8")

    def test_names(self) -> None:
        """Test that each named shift builds."""
        for name in DEFAULT_SHIFTS:
            assert default_shift(name).lattice.rank >= 1


class TestLatticeBundle:
    """Tests for tables computed by the mode engine."""

    def test_a1_tables(self, a1_bundle) -> None:
        """Test the hand values of the shifted A1 theory."""
        d = a1_bundle.datum
        assert a1_bundle.v0.points == ((0,), (1,))
        assert d.v1.bracket(vector([1, 0]), vector([0, 1])) == vector([0, 2])
        assert form(d) == Matrix.from_rows([[2, 0], [0, 0]])
        assert d.tminus1.apply(vector([1, 0])) == vector([0, -1])
        assert d.lminus1.apply(vector([0, 1])) == vector([0, 1])
        assert a1_bundle.h_coords == vector([Fraction(1, 2), 0])
        assert a1_bundle.bigrading == ((1, 0), (2, 1))

    def test_a1_report(self, a1_bundle) -> None:
        """Test the full report of the shifted A1 theory."""
        report = full_report(a1_bundle)
        assert report["schema"] == SCHEMA
        assert report["passed"]
        assert report["trichotomy"]["case"] == "i"
        assert report["de_rham"]["nu"] == 1
        assert report["graded_dimensions"][:3] == [2, 2, 6]
        assert report["central_charge"] == {"prime": "1", "shifted": "-5"}

    @pytest.mark.parametrize("gram,k", [([[4]], 2), ([[6]], 3)])
    def test_rank_one_family(self, gram: list[list[int]], k: int) -> None:
        """Test t(-1) u = (1 - 2k) v and nu = k for (b, b) = 2k."""
        bundle = build_lattice_shift(ShiftDatum(EvenLattice.from_rows(gram), ["1/2"]))
        d = bundle.datum
        assert d.tminus1.apply(vector([1, 0])) == vector([0, 1 - 2 * k])
        assert form(d) == Matrix.from_rows([[2 * k, 0], [0, 0]])
        report = full_report(bundle, series_depth=2)
        assert report["passed"]
        assert report["de_rham"]["nu"] == k

    def test_a1a1_dimensions(self) -> None:
        """Test dim V0 = 4, dim V1 = 8 and nu = 2 for A1 + A1."""
        report = full_report(build_lattice_shift(default_shift("a1a1")), series_depth=2)
        assert report["dims"] == {"V0": 4, "V1": 8}
        assert report["de_rham"]["nu"] == 2
        assert report["passed"]

    def test_unshifted_is_cft_type(self) -> None:
        """Test that h = 0 gives V1 = sl2 with a zero radical."""
        bundle = build_lattice_shift(default_shift("a1_unshifted"))
        report = full_report(bundle, series_depth=2)
        assert report["dims"] == {"V0": 1, "V1": 3}
        assert report["trichotomy"] is None
        assert check_status(report, "trichotomy") == SKIP
        assert check_status(report, "levi_form_nondegenerate") == PASS
        assert report["passed"]

    def test_inadmissible(self) -> None:
        """Test that h = 3a/2 is refused before any computation."""
        with pytest.raises(InadmissibleShiftError):
            build_lattice_shift(ShiftDatum(EvenLattice.from_rows([[2]]), ["3/2"]))


class TestSuites:
    """Tests for the property and randomized suites."""

    def test_fock_properties(self, a1_bundle) -> None:
        """Test every mode identity on all A1 state pairs of weight at most 2."""
        results = fock_property_suite(a1_bundle)
        assert [r.name for r in results] == [
            "commutator_identity",
            "skew_symmetry",
            "translation_covariance",
            "virasoro_prime",
            "virasoro_shifted",
            "lh0_eigenvalues",
            "shifted_virasoro_two_routes",
        ]
        assert all(r.status == PASS for r in results)
        details = {r.name: r.detail for r in results}
        assert details["commutator_identity"] == "10 states"
        assert details["lh0_eigenvalues"] == "32 states"

    def test_affine_closure(self) -> None:
        """Test the affine sl2 relations for |m|, |n| <= 2 on every state of weight at most 2."""
        results = affine_closure_suite()
        assert all(r.status == PASS for r in results)

    @pytest.mark.parametrize("seed", [0, 1, 42])
    def test_basis_change(self, seed: int) -> None:
        """Test that the gl2 radical survives random changes of basis."""
        assert basis_change_suite(gl2_algebra(), seed).status == PASS

    def test_basis_change_is_deterministic(self) -> None:
        """Test that the same seed gives the same detail."""
        first = basis_change_suite(gl2_algebra(), 7, trials=3)
        second = basis_change_suite(gl2_algebra(), 7, trials=3)
        assert first == second
        assert first.status != FAIL

    def test_gl2_radical(self) -> None:
        """Test that the radical used by the suite is the centre."""
        assert solvable_radical(gl2_algebra()) == Subspace.span([vector([0, 0, 0, 1])], 4)
