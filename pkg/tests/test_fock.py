"""Tests for the Fock space mode calculus.

Tests use the A1 lattice with basis vector a, (a, a) = 2, and check hand
computed modes as well as the vertex algebra identities the engine must
satisfy.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voa_forge.errors import InputError, ModeRecursionError
from voa_forge.examples import DEFAULT_SHIFTS, default_shift
from voa_forge.lattice import EvenLattice, ShiftDatum
from voa_forge.fock import (
    FockState,
    FockVector,
    ModeEngine,
    VirasoroDatum,
    affine_closure_holds,
    binomial,
    central_charge,
    check_h1h,
    colored_partitions,
    commutator_identity_holds,
    graded_dimension_series,
    heisenberg_state,
    lh0_eigenvalue_holds,
    partition_series,
    skew_symmetry_holds,
    translation_covariance_holds,
    virasoro_mode,
    virasoro_relation_holds,
    weight_space,
)

A1 = EvenLattice.from_rows([[2]])
HALF = ShiftDatum(A1, ["1/2"])
UNSHIFTED = ShiftDatum(A1, ["0"])
LOW_STATES = [FockVector.basis(g.state) for n in range(3) for g in weight_space(HALF, n)]


def state(point: int, *modes: int) -> FockVector:
    """a(-n1) ... a(-nr) e^(point * a)."""
    return FockVector.basis(FockState.make([(n, 0) for n in modes], (point,)))


def vac() -> FockVector:
    return FockVector.vacuum(1)


@pytest.fixture
def engine() -> ModeEngine:
    return ModeEngine(A1)


@pytest.fixture
def vd() -> VirasoroDatum:
    return VirasoroDatum.build(HALF)


class TestFockState:
    """Tests for basis states and vectors."""

    def test_non_canonical_factors(self) -> None:
        """Test that unsorted Heisenberg factors are refused."""
        with pytest.raises(InputError):
            FockState(((2, 0), (1, 0)), (0,))

    def test_make_sorts(self) -> None:
        """Test that make puts factors in canonical order."""
        assert FockState.make([(2, 0), (1, 0)], (0,)).heis == ((1, 0), (2, 0))

    def test_zero_terms_dropped(self) -> None:
        """Test that cancelling terms leave the zero vector."""
        assert (state(1, 1) - state(1, 1)).is_zero()

    def test_to_json(self) -> None:
        """Test the JSON form of a(-1) e^a."""
        assert state(1, 1).to_json() == [{"heis": [[1, -1]], "point": [1], "coeff": "1"}]

    def test_from_json(self) -> None:
        """Test parsing with a rational coefficient."""
        data = [{"heis": [[1, -2]], "point": [0], "coeff": "3/2"}]
        assert FockVector.from_json(data, 1) == state(0, 2).scaled(Fraction(3, 2))

    @pytest.mark.parametrize(
        "factor",
        [[0, -1], [2, -1], [1, 1], [1, 0]],
    )
    def test_from_json_bad_factor(self, factor: list[int]) -> None:
        """Test that directions outside 1..rank and nonnegative modes are refused."""
        with pytest.raises(InputError):
            FockVector.from_json([{"heis": [factor], "point": [0]}], 1)

    def test_from_json_bad_point(self) -> None:
        """Test that a point of the wrong length is refused."""
        with pytest.raises(InputError, match="lattice point"):
            FockVector.from_json([{"point": [0, 0]}], 1)


class TestCounting:
    """Tests for the combinatorial helpers."""

    def test_binomial_negative_top(self) -> None:
        """Test C(-1, 3) = -1 and C(5, 2) = 10."""
        assert binomial(-1, 3) == -1
        assert binomial(5, 2) == 10

    def test_partition_series(self) -> None:
        """Test the partition numbers."""
        assert partition_series(1, 5) == [1, 1, 2, 3, 5, 7]

    def test_colored_partitions_count(self) -> None:
        """Test that two-colour partitions match the series."""
        for total in range(5):
            assert len(list(colored_partitions(total, 2))) == partition_series(2, 4)[total]

    def test_weight_spaces(self) -> None:
        """Test dim V0, ..., V4 = 2, 2, 6, 8, 14 for A1 with h = a/2."""
        assert [len(weight_space(HALF, n)) for n in range(5)] == [2, 2, 6, 8, 14]
        assert graded_dimension_series(HALF, 4) == [2, 2, 6, 8, 14]

    def test_unshifted_weight_spaces(self) -> None:
        """Test dim V0, ..., V4 = 1, 3, 4, 7, 13 for unshifted A1."""
        assert graded_dimension_series(UNSHIFTED, 4) == [1, 3, 4, 7, 13]

    def test_weight_one_bigrading(self) -> None:
        """Test the bigradings of a(-1) 1 and a(-1) e^a."""
        graded = weight_space(HALF, 1)
        assert [g.bigrading for g in graded] == [(1, 0), (2, 1)]

    def test_unshifted_weight_one(self) -> None:
        """Test that V1 of unshifted A1 is three-dimensional."""
        assert len(weight_space(UNSHIFTED, 1)) == 3


class TestModes:
    """Tests for hand-computed modes."""

    def test_heisenberg_pairing(self, engine: ModeEngine) -> None:
        """Test a(1) a(-1) 1 = 2 * 1."""
        assert engine.heis_mode([1], 1, state(0, 1)) == vac().scaled(2)

    def test_heisenberg_zero_mode(self, engine: ModeEngine) -> None:
        """Test a(0) e^a = 2 e^a."""
        assert engine.heis_mode([1], 0, state(1)) == state(1).scaled(2)

    def test_exp_on_vacuum(self, engine: ModeEngine) -> None:
        """Test e^a(-1) 1 = e^a and e^a(-2) 1 = a(-1) e^a."""
        assert engine.exp_mode((1,), -1, vac()) == state(1)
        assert engine.exp_mode((1,), -2, vac()) == state(1, 1)
        assert engine.exp_mode((1,), 0, vac()).is_zero()

    def test_exp_on_opposite(self, engine: ModeEngine) -> None:
        """Test e^a(1) e^-a = 1 and e^a(-1) e^-a = (a(-1)^2 + a(-2)) / 2."""
        assert engine.exp_mode((1,), 1, state(-1)) == vac()
        expected = state(0, 1, 1).scaled(Fraction(1, 2)) + state(0, 2).scaled(Fraction(1, 2))
        assert engine.exp_mode((1,), -1, state(-1)) == expected

    def test_iterate_matches_heisenberg(self, engine: ModeEngine) -> None:
        """Test that the iterate of a(-1) 1 is the Heisenberg field."""
        for m in range(-2, 3):
            assert engine.iterate_mode(state(0, 1), m, state(1, 1)) == engine.heis_mode(
                [1], m, state(1, 1)
            )

    def test_weight_one_bracket(self, engine: ModeEngine) -> None:
        """Test u(0) v = 2v for u = a(-1) 1 and v = a(-1) e^a."""
        assert engine.iterate_mode(state(0, 1), 0, state(1, 1)) == state(1, 1).scaled(2)

    def test_vacuum_is_identity(self, engine: ModeEngine) -> None:
        """Test 1(-1) w = w and 1(n) w = 0 otherwise."""
        w = state(1, 2)
        assert engine.iterate_mode(vac(), -1, w) == w
        assert engine.iterate_mode(vac(), 0, w).is_zero()

    def test_mode_bound(self, engine: ModeEngine) -> None:
        """Test that e^a(k) e^-a vanishes beyond k = 1."""
        a = FockState.make([], (1,))
        w = FockState.make([], (-1,))
        assert engine.mode_bound(a, w) == 1
        assert engine.exp_mode((1,), 2, FockVector.basis(w)).is_zero()

    def test_memo(self, engine: ModeEngine) -> None:
        """Test that iterate results are cached and can be cleared."""
        engine.iterate_mode(state(1, 1), 0, state(0, 1))
        assert engine.cache_size > 0
        engine.clear_cache()
        assert engine.cache_size == 0

    def test_recursion_depth(self, engine: ModeEngine) -> None:
        """Test that a state with thousands of factors reports the offending mode."""
        deep = FockVector.basis(FockState.make([(1, 0)] * 3000, (0,)))
        with pytest.raises(ModeRecursionError, match="depth") as info:
            engine.iterate_mode(deep, 0, vac())
        assert info.value.counterexample[1] == 0
        assert info.value.counterexample[2] == {"heis": [], "point": [0]}


class TestVirasoro:
    """Tests for the two conformal vectors."""

    def test_translation(self, engine: ModeEngine, vd: VirasoroDatum) -> None:
        """Test L'(-1) e^a = a(-1) e^a."""
        assert virasoro_mode(engine, vd, -1, state(1), which="prime") == state(1, 1)

    def test_weights(self, engine: ModeEngine, vd: VirasoroDatum) -> None:
        """Test L'(0) and L_h(0) on a(-1) e^a."""
        v = state(1, 1)
        assert virasoro_mode(engine, vd, 0, v, which="prime") == v.scaled(2)
        assert virasoro_mode(engine, vd, 0, v, cross_check=True) == v

    def test_central_charges(self, engine: ModeEngine, vd: VirasoroDatum) -> None:
        """Test c' = 1 and c_h = 1 - 12 (h, h) = -5."""
        assert central_charge(engine, vd, "prime") == 1
        assert central_charge(engine, vd, "shifted") == -5

    def test_unknown_choice(self, engine: ModeEngine, vd: VirasoroDatum) -> None:
        """Test that a third conformal vector name is refused."""
        with pytest.raises(InputError):
            virasoro_mode(engine, vd, 0, vac(), which="other")

    def test_lh0_on_weight_space(self, engine: ModeEngine, vd: VirasoroDatum) -> None:
        """Test L_h(0) eigenvalues on all states of weight at most 2."""
        for n in range(3):
            for graded in weight_space(HALF, n):
                assert lh0_eigenvalue_holds(engine, vd, graded)

    def test_h1h(self, engine: ModeEngine) -> None:
        """Test h(1) h = (nu / 2) 1 with nu = 1."""
        assert check_h1h(engine, HALF, 1)
        assert not check_h1h(engine, HALF, 2)

    def test_heisenberg_state(self) -> None:
        """Test that h(-1) 1 for h = a/2 has coefficient 1/2."""
        assert heisenberg_state(["1/2"], 1) == state(0, 1).scaled(Fraction(1, 2))


class TestIdentities:
    """Tests for the vertex algebra identities."""

    @settings(max_examples=60, deadline=None)
    @given(
        st.sampled_from(LOW_STATES),
        st.sampled_from(LOW_STATES),
        st.integers(min_value=-2, max_value=2),
        st.integers(min_value=-2, max_value=2),
        st.sampled_from(LOW_STATES[:4]),
    )
    def test_commutator_identity(
        self, u: FockVector, v: FockVector, m: int, n: int, w: FockVector
    ) -> None:
        """Test the commutator formula on states of weight at most 2."""
        assert commutator_identity_holds(ModeEngine(A1), u, v, m, n, w)

    def test_skew_symmetry(self, engine: ModeEngine, vd: VirasoroDatum) -> None:
        """Test skew symmetry on the weight-one pair."""
        u, v = state(0, 1), state(1, 1)
        assert skew_symmetry_holds(engine, vd, u, v)
        assert skew_symmetry_holds(engine, vd, v, u)

    def test_translation_covariance(self, engine: ModeEngine, vd: VirasoroDatum) -> None:
        """Test (L'(-1) a)(n) = -n a(n - 1) for a = e^a."""
        for n in (-1, 0, 1):
            assert translation_covariance_holds(engine, vd, state(1), n, state(0, 1))

    @pytest.mark.parametrize("which,charge", [("prime", 1), ("shifted", -5)])
    def test_virasoro_relations(
        self, engine: ModeEngine, vd: VirasoroDatum, which: str, charge: int
    ) -> None:
        """Test [L(m), L(n)] on a weight-one state."""
        for m in (-1, 1, 2):
            for n in (-2, -1, 0):
                assert virasoro_relation_holds(
                    engine, vd, m, n, state(1, 1), which, Fraction(charge)
                )

    def test_affine_closure(self, engine: ModeEngine) -> None:
        """Test the affine sl2 relations among e^a, e^-a and a(-1) 1."""
        triple = [state(1), state(-1), state(0, 1)]
        for u in triple:
            for v in triple:
                assert affine_closure_holds(engine, u, v, 1, -1, vac())
                assert affine_closure_holds(engine, u, v, 0, -1, state(1))


class TestAcrossShifts:
    """Counting and L_h(0) checks on every built-in shift."""

    @pytest.mark.parametrize("name", list(DEFAULT_SHIFTS))
    def test_character_matches_weight_spaces(self, name: str) -> None:
        """Test the character against weight-space counts up to weight 4."""
        shift = default_shift(name)
        counts = [len(weight_space(shift, n)) for n in range(5)]
        assert graded_dimension_series(shift, 4) == counts

    @pytest.mark.parametrize("name", list(DEFAULT_SHIFTS))
    def test_lh0_eigenvalues(self, name: str) -> None:
        """Test the L_h(0) eigenvalue on every state up to weight 4 (3 in rank 2)."""
        shift = default_shift(name)
        engine, vd = ModeEngine(shift.lattice), VirasoroDatum.build(shift)
        cap = 4 if shift.lattice.rank == 1 else 3
        for n in range(cap + 1):
            for graded in weight_space(shift, n):
                assert lh0_eigenvalue_holds(engine, vd, graded)

    def test_lh0_state_count(self) -> None:
        """Test that the eigenvalue checks above cover at least fifty states."""
        total = 0
        for name in DEFAULT_SHIFTS:
            shift = default_shift(name)
            cap = 4 if shift.lattice.rank == 1 else 3
            total += sum(len(weight_space(shift, n)) for n in range(cap + 1))
        assert total >= 50
