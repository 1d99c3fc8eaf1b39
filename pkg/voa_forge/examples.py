"""Builders for the two example families and the reports that check them.

* The shifted affine sl2 model at level k, transcribed as finite data:
  V0 = Q[x]/x^(k+1) and the action of L_H(1) on the 2k listed V1 states.
* Shifted lattice theories: every table of the truncated datum is computed
  with the Fock mode engine, then run through the analyzers.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Optional, Sequence

from voa_forge.errors import CheckFailure, CrossCheckError, InputError, ModeConsistencyError
from voa_forge.exactla import (
    Matrix,
    Subspace,
    Vector,
    format_scalar,
    image,
    scale_vector,
    unit_vector,
    zero_vector,
)
from voa_forge.fock import (
    FockState,
    FockVector,
    GradedState,
    ModeEngine,
    VirasoroDatum,
    affine_closure_holds,
    central_charge,
    check_h1h,
    commutator_identity_holds,
    graded_dimension_series,
    heisenberg_state,
    lh0_eigenvalue_holds,
    skew_symmetry_holds,
    translation_covariance_holds,
    virasoro_mode,
    virasoro_relation_holds,
    weight_space,
)
from voa_forge.frobalg import (
    FrobeniusAlgebra,
    GradingOperator,
    de_rham_check,
    is_local,
    truncated_polynomial_algebra,
    verify_frobenius,
)
from voa_forge.lattice import (
    EvenLattice,
    ShiftDatum,
    ShiftedV0,
    build_V0,
    build_cocycle,
    require_admissible,
)
from voa_forge.leibniz import LeibnizAlgebra, change_basis, radical_tower, solvable_radical
from voa_forge.onetrunc import (
    CheckResult,
    TruncatedConformalDatum,
    classify_trichotomy,
    form,
    levi_form_check,
    levi_trivial_action_check,
    shifted_h_checks,
    shifted_structure_check,
    translation_ideal,
    verify_axioms,
)

logger = logging.getLogger(__name__)

SCHEMA = "voa-forge/1"

DEFAULT_SHIFTS: dict[str, tuple[list[list[int]], list[str]]] = {
    "a1": ([[2]], ["1/2"]),
    "a1a1": ([[2, 0], [0, 2]], ["1/2", "1/2"]),
    "rank1_k2": ([[4]], ["1/2"]),
    "rank1_k3": ([[6]], ["1/2"]),
    "a1_unshifted": ([[2]], ["0"]),
}


def default_shift(name: str) -> ShiftDatum:
    """Look up one of the built-in lattice shifts by name.

    Raises:
        InputError: If the name is unknown.
    """
    key = name.lower().strip()
    if key not in DEFAULT_SHIFTS:
        raise InputError(f"Unknown shift '{name}'. Valid names: {', '.join(DEFAULT_SHIFTS)}")
    gram, h = DEFAULT_SHIFTS[key]
    return ShiftDatum(EvenLattice.from_rows(gram), h)


# -- shifted affine sl2 ------------------------------------------------------


@dataclass(frozen=True)
class Sl2Label:
    """A spanning state e_I f_J h_K 1 recorded by its mode lists."""

    name: str
    e_modes: tuple[int, ...] = ()
    f_modes: tuple[int, ...] = ()
    h_modes: tuple[int, ...] = ()


def lh0_weight(e_modes: Sequence[int], f_modes: Sequence[int], h_modes: Sequence[int]) -> int:
    """L_H(0) eigenvalue of e(-l..) f(-m..) h(-n..) 1: sum(l-1) + sum(m+1) + sum(n)."""
    return sum(n - 1 for n in e_modes) + sum(n + 1 for n in f_modes) + sum(h_modes)


@dataclass(frozen=True)
class Sl2ShiftModel:
    """Finite model of the level-k shifted affine sl2 theory.

    V1 is labelled u_i = h(-1)e(-1)^i 1 followed by w_i = e(-2)e(-1)^i 1 for
    0 <= i < k. The labels are treated as a basis.
    """

    level: int
    v0: FrobeniusAlgebra
    grading: GradingOperator
    v0_labels: tuple[Sl2Label, ...]
    v1_labels: tuple[Sl2Label, ...]
    lh1: Matrix


def build_sl2(k: int) -> Sl2ShiftModel:
    """Build the level-k model.

    Raises:
        InputError: If k <= 0.
    """
    if not isinstance(k, int) or isinstance(k, bool) or k <= 0:
        raise InputError(f"Level must be a positive integer, got {k!r}.")
    v0, grading = truncated_polynomial_algebra(k)
    v0_labels = tuple(Sl2Label(f"x^{p}", e_modes=(1,) * p) for p in range(k + 1))
    u_labels = [Sl2Label(f"u_{i}", e_modes=(1,) * i, h_modes=(1,)) for i in range(k)]
    w_labels = [Sl2Label(f"w_{i}", e_modes=(2,) + (1,) * i) for i in range(k)]
    columns = [scale_vector(Fraction(2 * (i - k)), unit_vector(k + 1, i)) for i in range(k)]
    columns += [zero_vector(k + 1)] * k
    lh1 = Matrix.from_columns(columns, k + 1)
    logger.debug("built sl2 model at level %d", k)
    return Sl2ShiftModel(k, v0, grading, v0_labels, tuple(u_labels + w_labels), lh1)


def check_sl2_selfdual(model: Sl2ShiftModel) -> bool:
    """True iff L_H(1)V1 = span{1, x, ..., x^(k-1)}, missing exactly x^k."""
    k = model.level
    expected = Subspace.span([unit_vector(k + 1, p) for p in range(k)], k + 1)
    return image(model.lh1) == expected


def _label_json(label: Sl2Label) -> dict[str, Any]:
    return {
        "name": label.name,
        "weight": lh0_weight(label.e_modes, label.f_modes, label.h_modes),
    }


def sl2_report(model: Sl2ShiftModel) -> dict[str, Any]:
    """Frobenius, locality, de Rham and self-duality checks for the sl2 model."""
    k = model.level
    de_rham = de_rham_check(model.v0, model.grading)
    anti_diagonal = Matrix.from_rows(
        [[1 if p + q == k else 0 for q in range(k + 1)] for p in range(k + 1)]
    )
    self_dual = check_sl2_selfdual(model)
    checks = [
        CheckResult.of("frobenius", verify_frobenius(model.v0)),
        CheckResult.of("local", is_local(model.v0)),
        CheckResult.of("de_rham", de_rham.passed),
        CheckResult.of("nu_equals_level", de_rham.nu == k, f"nu = {de_rham.nu}"),
        CheckResult.of("pairing_anti_diagonal", model.v0.gram() == anti_diagonal),
        CheckResult.of("self_dual", self_dual),
        CheckResult.of(
            "v0_labels_weight_zero",
            all(lh0_weight(x.e_modes, x.f_modes, x.h_modes) == 0 for x in model.v0_labels),
        ),
        CheckResult.of(
            "v1_labels_weight_one",
            all(lh0_weight(x.e_modes, x.f_modes, x.h_modes) == 1 for x in model.v1_labels),
        ),
    ]
    return {
        "schema": SCHEMA,
        "kind": "sl2-shift",
        "level": k,
        "dims": {"V0": model.v0.dim, "V1": len(model.v1_labels)},
        "v0_labels": [_label_json(x) for x in model.v0_labels],
        "v1_labels": [_label_json(x) for x in model.v1_labels],
        "lh1": model.lh1.to_json(),
        "de_rham": de_rham.to_json(),
        "self_dual": self_dual,
        "checks": [c.to_json() for c in checks],
        "passed": not any(c.failed for c in checks),
    }


# -- shifted lattice theories ------------------------------------------------


@dataclass(frozen=True)
class LatticeShiftBundle:
    """Everything computed for one shifted lattice theory."""

    shift: ShiftDatum
    engine: ModeEngine
    virasoro: VirasoroDatum
    v0: ShiftedV0
    v1_states: tuple[GradedState, ...]
    datum: TruncatedConformalDatum
    h_coords: Vector

    @property
    def bigrading(self) -> tuple[tuple[int, int], ...]:
        return tuple(g.bigrading for g in self.v1_states)

    def v0_vector(self, i: int) -> FockVector:
        return FockVector.basis(FockState((), self.v0.points[i]))

    def v1_vector(self, i: int) -> FockVector:
        return FockVector.basis(self.v1_states[i].state)


def _coordinates(v: FockVector, index: dict[FockState, int], n: int, where: str) -> Vector:
    out = [Fraction(0)] * n
    for state, coeff in v.items():
        if state not in index:
            raise CrossCheckError(
                f"Mode result left {where}: state {state.to_json()} is not a basis state.",
                counterexample=state.to_json(),
            )
        out[index[state]] = coeff
    return tuple(out)


def _check_v0_product(engine: ModeEngine, v0: ShiftedV0) -> None:
    """Compare e^a(-1)e^b from the exponential modes with the V0 table."""
    points = v0.points
    index = {FockState((), a): k for k, a in enumerate(points)}
    n = len(points)
    for i, j in product(range(n), repeat=2):
        computed = engine.exp_mode(points[i], -1, FockVector.basis(FockState((), points[j])))
        coords = _coordinates(computed, index, n, "V0")
        if coords != v0.algebra.basis_product(i, j):
            raise CrossCheckError(
                f"V0 product of e^{points[i]} and e^{points[j]} "
                "disagrees with the mode computation.",
                counterexample=[list(points[i]), list(points[j])],
            )


def build_lattice_shift(shift: ShiftDatum) -> LatticeShiftBundle:
    """Compute V0, V1 and every connecting map of a shifted lattice theory.

    Raises:
        InadmissibleShiftError: If the shift is not admissible.
        CrossCheckError: If the V0 table and the mode engine disagree, or a
            mode leaves the weight space it should stay in.
        ModeConsistencyError: If the two formulas for L_h(-1) disagree.
    """
    require_admissible(shift)
    lattice = shift.lattice
    cocycle = build_cocycle(lattice)
    engine = ModeEngine(lattice, cocycle)
    virasoro = VirasoroDatum.build(shift)
    v0 = build_V0(shift, cocycle)
    _check_v0_product(engine, v0)

    n0 = len(v0.points)
    v0_index = {FockState((), a): k for k, a in enumerate(v0.points)}
    v1_states = tuple(weight_space(shift, 1))
    n1 = len(v1_states)
    v1_index = {g.state: k for k, g in enumerate(v1_states)}
    v0_basis = [FockVector.basis(FockState((), a)) for a in v0.points]
    v1_basis = [FockVector.basis(g.state) for g in v1_states]

    for g, vec in zip(v1_states, v1_basis):
        if virasoro_mode(engine, virasoro, 0, vec, which="prime") != vec.scaled(g.lprime_weight):
            raise CrossCheckError(
                "Recorded L'(0) weight disagrees with the mode computation.",
                counterexample=g.state.to_json(),
            )

    def in_v1(v: FockVector) -> Vector:
        return _coordinates(v, v1_index, n1, "V1")

    def in_v0(v: FockVector) -> Vector:
        return _coordinates(v, v0_index, n0, "V0")

    brackets = {}
    pair1 = []
    act0 = []
    for i, u in enumerate(v1_basis):
        row = []
        for j, w in enumerate(v1_basis):
            value = in_v1(engine.iterate_mode(u, 0, w))
            if any(value):
                brackets[(i, j)] = value
            row.append(in_v0(engine.iterate_mode(u, 1, w)))
        pair1.append(row)
        act0.append(
            Matrix.from_columns([in_v0(engine.iterate_mode(u, 0, a)) for a in v0_basis], n0)
        )
    v1_algebra = LeibnizAlgebra(n1, brackets)

    lminus1 = Matrix.from_columns(
        [in_v1(virasoro_mode(engine, virasoro, -1, a, cross_check=True)) for a in v0_basis], n1
    )
    t_point = shift.two_h
    t_vec = FockVector.basis(FockState((), t_point))
    tminus1 = Matrix.from_columns(
        [in_v1(engine.exp_mode(t_point, -1, u)) for u in v1_basis], n1
    )
    t_minus2 = Matrix.from_columns(
        [in_v1(engine.exp_mode(t_point, -2, a)) for a in v0_basis], n1
    )
    u_minus1_t = Matrix.from_columns(
        [in_v1(engine.iterate_mode(u, -1, t_vec)) for u in v1_basis], n1
    )
    datum = TruncatedConformalDatum(
        v0.algebra,
        unit_vector(n0, v0.index(t_point)),
        v1_algebra,
        act0,
        pair1,
        lminus1,
        tminus1,
        t_minus2=t_minus2,
        u_minus1_t=u_minus1_t,
    )
    h_coords = in_v1(heisenberg_state(shift.h, lattice.rank))
    logger.info(
        "built lattice bundle: dim V0 = %d, dim V1 = %d, %d cached modes",
        n0,
        n1,
        engine.cache_size,
    )
    return LatticeShiftBundle(shift, engine, virasoro, v0, v1_states, datum, h_coords)


def _checks_json(checks: Sequence[CheckResult]) -> list[dict[str, Any]]:
    return [c.to_json() for c in checks]


def full_report(bundle: LatticeShiftBundle, series_depth: int = 4) -> dict[str, Any]:
    """Run every analyzer on a lattice bundle and collect one JSON document."""
    shift, datum = bundle.shift, bundle.datum
    engine = bundle.engine
    checks: list[CheckResult] = list(verify_axioms(datum))

    de_rham = de_rham_check(bundle.v0.algebra, bundle.v0.grading)
    checks.append(CheckResult.of("de_rham", de_rham.passed))
    nu_expected = 2 * shift.h_norm
    checks.append(
        CheckResult.of("nu_equals_twice_h_norm", de_rham.nu == nu_expected, f"nu = {de_rham.nu}")
    )
    top = Subspace.span([unit_vector(datum.v0.dim, bundle.v0.index(shift.two_h))], datum.v0.dim)
    checks.append(CheckResult.of("top_space_is_e_2h", de_rham.top_space == top))
    checks.append(CheckResult.of("h1h_equals_half_nu", check_h1h(engine, shift, int(nu_expected))))

    trichotomy: Optional[dict[str, Any]] = None
    if datum.is_cft_type:
        checks.append(CheckResult.skipped("trichotomy", "dim V0 = 1"))
    else:
        try:
            report = classify_trichotomy(datum)
        except CheckFailure as exc:
            checks.append(CheckResult.of("trichotomy", False, str(exc), exc.counterexample))
        else:
            trichotomy = report.to_json()
            checks.append(CheckResult.of("trichotomy", True, f"case {report.case}"))

    structure = shifted_structure_check(datum, bundle.bigrading, reductive=True)
    checks.extend(structure.checks)
    checks.append(levi_form_check(datum))
    checks.append(levi_trivial_action_check(datum))
    checks.extend(shifted_h_checks(datum, bundle.h_coords))

    c_prime = central_charge(engine, bundle.virasoro, "prime")
    c_shifted = central_charge(engine, bundle.virasoro, "shifted")
    checks.append(CheckResult.of("central_charge_is_rank", c_prime == shift.lattice.rank))

    series = graded_dimension_series(shift, series_depth)
    counts = [len(weight_space(shift, n)) for n in range(series_depth + 1)]
    checks.append(CheckResult.of("character_matches_weight_spaces", series == counts))

    tower = radical_tower(datum.v1, translation_ideal(datum))
    document = {
        "schema": SCHEMA,
        "kind": "lattice-shift",
        "shift": shift.to_json(),
        "A": [list(a) for a in bundle.v0.points],
        "dims": {"V0": datum.v0.dim, "V1": datum.v1.dim},
        "v1_states": [
            dict(g.state.to_json(), bigrading=list(g.bigrading)) for g in bundle.v1_states
        ],
        "graded_dimensions": series,
        "central_charge": {"prime": format_scalar(c_prime), "shifted": format_scalar(c_shifted)},
        "form": form(datum).to_json(),
        "de_rham": de_rham.to_json(),
        "trichotomy": trichotomy,
        "shifted_structure": structure.to_json(),
        "radical_tower": tower.to_json(),
        "checks": _checks_json(checks),
        "passed": not any(c.failed for c in checks),
    }
    logger.info("report for h=%s: passed=%s", document["shift"]["h"], document["passed"])
    return document


def _test_states(shift: ShiftDatum, weight_cap: int, per_weight: int) -> list[FockVector]:
    states = []
    for n in range(weight_cap + 1):
        states.extend(FockVector.basis(g.state) for g in weight_space(shift, n)[:per_weight])
    return states


def fock_property_suite(
    bundle: LatticeShiftBundle,
    weight_cap: int = 2,
    mode_range: int = 2,
    per_weight: int = 2,
    lh0_cap: int = 4,
) -> list[CheckResult]:
    """Mode identities on the low-weight states of a bundle.

    The commutator identity runs over every pair of basis states of weight at
    most ``weight_cap`` and every mode pair with |m|, |n| <= ``mode_range``.
    The target vectors are the first ``per_weight`` states of weights 0 and 1.
    L_h(0) is checked on every state of weight at most ``lh0_cap``.
    """
    engine, vd, shift = bundle.engine, bundle.virasoro, bundle.shift
    states = [
        FockVector.basis(g.state) for n in range(weight_cap + 1) for g in weight_space(shift, n)
    ]
    targets = _test_states(shift, min(weight_cap, 1), per_weight)
    modes = range(-mode_range, mode_range + 1)
    results: list[CheckResult] = []

    bad = next(
        (
            [a.to_json(), m, b.to_json(), n, w.to_json()]
            for a, b in product(states, repeat=2)
            for m, n in product(modes, repeat=2)
            for w in targets
            if not commutator_identity_holds(engine, a, b, m, n, w)
        ),
        None,
    )
    results.append(
        CheckResult.of("commutator_identity", bad is None, f"{len(states)} states", bad)
    )

    ones = [bundle.v1_vector(i) for i in range(len(bundle.v1_states))]
    bad = next(
        (
            [u.to_json(), v.to_json()]
            for u, v in product(ones, repeat=2)
            if not skew_symmetry_holds(engine, vd, u, v)
        ),
        None,
    )
    results.append(CheckResult.of("skew_symmetry", bad is None, witness=bad))

    bad = next(
        (
            [a.to_json(), n, w.to_json()]
            for a in states
            for n in modes
            for w in targets
            if not translation_covariance_holds(engine, vd, a, n, w)
        ),
        None,
    )
    results.append(CheckResult.of("translation_covariance", bad is None, witness=bad))

    for which in ("prime", "shifted"):
        charge = central_charge(engine, vd, which)
        bad = next(
            (
                [m, n, w.to_json()]
                for m, n in product(modes, repeat=2)
                for w in targets
                if not virasoro_relation_holds(engine, vd, m, n, w, which, charge)
            ),
            None,
        )
        results.append(
            CheckResult.of(f"virasoro_{which}", bad is None, f"c = {format_scalar(charge)}", bad)
        )

    graded = [g for n in range(lh0_cap + 1) for g in weight_space(shift, n)]
    bad = next(
        (g.state.to_json() for g in graded if not lh0_eigenvalue_holds(engine, vd, g)), None
    )
    results.append(CheckResult.of("lh0_eigenvalues", bad is None, f"{len(graded)} states", bad))

    try:
        for w in targets:
            for n in modes:
                virasoro_mode(engine, vd, n, w, cross_check=True)
    except ModeConsistencyError as exc:
        results.append(
            CheckResult.of("shifted_virasoro_two_routes", False, str(exc), exc.counterexample)
        )
    else:
        results.append(CheckResult.of("shifted_virasoro_two_routes", True))
    logger.debug("fock property suite: %d cached modes", engine.cache_size)
    return results


def affine_closure_suite(weight_cap: int = 2, mode_range: int = 2) -> list[CheckResult]:
    """Weight-one closure of unshifted V_{A1} on all states up to ``weight_cap``."""
    shift = default_shift("a1_unshifted")
    engine = ModeEngine(shift.lattice)
    triple = [FockVector.basis(g.state) for g in weight_space(shift, 1)]
    targets = [
        FockVector.basis(g.state) for n in range(weight_cap + 1) for g in weight_space(shift, n)
    ]
    modes = range(-mode_range, mode_range + 1)
    bad = next(
        (
            [u.to_json(), m, v.to_json(), n, w.to_json()]
            for u, v in product(triple, repeat=2)
            for m, n in product(modes, repeat=2)
            for w in targets
            if not affine_closure_holds(engine, u, v, m, n, w)
        ),
        None,
    )
    return [
        CheckResult.of("weight_one_dimension", len(triple) == 3, f"dim V1 = {len(triple)}"),
        CheckResult.of("affine_closure", bad is None, f"{len(targets)} target states", bad),
    ]


def basis_change_suite(algebra: LeibnizAlgebra, seed: int, trials: int = 5) -> CheckResult:
    """Solvable radicals commute with random changes of basis.

    Each trial uses a unit upper-triangular integer matrix with random
    entries, so the change of basis is always invertible.
    """
    rng = random.Random(seed)
    n = algebra.dim
    original = solvable_radical(algebra)
    for trial in range(trials):
        basis = Matrix.from_rows(
            [
                [1 if i == j else (rng.randint(-3, 3) if j > i else 0) for j in range(n)]
                for i in range(n)
            ]
        )
        moved = solvable_radical(change_basis(algebra, basis))
        mapped = Subspace.span([basis.apply(v) for v in moved.vectors], n)
        if mapped != original:
            return CheckResult.of("radical_basis_equivariance", False, f"seed {seed}", trial)
    return CheckResult.of("radical_basis_equivariance", True, f"{trials} trials, seed {seed}")


def gl2_algebra() -> LeibnizAlgebra:
    """gl2 on the basis e, f, h, z with [h, e] = 2e, [h, f] = -2f, [e, f] = h, z central."""
    brackets = {
        (0, 1): (0, 0, 1, 0),
        (1, 0): (0, 0, -1, 0),
        (2, 0): (2, 0, 0, 0),
        (0, 2): (-2, 0, 0, 0),
        (2, 1): (0, -2, 0, 0),
        (1, 2): (0, 2, 0, 0),
    }
    return LeibnizAlgebra(4, brackets)
