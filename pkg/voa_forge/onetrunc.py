"""Analysis of the weight-0 and weight-1 pieces of a self-dual vertex algebra.

A :class:`TruncatedConformalDatum` packages V0 (a local Frobenius algebra
with socle t), V1 (a Leibniz algebra under u(0)v) and the maps that connect
them: u(0) on V0, u(1)v in V0, L(-1) from V0 to V1 and t(-1) on V1. From
this the module builds the form <u, v> = (u(1)v, t), its radical, the
ideals M and P, and decides which branch of the radical trichotomy holds.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Optional, Sequence

from voa_forge.errors import (
    AxiomViolation,
    CheckFailure,
    DimensionMismatchError,
    TrichotomyError,
)
from voa_forge.exactla import (
    Matrix,
    Subspace,
    Vector,
    add_vectors,
    dot,
    format_scalar,
    image,
    intersect,
    kernel,
    linear_combination,
    orthogonal_complement,
    preimage,
    scale_vector,
    sum_spaces,
    unit_vector,
    vector,
)
from voa_forge.frobalg import FrobeniusAlgebra, jacobson_radical, minimal_ideal
from voa_forge.leibniz import (
    LeibnizAlgebra,
    is_ideal,
    invariant_form_radical,
    leibniz_kernel,
    levi_subalgebra,
    nilpotent_radical,
)

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
SKIP = "skip"


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named identity check."""

    name: str
    status: str
    detail: str = ""
    counterexample: Optional[Any] = None

    @classmethod
    def of(
        cls, name: str, ok: bool, detail: str = "", witness: Optional[Any] = None
    ) -> "CheckResult":
        """A pass, or a failure carrying ``witness``."""
        if ok:
            return cls(name, PASS, detail)
        return cls(name, FAIL, detail, witness)

    @classmethod
    def skipped(cls, name: str, reason: str) -> "CheckResult":
        return cls(name, SKIP, reason)

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"name": self.name, "status": self.status}
        if self.detail:
            out["detail"] = self.detail
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def _vec_json(v: Sequence[Fraction]) -> list[str]:
    return [format_scalar(x) for x in v]


class TruncatedConformalDatum:
    """V0, V1 and the four connecting maps.

    Attributes:
        v0: Local commutative Frobenius algebra.
        t: Socle generator of V0, rescaled so that lambda(t) = (1, t) = 1.
        v1: V1 with the bracket [u, v] = u(0)v.
        act0: act0[i] is the matrix of e_i(0) on V0.
        pair1: pair1[i][j] is e_i(1)e_j in V0.
        lminus1: Matrix of L(-1): V0 -> V1.
        tminus1: Matrix of t(-1): V1 -> V1.
        t_minus2: Optional matrix of t(-2): V0 -> V1.
        u_minus1_t: Optional matrix whose column i is e_i(-1)t in V1.
    """

    def __init__(
        self,
        v0: FrobeniusAlgebra,
        t: Sequence[Any],
        v1: LeibnizAlgebra,
        act0: Sequence[Matrix],
        pair1: Sequence[Sequence[Sequence[Any]]],
        lminus1: Matrix,
        tminus1: Matrix,
        t_minus2: Optional[Matrix] = None,
        u_minus1_t: Optional[Matrix] = None,
    ) -> None:
        """Validate shapes and normalize t.

        Raises:
            DimensionMismatchError: If any map has the wrong shape.
            AxiomViolation: If t does not span the minimal ideal of V0 or
                lambda(t) = 0.
        """
        n0, n1 = v0.dim, v1.dim
        if len(act0) != n1 or any(m.rows != n0 or m.cols != n0 for m in act0):
            raise DimensionMismatchError(f"act0 must hold {n1} matrices of size {n0}x{n0}.")
        if len(pair1) != n1 or any(len(row) != n1 for row in pair1):
            raise DimensionMismatchError(f"pair1 must be an {n1}x{n1} table of V0 vectors.")
        table = tuple(tuple(vector(entry) for entry in row) for row in pair1)
        if any(len(entry) != n0 for row in table for entry in row):
            raise DimensionMismatchError(f"pair1 entries must have length {n0}.")
        if (lminus1.rows, lminus1.cols) != (n1, n0):
            raise DimensionMismatchError(f"lminus1 must be {n1}x{n0}.")
        if (tminus1.rows, tminus1.cols) != (n1, n1):
            raise DimensionMismatchError(f"tminus1 must be {n1}x{n1}.")
        if t_minus2 is not None and (t_minus2.rows, t_minus2.cols) != (n1, n0):
            raise DimensionMismatchError(f"t_minus2 must be {n1}x{n0}.")
        if u_minus1_t is not None and (u_minus1_t.rows, u_minus1_t.cols) != (n1, n1):
            raise DimensionMismatchError(f"u_minus1_t must be {n1}x{n1}.")

        socle = minimal_ideal(v0)
        tv = vector(t)
        if not any(tv) or not socle.contains(tv):
            raise AxiomViolation(
                "t does not span the minimal ideal of V0.", counterexample=_vec_json(tv)
            )
        scale = v0.form(v0.unit, tv)
        if scale == 0:
            raise AxiomViolation("(1, t) = 0; t cannot be normalized.")

        self.v0: FrobeniusAlgebra = v0
        self.t: Vector = scale_vector(1 / scale, tv)
        self.v1: LeibnizAlgebra = v1
        self.act0: tuple[Matrix, ...] = tuple(act0)
        self.pair1: tuple[tuple[Vector, ...], ...] = table
        self.lminus1: Matrix = lminus1
        self.tminus1: Matrix = tminus1
        self.t_minus2: Optional[Matrix] = t_minus2
        self.u_minus1_t: Optional[Matrix] = u_minus1_t

    def __repr__(self) -> str:
        return f"TruncatedConformalDatum(dim V0={self.v0.dim}, dim V1={self.v1.dim})"

    @property
    def is_cft_type(self) -> bool:
        return self.v0.dim == 1

    def zero_mode(self, u: Sequence[Fraction]) -> Matrix:
        """Matrix of u(0) on V0."""
        n0 = self.v0.dim
        out = Matrix.zeros(n0, n0)
        for c, m in zip(u, self.act0):
            if c:
                out = out + m.scaled(Fraction(c))
        return out

    def pairing(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
        """u(1)v in V0."""
        n1 = self.v1.dim
        terms = [
            scale_vector(Fraction(u[i]) * Fraction(v[j]), self.pair1[i][j])
            for i, j in product(range(n1), repeat=2)
            if u[i] and v[j]
        ]
        return linear_combination([Fraction(1)] * len(terms), terms, self.v0.dim)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "v0": self.v0.to_json(),
            "t": _vec_json(self.t),
            "v1": self.v1.to_json(),
            "act0": [m.to_json() for m in self.act0],
            "pair1": [[_vec_json(entry) for entry in row] for row in self.pair1],
            "lminus1": self.lminus1.to_json(),
            "tminus1": self.tminus1.to_json(),
        }
        if self.t_minus2 is not None:
            out["t_minus2"] = self.t_minus2.to_json()
        if self.u_minus1_t is not None:
            out["u_minus1_t"] = self.u_minus1_t.to_json()
        return out


def form(d: TruncatedConformalDatum) -> Matrix:
    """Gram matrix of <e_i, e_j> = (e_i(1)e_j, t)."""
    n1 = d.v1.dim
    return Matrix.from_rows(
        [[d.v0.form(d.pair1[i][j], d.t) for j in range(n1)] for i in range(n1)], cols=n1
    )


def radical(d: TruncatedConformalDatum) -> Subspace:
    return invariant_form_radical(d.v1, form(d))


def ann_t(d: TruncatedConformalDatum) -> Subspace:
    """Ann_{V1}(t(-1)), the kernel of t(-1) on V1."""
    return kernel(d.tminus1)


def ideal_M(d: TruncatedConformalDatum) -> Subspace:
    """{u : u(0)t = 0}."""
    n1 = d.v1.dim
    columns = [d.act0[i].apply(d.t) for i in range(n1)]
    return kernel(Matrix.from_columns(columns, d.v0.dim))


def _p_from_form(d: TruncatedConformalDatum) -> Subspace:
    return orthogonal_complement(ideal_M(d), form(d))


def _p_from_tminus1(d: TruncatedConformalDatum) -> Subspace:
    target = Subspace.span([d.lminus1.apply(d.t)], d.v1.dim)
    return preimage(d.tminus1, target)


def _difference_witness(a: Subspace, b: Subspace) -> Optional[Vector]:
    for v in a.vectors:
        if not b.contains(v):
            return v
    for v in b.vectors:
        if not a.contains(v):
            return v
    return None


def ideal_P(d: TruncatedConformalDatum) -> Subspace:
    """P = M-perp, confirmed against {u : t(-1)u in span L(-1)t}.

    Raises:
        AxiomViolation: If the two descriptions differ; the counterexample
            is a vector lying in exactly one of them.
    """
    from_form = _p_from_form(d)
    from_t = _p_from_tminus1(d)
    if from_form != from_t:
        witness = _difference_witness(from_form, from_t)
        raise AxiomViolation(
            "The two descriptions of P disagree.",
            counterexample=_vec_json(witness) if witness is not None else None,
        )
    return from_form


@dataclass(frozen=True)
class TrichotomyReport:
    rad: Subspace
    ann_t: Subspace
    P: Subspace
    M: Subspace
    case: str

    def to_json(self) -> dict[str, Any]:
        return {
            "case": self.case,
            "rad": self.rad.to_json(),
            "ann_t": self.ann_t.to_json(),
            "P": self.P.to_json(),
            "M": self.M.to_json(),
            "dims": {
                "rad": self.rad.dim,
                "ann_t": self.ann_t.dim,
                "P": self.P.dim,
                "M": self.M.dim,
            },
        }


def _codim_one_inside(small: Subspace, big: Subspace) -> bool:
    return small.is_subspace_of(big) and big.dim - small.dim == 1


def match_trichotomy(rad: Subspace, ann: Subspace, p: Subspace) -> str:
    """Return "i", "ii" or "iii" for the configuration of rad, Ann(t(-1)) and P.

        i    Ann = rad, strictly inside P
        ii   Ann strictly inside rad = P
        iii  rad strictly inside Ann = P

    Each strict containment must have codimension one.

    Raises:
        TrichotomyError: If all three coincide or no case matches.
    """
    if ann == rad == p:
        raise TrichotomyError(
            "rad, Ann(t(-1)) and P coincide, which the axioms exclude.",
            counterexample={"dim": rad.dim},
        )
    if ann == rad and _codim_one_inside(rad, p):
        return "i"
    if rad == p and _codim_one_inside(ann, rad):
        return "ii"
    if ann == p and _codim_one_inside(rad, ann):
        return "iii"
    raise TrichotomyError(
        "No trichotomy case matches.",
        counterexample={"rad": rad.dim, "ann_t": ann.dim, "P": p.dim},
    )


def classify_trichotomy(d: TruncatedConformalDatum) -> TrichotomyReport:
    """Compute rad, Ann(t(-1)), P and M and match them to a case.

    Raises:
        TrichotomyError: If dim V0 < 2 or no case matches.
        AxiomViolation: If the two descriptions of P disagree.
    """
    if d.is_cft_type:
        raise TrichotomyError("The trichotomy needs dim V0 >= 2.")
    rad_space, ann_space, p_space = radical(d), ann_t(d), ideal_P(d)
    case = match_trichotomy(rad_space, ann_space, p_space)
    logger.debug(
        "trichotomy case %s (dims rad=%d ann=%d P=%d)",
        case,
        rad_space.dim,
        ann_space.dim,
        p_space.dim,
    )
    return TrichotomyReport(rad_space, ann_space, p_space, ideal_M(d), case)


def _derivation_check(d: TruncatedConformalDatum) -> CheckResult:
    n0, n1 = d.v0.dim, d.v1.dim
    for i, a, b in product(range(n1), range(n0), range(n0)):
        op = d.act0[i]
        ea, eb = unit_vector(n0, a), unit_vector(n0, b)
        lhs = op.apply(d.v0.basis_product(a, b))
        rhs = add_vectors(d.v0.mul(op.apply(ea), eb), d.v0.mul(ea, op.apply(eb)))
        if lhs != rhs:
            return CheckResult.of("u0_derivation_of_V0", False, witness=[i, a, b])
    return CheckResult.of("u0_derivation_of_V0", True)


def _pair_symmetry_check(d: TruncatedConformalDatum) -> CheckResult:
    n1 = d.v1.dim
    for i, j in product(range(n1), repeat=2):
        if d.pair1[i][j] != d.pair1[j][i]:
            return CheckResult.of("pair1_symmetric", False, witness=[i, j])
    return CheckResult.of("pair1_symmetric", True)


def _skew_relation_check(d: TruncatedConformalDatum) -> CheckResult:
    n1 = d.v1.dim
    for i, j in product(range(n1), repeat=2):
        lhs = add_vectors(d.v1.basis_bracket(i, j), d.v1.basis_bracket(j, i))
        if lhs != d.lminus1.apply(d.pair1[i][j]):
            return CheckResult.of("skew_relation", False, "u(0)v + v(0)u != L(-1)u(1)v", [i, j])
    return CheckResult.of("skew_relation", True)


def _lminus1_kernel_check(d: TruncatedConformalDatum) -> CheckResult:
    found = kernel(d.lminus1)
    expected = Subspace.span([d.v0.unit], d.v0.dim)
    return CheckResult.of(
        "lminus1_kernel_is_scalars",
        found == expected,
        f"dim ker L(-1) = {found.dim}",
        found.to_json() if found != expected else None,
    )


def _translation_zero_mode_check(d: TruncatedConformalDatum) -> CheckResult:
    n0, n1 = d.v0.dim, d.v1.dim
    for a in range(n0):
        image_vec = d.lminus1.column(a)
        if not d.zero_mode(image_vec).is_zero():
            return CheckResult.of("translation_zero_mode_vanishes", False, "on V0", [a])
        for j in range(n1):
            if any(d.v1.bracket(image_vec, unit_vector(n1, j))):
                return CheckResult.of("translation_zero_mode_vanishes", False, "on V1", [a, j])
    return CheckResult.of("translation_zero_mode_vanishes", True)


def _form_invariance_checks(d: TruncatedConformalDatum, gram: Matrix) -> list[CheckResult]:
    n1 = d.v1.dim
    basis = [unit_vector(n1, i) for i in range(n1)]

    def pair(x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
        return dot(x, gram.apply(y))

    swapped: Optional[list[int]] = None
    skew: Optional[list[int]] = None
    for a, b, c in product(range(n1), repeat=3):
        u, v, w = basis[a], basis[b], basis[c]
        if swapped is None and pair(d.v1.bracket(v, u), w) != pair(v, d.v1.bracket(u, w)):
            swapped = [a, b, c]
        if skew is None and pair(d.v1.bracket(u, v), w) != -pair(v, d.v1.bracket(u, w)):
            skew = [a, b, c]
    return [
        CheckResult.of("form_invariant", swapped is None, "<v(0)u, w> = <v, u(0)w>", swapped),
        CheckResult.of("form_ad_skew", skew is None, "<u(0)v, w> = -<v, u(0)w>", skew),
    ]


def verify_axioms(d: TruncatedConformalDatum) -> list[CheckResult]:
    """Run every datum invariant and weight-one identity as a named check."""
    gram = form(d)
    rad_space = kernel(gram)
    ann_space = ann_t(d)
    m_space = ideal_M(d)
    n_space = image(d.lminus1)
    n0, n1 = d.v0.dim, d.v1.dim

    results = [
        _derivation_check(d),
        _pair_symmetry_check(d),
        _skew_relation_check(d),
        _lminus1_kernel_check(d),
        _translation_zero_mode_check(d),
    ]
    violation = d.v1.leibniz_violation()
    results.append(CheckResult.of("leibniz_identity", violation is None, witness=violation))

    outside = _difference_witness(sum_spaces(n_space, rad_space), rad_space)
    results.append(
        CheckResult.of(
            "translations_in_radical",
            outside is None,
            "L(-1)V0 inside rad<,>",
            _vec_json(outside) if outside is not None else None,
        )
    )
    results.append(CheckResult.of("form_symmetric", gram.is_symmetric()))
    results.extend(_form_invariance_checks(d, gram))

    if d.is_cft_type:
        bad = next(
            (
                [i, j]
                for i, j in product(range(n1), repeat=2)
                if d.pair1[i][j] != scale_vector(gram.entries[i][j], d.v0.unit)
            ),
            None,
        )
        results.append(CheckResult.of("classical_pairing", bad is None, "<u, v>1 = u(1)v", bad))
        for name in (
            "M_codimension_one",
            "P_descriptions_agree",
            "ann_inside_P",
            "M_ann_equals_M_rad",
        ):
            results.append(CheckResult.skipped(name, "dim V0 = 1"))
    else:
        results.append(
            CheckResult.of(
                "M_codimension_one",
                n1 - m_space.dim == 1 and is_ideal(d.v1, m_space),
                f"dim M = {m_space.dim}, dim V1 = {n1}",
            )
        )
        from_form, from_t = _p_from_form(d), _p_from_tminus1(d)
        witness = _difference_witness(from_form, from_t)
        results.append(
            CheckResult.of(
                "P_descriptions_agree",
                witness is None,
                "M-perp = {u : t(-1)u in span L(-1)t}",
                _vec_json(witness) if witness is not None else None,
            )
        )
        results.append(CheckResult.of("ann_inside_P", ann_space.is_subspace_of(from_t)))
        results.append(
            CheckResult.of(
                "M_ann_equals_M_rad",
                intersect(m_space, ann_space) == intersect(m_space, rad_space),
            )
        )

    if d.t_minus2 is None:
        results.append(CheckResult.skipped("t_minus2_kills_J", "no t(-2) data"))
    else:
        j_space = jacobson_radical(d.v0)
        bad_j = next((v for v in j_space.vectors if any(d.t_minus2.apply(v))), None)
        results.append(
            CheckResult.of(
                "t_minus2_kills_J",
                bad_j is None,
                witness=_vec_json(bad_j) if bad_j is not None else None,
            )
        )

    if d.u_minus1_t is None:
        results.append(CheckResult.skipped("radical_from_u_minus1_t", "no u(-1)t data"))
    else:
        found = kernel(d.u_minus1_t)
        results.append(
            CheckResult.of(
                "radical_from_u_minus1_t",
                found == rad_space,
                "rad<,> = {u : u(-1)t = 0}",
                found.to_json() if found != rad_space else None,
            )
        )
    logger.debug(
        "verify_axioms: %d checks on dims (%d, %d), %d failed",
        len(results),
        n0,
        n1,
        sum(r.failed for r in results),
    )
    return results


def translation_ideal(d: TruncatedConformalDatum) -> Subspace:
    """L(-1)V0 together with the Leibniz kernel of V1."""
    return sum_spaces(image(d.lminus1), leibniz_kernel(d.v1))


@dataclass(frozen=True)
class ShiftedStructureReport:
    """Comparison of the high-weight part of V1 with its radicals."""

    high_part: Subspace
    ann_t: Subspace
    radical: Subspace
    nilpotent: Optional[Subspace]
    checks: tuple[CheckResult, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return not any(c.failed for c in self.checks)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "high_part": self.high_part.to_json(),
            "ann_t": self.ann_t.to_json(),
            "radical": self.radical.to_json(),
            "checks": [c.to_json() for c in self.checks],
            "passed": self.passed,
        }
        if self.nilpotent is not None:
            out["nilpotent_radical"] = self.nilpotent.to_json()
        return out


def shifted_structure_check(
    d: TruncatedConformalDatum,
    bigrading: Sequence[tuple[int, int]],
    reductive: bool = False,
) -> ShiftedStructureReport:
    """Compare the span of the W_{m, m-1}, m >= 2, with Ann(t(-1)) and rad<,>.

    Args:
        d: The datum.
        bigrading: (L'(0) weight, h(0) charge) for each basis vector of V1.
        reductive: Whether W1 is reductive; enables the comparison with the
            nilpotent radical of V1 taken modulo L(-1)V0.

    Raises:
        DimensionMismatchError: If the bigrading has the wrong length.
    """
    n1 = d.v1.dim
    if len(bigrading) != n1:
        raise DimensionMismatchError(f"bigrading has {len(bigrading)} labels for dim V1 = {n1}.")
    high = Subspace.span(
        [unit_vector(n1, i) for i, (weight, _) in enumerate(bigrading) if weight >= 2], n1
    )
    ann_space, rad_space = ann_t(d), radical(d)
    checks = [
        CheckResult.of("high_part_in_ann_t", high.is_subspace_of(ann_space)),
        CheckResult.of("ann_t_equals_radical", ann_space == rad_space),
    ]
    nilpotent: Optional[Subspace] = None
    if reductive:
        try:
            nilpotent = nilpotent_radical(d.v1, translation_ideal(d))
        except CheckFailure as exc:
            checks.append(CheckResult.of("nilpotent_radical_equals_high_part", False, str(exc)))
        else:
            checks.append(
                CheckResult.of(
                    "nilpotent_radical_equals_high_part",
                    nilpotent == high == ann_space == rad_space,
                    f"dim N1 = {nilpotent.dim}, dim high part = {high.dim}",
                )
            )
    else:
        checks.append(
            CheckResult.skipped("nilpotent_radical_equals_high_part", "W1 not declared reductive")
        )
    return ShiftedStructureReport(high, ann_space, rad_space, nilpotent, tuple(checks))


def levi_form_check(d: TruncatedConformalDatum) -> CheckResult:
    """<,> restricted to a Levi subalgebra of V1 is nondegenerate."""
    s_space = levi_subalgebra(d.v1)
    if s_space.dim == 0:
        return CheckResult.skipped("levi_form_nondegenerate", "Levi subalgebra is zero")
    gram = form(d)
    block = Matrix.from_rows(
        [
            [dot(a, gram.apply(b)) for b in s_space.vectors]
            for a in s_space.vectors
        ],
        cols=s_space.dim,
    )
    deficiency = kernel(block).dim
    return CheckResult.of(
        "levi_form_nondegenerate",
        deficiency == 0,
        f"dim S = {s_space.dim}, nullity {deficiency}",
    )


def levi_trivial_action_check(d: TruncatedConformalDatum) -> CheckResult:
    """A Levi subalgebra kills V0 under u(0) and pairs into Q 1 under u(1)."""
    s_space = levi_subalgebra(d.v1)
    if s_space.dim == 0:
        return CheckResult.skipped("levi_acts_trivially", "Levi subalgebra is zero")
    scalars = Subspace.span([d.v0.unit], d.v0.dim)
    for k, s in enumerate(s_space.vectors):
        if not d.zero_mode(s).is_zero():
            return CheckResult.of("levi_acts_trivially", False, "u(0) nonzero on V0", [k])
        for m, s2 in enumerate(s_space.vectors):
            if not scalars.contains(d.pairing(s, s2)):
                return CheckResult.of("levi_acts_trivially", False, "u(1)v outside Q1", [k, m])
    return CheckResult.of("levi_acts_trivially", True, f"dim S = {s_space.dim}")


def shifted_h_checks(d: TruncatedConformalDatum, h_coords: Sequence[Any]) -> list[CheckResult]:
    """h lies in P but in neither Ann(t(-1)) nor rad<,>."""
    h = vector(h_coords)
    if len(h) != d.v1.dim:
        raise DimensionMismatchError(f"h has {len(h)} coordinates, dim V1 = {d.v1.dim}.")
    if d.is_cft_type:
        return [
            CheckResult.skipped("h_in_P", "dim V0 = 1"),
            CheckResult.skipped("h_outside_ann_and_rad", "dim V0 = 1"),
        ]
    return [
        CheckResult.of("h_in_P", _p_from_tminus1(d).contains(h)),
        CheckResult.of(
            "h_outside_ann_and_rad",
            not ann_t(d).contains(h) and not radical(d).contains(h),
        ),
    ]
