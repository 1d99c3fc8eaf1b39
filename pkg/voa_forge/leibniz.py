"""Finite-dimensional left Leibniz algebras given by structure constants.

A left Leibniz algebra has a bilinear bracket whose left multiplications
are derivations::

    [a, [b, c]] = [[a, b], c] + [b, [a, c]]

This module computes the Leibniz kernel, its annihilator, the Lie quotient,
the solvable, nilpotent and nil radicals (through the Cartan criterion on
the Lie quotient) and a Levi subalgebra by Levi-Malcev lifting.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Mapping, Optional, Sequence

from voa_forge.errors import (
    CheckFailure,
    DimensionMismatchError,
    InputError,
    LeibnizIdentityError,
    LeviLiftingError,
    NotASubspaceError,
)
from voa_forge.exactla import (
    Matrix,
    QuotientMap,
    Subspace,
    Vector,
    add_vectors,
    annihilator,
    determinant,
    dot,
    format_scalar,
    intersect,
    kernel,
    linear_combination,
    orthogonal_complement,
    scale_vector,
    solve,
    sum_spaces,
    unit_vector,
    vector,
    zero_vector,
)

logger = logging.getLogger(__name__)

Triple = tuple[int, int, int]


class LeibnizAlgebra:
    """A bracket table c_ij^k with [e_i, e_j] = sum_k c_ij^k e_k."""

    def __init__(
        self,
        dim: int,
        brackets: Optional[Mapping[tuple[int, int], Sequence[Any]]] = None,
        validate: bool = True,
    ) -> None:
        """Initialize the algebra.

        Args:
            dim: Dimension of the underlying space.
            brackets: Map from basis index pairs (i, j) to the coordinates of
                [e_i, e_j]. Missing pairs bracket to zero.
            validate: Check the left Leibniz identity on all basis triples.

        Raises:
            InputError: If an index or a coefficient vector is malformed.
            LeibnizIdentityError: If ``validate`` is set and the identity
                fails; the violating triple is the counterexample.
        """
        if dim < 0:
            raise InputError(f"Algebra dimension must be nonnegative, got {dim}.")
        table = [[zero_vector(dim) for _ in range(dim)] for _ in range(dim)]
        for (i, j), coeffs in (brackets or {}).items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise InputError(f"Bracket index pair ({i}, {j}) out of range for dim {dim}.")
            entry = vector(coeffs)
            if len(entry) != dim:
                raise InputError(
                    f"Bracket [e_{i}, e_{j}] has {len(entry)} coordinates, expected {dim}."
                )
            table[i][j] = entry
        self.dim: int = dim
        self._table: tuple[tuple[Vector, ...], ...] = tuple(tuple(r) for r in table)
        if validate:
            violation = self.leibniz_violation()
            if violation is not None:
                raise LeibnizIdentityError(
                    f"Left Leibniz identity fails on basis triple {violation}.",
                    counterexample=violation,
                )

    def __repr__(self) -> str:
        count = len(self.structure_constants())
        return f"LeibnizAlgebra(dim={self.dim}, nonzero_brackets={count})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LeibnizAlgebra):
            return NotImplemented
        return self.dim == other.dim and self._table == other._table

    def basis_bracket(self, i: int, j: int) -> Vector:
        return self._table[i][j]

    def bracket(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
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

    def left_mult_matrix(self, a: Sequence[Fraction]) -> Matrix:
        """Matrix of ad_a = [a, -]; column j holds [a, e_j]."""
        columns = [self.bracket(a, unit_vector(self.dim, j)) for j in range(self.dim)]
        return Matrix.from_columns(columns, self.dim)

    def right_mult_matrix(self, b: Sequence[Fraction]) -> Matrix:
        """Matrix of [-, b]; column i holds [e_i, b]."""
        columns = [self.bracket(unit_vector(self.dim, i), b) for i in range(self.dim)]
        return Matrix.from_columns(columns, self.dim)

    def leibniz_violation(self) -> Optional[Triple]:
        """Return the first basis triple violating the identity, if any."""
        n = self.dim
        basis = [unit_vector(n, i) for i in range(n)]
        for i, j, k in product(range(n), repeat=3):
            lhs = self.bracket(basis[i], self._table[j][k])
            rhs = add_vectors(
                self.bracket(self._table[i][j], basis[k]),
                self.bracket(basis[j], self._table[i][k]),
            )
            if lhs != rhs:
                return (i, j, k)
        return None

    def is_antisymmetric(self) -> bool:
        n = self.dim
        return all(
            self._table[i][j] == scale_vector(Fraction(-1), self._table[j][i])
            for i in range(n)
            for j in range(i, n)
        )

    def structure_constants(self) -> dict[tuple[int, int], Vector]:
        """Nonzero entries of the bracket table."""
        return {
            (i, j): self._table[i][j]
            for i in range(self.dim)
            for j in range(self.dim)
            if any(self._table[i][j])
        }

    def to_json(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "bracket": [
                [i, j, [format_scalar(c) for c in coeffs]]
                for (i, j), coeffs in sorted(self.structure_constants().items())
            ],
        }

    @classmethod
    def from_json(cls, data: Any, validate: bool = True) -> "LeibnizAlgebra":
        """Build an algebra from {"dim": n, "bracket": [[i, j, [...]], ...]}.

        Raises:
            InputError: If the document does not follow the schema.
        """
        if not isinstance(data, dict):
            raise InputError("A Leibniz algebra must be a JSON object.")
        dim = data.get("dim")
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
            raise InputError("Field 'dim' must be a nonnegative integer.")
        entries = data.get("bracket", [])
        if not isinstance(entries, list):
            raise InputError("Field 'bracket' must be a list of [i, j, coefficients].")
        brackets: dict[tuple[int, int], Sequence[Any]] = {}
        for index, entry in enumerate(entries):
            if (
                not isinstance(entry, list)
                or len(entry) != 3
                or not isinstance(entry[0], int)
                or not isinstance(entry[1], int)
                or not isinstance(entry[2], list)
            ):
                raise InputError(f"Bracket entry at index {index} must be [i, j, [coefficients]].")
            if (entry[0], entry[1]) in brackets:
                raise InputError(f"Bracket pair ({entry[0]}, {entry[1]}) is given twice.")
            brackets[(entry[0], entry[1])] = entry[2]
        return cls(dim, brackets, validate=validate)


def verify_leibniz(algebra: LeibnizAlgebra) -> bool:
    return algebra.leibniz_violation() is None


def verify_right_leibniz(algebra: LeibnizAlgebra) -> bool:
    """Check [[a, b], c] = [[a, c], b] + [a, [b, c]] on basis triples.

    The weight-one space of a vertex algebra is left Leibniz but usually not
    right Leibniz, so this is informational.
    """
    n = algebra.dim
    basis = [unit_vector(n, i) for i in range(n)]
    for i, j, k in product(range(n), repeat=3):
        lhs = algebra.bracket(algebra.basis_bracket(i, j), basis[k])
        rhs = add_vectors(
            algebra.bracket(algebra.basis_bracket(i, k), basis[j]),
            algebra.bracket(basis[i], algebra.basis_bracket(j, k)),
        )
        if lhs != rhs:
            return False
    return True


def satisfies_jacobi(algebra: LeibnizAlgebra) -> bool:
    """True iff the table is a Lie algebra (antisymmetric and Leibniz)."""
    return algebra.is_antisymmetric() and verify_leibniz(algebra)


def change_basis(algebra: LeibnizAlgebra, basis: Matrix) -> LeibnizAlgebra:
    """Rewrite the bracket table against the columns of ``basis``.

    Raises:
        DimensionMismatchError: If ``basis`` is not an invertible square
            matrix of the algebra's size.
    """
    n = algebra.dim
    if basis.rows != n or basis.cols != n or determinant(basis) == 0:
        raise DimensionMismatchError("Change of basis needs an invertible square matrix.")
    columns = [basis.column(j) for j in range(n)]
    brackets = {}
    for i, j in product(range(n), repeat=2):
        coords = solve(basis, algebra.bracket(columns[i], columns[j]))
        assert coords is not None
        if any(coords):
            brackets[(i, j)] = coords
    return LeibnizAlgebra(n, brackets, validate=False)


def structure_on(algebra: LeibnizAlgebra, sub: Subspace) -> LeibnizAlgebra:
    """The algebra induced on a bracket-closed subspace, in echelon coordinates.

    Raises:
        NotASubspaceError: If ``sub`` is not closed under the bracket.
    """
    vecs = sub.vectors
    brackets = {}
    for i, j in product(range(len(vecs)), repeat=2):
        value = algebra.bracket(vecs[i], vecs[j])
        if not sub.contains(value):
            raise NotASubspaceError("Subspace is not closed under the bracket.")
        coords = sub.coordinates(value)
        if any(coords):
            brackets[(i, j)] = coords
    return LeibnizAlgebra(len(vecs), brackets, validate=False)


def bracket_span(algebra: LeibnizAlgebra, a: Subspace, b: Subspace) -> Subspace:
    """span{[x, y] : x in a, y in b}."""
    return Subspace.span(
        [algebra.bracket(x, y) for x in a.vectors for y in b.vectors], algebra.dim
    )


def is_ideal(algebra: LeibnizAlgebra, sub: Subspace) -> bool:
    """True iff ``sub`` is a two-sided ideal."""
    full = Subspace.full(algebra.dim)
    return bracket_span(algebra, full, sub).is_subspace_of(sub) and bracket_span(
        algebra, sub, full
    ).is_subspace_of(sub)


def leibniz_kernel(algebra: LeibnizAlgebra) -> Subspace:
    """span{[e_i, e_j] + [e_j, e_i]}, the smallest ideal with a Lie quotient."""
    n = algebra.dim
    return Subspace.span(
        [
            add_vectors(algebra.basis_bracket(i, j), algebra.basis_bracket(j, i))
            for i in range(n)
            for j in range(i, n)
        ],
        n,
    )


def annihilator_of_kernel(
    algebra: LeibnizAlgebra, kernel_space: Optional[Subspace] = None
) -> Subspace:
    """Return F = {a : [a, n] = 0 for all n in N}.

    Args:
        algebra: The Leibniz algebra.
        kernel_space: The ideal N; defaults to the Leibniz kernel.

    Raises:
        CheckFailure: If the result is not a two-sided ideal.
    """
    n_space = kernel_space if kernel_space is not None else leibniz_kernel(algebra)
    if n_space.dim == 0:
        return Subspace.full(algebra.dim)
    rows = []
    for v in n_space.vectors:
        rows.extend(algebra.right_mult_matrix(v).entries)
    result = kernel(Matrix.from_rows(rows, cols=algebra.dim))
    if not is_ideal(algebra, result):
        raise CheckFailure("Annihilator of the kernel is not a two-sided ideal.")
    return result


def quotient_by_ideal(
    algebra: LeibnizAlgebra, ideal: Subspace
) -> tuple[LeibnizAlgebra, QuotientMap]:
    """The quotient algebra together with its projection map.

    Raises:
        CheckFailure: If ``ideal`` is not a two-sided ideal.
    """
    if not is_ideal(algebra, ideal):
        raise CheckFailure("Quotient requested by a subspace that is not a two-sided ideal.")
    qmap = QuotientMap(Subspace.full(algebra.dim), ideal)
    lifts = qmap.lifts
    brackets = {}
    for a, b in product(range(len(lifts)), repeat=2):
        coords = qmap.project(algebra.bracket(lifts[a], lifts[b]))
        if any(coords):
            brackets[(a, b)] = coords
    return LeibnizAlgebra(qmap.dim, brackets, validate=False), qmap


def lie_quotient(algebra: LeibnizAlgebra) -> LeibnizAlgebra:
    """V / N for the Leibniz kernel N; always a Lie algebra."""
    quotient, _ = quotient_by_ideal(algebra, leibniz_kernel(algebra))
    return quotient


def killing_form(algebra: LeibnizAlgebra) -> Matrix:
    """Gram matrix of kappa(x, y) = tr(ad_x ad_y) on the basis."""
    n = algebra.dim
    ads = [algebra.left_mult_matrix(unit_vector(n, i)) for i in range(n)]
    return Matrix.from_rows(
        [[(ads[i] @ ads[j]).trace() for j in range(n)] for i in range(n)], cols=n
    )


def is_semisimple(algebra: LeibnizAlgebra) -> bool:
    if not algebra.is_antisymmetric():
        return False
    return algebra.dim == 0 or determinant(killing_form(algebra)) != 0


def derived_series(
    algebra: LeibnizAlgebra, start: Optional[Subspace] = None
) -> list[Subspace]:
    """D_0 = start (default the whole algebra), D_{k+1} = [D_k, D_k], until stable."""
    series = [start if start is not None else Subspace.full(algebra.dim)]
    while series[-1].dim > 0:
        nxt = bracket_span(algebra, series[-1], series[-1])
        if nxt == series[-1]:
            break
        series.append(nxt)
    return series


def lower_central_series(algebra: LeibnizAlgebra) -> list[Subspace]:
    """C_0 = L, C_{k+1} = [L, C_k] + [C_k, L], until stable."""
    full = Subspace.full(algebra.dim)
    series = [full]
    while series[-1].dim > 0:
        cur = series[-1]
        nxt = sum_spaces(bracket_span(algebra, full, cur), bracket_span(algebra, cur, full))
        if nxt == cur:
            break
        series.append(nxt)
    return series


def is_solvable(algebra: LeibnizAlgebra) -> bool:
    return derived_series(algebra)[-1].dim == 0


def is_nilpotent(algebra: LeibnizAlgebra) -> bool:
    return lower_central_series(algebra)[-1].dim == 0


def _lie_quotient_for(
    algebra: LeibnizAlgebra, ideal: Optional[Subspace]
) -> tuple[LeibnizAlgebra, QuotientMap]:
    base = leibniz_kernel(algebra)
    if ideal is None:
        ideal = base
    elif not base.is_subspace_of(ideal):
        raise CheckFailure("Ideal does not contain the Leibniz kernel; the quotient is not Lie.")
    return quotient_by_ideal(algebra, ideal)


def _radical_of_lie(lie: LeibnizAlgebra) -> Subspace:
    # Cartan criterion: rad g is the Killing-orthogonal of [g, g].
    full = Subspace.full(lie.dim)
    return orthogonal_complement(bracket_span(lie, full, full), killing_form(lie))


def solvable_radical(algebra: LeibnizAlgebra, ideal: Optional[Subspace] = None) -> Subspace:
    """Preimage of rad(L / N) in L.

    Args:
        algebra: The Leibniz algebra.
        ideal: The ideal N to quotient by; defaults to the Leibniz kernel and
            must contain it.
    """
    lie, qmap = _lie_quotient_for(algebra, ideal)
    return qmap.preimage_of(_radical_of_lie(lie))


def nilpotent_radical(algebra: LeibnizAlgebra, ideal: Optional[Subspace] = None) -> Subspace:
    """Preimage of [g, g] intersected with rad g, where g = L / N."""
    lie, qmap = _lie_quotient_for(algebra, ideal)
    full = Subspace.full(lie.dim)
    return qmap.preimage_of(intersect(bracket_span(lie, full, full), _radical_of_lie(lie)))


def _associative_envelope(generators: Sequence[Matrix]) -> list[Matrix]:
    """A basis of the (non-unital) associative algebra generated by matrices."""
    if not generators:
        return []
    size = generators[0].rows * generators[0].cols
    envelope = Subspace.zero(size)
    basis: list[Matrix] = []
    queue = list(generators)
    while queue:
        candidate = queue.pop()
        flat = candidate.flatten()
        if envelope.contains(flat):
            continue
        envelope = Subspace.span(envelope.vectors + (flat,), size)
        basis.append(candidate)
        queue.extend(candidate @ g for g in generators)
    return basis


def nil_radical(algebra: LeibnizAlgebra, ideal: Optional[Subspace] = None) -> Subspace:
    """Preimage of the largest nilpotent ideal of g = L / N.

    The nilradical of g is the set of x in rad g with ad x nilpotent. The
    operators ad(rad g) are simultaneously triangularizable, so x qualifies
    exactly when tr(ad_x b) = 0 for every b in the associative algebra that
    ad(rad g) generates.
    """
    lie, qmap = _lie_quotient_for(algebra, ideal)
    radical = _radical_of_lie(lie)
    n = lie.dim
    envelope = _associative_envelope([lie.left_mult_matrix(r) for r in radical.vectors])
    ads = [lie.left_mult_matrix(unit_vector(n, k)) for k in range(n)]
    rows = [[(ads[k] @ b).trace() for k in range(n)] for b in envelope]
    trace_kernel = kernel(Matrix.from_rows(rows, cols=n)) if rows else Subspace.full(n)
    return qmap.preimage_of(intersect(radical, trace_kernel))


@dataclass(frozen=True)
class RadicalTower:
    """The ideals N, F, B, N1, N0 of a Leibniz algebra."""

    kernel_N: Subspace
    annihilator_F: Subspace
    solvable_B: Subspace
    nilpotent_N1: Subspace
    nil_N0: Subspace

    def chain_holds(self) -> bool:
        """N in N1 in N0 in B."""
        return (
            self.kernel_N.is_subspace_of(self.nilpotent_N1)
            and self.nilpotent_N1.is_subspace_of(self.nil_N0)
            and self.nil_N0.is_subspace_of(self.solvable_B)
        )

    def dims(self) -> dict[str, int]:
        return {
            "N": self.kernel_N.dim,
            "F": self.annihilator_F.dim,
            "B": self.solvable_B.dim,
            "N1": self.nilpotent_N1.dim,
            "N0": self.nil_N0.dim,
        }

    def to_json(self) -> dict[str, Any]:
        return {
            "N": self.kernel_N.to_json(),
            "F": self.annihilator_F.to_json(),
            "B": self.solvable_B.to_json(),
            "N1": self.nilpotent_N1.to_json(),
            "N0": self.nil_N0.to_json(),
            "dims": self.dims(),
        }


def radical_tower(algebra: LeibnizAlgebra, ideal: Optional[Subspace] = None) -> RadicalTower:
    """Compute N, F, B, N1 and N0.

    Args:
        algebra: The Leibniz algebra.
        ideal: The ideal playing the role of N. Defaults to the Leibniz
            kernel; a vertex algebra's V1 uses the larger L(-1)V0.
    """
    n_space = ideal if ideal is not None else leibniz_kernel(algebra)
    tower = RadicalTower(
        kernel_N=n_space,
        annihilator_F=annihilator_of_kernel(algebra, n_space),
        solvable_B=solvable_radical(algebra, n_space),
        nilpotent_N1=nilpotent_radical(algebra, n_space),
        nil_N0=nil_radical(algebra, n_space),
    )
    logger.debug("radical tower dims: %s", tower.dims())
    return tower


def levi_subalgebra(algebra: LeibnizAlgebra) -> Subspace:
    """A semisimple Lie subalgebra S with S + B = L and S meeting B in 0.

    Start from the canonical complement of the solvable radical B and
    correct it down the derived series of B. At stage j the corrections
    x_a lie in B^(j) and solve, modulo B^(j+1), the linear equations

        beta_ab + [s_a, x_b] + [x_a, s_b] - sum_c c_ab^c x_c = 0

    where [s_a, s_b] = sum_c c_ab^c s_c + beta_ab. Each stage takes the
    echelon-canonical particular solution.

    Raises:
        LeviLiftingError: If a stage is inconsistent or the final complement
            is not closed under the bracket.
    """
    n = algebra.dim
    radical = solvable_radical(algebra)
    qmap = QuotientMap(Subspace.full(n), radical)
    lifts = [list(v) for v in qmap.lifts]
    r = len(lifts)
    if r == 0:
        return Subspace.zero(n)

    structure = {
        (a, b): qmap.project(algebra.bracket(lifts[a], lifts[b]))
        for a, b in product(range(r), repeat=2)
    }

    def defect(a: int, b: int) -> Vector:
        target = linear_combination(structure[(a, b)], [tuple(s) for s in lifts], n)
        return add_vectors(
            algebra.bracket(lifts[a], lifts[b]), scale_vector(Fraction(-1), target)
        )

    series = derived_series(algebra, start=radical)
    if series[-1].dim != 0:
        raise LeviLiftingError("Solvable radical has a non-terminating derived series.")

    for stage, (current, following) in enumerate(zip(series, series[1:])):
        functionals = annihilator(following).vectors
        bvecs = current.vectors
        width = len(bvecs)
        rows: list[list[Fraction]] = []
        rhs: list[Fraction] = []
        for a, b in product(range(r), repeat=2):
            beta = defect(a, b)
            left = [algebra.bracket(lifts[a], bk) for bk in bvecs]
            right = [algebra.bracket(bk, lifts[b]) for bk in bvecs]
            for f in functionals:
                row = [Fraction(0)] * (r * width)
                for k in range(width):
                    row[b * width + k] += dot(f, left[k])
                    row[a * width + k] += dot(f, right[k])
                    fb = dot(f, bvecs[k])
                    if fb:
                        for c in range(r):
                            row[c * width + k] -= structure[(a, b)][c] * fb
                rows.append(row)
                rhs.append(-dot(f, beta))
        if not rows:
            continue
        solution = solve(Matrix.from_rows(rows, cols=r * width), rhs)
        if solution is None:
            raise LeviLiftingError(
                f"Levi lifting stage {stage} has no solution.", counterexample=stage
            )
        for a in range(r):
            correction = linear_combination(
                solution[a * width : (a + 1) * width], bvecs, n
            )
            lifts[a] = list(add_vectors(lifts[a], correction))
        logger.debug("Levi lifting stage %d solved (%d equations)", stage, len(rows))

    for a, b in product(range(r), repeat=2):
        if any(defect(a, b)):
            raise LeviLiftingError(
                "Lifted complement is not closed under the bracket.", counterexample=(a, b)
            )
    return Subspace.span(lifts, n)


def invariant_form_radical(algebra: LeibnizAlgebra, form: Matrix) -> Subspace:
    """Kernel of the Gram matrix of a bilinear form on the algebra.

    Raises:
        DimensionMismatchError: If ``form`` is not dim x dim.
    """
    if form.rows != algebra.dim or form.cols != algebra.dim:
        raise DimensionMismatchError(
            f"Form of shape {form.rows}x{form.cols} on an algebra of dim {algebra.dim}."
        )
    return kernel(form)
