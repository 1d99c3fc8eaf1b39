"""Command implementations using the Strategy Pattern.

Each CLI command is a :class:`Command` whose ``execute`` method returns a
JSON-ready report document. Documents carry a ``checks`` list (or a list of
``sections`` that do), which the runner tallies into an exit status.
"""

from abc import ABC, abstractmethod
from typing import Any, Optional

from voa_forge.data_loader import (
    load_fock_request,
    load_frobenius,
    load_leibniz,
    load_shift,
)
from voa_forge.errors import CheckFailure, LeviLiftingError
from voa_forge.examples import (
    DEFAULT_SHIFTS,
    SCHEMA,
    affine_closure_suite,
    basis_change_suite,
    build_lattice_shift,
    build_sl2,
    default_shift,
    fock_property_suite,
    full_report,
    gl2_algebra,
    sl2_report,
)
from voa_forge.exactla import intersect
from voa_forge.fock import FockVector, ModeEngine, VirasoroDatum, virasoro_mode
from voa_forge.frobalg import (
    de_rham_check,
    frobenius_violation,
    is_local,
    jacobson_radical,
    minimal_ideal,
)
from voa_forge.leibniz import (
    is_nilpotent,
    is_semisimple,
    is_solvable,
    levi_subalgebra,
    radical_tower,
    satisfies_jacobi,
    structure_on,
    verify_right_leibniz,
)
from voa_forge.onetrunc import CheckResult


def _finish(document: dict[str, Any], checks: list[CheckResult]) -> dict[str, Any]:
    document["checks"] = [c.to_json() for c in checks]
    document["passed"] = not any(c.failed for c in checks)
    return document


class Command(ABC):
    """Abstract base class for CLI commands."""

    name: str = ""

    @abstractmethod
    def execute(self) -> dict[str, Any]:
        """Run the command and return its report document.

        Returns:
            A JSON-ready dictionary with a "schema" field.
        """
        pass


class AnalyzeLeibnizCommand(Command):
    """Radicals and Levi subalgebra of a bracket table."""

    name = "analyze-leibniz"

    def __init__(self, input_path: str) -> None:
        self.input_path: str = input_path

    def execute(self) -> dict[str, Any]:
        algebra = load_leibniz(self.input_path)
        document: dict[str, Any] = {
            "schema": SCHEMA,
            "kind": "leibniz",
            "dim": algebra.dim,
        }
        violation = algebra.leibniz_violation()
        checks = [
            CheckResult.of(
                "leibniz_identity",
                violation is None,
                witness=list(violation) if violation is not None else None,
            )
        ]
        if violation is not None:
            return _finish(document, checks)

        tower = radical_tower(algebra)
        document.update(
            {
                "lie": satisfies_jacobi(algebra),
                "right_leibniz": verify_right_leibniz(algebra),
                "solvable": is_solvable(algebra),
                "nilpotent": is_nilpotent(algebra),
                "radicals": tower.to_json(),
            }
        )
        checks.append(CheckResult.of("radical_chain", tower.chain_holds(), "N <= N1 <= N0 <= B"))
        try:
            levi = levi_subalgebra(algebra)
        except LeviLiftingError as exc:
            checks.append(CheckResult.of("levi_subalgebra", False, str(exc), exc.counterexample))
            return _finish(document, checks)

        radical = tower.solvable_B
        document["levi"] = levi.to_json()
        checks.append(
            CheckResult.of(
                "levi_complements_radical",
                intersect(levi, radical).dim == 0 and levi.dim + radical.dim == algebra.dim,
                f"dim S = {levi.dim}, dim B = {radical.dim}",
            )
        )
        checks.append(
            CheckResult.of("levi_semisimple", is_semisimple(structure_on(algebra, levi)))
        )
        return _finish(document, checks)


class AnalyzeFrobeniusCommand(Command):
    """Frobenius, locality and optional de Rham checks for a V0 algebra."""

    name = "analyze-frobenius"

    def __init__(self, input_path: str) -> None:
        self.input_path: str = input_path

    def execute(self) -> dict[str, Any]:
        algebra, grading = load_frobenius(self.input_path)
        document: dict[str, Any] = {"schema": SCHEMA, "kind": "frobenius", "dim": algebra.dim}
        problem = frobenius_violation(algebra)
        checks = [CheckResult.of("frobenius", problem is None, problem or "")]
        if problem is not None:
            return _finish(document, checks)

        local = is_local(algebra)
        checks.append(CheckResult.of("local", local))
        document["jacobson_radical"] = jacobson_radical(algebra).to_json()
        if not local:
            return _finish(document, checks)

        try:
            socle = minimal_ideal(algebra)
        except CheckFailure as exc:
            checks.append(CheckResult.of("minimal_ideal", False, str(exc), exc.counterexample))
            return _finish(document, checks)
        document["minimal_ideal"] = socle.to_json()
        checks.append(CheckResult.of("minimal_ideal", True))

        if grading is None:
            checks.append(CheckResult.skipped("de_rham", "no grading given"))
            return _finish(document, checks)
        try:
            report = de_rham_check(algebra, grading)
        except CheckFailure as exc:
            checks.append(CheckResult.of("de_rham", False, str(exc), exc.counterexample))
            return _finish(document, checks)
        document["de_rham"] = report.to_json()
        document["poincare_series"] = list(report.poincare_series())
        checks.append(CheckResult.of("de_rham", report.passed, f"nu = {report.nu}"))
        checks.append(CheckResult.of("poincare_palindromic", report.is_palindromic()))
        return _finish(document, checks)


class LatticeShiftCommand(Command):
    """Full pipeline for one shifted lattice theory read from a file."""

    name = "lattice-shift"

    def __init__(self, input_path: str, weight_cap: int) -> None:
        self.input_path: str = input_path
        self.weight_cap: int = weight_cap

    def execute(self) -> dict[str, Any]:
        shift = load_shift(self.input_path)
        bundle = build_lattice_shift(shift)
        document = full_report(bundle)
        extra = fock_property_suite(bundle, self.weight_cap)
        document["checks"].extend(c.to_json() for c in extra)
        document["passed"] = document["passed"] and not any(c.failed for c in extra)
        return document


class Sl2ShiftCommand(Command):
    """The shifted affine sl2 model at a given level."""

    name = "sl2-shift"

    def __init__(self, level: int) -> None:
        self.level: int = level

    def execute(self) -> dict[str, Any]:
        return sl2_report(build_sl2(self.level))


class FockEvalCommand(Command):
    """Evaluate one mode application from a JSON request."""

    name = "fock-eval"

    def __init__(self, input_path: str) -> None:
        self.input_path: str = input_path

    def execute(self) -> dict[str, Any]:
        request = load_fock_request(self.input_path)
        engine = ModeEngine(request.shift.lattice)
        checks: list[CheckResult] = []
        result: FockVector
        if request.op == "heis":
            assert request.direction is not None
            result = engine.heis_mode(request.direction, request.mode, request.target)
        elif request.op == "exp":
            assert request.alpha is not None
            result = engine.exp_mode(request.alpha, request.mode, request.target)
        elif request.op == "iterate":
            assert request.state is not None
            result = engine.iterate_mode(request.state, request.mode, request.target)
        else:
            shifted = request.which == "shifted"
            result = virasoro_mode(
                engine,
                VirasoroDatum.build(request.shift),
                request.mode,
                request.target,
                which=request.which,
                cross_check=shifted,
            )
            if shifted:
                checks.append(CheckResult.of("shifted_virasoro_two_routes", True))
        document = {
            "schema": SCHEMA,
            "kind": "fock-eval",
            "op": request.op,
            "mode": request.mode,
            "result": result.to_json(),
        }
        return _finish(document, checks)


class ReportCommand(Command):
    """Every built-in family plus the seeded randomized suite."""

    name = "report"

    def __init__(self, seed: int, weight_cap: int, level: Optional[int] = None) -> None:
        self.seed: int = seed
        self.weight_cap: int = weight_cap
        self.level: Optional[int] = level

    def execute(self) -> dict[str, Any]:
        sections: list[dict[str, Any]] = []
        bundles = {}
        for name in DEFAULT_SHIFTS:
            bundles[name] = build_lattice_shift(default_shift(name))
            section = full_report(bundles[name])
            section["name"] = name
            sections.append(section)

        properties = fock_property_suite(bundles["a1"], self.weight_cap)
        sections.append(
            _finish({"kind": "fock-properties", "name": "a1"}, properties)
        )

        levels = sorted({1, 2, 3} | ({self.level} if self.level else set()))
        for level in levels:
            section = sl2_report(build_sl2(level))
            section["name"] = f"level {level}"
            sections.append(section)

        sections.append(
            _finish({"kind": "affine-closure", "name": "a1 unshifted"}, affine_closure_suite())
        )
        randomized = [
            basis_change_suite(gl2_algebra(), self.seed),
            basis_change_suite(bundles["a1a1"].datum.v1, self.seed),
        ]
        sections.append(
            _finish({"kind": "randomized", "name": f"seed {self.seed}"}, randomized)
        )
        return {
            "schema": SCHEMA,
            "kind": "report",
            "seed": self.seed,
            "sections": sections,
            "passed": all(s["passed"] for s in sections),
        }
