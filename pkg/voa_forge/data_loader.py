"""Loading and validating input files.

Leibniz tables, Frobenius algebras and Fock requests are JSON; lattice
shifts may be JSON or TOML. Rational values are integers or "p/q" strings.
Every public ``load_*`` function reports problems through
:func:`voa_forge.ui.display_error` and exits with status 2.
"""

import json
import logging
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Any, NoReturn, Optional

from voa_forge.errors import InputError, VoaForgeError
from voa_forge.exactla import Matrix, Vector, parse_scalar, vector
from voa_forge.fock import FockVector
from voa_forge.frobalg import FrobeniusAlgebra, GradingOperator
from voa_forge.lattice import EvenLattice, ShiftDatum, require_admissible
from voa_forge.leibniz import LeibnizAlgebra
from voa_forge.ui import display_error

logger = logging.getLogger(__name__)

INPUT_ERROR_STATUS = 2
FOCK_OPERATIONS: list[str] = ["heis", "exp", "iterate", "virasoro"]


def _fail(message: str) -> NoReturn:
    display_error(message)
    sys.exit(INPUT_ERROR_STATUS)


def _read_document(file_path: str, suffixes: tuple[str, ...]) -> Any:
    """Parse a JSON or TOML file, exiting with status 2 on any problem."""
    path = Path(file_path)

    if not path.exists():
        _fail(f"File not found: '{file_path}'")

    suffix = path.suffix.lower()
    if suffix not in suffixes:
        _fail(f"'{file_path}' must have one of the extensions {', '.join(suffixes)}.")

    try:
        if suffix == ".toml":
            with open(path, "rb") as f:
                data = tomllib.load(f)
        else:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        _fail(f"The file '{file_path}' could not be parsed: {e}")
    except OSError as e:
        _fail(f"The file '{file_path}' could not be read: {e}")

    logger.debug("read %s", path)
    return data


def _require_int(value: Any, field: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise InputError(f"Field '{field}' must be an integer.")
    return value


def _extract_matrix(value: Any, field: str) -> Matrix:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise InputError(f"Field '{field}' must be a nonempty list of rows.")
    widths = {len(r) for r in value}
    if len(widths) != 1:
        raise InputError(f"Rows of '{field}' have different lengths.")
    return Matrix.from_rows([[parse_scalar(x) for x in row] for row in value])


def _extract_vector(value: Any, field: str) -> Vector:
    if not isinstance(value, list):
        raise InputError(f"Field '{field}' must be a list.")
    return vector(parse_scalar(x) for x in value)


def _extract_shift(data: Any) -> ShiftDatum:
    """Accept {"gram", "h"} or {"lattice": {"gram"}, "shift": {"h"}}."""
    if not isinstance(data, dict):
        raise InputError("A shift file must hold a table / object.")
    lattice_part = data.get("lattice", data)
    shift_part = data.get("shift", data)
    if not isinstance(lattice_part, dict) or "gram" not in lattice_part:
        raise InputError("Shift file is missing the 'gram' field.")
    if not isinstance(shift_part, dict) or "h" not in shift_part:
        raise InputError("Shift file is missing the 'h' field.")
    lattice = EvenLattice(_extract_matrix(lattice_part["gram"], "gram"))
    return ShiftDatum(lattice, _extract_vector(shift_part["h"], "h"))


def _extract_frobenius(data: Any) -> tuple[FrobeniusAlgebra, Optional[GradingOperator]]:
    """Accept a bare algebra object or {"algebra", "degrees" | "grading"}."""
    if not isinstance(data, dict):
        raise InputError("A Frobenius file must hold a JSON object.")
    algebra_part = data.get("algebra", data)
    algebra = FrobeniusAlgebra.from_json(algebra_part)
    grading: Optional[GradingOperator] = None
    if "degrees" in data:
        degrees = _extract_vector(data["degrees"], "degrees")
        if len(degrees) != algebra.dim:
            raise InputError(
                f"'degrees' has {len(degrees)} entries, algebra dim is {algebra.dim}."
            )
        grading = GradingOperator.from_degrees(degrees)
    elif "grading" in data:
        matrix = _extract_matrix(data["grading"], "grading")
        if (matrix.rows, matrix.cols) != (algebra.dim, algebra.dim):
            raise InputError("'grading' must be a dim x dim matrix.")
        grading = GradingOperator(matrix)
    return algebra, grading


@dataclass(frozen=True)
class FockRequest:
    """One mode application: op(mode) applied to ``target``.

    ``direction`` feeds "heis", ``alpha`` feeds "exp", ``state`` feeds
    "iterate" and ``which`` selects the conformal vector for "virasoro".
    """

    shift: ShiftDatum
    op: str
    mode: int
    target: FockVector
    direction: Optional[Vector] = None
    alpha: Optional[tuple[int, ...]] = None
    state: Optional[FockVector] = None
    which: str = "shifted"


def _extract_fock_request(data: Any) -> FockRequest:
    if not isinstance(data, dict):
        raise InputError("A Fock request must be a JSON object.")
    for key in ("gram", "op", "mode", "target"):
        if key not in data:
            raise InputError(f"Fock request is missing the '{key}' field.")
    lattice = EvenLattice(_extract_matrix(data["gram"], "gram"))
    h = data.get("h", [0] * lattice.rank)
    shift = ShiftDatum(lattice, _extract_vector(h, "h"))
    op = data["op"]
    if op not in FOCK_OPERATIONS:
        raise InputError(
            f"Unknown operation '{op}'. Valid operations: {', '.join(FOCK_OPERATIONS)}"
        )
    mode = _require_int(data["mode"], "mode")
    target = FockVector.from_json(data["target"], lattice.rank)

    request = FockRequest(shift, op, mode, target, which=data.get("which", "shifted"))
    if op == "heis":
        if "direction" not in data:
            raise InputError("Operation 'heis' needs a 'direction' field.")
        direction = _extract_vector(data["direction"], "direction")
        if len(direction) != lattice.rank:
            raise InputError("'direction' must have one entry per lattice basis vector.")
        return FockRequest(shift, op, mode, target, direction=direction)
    if op == "exp":
        alpha = data.get("alpha")
        if not isinstance(alpha, list) or len(alpha) != lattice.rank:
            raise InputError("Operation 'exp' needs an integer 'alpha' of length rank.")
        return FockRequest(
            shift, op, mode, target, alpha=tuple(_require_int(a, "alpha") for a in alpha)
        )
    if op == "iterate":
        if "state" not in data:
            raise InputError("Operation 'iterate' needs a 'state' field.")
        return FockRequest(
            shift, op, mode, target, state=FockVector.from_json(data["state"], lattice.rank)
        )
    if request.which not in ("prime", "shifted"):
        raise InputError("Field 'which' must be 'prime' or 'shifted'.")
    return request


def load_leibniz(file_path: str) -> LeibnizAlgebra:
    """Load a bracket table without enforcing the Leibniz identity.

    The identity is checked later so that a violating table is reported as
    a failed check rather than an input error.

    Raises:
        SystemExit: If the file cannot be loaded or validated.
    """
    data = _read_document(file_path, (".json",))
    try:
        return LeibnizAlgebra.from_json(data, validate=False)
    except (VoaForgeError, ValueError) as e:
        _fail(str(e))


def load_frobenius(file_path: str) -> tuple[FrobeniusAlgebra, Optional[GradingOperator]]:
    """Load a Frobenius algebra and an optional grading.

    Raises:
        SystemExit: If the file cannot be loaded or validated.
    """
    data = _read_document(file_path, (".json",))
    try:
        return _extract_frobenius(data)
    except (VoaForgeError, ValueError) as e:
        _fail(str(e))


def load_shift(file_path: str) -> ShiftDatum:
    """Load an admissible lattice shift from TOML or JSON.

    Raises:
        SystemExit: If the file is malformed or the shift is inadmissible.
    """
    data = _read_document(file_path, (".toml", ".json"))
    try:
        shift = _extract_shift(data)
        require_admissible(shift)
    except (VoaForgeError, ValueError) as e:
        _fail(str(e))
    return shift


def load_fock_request(file_path: str) -> FockRequest:
    """Load a single mode-application request.

    Raises:
        SystemExit: If the file cannot be loaded or validated.
    """
    data = _read_document(file_path, (".json",))
    try:
        return _extract_fock_request(data)
    except (VoaForgeError, ValueError) as e:
        _fail(str(e))
