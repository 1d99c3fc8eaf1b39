"""Command dispatch and check bookkeeping, using the Factory Pattern.

:class:`CommandFactory` turns a command name into a :class:`Command`
strategy, and :class:`Runner` executes it, tallies every check it reports
and renders the result as coloured text or canonical JSON.
"""

import logging
from dataclasses import dataclass
from typing import Any, Iterator, Optional

from voa_forge.commands import (
    AnalyzeFrobeniusCommand,
    AnalyzeLeibnizCommand,
    Command,
    FockEvalCommand,
    LatticeShiftCommand,
    ReportCommand,
    Sl2ShiftCommand,
)
from voa_forge.errors import CheckFailure, InputError
from voa_forge.onetrunc import FAIL, PASS, SKIP
from voa_forge.ui import display_error, display_json, display_report, display_summary

logger = logging.getLogger(__name__)

VALID_COMMANDS: list[str] = [
    "analyze-leibniz",
    "analyze-frobenius",
    "lattice-shift",
    "sl2-shift",
    "fock-eval",
    "report",
]
INPUT_COMMANDS: list[str] = ["analyze-leibniz", "analyze-frobenius", "lattice-shift", "fock-eval"]
OUTPUT_FORMATS: list[str] = ["text", "json"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs, as parsed from the command line."""

    command: str
    input_path: Optional[str] = None
    output: str = "text"
    seed: int = 0
    weight_cap: int = 2
    level: int = 1
    verbose: bool = False


class CommandFactory:
    """Factory class for creating command strategy instances."""

    @staticmethod
    def create(config: RunConfig) -> Command:
        """Create the Command named by ``config.command``.

        Args:
            config: The run configuration.

        Returns:
            An instance of the appropriate Command subclass.

        Raises:
            ValueError: If the command name is not recognized, or it needs
                an input file and none was given.
        """
        name = config.command.lower().strip()

        if name in INPUT_COMMANDS and not config.input_path:
            raise ValueError(f"Command '{name}' needs an input file.")

        if name == "analyze-leibniz":
            return AnalyzeLeibnizCommand(str(config.input_path))
        elif name == "analyze-frobenius":
            return AnalyzeFrobeniusCommand(str(config.input_path))
        elif name == "lattice-shift":
            return LatticeShiftCommand(str(config.input_path), config.weight_cap)
        elif name == "sl2-shift":
            return Sl2ShiftCommand(config.level)
        elif name == "fock-eval":
            return FockEvalCommand(str(config.input_path))
        elif name == "report":
            return ReportCommand(config.seed, config.weight_cap, config.level)
        else:
            raise ValueError(
                f"Unknown command: '{name}'. "
                f"Valid commands are: {', '.join(VALID_COMMANDS)}"
            )


def sections_of(document: dict[str, Any]) -> list[dict[str, Any]]:
    """The report sections of a document; a single report is one section."""
    return list(document.get("sections", [document]))


class CheckLedger:
    """Tracks check outcomes across every section of a run."""

    def __init__(self) -> None:
        self.passed: int = 0
        self.failed: int = 0
        self.skipped: int = 0
        self.failures: list[str] = []

    def record(self, check: dict[str, Any]) -> None:
        """Record one check from a report.

        Args:
            check: A check dictionary with "name" and "status".
        """
        status = check["status"]
        if status == PASS:
            self.passed += 1
        elif status == SKIP:
            self.skipped += 1
        elif status == FAIL:
            self.failed += 1
            self.failures.append(check["name"])

    def record_document(self, document: dict[str, Any]) -> None:
        for section in sections_of(document):
            for check in section.get("checks", []):
                self.record(check)

    @property
    def total(self) -> int:
        return self.passed + self.failed + self.skipped

    @property
    def all_passed(self) -> bool:
        return self.failed == 0


def _section_title(section: dict[str, Any]) -> str:
    kind = section.get("kind", "report")
    name = section.get("name")
    return f"{kind}: {name}" if name else kind


def _iter_titled(document: dict[str, Any]) -> Iterator[tuple[str, dict[str, Any]]]:
    for section in sections_of(document):
        yield _section_title(section), section


class Runner:
    """Executes one command and renders its report."""

    def __init__(self, config: RunConfig) -> None:
        self.config: RunConfig = config
        self.ledger: CheckLedger = CheckLedger()

    def render(self, document: dict[str, Any]) -> None:
        if self.config.output == "json":
            display_json(document)
            return
        for title, section in _iter_titled(document):
            display_report(section, title)
        display_summary(self.ledger.passed, self.ledger.failed, self.ledger.skipped)

    def run(self) -> int:
        """Run the configured command.

        Returns:
            0 when every check passes, 1 when a check fails and 2 on bad
            input.
        """
        try:
            command = CommandFactory.create(self.config)
        except ValueError as e:
            display_error(str(e))
            return EXIT_INPUT_ERROR

        logger.info("running %s", command.name)
        try:
            document = command.execute()
        except InputError as e:
            display_error(str(e))
            return EXIT_INPUT_ERROR
        except CheckFailure as e:
            display_error(f"{type(e).__name__}: {e}")
            if e.counterexample is not None:
                display_json({"counterexample": e.counterexample})
            return EXIT_CHECK_FAILED

        self.ledger.record_document(document)
        self.render(document)
        if self.ledger.failures:
            logger.warning("failed checks: %s", ", ".join(self.ledger.failures))
        return EXIT_OK if self.ledger.all_passed else EXIT_CHECK_FAILED


def run(config: RunConfig) -> int:
    """Run ``config`` and return the process exit status."""
    return Runner(config).run()
