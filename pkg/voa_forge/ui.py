"""Terminal rendering for voa-forge reports.

Text output is coloured with colorama; JSON output is printed with sorted
keys and two-space indentation so that identical runs are byte-identical.
"""

import json
from typing import Any

from colorama import Fore, Style, init

init(autoreset=True)

STATUS_COLOURS = {"pass": Fore.GREEN, "fail": Fore.RED, "skip": Fore.YELLOW}


def display_header(title: str) -> None:
    """Display a banner for one report section.

    Args:
        title: The section title.
    """
    print(f"\n{Style.BRIGHT}{'=' * 60}")
    print(f"  {title}")
    print(f"{'=' * 60}{Style.RESET_ALL}")


def display_check(check: dict[str, Any]) -> None:
    """Display one check line: status tag, name and optional detail."""
    status = check["status"]
    colour = STATUS_COLOURS.get(status, "")
    line = f"  {colour}{Style.BRIGHT}[{status.upper():4}]{Style.RESET_ALL} {check['name']}"
    if check.get("detail"):
        line += f"  ({check['detail']})"
    print(line)
    if "counterexample" in check:
        print(f"         counterexample: {json.dumps(check['counterexample'], sort_keys=True)}")


def display_fields(report: dict[str, Any]) -> None:
    """Display the scalar summary fields a report carries."""
    for key in ("kind", "level", "dims", "central_charge", "graded_dimensions"):
        if key in report:
            print(f"  {key + ':':<20} {json.dumps(report[key], sort_keys=True)}")
    if report.get("shift"):
        print(f"  {'h:':<20} {report['shift']['h']}")
    if report.get("de_rham"):
        print(f"  {'de Rham nu:':<20} {report['de_rham']['nu']}")
    if report.get("trichotomy"):
        print(f"  {'trichotomy case:':<20} {report['trichotomy']['case']}")


def display_report(report: dict[str, Any], title: str) -> None:
    """Render one report section with all of its checks."""
    display_header(title)
    display_fields(report)
    checks = report.get("checks", [])
    if checks:
        print()
    for check in checks:
        display_check(check)
    if "result" in report:
        print(f"\n  result: {json.dumps(report['result'], sort_keys=True)}")


def display_summary(passed: int, failed: int, skipped: int) -> None:
    """Display the check totals of a whole run.

    Args:
        passed: Number of passing checks.
        failed: Number of failing checks.
        skipped: Number of skipped checks.
    """
    print(f"\n{Style.BRIGHT}{'=' * 60}")
    print("  Summary")
    print(f"{'=' * 60}{Style.RESET_ALL}")
    print(f"  Passed:  {passed}")
    print(f"  Failed:  {failed}")
    print(f"  Skipped: {skipped}")
    if failed:
        print(f"\n  {Fore.RED}{Style.BRIGHT}Some checks failed.{Style.RESET_ALL}")
    else:
        print(f"\n  {Fore.GREEN}{Style.BRIGHT}All checks passed.{Style.RESET_ALL}")
    print()


def display_json(document: Any) -> None:
    """Print a JSON document in its canonical form."""
    print(json.dumps(document, sort_keys=True, indent=2))


def display_error(message: str) -> None:
    """Display an error message in red.

    Args:
        message: The error message to display.
    """
    print(f"{Fore.RED}Error: {message}{Style.RESET_ALL}")
