"""
Verification reports and the claim registry.

A VerificationReport records the outcome of one claim check for one
parameter set. Reports are written as JSON lines with sorted keys and
compact separators, each validated against the shipped JSON schema, so a
rerun with the same flags reproduces the file byte for byte.
"""

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO

import click
import jsonschema

from orthoverify import __version__
from orthoverify.errors import ConfigurationError, InternalError
from orthoverify.utils import get_logger

DATA_DIR = Path(__file__).resolve().parent / "data"
CLAIMS_FILE = DATA_DIR / "claims.json"
SCHEMA_FILE = DATA_DIR / "verification_report.schema.json"


class Outcome(Enum):
    PASS = "Pass"
    FAIL = "Fail"
    COMPUTED = "Computed"
    EXCEEDED = "Exceeded"


OUTCOME_COLOURS = {
    Outcome.PASS: "green",
    Outcome.FAIL: "red",
    Outcome.COMPUTED: "cyan",
    Outcome.EXCEEDED: "yellow",
}


@dataclass
class VerificationReport:
    """Outcome of one claim for one parameter set.

    Pass and Fail are reserved for claims whose registry entry has an
    expectation covering the parameters; everything else is Computed, and
    budget exhaustion is Exceeded.
    """

    claim_id: str
    parameters: Dict[str, Any]
    outcome: Outcome
    values: Dict[str, Any]
    wall_time_ms: Optional[int] = None
    tool_version: str = __version__
    notes: List[str] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.outcome is Outcome.FAIL

    def to_record(self) -> Dict[str, Any]:
        return {
            "claim_id": self.claim_id,
            "parameters": self.parameters,
            "outcome": self.outcome.value,
            "values": self.values,
            "wall_time_ms": self.wall_time_ms,
            "tool_version": self.tool_version,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        """Canonical one-line JSON, validated against the report schema."""
        record = self.to_record()
        validate_report(record)
        return json.dumps(record, sort_keys=True, separators=(",", ":"))

    def short_parameters(self) -> str:
        shown = {k: v for k, v in self.parameters.items() if k != "budgets"}
        return " ".join(f"{k}={v}" for k, v in sorted(shown.items()))


@lru_cache(maxsize=None)
def load_schema() -> Dict[str, Any]:
    with SCHEMA_FILE.open(encoding="utf-8") as f:
        return json.load(f)


def validate_report(record: Dict[str, Any]) -> None:
    """Validate one report record.

    Raises:
        InternalError: If the record does not match the published schema.
    """
    try:
        jsonschema.validate(instance=record, schema=load_schema())
    except jsonschema.ValidationError as e:
        raise InternalError(
            f"Report for {record.get('claim_id')} violates the schema: {e.message}"
        )


def _rule_applies(when: Dict[str, Any], parameters: Dict[str, Any]) -> bool:
    n = parameters.get("n")
    q = parameters.get("q")
    for key, bound in when.items():
        value = n if key.startswith("n_") else q
        if value is None:
            return False
        if key.endswith("_min") and value < bound:
            return False
        if key.endswith("_max") and value > bound:
            return False
        if key == "q_mod_4" and value % 4 != bound:
            return False
        if key == "q_not_in" and value in bound:
            return False
    return True


class ClaimRegistry:
    """Claim ids with their descriptions, anchors and expectation rules.

    An expectation rule applies when every condition of its ``when``
    record holds for the parameters (``n_min``, ``n_max``, ``q_min``,
    ``q_max``, ``q_mod_4``, ``q_not_in``); the first applying rule wins.
    """

    def __init__(self, claims: Dict[str, Dict[str, Any]]):
        self.claims = claims

    @classmethod
    def load(cls, path: Optional[Path] = None) -> "ClaimRegistry":
        path = Path(path) if path is not None else CLAIMS_FILE
        try:
            with path.open(encoding="utf-8") as f:
                claims = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"Failed to load claim registry {path}: {e}")
        get_logger().debug(f"Loaded {len(claims)} claims from {path}")
        return cls(claims)

    def ids(self) -> List[str]:
        return sorted(self.claims)

    def __contains__(self, claim_id: str) -> bool:
        return claim_id in self.claims

    def describe(self, claim_id: str) -> str:
        return self.claims[claim_id]["description"]

    def anchor(self, claim_id: str) -> str:
        return self.claims[claim_id]["anchor"]

    def rule(self, claim_id: str, parameters: Dict[str, Any]) -> Optional[Dict[str, Any]]:
        for rule in self.claims[claim_id].get("expectations", []):
            if _rule_applies(rule.get("when", {}), parameters):
                return rule
        return None

    def expectation(
        self, claim_id: str, parameters: Dict[str, Any]
    ) -> Optional[Dict[str, Any]]:
        rule = self.rule(claim_id, parameters)
        return None if rule is None else rule["expect"]


@lru_cache(maxsize=None)
def default_registry() -> ClaimRegistry:
    return ClaimRegistry.load()


AT_MOST = "_at_most"


def _meets(values: Dict[str, Any], key: str, wanted: Any) -> bool:
    if key.endswith(AT_MOST):
        actual = values.get(key[: -len(AT_MOST)])
        # "inf" and missing values never meet a bound.
        return isinstance(actual, int) and actual <= wanted
    return values.get(key) == wanted


def compare_expectation(
    values: Dict[str, Any], expect: Dict[str, Any]
) -> Dict[str, Dict[str, Any]]:
    """Expected keys whose computed value differs, with both sides.

    A key ending in ``_at_most`` bounds the value of the key without the
    suffix from above.
    """
    mismatches = {}
    for key, wanted in expect.items():
        if not _meets(values, key, wanted):
            actual_key = key[: -len(AT_MOST)] if key.endswith(AT_MOST) else key
            mismatches[key] = {"expected": wanted, "actual": values.get(actual_key)}
    return mismatches


def write_reports(reports: Iterable[VerificationReport], stream: TextIO) -> int:
    """Write reports as JSON lines; returns the number written."""
    count = 0
    for report in reports:
        stream.write(report.to_json() + "\n")
        count += 1
    return count


def write_report_file(reports: Sequence[VerificationReport], path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        write_reports(reports, f)
    get_logger().info(f"Wrote {len(reports)} report(s) to {path}")


def read_reports(path: Path) -> List[Dict[str, Any]]:
    with Path(path).open(encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def write_scan_csv(rows: Iterable[Dict[str, Any]], path: Path) -> None:
    """CSV summary of a sum-of-squares scan: q, q_mod_4, status, witness_count."""
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["q", "q_mod_4", "status", "witness_count"])
        for row in rows:
            w.writerow([row["q"], row["q_mod_4"], row["status"], len(row["witnesses"])])


def summary_lines(reports: Sequence[VerificationReport]) -> List[str]:
    """Human-readable summary table, one line per report."""
    lines = []
    width = max((len(r.claim_id) for r in reports), default=0)
    for r in reports:
        outcome = click.style(
            f"{r.outcome.value:<8}", fg=OUTCOME_COLOURS[r.outcome], bold=True
        )
        lines.append(f"  {r.claim_id:<{width}}  {outcome}  {r.short_parameters()}")
        for note in r.notes:
            lines.append(f"  {'':<{width}}    note: {note}")
    counts = {o: sum(1 for r in reports if r.outcome is o) for o in Outcome}
    lines.append(
        "  " + ", ".join(f"{counts[o]} {o.value}" for o in Outcome if counts[o])
    )
    return lines
