"""
Campaign runner: many claims, one report file per claim.

CLAIM_SUITE covers every claim with a registered expectation at desk
scale; OPEN_CASES compute H1 and the fundamental group for n = 3 over
the exceptional small fields. Tasks fan out over a process pool; results
are collected in task order, so the report files do not depend on the
number of workers.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from orthoverify.checks import ClaimContext, run_claim
from orthoverify.config import DEFAULT_CONFIG, VerifierConfig
from orthoverify.errors import UsageError
from orthoverify.report import VerificationReport, write_report_file
from orthoverify.utils import get_logger, setup_logging

Task = Tuple[str, Dict[str, Any]]

CLAIM_SUITE: Tuple[Task, ...] = (
    ("field.joes_lemma", {"q_min": 5, "q_max": 409, "mod4": 1}),
    *(("field.hasse_margin", {"q": q}) for q in (419, 421)),
    *(("counts.line_census", {"q": q}) for q in (5, 9, 13, 17, 25)),
    *(("counts.sum_of_squares", {"q": q}) for q in (5, 9, 13)),
    *(("counts.degenerate_planes", {"q": q}) for q in (5, 9, 13)),
    *(("counts.radical_planes", {"q": q}) for q in (5, 9, 13)),
    *(("geometry.diameter", {"n": n, "q": q}) for n, q in ((3, 5), (3, 9), (2, 9), (2, 13))),
    *(("geometry.transitivity", {"n": n, "q": q}) for n, q in ((2, 5), (2, 9), (3, 5))),
    ("geometry.residues", {"n": 3, "q": 5}),
    ("topology.fixtures", {}),
    *(("topology.invariants", {"n": n, "q": q}) for n, q in ((2, 5), (3, 5))),
    ("topology.triangles", {"n": 4, "q": 5, "sample_size": 1000}),
)

OPEN_CASES: Tuple[Task, ...] = tuple(
    (claim_id, {"n": 3, "q": q})
    for q in (5, 9, 13, 17)
    for claim_id in ("topology.h1", "topology.pi1")
)


def _worker_init(level: int) -> None:
    setup_logging(logging.getLevelName(level))


def _run_task(task: Task, config: VerifierConfig, timings: bool) -> VerificationReport:
    claim_id, params = task
    return run_claim(claim_id, params, ClaimContext(config), timings)


def run_tasks(
    tasks: Sequence[Task],
    config: VerifierConfig = DEFAULT_CONFIG,
    jobs: int = 1,
    timings: bool = False,
) -> List[VerificationReport]:
    """Run tasks in order, on ``jobs`` worker processes when jobs > 1."""
    if jobs < 1:
        raise UsageError(f"--jobs must be positive, got {jobs}")
    logger = get_logger()
    logger.info(f"Running {len(tasks)} tasks on {jobs} worker(s)")
    if jobs == 1 or len(tasks) <= 1:
        context = ClaimContext(config)
        return [run_claim(claim_id, params, context, timings) for claim_id, params in tasks]

    with ProcessPoolExecutor(
        max_workers=jobs,
        initializer=_worker_init,
        initargs=(logger.getEffectiveLevel(),),
    ) as executor:
        return list(executor.map(_run_task, tasks, repeat(config), repeat(timings)))


def write_campaign(reports: Sequence[VerificationReport], out_dir: Path) -> Dict[str, Path]:
    """One JSON-lines file per claim id, reports in task order."""
    grouped: Dict[str, List[VerificationReport]] = {}
    for report in reports:
        grouped.setdefault(report.claim_id, []).append(report)
    files = {}
    for claim_id, group in grouped.items():
        path = Path(out_dir) / f"{claim_id}.jsonl"
        write_report_file(group, path)
        files[claim_id] = path
    return files


@dataclass
class CampaignResult:
    reports: List[VerificationReport]
    files: Dict[str, Path] = field(default_factory=dict)

    @property
    def failed(self) -> List[VerificationReport]:
        return [r for r in self.reports if r.failed]

    @property
    def success(self) -> bool:
        return not self.failed


def run_campaign(
    claim_suite: bool,
    open_cases: bool,
    out_dir: Path,
    config: VerifierConfig = DEFAULT_CONFIG,
    jobs: int = 1,
    timings: bool = False,
    tasks: Optional[Sequence[Task]] = None,
) -> CampaignResult:
    """Run the selected task lists and write their reports.

    Raises:
        UsageError: If neither list is selected and no tasks are given.
    """
    selected: List[Task] = list(tasks or [])
    if claim_suite:
        selected += CLAIM_SUITE
    if open_cases:
        selected += OPEN_CASES
    if not selected:
        raise UsageError("Select --paper-suite, --open-cases or both")

    reports = run_tasks(selected, config, jobs, timings)
    files = write_campaign(reports, out_dir)
    result = CampaignResult(reports, files)
    get_logger().info(
        f"Campaign finished: {len(reports)} reports, {len(result.failed)} failed"
    )
    return result
