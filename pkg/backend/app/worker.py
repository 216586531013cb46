"""
Sweep Worker
Runs planned suite tasks inline or over a process pool. Reports are
yielded in instance-index order whatever the pool size.
"""
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Iterable, Iterator, Optional

from app.core.logging import get_logger
from app.core.settings import get_settings
from app.core.utils import stopwatch
from app.schemas.report import VerificationReport
from app.services.suites import Task, run_task

logger = get_logger(__name__)


def process_task(task: Task, timings: bool = False) -> VerificationReport:
    """
    Run one task, attaching the wall time when timings are enabled.

    Module-level so it can be pickled for worker processes.
    """
    task_logger = logger.bind(suite=task.suite, index=task.index, q=task.q, seed=task.seed)
    with stopwatch() as timing:
        report = run_task(task)
    task_logger.debug(f"Task done in {timing['ms']} ms", extra={"pass": report.passed})
    if timings:
        report = report.model_copy(update={"runtime_ms": timing["ms"]})
    return report


class SweepWorker:
    """
    Executes suite tasks.

    Args:
        jobs: Worker processes; 1 runs everything in this process
        timings: Attach runtime_ms to every report
    """

    def __init__(self, jobs: Optional[int] = None, timings: Optional[bool] = None):
        self._settings = get_settings()
        self.jobs = max(1, jobs if jobs is not None else self._settings.jobs)
        self.timings = timings if timings is not None else self._settings.verify.report_timings

    def run(self, tasks: Iterable[Task]) -> Iterator[VerificationReport]:
        """
        Run tasks and yield their reports in order.

        Args:
            tasks: Planned tasks, already in index order

        Yields:
            One report per task
        """
        tasks = list(tasks)
        worker = partial(process_task, timings=self.timings)
        if self.jobs == 1 or len(tasks) <= 1:
            logger.info(f"Running {len(tasks)} tasks inline")
            for task in tasks:
                yield worker(task)
            return

        chunksize = max(1, len(tasks) // (self.jobs * 8))
        logger.info(f"Running {len(tasks)} tasks on {self.jobs} processes (chunksize={chunksize})")
        with ProcessPoolExecutor(max_workers=self.jobs) as pool:
            # map preserves submission order
            yield from pool.map(worker, tasks, chunksize=chunksize)
