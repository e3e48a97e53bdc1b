"""ParallelRunner — ordered fan-out over a thread pool.

Wraps a ThreadPoolExecutor so that independent work items (GUE samples,
suite instances) can run concurrently while results always come back in
submission order. Reductions over the results are therefore identical for
any worker count.

Usage:
    with ParallelRunner(workers=4) as runner:
        traces = runner.map(sample_traces, streams)
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import Any, TypeVar

from planarcalc.exceptions import ConfigError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class ParallelRunner:
    """
    Maps a function over items, in order.

    With ``workers=1`` everything runs inline on the calling thread and no
    executor is created.
    """

    def __init__(self, workers: int = 1) -> None:
        if workers < 1:
            raise ConfigError(f"workers must be >= 1, got {workers}")
        self.workers = workers
        self._executor: ThreadPoolExecutor | None = None
        if workers > 1:
            self._executor = ThreadPoolExecutor(
                max_workers=workers, thread_name_prefix="planarcalc"
            )

    # ── Core API ───────────────────────────────────────────────────────────────

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """Results of ``fn`` over ``items`` in submission order."""
        work = list(items)
        if self._executor is None:
            return [fn(item) for item in work]
        futures = [self._executor.submit(fn, item) for item in work]
        logger.debug("submitted %d items to %d workers", len(futures), self.workers)
        return [future.result() for future in futures]

    # ── Lifecycle ──────────────────────────────────────────────────────────────

    def close(self) -> None:
        """Shut down the executor. Call when done to release threads."""
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self) -> ParallelRunner:
        return self

    def __exit__(self, *_: Any) -> None:
        self.close()
