"""Concurrent evaluation of gradient plans."""

import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

from .data_types import GradPlan
from .gradfirst import Seed, combine, evaluate_task, task_seeds


logger = logging.getLogger(__name__)


class PlanRunner:
    """Evaluate the tasks of many plans on a worker pool."""

    def __init__(
        self,
        shots: Optional[int] = None,
        seed: Seed = None,
        max_workers: Optional[int] = None,
    ):
        """Initialize plan runner.

        Args:
            shots: Shots per measurement group, or None for exact simulation
            seed: Root seed; one child seed per plan, one grandchild per task
            max_workers: Worker threads (executor default when None)
        """
        self.shots = shots
        self.seed = seed
        self.max_workers = max_workers
        self._executor: Optional[ThreadPoolExecutor] = None

    async def __aenter__(self) -> "PlanRunner":
        self._start()
        return self

    async def __aexit__(self, exc_type, exc_val, exc_tb) -> None:
        self.close()

    def _start(self) -> ThreadPoolExecutor:
        if self._executor is None:
            self._executor = ThreadPoolExecutor(max_workers=self.max_workers)
            logger.debug(f"Started plan executor with max_workers={self.max_workers}")
        return self._executor

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    async def evaluate(self, plans: Sequence[GradPlan]) -> List[Tuple[float, float]]:
        """(value, stderr) per plan, identical to sequential evaluation."""
        executor = self._start()
        loop = asyncio.get_running_loop()
        plan_seeds = task_seeds(len(plans), self.seed)

        futures = []
        for plan, plan_seed in zip(plans, plan_seeds):
            if self.shots is None:
                seeds: List[Seed] = [None] * plan.task_count
            else:
                seeds = list(task_seeds(plan.task_count, plan_seed))
            futures.append(
                [
                    loop.run_in_executor(executor, evaluate_task, task, self.shots, seed)
                    for task, seed in zip(plan.tasks, seeds)
                ]
            )

        total = sum(len(group) for group in futures)
        logger.debug(f"Evaluating {total} tasks from {len(plans)} plans")
        results = await asyncio.gather(*(asyncio.gather(*group) for group in futures))
        return [combine(plan, list(result)) for plan, result in zip(plans, results)]

    def evaluate_sync(self, plans: Sequence[GradPlan]) -> List[Tuple[float, float]]:
        """Blocking wrapper around evaluate()."""
        try:
            return asyncio.run(self.evaluate(plans))
        finally:
            self.close()
