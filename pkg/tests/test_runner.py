"""Tests for the concurrent plan runner."""

from unittest.mock import AsyncMock, patch

import pytest

from qad_gradients.gradfirst import build_plan, evaluate_plan, task_seeds
from qad_gradients.runner import PlanRunner


@pytest.fixture
def plans(qnn_pqc):
    theta = [0.5, -0.2, 0.9]
    return [build_plan(qnn_pqc, theta, j, m) for j, m in ((1, "ht"), (2, "rht"), (3, "psr"))]


class TestPlanRunner:
    """Test suite for PlanRunner."""

    @pytest.mark.asyncio
    async def test_exact_matches_sequential(self, plans):
        """Test exact values equal sequential evaluation."""
        async with PlanRunner(max_workers=2) as runner:
            results = await runner.evaluate(plans)
        for plan, (value, stderr) in zip(plans, results):
            assert value == pytest.approx(evaluate_plan(plan)[0], abs=1e-12)
            assert stderr == 0.0

    @pytest.mark.asyncio
    async def test_shots_reproduce_sequential(self, plans):
        """Test per-plan seeds match the sequential spawning scheme."""
        async with PlanRunner(shots=300, seed=21) as runner:
            results = await runner.evaluate(plans)
        seeds = task_seeds(len(plans), 21)
        expected = [evaluate_plan(plan, 300, seed) for plan, seed in zip(plans, seeds)]
        assert results == expected

    def test_sync_wrapper_closes_pool(self, plans):
        """Test evaluate_sync runs to completion and releases the executor."""
        runner = PlanRunner()
        results = runner.evaluate_sync(plans)
        assert len(results) == 3
        assert runner._executor is None

    @pytest.mark.asyncio
    async def test_empty_plan_list(self):
        """Test nothing to evaluate."""
        async with PlanRunner() as runner:
            assert await runner.evaluate([]) == []

    def test_sync_wrapper_closes_on_error(self, plans):
        """Test the executor is released when evaluation fails."""
        runner = PlanRunner()
        runner._start()
        with patch.object(runner, "evaluate", new_callable=AsyncMock) as mock_evaluate:
            mock_evaluate.side_effect = RuntimeError("worker failed")
            with pytest.raises(RuntimeError, match="worker failed"):
                runner.evaluate_sync(plans)
        assert runner._executor is None
