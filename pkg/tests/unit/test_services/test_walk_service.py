import math

import numpy as np
import pytest

from bubblewalk.core.exception import ValidationException
from bubblewalk.models.vertex import ROOT, VertexAddress
from bubblewalk.services.walk_service import WalkService


@pytest.fixture
def walks(canonical_rule, canonical_graph) -> WalkService:
    return WalkService(canonical_rule, canonical_graph)


@pytest.mark.unit
class TestWalkService:
    """Unit tests for the induced walk on the graph."""

    def test_starts_at_start(self, walks, rng):
        """Time 0 reports the starting vertex only."""
        hits = list(walks.root_hits(ROOT, 0, 5, rng))
        assert len(hits) == 1
        assert hits[0].all()
        away = next(walks.root_hits(VertexAddress(1, 0, 1), 3, 5, rng))
        assert not away.any()

    def test_one_step_return(self, walks, rng):
        """b and B fix o, so P(at o after one step) = 1/2."""
        size = 40_000
        hits = list(walks.root_hits(ROOT, 1, size, rng))
        assert abs(hits[1].mean() - 0.5) < 4 * math.sqrt(0.25 / size)

    def test_two_step_return(self, walks, rng):
        """P(at o after two steps) = 1/4 + 2/16."""
        size = 40_000
        hits = list(walks.root_hits(ROOT, 2, size, rng))
        p = 3 / 8
        assert abs(hits[2].mean() - p) < 4 * math.sqrt(p * (1 - p) / size)

    def test_visit_counts(self, walks, rng):
        """Counts are cumulative and start at 1 from the root."""
        counts = walks.visit_counts(ROOT, [0, 10, 50], 200, rng)
        assert counts.shape == (200, 3)
        assert np.all(counts[:, 0] == 1)
        assert np.all(np.diff(counts, axis=1) >= 0)
        assert np.all(counts[:, 2] <= 51)

    def test_no_checkpoints(self, walks, rng):
        """An empty checkpoint list gives an empty table."""
        assert walks.visit_counts(ROOT, [], 7, rng).shape == (7, 0)

    def test_rejects_negative_horizon(self, walks, rng):
        """Horizon must be >= 0."""
        with pytest.raises(ValidationException):
            list(walks.root_hits(ROOT, -1, 3, rng))
