import logging
from typing import Iterator, Sequence

import numpy as np

from ..core.exception import ValidationException
from ..models.scaling import ScalingRule
from ..models.vertex import VertexAddress, VertexBatch
from .graph_service import GraphService

logger = logging.getLogger(__name__)


class WalkService:
    """
    The induced walk on S(alpha): every step applies a uniform letter.

    b and B hold at vertices off the branching cycles, so this is the lazy
    simple walk the group walk projects to.
    """

    def __init__(self, rule: ScalingRule, graph: GraphService | None = None):
        self.rule = rule
        self.graph = graph or GraphService(rule)

    def root_hits(
        self, start: VertexAddress, horizon: int, size: int, rng: np.random.Generator
    ) -> Iterator[np.ndarray]:
        """Yield, for k = 0..horizon, which of `size` independent walkers sit at o."""
        if horizon < 0:
            raise ValidationException("horizon must be >= 0", field="horizon")
        walkers = self.graph.validate_batch(VertexBatch.repeat(self.graph.validate(start), size))
        yield walkers.is_root()
        for _ in range(horizon):
            walkers = self.graph.step_batch(walkers, rng.integers(0, 4, size=size))
            yield walkers.is_root()

    def visit_counts(
        self,
        start: VertexAddress,
        checkpoints: Sequence[int],
        size: int,
        rng: np.random.Generator,
    ) -> np.ndarray:
        """
        Visits to o during times 0..T for each checkpoint T.

        Returns:
            Array of shape (size, len(checkpoints))
        """
        checkpoints = sorted(int(t) for t in checkpoints)
        if not checkpoints:
            return np.zeros((size, 0), dtype=np.int64)
        counts = np.zeros((size, len(checkpoints)), dtype=np.int64)
        visits = np.zeros(size, dtype=np.int64)
        slot = 0
        for k, at_root in enumerate(self.root_hits(start, checkpoints[-1], size, rng)):
            visits += at_root
            while slot < len(checkpoints) and checkpoints[slot] == k:
                counts[:, slot] = visits
                slot += 1
        return counts
