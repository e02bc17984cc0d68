import logging
import math
from typing import NamedTuple, Tuple

import numpy as np

from ..config import settings
from ..core.exception import ResourceGuardException
from ..models.scaling import RuleKind
from ..models.vertex import VertexBatch
from ..services.graph_service import GraphService
from .repository import BaseRepository

logger = logging.getLogger(__name__)

EXACT = 0  # key level of a representative that stands only for itself


class ProbeClasses(NamedTuple):
    """
    Representatives of vertex classes with isomorphic labelled neighbourhoods.

    A class is (level, pos, branch bits of the levels key_level..level); the
    representative has every other path bit zero and stands for `weight`
    vertices. Two members behave alike under a word as long as the
    representative never stands on the start of a cycle above key_level.
    """

    reps: VertexBatch
    weight: np.ndarray
    key_level: np.ndarray

    @property
    def size(self) -> int:
        return self.reps.size

    def take(self, index) -> "ProbeClasses":
        return ProbeClasses(self.reps.take(index), self.weight[index], self.key_level[index])

    def concat(self, other: "ProbeClasses") -> "ProbeClasses":
        return ProbeClasses(
            self.reps.concat(other.reps),
            np.concatenate([self.weight, other.weight]),
            np.concatenate([self.key_level, other.key_level]),
        )


class ProbeSetRepository(BaseRepository[Tuple[str, int, int], ProbeClasses]):
    """Cached finite probe sets standing in for all of S(alpha)."""

    def __init__(self, graph: GraphService):
        super().__init__()
        self.graph = graph
        self.rule = graph.rule

    def anchor_level(self, span: int) -> int:
        """
        Smallest level j with alpha_j > span.

        Constant rules repeat one cycle length forever, so the first level
        that is span steps below every earlier branching already shows all
        types. Explicit rules may stop first; the deepest level is used.
        """
        for level in range(1, self.rule.depth + 1):
            if self.rule.alpha(level) > span:
                return level
        if self.rule.kind is RuleKind.CONSTANT:
            return min(self.rule.depth, 2 + math.ceil(span / (self.rule.constant + 1)))
        return self.rule.depth

    def _anchor_radius(self, span: int, extra: int) -> Tuple[int, int]:
        j = self.anchor_level(span)
        if self.rule.kind is RuleKind.EXPLICIT and self.rule.alpha(j) <= span:
            # the whole truncated graph
            return j, self.rule.partial_sum(self.rule.depth - 1) + self.rule.alpha(self.rule.depth)
        return j, self.rule.partial_sum(j) + extra

    def displacement_set(self, r: int) -> ProbeClasses:
        """T(r) = B(o, s_j + 4r) with alpha_j > 4r, keyed for reach r."""
        _, radius = self._anchor_radius(4 * r, 4 * r)
        return self.get_or_create(("displacement", radius, r), lambda: self.classes(radius, r))

    def equality_set(self, length: int) -> ProbeClasses:
        """T_eq(L) = B(o, s_j + 2L) with alpha_j > 2L, plus sample vertices of levels j+1, j+2."""
        j, radius = self._anchor_radius(2 * length, 2 * length)

        def build() -> ProbeClasses:
            base = self.classes(radius, length)
            deep = self.deep_representatives(j)
            return base.concat(deep) if deep.size else base

        return self.get_or_create(("equality", radius, length), build)

    def deep_representatives(self, j: int) -> ProbeClasses:
        """Cycle start, quarter point and midpoint of path-0 cycles on levels j+1 and j+2."""
        rows = []
        for level in (j + 1, j + 2):
            if level > min(self.rule.depth, self.rule.array_depth):
                continue
            alpha = self.rule.alpha(level)
            for pos in sorted({0, max(alpha // 2, 1) % (2 * alpha), alpha}):
                rows.append((level, 0, pos))
        if not rows:
            return ProbeClasses(VertexBatch.empty(), np.zeros(0, np.int64), np.zeros(0, np.int64))
        arr = np.asarray(rows, dtype=np.int64)
        reps = VertexBatch(arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy())
        return ProbeClasses(reps, np.ones(len(rows), np.int64), np.full(len(rows), EXACT, np.int64))

    def classes(self, radius: int, reach: int) -> ProbeClasses:
        """
        Classes of B_radius(o) for words that stay within `reach` of their start.

        A level-n vertex at offset d0 from its cycle start can reach the start
        of its level-k ancestor in d0 + s_{n-1} - s_{k-1} steps; the branch
        bits of exactly those reachable ancestors enter the key.
        """
        sums = self.rule.sum_table()
        levels, paths, positions, weights, keys = [], [], [], [], []
        total = 0
        for level, t in self.graph._levels_within(radius):
            self.graph._check_depth(level)
            pos = self.graph.level_positions(level, t)
            alpha = self.rule.alpha(level)
            d0 = np.minimum(pos, 2 * alpha - pos)
            threshold = d0 + sums[level - 1] - reach
            key = np.maximum(np.searchsorted(sums[:level], threshold, side="left") + 1, 2)
            bits = np.where(level > 1, np.maximum(level - key + 1, 0), 0)
            key = np.where(bits > 0, key, level + 1)

            for b in np.unique(bits):
                chosen = pos[bits == b]
                count = 1 << int(b)
                total += count * chosen.size
                if total > settings.MAX_PROBE_CLASSES:
                    raise ResourceGuardException("probe.classes", settings.MAX_PROBE_CLASSES, total)
                suffixes = np.arange(count, dtype=np.int64)
                levels.append(np.full(count * chosen.size, level, dtype=np.int64))
                paths.append(np.repeat(suffixes, chosen.size))
                positions.append(np.tile(chosen, count))
                weights.append(np.full(count * chosen.size, 1 << (level - 1 - int(b)), dtype=np.int64))
                keys.append(np.tile(key[bits == b], count))

        reps = VertexBatch(np.concatenate(levels), np.concatenate(paths), np.concatenate(positions))
        logger.debug("Probe classes for radius %d, reach %d: %d", radius, reach, reps.size)
        return ProbeClasses(reps, np.concatenate(weights), np.concatenate(keys))

    def split(self, classes: ProbeClasses, index: np.ndarray, new_key: np.ndarray) -> ProbeClasses:
        """
        Refine the classes at `index` so their keys extend up to new_key.

        Returns only the new finer classes; the caller drops the old ones.
        """
        parts = []
        for i, target in zip(index.tolist(), new_key.tolist()):
            level = int(classes.reps.level[i])
            old_key = int(classes.key_level[i])
            target = max(int(target), 2)
            extra = old_key - target
            if extra <= 0:
                continue
            shift = level - old_key + 1
            suffixes = np.arange(1 << extra, dtype=np.int64) << shift
            count = suffixes.size
            reps = VertexBatch(
                np.full(count, level, dtype=np.int64),
                classes.reps.path[i] | suffixes,
                np.full(count, classes.reps.pos[i], dtype=np.int64),
            )
            parts.append(
                ProbeClasses(
                    reps,
                    np.full(count, int(classes.weight[i]) >> extra, dtype=np.int64),
                    np.full(count, target, dtype=np.int64),
                )
            )
        if not parts:
            return ProbeClasses(VertexBatch.empty(), np.zeros(0, np.int64), np.zeros(0, np.int64))
        result = parts[0]
        for part in parts[1:]:
            result = result.concat(part)
        return result
