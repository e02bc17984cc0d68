import logging
from typing import Iterable, List, Optional, Set, Tuple

import numpy as np

from ..config import settings
from ..core.exception import LevelDepthException, ResourceGuardException, ValidationException
from ..models.scaling import RuleKind, ScalingRule
from ..models.vertex import Letter, VertexAddress, VertexBatch, Word

logger = logging.getLogger(__name__)

_BIT_SHIFTS = (32, 16, 8, 4, 2, 1)


def _bit_length(values: np.ndarray) -> np.ndarray:
    """Elementwise int.bit_length for nonnegative int64 arrays."""
    length = np.zeros_like(values)
    v = values.copy()
    for shift in _BIT_SHIFTS:
        big = (v >> shift) > 0
        length += np.where(big, shift, 0)
        v = np.where(big, v >> shift, v)
    return length + (v > 0)


class GraphService:
    """
    Lazy view of the Schreier graph S(alpha).

    Level-n cycles have length 2*alpha_n; position alpha_n (the midpoint)
    sits on a branching 3-cycle with the starts of the two child cycles.
    b cycles midpoint -> child 0 -> child 1 -> midpoint and fixes every
    other vertex.
    """

    def __init__(self, rule: ScalingRule):
        self.rule = rule
        self._alpha = rule.alpha_table()
        self._sums = rule.sum_table()
        self._array_depth = rule.array_depth
        # explicit rules describe the finite truncation: b fixes the deepest midpoints
        self._leaf_level = rule.depth if rule.kind is RuleKind.EXPLICIT else None

    # ------------------------------------------------------------------
    # Scalar operations
    # ------------------------------------------------------------------

    def validate(self, x: VertexAddress) -> VertexAddress:
        """
        Check that x is a canonical address for this rule.

        Raises:
            ValidationException: If the coordinates are out of range
            AlphaOutOfRangeException: If the level is not defined by the rule
        """
        if x.level < 1:
            raise ValidationException("level must be >= 1", field="address")
        alpha = self.rule.alpha(x.level)
        if not 0 <= x.path < 2 ** (x.level - 1):
            raise ValidationException(f"path of {x} does not fit level {x.level}", field="address")
        if not 0 <= x.pos < 2 * alpha:
            raise ValidationException(f"position of {x} outside [0, {2 * alpha})", field="address")
        return x

    def apply_letter(self, x: VertexAddress, letter: Letter) -> VertexAddress:
        alpha = self.rule.alpha(x.level)
        if letter is Letter.A:
            return x._replace(pos=(x.pos + 1) % (2 * alpha))
        if letter is Letter.A_INV:
            return x._replace(pos=(x.pos - 1) % (2 * alpha))

        forward = letter is Letter.B
        if x.pos == alpha:
            if x.level == self._leaf_level:
                return x
            self.rule.alpha(x.level + 1)
            return VertexAddress(x.level + 1, (x.path << 1) | (0 if forward else 1), 0)
        if x.pos == 0 and x.level > 1:
            bit = x.path & 1
            if bit == (0 if forward else 1):
                return x._replace(path=x.path ^ 1)
            return VertexAddress(x.level - 1, x.path >> 1, self.rule.alpha(x.level - 1))
        return x

    def apply_word(self, x: VertexAddress, w: Word) -> VertexAddress:
        for letter in w:
            x = self.apply_letter(x, letter)
        return x

    def neighbors(self, x: VertexAddress) -> Set[VertexAddress]:
        result = {self.apply_letter(x, Letter.A), self.apply_letter(x, Letter.A_INV)}
        for letter in (Letter.B, Letter.B_INV):
            y = self.apply_letter(x, letter)
            if y != x:
                result.add(y)
        return result

    def dist_to_root(self, x: VertexAddress) -> int:
        alpha = self.rule.alpha(x.level)
        return self.rule.partial_sum(x.level - 1) + min(x.pos, 2 * alpha - x.pos)

    def _up(self, x: VertexAddress, k: int) -> int:
        """Distance from x to the start of its level-k ancestor cycle."""
        alpha = self.rule.alpha(x.level)
        return (
            min(x.pos, 2 * alpha - x.pos)
            + self.rule.partial_sum(x.level - 1)
            - self.rule.partial_sum(k - 1)
        )

    def _common_prefix(self, x: VertexAddress, y: VertexAddress) -> int:
        m = min(x.level, y.level) - 1
        ax = x.path >> (x.level - 1 - m)
        ay = y.path >> (y.level - 1 - m)
        return m - (ax ^ ay).bit_length()

    def geodesic_distance(self, x: VertexAddress, y: VertexAddress) -> int:
        """Exact distance through the lowest cycle containing both branches."""
        self.validate(x)
        self.validate(y)
        c = self._common_prefix(x, y)
        top = c + 1
        if x.level == top and y.level == top:
            alpha = self.rule.alpha(top)
            gap = abs(x.pos - y.pos)
            return min(gap, 2 * alpha - gap)
        if x.level == top:
            return abs(x.pos - self.rule.alpha(top)) + 1 + self._up(y, top + 1)
        if y.level == top:
            return abs(y.pos - self.rule.alpha(top)) + 1 + self._up(x, top + 1)
        return self._up(x, top + 1) + 1 + self._up(y, top + 1)

    def dist(self, x: VertexAddress, y: VertexAddress, cap: int) -> Optional[int]:
        """
        Graph distance by bidirectional BFS, or None when it exceeds cap.

        Args:
            x: First vertex
            y: Second vertex
            cap: Largest distance worth searching for

        Returns:
            The distance, or None if d(x, y) > cap

        Raises:
            ValidationException: If cap < 0 or an address is not canonical
        """
        if cap < 0:
            raise ValidationException("cap must be >= 0", field="cap")
        self.validate(x)
        self.validate(y)
        if x == y:
            return 0
        if x.level == y.level and x.path == y.path:
            d = self.geodesic_distance(x, y)
            return d if d <= cap else None

        seen = ({x: 0}, {y: 0})
        frontiers = ([x], [y])
        radii = [0, 0]
        while frontiers[0] and frontiers[1] and radii[0] + radii[1] < cap:
            side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
            mine, other = seen[side], seen[1 - side]
            radii[side] += 1
            layer = []
            best = None
            for v in frontiers[side]:
                for u in self.neighbors(v):
                    if u in mine:
                        continue
                    mine[u] = radii[side]
                    layer.append(u)
                    if u in other:
                        total = radii[side] + other[u]
                        best = total if best is None else min(best, total)
            if best is not None:
                return best if best <= cap else None
            frontiers = (layer, frontiers[1]) if side == 0 else (frontiers[0], layer)
        return None

    def ball(self, center: VertexAddress, r: int) -> Set[VertexAddress]:
        """Closed ball B_r(center) by BFS."""
        if r < 0:
            raise ValidationException("radius must be >= 0", field="r")
        self.validate(center)
        reach = self.dist_to_root(center) + r
        # the truncated graph of an explicit rule has no level past the list
        bound = self.ball_volume(reach) if self._leaf_level else self.ball_size_bound(reach)
        if bound > settings.MAX_BALL_SIZE:
            raise ResourceGuardException("graph.ball", settings.MAX_BALL_SIZE, bound)

        seen = {center}
        frontier = [center]
        for _ in range(r):
            layer = []
            for v in frontier:
                for u in self.neighbors(v):
                    if u not in seen:
                        seen.add(u)
                        layer.append(u)
            frontier = layer
        return seen

    def ball_size_bound(self, n: int) -> int:
        """2 * sum_{j<=k} 2^{j-1} (alpha_j + 1) with s_{k-1} <= n < s_k."""
        if n < 0:
            raise ValidationException("n must be >= 0", field="n")
        k = self.rule.level_of_radius(n)
        return 2 * sum(2 ** (j - 1) * (self.rule.alpha(j) + 1) for j in range(1, k + 1))

    def ball_volume(self, r: int) -> int:
        """Exact |B_r(o)| by counting whole cycles and partial arcs per level."""
        if r < 0:
            raise ValidationException("radius must be >= 0", field="r")
        total = 0
        for level, t in self._levels_within(r):
            alpha = self.rule.alpha(level)
            per_cycle = 2 * alpha if t >= alpha else 1 + 2 * t
            total += 2 ** (level - 1) * per_cycle
        return total

    def _levels_within(self, r: int):
        """Yield (level, r - s_{level-1}) for every level reaching into B_r(o)."""
        level = 1
        while self._leaf_level is None or level <= self._leaf_level:
            t = r - self.rule.partial_sum(level - 1)
            if t < 0:
                return
            yield level, t
            level += 1

    # ------------------------------------------------------------------
    # Array kernels
    # ------------------------------------------------------------------

    def _check_depth(self, deepest: int) -> None:
        if deepest > self._array_depth:
            self.rule.alpha(deepest)
            raise LevelDepthException(deepest, self._array_depth)

    def validate_batch(self, batch: VertexBatch) -> VertexBatch:
        if batch.size == 0:
            return batch
        self._check_depth(int(batch.level.max()))
        return batch

    def step_batch(self, batch: VertexBatch, codes) -> VertexBatch:
        """Apply one letter (scalar code or one code per element) to every vertex."""
        level, path, pos = batch
        alpha = self._alpha[level]

        if np.isscalar(codes) and codes < 2:
            step = 1 if codes == 0 else -1
            return VertexBatch(level, path, (pos + step) % (2 * alpha))

        codes = np.broadcast_to(np.asarray(codes, dtype=np.int64), level.shape)
        is_b = codes >= 2
        forward = codes == 2
        move = np.where(codes == 0, 1, np.where(codes == 1, -1, 0))
        new_pos = np.where(is_b, pos, (pos + move) % (2 * alpha))
        new_level = level.copy()
        new_path = path.copy()

        down = is_b & (pos == alpha)
        if self._leaf_level is not None:
            down &= level < self._leaf_level
        if down.any():
            self._check_depth(int(level[down].max()) + 1)
            new_level[down] = level[down] + 1
            new_path[down] = (path[down] << 1) | np.where(forward[down], 0, 1)
            new_pos[down] = 0

        at_start = is_b & (pos == 0) & (level > 1)
        if at_start.any():
            # forward b: child 0 -> child 1 -> parent midpoint; backward reverses
            sideways = at_start & ((path & 1) == np.where(forward, 0, 1))
            up = at_start & ~sideways
            new_path[sideways] = path[sideways] ^ 1
            new_level[up] = level[up] - 1
            new_path[up] = path[up] >> 1
            new_pos[up] = self._alpha[level[up] - 1]

        return VertexBatch(new_level, new_path, new_pos)

    def run_word_batch(self, batch: VertexBatch, codes: Iterable[int]) -> VertexBatch:
        for code in codes:
            batch = self.step_batch(batch, int(code))
        return batch

    def run_tracking(self, batch: VertexBatch, code_rows: Iterable) -> Tuple[VertexBatch, np.ndarray]:
        """
        Apply one code row per step and report, per element, the smallest level
        (2 or more) whose cycle start was visited; unvisited elements get
        array_depth + 2.
        """
        none = self._array_depth + 2
        lowest = np.where((batch.pos == 0) & (batch.level > 1), batch.level, none)
        for codes in code_rows:
            batch = self.step_batch(batch, codes)
            lowest = np.minimum(lowest, np.where((batch.pos == 0) & (batch.level > 1), batch.level, none))
        return batch, lowest

    def dist_to_root_batch(self, batch: VertexBatch) -> np.ndarray:
        level, _, pos = batch
        alpha = self._alpha[level]
        return self._sums[level - 1] + np.minimum(pos, 2 * alpha - pos)

    def geodesic_batch(self, xs: VertexBatch, ys: VertexBatch) -> np.ndarray:
        """Elementwise geodesic_distance for two aligned batches."""
        nx, px, qx = xs
        ny, py, qy = ys
        m = np.minimum(nx, ny) - 1
        diff = (px >> (nx - 1 - m)) ^ (py >> (ny - 1 - m))
        top = m - _bit_length(diff) + 1

        ax = self._alpha[nx]
        ay = self._alpha[ny]
        up_x = np.minimum(qx, 2 * ax - qx) + self._sums[nx - 1] - self._sums[top]
        up_y = np.minimum(qy, 2 * ay - qy) + self._sums[ny - 1] - self._sums[top]

        gap = np.abs(qx - qy)
        cyclic = np.minimum(gap, 2 * ax - gap)
        x_top = nx == top
        y_top = ny == top
        return np.where(
            x_top & y_top,
            cyclic,
            np.where(
                x_top,
                np.abs(qx - ax) + 1 + up_y,
                np.where(y_top, np.abs(qy - ay) + 1 + up_x, up_x + 1 + up_y),
            ),
        )

    def ball_batch(self, r: int) -> VertexBatch:
        """All vertices of B_r(o) as arrays, enumerated level by level."""
        volume = self.ball_volume(r)
        if volume > settings.MAX_BALL_SIZE:
            raise ResourceGuardException("graph.ball", settings.MAX_BALL_SIZE, volume)

        parts: List[VertexBatch] = []
        for level, t in self._levels_within(r):
            self._check_depth(level)
            positions = self.level_positions(level, t)
            paths = np.arange(2 ** (level - 1), dtype=np.int64)
            parts.append(
                VertexBatch(
                    np.full(paths.size * positions.size, level, dtype=np.int64),
                    np.repeat(paths, positions.size),
                    np.tile(positions, paths.size),
                )
            )
        batch = parts[0]
        for part in parts[1:]:
            batch = batch.concat(part)
        logger.debug("Enumerated ball of radius %d with %d vertices", r, batch.size)
        return batch

    def level_positions(self, level: int, t: int) -> np.ndarray:
        """Positions p on a level cycle with min(p, 2*alpha - p) <= t."""
        alpha = self.rule.alpha(level)
        if t >= alpha:
            return np.arange(2 * alpha, dtype=np.int64)
        upper = np.arange(0, t + 1, dtype=np.int64)
        lower = np.arange(2 * alpha - t, 2 * alpha, dtype=np.int64)
        return np.concatenate([upper, lower])
