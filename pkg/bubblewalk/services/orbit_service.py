import itertools
import logging
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from ..config import settings
from ..core.exception import ResourceGuardException, ValidationException
from ..core.parallel import run_chunked
from ..models.scaling import ScalingRule
from ..models.vertex import (
    ROOT,
    STEP_OF_CODE,
    Letter,
    VertexAddress,
    VertexBatch,
    Word,
    invert_word,
    word_codes,
    word_from_codes,
)
from ..repositories.probe_repository import ProbeClasses, ProbeSetRepository
from ..schemas.orbit import (
    ConfinementReport,
    InvertedOrbitTrace,
    OrbitEngine,
    OrbitSampleRow,
    Sampler,
)
from ..schemas.zline import ConfineQuery
from .graph_service import GraphService
from .zline_service import ZLineService

logger = logging.getLogger(__name__)

DEEP_SPOT_CHECKS = 100


class _ChunkStats(NamedTuple):
    rows: List[OrbitSampleRow]
    subword_violations: int
    deep_checked: int
    deep_violations: int


class OrbitService:
    """Service layer for inverted orbits and displacement statistics."""

    def __init__(self, rule: ScalingRule, probes: Optional[ProbeSetRepository] = None):
        self.rule = rule
        self.graph = GraphService(rule)
        self.probes = probes or ProbeSetRepository(self.graph)
        self.zline = ZLineService()

    # ------------------------------------------------------------------
    # Words
    # ------------------------------------------------------------------

    @staticmethod
    def sample_word(n: int, rng: np.random.Generator) -> Word:
        if n < 0:
            raise ValidationException("n must be >= 0", field="n")
        return word_from_codes(rng.integers(0, 4, size=n))

    @staticmethod
    def subword_range(codes: np.ndarray) -> np.ndarray:
        """Largest Z-range of a contiguous subword, per row of a code matrix."""
        codes = np.atleast_2d(codes)
        walk = np.cumsum(STEP_OF_CODE[codes], axis=1)
        walk = np.concatenate([np.zeros((walk.shape[0], 1), dtype=np.int64), walk], axis=1)
        return walk.max(axis=1) - walk.min(axis=1)

    # ------------------------------------------------------------------
    # Inverted orbit engines
    # ------------------------------------------------------------------

    def _trace(self, points: List[VertexAddress], engine: OrbitEngine, expansions: int = 0) -> InvertedOrbitTrace:
        return InvertedOrbitTrace(
            points=points,
            radius=max(self.graph.dist_to_root(u) for u in points),
            distinct_count=len(set(points)),
            engine=engine,
            expansions=expansions,
        )

    def inverted_orbit_oracle(self, w: Word) -> InvertedOrbitTrace:
        """Reference implementation: u_k = o.(g_k^-1 ... g_1^-1), each k from scratch."""
        points = [ROOT]
        for k in range(1, len(w) + 1):
            points.append(self.graph.apply_word(ROOT, invert_word(w[:k])))
        return self._trace(points, OrbitEngine.ORACLE)

    def ordinary_orbit(self, w: Word) -> List[VertexAddress]:
        """The trajectory o, o.g_1, o.g_1 g_2, ..."""
        points = [ROOT]
        for letter in w:
            points.append(self.graph.apply_letter(points[-1], letter))
        return points

    def inverted_orbit_tracked(self, w: Word, r0: int = 1) -> InvertedOrbitTrace:
        """
        Forward images psi_k(x) = x.(g_1...g_k) of a tracked ball B_R(o);
        u_k is the tracked x with psi_k(x) = o.

        Args:
            w: The word
            r0: Initial tracking radius

        Raises:
            ResourceGuardException: If the tracked ball outgrows MAX_TRACKED_POINTS
        """
        if r0 < 1:
            raise ValidationException("initial radius must be >= 1", field="r0")
        codes = word_codes(w)
        radius = r0
        tracked = self._tracked_ball(radius)
        images = tracked
        points = [ROOT]
        expansions = 0

        for k in range(1, len(codes) + 1):
            images = self.graph.step_batch(images, int(codes[k - 1]))
            hit = np.flatnonzero(images.is_root())
            while hit.size == 0:
                # u_k lies within distance k of o, so growing to k always succeeds
                grown = min(max(2 * radius, radius + 1), max(k, radius + 1))
                fresh = self._tracked_ball(grown)
                fresh = fresh.take(self.graph.dist_to_root_batch(fresh) > radius)
                fresh_images = self.graph.run_word_batch(fresh, codes[:k])
                tracked = tracked.concat(fresh)
                images = images.concat(fresh_images)
                radius = grown
                expansions += 1
                logger.debug("Tracking radius grown to %d at step %d (%d points)", radius, k, tracked.size)
                hit = np.flatnonzero(images.is_root())
            i = int(hit[0])
            points.append(VertexAddress(int(tracked.level[i]), int(tracked.path[i]), int(tracked.pos[i])))

        return self._trace(points, OrbitEngine.TRACKED, expansions)

    def _tracked_ball(self, radius: int) -> VertexBatch:
        volume = self.graph.ball_volume(radius)
        if volume > settings.MAX_TRACKED_POINTS:
            raise ResourceGuardException("orbit.tracking", settings.MAX_TRACKED_POINTS, volume)
        return self.graph.ball_batch(radius)

    def inverted_orbit_points(self, codes: np.ndarray) -> VertexBatch:
        """
        Inverted orbits of many equal-length words at once.

        Particle (w, k) starts at o and applies g_k^-1, ..., g_1^-1 of word w,
        all particles in lock-step. A b-letter g_k gives u_k = u_{k-1}
        because b fixes o, so only a-letters launch particles.

        Args:
            codes: Letter codes of shape (words, n)

        Returns:
            Batch of words * (n + 1) points, word-major
        """
        codes = np.atleast_2d(np.asarray(codes, dtype=np.int64))
        words, n = codes.shape
        inverse = (codes ^ 1).ravel()

        word_idx, k_idx = np.nonzero(codes < 2)
        ks = k_idx + 1
        order = np.argsort(-ks, kind="stable")
        word_idx, ks = word_idx[order], ks[order]

        level = np.ones(ks.size, dtype=np.int64)
        path = np.zeros(ks.size, dtype=np.int64)
        pos = np.zeros(ks.size, dtype=np.int64)
        for step in range(int(ks[0]) if ks.size else 0):
            active = int(np.searchsorted(-ks, -step, side="left"))
            if active == 0:
                break
            letter = inverse[word_idx[:active] * n + ks[:active] - 1 - step]
            moved = self.graph.step_batch(VertexBatch(level[:active], path[:active], pos[:active]), letter)
            level[:active], path[:active], pos[:active] = moved

        # u_k for a b-letter k repeats the last a-letter point (or o)
        particle = np.zeros((words, n + 1), dtype=np.int64)
        particle[word_idx, ks] = np.arange(1, ks.size + 1)
        column = np.where(particle > 0, np.arange(n + 1)[None, :], 0)
        column = np.maximum.accumulate(column, axis=1)
        slot = particle[np.arange(words)[:, None], column].ravel()
        level = np.concatenate([[1], level])[slot]
        path = np.concatenate([[0], path])[slot]
        pos = np.concatenate([[0], pos])[slot]
        return VertexBatch(level, path, pos)

    def inverted_orbit_batched(self, w: Word) -> InvertedOrbitTrace:
        points = self.inverted_orbit_points(word_codes(w)[None, :])
        return self._trace(points.to_addresses(), OrbitEngine.BATCHED)

    def inverted_orbit(self, w: Word, engine: Optional[OrbitEngine] = None) -> InvertedOrbitTrace:
        """Inverted orbit with the configured engine; long words go to the batched one."""
        engine = engine or OrbitEngine(settings.ORBIT_ENGINE)
        if engine is OrbitEngine.TRACKED and len(w) > settings.TRACKED_MAX_STEPS:
            logger.debug("Word of length %d exceeds TRACKED_MAX_STEPS; using the batched engine", len(w))
            engine = OrbitEngine.BATCHED
        if engine is OrbitEngine.ORACLE:
            return self.inverted_orbit_oracle(w)
        if engine is OrbitEngine.TRACKED:
            return self.inverted_orbit_tracked(w, settings.TRACKED_INITIAL_RADIUS)
        return self.inverted_orbit_batched(w)

    def find_orbit_witness(self, max_n: int = 6) -> Optional[Word]:
        """Shortest word whose inverted orbit differs, as a set, from its ordinary orbit."""
        for n in range(1, max_n + 1):
            for letters in itertools.product(Letter, repeat=n):
                trace = self.inverted_orbit_oracle(letters)
                if set(trace.points) != set(self.ordinary_orbit(letters)):
                    return letters
        return None

    # ------------------------------------------------------------------
    # Displacement
    # ------------------------------------------------------------------

    def displacement_by_class(self, codes: np.ndarray, classes: ProbeClasses) -> Tuple[np.ndarray, ProbeClasses]:
        """
        d(x, x.w) for every class representative and every word.

        Classes whose representative climbs above its key are split and
        simulated again until every class is exact.

        Returns:
            (displacements of shape (words, classes), the refined classes)
        """
        codes = np.atleast_2d(np.asarray(codes, dtype=np.int64))
        words = codes.shape[0]
        done_disp, done_classes = [], []
        pending = classes
        while pending.size:
            reps = pending.reps
            start = VertexBatch(*(np.tile(a, words) for a in reps))
            rows = (np.repeat(codes[:, t], reps.size) for t in range(codes.shape[1]))
            final, lowest = self.graph.run_tracking(start, rows)
            lowest = lowest.reshape(words, reps.size).min(axis=0)
            disp = self.graph.geodesic_batch(start, final).reshape(words, reps.size)

            exact = lowest >= pending.key_level
            done_disp.append(disp[:, exact])
            done_classes.append(pending.take(exact))
            stale = np.flatnonzero(~exact)
            if stale.size:
                logger.debug("Refining %d probe classes", stale.size)
            pending = self.probes.split(pending, stale, lowest[stale])

        refined = done_classes[0]
        for part in done_classes[1:]:
            refined = refined.concat(part)
        return np.concatenate(done_disp, axis=1), refined

    def max_displacement_many(self, codes: np.ndarray, test_radius: int) -> np.ndarray:
        """max over T(test_radius) of d(x, x.w), per word."""
        if test_radius < 1:
            raise ValidationException("test radius must be >= 1", field="test_radius")
        codes = np.atleast_2d(np.asarray(codes, dtype=np.int64))
        if codes.shape[1] == 0:
            return np.zeros(codes.shape[0], dtype=np.int64)
        disp, _ = self.displacement_by_class(codes, self.probes.displacement_set(test_radius))
        return disp.max(axis=1)

    def max_displacement(self, w: Word, test_radius: int) -> int:
        return int(self.max_displacement_many(word_codes(w)[None, :], test_radius)[0])

    def deep_vertices(self, test_radius: int, count: int, rng: np.random.Generator) -> VertexBatch:
        """Random vertices on the levels just past the anchor level of T(test_radius)."""
        j = self.probes.anchor_level(4 * test_radius)
        deepest = min(self.rule.depth, self.rule.array_depth)
        levels = [lv for lv in (j + 1, j + 2, j + 3) if lv <= deepest]
        if not levels:
            return VertexBatch.empty()
        level = rng.choice(np.asarray(levels, dtype=np.int64), size=count)
        path = np.array([int(rng.integers(0, 2 ** (lv - 1))) for lv in level.tolist()], dtype=np.int64)
        pos = np.array([int(rng.integers(0, 2 * self.rule.alpha(lv))) for lv in level.tolist()], dtype=np.int64)
        return VertexBatch(level, path, pos)

    def deep_displacement(self, codes: np.ndarray, vertices: VertexBatch) -> np.ndarray:
        """max over the given vertices of d(x, x.w), per word."""
        codes = np.atleast_2d(np.asarray(codes, dtype=np.int64))
        words = codes.shape[0]
        start = VertexBatch(*(np.tile(a, words) for a in vertices))
        rows = (np.repeat(codes[:, t], vertices.size) for t in range(codes.shape[1]))
        if codes.shape[1] == 0:
            return np.zeros(words, dtype=np.int64)
        final, _ = self.graph.run_tracking(start, rows)
        return self.graph.geodesic_batch(start, final).reshape(words, vertices.size).max(axis=1)

    # ------------------------------------------------------------------
    # Conditioned statistics
    # ------------------------------------------------------------------

    def choose_sampler(self, n: int, m: int) -> Sampler:
        if n * self.zline.confine_rate(m) <= settings.REJECTION_MAX_RATE:
            return Sampler.REJECTION
        return Sampler.BRIDGE

    def _sample_codes(self, q: ConfineQuery, size: int, sampler: Sampler, rng: np.random.Generator):
        if sampler is Sampler.BRIDGE:
            steps = self.zline.conditioned_steps(q, size, rng)
            return self.zline.steps_to_codes(steps, rng), np.ones(size, dtype=bool)
        codes = rng.integers(0, 4, size=(size, q.n))
        walk = np.cumsum(STEP_OF_CODE[codes], axis=1)
        if q.n == 0:
            return codes, np.ones(size, dtype=bool)
        accepted = (walk.max(axis=1) <= q.m) & (walk.min(axis=1) >= -q.m)
        return codes, accepted

    def conditioned_orbit_stats(
        self,
        n: int,
        m: int,
        reps: int,
        seed: int,
        threads: Optional[int] = None,
        sampler: Optional[Sampler] = None,
        condition: bool = True,
        test_radius: Optional[int] = None,
    ) -> Tuple[ConfinementReport, List[OrbitSampleRow]]:
        """
        Orbit radius and displacement of words conditioned on A_{n,m}.

        Rejection sampling is used while n * confine_rate(m) stays below
        REJECTION_MAX_RATE; past it, the h-transform sampler draws from the
        same conditional law directly.

        Args:
            n: Word length
            m: Confinement half-width
            reps: Words to draw
            seed: Run seed; chunks derive their streams from it
            threads: Worker count (None = settings)
            sampler: Force a sampler
            condition: False keeps every word (plain orbit sampling)
            test_radius: Radius r of the probe set T(r); defaults to m

        Returns:
            The merged report and one row per replica
        """
        q = ConfineQuery(n=n, m=m)
        if reps < 0:
            raise ValidationException("reps must be >= 0", field="reps")
        sampler = sampler or self.choose_sampler(n, m)
        acceptance = self.zline.confine_prob_exact(q)
        test_radius = test_radius or m
        logger.info("Sampling %d words of length %d, m = %d, sampler = %s", reps, n, m, sampler.value)

        def task(offset: int, size: int, rng: np.random.Generator) -> _ChunkStats:
            if condition:
                codes, accepted = self._sample_codes(q, size, sampler, rng)
            else:
                codes, accepted = rng.integers(0, 4, size=(size, n)), np.ones(size, dtype=bool)
            kept = codes[accepted]
            rows = [OrbitSampleRow(replica=offset + i, accepted=bool(a)) for i, a in enumerate(accepted)]
            if kept.shape[0] == 0:
                return _ChunkStats(rows, 0, 0, 0)

            points = self.inverted_orbit_points(kept)
            dist = self.graph.dist_to_root_batch(points).reshape(kept.shape[0], n + 1)
            radius = dist.max(axis=1)
            flat = np.stack([points.level, points.path, points.pos], axis=1).reshape(kept.shape[0], n + 1, 3)
            distinct = [len(np.unique(block, axis=0)) for block in flat]
            displacement = self.max_displacement_many(kept, test_radius)

            violations = int(np.sum(self.subword_range(kept) > 2 * m)) if condition and n else 0
            deep = self.deep_vertices(test_radius, DEEP_SPOT_CHECKS, rng)
            deep_violations = 0
            if deep.size and n:
                deep_violations = int(np.sum(self.deep_displacement(kept, deep) > displacement))

            for j, i in enumerate(np.flatnonzero(accepted).tolist()):
                rows[i] = rows[i].model_copy(
                    update={
                        "orbit_radius": int(radius[j]),
                        "max_displacement": int(displacement[j]),
                        "distinct_count": int(distinct[j]),
                    }
                )
            return _ChunkStats(rows, violations, deep.size, deep_violations)

        chunks = run_chunked(task, reps, seed, threads)
        rows = [row for chunk in chunks for row in chunk.rows]
        kept = [row for row in rows if row.accepted]

        report = ConfinementReport(
            n=n,
            m=m,
            reps=reps,
            accepted=len(kept),
            acceptance_probability=acceptance,
            sampler=sampler,
            test_radius=test_radius,
            subword_violations=sum(c.subword_violations for c in chunks),
            deep_checked=sum(c.deep_checked for c in chunks),
            deep_violations=sum(c.deep_violations for c in chunks),
        )
        if not kept:
            logger.warning("No accepted samples for n = %d, m = %d", n, m)
            return report, rows

        radius_ratio = max(row.orbit_radius for row in kept) / m
        displacement_ratio = max(row.max_displacement for row in kept) / m
        report = report.model_copy(
            update={
                "max_orbit_radius_over_m": radius_ratio,
                "max_displacement_over_m": displacement_ratio,
                "empirical_K": max(radius_ratio, displacement_ratio),
            }
        )
        return report, rows
