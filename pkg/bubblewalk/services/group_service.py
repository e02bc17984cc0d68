import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterator, List, Optional, Set

import numpy as np

from ..config import settings
from ..core.exception import ValidationException
from ..core.parallel import worker_count
from ..models.scaling import ScalingRule
from ..models.vertex import ROOT, Letter, VertexBatch, Word, invert_word, word_codes
from ..repositories.probe_repository import ProbeSetRepository
from ..schemas.group import ActionFingerprint, SmallOrbitCount
from .graph_service import GraphService
from .orbit_service import OrbitService

logger = logging.getLogger(__name__)

COUNT_BLOCK = 1024


class GroupService:
    """Element-level operations on the bubble group."""

    def __init__(self, rule: ScalingRule, probes: Optional[ProbeSetRepository] = None):
        self.rule = rule
        self.graph = GraphService(rule)
        self.probes = probes or ProbeSetRepository(self.graph)
        self.orbits = OrbitService(rule, self.probes)

    def fingerprint(self, w: Word, length: Optional[int] = None) -> ActionFingerprint:
        """
        Images of T_eq(L) under w, L = length or |w|.

        A word of length L only sees the L-neighbourhood of a vertex, and the
        classes of T_eq(L) are keyed for reach L, so the representatives
        stand for every vertex of the set.
        """
        length = len(w) if length is None else length
        classes = self.probes.equality_set(length)
        images = self.graph.run_word_batch(classes.reps, word_codes(w))
        return ActionFingerprint(test_set_id=f"eq:L={length}", size=classes.size, images=images.fingerprint())

    def elements_equal(self, w1: Word, w2: Word) -> bool:
        length = max(len(w1), len(w2))
        return self.fingerprint(w1, length).images == self.fingerprint(w2, length).images

    def is_identity(self, w: Word) -> bool:
        return self.elements_equal(w, ())

    @staticmethod
    def free_reduce(w: Word) -> Word:
        """Cancel adjacent inverse pairs until none are left."""
        stack: List[Letter] = []
        for letter in w:
            if stack and stack[-1] is letter.inverse:
                stack.pop()
            else:
                stack.append(letter)
        return tuple(stack)

    def deep_word(self, level: int) -> Word:
        """a^{alpha_1} b a^{alpha_2} b ... b: carries o to the start of a level cycle, length s_{level-1}."""
        if level < 1:
            raise ValidationException("level must be >= 1", field="level")
        word: List[Letter] = []
        for k in range(1, level):
            word.extend([Letter.A] * self.rule.alpha(k))
            word.append(Letter.B)
        return tuple(word)

    def count_small_orbit_elements(
        self,
        n: int,
        m: int,
        k_emp: float,
        threads: Optional[int] = None,
    ) -> SmallOrbitCount:
        """
        Count distinct elements among words of length exactly n with
        O(w) in B_R(o) and max displacement <= R, R = ceil(k_emp * m).

        The orbit condition is closed under prefixes, so a depth-first walk
        of the 4-ary word tree drops a whole subtree as soon as a prefix
        leaves the ball. First-letter subtrees run in parallel.

        Raises:
            ValidationException: If n exceeds MAX_COUNT_WORD_LENGTH
        """
        if n < 0 or n > settings.MAX_COUNT_WORD_LENGTH:
            raise ValidationException(
                f"n must lie in [0, {settings.MAX_COUNT_WORD_LENGTH}]", field="n"
            )
        if m < 1 or k_emp <= 0:
            raise ValidationException("m and k_emp must be positive", field="m")
        radius = math.ceil(k_emp * m)

        if n == 0:
            return SmallOrbitCount(
                n=0, m=m, k_emp=k_emp, radius=radius, distinct_elements=1, words_kept=1, words_examined=1
            )

        def explore(first: Letter):
            seen: Set[bytes] = set()
            kept = 0
            block: List[np.ndarray] = []
            for codes in self._orbit_survivors((first,), n, radius):
                block.append(codes)
                if len(block) == COUNT_BLOCK:
                    kept += self._absorb(np.stack(block), m, radius, seen)
                    block = []
            if block:
                kept += self._absorb(np.stack(block), m, radius, seen)
            return seen, kept

        with ThreadPoolExecutor(max_workers=min(4, worker_count(threads))) as pool:
            results = list(pool.map(explore, list(Letter)))

        distinct: Set[bytes] = set()
        for seen, _ in results:
            # bytes keys compare in full on hash collision
            distinct |= seen
        kept = sum(count for _, count in results)
        logger.info("n = %d, R = %d: %d kept words, %d distinct elements", n, radius, kept, len(distinct))
        return SmallOrbitCount(
            n=n,
            m=m,
            k_emp=k_emp,
            radius=radius,
            distinct_elements=len(distinct),
            words_kept=kept,
            words_examined=4**n,
        )

    def _orbit_survivors(self, prefix: Word, n: int, radius: int) -> Iterator[np.ndarray]:
        """Words of length n extending prefix whose every inverted-orbit point lies in B_radius(o)."""
        u = self.graph.apply_word(ROOT, invert_word(prefix))
        if self.graph.dist_to_root(u) > radius:
            return
        if len(prefix) == n:
            yield word_codes(prefix)
            return
        for letter in Letter:
            yield from self._orbit_survivors(prefix + (letter,), n, radius)

    def _absorb(self, codes: np.ndarray, m: int, radius: int, seen: Set[bytes]) -> int:
        """Apply the displacement filter to a block of words and record fingerprints of the survivors."""
        displacement = self.orbits.max_displacement_many(codes, m)
        codes = codes[displacement <= radius]
        if codes.shape[0] == 0:
            return 0

        reps = self.probes.equality_set(codes.shape[1]).reps
        words = codes.shape[0]
        start = VertexBatch(*(np.tile(a, words) for a in reps))
        rows = (np.repeat(codes[:, t], reps.size) for t in range(codes.shape[1]))
        images, _ = self.graph.run_tracking(start, rows)
        for i in range(words):
            seen.add(images.take(slice(i * reps.size, (i + 1) * reps.size)).fingerprint())
        return words
