import logging
import math
from typing import Tuple

import numpy as np

from ..config import settings
from ..core.exception import ResourceGuardException, ValidationException
from ..models.vertex import Letter, STEP_OF_CODE, Word
from ..schemas.zline import ConfineQuery, ConfinementProbability

logger = logging.getLogger(__name__)

# Below this mass the iteration rescales and keeps the factor in log space.
_RESCALE_BELOW = 1e-200
UNDERFLOW_RATE = 700.0


class ZLineService:
    """
    The lazy walk on Z seen through the letter projection a -> +1, A -> -1,
    b, B -> 0: hold with probability 1/2, step +-1 with probability 1/4 each.
    """

    @staticmethod
    def project_letter(letter: Letter) -> int:
        return letter.step

    @staticmethod
    def project_word(word: Word) -> np.ndarray:
        """Prefix sums Z_0 = 0, Z_1, ..., Z_n of the projected word."""
        steps = np.fromiter((letter.step for letter in word), dtype=np.int64, count=len(word))
        return np.concatenate([[0], np.cumsum(steps)])

    def _check_states(self, m: int) -> None:
        states = 2 * m + 1
        if states > settings.MAX_ZLINE_STATES:
            raise ResourceGuardException("zline.states", settings.MAX_ZLINE_STATES, states)

    def confine_rate(self, m: int) -> float:
        """-log(1/2 + cos(pi/(2m+2))/2), computed as -2 log cos(pi/(4m+4))."""
        if m < 1:
            raise ValidationException("m must be >= 1", field="m")
        return -2.0 * math.log(math.cos(math.pi / (4 * m + 4)))

    def _iterate(self, q: ConfineQuery) -> Tuple[float, float]:
        """
        n applications of the killed transition operator to the point mass at 0.

        The vector is rescaled whenever its mass gets small, so any n works;
        cost is O(n m). Returns (log of the rescaling factor, remaining mass).
        """
        self._check_states(q.m)
        v = np.zeros(2 * q.m + 1)
        v[q.m] = 1.0
        log_scale = 0.0
        for _ in range(q.n):
            nxt = 0.5 * v
            nxt[1:] += 0.25 * v[:-1]
            nxt[:-1] += 0.25 * v[1:]
            v = nxt
            mass = v.sum()
            if mass < _RESCALE_BELOW:
                log_scale += math.log(mass)
                v /= mass
        return log_scale, float(v.sum())

    def confine_log_prob_exact(self, q: ConfineQuery) -> float:
        log_scale, mass = self._iterate(q)
        return log_scale + math.log(mass)

    def confine_prob_exact(self, q: ConfineQuery) -> float:
        """P(A_{n,m}); underflows to 0.0 once n * rate passes ~700, see confine_probability."""
        log_scale, mass = self._iterate(q)
        return math.exp(log_scale) * mass

    def confine_log_prob_spectral(self, q: ConfineQuery) -> float:
        """
        log P(A_{n,m}) from the eigen-expansion of the killed chain.

        Odd modes j only contribute (the start is the centre). Terms whose
        relative weight drops below exp(SPECTRAL_CUTOFF) are truncated.
        """
        self._check_states(q.m)
        size = 2 * q.m + 1
        if q.n == 0:
            return 0.0

        j = np.arange(1, size + 1, 2, dtype=np.float64)
        theta = j * math.pi / (size + 1)
        log_lam = 2.0 * np.log(np.cos(theta / 2.0))
        rel = q.n * (log_lam - log_lam[0])
        keep = rel > settings.SPECTRAL_CUTOFF
        theta, rel = theta[keep], rel[keep]

        centre = np.sin((q.m + 1) * theta)
        mass = np.sin(size * theta / 2.0) * np.sin((size + 1) * theta / 2.0) / np.sin(theta / 2.0)
        coeff = (2.0 / (size + 1)) * centre * mass
        total = float(np.sum(coeff * np.exp(rel)))
        if total <= 0.0:
            # cancellation among many modes; only happens for small n
            return self.confine_log_prob_exact(q)
        return q.n * float(log_lam[0]) + math.log(total)

    def confine_log_prob(self, q: ConfineQuery) -> float:
        """Exact iteration when affordable, otherwise the spectral formula."""
        if q.n * (2 * q.m + 1) <= settings.ZLINE_ITERATION_BUDGET:
            return self.confine_log_prob_exact(q)
        return self.confine_log_prob_spectral(q)

    def confine_probability(self, q: ConfineQuery) -> ConfinementProbability:
        rate = self.confine_rate(q.m)
        iterate = q.n * (2 * q.m + 1) <= settings.ZLINE_ITERATION_BUDGET
        log_prob = self.confine_log_prob(q)
        underflow = q.n * rate > UNDERFLOW_RATE
        if underflow:
            logger.info("n * rate = %.1f; reporting the log-probability only", q.n * rate)
        return ConfinementProbability(
            n=q.n,
            m=q.m,
            log_prob=log_prob,
            prob=None if underflow else (self.confine_prob_exact(q) if iterate else math.exp(log_prob)),
            rate=rate,
            method="iteration" if iterate else "spectral",
        )

    def sample_lazy_ranges(self, n: int, reps: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        """Running min and max of reps independent projected walks of n steps."""
        if n < 0:
            raise ValidationException("n must be >= 0", field="n")
        position = np.zeros(reps, dtype=np.int64)
        low = np.zeros(reps, dtype=np.int64)
        high = np.zeros(reps, dtype=np.int64)
        block = max(1, 1_000_000 // max(reps, 1))
        for start in range(0, n, block):
            steps = STEP_OF_CODE[rng.integers(0, 4, size=(min(block, n - start), reps))]
            walk = position + np.cumsum(steps, axis=0)
            low = np.minimum(low, walk.min(axis=0))
            high = np.maximum(high, walk.max(axis=0))
            position = walk[-1]
        return low, high

    def sample_lazy_range(self, n: int, rng: np.random.Generator) -> Tuple[int, int]:
        low, high = self.sample_lazy_ranges(n, 1, rng)
        return int(low[0]), int(high[0])

    def survival_table(self, q: ConfineQuery) -> np.ndarray:
        """
        Row t holds P_x(walk survives t more steps) over x in [-m, m],
        each row normalised to max 1 (only ratios within a row are used).
        """
        self._check_states(q.m)
        table = np.empty((q.n + 1, 2 * q.m + 1))
        h = np.ones(2 * q.m + 1)
        table[0] = h
        for t in range(1, q.n + 1):
            nxt = 0.5 * h
            nxt[1:] += 0.25 * h[:-1]
            nxt[:-1] += 0.25 * h[1:]
            h = nxt / nxt.max()
            table[t] = h
        return table

    def conditioned_steps(self, q: ConfineQuery, size: int, rng: np.random.Generator) -> np.ndarray:
        """
        Exact samples of the projected path conditioned on A_{n,m}.

        Each step is drawn from the Doob h-transform of the killed chain:
        from x with r steps left, move to y with weight P(x, y) h_{r-1}(y).

        Returns:
            Array of shape (size, n) with entries in {-1, 0, +1}
        """
        table = self.survival_table(q)
        x = np.full(size, q.m, dtype=np.int64)  # index of 0 in [-m, m]
        steps = np.empty((size, q.n), dtype=np.int64)
        top = 2 * q.m
        for i in range(q.n):
            h = table[q.n - i - 1]
            w_left = np.where(x > 0, 0.25 * h[np.maximum(x - 1, 0)], 0.0)
            w_stay = 0.5 * h[x]
            w_right = np.where(x < top, 0.25 * h[np.minimum(x + 1, top)], 0.0)
            u = rng.random(size) * (w_left + w_stay + w_right)
            step = np.where(u < w_left, -1, np.where(u < w_left + w_stay, 0, 1))
            steps[:, i] = step
            x = x + step
        return steps

    @staticmethod
    def steps_to_codes(steps: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Lift projected steps to letters: +1 -> a, -1 -> A, 0 -> b or B uniformly."""
        hold = rng.integers(2, 4, size=steps.shape)
        return np.where(steps == 1, 0, np.where(steps == -1, 1, hold))
