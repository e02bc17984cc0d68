import itertools
import logging
import math
from typing import Dict, List, NamedTuple, Optional, Set

import numpy as np

from ..config import settings
from ..core.exception import ValidationException
from ..core.parallel import run_chunked
from ..models.scaling import ScalingRule
from ..models.vertex import ROOT, Letter, VertexAddress, Word, format_word, invert_word, word_from_codes
from ..models.wreath import WreathElement
from ..repositories.probe_repository import ProbeSetRepository
from ..schemas.wreath import HarmonicEstimate, SwsRow, SwsSummary
from .group_service import GroupService
from .orbit_service import OrbitService
from .walk_service import WalkService

logger = logging.getLogger(__name__)

SUPPORT_SAMPLES = 100


class _HarmonicChunk(NamedTuple):
    off: int
    late: int


class WreathService:
    """Arithmetic and random walks on the lamplighter Z2 wr_S Gamma."""

    def __init__(self, rule: ScalingRule, probes: Optional[ProbeSetRepository] = None):
        self.rule = rule
        self.group = GroupService(rule, probes)
        self.graph = self.group.graph
        self.orbits = OrbitService(rule, self.group.probes)
        self.walks = WalkService(rule, self.graph)

    def _pull_back(self, lamps, w: Word) -> Set[VertexAddress]:
        """{x : x.w in lamps}"""
        inverse = invert_word(w)
        return {self.graph.apply_word(y, inverse) for y in lamps}

    def multiply(self, e1: WreathElement, e2: WreathElement) -> WreathElement:
        """(f, g)(f', g') = (f + f' pulled back through g, g g')"""
        lamps = set(e1.lamps) ^ self._pull_back(e2.lamps, e1.base)
        return WreathElement(lamps=frozenset(lamps), base=e1.base + e2.base)

    def inverse(self, e: WreathElement) -> WreathElement:
        lamps = {self.graph.apply_word(x, e.base) for x in e.lamps}
        return WreathElement(lamps=frozenset(lamps), base=invert_word(e.base))

    def validate(self, e: WreathElement) -> WreathElement:
        """Check that every lit lamp sits on a canonical address."""
        for x in e.lamps:
            self.graph.validate(x)
        return e

    def elements_equal(self, e1: WreathElement, e2: WreathElement) -> bool:
        return e1.lamps == e2.lamps and self.group.elements_equal(e1.base, e2.base)

    def is_identity(self, e: WreathElement) -> bool:
        return not e.lamps and self.group.is_identity(e.base)

    def sws_step(self, state: WreathElement, g: Letter, s1: int, s2: int) -> WreathElement:
        """
        state * (l, e) * (0, g) * (l', e), where l lights o iff s1 and l' iff s2.

        Raises:
            ValidationException: If a switch is not a bit
        """
        if s1 not in (0, 1) or s2 not in (0, 1):
            raise ValidationException("switch outcomes must be 0 or 1", field="switch")
        lamp = WreathElement(lamps=frozenset({ROOT}))
        if s1:
            state = self.multiply(state, lamp)
        state = self.multiply(state, WreathElement.generator(g))
        if s2:
            state = self.multiply(state, lamp)
        return state

    def simulate_sws(
        self, n: int, rng: np.random.Generator, start: Optional[WreathElement] = None
    ) -> SwsSummary:
        """
        Run n SWS steps from `start` with uniform letters and uniform switches.

        Step i switches at u_{i-1}.h^-1 and u_i.h^-1, where u is the inverted
        orbit of the sampled word and h the start base, so the lamps follow
        from the orbit points without multiplying elements.

        Raises:
            ResourceGuardException: If orbit tracking exceeds its limit
        """
        if n < 0:
            raise ValidationException("n must be >= 0", field="n")
        start = self.validate(start or WreathElement.identity())
        word = word_from_codes(rng.integers(0, 4, size=n))
        switches = rng.integers(0, 2, size=(n, 2))
        points = self.orbits.inverted_orbit(word).points

        to_site: Dict[VertexAddress, VertexAddress] = {}
        back = invert_word(start.base)

        def site(u: VertexAddress) -> VertexAddress:
            if u not in to_site:
                to_site[u] = self.graph.apply_word(u, back) if back else u
            return to_site[u]

        # toggles at u_k: s1 of step k + 1 and s2 of step k
        flips = np.zeros(n + 1, dtype=np.int64)
        flips[:n] += switches[:, 0]
        flips[1:] += switches[:, 1]

        sample_times = sorted({round(n * i / SUPPORT_SAMPLES) for i in range(SUPPORT_SAMPLES + 1)})
        lamps = set(start.lamps)
        trace: List[int] = []
        toggled: Set[VertexAddress] = set()
        slot = 0
        for k in range(n + 1):
            # switches of step k + 1 act after time k
            if k >= 1 and switches[k - 1, 1]:
                lamps ^= {site(points[k])}
            while slot < len(sample_times) and sample_times[slot] == k:
                trace.append(len(lamps))
                slot += 1
            if k < n and switches[k, 0]:
                lamps ^= {site(points[k])}
            if flips[k]:
                toggled.add(site(points[k]))

        returned = not lamps and site(points[-1]) == ROOT and self.group.is_identity(start.base + word)
        return SwsSummary(
            n=n,
            sample_times=sample_times,
            support_size_trace=trace,
            toggle_sites=frozenset(toggled),
            returned_to_identity=returned,
            word=format_word(word),
            switches=[tuple(int(s) for s in pair) for pair in switches],
        )

    def simulate_many(
        self,
        n: int,
        reps: int,
        seed: int,
        threads: Optional[int] = None,
        start: Optional[WreathElement] = None,
    ) -> List[SwsRow]:
        """Independent SWS runs, one row per replica, seeded per chunk."""
        if reps < 1:
            raise ValidationException("reps must be >= 1", field="reps")

        def task(offset: int, size: int, rng: np.random.Generator) -> List[SwsRow]:
            rows = []
            for i in range(size):
                summary = self.simulate_sws(n, rng, start)
                rows.append(
                    SwsRow(
                        replica=offset + i,
                        final_support=summary.final_support,
                        returned=summary.returned_to_identity,
                        toggles=len(summary.toggle_sites),
                    )
                )
            return rows

        return [row for chunk in run_chunked(task, reps, seed, threads) for row in chunk]

    def exact_return_probability(self, n: int) -> float:
        """
        P(X_n = e) for the SWS walk from the identity, by enumerating every
        letter sequence and switch outcome.

        Raises:
            ValidationException: If n exceeds MAX_EXACT_SWS_STEPS
        """
        if n < 0 or n > settings.MAX_EXACT_SWS_STEPS:
            raise ValidationException(f"n must lie in [0, {settings.MAX_EXACT_SWS_STEPS}]", field="n")
        hits = 0
        for letters in itertools.product(Letter, repeat=n):
            if not self.group.is_identity(letters):
                continue
            for bits in itertools.product((0, 1), repeat=2 * n):
                state = WreathElement.identity()
                for i, g in enumerate(letters):
                    state = self.sws_step(state, g, bits[2 * i], bits[2 * i + 1])
                hits += not state.lamps
        return hits / 16**n

    def harmonic_estimate(
        self,
        start: WreathElement,
        horizon: int,
        reps: int,
        seed: int,
        threads: Optional[int] = None,
    ) -> HarmonicEstimate:
        """
        Estimate P(lamp at o is off at time `horizon` | X_0 = start).

        The lamp at o is switched at time k exactly when the induced walk
        started at o.h stands on o at time k; each such visit brings one
        switch (two for 0 < k < horizon), each toggling with probability 1/2.

        Args:
            start: Initial wreath element (f, h)
            horizon: Number of SWS steps
            reps: Monte Carlo replicas
            seed: Run seed
            threads: Worker count (None = settings)

        Returns:
            The estimate, its binomial standard error and the late-toggle share
        """
        if horizon < 0:
            raise ValidationException("horizon must be >= 0", field="horizon")
        if reps < 1:
            raise ValidationException("reps must be >= 1", field="reps")
        self.validate(start)
        initially_on = ROOT in start.lamps
        if horizon == 0:
            return HarmonicEstimate(
                horizon=0, reps=reps, p_hat=0.0 if initially_on else 1.0, stderr=0.0, late_toggle_fraction=0.0
            )

        walker = self.graph.apply_word(ROOT, start.base)
        late_from = math.ceil(0.9 * horizon)

        def task(offset: int, size: int, rng: np.random.Generator) -> _HarmonicChunk:
            lamp = np.full(size, initially_on)
            last = np.full(size, -1, dtype=np.int64)
            for k, at_root in enumerate(self.walks.root_hits(walker, horizon, size, rng)):
                if not at_root.any():
                    continue
                switches = (k < horizon) + (k > 0)
                bits = rng.integers(0, 2, size=(size, switches)).sum(axis=1) % 2
                flip = at_root & (bits == 1)
                lamp ^= flip
                last[flip] = k
            return _HarmonicChunk(int(np.sum(~lamp)), int(np.sum(last >= late_from)))

        chunks = run_chunked(task, reps, seed, threads)
        p_hat = sum(c.off for c in chunks) / reps
        late = sum(c.late for c in chunks) / reps
        stderr = math.sqrt(p_hat * (1 - p_hat) / reps)
        logger.info("Harmonic estimate at horizon %d: %.4f +/- %.4f", horizon, p_hat, stderr)
        return HarmonicEstimate(horizon=horizon, reps=reps, p_hat=p_hat, stderr=stderr, late_toggle_fraction=late)
