import logging
import math
from collections import defaultdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import settings
from ..core.exception import ResourceGuardException, ValidationException
from ..core.parallel import run_chunked
from ..models.scaling import RuleKind, ScalingRule
from ..models.vertex import ROOT, VertexAddress
from ..repositories.probe_repository import ProbeSetRepository
from ..schemas.analysis import (
    BoundRow,
    BoundTable,
    CountingConstants,
    EnergyTrace,
    GreenEstimate,
    GreenPoint,
    PACheck,
    VolumeFit,
)
from ..schemas.zline import ConfineQuery
from ..utils.fitting import geometric_grid, loglog_slope
from .graph_service import GraphService
from .orbit_service import OrbitService
from .walk_service import WalkService
from .zline_service import ZLineService

logger = logging.getLogger(__name__)

Flow = List[Tuple[VertexAddress, VertexAddress, float]]

DENSE_M = 64
M_GRID_FACTOR = 1.02
DEFAULT_N_LIST = [10**e for e in range(3, 8)]


class AnalysisService:
    """Transience diagnostics, volume growth and the return-probability bound."""

    def __init__(self, rule: ScalingRule, probes: Optional[ProbeSetRepository] = None):
        self.rule = rule
        self.graph = GraphService(rule)
        self.zline = ZLineService()
        self.walks = WalkService(rule, self.graph)
        self.orbits = OrbitService(rule, probes or ProbeSetRepository(self.graph))

    # ------------------------------------------------------------------
    # Flow
    # ------------------------------------------------------------------

    def energy_converges(self) -> Optional[bool]:
        """Whether sum alpha_k / 2^k is finite, decided from the rule's form."""
        if self.rule.kind is RuleKind.GEOMETRIC:
            return self.rule.ratio < 2
        # canonical terms decay like 1/k^2, constant ones geometrically, explicit rules are finite
        return True

    def flow_energy(self, k_max: int) -> EnergyTrace:
        """
        Energy of the flow sending 1/2^k along both halves of every level-k
        cycle and through both b-edges below its midpoint.

        Raises:
            ValidationException: If k_max < 1
        """
        if k_max < 1:
            raise ValidationException("k_max must be >= 1", field="k_max")
        exact, displayed = [], []
        energy = shown = 0.0
        for k in range(1, k_max + 1):
            alpha = self.rule.alpha(k)
            energy += (alpha + 1) / 2**k
            shown += alpha / 2 ** (k + 1)
            exact.append(energy)
            displayed.append(shown)
        return EnergyTrace(
            k_max=k_max, partial_sums=exact, half_energy=displayed, converges=self.energy_converges()
        )

    def unit_flow(self, k_max: int) -> Flow:
        """
        Directed edges and values of the unit flow on levels 1..k_max and the
        b-edges leaving level-k_max midpoints.

        Raises:
            ValidationException: If an explicit rule has no level below k_max
            ResourceGuardException: If the levels hold more than MAX_BALL_SIZE vertices
        """
        if k_max < 1:
            raise ValidationException("k_max must be >= 1", field="k_max")
        if self.rule.kind is RuleKind.EXPLICIT and k_max >= self.rule.depth:
            raise ValidationException(
                f"explicit rules carry no flow past level {self.rule.depth - 1}", field="k_max"
            )
        vertices = sum(2 ** (k - 1) * 2 * self.rule.alpha(k) for k in range(1, k_max + 1))
        if vertices > settings.MAX_BALL_SIZE:
            raise ResourceGuardException("analysis.flow", settings.MAX_BALL_SIZE, vertices)

        flow: Flow = []
        for k in range(1, k_max + 1):
            alpha = self.rule.alpha(k)
            length = 2 * alpha
            value = 1.0 / 2**k
            for path in range(2 ** (k - 1)):
                # both halves run from the cycle start to the midpoint
                for p in range(alpha):
                    flow.append((VertexAddress(k, path, p), VertexAddress(k, path, p + 1), value))
                    lower = VertexAddress(k, path, (length - p) % length)
                    flow.append((lower, VertexAddress(k, path, length - p - 1), value))
                mid = VertexAddress(k, path, alpha)
                for bit in (0, 1):
                    flow.append((mid, VertexAddress(k + 1, (path << 1) | bit, 0), value))
        return flow

    def kirchhoff_check(self, k_max: int, flow: Optional[Flow] = None) -> bool:
        """Unit outflow at o and zero net flow at every other vertex of levels 1..k_max."""
        flow = self.unit_flow(k_max) if flow is None else flow
        net: Dict[VertexAddress, float] = defaultdict(float)
        for x, y, value in flow:
            net[x] += value
            net[y] -= value
        tolerance = settings.FLOW_TOLERANCE
        for vertex, balance in net.items():
            if vertex.level > k_max:
                continue
            target = 1.0 if vertex == ROOT else 0.0
            if abs(balance - target) > tolerance:
                logger.debug("Flow imbalance %.3g at %s", balance - target, vertex)
                return False
        return abs(net[ROOT] - 1.0) <= tolerance

    # ------------------------------------------------------------------
    # Green function
    # ------------------------------------------------------------------

    def green_function_estimate(
        self, n: int, reps: int, seed: int, threads: Optional[int] = None
    ) -> GreenEstimate:
        """Mean visits to o up to T in {0, n/4, n/2, n} for the induced walk from o."""
        if n < 1:
            raise ValidationException("n must be >= 1", field="n")
        if reps < 1:
            raise ValidationException("reps must be >= 1", field="reps")
        times = sorted({0, n // 4, n // 2, n})

        def task(offset: int, size: int, rng: np.random.Generator) -> np.ndarray:
            counts = self.walks.visit_counts(ROOT, times, size, rng)
            return np.stack([counts.sum(axis=0), (counts.astype(float) ** 2).sum(axis=0)])

        totals = np.sum(run_chunked(task, reps, seed, threads), axis=0)
        mean = totals[0] / reps
        var = np.maximum(totals[1] / reps - mean**2, 0.0)
        stderr = np.sqrt(var / reps)
        points = [GreenPoint(T=t, green=float(g), stderr=float(s)) for t, g, s in zip(times, mean, stderr)]
        return GreenEstimate(n=n, reps=reps, points=points)

    # ------------------------------------------------------------------
    # Volume growth
    # ------------------------------------------------------------------

    def predicted_growth_exponent(self) -> Optional[float]:
        if self.rule.kind is not RuleKind.GEOMETRIC:
            return None
        return 1 + math.log(2) / math.log(self.rule.ratio)

    @staticmethod
    def return_exponent(d: float) -> float:
        """Return-probability exponent d / (d + 2) for volume growth exponent d."""
        return d / (d + 2)

    def volume_exponent_fit(self, radii: Sequence[int]) -> VolumeFit:
        radii = [int(r) for r in radii]
        if len(radii) < 2 or any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValidationException("radii must be increasing with at least two entries", field="radii")
        volumes = [self.graph.ball_volume(r) for r in radii]
        return VolumeFit(
            radii=radii,
            volumes=volumes,
            slope=loglog_slope(radii, volumes),
            predicted=self.predicted_growth_exponent(),
        )

    # ------------------------------------------------------------------
    # Return-probability bound
    # ------------------------------------------------------------------

    @staticmethod
    def default_m_grid(n: int) -> List[int]:
        """Every integer up to 64, then 2% steps up to n^(1/3)."""
        top = max(1, round(n ** (1.0 / 3.0)))
        # integer cube root; the float root of a perfect cube can land just below it
        while top > 1 and top**3 > n:
            top -= 1
        dense = list(range(1, min(DENSE_M, top) + 1))
        if top <= DENSE_M:
            return dense
        return dense + [m for m in geometric_grid(DENSE_M, top, M_GRID_FACTOR) if m > DENSE_M]

    def log_A_upper(self, m: int, constants: CountingConstants) -> float:
        """
        log of the |A| bound: 2^{|B_Km|} lamp configurations times the
        path count 2Km * (8m)^{c_path m} times e^{c_deep m^2 log m} for the
        vertices near o.
        """
        km = math.ceil(constants.K * m)
        inner = self.graph.ball_volume(km)
        return (
            inner * math.log(2)
            + math.log(2 * km)
            + constants.c_path * m * math.log(8 * m)
            + constants.c_deep * m * m * math.log(m)
        )

    def bound_pipeline(
        self,
        n_list: Optional[Sequence[int]] = None,
        m_grid: Optional[Sequence[int]] = None,
        constants: Optional[CountingConstants] = None,
    ) -> BoundTable:
        """
        log p_2n(e,e) >= 2 log P(A_{n,m}) - log|A|, maximized over m.

        Args:
            n_list: Walk lengths (default 10^3 .. 10^7)
            m_grid: Candidate m values (default dense per n)
            constants: Counting constants for |A|

        Returns:
            One row per n plus log-log slopes of -log_bound and m_opt
        """
        n_list = sorted(int(n) for n in (n_list or DEFAULT_N_LIST))
        constants = constants or CountingConstants()
        if m_grid is not None and not list(m_grid):
            raise ValidationException("m grid must not be empty", field="m_grid")
        if any(n < 1 for n in n_list):
            raise ValidationException("n must be >= 1", field="n_list")

        upper_cache: Dict[int, float] = {}
        rows = []
        for n in n_list:
            best: Optional[BoundRow] = None
            for m in m_grid or self.default_m_grid(n):
                if m not in upper_cache:
                    upper_cache[m] = self.log_A_upper(m, constants)
                lower = self.zline.confine_log_prob(ConfineQuery(n=n, m=m))
                bound = 2 * lower - upper_cache[m]
                if best is None or bound > best.log_bound:
                    best = BoundRow(
                        n=n, m_opt=m, log_pA_lower=lower, log_A_upper=upper_cache[m], log_bound=bound
                    )
            rows.append(best)
            logger.debug("n = %d: m_opt = %d, log bound = %.4g", n, best.m_opt, best.log_bound)

        fitted = m_exponent = None
        if len(rows) >= 2:
            ns = [row.n for row in rows]
            fitted = loglog_slope(ns, [-row.log_bound for row in rows])
            m_exponent = loglog_slope(ns, [row.m_opt for row in rows])
        return BoundTable(rows=rows, constants=constants, fitted_exponent=fitted, m_opt_exponent=m_exponent)

    def pA_cross_check(
        self,
        n: int,
        m: int,
        reps: int,
        seed: int,
        constants: Optional[CountingConstants] = None,
        threads: Optional[int] = None,
    ) -> PACheck:
        """
        Share of unconditioned length-n words whose inverted orbit and
        displacement stay within K m, against P(A_{n,m}).
        """
        constants = constants or CountingConstants()
        km = constants.K * m
        _, rows = self.orbits.conditioned_orbit_stats(n, m, reps, seed, threads=threads, condition=False)
        inside = sum(1 for row in rows if row.orbit_radius <= km and row.max_displacement <= km)
        p_hat = inside / reps
        stderr = math.sqrt(p_hat * (1 - p_hat) / reps)
        p_confine = self.zline.confine_prob_exact(ConfineQuery(n=n, m=m))
        return PACheck(
            n=n,
            m=m,
            reps=reps,
            K=constants.K,
            p_hat=p_hat,
            stderr=stderr,
            p_confine=p_confine,
            consistent=p_hat >= p_confine - 3 * max(stderr, 1.0 / reps),
        )
