import numpy as np
import pytest

from bubblewalk.config import settings
from bubblewalk.core.exception import ResourceGuardException
from bubblewalk.repositories.probe_repository import EXACT, ProbeSetRepository
from bubblewalk.repositories.repository import BaseRepository


@pytest.mark.unit
class TestBaseRepository:
    def test_get_or_create_builds_once(self):
        """The factory runs on the first miss only."""
        repo = BaseRepository()
        calls = []

        def factory():
            calls.append(1)
            return ["built"]

        first = repo.get_or_create("key", factory)
        second = repo.get_or_create("key", factory)

        assert first is second
        assert len(calls) == 1
        assert repo.get("missing") is None

    def test_create_keeps_existing(self):
        """An existing entry wins over a later create."""
        repo = BaseRepository()
        repo.create("key", 1)

        assert repo.create("key", 2) == 1


@pytest.mark.unit
class TestProbeSetRepository:
    @pytest.fixture
    def fig1_probes(self, fig1_graph):
        return ProbeSetRepository(fig1_graph)

    @pytest.fixture
    def canonical_probes(self, canonical_graph):
        return ProbeSetRepository(canonical_graph)

    @pytest.mark.parametrize("radius, reach", [(0, 1), (5, 2), (9, 4)])
    def test_weights_cover_ball_fig1(self, fig1_probes, fig1_graph, radius, reach):
        """Class weights add up to the ball volume."""
        classes = fig1_probes.classes(radius, reach)

        assert int(classes.weight.sum()) == fig1_graph.ball_volume(radius)

    @pytest.mark.parametrize("radius, reach", [(20, 1), (40, 3)])
    def test_weights_cover_ball_canonical(self, canonical_probes, canonical_graph, radius, reach):
        """Class weights add up to the ball volume on deeper levels too."""
        classes = canonical_probes.classes(radius, reach)

        assert int(classes.weight.sum()) == canonical_graph.ball_volume(radius)
        assert classes.size <= canonical_graph.ball_volume(radius)

    def test_displacement_set_cached(self, fig1_probes):
        """Repeated requests return the stored object."""
        assert fig1_probes.displacement_set(1) is fig1_probes.displacement_set(1)

    def test_anchor_level(self, fig1_probes):
        """First level whose cycle is longer than the span, else the deepest level."""
        assert fig1_probes.anchor_level(1) == 1
        assert fig1_probes.anchor_level(2) == 2
        assert fig1_probes.anchor_level(10) == 3

    def test_deep_representatives(self, fig1_probes):
        """Start, quarter point and midpoint of the two levels below j."""
        deep = fig1_probes.deep_representatives(1)
        addresses = set(zip(deep.reps.level.tolist(), deep.reps.pos.tolist()))

        assert addresses == {(2, 0), (2, 1), (2, 3), (3, 0), (3, 2), (3, 4)}
        assert np.all(deep.weight == 1)
        assert np.all(deep.key_level == EXACT)

    def test_deep_representatives_past_depth(self, fig1_probes):
        """No levels exist below the truncated graph."""
        assert fig1_probes.deep_representatives(3).size == 0

    def test_split_conserves_weight(self, canonical_probes):
        """Refined classes stand for exactly the vertices of the classes they replace."""
        classes = canonical_probes.classes(20, 1)
        index = np.flatnonzero(classes.key_level >= 3)
        assert index.size > 0

        finer = canonical_probes.split(classes, index, np.full(index.size, 2))

        assert int(finer.weight.sum()) == int(classes.weight[index].sum())
        assert np.all(finer.key_level == 2)

    def test_split_without_refinement(self, canonical_probes):
        """Targets at or above the current key leave nothing to split."""
        classes = canonical_probes.classes(20, 1)
        index = np.arange(min(5, classes.size))

        finer = canonical_probes.split(classes, index, classes.key_level[index] + 1)

        assert finer.size == 0

    def test_guard(self, canonical_probes, monkeypatch):
        """Too many classes are refused with the guard named."""
        monkeypatch.setattr(settings, "MAX_PROBE_CLASSES", 5)

        with pytest.raises(ResourceGuardException) as exc_info:
            canonical_probes.classes(20, 1)

        assert "probe.classes" in exc_info.value.message
